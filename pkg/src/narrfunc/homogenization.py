"""Structural homogenization of continuation episodes and corpus
frequency profiles.

Similarity between two episodes is symbol-level normalized edit
distance: substituting one narrative function for another is exactly the
kind of structural change we want to penalize.  An LCS-based variant is
available for sensitivity checks.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from . import taxonomy
from .annotation import AnnotatedSegment, Annotation
from .errors import EmptySequence, InsufficientNovels, TooFewEpisodes

EDIT = "edit"
LCS = "lcs"


@dataclass
class EpisodeSet:
    episodes: list  # FunctionSequence, all nonempty, >= 2 of them
    source_model: str = None
    preface_id: str = None


@dataclass
class HomogeneityReport:
    pairwise: list  # symmetric matrix, diagonal 1.0
    mean_similarity: float
    first_marker_consistency: float
    last_marker_consistency: float
    distinct_ratio: float
    entropy_bits: float


@dataclass
class FrequencyProfile:
    counts: dict  # all 34 symbols -> count
    total: int
    common_set: frozenset
    rare_set: frozenset

    @property
    def mean(self):
        return self.total / len(self.counts)


def edit_distance(a, b):
    """Unit-cost Levenshtein distance over symbol lists."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, sym_a in enumerate(a, start=1):
        cur = [i]
        for j, sym_b in enumerate(b, start=1):
            cost = 0 if sym_a == sym_b else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def lcs_length(a, b):
    prev = [0] * (len(b) + 1)
    for sym_a in a:
        cur = [0]
        for j, sym_b in enumerate(b, start=1):
            if sym_a == sym_b:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def seq_similarity(a, b, method=EDIT):
    """Similarity in [0, 1]; 1.0 iff the symbol lists are identical."""
    a, b = list(a), list(b)
    if not a or not b:
        raise EmptySequence("similarity needs two nonempty sequences")
    longest = max(len(a), len(b))
    if method == EDIT:
        return 1 - edit_distance(a, b) / longest
    if method == LCS:
        return lcs_length(a, b) / longest
    raise ValueError(f"unknown similarity method {method!r}")


def _modal_fraction(symbols):
    counts = {}
    for s in symbols:
        counts[s] = counts.get(s, 0) + 1
    return max(counts.values()) / len(symbols)


def analyze_episodes(episode_set, method=EDIT):
    """Pairwise similarity plus marker-consistency and diversity summaries."""
    episodes = [list(e) for e in episode_set.episodes]
    if len(episodes) < 2:
        raise TooFewEpisodes("need at least 2 episodes")
    if any(not e for e in episodes):
        raise EmptySequence("episodes must be nonempty")
    n = len(episodes)
    matrix = [[1.0] * n for _ in range(n)]
    upper = []
    for i in range(n):
        for j in range(i + 1, n):
            sim = seq_similarity(episodes[i], episodes[j], method=method)
            matrix[i][j] = matrix[j][i] = sim
            upper.append(sim)
    pooled = [s for e in episodes for s in e]
    counts = {}
    for s in pooled:
        counts[s] = counts.get(s, 0) + 1
    entropy = -sum(
        (c / len(pooled)) * math.log2(c / len(pooled)) for c in counts.values()
    )
    return HomogeneityReport(
        pairwise=matrix,
        mean_similarity=sum(upper) / len(upper),
        first_marker_consistency=_modal_fraction([e[0] for e in episodes]),
        last_marker_consistency=_modal_fraction([e[-1] for e in episodes]),
        distinct_ratio=len(counts) / len(pooled),
        entropy_bits=entropy,
    )


def frequency_profile(seqs):
    """Pool symbol counts and split them at the mean frequency.

    A symbol is common iff its count strictly exceeds total/34; the
    comparison is exact rational arithmetic, never rounded floats.
    """
    counts = {s: 0 for s in taxonomy.SYMBOLS}
    for seq in seqs:
        for symbol in seq:
            counts[symbol] += 1
    total = sum(counts.values())
    threshold = Fraction(total, len(counts))
    common = frozenset(s for s, c in counts.items() if c > threshold)
    rare = frozenset(taxonomy.SYMBOLS) - common
    return FrequencyProfile(counts=counts, total=total,
                            common_set=common, rare_set=rare)


def sample_windows(novels, seed, groups=5, novels_per_group=4, chars=2000):
    """Draw annotated sampling windows from full-novel segments.

    ``novels`` maps a novel id to its :class:`AnnotatedSegment`.  Novels
    are shuffled into ``groups`` groups, ``novels_per_group`` picked from
    each, and one contiguous ``chars``-character window cut per pick
    (whole novel when shorter).  Annotations inside a window are kept
    with offsets rebased to the window start.  Deterministic per seed.
    """
    ids = sorted(novels)
    if len(ids) < groups * novels_per_group:
        raise InsufficientNovels(
            f"{len(ids)} novels cannot fill {groups} groups of {novels_per_group}")
    rng = random.Random(seed)
    rng.shuffle(ids)
    group_size = len(ids) // groups
    windows = []
    for g in range(groups):
        group = ids[g * group_size:(g + 1) * group_size] if g < groups - 1 \
            else ids[(groups - 1) * group_size:]
        picked = rng.sample(group, novels_per_group)
        for novel_id in picked:
            segment = novels[novel_id]
            text = segment.clean_text
            if len(text) <= chars:
                start, end = 0, len(text)
            else:
                start = rng.randrange(len(text) - chars + 1)
                end = start + chars
            kept = [
                Annotation(a.offset - start, a.symbol)
                for a in segment.annotations
                if start <= a.offset < end
            ]
            windows.append(AnnotatedSegment(
                id=f"{novel_id}[{start}:{end}]",
                genre=segment.genre,
                clean_text=text[start:end],
                annotations=kept,
                annotator=segment.annotator,
            ))
    return windows
