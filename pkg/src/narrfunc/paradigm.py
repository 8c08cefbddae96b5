"""Storyline paradigms: anchored patterns over function sequences.

A paradigm is a short template like ``(A)->(Q)->{O/S}``: the first and
last elements anchor the sequence's first and last symbols, interior
elements must occur in order strictly between them.  ``->`` marks linear
development and ``~>`` nonlinear development; the distinction matters
for mining and reporting, not for matching, because nonlinear plots
share only their initial and terminal markers.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from statistics import median

from . import taxonomy
from .errors import (
    EmptyCorpus,
    EmptySequence,
    MiningFailed,
    PatternSyntaxError,
    TooFewElements,
    UnknownSymbol,
)

LINEAR = "linear"
NONLINEAR = "nonlinear"

_CONNECTOR_TOKENS = {"->": LINEAR, "~>": NONLINEAR}


@dataclass(frozen=True)
class AltSet:
    """Alternatives for one slot, e.g. ``{O/S}``."""

    options: tuple

    def __post_init__(self):
        if len(self.options) < 2:
            raise ValueError("AltSet needs at least 2 options")
        if len(set(self.options)) != len(self.options):
            raise ValueError("AltSet options must be distinct")

    def __str__(self):
        return "{" + "/".join(self.options) + "}"


def element_accepts(element, symbol):
    if isinstance(element, AltSet):
        return symbol in element.options
    return symbol == element


@dataclass
class ParadigmPattern:
    elements: tuple  # symbols and AltSets, length >= 2
    connectors: tuple  # LINEAR/NONLINEAR, length len(elements) - 1
    plot_label: str = None

    def __post_init__(self):
        if len(self.elements) < 2:
            raise TooFewElements("pattern needs at least 2 elements")
        if len(self.connectors) != len(self.elements) - 1:
            raise ValueError("connector count must be element count - 1")


@dataclass
class MatchResult:
    matched: bool
    bindings: list = None  # sequence index per element, strictly increasing


def _emit_element(element):
    if isinstance(element, AltSet):
        return str(element)
    return f"({element})"


def emit_pattern(pattern):
    """Canonical ASCII form; re-parses to an equal pattern."""
    parts = [_emit_element(pattern.elements[0])]
    for connector, element in zip(pattern.connectors, pattern.elements[1:]):
        parts.append("->" if connector == LINEAR else "~>")
        parts.append(_emit_element(element))
    return "".join(parts)


_TOKEN_RE = re.compile(
    r"\(\s*([A-Za-z]{1,2})\s*\)"          # (A)
    r"|\{\s*([A-Za-z/ ]+?)\s*\}"          # {O/S}
    r"|(->|~>)"
    r"|(\s+)"
)


def parse_pattern(s, plot_label=None):
    """Parse the ASCII pattern grammar, e.g. ``(A)->(Q)->{O/S}``."""
    elements = []
    connectors = []
    expect_element = True
    pos = 0
    while pos < len(s):
        m = _TOKEN_RE.match(s, pos)
        if not m:
            raise PatternSyntaxError(pos, f"unexpected input {s[pos:pos+8]!r}")
        pos = m.end()
        if m.group(4):  # whitespace
            continue
        if m.group(3):  # connector
            if expect_element:
                raise PatternSyntaxError(m.start(), "connector without element")
            connectors.append(_CONNECTOR_TOKENS[m.group(3)])
            expect_element = True
            continue
        if not expect_element:
            raise PatternSyntaxError(m.start(), "missing connector")
        if m.group(1):
            elements.append(taxonomy.parse_symbol(m.group(1)))
        else:
            options = tuple(t.strip() for t in m.group(2).split("/"))
            for option in options:
                taxonomy.parse_symbol(option)
            if len(options) < 2:
                raise PatternSyntaxError(m.start(), "alternation needs >= 2 symbols")
            elements.append(AltSet(options))
        expect_element = False
    if expect_element:
        raise PatternSyntaxError(len(s), "dangling connector" if elements
                                 else "empty pattern")
    if len(elements) < 2:
        raise TooFewElements(f"pattern has {len(elements)} element(s), need >= 2")
    return ParadigmPattern(tuple(elements), tuple(connectors), plot_label)


def builtin_paradigms():
    """The six stock plot paradigms."""
    specs = [
        ("battle", "(A)->(Q)->{O/S}"),
        ("emotional", "(Em)~>(Ch)"),
        ("difficult_task", "(Y)~>(Z)"),
        ("adventure", "(P)~>{M/O}"),
        ("pretending", "(W)->(De)~>(S)"),
        ("daily_life", "(A)~>(Ch)"),
    ]
    return [parse_pattern(text, plot_label=label) for label, text in specs]


def matches(seq, pattern):
    """Anchored match: first/last symbols hit the anchors, interior
    elements occur in order strictly between them (greedy leftmost)."""
    symbols = list(seq)
    if not symbols:
        raise EmptySequence("cannot match an empty sequence")
    last = len(symbols) - 1
    if last == 0:
        # A paradigm describes a progression; one position cannot bind
        # both anchors.
        return MatchResult(False)
    first_el = pattern.elements[0]
    last_el = pattern.elements[-1]
    if not element_accepts(first_el, symbols[0]):
        return MatchResult(False)
    if not element_accepts(last_el, symbols[last]):
        return MatchResult(False)
    bindings = [0]
    pos = 0
    for element in pattern.elements[1:-1]:
        found = None
        for i in range(pos + 1, last):
            if element_accepts(element, symbols[i]):
                found = i
                break
        if found is None:
            return MatchResult(False)
        bindings.append(found)
        pos = found
    bindings.append(last)
    return MatchResult(True, bindings)


def classify(seq, patterns):
    """Labels of every matching pattern, in input order."""
    return [p.plot_label for p in patterns if matches(seq, p).matched]


def support(seqs, pattern):
    """Fraction of sequences matched, as an exact rational."""
    seqs = list(seqs)
    if not seqs:
        raise EmptyCorpus("support over an empty corpus")
    hits = sum(1 for s in seqs if matches(s, pattern).matched)
    return Fraction(hits, len(seqs))


def _mine_anchor(position_symbols, n_total, min_support, max_alt):
    """Pick the most frequent symbol(s) at one end, widening to an
    alternation set until the combined frequency reaches min_support."""
    counts = {}
    for symbol in position_symbols:
        counts[symbol] = counts.get(symbol, 0) + 1
    ranked = sorted(counts, key=lambda s: (-counts[s], s))
    chosen = []
    covered = 0
    for symbol in ranked[:max_alt]:
        chosen.append(symbol)
        covered += counts[symbol]
        if Fraction(covered, n_total) >= min_support:
            if len(chosen) == 1:
                return chosen[0]
            return AltSet(tuple(chosen))
    raise MiningFailed(
        f"no anchor reaches support {min_support} within {max_alt} alternatives")


def mine(seqs, min_support=Fraction(3, 5), max_alt=2):
    """Induce a paradigm from a sequence corpus.

    Anchors come from first/last symbol frequencies.  Interior elements
    are symbols present strictly between the anchors in at least
    min_support of the anchor-conforming sequences, ordered by their
    median relative position.  If the resulting linear pattern does not
    itself reach min_support on the corpus (the interiors' relative
    order is not stable enough), the interiors are dropped and the
    anchors-only nonlinear pattern is returned.
    """
    seqs = [list(s) for s in seqs]
    if not seqs:
        raise EmptyCorpus("mining over an empty corpus")
    min_support = Fraction(min_support).limit_denominator(10**6)
    if not 0 < min_support <= 1:
        raise ValueError("min_support must be in (0, 1]")
    if max_alt < 1:
        raise ValueError("max_alt must be >= 1")
    n = len(seqs)
    usable = [s for s in seqs if len(s) >= 2]
    if not usable:
        raise MiningFailed("no sequence long enough to carry two anchors")
    start = _mine_anchor([s[0] for s in usable], n, min_support, max_alt)
    end = _mine_anchor([s[-1] for s in usable], n, min_support, max_alt)

    conforming = [
        s for s in usable
        if element_accepts(start, s[0]) and element_accepts(end, s[-1])
    ]
    positions = {}  # symbol -> list of relative positions, one per sequence
    for s in conforming:
        span = len(s) - 1
        seen = {}
        for i in range(1, span):
            seen.setdefault(s[i], i / span)
        for symbol, rel in seen.items():
            positions.setdefault(symbol, []).append(rel)
    interior = [
        symbol for symbol, rels in positions.items()
        if Fraction(len(rels), len(conforming)) >= min_support
    ]
    interior.sort(key=lambda symbol: (median(positions[symbol]), symbol))

    def build(inner, connector):
        elements = (start, *inner, end)
        connectors = (connector,) * (len(elements) - 1)
        return ParadigmPattern(elements, connectors)

    if interior:
        candidate = build(tuple(interior), LINEAR)
        if support(seqs, candidate) >= min_support:
            return candidate
    fallback = build((), NONLINEAR)
    if support(seqs, fallback) >= min_support:
        return fallback
    raise MiningFailed("anchors reach support individually but not jointly")
