import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from narrfunc import paradigm, taxonomy
from narrfunc.paradigm import (
    AltSet,
    LINEAR,
    NONLINEAR,
    builtin_paradigms,
    classify,
    element_accepts,
    emit_pattern,
    matches,
    mine,
    parse_pattern,
    support,
)
from narrfunc.errors import (
    EmptyCorpus,
    EmptySequence,
    MiningFailed,
    PatternSyntaxError,
    TooFewElements,
    UnknownSymbol,
)


def oracle_matches(symbols, pattern):
    """Independent matcher: enumerate every strictly increasing index
    assignment and check anchors plus element membership directly."""
    n = len(symbols)
    if n < 2:
        return False
    k = len(pattern.elements)
    for combo in itertools.combinations(range(n), k):
        if combo[0] != 0 or combo[-1] != n - 1:
            continue
        if all(element_accepts(el, symbols[i])
               for el, i in zip(pattern.elements, combo)):
            return True
    return False


class TestParsePattern:
    def test_battle(self):
        p = parse_pattern("(A)->(Q)->{O/S}")
        assert p.elements == ("A", "Q", AltSet(("O", "S")))
        assert p.connectors == (LINEAR, LINEAR)

    def test_nonlinear(self):
        p = parse_pattern("(Em)~>(Ch)")
        assert p.elements == ("Em", "Ch")
        assert p.connectors == (NONLINEAR,)

    def test_whitespace(self):
        p = parse_pattern(" (W) -> (De) ~> (S) ")
        assert p.connectors == (LINEAR, NONLINEAR)

    def test_dangling_connector(self):
        with pytest.raises((PatternSyntaxError, TooFewElements)):
            parse_pattern("(W)->")

    def test_single_element(self):
        with pytest.raises(TooFewElements):
            parse_pattern("(W)")

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbol):
            parse_pattern("(A)->(Qx)")

    def test_missing_connector(self):
        with pytest.raises(PatternSyntaxError):
            parse_pattern("(A)(B)")

    def test_emit_round_trip(self):
        for text in ["(A)->(Q)->{O/S}", "(Em)~>(Ch)", "(W)->(De)~>(S)"]:
            p = parse_pattern(text)
            assert emit_pattern(p) == text
            assert parse_pattern(emit_pattern(p)) == p


class TestBuiltins:
    def test_six_patterns(self):
        pats = builtin_paradigms()
        assert [p.plot_label for p in pats] == [
            "battle", "emotional", "difficult_task",
            "adventure", "pretending", "daily_life"]

    def test_battle_shape(self):
        battle = builtin_paradigms()[0]
        assert battle.elements[-1] == AltSet(("O", "S"))

    def test_pretending_connectors(self):
        pretending = builtin_paradigms()[4]
        assert pretending.connectors == (LINEAR, NONLINEAR)


class TestMatches:
    @pytest.fixture
    def battle(self):
        return parse_pattern("(A)->(Q)->{O/S}", plot_label="battle")

    def test_conforming(self, battle):
        result = matches(["A", "F", "H", "K", "Q", "S"], battle)
        assert result.matched
        assert result.bindings == [0, 4, 5]

    def test_wrong_terminal(self, battle):
        assert not matches(["A", "E", "H", "Q"], battle).matched

    def test_emotional(self):
        emotional = parse_pattern("(Em)~>(Ch)")
        assert matches(["Em", "A", "K", "E", "Ch"], emotional).matched

    def test_interior_must_be_strict(self, battle):
        # Q only at the anchor positions does not satisfy the interior slot
        assert not matches(["A", "Q"], battle).matched
        assert not matches(["Q", "A", "S"], battle).matched

    def test_length_one_never_matches(self):
        daily = parse_pattern("(A)~>(Ch)")
        assert not matches(["A"], daily).matched

    def test_empty_sequence(self, battle):
        with pytest.raises(EmptySequence):
            matches([], battle)

    def test_bindings_strictly_increasing(self, battle):
        result = matches(["A", "Q", "Q", "S"], battle)
        assert result.bindings == [0, 1, 3]


class TestClassify:
    def test_battle_only(self):
        assert classify(["A", "Q", "S"], builtin_paradigms()) == ["battle"]

    def test_minimal_emotional(self):
        assert classify(["Em", "Ch"], builtin_paradigms()) == ["emotional"]

    def test_no_match(self):
        assert classify(["K", "F"], builtin_paradigms()) == []

    def test_multiple_labels_possible(self):
        # daily_life and battle share the A anchor
        labels = classify(["A", "Q", "S", "Ch"], builtin_paradigms())
        assert "daily_life" in labels


SUPPORTS = {
    "battle": Fraction(40, 60),
    "emotional": Fraction(43, 60),
    "difficult_task": Fraction(51, 60),
    "adventure": Fraction(36, 60),
    "pretending": Fraction(42, 60),
    "daily_life": Fraction(53, 60),
}


class TestSupport:
    def test_own_column_thresholds(self, plot_corpora):
        pats = {p.plot_label: p for p in builtin_paradigms()}
        for name, seqs in plot_corpora.items():
            frac = support(seqs, pats[name])
            assert frac == SUPPORTS[name]
            assert frac >= Fraction(3, 5)

    def test_matches_against_oracle_on_fixtures(self, plot_corpora):
        pats = builtin_paradigms()
        for seqs in plot_corpora.values():
            for seq in seqs:
                for p in pats:
                    assert matches(seq, p).matched == \
                        oracle_matches(list(seq), p)

    def test_all_matching(self):
        assert support([["Em", "Ch"]] * 3, parse_pattern("(Em)~>(Ch)")) == 1

    def test_cross_column(self, plot_corpora):
        emotional = builtin_paradigms()[1]
        expected = Fraction(
            sum(oracle_matches(list(s), emotional) for s in plot_corpora["battle"]), 60)
        assert support(plot_corpora["battle"], emotional) == expected

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            support([], builtin_paradigms()[0])


symbols_st = st.sampled_from(taxonomy.SYMBOLS)
sequences_st = st.lists(symbols_st, min_size=2, max_size=8)


@given(sequences_st)
def test_anchoring_property(seq):
    battle = parse_pattern("(A)->(Q)->{O/S}")
    if matches(seq, battle).matched:
        assert seq[0] == "A" and seq[-1] in ("O", "S")


@given(sequences_st)
def test_interior_removal_monotonicity(seq):
    full = parse_pattern("(A)->(K)->(Q)->{O/S}")
    reduced = parse_pattern("(A)->(Q)->{O/S}")
    if matches(seq, full).matched:
        assert matches(seq, reduced).matched


@given(sequences_st)
def test_altset_widening(seq):
    narrow = parse_pattern("(A)->(Q)->(S)")
    wide = parse_pattern("(A)->(Q)->{S/O}")
    if matches(seq, narrow).matched:
        assert matches(seq, wide).matched


class TestMine:
    def test_battle_column(self, plot_corpora):
        mined = mine(plot_corpora["battle"], Fraction(3, 5), 2)
        assert mined.elements[0] == "A"
        assert "Q" in mined.elements[1:-1]
        assert isinstance(mined.elements[-1], AltSet)
        assert set(mined.elements[-1].options) == {"S", "O"}
        assert support(plot_corpora["battle"], mined) >= Fraction(3, 5)

    def test_emotional_column(self, plot_corpora):
        mined = mine(plot_corpora["emotional"], Fraction(3, 5), 2)
        assert emit_pattern(mined) == "(Em)~>(Ch)"
        assert support(plot_corpora["emotional"], mined) >= Fraction(3, 5)

    def test_uniform_corpus(self):
        seqs = [["A", "B", "C"]] * 5
        mined = mine(seqs, Fraction(1), 1)
        assert emit_pattern(mined) == "(A)->(B)->(C)"
        assert support(seqs, mined) == 1

    def test_self_consistency_all_columns(self, plot_corpora):
        for seqs in plot_corpora.values():
            mined = mine(seqs, Fraction(3, 5), 2)
            assert support(seqs, mined) >= Fraction(3, 5)

    def test_anchor_frequencies_against_brute_force(self, plot_corpora):
        # start anchor of the battle column is its modal first symbol
        firsts = [s.symbols[0] for s in plot_corpora["battle"]]
        modal = max(set(firsts), key=firsts.count)
        mined = mine(plot_corpora["battle"], Fraction(3, 5), 2)
        assert mined.elements[0] == modal

    def test_mining_failed(self):
        # 4 distinct first symbols, max_alt 1, threshold 1.0
        seqs = [["A", "Z"], ["B", "Z"], ["C", "Z"], ["D", "Z"]]
        with pytest.raises(MiningFailed):
            mine(seqs, Fraction(1), 1)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            mine([], Fraction(1, 2), 1)
