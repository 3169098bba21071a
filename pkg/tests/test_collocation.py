import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emlang.collocation import (
    CountTable,
    estimate_probability,
    integer_prior,
    kind_prior,
    npmi,
)
from emlang.corpus import EnvConfig, generate_split
from emlang.env import ObservationKind
from emlang.errors import ConfigError, ValidationError


class TestNpmi:
    def test_independence(self):
        assert npmi(0.25, 0.5, 0.5) == 0.0

    def test_perfect_association(self):
        assert npmi(0.25, 0.25, 0.25) == pytest.approx(1.0)

    def test_hand_values(self):
        # frozen from a by-hand evaluation of the formula
        assert npmi(0.3, 0.4, 0.5) == pytest.approx(0.3367726468997533, abs=1e-12)
        assert npmi(0.05, 0.5, 0.5) == pytest.approx(-0.5372435736804816, abs=1e-12)

    def test_zero_joint_is_skip_signal(self):
        assert npmi(0.0, 0.5, 0.5) is None

    def test_joint_one(self):
        assert npmi(1.0, 1.0, 1.0) == 1.0
        with pytest.raises(ValidationError):
            npmi(1.0, 0.5, 1.0)

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            npmi(-0.1, 0.5, 0.5)

    @given(
        st.floats(0.001, 0.999),
        st.floats(0.001, 1.0),
        st.floats(0.001, 1.0),
    )
    @settings(max_examples=200)
    def test_symmetry(self, j, a, b):
        assert npmi(j, a, b) == pytest.approx(npmi(j, b, a))

    @given(st.floats(0.01, 0.95), st.floats(0.01, 0.95), st.data())
    @settings(max_examples=200)
    def test_monotone_in_joint(self, a, b, data):
        hi = min(a, b)
        j1 = data.draw(st.floats(1e-6, hi * 0.999))
        j2 = data.draw(st.floats(j1, hi))
        if j2 > j1:
            assert npmi(j2, a, b) > npmi(j1, a, b)

    @given(st.integers(1, 400), st.integers(1, 400), st.integers(1, 400), st.integers(2, 500))
    @settings(max_examples=300)
    def test_empirical_bound(self, cj, ca, cb, total):
        # joint count cannot exceed either marginal when all three come
        # from the same event stream
        cj = min(cj, ca, cb, total - 1)
        ca, cb = min(ca, total), min(cb, total)
        if cj < 1:
            return
        value = npmi(cj / total, ca / total, cb / total)
        assert -1.0 - 1e-12 <= value <= 1.0 + 1e-12

    def test_deterministic_language_scores_one(self):
        # an n-gram occurring in exactly the records where the context does
        value = npmi(0.2, 0.2, 0.2)
        assert value == pytest.approx(1.0)


class TestEstimateProbability:
    def test_values(self):
        assert estimate_probability(3, 10) == 0.3
        assert estimate_probability(0, 10) == 0.0
        assert estimate_probability(10, 10) == 1.0

    def test_zero_total(self):
        with pytest.raises(ValidationError):
            estimate_probability(1, 0)


class TestIntegerPrior:
    def test_static_single_meaning(self):
        assert integer_prior(1) == 1 / 60

    def test_eq_value_top2(self):
        expected = Fraction(63365, 487635)
        assert integer_prior(2) == pytest.approx(float(expected), abs=1e-12)

    def test_full_coverage(self):
        assert integer_prior(60) == 1.0

    def test_monotone_nondecreasing(self):
        values = [integer_prior(t) for t in range(1, 61)]
        assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))

    def test_matches_direct_binomials(self):
        for top_n in (2, 5, 17, 59):
            total = math.comb(60, 4)
            expected = (total - math.comb(60 - top_n, 4)) / total
            assert integer_prior(top_n) == pytest.approx(expected, abs=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ConfigError):
            integer_prior(0)
        with pytest.raises(ConfigError):
            integer_prior(61)

    def test_other_num_points(self):
        assert integer_prior(1, num_points=20) == 1 / 20
        assert integer_prior(20, num_points=20) == 1.0


class TestKindPrior:
    def test_sums_to_one_and_middle_dominates(self):
        corpus = generate_split(3, 6000, EnvConfig(num_points=60))
        probs = kind_prior(corpus)
        assert sum(probs.values()) == pytest.approx(1.0)
        # uniform targets: middle expected at 56/60
        assert probs[ObservationKind.MIDDLE] == pytest.approx(56 / 60, abs=0.02)
        for kind in (ObservationKind.BEGIN, ObservationKind.END):
            assert probs[kind] == pytest.approx(1 / 60, abs=0.01)

    def test_single_kind_corpus(self):
        corpus = generate_split(3, 200, EnvConfig(num_points=60))
        middles = [r for r in corpus if r.obs_kind is ObservationKind.MIDDLE]
        assert kind_prior(middles) == {ObservationKind.MIDDLE: 1.0}

    def test_empty(self):
        with pytest.raises(ValidationError):
            kind_prior([])


class TestCountTable:
    def test_merge_is_pointwise(self):
        a = CountTable(total=2)
        a.ngram_counts[(("x",), 1)] = 2
        a.context_counts[("int", 3)] = 1
        b = CountTable(total=3)
        b.ngram_counts[(("x",), 1)] = 1
        b.joint_counts[((("x",), 1), ("int", 3))] = 1
        merged = a + b
        assert merged.total == 5
        assert merged.ngram_counts[(("x",), 1)] == 3
        assert merged.context_counts[("int", 3)] == 1
        assert merged.joint_counts[((("x",), 1), ("int", 3))] == 1

    def test_slot_conservation_check(self):
        t = CountTable()
        t.ngram_counts[((5,), 1)] = 2
        t.ngram_counts[((5,), 3)] = 1
        t.ngram_counts[((5,), None)] = 3
        assert t.slot_conservation_errors() == []
        t.ngram_counts[((5,), None)] = 4
        assert t.slot_conservation_errors() == [(5,)]
