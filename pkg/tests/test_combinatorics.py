from collections import Counter
from fractions import Fraction
from math import comb

import pytest

from levinpc.combinatorics import (
    TargetWord,
    alignment_range,
    binom_identity_check,
    bound_report,
    constrained_count,
    enumerate_targets,
    lower_bound,
    occurrence_oracle,
    predicted_count,
    verify_counting,
    verify_lemmas,
)
from levinpc.gf2 import BitWord, enumerate_suitable
from levinpc.necklace import NecklaceSpec, bits_to_str, block_bits

from oracles import all_words

L1 = NecklaceSpec.levin(1)


def brute_targets(d):
    e = 1 << d
    out = []
    for w in all_words(d + e):
        head = w[:d]
        if "".join("1" if c == "0" else "0" for c in head) == w[e:]:
            out.append(w)
    return out


def case2_specs(d):
    e = 1 << d
    return [nu for nu in enumerate_suitable(e) if nu.case == 2]


class TestTargets:
    def test_d1(self):
        assert [str(a) for a in enumerate_targets(1)] == ["001", "011", "100", "110"]

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_brute_force(self, d):
        assert sorted(str(a) for a in enumerate_targets(d)) == brute_targets(d)
        assert len(enumerate_targets(d)) == 2 ** (1 << d)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_k_histogram(self, d):
        e = 1 << d
        hist = Counter(a.k for a in enumerate_targets(d, limit=4))
        assert dict(hist) == {k: 2 ** (d - 1) * comb(e - d + 1, k) for k in range(e - d + 2)}

    def test_d1_histogram(self):
        assert Counter(a.k for a in enumerate_targets(1)) == {0: 1, 1: 2, 2: 1}

    def test_range(self):
        with pytest.raises(ValueError):
            enumerate_targets(0)
        with pytest.raises(ValueError):
            enumerate_targets(4)

    def test_ill_formed(self):
        with pytest.raises(ValueError):
            TargetWord("000000", 2)
        with pytest.raises(ValueError):
            TargetWord("0011", 1)


class TestPredictedCount:
    def test_examples(self):
        assert predicted_count(TargetWord("001", 1)) == 2
        assert predicted_count(TargetWord("110", 1)) == 0
        assert predicted_count(TargetWord("000011", 2)) == 3

    def test_case2_counts_ones_shifted_right(self):
        # a = 0 1 1 0 | 1 0: ones among a_3 a_4 a_5 -> 2
        assert predicted_count(TargetWord("011010", 2), case=2) == 2

    def test_parity_flips_value(self):
        a = TargetWord("000011", 2)
        assert predicted_count(a, 1, parity=1) == 0

    def test_bad_case(self):
        with pytest.raises(ValueError):
            predicted_count(TargetWord("001", 1), case=3)


class TestConstrainedCount:
    def test_lambda1_examples(self):
        r = constrained_count(L1, TargetWord("001", 1))
        assert (r.constrained_count, r.total_count, r.positions) == (2, 2, [0, 5])
        r = constrained_count(L1, TargetWord("110", 1))
        assert (r.constrained_count, r.total_count) == (0, 1)
        assert constrained_count(L1, TargetWord("011", 1)).constrained_count == 1

    def test_mismatched_d(self):
        with pytest.raises(ValueError):
            constrained_count(NecklaceSpec.levin(2), TargetWord("001", 1))


class TestOccurrenceOracle:
    def test_lambda1(self):
        a = TargetWord("001", 1)
        assert occurrence_oracle(L1, a, 2) == 0  # n = 0
        assert occurrence_oracle(L1, a, 1) == 5  # n = 2, last letter of that chunk
        b = TargetWord("110", 1)
        assert occurrence_oracle(L1, b, 1) is None
        assert occurrence_oracle(L1, b, 2) is None

    def test_alignment_range(self):
        assert list(alignment_range(2, 1)) == [2, 3, 4]
        assert list(alignment_range(2, 2)) == [3, 4, 5]
        with pytest.raises(ValueError):
            occurrence_oracle(L1, TargetWord("001", 1), 0)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_oracle_positions_hold_the_word(self, d):
        for nu in enumerate_suitable(1 << d)[:: max(1, 2 ** ((1 << d) - 1) // 8)]:
            nk = NecklaceSpec(d, nu, BitWord((0b1101 * 37) % (1 << (1 << d)), 1 << d))
            block = bits_to_str(block_bits(nk))
            for a in enumerate_targets(d)[::7]:
                for t in alignment_range(d, nk.case):
                    pos = occurrence_oracle(nk, a, t)
                    if pos is not None:
                        assert block[pos:pos + d + nk.e] == str(a)


class TestVerifyCounting:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_levin(self, d):
        summary = verify_counting(NecklaceSpec.levin(d))
        assert summary.passed, summary.to_dict()["mismatches"]
        assert summary.case == 1

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_all_rotations_and_shifts(self, d):
        e = 1 << d
        # every tuple for d <= 2; a spread of 16 (both cases) for d = 3
        for nu in enumerate_suitable(e)[:: 1 if d < 3 else 8]:
            for z in {0, 1, (1 << e) - 1, (1 << e) - 2}:
                summary = verify_counting(NecklaceSpec(d, nu, BitWord(z, e)))
                assert summary.passed, (nu, z, summary.to_dict()["mismatches"][:2])

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_case2_present(self, d):
        assert case2_specs(d)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_total_occurrences(self, d):
        e = 1 << d
        summary = verify_counting(NecklaceSpec.levin(d))
        total = sum(r.constrained_count for r in summary.reports)
        assert total == sum(2 ** (d - 1) * comb(e - d + 1, k) * k for k in range(e - d + 2))
        if d == 1:
            assert total == 4

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_pair_aggregate_matches_bound(self, d):
        e = 1 << d
        N = 2 ** (d + e + 1)
        pairs = 2 * sum(comb(a.k, 2) for a in enumerate_targets(d, limit=4))
        closed = 2 * sum(2 ** (d - 1) * comb(e - d + 1, k) * comb(k, 2) for k in range(e - d + 2))
        assert pairs == closed == lower_bound(d) * N

    def test_mismatch_reporting(self):
        summary = verify_counting(L1)
        summary.reports[0].predicted += 1
        out = summary.to_dict()
        assert not out["passed"] and out["mismatches"][0]["word"] == "001"


class TestIdentityAndBound:
    @pytest.mark.parametrize("n", range(2, 41))
    def test_identity(self, n):
        assert binom_identity_check(n)

    def test_identity_small_values(self):
        assert sum(comb(3, k) * comb(k, 2) for k in range(4)) == 6 == 2 * comb(3, 2)
        assert sum(comb(2, k) * comb(k, 2) for k in range(3)) == 1

    def test_identity_domain(self):
        with pytest.raises(ValueError):
            binom_identity_check(1)

    def test_lower_bound_values(self):
        assert lower_bound(2) == Fraction(6, 32)
        assert lower_bound(3) == Fraction(30, 64)
        assert lower_bound(4) == Fraction(156, 128)

    def test_lower_bound_grows(self):
        values = [lower_bound(d) for d in range(2, 21)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert values[-1] > 10 ** 4

    def test_bound_report_without_empirical(self):
        r = bound_report(7, empirical=False)
        assert r.F_empirical is None and r.met is None
        assert r.to_dict()["N"] == 2 ** (7 + 128 + 1)

    def test_bound_report_empirical(self):
        r = bound_report(2)
        assert r.met and r.F_empirical >= r.bound


class TestLemmas:
    def test_d2_sweep(self):
        summary = verify_lemmas(2)
        assert summary.passed
        counts = summary.to_dict()["checks"]
        assert counts["nonsingular"] == 1 + 2 + 8

    def test_d3_sweep(self):
        summary = verify_lemmas(3)
        assert summary.passed
        counts = summary.to_dict()["checks"]
        assert counts["nonsingular"] == 1 + 2 + 8 + 128
        assert counts["dichotomy_case1"] + counts["dichotomy_case2"] == 139

    def test_case_classification(self):
        checks = {(c.nu, c.name) for c in verify_lemmas(2).checks if c.d == 2}
        assert ((1, 1, 0, 0), "dichotomy_case1") in checks
        assert ((3, 2, 1, 0), "dichotomy_case2") in checks
