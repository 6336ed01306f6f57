import math

import numpy as np
import pytest

from errest.core import FStatistics, TallyState
from errest.estimators import (
    LOW_COVERAGE,
    InsufficientDataError,
    chao92,
    coverage,
    cv2,
    extrapolate,
    majority,
    nominal,
    vchao92,
)


def tally_of(pos, neg):
    return TallyState(np.array(pos, dtype=np.int64), np.array(neg, dtype=np.int64))


def random_fingerprint(rng, max_mult=6, max_classes=20):
    freq = {}
    for j in range(1, max_mult + 1):
        fj = int(rng.integers(0, max_classes))
        if fj:
            freq[j] = fj
    c = sum(freq.values())
    n = sum(j * fj for j, fj in freq.items())
    return FStatistics(freq=freq, n=n, c=c)


class TestDescriptive:
    def test_nominal_direct(self):
        assert nominal(tally_of([1, 0, 0], [1, 2, 0])) == 1

    def test_nominal_all_zero(self):
        assert nominal(tally_of([0, 0], [0, 0])) == 0

    def test_majority_tie_is_clean(self):
        assert majority(tally_of([2, 1], [1, 1])) == 1

    def test_majority_empty_item(self):
        assert majority(tally_of([0], [0])) == 0

    def test_against_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            pos = rng.integers(0, 5, size=8)
            neg = rng.integers(0, 5, size=8)
            t = tally_of(pos, neg)
            assert nominal(t) == sum(1 for p in pos if p > 0)
            assert majority(t) == sum(1 for p, q in zip(pos, neg) if p > q)


class TestExtrapolate:
    def test_one_percent_sample(self):
        assert extrapolate(0.01, 4) == (400.0, 396.0)

    def test_full_sample(self):
        assert extrapolate(1.0, 7) == (7.0, 0.0)

    def test_zero_errors(self):
        assert extrapolate(0.05, 0) == (0.0, 0.0)

    @pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
    def test_domain(self, fraction):
        with pytest.raises(ValueError):
            extrapolate(fraction, 1)


class TestCoverage:
    def test_worked_example(self):
        f = FStatistics(freq={1: 30, 2: 9, 3: 44}, n=180, c=83)
        assert coverage(f) == pytest.approx(5 / 6, rel=1e-12)

    def test_no_singletons(self):
        assert coverage(FStatistics(freq={2: 5}, n=10, c=5)) == 1.0

    def test_empty_sample(self):
        assert coverage(FStatistics(freq={}, n=0, c=0)) == 1.0


class TestCv2:
    def test_flat_fingerprint(self):
        assert cv2(FStatistics(freq={1: 2, 2: 1}, n=4, c=3), 6.0) == 0.0

    def test_singletons_only(self):
        assert cv2(FStatistics(freq={1: 4}, n=4, c=4), 2.0) == 0.0

    def test_single_tripleton(self):
        assert cv2(FStatistics(freq={3: 1}, n=3, c=1), 1.0) == 0.0

    def test_small_sample_returns_zero(self):
        assert cv2(FStatistics(freq={1: 1}, n=1, c=1), 5.0) == 0.0


class TestChao92:
    def test_worked_example_one(self):
        f = FStatistics(freq={1: 30, 2: 9, 3: 44}, n=180, c=83)
        out = chao92(f)
        assert out.cv2_hat == 0.0
        assert out.total_errors_hat == pytest.approx(99.6, rel=1e-9)
        assert out.remaining_hat == pytest.approx(16.6, rel=1e-9)

    def test_worked_example_two(self):
        f = FStatistics(freq={1: 46, 2: 6, 3: 50}, n=208, c=102)
        out = chao92(f)
        assert out.cv2_hat == 0.0
        assert out.total_errors_hat == pytest.approx(21216 / 162, rel=1e-9)

    def test_full_coverage_returns_observed(self):
        f = FStatistics(freq={2: 4, 3: 1}, n=11, c=5)
        assert chao92(f).total_errors_hat == pytest.approx(5.0)

    def test_empty_sample(self):
        out = chao92(FStatistics(freq={}, n=0, c=0))
        assert out.total_errors_hat == 0.0 and out.coverage_hat == 1.0

    def test_zero_coverage_capped_at_universe(self):
        f = FStatistics(freq={1: 3}, n=3, c=3)
        out = chao92(f, universe=50)
        assert out.total_errors_hat == 50.0
        assert LOW_COVERAGE in out.flags

    def test_zero_coverage_without_universe_is_infinite(self):
        out = chao92(FStatistics(freq={1: 3}, n=3, c=3))
        assert math.isinf(out.total_errors_hat)
        assert LOW_COVERAGE in out.flags

    def test_never_below_observed(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            f = random_fingerprint(rng)
            if f.n == 0:
                continue
            out = chao92(f, universe=10_000)
            assert out.total_errors_hat >= f.c - 1e-9
            assert 0.0 <= out.coverage_hat <= 1.0
            assert out.cv2_hat >= 0.0


class TestVChao92:
    def test_shifted_derived_example(self):
        t = tally_of([3, 2, 0, 0, 0], [0, 0, 1, 0, 0])  # c_majority = 2
        f = FStatistics(freq={1: 4, 2: 2, 3: 1}, n=11, c=7)
        out = vchao92(t, f, shift=1)
        assert out.total_errors_hat == pytest.approx(2.8, rel=1e-9)
        assert out.coverage_hat == pytest.approx(5 / 7, rel=1e-12)

    def test_shift_zero_equals_chao92_when_counts_agree(self):
        # every marked item also holds a strict majority
        t = tally_of([2, 1, 0], [0, 0, 0])
        f = FStatistics(freq={1: 1, 2: 1}, n=3, c=2)
        assert vchao92(t, f, shift=0).total_errors_hat == pytest.approx(
            chao92(f).total_errors_hat
        )

    def test_vanishing_shifted_singletons(self):
        t = tally_of([1, 1, 1], [0, 0, 0])
        f = FStatistics(freq={1: 2, 3: 1}, n=5, c=3)  # f_2 = 0
        assert vchao92(t, f, shift=1).total_errors_hat == pytest.approx(3.0)

    def test_exhausted_sample_raises(self):
        t = tally_of([1], [0])
        f = FStatistics(freq={1: 2}, n=2, c=2)
        with pytest.raises(InsufficientDataError):
            vchao92(t, f, shift=1)

    def test_negative_shift_rejected(self):
        t = tally_of([1], [0])
        f = FStatistics(freq={1: 1}, n=1, c=1)
        with pytest.raises(ValueError):
            vchao92(t, f, shift=-1)

    def test_shift_monotonicity_probe(self):
        """Probe: is the estimate non-increasing in the shift?

        Not a theorem, and the probe does find real counterexamples --
        a monotone fingerprint can still have f_{2}/n^{+,1} exceed
        f_1/n^+ (e.g. f=(10,9)), which raises the shifted estimate.
        Every violation is re-verified against direct hand arithmetic
        of the shifted coverage form so implementation bugs cannot hide
        behind "expected" counterexamples.
        """
        rng = np.random.default_rng(21)
        violations = 0
        for _ in range(300):
            sizes = sorted(
                (int(rng.integers(1, 12)) for _ in range(int(rng.integers(2, 5)))),
                reverse=True,
            )
            freq = {j + 1: fj for j, fj in enumerate(sizes)}
            f = FStatistics(
                freq=freq,
                n=sum(j * fj for j, fj in freq.items()),
                c=sum(freq.values()),
            )
            c_maj = int(rng.integers(0, f.c + 1))
            t = tally_of([1] * c_maj + [0] * 3, [0] * c_maj + [0] * 3)
            outs = []
            for s in (0, 1, 2):
                try:
                    out = vchao92(t, f, shift=s, universe=10_000)
                except InsufficientDataError:
                    out = None
                outs.append(out)
            for s in (1, 2):
                if outs[s] is None or outs[s - 1] is None:
                    continue
                if outs[s].cv2_hat != 0.0 or outs[s - 1].cv2_hat != 0.0:
                    continue
                if outs[s].total_errors_hat > outs[s - 1].total_errors_hat + 1e-9:
                    violations += 1
                    # re-verify against the bare shifted coverage form
                    n_s = f.n - sum(f.f(i) for i in range(1, s + 1))
                    f1s = f.f(1 + s)
                    expected = c_maj / (1 - f1s / n_s)
                    assert outs[s].total_errors_hat == pytest.approx(expected, rel=1e-9)
        # documented counterexample family exists, so the probe must see some
        assert violations > 0
