"""Unit tests for Euclidean Nash quotients and their lower-bound scans."""

import math

import numpy as np
import pytest

from entropy_lab.core.constants import RowStatus
from entropy_lab.core.exceptions import DegenerateProfileError, DomainError
from entropy_lab.inequalities.closedform import a0_constant
from entropy_lab.inequalities.families import StretchedExpFamily, default_family
from entropy_lab.inequalities.nash import (
    entropy_limit_trace,
    estimate_nash_constant,
    interpolation_monotonicity,
    jensen_gap,
    jensen_nash_bound,
    log_nash_quotient,
    monotonicity_scan,
    nash_quotient,
)
from entropy_lab.inequalities.radial import (
    RadialProfile,
    bump_mixture,
    entropy,
    extremal_profile,
    gaussian,
)

LIMIT_SEQUENCE = tuple(2.0 - 10.0**-k for k in range(1, 7))


class TestNashQuotient:
    """Test the quotient and its invariances."""

    def test_gaussian_value(self, unit_gaussian):
        """Test the Gaussian quotient for n=3, p=2, q=1 is 1/(6 pi)."""
        assert nash_quotient(unit_gaussian, 3, 2.0, 1.0) == pytest.approx(
            1.0 / (6.0 * math.pi), rel=1e-9
        )

    def test_amplitude_and_dilation_invariance(self, unit_gaussian):
        """Test the quotient ignores amplitude and mass-preserving dilation."""
        base = log_nash_quotient(unit_gaussian, 3, 2.0, 1.5)
        assert log_nash_quotient(unit_gaussian.scaled(7.0), 3, 2.0, 1.5) == pytest.approx(
            base, abs=1e-9
        )
        assert log_nash_quotient(
            unit_gaussian.dilated(0.4, 3, 2.0), 3, 2.0, 1.5
        ) == pytest.approx(base, abs=1e-9)

    @pytest.mark.parametrize("q", [1.0, 1.3, 1.7, 1.95])
    @pytest.mark.parametrize(
        "profile",
        [gaussian(), extremal_profile(3, 2.0), bump_mixture((1.0,), (1.0,), (3.0,))],
        ids=["gaussian", "extremal", "bump"],
    )
    def test_bounded_by_a0(self, profile, q):
        """Test every quotient lies below A0(p)."""
        assert nash_quotient(profile, 3, 2.0, q) <= a0_constant(3, 2.0) * (1.0 + 1e-9)

    def test_constant_profile_is_degenerate(self):
        """Test a profile with zero gradient has no quotient."""
        grid = np.linspace(0.0, 1.0, 21)
        flat = RadialProfile(grid, np.ones_like(grid))
        with pytest.raises(DegenerateProfileError, match="zero Dirichlet energy"):
            nash_quotient(flat, 3, 2.0, 1.5)

    def test_rejects_q_not_below_p(self, unit_gaussian):
        """Test the exponent guard."""
        with pytest.raises(DomainError):
            nash_quotient(unit_gaussian, 3, 2.0, 2.0)


def random_profiles(rng, count):
    """Profiles drawn uniformly from the middle half of each default family box."""
    members = default_family().members()
    for k in range(count):
        member = members[k % len(members)]
        box = member.bounds()
        x = [rng.uniform(0.75 * lo + 0.25 * hi, 0.25 * lo + 0.75 * hi) for lo, hi in box]
        yield member.build(x)


class TestRandomizedBounds:
    """Test the inequalities on profiles drawn from the search families."""

    @pytest.mark.slow
    @pytest.mark.parametrize(("n", "p"), [(3, 2.0), (4, 1.5)])
    def test_quotient_below_a0_and_jensen_gap(self, rng, n, p):
        """Test N(u) <= A0 and the Jensen gap is nonnegative on 100 profiles each."""
        a0 = a0_constant(n, p)
        for profile in random_profiles(rng, 100):
            q = float(rng.uniform(1.0, p - 1e-3))
            assert nash_quotient(profile, n, p, q) <= a0 * (1.0 + 1e-9), profile.describe()
            assert jensen_gap(profile.normalized(n, p), n, p, q) >= -1e-8, profile.describe()


class TestJensen:
    """Test the inequalities linking the entropy and Nash forms."""

    @pytest.mark.parametrize("q", [1.0, 1.5, 1.9])
    def test_gap_nonnegative(self, q):
        """Test ((p-q)/p) Ent(u^p) + log int u^q >= 0."""
        profile = bump_mixture((1.0,), (1.0,), (2.0,)).normalized(3, 2.0)
        assert jensen_gap(profile, 3, 2.0, q) >= -1e-8
        assert jensen_gap(extremal_profile(3, 2.0), 3, 2.0, q) >= -1e-8

    def test_nash_bound(self, extremal_3_2):
        """Test the Jensen-derived bound holds."""
        lhs, rhs = jensen_nash_bound(extremal_3_2, 3, 2.0, 1.0)
        assert lhs <= rhs

    def test_interpolation_monotone(self, unit_gaussian):
        """Test a fixed profile's quotient grows with q."""
        low, high = interpolation_monotonicity(unit_gaussian, 3, 2.0, 1.2, 1.8)
        assert low <= high

    def test_interpolation_order(self, unit_gaussian):
        """Test q1 must be below q2."""
        with pytest.raises(DomainError, match="q1 < q2"):
            interpolation_monotonicity(unit_gaussian, 3, 2.0, 1.8, 1.2)


class TestEntropyLimitTrace:
    """Test the q -> p- limit of the Nash difference quotient."""

    def test_converges_first_order(self, extremal_3_2):
        """Test errors shrink with the gap at a first-order rate."""
        trace = entropy_limit_trace(extremal_3_2, 3, 2.0, LIMIT_SEQUENCE)
        assert trace.target == pytest.approx(2.0 / 3.0 * entropy(extremal_3_2, 3, 2.0))
        errors = [row.error for row in trace.rows]
        assert all(b < a for a, b in zip(errors, errors[1:], strict=False))
        assert errors[-1] < 1e-4
        assert trace.first_order
        assert all(row.status == RowStatus.OK for row in trace.rows)

    def test_gaussian_trace(self):
        """Test a non-extremal profile converges to its own entropy."""
        profile = gaussian().normalized(4, 1.5)
        trace = entropy_limit_trace(profile, 4, 1.5, (1.4, 1.49, 1.499, 1.4999))
        assert trace.rows[-1].error < trace.rows[0].error

    def test_precision_floor_flagged(self, extremal_3_2):
        """Test gaps below 1e-7 are flagged rather than trusted."""
        trace = entropy_limit_trace(extremal_3_2, 3, 2.0, (1.9, 2.0 - 1e-8))
        assert trace.rows[-1].status == RowStatus.PRECISION_FLOOR
        assert trace.rows[0].status == RowStatus.OK
        assert trace.to_records()[-1]["status"] == "precision_floor"

    @pytest.mark.parametrize(
        "q_sequence", [(), (1.9, 1.5), (1.5, 2.0), (0.5, 1.5)], ids=str
    )
    def test_rejects_bad_sequences(self, extremal_3_2, q_sequence):
        """Test empty, decreasing and out-of-range sequences."""
        with pytest.raises(DomainError):
            entropy_limit_trace(extremal_3_2, 3, 2.0, q_sequence)


class TestEstimateNashConstant:
    """Test the lower-bound search."""

    def test_beats_gaussian(self, small_budget):
        """Test the search starts at the Gaussian and stays below A0."""
        row = estimate_nash_constant(3, 2.0, 1.0, StretchedExpFamily(), small_budget)
        assert row.n_hat >= 1.0 / (6.0 * math.pi) - 1e-12
        assert row.n_hat <= row.a0 * (1.0 + 1e-9)
        assert row.status == RowStatus.OK
        assert row.theta == pytest.approx(0.6)
        record = row.to_record()
        assert record["ratio"] == pytest.approx(row.n_hat / row.a0)
        assert record["family"] == "stretched_exp"

    def test_union_never_worse(self, small_budget):
        """Test widening the family cannot lower the estimate."""
        single = estimate_nash_constant(3, 2.0, 1.5, StretchedExpFamily(), small_budget)
        union = estimate_nash_constant(3, 2.0, 1.5, default_family(), small_budget)
        assert union.n_hat >= single.n_hat - 1e-12

    def test_domain_guard(self, small_budget):
        """Test p > 2 is rejected before any search."""
        with pytest.raises(DomainError, match="p ≤ 2"):
            estimate_nash_constant(3, 2.5, 1.5, StretchedExpFamily(), small_budget)


class TestMonotonicityScan:
    """Test q scans."""

    def test_column_is_monotone(self, small_budget):
        """Test N_hat does not decrease along the q grid."""
        rows = monotonicity_scan(
            3, 2.0, (1.0, 1.5, 1.9), StretchedExpFamily(), small_budget, workers=1
        )
        assert [row.q for row in rows] == [1.0, 1.5, 1.9]
        values = [row.n_hat for row in rows]
        assert all(b >= a for a, b in zip(values, values[1:], strict=False))
        assert all(v <= rows[0].a0 * (1.0 + 1e-9) for v in values)

    @pytest.mark.slow
    def test_workers_do_not_change_rows(self, small_budget):
        """Test worker processes reproduce the serial scan."""
        grid = (1.2, 1.6)
        serial = monotonicity_scan(3, 2.0, grid, StretchedExpFamily(), small_budget, 1)
        parallel = monotonicity_scan(3, 2.0, grid, StretchedExpFamily(), small_budget, 2)
        assert serial == parallel

    @pytest.mark.parametrize("grid", [(), (1.5, 1.2), (1.5, 2.0)], ids=str)
    def test_rejects_bad_grids(self, small_budget, grid):
        """Test empty, decreasing and out-of-range grids."""
        with pytest.raises(DomainError):
            monotonicity_scan(3, 2.0, grid, StretchedExpFamily(), small_budget, 1)
