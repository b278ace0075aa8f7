"""Unit tests for the penalized Nash functional and its minimization on S^n."""

import math

import numpy as np
import pytest

from entropy_lab.core.constants import RowStatus
from entropy_lab.core.exceptions import DegenerateProfileError, DomainError, NormalizationError
from entropy_lab.inequalities.closedform import a0_constant
from entropy_lab.inequalities.minimizer import (
    NodalDiscretization,
    b_lower_trace,
    default_init,
    euler_lagrange_residual,
    j_functional,
    minimize_j,
    nash_defect,
)
from entropy_lab.inequalities.search import SearchBudget
from entropy_lab.inequalities.sphere import (
    ConstantZonal,
    constant_profile,
    cosine_profile,
    uniform_zonal_grid,
    zonal_lp_norm,
)

S3_TWO_THIRDS = (2.0 * math.pi**2) ** (2.0 / 3.0)


class TestJFunctional:
    """Test J on explicit profiles."""

    def test_constant_value(self):
        """Test J(const) = C |S^3|^(2/3) for every q."""
        constant = constant_profile(3, 2.0)
        assert j_functional(constant, 3, 2.0, 1.9, 1.0) == pytest.approx(S3_TWO_THIRDS, rel=1e-9)
        assert j_functional(constant, 3, 2.0, 1.2, 2.0) == pytest.approx(
            2.0 * S3_TWO_THIRDS, rel=1e-9
        )

    def test_zero_penalty_constant(self):
        """Test J(const) vanishes when C = 0."""
        assert j_functional(constant_profile(3, 2.0), 3, 2.0, 1.5, 0.0) == 0.0

    def test_negative_factor_keeps_sign(self):
        """Test J is negative when D + C < 0."""
        assert j_functional(constant_profile(3, 2.0), 3, 2.0, 1.5, -1.0) < 0

    def test_q_near_p_stays_finite(self):
        """Test the log-space power survives q close to p."""
        profile = cosine_profile(0.3).normalized(3, 2.0)
        value = j_functional(profile, 3, 2.0, 2.0 - 1e-6, 1.0)
        assert math.isfinite(value)
        assert value > 0

    def test_requires_unit_mass(self):
        """Test non-normalized input is rejected."""
        with pytest.raises(NormalizationError):
            j_functional(cosine_profile(0.3), 3, 2.0, 1.5, 1.0)


class TestNodalDiscretization:
    """Test the lumped discretization."""

    def test_masses_sum_to_volume(self):
        """Test the lumped weights integrate 1 to |S^3|."""
        disc = NodalDiscretization(uniform_zonal_grid(401), 3)
        assert disc.mass_weight.sum() == pytest.approx(2.0 * math.pi**2, rel=1e-4)
        assert np.all(disc.mass_weight > 0)

    @pytest.mark.parametrize("p", [2.0, 1.5])
    def test_energy_gradient_matches_differences(self, rng, p):
        """Test the analytic energy gradient against central differences."""
        disc = NodalDiscretization(uniform_zonal_grid(21), 3)
        values = 1.0 + rng.uniform(0.0, 1.0, 21)
        gradient = disc.energy_gradient(values, p)
        step = 1e-6
        numeric = np.empty_like(values)
        for i in range(values.size):
            bump = np.zeros_like(values)
            bump[i] = step
            numeric[i] = (disc.energy(values + bump, p) - disc.energy(values - bump, p)) / (
                2 * step
            )
        np.testing.assert_allclose(gradient, numeric, rtol=1e-5, atol=1e-8)

    def test_normalize(self, rng):
        """Test normalization to unit discrete mass."""
        disc = NodalDiscretization(uniform_zonal_grid(51), 3)
        unit = disc.normalize(rng.uniform(0.5, 2.0, 51), 1.5)
        assert disc.power_mass(unit, 1.5) == pytest.approx(1.0, rel=1e-12)

    def test_degenerate_grid(self):
        """Test grids must increase strictly."""
        with pytest.raises(DegenerateProfileError):
            NodalDiscretization(np.array([0.0, 1.0, 1.0]), 3)


class TestMinimizeJ:
    """Test L-BFGS-B descent on J."""

    def test_small_penalty_returns_to_constant(self):
        """Test a perturbed constant relaxes back for C below the stability threshold."""
        result = minimize_j(3, 2.0, 1.9, 0.5, nodes=101, budget=3000)
        level = (2.0 * math.pi**2) ** -0.5
        assert result.status == RowStatus.OK
        assert result.el_residual < 1e-4
        assert result.relation_error < 1e-6
        assert np.max(np.abs(result.u_star.values - level)) / level < 1e-2
        assert result.nu == pytest.approx(0.5 * S3_TWO_THIRDS, rel=1e-2)
        history = np.array(result.j_history)
        assert np.all(np.diff(history) <= 1e-12 * history[:-1])
        assert zonal_lp_norm(result.u_star, 3, 2.0) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("nodes", [101, 201])
    def test_reported_value_never_exceeds_constant(self, nodes):
        """Test nu is J at u_star and stays at or below J at the constant."""
        result = minimize_j(3, 2.0, 1.9, 0.5, nodes=nodes, budget=3000)
        at_constant = j_functional(constant_profile(3, 2.0), 3, 2.0, 1.9, 0.5)
        assert result.status == RowStatus.OK
        assert result.nu <= at_constant * (1.0 + 1e-12)
        assert result.nu == pytest.approx(
            j_functional(result.u_star, 3, 2.0, 1.9, 0.5), rel=1e-12
        )
        assert result.b_value * result.q_mass == pytest.approx(result.nu, rel=1e-12)

    def test_nonpositive_penalty_is_constant(self):
        """Test C <= 0 returns the constant without iterating."""
        result = minimize_j(3, 2.0, 1.5, -0.3, nodes=101)
        assert result.iterations == 0
        assert result.status == RowStatus.OK
        assert result.nu < 0
        assert np.ptp(result.u_star.values) == pytest.approx(0.0, abs=1e-12)

    def test_record_fields(self):
        """Test the report row carries the reference 1/A0."""
        record = minimize_j(3, 2.0, 1.5, 0.0, nodes=51).to_record(seed=3)
        assert record["nu_reference"] == pytest.approx(1.0 / a0_constant(3, 2.0))
        assert record["seed"] == 3
        assert record["status"] == "ok"

    @pytest.mark.slow
    def test_large_penalty_leaves_constant(self):
        """Test the constant loses to a concentrated profile for large C."""
        result = minimize_j(3, 2.0, 1.9, 10.0, nodes=101, budget=3000)
        assert result.nu < 10.0 * S3_TWO_THIRDS * (1.0 - 1e-3)
        values = result.u_star.values
        assert np.ptp(values) / np.mean(values) > 0.05

    @pytest.mark.parametrize("nodes", [51, 101, 201])
    def test_refined_grids_stay_critical(self, nodes):
        """Test the small-penalty minimizer solves the discrete equation on every grid."""
        result = minimize_j(3, 2.0, 1.9, 0.5, nodes=nodes, budget=3000)
        assert result.el_residual < 1e-8
        assert euler_lagrange_residual(result.u_star, 3, 2.0, 1.9, 0.5) < 1e-8

    @pytest.mark.slow
    def test_grid_refinement(self):
        """Test N -> 2N moves the large-penalty nu by under 1%."""
        coarse = minimize_j(3, 2.0, 1.9, 10.0, nodes=101, budget=3000)
        fine = minimize_j(3, 2.0, 1.9, 10.0, nodes=201, budget=3000)
        for result in (coarse, fine):
            assert math.isfinite(result.el_residual)
            assert result.nu < 10.0 * S3_TWO_THIRDS
        assert fine.nu == pytest.approx(coarse.nu, rel=1e-2)

    def test_argument_guards(self):
        """Test exponent and budget guards."""
        with pytest.raises(DomainError):
            minimize_j(3, 2.0, 2.0, 1.0)
        with pytest.raises(DomainError):
            minimize_j(3, 2.0, 1.5, 1.0, budget=0)
        with pytest.raises(NormalizationError):
            minimize_j(3, 2.0, 1.5, 1.0, init=cosine_profile(0.2), nodes=51)


class TestEulerLagrange:
    """Test the residual and the descent start."""

    def test_constant_is_critical(self):
        """Test the constant solves the discrete equation."""
        constant = constant_profile(3, 2.0, num=101)
        assert euler_lagrange_residual(constant, 3, 2.0, 1.9, 1.0) < 1e-10

    def test_perturbed_constant_is_not(self):
        """Test a cosine perturbation leaves a visible residual."""
        profile = cosine_profile(0.3, num=101).normalized(3, 2.0)
        assert euler_lagrange_residual(profile, 3, 2.0, 1.9, 1.0) > 1e-3

    def test_default_init(self):
        """Test the start is normalized and peaked at the north pole."""
        init = default_init(3, 2.0, 101)
        assert zonal_lp_norm(init, 3, 2.0) == pytest.approx(1.0, abs=1e-10)
        assert init.values[0] == init.values.max()
        assert init.values[0] > init.values[-1]


class TestBLowerTrace:
    """Test the second-constant trace."""

    def test_constant_defect(self):
        """Test the Nash defect of the constant is |S^n|^(-p/n) for every q."""
        constant = constant_profile(3, 2.0)
        for q in (1.2, 1.9):
            assert nash_defect(constant, 3, 2.0, q, 0.07) == pytest.approx(
                S3_TWO_THIRDS**-1, rel=1e-9
            )

    @pytest.mark.slow
    def test_constant_family_trace(self):
        """Test B_hat from the constant alone and the running maximum."""
        a0 = a0_constant(3, 2.0)
        rows = b_lower_trace(
            3,
            2.0,
            (1.5, 1.9),
            family=ConstantZonal(),
            budget=SearchBudget(1, 1),
            n_ref=a0,
            max_iter=2000,
            nodes=101,
        )
        assert [row.q for row in rows] == [1.5, 1.9]
        for row in rows:
            assert row.b_hat == pytest.approx(S3_TWO_THIRDS**-1, rel=1e-9)
            assert row.c_k == pytest.approx((row.b_hat - (2.0 - row.q)) / a0)
            assert row.running_max == pytest.approx(row.b_hat)
        assert rows[0].c_k < 0 < rows[1].c_k
        assert rows[0].nu < 0 < rows[1].nu

    @pytest.mark.parametrize("q_sequence", [(), (1.9, 1.5), (1.5, 2.0)], ids=str)
    def test_rejects_bad_sequences(self, q_sequence):
        """Test empty, decreasing and out-of-range sequences."""
        with pytest.raises(DomainError):
            b_lower_trace(3, 2.0, q_sequence, family=ConstantZonal())
