"""Certified minimization over the pair-marginal polytope."""

import numpy as np
import pytest

from conftest import joint_from_mass, random_joint
from uniqueinfo import (
    GammaDirection,
    SolverConfig,
    apply_direction,
    check_critical,
    directional_derivative,
    grid_oracle,
    membership,
    objective,
    product_point,
    solve,
)
from uniqueinfo.errors import DimensionTooLarge
from test_dist import and_distribution


def and_point(alpha: float):
    gamma = GammaDirection(x=0, y=0, y2=1, z=0, z2=1)
    return apply_direction(and_distribution(), gamma, alpha)


def test_objective_values_on_and():
    P = and_distribution()
    assert objective(P) == pytest.approx(P.entropy("X"), abs=1e-12)
    assert objective(and_point(0.25)) == pytest.approx(
        P.entropy("X") - 0.5, abs=1e-9
    )


def test_directional_derivative_closed_form():
    # along the single free direction of the AND slice the derivative is
    # log2(alpha / (1/4 + alpha))
    gamma = GammaDirection(x=0, y=0, y2=1, z=0, z2=1)
    for alpha in (0.05, 0.1, 0.2, 0.25):
        d = directional_derivative(and_point(alpha), gamma)
        assert d == pytest.approx(np.log2(alpha / (0.25 + alpha)), abs=1e-9)


def test_directional_derivative_is_finite_at_the_boundary():
    gamma = GammaDirection(x=0, y=0, y2=1, z=0, z2=1)
    assert np.isfinite(directional_derivative(and_distribution(), gamma))


def test_solve_certifies_and():
    P = and_distribution()
    result = solve(P)
    assert result.converged
    assert result.gap_certificate <= 1e-9
    assert membership(result.optimizer, P)
    assert result.value == pytest.approx(P.entropy("X") - 0.5, abs=1e-8)


def test_solve_returns_honest_flag_on_tiny_budget():
    config = SolverConfig(tol_gap=1e-15, max_iters=2)
    result = solve(and_distribution(), config)
    assert isinstance(result.converged, bool)
    assert result.gap_certificate >= 0.0


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol_gap=0.0)
    with pytest.raises(ValueError):
        SolverConfig(interior_mix=1e-3)
    with pytest.raises(ValueError):
        SolverConfig(grad_floor=0.0)


def test_solve_matches_oracle_on_random_instances():
    rng = np.random.default_rng(31)
    for _ in range(5):
        P = random_joint(rng, (2, 2, 2))
        res = solve(P)
        oracle = grid_oracle(P)
        assert res.value == pytest.approx(oracle.value, abs=1e-6)


def test_grid_oracle_guards_the_dimension():
    rng = np.random.default_rng(32)
    with pytest.raises(DimensionTooLarge):
        grid_oracle(random_joint(rng, (2, 3, 3)))


def test_check_critical_at_the_and_optimizer():
    assert check_critical(and_point(0.25), and_distribution())
    assert not check_critical(and_point(0.05), and_distribution())


def test_check_critical_at_independent_sources():
    # with Y independent of everything the product point decorrelates the
    # sources, every directional derivative vanishes and the point is optimal
    rng = np.random.default_rng(33)
    p = rng.dirichlet(np.ones(3))
    q = rng.dirichlet(np.ones(2))
    mu = rng.dirichlet(np.ones(3), size=3)
    mass = p[:, None, None] * q[None, :, None] * mu[:, None, :]
    P = joint_from_mass(mass)
    Q0 = product_point(P)
    assert Q0.joint.mutual_info("Y", "Z") == pytest.approx(0.0, abs=1e-12)
    assert check_critical(Q0, P)


def test_objective_is_convex_along_feasible_segments():
    rng = np.random.default_rng(34)
    for _ in range(10):
        P = random_joint(rng, (2, 2, 2))
        Q0 = product_point(P).joint.mass
        Q1 = solve(P).optimizer.joint.mass
        for t in (0.25, 0.5, 0.75):
            mix = joint_from_mass(t * Q0 + (1 - t) * Q1)
            bound = t * objective(joint_from_mass(Q0)) + (1 - t) * objective(
                joint_from_mass(Q1)
            )
            assert objective(mix) <= bound + 1e-10


def test_objective_formulations_differ_by_constants_on_the_polytope():
    # the pairwise differences between the equivalent objectives depend
    # only on the fixed pair marginals, hence are constant over the polytope
    rng = np.random.default_rng(35)
    P = random_joint(rng, (3, 2, 2))
    points = [product_point(P).joint, solve(P).optimizer.joint]
    diffs = [
        (
            q.mutual_info("X", ("Y", "Z")) - q.mutual_info("X", "Y", "Z"),
            q.mutual_info("X", ("Y", "Z")) - q.mutual_info("X", "Z", "Y"),
            q.mutual_info("X", ("Y", "Z")) + q.co_information(),
        )
        for q in points
    ]
    np.testing.assert_allclose(diffs[0], diffs[1], atol=1e-9)


def test_solve_handles_zero_probability_target_values():
    mass = np.zeros((3, 2, 2))
    mass[0] = [[0.25, 0.0], [0.0, 0.25]]
    mass[2] = [[0.125, 0.125], [0.125, 0.125]]
    P = joint_from_mass(mass)
    result = solve(P)
    assert result.converged
    assert membership(result.optimizer, P)
