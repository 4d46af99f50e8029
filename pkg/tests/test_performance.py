import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthokin import (
    AtSingularity,
    InfiniteCondition,
    assemble,
    canonical_design,
    condition_number,
    ellipsoid_membership,
    inverse_kinematics,
    isotropy_residual,
    manipulability,
    singular_values_3x3,
)
from orthokin.performance import condition_ratio, psi_extremes

from conftest import ball_points


def at(p, params):
    sol = inverse_kinematics(p, params)
    return sol, assemble(p, sol, params)


def test_isotropic_point(canon):
    sol, m = at([0, 0, 0], canon)
    perf = manipulability(m)
    assert perf.kappa == pytest.approx(1, abs=1e-12)
    assert np.allclose(perf.psi, 1, atol=1e-12)
    assert np.allclose(perf.singular_values, 1, atol=1e-12)
    assert perf.within_bounds
    assert isotropy_residual(sol, m, canon).max < 1e-12


def test_singular_values_match_svd(rng):
    for M in rng.normal(size=(200, 3, 3)):
        assert np.allclose(singular_values_3x3(M), np.linalg.svd(M, compute_uv=False), rtol=1e-9, atol=1e-12)


def test_condition_number_is_root_of_ratio(rng):
    for M in rng.normal(size=(50, 3, 3)):
        s = np.linalg.svd(M, compute_uv=False)
        assert condition_ratio(M) == pytest.approx(s[0] / s[2], rel=1e-8)
        assert condition_number(M) == pytest.approx(np.sqrt(s[0] / s[2]), rel=1e-8)


def test_condition_of_singular_matrix():
    with pytest.raises(InfiniteCondition):
        condition_number(np.diag([1.0, 1.0, 0.0]))


def test_psi_are_singular_values_of_j(canon, rng):
    for p in ball_points(rng, 100, 0.6):
        _, m = at(p, canon)
        perf = manipulability(m)
        assert np.allclose(perf.psi, np.linalg.svd(m.J, compute_uv=False), rtol=1e-10)
        assert np.allclose(perf.force_factors, 1 / perf.psi)
        assert perf.kappa == pytest.approx(np.sqrt(perf.psi[0] / perf.psi[-1]), rel=1e-10)


def test_ellipsoid_surface(canon, rng):
    for p in ball_points(rng, 100, 0.6):
        _, m = at(p, canon)
        rd = rng.normal(size=3)
        rd /= np.linalg.norm(rd)
        assert ellipsoid_membership(m, m.J @ rd) == pytest.approx(1, abs=1e-10)


def test_ellipsoid_axes(canon, rng):
    for p in ball_points(rng, 30, 0.6):
        _, m = at(p, canon)
        perf = manipulability(m)
        for k in range(3):
            # semi-axis k reaches the surface at distance psi_k
            v = perf.ellipsoid_directions[:, k] * perf.psi[k]
            assert ellipsoid_membership(m, v) == pytest.approx(1, abs=1e-10)


def test_within_bounds_flag(canon):
    _, m = at([0.45, 0.45, 0.0], canon)
    perf = manipulability(m)
    assert perf.within_bounds == bool(np.all((perf.psi >= 1 / 3) & (perf.psi <= 3)))
    assert not manipulability(m, psi_min=1.0, psi_max=1.0).within_bounds


def test_singular_configuration_rejected(canon):
    _, m = at([0, 1, 0], canon)
    with pytest.raises(AtSingularity):
        manipulability(m)
    with pytest.raises(AtSingularity):
        ellipsoid_membership(m, [1, 0, 0])


def test_isotropy_residual_away_from_center(canon):
    sol, m = at([0.2, 0.1, 0.0], canon)
    assert isotropy_residual(sol, m, canon).max > 1e-3


def test_psi_extremes_batch(canon, rng):
    P = ball_points(rng, 50, 0.6)
    J_inv = np.array([at(p, canon)[1].J_inv for p in P])
    hi, lo = psi_extremes(J_inv)
    for k, p in enumerate(P):
        psi = manipulability(at(p, canon)[1]).psi
        assert hi[k] == pytest.approx(psi[0], rel=1e-12)
        assert lo[k] == pytest.approx(psi[-1], rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 10.0))
def test_isotropy_for_any_length(L):
    params = canonical_design(L)
    sol, m = at([0, 0, 0], params)
    assert manipulability(m).kappa == pytest.approx(1, abs=1e-12)
    assert isotropy_residual(sol, m, params).max < 1e-12


def diag_j(d, params):
    # B = I and A = diag(1/d) gives J = A^-1 B = diag(d)
    from orthokin.jacobian import matrices_from_rows

    return matrices_from_rows(np.diag(1.0 / np.asarray(d, float)), np.ones(3), params)


def test_diagonal_examples(canon):
    perf = manipulability(diag_j([2, 1, 1], canon))
    assert np.allclose(perf.ellipsoid_axes, [0.5, 1, 1])
    assert np.allclose(perf.psi, [2, 1, 1])
    assert perf.within_bounds
    assert not manipulability(diag_j([4, 1, 1], canon)).within_bounds
    assert condition_number(np.diag([4.0, 2.0, 1.0])) == pytest.approx(2.0)
    assert np.allclose(singular_values_3x3(np.diag([2.0, 1.0, 1.0])), [2, 1, 1])


def test_condition_number_scale_invariant(rng):
    for M in rng.normal(size=(20, 3, 3)):
        c = rng.uniform(-50, 50)
        # sigma comes from eig(M M^T): relative accuracy degrades like eps * (s1/s3)^2
        ratio = condition_ratio(M)
        tol = max(1e-12, 20 * np.finfo(float).eps * ratio**2)
        assert condition_number(c * M) == pytest.approx(condition_number(M), rel=tol)


def test_orthogonality_residual_off_center(canon):
    sol, m = at([0.3, 0, 0], canon)
    assert isotropy_residual(sol, m, canon).orthogonality_residuals.max() > 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 5.0), st.tuples(*[st.floats(-0.5, 0.5)] * 3))
def test_residuals_scale_invariant(alpha, u):
    base = canonical_design(1.0)
    scaled = canonical_design(alpha)
    p = np.array(u)
    r1 = isotropy_residual(*at(p, base), base)
    r2 = isotropy_residual(*at(alpha * p, scaled), scaled)
    assert np.allclose(r1.norm_ratio_residuals, r2.norm_ratio_residuals, atol=1e-9)
    assert np.allclose(r1.orthogonality_residuals, r2.orthogonality_residuals, atol=1e-9)


def test_ellipsoid_zero_velocity(canon):
    _, m = at([0.1, 0.2, 0.0], canon)
    assert ellipsoid_membership(m, np.zeros(3)) == 0
