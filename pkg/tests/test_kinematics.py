import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthokin import DesignParameters, NoAssembly, Unreachable, forward_kinematics, inverse_kinematics, loop_closure_residual
from orthokin.kinematics import ik_arrays

from conftest import ball_points


def test_ik_isotropic(canon):
    sol = inverse_kinematics([0, 0, 0], canon)
    assert np.allclose(sol.rho, 1)
    assert np.allclose(sol.eta, -1)
    assert sol.boundary_flags == (False, False, False)
    for i, leg in enumerate(sol.legs):
        assert np.allclose(leg.b, np.eye(3)[i])


def test_ik_matches_loop_closure(canon, rng):
    for p in ball_points(rng, 200, 0.8):
        sol = inverse_kinematics(p, canon)
        assert np.max(np.abs(loop_closure_residual(p, sol.rho, canon))) < 1e-12


def test_ik_unreachable_names_leg(canon):
    with pytest.raises(Unreachable) as exc:
        inverse_kinematics([0, 1.5, 0], canon)
    assert exc.value.leg == 1
    assert exc.value.excess == pytest.approx(0.5)


def test_ik_boundary_flags(canon):
    sol = inverse_kinematics([0, 1, 0], canon)
    assert sol.boundary_flags == (True, False, True)
    assert sol.eta[0] == pytest.approx(0, abs=1e-12)


def test_vectorised_matches_scalar(canon, rng):
    P = ball_points(rng, 50, 0.6)
    rho, disc = ik_arrays(P, canon)
    assert np.all(disc > 0)
    for p, r in zip(P, rho):
        assert np.allclose(inverse_kinematics(p, canon).rho, r, atol=0)


def test_fk_origin(canon):
    sol = forward_kinematics([1, 1, 1], canon)
    assert np.allclose(sol.p, 0, atol=1e-14)
    assert not sol.newton


def test_fk_roundtrip(canon, rng):
    P = ball_points(rng, 500, 0.4)
    for p in P:
        q = forward_kinematics(inverse_kinematics(p, canon).rho, canon).p
        assert np.linalg.norm(q - p) < 1e-12


def test_fk_singular_slider_matrix(canon):
    # a slider at the origin makes the linear reduction singular
    sol = forward_kinematics([0, 1, 1], canon)
    assert sol.newton
    assert np.max(np.abs(loop_closure_residual(sol.p, [0, 1, 1], canon))) < 1e-9
    assert np.allclose(inverse_kinematics(sol.p, canon).rho, [0, 1, 1], atol=1e-9)


def test_fk_no_assembly(canon):
    with pytest.raises(NoAssembly):
        forward_kinematics([5, 5, 5], canon)


@pytest.mark.parametrize("signs", [(1, 1, 1), (-1, 1, -1), (-1, -1, -1)])
def test_fk_roundtrip_other_modes(rng, signs):
    E, _ = np.linalg.qr(np.array([[2, 1, 0], [0, 1, 1], [1, 0, 3]], float))
    E = E.T
    if np.linalg.det(E) < 0:
        E[2] *= -1
    center = np.array([0.3, -0.2, 0.5])
    a = center - 2.0 * E
    params = DesignParameters(1.3, E, a, signs)
    for p in center + ball_points(rng, 100, 0.4 * 1.3):
        rho = inverse_kinematics(p, params).rho
        q = forward_kinematics(rho, params).p
        assert np.linalg.norm(q - p) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10.0), st.tuples(*[st.floats(-0.39, 0.39)] * 3))
def test_roundtrip_scales_with_L(L, u):
    params = DesignParameters(L, np.eye(3), np.zeros((3, 3)))
    u = np.array(u)
    if np.linalg.norm(u) > 0.4:
        u *= 0.4 / np.linalg.norm(u)
    p = L * u
    q = forward_kinematics(inverse_kinematics(p, params).rho, params).p
    assert np.linalg.norm(q - p) < 1e-9 * L


def test_fk_spec_examples():
    from orthokin import canonical_design

    assert np.allclose(forward_kinematics([2, 2, 2], canonical_design(2.0)).p, 0, atol=1e-14)
    with pytest.raises(NoAssembly):
        forward_kinematics([10, 10, 10], canonical_design(1.0))


def test_ik_axis_point(canon):
    assert np.allclose(inverse_kinematics([0, 1, 0], canon).rho, [0, 2, 0], atol=1e-12)


def test_loop_closure_examples(canon):
    assert np.allclose(loop_closure_residual([0, 0, 0], [1, 1, 1], canon), 0)
    assert np.allclose(loop_closure_residual([0, 0, 0], [2, 1, 1], canon), [1, 0, 0])


@settings(max_examples=100, deadline=None)
@given(st.tuples(*[st.floats(-0.57, 0.57)] * 3), st.floats(0.1, 10.0))
def test_branch_and_scale(u, alpha):
    from orthokin import canonical_design

    p = np.array(u)
    rho = inverse_kinematics(p, canonical_design(1.0)).rho
    assert np.all(rho >= p - 1e-15)
    scaled = inverse_kinematics(alpha * p, canonical_design(alpha)).rho
    assert np.allclose(scaled, alpha * rho, rtol=1e-12, atol=1e-12 * alpha)
