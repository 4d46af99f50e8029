"""Position-level inverse and forward kinematics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoAssembly, Unreachable
from .model import DesignParameters, as_vector, isotropic_configuration


@dataclass(frozen=True)
class LegState:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    eta: float


@dataclass(frozen=True)
class IkSolution:
    rho: np.ndarray
    legs: tuple[LegState, LegState, LegState]
    boundary_flags: tuple[bool, bool, bool]

    @property
    def eta(self) -> np.ndarray:
        return np.array([leg.eta for leg in self.legs])

    @property
    def link_vectors(self) -> np.ndarray:
        """Rows ``c_i - b_i``."""
        return np.array([leg.c - leg.b for leg in self.legs])


@dataclass(frozen=True)
class FkSolution:
    p: np.ndarray
    t: float  # squared distance of p from the origin
    degenerate: bool = False
    newton: bool = False


def ik_arrays(P, params: DesignParameters):
    """Vectorised inverse kinematics.

    Returns ``(rho, disc)`` with shape ``(N, 3)`` each, where ``disc`` is
    ``L^2 - r_i^2``. Entries with ``disc < 0`` are unreachable; their ``rho``
    is computed from the clamped discriminant and must not be trusted.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    E, a = params.rail_axes, params.rail_anchors
    D = P[:, None, :] - a[None, :, :]  # (N, leg, xyz)
    along = np.einsum("nij,ij->ni", D, E)
    r2 = np.einsum("nij,nij->ni", D, D) - along * along
    disc = params.L * params.L - r2
    rho = along + params.signs * np.sqrt(np.clip(disc, 0.0, None))
    return rho, disc


def link_vectors_arrays(P, rho, params: DesignParameters) -> np.ndarray:
    """Rows ``c_i - b_i = p - a_i - rho_i e_i`` for each point, shape ``(N, 3, 3)``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    E, a = params.rail_axes, params.rail_anchors
    return P[:, None, :] - a[None] - rho[:, :, None] * E[None]


def _disc_tol(params: DesignParameters) -> float:
    return params.tolerances.residual_eps * params.L


def inverse_kinematics(p, params: DesignParameters) -> IkSolution:
    p = as_vector(p, "p")
    rho, disc = ik_arrays(p, params)
    rho, disc = rho[0], disc[0]
    tol = _disc_tol(params)
    for i in range(3):
        if disc[i] < -tol:
            r = math.sqrt(params.L**2 - disc[i])
            raise Unreachable(i + 1, r - params.L)
    E, a = params.rail_axes, params.rail_anchors
    legs = []
    for i in range(3):
        b = a[i] + rho[i] * E[i]
        legs.append(LegState(a=a[i].copy(), b=b, c=p.copy(), eta=float((p - b) @ E[i])))
    return IkSolution(rho=rho, legs=tuple(legs), boundary_flags=tuple(bool(d <= tol) for d in disc))


def loop_closure_residual(p, rho, params: DesignParameters) -> np.ndarray:
    """``||p - (a_i + rho_i e_i)|| - L`` per leg."""
    p = as_vector(p, "p")
    rho = as_vector(rho, "rho")
    b = params.rail_anchors + rho[:, None] * params.rail_axes
    return np.linalg.norm(p[None, :] - b, axis=1) - params.L


def _branch_ok(p, rho, params: DesignParameters, tol: float) -> bool:
    # IK reproduces rho exactly when each link lies on its leg's working-mode side
    b = params.rail_anchors + rho[:, None] * params.rail_axes
    eta = np.einsum("ij,ij->i", p[None, :] - b, params.rail_axes)
    return bool(np.all(params.signs * eta <= tol))


def _det_a(p, rho, params: DesignParameters) -> float:
    rows = link_vectors_arrays(p, rho[None, :], params)[0]
    return float(rows[0] @ np.cross(rows[1], rows[2]))


def _newton_from(p, b, params: DesignParameters):
    L2 = params.L**2
    tol = params.tolerances.residual_eps * params.L * params.L

    def worst(q):
        d = q[None, :] - b
        return np.max(np.abs(np.einsum("ij,ij->i", d, d) - L2))

    for _ in range(params.tolerances.iter_max):
        d = p[None, :] - b
        f = np.einsum("ij,ij->i", d, d) - L2
        fmax = np.max(np.abs(f))
        if fmax <= 1e-14 * L2:
            return p
        step = np.linalg.lstsq(2.0 * d, -f, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6 and not worst(p + lam * step) < fmax:
            lam *= 0.5
        if lam <= 1e-6:
            break
        p = p + lam * step
    return p if worst(p) <= tol else None


def _newton(rho, params: DesignParameters):
    """Damped Newton on ``||p - b_i||^2 - L^2 = 0``.

    Seeded at the isotropic point, then at points offset from it by L/2
    along each rail, because the isotropic point can be a saddle of the
    residual for some ``rho``.
    """
    b = params.rail_anchors + rho[:, None] * params.rail_axes
    try:
        p0, _ = isotropic_configuration(params)
    except Exception:
        p0 = b.mean(axis=0)
    seeds = [p0]
    for i in range(3):
        for sgn in (1.0, -1.0):
            seeds.append(p0 + sgn * 0.5 * params.L * params.rail_axes[i])
    branch_tol = params.tolerances.residual_eps * params.L
    fallback = None
    for seed in seeds:
        p = _newton_from(np.array(seed, float), b, params)
        if p is None or not _branch_ok(p, rho, params, branch_tol):
            continue
        if _det_a(p, rho, params) * params.assembly_sign > 0:
            return p
        fallback = fallback if fallback is not None else p
    return fallback


def forward_kinematics(rho, params: DesignParameters) -> FkSolution:
    """Tool point for the actuated coordinates ``rho``.

    With ``b_i`` the slider positions, each sphere ``||p - b_i|| = L`` reads
    ``b_i . p = (t + ||b_i||^2 - L^2) / 2`` with ``t = ||p||^2``, so ``p`` is
    affine in ``t`` and ``t = ||p||^2`` becomes a quadratic.

    Among the roots, those that the inverse kinematics maps back to ``rho``
    under the design's working mode are kept, and the one in the design's
    assembly mode (same sign of det A as the isotropic configuration) wins.
    """
    rho = as_vector(rho, "rho")
    L = params.L
    tol = params.tolerances
    b = params.rail_anchors + rho[:, None] * params.rail_axes
    norms = np.linalg.norm(b, axis=1)
    det_b = float(b[0] @ np.cross(b[1], b[2]))
    singular = np.any(norms < tol.geom_eps * L) or abs(det_b) <= tol.geom_eps * float(np.prod(norms))

    branch_tol = tol.residual_eps * L
    if singular:
        p = _newton(rho, params)
        if p is None:
            raise NoAssembly(f"no assembly found for rho={rho.tolist()}")
        return FkSolution(p=p, t=float(p @ p), newton=True)

    d = np.einsum("ij,ij->i", b, b) - L * L
    u = np.linalg.solve(b, np.full(3, 0.5))
    w = np.linalg.solve(b, 0.5 * d)
    qa = u @ u
    qb = 2.0 * (u @ w) - 1.0
    qc = w @ w
    disc = qb * qb - 4.0 * qa * qc
    scale = max(qb * qb, abs(4.0 * qa * qc), 1e-300)
    if disc < -1e-12 * scale:
        raise NoAssembly(f"spheres do not meet for rho={rho.tolist()}")
    sq = math.sqrt(max(disc, 0.0))
    # numerically stable pair of roots
    if qb >= 0:
        k = -0.5 * (qb + sq)
    else:
        k = -0.5 * (qb - sq)
    roots = {k / qa}
    if k != 0.0:
        roots.add(qc / k)
    else:
        roots.add(0.0)
    tangency = disc <= 1e-12 * scale

    candidates = []
    for t in sorted(roots, reverse=True):
        if t < -branch_tol * L:
            continue
        p = u * t + w
        if _branch_ok(p, rho, params, branch_tol):
            candidates.append((t, p))
    if not candidates:
        raise NoAssembly(f"no root of the working mode {params.branch_signs} for rho={rho.tolist()}")
    same_mode = [(t, p) for t, p in candidates if _det_a(p, rho, params) * params.assembly_sign > 0]
    pool = same_mode or candidates
    t, p = pool[0]  # sorted by decreasing t
    degenerate = bool(tangency or len(pool) > 1)
    return FkSolution(p=p, t=float(t), degenerate=degenerate)
