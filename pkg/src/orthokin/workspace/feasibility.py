"""Pointwise feasibility predicate used by the octree, sections and limit synthesis."""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..kinematics import ik_arrays, link_vectors_arrays
from ..model import DesignParameters, as_vector
from ..performance import PSI_MAX, PSI_MIN, psi_extremes

CHUNK = 1 << 15


class Reason(enum.IntEnum):
    """Outcome of the feasibility tests, in the order they are applied."""

    FEASIBLE = 0
    UNREACHABLE = 1
    JOINT_LIMITS = 2
    SERIAL_MARGIN = 3
    ASSEMBLY_MODE = 4
    PARALLEL_MARGIN = 5
    PSI_BOUNDS = 6
    COLLISION = 7

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    Reason.FEASIBLE: "Feasible",
    Reason.UNREACHABLE: "Unreachable",
    Reason.JOINT_LIMITS: "JointLimits",
    Reason.SERIAL_MARGIN: "SerialMargin",
    Reason.ASSEMBLY_MODE: "AssemblyMode",
    Reason.PARALLEL_MARGIN: "ParallelMargin",
    Reason.PSI_BOUNDS: "PsiBounds",
    Reason.COLLISION: "Collision",
}


@dataclass(frozen=True)
class FeasibilitySpec:
    """What a Cartesian point must satisfy to belong to the workspace.

    ``singular_margin`` bounds both ``|det A| / L^3`` and ``min |eta_i| / L``
    from below. ``require_assembly_mode`` rejects points whose det A has the
    opposite sign to the isotropic configuration: they can only be reached by
    crossing a parallel singularity. ``collision_free`` is a vectorised hook
    mapping an ``(N, 3)`` array of points to booleans; ``None`` means no
    collision model.
    """

    require_reachable: bool = True
    require_joint_limits: bool = True
    psi_min: float = PSI_MIN
    psi_max: float = PSI_MAX
    singular_margin: float = 1e-2
    require_assembly_mode: bool = True
    collision_free: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not self.require_reachable:
            raise ValueError("require_reachable cannot be disabled")
        if not (0 < self.psi_min <= 1 <= self.psi_max):
            raise ValueError(f"need 0 < psi_min <= 1 <= psi_max, got [{self.psi_min}, {self.psi_max}]")
        if not self.singular_margin >= 0:
            raise ValueError("singular_margin must be nonnegative")


def thread_count() -> int:
    cap = os.environ.get("ORTHOKIN_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def evaluate_points(P, params: DesignParameters, spec: FeasibilitySpec) -> dict[str, np.ndarray]:
    """Feasibility reason plus the performance quantities at every point of ``P`` ``(N, 3)``.

    Chunks are evaluated on a thread pool capped by ``ORTHOKIN_THREADS``;
    results are concatenated in input order, so output does not depend on
    scheduling.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float)).reshape(-1, 3)
    n = len(P)
    if n <= CHUNK:
        return _evaluate(P, params, spec)
    chunks = [P[i : i + CHUNK] for i in range(0, n, CHUNK)]
    workers = min(thread_count(), len(chunks))
    if workers <= 1:
        parts = [_evaluate(c, params, spec) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _evaluate(c, params, spec), chunks))
    return {k: np.concatenate([part[k] for part in parts]) for k in parts[0]}


def _evaluate(P, params: DesignParameters, spec: FeasibilitySpec) -> dict[str, np.ndarray]:
    L = params.L
    rho, disc = ik_arrays(P, params)
    rows = link_vectors_arrays(P, rho, params)
    eta = np.einsum("nij,ij->ni", rows, params.rail_axes)
    det_a = np.einsum("ni,ni->n", rows[:, 0], np.cross(rows[:, 1], rows[:, 2]))
    eta_n = np.min(np.abs(eta), axis=1) / L
    det_n = det_a / L**3

    safe_eta = np.where(np.abs(eta) > 0, eta, 1.0)
    psi_max, psi_min = psi_extremes(rows / safe_eta[:, :, None])
    bad = eta_n <= 0
    psi_max = np.where(bad, np.inf, psi_max)
    psi_min = np.where(bad, 0.0, psi_min)

    reason = np.zeros(len(P), dtype=np.int8)

    def mark(mask, r):
        reason[(reason == 0) & mask] = r

    tol = params.tolerances.residual_eps * L
    mark(np.any(disc < -tol, axis=1), Reason.UNREACHABLE)
    if spec.require_joint_limits and params.joint_limits is not None:
        lo, hi = params.joint_limits[:, 0], params.joint_limits[:, 1]
        mark(np.any((rho < lo) | (rho > hi), axis=1), Reason.JOINT_LIMITS)
    mark(eta_n <= spec.singular_margin, Reason.SERIAL_MARGIN)
    if spec.require_assembly_mode:
        mark(det_a * params.assembly_sign <= 0, Reason.ASSEMBLY_MODE)
    mark(np.abs(det_n) <= spec.singular_margin, Reason.PARALLEL_MARGIN)
    mark((psi_min < spec.psi_min) | (psi_max > spec.psi_max) | ~np.isfinite(psi_max), Reason.PSI_BOUNDS)
    if spec.collision_free is not None:
        pending = reason == 0
        if np.any(pending):
            ok = np.asarray(spec.collision_free(P[pending]), dtype=bool)
            sub = reason[pending]
            sub[~ok] = Reason.COLLISION
            reason[pending] = sub
    return {
        "reason": reason,
        "rho": rho,
        "eta_n": eta_n,
        "det_n": det_n,
        "psi_max": psi_max,
        "psi_min": psi_min,
    }


def classify_points(P, params: DesignParameters, spec: FeasibilitySpec) -> np.ndarray:
    """Boolean feasibility of each row of ``P``."""
    return evaluate_points(P, params, spec)["reason"] == Reason.FEASIBLE


@dataclass(frozen=True)
class PointClassification:
    feasible: bool
    reason: Reason


def classify_point(p, params: DesignParameters, spec: Optional[FeasibilitySpec] = None) -> PointClassification:
    spec = spec or FeasibilitySpec()
    p = as_vector(p, "p")
    r = Reason(int(evaluate_points(p[None, :], params, spec)["reason"][0]))
    return PointClassification(feasible=r == Reason.FEASIBLE, reason=r)
