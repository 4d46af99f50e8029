"""Planar sections of the workspace and joint-limit synthesis."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..errors import DegenerateSpec, OffsetOutOfBounds
from ..kinematics import ik_arrays
from ..model import DesignParameters, isotropic_configuration
from .feasibility import FeasibilitySpec, Reason, classify_points, evaluate_points
from .octree import WorkspaceModel

AXES = "xyz"


@dataclass(frozen=True)
class SectionGrid:
    """Occupancy of a slice plane. ``grid[i, j]`` samples the first free axis at ``u[i]`` and the second at ``v[j]``."""

    axis: str
    offset: float
    resolution: int
    u_axis: str
    v_axis: str
    u: np.ndarray
    v: np.ndarray
    grid: np.ndarray  # (resolution, resolution) bool


def _axis_index(axis) -> int:
    if isinstance(axis, str):
        if axis.lower() not in AXES or len(axis) != 1:
            raise ValueError(f"axis must be one of x, y, z (got {axis!r})")
        return AXES.index(axis.lower())
    if axis not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2 (got {axis!r})")
    return int(axis)


def section_points(bounds, axis, offset: float, resolution: int):
    bounds = np.asarray(bounds, dtype=float).reshape(2, 3)
    k = _axis_index(axis)
    if not bounds[0, k] <= offset <= bounds[1, k]:
        raise OffsetOutOfBounds(f"offset {offset} outside [{bounds[0, k]}, {bounds[1, k]}] along {AXES[k]}")
    free = [i for i in range(3) if i != k]
    # cell-centred samples
    u = bounds[0, free[0]] + (np.arange(resolution) + 0.5) * (bounds[1, free[0]] - bounds[0, free[0]]) / resolution
    v = bounds[0, free[1]] + (np.arange(resolution) + 0.5) * (bounds[1, free[1]] - bounds[0, free[1]]) / resolution
    U, V = np.meshgrid(u, v, indexing="ij")
    P = np.empty(U.shape + (3,))
    P[..., k] = offset
    P[..., free[0]] = U
    P[..., free[1]] = V
    return P, u, v, free, k


def cross_section(model: WorkspaceModel, axis, offset: float, resolution: int = 64) -> SectionGrid:
    """Sample the feasibility predicate on a ``resolution x resolution`` grid of the slice plane."""
    if resolution < 1:
        raise ValueError("resolution must be positive")
    P, u, v, free, k = section_points(model.bounds, axis, offset, resolution)
    grid = classify_points(P.reshape(-1, 3), model.params, model.spec).reshape(resolution, resolution)
    return SectionGrid(
        axis=AXES[k], offset=float(offset), resolution=resolution,
        u_axis=AXES[free[0]], v_axis=AXES[free[1]], u=u, v=v, grid=grid,
    )


@dataclass(frozen=True)
class LimitSynthesis:
    center: np.ndarray
    half_edge: float
    limits: np.ndarray  # (3, 2) rows (rho_min, rho_max)
    resolution: int
    iterations: int

    @property
    def edge(self) -> float:
        return 2.0 * self.half_edge

    def apply(self, params: DesignParameters) -> DesignParameters:
        return params.with_joint_limits(self.limits)


def cube_samples(center, half_edge: float, resolution: int) -> np.ndarray:
    g = np.linspace(-half_edge, half_edge, resolution) if resolution > 1 else np.zeros(1)
    X, Y, Z = np.meshgrid(g, g, g, indexing="ij")
    return np.asarray(center) + np.stack([X, Y, Z], axis=-1).reshape(-1, 3)


def synthesize_joint_limits(
    params: DesignParameters,
    spec: Optional[FeasibilitySpec] = None,
    resolution: int = 21,
    rel_tol: float = 1e-3,
) -> LimitSynthesis:
    """Largest cube around the isotropic point whose samples are all feasible, and the rho range over it.

    The cube half-edge is found by bisection (to ``rel_tol`` relative
    precision) with joint limits ignored. When only the centre is feasible the
    search stops once the bracket is below ``1e-6 L`` and the limits collapse
    onto the isotropic joint values.
    """
    spec = replace(spec or FeasibilitySpec(), require_joint_limits=False)
    center, _ = isotropic_configuration(params)
    L = params.L
    if evaluate_points(center[None, :], params, spec)["reason"][0] != Reason.FEASIBLE:
        raise DegenerateSpec("the isotropic point itself is infeasible under this specification")

    def ok(h):
        return bool(classify_points(cube_samples(center, h, resolution), params, spec).all())

    lo, hi = 0.0, L
    iterations = 0
    while hi - lo > rel_tol * lo and hi > 1e-6 * L:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
        iterations += 1
    rho, _ = ik_arrays(cube_samples(center, lo, resolution), params)
    limits = np.stack([rho.min(axis=0), rho.max(axis=0)], axis=1)
    return LimitSynthesis(center=center, half_edge=lo, limits=limits, resolution=resolution, iterations=iterations)
