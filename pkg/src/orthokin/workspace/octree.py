"""Octree classification of the Cartesian workspace.

Cells are addressed by ``(depth, ix, iy, iz)`` with ``0 <= i < 2**depth``
inside the analysis box. Each cell is probed at its eight corners and its
centre; probe points live on a global integer lattice of ``2**(max_depth+1)``
steps per axis so that probes shared between cells and levels are evaluated
once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

import numpy as np

from ..model import DesignParameters, isotropic_configuration
from .feasibility import FeasibilitySpec, classify_points

MIN_DEPTH = 2

_CORNERS = np.array([[i >> 2 & 1, i >> 1 & 1, i & 1] for i in range(8)], dtype=np.int64)


class CellLabel(enum.IntEnum):
    OUTSIDE = 0
    INSIDE = 1
    BOUNDARY = 2


@dataclass(frozen=True)
class WorkspaceCell:
    center: np.ndarray
    half_width: np.ndarray
    depth: int
    label: CellLabel
    component_id: Optional[int] = None


@dataclass(eq=False)
class WorkspaceModel:
    """Leaf cells of the octree in Morton order, stored column-wise."""

    params: DesignParameters
    spec: FeasibilitySpec
    bounds: np.ndarray  # (2, 3): lower and upper corner
    max_depth: int
    depth: np.ndarray  # (N,) int
    index: np.ndarray  # (N, 3) int, at the cell's own depth
    label: np.ndarray  # (N,) int8, CellLabel values
    component: np.ndarray = field(default=None)  # (N,) int, -1 when unassigned
    components: int = 0
    largest_component: Optional[int] = None
    probe_evaluations: int = 0

    def __post_init__(self):
        self.bounds = np.asarray(self.bounds, dtype=float).reshape(2, 3)
        self.depth = np.asarray(self.depth, dtype=np.int64)
        self.index = np.asarray(self.index, dtype=np.int64).reshape(-1, 3)
        self.label = np.asarray(self.label, dtype=np.int8)
        if self.component is None:
            self.component = np.full(len(self.depth), -1, dtype=np.int64)

    def __len__(self):
        return len(self.depth)

    @property
    def extent(self) -> np.ndarray:
        return self.bounds[1] - self.bounds[0]

    def cell_sizes(self) -> np.ndarray:
        """Edge lengths ``(N, 3)`` of every leaf."""
        return self.extent[None, :] / (2.0 ** self.depth)[:, None]

    def centers(self) -> np.ndarray:
        return self.bounds[0] + (self.index + 0.5) * self.cell_sizes()

    def cell_volumes(self) -> np.ndarray:
        return np.prod(self.cell_sizes(), axis=1)

    @property
    def volume_lower(self) -> float:
        return float(self.cell_volumes()[self.label == CellLabel.INSIDE].sum())

    @property
    def volume_upper(self) -> float:
        return float(self.cell_volumes()[self.label != CellLabel.OUTSIDE].sum())

    def count(self, label: CellLabel) -> int:
        return int(np.count_nonzero(self.label == label))

    def component_volumes(self) -> np.ndarray:
        if self.components == 0:
            return np.zeros(0)
        inside = self.component >= 0
        return np.bincount(self.component[inside], weights=self.cell_volumes()[inside], minlength=self.components)

    @property
    def cells(self) -> Iterator[WorkspaceCell]:
        centers = self.centers()
        halves = 0.5 * self.cell_sizes()
        for k in range(len(self)):
            comp = int(self.component[k])
            yield WorkspaceCell(
                center=centers[k],
                half_width=halves[k],
                depth=int(self.depth[k]),
                label=CellLabel(int(self.label[k])),
                component_id=None if comp < 0 else comp,
            )

    def with_components(self, component, count, largest) -> "WorkspaceModel":
        return replace(self, component=np.asarray(component, np.int64), components=count, largest_component=largest)


def default_bounds(params: DesignParameters) -> np.ndarray:
    """Cube of edge 4L centred at the isotropic point."""
    try:
        center, _ = isotropic_configuration(params)
    except Exception:
        center = params.rail_anchors.mean(axis=0)
    return np.array([center - 2 * params.L, center + 2 * params.L])


def _part1by2(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64) & np.uint64(0x1FFFFF)
    v = (v | (v << np.uint64(32))) & np.uint64(0x1F00000000FFFF)
    v = (v | (v << np.uint64(16))) & np.uint64(0x1F0000FF0000FF)
    v = (v | (v << np.uint64(8))) & np.uint64(0x100F00F00F00F00F)
    v = (v | (v << np.uint64(4))) & np.uint64(0x10C30C30C30C30C3)
    v = (v | (v << np.uint64(2))) & np.uint64(0x1249249249249249)
    return v


def morton_order(depth: np.ndarray, index: np.ndarray, max_depth: int) -> np.ndarray:
    """Permutation sorting cells by the Morton code of their lower corner, coarser first on ties."""
    shift = (max_depth - depth).astype(np.int64)
    corner = index << shift[:, None]
    code = (_part1by2(corner[:, 0]) << np.uint64(2)) | (_part1by2(corner[:, 1]) << np.uint64(1)) | _part1by2(corner[:, 2])
    return np.lexsort((depth, code))


class _ProbeCache:
    """Feasibility of lattice points, evaluated lazily and remembered across levels."""

    def __init__(self, params, spec, bounds, steps):
        self.params = params
        self.spec = spec
        self.lo = bounds[0]
        self.step = (bounds[1] - bounds[0]) / steps
        self.base = steps + 1
        self.keys = np.zeros(0, dtype=np.int64)
        self.vals = np.zeros(0, dtype=bool)
        self.evaluated = 0

    def lookup(self, lattice: np.ndarray) -> np.ndarray:
        b = self.base
        codes = (lattice[..., 0] * b + lattice[..., 1]) * b + lattice[..., 2]
        flat = codes.reshape(-1)
        uniq, inverse = np.unique(flat, return_inverse=True)
        known = np.zeros(len(uniq), dtype=bool)
        pos = np.zeros(len(uniq), dtype=np.int64)
        if len(self.keys):
            pos = np.minimum(np.searchsorted(self.keys, uniq), len(self.keys) - 1)
            known = self.keys[pos] == uniq
        vals = np.empty(len(uniq), dtype=bool)
        if np.any(known):
            vals[known] = self.vals[pos[known]]
        new = uniq[~known]
        if len(new):
            pts = np.stack([new // (b * b), (new // b) % b, new % b], axis=1)
            feas = classify_points(self.lo + pts * self.step, self.params, self.spec)
            self.evaluated += len(new)
            vals[~known] = feas
            keys = np.concatenate([self.keys, new])
            order = np.argsort(keys, kind="stable")
            self.keys = keys[order]
            self.vals = np.concatenate([self.vals, feas])[order]
        return vals[inverse].reshape(lattice.shape[:-1])


def build_octree(
    params: DesignParameters,
    spec: Optional[FeasibilitySpec] = None,
    bounds=None,
    max_depth: int = 7,
    min_depth: int = MIN_DEPTH,
) -> WorkspaceModel:
    """Classify the analysis box into Inside / Outside / Boundary leaves.

    A cell whose nine probes agree becomes a uniform leaf once it is at least
    ``min_depth`` deep; disagreeing cells are split until ``max_depth``, where
    they are kept as Boundary leaves.
    """
    spec = spec or FeasibilitySpec()
    if not 3 <= max_depth <= 12 or not 0 <= min_depth <= max_depth:
        raise ValueError(f"max_depth must be in [3, 12], got {max_depth}")
    bounds = default_bounds(params) if bounds is None else np.asarray(bounds, dtype=float).reshape(2, 3)
    if not np.all(bounds[1] > bounds[0]):
        raise ValueError("bounds must have positive extent on every axis")
    steps = 1 << (max_depth + 1)
    cache = _ProbeCache(params, spec, bounds, steps)

    leaves_d, leaves_i, leaves_l = [], [], []
    active = np.zeros((1, 3), dtype=np.int64)
    for d in range(max_depth + 1):
        if len(active) == 0:
            break
        size = 1 << (max_depth + 1 - d)
        corners = active[:, None, :] * size + _CORNERS[None, :, :] * size
        center = active[:, None, :] * size + size // 2
        probes = np.concatenate([corners, center], axis=1)  # (M, 9, 3)
        feas = cache.lookup(probes)
        all_in = feas.all(axis=1)
        all_out = ~feas.any(axis=1)
        uniform = (all_in | all_out) & (d >= min_depth)
        if d == max_depth:
            leaf = np.ones(len(active), dtype=bool)
            lab = np.where(all_in, CellLabel.INSIDE, np.where(all_out, CellLabel.OUTSIDE, CellLabel.BOUNDARY))
        else:
            leaf = uniform
            lab = np.where(all_in, CellLabel.INSIDE, CellLabel.OUTSIDE)
        leaves_d.append(np.full(int(leaf.sum()), d, dtype=np.int64))
        leaves_i.append(active[leaf])
        leaves_l.append(lab[leaf].astype(np.int8))
        split = active[~leaf]
        active = (split[:, None, :] * 2 + _CORNERS[None, :, :]).reshape(-1, 3)

    depth = np.concatenate(leaves_d)
    index = np.concatenate(leaves_i)
    label = np.concatenate(leaves_l)
    order = morton_order(depth, index, max_depth)
    return WorkspaceModel(
        params=params,
        spec=spec,
        bounds=bounds,
        max_depth=max_depth,
        depth=depth[order],
        index=index[order],
        label=label[order],
        probe_evaluations=cache.evaluated,
    )
