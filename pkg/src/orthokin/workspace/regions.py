"""Connectivity of Inside cells and the largest cube inscribed in them."""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .octree import CellLabel, WorkspaceModel

_BITS = 13  # enough for depth 12 indices
_DIRECTIONS = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=np.int64)


def _encode(depth, index):
    return ((depth << _BITS | index[:, 0]) << _BITS | index[:, 1]) << _BITS | index[:, 2]


class LeafIndex:
    """Lookup of leaves by ``(depth, index)`` including coarser leaves that contain a cell."""

    def __init__(self, model: WorkspaceModel):
        codes = _encode(model.depth, model.index)
        self.order = np.argsort(codes, kind="stable")
        self.codes = codes[self.order]
        self.max_depth = model.max_depth

    def find(self, depth: np.ndarray, index: np.ndarray) -> np.ndarray:
        """Position of the leaf at ``(depth, index)`` or of the coarser leaf containing it, else -1."""
        out = np.full(len(depth), -1, dtype=np.int64)
        if len(self.codes) == 0:
            return out
        pending = np.ones(len(depth), dtype=bool)
        for k in range(int(depth.max(initial=0)) + 1):
            sel = pending & (depth - k >= 0)
            if not np.any(sel):
                break
            codes = _encode(depth[sel] - k, index[sel] >> k)
            pos = np.minimum(np.searchsorted(self.codes, codes), len(self.codes) - 1)
            hit = self.codes[pos] == codes
            rows = np.flatnonzero(sel)[hit]
            out[rows] = self.order[pos[hit]]
            pending[rows] = False
        return out


def face_neighbours(model: WorkspaceModel, cells: np.ndarray, leaves: Optional[LeafIndex] = None):
    """For each cell in ``cells`` and each of the six faces, the same-size-or-larger leaf across it.

    Returns an ``(len(cells), 6)`` array of leaf positions, -1 where the face
    lies on the analysis box or the region across it is subdivided. Pairs with
    a subdivided neighbour are found from the smaller side.
    """
    leaves = leaves or LeafIndex(model)
    depth = model.depth[cells]
    index = model.index[cells]
    out = np.full((len(cells), 6), -1, dtype=np.int64)
    for k, step in enumerate(_DIRECTIONS):
        n = index + step
        ok = np.all((n >= 0) & (n < (1 << depth)[:, None]), axis=1)
        found = np.full(len(cells), -1, dtype=np.int64)
        found[ok] = leaves.find(depth[ok], n[ok])
        out[:, k] = found
    return out


def t_connected_regions(model: WorkspaceModel) -> WorkspaceModel:
    """Label face-connected groups of Inside leaves.

    Components are numbered by decreasing volume (ties broken by Morton
    position), so component 0 is the largest.
    """
    inside = np.flatnonzero(model.label == CellLabel.INSIDE)
    component = np.full(len(model), -1, dtype=np.int64)
    if len(inside) == 0:
        return model.with_components(component, 0, None)
    nb = face_neighbours(model, inside)
    src = np.repeat(inside, 6)
    dst = nb.reshape(-1)
    keep = dst >= 0
    src, dst = src[keep], dst[keep]
    keep = model.label[dst] == CellLabel.INSIDE
    src, dst = src[keep], dst[keep]
    n = len(model)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, raw = connected_components(graph, directed=False)
    raw_inside = raw[inside]
    uniq, first, inv = np.unique(raw_inside, return_index=True, return_inverse=True)
    vols = np.bincount(inv, weights=model.cell_volumes()[inside])
    rank = np.lexsort((first, -vols))
    new_id = np.empty(len(uniq), dtype=np.int64)
    new_id[rank] = np.arange(len(uniq))
    component[inside] = new_id[inv]
    return model.with_components(component, len(uniq), 0)


def inside_voxels(model: WorkspaceModel, resolution_depth: Optional[int] = None, component: Optional[int] = None):
    """Rasterise Inside leaves onto a uniform grid cropped to their bounding box.

    Leaves finer than the raster are dropped, so the raster never claims
    space that is not Inside. Returns ``(mask, origin_index, depth)``.
    """
    R = min(model.max_depth, 9) if resolution_depth is None else resolution_depth
    sel = model.label == CellLabel.INSIDE
    if component is not None:
        sel &= model.component == component
    sel &= model.depth <= R
    idx = np.flatnonzero(sel)
    if len(idx) == 0:
        return np.zeros((0, 0, 0), dtype=bool), np.zeros(3, dtype=np.int64), R
    scale = 1 << (R - model.depth[idx])
    lo = model.index[idx] * scale[:, None]
    hi = lo + scale[:, None]
    origin = lo.min(axis=0)
    shape = hi.max(axis=0) - origin
    mask = np.zeros(tuple(int(s) for s in shape), dtype=bool)
    for (x0, y0, z0), (x1, y1, z1) in zip(lo - origin, hi - origin):
        mask[x0:x1, y0:y1, z0:z1] = True
    return mask, origin, R


def largest_cube_in_mask(mask: np.ndarray) -> tuple[int, np.ndarray]:
    """Edge (in voxels) and lower corner of the largest all-True axis-aligned cube."""
    if mask.size == 0 or not mask.any():
        return 0, np.zeros(3, dtype=np.int64)
    S = np.zeros(tuple(s + 1 for s in mask.shape), dtype=np.int64)
    S[1:, 1:, 1:] = mask.cumsum(0).cumsum(1).cumsum(2)

    def fits(k):
        box = (
            S[k:, k:, k:] - S[:-k, k:, k:] - S[k:, :-k, k:] - S[k:, k:, :-k]
            + S[:-k, :-k, k:] + S[:-k, k:, :-k] + S[k:, :-k, :-k] - S[:-k, :-k, :-k]
        )
        hits = np.argwhere(box == k**3)
        return hits[0] if len(hits) else None

    lo, hi = 1, min(mask.shape)
    best = fits(1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        corner = fits(mid)
        if corner is not None:
            lo, best = mid, corner
        else:
            hi = mid - 1
    return lo, np.asarray(best, dtype=np.int64)


def largest_inscribed_cube(model: WorkspaceModel, component: Optional[int] = None) -> tuple[float, np.ndarray]:
    """Edge length and centre of the largest axis-aligned cube made of Inside cells.

    Cube edges are measured along the smallest box extent, so for non-cubic
    analysis boxes the result is a conservative box-shaped estimate.
    """
    mask, origin, R = inside_voxels(model, component=component)
    k, corner = largest_cube_in_mask(mask)
    voxel = model.extent / (1 << R)
    if k == 0:
        return 0.0, np.full(3, np.nan)
    center = model.bounds[0] + (origin + corner + 0.5 * k) * voxel
    return float(k * voxel.min()), center
