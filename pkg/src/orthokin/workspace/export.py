"""File writers for workspace results: PLY surface, CSV section, JSON summary."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np

from ..report import dumps, fmt
from .octree import CellLabel, WorkspaceModel
from .regions import LeafIndex, face_neighbours, largest_inscribed_cube
from .sections import LimitSynthesis, SectionGrid

# same face order as regions._DIRECTIONS: +x, -x, +y, -y, +z, -z
_FACE_AXIS = [0, 0, 1, 1, 2, 2]
_FACE_SIGN = [1, -1, 1, -1, 1, -1]


def boundary_faces(model: WorkspaceModel) -> list[tuple[int, int, int, int, int, int]]:
    """Exposed faces of the Inside region as ``(axis, sign, depth, i, j, k)`` lattice squares.

    A face is emitted where the region across it is not Inside; when the far
    side is subdivided, only the sub-squares facing non-Inside leaves are
    emitted.
    """
    leaves = LeafIndex(model)
    inside = np.flatnonzero(model.label == CellLabel.INSIDE)
    nb = face_neighbours(model, inside, leaves)
    faces = []

    def visit(d, idx, axis, sign):
        # idx: cell at depth d on the far side of the face
        hit = int(leaves.find(np.array([d]), idx[None, :])[0])
        if hit >= 0:
            if model.label[hit] != CellLabel.INSIDE:
                faces.append((axis, sign, d, *[int(v) for v in idx]))
            return
        u, v = [i for i in range(3) if i != axis]
        for a in (0, 1):
            for b in (0, 1):
                child = idx * 2
                child[u] += a
                child[v] += b
                child[axis] += 0 if sign > 0 else 1
                visit(d + 1, child, axis, sign)

    for row, c in enumerate(inside):
        d = int(model.depth[c])
        for k in range(6):
            axis, sign = _FACE_AXIS[k], _FACE_SIGN[k]
            n = model.index[c].copy()
            n[axis] += sign
            if n[axis] < 0 or n[axis] >= (1 << d):
                faces.append((axis, sign, d, *[int(v) for v in n]))
            elif nb[row, k] >= 0:
                if model.label[nb[row, k]] != CellLabel.INSIDE:
                    faces.append((axis, sign, d, *[int(v) for v in n]))
            else:
                visit(d, n, axis, sign)
    return faces


def _face_quad(model: WorkspaceModel, face):
    axis, sign, d, i, j, k = face
    idx = np.array([i, j, k], dtype=np.int64)
    scale = 1 << (model.max_depth - d)
    # the quad lies on the near side of the far cell
    lo = idx * scale
    plane = lo[axis] + (scale if sign < 0 else 0)
    u, v = [a for a in range(3) if a != axis]
    corners = []
    for du, dv in ((0, 0), (1, 0), (1, 1), (0, 1)):
        c = lo.copy()
        c[axis] = plane
        c[u] += du * scale
        c[v] += dv * scale
        corners.append(tuple(int(x) for x in c))
    # keep the normal pointing out of the Inside region
    if (sign < 0) != (axis == 1):
        corners.reverse()
    return corners


def write_ply(model: WorkspaceModel, path) -> int:
    """ASCII PLY of the exposed Inside faces; returns the face count."""
    faces = boundary_faces(model)
    vertex_id: dict[tuple[int, int, int], int] = {}
    quads = []
    for face in faces:
        q = []
        for corner in _face_quad(model, face):
            if corner not in vertex_id:
                vertex_id[corner] = len(vertex_id)
            q.append(vertex_id[corner])
        quads.append(q)
    step = model.extent / (1 << model.max_depth)
    lines = [
        "ply",
        "format ascii 1.0",
        "comment orthokin workspace, Inside-cell boundary",
        f"element vertex {len(vertex_id)}",
        "property double x",
        "property double y",
        "property double z",
        f"element face {len(quads)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    for corner in vertex_id:
        xyz = model.bounds[0] + np.array(corner) * step
        lines.append(" ".join(fmt(c) for c in xyz))
    for q in quads:
        lines.append("4 " + " ".join(str(v) for v in q))
    Path(path).write_text("\n".join(lines) + "\n")
    return len(quads)


def section_csv(section: SectionGrid) -> str:
    rows = ["axis,offset,resolution", f"{section.axis},{fmt(section.offset)},{section.resolution}"]
    rows += [",".join("1" if b else "0" for b in row) for row in section.grid]
    return "\n".join(rows) + "\n"


def write_section_csv(section: SectionGrid, path) -> None:
    Path(path).write_text(section_csv(section))


def read_section_csv(path) -> SectionGrid:
    lines = Path(path).read_text().splitlines()
    if lines[0] != "axis,offset,resolution":
        raise ValueError("not a section file")
    axis, offset, res = lines[1].split(",")
    grid = np.array([[c == "1" for c in line.split(",")] for line in lines[2:]], dtype=bool)
    free = [a for a in "xyz" if a != axis]
    return SectionGrid(axis=axis, offset=float(offset), resolution=int(res), u_axis=free[0], v_axis=free[1],
                       u=np.array([]), v=np.array([]), grid=grid)


def summary(model: WorkspaceModel, limits: Optional[LimitSynthesis] = None) -> dict:
    edge, center = largest_inscribed_cube(model)
    vl = model.volume_lower
    comp_vol = model.component_volumes()
    out = {
        "max_depth": model.max_depth,
        "bounds": model.bounds,
        "leg_length": model.params.L,
        "psi_bounds": [model.spec.psi_min, model.spec.psi_max],
        "singular_margin": model.spec.singular_margin,
        "cells": {
            "inside": model.count(CellLabel.INSIDE),
            "outside": model.count(CellLabel.OUTSIDE),
            "boundary": model.count(CellLabel.BOUNDARY),
        },
        "volume_lower": vl,
        "volume_upper": model.volume_upper,
        "components": model.components,
        "component_volumes": comp_vol,
        "largest_component": model.largest_component,
        "inscribed_cube_edge": edge,
        "inscribed_cube_center": center if edge > 0 else None,
        "inscribed_cube_fraction": (edge**3 / vl) if vl > 0 else None,
        "joint_limits": None if model.params.joint_limits is None else model.params.joint_limits,
    }
    if limits is not None:
        out["synthesized_limits"] = limits_summary(limits)
    return out


def limits_summary(limits: LimitSynthesis) -> dict:
    return {
        "center": limits.center,
        "cube_edge": limits.edge,
        "resolution": limits.resolution,
        "joint_limits": limits.limits,
    }


def write_summary(model: WorkspaceModel, path, limits: Optional[LimitSynthesis] = None) -> dict:
    data = summary(model, limits)
    Path(path).write_text(dumps(data))
    return data
