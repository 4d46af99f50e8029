"""Static figures written next to the delimited outputs (PNG via the Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .workspace.octree import CellLabel, WorkspaceModel  # noqa: E402
from .workspace.sections import SectionGrid  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "figure.dpi": 110,
    "savefig.bbox": "tight",
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def _section_axes(ax, section: SectionGrid, cmap="Greys"):
    du = (section.u[1] - section.u[0]) if len(section.u) > 1 else 1.0
    dv = (section.v[1] - section.v[0]) if len(section.v) > 1 else 1.0
    extent = (section.u[0] - du / 2, section.u[-1] + du / 2, section.v[0] - dv / 2, section.v[-1] + dv / 2)
    ax.imshow(section.grid.T.astype(float), origin="lower", extent=extent, cmap=cmap, vmin=0, vmax=1.6,
              interpolation="nearest")
    ax.set_xlabel(f"{section.u_axis} [m]")
    ax.set_ylabel(f"{section.v_axis} [m]")
    ax.set_aspect("equal")
    ax.set_title(f"section {section.axis} = {section.offset:.4g} m")


def section_figure(section: SectionGrid, path, cube=None) -> Path:
    """Occupancy image of a slice; ``cube`` = (center, half_edge) draws the synthesized cube outline."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        _section_axes(ax, section)
        if cube is not None:
            center, h = cube
            k = "xyz".index(section.axis)
            free = [i for i in range(3) if i != k]
            cu, cv = center[free[0]], center[free[1]]
            ax.plot([cu - h, cu + h, cu + h, cu - h, cu - h], [cv - h, cv - h, cv + h, cv + h, cv - h],
                    color="tab:red", lw=1.2, label="synthesized cube")
            ax.legend(loc="upper right", fontsize=8, frameon=False)
        return _save(fig, path)


def workspace_figure(model: WorkspaceModel, path, section: SectionGrid | None = None, max_points: int = 20000) -> Path:
    """Inside cell centres in 3D, optionally beside a cross-section."""
    inside = model.label == CellLabel.INSIDE
    pts = model.centers()[inside]
    vols = model.cell_volumes()[inside]
    if len(pts) > max_points:
        # deterministic thinning, larger cells first
        keep = np.argsort(-vols, kind="stable")[:max_points]
        pts = pts[np.sort(keep)]
    with plt.rc_context(RC):
        fig = plt.figure(figsize=(10 if section is not None else 5, 4.5))
        ax = fig.add_subplot(1, 2 if section is not None else 1, 1, projection="3d")
        if len(pts):
            ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=1, c=pts[:, 2], cmap="viridis", alpha=0.5, linewidths=0)
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.set_zlabel("z [m]")
        ax.set_title(f"Inside cells, depth {model.max_depth}")
        if section is not None:
            _section_axes(fig.add_subplot(1, 2, 2), section)
            fig.subplots_adjust(wspace=0.45)
        return _save(fig, path)


def metric_map_figure(points: np.ndarray, values: np.ndarray, metric: str, path) -> Path:
    """Heat map of the grid layer closest to the middle of the sampled z range."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 4.2))
        if len(points):
            zs = np.unique(points[:, 2])
            z = zs[np.argmin(np.abs(zs - 0.5 * (zs[0] + zs[-1])))]
            layer = points[:, 2] == z
            xs, ys = np.unique(points[layer, 0]), np.unique(points[layer, 1])
            grid = values[layer].reshape(len(xs), len(ys))
            im = ax.imshow(grid.T, origin="lower", extent=(xs[0], xs[-1], ys[0], ys[-1]), cmap="magma",
                           interpolation="nearest", aspect="equal")
            fig.colorbar(im, ax=ax, label=metric)
            ax.set_title(f"{metric} at z = {z:.4g} m")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        return _save(fig, path)


def ellipsoid_figure(axes_lengths, directions, path, n: int = 24) -> Path:
    """Wireframe of the velocity ellipsoid with semi-axes ``axes_lengths`` along ``directions`` (columns)."""
    u = np.linspace(0, 2 * np.pi, n)
    v = np.linspace(0, np.pi, n // 2)
    sphere = np.stack([np.outer(np.cos(u), np.sin(v)), np.outer(np.sin(u), np.sin(v)),
                       np.outer(np.ones_like(u), np.cos(v))], axis=-1)
    shape = np.asarray(directions) @ np.diag(axes_lengths)
    surf = sphere @ shape.T
    with plt.rc_context(RC):
        fig = plt.figure(figsize=(4.5, 4.5))
        ax = fig.add_subplot(projection="3d")
        ax.plot_wireframe(surf[..., 0], surf[..., 1], surf[..., 2], color="tab:blue", lw=0.5)
        r = float(np.max(axes_lengths))
        for lim in (ax.set_xlim, ax.set_ylim, ax.set_zlim):
            lim(-r, r)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_zlabel("z")
        ax.set_title("tool velocities for unit joint rates")
        return _save(fig, path)
