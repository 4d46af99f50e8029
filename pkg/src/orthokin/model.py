"""Machine definition for the zero-offset Orthoglide.

Every leg is a slider moving along a rail ``a_i + rho_i * e_i`` and a rigid
link of length ``L`` joining the slider ``b_i`` to the tool point ``p``. The
parallelogram bars are not modelled; the platform attachment points all
coincide with ``p``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidDesign


@dataclass(frozen=True)
class ToleranceConfig:
    geom_eps: float = 1e-10
    singular_det_eps: float = 1e-9
    residual_eps: float = 1e-9
    iter_max: int = 50

    def problems(self) -> list[str]:
        out = []
        for name in ("geom_eps", "singular_det_eps", "residual_eps", "iter_max"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                out.append(f"tolerance {name} must be positive (got {value!r})")
        return out


def _frozen(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DesignParameters:
    """Geometry of the machine.

    ``rail_axes`` and ``rail_anchors`` are stored row-wise (row ``i`` is leg
    ``i``). ``joint_limits`` is ``None`` when the actuators are unbounded,
    otherwise a ``(3, 2)`` array of ``(rho_min, rho_max)`` rows.
    """

    leg_length: float
    rail_axes: np.ndarray
    rail_anchors: np.ndarray
    branch_signs: tuple[int, int, int] = (1, 1, 1)
    joint_limits: Optional[np.ndarray] = None
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)

    def __post_init__(self):
        object.__setattr__(self, "leg_length", float(self.leg_length))
        object.__setattr__(self, "rail_axes", _frozen(self.rail_axes, (3, 3)))
        object.__setattr__(self, "rail_anchors", _frozen(self.rail_anchors, (3, 3)))
        object.__setattr__(self, "branch_signs", tuple(int(s) for s in self.branch_signs))
        if self.joint_limits is not None:
            object.__setattr__(self, "joint_limits", _frozen(self.joint_limits, (3, 2)))

    @property
    def L(self) -> float:
        return self.leg_length

    @property
    def signs(self) -> np.ndarray:
        return np.array(self.branch_signs, dtype=float)

    @property
    def assembly_sign(self) -> float:
        """Sign of det(A) at the isotropic configuration.

        There ``c_i - b_i = -s_i L e_i`` so ``det A = -L^3 s1 s2 s3 det(E)``.
        Configurations with the opposite sign belong to another assembly mode,
        separated from the isotropic point by a parallel singularity.
        """
        d = np.linalg.det(self.rail_axes)
        return -1.0 if np.prod(self.signs) * d > 0 else 1.0

    def with_joint_limits(self, limits) -> "DesignParameters":
        return replace(self, joint_limits=None if limits is None else np.asarray(limits, float))

    def __eq__(self, other):
        if not isinstance(other, DesignParameters):
            return NotImplemented
        lim_eq = (self.joint_limits is None and other.joint_limits is None) or (
            self.joint_limits is not None
            and other.joint_limits is not None
            and np.array_equal(self.joint_limits, other.joint_limits)
        )
        return (
            self.leg_length == other.leg_length
            and np.array_equal(self.rail_axes, other.rail_axes)
            and np.array_equal(self.rail_anchors, other.rail_anchors)
            and self.branch_signs == other.branch_signs
            and lim_eq
            and self.tolerances == other.tolerances
        )

    __hash__ = None


def canonical_design(L: float = 1.0, tolerances: Optional[ToleranceConfig] = None) -> DesignParameters:
    """Rails along the Cartesian axes, anchored at the origin, all legs in the + working mode."""
    if not (isinstance(L, (int, float)) and math.isfinite(L) and L > 0):
        raise InvalidDesign([f"leg_length must be positive (got {L!r})"])
    return DesignParameters(
        leg_length=L,
        rail_axes=np.eye(3),
        rail_anchors=np.zeros((3, 3)),
        branch_signs=(1, 1, 1),
        joint_limits=None,
        tolerances=tolerances or ToleranceConfig(),
    )


def validate(params: DesignParameters) -> list[str]:
    """Return every violated invariant as a human-readable line; empty when valid."""
    problems: list[str] = []
    L = params.leg_length
    if not (math.isfinite(L) and L > 0):
        problems.append(f"leg_length must be positive (got {L})")
    problems.extend(params.tolerances.problems())
    eps = params.tolerances.geom_eps if params.tolerances.geom_eps > 0 else 1e-10

    E = params.rail_axes
    if not np.all(np.isfinite(E)):
        problems.append("rail_axes contain non-finite entries")
    else:
        for i in range(3):
            n = np.linalg.norm(E[i])
            if abs(n - 1.0) >= eps:
                problems.append(f"rail axis {i + 1} is not unit length (norm {n:.6g})")
        for i in range(3):
            for j in range(i + 1, 3):
                c = float(E[i] @ E[j])
                if abs(c) >= eps:
                    problems.append(f"rail axes {i + 1} and {j + 1} are not orthogonal (dot {c:.6g})")
    if not np.all(np.isfinite(params.rail_anchors)):
        problems.append("rail_anchors contain non-finite entries")
    for i, s in enumerate(params.branch_signs):
        if s not in (1, -1):
            problems.append(f"branch sign {i + 1} must be +1 or -1 (got {s})")
    if len(params.branch_signs) != 3:
        problems.append("exactly three branch signs are required")
    lim = params.joint_limits
    if lim is not None:
        for i in range(3):
            lo, hi = lim[i]
            if np.isnan(lo) or np.isnan(hi) or not lo < hi:
                problems.append(f"joint limits of leg {i + 1} need rho_min < rho_max (got {lo}, {hi})")
    return problems


def isotropic_configuration(params: DesignParameters) -> tuple[np.ndarray, np.ndarray]:
    """Point and joint vector at which the links are mutually orthogonal and collinear with their rails.

    The tool point must lie on all three rail lines; for designs where the rail
    lines do not meet, the least-squares meeting point is rejected.
    """
    E = params.rail_axes
    a = params.rail_anchors
    # point minimising sum of squared distances to the three rail lines
    M = np.zeros((3, 3))
    rhs = np.zeros(3)
    for i in range(3):
        P = np.eye(3) - np.outer(E[i], E[i])
        M += P
        rhs += P @ a[i]
    p = np.linalg.solve(M, rhs)
    for i in range(3):
        d = p - a[i]
        off = d - (d @ E[i]) * E[i]
        if np.linalg.norm(off) > params.tolerances.residual_eps * max(1.0, params.L):
            raise InvalidDesign([f"rail lines do not meet; leg {i + 1} misses by {np.linalg.norm(off):.3g}"])
    rho = np.array([(p - a[i]) @ E[i] + params.branch_signs[i] * params.L for i in range(3)])
    return p, rho


# --- machine definition files ---------------------------------------------------


def design_to_dict(params: DesignParameters) -> dict:
    t = params.tolerances
    return {
        "leg_length": params.leg_length,
        "rail_axes": params.rail_axes.tolist(),
        "rail_anchors": params.rail_anchors.tolist(),
        "branch_signs": list(params.branch_signs),
        "joint_limits": None
        if params.joint_limits is None
        else [[None if not math.isfinite(v) else v for v in row] for row in params.joint_limits.tolist()],
        "tolerances": {
            "geom_eps": t.geom_eps,
            "singular_det_eps": t.singular_det_eps,
            "residual_eps": t.residual_eps,
            "iter_max": t.iter_max,
        },
    }


def design_from_dict(data: dict) -> DesignParameters:
    """Build parameters from a decoded machine file; missing keys take canonical defaults.

    Raises InvalidDesign for malformed content. Structural checks only; call
    :func:`validate` for the geometric invariants.
    """
    if not isinstance(data, dict):
        raise InvalidDesign(["machine definition must be a JSON object"])
    known = {"leg_length", "rail_axes", "rail_anchors", "branch_signs", "joint_limits", "tolerances"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InvalidDesign([f"unknown keys: {', '.join(unknown)}"])
    try:
        tol_data = data.get("tolerances") or {}
        if not isinstance(tol_data, dict):
            raise InvalidDesign(["tolerances must be an object"])
        tol = ToleranceConfig(**tol_data)
        limits = data.get("joint_limits")
        if limits is not None:
            # null bounds mean "unbounded on that side"
            limits = np.array(
                [[-np.inf if lo is None else lo, np.inf if hi is None else hi] for lo, hi in limits],
                dtype=float,
            )
        return DesignParameters(
            leg_length=float(data.get("leg_length", 1.0)),
            rail_axes=data.get("rail_axes", np.eye(3)),
            rail_anchors=data.get("rail_anchors", np.zeros((3, 3))),
            branch_signs=tuple(data.get("branch_signs", (1, 1, 1))),
            joint_limits=limits,
            tolerances=tol,
        )
    except InvalidDesign:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidDesign([f"malformed machine definition: {exc}"]) from exc


def load_design(path) -> DesignParameters:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidDesign([f"cannot read machine file {path}: {exc}"]) from exc
    return design_from_dict(data)


def save_design(params: DesignParameters, path) -> None:
    Path(path).write_text(json.dumps(design_to_dict(params), indent=2) + "\n")


def as_vector(v: Sequence[float], name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have 3 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite components")
    return arr
