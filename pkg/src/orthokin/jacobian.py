"""Parallel/serial Jacobians, kinematic Jacobian and singularity classification.

The idle joint rates of each leg are eliminated by projecting the leg's
velocity loop onto its link direction ``c_i - b_i``, which leaves
``A pdot = B rhodot`` with ``A`` the matrix of link vectors and ``B`` the
diagonal of ``eta_i = (c_i - b_i) . e_i``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AtParallelSingularity, AtSerialSingularity, InconsistentConfiguration
from .kinematics import IkSolution, loop_closure_residual
from .model import DesignParameters, as_vector


@dataclass(frozen=True)
class KinematicMatrices:
    A: np.ndarray
    B: np.ndarray
    J: Optional[np.ndarray]  # None at parallel singularities
    J_inv: Optional[np.ndarray]  # None at serial singularities
    det_A: float
    det_B: float
    leg_length: float

    @property
    def eta(self) -> np.ndarray:
        return np.diag(self.B).copy()

    @property
    def regular(self) -> bool:
        return self.J is not None and self.J_inv is not None


class SingularityKind(str, enum.Enum):
    REGULAR = "Regular"
    PARALLEL = "ParallelSingular"
    SERIAL = "SerialSingular"
    BOTH = "Both"


@dataclass(frozen=True)
class SingularityReport:
    kind: SingularityKind
    serial_legs: frozenset[int]  # numbered from 1
    normalized_det_A: float
    normalized_det_B: float


def triple_product(rows) -> float:
    rows = np.asarray(rows, dtype=float)
    return float(rows[0] @ np.cross(rows[1], rows[2]))


def matrices_from_rows(A, eta, params: DesignParameters) -> KinematicMatrices:
    """Build the matrix set from link rows ``A`` and the diagonal ``eta`` of ``B``.

    Useful on its own for synthetic configurations that no real pose reaches.
    """
    A = np.array(A, dtype=float).reshape(3, 3)
    eta = np.array(eta, dtype=float).reshape(3)
    L = params.L
    eps = params.tolerances.singular_det_eps
    det_A = triple_product(A)
    det_B = float(eta[0] * eta[1] * eta[2])
    B = np.diag(eta)
    J_inv = None
    if np.all(np.abs(eta) / L >= eps):
        J_inv = A / eta[:, None]
    J = None
    if abs(det_A) / L**3 >= eps:
        J = np.linalg.solve(A, B)
    return KinematicMatrices(A=A, B=B, J=J, J_inv=J_inv, det_A=det_A, det_B=det_B, leg_length=L)


def assemble(p, sol: IkSolution, params: DesignParameters) -> KinematicMatrices:
    p = as_vector(p, "p")
    res = loop_closure_residual(p, sol.rho, params)
    tol = params.tolerances.residual_eps
    if np.any(np.abs(res) > tol) or any(np.any(np.abs(leg.c - p) > tol) for leg in sol.legs):
        raise InconsistentConfiguration(f"loop-closure residuals {res.tolist()} exceed {tol}")
    E = params.rail_axes
    A = np.array([p - leg.b for leg in sol.legs])
    eta = np.einsum("ij,ij->i", A, E)
    return matrices_from_rows(A, eta, params)


def classify_singularity(m: KinematicMatrices, params: DesignParameters) -> SingularityReport:
    L = params.L
    eps = params.tolerances.singular_det_eps
    nA = m.det_A / L**3
    nB = m.det_B / L**3
    serial = frozenset(i + 1 for i, e in enumerate(m.eta) if abs(e) / L < eps)
    parallel = abs(nA) < eps
    if parallel and serial:
        kind = SingularityKind.BOTH
    elif parallel:
        kind = SingularityKind.PARALLEL
    elif serial:
        kind = SingularityKind.SERIAL
    else:
        kind = SingularityKind.REGULAR
    return SingularityReport(kind=kind, serial_legs=serial, normalized_det_A=nA, normalized_det_B=nB)


def velocity_forward(m: KinematicMatrices, rho_dot) -> np.ndarray:
    """Tool velocity produced by the joint rates ``rho_dot``."""
    if m.J is None:
        raise AtParallelSingularity("det A vanishes; joint rates do not determine the tool velocity")
    return m.J @ as_vector(rho_dot, "rho_dot")


def velocity_inverse(m: KinematicMatrices, p_dot) -> np.ndarray:
    """Joint rates needed for the tool velocity ``p_dot``."""
    if m.J_inv is None:
        raise AtSerialSingularity("some eta_i vanishes; not every tool velocity can be produced")
    return m.J_inv @ as_vector(p_dot, "p_dot")
