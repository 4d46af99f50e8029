"""Condition number, manipulability ellipsoid and amplification factors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import sym3_eigh, sym3_eigvalsh
from .errors import AtSingularity, InfiniteCondition
from .jacobian import KinematicMatrices
from .kinematics import IkSolution
from .model import DesignParameters

PSI_MIN = 1.0 / 3.0
PSI_MAX = 3.0


@dataclass(frozen=True)
class PerformancePoint:
    singular_values: np.ndarray  # of J, descending
    kappa: float  # sqrt(sigma_max / sigma_min)
    condition_ratio: float  # sigma_max / sigma_min
    ellipsoid_axes: np.ndarray  # xi, ascending
    ellipsoid_directions: np.ndarray  # unit eigenvectors as columns, matching ellipsoid_axes
    psi: np.ndarray  # velocity amplification 1/xi, descending
    force_factors: np.ndarray  # xi
    within_bounds: bool


@dataclass(frozen=True)
class IsotropyResidual:
    norm_ratio_residuals: np.ndarray
    orthogonality_residuals: np.ndarray  # pairs (1,2), (2,3), (3,1)

    @property
    def max(self) -> float:
        return float(max(self.norm_ratio_residuals.max(), self.orthogonality_residuals.max()))


def singular_values_3x3(M) -> np.ndarray:
    """Descending singular values, as square roots of the eigenvalues of ``M M^T``."""
    M = np.asarray(M, dtype=float)
    lam = sym3_eigvalsh(M @ np.swapaxes(M, -1, -2))
    return np.sqrt(np.clip(lam, 0.0, None))[..., ::-1]


def condition_number(M) -> float:
    """``sqrt(sigma_max / sigma_min)``.

    The square root is deliberate; :func:`condition_ratio` gives the plain
    ratio.
    """
    return float(np.sqrt(condition_ratio(M)))


def condition_ratio(M) -> float:
    s = singular_values_3x3(M)
    if not s[0] > 0 or s[2] <= np.finfo(float).eps * s[0]:
        raise InfiniteCondition(f"smallest singular value {s[2]:.3g} is numerically zero")
    return float(s[0] / s[2])


def _require_regular(m: KinematicMatrices):
    if not m.regular:
        raise AtSingularity("manipulability is undefined at a singular configuration")


def manipulability(m: KinematicMatrices, psi_min: float = PSI_MIN, psi_max: float = PSI_MAX) -> PerformancePoint:
    _require_regular(m)
    # (J J^T)^-1 == J^-T J^-1
    Q = m.J_inv.T @ m.J_inv
    lam, vecs = sym3_eigh(Q)
    xi = np.sqrt(np.clip(lam, 0.0, None))
    psi = 1.0 / xi
    sv = singular_values_3x3(m.J)
    ratio = condition_ratio(m.J)
    return PerformancePoint(
        singular_values=sv,
        kappa=float(np.sqrt(ratio)),
        condition_ratio=ratio,
        ellipsoid_axes=xi,
        ellipsoid_directions=vecs,
        psi=psi,
        force_factors=xi.copy(),
        within_bounds=bool(np.all((psi >= psi_min) & (psi <= psi_max))),
    )


def ellipsoid_membership(m: KinematicMatrices, p_dot) -> float:
    """``p_dot^T (J J^T)^-1 p_dot``; at most 1 iff ``p_dot`` needs joint rates of norm at most 1."""
    _require_regular(m)
    q = m.J_inv @ np.asarray(p_dot, dtype=float)
    return float(q @ q)


def isotropy_residual(sol: IkSolution, m: KinematicMatrices, params: DesignParameters) -> IsotropyResidual:
    rows = sol.link_vectors
    eta = m.eta
    L = params.L
    norms = np.linalg.norm(rows, axis=1)
    with np.errstate(divide="ignore"):
        ratio = np.abs(norms / np.abs(eta) - 1.0)
    ortho = np.array([abs(rows[i] @ rows[(i + 1) % 3]) / L**2 for i in range(3)])
    return IsotropyResidual(norm_ratio_residuals=ratio, orthogonality_residuals=ortho)


def psi_extremes(J_inv) -> tuple[np.ndarray, np.ndarray]:
    """Largest and smallest amplification factor for a stack of inverse Jacobians ``(N, 3, 3)``."""
    Q = np.einsum("nki,nkj->nij", J_inv, J_inv)
    lam = sym3_eigvalsh(Q)
    with np.errstate(divide="ignore"):
        psi_max = 1.0 / np.sqrt(np.clip(lam[:, 0], 0.0, None))
        psi_min = 1.0 / np.sqrt(np.clip(lam[:, 2], 0.0, None))
    return psi_max, psi_min
