"""Reference computations that share no code with the package."""

import numpy as np


def jacobi_eigvals(M, sweeps=30):
    """Cyclic Jacobi diagonalisation of a stack of symmetric 3x3 matrices; ascending eigenvalues."""
    A = np.array(M, dtype=float, copy=True).reshape(-1, 3, 3)
    n = len(A)
    idx = np.arange(n)
    for _ in range(sweeps):
        off = A[:, 0, 1] ** 2 + A[:, 0, 2] ** 2 + A[:, 1, 2] ** 2
        if not np.any(off > 0):
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = A[:, p, q]
            diag = np.abs(A[:, p, p]) + np.abs(A[:, q, q])
            skip = np.abs(apq) <= 1e-18 * diag
            safe = np.where(skip, 1.0, apq)
            theta = (A[:, q, q] - A[:, p, p]) / (2 * safe)
            with np.errstate(over="ignore"):
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1))
            t = np.where(skip, 0.0, t)
            c = 1 / np.sqrt(t * t + 1)
            s = t * c
            R = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
            R[idx, p, p] = c
            R[idx, q, q] = c
            R[idx, p, q] = s
            R[idx, q, p] = -s
            A = np.einsum("nji,njk,nkl->nil", R, A, R)
            A[skip, p, q] = A[skip, q, p] = 0.0
    return np.sort(np.diagonal(A, axis1=1, axis2=2), axis=1)


def sphere_ik(p, L=1.0):
    """Joint values of the canonical machine (rails on the axes, + working mode) by direct geometry."""
    x, y, z = p
    return np.array([x + np.sqrt(L * L - y * y - z * z), y + np.sqrt(L * L - x * x - z * z), z + np.sqrt(L * L - x * x - y * y)])
