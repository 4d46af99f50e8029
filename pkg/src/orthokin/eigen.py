"""Closed-form eigen-decomposition of real symmetric 3x3 matrices, batched over leading axes.

The trigonometric root of the characteristic cubic gives all three
eigenvalues, but its two close roots lose accuracy when the cubic is nearly
degenerate. Only the root that is guaranteed to be well separated is kept:
its eigenvector is taken from a cross product of rows of ``M - lambda I``, and
the remaining pair comes from the 2x2 block of ``M`` on the orthogonal
complement, which has a stable closed form.
"""

from __future__ import annotations

import numpy as np

_TWO_PI_3 = 2.0 * np.pi / 3.0


def _cubic_roots(a00, a11, a22, a01, a02, a12):
    q = (a00 + a11 + a22) / 3.0
    d0, d1, d2 = a00 - q, a11 - q, a22 - q
    off = a01 * a01 + a02 * a02 + a12 * a12
    p = np.sqrt((d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * off) / 6.0)
    ps = np.where(p > 0, p, 1.0)
    b00, b11, b22 = d0 / ps, d1 / ps, d2 / ps
    b01, b02, b12 = a01 / ps, a02 / ps, a12 / ps
    det_b = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) + b02 * (b01 * b12 - b11 * b02)
    r = np.clip(0.5 * det_b, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    lam_max = q + 2.0 * p * np.cos(phi)
    lam_min = q + 2.0 * p * np.cos(phi + _TWO_PI_3)
    return q, p, r, lam_max, lam_min


def _unit_null_vector(N):
    """Unit vector spanning the null space of a rank-2 symmetric ``N`` (…,3,3)."""
    r0, r1, r2 = N[..., 0, :], N[..., 1, :], N[..., 2, :]
    cands = np.stack([np.cross(r0, r1), np.cross(r0, r2), np.cross(r1, r2)], axis=-2)
    norms = np.linalg.norm(cands, axis=-1)
    best = np.argmax(norms, axis=-1)
    v = np.take_along_axis(cands, best[..., None, None], axis=-2)[..., 0, :]
    n = np.take_along_axis(norms, best[..., None], axis=-1)
    # n == 0 only for multiples of the identity; any axis will do there
    fallback = np.zeros_like(v)
    fallback[..., 0] = 1.0
    return np.where(n > 0, v / np.where(n > 0, n, 1.0), fallback)


def _orthonormal_complement(v):
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    use_xz = np.abs(x) > np.abs(y)
    u = np.where(
        use_xz[..., None],
        np.stack([-z, np.zeros_like(x), x], axis=-1),
        np.stack([np.zeros_like(x), z, -y], axis=-1),
    )
    u = u / np.linalg.norm(u, axis=-1, keepdims=True)
    w = np.cross(v, u)
    return u, w


def sym3_eigh(M):
    """Eigenvalues (ascending) and unit eigenvectors (as columns) of symmetric 3x3 matrices.

    Only the upper triangle of ``M`` is read.
    """
    M = np.asarray(M, dtype=float)
    if M.shape[-2:] != (3, 3):
        raise ValueError(f"expected (..., 3, 3), got {M.shape}")
    scale = np.max(np.abs(M), axis=(-2, -1))
    s = np.where(scale > 0, scale, 1.0)[..., None, None]
    A = M / s
    a00, a11, a22 = A[..., 0, 0], A[..., 1, 1], A[..., 2, 2]
    a01, a02, a12 = A[..., 0, 1], A[..., 0, 2], A[..., 1, 2]
    A = np.stack(
        [
            np.stack([a00, a01, a02], axis=-1),
            np.stack([a01, a11, a12], axis=-1),
            np.stack([a02, a12, a22], axis=-1),
        ],
        axis=-2,
    )
    q, p, r, lam_max, lam_min = _cubic_roots(a00, a11, a22, a01, a02, a12)
    isolated = np.where(r >= 0, lam_max, lam_min)

    eye = np.eye(3)
    v = _unit_null_vector(A - isolated[..., None, None] * eye)
    u, w = _orthonormal_complement(v)

    Av = np.einsum("...ij,...j->...i", A, v)
    Au = np.einsum("...ij,...j->...i", A, u)
    Aw = np.einsum("...ij,...j->...i", A, w)
    lam_v = np.einsum("...i,...i->...", v, Av)
    a = np.einsum("...i,...i->...", u, Au)
    b = np.einsum("...i,...i->...", u, Aw)
    c = np.einsum("...i,...i->...", w, Aw)
    mean = 0.5 * (a + c)
    half = np.hypot(0.5 * (a - c), b)
    theta = 0.5 * np.arctan2(2.0 * b, a - c)
    ct, st = np.cos(theta)[..., None], np.sin(theta)[..., None]
    v_hi = ct * u + st * w
    v_lo = -st * u + ct * w

    vals = np.stack([lam_v, mean - half, mean + half], axis=-1)
    vecs = np.stack([v, v_lo, v_hi], axis=-1)

    # exact multiples of the identity
    flat = (p == 0)[..., None]
    vals = np.where(flat, q[..., None], vals)
    vecs = np.where(flat[..., None], eye, vecs)

    order = np.argsort(vals, axis=-1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=-1)
    vecs = np.take_along_axis(vecs, order[..., None, :], axis=-1)
    return vals * s[..., 0], vecs


def sym3_eigvalsh(M):
    """Ascending eigenvalues of symmetric 3x3 matrices."""
    return sym3_eigh(M)[0]
