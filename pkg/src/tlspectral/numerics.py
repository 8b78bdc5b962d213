"""Dense complex linear algebra with an explicit tolerance policy.

Arrows are numpy complex128 matrices in a fixed lexicographic tensor
basis: the left tensor factor is the slow index, so ``kron`` realizes
the tensor product of arrows, and ``kron(e_i, e_j)`` is the basis
vector at flat index ``i*dim_right + j``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "dagger",
    "matmul",
    "kron",
    "is_zero",
    "psd_check",
    "swap_matrix",
    "column_space_isometry",
    "null_space_isometry",
    "gram_schmidt",
    "residual",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical policy: eq_tol for "this residual is zero" tests,
    rank_tol for numerical rank decisions (relative to the largest
    singular value)."""

    eq_tol: float = 1e-9
    rank_tol: float = 1e-8

    def __post_init__(self):
        if not (self.eq_tol > 0):
            raise ValueError("eq_tol must be positive")
        if not (self.rank_tol > 0):
            raise ValueError("rank_tol must be positive")


DEFAULT_TOL = Tolerance()


def dagger(a):
    """Conjugate transpose."""
    return np.conj(np.asarray(a)).T


def matmul(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    return a @ b


def kron(a, b):
    return np.kron(np.asarray(a), np.asarray(b))


def is_zero(m, tol=DEFAULT_TOL):
    """Max-entry-magnitude test against tol.eq_tol."""
    m = np.asarray(m)
    if m.size == 0:
        return True
    return float(np.max(np.abs(m))) <= tol.eq_tol


def residual(m):
    """Max entry magnitude, 0.0 for empty arrays."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m)))


def psd_check(g, tol=DEFAULT_TOL):
    """True iff g is Hermitian (within eq_tol) with eigenvalues >= -eq_tol.

    Non-Hermitian input is a contract error, not a False.
    """
    g = np.asarray(g, dtype=np.complex128)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"psd_check needs a square matrix, got {g.shape}")
    if g.size == 0:
        return True
    herm_res = np.max(np.abs(g - dagger(g)))
    if herm_res > tol.eq_tol * max(1.0, float(np.max(np.abs(g)))):
        raise ValueError(f"psd_check: input not Hermitian, residual {herm_res:.3e}")
    eigs = np.linalg.eigvalsh((g + dagger(g)) / 2)
    return bool(eigs.min() >= -tol.eq_tol)


def column_space_isometry(m, tol=DEFAULT_TOL):
    """Orthonormal basis of the column space as an isometry V (V*V = I).

    Rank rule: keep singular values > rank_tol * s_max (LAPACK returns
    them sorted descending, so the choice is deterministic).  A zero or
    empty matrix returns a 0-column matrix.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim == 1:
        m = m[:, None]
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((m.shape[0], 0), dtype=np.complex128)
    rank = int(np.sum(s > tol.rank_tol * s[0]))
    return u[:, :rank]


def null_space_isometry(m, tol=DEFAULT_TOL):
    """Orthonormal basis of the kernel as an isometry (columns).

    Same singular-value threshold as column_space_isometry.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim == 1:
        m = m[None, :]
    n = m.shape[1]
    if m.shape[0] == 0 or m.size == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, vh = np.linalg.svd(m)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n, dtype=np.complex128)
    rank = int(np.sum(s > tol.rank_tol * s[0]))
    return dagger(vh)[:, rank:]


def swap_matrix(d1, d2):
    """Permutation matrix C^d1 (x) C^d2 -> C^d2 (x) C^d1."""
    s = np.zeros((d1 * d2, d1 * d2))
    for i in range(d1):
        for j in range(d2):
            s[j * d1 + i, i * d2 + j] = 1.0
    return s


def gram_schmidt(vectors, tol=DEFAULT_TOL, inner=None):
    """Modified Gram-Schmidt over a list of arrays (any common shape).

    Returns (basis, coeffs): basis[k] has unit norm and
    basis[k] = sum_j coeffs[k][j] * vectors[j].  Vectors whose residual
    after projection is <= rank_tol * (largest input norm) are dropped,
    which keeps the result deterministic for a fixed input order.

    inner defaults to the Frobenius pairing, conjugate-linear in the
    first slot.
    """
    if inner is None:
        inner = lambda x, y: complex(np.vdot(x, y))
    vecs = [np.asarray(v, dtype=np.complex128) for v in vectors]
    if not vecs:
        return [], []
    scale = max(np.sqrt(abs(inner(v, v).real)) for v in vecs)
    if scale == 0.0:
        return [], []
    basis, coeffs = [], []
    for j, v in enumerate(vecs):
        w = v.copy()
        row = np.zeros(len(vecs), dtype=np.complex128)
        row[j] = 1.0
        for _ in range(2):  # one reorthogonalization pass
            for b, r in zip(basis, coeffs):
                c = inner(b, w)
                w = w - c * b
                row = row - c * r
        nrm = np.sqrt(abs(inner(w, w).real))
        if nrm > tol.rank_tol * scale:
            basis.append(w / nrm)
            coeffs.append(row / nrm)
    return basis, coeffs
