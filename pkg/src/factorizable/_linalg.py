"""Small dense linear-algebra helpers used across modules."""

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotUnitary

DEFAULT_TOL = 1e-9


def as_matrix(x, name="matrix"):
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {a.shape}")
    return a


def as_square(x, n=None, name="matrix"):
    a = as_matrix(x, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise DimensionMismatch(f"{name} must be {n}x{n}, got {a.shape[0]}x{a.shape[1]}")
    return a


def frozen(a):
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def matrix_unit(n, i, j):
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def matrix_units(n):
    """Yield ``(i, j, e_ij)`` in row-major order."""
    for i in range(n):
        for j in range(n):
            yield i, j, matrix_unit(n, i, j)


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def flip_operator(n):
    """Swap operator on C^n (x) C^n."""
    s = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            s[i * n + j, j * n + i] = 1.0
    return s


def is_unitary(u, tol=DEFAULT_TOL):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    eye = np.eye(u.shape[0])
    return (np.abs(dagger(u) @ u - eye).max() <= tol
            and np.abs(u @ dagger(u) - eye).max() <= tol)


def check_unitary(u, tol=DEFAULT_TOL, name="matrix"):
    u = as_square(u, name=name)
    if not is_unitary(u, tol):
        raise NotUnitary(f"{name} is not unitary within tol={tol:g}")
    return u


def hermitize(c, tol=DEFAULT_TOL):
    """Return (C + C*)/2, refusing inputs that move by more than ``tol``."""
    c = as_square(c)
    h = 0.5 * (c + dagger(c))
    moved = np.abs(h - c).max() if c.size else 0.0
    if moved > tol:
        raise NotHermitian(f"matrix is not Hermitian (deviation {moved:.3g} > {tol:g})")
    return h


def fix_column_phases(vecs):
    """Rotate each column so that its largest-magnitude entry is real positive."""
    vecs = np.array(vecs, dtype=np.complex128, copy=True)
    for c in range(vecs.shape[1]):
        col = vecs[:, c]
        idx = int(np.argmax(np.abs(col)))
        amp = col[idx]
        if abs(amp) > 0:
            vecs[:, c] = col * (abs(amp) / amp)
    return vecs


def sorted_eigh(h):
    """Eigendecomposition of a Hermitian matrix, descending, deterministic phases."""
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    return w[order], fix_column_phases(v[:, order])


def numerical_rank(m, tol=DEFAULT_TOL):
    s = np.linalg.svd(np.asarray(m), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    thresh = tol * max(m.shape) * s[0]
    return int(np.count_nonzero(s > thresh))


def partial_trace_ancilla(z, n, k):
    """(id_n (x) Tr_k)(Z) for Z on C^n (x) C^k, system factor first."""
    return np.einsum("iaja->ij", np.asarray(z).reshape(n, k, n, k))


def complete_columns(v):
    """Extend an isometry ``v`` (m x r, orthonormal columns) to an m x m unitary.

    The first r columns are ``v`` unchanged; the rest come from a full QR of
    ``v`` with deterministic phases.
    """
    v = np.asarray(v, dtype=np.complex128)
    m, r = v.shape
    if r == m:
        return v.copy()
    q, _ = np.linalg.qr(v, mode="complete")
    rest = q[:, r:]
    # orthogonalise once more against v for numerical cleanliness
    rest = rest - v @ (dagger(v) @ rest)
    rest, _ = np.linalg.qr(rest)
    return np.hstack([v, fix_column_phases(rest)])
