"""Completely positive maps on M_n(C): Kraus/Choi conversions and checks.

Choi convention: ``C = sum_ij Phi(e_ij) (x) e_ij`` with the output factor
first and row-major basis ordering, so ``C[a*n + i, b*n + j] = Phi(e_ij)[a, b]``.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import _kernels
from ._linalg import (
    DEFAULT_TOL,
    as_square,
    dagger,
    frozen,
    hermitize,
    matrix_units,
    sorted_eigh,
)
from .errors import DimensionMismatch, NotCompletelyPositive


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """A CP map on M_n(C) stored as a stack of Kraus operators, shape (d, n, n)."""

    dim: int
    kraus: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=np.complex128)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] == 0:
            raise DimensionMismatch("kraus must be a nonempty sequence of matrices")
        if k.shape[1:] != (self.dim, self.dim):
            raise DimensionMismatch(
                f"every Kraus operator must be {self.dim}x{self.dim}, got {k.shape[1:]}"
            )
        object.__setattr__(self, "kraus", frozen(k))

    @classmethod
    def from_kraus(cls, ops):
        ops = np.asarray(ops, dtype=np.complex128)
        if ops.ndim == 2:
            ops = ops[None]
        return cls(ops.shape[-1], ops)

    @property
    def num_kraus(self):
        return self.kraus.shape[0]

    @cached_property
    def choi(self):
        return ChoiMatrix(self.dim, _kernels.kraus_choi(np.ascontiguousarray(self.kraus)))

    def __call__(self, x):
        return apply_channel(self, x)


@dataclass(frozen=True, eq=False)
class RawMap:
    """A linear map given only by an evaluator, e.g. the transpose map."""

    dim: int
    fn: Callable

    def __call__(self, x):
        return np.asarray(self.fn(as_square(x, self.dim)), dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        n = self.dim
        m = as_square(self.matrix, n * n, name="Choi matrix")
        scale = max(1.0, float(np.abs(m).max()) if m.size else 1.0)
        hermitize(m, DEFAULT_TOL * scale)
        object.__setattr__(self, "matrix", frozen(m))


@dataclass(frozen=True)
class VerificationReport:
    cp: bool
    trace_preserving: bool
    unital: bool
    choi_rank: int
    min_choi_eigenvalue: float

    @property
    def ucpt(self):
        return self.cp and self.trace_preserving and self.unital


def identity_channel(n):
    return QuantumChannel(n, np.eye(n)[None])


def unitary_channel(u):
    """Ad(u): x -> u x u*."""
    u = as_square(u, name="u")
    return QuantumChannel(u.shape[0], u[None])


def transpose_map(n):
    return RawMap(n, lambda x: x.T.copy())


def apply_channel(ch, x):
    """Sum_j v_j x v_j^*."""
    x = as_square(x, name="x")
    if x.shape[0] != ch.dim:
        raise DimensionMismatch(f"input is {x.shape[0]}x{x.shape[0]}, channel has dim {ch.dim}")
    if isinstance(ch, RawMap):
        return ch(x)
    return _kernels.kraus_apply(np.ascontiguousarray(ch.kraus), np.ascontiguousarray(x))


def choi_of_map(fn, n):
    """Choi matrix of any linear map, assembled from its action on matrix units."""
    c = np.zeros((n * n, n * n), dtype=np.complex128)
    for i, j, e in matrix_units(n):
        c += np.kron(np.asarray(fn(e), dtype=np.complex128), e)
    return c


def choi_of(ch):
    if isinstance(ch, QuantumChannel):
        return ch.choi
    return ChoiMatrix(ch.dim, choi_of_map(ch, ch.dim))


def _choi_spectrum(c, tol):
    n = c.dim
    h = hermitize(c.matrix, tol * max(1.0, float(np.abs(c.matrix).max())))
    w, v = sorted_eigh(h)
    scale = max(1.0, float(np.abs(w).max()))
    sigma_max = float(np.abs(w).max()) if w.size else 0.0
    rank_thresh = tol * n * n * sigma_max
    return w, v, scale, rank_thresh


def channel_from_choi(c, tol=DEFAULT_TOL):
    """Canonical Kraus operators from the eigendecomposition of a PSD Choi matrix.

    One operator per eigenvalue above the rank threshold, ``sqrt(lam) * vec``
    reshaped row-major; these are linearly independent and their count is
    the Choi rank.
    """
    if not isinstance(c, ChoiMatrix):
        m = np.asarray(c, dtype=np.complex128)
        c = ChoiMatrix(int(round(np.sqrt(m.shape[0]))), m)
    n = c.dim
    w, v, scale, rank_thresh = _choi_spectrum(c, tol)
    if w[-1] < -tol * scale:
        raise NotCompletelyPositive(
            f"Choi matrix has eigenvalue {w[-1]:.6g} < 0", min_eigenvalue=float(w[-1])
        )
    keep = w > rank_thresh
    if not keep.any():
        # the zero map; keep a single zero Kraus operator
        return QuantumChannel(n, np.zeros((1, n, n)))
    kraus = (np.sqrt(w[keep])[None, :] * v[:, keep]).T.reshape(-1, n, n)
    return QuantumChannel(n, kraus)


def verify_channel(ch, tol=DEFAULT_TOL):
    """Report CP / TP / unital status and the Choi rank; never raises on failure."""
    n = ch.dim
    c = choi_of(ch)
    w, _, scale, rank_thresh = _choi_spectrum(c, tol)
    eye = np.eye(n)
    if isinstance(ch, QuantumChannel):
        k = ch.kraus
        tp_op = np.einsum("rba,rbc->ac", k.conj(), k)
        unital_op = np.einsum("rab,rcb->ac", k, k.conj())
    else:
        tp_op, unital_op = choi_trace_conditions(c)
    return VerificationReport(
        cp=bool(w[-1] >= -tol * scale),
        trace_preserving=bool(np.linalg.norm(tp_op - eye, 2) <= tol),
        unital=bool(np.linalg.norm(unital_op - eye, 2) <= tol),
        choi_rank=int(np.count_nonzero(w > rank_thresh)),
        min_choi_eigenvalue=float(w[-1]),
    )


def choi_trace_conditions(c):
    """Return ``(Tr_out C, Tr_in C)``.

    Tracing out the output factor gives the transpose of sum_j v_j^* v_j
    (identity iff trace preserving); tracing out the input factor gives
    Phi(1) = sum_j v_j v_j^* (identity iff unital).
    """
    n = c.dim
    m = np.asarray(c.matrix).reshape(n, n, n, n)  # [a, i, b, j]
    tr_out = np.einsum("aiaj->ij", m).T
    tr_in = np.einsum("aibi->ab", m)
    return tr_out, tr_in


def compose(first, second):
    """second o first, with Kraus set {w_i v_j}."""
    if first.dim != second.dim:
        raise DimensionMismatch(f"cannot compose dims {first.dim} and {second.dim}")
    prods = np.einsum("iab,jbc->ijac", second.kraus, first.kraus)
    return QuantumChannel(first.dim, prods.reshape(-1, first.dim, first.dim))


def adjoint_channel(ch):
    """Adjoint with respect to <x, y> = Tr(y^* x); Kraus set {v_j^*}."""
    return QuantumChannel(ch.dim, dagger(ch.kraus))


def map_distance(f, g, n):
    """Sup-entrywise distance between two linear maps over all matrix units."""
    worst = 0.0
    for _, _, e in matrix_units(n):
        worst = max(worst, float(np.abs(np.asarray(f(e)) - np.asarray(g(e))).max()))
    return worst
