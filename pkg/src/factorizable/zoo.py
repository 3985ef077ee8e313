"""Named channel families, Haar sampling and the extremality test."""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._linalg import DEFAULT_TOL, as_square, check_unitary, hermitize, numerical_rank, sorted_eigh
from .channels import QuantumChannel, channel_from_choi, choi_of, verify_channel
from .errors import DimensionMismatch, NotCorrelationMatrix, NotUCPT, WeightError


@dataclass(frozen=True)
class MixtureRealization:
    """A channel written as sum_j t_j Ad(u_j)."""

    unitaries: tuple
    weights: tuple


@dataclass(frozen=True)
class ExtremalityCertificate:
    kraus_count: int
    gram_rank: int
    extreme: bool


def voiculescu_unitaries(n):
    """The clock matrix diag(1, w, ..., w^{n-1}), w = exp(2 pi i / n), and the cyclic shift."""
    omega = np.exp(2j * np.pi / n)
    u = np.diag(omega ** np.arange(n))
    v = np.roll(np.eye(n, dtype=np.complex128), 1, axis=1)
    return u, v


def _check_weights(ts, count, tol):
    if len(ts) != count:
        raise WeightError(f"expected {count} weights, got {len(ts)}")
    if any(t <= 0 for t in ts):
        raise WeightError("weights must be positive")
    exact = all(isinstance(t, (int, Fraction)) for t in ts)
    total = sum(ts) if exact else sum(float(t) for t in ts)
    if (exact and total != 1) or (not exact and abs(total - 1.0) > tol):
        raise WeightError(f"weights sum to {float(total)!r}, not 1")


def mixture_of_unitaries(us, ts, tol=DEFAULT_TOL):
    """Kraus list {sqrt(t_j) u_j}."""
    if len(us) == 0:
        raise WeightError("need at least one unitary")
    us = [check_unitary(u, tol, name=f"unitary {j}") for j, u in enumerate(us)]
    n = us[0].shape[0]
    if any(u.shape[0] != n for u in us):
        raise DimensionMismatch("all unitaries must share one dimension")
    _check_weights(ts, len(us), tol)
    kraus = np.stack([np.sqrt(float(t)) * u for u, t in zip(us, ts)])
    return QuantumChannel(n, kraus)


def depolarizing(n):
    """S_n(x) = tr_n(x) 1_n as the n^2-term Voiculescu mixture.

    Kraus operators are n^{-1} v^i u^j for i, j = 0..n-1 (exponents are taken
    mod n, so this is the same family as i, j = 1..n).
    """
    if n < 2:
        raise DimensionMismatch("depolarizing channel needs n >= 2")
    u, v = voiculescu_unitaries(n)
    unitaries = []
    for i in range(n):
        vi = np.linalg.matrix_power(v, i)
        for j in range(n):
            unitaries.append(vi @ np.linalg.matrix_power(u, j))
    weights = tuple(Fraction(1, n * n) for _ in unitaries)
    ch = QuantumChannel(n, np.stack(unitaries) / n)
    return ch, MixtureRealization(tuple(unitaries), weights)


def holevo_werner(n):
    """W_n^-(x) = (n-1)^{-1} (Tr(x) 1 - x^t), Kraus (n-1)^{-1/2} (e_ij - e_ji), i < j."""
    if n < 2:
        raise DimensionMismatch("Holevo-Werner channel needs n >= 2")
    ops = []
    for i in range(n):
        for j in range(i + 1, n):
            a = np.zeros((n, n), dtype=np.complex128)
            a[i, j] = 1.0
            a[j, i] = -1.0
            ops.append(a / np.sqrt(n - 1))
    return QuantumChannel(n, np.stack(ops))


def holevo_werner_formula(n):
    """The defining formula as a plain evaluator (for cross-checks)."""
    return lambda x: (np.trace(x) * np.eye(n) - np.asarray(x).T) / (n - 1)


def schur_channel(b, tol=DEFAULT_TOL):
    """Schur multiplier x -> b o x for a correlation matrix b.

    Kraus operators are diag(sqrt(lam_r) w_r) from the eigendecomposition
    b = sum_r lam_r w_r w_r^*, which tolerates singular b.
    """
    b = as_square(b, name="b")
    n = b.shape[0]
    diag_dev = float(np.abs(np.diag(b) - 1.0).max())
    if diag_dev > tol:
        raise NotCorrelationMatrix(f"diagonal deviates from 1 by {diag_dev:.3g}")
    try:
        h = hermitize(b, tol)
    except ValueError as exc:
        raise NotCorrelationMatrix(str(exc)) from exc
    w, v = sorted_eigh(h)
    scale = max(1.0, float(np.abs(w).max()))
    if w[-1] < -tol * scale:
        raise NotCorrelationMatrix(f"b is not positive semidefinite (eigenvalue {w[-1]:.6g})")
    keep = w > tol * n * scale
    cols = v[:, keep] * np.sqrt(w[keep])[None, :]
    kraus = np.stack([np.diag(cols[:, r]) for r in range(cols.shape[1])])
    return QuantumChannel(n, kraus)


def haar_unitary(d, seed):
    """Haar-random d x d unitary from QR of a complex Ginibre matrix.

    Columns of Q are rescaled by the phases of diag(R) so the distribution
    is exactly Haar.
    """
    rng = np.random.default_rng(int(seed) % 2**64)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))[None, :]


def extremality_certificate(ch, tol=DEFAULT_TOL):
    """Choi's criterion: a UCPT map with independent Kraus {v_i} is extreme
    iff {v_i v_j^*} is linearly independent."""
    report = verify_channel(ch, tol)
    if not report.ucpt:
        raise NotUCPT(f"channel is not unital CPTP: {report}")
    canon = channel_from_choi(choi_of(ch), tol)
    v = canon.kraus
    d = v.shape[0]
    prods = np.einsum("iab,jcb->ijac", v, v.conj()).reshape(d * d, -1)
    gram = prods.conj() @ prods.T
    rank = numerical_rank(gram, tol)
    return ExtremalityCertificate(kraus_count=d, gram_rank=rank, extreme=rank == d * d)
