"""Factorizable channels through finite-dimensional tracial ancillas.

An ancilla ``A = M_{k_1} (+) ... (+) M_{k_N}`` carries the trace
``tau(y) = sum_j t_j tr_{k_j}(y_j)``. A unitary in ``M_n (x) A`` is stored as
one ``(n k_j) x (n k_j)`` block per summand, system factor first.
"""

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ._linalg import (
    DEFAULT_TOL,
    as_square,
    check_unitary,
    complete_columns,
    dagger,
    frozen,
    matrix_units,
    numerical_rank,
    partial_trace_ancilla,
)
from .channels import (
    QuantumChannel,
    channel_from_choi,
    choi_of,
    map_distance,
    verify_channel,
)
from .errors import (
    DimensionMismatch,
    NotCompletelyPositive,
    NotTracePreserving,
    NotUnital,
    WeightError,
)


def parse_weight(value):
    """Accept floats, ints, Fractions and strings like ``"1/3"``."""
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value) if "/" in value else float(value)
    return float(value)


def weights_sum_ok(weights, tol=DEFAULT_TOL):
    if all(isinstance(w, Fraction) for w in weights):
        return sum(weights) == 1
    return abs(sum(float(w) for w in weights) - 1.0) <= tol


@dataclass(frozen=True)
class FiniteAncillaSpec:
    blocks: tuple
    weights: tuple

    def __post_init__(self):
        blocks = tuple(int(k) for k in self.blocks)
        weights = tuple(parse_weight(w) for w in self.weights)
        if not blocks:
            raise WeightError("ancilla needs at least one block")
        if any(k < 1 for k in blocks):
            raise DimensionMismatch("block sizes must be positive")
        if len(weights) != len(blocks):
            raise WeightError(f"{len(blocks)} blocks but {len(weights)} weights")
        if any(w <= 0 for w in weights):
            raise WeightError("block weights must be positive")
        if not weights_sum_ok(weights):
            raise WeightError(f"weights sum to {float(sum(weights))!r}, not 1")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "weights", weights)

    @property
    def float_weights(self):
        return np.array([float(w) for w in self.weights])

    def trace(self, ys):
        """tau evaluated on a block-diagonal element given as a list of blocks."""
        return sum(float(t) * np.trace(y) / k for t, k, y in zip(self.weights, self.blocks, ys))


@dataclass(frozen=True, eq=False)
class FiniteFactorization:
    dim: int
    ancilla: FiniteAncillaSpec
    unitaries: tuple

    def __post_init__(self):
        n = self.dim
        if len(self.unitaries) != len(self.ancilla.blocks):
            raise DimensionMismatch(
                f"{len(self.ancilla.blocks)} ancilla blocks but {len(self.unitaries)} unitaries"
            )
        us = []
        for j, (k, u) in enumerate(zip(self.ancilla.blocks, self.unitaries)):
            u = as_square(u, n * k, name=f"block unitary {j}")
            check_unitary(u, DEFAULT_TOL * max(1, n * k), name=f"block unitary {j}")
            us.append(frozen(u))
        object.__setattr__(self, "unitaries", tuple(us))

    @classmethod
    def single(cls, u, k=1):
        u = as_square(u)
        return cls(u.shape[0] // k, FiniteAncillaSpec((k,), (Fraction(1),)), (u,))

    @property
    def blocks(self):
        return self.ancilla.blocks

    @property
    def weights(self):
        return self.ancilla.weights


class Verdict(enum.Enum):
    CONSTRUCTED = "Constructed"
    OBSTRUCTED = "Obstructed"
    CRITERION_INAPPLICABLE = "CriterionInapplicable"


@dataclass(frozen=True)
class ObstructionReport:
    independent: bool
    admissible_k: tuple
    verdict: Verdict
    k: Optional[int] = None
    k_max: int = 0


@dataclass(frozen=True, eq=False)
class StinespringDilation:
    """u on C^n (x) C^r; ``mode`` is ``"cptp"`` or ``"ucp"``; the ancilla state
    (CPTP input vector / UCP pure state) is basis vector ``state_index``."""

    dim: int
    r: int
    unitary: np.ndarray
    mode: str
    state_index: int = 0

    def __call__(self, x):
        n, r = self.dim, self.r
        u = self.unitary
        if self.mode == "cptp":
            e = np.zeros((r, r))
            e[self.state_index, self.state_index] = 1.0
            z = u @ np.kron(x, e) @ dagger(u)
            return partial_trace_ancilla(z, n, r)
        z = u @ np.kron(x, np.eye(r)) @ dagger(u)
        s = self.state_index
        return z.reshape(n, r, n, r)[:, s, :, s]


def _block_kraus(n, k, t, u):
    # K_{beta,gamma} = sqrt(t/k) (1 (x) <beta|) U (1 (x) |gamma>)
    blocks = u.reshape(n, k, n, k).transpose(1, 3, 0, 2).reshape(k * k, n, n)
    return np.sqrt(t / k) * blocks


def channel_of_factorization(f):
    """x -> sum_j t_j (id (x) tr_{k_j})(U_j (x (x) 1) U_j^*) as a Kraus channel."""
    n = f.dim
    ops = [
        _block_kraus(n, k, t, u)
        for k, t, u in zip(f.blocks, f.ancilla.float_weights, f.unitaries)
    ]
    return QuantumChannel(n, np.concatenate(ops))


def evaluate_factorization(f, x):
    """Direct evaluation of (id (x) tau)(u (x (x) 1_A) u^*), no Kraus form."""
    n = f.dim
    out = np.zeros((n, n), dtype=np.complex128)
    for k, t, u in zip(f.blocks, f.ancilla.float_weights, f.unitaries):
        z = u @ np.kron(x, np.eye(k)) @ dagger(u)
        out += t * partial_trace_ancilla(z, n, k) / k
    return out


def _pairing(f, a_blocks, b_blocks):
    """<a, b> = (Tr_n (x) tau)(b^* a) for block-diagonal a, b."""
    total = 0j
    for k, t, a, b in zip(f.blocks, f.ancilla.float_weights, a_blocks, b_blocks):
        total += t * np.trace(dagger(b) @ a) / k
    return total


def recover_eq2(f, tol=DEFAULT_TOL):
    """Rebuild the channel from the two *-homomorphisms alpha = id (x) 1_A and
    beta = Ad(u^*) o alpha via Phi(x)_ij = <alpha(x), beta(e_ij)>."""
    n = f.dim

    def alpha(x):
        return [np.kron(x, np.eye(k)) for k in f.blocks]

    def beta(x):
        return [dagger(u) @ a @ u for u, a in zip(f.unitaries, alpha(x))]

    beta_units = {(i, j): beta(e) for i, j, e in matrix_units(n)}

    def phi(x):
        ax = alpha(x)
        out = np.zeros((n, n), dtype=np.complex128)
        for (i, j), b in beta_units.items():
            out[i, j] = _pairing(f, ax, b)
        return out

    c = np.zeros((n * n, n * n), dtype=np.complex128)
    for _, _, e in matrix_units(n):
        c += np.kron(phi(e), e)
    return channel_from_choi(c, tol)


def admissible_ks(t, k_max):
    """All k in 2..k_max with t in k^{-1} Z."""
    out = []
    for k in range(2, k_max + 1):
        if isinstance(t, Fraction):
            if (t * k).denominator == 1:
                out.append(k)
        elif abs(t * k - round(t * k)) <= 1e-9 * k:
            out.append(k)
    return tuple(out)


def noisy_witness(t, k):
    """The pair (z_1, z_2) = (p, 1 - p) with p = diag(1 x m, 0 x (k-m)), m = t k."""
    m = int(round(float(t) * k))
    p = np.diag([1.0] * m + [0.0] * (k - m)).astype(np.complex128)
    return p, np.eye(k) - p


def two_unitary_factorization(u1, u2, t, k_max, tol=DEFAULT_TOL):
    """Decide / construct a k-noisy factorization of t Ad(u1) + (1 - t) Ad(u2).

    When {1, u1^* u2, u2^* u1} is linearly independent the mixture is k-noisy
    exactly when t is a multiple of 1/k. For an admissible k the unitary
    u1 (x) p + u2 (x) (1 - p) with tr_k(p) = t is returned.
    """
    t = parse_weight(t)
    if not 0 < t < 1:
        raise WeightError(f"t must lie strictly between 0 and 1, got {t}")
    u1 = check_unitary(u1, tol, name="u1")
    u2 = check_unitary(u2, tol, name="u2")
    if u1.shape != u2.shape:
        raise DimensionMismatch("u1 and u2 must have the same size")
    n = u1.shape[0]
    v = dagger(u1) @ u2
    vecs = np.stack([np.eye(n).ravel(), v.ravel(), dagger(v).ravel()])
    independent = numerical_rank(vecs.conj() @ vecs.T, tol) == 3
    ks = admissible_ks(t, k_max)
    target = mixture_channel(u1, u2, t)

    fact = None
    k_used = None
    if ks:
        k_used = ks[0]
        p, q = noisy_witness(t, k_used)
        u = np.kron(u1, p) + np.kron(u2, q)
        fact = FiniteFactorization.single(u, k_used)
        err = map_distance(channel_of_factorization(fact), target, n)
        if err > 1e3 * tol:
            raise AssertionError(f"constructed factorization misses the mixture by {err:.3g}")

    if not independent:
        verdict = Verdict.CRITERION_INAPPLICABLE
        if fact is None and np.abs(v - v[0, 0] * np.eye(n)).max() <= tol:
            # u2 is a phase times u1, so the mixture is just Ad(u1)
            fact = FiniteFactorization.single(u1)
    elif fact is not None:
        verdict = Verdict.CONSTRUCTED
    else:
        verdict = Verdict.OBSTRUCTED
    report = ObstructionReport(
        independent=independent, admissible_k=ks, verdict=verdict, k=k_used, k_max=k_max
    )
    return report, fact


def mixture_channel(u1, u2, t):
    tf = float(t)
    return QuantumChannel(u1.shape[0], np.stack([np.sqrt(tf) * u1, np.sqrt(1 - tf) * u2]))


def _hat(v, n, k, l):
    """v on C^n (x) C^l lifted to C^n (x) C^k (x) C^l, identity on the middle factor."""
    v4 = v.reshape(n, l, n, l)
    out = np.einsum("ibjd,ac->iabjcd", v4, np.eye(k))
    return out.reshape(n * k * l, n * k * l)


def compose_factorizations(f, g):
    """Factorization of channel(g) o channel(f) through A (x) B, w = v^(u (x) 1_B)."""
    if f.dim != g.dim:
        raise DimensionMismatch(f"cannot compose dims {f.dim} and {g.dim}")
    n = f.dim
    blocks, weights, unitaries = [], [], []
    for k, t, u in zip(f.blocks, f.weights, f.unitaries):
        for l, s, v in zip(g.blocks, g.weights, g.unitaries):
            w = _hat(v, n, k, l) @ np.kron(u, np.eye(l))
            blocks.append(k * l)
            weights.append(t * s)
            unitaries.append(w)
    return FiniteFactorization(n, FiniteAncillaSpec(tuple(blocks), tuple(weights)), tuple(unitaries))


def convex_combine(fs, ts):
    """Direct sum of ancillas with trace sum_j t_j tau_j."""
    if len(fs) == 0 or len(fs) != len(ts):
        raise WeightError("need one weight per factorization")
    ts = [parse_weight(t) for t in ts]
    if any(t <= 0 for t in ts):
        raise WeightError("weights must be positive")
    if not weights_sum_ok(ts):
        raise WeightError(f"weights sum to {float(sum(ts))!r}, not 1")
    n = fs[0].dim
    if any(f.dim != n for f in fs):
        raise DimensionMismatch("all factorizations must share one dimension")
    blocks, weights, unitaries = [], [], []
    for f, t in zip(fs, ts):
        for k, s, u in zip(f.blocks, f.weights, f.unitaries):
            blocks.append(k)
            weights.append(t * s)
            unitaries.append(u)
    return FiniteFactorization(n, FiniteAncillaSpec(tuple(blocks), tuple(weights)), tuple(unitaries))


def split_factorization(f, tol=DEFAULT_TOL):
    """One k_j-noisy factorization per block, paired with its weight t_j."""
    out = []
    for k, t, u in zip(f.blocks, f.weights, f.unitaries):
        if float(t) < tol:
            continue
        out.append((t, FiniteFactorization.single(u, k)))
    return out


def stinespring(ch, mode="cptp", tol=DEFAULT_TOL):
    """Unitary dilation with ancilla dimension r = Choi rank.

    ``cptp``: Phi(x) = (id (x) Tr_r)(u (x (x) e_11) u^*); the canonical Kraus
    operators fill the columns (i, 0) of u.
    ``ucp``: Phi(x) = (id (x) rho)(u (x (x) 1_r) u^*) with rho the vector state
    of basis vector 0; the Kraus operators fill the rows (a, 0).
    """
    mode = mode.lower()
    if mode not in ("cptp", "ucp"):
        raise ValueError(f"unknown Stinespring mode {mode!r}")
    report = verify_channel(ch, tol)
    if not report.cp:
        raise NotCompletelyPositive(
            "channel is not completely positive", min_eigenvalue=report.min_choi_eigenvalue
        )
    if mode == "cptp" and not report.trace_preserving:
        raise NotTracePreserving("CPTP dilation needs a trace-preserving channel")
    if mode == "ucp" and not report.unital:
        raise NotUnital("UCP dilation needs a unital channel")
    canon = channel_from_choi(choi_of(ch), tol)
    v = np.asarray(canon.kraus)
    r, n = v.shape[0], ch.dim
    # iso[(a, alpha), i] = v_alpha[a, i]
    iso = v.transpose(1, 0, 2).reshape(n * r, n)
    if mode == "cptp":
        cols = complete_columns(iso)
        perm = _dilation_order(n, r)
        u = np.empty_like(cols)
        u[:, perm] = cols
    else:
        # coiso[a, (i, alpha)] = v_alpha[a, i]; coiso coiso^* = sum_j v_j v_j^*
        coiso = v.transpose(1, 2, 0).reshape(n, n * r)
        rows = dagger(complete_columns(dagger(coiso)))
        perm = _dilation_order(n, r)
        u = np.empty_like(rows)
        u[perm, :] = rows
    return StinespringDilation(n, r, u, mode, 0)


def _dilation_order(n, r):
    """Positions (i, 0) first, then the remaining (i, alpha) in row-major order."""
    first = [i * r for i in range(n)]
    rest = [i * r + a for i in range(n) for a in range(1, r)]
    return np.array(first + rest)
