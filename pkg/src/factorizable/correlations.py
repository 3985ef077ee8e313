"""Correlation matrices of unitaries in finite-dimensional tracial algebras."""

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._linalg import DEFAULT_TOL, as_square, check_unitary, dagger, frozen
from .errors import DimensionMismatch, WeightError
from .factorization import FiniteAncillaSpec, FiniteFactorization
from .zoo import haar_unitary


@dataclass(frozen=True, eq=False)
class UnitaryTuple:
    """n unitaries in A = (+)_b M_{k_b}; ``unitaries[b][i]`` is the b-th block of u_i."""

    n: int
    ancilla: FiniteAncillaSpec
    unitaries: tuple

    def __post_init__(self):
        if len(self.unitaries) != len(self.ancilla.blocks):
            raise DimensionMismatch(
                f"{len(self.ancilla.blocks)} blocks but unitaries for {len(self.unitaries)}"
            )
        blocks = []
        for b, (k, us) in enumerate(zip(self.ancilla.blocks, self.unitaries)):
            if len(us) != self.n:
                raise DimensionMismatch(f"block {b} lists {len(us)} unitaries, expected {self.n}")
            blocks.append(tuple(
                frozen(check_unitary(as_square(u, k, name=f"u_{i} block {b}"),
                                     DEFAULT_TOL * max(1, k), name=f"u_{i} block {b}"))
                for i, u in enumerate(us)
            ))
        object.__setattr__(self, "unitaries", tuple(blocks))

    @classmethod
    def matrix(cls, us):
        """A tuple in a single full matrix algebra M_k with the normalized trace."""
        us = [as_square(u) for u in us]
        k = us[0].shape[0]
        return cls(len(us), FiniteAncillaSpec((k,), (Fraction(1),)), (tuple(us),))


class ThetaCheck(NamedTuple):
    member: bool
    min_eigenvalue: float
    max_diagonal_deviation: float
    hermitian_deviation: float

    def __bool__(self):
        return self.member


def gram_correlation(tup):
    """[tau(u_i u_j^*)]_{ij} with tau = sum_b t_b tr_{k_b}."""
    n = tup.n
    g = np.zeros((n, n), dtype=np.complex128)
    for k, t, us in zip(tup.ancilla.blocks, tup.ancilla.float_weights, tup.unitaries):
        stack = np.stack(us)
        # tr(u_i u_j^*) = sum_ab u_i[a, b] conj(u_j[a, b])
        g += t * np.einsum("iab,jab->ij", stack, stack.conj()) / k
    return g


def is_theta(b, tol=DEFAULT_TOL):
    """Membership in the correlation matrices: Hermitian, unit diagonal, PSD."""
    b = as_square(b, name="b")
    herm = float(np.abs(b - dagger(b)).max())
    diag = float(np.abs(np.diag(b) - 1.0).max())
    w = np.linalg.eigvalsh(0.5 * (b + dagger(b)))
    scale = max(1.0, float(np.abs(w).max()))
    ok = herm <= tol and diag <= tol and w[0] >= -tol * scale
    return ThetaCheck(bool(ok), float(w[0]), diag, herm)


def embed_divisible(tup, k_target):
    """u_i -> u_i (x) 1_{k'/k} for a single-block tuple."""
    if len(tup.ancilla.blocks) != 1:
        raise DimensionMismatch("embed_divisible needs a single-block tuple")
    k = tup.ancilla.blocks[0]
    if k_target % k:
        raise DimensionMismatch(f"{k} does not divide {k_target}")
    eye = np.eye(k_target // k)
    us = tuple(np.kron(u, eye) for u in tup.unitaries[0])
    return UnitaryTuple(tup.n, FiniteAncillaSpec((k_target,), tup.ancilla.weights), (us,))


def direct_sum_mix(t1, t2, lam):
    """Block concatenation realizing lam gram(t1) + (1 - lam) gram(t2).

    Blocks that would get weight zero (lam = 0 or 1) are dropped.
    """
    if t1.n != t2.n:
        raise DimensionMismatch(f"tuples have {t1.n} and {t2.n} unitaries")
    lam = lam if isinstance(lam, Fraction) else float(lam)
    if not 0 <= lam <= 1:
        raise WeightError(f"mixing weight must lie in [0, 1], got {lam}")
    blocks, weights, us = [], [], []
    for tup, s in ((t1, lam), (t2, 1 - lam)):
        if s == 0:
            continue
        for k, w, block in zip(tup.ancilla.blocks, tup.ancilla.weights, tup.unitaries):
            blocks.append(k)
            weights.append(s * w)
            us.append(block)
    return UnitaryTuple(t1.n, FiniteAncillaSpec(tuple(blocks), tuple(weights)), tuple(us))


def schur_bridge(tup):
    """Factorization of the Schur channel of gram(tup) via u = sum_j e_jj (x) u_j."""
    n = tup.n
    unitaries = []
    for k, us in zip(tup.ancilla.blocks, tup.unitaries):
        u = np.zeros((n * k, n * k), dtype=np.complex128)
        for j, uj in enumerate(us):
            u[j * k:(j + 1) * k, j * k:(j + 1) * k] = uj
        unitaries.append(u)
    return FiniteFactorization(n, tup.ancilla, tuple(unitaries))


def random_tuple(n, blocks, weights, seed):
    """Haar-random tuple; unitary i of block b uses seed stream seed + index."""
    spec = FiniteAncillaSpec(tuple(blocks), tuple(weights))
    us = []
    idx = 0
    for k in spec.blocks:
        row = []
        for _ in range(n):
            row.append(haar_unitary(k, seed + idx))
            idx += 1
        us.append(tuple(row))
    return UnitaryTuple(n, spec, tuple(us))


def sample_grams(n, k, count, seed):
    """``count`` Gram matrices from G_k(n), one Haar tuple per seed stream."""
    return [gram_correlation(random_tuple(n, (k,), (Fraction(1),), seed + s * n))
            for s in range(count)]
