"""Two-party correlation tables: classical, tensor-product and commuting models.

Tables are real arrays ``p[x, y, a, b]`` = probability of outcomes (a, b)
for questions (x, y).
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from ._linalg import DEFAULT_TOL, as_square, dagger, frozen
from .errors import (
    DimensionMismatch,
    InvalidPVM,
    InvalidTable,
    NonCommutingPVMs,
    SizeOverflow,
    WeightError,
)

MAX_VERTICES = 10**6


@dataclass(frozen=True, eq=False)
class PVM:
    dim: int
    projections: tuple

    def __post_init__(self):
        ps = tuple(frozen(as_square(p, self.dim, name="projection")) for p in self.projections)
        if not ps:
            raise InvalidPVM("a PVM needs at least one projection")
        tol = DEFAULT_TOL * max(1, self.dim)
        for a, p in enumerate(ps):
            if np.abs(p - dagger(p)).max() > tol:
                raise InvalidPVM(f"projection {a} is not Hermitian")
            if np.abs(p @ p - p).max() > tol:
                raise InvalidPVM(f"projection {a} is not idempotent")
        if np.abs(sum(ps) - np.eye(self.dim)).max() > tol:
            raise InvalidPVM("projections do not sum to the identity")
        object.__setattr__(self, "projections", ps)

    @property
    def k(self):
        return len(self.projections)

    @classmethod
    def from_basis(cls, basis):
        """Rank-one PVM from the columns of a unitary."""
        basis = as_square(basis)
        return cls(basis.shape[0], tuple(np.outer(basis[:, a], basis[:, a].conj())
                                         for a in range(basis.shape[1])))


def _check_family(pvms, dim, who):
    if not pvms:
        raise InvalidPVM(f"{who} needs at least one PVM")
    k = pvms[0].k
    for x, p in enumerate(pvms):
        if p.dim != dim:
            raise DimensionMismatch(f"{who} PVM {x} acts on dim {p.dim}, expected {dim}")
        if p.k != k:
            raise InvalidPVM(f"{who} PVM {x} has {p.k} outcomes, expected {k}")
    return k


def _unit_vector(psi, dim):
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    if psi.shape[0] != dim:
        raise DimensionMismatch(f"state has length {psi.shape[0]}, expected {dim}")
    if abs(np.linalg.norm(psi) - 1.0) > DEFAULT_TOL * 10:
        raise InvalidTable(f"state is not a unit vector (norm {np.linalg.norm(psi):.12g})")
    psi = psi.copy()
    psi.setflags(write=False)
    return psi


@dataclass(frozen=True, eq=False)
class TensorStrategy:
    dimA: int
    dimB: int
    alice: tuple
    bob: tuple
    psi: np.ndarray

    def __post_init__(self):
        ka = _check_family(self.alice, self.dimA, "Alice")
        kb = _check_family(self.bob, self.dimB, "Bob")
        if ka != kb or len(self.alice) != len(self.bob):
            raise InvalidPVM("Alice and Bob must share the question and outcome counts")
        object.__setattr__(self, "alice", tuple(self.alice))
        object.__setattr__(self, "bob", tuple(self.bob))
        object.__setattr__(self, "psi", _unit_vector(self.psi, self.dimA * self.dimB))


@dataclass(frozen=True, eq=False)
class CommutingStrategy:
    dim: int
    alice: tuple
    bob: tuple
    psi: np.ndarray
    tol: float = field(default=DEFAULT_TOL)

    def __post_init__(self):
        ka = _check_family(self.alice, self.dim, "Alice")
        kb = _check_family(self.bob, self.dim, "Bob")
        if ka != kb or len(self.alice) != len(self.bob):
            raise InvalidPVM("Alice and Bob must share the question and outcome counts")
        object.__setattr__(self, "alice", tuple(self.alice))
        object.__setattr__(self, "bob", tuple(self.bob))
        object.__setattr__(self, "psi", _unit_vector(self.psi, self.dim))
        for x, pa in enumerate(self.alice):
            for y, qb in enumerate(self.bob):
                for a, p in enumerate(pa.projections):
                    for b, q in enumerate(qb.projections):
                        norm = float(np.linalg.norm(p @ q - q @ p, 2))
                        if norm > self.tol:
                            raise NonCommutingPVMs(x, y, a, b, norm)


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    n: int
    k: int
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        shape = (self.n, self.n, self.k, self.k)
        if p.shape != shape:
            raise InvalidTable(f"table has shape {p.shape}, expected {shape}")
        tol = 1e-9
        bad = np.argwhere((p < -tol) | (p > 1 + tol))
        if bad.size:
            raise InvalidTable(f"entry {tuple(bad[0])} = {p[tuple(bad[0])]!r} outside [0, 1]")
        sums = p.sum(axis=(2, 3))
        worst = np.unravel_index(np.argmax(np.abs(sums - 1)), sums.shape)
        if abs(sums[worst] - 1) > tol:
            raise InvalidTable(f"p(., .|{worst[0]}, {worst[1]}) sums to {sums[worst]!r}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True, eq=False)
class BellFunctional:
    n: int
    k: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.float64)
        if c.shape != (self.n, self.n, self.k, self.k):
            raise DimensionMismatch(f"coefficients have shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


class MembershipResult(NamedTuple):
    member: bool
    residual: float
    weights: np.ndarray


class ChshResult(NamedTuple):
    value: float
    argmax: dict


def _real_part(vals, tol, what):
    worst = float(np.abs(vals.imag).max()) if vals.size else 0.0
    if worst > tol:
        raise InvalidTable(f"{what} has imaginary part {worst:.3g}")
    return vals.real


def tensor_table(s, tol=DEFAULT_TOL):
    """p(a, b|x, y) = <(P_a^x (x) Q_b^y) psi, psi>."""
    n, k = len(s.alice), s.alice[0].k
    P = np.array([[p for p in pvm.projections] for pvm in s.alice])  # (x, a, i, j)
    Q = np.array([[q for q in pvm.projections] for pvm in s.bob])
    psi = s.psi.reshape(s.dimA, s.dimB)
    # <psi, (P (x) Q) psi> = sum conj(psi[i, k]) P[i, j] Q[k, l] psi[j, l]
    vals = np.einsum("ik,xaij,ybkl,jl->xyab", psi.conj(), P, Q, psi, optimize=True)
    return CorrelationTable(n, k, np.clip(_real_part(vals, tol, "tensor table"), 0.0, None))


def commuting_table(s, tol=DEFAULT_TOL):
    """p(a, b|x, y) = <P_a^x Q_b^y psi, psi>."""
    n, k = len(s.alice), s.alice[0].k
    P = np.array([[p for p in pvm.projections] for pvm in s.alice])
    Q = np.array([[q for q in pvm.projections] for pvm in s.bob])
    vals = np.einsum("i,xaij,ybjl,l->xyab", s.psi.conj(), P, Q, s.psi, optimize=True)
    return CorrelationTable(n, k, np.clip(_real_part(vals, tol, "commuting table"), 0.0, None))


def lift_tensor_strategy(s):
    """P (x) 1 and 1 (x) Q on H_A (x) H_B; same table as the tensor strategy."""
    ea, eb = np.eye(s.dimA), np.eye(s.dimB)
    dim = s.dimA * s.dimB
    alice = tuple(PVM(dim, tuple(np.kron(p, eb) for p in pvm.projections)) for pvm in s.alice)
    bob = tuple(PVM(dim, tuple(np.kron(ea, q) for q in pvm.projections)) for pvm in s.bob)
    return CommutingStrategy(dim, alice, bob, s.psi)


def num_vertices(n, k):
    return k ** (2 * n)


def strategy_index(alice, bob, k):
    """Index of the deterministic strategy with response functions ``alice``, ``bob``."""
    n = len(alice)
    ia = sum(int(a) * k ** x for x, a in enumerate(alice))
    ib = sum(int(b) * k ** y for y, b in enumerate(bob))
    return ia * k ** n + ib


def vertex_tables(n, k):
    if num_vertices(n, k) > MAX_VERTICES:
        raise SizeOverflow(f"k^(2n) = {num_vertices(n, k)} vertices exceeds {MAX_VERTICES}")
    return _kernels.vertex_tables(n, k)


def classical_table(weights, n, k, tol=DEFAULT_TOL):
    """Mixture sum_d w_d T_d of deterministic tables, d indexed by ``strategy_index``."""
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.shape[0] != num_vertices(n, k):
        raise WeightError(f"expected {num_vertices(n, k)} weights, got {w.shape[0]}")
    if (w < 0).any():
        raise WeightError("weights must be nonnegative")
    if abs(w.sum() - 1.0) > tol:
        raise WeightError(f"weights sum to {w.sum()!r}, not 1")
    return CorrelationTable(n, k, (w @ vertex_tables(n, k)).reshape(n, n, k, k))


def deterministic_table(alice, bob, k):
    n = len(alice)
    w = np.zeros(num_vertices(n, k))
    w[strategy_index(alice, bob, k)] = 1.0
    return classical_table(w, n, k)


def membership_Cc(table, residual_tol=1e-7, max_iter=100_000):
    """Is the table a convex combination of deterministic tables?

    Solves min ||V^T w - p|| over w >= 0 with an appended sum(w) = 1 row;
    ``residual`` is the sup-norm misfit of the normalized solution.
    """
    n, k = table.n, table.k
    verts = vertex_tables(n, k)
    target = table.p.ravel()
    a = np.vstack([verts.T, np.ones((1, verts.shape[0]))])
    b = np.append(target, 1.0)
    w = _kernels.nnls(np.ascontiguousarray(a), b, max_iter)
    total = w.sum()
    if total > 0:
        w = w / total
    residual = float(np.abs(w @ verts - target).max())
    return MembershipResult(residual <= residual_tol, residual, w)


def bell_value(table, functional):
    if (table.n, table.k) != (functional.n, functional.k):
        raise DimensionMismatch(
            f"table is ({table.n}, {table.k}), functional is ({functional.n}, {functional.k})"
        )
    return float(np.sum(functional.coefficients * table.p))


def chsh_functional():
    """E00 + E01 + E10 - E11 with E_xy = sum_ab (-1)^(a+b) p(a, b|x, y)."""
    sign_ab = np.array([[1.0, -1.0], [-1.0, 1.0]])
    sign_xy = np.array([[1.0, 1.0], [1.0, -1.0]])
    return BellFunctional(2, 2, sign_xy[:, :, None, None] * sign_ab[None, None, :, :])


def is_synchronous(table, tol=DEFAULT_TOL):
    """p(a, b|x, x) = 0 whenever a != b."""
    off = ~np.eye(table.k, dtype=bool)
    same = table.p[np.arange(table.n), np.arange(table.n)]
    return bool((same[:, off] <= tol).all())


def _angle_basis(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def qubit_strategy(params, product=False):
    """TensorStrategy encoded by the optimizer's parameter vector."""
    params = np.asarray(params, dtype=np.float64)
    alice = tuple(PVM.from_basis(_angle_basis(params[x])) for x in range(2))
    bob = tuple(PVM.from_basis(_angle_basis(params[2 + y])) for y in range(2))
    if product:
        psi = np.kron(params[4:6] + 1j * params[6:8], params[8:10] + 1j * params[10:12])
    else:
        psi = params[4:8] + 1j * params[8:12]
    return TensorStrategy(2, 2, alice, bob, psi / np.linalg.norm(psi))


def reference_chsh_strategy():
    """Maximally entangled state with angles 0, pi/4 (Alice) and pi/8, -pi/8 (Bob)."""
    params = np.zeros(12)
    params[:4] = [0.0, np.pi / 4, np.pi / 8, -np.pi / 8]
    params[4] = params[7] = 1 / np.sqrt(2)
    return qubit_strategy(params)


def maximize_chsh(mode="quantum", seed=0, product=False, starts=32):
    """Maximum CHSH value: exact over the 16 vertices, or a multi-start
    Nelder-Mead search over two-qubit real-plane strategies."""
    f = chsh_functional()
    if mode == "classical":
        values = vertex_tables(2, 2) @ f.coefficients.ravel()
        best = int(np.argmax(values))
        ia, ib = divmod(best, 4)
        return ChshResult(float(values[best]), {
            "strategy_index": best,
            "alice": [ia % 2, ia // 2],
            "bob": [ib % 2, ib // 2],
        })
    if mode != "quantum":
        raise ValueError(f"unknown mode {mode!r}")
    coeffs = np.ascontiguousarray(f.coefficients)
    rng = np.random.default_rng(int(seed) % 2**64)

    def objective(x):
        return -_kernels.qubit_bell_value(x, coeffs, product)

    best_x, best_val = None, -np.inf
    for _ in range(starts):
        x0 = np.concatenate([rng.uniform(0, np.pi, 4), rng.standard_normal(8)])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": 6000, "xatol": 1e-9, "fatol": 1e-12, "adaptive": True})
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x
    strat = qubit_strategy(best_x, product)
    return ChshResult(float(best_val), {
        "alice_angles": [float(v) for v in best_x[:2]],
        "bob_angles": [float(v) for v in best_x[2:4]],
        "psi_re": [float(v) for v in strat.psi.real],
        "psi_im": [float(v) for v in strat.psi.imag],
        "product": bool(product),
    })
