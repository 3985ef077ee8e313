"""JSON file formats for matrices, channels, factorizations, tuples and tables.

Floats are written with ``repr`` precision, so a write/read round trip is
bit-exact. Malformed input raises :class:`SchemaError` carrying a
JSON-pointer path to the offending field.
"""

import json
from fractions import Fraction

import numpy as np

from ._linalg import DEFAULT_TOL, is_unitary
from .channels import QuantumChannel
from .correlations import UnitaryTuple
from .errors import FactorizableError, SchemaError
from .factorization import FiniteAncillaSpec, FiniteFactorization, weights_sum_ok
from .games import PVM, BellFunctional, CommutingStrategy, CorrelationTable, TensorStrategy


def _require(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise SchemaError(path or "/", "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}/{key}", "missing field")
    value = obj[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool) or value < 1):
        raise SchemaError(f"{path}/{key}", "expected a positive integer")
    if kind is list and not isinstance(value, list):
        raise SchemaError(f"{path}/{key}", "expected an array")
    return value


def _number(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(path, "expected a number")
    return float(v)


# -- matrices --------------------------------------------------------------

def matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [[float(v) for v in row] for row in m.real],
        "im": [[float(v) for v in row] for row in m.imag],
    }


def matrix_from_json(obj, path=""):
    rows = _require(obj, "rows", path, int)
    cols = _require(obj, "cols", path, int)
    out = np.zeros((rows, cols), dtype=np.complex128)
    for part in ("re", "im"):
        data = _require(obj, part, path, list)
        if len(data) != rows:
            raise SchemaError(f"{path}/{part}", f"expected {rows} rows, got {len(data)}")
        for i, row in enumerate(data):
            if not isinstance(row, list) or len(row) != cols:
                raise SchemaError(f"{path}/{part}/{i}", f"expected {cols} entries")
            vals = [_number(v, f"{path}/{part}/{i}/{j}") for j, v in enumerate(row)]
            if part == "re":
                out[i].real = vals
            else:
                out[i].imag = vals
    return out


# -- weights ---------------------------------------------------------------

def weight_to_json(w):
    if isinstance(w, Fraction):
        return {"num": w.numerator, "den": w.denominator}
    return float(w)


def weight_from_json(v, path):
    if isinstance(v, dict):
        num, den = v.get("num"), v.get("den")
        if not isinstance(num, int) or not isinstance(den, int) or den <= 0:
            raise SchemaError(path, "exact weight needs integer num and positive den")
        return Fraction(num, den)
    return _number(v, path)


def _weights_from_json(obj, path, count):
    raw = _require(obj, "weights", path, list)
    if len(raw) != count:
        raise SchemaError(f"{path}/weights", f"expected {count} weights, got {len(raw)}")
    ws = tuple(weight_from_json(v, f"{path}/weights/{j}") for j, v in enumerate(raw))
    if any(w <= 0 for w in ws):
        raise SchemaError(f"{path}/weights", "weights must be positive")
    if not weights_sum_ok(ws):
        raise SchemaError(f"{path}/weights", f"weights sum to {float(sum(ws))!r}, not 1")
    return ws


# -- channels --------------------------------------------------------------

def channel_to_json(ch):
    return {"dim": ch.dim, "kraus": [matrix_to_json(k) for k in ch.kraus]}


def channel_from_json(obj, path=""):
    n = _require(obj, "dim", path, int)
    raw = _require(obj, "kraus", path, list)
    if not raw:
        raise SchemaError(f"{path}/kraus", "need at least one Kraus operator")
    ops = []
    for j, m in enumerate(raw):
        op = matrix_from_json(m, f"{path}/kraus/{j}")
        if op.shape != (n, n):
            raise SchemaError(f"{path}/kraus/{j}", f"expected {n}x{n}, got {op.shape}")
        ops.append(op)
    return QuantumChannel(n, np.stack(ops))


# -- factorizations --------------------------------------------------------

def factorization_to_json(f):
    return {
        "dim": f.dim,
        "blocks": list(f.blocks),
        "weights": [weight_to_json(w) for w in f.weights],
        "unitaries": [matrix_to_json(u) for u in f.unitaries],
    }


def factorization_from_json(obj, path=""):
    n = _require(obj, "dim", path, int)
    blocks = _require(obj, "blocks", path, list)
    for j, k in enumerate(blocks):
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise SchemaError(f"{path}/blocks/{j}", "expected a positive integer")
    weights = _weights_from_json(obj, path, len(blocks))
    raw = _require(obj, "unitaries", path, list)
    if len(raw) != len(blocks):
        raise SchemaError(f"{path}/unitaries", f"expected {len(blocks)} unitaries")
    us = []
    for j, (k, m) in enumerate(zip(blocks, raw)):
        u = matrix_from_json(m, f"{path}/unitaries/{j}")
        if u.shape != (n * k, n * k):
            raise SchemaError(f"{path}/unitaries/{j}", f"expected {n * k}x{n * k}, got {u.shape}")
        if not is_unitary(u, DEFAULT_TOL * n * k):
            raise SchemaError(f"{path}/unitaries/{j}", "block is not unitary")
        us.append(u)
    return FiniteFactorization(n, FiniteAncillaSpec(tuple(blocks), weights), tuple(us))


# -- unitary tuples --------------------------------------------------------

def tuple_to_json(t):
    return {
        "n": t.n,
        "blocks": list(t.ancilla.blocks),
        "weights": [weight_to_json(w) for w in t.ancilla.weights],
        "unitaries": [[matrix_to_json(u) for u in block] for block in t.unitaries],
    }


def tuple_from_json(obj, path=""):
    n = _require(obj, "n", path, int)
    blocks = _require(obj, "blocks", path, list)
    for j, k in enumerate(blocks):
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise SchemaError(f"{path}/blocks/{j}", "expected a positive integer")
    weights = _weights_from_json(obj, path, len(blocks))
    raw = _require(obj, "unitaries", path, list)
    if len(raw) != len(blocks):
        raise SchemaError(f"{path}/unitaries", f"expected {len(blocks)} blocks")
    us = []
    for b, (k, row) in enumerate(zip(blocks, raw)):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{path}/unitaries/{b}", f"expected {n} matrices")
        block = []
        for i, m in enumerate(row):
            u = matrix_from_json(m, f"{path}/unitaries/{b}/{i}")
            if u.shape != (k, k) or not is_unitary(u, DEFAULT_TOL * k):
                raise SchemaError(f"{path}/unitaries/{b}/{i}", f"expected a {k}x{k} unitary")
            block.append(u)
        us.append(tuple(block))
    return UnitaryTuple(n, FiniteAncillaSpec(tuple(blocks), weights), tuple(us))


# -- tables, functionals, strategies ----------------------------------------

def table_to_json(t):
    return {"n": t.n, "k": t.k, "p": np.asarray(t.p).tolist()}


def _array4(raw, shape, path):
    try:
        arr = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError):
        raise SchemaError(path, "expected a nested numeric array") from None
    if arr.shape != shape:
        raise SchemaError(path, f"expected shape {list(shape)}, got {list(arr.shape)}")
    return arr


def table_from_json(obj, path=""):
    n = _require(obj, "n", path, int)
    k = _require(obj, "k", path, int)
    p = _array4(_require(obj, "p", path, list), (n, n, k, k), f"{path}/p")
    try:
        return CorrelationTable(n, k, p)
    except FactorizableError as exc:
        raise SchemaError(f"{path}/p", str(exc)) from None


def functional_to_json(f):
    return {"n": f.n, "k": f.k, "coefficients": np.asarray(f.coefficients).tolist()}


def functional_from_json(obj, path=""):
    n = _require(obj, "n", path, int)
    k = _require(obj, "k", path, int)
    c = _array4(_require(obj, "coefficients", path, list), (n, n, k, k), f"{path}/coefficients")
    return BellFunctional(n, k, c)


def _vector_to_json(v):
    v = np.asarray(v, dtype=np.complex128)
    return {"re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


def _vector_from_json(obj, path):
    re = _require(obj, "re", path, list)
    im = _require(obj, "im", path, list)
    if len(re) != len(im):
        raise SchemaError(path, "re and im differ in length")
    return (np.array([_number(v, f"{path}/re/{i}") for i, v in enumerate(re)])
            + 1j * np.array([_number(v, f"{path}/im/{i}") for i, v in enumerate(im)]))


def _pvms_to_json(pvms):
    return [[matrix_to_json(p) for p in pvm.projections] for pvm in pvms]


def _pvms_from_json(raw, dim, path):
    if not isinstance(raw, list) or not raw:
        raise SchemaError(path, "expected a nonempty array of PVMs")
    out = []
    for x, projs in enumerate(raw):
        if not isinstance(projs, list):
            raise SchemaError(f"{path}/{x}", "expected an array of projections")
        mats = [matrix_from_json(m, f"{path}/{x}/{a}") for a, m in enumerate(projs)]
        try:
            out.append(PVM(dim, tuple(mats)))
        except FactorizableError as exc:
            raise SchemaError(f"{path}/{x}", str(exc)) from None
    return tuple(out)


def strategy_to_json(s):
    if isinstance(s, TensorStrategy):
        return {"kind": "tensor", "dimA": s.dimA, "dimB": s.dimB,
                "alice": _pvms_to_json(s.alice), "bob": _pvms_to_json(s.bob),
                "psi": _vector_to_json(s.psi)}
    if isinstance(s, CommutingStrategy):
        return {"kind": "commuting", "dim": s.dim,
                "alice": _pvms_to_json(s.alice), "bob": _pvms_to_json(s.bob),
                "psi": _vector_to_json(s.psi)}
    raise TypeError(f"not a strategy: {type(s).__name__}")


def strategy_from_json(obj, path=""):
    """Tensor, commuting, or classical ({"kind": "classical", "n", "k", "weights"})."""
    kind = _require(obj, "kind", path)
    if kind == "classical":
        n = _require(obj, "n", path, int)
        k = _require(obj, "k", path, int)
        w = _require(obj, "weights", path, list)
        return {"kind": "classical", "n": n, "k": k,
                "weights": [_number(v, f"{path}/weights/{i}") for i, v in enumerate(w)]}
    if kind == "tensor":
        da = _require(obj, "dimA", path, int)
        db = _require(obj, "dimB", path, int)
        alice = _pvms_from_json(_require(obj, "alice", path), da, f"{path}/alice")
        bob = _pvms_from_json(_require(obj, "bob", path), db, f"{path}/bob")
        psi = _vector_from_json(_require(obj, "psi", path), f"{path}/psi")
        return TensorStrategy(da, db, alice, bob, psi)
    if kind == "commuting":
        d = _require(obj, "dim", path, int)
        alice = _pvms_from_json(_require(obj, "alice", path), d, f"{path}/alice")
        bob = _pvms_from_json(_require(obj, "bob", path), d, f"{path}/bob")
        psi = _vector_from_json(_require(obj, "psi", path), f"{path}/psi")
        return CommutingStrategy(d, alice, bob, psi)
    raise SchemaError(f"{path}/kind", f"unknown strategy kind {kind!r}")


# -- files -----------------------------------------------------------------

def dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("/", f"invalid JSON in {path}: {exc}") from None


def save_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def read_matrix(path):
    return matrix_from_json(load_json(path))


def write_matrix(path, m):
    save_json(path, matrix_to_json(m))


def read_channel(path):
    return channel_from_json(load_json(path))


def write_channel(path, ch):
    save_json(path, channel_to_json(ch))


def read_factorization(path):
    return factorization_from_json(load_json(path))


def write_factorization(path, f):
    save_json(path, factorization_to_json(f))


def read_tuple(path):
    return tuple_from_json(load_json(path))


def write_tuple(path, t):
    save_json(path, tuple_to_json(t))


def read_table(path):
    return table_from_json(load_json(path))


def write_table(path, t):
    save_json(path, table_to_json(t))
