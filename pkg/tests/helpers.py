import numpy as np


def random_kraus(rng, n, d):
    """d random operators scaled to a trace-preserving family."""
    ops = rng.standard_normal((d, n, n)) + 1j * rng.standard_normal((d, n, n))
    s = np.einsum("rba,rbc->ac", ops.conj(), ops)
    w, v = np.linalg.eigh(s)
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.conj().T
    return ops @ inv_sqrt


def random_factorization(rng, n, max_blocks=3, max_k=3):
    from fractions import Fraction

    import oracles
    from factorizable import FiniteAncillaSpec, FiniteFactorization

    m = int(rng.integers(1, max_blocks + 1))
    blocks = tuple(int(k) for k in rng.integers(1, max_k + 1, size=m))
    raw = rng.integers(1, 6, size=m)
    weights = tuple(Fraction(int(r), int(raw.sum())) for r in raw)
    us = tuple(oracles.haar(n * k, rng) for k in blocks)
    return FiniteFactorization(n, FiniteAncillaSpec(blocks, weights), us)
