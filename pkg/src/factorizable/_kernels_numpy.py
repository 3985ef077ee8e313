"""Pure-numpy implementations of the hot kernels.

Each function here has a compiled twin in ``_kernels_numba`` with the same
signature; ``_kernels`` picks one of the two at import time.
"""

import numpy as np


def kraus_apply(kraus, x):
    return np.einsum("rab,bc,rdc->ad", kraus, x, kraus.conj())


def kraus_choi(kraus):
    # vec(v) row-major puts the output index first, matching Phi(e_ij) (x) e_ij
    d, n, _ = kraus.shape
    vecs = kraus.reshape(d, n * n)
    return vecs.T @ vecs.conj()


def vertex_tables(n, k):
    """All deterministic correlation tables, one per row.

    Row ``ia * k**n + ib`` is the table of Alice's response function with
    base-k digits ``ia`` (question x reads digit x, least significant first)
    and Bob's with digits ``ib``. Columns flatten ``p[x, y, a, b]``.
    """
    m = k ** n
    digits = (np.arange(m)[:, None] // (k ** np.arange(n))[None, :]) % k
    onehot = (digits[:, :, None] == np.arange(k)[None, None, :]).astype(np.float64)
    # onehot[i, x, a] = [f_i(x) == a]
    full = np.einsum("ixa,jyb->ijxyab", onehot, onehot)
    return full.reshape(m * m, n * n * k * k)


def nnls(a, b, max_iter):
    """Lawson-Hanson active-set solve of min ||a w - b||, w >= 0.

    Written in the numpy subset numba understands so that the compiled path
    can jit this exact source.
    """
    m, nvar = a.shape
    w = np.zeros(nvar)
    passive = np.zeros(nvar, dtype=np.bool_)
    eps = 2.220446049250313e-16
    scale = 0.0
    for j in range(nvar):
        colsum = 0.0
        for i in range(m):
            colsum += abs(a[i, j])
        if colsum > scale:
            scale = colsum
    tol = 10.0 * eps * scale * max(m, nvar)
    resid = b - a @ w
    grad = a.T @ resid
    it = 0
    while it < max_iter:
        best = -1
        best_val = tol
        for j in range(nvar):
            if not passive[j] and grad[j] > best_val:
                best_val = grad[j]
                best = j
        if best < 0:
            break
        passive[best] = True
        while it < max_iter:
            it += 1
            idx = np.nonzero(passive)[0]
            sub = np.ascontiguousarray(a[:, idx])
            sol = np.linalg.lstsq(sub, b, -1.0)[0]
            if sol.min() > 0.0:
                for t in range(idx.shape[0]):
                    w[idx[t]] = sol[t]
                break
            alpha = 1.0
            for t in range(idx.shape[0]):
                if sol[t] <= 0.0:
                    wi = w[idx[t]]
                    cand = wi / (wi - sol[t])
                    if cand < alpha:
                        alpha = cand
            for t in range(idx.shape[0]):
                j = idx[t]
                w[j] = w[j] + alpha * (sol[t] - w[j])
                if w[j] <= tol:
                    w[j] = 0.0
                    passive[j] = False
        resid = b - a @ w
        grad = a.T @ resid
    return w


def _angle_vectors(thetas):
    """Rows (cos t, sin t) and (-sin t, cos t) for each angle; shape (m, 2, 2)."""
    c, s = np.cos(thetas), np.sin(thetas)
    return np.stack([np.stack([c, s], axis=-1), np.stack([-s, c], axis=-1)], axis=1)


def qubit_table(params, product):
    """Correlation table (2, 2, 2, 2) of a two-qubit real-plane strategy.

    ``params[:4]`` are Alice's and Bob's projector angles (x = 0, 1 each);
    the remainder encodes the state: 8 reals for a general vector, or
    4 + 4 reals for a product of two single-qubit vectors. Projectors are
    rank one, so p(a, b|x, y) = |<e_a^x (x) f_b^y, psi>|^2.
    """
    if product:
        pa = params[4:6] + 1j * params[6:8]
        pb = params[8:10] + 1j * params[10:12]
        psi = np.kron(pa, pb)
    else:
        psi = params[4:8] + 1j * params[8:12]
    psi = (psi / np.linalg.norm(psi)).reshape(2, 2)
    alice = _angle_vectors(params[0:2])
    bob = _angle_vectors(params[2:4])
    # amp[x, y] = alice[x] @ psi @ bob[y]^T
    amp = np.matmul((alice @ psi)[:, None], bob.transpose(0, 2, 1)[None])
    return amp.real ** 2 + amp.imag ** 2


def qubit_bell_value(params, coeffs, product):
    return float(np.sum(coeffs * qubit_table(params, product)))
