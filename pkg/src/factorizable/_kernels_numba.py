"""Compiled twins of ``_kernels_numpy``."""

import numpy as np
from numba import njit

from . import _kernels_numpy


@njit(cache=True)
def kraus_apply(kraus, x):
    d, n, _ = kraus.shape
    out = np.zeros((n, n), dtype=np.complex128)
    tmp = np.zeros((n, n), dtype=np.complex128)
    for r in range(d):
        for i in range(n):
            for j in range(n):
                acc = 0j
                for l in range(n):
                    acc += kraus[r, i, l] * x[l, j]
                tmp[i, j] = acc
        for i in range(n):
            for j in range(n):
                acc = 0j
                for l in range(n):
                    acc += tmp[i, l] * np.conj(kraus[r, j, l])
                out[i, j] += acc
    return out


@njit(cache=True)
def kraus_choi(kraus):
    # a single BLAS product beats hand loops once d * n^2 grows past ~30
    d, n, _ = kraus.shape
    vecs = np.ascontiguousarray(kraus).reshape(d, n * n)
    return np.ascontiguousarray(vecs.T) @ np.conj(vecs)


@njit(cache=True)
def vertex_tables(n, k):
    m = k ** n
    cols = n * n * k * k
    out = np.zeros((m * m, cols))
    fa = np.empty(n, dtype=np.int64)
    fb = np.empty(n, dtype=np.int64)
    for ia in range(m):
        v = ia
        for x in range(n):
            fa[x] = v % k
            v //= k
        for ib in range(m):
            v = ib
            for y in range(n):
                fb[y] = v % k
                v //= k
            row = ia * m + ib
            for x in range(n):
                for y in range(n):
                    out[row, ((x * n + y) * k + fa[x]) * k + fb[y]] = 1.0
    return out


nnls = njit(cache=True)(_kernels_numpy.nnls)


@njit(cache=True)
def qubit_table(params, product):
    psi = np.empty(4, dtype=np.complex128)
    if product:
        a0 = params[4] + 1j * params[6]
        a1 = params[5] + 1j * params[7]
        b0 = params[8] + 1j * params[10]
        b1 = params[9] + 1j * params[11]
        psi[0] = a0 * b0
        psi[1] = a0 * b1
        psi[2] = a1 * b0
        psi[3] = a1 * b1
    else:
        for i in range(4):
            psi[i] = params[4 + i] + 1j * params[8 + i]
    norm2 = 0.0
    for i in range(4):
        norm2 += psi[i].real ** 2 + psi[i].imag ** 2
    # amplitude of psi along |e_a(theta)> (x) |e_b(phi)>, real-plane bases
    table = np.empty((2, 2, 2, 2))
    for x in range(2):
        ca, sa = np.cos(params[x]), np.sin(params[x])
        va = ((ca, sa), (-sa, ca))
        for y in range(2):
            cb, sb = np.cos(params[2 + y]), np.sin(params[2 + y])
            vb = ((cb, sb), (-sb, cb))
            for a in range(2):
                for b in range(2):
                    amp = 0j
                    for i in range(2):
                        for j in range(2):
                            amp += va[a][i] * vb[b][j] * psi[2 * i + j]
                    table[x, y, a, b] = (amp.real ** 2 + amp.imag ** 2) / norm2
    return table


@njit(cache=True)
def qubit_bell_value(params, coeffs, product):
    return np.sum(coeffs * qubit_table(params, product))
