"""Floating-point fast path for the root-of-unity sum.

Two interchangeable chunk kernels over complex128: a numba @njit loop and a
vectorized pure-numpy fallback.  Selection: the environment flag
TRIQUOT_NO_NUMBA=1 forces the numpy path; a missing numba falls back
automatically.  Chunk partial sums are reduced in chunk order, so the result
is independent of how the chunks are produced.

The float path mirrors the exact summand exactly:
    summand(I) = table[c_i, c_j] product over pairs, raised to wexp,
                 times zeta^(E * sum of root exponents over I)
with the rational scale (global sign, n^(r(g-1))) applied by the caller.
"""

from __future__ import annotations

import os

import numpy as np

from .subsets import count_subsets, next_subset, unrank_subset

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap if not (args and callable(args[0])) else args[0]


CHUNK = 4096


def use_numba() -> bool:
    return HAS_NUMBA and not os.environ.get("TRIQUOT_NO_NUMBA")


@njit(cache=True)
def _chunk_numba(comb0, count, n, r, exps, E, m, zpow, table, wexp):  # pragma: no cover - jitted
    c = comb0.copy()
    acc = 0.0 + 0.0j
    for _ in range(count):
        s = 0
        for i in range(r):
            s += exps[c[i]]
        prod = 1.0 + 0.0j
        for i in range(r):
            for j in range(i + 1, r):
                prod *= table[c[i], c[j]]
        acc += prod ** wexp * zpow[(E * s) % m]
        # lexicographic successor
        i = r - 1
        while i >= 0 and c[i] == n - r + i:
            i -= 1
        if i < 0:
            break
        c[i] += 1
        for j in range(i + 1, r):
            c[j] = c[j - 1] + 1
    return acc


def _chunk_numpy(comb0, count, n, r, exps, E, m, zpow, table, wexp):
    rows = []
    cur: tuple[int, ...] | None = tuple(int(x) for x in comb0)
    for _ in range(count):
        if cur is None:
            break
        rows.append(cur)
        cur = next_subset(n, cur)
    idx = np.array(rows, dtype=np.int64)
    prod = np.ones(len(idx), dtype=np.complex128)
    for i in range(r):
        for j in range(i + 1, r):
            prod *= table[idx[:, i], idx[:, j]]
    s = exps[idx].sum(axis=1)
    phases = zpow[(E * s) % m]
    return np.sum(prod ** wexp * phases)


def vi_sum_float(n, r, exps, E, m, wexp, invert_pairs):
    """Complex total of the root-of-unity sum, scale left to the caller.

    exps: per-root exponent of zeta_m; table entries are
    (lam_a - lam_b)^(+-2) per invert_pairs; wexp = |g - 1|.
    """
    exps_arr = np.asarray(exps, dtype=np.int64)
    zpow = np.exp(2j * np.pi * np.arange(m) / m)
    lam = zpow[exps_arr % m]
    diff = lam[:, None] - lam[None, :]
    np.fill_diagonal(diff, 1.0)
    table = diff ** 2
    if invert_pairs:
        table = 1.0 / table
    total_ranks = count_subsets(n, r)
    kernel = _chunk_numba if use_numba() else _chunk_numpy
    acc = 0.0 + 0.0j
    lo = 0
    while lo < total_ranks:
        count = min(CHUNK, total_ranks - lo)
        comb0 = np.asarray(unrank_subset(n, r, lo), dtype=np.int64)
        acc += kernel(comb0, count, n, r, exps_arr, E, m, zpow, table, wexp)
        lo += count
    return complex(acc)
