"""Lexicographic r-subset streams with combinadic rank/unrank.

The stream is restartable at an arbitrary rank, which is what lets work be
partitioned into contiguous, worker-count-independent chunks.
"""

from __future__ import annotations

from math import comb
from typing import Iterator


def count_subsets(n: int, r: int) -> int:
    return comb(n, r)


def rank_subset(n: int, subset: tuple[int, ...]) -> int:
    """Position of a sorted subset of {0..n-1} in lexicographic order."""
    r = len(subset)
    rank = 0
    prev = -1
    for i, c in enumerate(subset):
        # subsets whose element i lies in (prev, c) come earlier
        rank += comb(n - prev - 1, r - i) - comb(n - c, r - i)
        prev = c
    return rank


def unrank_subset(n: int, r: int, rank: int) -> tuple[int, ...]:
    """Inverse of rank_subset."""
    if not 0 <= rank < comb(n, r):
        raise ValueError(f"rank {rank} out of range for C({n},{r})")
    out = []
    x = 0
    for i in range(r):
        while True:
            cnt = comb(n - 1 - x, r - 1 - i)
            if rank < cnt:
                break
            rank -= cnt
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def next_subset(n: int, subset: tuple[int, ...]) -> tuple[int, ...] | None:
    """Lexicographic successor, or None past the last subset."""
    r = len(subset)
    c = list(subset)
    i = r - 1
    while i >= 0 and c[i] == n - r + i:
        i -= 1
    if i < 0:
        return None
    c[i] += 1
    for j in range(i + 1, r):
        c[j] = c[j - 1] + 1
    return tuple(c)


def enumerate_subsets(n: int, r: int, start_rank: int = 0) -> Iterator[tuple[int, ...]]:
    """Stream the r-subsets of {0..n-1} in lexicographic order.

    start_rank restarts the stream mid-way; the total count is C(n, r).
    """
    if not 0 < r < n:
        raise ValueError("need 0 < r < n")
    total = comb(n, r)
    if start_rank >= total:
        return
    cur: tuple[int, ...] | None = unrank_subset(n, r, start_rank)
    while cur is not None:
        yield cur
        cur = next_subset(n, cur)
