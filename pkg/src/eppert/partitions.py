"""Catalog of EP degeneracy classes: partitions of K with every part >= 2."""

from dataclasses import dataclass
from functools import lru_cache

from .jordan import PartitionSpec

K_MAX = 200
MAX_ENTRIES = 1_000_000  # materialized catalogs only; counts go to K_MAX


def _check_K(K):
    if not isinstance(K, int) or isinstance(K, bool):
        raise TypeError("K must be an integer")
    if K < 2 or K > K_MAX:
        raise ValueError(f"K must lie in [2, {K_MAX}], got {K}")


@dataclass(frozen=True)
class PartitionCatalog:
    K: int
    entries: tuple
    n_nontrivial: int

    def to_json(self) -> dict:
        return {"K": self.K, "partitions": [list(p.parts) for p in self.entries],
                "nontrivial": self.n_nontrivial}


def _descending(n, largest, smallest):
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), smallest - 1, -1):
        for rest in _descending(n - first, first, smallest):
            yield (first,) + rest


def enumerate_ep_partitions(K: int) -> PartitionCatalog:
    """All partitions of K into non-increasing parts >= 2, in lexicographically
    decreasing order; the single-block entry (K) comes first."""
    _check_K(K)
    total = _count_descending(K, K, 2)
    if total > MAX_ENTRIES:
        raise ValueError(f"catalog for K={K} has {total} entries; "
                         f"use count_nontrivial for K this large")
    entries = tuple(PartitionSpec(p) for p in _descending(K, K, 2))
    return PartitionCatalog(K, entries, sum(1 for p in entries if p.L >= 2))


@lru_cache(maxsize=None)
def _count_descending(n, largest, smallest):
    """Number of items _descending(n, largest, smallest) would yield."""
    if n == 0:
        return 1
    return sum(_count_descending(n - first, first, smallest)
               for first in range(min(n, largest), smallest - 1, -1))


def count_nontrivial(K: int) -> int:
    """Number of eligible partitions with L >= 2 (all but the block (K))."""
    _check_K(K)
    return _count_descending(K, K, 2) - 1


@lru_cache(maxsize=None)
def _partition_numbers(n):
    # Euler's pentagonal-number recurrence
    p = [1] + [0] * n
    for m in range(1, n + 1):
        k, total = 1, 0
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = k * (3 * k + 1) // 2
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return tuple(p)


def partition_number(n: int) -> int:
    if n < 0:
        return 0
    return _partition_numbers(max(n, 1))[n]


def count_oracle(K: int) -> int:
    """p(K) - p(K-1) - 1: partitions with no part equal to 1, minus the
    single-block one."""
    _check_K(K)
    return partition_number(K) - partition_number(K - 1) - 1
