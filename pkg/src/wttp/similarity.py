"""Tour similarity: shared undirected edges and normalised inversion count.

Both measures accept ``Tour`` values or any two sequences that are
permutations of the same city labels; no rotation or reflection is applied.
"""

from __future__ import annotations

from collections.abc import Sequence

from .instance import Tour


def _orders(t1, t2, minimum: int) -> tuple[tuple, tuple]:
    o1 = t1.order if isinstance(t1, Tour) else tuple(t1)
    o2 = t2.order if isinstance(t2, Tour) else tuple(t2)
    if len(o1) != len(o2):
        raise ValueError(f"tours differ in length: {len(o1)} vs {len(o2)}")
    if len(o1) < minimum:
        raise ValueError(f"need at least {minimum} cities, got {len(o1)}")
    if len(set(o1)) != len(o1) or set(o1) != set(o2):
        raise ValueError("tours must be permutations of the same cities")
    return o1, o2


def _edges(o: tuple) -> set[tuple[int, int]]:
    return {(min(a, b), max(a, b)) for a, b in zip(o, o[1:] + o[:1])}


def common_edges(t1: Tour | Sequence[int], t2: Tour | Sequence[int]) -> float:
    """Fraction of the n closed-tour edges present in both tours."""
    o1, o2 = _orders(t1, t2, 3)
    return len(_edges(o1) & _edges(o2)) / len(o1)


def _merge_count(a: list[int]) -> int:
    """Sort ``a`` in place (bottom-up merge sort) and return its inversions."""
    n = len(a)
    buf = [0] * n
    src, dst = a, buf
    inv = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if src[i] <= src[j]:
                    dst[k] = src[i]
                    i += 1
                else:
                    dst[k] = src[j]
                    inv += mid - i
                    j += 1
                k += 1
            dst[k:k + mid - i] = src[i:mid]
            k += mid - i
            dst[k:k + hi - j] = src[j:hi]
        src, dst = dst, src
        width *= 2
    if src is not a:
        a[:] = src
    return inv


def count_inversions(t1: Tour | Sequence[int], t2: Tour | Sequence[int]) -> int:
    """Number of city pairs visited in opposite relative order by the two tours."""
    o1, o2 = _orders(t1, t2, 1)
    pos1 = {c: k for k, c in enumerate(o1)}
    # t2's visiting sequence expressed as positions in t1
    return _merge_count([pos1[c] for c in o2])


def inversion_similarity(t1: Tour | Sequence[int], t2: Tour | Sequence[int]) -> float:
    n = len(_orders(t1, t2, 2)[0])
    return 1.0 - 2.0 * count_inversions(t1, t2) / (n * (n - 1))
