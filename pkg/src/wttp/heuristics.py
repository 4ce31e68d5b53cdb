"""Constructive reference tours: nearest neighbour and weighted greedy (WGR)."""

from __future__ import annotations

import numpy as np

from .instance import Tour, TtpInstance
from .packing import PackingPlan, node_weights


def _row(inst: TtpInstance, a: int, cand: np.ndarray) -> np.ndarray:
    dx = inst.xy[a, 0] - inst.xy[cand, 0]
    dy = inst.xy[a, 1] - inst.xy[cand, 1]
    r = np.sqrt(dx * dx + dy * dy)
    return np.ceil(r) if inst.ceil else np.floor(r + 0.5)


def _nn_chain(inst: TtpInstance, start: int, pool: list[int]) -> list[int]:
    """Visit every city of ``pool`` greedily from ``start`` (0-based).

    Ties on distance go to the smallest city index.
    """
    cand = np.array(sorted(pool), dtype=np.int64)
    done = np.zeros(len(cand), dtype=bool)
    out = []
    cur = start
    for _ in range(len(cand)):
        d = _row(inst, cur, cand)
        d[done] = np.inf
        k = int(np.argmin(d))  # first minimum, i.e. smallest index
        done[k] = True
        cur = int(cand[k])
        out.append(cur)
    return out


def nearest_neighbor_tour(inst: TtpInstance, start: int = 1) -> Tour:
    if not 1 <= start <= inst.n:
        raise IndexError(f"start city {start} out of range 1..{inst.n}")
    s = start - 1
    chain = [s] + _nn_chain(inst, s, [c for c in range(inst.n) if c != s])
    return Tour.rotated([c + 1 for c in chain])


def weighted_greedy_tour(inst: TtpInstance, plan: PackingPlan) -> Tour:
    """City 1 first, then cities in ascending node weight.

    Cities of equal weight form a class that is toured by nearest-neighbour
    chaining from the last city visited before it.
    """
    w = node_weights(inst, plan).weights
    rest = np.arange(1, inst.n)
    classes: dict[float, list[int]] = {}
    for c in rest:
        classes.setdefault(float(w[c]), []).append(int(c))
    order = [0]
    for weight in sorted(classes):
        order += _nn_chain(inst, order[-1], classes[weight])
    return Tour.from_array(order)
