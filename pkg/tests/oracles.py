"""Definition-literal reference evaluators.

Deliberately naive and independent of the package internals: distances via
math.dist, node weights by scanning the item list, objectives by the written
formulas with explicit inner sums.
"""

import itertools
import math


def dist(inst, i, j):
    """1-based TSPlib distance."""
    a, b = inst.coords[i - 1], inst.coords[j - 1]
    r = math.dist((a.x, a.y), (b.x, b.y))
    return math.ceil(r) if inst.edge_weight_type == "CEIL_2D" else math.floor(r + 0.5)


def city_weights(inst, bits):
    """{city: total weight of packed items stationed there}."""
    return {c: sum(it.weight * bits[it.id - 1] for it in inst.items if it.city == c)
            for c in range(1, inst.n + 1)}


def tsp(inst, order):
    n = len(order)
    return dist(inst, order[-1], order[0]) + sum(dist(inst, order[i], order[i + 1]) for i in range(n - 1))


def wtsp(inst, cw, order):
    n = len(order)
    w = [cw[c] for c in order]
    total = dist(inst, order[-1], order[0]) * sum(w[j] for j in range(n))
    for i in range(n - 1):
        total += dist(inst, order[i], order[i + 1]) * sum(w[j] for j in range(i + 1))
    return total


def wttp(inst, cw, order):
    n = len(order)
    capacity = sum(it.weight for it in inst.items)
    nu = (inst.v_max - inst.v_min) / capacity
    w = [cw[c] for c in order]
    total = dist(inst, order[-1], order[0]) / (inst.v_max - nu * sum(w))
    for i in range(n - 1):
        total += dist(inst, order[i], order[i + 1]) / (inst.v_max - nu * sum(w[: i + 1]))
    return total


def ttp(inst, bits, cw, order):
    profit = sum(it.profit for it in inst.items if bits[it.id - 1])
    return profit - inst.renting_rate * wttp(inst, cw, order)


def all_tours(n):
    for rest in itertools.permutations(range(2, n + 1)):
        yield (1,) + rest


def inversions(o1, o2):
    pos1 = {c: k for k, c in enumerate(o1)}
    pos2 = {c: k for k, c in enumerate(o2)}
    count = 0
    for a, b in itertools.combinations(o1, 2):
        if (pos1[a] < pos1[b]) != (pos2[a] < pos2[b]):
            count += 1
    return count


def nearest_neighbor(inst, start):
    """Greedy NN from ``start``; ties to the smallest index; rotated to city 1."""
    seq = [start]
    left = set(range(1, inst.n + 1)) - {start}
    while left:
        cur = seq[-1]
        nxt = min(left, key=lambda c: (dist(inst, cur, c), c))
        seq.append(nxt)
        left.remove(nxt)
    k = seq.index(1)
    return tuple(seq[k:] + seq[:k])
