"""Tour length, W-TSP, W-TTP and TTP evaluation.

The kernels take 0-based city arrays and either a distance matrix or, for
instances above the matrix limit, an empty matrix plus coordinates from which
distances are computed on the fly. Both paths use the same float operations,
so they agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .instance import Tour, TtpInstance
from .packing import PackingPlan, effective_capacity, node_weights

_NO_MATRIX = np.zeros((0, 0))


@njit(cache=True, inline="always")
def leg(dist, xy, ceil, a, b):
    if dist.shape[0] > 0:
        return dist[a, b]
    dx = xy[a, 0] - xy[b, 0]
    dy = xy[a, 1] - xy[b, 1]
    r = np.sqrt(dx * dx + dy * dy)
    if ceil:
        return np.ceil(r)
    return np.floor(r + 0.5)


@njit(cache=True)
def tsp_kernel(order, dist, xy, ceil):
    n = order.shape[0]
    total = 0.0
    for i in range(n - 1):
        total += leg(dist, xy, ceil, order[i], order[i + 1])
    return total + leg(dist, xy, ceil, order[n - 1], order[0])


@njit(cache=True)
def wtsp_kernel(order, w, dist, xy, ceil):
    n = order.shape[0]
    omega = 0.0
    total = 0.0
    for i in range(n - 1):
        omega += w[order[i]]
        total += leg(dist, xy, ceil, order[i], order[i + 1]) * omega
    omega += w[order[n - 1]]
    return total + leg(dist, xy, ceil, order[n - 1], order[0]) * omega


@njit(cache=True)
def wttp_kernel(order, w, v_max, nu, dist, xy, ceil):
    n = order.shape[0]
    omega = 0.0
    total = 0.0
    for i in range(n - 1):
        omega += w[order[i]]
        total += leg(dist, xy, ceil, order[i], order[i + 1]) / (v_max - nu * omega)
    omega += w[order[n - 1]]
    return total + leg(dist, xy, ceil, order[n - 1], order[0]) / (v_max - nu * omega)


def _geometry(inst: TtpInstance):
    dist = inst.distance_matrix()
    return (_NO_MATRIX if dist is None else dist), inst.xy, inst.ceil


@dataclass(frozen=True)
class PrefixWeights:
    omega: np.ndarray


class Evaluator:
    """Evaluation context for one (instance, packing plan) pair.

    Holds node weights, the speed slope ``nu = (v_max - v_min) / C`` and the
    distance data so repeated evaluations do no setup work. ``capacity``
    defaults to the sum of all item weights.
    """

    def __init__(self, inst: TtpInstance, plan: PackingPlan, capacity: float | None = None):
        self.inst = inst
        self.plan = plan
        nw = node_weights(inst, plan)
        self.weights = nw.weights
        self.counts = nw.counts
        self.capacity = effective_capacity(inst) if capacity is None else float(capacity)
        self.nu = (inst.v_max - inst.v_min) / self.capacity
        self.v_max = inst.v_max
        self.total_weight = float(self.weights.sum())
        on = plan.bits.astype(bool)
        self.profit = float(inst.item_profits[on].sum())
        self.dist, self.xy, self.ceil = _geometry(inst)
        if self.v_max - self.nu * self.total_weight <= 0:
            raise ValueError(
                f"packed weight {self.total_weight} drives speed to "
                f"{self.v_max - self.nu * self.total_weight}; capacity violated"
            )

    def tsp(self, order: np.ndarray) -> float:
        return tsp_kernel(order, self.dist, self.xy, self.ceil)

    def wtsp(self, order: np.ndarray) -> float:
        return wtsp_kernel(order, self.weights, self.dist, self.xy, self.ceil)

    def wttp(self, order: np.ndarray) -> float:
        return wttp_kernel(order, self.weights, self.v_max, self.nu, self.dist, self.xy, self.ceil)

    def ttp(self, order: np.ndarray) -> float:
        return self.profit - self.inst.renting_rate * self.wttp(order)

    def prefix(self, order: np.ndarray) -> np.ndarray:
        return np.cumsum(self.weights[order])

    def leg_costs(self, order: np.ndarray) -> np.ndarray:
        """Per-leg W-TTP travel times, closing leg last."""
        nxt = np.roll(order, -1)
        d = np.array([leg(self.dist, self.xy, self.ceil, a, b) for a, b in zip(order, nxt)])
        return d / (self.v_max - self.nu * self.prefix(order))


def _order(tour) -> np.ndarray:
    return tour.array() if isinstance(tour, Tour) else np.asarray(tour, dtype=np.int64)


def tsp_length(inst: TtpInstance, tour: Tour) -> float:
    return tsp_kernel(_order(tour), *_geometry(inst))


def prefix_weights(inst: TtpInstance, plan: PackingPlan, tour: Tour) -> PrefixWeights:
    return PrefixWeights(Evaluator(inst, plan).prefix(_order(tour)))


def wtsp_objective(inst: TtpInstance, plan: PackingPlan, tour: Tour) -> float:
    return Evaluator(inst, plan).wtsp(_order(tour))


def wttp_objective(inst: TtpInstance, plan: PackingPlan, tour: Tour) -> float:
    return Evaluator(inst, plan).wttp(_order(tour))


def ttp_objective(inst: TtpInstance, plan: PackingPlan, tour: Tour) -> float:
    return Evaluator(inst, plan).ttp(_order(tour))
