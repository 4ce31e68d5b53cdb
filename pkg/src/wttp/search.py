"""(1+1)-EA over start-pinned permutations with a selectable driver objective.

Mutation positions are drawn in blocks from a PCG64 stream in numpy and
consumed by a numba kernel that mutates the incumbent in place, evaluates the
driver objective and undoes the moves on rejection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numba import njit

from .instance import Tour, TtpInstance
from .objectives import Evaluator, wtsp_kernel, wttp_kernel
from .packing import PackingPlan

BLOCK = 1 << 16


class Driver(str, Enum):
    WTSP = "WTSP"
    WTTP = "WTTP"

    @property
    def other(self) -> Driver:
        return Driver.WTTP if self is Driver.WTSP else Driver.WTSP


class Mutation(str, Enum):
    INVERSION = "inversion"
    SWAP = "swap"
    INSERTION = "insertion"


_MUT_CODE = {Mutation.INVERSION: 0, Mutation.SWAP: 1, Mutation.INSERTION: 2}


@dataclass(frozen=True)
class TrajectoryPoint:
    evaluation_index: int
    wtsp_value: float
    wttp_value: float


@dataclass
class RunResult:
    final_tour: Tour
    final_wtsp: float
    final_wttp: float
    trajectory: list[TrajectoryPoint]
    evaluations_used: int
    seed: int
    driver: Driver
    mutation: Mutation = Mutation.INVERSION
    extra: dict = field(default_factory=dict)


def default_budget(n: int) -> int:
    return 1_000_000 if n <= 300 else 5_000_000


# -- mutation primitives on 0-based arrays, positions 0-based -----------------


@njit(cache=True)
def _reverse(order, i, j):
    while i < j:
        t = order[i]
        order[i] = order[j]
        order[j] = t
        i += 1
        j -= 1


@njit(cache=True)
def _move(order, src, dst):
    c = order[src]
    if src < dst:
        for k in range(src, dst):
            order[k] = order[k + 1]
    else:
        for k in range(src, dst, -1):
            order[k] = order[k - 1]
    order[dst] = c


@njit(cache=True)
def _mutate(order, kind, a, b):
    if kind == 0:
        if a < b:
            _reverse(order, a, b)
        else:
            _reverse(order, b, a)
    elif kind == 1:
        t = order[a]
        order[a] = order[b]
        order[b] = t
    else:
        _move(order, a, b)


@njit(cache=True)
def _undo(order, kind, a, b):
    if kind == 2:
        _move(order, b, a)
    else:
        _mutate(order, kind, a, b)


def _draw_pairs(rng: np.random.Generator, n: int, size: int):
    """Ordered pairs of distinct positions in 1..n-1 (0-based), uniform."""
    a = rng.integers(1, n, size=size)
    b = rng.integers(1, n - 1, size=size)
    b += b >= a
    return a, b


def _check_n(tour: Tour):
    if tour.n < 3:
        raise ValueError(f"mutation needs n >= 3, got {tour.n}")


def invert(tour: Tour, i: int, j: int) -> Tour:
    """Reverse the segment between 1-based positions ``i < j`` (both >= 2)."""
    if not 2 <= i < j <= tour.n:
        raise ValueError(f"need 2 <= i < j <= n, got ({i}, {j})")
    o = list(tour.order)
    o[i - 1:j] = reversed(o[i - 1:j])
    return Tour(tuple(o))


def swap(tour: Tour, i: int, j: int) -> Tour:
    if not (2 <= i <= tour.n and 2 <= j <= tour.n and i != j):
        raise ValueError(f"need distinct positions in 2..n, got ({i}, {j})")
    o = list(tour.order)
    o[i - 1], o[j - 1] = o[j - 1], o[i - 1]
    return Tour(tuple(o))


def insert(tour: Tour, src: int, dst: int) -> Tour:
    """Remove the city at position ``src`` and reinsert it at position ``dst``."""
    if not (2 <= src <= tour.n and 2 <= dst <= tour.n and src != dst):
        raise ValueError(f"need distinct positions in 2..n, got ({src}, {dst})")
    o = list(tour.order)
    o.insert(dst - 1, o.pop(src - 1))
    return Tour(tuple(o))


def inversion_mutation(tour: Tour, rng: np.random.Generator) -> Tour:
    _check_n(tour)
    a, b = _draw_pairs(rng, tour.n, 1)
    return invert(tour, int(min(a[0], b[0])) + 1, int(max(a[0], b[0])) + 1)


def swap_mutation(tour: Tour, rng: np.random.Generator) -> Tour:
    _check_n(tour)
    a, b = _draw_pairs(rng, tour.n, 1)
    return swap(tour, int(a[0]) + 1, int(b[0]) + 1)


def insertion_mutation(tour: Tour, rng: np.random.Generator) -> Tour:
    _check_n(tour)
    a, b = _draw_pairs(rng, tour.n, 1)
    return insert(tour, int(a[0]) + 1, int(b[0]) + 1)


MUTATIONS = {
    Mutation.INVERSION: inversion_mutation,
    Mutation.SWAP: swap_mutation,
    Mutation.INSERTION: insertion_mutation,
}


# -- EA kernel -----------------------------------------------------------------

MOVE_SCHEMES = ("poisson", "single")


def draw_move_counts(rng: np.random.Generator, scheme: str, size: int) -> np.ndarray:
    if scheme == "single":
        return np.ones(size, dtype=np.int64)
    return 1 + rng.poisson(1.0, size=size)


@njit(cache=True)
def _value(order, driver, w, v_max, nu, dist, xy, ceil):
    if driver == 0:
        return wtsp_kernel(order, w, dist, xy, ceil)
    return wttp_kernel(order, w, v_max, nu, dist, xy, ceil)


@njit(cache=True)
def _ea_block(order, cur, moves, pos_a, pos_b, kind, driver, w, v_max, nu, dist, xy, ceil,
              first_eval, stride, log_idx, log_drv, log_cross, seen, validate):
    """Run one block of offspring evaluations; returns (incumbent value, #logged).

    Offspring ``k`` applies ``moves[k]`` elementary moves taken in sequence
    from ``pos_a`` / ``pos_b``; a rejected offspring is undone in reverse.
    """
    n = order.shape[0]
    other = 1 - driver
    logged = 0
    p = 0
    for k in range(moves.shape[0]):
        first = p
        for _ in range(moves[k]):
            _mutate(order, kind, pos_a[p], pos_b[p])
            p += 1
        val = _value(order, driver, w, v_max, nu, dist, xy, ceil)
        improved = val < cur
        if val <= cur:
            cur = val
            if validate:
                if order[0] != 0:
                    raise AssertionError("city 1 left position 1")
                seen[:] = False
                for c in order:
                    if c < 0 or c >= n or seen[c]:
                        raise AssertionError("incumbent is not a permutation")
                    seen[c] = True
        else:
            for q in range(p - 1, first - 1, -1):
                _undo(order, kind, pos_a[q], pos_b[q])
        e = first_eval + k
        if improved or e % stride == 0:
            log_idx[logged] = e
            log_drv[logged] = cur
            log_cross[logged] = _value(order, other, w, v_max, nu, dist, xy, ceil)
            logged += 1
    return cur, logged


def run_one_plus_one_ea(
    inst: TtpInstance,
    plan: PackingPlan,
    driver: Driver | str = Driver.WTSP,
    mutation: Mutation | str = Mutation.INVERSION,
    budget: int | None = None,
    seed: int = 0,
    log_stride: int = 1000,
    validate: bool = False,
    evaluator: Evaluator | None = None,
    moves: str = "poisson",
) -> RunResult:
    """Elitist (1+1)-EA; offspring replace the parent unless strictly worse.

    Each offspring applies ``1 + Poisson(1)`` elementary moves of the chosen
    mutation operator (``moves="poisson"``), or exactly one
    (``moves="single"``, i.e. randomised local search).

    ``budget`` counts driver evaluations including the initial random tour.
    The trajectory holds the initial tour, every strict improvement, every
    ``log_stride``-th evaluation and the final incumbent, each with both
    objective values.
    """
    driver, mutation = Driver(driver), Mutation(mutation)
    if budget is None:
        budget = default_budget(inst.n)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if log_stride < 1:
        raise ValueError("log_stride must be positive")
    if inst.n < 3:
        raise ValueError("the EA needs at least 3 cities")
    if moves not in MOVE_SCHEMES:
        raise ValueError(f"moves must be one of {MOVE_SCHEMES}")
    ev = evaluator or Evaluator(inst, plan)
    d_code = 0 if driver is Driver.WTSP else 1
    args = (ev.weights, ev.v_max, ev.nu, ev.dist, ev.xy, ev.ceil)

    rng = np.random.Generator(np.random.PCG64(seed))
    order = np.concatenate(([0], 1 + rng.permutation(inst.n - 1))).astype(np.int64)
    cur = _value(order, d_code, *args)
    traj_idx = [np.array([1])]
    traj_drv = [np.array([cur])]
    traj_cross = [np.array([_value(order, 1 - d_code, *args)])]

    seen = np.zeros(inst.n, dtype=np.bool_)
    done = 1
    while done < budget:
        size = min(BLOCK, budget - done)
        k = draw_move_counts(rng, moves, size)
        a, b = _draw_pairs(rng, inst.n, int(k.sum()))
        log_idx = np.empty(size, dtype=np.int64)
        log_drv = np.empty(size)
        log_cross = np.empty(size)
        cur, logged = _ea_block(order, cur, k, a, b, _MUT_CODE[mutation], d_code, *args,
                                done + 1, log_stride, log_idx, log_drv, log_cross, seen, validate)
        traj_idx.append(log_idx[:logged])
        traj_drv.append(log_drv[:logged])
        traj_cross.append(log_cross[:logged])
        done += size

    idx = np.concatenate(traj_idx)
    drv = np.concatenate(traj_drv)
    cross = np.concatenate(traj_cross)
    final_drv = cur
    final_cross = _value(order, 1 - d_code, *args)
    if idx[-1] != budget:
        idx = np.append(idx, budget)
        drv = np.append(drv, final_drv)
        cross = np.append(cross, final_cross)
    wtsp_vals, wttp_vals = (drv, cross) if driver is Driver.WTSP else (cross, drv)
    trajectory = [TrajectoryPoint(int(e), float(s), float(t)) for e, s, t in zip(idx, wtsp_vals, wttp_vals)]
    final_tour = Tour.from_array(order)
    return RunResult(
        final_tour=final_tour,
        final_wtsp=trajectory[-1].wtsp_value,
        final_wttp=trajectory[-1].wttp_value,
        trajectory=trajectory,
        evaluations_used=budget,
        seed=int(seed),
        driver=driver,
        mutation=mutation,
    )
