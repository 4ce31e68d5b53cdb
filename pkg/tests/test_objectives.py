import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from wttp.instance import Coord, Item, Tour, TtpInstance
from wttp.objectives import (
    Evaluator,
    prefix_weights,
    tsp_length,
    ttp_objective,
    wtsp_objective,
    wttp_objective,
)
from wttp.packing import PackingPlan
from wttp import instance as instance_mod

from conftest import random_instance, random_plan, triangle

REL = 1e-9

ALL = PackingPlan([1, 1])


def test_triangle_tsp_length_is_tour_independent():
    inst = triangle()
    for order in [(1, 2, 3), (1, 3, 2)]:
        assert tsp_length(inst, Tour(order)) == 4


def test_two_cities():
    inst = TtpInstance("two", (Coord(0, 0), Coord(3, 4)), (Item(1, 1, 1, 2),), 1, 0.1, 1, 0)
    assert tsp_length(inst, Tour((1, 2))) == 10


def test_tsp_minimum_matches_exhaustive():
    inst = random_instance(np.random.default_rng(8), 8)
    ev = Evaluator(inst, PackingPlan(np.zeros(inst.m)))
    ours = min(ev.tsp(np.array(t) - 1) for t in oracles.all_tours(8))
    assert ours == min(oracles.tsp(inst, t) for t in oracles.all_tours(8))


def test_prefix_weights():
    inst = triangle(weights=(0.0, 1.0, 2.0))
    assert prefix_weights(inst, ALL, Tour((1, 2, 3))).omega.tolist() == [0, 1, 3]
    assert prefix_weights(inst, PackingPlan([0, 0]), Tour((1, 3, 2))).omega.tolist() == [0, 0, 0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_prefix_total_is_order_invariant(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 9)
    plan = random_plan(rng, inst)
    ev = Evaluator(inst, plan)
    omega = [ev.prefix(np.concatenate(([0], 1 + rng.permutation(8))))[-1] for _ in range(5)]
    assert len(set(omega)) == 1 and omega[0] == pytest.approx(ev.total_weight, rel=REL)
    assert np.all(np.diff(ev.prefix(np.arange(9))) >= 0)


def test_wtsp_zero_weights():
    inst = triangle()
    assert wtsp_objective(inst, PackingPlan([0, 0]), Tour((1, 3, 2))) == 0


def test_wtsp_first_city_unit_weight_is_tsp():
    inst = random_instance(np.random.default_rng(0), 10)
    inst = TtpInstance(inst.name, inst.coords, inst.items + (Item(inst.m + 1, 1.0, 1.0, 1),), 1, 0.1, 1.0, 0.0)
    bits = np.zeros(inst.m)
    bits[-1] = 1
    tour = Tour((1, 5, 3, 2, 4, 6, 8, 7, 10, 9))
    assert wtsp_objective(inst, PackingPlan(bits), tour) == tsp_length(inst, tour)


def test_wtsp_triangle():
    inst = triangle(weights=(0.0, 1.0, 2.0))
    values = {t: wtsp_objective(inst, ALL, Tour(t)) for t in oracles.all_tours(3)}
    assert values == {(1, 2, 3): 7, (1, 3, 2): 5}
    cw = oracles.city_weights(inst, [1, 1])
    assert values == {t: oracles.wtsp(inst, cw, t) for t in oracles.all_tours(3)}


def test_wttp_triangle():
    inst = triangle(weights=(0.0, 1.0, 1.0), profits=(4, 6), v_min=1.0, v_max=2.0, renting_rate=1.0)
    tour = Tour((1, 2, 3))
    expected = Fraction(1, 2) + Fraction(2, 3) + 2
    assert expected == Fraction(19, 6)
    assert wttp_objective(inst, ALL, tour) == pytest.approx(19 / 6, rel=1e-15)
    cw = oracles.city_weights(inst, [1, 1])
    for t in oracles.all_tours(3):
        assert wttp_objective(inst, ALL, Tour(t)) == pytest.approx(oracles.wttp(inst, cw, t), rel=1e-12)
    assert ttp_objective(inst, ALL, tour) == pytest.approx(41 / 6, rel=1e-12)


def test_wttp_empty_plan_is_tsp_at_max_speed():
    inst = random_instance(np.random.default_rng(1), 12, v_max=1.7)
    tour = Tour.from_array(np.concatenate(([0], 1 + np.random.default_rng(2).permutation(11))))
    empty = PackingPlan(np.zeros(inst.m))
    assert wttp_objective(inst, empty, tour) == pytest.approx(tsp_length(inst, tour) / 1.7, rel=REL)
    assert ttp_objective(inst, empty, tour) == pytest.approx(-inst.renting_rate * tsp_length(inst, tour) / 1.7, rel=REL)


def test_full_load_last_leg_at_min_speed():
    inst = random_instance(np.random.default_rng(3), 7)
    ev = Evaluator(inst, PackingPlan(np.ones(inst.m)))
    order = np.arange(7)
    costs = ev.leg_costs(order)
    d_close = inst.distance_matrix()[6, 0]
    assert ev.v_max - ev.nu * ev.prefix(order)[-1] == pytest.approx(inst.v_min, rel=1e-12)
    assert costs[-1] == pytest.approx(d_close / inst.v_min, rel=1e-12)


def test_ttp_without_rent_is_profit():
    inst = random_instance(np.random.default_rng(4), 6)
    inst = TtpInstance(inst.name, inst.coords, inst.items, inst.capacity_file, 0.1, 1.0, 0.0)
    plan = random_plan(np.random.default_rng(5), inst, 0.5)
    profit = sum(it.profit for it in inst.items if plan.bits[it.id - 1])
    assert {ttp_objective(inst, plan, Tour(t)) for t in oracles.all_tours(6)} == {profit}


def test_capacity_violation_detected():
    inst = triangle(weights=(0.0, 1.0, 1.0))
    with pytest.raises(ValueError, match="capacity"):
        Evaluator(inst, ALL, capacity=1.0)


@pytest.mark.parametrize("ewt", ["CEIL_2D", "EUC_2D"])
def test_brute_force_equivalence(ewt):
    rng = np.random.default_rng(21)
    for n in (5, 6, 7):
        inst = random_instance(rng, n, m=int(rng.integers(1, 17)), ewt=ewt)
        plan = random_plan(rng, inst)
        ev = Evaluator(inst, plan)
        cw = oracles.city_weights(inst, plan.bits)
        for t in oracles.all_tours(n):
            o = np.array(t) - 1
            assert ev.tsp(o) == pytest.approx(oracles.tsp(inst, t), rel=1e-12)
            assert ev.wtsp(o) == pytest.approx(oracles.wtsp(inst, cw, t), rel=1e-12)
            assert ev.wttp(o) == pytest.approx(oracles.wttp(inst, cw, t), rel=1e-12)
            assert ev.ttp(o) == pytest.approx(oracles.ttp(inst, plan.bits, cw, t), rel=1e-12)


def test_matrix_free_path_agrees(monkeypatch):
    inst = random_instance(np.random.default_rng(9), 40)
    plan = random_plan(np.random.default_rng(10), inst)
    tour = Tour.from_array(np.concatenate(([0], 1 + np.random.default_rng(11).permutation(39))))
    with_matrix = (tsp_length(inst, tour), wtsp_objective(inst, plan, tour), wttp_objective(inst, plan, tour))
    monkeypatch.setattr(instance_mod, "MATRIX_LIMIT", 10)
    assert inst.distance_matrix() is None
    without = (tsp_length(inst, tour), wtsp_objective(inst, plan, tour), wttp_objective(inst, plan, tour))
    assert with_matrix == without


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_wttp_leg_bounds(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 15, v_min=float(rng.uniform(0.05, 0.5)), v_max=float(rng.uniform(0.6, 3)))
    ev = Evaluator(inst, random_plan(rng, inst))
    order = np.concatenate(([0], 1 + rng.permutation(14)))
    d = np.array([inst.distance_matrix()[a, b] for a, b in zip(order, np.roll(order, -1))])
    costs = ev.leg_costs(order)
    assert np.all(costs >= d / inst.v_max * (1 - 1e-12))
    assert np.all(costs <= d / inst.v_min * (1 + 1e-12))
    total = ev.wttp(order)
    assert d.sum() / inst.v_max * (1 - 1e-12) <= total <= d.sum() / inst.v_min * (1 + 1e-12)
    assert total == pytest.approx(costs.sum(), rel=REL)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100))
def test_wtsp_scale_covariance(seed, c):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 10)
    plan = random_plan(rng, inst)
    scaled = TtpInstance(inst.name, inst.coords,
                         tuple(Item(it.id, it.profit, it.weight * c, it.city) for it in inst.items),
                         inst.capacity_file * c, inst.v_min, inst.v_max, inst.renting_rate)
    tour = Tour.from_array(np.concatenate(([0], 1 + rng.permutation(9))))
    assert wtsp_objective(scaled, plan, tour) == pytest.approx(c * wtsp_objective(inst, plan, tour), rel=REL)


def test_ranking_invariance():
    rng = np.random.default_rng(31)
    inst = random_instance(rng, 30, v_min=0.1, v_max=1.0)
    ev = Evaluator(inst, random_plan(rng, inst, 0.6))
    tours = [np.concatenate(([0], 1 + rng.permutation(29))) for _ in range(100)]
    ttp = np.array([ev.ttp(t) for t in tours])
    wttp = np.array([ev.wttp(t) for t in tours])
    assert np.array_equal(np.argsort(-ttp, kind="stable"), np.argsort(wttp, kind="stable"))
    assert math.isfinite(ttp.sum())
