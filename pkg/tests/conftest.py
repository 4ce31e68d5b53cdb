import numpy as np
import pytest

from wttp.instance import Coord, Item, TtpInstance
from wttp.packing import PackingPlan


def random_instance(rng, n, m=None, ewt="CEIL_2D", v_min=0.1, v_max=1.0, span=100):
    """Integer-coordinate instance with items scattered over cities 2..n."""
    if m is None:
        m = int(rng.integers(1, 2 * n + 1))
    coords = tuple(Coord(float(x), float(y)) for x, y in rng.integers(0, span, size=(n, 2)))
    items = tuple(
        Item(k + 1, float(rng.integers(1, 100)), float(rng.integers(1, 50)), int(rng.integers(2, n + 1)))
        for k in range(m)
    )
    return TtpInstance(
        name=f"rand{n}",
        coords=coords,
        items=items,
        capacity_file=float(sum(it.weight for it in items)),
        v_min=v_min,
        v_max=v_max,
        renting_rate=float(rng.uniform(0, 3)),
        edge_weight_type=ewt,
    )


def random_plan(rng, inst, p=None):
    if p is None:
        p = rng.uniform()
    return PackingPlan(rng.random(inst.m) < p)


def triangle(weights=(0.0, 1.0, 2.0), profits=None, v_min=1.0, v_max=2.0, renting_rate=1.0):
    """Cities with d(1,2)=d(2,3)=1, d(1,3)=2 (collinear), one item per weighted city."""
    coords = (Coord(0, 0), Coord(1, 0), Coord(2, 0))
    items = []
    for city, w in enumerate(weights, start=1):
        if w > 0:
            pr = profits[len(items)] if profits else 1.0
            items.append(Item(len(items) + 1, float(pr), float(w), city))
    return TtpInstance("triangle", coords, tuple(items), sum(weights), v_min, v_max,
                       renting_rate, "CEIL_2D")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
