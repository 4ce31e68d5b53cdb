"""Bundled TSPlib coordinates and a generator for TTP-format instances.

The item layout mirrors the TTP competition benchmark files: ``ipn`` items
per city, none at city 1, item ``k`` stationed at city ``2 + (k-1) mod (n-1)``,
knapsack capacity ``floor(capacity_class / 11 * total weight)`` and speeds
0.1 / 1.0.

    bsc  weight ~ U{1..1000},    profit = weight + 100
    u    weight ~ U{1..1000},    profit ~ U{1..1000}
    usw  weight ~ U{1000..1010}, profit ~ U{1..1000}
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .instance import Coord, Item, ParseError, Tour, TtpInstance, parse_tour_file

KINDS = {
    "bsc": ("bounded-strongly-corr", "bounded strongly corr"),
    "u": ("uncorr", "uncorrelated"),
    "usw": ("uncorr-similar-weights", "uncorrelated, similar weights"),
}

BUNDLED = ("eil51", "berlin52")


def parse_tsplib_coords(text: str) -> tuple[str, str, list[Coord]]:
    """Return (name, edge weight type, coords) of a TSPlib NODE_COORD file."""
    name, ewt, dim = "", "EUC_2D", None
    coords: list[Coord] = []
    in_coords = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if in_coords:
            parts = line.split()
            if len(parts) < 3:
                raise ParseError("expected 'index x y'", lineno)
            try:
                coords.append(Coord(float(parts[1]), float(parts[2])))
            except ValueError:
                raise ParseError(f"bad coordinate line {line!r}", lineno) from None
            continue
        if line.upper().startswith("NODE_COORD_SECTION"):
            in_coords = True
            continue
        key, _, value = line.partition(":")
        key, value = key.strip().upper(), value.strip()
        if key == "NAME":
            name = value
        elif key == "EDGE_WEIGHT_TYPE":
            ewt = value.upper()
        elif key == "DIMENSION":
            dim = int(value)
    if dim is not None and dim != len(coords):
        raise ParseError(f"NODE_COORD_SECTION has {len(coords)} lines, DIMENSION says {dim}")
    return name, ewt, coords


def _data(filename: str) -> str:
    return resources.files("wttp").joinpath("data", filename).read_text()


def bundled_coords(name: str) -> list[Coord]:
    if name not in BUNDLED:
        raise KeyError(f"no bundled TSPlib instance {name!r}; have {BUNDLED}")
    return parse_tsplib_coords(_data(f"{name}.tsp"))[2]


def bundled_optimal_tour(name: str) -> Tour:
    n = len(bundled_coords(name))
    return parse_tour_file(_data(f"{name}.opt.tour"), n)


def bundled_optimal_tour_text(name: str) -> str:
    bundled_coords(name)
    return _data(f"{name}.opt.tour")


def instance_filename(base: str, n: int, ipn: int, kind: str, capacity_class: int) -> str:
    return f"{base}_n{(n - 1) * ipn}_{KINDS[kind][0]}_{capacity_class:02d}.ttp"


def make_ttp_instance(
    base: str,
    coords: list[Coord],
    ipn: int = 1,
    kind: str = "bsc",
    capacity_class: int = 1,
    seed: int = 0,
    renting_rate: float = 1.0,
    edge_weight_type: str = "CEIL_2D",
) -> TtpInstance:
    """Attach competition-style items to a coordinate set."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {sorted(KINDS)}")
    if ipn < 1 or not 1 <= capacity_class <= 10:
        raise ValueError("need ipn >= 1 and capacity_class in 1..10")
    n = len(coords)
    m = (n - 1) * ipn
    rng = np.random.default_rng(seed)
    if kind == "usw":
        weights = rng.integers(1000, 1011, size=m)
    else:
        weights = rng.integers(1, 1001, size=m)
    if kind == "bsc":
        profits = weights + 100
    else:
        profits = rng.integers(1, 1001, size=m)
    items = tuple(
        Item(k + 1, float(profits[k]), float(weights[k]), 2 + k % (n - 1)) for k in range(m)
    )
    return TtpInstance(
        name=f"{base}-TTP",
        coords=tuple(coords),
        items=items,
        capacity_file=float(int(capacity_class * int(weights.sum()) / 11)),
        v_min=0.1,
        v_max=1.0,
        renting_rate=renting_rate,
        edge_weight_type=edge_weight_type,
        knapsack_data_type=KINDS[kind][1],
    )
