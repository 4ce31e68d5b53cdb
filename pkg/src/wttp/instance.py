"""TTP benchmark instances, TSPlib tours and the distance function.

Indices are 1-based at every public surface (files, CLI, ``Tour.order``);
numpy arrays handed to the numeric kernels are 0-based.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

EDGE_WEIGHT_TYPES = ("CEIL_2D", "EUC_2D")

# Above this many cities the n x n matrix is not materialised.
MATRIX_LIMIT = 5000

_HEADER_KEYS = {
    "PROBLEM NAME": "name",
    "KNAPSACK DATA TYPE": "knapsack_data_type",
    "DIMENSION": "n",
    "NUMBER OF ITEMS": "m",
    "CAPACITY OF KNAPSACK": "capacity_file",
    "MIN SPEED": "v_min",
    "MAX SPEED": "v_max",
    "RENTING RATIO": "renting_rate",
    "EDGE_WEIGHT_TYPE": "edge_weight_type",
}


class ParseError(ValueError):
    """Malformed instance or tour file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Coord:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinate ({self.x}, {self.y})")


@dataclass(frozen=True)
class Item:
    id: int
    profit: float
    weight: float
    city: int

    def __post_init__(self):
        if self.weight <= 0 or self.profit <= 0:
            raise ValueError(f"item {self.id}: profit and weight must be positive")


@dataclass(frozen=True)
class TtpInstance:
    name: str
    coords: tuple[Coord, ...]
    items: tuple[Item, ...]
    capacity_file: float
    v_min: float
    v_max: float
    renting_rate: float
    edge_weight_type: str = "CEIL_2D"
    knapsack_data_type: str = ""
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.edge_weight_type not in EDGE_WEIGHT_TYPES:
            raise ValueError(f"unsupported EDGE_WEIGHT_TYPE {self.edge_weight_type!r}")
        if not 0 < self.v_min < self.v_max:
            raise ValueError(f"need 0 < v_min < v_max, got {self.v_min}, {self.v_max}")
        if self.renting_rate < 0:
            raise ValueError("renting rate must be nonnegative")
        n = len(self.coords)
        for item in self.items:
            if not 1 <= item.city <= n:
                raise ValueError(f"item {item.id} assigned to unknown city {item.city}")
        if any(item.city == 1 for item in self.items):
            log.warning("%s: items stationed at city 1", self.name)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def m(self) -> int:
        return len(self.items)

    @cached_property
    def xy(self) -> np.ndarray:
        """(n, 2) float array of coordinates."""
        return np.array([(c.x, c.y) for c in self.coords], dtype=np.float64).reshape(-1, 2)

    @cached_property
    def item_weights(self) -> np.ndarray:
        return np.array([it.weight for it in self.items], dtype=np.float64)

    @cached_property
    def item_profits(self) -> np.ndarray:
        return np.array([it.profit for it in self.items], dtype=np.float64)

    @cached_property
    def item_cities(self) -> np.ndarray:
        """0-based city index of every item."""
        return np.array([it.city - 1 for it in self.items], dtype=np.int64)

    @cached_property
    def items_per_city(self) -> np.ndarray:
        return np.bincount(self.item_cities, minlength=self.n)

    @property
    def ceil(self) -> bool:
        return self.edge_weight_type == "CEIL_2D"

    def distance_matrix(self) -> np.ndarray | None:
        """Full n x n distance matrix, or None when n exceeds MATRIX_LIMIT."""
        if self.n > MATRIX_LIMIT:
            return None
        return self._matrix

    @cached_property
    def _matrix(self) -> np.ndarray:
        dx = self.xy[:, 0][:, None] - self.xy[:, 0][None, :]
        dy = self.xy[:, 1][:, None] - self.xy[:, 1][None, :]
        r = np.sqrt(dx * dx + dy * dy)
        return np.ceil(r) if self.ceil else np.floor(r + 0.5)


@dataclass(frozen=True)
class Tour:
    """Closed tour as a 1-based city sequence starting at city 1."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(c) for c in self.order)
        object.__setattr__(self, "order", order)
        n = len(order)
        if n == 0 or order[0] != 1:
            raise ValueError("tour must start at city 1")
        if sorted(order) != list(range(1, n + 1)):
            raise ValueError(f"tour is not a permutation of 1..{n}")

    @property
    def n(self) -> int:
        return len(self.order)

    def array(self) -> np.ndarray:
        """0-based int64 array."""
        return np.asarray(self.order, dtype=np.int64) - 1

    @classmethod
    def from_array(cls, arr) -> Tour:
        return cls(tuple(int(c) + 1 for c in arr))

    @classmethod
    def rotated(cls, cities) -> Tour:
        """Rotate an arbitrary 1-based cyclic sequence so city 1 leads."""
        cities = [int(c) for c in cities]
        if 1 not in cities:
            raise ValueError("tour does not contain city 1")
        k = cities.index(1)
        return cls(tuple(cities[k:] + cities[:k]))


def _leg(x1: float, y1: float, x2: float, y2: float, ceil: bool) -> float:
    dx = x1 - x2
    dy = y1 - y2
    r = math.sqrt(dx * dx + dy * dy)
    return float(math.ceil(r)) if ceil else float(math.floor(r + 0.5))


def distance(inst: TtpInstance, i: int, j: int) -> float:
    """TSPlib distance between 1-based cities ``i`` and ``j``."""
    n = inst.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"city index out of range 1..{n}: ({i}, {j})")
    a, b = inst.coords[i - 1], inst.coords[j - 1]
    return _leg(a.x, a.y, b.x, b.y, inst.ceil)


def _number(token: str, lineno: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"non-numeric {what} {token!r}", lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite {what} {token!r}", lineno)
    return value


def _integer(token: str, lineno: int, what: str) -> int:
    value = _number(token, lineno, what)
    if value != int(value):
        raise ParseError(f"{what} must be an integer, got {token!r}", lineno)
    return int(value)


def parse_ttp_instance(text: str, source: str | None = None) -> TtpInstance:
    """Parse a file in the TTP 2017 competition format."""
    header: dict[str, str] = {}
    coord_rows: list[tuple[int, list[str]]] = []
    item_rows: list[tuple[int, list[str]]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "EOF":
            continue
        upper = line.upper()
        if upper.startswith("NODE_COORD_SECTION"):
            section = "coords"
            continue
        if upper.startswith("ITEMS SECTION"):
            section = "items"
            continue
        if section is None:
            key, sep, value = line.partition(":")
            key = key.strip().upper()
            if not sep or key not in _HEADER_KEYS:
                raise ParseError(f"unknown header line {line!r}", lineno)
            header[_HEADER_KEYS[key]] = value.strip()
        elif section == "coords":
            coord_rows.append((lineno, line.split()))
        else:
            item_rows.append((lineno, line.split()))

    missing = [k for k, v in _HEADER_KEYS.items() if v not in header and v != "knapsack_data_type"]
    if missing:
        raise ParseError(f"missing header keys: {', '.join(missing)}")

    def hnum(key):
        return _number(header[key], None, key)

    n = _integer(header["n"], None, "DIMENSION")
    m = _integer(header["m"], None, "NUMBER OF ITEMS")
    ewt = header["edge_weight_type"].upper()
    if ewt not in EDGE_WEIGHT_TYPES:
        raise ParseError(f"unknown EDGE_WEIGHT_TYPE {ewt!r}")
    if len(coord_rows) != n:
        raise ParseError(f"NODE_COORD_SECTION has {len(coord_rows)} lines, DIMENSION says {n}")
    if len(item_rows) != m:
        raise ParseError(f"ITEMS SECTION has {len(item_rows)} lines, NUMBER OF ITEMS says {m}")

    coords = []
    for k, (lineno, parts) in enumerate(coord_rows, start=1):
        if len(parts) < 3:
            raise ParseError("expected 'index x y'", lineno)
        if _integer(parts[0], lineno, "node index") != k:
            raise ParseError(f"node index {parts[0]} out of sequence", lineno)
        coords.append(Coord(_number(parts[1], lineno, "x"), _number(parts[2], lineno, "y")))

    items = []
    for k, (lineno, parts) in enumerate(item_rows, start=1):
        if len(parts) < 4:
            raise ParseError("expected 'index profit weight node'", lineno)
        if _integer(parts[0], lineno, "item index") != k:
            raise ParseError(f"item index {parts[0]} out of sequence", lineno)
        city = _integer(parts[3], lineno, "node number")
        if not 1 <= city <= n:
            raise ParseError(f"item assigned to unknown node {city}", lineno)
        profit = _number(parts[1], lineno, "profit")
        weight = _number(parts[2], lineno, "weight")
        if profit <= 0 or weight <= 0:
            raise ParseError("profit and weight must be positive", lineno)
        items.append(Item(k, profit, weight, city))

    try:
        return TtpInstance(
            name=header["name"],
            coords=tuple(coords),
            items=tuple(items),
            capacity_file=hnum("capacity_file"),
            v_min=hnum("v_min"),
            v_max=hnum("v_max"),
            renting_rate=hnum("renting_rate"),
            edge_weight_type=ewt,
            knapsack_data_type=header.get("knapsack_data_type", ""),
            source=source,
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() and abs(x) < 2**53 else repr(float(x))


def format_ttp_instance(inst: TtpInstance) -> str:
    lines = [
        f"PROBLEM NAME: \t{inst.name}",
        f"KNAPSACK DATA TYPE: \t{inst.knapsack_data_type}",
        f"DIMENSION:\t{inst.n}",
        f"NUMBER OF ITEMS: \t{inst.m}",
        f"CAPACITY OF KNAPSACK: \t{_fmt(inst.capacity_file)}",
        f"MIN SPEED: \t{_fmt(inst.v_min)}",
        f"MAX SPEED: \t{_fmt(inst.v_max)}",
        f"RENTING RATIO: \t{_fmt(inst.renting_rate)}",
        f"EDGE_WEIGHT_TYPE:\t{inst.edge_weight_type}",
        "NODE_COORD_SECTION\t(INDEX, X, Y): ",
    ]
    lines += [f"{k}\t{_fmt(c.x)}\t{_fmt(c.y)}" for k, c in enumerate(inst.coords, start=1)]
    lines.append("ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER): ")
    lines += [f"{it.id}\t{_fmt(it.profit)}\t{_fmt(it.weight)}\t{it.city}" for it in inst.items]
    return "\n".join(lines) + "\n"


def load_instance(path) -> TtpInstance:
    path = Path(path)
    return parse_ttp_instance(path.read_text(), source=str(path))


def parse_tour_file(text: str, n: int) -> Tour:
    """Read a TSPlib .tour file and rotate it so city 1 comes first."""
    tokens = text.split()
    try:
        start = next(k for k, t in enumerate(tokens) if t.upper() == "TOUR_SECTION")
    except StopIteration:
        raise ParseError("no TOUR_SECTION") from None
    cities = []
    for tok in tokens[start + 1:]:
        if tok == "-1" or tok.upper() == "EOF":
            break
        try:
            cities.append(int(tok))
        except ValueError:
            raise ParseError(f"non-integer city {tok!r} in TOUR_SECTION") from None
    if len(cities) != n:
        raise ParseError(f"tour has {len(cities)} cities, expected {n}")
    seen = set()
    for c in cities:
        if not 1 <= c <= n:
            raise ParseError(f"city {c} out of range 1..{n}")
        if c in seen:
            raise ParseError(f"duplicate city {c}")
        seen.add(c)
    return Tour.rotated(cities)


def format_tour_file(tour: Tour, name: str = "tour") -> str:
    lines = [f"NAME : {name}", "TYPE : TOUR", f"DIMENSION : {tour.n}", "TOUR_SECTION"]
    lines += [str(c) for c in tour.order]
    lines += ["-1", "EOF"]
    return "\n".join(lines) + "\n"


def load_tour(path, n: int) -> Tour:
    return parse_tour_file(Path(path).read_text(), n)
