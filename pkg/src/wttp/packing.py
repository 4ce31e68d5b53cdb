"""Bernoulli packing plans, node weights and the effective knapsack capacity."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .instance import TtpInstance


def derive_seed(base_seed: int, instance_name: str, p_index: int, replicate: int, stream: int = 0) -> int:
    """64-bit seed for one cell of the run matrix.

    Hashes ``(base_seed, crc32(instance_name), p_index, replicate, stream)``
    through numpy's SeedSequence. Stream 0 seeds the packing plan, stream 1
    the EA runs of that cell.
    """
    key = [int(base_seed), zlib.crc32(instance_name.encode()), int(p_index), int(replicate), int(stream)]
    return int(np.random.SeedSequence(key).generate_state(1, np.uint64)[0])


@dataclass(frozen=True, eq=False)
class PackingPlan:
    bits: np.ndarray
    p: float = float("nan")
    seed: int = -1

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8).copy()
        if bits.ndim != 1 or np.any(bits > 1):
            raise ValueError("packing plan must be a 1-d 0/1 vector")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return len(self.bits)

    def __eq__(self, other):
        return isinstance(other, PackingPlan) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    @property
    def packed(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True, eq=False)
class NodeWeightVector:
    weights: np.ndarray
    counts: np.ndarray


def generate_packing(inst: TtpInstance, p: float, seed: int) -> PackingPlan:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.Generator(np.random.PCG64(seed))
    bits = rng.random(inst.m) < p
    return PackingPlan(bits, p=float(p), seed=int(seed))


def node_weights(inst: TtpInstance, plan: PackingPlan) -> NodeWeightVector:
    if len(plan) != inst.m:
        raise ValueError(f"plan has {len(plan)} bits, instance has {inst.m} items")
    on = plan.bits.astype(bool)
    weights = np.zeros(inst.n)
    # sequential accumulation keeps sums identical for identical item multisets
    np.add.at(weights, inst.item_cities[on], inst.item_weights[on])
    counts = np.bincount(inst.item_cities[on], minlength=inst.n)
    return NodeWeightVector(weights, counts)


def effective_capacity(inst: TtpInstance) -> float:
    """Sum of all item weights, packed or not."""
    if inst.m == 0:
        raise ValueError(f"{inst.name} has no items; capacity (and speed slope) undefined")
    return float(inst.item_weights.sum())


def format_packing(plan: PackingPlan, instance_name: str) -> str:
    bits = "".join("1" if b else "0" for b in plan.bits)
    return f"# instance={instance_name} p={plan.p!r} seed={plan.seed}\n{bits}\n"


def parse_packing(text: str, m: int | None = None) -> PackingPlan:
    meta: dict[str, str] = {}
    bits = None
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("#"):
            for tok in line[1:].split():
                key, _, value = tok.partition("=")
                meta[key] = value
        elif line:
            if bits is not None or set(line) - {"0", "1"}:
                raise ValueError("packing file must hold exactly one line of 0/1 characters")
            bits = np.frombuffer(line.encode(), dtype=np.uint8) - ord("0")
    if bits is None:
        bits = np.zeros(0, dtype=np.uint8)
    if m is not None and len(bits) != m:
        raise ValueError(f"packing has {len(bits)} bits, expected {m}")
    return PackingPlan(bits, p=float(meta.get("p", "nan")), seed=int(meta.get("seed", -1)))
