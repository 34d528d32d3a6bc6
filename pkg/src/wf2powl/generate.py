"""Random model/net generation and the scalability benchmark.

Nets are generated by sampling a random POWL model and expanding it into
a workflow net, so every generated net is separable by construction and
ships with a free reference model for language comparison.
"""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass

from .convert import ConversionOptions, convert
from .nets import WorkflowNet
from .powl import (
    END,
    START,
    ChoiceGraph,
    ChoiceGraphStruct,
    Leaf,
    OrderStruct,
    PartialOrder,
    PowlNode,
    count_nodes,
    powl_to_net,
    validate_powl,
)


@dataclass(frozen=True)
class GenParams:
    seed: int
    target_transitions: int = 20
    max_depth: int = 4
    leaf_weight: float = 0.5
    po_weight: float = 0.25
    cg_weight: float = 0.25
    max_children: int = 4
    silent_prob: float = 0.15
    cycle_prob: float = 0.2

    def __post_init__(self):
        if self.target_transitions < 1:
            raise ValueError("target_transitions must be >= 1")
        if self.max_children < 2:
            raise ValueError("max_children must be >= 2 for composites")
        for p in (self.silent_prob, self.cycle_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must be in [0, 1]")
        if min(self.leaf_weight, self.po_weight, self.cg_weight) < 0:
            raise ValueError("weights must be non-negative")
        if self.leaf_weight + self.po_weight + self.cg_weight <= 0:
            raise ValueError("at least one node-kind weight must be positive")


_ACTIVITIES = [f"act_{i:03d}" for i in range(1, 1000)]


def random_powl(params: GenParams) -> PowlNode:
    """A seed-deterministic model with roughly the target leaf count."""
    rng = random.Random(params.seed)
    counter = [0]

    def leaf() -> Leaf:
        counter[0] += 1
        name = f"t{counter[0]:03d}"
        if rng.random() < params.silent_prob:
            return Leaf(name, None)
        return Leaf(name, _ACTIVITIES[(counter[0] - 1) % len(_ACTIVITIES)])

    def build(budget: int, depth: int) -> tuple[PowlNode, int]:
        """Returns (model, leaves used). Uses at most ~budget leaves."""
        if budget <= 1 or depth >= params.max_depth:
            return leaf(), 1
        kinds, weights = ["leaf"], [params.leaf_weight]
        if params.po_weight > 0:
            kinds.append("po")
            weights.append(params.po_weight)
        if params.cg_weight > 0:
            kinds.append("cg")
            weights.append(params.cg_weight)
        kind = rng.choices(kinds, weights)[0]
        if kind == "leaf":
            return leaf(), 1
        n = rng.randint(2, min(params.max_children, max(2, budget)))
        shares = _split_budget(rng, budget, n)
        children, used = [], 0
        for share in shares:
            child, k = build(share, depth + 1)
            children.append(child)
            used += k
        if kind == "po":
            return PartialOrder(_random_order(rng, n), tuple(children)), used
        return ChoiceGraph(_random_choice_graph(rng, n, params.cycle_prob),
                           tuple(children)), used

    model, used = build(params.target_transitions, 0)
    # top up with sequential continuation while clearly under target
    while used < max(1, round(params.target_transitions * 0.8)):
        extra, k = build(params.target_transitions - used, 1)
        model = PartialOrder(OrderStruct.of(2, [(0, 1)]), (model, extra))
        used += k
    assert validate_powl(model) is None
    return model


def _split_budget(rng: random.Random, budget: int, n: int) -> list[int]:
    shares = [1] * n
    for _ in range(max(0, budget - n)):
        shares[rng.randrange(n)] += 1
    return shares


def _random_order(rng: random.Random, n: int) -> OrderStruct:
    pairs = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                pairs.add((i, j))
    return OrderStruct.of(n, pairs)


def _random_choice_graph(rng: random.Random, n: int, cycle_prob: float) -> ChoiceGraphStruct:
    # chain with optional skip edges, then optional back edges for cycles
    order = list(range(n))
    rng.shuffle(order)
    edges = {(START, order[0]), (order[-1], END)}
    for a, b in zip(order, order[1:]):
        edges.add((a, b))
    for i in range(n):
        for j in range(i + 2, n):
            if rng.random() < 0.15:
                edges.add((order[i], order[j]))
    if rng.random() < cycle_prob and n >= 2:
        hi = rng.randrange(1, n)
        lo = rng.randrange(hi)
        edges.add((order[hi], order[lo]))
    return ChoiceGraphStruct.of(n, edges)


def generate_separable_net(params: GenParams) -> tuple[WorkflowNet, PowlNode]:
    model = random_powl(params)
    return powl_to_net(model), model


@dataclass(frozen=True)
class BenchRow:
    size: int
    seed: int
    transitions: int
    places: int
    wall_ms: float
    success: bool
    po_nodes: int
    cg_nodes: int


CSV_HEADER = ["size", "seed", "transitions", "places", "wall_ms", "success",
              "po_nodes", "cg_nodes"]


def bench_run(sizes: list[int], per_size: int, seed_base: int = 1000,
              opts: ConversionOptions = ConversionOptions()) -> list[BenchRow]:
    """Generate and convert nets of each target size, timing conversion only."""
    rows = []
    for size in sizes:
        for k in range(per_size):
            seed = seed_base + 97 * size + k
            wf, _ = generate_separable_net(GenParams(seed, target_transitions=size))
            started = time.perf_counter()
            report = convert(wf, opts)
            wall_ms = (time.perf_counter() - started) * 1000.0
            po_n = cg_n = 0
            if report.ok:
                _, po_n, cg_n = count_nodes(report.result)
            rows.append(BenchRow(size, seed, len(wf.transitions), len(wf.places),
                                 wall_ms, report.ok, po_n, cg_n))
    return rows


def bench_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.size, r.seed, r.transitions, r.places,
                         f"{r.wall_ms:.3f}", int(r.success), r.po_nodes, r.cg_nodes])
    return buf.getvalue()
