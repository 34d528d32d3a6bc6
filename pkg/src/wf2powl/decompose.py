"""Partitioning a workflow net to expose partial-order or choice-graph structure.

The partial-order side groups transitions so that all choice logic is hidden
inside the parts; the choice-graph side groups them so that all concurrency
is hidden. Each side comes with a validity predicate, a projection that
yields sub-workflow-nets for recursion, and a constructor for the top-level
composition structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .nets import (
    PetriNet,
    TransitionPartition,
    WorkflowNet,
    entry_points,
    exit_points,
    places_equivalent,
    postset,
    preset,
    project_flow,
    project_places,
    require_wf_net,
    transition_reachability,
)
from .powl import ChoiceGraphStruct, OrderStruct, PowlStructureError


class CyclicOrder(ValueError):
    """The derived execution order has a cycle (a soundness violation upstream)."""


class InvalidFlowGraph(ValueError):
    """The derived execution flow is not a valid choice graph."""


# ---------------------------------------------------------------------------
# restricted reachability


def restricted_reach_fwd(net: PetriNet, p: str, stop: str) -> frozenset[str]:
    """Transitions reachable from ``p`` along paths never firing ``stop``."""
    reached: set[str] = set()
    seen_places = {p}
    frontier = [p]
    while frontier:
        q = frontier.pop()
        for t in postset(net, q):
            if t == stop or t in reached:
                continue
            reached.add(t)
            for q2 in postset(net, t):
                if q2 not in seen_places:
                    seen_places.add(q2)
                    frontier.append(q2)
    return frozenset(reached)


def restricted_reach_bwd(net: PetriNet, p: str, stop: str) -> frozenset[str]:
    """Transitions from which ``p`` is reachable along paths avoiding ``stop``."""
    reached: set[str] = set()
    seen_places = {p}
    frontier = [p]
    while frontier:
        q = frontier.pop()
        for t in preset(net, q):
            if t == stop or t in reached:
                continue
            reached.add(t)
            for q2 in preset(net, t):
                if q2 not in seen_places:
                    seen_places.add(q2)
                    frontier.append(q2)
    return frozenset(reached)


# ---------------------------------------------------------------------------
# union-find over transitions


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union_all(self, items):
        items = list(items)
        for x in items[1:]:
            ra, rb = self.find(items[0]), self.find(x)
            if ra != rb:
                self.parent[rb] = ra

    def partition(self) -> TransitionPartition:
        groups: dict[str, set[str]] = {}
        for x in self.parent:
            groups.setdefault(self.find(x), set()).add(x)
        return TransitionPartition.of(groups.values())


# ---------------------------------------------------------------------------
# conflict-hiding side (partial orders)


def po_partition(wf: WorkflowNet, reflexive: bool = True) -> TransitionPartition:
    """Group transitions so every choice is local to one part.

    Around each place with multiple successors, all transitions reachable
    from some but not all of those successors belong to the same decision
    scope and are merged; places with multiple predecessors are treated
    symmetrically with backward reachability. Reachability is reflexive by
    default so that the branch-opening transitions themselves join their
    own scope.
    """
    net = wf.net
    reach = transition_reachability(net, reflexive=reflexive)
    succ: dict[str, set[str]] = {t: set() for t in net.transitions}
    pred: dict[str, set[str]] = {t: set() for t in net.transitions}
    for a, b in reach:
        succ[a].add(b)
        pred[b].add(a)

    uf = _UnionFind(sorted(net.transitions))
    for p in sorted(net.places):
        out = sorted(postset(net, p))
        if len(out) > 1:
            group = [t for t in sorted(net.transitions)
                     if any(t in succ[t1] for t1 in out)
                     and not all(t in succ[t1] for t1 in out)]
            if len(group) > 1:
                uf.union_all(group)
        inn = sorted(preset(net, p))
        if len(inn) > 1:
            group = [t for t in sorted(net.transitions)
                     if any(t in pred[t1] for t1 in inn)
                     and not all(t in pred[t1] for t1 in inn)]
            if len(group) > 1:
                uf.union_all(group)
    return uf.partition()


@dataclass(frozen=True)
class PartitionVerdict:
    ok: bool
    condition: Optional[str] = None  # name of the violated condition
    witnesses: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "OK"
        return f"{self.condition}: {', '.join(self.witnesses)}"


CONDITION_NO_XOR_SPLITS = "no top-level XOR-splits"
CONDITION_NO_XOR_JOINS = "no top-level XOR-joins"
CONDITION_SINGLE_ENTRY = "single-entry fragments"
CONDITION_SINGLE_EXIT = "single-exit fragments"
CONDITION_UNIQUE_ENTRY = "unique entry point"
CONDITION_UNIQUE_EXIT = "unique exit point"


def is_conflict_hiding(wf: WorkflowNet, g: TransitionPartition) -> PartitionVerdict:
    """Check the four marked-graph interface conditions on a partition."""
    entries = [entry_points(wf, part) for part in g]
    exits = [exit_points(wf, part) for part in g]
    for p in sorted(wf.places):
        holders = [i for i, e in enumerate(entries) if p in e]
        if len(holders) > 1:
            return PartitionVerdict(False, CONDITION_NO_XOR_SPLITS, (p,))
        holders = [i for i, e in enumerate(exits) if p in e]
        if len(holders) > 1:
            return PartitionVerdict(False, CONDITION_NO_XOR_JOINS, (p,))
    for i, part in enumerate(g):
        for side, places, name in (("entry", entries[i], CONDITION_SINGLE_ENTRY),
                                   ("exit", exits[i], CONDITION_SINGLE_EXIT)):
            ordered = sorted(places)
            for a in range(len(ordered)):
                for b in range(a + 1, len(ordered)):
                    if not places_equivalent(wf.net, part, ordered[a], ordered[b]):
                        return PartitionVerdict(False, name, (ordered[a], ordered[b]))
    return PartitionVerdict(True)


def _fresh_place(taken: set[str], stem: str) -> str:
    if stem not in taken:
        return stem
    i = 1
    while f"{stem}_{i}" in taken:
        i += 1
    return f"{stem}_{i}"


def normalize(net: PetriNet, p_s: str, p_e: str) -> WorkflowNet:
    """Add a silent feeder/drainer so p_s/p_e become a true source/sink."""
    places = set(net.places)
    labeling = dict(net.labeling)
    flow = set(net.flow)
    taken = places | set(net.transitions)
    source, sink = p_s, p_e
    if preset(net, p_s):
        source = _fresh_place(taken, "src")
        taken.add(source)
        t_in = _fresh_place(taken, "t_src")
        taken.add(t_in)
        places.add(source)
        labeling[t_in] = None
        flow |= {(source, t_in), (t_in, p_s)}
    if postset(net, p_e):
        sink = _fresh_place(taken, "snk")
        taken.add(sink)
        t_out = _fresh_place(taken, "t_snk")
        taken.add(t_out)
        places.add(sink)
        labeling[t_out] = None
        flow |= {(p_e, t_out), (t_out, sink)}
    result = require_wf_net(PetriNet.build(places, labeling, flow))
    if result.source != source or result.sink != sink:
        raise ValueError("normalization produced unexpected source/sink")
    return result


def po_project(wf: WorkflowNet, part: frozenset[str]) -> WorkflowNet:
    """Isolate a part of a conflict-hiding partition as its own workflow net.

    All entry places collapse into one fresh place, all exit places into
    another; arcs between the part and those boundary places are rerouted
    in both directions, so internal cycles through the boundary survive.
    """
    net = wf.net
    entries = entry_points(wf, part)
    exits = exit_points(wf, part)
    touched = project_places(net, part)
    inner = touched - entries - exits
    taken = set(net.places) | set(net.transitions)
    p_s = _fresh_place(taken, "ps")
    taken.add(p_s)
    p_e = _fresh_place(taken, "pe")

    places = inner | {p_s, p_e}
    flow = set(project_flow(net, inner, part))
    for t in part:
        if postset(net, t) & entries:
            flow.add((t, p_s))
        if preset(net, t) & entries:
            flow.add((p_s, t))
        if postset(net, t) & exits:
            flow.add((t, p_e))
        if preset(net, t) & exits:
            flow.add((p_e, t))
    labeling = {t: net.labeling[t] for t in part}
    return normalize(PetriNet.build(places, labeling, flow), p_s, p_e)


def execution_order(wf: WorkflowNet, g: TransitionPartition) -> OrderStruct:
    """Causal order between parts, from shared boundary places, closed."""
    n = len(g)
    entries = [entry_points(wf, part) for part in g]
    exits = [exit_points(wf, part) for part in g]
    pairs = {(i, j) for i in range(n) for j in range(n)
             if exits[i] & entries[j]}
    try:
        return OrderStruct.of(n, pairs)
    except PowlStructureError as exc:
        raise CyclicOrder(str(exc)) from exc


# ---------------------------------------------------------------------------
# concurrency-hiding side (choice graphs)


def cg_partition(wf: WorkflowNet) -> TransitionPartition:
    """Group transitions so every parallel region is local to one part.

    Each AND-split transition is merged with the threads it spawns: the
    transitions reachable from one of its output places but not another,
    when that split itself is barred from the path. AND-joins are handled
    symmetrically with backward reachability.
    """
    net = wf.net
    uf = _UnionFind(sorted(net.transitions))
    for t_split in sorted(net.transitions):
        out = sorted(postset(net, t_split))
        if len(out) > 1:
            reach = {p: restricted_reach_fwd(net, p, t_split) for p in out}
            threads = [t for t in sorted(net.transitions)
                       if any(t in reach[p1] for p1 in out)
                       and any(t not in reach[p2] for p2 in out)]
            group = [t_split] + threads
            if len(group) > 1:
                uf.union_all(group)
    for t_join in sorted(net.transitions):
        inn = sorted(preset(net, t_join))
        if len(inn) > 1:
            reach = {p: restricted_reach_bwd(net, p, t_join) for p in inn}
            threads = [t for t in sorted(net.transitions)
                       if any(t in reach[p1] for p1 in inn)
                       and any(t not in reach[p2] for p2 in inn)]
            group = [t_join] + threads
            if len(group) > 1:
                uf.union_all(group)
    return uf.partition()


def is_concurrency_hiding(wf: WorkflowNet, g: TransitionPartition) -> PartitionVerdict:
    """Check that every part has exactly one entry and one exit place."""
    for part in g:
        entries = entry_points(wf, part)
        if len(entries) != 1:
            return PartitionVerdict(False, CONDITION_UNIQUE_ENTRY,
                                    tuple(sorted(part)) + tuple(sorted(entries)))
        exits = exit_points(wf, part)
        if len(exits) != 1:
            return PartitionVerdict(False, CONDITION_UNIQUE_EXIT,
                                    tuple(sorted(part)) + tuple(sorted(exits)))
    return PartitionVerdict(True)


def cg_project(wf: WorkflowNet, part: frozenset[str]) -> WorkflowNet:
    """Isolate a part of a concurrency-hiding partition as a workflow net."""
    net = wf.net
    (p_s,) = entry_points(wf, part)
    (p_e,) = exit_points(wf, part)
    places = project_places(net, part)
    flow = project_flow(net, places, part)
    labeling = {t: net.labeling[t] for t in part}
    return normalize(PetriNet.build(places, labeling, flow), p_s, p_e)


def execution_flow(wf: WorkflowNet, g: TransitionPartition) -> ChoiceGraphStruct:
    """Token-handover graph between parts, with artificial start/end nodes."""
    from .powl import END, START

    n = len(g)
    entries = [entry_points(wf, part) for part in g]
    exits = [exit_points(wf, part) for part in g]
    edges = {(i, j) for i in range(n) for j in range(n) if exits[i] & entries[j]}
    for i in range(n):
        if wf.source in entries[i]:
            edges.add((START, i))
        if wf.sink in exits[i]:
            edges.add((i, END))
    try:
        return ChoiceGraphStruct.of(n, edges)
    except PowlStructureError as exc:
        raise InvalidFlowGraph(str(exc)) from exc
