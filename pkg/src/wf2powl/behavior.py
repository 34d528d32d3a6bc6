"""Token-game semantics and behavioral verification for workflow nets.

This module is the independent oracle: explicit-state exploration,
safeness and soundness verdicts, and exact bounded visible-language
enumeration. It never consults the structural decomposition code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .nets import Marking, PetriNet, WorkflowNet, preset, postset

DEFAULT_STATE_BUDGET = 1_000_000


class NotEnabled(ValueError):
    pass


@dataclass(frozen=True)
class ReachabilityGraph:
    states: frozenset[Marking]
    initial: Marking
    edges: frozenset[tuple[Marking, str, Marking]]
    truncated: Optional[str] = None  # reason, or None if complete
    unsafe_witness: Optional[Marking] = None


@dataclass(frozen=True)
class TraceSet:
    """Visible-activity sequences up to a length bound."""

    traces: frozenset[tuple[str, ...]]
    bound: int

    def restricted(self, bound: int) -> "TraceSet":
        if bound >= self.bound:
            return self
        return TraceSet(frozenset(t for t in self.traces if len(t) <= bound), bound)

    def __len__(self):
        return len(self.traces)


def enabled(net: PetriNet, m: Marking) -> frozenset[str]:
    counts = m.as_dict()
    return frozenset(t for t in net.transitions
                     if all(counts.get(p, 0) >= 1 for p in preset(net, t)))


def fire(net: PetriNet, m: Marking, t: str) -> Marking:
    counts = m.as_dict()
    for p in preset(net, t):
        if counts.get(p, 0) < 1:
            raise NotEnabled(f"{t} is not enabled at {m}")
        counts[p] -= 1
    for p in postset(net, t):
        counts[p] = counts.get(p, 0) + 1
    return Marking.from_counts(counts)


def reachability_graph(wf: WorkflowNet,
                       state_budget: int = DEFAULT_STATE_BUDGET,
                       stop_on_unsafe: bool = False) -> ReachabilityGraph:
    """Breadth-first closure of markings reachable from [source]."""
    if state_budget < 1:
        raise ValueError("state_budget must be >= 1")
    net = wf.net
    initial = Marking.of([wf.source])
    pres = {t: preset(net, t) for t in net.transitions}
    posts = {t: postset(net, t) for t in net.transitions}
    torder = sorted(net.transitions)

    states = {initial}
    edges = set()
    queue = [initial]
    truncated = None
    unsafe_witness = None
    while queue:
        m = queue.pop(0)
        counts = m.as_dict()
        for t in torder:
            if not all(counts.get(p, 0) >= 1 for p in pres[t]):
                continue
            nxt = dict(counts)
            for p in pres[t]:
                nxt[p] -= 1
            for p in posts[t]:
                nxt[p] = nxt.get(p, 0) + 1
            m2 = Marking.from_counts(nxt)
            edges.add((m, t, m2))
            if m2 in states:
                continue
            if len(states) >= state_budget:
                truncated = f"state budget of {state_budget} exhausted"
                queue.clear()
                break
            states.add(m2)
            if unsafe_witness is None and not m2.is_safe():
                unsafe_witness = m2
                if stop_on_unsafe:
                    truncated = "unsafe marking found"
                    queue.clear()
                    break
            queue.append(m2)
    return ReachabilityGraph(frozenset(states), initial, frozenset(edges),
                             truncated, unsafe_witness)


@dataclass(frozen=True)
class SafenessVerdict:
    status: str  # "safe" | "unsafe" | "unknown"
    witness: Optional[Marking] = None
    firing_sequence: tuple[str, ...] = ()

    @property
    def is_safe(self) -> bool:
        return self.status == "safe"

    def __str__(self):
        if self.status == "unsafe":
            return f"unsafe at {self.witness} via {list(self.firing_sequence)}"
        return self.status


def check_safe(wf: WorkflowNet,
               state_budget: int = DEFAULT_STATE_BUDGET) -> SafenessVerdict:
    graph = reachability_graph(wf, state_budget, stop_on_unsafe=True)
    if graph.unsafe_witness is not None:
        return SafenessVerdict("unsafe", graph.unsafe_witness,
                               _firing_sequence_to(graph, graph.unsafe_witness))
    if graph.truncated:
        return SafenessVerdict("unknown")
    return SafenessVerdict("safe")


def _firing_sequence_to(graph: ReachabilityGraph, target: Marking) -> tuple[str, ...]:
    """Shortest firing sequence from the initial marking to ``target``."""
    prev: dict[Marking, tuple[Marking, str]] = {}
    succ: dict[Marking, list[tuple[str, Marking]]] = {}
    for m, t, m2 in sorted(graph.edges, key=lambda e: (e[0].counts, e[1])):
        succ.setdefault(m, []).append((t, m2))
    queue = [graph.initial]
    seen = {graph.initial}
    while queue:
        m = queue.pop(0)
        if m == target:
            break
        for t, m2 in succ.get(m, []):
            if m2 not in seen:
                seen.add(m2)
                prev[m2] = (m, t)
                queue.append(m2)
    seq = []
    m = target
    while m in prev:
        m, t = prev[m]
        seq.append(t)
    return tuple(reversed(seq))


@dataclass(frozen=True)
class SoundnessVerdict:
    status: str  # "sound" | "unsound" | "unknown"
    clause: Optional[str] = None  # "dead transition" | "option to complete" | "proper completion"
    witness: Optional[object] = None

    @property
    def is_sound(self) -> bool:
        return self.status == "sound"

    def __str__(self):
        if self.status == "unsound":
            return f"unsound ({self.clause}: {self.witness})"
        return self.status


def check_sound(wf: WorkflowNet,
                state_budget: int = DEFAULT_STATE_BUDGET) -> SoundnessVerdict:
    graph = reachability_graph(wf, state_budget)
    final = Marking.of([wf.sink])

    # proper completion violations are definite even on a truncated graph
    for m in sorted(graph.states, key=lambda s: s.counts):
        if m.count(wf.sink) >= 1 and m != final:
            return SoundnessVerdict("unsound", "proper completion", m)
    if graph.truncated:
        return SoundnessVerdict("unknown")

    fired = {t for _, t, _ in graph.edges}
    dead = sorted(wf.transitions - fired)
    if dead:
        return SoundnessVerdict("unsound", "dead transition", dead[0])

    # option to complete: backward reachability from [sink]
    rev: dict[Marking, list[Marking]] = {}
    for m, _, m2 in graph.edges:
        rev.setdefault(m2, []).append(m)
    can_complete = {final} if final in graph.states else set()
    stack = list(can_complete)
    while stack:
        m = stack.pop()
        for m0 in rev.get(m, []):
            if m0 not in can_complete:
                can_complete.add(m0)
                stack.append(m0)
    stuck = sorted(graph.states - can_complete, key=lambda s: s.counts)
    if stuck:
        return SoundnessVerdict("unsound", "option to complete", stuck[0])
    return SoundnessVerdict("sound")


class BudgetExceeded(RuntimeError):
    pass


def enumerate_language(wf: WorkflowNet, max_visible_len: int,
                       state_budget: int = DEFAULT_STATE_BUDGET) -> TraceSet:
    """Exact visible-label language of complete runs, up to a length bound.

    The caller must have verified safeness, so markings behave as sets.
    Silent cycles terminate because the computation is a length-indexed
    fixpoint over markings, not a run enumeration.
    """
    graph = reachability_graph(wf, state_budget)
    if graph.truncated:
        raise BudgetExceeded(graph.truncated)
    final = Marking.of([wf.sink])

    silent_succ: dict[Marking, list[Marking]] = {m: [] for m in graph.states}
    visible_succ: dict[Marking, list[tuple[str, Marking]]] = {m: [] for m in graph.states}
    for m, t, m2 in sorted(graph.edges, key=lambda e: (e[0].counts, e[1])):
        label = wf.label(t)
        if label is None:
            silent_succ[m].append(m2)
        else:
            visible_succ[m].append((label, m2))

    # silent closure per marking
    closure: dict[Marking, frozenset[Marking]] = {}
    for m in graph.states:
        seen = {m}
        stack = [m]
        while stack:
            x = stack.pop()
            for y in silent_succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        closure[m] = frozenset(seen)

    # lang[k][m] = traces of visible length <= k completing from m
    empty: frozenset[tuple[str, ...]] = frozenset()
    base = {m: (frozenset({()}) if final in closure[m] else empty)
            for m in graph.states}
    lang = base
    for _ in range(max_visible_len):
        nxt = {}
        for m in graph.states:
            traces = set(base[m])
            for x in closure[m]:
                for a, m2 in visible_succ[x]:
                    traces.update((a,) + rest for rest in lang[m2])
            nxt[m] = frozenset(traces)
        lang = nxt
    return TraceSet(lang[graph.initial], max_visible_len)


@dataclass(frozen=True)
class EqualityVerdict:
    equal: bool
    bound: int
    counterexample: Optional[tuple[str, ...]] = None
    missing_from: Optional[str] = None  # "first" | "second"

    def __bool__(self):
        return self.equal


def bounded_equal(a: TraceSet, b: TraceSet) -> EqualityVerdict:
    """Set equality at the common bound, with a first counterexample."""
    bound = min(a.bound, b.bound)
    ra, rb = a.restricted(bound).traces, b.restricted(bound).traces
    if ra == rb:
        return EqualityVerdict(True, bound)
    only_a = sorted(ra - rb)
    only_b = sorted(rb - ra)
    if only_a and (not only_b or only_a[0] <= only_b[0]):
        return EqualityVerdict(False, bound, only_a[0], "second")
    return EqualityVerdict(False, bound, only_b[0], "first")
