"""Petri net and workflow net data model with structural predicates.

Transitions carry an optional label; ``None`` marks a silent transition.
All collections are frozen after construction and all iteration happens in
sorted identifier order, so every derived artifact is reproducible.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

Arc = tuple[str, str]

SILENT = None  # label value of a silent transition


class NetStructureError(ValueError):
    """Raised when a net violates a structural precondition."""


class IsomorphismBudgetExceeded(RuntimeError):
    """Raised when the isomorphism search exceeds its node budget."""


@dataclass(frozen=True)
class PetriNet:
    """A place/transition net with a labeling function on transitions."""

    places: frozenset[str]
    transitions: frozenset[str]
    labeling: Mapping[str, Optional[str]]
    flow: frozenset[Arc]

    def __post_init__(self):
        if self.places & self.transitions:
            raise NetStructureError(
                f"places and transitions overlap: {sorted(self.places & self.transitions)}")
        nodes = self.places | self.transitions
        for u, v in self.flow:
            if u not in nodes or v not in nodes:
                raise NetStructureError(f"arc ({u}, {v}) references unknown node")
            if (u in self.places) == (v in self.places):
                raise NetStructureError(f"arc ({u}, {v}) is not bipartite")
        missing = self.transitions - set(self.labeling)
        if missing:
            raise NetStructureError(f"unlabeled transitions: {sorted(missing)}")

    @staticmethod
    def build(places: Iterable[str],
              labeling: Mapping[str, Optional[str]],
              flow: Iterable[Arc]) -> "PetriNet":
        """Convenience constructor; transitions are the labeling's keys."""
        return PetriNet(frozenset(places), frozenset(labeling),
                        dict(labeling), frozenset(flow))

    def label(self, t: str) -> Optional[str]:
        return self.labeling[t]

    def is_silent(self, t: str) -> bool:
        return self.labeling[t] is None

    def _adjacency_maps(self) -> tuple[dict, dict]:
        """Lazily built (preset, postset) maps, cached on the instance."""
        cached = getattr(self, "_adj", None)
        if cached is None:
            pre: dict[str, set[str]] = {n: set() for n in self.places | self.transitions}
            post: dict[str, set[str]] = {n: set() for n in self.places | self.transitions}
            for u, v in self.flow:
                post[u].add(v)
                pre[v].add(u)
            cached = ({n: frozenset(s) for n, s in pre.items()},
                      {n: frozenset(s) for n, s in post.items()})
            object.__setattr__(self, "_adj", cached)
        return cached


@dataclass(frozen=True)
class WorkflowNet:
    """A Petri net with designated unique source and sink places."""

    net: PetriNet
    source: str
    sink: str

    @property
    def places(self) -> frozenset[str]:
        return self.net.places

    @property
    def transitions(self) -> frozenset[str]:
        return self.net.transitions

    @property
    def flow(self) -> frozenset[Arc]:
        return self.net.flow

    def label(self, t: str) -> Optional[str]:
        return self.net.labeling[t]


@dataclass(frozen=True)
class Marking:
    """A multiset of places; counts are strictly positive."""

    counts: tuple[tuple[str, int], ...]

    @staticmethod
    def of(places: Iterable[str]) -> "Marking":
        c = Counter(places)
        return Marking(tuple(sorted(c.items())))

    @staticmethod
    def from_counts(counts: Mapping[str, int]) -> "Marking":
        return Marking(tuple(sorted((p, n) for p, n in counts.items() if n > 0)))

    def count(self, place: str) -> int:
        for p, n in self.counts:
            if p == place:
                return n
        return 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)

    def places_set(self) -> frozenset[str]:
        return frozenset(p for p, _ in self.counts)

    def is_safe(self) -> bool:
        return all(n <= 1 for _, n in self.counts)

    def total(self) -> int:
        return sum(n for _, n in self.counts)

    def __str__(self):
        return "[" + ", ".join(p if n == 1 else f"{p}^{n}" for p, n in self.counts) + "]"


@dataclass(frozen=True)
class TransitionPartition:
    """A partition of a transition set into disjoint non-empty parts."""

    parts: tuple[frozenset[str], ...]
    _index: Mapping[str, int] = field(repr=False, default=None)

    @staticmethod
    def of(parts: Iterable[Iterable[str]]) -> "TransitionPartition":
        frozen = tuple(sorted((frozenset(p) for p in parts), key=lambda s: min(s)))
        index: dict[str, int] = {}
        for i, part in enumerate(frozen):
            if not part:
                raise ValueError("empty part in partition")
            for t in part:
                if t in index:
                    raise ValueError(f"transition {t} in two parts")
                index[t] = i
        return TransitionPartition(frozen, index)

    def part_of(self, t: str) -> frozenset[str]:
        return self.parts[self._index[t]]

    def index_of(self, t: str) -> int:
        return self._index[t]

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


# ---------------------------------------------------------------------------
# structural notations


def _check_node(net: PetriNet, node: str):
    if node not in net.places and node not in net.transitions:
        raise NetStructureError(f"unknown node: {node}")


def preset(net: PetriNet, node: str) -> frozenset[str]:
    """Nodes with an arc into ``node``."""
    _check_node(net, node)
    return net._adjacency_maps()[0][node]


def postset(net: PetriNet, node: str) -> frozenset[str]:
    """Nodes reached by an arc leaving ``node``."""
    _check_node(net, node)
    return net._adjacency_maps()[1][node]


def project_places(net: PetriNet, subset: Iterable[str]) -> frozenset[str]:
    """Places adjacent to at least one transition of ``subset``."""
    sub = frozenset(subset)
    unknown = sub - net.transitions
    if unknown:
        raise NetStructureError(f"unknown transitions: {sorted(unknown)}")
    touched = set()
    for u, v in net.flow:
        if u in sub:
            touched.add(v)
        elif v in sub:
            touched.add(u)
    return frozenset(touched)


def project_flow(net: PetriNet, places: Iterable[str],
                 transitions: Iterable[str]) -> frozenset[Arc]:
    """Arcs of the net with both endpoints inside the given subsets."""
    ps, ts = frozenset(places), frozenset(transitions)
    if ps - net.places or ts - net.transitions:
        raise NetStructureError("projection subsets exceed the net's node sets")
    return frozenset((u, v) for u, v in net.flow
                     if (u in ps and v in ts) or (u in ts and v in ps))


def _adjacency(net: PetriNet) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {n: [] for n in sorted(net.places | net.transitions)}
    for u, v in sorted(net.flow):
        adj[u].append(v)
    return adj


def _reachable_from(adj: Mapping[str, list[str]], start: Iterable[str]) -> set[str]:
    seen = set(start)
    stack = list(seen)
    while stack:
        n = stack.pop()
        for m in adj[n]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return seen


def transition_reachability(net: PetriNet, reflexive: bool = False) -> frozenset[tuple[str, str]]:
    """Pairs (t, t') connected by a non-empty directed path; optionally reflexive."""
    adj = _adjacency(net)
    pairs = set()
    for t in sorted(net.transitions):
        reached = _reachable_from(adj, adj[t])  # strictly forward: start past t
        for t2 in reached:
            if t2 in net.transitions:
                pairs.add((t, t2))
        if reflexive:
            pairs.add((t, t))
    return frozenset(pairs)


def entry_points(wf: WorkflowNet, subset: Iterable[str]) -> frozenset[str]:
    """Boundary places through which ``subset`` receives control."""
    sub = frozenset(subset)
    outside = wf.transitions - sub
    result = set()
    for p in wf.places:
        if postset(wf.net, p) & sub and (p == wf.source or preset(wf.net, p) & outside):
            result.add(p)
    return frozenset(result)


def exit_points(wf: WorkflowNet, subset: Iterable[str]) -> frozenset[str]:
    """Boundary places through which ``subset`` hands control onward."""
    sub = frozenset(subset)
    outside = wf.transitions - sub
    result = set()
    for p in wf.places:
        if preset(wf.net, p) & sub and (p == wf.sink or postset(wf.net, p) & outside):
            result.add(p)
    return frozenset(result)


def places_equivalent(net: PetriNet, subset: Iterable[str], p: str, p2: str) -> bool:
    """True iff p and p2 connect to ``subset`` identically on both sides."""
    sub = frozenset(subset)
    return (preset(net, p) & sub == preset(net, p2) & sub
            and postset(net, p) & sub == postset(net, p2) & sub)


# ---------------------------------------------------------------------------
# workflow net validation


@dataclass(frozen=True)
class WfDiagnostic:
    """Why a Petri net is not a workflow net."""

    clause: str  # NoSource, MultipleSources, NoSink, MultipleSinks, DisconnectedNode
    nodes: tuple[str, ...]

    def __str__(self):
        return f"{self.clause}: {', '.join(self.nodes)}"


def validate_wf_net(net: PetriNet) -> WorkflowNet | WfDiagnostic:
    """Return the validated WorkflowNet or a diagnostic naming the violation."""
    sources = sorted(p for p in net.places if not preset(net, p))
    sinks = sorted(p for p in net.places if not postset(net, p))
    if not sources:
        return WfDiagnostic("NoSource", ())
    if len(sources) > 1:
        return WfDiagnostic("MultipleSources", tuple(sources))
    if not sinks:
        return WfDiagnostic("NoSink", ())
    if len(sinks) > 1:
        return WfDiagnostic("MultipleSinks", tuple(sinks))
    source, sink = sources[0], sinks[0]
    adj = _adjacency(net)
    radj: dict[str, list[str]] = {n: [] for n in adj}
    for u, v in sorted(net.flow):
        radj[v].append(u)
    fwd = _reachable_from(adj, [source])
    bwd = _reachable_from(radj, [sink])
    off_path = sorted((net.places | net.transitions) - (fwd & bwd))
    if off_path:
        return WfDiagnostic("DisconnectedNode", tuple(off_path))
    return WorkflowNet(net, source, sink)


def require_wf_net(net: PetriNet) -> WorkflowNet:
    result = validate_wf_net(net)
    if isinstance(result, WfDiagnostic):
        raise NetStructureError(f"not a workflow net ({result})")
    return result


def is_free_choice(net: PetriNet) -> bool:
    presets = {t: preset(net, t) for t in net.transitions}
    ts = sorted(net.transitions)
    for i, t1 in enumerate(ts):
        for t2 in ts[i + 1:]:
            if presets[t1] & presets[t2] and presets[t1] != presets[t2]:
                return False
    return True


def is_state_machine(net: PetriNet) -> bool:
    return all(len(preset(net, t)) <= 1 and len(postset(net, t)) <= 1
               for t in net.transitions)


def is_marked_graph(net: PetriNet) -> bool:
    return all(len(preset(net, p)) <= 1 and len(postset(net, p)) <= 1
               for p in net.places)


# ---------------------------------------------------------------------------
# isomorphism


def _signatures(net: PetriNet, rounds: int = 2) -> dict[str, tuple]:
    """Label/degree signatures refined by neighborhood hashing."""
    pres = {n: preset(net, n) for n in net.places | net.transitions}
    posts = {n: postset(net, n) for n in net.places | net.transitions}
    sig: dict[str, tuple] = {}
    for n in net.places | net.transitions:
        if n in net.transitions:
            label = net.labeling[n]
            kind = ("T", 0, "") if label is None else ("T", 1, label)
        else:
            kind = ("P", 0, "")
        sig[n] = (kind, len(pres[n]), len(posts[n]))
    for _ in range(rounds):
        nxt = {}
        for n in sig:
            nxt[n] = (sig[n],
                      tuple(sorted(sig[m] for m in pres[n])),
                      tuple(sorted(sig[m] for m in posts[n])))
        sig = nxt
    return sig


def isomorphic(n1: PetriNet, n2: PetriNet, budget: int = 1_000_000) -> bool:
    """Label- and arc-preserving bijection test.

    Cheap invariants reject most non-isomorphic pairs; the remaining search
    is a backtracking match over signature classes, capped at ``budget``
    visited assignments.
    """
    if (len(n1.places) != len(n2.places)
            or len(n1.transitions) != len(n2.transitions)
            or len(n1.flow) != len(n2.flow)):
        return False
    sig1, sig2 = _signatures(n1), _signatures(n2)
    if sorted(sig1.values()) != sorted(sig2.values()):
        return False

    by_sig2: dict[tuple, list[str]] = {}
    for n, s in sig2.items():
        by_sig2.setdefault(s, []).append(n)
    # match rarest signatures first to prune early
    order = sorted(sig1, key=lambda n: (len(by_sig2[sig1[n]]), n))
    pres1 = {n: preset(n1, n) for n in sig1}
    posts1 = {n: postset(n1, n) for n in sig1}
    pres2 = {n: preset(n2, n) for n in sig2}
    posts2 = {n: postset(n2, n) for n in sig2}

    mapping: dict[str, str] = {}
    used: set[str] = set()
    visited = 0

    def backtrack(i: int) -> bool:
        nonlocal visited
        if i == len(order):
            return True
        a = order[i]
        for b in sorted(by_sig2[sig1[a]]):
            if b in used:
                continue
            visited += 1
            if visited > budget:
                raise IsomorphismBudgetExceeded(
                    f"isomorphism search exceeded budget of {budget}")
            ok = all(mapping[m] in pres2[b] for m in pres1[a] if m in mapping) and \
                all(mapping[m] in posts2[b] for m in posts1[a] if m in mapping)
            if not ok:
                continue
            mapping[a] = b
            used.add(b)
            if backtrack(i + 1):
                return True
            del mapping[a]
            used.remove(b)
        return False

    return backtrack(0)


# ---------------------------------------------------------------------------
# substitutive composition


def substitute(host: PetriNet, t: str, sub: WorkflowNet) -> PetriNet:
    """Replace transition ``t`` of the host by an entire workflow net.

    The sub-net's source and sink places disappear; their adjacent
    transitions are rewired to t's former neighbor places.
    """
    if t not in host.transitions:
        raise NetStructureError(f"unknown transition: {t}")
    collision = (host.places | host.transitions) & (sub.places | sub.transitions)
    if collision:
        raise NetStructureError(f"identifier collision: {sorted(collision)}")

    places = host.places | (sub.places - {sub.source, sub.sink})
    transitions = (host.transitions - {t}) | sub.transitions
    labeling = {**{u: host.labeling[u] for u in host.transitions if u != t},
                **dict(sub.net.labeling)}
    flow = {(u, v) for u, v in host.flow if u != t and v != t}
    flow |= {(u, v) for u, v in sub.flow if u != sub.source and v != sub.sink}
    first = postset(sub.net, sub.source)
    last = preset(sub.net, sub.sink)
    for p in preset(host, t):
        flow |= {(p, t2) for t2 in first}
    for p in postset(host, t):
        flow |= {(t2, p) for t2 in last}
    return PetriNet(frozenset(places), frozenset(transitions), labeling, frozenset(flow))


def rename_net(net: PetriNet, mapping: Mapping[str, str]) -> PetriNet:
    """Apply an injective identifier renaming."""
    def m(n: str) -> str:
        return mapping.get(n, n)
    return PetriNet(frozenset(m(p) for p in net.places),
                    frozenset(m(t) for t in net.transitions),
                    {m(t): l for t, l in net.labeling.items()},
                    frozenset((m(u), m(v)) for u, v in net.flow))
