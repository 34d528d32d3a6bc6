"""POWL 2.0 model types, semantics, and the model-to-net construction.

A model is a leaf (one transition), a partial order over submodels, or a
choice graph over submodels. Choice graphs may be cyclic; partial orders
are strict (irreflexive and transitive).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .behavior import TraceSet
from .nets import PetriNet, WorkflowNet, rename_net, require_wf_net, substitute

START = "start"
END = "end"

CgNode = Union[int, str]  # child index, or the START/END sentinels


class PowlStructureError(ValueError):
    pass


def _close_transitively(pairs: set[tuple[int, int]]) -> set[tuple[int, int]]:
    adj: dict[int, set[int]] = {}
    for a, b in pairs:
        adj.setdefault(a, set()).add(b)
    closed = set()
    for a, direct in adj.items():
        seen: set[int] = set()
        stack = list(direct)
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(adj.get(x, ()))
        closed.update((a, x) for x in seen)
    return closed


@dataclass(frozen=True)
class OrderStruct:
    """A strict partial order over child indices 0..n-1 (stored closed)."""

    child_count: int
    relation: frozenset[tuple[int, int]]

    @staticmethod
    def of(child_count: int, pairs: Iterable[tuple[int, int]]) -> "OrderStruct":
        if child_count < 2:
            raise PowlStructureError("partial order needs at least 2 children")
        pairs = set(pairs)
        for a, b in pairs:
            if not (0 <= a < child_count and 0 <= b < child_count):
                raise PowlStructureError(f"order pair ({a}, {b}) out of range")
        closed = _close_transitively(pairs)
        for a, b in closed:
            if a == b:
                raise PowlStructureError(f"order relation is cyclic at index {a}")
        return OrderStruct(child_count, frozenset(closed))

    def covering_pairs(self) -> list[tuple[int, int]]:
        """Transitive reduction of the relation."""
        return sorted((a, b) for a, b in self.relation
                      if not any((a, c) in self.relation and (c, b) in self.relation
                                 for c in range(self.child_count)))

    def minimal(self) -> list[int]:
        return [i for i in range(self.child_count)
                if not any((j, i) in self.relation for j in range(self.child_count))]

    def maximal(self) -> list[int]:
        return [i for i in range(self.child_count)
                if not any((i, j) in self.relation for j in range(self.child_count))]


@dataclass(frozen=True)
class ChoiceGraphStruct:
    """A directed graph over child indices plus artificial start/end nodes."""

    child_count: int
    edges: frozenset[tuple[CgNode, CgNode]]

    @staticmethod
    def of(child_count: int, edges: Iterable[tuple[CgNode, CgNode]]) -> "ChoiceGraphStruct":
        cg = ChoiceGraphStruct(child_count, frozenset(edges))
        problem = cg.problem()
        if problem:
            raise PowlStructureError(problem)
        return cg

    def problem(self) -> Optional[str]:
        if self.child_count < 2:
            return "choice graph needs at least 2 children"
        nodes = set(range(self.child_count)) | {START, END}
        for u, v in self.edges:
            if u not in nodes or v not in nodes:
                return f"edge ({u}, {v}) references an unknown node"
        if (START, END) in self.edges:
            return "direct start-to-end edge is not allowed"
        if any(v == START for _, v in self.edges):
            return "start node has an incoming edge"
        if any(u == END for u, _ in self.edges):
            return "end node has an outgoing edge"
        for i in range(self.child_count):
            if not any(v == i for _, v in self.edges):
                return f"child {i} has no incoming edge"
            if not any(u == i for u, _ in self.edges):
                return f"child {i} has no outgoing edge"
        fwd = self._reach(START, forward=True)
        bwd = self._reach(END, forward=False)
        off = sorted(str(i) for i in range(self.child_count)
                     if i not in fwd or i not in bwd)
        if off:
            return f"children off every start-to-end path: {', '.join(off)}"
        if END not in fwd:
            return "end node unreachable from start"
        return None

    def _reach(self, node: CgNode, forward: bool) -> set[CgNode]:
        seen = {node}
        stack = [node]
        while stack:
            x = stack.pop()
            for u, v in self.edges:
                nxt = v if forward and u == x else (u if not forward and v == x else None)
                if nxt is not None and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def successors(self, node: CgNode) -> list[CgNode]:
        def key(n):
            return (0, n) if isinstance(n, int) else (1, n)
        return sorted((v for u, v in self.edges if u == node), key=key)


@dataclass(frozen=True)
class Leaf:
    transition: str
    label: Optional[str]  # None = silent


@dataclass(frozen=True)
class PartialOrder:
    order: OrderStruct
    children: tuple["PowlNode", ...]


@dataclass(frozen=True)
class ChoiceGraph:
    graph: ChoiceGraphStruct
    children: tuple["PowlNode", ...]


PowlNode = Union[Leaf, PartialOrder, ChoiceGraph]


@dataclass(frozen=True)
class PowlDiagnostic:
    path: tuple[int, ...]  # child indices from the root to the bad node
    message: str

    def __str__(self):
        where = "/".join(map(str, self.path)) or "root"
        return f"{self.message} (at {where})"


def validate_powl(model: PowlNode, _path: tuple[int, ...] = ()) -> Optional[PowlDiagnostic]:
    """Return None if valid, else a diagnostic with the offending node path."""
    if isinstance(model, Leaf):
        if model.label == "":
            return PowlDiagnostic(_path, "visible label must be non-empty")
        return None
    if isinstance(model, PartialOrder):
        if len(model.children) != model.order.child_count:
            return PowlDiagnostic(_path, "child count does not match the order")
        for a, b in model.order.relation:
            if a == b:
                return PowlDiagnostic(_path, "order relation is not irreflexive")
    elif isinstance(model, ChoiceGraph):
        if len(model.children) != model.graph.child_count:
            return PowlDiagnostic(_path, "child count does not match the graph")
        problem = model.graph.problem()
        if problem:
            return PowlDiagnostic(_path, problem)
    else:
        return PowlDiagnostic(_path, f"not a POWL node: {model!r}")
    for i, child in enumerate(model.children):
        bad = validate_powl(child, _path + (i,))
        if bad:
            return bad
    return None


def leaves(model: PowlNode) -> list[Leaf]:
    if isinstance(model, Leaf):
        return [model]
    return [leaf for child in model.children for leaf in leaves(child)]


def count_nodes(model: PowlNode) -> tuple[int, int, int]:
    """(leaves, partial orders, choice graphs) in the tree."""
    if isinstance(model, Leaf):
        return (1, 0, 0)
    po = 1 if isinstance(model, PartialOrder) else 0
    totals = [count_nodes(c) for c in model.children]
    return (sum(t[0] for t in totals),
            po + sum(t[1] for t in totals),
            (1 - po) + sum(t[2] for t in totals))


# ---------------------------------------------------------------------------
# semantics


def paths_bounded(cg: ChoiceGraphStruct, max_path_len: int) -> frozenset[tuple[int, ...]]:
    """All start-to-end index sequences of length at most ``max_path_len``."""
    if max_path_len < 0:
        raise ValueError("max_path_len must be >= 0")
    found = set()
    frontier: list[tuple[CgNode, tuple[int, ...]]] = [(START, ())]
    while frontier:
        node, prefix = frontier.pop()
        for nxt in cg.successors(node):
            if nxt == END:
                if prefix:
                    found.add(prefix)
            elif len(prefix) < max_path_len:
                frontier.append((nxt, prefix + (nxt,)))
    return frozenset(found)


def shuffle(seqs: list[tuple[str, ...]], order: OrderStruct) -> frozenset[tuple[str, ...]]:
    """Order-preserving interleavings of the given sequences.

    A sequence may start contributing only once every sequence ordered
    before it has been fully consumed.
    """
    if len(seqs) != order.child_count:
        raise ValueError("sequence count does not match the order arity")
    n = len(seqs)
    preds = [[j for j in range(n) if (j, i) in order.relation] for i in range(n)]
    total = sum(len(s) for s in seqs)
    results = set()

    def extend(positions: tuple[int, ...], acc: tuple[str, ...]):
        if len(acc) == total:
            results.add(acc)
            return
        for i in range(n):
            if positions[i] >= len(seqs[i]):
                continue
            if any(positions[j] < len(seqs[j]) for j in preds[i]):
                continue
            nxt = list(positions)
            nxt[i] += 1
            extend(tuple(nxt), acc + (seqs[i][positions[i]],))

    extend((0,) * n, ())
    return frozenset(results)


def _min_visible_len(model: PowlNode) -> int:
    if isinstance(model, Leaf):
        return 0 if model.label is None else 1
    if isinstance(model, PartialOrder):
        return sum(_min_visible_len(c) for c in model.children)
    mins = [_min_visible_len(c) for c in model.children]
    # shortest start-to-end path weight in the choice graph
    best: dict[object, int] = {START: 0}
    changed = True
    while changed:
        changed = False
        for u, v in model.graph.edges:
            if u in best:
                w = best[u] + (mins[v] if isinstance(v, int) else 0)
                if v not in best or w < best[v]:
                    best[v] = w
                    changed = True
    return best.get(END, 0)


def language_bounded(model: PowlNode, max_visible_len: int) -> TraceSet:
    """The model's language restricted to traces of visible length <= bound."""
    bad = validate_powl(model)
    if bad:
        raise PowlStructureError(str(bad))
    return TraceSet(_lang(model, max_visible_len), max_visible_len)


def _concat_bounded(a: frozenset, b: frozenset, bound: int) -> frozenset:
    return frozenset(x + y for x in a for y in b if len(x) + len(y) <= bound)


def _lang(model: PowlNode, bound: int) -> frozenset[tuple[str, ...]]:
    if isinstance(model, Leaf):
        if model.label is None:
            return frozenset({()})
        return frozenset({(model.label,)}) if bound >= 1 else frozenset()
    if isinstance(model, PartialOrder):
        child_langs = [_lang(c, bound) for c in model.children]
        out = set()
        for combo in itertools.product(*child_langs):
            if sum(len(s) for s in combo) <= bound:
                out |= shuffle(list(combo), model.order)
        return frozenset(out)

    # choice graph: fixpoint of prefix sets per graph node
    child_langs = [_lang(c, bound) for c in model.children]
    cg = model.graph
    start_set = frozenset({()})
    after: dict[int, frozenset] = {i: frozenset() for i in range(cg.child_count)}
    changed = True
    while changed:
        changed = False
        for i in range(cg.child_count):
            incoming = set()
            for u, v in cg.edges:
                if v != i:
                    continue
                src = start_set if u == START else after[u]
                incoming |= _concat_bounded(src, child_langs[i], bound)
            merged = after[i] | frozenset(incoming)
            if merged != after[i]:
                after[i] = merged
                changed = True
    out = set()
    for u, v in cg.edges:
        if v == END and u != START:
            out |= after[u]
    return frozenset(out)


# ---------------------------------------------------------------------------
# model -> net construction


class _Ids:
    def __init__(self):
        self.n = 0

    def place(self) -> str:
        self.n += 1
        return f"p{self.n}"

    def trans(self) -> str:
        self.n += 1
        return f"t{self.n}"


def powl_to_net(model: PowlNode) -> WorkflowNet:
    """Build a safe, sound workflow net with the model's language.

    The construction favors clarity over minimality: composites get silent
    boundary transitions and each child fragment is inlined via
    substitutive composition.
    """
    bad = validate_powl(model)
    if bad:
        raise PowlStructureError(str(bad))
    ids = _Ids()
    wf = _build(model, ids)
    return require_wf_net(wf.net)


def _fresh_copy(wf: WorkflowNet, ids: _Ids) -> WorkflowNet:
    mapping = {}
    for p in sorted(wf.places):
        mapping[p] = ids.place()
    for t in sorted(wf.transitions):
        mapping[t] = ids.trans()
    return WorkflowNet(rename_net(wf.net, mapping),
                       mapping[wf.source], mapping[wf.sink])


def _base_net(label: Optional[str], ids: _Ids) -> WorkflowNet:
    src, snk, t = ids.place(), ids.place(), ids.trans()
    net = PetriNet.build([src, snk], {t: label}, [(src, t), (t, snk)])
    return WorkflowNet(net, src, snk)


def _build(model: PowlNode, ids: _Ids) -> WorkflowNet:
    if isinstance(model, Leaf):
        return _base_net(model.label, ids)

    n = len(model.children)
    placeholders = [f"child{i}@{id(model):x}" for i in range(n)]

    if isinstance(model, PartialOrder):
        order = model.order
        src, snk = ids.place(), ids.place()
        t_open, t_close = ids.trans(), ids.trans()
        labeling = {t_open: None, t_close: None}
        for x in placeholders:
            labeling[x] = None
        places = {src, snk}
        flow = {(src, t_open), (t_close, snk)}
        for a, b in order.covering_pairs():
            p = ids.place()
            places.add(p)
            flow |= {(placeholders[a], p), (p, placeholders[b])}
        for i in order.minimal():
            p = ids.place()
            places.add(p)
            flow |= {(t_open, p), (p, placeholders[i])}
        for i in order.maximal():
            p = ids.place()
            places.add(p)
            flow |= {(placeholders[i], p), (p, t_close)}
        skeleton = PetriNet.build(places, labeling, flow)
    else:
        cg = model.graph
        src, snk = ids.place(), ids.place()
        entry = {i: ids.place() for i in range(n)}
        exit_ = {i: ids.place() for i in range(n)}
        labeling = {x: None for x in placeholders}
        places = {src, snk} | set(entry.values()) | set(exit_.values())
        flow = set()
        for i, x in enumerate(placeholders):
            flow |= {(entry[i], x), (x, exit_[i])}
        for u, v in sorted(cg.edges, key=str):
            e = ids.trans()
            labeling[e] = None
            p_from = src if u == START else exit_[u]
            p_to = snk if v == END else entry[v]
            flow |= {(p_from, e), (e, p_to)}
        skeleton = PetriNet.build(places, labeling, flow)

    result = skeleton
    for i, child in enumerate(model.children):
        sub = _fresh_copy(_build(child, ids), ids)
        result = substitute(result, placeholders[i], sub)
    return require_wf_net(result)
