"""JSON serialization for POWL models.

The document is a tree: every node carries a "kind" tag. Transitions hold
a label ("label": null means silent). Partial orders hold a children list
and an "order" list of 0-based index pairs. Choice graphs hold a children
list and an "edges" list over child indices plus the reserved string
tokens "start" and "end".
"""

from __future__ import annotations

import json

from .powl import (
    END,
    START,
    ChoiceGraph,
    ChoiceGraphStruct,
    Leaf,
    OrderStruct,
    PartialOrder,
    PowlNode,
    PowlStructureError,
    validate_powl,
)


def _to_doc(model: PowlNode) -> dict:
    if isinstance(model, Leaf):
        return {"kind": "transition", "id": model.transition, "label": model.label}
    if isinstance(model, PartialOrder):
        return {"kind": "partial_order",
                "children": [_to_doc(c) for c in model.children],
                "order": [list(p) for p in sorted(model.order.relation)]}
    return {"kind": "choice_graph",
            "children": [_to_doc(c) for c in model.children],
            "edges": [[u, v] for u, v in sorted(model.graph.edges, key=_edge_key)]}


def _edge_key(edge):
    def k(n):
        return (0, "") if n == START else (2, "") if n == END else (1, f"{n:08d}")
    return (k(edge[0]), k(edge[1]))


def serialize_powl(model: PowlNode) -> bytes:
    bad = validate_powl(model)
    if bad:
        raise PowlStructureError(str(bad))
    return (json.dumps(_to_doc(model), indent=2, sort_keys=True) + "\n").encode("utf-8")


def _from_doc(doc, path="root") -> PowlNode:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise PowlStructureError(f"{path}: expected an object with a 'kind' tag")
    kind = doc["kind"]
    if kind == "transition":
        label = doc.get("label")
        if label is not None and not isinstance(label, str):
            raise PowlStructureError(f"{path}: label must be a string or null")
        return Leaf(str(doc.get("id", "t")), label)
    children_doc = doc.get("children")
    if not isinstance(children_doc, list):
        raise PowlStructureError(f"{path}: missing children list")
    children = tuple(_from_doc(c, f"{path}/{i}") for i, c in enumerate(children_doc))
    n = len(children)
    if kind == "partial_order":
        pairs = doc.get("order")
        if not isinstance(pairs, list):
            raise PowlStructureError(f"{path}: missing order list")
        try:
            order = OrderStruct.of(n, [(int(a), int(b)) for a, b in pairs])
        except (TypeError, ValueError) as exc:
            raise PowlStructureError(f"{path}: bad order list: {exc}") from exc
        return PartialOrder(order, children)
    if kind == "choice_graph":
        edges_doc = doc.get("edges")
        if not isinstance(edges_doc, list):
            raise PowlStructureError(f"{path}: missing edges list")
        edges = []
        for e in edges_doc:
            if not (isinstance(e, list) and len(e) == 2):
                raise PowlStructureError(f"{path}: edge entries must be pairs")
            edges.append(tuple(_node_ref(x, n, path) for x in e))
        try:
            graph = ChoiceGraphStruct.of(n, edges)
        except PowlStructureError as exc:
            raise PowlStructureError(f"{path}: {exc}") from exc
        return ChoiceGraph(graph, children)
    raise PowlStructureError(f"{path}: unknown kind {kind!r}")


def _node_ref(x, n: int, path: str):
    if x == START or x == END:
        return x
    if isinstance(x, int) and 0 <= x < n:
        return x
    raise PowlStructureError(f"{path}: bad edge endpoint {x!r}")


def parse_powl(data: bytes) -> PowlNode:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise PowlStructureError(f"malformed document: {exc}") from exc
    model = _from_doc(doc)
    bad = validate_powl(model)
    if bad:
        raise PowlStructureError(str(bad))
    return model
