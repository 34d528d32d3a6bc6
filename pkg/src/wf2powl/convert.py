"""Recursive conversion of a safe and sound workflow net into a POWL model.

The converter tries, at every level: the single-transition base case, then
a partial-order decomposition, then a choice-graph decomposition. Each
decomposition must make structural progress (no projection isomorphic to
the whole net). If nothing applies, the level is irreducible and the
conversion fails with full diagnostics.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .behavior import EqualityVerdict, bounded_equal, check_safe, check_sound, enumerate_language
from .decompose import (
    PartitionVerdict,
    cg_partition,
    cg_project,
    execution_flow,
    execution_order,
    is_concurrency_hiding,
    is_conflict_hiding,
    po_partition,
    po_project,
)
from .nets import TransitionPartition, WorkflowNet, isomorphic
from .powl import ChoiceGraph, Leaf, PartialOrder, PowlNode, count_nodes, language_bounded


class InternalInvariant(RuntimeError):
    """A validated partition violated a projection contract (a bug, not an input problem)."""


PROGRESS_GUARD = "projection isomorphic to the net (no structural progress)"
TRIVIAL_PARTITION = "partition has a single part"


@dataclass(frozen=True)
class ConversionOptions:
    preprocess: bool = True
    fall_through_policy: str = "Fail"
    verify_projections: bool = False
    reflexive_reach: bool = True

    def __post_init__(self):
        if self.fall_through_policy != "Fail":
            raise ValueError("only the Fail fall-through policy is implemented")


@dataclass(frozen=True)
class Failure:
    """An irreducible sub-net with the evidence of both failed attempts."""

    fragment: WorkflowNet
    po_parts: TransitionPartition
    po_reason: str
    cg_parts: TransitionPartition
    cg_reason: str

    def __str__(self):
        return (f"irreducible fragment with {len(self.fragment.transitions)} transitions; "
                f"partial-order attempt: {self.po_reason}; "
                f"choice-graph attempt: {self.cg_reason}")


@dataclass(frozen=True)
class ConversionStats:
    depth: int = 0
    leaf_nodes: int = 0
    po_nodes: int = 0
    cg_nodes: int = 0
    wall_ms: float = 0.0


@dataclass(frozen=True)
class ConversionReport:
    result: Optional[PowlNode]
    failure: Optional[Failure]
    stats: ConversionStats
    equivalence: Optional[EqualityVerdict] = None

    @property
    def ok(self) -> bool:
        return self.result is not None


def is_base_case(wf: WorkflowNet) -> Optional[str]:
    """The single transition of a minimal source->t->sink net, if that is the shape."""
    if len(wf.transitions) != 1 or len(wf.places) != 2:
        return None
    (t,) = wf.transitions
    if wf.flow == frozenset({(wf.source, t), (t, wf.sink)}):
        return t
    return None


class _Irreducible(Exception):
    def __init__(self, failure: Failure):
        self.failure = failure


def _verify_projection(sub: WorkflowNet):
    safe = check_safe(sub)
    if not safe.is_safe:
        raise InternalInvariant(f"projection is not safe: {safe}")
    sound = check_sound(sub)
    if not sound.is_sound:
        raise InternalInvariant(f"projection is not sound: {sound}")


def _reason(parts: TransitionPartition, verdict: Optional[PartitionVerdict],
            progress_failed: bool) -> str:
    if len(parts) <= 1:
        return TRIVIAL_PARTITION
    if verdict is not None and not verdict.ok:
        return str(verdict)
    if progress_failed:
        return PROGRESS_GUARD
    raise InternalInvariant("no failure reason on a failed attempt")


def _convert(wf: WorkflowNet, opts: ConversionOptions, depth: int) -> tuple[PowlNode, int]:
    t = is_base_case(wf)
    if t is not None:
        return Leaf(t, wf.label(t)), depth

    po_parts = po_partition(wf, reflexive=opts.reflexive_reach)
    po_verdict = None
    po_progress_failed = False
    if len(po_parts) > 1:
        po_verdict = is_conflict_hiding(wf, po_parts)
        if po_verdict.ok:
            subs = [po_project(wf, part) for part in po_parts]
            if any(isomorphic(s.net, wf.net) for s in subs):
                po_progress_failed = True
            else:
                if opts.verify_projections:
                    for s in subs:
                        _verify_projection(s)
                order = execution_order(wf, po_parts)
                children, max_depth = [], depth
                for s in subs:
                    child, d = _convert(s, opts, depth + 1)
                    children.append(child)
                    max_depth = max(max_depth, d)
                return PartialOrder(order, tuple(children)), max_depth

    cg_parts = cg_partition(wf)
    cg_verdict = None
    cg_progress_failed = False
    if len(cg_parts) > 1:
        cg_verdict = is_concurrency_hiding(wf, cg_parts)
        if cg_verdict.ok:
            subs = [cg_project(wf, part) for part in cg_parts]
            if any(isomorphic(s.net, wf.net) for s in subs):
                cg_progress_failed = True
            else:
                if opts.verify_projections:
                    for s in subs:
                        _verify_projection(s)
                flow = execution_flow(wf, cg_parts)
                children, max_depth = [], depth
                for s in subs:
                    child, d = _convert(s, opts, depth + 1)
                    children.append(child)
                    max_depth = max(max_depth, d)
                return ChoiceGraph(flow, tuple(children)), max_depth

    raise _Irreducible(Failure(
        wf,
        po_parts, _reason(po_parts, po_verdict, po_progress_failed),
        cg_parts, _reason(cg_parts, cg_verdict, cg_progress_failed)))


def convert(wf: WorkflowNet, opts: ConversionOptions = ConversionOptions()) -> ConversionReport:
    from .preprocess import preprocess

    started = time.perf_counter()
    if opts.preprocess:
        wf = preprocess(wf)
    try:
        model, depth = _convert(wf, opts, 0)
    except _Irreducible as exc:
        wall = (time.perf_counter() - started) * 1000.0
        return ConversionReport(None, exc.failure, ConversionStats(wall_ms=wall))
    leaf_n, po_n, cg_n = count_nodes(model)
    wall = (time.perf_counter() - started) * 1000.0
    return ConversionReport(model, None,
                            ConversionStats(depth, leaf_n, po_n, cg_n, wall))


def convert_and_verify(wf: WorkflowNet,
                       opts: ConversionOptions = ConversionOptions(),
                       max_len: int = 8) -> ConversionReport:
    """Convert and, on success, compare bounded languages against the net."""
    report = convert(wf, opts)
    if not report.ok:
        return report
    reference = enumerate_language(wf, max_len)
    produced = language_bounded(report.result, max_len)
    verdict = bounded_equal(reference, produced)
    return ConversionReport(report.result, None, report.stats, verdict)
