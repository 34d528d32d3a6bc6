"""Reduction rules applied before conversion.

Three rewrites that preserve the bounded language, safeness, and soundness
of a safe and sound workflow net: duplicate-place removal and explicit
XOR split / join place introduction. Applied round-robin to a fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nets import PetriNet, WorkflowNet, postset, preset, require_wf_net


def _rebuild(wf: WorkflowNet, places, labeling, flow) -> WorkflowNet:
    return require_wf_net(PetriNet.build(places, labeling, flow))


def _fresh(prefix: str, taken: set[str]) -> str:
    i = 1
    while f"{prefix}{i}" in taken:
        i += 1
    name = f"{prefix}{i}"
    taken.add(name)
    return name


def remove_duplicate_places(wf: WorkflowNet) -> tuple[WorkflowNet, bool]:
    """Delete all but one of every group of places with equal pre and post sets."""
    net = wf.net
    groups: dict[tuple, list[str]] = {}
    for p in sorted(net.places):
        key = (tuple(sorted(preset(net, p))), tuple(sorted(postset(net, p))))
        groups.setdefault(key, []).append(p)
    doomed = set()
    for members in groups.values():
        if len(members) > 1:
            doomed.update(members[1:])  # members are sorted; keep the smallest
    doomed.discard(wf.source)
    doomed.discard(wf.sink)
    if not doomed:
        return wf, False
    places = net.places - doomed
    flow = {(u, v) for u, v in net.flow if u not in doomed and v not in doomed}
    return _rebuild(wf, places, dict(net.labeling), flow), True


def _bundles(net: PetriNet, by_pre: bool) -> list[frozenset[str]]:
    """Maximal groups of >= 2 places sharing the given adjacency side."""
    side = preset if by_pre else postset
    groups: dict[tuple, list[str]] = {}
    for p in sorted(net.places):
        adj = tuple(sorted(side(net, p)))
        if adj:
            groups.setdefault(adj, []).append(p)
    return [frozenset(g) for _, g in sorted(groups.items()) if len(g) > 1]


def introduce_xor_split_places(wf: WorkflowNet) -> tuple[WorkflowNet, bool]:
    """Make a choice over a place bundle explicit.

    A bundle is a maximal set Q of places always produced together
    (identical pre-sets). When one transition consumes all of Q and
    another consumes only part of it, the choice between them is hidden.
    The rewrite routes production through a fresh place: full consumers
    take it directly, and a fresh silent transition expands it into Q for
    the partial consumers.
    """
    net = wf.net
    for q in _bundles(net, by_pre=True):
        consumers = {t: preset(net, t) & q for t in sorted(net.transitions)
                     if preset(net, t) & q}
        full = [t for t, got in consumers.items() if got == q]
        partial = [t for t, got in consumers.items() if got != q]
        if not full or not partial:
            continue
        taken = set(net.places) | set(net.transitions)
        p_new = _fresh("xp", taken)
        t_exp = _fresh("xt", taken)
        producers = preset(net, sorted(q)[0])

        flow = set(net.flow)
        flow -= {(t, p) for t in producers for p in q}
        flow |= {(t, p_new) for t in producers}
        for t in full:
            flow -= {(p, t) for p in q}
            flow.add((p_new, t))
        flow.add((p_new, t_exp))
        flow |= {(t_exp, p) for p in q}
        labeling = dict(net.labeling)
        labeling[t_exp] = None
        return _rebuild(wf, net.places | {p_new}, labeling, flow), True
    return wf, False


def introduce_xor_join_places(wf: WorkflowNet) -> tuple[WorkflowNet, bool]:
    """Mirror of the split rule for places always consumed together."""
    net = wf.net
    for q in _bundles(net, by_pre=False):
        producers = {t: postset(net, t) & q for t in sorted(net.transitions)
                     if postset(net, t) & q}
        full = [t for t, got in producers.items() if got == q]
        partial = [t for t, got in producers.items() if got != q]
        if not full or not partial:
            continue
        taken = set(net.places) | set(net.transitions)
        p_new = _fresh("xp", taken)
        t_col = _fresh("xt", taken)
        consumers = postset(net, sorted(q)[0])

        flow = set(net.flow)
        flow -= {(p, t) for p in q for t in consumers}
        flow |= {(p_new, t) for t in consumers}
        for t in full:
            flow -= {(t, p) for p in q}
            flow.add((t, p_new))
        flow |= {(p, t_col) for p in q}
        flow.add((t_col, p_new))
        labeling = dict(net.labeling)
        labeling[t_col] = None
        return _rebuild(wf, net.places | {p_new}, labeling, flow), True
    return wf, False


@dataclass(frozen=True)
class RuleFlags:
    duplicates: bool = True
    xor_split: bool = True
    xor_join: bool = True

    @staticmethod
    def parse(spec: str) -> "RuleFlags":
        names = {s.strip() for s in spec.split(",") if s.strip()}
        unknown = names - {"dup", "split", "join"}
        if unknown:
            raise ValueError(f"unknown rule names: {sorted(unknown)}")
        return RuleFlags("dup" in names, "split" in names, "join" in names)


def preprocess(wf: WorkflowNet, rules: RuleFlags = RuleFlags()) -> WorkflowNet:
    """Apply the enabled rules round-robin until a full pass changes nothing."""
    max_passes = len(wf.places) + len(wf.transitions)
    for _ in range(max_passes):
        changed = False
        if rules.duplicates:
            wf, c = remove_duplicate_places(wf)
            changed |= c
        if rules.xor_split:
            wf, c = introduce_xor_split_places(wf)
            changed |= c
        if rules.xor_join:
            wf, c = introduce_xor_join_places(wf)
            changed |= c
        if not changed:
            break
    return wf
