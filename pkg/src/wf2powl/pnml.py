"""Reading and writing workflow nets in the PNML interchange format.

Only the plain place/transition subset is supported: one net per file,
unit arc weights, no pages beyond a single optional wrapper, graphics
ignored. PNML has no standard marker for silent transitions, so an empty
or absent name means silent, as does the literal name "tau" (plus a small
allowlist behind a flag).
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from .nets import PetriNet, WfDiagnostic, WorkflowNet, validate_wf_net

SILENT_NAMES = {"tau"}
FUZZY_SILENT_NAMES = {"tau", "skip", "silent", "none", "invisible"}


class ParseError(ValueError):
    pass


class NotAWorkflowNet(ValueError):
    def __init__(self, diagnostic: WfDiagnostic):
        super().__init__(f"not a workflow net ({diagnostic})")
        self.diagnostic = diagnostic


class UnsupportedFeature(ValueError):
    pass


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find_children(elem, name):
    return [c for c in elem if _strip_ns(c.tag) == name]


def _name_text(elem) -> Optional[str]:
    for name in _find_children(elem, "name"):
        for text in _find_children(name, "text"):
            return text.text or ""
    return None


def parse_pnml(data: bytes, fuzzy_silents: bool = False) -> WorkflowNet:
    """Parse a PNML document into a validated workflow net."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}") from exc
    nets = _find_children(root, "net") if _strip_ns(root.tag) != "net" else [root]
    if len(nets) != 1:
        raise UnsupportedFeature(f"expected exactly one net, found {len(nets)}")
    net_elem = nets[0]
    pages = _find_children(net_elem, "page")
    if len(pages) > 1:
        raise UnsupportedFeature("multiple pages are not supported")
    scope = pages[0] if pages else net_elem

    silent_names = FUZZY_SILENT_NAMES if fuzzy_silents else SILENT_NAMES
    places: list[str] = []
    labeling: dict[str, Optional[str]] = {}
    flow: set[tuple[str, str]] = set()
    seen_ids: set[str] = set()

    def node_id(elem) -> str:
        nid = elem.get("id")
        if not nid:
            raise ParseError(f"<{_strip_ns(elem.tag)}> without an id")
        if nid in seen_ids:
            raise ParseError(f"duplicate id: {nid}")
        seen_ids.add(nid)
        return nid

    for elem in scope:
        tag = _strip_ns(elem.tag)
        if tag == "place":
            places.append(node_id(elem))
        elif tag == "transition":
            tid = node_id(elem)
            name = _name_text(elem)
            if name is None or name == "" or name.strip().lower() in silent_names:
                labeling[tid] = None
            else:
                labeling[tid] = name
        elif tag == "arc":
            src, tgt = elem.get("source"), elem.get("target")
            if not src or not tgt:
                raise ParseError("arc without source/target")
            for insc in _find_children(elem, "inscription"):
                for text in _find_children(insc, "text"):
                    if (text.text or "1").strip() not in ("", "1"):
                        raise UnsupportedFeature(
                            f"arc weight {text.text!r} on {src}->{tgt}")
            flow.add((src, tgt))

    known = set(places) | set(labeling)
    for u, v in flow:
        if u not in known or v not in known:
            raise ParseError(f"arc references unknown node: ({u}, {v})")
    try:
        net = PetriNet.build(places, labeling, flow)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    result = validate_wf_net(net)
    if isinstance(result, WfDiagnostic):
        raise NotAWorkflowNet(result)
    return result


def write_pnml(wf: WorkflowNet, net_id: str = "net1") -> bytes:
    """Serialize deterministically; silent transitions get an empty name."""
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<pnml>',
             f'  <net id="{net_id}" type="http://www.pnml.org/version-2009/grammar/ptnet">',
             '    <page id="page1">']
    for p in sorted(wf.places):
        lines.append(f'      <place id="{_esc(p)}"/>')
    for t in sorted(wf.transitions):
        label = wf.label(t)
        lines.append(f'      <transition id="{_esc(t)}">')
        lines.append(f'        <name><text>{_esc(label) if label else ""}</text></name>')
        lines.append('      </transition>')
    for i, (u, v) in enumerate(sorted(wf.flow), start=1):
        lines.append(f'      <arc id="a{i}" source="{_esc(u)}" target="{_esc(v)}"/>')
    lines += ['    </page>', '  </net>', '</pnml>', '']
    return "\n".join(lines).encode("utf-8")


def _esc(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))
