"""
DOT export of a network plan.
One cluster per domain holds the domain and its NSSIs (and, for MNOs, the foreign NSIs bound
to local slices). Live NSIs point at their constituents; services point at their NSIs.
"""

import logging
from typing import List

from classification import classify_nsi_type
from models import NetworkPlan

logger = logging.getLogger(__name__)


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _node(kind: str, node_id: str) -> str:
    return _quote(f"{kind}:{node_id}")


def export_graph(plan: NetworkPlan) -> str:
    lines: List[str] = [
        "digraph microslice {",
        "  rankdir=LR;",
        '  node [fontname="Helvetica"];',
    ]

    used = {f for nsi in plan.live_nsis for f in nsi.linked_foreign_nsis}
    used.update(f for binding in plan.bindings for f in binding.foreign_nsis)
    foreign_by_mno = {}
    for foreign, mno in sorted(plan.exported_foreign_nsis().items()):
        if foreign in used:
            foreign_by_mno.setdefault(mno, []).append(foreign)

    for domain in sorted(plan.domains, key=lambda d: d.id):
        lines.append(f"  subgraph {_quote('cluster_' + domain.id)} {{")
        lines.append(f"    label={_quote(f'{domain.id} ({domain.kind.value})')};")
        lines.append(f"    {_node('domain', domain.id)} [shape=box3d, label={_quote(domain.name or domain.id)}];")
        for nssi in sorted(plan.nssis, key=lambda n: n.id):
            if nssi.owner != domain.id:
                continue
            style = "solid" if nssi.sharable else "bold"
            label = f"{nssi.id}\\n{nssi.kind.value} cap {nssi.capacity}"
            lines.append(f"    {_node('nssi', nssi.id)} [shape=box, style={style}, label=\"{label}\"];")
            lines.append(f"    {_node('domain', domain.id)} -> {_node('nssi', nssi.id)} [style=dotted, arrowhead=none];")
        for foreign in foreign_by_mno.get(domain.id, []):
            lines.append(f"    {_node('foreign-nsi', foreign)} [shape=doubleoctagon, label={_quote(foreign)}];")
        lines.append("  }")

    for nsi in plan.live_nsis:
        if all(plan.has_nssi(n) for n in nsi.constituents):
            type_label = classify_nsi_type(plan, nsi.id).value
        else:
            type_label = "unresolved"
        lines.append(f"  {_node('nsi', nsi.id)} [shape=ellipse, label=\"{nsi.id}\\n{type_label}\"];")

    for nsi in plan.live_nsis:
        for nssi_id in nsi.constituents:
            if plan.has_nssi(nssi_id):
                lines.append(f"  {_node('nsi', nsi.id)} -> {_node('nssi', nssi_id)};")
        for foreign in sorted(nsi.linked_foreign_nsis):
            lines.append(f"  {_node('nsi', nsi.id)} -> {_node('foreign-nsi', foreign)} [style=dashed];")

    live = {nsi.id for nsi in plan.live_nsis}
    for binding in sorted(plan.bindings, key=lambda b: b.service):
        lines.append(f"  {_node('service', binding.service)} [shape=note];")
        for local in sorted(binding.local_nsis):
            if local in live:
                lines.append(f"  {_node('service', binding.service)} -> {_node('nsi', local)} [style=dashed];")
        for foreign in sorted(binding.foreign_nsis):
            lines.append(f"  {_node('service', binding.service)} -> {_node('foreign-nsi', foreign)} [style=dashed];")

    lines.append("}")
    logger.debug(f"Exported graph for plan v{plan.version}: {len(lines)} statements")
    return "\n".join(lines) + "\n"
