"""
Report rendering for the CLI.
Two formats: human-readable text and structured (canonical JSON, same notation as the input).
"""

import json
from typing import Any, List

from pydantic import BaseModel

from models import NetworkPlan
from replay import ReplayResult
from resources import Ledger
from scenarios import ScenarioReport

FORMATS = ("text", "structured")


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def canonical_json(payload: Any) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", exclude_none=True)
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ==================== SCENARIO REPORT ====================

def _report_text(report: ScenarioReport) -> str:
    scenario = report.scenario
    lines: List[str] = [
        f"Scenario: {scenario.kind.value} (peered MNOs: {scenario.peered_mno_count}, "
        f"multi-location: {_yes_no(scenario.multi_location)}, "
        f"external need: {_yes_no(scenario.external_connectivity_need)})",
        f"Matrix row: {report.matrix_row}",
        f"Allowed types: {', '.join(t.value for t in report.allowed_types) or 'none'}",
        "",
        "NSIs",
    ]
    if not report.nsis:
        lines.append("  (none)")
    for entry in report.nsis:
        nsi_type = entry.nsi_type.value if entry.nsi_type else "unresolved"
        shared = " shared" if entry.locally_shared else ""
        lines.append(
            f"  {entry.id}  tenant={entry.tenant}  {nsi_type}{shared}  {entry.lifecycle.value}  "
            f"{entry.mode.value}/{entry.manager.value}  constituents: {', '.join(entry.constituents) or '-'}"
        )
        if entry.foreign_constituents:
            lines.append(f"      foreign constituents: {', '.join(entry.foreign_constituents)}")
        if entry.linked_foreign_nsis:
            lines.append(f"      linked foreign NSIs: {', '.join(entry.linked_foreign_nsis)}")
    lines.append("Type counts: " + " ".join(f"{name}={count}" for name, count in sorted(report.type_counts.items())))

    if report.services:
        lines += ["", "Services"]
        for service in report.services:
            lines.append(
                f"  {service.service}: local [{', '.join(service.local_nsis)}] "
                f"foreign [{', '.join(service.foreign_nsis)}]"
            )

    lines += ["", "Capacity"]
    if not report.capacity:
        lines.append("  (none)")
    for row in report.capacity:
        lines.append(
            f"  {row.nssi}  owner={row.owner}  capacity={row.capacity}  "
            f"reserved={row.reserved}  residual={row.residual}"
        )
    lines.append(f"Sharing ratio: {report.sharing_ratio:.4f}")

    lines += ["", "Rules"]
    for outcome in report.rules:
        status = "PASS" if outcome.passed else "FAIL"
        counts = f" ({outcome.errors} error(s), {outcome.warnings} warning(s))" if outcome.errors or outcome.warnings else ""
        lines.append(f"  [{status}] ({outcome.rule}) {outcome.title}{counts}")

    if report.violations:
        lines += ["", "Violations"]
        for violation in report.violations:
            lines.append(
                f"  {violation.severity.value.upper()} {violation.code.value} {violation.subject}: {violation.detail}"
            )
            lines.append(f"      rule: {violation.citation}")

    verdict = "PASS" if report.passed else "FAIL"
    lines += ["", f"Result: {verdict} ({report.error_count} error(s), {report.warning_count} warning(s))"]
    return "\n".join(lines) + "\n"


def render_report(report: ScenarioReport, fmt: str = "text") -> str:
    if fmt == "structured":
        payload = report.model_dump(mode="json", exclude_none=True)
        payload["passed"] = report.passed
        return canonical_json(payload)
    return _report_text(report)


# ==================== PLAN ====================

def _plan_text(plan: NetworkPlan) -> str:
    ledger = Ledger.from_plan(plan)
    lines: List[str] = [f"Plan version {plan.version}", "", "NSIs"]
    if not plan.nsis:
        lines.append("  (none)")
    for nsi in sorted(plan.nsis, key=lambda n: n.id):
        service = f"  service={nsi.service}" if nsi.service else ""
        lines.append(
            f"  {nsi.id}  tenant={nsi.tenant}  {nsi.lifecycle.value}  {nsi.mode.value}/{nsi.manager.value}{service}"
        )
        lines.append(f"      constituents: {', '.join(nsi.constituents) or '-'}")
        if nsi.linked_foreign_nsis:
            lines.append(f"      linked foreign NSIs: {', '.join(nsi.linked_foreign_nsis)}")

    lines += ["", "NSSIs"]
    if not plan.nssis:
        lines.append("  (none)")
    for nssi in sorted(plan.nssis, key=lambda n: n.id):
        flags = "sharable" if nssi.sharable else "exclusive"
        location = nssi.location or "any"
        lines.append(
            f"  {nssi.id}  {nssi.kind.value}  owner={nssi.owner}  {flags}  location={location}  "
            f"capacity={nssi.capacity}  residual={ledger.residual(nssi.id)}"
        )

    lines += ["", "Reservations"]
    if not ledger.reservations:
        lines.append("  (none)")
    for reservation in ledger.reservations:
        lines.append(f"  {reservation.nssi} <- {reservation.nsi}: {reservation.units}")
    return "\n".join(lines) + "\n"


def render_plan(plan: NetworkPlan, fmt: str = "text") -> str:
    if fmt == "structured":
        payload = plan.model_dump(mode="json", exclude_none=True)
        for section in ("domains", "nssis", "tenants", "nsis"):
            payload[section] = sorted(payload[section], key=lambda item: item["id"])
        payload["reservations"] = sorted(payload["reservations"], key=lambda r: (r["nssi"], r["nsi"]))
        return canonical_json(payload)
    return _plan_text(plan)


# ==================== REPLAY LOG ====================

def render_replay(result: ReplayResult, fmt: str = "text") -> str:
    if fmt == "structured":
        return canonical_json({
            "scenario": result.scenario.model_dump(mode="json"),
            "steps": [step.model_dump(mode="json") for step in result.steps],
            "final_version": result.plan.version,
        })
    lines = [f"Replay under {result.scenario.kind.value}: {len(result.steps)} step(s)"]
    for step in result.steps:
        lines.append(
            f"  {step.index:>3}. {step.action:<11} {step.subject}  v{step.plan_version}  "
            f"errors={step.errors} warnings={step.warnings}"
            + (f"  {step.detail}" if step.detail else "")
        )
    lines.append(f"Final plan version {result.plan.version}")
    return "\n".join(lines) + "\n"
