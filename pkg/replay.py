"""
Replays a plan document through the orchestrator.
Agreements are registered first; then the events run in order, or, when the document has no
events, every request is auto-planned in document order.
"""

import logging
from typing import List, Optional

from pydantic import BaseModel, Field

from document import BindEvent, ImportEvent, InstantiateEvent, PlanDocument, TransitionEvent
from models import NetworkPlan
from orchestrator import PlanningPolicy, SliceOrchestrator
from scenarios import DeploymentScenario, Severity
from settings import Settings, get_settings

logger = logging.getLogger(__name__)


class ReplayStep(BaseModel):
    index: int = Field(..., ge=1)
    action: str
    subject: str
    detail: str = ""
    plan_version: int
    errors: int = Field(..., description="Error-severity violations after the step")
    warnings: int


class ReplayResult(BaseModel):
    scenario: DeploymentScenario
    steps: List[ReplayStep] = Field(default_factory=list)
    plan: NetworkPlan


def replay(document: PlanDocument, settings: Optional[Settings] = None) -> ReplayResult:
    settings = settings or get_settings()
    orchestrator = SliceOrchestrator(
        document.initial_plan(),
        document.scenario,
        PlanningPolicy(shared_nssi_capacity=settings.shared_nssi_capacity),
    )
    steps: List[ReplayStep] = []

    def record(action: str, subject: str, detail: str = "") -> None:
        violations = orchestrator.validate()
        errors = sum(1 for v in violations if v.severity is Severity.ERROR)
        steps.append(ReplayStep(
            index=len(steps) + 1,
            action=action,
            subject=subject,
            detail=detail,
            plan_version=orchestrator.version,
            errors=errors,
            warnings=len(violations) - errors,
        ))
        logger.debug(f"step {len(steps)} {action} {subject}: {errors} error(s)")

    for agreement in document.agreements:
        orchestrator.register_peer(agreement)
        record("register", agreement.mno, agreement.direction.value)

    if document.events is not None:
        events = list(document.events)
    else:
        logger.info(f"No events; auto-planning {len(document.requests)} request(s) in {settings.auto_plan_mode.value}")
        events = [
            InstantiateEvent(action="instantiate", request=r.id, mode=settings.auto_plan_mode)
            for r in document.requests
        ]

    for event in events:
        if isinstance(event, InstantiateEvent):
            nsi = orchestrator.submit(document.request(event.request), event.mode)
            record("instantiate", event.request, f"{nsi.id} [{', '.join(nsi.constituents)}] {event.mode.value}")
        elif isinstance(event, TransitionEvent):
            nsi = orchestrator.transition(event.nsi, event.target, event.actor)
            record("transition", event.nsi, f"{nsi.lifecycle.value} by {event.actor.value}")
        elif isinstance(event, BindEvent):
            orchestrator.bind_service(event.binding)
            binding = event.binding
            record("bind", binding.service, f"local {binding.local_nsis} foreign {binding.foreign_nsis}")
        elif isinstance(event, ImportEvent):
            orchestrator.import_foreign_nssi(event.nsi, event.nssi, event.units)
            record("import", event.nsi, f"{event.nssi} ({event.units} units)")

    return ReplayResult(scenario=document.scenario, steps=steps, plan=orchestrator.snapshot())
