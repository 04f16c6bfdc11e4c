"""
Plan documents: the JSON files the CLI reads.
parse_document runs syntax -> schema_version -> grammar -> model -> reference checks and
reports every issue it finds with a line position.
"""

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Set, Union

from jsonschema import Draft202012Validator
from pydantic import Field, ValidationError

from errors import DocumentError, DocumentIssue
from models import (
    Domain,
    Frozen,
    InstantiationMode,
    LifecycleState,
    Manager,
    NetworkPlan,
    Nsi,
    Nssi,
    PeeringAgreement,
    Reservation,
    ServiceBinding,
    ServiceRequest,
    Tenant,
    planned_nsi_id,
)
from scenarios import DeploymentScenario

logger = logging.getLogger(__name__)

SUPPORTED_SCHEMA_VERSION = 1
SCHEMA_PATH = Path(__file__).parent / "schemas" / "plan_document.schema.json"


# ==================== DOCUMENT MODEL ====================

class InstantiateEvent(Frozen):
    action: Literal["instantiate"]
    request: str
    mode: InstantiationMode = InstantiationMode.REQUEST


class TransitionEvent(Frozen):
    action: Literal["transition"]
    nsi: str
    target: LifecycleState
    actor: Manager


class BindEvent(Frozen):
    action: Literal["bind"]
    binding: ServiceBinding


class ImportEvent(Frozen):
    action: Literal["import"]
    nsi: str
    nssi: str
    units: int = Field(..., gt=0)


Event = Annotated[
    Union[InstantiateEvent, TransitionEvent, BindEvent, ImportEvent],
    Field(discriminator="action"),
]


class PlanDocument(Frozen):
    schema_version: int
    scenario: DeploymentScenario
    domains: List[Domain] = Field(default_factory=list)
    nssis: List[Nssi] = Field(default_factory=list)
    tenants: List[Tenant] = Field(default_factory=list)
    agreements: List[PeeringAgreement] = Field(default_factory=list)
    nsis: List[Nsi] = Field(default_factory=list, description="Slices provisioned before the run")
    reservations: List[Reservation] = Field(default_factory=list)
    requests: List[ServiceRequest] = Field(default_factory=list)
    events: Optional[List[Event]] = Field(default=None, description="Absent: auto-plan the requests in order")

    def initial_plan(self) -> NetworkPlan:
        """The declared state, before agreements are registered and events applied"""
        return NetworkPlan(
            domains=list(self.domains),
            nssis=list(self.nssis),
            tenants=list(self.tenants),
            nsis=list(self.nsis),
            reservations=list(self.reservations),
        )

    def request(self, request_id: str) -> ServiceRequest:
        for request in self.requests:
            if request.id == request_id:
                return request
        raise KeyError(request_id)


# ==================== POSITIONS ====================

_DECODER = json.JSONDecoder()
_WS = " \t\r\n"


def _skip(text: str, i: int, chars: str = _WS) -> int:
    while i < len(text) and text[i] in chars:
        i += 1
    return i


def _offset(text: str, path: Sequence[Any]) -> int:
    """Character offset of the value at a JSON path, or of its deepest resolvable ancestor"""
    i = _skip(text, 0)
    for step in path:
        if i >= len(text):
            break
        opener = text[i]
        if opener == "[" and isinstance(step, int):
            j = _skip(text, i + 1)
            for _ in range(step):
                if j >= len(text) or text[j] == "]":
                    return i
                _, j = _DECODER.raw_decode(text, j)
                j = _skip(text, j, _WS + ",")
            if j >= len(text) or text[j] == "]":
                return i
            i = j
        elif opener == "{" and isinstance(step, str):
            j = _skip(text, i + 1)
            found = None
            while j < len(text) and text[j] != "}":
                key, j = _DECODER.raw_decode(text, j)
                j = _skip(text, j, _WS + ":")
                if key == step:
                    found = j
                    break
                _, j = _DECODER.raw_decode(text, j)
                j = _skip(text, j, _WS + ",")
            if found is None:
                return i
            i = found
        else:
            return i
    return i


def _issue(code: str, message: str, text: str, path: Sequence[Any]) -> DocumentIssue:
    offset = _offset(text, path)
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    dotted = ".".join(str(step) for step in path) or "$"
    return DocumentIssue(code=code, message=message, line=line, column=column, path=dotted)


# ==================== PARSING ====================

@lru_cache
def load_schema() -> Dict[str, Any]:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


def _grammar_issues(text: str, data: Any) -> List[DocumentIssue]:
    validator = Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path])
    return [_issue("InvalidDocument", error.message, text, list(error.absolute_path)) for error in errors]


_EVENT_TAGS = {"instantiate", "transition", "bind", "import"}


def _model_issues(text: str, error: ValidationError) -> List[DocumentIssue]:
    issues = []
    for detail in error.errors():
        # discriminated unions add the tag to the location
        path = [step for step in detail["loc"] if not (isinstance(step, str) and step in _EVENT_TAGS)]
        issues.append(_issue("InvalidDocument", detail["msg"], text, path))
    return issues


def _reference_issues(text: str, document: PlanDocument) -> List[DocumentIssue]:
    issues: List[DocumentIssue] = []

    def check(value: str, known: Set[str], what: str, path: List[Any]) -> None:
        if value not in known:
            issues.append(_issue("UnknownReference", f"{what} '{value}' is not declared", text, path))

    def unique(ids: List[str], what: str, section: str) -> Set[str]:
        seen: Set[str] = set()
        for index, value in enumerate(ids):
            if value in seen:
                issues.append(_issue("DuplicateId", f"{what} '{value}' is declared twice", text, [section, index, "id"]))
            seen.add(value)
        return seen

    domains = unique([d.id for d in document.domains], "domain", "domains")
    nssis = unique([n.id for n in document.nssis], "NSSI", "nssis")
    tenants = unique([t.id for t in document.tenants], "tenant", "tenants")
    declared_nsis = unique([n.id for n in document.nsis], "NSI", "nsis")
    requests = unique([r.id for r in document.requests], "request", "requests")
    foreign_nsis = {f for a in document.agreements for f in a.exported_nsis}

    # slice ids the planner will hand out, in event order, suffixed on collision
    planned_nsis = set(declared_nsis)
    for event in document.events or []:
        if isinstance(event, InstantiateEvent):
            planned_nsis.add(planned_nsi_id(event.request, planned_nsis))

    for i, nssi in enumerate(document.nssis):
        check(nssi.owner, domains, "domain", ["nssis", i, "owner"])
    for i, tenant in enumerate(document.tenants):
        if tenant.home_mno is not None:
            check(tenant.home_mno, domains, "domain", ["tenants", i, "home_mno"])
    for i, agreement in enumerate(document.agreements):
        check(agreement.mno, domains, "domain", ["agreements", i, "mno"])
        for j, nssi_id in enumerate(agreement.exported_nssis):
            check(nssi_id, nssis, "NSSI", ["agreements", i, "exported_nssis", j])
        for j, nssi_id in enumerate(agreement.exported_local_nssis):
            check(nssi_id, nssis, "NSSI", ["agreements", i, "exported_local_nssis", j])
    for i, nsi in enumerate(document.nsis):
        check(nsi.tenant, tenants, "tenant", ["nsis", i, "tenant"])
        for j, nssi_id in enumerate(nsi.constituents):
            check(nssi_id, nssis, "NSSI", ["nsis", i, "constituents", j])
    for i, reservation in enumerate(document.reservations):
        check(reservation.nssi, nssis, "NSSI", ["reservations", i, "nssi"])
        check(reservation.nsi, declared_nsis, "NSI", ["reservations", i, "nsi"])
    for i, request in enumerate(document.requests):
        check(request.tenant, tenants, "tenant", ["requests", i, "tenant"])

    for i, event in enumerate(document.events or []):
        if isinstance(event, InstantiateEvent):
            check(event.request, requests, "request", ["events", i, "request"])
        elif isinstance(event, TransitionEvent):
            check(event.nsi, planned_nsis, "NSI", ["events", i, "nsi"])
        elif isinstance(event, ImportEvent):
            check(event.nsi, planned_nsis, "NSI", ["events", i, "nsi"])
            check(event.nssi, nssis, "NSSI", ["events", i, "nssi"])
        elif isinstance(event, BindEvent):
            for j, local in enumerate(event.binding.local_nsis):
                check(local, planned_nsis, "NSI", ["events", i, "binding", "local_nsis", j])
            for j, foreign in enumerate(event.binding.foreign_nsis):
                check(foreign, foreign_nsis, "foreign NSI", ["events", i, "binding", "foreign_nsis", j])

    return issues


def parse_document(text: str) -> PlanDocument:
    """Parse and fully resolve a plan document, or raise DocumentError listing every issue"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError([DocumentIssue(
            code="DocumentSyntaxError", message=e.msg, line=e.lineno, column=e.colno,
        )]) from e

    version = data.get("schema_version") if isinstance(data, dict) else None
    if version != SUPPORTED_SCHEMA_VERSION:
        path = ["schema_version"] if isinstance(data, dict) and "schema_version" in data else []
        raise DocumentError([_issue(
            "UnsupportedSchemaVersion",
            f"schema_version {version!r} is not supported (expected {SUPPORTED_SCHEMA_VERSION})",
            text, path,
        )])

    issues = _grammar_issues(text, data)
    if issues:
        raise DocumentError(issues)

    try:
        document = PlanDocument.model_validate(data)
    except ValidationError as e:
        raise DocumentError(_model_issues(text, e)) from e

    issues = _reference_issues(text, document)
    if issues:
        raise DocumentError(issues)

    logger.info(
        f"Parsed document: {document.scenario.kind.value}, {len(document.nssis)} NSSIs, "
        f"{len(document.requests)} requests, {len(document.events or [])} events"
    )
    return document


def load_document(path: Path) -> PlanDocument:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        line_start = raw.rfind(b"\n", 0, e.start) + 1
        raise DocumentError([DocumentIssue(
            code="DocumentSyntaxError",
            message=f"not valid UTF-8: byte 0x{raw[e.start]:02x} ({e.reason})",
            line=raw.count(b"\n", 0, e.start) + 1,
            column=e.start - line_start + 1,
        )]) from e
    return parse_document(text)


def serialize_document(document: PlanDocument) -> str:
    """Canonical JSON: sorted keys, two-space indent, absent optional fields omitted"""
    payload = document.model_dump(mode="json", exclude_none=True)
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
