"""
Deployment scenarios and the rule engine that decides which NSI configurations a plan may hold.
"""

import logging
from enum import Enum
from typing import Dict, FrozenSet, List, Optional

from pydantic import BaseModel, Field

from classification import CompositionCode, NsiClassification, classify_nsi, validate_nsi_composition
from errors import InconsistentPlan, MalformedScenario
from models import (
    Frozen,
    InstantiationMode,
    LifecycleState,
    Manager,
    NetworkPlan,
    NsiType,
    SubscriberClass,
    Tenant,
)
from resources import Ledger

logger = logging.getLogger(__name__)


class ScenarioKind(str, Enum):
    CLOSED_A = "ClosedA"
    CLOSED_B = "ClosedB"
    OPEN_MNO = "OpenMNO"
    OPEN_PUBLIC = "OpenPublic"
    MIXED_OPTION_A = "MixedOptionA"
    MIXED_OPTION_B = "MixedOptionB"


MIXED_KINDS = (ScenarioKind.MIXED_OPTION_A, ScenarioKind.MIXED_OPTION_B)

# Deployments where private tenants follow the closed-network rules.
CLOSED_TENANT_KINDS = (ScenarioKind.CLOSED_B,) + MIXED_KINDS

MATRIX_ROWS: Dict[ScenarioKind, str] = {
    ScenarioKind.CLOSED_A: (
        "Closed network, single location: Type 1 and Type 2 only; "
        "no communication with an MNO or other external network"
    ),
    ScenarioKind.CLOSED_B: (
        "Closed network, multiple locations: Type 1 and Type 2 when no tenant connects externally; "
        "Type 3 as well once a tenant connects to an external network"
    ),
    ScenarioKind.OPEN_MNO: (
        "MNO open network: Type 3 when serving subscribers of one MNO; "
        "Type 2 and Type 3 when serving subscribers of several MNOs"
    ),
    ScenarioKind.OPEN_PUBLIC: "Public open network: a single dedicated Type 1 slice for the general public",
    ScenarioKind.MIXED_OPTION_A: (
        "Mixed network, option A: Type 1, Type 2 or Type 3; "
        "some slices combine micro-operator NSSIs with MNO NSSIs"
    ),
    ScenarioKind.MIXED_OPTION_B: (
        "Mixed network, option B: Type 1, Type 2 or Type 3; "
        "services combine micro-operator NSIs with MNO NSIs"
    ),
}


class DeploymentScenario(Frozen):
    kind: ScenarioKind
    peered_mno_count: int = Field(default=0, ge=0)
    multi_location: bool = False
    external_connectivity_need: bool = Field(
        default=False, description="Some tenant in the network connects to an external network"
    )


def check_scenario(scenario: DeploymentScenario) -> None:
    kind = scenario.kind
    if kind is ScenarioKind.CLOSED_A and scenario.multi_location:
        raise MalformedScenario("ClosedA covers a single location; multi_location must be false")
    if kind is ScenarioKind.CLOSED_B and not scenario.multi_location:
        raise MalformedScenario("ClosedB covers multiple locations; multi_location must be true")
    if kind is ScenarioKind.OPEN_MNO and scenario.peered_mno_count < 1:
        raise MalformedScenario("OpenMNO needs at least one peered MNO")
    if (
        kind in (ScenarioKind.CLOSED_A, ScenarioKind.CLOSED_B)
        and not scenario.external_connectivity_need
        and scenario.peered_mno_count != 0
    ):
        raise MalformedScenario(
            f"{kind.value} without an externally connecting tenant cannot peer with "
            f"{scenario.peered_mno_count} MNO(s)"
        )


def contextualize(scenario: DeploymentScenario, plan: NetworkPlan) -> DeploymentScenario:
    """
    Fold the plan's tenants and agreements into the scenario context.
    Closed networks keep their declared peer count: an agreement there is judged through the
    foreign constituents it brings in (rule b), never by making the scenario malformed.
    """
    external = scenario.external_connectivity_need or any(
        tenant.external_connectivity_need for tenant in plan.tenants
    )
    peered = scenario.peered_mno_count
    if plan.agreements and scenario.kind not in (ScenarioKind.CLOSED_A, ScenarioKind.CLOSED_B):
        peered = len(plan.peered_mnos())
    return scenario.model_copy(update={"external_connectivity_need": external, "peered_mno_count": peered})


def allowed_types(scenario: DeploymentScenario) -> FrozenSet[NsiType]:
    check_scenario(scenario)
    kind = scenario.kind
    if kind is ScenarioKind.CLOSED_A:
        return frozenset({NsiType.TYPE1, NsiType.TYPE2})
    if kind is ScenarioKind.CLOSED_B:
        if scenario.external_connectivity_need:
            return frozenset(NsiType)
        return frozenset({NsiType.TYPE1, NsiType.TYPE2})
    if kind is ScenarioKind.OPEN_MNO:
        if scenario.peered_mno_count == 1:
            return frozenset({NsiType.TYPE3})
        return frozenset({NsiType.TYPE2, NsiType.TYPE3})
    if kind is ScenarioKind.OPEN_PUBLIC:
        return frozenset({NsiType.TYPE1})
    return frozenset(NsiType)


def _rule_a_types(scenario: DeploymentScenario, tenant: Tenant) -> FrozenSet[NsiType]:
    # The public slice hosted by an MNO open network is held to Type 1 (rule d), not to the MNO row.
    if tenant.subscriber_class is SubscriberClass.GENERAL_PUBLIC and scenario.kind is ScenarioKind.OPEN_MNO:
        return frozenset({NsiType.TYPE1})
    return allowed_types(scenario)


def follows_closed_rules(scenario: DeploymentScenario, tenant: Tenant) -> bool:
    return (
        scenario.kind in CLOSED_TENANT_KINDS
        and tenant.subscriber_class is SubscriberClass.PRIVATE_TENANT
        and not tenant.external_connectivity_need
    )


def tenant_allowed_types(scenario: DeploymentScenario, tenant: Tenant) -> FrozenSet[NsiType]:
    """Types a new slice for this tenant may take; scenario must already be contextualized"""
    permitted = set(_rule_a_types(scenario, tenant))
    if tenant.subscriber_class is SubscriberClass.GENERAL_PUBLIC:
        permitted &= {NsiType.TYPE1}
    if follows_closed_rules(scenario, tenant):
        permitted.discard(NsiType.TYPE3)
    return frozenset(permitted)


# ==================== VIOLATIONS ====================

class ViolationCode(str, Enum):
    FORBIDDEN_NSI_TYPE = "ForbiddenNsiType"
    FOREIGN_CONSTITUENT_IN_CLOSED = "ForeignConstituentInClosed"
    PUBLIC_SLICE_SHARED = "PublicSliceShared"
    PUBLIC_SLICE_MISSING = "PublicSliceMissing"
    PUBLIC_SLICE_NOT_TYPE1 = "PublicSliceNotType1"
    PUBLIC_SLICE_DUPLICATED = "PublicSliceDuplicated"
    TYPE3_WITHOUT_EXTERNAL_NEED = "Type3WithoutExternalNeed"
    TRANSITIVE_EXTERNAL_EXPOSURE = "TransitiveExternalExposure"
    MNO_SUBSCRIBER_SLICE_NOT_FEDERATED = "MnoSubscriberSliceNotFederated"
    COMPOSITION_ERROR = "CompositionError"
    CAPACITY_EXCEEDED = "CapacityExceeded"


_CODE_ORDER = {code: index for index, code in enumerate(ViolationCode)}


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


_PUBLIC_SLICE_RULE = (
    "open network: one dedicated Type 1 slice for the general public that does not share "
    "resources with MNO subscriber slices"
)

CITATIONS: Dict[ViolationCode, str] = {
    ViolationCode.FORBIDDEN_NSI_TYPE: "deployment matrix: each deployment admits only its listed NSI configuration types",
    ViolationCode.FOREIGN_CONSTITUENT_IN_CLOSED: "closed network: no communication with MNO or other external network",
    ViolationCode.PUBLIC_SLICE_SHARED: _PUBLIC_SLICE_RULE,
    ViolationCode.PUBLIC_SLICE_MISSING: _PUBLIC_SLICE_RULE,
    ViolationCode.PUBLIC_SLICE_NOT_TYPE1: _PUBLIC_SLICE_RULE,
    ViolationCode.PUBLIC_SLICE_DUPLICATED: _PUBLIC_SLICE_RULE,
    ViolationCode.TYPE3_WITHOUT_EXTERNAL_NEED: (
        "closed network, multiple locations: Type 3 only for tenants that need to connect to the MNO"
    ),
    ViolationCode.TRANSITIVE_EXTERNAL_EXPOSURE: (
        "closed network isolation: a tenant without external need shares a subnet with an externally connected slice"
    ),
    ViolationCode.MNO_SUBSCRIBER_SLICE_NOT_FEDERATED: (
        "MNO open network: subscriber slices are Type 3, sharing a constituent with the home MNO"
    ),
    ViolationCode.COMPOSITION_ERROR: "NSI composition: two or more NSSIs covering both access and core network",
    ViolationCode.CAPACITY_EXCEEDED: "shared constituents need resource accounting: reservations never exceed capacity",
}


class RuleViolation(BaseModel):
    code: ViolationCode
    subject: str = Field(..., description="NSI, NSSI or tenant id")
    detail: str
    severity: Severity = Severity.ERROR
    citation: str = Field(..., min_length=1)


def _violation(code: ViolationCode, subject: str, detail: str, severity: Severity = Severity.ERROR) -> RuleViolation:
    return RuleViolation(code=code, subject=subject, detail=detail, severity=severity, citation=CITATIONS[code])


def _types_text(types: FrozenSet[NsiType]) -> str:
    return ", ".join(sorted(t.value for t in types)) or "none"


def _check_plan(plan: NetworkPlan) -> None:
    errors = plan.consistency_errors()
    if errors:
        raise InconsistentPlan("; ".join(errors))


def _classify_all(plan: NetworkPlan, violations: List[RuleViolation]) -> Dict[str, NsiClassification]:
    classified: Dict[str, NsiClassification] = {}
    for nsi in plan.live_nsis:
        issues = validate_nsi_composition(plan, nsi.id)
        for issue in issues:
            violations.append(_violation(
                ViolationCode.COMPOSITION_ERROR, nsi.id, f"{issue.code.value}: {issue.detail}"
            ))
        if not any(issue.code is CompositionCode.DANGLING_CONSTITUENT for issue in issues):
            classified[nsi.id] = classify_nsi(plan, nsi.id)
    return classified


def validate_network_plan(plan: NetworkPlan, scenario: DeploymentScenario) -> List[RuleViolation]:
    """Evaluate every rule against the plan; an empty list means the plan is legal for the scenario"""
    _check_plan(plan)
    context = contextualize(scenario, plan)
    check_scenario(context)
    kind = context.kind

    violations: List[RuleViolation] = []
    classified = _classify_all(plan, violations)
    nsis = {nsi.id: nsi for nsi in plan.live_nsis}
    tenants = {tenant.id: tenant for tenant in plan.tenants}

    # (a) permitted configuration types
    for nsi_id, result in sorted(classified.items()):
        permitted = _rule_a_types(context, tenants[nsis[nsi_id].tenant])
        if result.nsi_type not in permitted:
            violations.append(_violation(
                ViolationCode.FORBIDDEN_NSI_TYPE, nsi_id,
                f"{result.nsi_type.value} is not permitted under {kind.value} (allowed: {_types_text(permitted)})",
            ))

    # (b) closed networks stay closed
    if kind is ScenarioKind.CLOSED_A or (kind is ScenarioKind.CLOSED_B and not context.external_connectivity_need):
        for nsi_id, result in sorted(classified.items()):
            external = result.foreign_constituents + result.linked_foreign_nsis
            if external:
                violations.append(_violation(
                    ViolationCode.FOREIGN_CONSTITUENT_IN_CLOSED, nsi_id,
                    f"external constituents {', '.join(external)} in a closed network",
                ))

    # (c) external slices only for tenants that connect externally
    if kind in CLOSED_TENANT_KINDS:
        type3 = {nsi_id for nsi_id, result in classified.items() if result.nsi_type is NsiType.TYPE3}
        for nsi_id, result in sorted(classified.items()):
            tenant = tenants[nsis[nsi_id].tenant]
            if not follows_closed_rules(context, tenant):
                continue
            if nsi_id in type3:
                violations.append(_violation(
                    ViolationCode.TYPE3_WITHOUT_EXTERNAL_NEED, nsi_id,
                    f"tenant '{tenant.id}' has no external connectivity need but holds a Type3 slice",
                ))
                continue
            exposures = []
            for nssi_id in sorted(nsis[nsi_id].constituents):
                for other in plan.referencing_nsis(nssi_id):
                    if other != nsi_id and other in type3:
                        exposures.append(f"{nssi_id} with {other}")
            if exposures:
                violations.append(_violation(
                    ViolationCode.TRANSITIVE_EXTERNAL_EXPOSURE, nsi_id,
                    f"shares {'; '.join(exposures)} (Type3)", Severity.WARNING,
                ))

    # (d) the dedicated public slice
    public = plan.public_tenant()
    if public is not None:
        public_nsis = plan.nsis_of_tenant(public.id)
        if not public_nsis:
            violations.append(_violation(
                ViolationCode.PUBLIC_SLICE_MISSING, public.id, "no live NSI serves the general public",
            ))
        elif len(public_nsis) > 1:
            violations.append(_violation(
                ViolationCode.PUBLIC_SLICE_DUPLICATED, public.id,
                f"{len(public_nsis)} NSIs serve the general public: {', '.join(n.id for n in public_nsis)}",
            ))
        for nsi in public_nsis:
            if nsi.id not in classified:
                continue
            shared_with = []
            for nssi_id in sorted(nsi.constituents):
                for other in plan.referencing_nsis(nssi_id):
                    if other != nsi.id and tenants[nsis[other].tenant].subscriber_class is SubscriberClass.MNO_SUBSCRIBER_GROUP:
                        shared_with.append(f"{nssi_id} with {other}")
            if shared_with:
                violations.append(_violation(
                    ViolationCode.PUBLIC_SLICE_SHARED, nsi.id,
                    f"public slice shares {'; '.join(shared_with)}",
                ))
            elif classified[nsi.id].nsi_type is not NsiType.TYPE1:
                violations.append(_violation(
                    ViolationCode.PUBLIC_SLICE_NOT_TYPE1, nsi.id,
                    f"public slice classifies {classified[nsi.id].nsi_type.value}",
                ))

    # (e) MNO subscriber slices federate with their home MNO
    if kind is ScenarioKind.OPEN_MNO:
        for nsi in plan.live_nsis:
            tenant = tenants[nsi.tenant]
            if tenant.subscriber_class is not SubscriberClass.MNO_SUBSCRIBER_GROUP:
                continue
            owners = {plan.nssi(n).owner for n in nsi.constituents if plan.has_nssi(n)}
            if tenant.home_mno not in owners:
                violations.append(_violation(
                    ViolationCode.MNO_SUBSCRIBER_SLICE_NOT_FEDERATED, nsi.id,
                    f"no constituent owned by home MNO '{tenant.home_mno}'",
                ))

    # (f) capacity accounting
    for overcommit in Ledger.from_plan(plan).overcommits():
        violations.append(_violation(
            ViolationCode.CAPACITY_EXCEEDED, overcommit.nssi,
            f"{overcommit.reserved} units reserved on capacity {overcommit.capacity}",
        ))

    violations.sort(key=lambda v: (_CODE_ORDER[v.code], v.subject, v.detail))
    if violations:
        logger.info(f"Plan v{plan.version} under {kind.value}: {len(violations)} violation(s)")
    return violations


def error_violations(violations: List[RuleViolation]) -> List[RuleViolation]:
    return [v for v in violations if v.severity is Severity.ERROR]


# ==================== REPORT ====================

RULES = [
    ("composition", "NSI composition", {ViolationCode.COMPOSITION_ERROR}),
    ("a", "NSI types permitted by the deployment", {ViolationCode.FORBIDDEN_NSI_TYPE}),
    ("b", "closed network has no external constituents", {ViolationCode.FOREIGN_CONSTITUENT_IN_CLOSED}),
    ("c", "external slices only for connecting tenants", {
        ViolationCode.TYPE3_WITHOUT_EXTERNAL_NEED, ViolationCode.TRANSITIVE_EXTERNAL_EXPOSURE,
    }),
    ("d", "dedicated public slice", {
        ViolationCode.PUBLIC_SLICE_SHARED, ViolationCode.PUBLIC_SLICE_MISSING,
        ViolationCode.PUBLIC_SLICE_NOT_TYPE1, ViolationCode.PUBLIC_SLICE_DUPLICATED,
    }),
    ("e", "MNO subscriber slices federate with the home MNO", {ViolationCode.MNO_SUBSCRIBER_SLICE_NOT_FEDERATED}),
    ("f", "reservations within capacity", {ViolationCode.CAPACITY_EXCEEDED}),
]


class NsiEntry(BaseModel):
    id: str
    tenant: str
    service: Optional[str] = None
    nsi_type: Optional[NsiType] = Field(default=None, description="None when a constituent does not resolve")
    locally_shared: bool = False
    foreign_constituents: List[str] = Field(default_factory=list)
    linked_foreign_nsis: List[str] = Field(default_factory=list)
    constituents: List[str] = Field(default_factory=list)
    lifecycle: LifecycleState
    mode: InstantiationMode
    manager: Manager


class RuleOutcome(BaseModel):
    rule: str
    title: str
    passed: bool
    errors: int
    warnings: int


class ServiceEntry(BaseModel):
    service: str
    local_nsis: List[str]
    foreign_nsis: List[str]


class CapacityEntry(BaseModel):
    nssi: str
    owner: str
    capacity: int
    reserved: int
    residual: int


class ScenarioReport(BaseModel):
    scenario: DeploymentScenario
    matrix_row: str
    allowed_types: List[NsiType]
    nsis: List[NsiEntry]
    type_counts: Dict[str, int]
    rules: List[RuleOutcome]
    violations: List[RuleViolation]
    services: List[ServiceEntry]
    capacity: List[CapacityEntry]
    sharing_ratio: float
    error_count: int
    warning_count: int

    @property
    def passed(self) -> bool:
        return self.error_count == 0


def sharing_ratio(plan: NetworkPlan) -> float:
    referenced = {n for nsi in plan.live_nsis for n in nsi.constituents}
    if not referenced:
        return 0.0
    shared = [n for n in referenced if len(plan.referencing_nsis(n)) > 1]
    return round(len(shared) / len(referenced), 4)


def scenario_report(plan: NetworkPlan, scenario: DeploymentScenario) -> ScenarioReport:
    violations = validate_network_plan(plan, scenario)
    context = contextualize(scenario, plan)

    entries: List[NsiEntry] = []
    counts = {t.value: 0 for t in NsiType}
    for nsi in plan.live_nsis:
        entry = NsiEntry(
            id=nsi.id, tenant=nsi.tenant, service=nsi.service, constituents=list(nsi.constituents),
            lifecycle=nsi.lifecycle, mode=nsi.mode, manager=nsi.manager,
        )
        if all(plan.has_nssi(n) for n in nsi.constituents):
            result = classify_nsi(plan, nsi.id)
            entry = entry.model_copy(update={
                "nsi_type": result.nsi_type,
                "locally_shared": result.locally_shared,
                "foreign_constituents": result.foreign_constituents,
                "linked_foreign_nsis": result.linked_foreign_nsis,
            })
            counts[result.nsi_type.value] += 1
        entries.append(entry)

    outcomes = []
    for rule, title, codes in RULES:
        hits = [v for v in violations if v.code in codes]
        errors = len(error_violations(hits))
        outcomes.append(RuleOutcome(
            rule=rule, title=title, passed=errors == 0, errors=errors, warnings=len(hits) - errors,
        ))

    services = [
        ServiceEntry(service=b.service, local_nsis=sorted(b.local_nsis), foreign_nsis=sorted(b.foreign_nsis))
        for b in sorted(plan.bindings, key=lambda b: b.service)
    ]

    ledger = Ledger.from_plan(plan)
    capacity = [
        CapacityEntry(
            nssi=nssi.id, owner=nssi.owner, capacity=nssi.capacity,
            reserved=ledger.reserved(nssi.id), residual=ledger.residual(nssi.id),
        )
        for nssi in sorted(plan.nssis, key=lambda n: n.id)
    ]

    error_count = len(error_violations(violations))
    return ScenarioReport(
        scenario=context,
        matrix_row=MATRIX_ROWS[context.kind],
        allowed_types=sorted(allowed_types(context), key=lambda t: t.rank),
        nsis=entries,
        type_counts=counts,
        rules=outcomes,
        violations=violations,
        services=services,
        capacity=capacity,
        sharing_ratio=sharing_ratio(plan),
        error_count=error_count,
        warning_count=len(violations) - error_count,
    )
