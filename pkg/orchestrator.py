"""
Slice orchestration: service translation, NSI planning and the slice lifecycle.
translate_service -> plan_nsi -> instantiate, then transition through the lifecycle.
"""

import logging
import threading
from enum import Enum
from itertools import product
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

from pydantic import Field, model_validator

from classification import classify_nsi_type
from errors import (
    CapacityRace,
    ContradictoryRequirement,
    DuplicateReservation,
    FederationRequired,
    ForeignCapacityExhausted,
    IllegalTransition,
    InsufficientCapacity,
    InvalidRequest,
    NoPeeredMno,
    ScenarioForbidsFederation,
    ScenarioForbidsType,
    StalePlanVersion,
    UnknownNssi,
    UnsatisfiableComposition,
    WrongActor,
)
from federation import bind_service, eligible_foreign_nssis, import_foreign_nssi, register_peer
from models import (
    MANAGER_FOR_MODE,
    Frozen,
    InstantiationMode,
    IsolationClass,
    LatencyClass,
    LifecycleState,
    Manager,
    NetworkPlan,
    Nsi,
    Nssi,
    NssiKind,
    NsiType,
    PeeringAgreement,
    Reservation,
    ServiceBinding,
    ServiceRequest,
    SubscriberClass,
    Tenant,
    fresh_id,
    planned_nsi_id,
)
from resources import Ledger, with_ledger
from scenarios import (
    CLOSED_TENANT_KINDS,
    DeploymentScenario,
    RuleViolation,
    ScenarioKind,
    allowed_types,
    check_scenario,
    contextualize,
    follows_closed_rules,
    tenant_allowed_types,
    validate_network_plan,
)

logger = logging.getLogger(__name__)


# ==================== REQUIREMENTS ====================

class ConstraintBound(str, Enum):
    EXACTLY = "Exactly"
    AT_MOST = "AtMost"


class TypeConstraint(Frozen):
    bound: ConstraintBound
    nsi_type: NsiType

    def admits(self, nsi_type: NsiType) -> bool:
        if self.bound is ConstraintBound.EXACTLY:
            return nsi_type is self.nsi_type
        return nsi_type.rank <= self.nsi_type.rank

    def __str__(self) -> str:
        return f"{self.bound.value} {self.nsi_type.value}"


EXACTLY_TYPE1 = TypeConstraint(bound=ConstraintBound.EXACTLY, nsi_type=NsiType.TYPE1)


class SliceRequirement(Frozen):
    service: str = Field(..., description="ServiceRequest id")
    tenant: str
    required_type: TypeConstraint
    needs_foreign: bool = False
    per_kind_demand: Dict[NssiKind, int] = Field(..., description="Units to reserve per subnet kind")
    locations: List[str] = Field(..., min_length=1)

    @model_validator(mode="after")
    def demand_covers_both_kinds(self) -> "SliceRequirement":
        for kind in NssiKind:
            if self.per_kind_demand.get(kind, 0) <= 0:
                raise ValueError(f"requirement {self.service}: no positive demand for {kind.value}")
        return self


class PlanningPolicy(Frozen):
    shared_nssi_capacity: int = Field(default=10, ge=1, description="Capacity of a fresh sharable NSSI")


class PlanDelta(Frozen):
    base_version: int = Field(..., description="Version of the plan the delta was computed from")
    created_nssis: List[Nssi] = Field(default_factory=list)
    reused_nssis: List[str] = Field(default_factory=list)
    foreign_nssis: List[str] = Field(default_factory=list)
    created_nsi: Nsi
    reservations: List[Reservation] = Field(default_factory=list)


LEGAL_TRANSITIONS: Set[Tuple[LifecycleState, LifecycleState]] = {
    (LifecycleState.PLANNED, LifecycleState.INSTANTIATED),
    (LifecycleState.INSTANTIATED, LifecycleState.ACTIVE),
    (LifecycleState.ACTIVE, LifecycleState.DECOMMISSIONED),
    (LifecycleState.INSTANTIATED, LifecycleState.DECOMMISSIONED),
}

DEFAULT_NF_LABELS = {
    NssiKind.AN: ["gNB"],
    NssiKind.CN: ["AMF", "SMF", "UPF"],
}


# ==================== TRANSLATION ====================

def translate_service(request: ServiceRequest, scenario: DeploymentScenario) -> SliceRequirement:
    """Map a service request to the slice requirement the planner works from"""
    exclusive = (
        request.latency_class is LatencyClass.ULTRA_LOW
        or request.isolation_class is IsolationClass.EXCLUSIVE
    )
    if exclusive and request.wide_area:
        raise ContradictoryRequirement(
            f"request '{request.id}' needs an unshared Type1 slice and wide-area federation "
            f"at the same time ({scenario.kind.value})"
        )

    if exclusive:
        constraint = EXACTLY_TYPE1
    elif request.wide_area:
        constraint = TypeConstraint(bound=ConstraintBound.AT_MOST, nsi_type=NsiType.TYPE3)
    else:
        constraint = TypeConstraint(bound=ConstraintBound.AT_MOST, nsi_type=NsiType.TYPE2)

    return SliceRequirement(
        service=request.id,
        tenant=request.tenant,
        required_type=constraint,
        needs_foreign=request.wide_area,
        per_kind_demand={NssiKind.AN: request.demand, NssiKind.CN: request.demand},
        locations=list(request.locations),
    )


# ==================== PLANNING ====================

def _pick_foreign(
    plan: NetworkPlan,
    context: DeploymentScenario,
    tenant: Tenant,
    requirement: SliceRequirement,
    ledger: Ledger,
) -> str:
    subscriber = tenant.subscriber_class is SubscriberClass.MNO_SUBSCRIBER_GROUP
    if subscriber and context.kind is ScenarioKind.OPEN_MNO:
        candidates = eligible_foreign_nssis(plan, tenant.home_mno)
    elif subscriber:
        home = eligible_foreign_nssis(plan, tenant.home_mno)
        candidates = home + [n for n in eligible_foreign_nssis(plan) if n not in home]
    else:
        candidates = eligible_foreign_nssis(plan)

    if not candidates:
        scope = f"home MNO '{tenant.home_mno}'" if subscriber else "any peered MNO"
        raise NoPeeredMno(f"request '{requirement.service}' needs a foreign NSSI but {scope} exports none")

    for nssi_id in candidates:
        demand = requirement.per_kind_demand[plan.nssi(nssi_id).kind]
        if ledger.residual(nssi_id) >= demand:
            return nssi_id
    raise ForeignCapacityExhausted(
        f"no exported NSSI has residual capacity for request '{requirement.service}' "
        f"(checked {', '.join(candidates)})"
    )


def _reuse_is_safe(
    plan: NetworkPlan,
    context: DeploymentScenario,
    tenant: Tenant,
    nssi_id: str,
    federated: bool,
) -> bool:
    """Whether joining the NSSI keeps every current holder within its tenant's rules"""
    closed = context.kind in CLOSED_TENANT_KINDS
    for holder_id in plan.referencing_nsis(nssi_id):
        holder = plan.nsi(holder_id)
        holder_tenant = plan.tenant(holder.tenant)
        if holder_tenant.subscriber_class is SubscriberClass.GENERAL_PUBLIC:
            return False
        current = classify_nsi_type(plan, holder_id)
        after = NsiType.TYPE2 if current is NsiType.TYPE1 else current
        if after not in tenant_allowed_types(context, holder_tenant):
            return False
        if closed and federated and follows_closed_rules(context, holder_tenant):
            return False
        if closed and current is NsiType.TYPE3 and follows_closed_rules(context, tenant):
            return False
    return True


def _reuse_candidates(
    plan: NetworkPlan,
    requirement: SliceRequirement,
    kind: NssiKind,
    ledger: Ledger,
) -> List[str]:
    """Sharable micro-operator NSSIs of the kind that serve the locations and can hold the demand, by id"""
    demand = requirement.per_kind_demand[kind]
    return [
        nssi.id
        for nssi in sorted(plan.nssis, key=lambda n: n.id)
        if nssi.kind is kind
        and nssi.sharable
        and nssi.owner == plan.micro_operator_id
        and nssi.serves(requirement.locations)
        and ledger.residual(nssi.id) >= demand
    ]


Assignment = Tuple[Optional[str], Optional[str]]


def _assignments(
    plan: NetworkPlan,
    context: DeploymentScenario,
    tenant: Tenant,
    requirement: SliceRequirement,
    federated: bool,
) -> Iterator[Assignment]:
    """
    (AN, CN) choices to try, None meaning a fresh NSSI: the lowest-id safe reuse first,
    then all fresh, then every remaining combination.
    """
    ledger = Ledger.from_plan(plan)
    an_candidates = _reuse_candidates(plan, requirement, NssiKind.AN, ledger)
    cn_candidates = _reuse_candidates(plan, requirement, NssiKind.CN, ledger)

    def first_safe(candidates: List[str]) -> Optional[str]:
        for nssi_id in candidates:
            if _reuse_is_safe(plan, context, tenant, nssi_id, federated):
                return nssi_id
        return None

    seen: Set[Assignment] = set()
    ordered = [(first_safe(an_candidates), first_safe(cn_candidates)), (None, None)]
    ordered += list(product(an_candidates + [None], cn_candidates + [None]))
    for assignment in ordered:
        if assignment not in seen:
            seen.add(assignment)
            yield assignment


def _compose(
    plan: NetworkPlan,
    tenant: Tenant,
    requirement: SliceRequirement,
    policy: PlanningPolicy,
    foreign: Optional[str],
    assignment: Assignment,
) -> PlanDelta:
    nsi_id = planned_nsi_id(requirement.service, {n.id for n in plan.nsis})
    taken = {n.id for n in plan.nssis}
    exact = requirement.required_type.bound is ConstraintBound.EXACTLY
    public = tenant.subscriber_class is SubscriberClass.GENERAL_PUBLIC
    single_location = requirement.locations[0] if len(set(requirement.locations)) == 1 else None

    created: List[Nssi] = []
    reused: List[str] = []
    constituents: List[str] = []
    reservations: List[Reservation] = []

    for kind, chosen in zip((NssiKind.AN, NssiKind.CN), assignment):
        demand = requirement.per_kind_demand[kind]
        if chosen is not None:
            reused.append(chosen)
        else:
            sharable = not exact and not public
            nssi = Nssi(
                id=fresh_id(f"{kind.value.lower()}-{nsi_id}", taken),
                kind=kind,
                owner=plan.micro_operator_id,
                sharable=sharable,
                capacity=max(demand, policy.shared_nssi_capacity) if sharable else demand,
                location=single_location,
                nf_labels=list(DEFAULT_NF_LABELS[kind]),
            )
            taken.add(nssi.id)
            created.append(nssi)
            chosen = nssi.id
        constituents.append(chosen)
        reservations.append(Reservation(nssi=chosen, nsi=nsi_id, units=demand))

    if foreign is not None:
        constituents.append(foreign)
        demand = requirement.per_kind_demand[plan.nssi(foreign).kind]
        reservations.append(Reservation(nssi=foreign, nsi=nsi_id, units=demand))

    return PlanDelta(
        base_version=plan.version,
        created_nssis=created,
        reused_nssis=reused,
        foreign_nssis=[foreign] if foreign is not None else [],
        created_nsi=Nsi(id=nsi_id, tenant=tenant.id, constituents=constituents, service=requirement.service),
        reservations=reservations,
    )


def _violation_keys(violations: List[RuleViolation]) -> Set[Tuple[str, str]]:
    return {(v.code.value, v.subject) for v in violations}


def plan_nsi(
    plan: NetworkPlan,
    requirement: SliceRequirement,
    scenario: DeploymentScenario,
    policy: Optional[PlanningPolicy] = None,
) -> PlanDelta:
    """
    Choose constituents for a new NSI.
    Exact Type1 gets fresh non-sharable AN and CN NSSIs. Otherwise each kind reuses the
    lowest-id sharable, location-compatible micro-operator NSSI with enough residual capacity
    when that cannot break a rule, and falls back to a fresh sharable NSSI. A foreign NSSI is
    added when the requirement needs one. Every candidate is checked against the full rule set
    before it is returned.
    """
    policy = policy or PlanningPolicy()
    context = contextualize(scenario, plan)
    check_scenario(context)
    tenant = plan.tenant(requirement.tenant)
    permitted = tenant_allowed_types(context, tenant)
    constraint = requirement.required_type

    if (
        context.kind is ScenarioKind.OPEN_MNO
        and tenant.subscriber_class is SubscriberClass.MNO_SUBSCRIBER_GROUP
        and not requirement.needs_foreign
    ):
        raise FederationRequired(
            f"subscribers of '{tenant.home_mno}' are served through their home MNO; "
            f"request '{requirement.service}' must be wide-area"
        )

    if constraint.bound is ConstraintBound.EXACTLY:
        if requirement.needs_foreign:
            raise ContradictoryRequirement(f"request '{requirement.service}' is {constraint} but needs a foreign NSSI")
        if constraint.nsi_type not in permitted:
            raise ScenarioForbidsType(
                f"{constraint} is not available to tenant '{tenant.id}' under {context.kind.value}"
            )

    foreign = None
    if requirement.needs_foreign:
        if NsiType.TYPE3 not in allowed_types(context) or NsiType.TYPE3 not in permitted:
            raise ScenarioForbidsFederation(
                f"{context.kind.value} does not let tenant '{tenant.id}' hold a Type3 slice"
            )
        if not constraint.admits(NsiType.TYPE3):
            raise ContradictoryRequirement(f"request '{requirement.service}' is {constraint} but needs a foreign NSSI")
        foreign = _pick_foreign(plan, context, tenant, requirement, Ledger.from_plan(plan))
    elif not any(constraint.admits(t) for t in permitted if t is not NsiType.TYPE3):
        raise ScenarioForbidsType(
            f"{constraint} without federation is not available to tenant '{tenant.id}' under {context.kind.value}"
        )

    shared_ok = constraint.admits(NsiType.TYPE2) and (foreign is not None or NsiType.TYPE2 in permitted)
    if constraint.bound is ConstraintBound.AT_MOST and shared_ok:
        assignments: Iterable[Assignment] = _assignments(plan, context, tenant, requirement, foreign is not None)
    else:
        assignments = [(None, None)]

    baseline = _violation_keys(validate_network_plan(plan, scenario))
    for assignment in assignments:
        delta = _compose(plan, tenant, requirement, policy, foreign, assignment)
        result = _apply(plan, delta, InstantiationMode.REQUEST)
        introduced = _violation_keys(validate_network_plan(result, scenario)) - baseline
        nsi_type = classify_nsi_type(result, delta.created_nsi.id)
        if not introduced and constraint.admits(nsi_type):
            logger.debug(
                f"Planned {delta.created_nsi.id} as {nsi_type.value}: created {[n.id for n in delta.created_nssis]}, "
                f"reused {delta.reused_nssis}, foreign {delta.foreign_nssis}"
            )
            return delta
        logger.debug(f"Assignment {assignment} for {requirement.service} rejected: {sorted(introduced)}")

    raise UnsatisfiableComposition(
        f"no constituent assignment for request '{requirement.service}' keeps the plan legal "
        f"under {context.kind.value}"
    )


# ==================== INSTANTIATION ====================

def _apply(plan: NetworkPlan, delta: PlanDelta, mode: InstantiationMode) -> NetworkPlan:
    nsi = delta.created_nsi.model_copy(update={
        "lifecycle": LifecycleState.PLANNED,
        "mode": mode,
        "manager": MANAGER_FOR_MODE[mode],
    })
    nssis = plan.nssis + list(delta.created_nssis)
    ledger = Ledger.from_plan(plan.model_copy(update={"nssis": nssis}))
    for reservation in delta.reservations:
        try:
            ledger = ledger.admit(reservation.nssi, reservation.nsi, reservation.units)
        except (InsufficientCapacity, DuplicateReservation, UnknownNssi) as e:
            raise CapacityRace(f"reservation of {reservation.units} on '{reservation.nssi}' failed: {e.message}") from e
    return with_ledger(plan, ledger, nssis=nssis, nsis=plan.nsis + [nsi])


def instantiate(plan: NetworkPlan, delta: PlanDelta, mode: InstantiationMode) -> NetworkPlan:
    """Apply a delta atomically; the new NSI starts Planned under the manager the mode implies"""
    if delta.base_version != plan.version:
        raise StalePlanVersion(f"delta computed from v{delta.base_version}, plan is at v{plan.version}")
    if any(n.id == delta.created_nsi.id for n in plan.nsis):
        raise StalePlanVersion(f"NSI '{delta.created_nsi.id}' already exists")
    updated = _apply(plan, delta, mode)
    logger.info(f"Instantiated {delta.created_nsi.id} in {mode.value} (plan v{updated.version})")
    return updated


# ==================== LIFECYCLE ====================

def transition(plan: NetworkPlan, nsi_id: str, target: LifecycleState, actor: Manager) -> NetworkPlan:
    nsi = plan.nsi(nsi_id)
    if (nsi.lifecycle, target) not in LEGAL_TRANSITIONS:
        raise IllegalTransition(f"NSI '{nsi_id}' cannot move {nsi.lifecycle.value} -> {target.value}")
    operator_decommission = actor is Manager.OPERATOR and target is LifecycleState.DECOMMISSIONED
    if actor is not nsi.manager and not operator_decommission:
        raise WrongActor(f"NSI '{nsi_id}' is managed by {nsi.manager.value}, not {actor.value}")

    updated = nsi.model_copy(update={"lifecycle": target})
    nsis = [updated if n.id == nsi_id else n for n in plan.nsis]
    if target is not LifecycleState.DECOMMISSIONED:
        logger.info(f"NSI {nsi_id}: {nsi.lifecycle.value} -> {target.value} by {actor.value}")
        return plan.evolve(nsis=nsis)

    # exclusive local subnets go with the slice, shared ones stay for the co-sharers
    removed = set()
    for nssi_id in nsi.constituents:
        if not plan.has_nssi(nssi_id):
            continue
        nssi = plan.nssi(nssi_id)
        if not nssi.sharable and not plan.is_foreign(nssi):
            removed.add(nssi_id)

    ledger = Ledger.from_plan(plan).release_all(nsi_id)
    for reservation in list(ledger.reservations):
        if reservation.nssi in removed:
            ledger = ledger.release(reservation.nssi, reservation.nsi)
    nssis = [n for n in plan.nssis if n.id not in removed]
    logger.info(f"NSI {nsi_id} decommissioned by {actor.value}; removed NSSIs {sorted(removed)}")
    return with_ledger(plan, ledger, nsis=nsis, nssis=nssis)


# ==================== ORCHESTRATOR ====================

class SliceOrchestrator:
    """Single writer over the network plan; readers take immutable snapshots"""

    def __init__(
        self,
        plan: NetworkPlan,
        scenario: DeploymentScenario,
        policy: Optional[PlanningPolicy] = None,
    ):
        self.scenario = scenario
        self.policy = policy or PlanningPolicy()
        self._plan = plan
        self._lock = threading.Lock()

    @property
    def version(self) -> int:
        return self._plan.version

    def snapshot(self) -> NetworkPlan:
        return self._plan

    def validate(self) -> List[RuleViolation]:
        return validate_network_plan(self.snapshot(), self.scenario)

    def submit(self, request: ServiceRequest, mode: InstantiationMode) -> Nsi:
        with self._lock:
            plan = self._plan
            tenant = plan.tenant(request.tenant)
            outside = sorted(set(request.locations) - set(tenant.locations))
            if outside:
                raise InvalidRequest(f"request '{request.id}' asks for {outside} outside tenant '{tenant.id}' locations")

            requirement = translate_service(request, contextualize(self.scenario, plan))
            logger.info(f"Request {request.id}: {requirement.required_type}, needs_foreign={requirement.needs_foreign}")
            delta = plan_nsi(plan, requirement, self.scenario, self.policy)
            self._plan = instantiate(plan, delta, mode)
            return self._plan.nsi(delta.created_nsi.id)

    def transition(self, nsi_id: str, target: LifecycleState, actor: Manager) -> Nsi:
        with self._lock:
            self._plan = transition(self._plan, nsi_id, target, actor)
            return self._plan.nsi(nsi_id)

    def register_peer(self, agreement: PeeringAgreement) -> None:
        with self._lock:
            self._plan = register_peer(self._plan, agreement)

    def import_foreign_nssi(self, nsi_id: str, foreign_nssi: str, units: int) -> Nsi:
        with self._lock:
            self._plan = import_foreign_nssi(self._plan, nsi_id, foreign_nssi, units, self.scenario)
            return self._plan.nsi(nsi_id)

    def bind_service(self, binding: ServiceBinding) -> None:
        with self._lock:
            self._plan = bind_service(self._plan, binding, self.scenario)
