"""
Core domain vocabulary for micro-operator network slicing.
Domains, NSSIs, NSIs, tenants, service requests, peering agreements and the NetworkPlan that holds them.
All models are frozen; a plan is changed only by building a new plan (see NetworkPlan.evolve).
"""

from enum import Enum
from typing import Dict, List, Optional, Set

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import UnknownDomain, UnknownNsi, UnknownNssi, UnknownTenant


# ==================== ENUMS ====================

class DomainKind(str, Enum):
    MICRO_OPERATOR = "MicroOperator"
    MNO = "MNO"


class NssiKind(str, Enum):
    AN = "AN"
    CN = "CN"


class NsiType(str, Enum):
    TYPE1 = "Type1"
    TYPE2 = "Type2"
    TYPE3 = "Type3"

    @property
    def rank(self) -> int:
        return _TYPE_RANK[self]


_TYPE_RANK = {NsiType.TYPE1: 1, NsiType.TYPE2: 2, NsiType.TYPE3: 3}


class LifecycleState(str, Enum):
    PLANNED = "Planned"
    INSTANTIATED = "Instantiated"
    ACTIVE = "Active"
    DECOMMISSIONED = "Decommissioned"


class InstantiationMode(str, Enum):
    REQUEST = "RequestMode"
    PREDEFINED = "PredefinedMode"


class Manager(str, Enum):
    TENANT = "Tenant"
    OPERATOR = "Operator"


MANAGER_FOR_MODE = {
    InstantiationMode.REQUEST: Manager.TENANT,
    InstantiationMode.PREDEFINED: Manager.OPERATOR,
}


class SubscriberClass(str, Enum):
    PRIVATE_TENANT = "PrivateTenant"
    MNO_SUBSCRIBER_GROUP = "MnoSubscriberGroup"
    GENERAL_PUBLIC = "GeneralPublic"


class LatencyClass(str, Enum):
    ULTRA_LOW = "UltraLow"
    NORMAL = "Normal"


class IsolationClass(str, Enum):
    EXCLUSIVE = "Exclusive"
    SHARED = "Shared"


class ReliabilityClass(str, Enum):
    HIGH = "High"
    NORMAL = "Normal"


class PeeringDirection(str, Enum):
    MICRO_OPERATOR_USES_MNO = "MicroOperatorUsesMno"
    MNO_USES_MICRO_OPERATOR = "MnoUsesMicroOperator"
    BIDIRECTIONAL = "Bidirectional"

    @property
    def imports_allowed(self) -> bool:
        return self in (PeeringDirection.MICRO_OPERATOR_USES_MNO, PeeringDirection.BIDIRECTIONAL)

    @property
    def exports_allowed(self) -> bool:
        return self in (PeeringDirection.MNO_USES_MICRO_OPERATOR, PeeringDirection.BIDIRECTIONAL)


class Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


def _unique(values: List[str], what: str) -> List[str]:
    seen = set()
    for value in values:
        if value in seen:
            raise ValueError(f"duplicate {what} '{value}'")
        seen.add(value)
    return values


def fresh_id(base: str, taken: Set[str]) -> str:
    """base, or base-2, base-3, ... whichever is first not taken"""
    candidate = base
    suffix = 2
    while candidate in taken:
        candidate = f"{base}-{suffix}"
        suffix += 1
    return candidate


def planned_nsi_id(request_id: str, taken: Set[str]) -> str:
    return fresh_id(f"nsi-{request_id}", taken)


# ==================== ENTITIES ====================

class Domain(Frozen):
    id: str = Field(..., min_length=1, description="Domain identifier, unique within a plan")
    kind: DomainKind
    name: str = Field(default="", description="Display name")


class Nssi(Frozen):
    id: str = Field(..., min_length=1)
    kind: NssiKind
    owner: str = Field(..., description="Owning domain id")
    sharable: bool = Field(default=True, description="Whether more than one NSI may reference it")
    capacity: int = Field(..., ge=0, description="Abstract resource units")
    location: Optional[str] = Field(default=None, description="Location tag; None means location-agnostic")
    nf_labels: List[str] = Field(default_factory=list, description="Descriptive network function labels")

    def serves(self, locations: List[str]) -> bool:
        return self.location is None or self.location in locations


class Tenant(Frozen):
    id: str = Field(..., min_length=1)
    subscriber_class: SubscriberClass = SubscriberClass.PRIVATE_TENANT
    home_mno: Optional[str] = Field(default=None, description="Required for MNO subscriber groups")
    locations: List[str] = Field(..., min_length=1)
    external_connectivity_need: bool = False

    @model_validator(mode="after")
    def check_home_mno(self) -> "Tenant":
        is_group = self.subscriber_class is SubscriberClass.MNO_SUBSCRIBER_GROUP
        if is_group and not self.home_mno:
            raise ValueError(f"tenant {self.id}: MnoSubscriberGroup requires home_mno")
        if not is_group and self.home_mno:
            raise ValueError(f"tenant {self.id}: home_mno is only valid for MnoSubscriberGroup")
        return self


class ServiceRequest(Frozen):
    id: str = Field(..., min_length=1)
    tenant: str
    latency_class: LatencyClass = LatencyClass.NORMAL
    isolation_class: IsolationClass = IsolationClass.SHARED
    reliability_class: ReliabilityClass = ReliabilityClass.NORMAL
    wide_area: bool = False
    demand: int = Field(..., gt=0, description="Units reserved on every constituent")
    locations: List[str] = Field(..., min_length=1)


class Nsi(Frozen):
    id: str = Field(..., min_length=1)
    tenant: str
    constituents: List[str] = Field(default_factory=list, description="Ordered NSSI ids, local or foreign")
    linked_foreign_nsis: List[str] = Field(default_factory=list, description="Foreign NSI ids bound at service level")
    lifecycle: LifecycleState = LifecycleState.PLANNED
    mode: InstantiationMode = InstantiationMode.REQUEST
    manager: Manager = Manager.TENANT
    service: Optional[str] = Field(default=None, description="Request that produced this slice")

    @field_validator("constituents")
    @classmethod
    def constituents_are_a_set(cls, value: List[str]) -> List[str]:
        return _unique(value, "constituent")

    @model_validator(mode="after")
    def mode_matches_manager(self) -> "Nsi":
        if MANAGER_FOR_MODE[self.mode] is not self.manager:
            raise ValueError(f"nsi {self.id}: {self.mode.value} requires manager {MANAGER_FOR_MODE[self.mode].value}")
        return self

    @property
    def live(self) -> bool:
        return self.lifecycle is not LifecycleState.DECOMMISSIONED


class Reservation(Frozen):
    nssi: str
    nsi: str
    units: int = Field(..., gt=0)


class PeeringAgreement(Frozen):
    mno: str = Field(..., description="MNO domain id")
    direction: PeeringDirection
    exported_nssis: List[str] = Field(default_factory=list, description="MNO-owned NSSIs offered to the micro-operator")
    exported_local_nssis: List[str] = Field(default_factory=list, description="Micro-operator NSSIs offered to the MNO")
    exported_nsis: List[str] = Field(default_factory=list, description="Opaque MNO NSI ids usable in service bindings")

    @model_validator(mode="after")
    def direction_permits_exports(self) -> "PeeringAgreement":
        if self.exported_nssis and not self.direction.imports_allowed:
            raise ValueError(f"agreement with {self.mno}: exported_nssis need a direction permitting MicroOperatorUsesMno")
        if (self.exported_local_nssis or self.exported_nsis) and not self.direction.exports_allowed:
            raise ValueError(f"agreement with {self.mno}: local exports need a direction permitting MnoUsesMicroOperator")
        return self


class ServiceBinding(Frozen):
    service: str
    local_nsis: List[str] = Field(default_factory=list)
    foreign_nsis: List[str] = Field(default_factory=list)


# ==================== NETWORK PLAN ====================

class NetworkPlan(Frozen):
    """The full network state: the unit of validation, persistence and reporting"""

    domains: List[Domain] = Field(default_factory=list)
    nssis: List[Nssi] = Field(default_factory=list)
    tenants: List[Tenant] = Field(default_factory=list)
    nsis: List[Nsi] = Field(default_factory=list)
    agreements: List[PeeringAgreement] = Field(default_factory=list)
    bindings: List[ServiceBinding] = Field(default_factory=list)
    reservations: List[Reservation] = Field(default_factory=list)
    version: int = Field(default=0, ge=0, description="Bumped on every mutation")

    def evolve(self, **changes) -> "NetworkPlan":
        """Return a copy with the given fields replaced and the version stamp bumped"""
        changes["version"] = self.version + 1
        return self.model_copy(update=changes)

    # ---- lookups ----

    @property
    def micro_operator_id(self) -> Optional[str]:
        for domain in self.domains:
            if domain.kind is DomainKind.MICRO_OPERATOR:
                return domain.id
        return None

    def domain(self, domain_id: str) -> Domain:
        for domain in self.domains:
            if domain.id == domain_id:
                return domain
        raise UnknownDomain(f"domain '{domain_id}' is not part of the plan")

    def has_nssi(self, nssi_id: str) -> bool:
        return any(nssi.id == nssi_id for nssi in self.nssis)

    def nssi(self, nssi_id: str) -> Nssi:
        for nssi in self.nssis:
            if nssi.id == nssi_id:
                return nssi
        raise UnknownNssi(f"NSSI '{nssi_id}' is not part of the plan")

    def tenant(self, tenant_id: str) -> Tenant:
        for tenant in self.tenants:
            if tenant.id == tenant_id:
                return tenant
        raise UnknownTenant(f"tenant '{tenant_id}' is not part of the plan")

    def nsi(self, nsi_id: str) -> Nsi:
        for nsi in self.nsis:
            if nsi.id == nsi_id:
                return nsi
        raise UnknownNsi(f"NSI '{nsi_id}' is not part of the plan")

    def live_nsi(self, nsi_id: str) -> Nsi:
        nsi = self.nsi(nsi_id)
        if not nsi.live:
            raise UnknownNsi(f"NSI '{nsi_id}' is decommissioned")
        return nsi

    @property
    def live_nsis(self) -> List[Nsi]:
        return sorted((nsi for nsi in self.nsis if nsi.live), key=lambda nsi: nsi.id)

    def referencing_nsis(self, nssi_id: str) -> List[str]:
        """Ids of live NSIs holding the NSSI as a constituent, sorted"""
        return sorted(nsi.id for nsi in self.nsis if nsi.live and nssi_id in nsi.constituents)

    def is_foreign(self, nssi: Nssi) -> bool:
        return nssi.owner != self.micro_operator_id

    def public_tenant(self) -> Optional[Tenant]:
        for tenant in sorted(self.tenants, key=lambda t: t.id):
            if tenant.subscriber_class is SubscriberClass.GENERAL_PUBLIC:
                return tenant
        return None

    def nsis_of_tenant(self, tenant_id: str) -> List[Nsi]:
        return [nsi for nsi in self.live_nsis if nsi.tenant == tenant_id]

    def peered_mnos(self) -> List[str]:
        return sorted({agreement.mno for agreement in self.agreements})

    def exported_foreign_nsis(self) -> Dict[str, str]:
        """Foreign NSI id -> owning MNO, for agreements that allow service bindings"""
        exported: Dict[str, str] = {}
        for agreement in self.agreements:
            if agreement.direction.exports_allowed:
                for foreign_nsi in agreement.exported_nsis:
                    exported.setdefault(foreign_nsi, agreement.mno)
        return exported

    # ---- consistency ----

    def consistency_errors(self) -> List[str]:
        """Cross-reference problems that make the plan unusable for rule evaluation"""
        errors: List[str] = []

        for label, ids in (
            ("domain", [d.id for d in self.domains]),
            ("NSSI", [n.id for n in self.nssis]),
            ("tenant", [t.id for t in self.tenants]),
            ("NSI", [n.id for n in self.nsis]),
        ):
            for duplicate in sorted({i for i in ids if ids.count(i) > 1}):
                errors.append(f"duplicate {label} id '{duplicate}'")

        non_empty = bool(self.domains or self.nssis or self.tenants or self.nsis)
        micro_operators = [d for d in self.domains if d.kind is DomainKind.MICRO_OPERATOR]
        if non_empty and len(micro_operators) != 1:
            errors.append(f"expected exactly one MicroOperator domain, found {len(micro_operators)}")

        domain_kinds = {d.id: d.kind for d in self.domains}
        nssi_ids = {n.id for n in self.nssis}
        nsi_ids = {n.id for n in self.nsis}
        tenant_ids = {t.id for t in self.tenants}

        for nssi in sorted(self.nssis, key=lambda n: n.id):
            if nssi.owner not in domain_kinds:
                errors.append(f"NSSI '{nssi.id}' owner '{nssi.owner}' is not a declared domain")

        publics = [t.id for t in self.tenants if t.subscriber_class is SubscriberClass.GENERAL_PUBLIC]
        if len(publics) > 1:
            errors.append(f"more than one GeneralPublic tenant: {', '.join(sorted(publics))}")
        for tenant in sorted(self.tenants, key=lambda t: t.id):
            if tenant.home_mno is not None and domain_kinds.get(tenant.home_mno) is not DomainKind.MNO:
                errors.append(f"tenant '{tenant.id}' home_mno '{tenant.home_mno}' is not an MNO domain")

        for nsi in sorted(self.nsis, key=lambda n: n.id):
            if nsi.tenant not in tenant_ids:
                errors.append(f"NSI '{nsi.id}' tenant '{nsi.tenant}' is not declared")

        for reservation in self.reservations:
            if reservation.nssi not in nssi_ids:
                errors.append(f"reservation on unknown NSSI '{reservation.nssi}'")
            if reservation.nsi not in nsi_ids:
                errors.append(f"reservation for unknown NSI '{reservation.nsi}'")

        for agreement in self.agreements:
            if domain_kinds.get(agreement.mno) is not DomainKind.MNO:
                errors.append(f"agreement references '{agreement.mno}' which is not an MNO domain")
            for exported in agreement.exported_nssis + agreement.exported_local_nssis:
                if exported not in nssi_ids:
                    errors.append(f"agreement with '{agreement.mno}' exports unknown NSSI '{exported}'")

        for binding in self.bindings:
            for local in binding.local_nsis:
                if local not in nsi_ids:
                    errors.append(f"binding '{binding.service}' references unknown NSI '{local}'")

        return errors
