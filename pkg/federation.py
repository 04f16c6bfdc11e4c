"""
Micro-operator <-> MNO federation.
Option A imports a foreign NSSI as a constituent of a local NSI.
Option B binds foreign NSIs next to local NSIs at the service level.
"""

import logging
from typing import List, Optional

from errors import (
    DuplicateReservation,
    ForeignCapacityExhausted,
    InvalidExport,
    NonSharableExport,
    NotExported,
    ScenarioForbidsFederation,
    UnknownDomain,
    UnknownForeignNsi,
    WrongScenario,
)
from models import DomainKind, NetworkPlan, NsiType, PeeringAgreement, ServiceBinding
from resources import Ledger, with_ledger
from scenarios import DeploymentScenario, ScenarioKind, allowed_types, contextualize

logger = logging.getLogger(__name__)


def register_peer(plan: NetworkPlan, agreement: PeeringAgreement) -> NetworkPlan:
    """Record a peering agreement; its exported MNO NSSIs become selectable by the planner"""
    domain = plan.domain(agreement.mno)
    if domain.kind is not DomainKind.MNO:
        raise UnknownDomain(f"'{agreement.mno}' is not an MNO domain")

    for nssi_id in agreement.exported_nssis:
        nssi = plan.nssi(nssi_id)
        if nssi.owner != agreement.mno:
            raise InvalidExport(f"NSSI '{nssi_id}' is owned by '{nssi.owner}', not by '{agreement.mno}'")
        if not nssi.sharable:
            raise NonSharableExport(f"NSSI '{nssi_id}' is not sharable and cannot be exported")

    for nssi_id in agreement.exported_local_nssis:
        nssi = plan.nssi(nssi_id)
        if nssi.owner != plan.micro_operator_id:
            raise InvalidExport(f"NSSI '{nssi_id}' is not owned by the micro-operator")
        if not nssi.sharable:
            raise NonSharableExport(f"NSSI '{nssi_id}' is not sharable and cannot be offered to '{agreement.mno}'")

    logger.info(
        f"Registered peering with {agreement.mno} ({agreement.direction.value}): "
        f"{len(agreement.exported_nssis)} NSSI(s) in, {len(agreement.exported_local_nssis)} NSSI(s) out"
    )
    return plan.evolve(agreements=plan.agreements + [agreement])


def eligible_foreign_nssis(plan: NetworkPlan, mno: Optional[str] = None) -> List[str]:
    """Foreign NSSIs the micro-operator may import, optionally limited to one MNO, sorted by id"""
    eligible = set()
    for agreement in plan.agreements:
        if not agreement.direction.imports_allowed:
            continue
        if mno is not None and agreement.mno != mno:
            continue
        eligible.update(agreement.exported_nssis)
    return sorted(eligible)


def import_foreign_nssi(
    plan: NetworkPlan,
    nsi_id: str,
    foreign_nssi: str,
    units: int,
    scenario: DeploymentScenario,
) -> NetworkPlan:
    """Add an exported MNO NSSI to a live local NSI and reserve units on it"""
    nsi = plan.live_nsi(nsi_id)
    context = contextualize(scenario, plan)
    if NsiType.TYPE3 not in allowed_types(context):
        raise ScenarioForbidsFederation(f"{context.kind.value} does not permit Type3 slices")
    if foreign_nssi not in eligible_foreign_nssis(plan):
        raise NotExported(f"no agreement exports NSSI '{foreign_nssi}'")
    if foreign_nssi in nsi.constituents:
        raise DuplicateReservation(f"NSI '{nsi_id}' already holds '{foreign_nssi}'")

    ledger = Ledger.from_plan(plan)
    residual = ledger.residual(foreign_nssi)
    if residual < units:
        raise ForeignCapacityExhausted(f"'{foreign_nssi}' has {residual} residual units, {units} requested")
    ledger = ledger.admit(foreign_nssi, nsi_id, units)

    updated = nsi.model_copy(update={"constituents": nsi.constituents + [foreign_nssi]})
    nsis = [updated if n.id == nsi_id else n for n in plan.nsis]
    logger.info(f"Imported {foreign_nssi} into {nsi_id} ({units} units)")
    return with_ledger(plan, ledger, nsis=nsis)


def bind_service(plan: NetworkPlan, binding: ServiceBinding, scenario: DeploymentScenario) -> NetworkPlan:
    """
    Record a service composed of local and foreign NSIs.
    Bound local NSIs get the foreign NSIs as links; their constituents are left alone.
    """
    if binding.foreign_nsis and scenario.kind is not ScenarioKind.MIXED_OPTION_B:
        raise WrongScenario(f"foreign NSI bindings need MixedOptionB, not {scenario.kind.value}")
    for local in binding.local_nsis:
        plan.live_nsi(local)
    exported = plan.exported_foreign_nsis()
    for foreign in binding.foreign_nsis:
        if foreign not in exported:
            raise UnknownForeignNsi(f"foreign NSI '{foreign}' is not offered by any agreement")

    nsis = []
    for nsi in plan.nsis:
        if nsi.id in binding.local_nsis and binding.foreign_nsis:
            links = sorted(set(nsi.linked_foreign_nsis) | set(binding.foreign_nsis))
            nsi = nsi.model_copy(update={"linked_foreign_nsis": links})
        nsis.append(nsi)

    logger.info(
        f"Bound service {binding.service}: local {binding.local_nsis}, foreign {binding.foreign_nsis}"
    )
    return plan.evolve(nsis=nsis, bindings=plan.bindings + [binding])
