"""
Peering agreements, foreign NSSI import and service-level binding.
"""

import pytest

from classification import classify_nsi, classify_nsi_type
from errors import (
    DuplicateReservation,
    ForeignCapacityExhausted,
    InvalidExport,
    NonSharableExport,
    NotExported,
    ScenarioForbidsFederation,
    UnknownDomain,
    UnknownForeignNsi,
    UnknownNsi,
    UnknownNssi,
    WrongScenario,
)
from federation import bind_service, eligible_foreign_nssis, import_foreign_nssi, register_peer
from models import (
    LifecycleState,
    NetworkPlan,
    Nsi,
    NsiType,
    NssiKind,
    PeeringAgreement,
    PeeringDirection,
    ServiceBinding,
)
from plan_strategies import imports_from, mno_domain, nssi, tenant, uo_domain
from resources import Ledger
from scenarios import DeploymentScenario, ScenarioKind

MIXED_A = DeploymentScenario(kind=ScenarioKind.MIXED_OPTION_A)
MIXED_B = DeploymentScenario(kind=ScenarioKind.MIXED_OPTION_B)
CLOSED_A = DeploymentScenario(kind=ScenarioKind.CLOSED_A)


@pytest.fixture
def plan() -> NetworkPlan:
    return NetworkPlan(
        domains=[uo_domain(), mno_domain("mno-a"), mno_domain("mno-b")],
        nssis=[
            nssi("an-1", NssiKind.AN),
            nssi("cn-1", NssiKind.CN),
            nssi("an-x", NssiKind.AN, sharable=False),
            nssi("cn-m", NssiKind.CN, owner="mno-a", capacity=5),
            nssi("cn-b", NssiKind.CN, owner="mno-b"),
            nssi("cn-locked", NssiKind.CN, owner="mno-a", sharable=False),
        ],
        tenants=[tenant("t", external_connectivity_need=True)],
        nsis=[Nsi(id="a", tenant="t", constituents=["an-1", "cn-1"])],
    )


# ==================== PEERING ====================

def test_register_peer_makes_exports_eligible(plan):
    updated = register_peer(plan, imports_from("mno-a", "cn-m"))
    updated = register_peer(updated, imports_from("mno-b", "cn-b"))
    assert updated.version == plan.version + 2
    assert eligible_foreign_nssis(updated) == ["cn-b", "cn-m"]
    assert eligible_foreign_nssis(updated, "mno-b") == ["cn-b"]
    assert updated.peered_mnos() == ["mno-a", "mno-b"]


def test_export_only_agreements_offer_nothing_to_import(plan):
    agreement = PeeringAgreement(
        mno="mno-a", direction=PeeringDirection.MNO_USES_MICRO_OPERATOR, exported_local_nssis=["cn-1"],
    )
    assert eligible_foreign_nssis(register_peer(plan, agreement)) == []


@pytest.mark.parametrize("agreement, error", [
    (imports_from("mno-z", "cn-m"), UnknownDomain),
    (imports_from("uo"), UnknownDomain),
    (imports_from("mno-b", "cn-m"), InvalidExport),
    (imports_from("mno-a", "cn-locked"), NonSharableExport),
    (imports_from("mno-a", "cn-ghost"), UnknownNssi),
    (
        PeeringAgreement(mno="mno-a", direction=PeeringDirection.BIDIRECTIONAL, exported_local_nssis=["cn-m"]),
        InvalidExport,
    ),
    (
        PeeringAgreement(mno="mno-a", direction=PeeringDirection.BIDIRECTIONAL, exported_local_nssis=["an-x"]),
        NonSharableExport,
    ),
])
def test_register_peer_errors(plan, agreement, error):
    with pytest.raises(error):
        register_peer(plan, agreement)


def test_agreement_direction_must_allow_the_exports():
    with pytest.raises(ValueError):
        PeeringAgreement(mno="mno-a", direction=PeeringDirection.MNO_USES_MICRO_OPERATOR, exported_nssis=["cn-m"])
    with pytest.raises(ValueError):
        PeeringAgreement(mno="mno-a", direction=PeeringDirection.MICRO_OPERATOR_USES_MNO, exported_nsis=["embb"])


# ==================== IMPORT ====================

def test_import_reserves_units_and_makes_type3(plan):
    peered = register_peer(plan, imports_from("mno-a", "cn-m"))
    updated = import_foreign_nssi(peered, "a", "cn-m", 3, MIXED_A)
    assert updated.nsi("a").constituents == ["an-1", "cn-1", "cn-m"]
    assert Ledger.from_plan(updated).residual("cn-m") == 2
    result = classify_nsi(updated, "a")
    assert result.nsi_type is NsiType.TYPE3
    assert result.foreign_constituents == ["cn-m"]


def test_import_errors(plan):
    peered = register_peer(plan, imports_from("mno-a", "cn-m"))
    with pytest.raises(NotExported):
        import_foreign_nssi(peered, "a", "cn-b", 1, MIXED_A)
    with pytest.raises(ForeignCapacityExhausted):
        import_foreign_nssi(peered, "a", "cn-m", 6, MIXED_A)
    with pytest.raises(UnknownNsi):
        import_foreign_nssi(peered, "missing", "cn-m", 1, MIXED_A)
    imported = import_foreign_nssi(peered, "a", "cn-m", 1, MIXED_A)
    with pytest.raises(DuplicateReservation):
        import_foreign_nssi(imported, "a", "cn-m", 1, MIXED_A)


def test_closed_a_forbids_import(plan):
    peered = register_peer(plan, imports_from("mno-a", "cn-m"))
    with pytest.raises(ScenarioForbidsFederation):
        import_foreign_nssi(peered, "a", "cn-m", 1, CLOSED_A)


def test_closed_a_forbids_import_for_a_private_tenant(plan):
    private = plan.evolve(tenants=[tenant("t")])
    peered = register_peer(private, imports_from("mno-a", "cn-m"))
    with pytest.raises(ScenarioForbidsFederation):
        import_foreign_nssi(peered, "a", "cn-m", 1, CLOSED_A)


# ==================== BINDING ====================

def _with_embb(plan: NetworkPlan) -> NetworkPlan:
    return register_peer(plan, PeeringAgreement(
        mno="mno-a", direction=PeeringDirection.MNO_USES_MICRO_OPERATOR, exported_nsis=["mno-a-embb"],
    ))


def test_bind_links_foreign_nsis(plan):
    bound = bind_service(_with_embb(plan), ServiceBinding(
        service="svc", local_nsis=["a"], foreign_nsis=["mno-a-embb"],
    ), MIXED_B)
    assert bound.nsi("a").linked_foreign_nsis == ["mno-a-embb"]
    assert bound.nsi("a").constituents == ["an-1", "cn-1"]
    assert classify_nsi_type(bound, "a") is NsiType.TYPE3
    assert [b.service for b in bound.bindings] == ["svc"]


def test_bind_needs_option_b_for_foreign_nsis(plan):
    binding = ServiceBinding(service="svc", local_nsis=["a"], foreign_nsis=["mno-a-embb"])
    with pytest.raises(WrongScenario):
        bind_service(_with_embb(plan), binding, CLOSED_A)
    with pytest.raises(WrongScenario):
        bind_service(_with_embb(plan), binding, MIXED_A)


def test_empty_binding_is_legal_anywhere(plan):
    bound = bind_service(plan, ServiceBinding(service="svc"), CLOSED_A)
    assert bound.version == plan.version + 1
    assert bound.bindings == [ServiceBinding(service="svc")]


def test_local_only_binding_leaves_types_alone(plan):
    bound = bind_service(plan, ServiceBinding(service="svc", local_nsis=["a"]), CLOSED_A)
    assert classify_nsi_type(bound, "a") is NsiType.TYPE1


def test_bind_errors(plan):
    with pytest.raises(UnknownForeignNsi):
        bind_service(_with_embb(plan), ServiceBinding(service="svc", foreign_nsis=["mno-b-urllc"]), MIXED_B)
    retired = plan.model_copy(update={
        "nsis": [Nsi(id="a", tenant="t", constituents=["an-1", "cn-1"], lifecycle=LifecycleState.DECOMMISSIONED)],
    })
    with pytest.raises(UnknownNsi):
        bind_service(retired, ServiceBinding(service="svc", local_nsis=["a"]), MIXED_B)
