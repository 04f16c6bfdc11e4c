"""
Shared plan builders and hypothesis strategies for the test suite.
"""

from typing import List, Optional, Tuple

from hypothesis import strategies as st

from models import (
    Domain,
    DomainKind,
    IsolationClass,
    LatencyClass,
    LifecycleState,
    NetworkPlan,
    Nsi,
    Nssi,
    NssiKind,
    PeeringAgreement,
    PeeringDirection,
    ReliabilityClass,
    Reservation,
    ServiceRequest,
    SubscriberClass,
    Tenant,
)
from scenarios import DeploymentScenario, ScenarioKind

UO = "uo"


def uo_domain() -> Domain:
    return Domain(id=UO, kind=DomainKind.MICRO_OPERATOR, name="micro-operator")


def mno_domain(mno_id: str) -> Domain:
    return Domain(id=mno_id, kind=DomainKind.MNO, name=mno_id.upper())


def nssi(nssi_id: str, kind: NssiKind, owner: str = UO, sharable: bool = True, capacity: int = 10,
         location: Optional[str] = None) -> Nssi:
    return Nssi(id=nssi_id, kind=kind, owner=owner, sharable=sharable, capacity=capacity, location=location)


def tenant(tenant_id: str, locations: Optional[List[str]] = None, **fields) -> Tenant:
    return Tenant(id=tenant_id, locations=locations or ["site"], **fields)


def request(request_id: str, tenant_id: str, demand: int = 2, locations: Optional[List[str]] = None,
            **fields) -> ServiceRequest:
    return ServiceRequest(id=request_id, tenant=tenant_id, demand=demand, locations=locations or ["site"], **fields)


def imports_from(mno_id: str, *exported: str) -> PeeringAgreement:
    return PeeringAgreement(mno=mno_id, direction=PeeringDirection.MICRO_OPERATOR_USES_MNO, exported_nssis=list(exported))


# ==================== SCENARIO FIXTURES ====================

def scenario_setup(kind: ScenarioKind) -> Tuple[NetworkPlan, DeploymentScenario, List[PeeringAgreement]]:
    """A small network for each deployment: plan without agreements, the scenario, and the agreements"""
    domains = [uo_domain()]
    nssis = [
        nssi("an-1", NssiKind.AN, capacity=12, location="site"),
        nssi("an-2", NssiKind.AN, capacity=12, location="yard"),
        nssi("cn-1", NssiKind.CN, capacity=12),
    ]
    agreements: List[PeeringAgreement] = []

    if kind is ScenarioKind.CLOSED_A:
        plan = NetworkPlan(
            domains=domains,
            nssis=[n for n in nssis if n.location != "yard"],
            tenants=[tenant("t1"), tenant("t2"), tenant("t3")],
        )
        return plan, DeploymentScenario(kind=kind), agreements

    if kind is ScenarioKind.OPEN_PUBLIC:
        tenants = [tenant("public", subscriber_class=SubscriberClass.GENERAL_PUBLIC)]
        return NetworkPlan(domains=domains, tenants=tenants), DeploymentScenario(kind=kind), agreements

    domains += [mno_domain("mno-a"), mno_domain("mno-b")]
    nssis += [
        nssi("cn-mno-a", NssiKind.CN, owner="mno-a", capacity=8),
        nssi("cn-mno-b", NssiKind.CN, owner="mno-b", capacity=8),
    ]
    both = ["site", "yard"]

    if kind is ScenarioKind.CLOSED_B:
        tenants = [
            tenant("t1", both),
            tenant("t2", both, external_connectivity_need=True),
            tenant("t3", ["yard"]),
        ]
        agreements = [imports_from("mno-a", "cn-mno-a")]
        scenario = DeploymentScenario(kind=kind, multi_location=True, peered_mno_count=1)
    elif kind is ScenarioKind.OPEN_MNO:
        tenants = [
            tenant("subs-a", both, subscriber_class=SubscriberClass.MNO_SUBSCRIBER_GROUP, home_mno="mno-a"),
            tenant("subs-b", both, subscriber_class=SubscriberClass.MNO_SUBSCRIBER_GROUP, home_mno="mno-b"),
            tenant("t1", both),
        ]
        agreements = [imports_from("mno-a", "cn-mno-a"), imports_from("mno-b", "cn-mno-b")]
        scenario = DeploymentScenario(kind=kind, peered_mno_count=2)
    else:
        tenants = [
            tenant("t1", both),
            tenant("t2", both, external_connectivity_need=True),
            tenant("subs-a", both, subscriber_class=SubscriberClass.MNO_SUBSCRIBER_GROUP, home_mno="mno-a"),
        ]
        agreements = [
            PeeringAgreement(
                mno="mno-a", direction=PeeringDirection.BIDIRECTIONAL,
                exported_nssis=["cn-mno-a"], exported_nsis=["mno-a-embb"],
            ),
            imports_from("mno-b", "cn-mno-b"),
        ]
        scenario = DeploymentScenario(kind=kind, multi_location=True, peered_mno_count=2)

    return NetworkPlan(domains=domains, nssis=nssis, tenants=tenants), scenario, agreements


# ==================== STRATEGIES ====================

@st.composite
def random_plans(draw, max_nsis: int = 6, max_nssis: int = 10, max_mnos: int = 2) -> NetworkPlan:
    """
    Structurally consistent plans; compositions may be illegal, constituents may dangle.
    Tenants cover every subscriber class and some NSIs reserve units on their constituents.
    """
    mnos = [f"mno-{i}" for i in range(draw(st.integers(0, max_mnos)))]
    owners = [UO] + mnos
    nssi_count = draw(st.integers(1, max_nssis))
    nssis = [
        Nssi(
            id=f"n{i}",
            kind=draw(st.sampled_from(list(NssiKind))),
            owner=draw(st.sampled_from(owners)),
            sharable=draw(st.booleans()),
            capacity=draw(st.integers(0, 10)),
        )
        for i in range(nssi_count)
    ]

    tenants = [tenant("t")]
    if draw(st.booleans()):
        tenants.append(tenant("x", external_connectivity_need=True))
    if draw(st.booleans()):
        tenants.append(tenant("pub", subscriber_class=SubscriberClass.GENERAL_PUBLIC))
    for mno in mnos:
        if draw(st.booleans()):
            tenants.append(tenant(f"subs-{mno}", subscriber_class=SubscriberClass.MNO_SUBSCRIBER_GROUP, home_mno=mno))
    tenant_ids = [t.id for t in tenants]

    pool = [n.id for n in nssis] + ["ghost"]
    nsis = []
    reservations = []
    for i in range(draw(st.integers(0, max_nsis))):
        nsi = Nsi(
            id=f"s{i}",
            tenant=draw(st.sampled_from(tenant_ids)),
            constituents=draw(st.lists(st.sampled_from(pool), max_size=4, unique=True)),
            linked_foreign_nsis=draw(st.lists(st.sampled_from(["f1", "f2"]), max_size=1, unique=True)),
            lifecycle=draw(st.sampled_from(list(LifecycleState))),
        )
        nsis.append(nsi)
        for constituent in nsi.constituents:
            units = draw(st.one_of(st.none(), st.integers(1, 6)))
            if constituent != "ghost" and units is not None:
                reservations.append(Reservation(nssi=constituent, nsi=nsi.id, units=units))

    return NetworkPlan(
        domains=[uo_domain()] + [mno_domain(m) for m in mnos],
        nssis=nssis,
        tenants=tenants,
        nsis=nsis,
        reservations=reservations,
    )


@st.composite
def service_requests(draw, plan: NetworkPlan, prefix: str = "r", max_size: int = 8) -> List[ServiceRequest]:
    """Requests from the plan's tenants, each within its tenant's locations"""
    tenants = sorted(plan.tenants, key=lambda t: t.id)
    count = draw(st.integers(1, max_size))
    requests = []
    for i in range(count):
        owner = draw(st.sampled_from(tenants))
        requests.append(ServiceRequest(
            id=f"{prefix}{i}",
            tenant=owner.id,
            latency_class=draw(st.sampled_from(list(LatencyClass))),
            isolation_class=draw(st.sampled_from(list(IsolationClass))),
            reliability_class=draw(st.sampled_from(list(ReliabilityClass))),
            wide_area=draw(st.booleans()),
            demand=draw(st.integers(1, 5)),
            locations=draw(st.lists(st.sampled_from(owner.locations), min_size=1, unique=True)),
        ))
    return requests


def requests_for(kind: ScenarioKind) -> st.SearchStrategy:
    plan, _, _ = scenario_setup(kind)
    return service_requests(plan)
