"""
Capacity ledger: admission, release and conservation of units.
"""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import DuplicateReservation, InsufficientCapacity, InvalidUnits, NoSuchReservation, UnknownNssi
from models import NetworkPlan, Nsi, NssiKind, Reservation
from plan_strategies import nssi, tenant, uo_domain
from resources import Ledger, with_ledger


@pytest.fixture
def ledger() -> Ledger:
    return Ledger(capacities={"an-1": 10, "cn-1": 4})


def test_admit_and_release(ledger):
    after = ledger.admit("an-1", "a", 3).admit("an-1", "b", 7)
    assert after.residual("an-1") == 0
    assert ledger.residual("an-1") == 10
    assert after.reservation("an-1", "b").units == 7

    released = after.release("an-1", "a")
    assert released.residual("an-1") == 3
    assert not released.holds("an-1", "a")


def test_admit_refuses_more_than_residual(ledger):
    with pytest.raises(InsufficientCapacity) as e:
        ledger.admit("cn-1", "a", 5)
    assert "4 residual units" in e.value.message


def test_admit_errors(ledger):
    with pytest.raises(InvalidUnits):
        ledger.admit("an-1", "a", 0)
    with pytest.raises(DuplicateReservation):
        ledger.admit("an-1", "a", 1).admit("an-1", "a", 1)
    with pytest.raises(UnknownNssi):
        ledger.admit("ghost", "a", 1)
    with pytest.raises(NoSuchReservation):
        ledger.release("an-1", "a")


def test_release_all_drops_every_reservation_of_an_nsi(ledger):
    after = ledger.admit("an-1", "a", 2).admit("cn-1", "a", 2).admit("an-1", "b", 1).release_all("a")
    assert after.reservations == (Reservation(nssi="an-1", nsi="b", units=1),)


def test_overcommits_reported_for_hand_written_plans():
    plan = NetworkPlan(
        domains=[uo_domain()],
        nssis=[nssi("an-1", NssiKind.AN, capacity=3), nssi("cn-1", NssiKind.CN, capacity=3)],
        tenants=[tenant("t")],
        nsis=[Nsi(id="a", tenant="t", constituents=["an-1", "cn-1"])],
        reservations=[Reservation(nssi="an-1", nsi="a", units=5)],
    )
    ledger = Ledger.from_plan(plan)
    assert [(o.nssi, o.reserved, o.capacity) for o in ledger.overcommits()] == [("an-1", 5, 3)]
    assert ledger.residual("an-1") == -2


def test_with_ledger_bumps_the_plan_version(campus_plan):
    ledger = Ledger.from_plan(campus_plan).admit("an-1", "a", 2)
    plan = with_ledger(campus_plan, ledger)
    assert plan.version == campus_plan.version + 1
    assert plan.reservations == [Reservation(nssi="an-1", nsi="a", units=2)]


def test_with_ledger_carries_other_plan_changes(campus_plan):
    ledger = Ledger.from_plan(campus_plan).admit("cn-1", "a", 1)
    nsis = [Nsi(id="a", tenant="t1", constituents=["an-1", "cn-1"])]
    plan = with_ledger(campus_plan, ledger, nsis=nsis)
    assert plan.version == campus_plan.version + 1
    assert plan.nsis == nsis
    assert Ledger.from_plan(plan).residual("cn-1") == ledger.residual("cn-1")


# ==================== CONSERVATION ====================

def _check_conserved(ledger: Ledger, capacities):
    for nssi_id, capacity in capacities.items():
        reserved = sum(r.units for r in ledger.reservations if r.nssi == nssi_id)
        assert 0 <= reserved <= capacity
        assert ledger.reserved(nssi_id) + ledger.residual(nssi_id) == capacity
    assert ledger.overcommits() == []


def test_conservation_over_random_walk():
    rng = random.Random(20240611)
    capacities = {f"n{i}": rng.randint(0, 12) for i in range(6)}
    nsis = [f"s{i}" for i in range(8)]
    ledger = Ledger(capacities=capacities)

    for _ in range(10_000):
        nssi_id = rng.choice(list(capacities))
        nsi_id = rng.choice(nsis)
        action = rng.random()
        if action < 0.55:
            units = rng.randint(1, 6)
            try:
                ledger = ledger.admit(nssi_id, nsi_id, units)
            except (InsufficientCapacity, DuplicateReservation):
                pass
        elif action < 0.9:
            if ledger.holds(nssi_id, nsi_id):
                ledger = ledger.release(nssi_id, nsi_id)
        else:
            ledger = ledger.release_all(nsi_id)
        _check_conserved(ledger, capacities)


@given(
    capacity=st.integers(0, 20),
    requests=st.lists(st.integers(1, 8), max_size=12),
)
def test_admitted_units_never_exceed_capacity(capacity, requests):
    ledger = Ledger(capacities={"n": capacity})
    admitted = 0
    for index, units in enumerate(requests):
        if units <= capacity - admitted:
            ledger = ledger.admit("n", f"s{index}", units)
            admitted += units
        else:
            with pytest.raises(InsufficientCapacity):
                ledger.admit("n", f"s{index}", units)
    assert ledger.reserved("n") == admitted
    assert ledger.residual("n") == capacity - admitted
