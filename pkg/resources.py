"""
Capacity ledger for NSSIs.
The ledger is a value: admit/release return a new ledger and never mutate the old one.
"""

import logging
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from errors import (
    DuplicateReservation,
    InsufficientCapacity,
    InvalidUnits,
    NoSuchReservation,
    UnknownNssi,
)
from models import NetworkPlan, Reservation

logger = logging.getLogger(__name__)


class Overcommit(BaseModel):
    nssi: str
    capacity: int
    reserved: int


class Ledger(BaseModel):
    model_config = ConfigDict(frozen=True)

    capacities: Dict[str, int] = Field(default_factory=dict, description="NSSI id -> capacity units")
    reservations: Tuple[Reservation, ...] = ()

    @classmethod
    def from_plan(cls, plan: NetworkPlan) -> "Ledger":
        return cls(
            capacities={nssi.id: nssi.capacity for nssi in plan.nssis},
            reservations=tuple(_ordered(plan.reservations)),
        )

    def reserved(self, nssi: str) -> int:
        return sum(r.units for r in self.reservations if r.nssi == nssi)

    def residual(self, nssi: str) -> int:
        if nssi not in self.capacities:
            raise UnknownNssi(f"NSSI '{nssi}' has no capacity entry")
        return self.capacities[nssi] - self.reserved(nssi)

    def reservation(self, nssi: str, nsi: str) -> Reservation:
        for r in self.reservations:
            if r.nssi == nssi and r.nsi == nsi:
                return r
        raise NoSuchReservation(f"no reservation of NSSI '{nssi}' for NSI '{nsi}'")

    def holds(self, nssi: str, nsi: str) -> bool:
        return any(r.nssi == nssi and r.nsi == nsi for r in self.reservations)

    def admit(self, nssi: str, nsi: str, units: int) -> "Ledger":
        if units <= 0:
            raise InvalidUnits(f"reservation units must be positive, got {units}")
        if self.holds(nssi, nsi):
            raise DuplicateReservation(f"NSI '{nsi}' already reserves NSSI '{nssi}'")
        residual = self.residual(nssi)
        if residual < units:
            raise InsufficientCapacity(
                f"NSSI '{nssi}' has {residual} residual units, {units} requested by NSI '{nsi}'"
            )
        reservations = _ordered(list(self.reservations) + [Reservation(nssi=nssi, nsi=nsi, units=units)])
        return self.model_copy(update={"reservations": tuple(reservations)})

    def release(self, nssi: str, nsi: str) -> "Ledger":
        released = self.reservation(nssi, nsi)
        remaining = [r for r in self.reservations if r != released]
        return self.model_copy(update={"reservations": tuple(remaining)})

    def release_all(self, nsi: str) -> "Ledger":
        remaining = [r for r in self.reservations if r.nsi != nsi]
        return self.model_copy(update={"reservations": tuple(remaining)})

    def overcommits(self) -> List[Overcommit]:
        found = []
        for nssi in sorted(self.capacities):
            reserved = self.reserved(nssi)
            if reserved > self.capacities[nssi]:
                found.append(Overcommit(nssi=nssi, capacity=self.capacities[nssi], reserved=reserved))
        return found


def _ordered(reservations: List[Reservation]) -> List[Reservation]:
    return sorted(reservations, key=lambda r: (r.nssi, r.nsi))


def with_ledger(plan: NetworkPlan, ledger: Ledger, **changes) -> NetworkPlan:
    """Store the ledger's reservations, plus any other field changes, in a new plan version"""
    return plan.evolve(reservations=list(ledger.reservations), **changes)
