"""
Error types for the MicroSlice engine.
Every failure carries a stable code (the class name) so callers can branch on it.
"""

from typing import List, Optional

from pydantic import BaseModel, Field


class SlicingError(Exception):
    """Base class for every planning, validation and document error"""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    @property
    def code(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


# ==================== LOOKUP ERRORS ====================

class UnknownNsi(SlicingError):
    pass


class UnknownNssi(SlicingError):
    pass


class UnknownTenant(SlicingError):
    pass


class UnknownDomain(SlicingError):
    pass


class UnknownForeignNsi(SlicingError):
    pass


class DanglingConstituent(SlicingError):
    pass


# ==================== PLAN / SCENARIO ERRORS ====================

class MalformedScenario(SlicingError):
    pass


class InconsistentPlan(SlicingError):
    pass


# ==================== ORCHESTRATION ERRORS ====================

class InvalidRequest(SlicingError):
    pass


class ContradictoryRequirement(SlicingError):
    pass


class ScenarioForbidsFederation(SlicingError):
    pass


class ScenarioForbidsType(SlicingError):
    pass


class FederationRequired(SlicingError):
    pass


class NoPeeredMno(SlicingError):
    pass


class ForeignCapacityExhausted(SlicingError):
    pass


class UnsatisfiableComposition(SlicingError):
    pass


class StalePlanVersion(SlicingError):
    pass


class CapacityRace(SlicingError):
    pass


class IllegalTransition(SlicingError):
    pass


class WrongActor(SlicingError):
    pass


# ==================== FEDERATION ERRORS ====================

class NonSharableExport(SlicingError):
    pass


class InvalidExport(SlicingError):
    pass


class NotExported(SlicingError):
    pass


class WrongScenario(SlicingError):
    pass


# ==================== LEDGER ERRORS ====================

class InsufficientCapacity(SlicingError):
    pass


class DuplicateReservation(SlicingError):
    pass


class NoSuchReservation(SlicingError):
    pass


class InvalidUnits(SlicingError):
    pass


# ==================== DOCUMENT ERRORS ====================

class DocumentIssue(BaseModel):
    code: str = Field(..., description="DocumentSyntaxError, UnsupportedSchemaVersion, InvalidDocument, UnknownReference or DuplicateId")
    message: str
    line: Optional[int] = Field(default=None, description="1-based line of the offending text, when known")
    column: Optional[int] = None
    path: str = Field(default="", description="Dotted path inside the document")

    def render(self) -> str:
        where = f"line {self.line}" if self.line is not None else "line ?"
        if self.column is not None:
            where += f", column {self.column}"
        location = f" at {self.path}" if self.path else ""
        return f"{self.code} ({where}){location}: {self.message}"


class DocumentError(SlicingError):
    """A document failed to parse; carries every issue found"""

    def __init__(self, issues: List[DocumentIssue]):
        self.issues = issues
        summary = "; ".join(issue.render() for issue in issues[:3])
        if len(issues) > 3:
            summary += f"; ... {len(issues) - 3} more"
        super().__init__(summary)

    @property
    def codes(self) -> List[str]:
        return [issue.code for issue in self.issues]
