"""
NSI configuration classification and composition checks.
"""

import logging
from enum import Enum
from typing import List

from pydantic import BaseModel, Field

from errors import DanglingConstituent
from models import NetworkPlan, NsiType, NssiKind

logger = logging.getLogger(__name__)


class NsiClassification(BaseModel):
    nsi: str
    nsi_type: NsiType
    locally_shared: bool = Field(..., description="Some constituent is also held by another live NSI")
    foreign_constituents: List[str] = Field(default_factory=list)
    linked_foreign_nsis: List[str] = Field(default_factory=list)


def classify_nsi(plan: NetworkPlan, nsi_id: str) -> NsiClassification:
    """
    Classify a live NSI.
    Foreign exposure (a foreign-owned constituent or a linked foreign NSI) gives Type3 even when
    the slice also shares locally; locally_shared keeps that second fact.
    """
    nsi = plan.live_nsi(nsi_id)

    foreign: List[str] = []
    locally_shared = False
    for nssi_id in nsi.constituents:
        if not plan.has_nssi(nssi_id):
            raise DanglingConstituent(f"NSI '{nsi.id}' references unknown NSSI '{nssi_id}'")
        if plan.is_foreign(plan.nssi(nssi_id)):
            foreign.append(nssi_id)
        if any(other != nsi.id for other in plan.referencing_nsis(nssi_id)):
            locally_shared = True

    if foreign or nsi.linked_foreign_nsis:
        nsi_type = NsiType.TYPE3
    elif locally_shared:
        nsi_type = NsiType.TYPE2
    else:
        nsi_type = NsiType.TYPE1

    return NsiClassification(
        nsi=nsi.id,
        nsi_type=nsi_type,
        locally_shared=locally_shared,
        foreign_constituents=sorted(foreign),
        linked_foreign_nsis=sorted(nsi.linked_foreign_nsis),
    )


def classify_nsi_type(plan: NetworkPlan, nsi_id: str) -> NsiType:
    return classify_nsi(plan, nsi_id).nsi_type


# ==================== COMPOSITION ====================

class CompositionCode(str, Enum):
    TOO_FEW_CONSTITUENTS = "TooFewConstituents"
    MISSING_KIND = "MissingKind"
    DANGLING_CONSTITUENT = "DanglingConstituent"
    NON_SHARABLE_SHARED = "NonSharableShared"


class CompositionIssue(BaseModel):
    code: CompositionCode
    subject: str
    detail: str


def validate_nsi_composition(plan: NetworkPlan, nsi_id: str) -> List[CompositionIssue]:
    """Structural checks on one live NSI; an empty list means the composition is legal"""
    nsi = plan.live_nsi(nsi_id)
    issues: List[CompositionIssue] = []

    if len(nsi.constituents) < 2:
        issues.append(CompositionIssue(
            code=CompositionCode.TOO_FEW_CONSTITUENTS,
            subject=nsi.id,
            detail=f"{len(nsi.constituents)} constituent(s); an NSI needs at least 2",
        ))

    resolved = [plan.nssi(n) for n in nsi.constituents if plan.has_nssi(n)]
    kinds = {nssi.kind for nssi in resolved}
    for kind in (NssiKind.AN, NssiKind.CN):
        if kind not in kinds:
            issues.append(CompositionIssue(
                code=CompositionCode.MISSING_KIND,
                subject=nsi.id,
                detail=f"no {kind.value} constituent",
            ))

    for nssi_id in sorted(nsi.constituents):
        if not plan.has_nssi(nssi_id):
            issues.append(CompositionIssue(
                code=CompositionCode.DANGLING_CONSTITUENT,
                subject=nsi.id,
                detail=f"NSSI '{nssi_id}' does not resolve",
            ))

    for nssi in sorted(resolved, key=lambda n: n.id):
        holders = plan.referencing_nsis(nssi.id)
        if not nssi.sharable and len(holders) > 1:
            issues.append(CompositionIssue(
                code=CompositionCode.NON_SHARABLE_SHARED,
                subject=nsi.id,
                detail=f"non-sharable NSSI '{nssi.id}' is held by {', '.join(holders)}",
            ))

    if issues:
        logger.debug(f"NSI {nsi.id} composition issues: {[i.code.value for i in issues]}")
    return issues
