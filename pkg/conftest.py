"""
Shared pytest fixtures and hypothesis profiles.
Select a profile with HYPOTHESIS_PROFILE=ci for the longer runs.
"""

import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from document import PlanDocument, load_document
from models import NetworkPlan, NssiKind
from plan_strategies import nssi, tenant, uo_domain
from settings import Settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile(
    "ci",
    max_examples=1000,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture
def golden():
    def load(name: str) -> PlanDocument:
        return load_document(GOLDEN_DIR / f"{name}.json")
    return load


@pytest.fixture
def app_settings() -> Settings:
    """Settings that ignore the developer's environment and .env file"""
    return Settings(_env_file=None, auto_plan_mode="PredefinedMode", shared_nssi_capacity=10)


@pytest.fixture
def campus_plan() -> NetworkPlan:
    """One micro-operator, one sharable AN and CN, two private tenants"""
    return NetworkPlan(
        domains=[uo_domain()],
        nssis=[
            nssi("an-1", NssiKind.AN, location="site"),
            nssi("cn-1", NssiKind.CN),
        ],
        tenants=[tenant("t1"), tenant("t2")],
    )
