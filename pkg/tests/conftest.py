from __future__ import annotations

import pytest

from beliefcast.oilmarket import build_base_case, load_parameters, load_reference_actuals
from beliefcast.oilmarket.build import build_base_case_document
from beliefcast.scenario import build_constrained_case


@pytest.fixture(scope="session")
def params():
    return load_parameters()


@pytest.fixture(scope="session")
def actuals():
    return load_reference_actuals()


@pytest.fixture(scope="session")
def base_doc(params):
    return build_base_case_document(params)


@pytest.fixture(scope="session")
def base_net(params):
    return build_base_case(params)


@pytest.fixture(scope="session")
def constrained_net(params, actuals):
    return build_constrained_case(params, actuals)
