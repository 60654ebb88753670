"""
Shared fixtures: the harvesting example configuration, its equilibrium and certificate.
"""

import pytest

from certificates import build_certificate, certify
from equilibrium import assemble_equilibrium
from model import harvesting_config


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long closed-loop simulations")


@pytest.fixture(scope="session")
def harvest_cfg():
    return harvesting_config()


@pytest.fixture(scope="session")
def harvest_eq(harvest_cfg):
    return assemble_equilibrium(harvest_cfg)


@pytest.fixture(scope="session")
def harvest_cert(harvest_cfg, harvest_eq):
    return build_certificate(harvest_eq, harvest_cfg.gains)


@pytest.fixture(scope="session")
def certified(harvest_cfg, harvest_eq):
    """(certificate with levels, ROA estimate) on a 300-point scan."""
    return certify(harvest_eq, harvest_cfg.gains, resolution=300)
