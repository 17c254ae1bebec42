"""Shared fixtures: one gram cache and one run of each experiment per session.

The expensive experiment drivers are memoized so the regression tests and the
acceptance criteria read the same report objects instead of recomputing
k = 64 states several times.
"""
import os
import time

import pytest

from bergmanlab.bergman_core import CACHE_ENV, build_or_load
from bergmanlab.geometry import domain_by_name, weight_by_name
from bergmanlab.harness.config import ExperimentConfig
from bergmanlab.harness.experiments import ALL_DEFAULTS, RUNNERS


@pytest.fixture(scope="session", autouse=True)
def shared_cache(tmp_path_factory):
    path = tmp_path_factory.mktemp("gram-cache")
    old = os.environ.get(CACHE_ENV)
    os.environ[CACHE_ENV] = str(path)
    yield str(path)
    if old is None:
        os.environ.pop(CACHE_ENV, None)
    else:
        os.environ[CACHE_ENV] = old


@pytest.fixture(scope="session")
def get_state(shared_cache):
    memo = {}

    def build(weight="fs", domain="ball", k=8, method="auto"):
        key = (weight, domain, k, method)
        if key not in memo:
            memo[key] = build_or_load(
                weight_by_name(weight), domain_by_name(domain), k,
                method=method, use_cache=(method == "auto"))
        return memo[key]

    return build


@pytest.fixture(scope="session")
def experiment_run(shared_cache):
    """Memoized (report, wall_seconds) per (experiment, weight, domain)."""
    memo = {}

    def run(experiment, weight=None, domain=None):
        defaults = ALL_DEFAULTS[experiment]
        weight = weight or defaults["weight"]
        domain = domain or defaults["domain"]
        key = (experiment, weight, domain)
        if key not in memo:
            config = ExperimentConfig(experiment=experiment, weight=weight,
                                      domain=domain)
            t0 = time.perf_counter()
            report = RUNNERS[experiment](config)
            memo[key] = (report, time.perf_counter() - t0)
        return memo[key]

    return run
