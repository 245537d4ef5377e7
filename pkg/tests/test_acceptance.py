"""End-to-end acceptance criteria, one test per criterion.

The tolerances are pinned here as literals and compared against the packaged
tolerance file, so editing the JSON cannot quietly relax a criterion.
"""

import functools

import pytest

from parametric_rabi import acceptance

PINNED = {
    "eps_trunc": 1e-8,
    "bell_snapshots": {
        "concurrence_tol": 0.02,
        "purity_tol": 0.02,
        "d_min_tol": 0.02,
        "rows": [
            {"t": 303, "concurrence": 0.96, "purity": 0.97, "d_min": 0.04, "bell": "Phi-", "amp_min": 0.99},
            {"t": 501, "concurrence": 0.92, "purity": 0.93, "d_min": 0.07, "bell": "Phi+", "amp_min": 0.96},
        ],
    },
    "squeezing": {"t_center": 6600, "entropy": 0.0125, "entropy_tol": 0.002, "v_min": 0.3411, "v_min_tol": 0.005, "peak_cells": 3},
    "revivals": {"estimates": [69750.0, 139800.0], "estimate_rel_tol": 0.01, "peak_rel_tol": 0.02},
    "spectrum": {"levels": 12, "abs_tol": 2e-3},
    "invariants": {
        "trace": 1e-8,
        "hermiticity": 1e-12,
        "min_eigenvalue": -1e-6,
        "norm": 1e-8,
        "entropy_match": 1e-6,
        "husimi_norm": 1e-3,
        "v_min_paths": 1e-7,
        "d_min_paths": 1e-6,
        "random_states": 100,
        "time_samples": 50,
    },
    "discord_gap": {"discord_min": 1e-3},
    "oracle_dynamics": {"rdm_max_abs": 2e-2},
}


@functools.lru_cache(maxsize=None)
def _results():
    return tuple(acceptance.run_all(acceptance.load_tolerances(), use_oracle=True, seed=0))


def pytest_generate_tests(metafunc):
    if "criterion" in metafunc.fixturenames:
        res = _results()
        metafunc.parametrize("criterion", range(len(res)), ids=[r.name for r in res])


def _subset(pinned, actual, path=""):
    if isinstance(pinned, dict):
        for key, val in pinned.items():
            assert key in actual, f"tolerance {path}{key} missing"
            _subset(val, actual[key], f"{path}{key}.")
    else:
        assert actual == pinned, f"tolerance {path[:-1]} is {actual!r}, pinned {pinned!r}"


def test_tolerances_pinned():
    _subset(PINNED, acceptance.load_tolerances())


def test_criterion(criterion):
    res = _results()[criterion]
    print(res.line())
    if res.skipped:
        pytest.skip(res.detail)
    assert res.passed, res.line()
