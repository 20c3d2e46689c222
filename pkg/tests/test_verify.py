import json

import pytest

from moebius.errors import UnknownSuite
from moebius.verify import (
    ANCHORS,
    SUITES,
    SuiteConfig,
    SuiteReport,
    list_suites,
    resolve_tag,
    run_all,
    run_suite,
)

FAST = ["eq:koranyi_gauge", "pro:comp_dist_function", "lem:z_in_center", "pro:lift_const_2", "eq:busemann_flat"]


def test_registry_covers_every_anchor():
    anchors = {s.anchor for s in SUITES.values()}
    assert set(ANCHORS) <= anchors
    assert len(SUITES) >= 25


def test_registry_groups_and_tolerances():
    for s in SUITES.values():
        assert s.group in {"exact", "closed-form", "limit", "negative"}
        assert s.tol >= 0
        assert s.description


def test_list_suites_contains_known_tags():
    tags = [t for t, _, _ in list_suites("heis")]
    assert "lem:mean_geometric" in tags and "eq:koranyi_gauge" in tags
    euclid = {t for t, _, _ in list_suites("euclid")}
    assert "eq:PT_eq/euclidean-circles" in euclid
    assert "pro:lift_const_2" not in euclid


def test_prop_prefix_is_an_alias():
    assert resolve_tag("prop:lift_const_2") == "pro:lift_const_2"
    assert resolve_tag("lem:xi_norm") == "lem:xi_norm"


def test_report_json_round_trip():
    r = run_suite("eq:koranyi_gauge", SuiteConfig(seed=3))
    obj = json.loads(json.dumps(r.to_json()))
    assert SuiteReport.from_json(obj) == r
    assert "runtime_ms" not in r.to_json(include_runtime=False)


def test_euclidean_circles_suite_passes():
    r = run_suite("eq:PT_eq/euclidean-circles", SuiteConfig(model="euclid", n=3))
    assert r.passed and r.worst_residual <= 1e-12
    assert r.witness is None


def test_lift_constant_suite_passes():
    r = run_suite("prop:lift_const_2", SuiteConfig(k=2))
    assert r.tag == "pro:lift_const_2"
    assert r.passed and r.worst_residual <= 1e-6


def test_l1_negative_suite_finds_a_violation():
    r = run_suite("negative:L1-not-ptolemy", SuiteConfig())
    assert r.passed


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("lem:nope")
    with pytest.raises(UnknownSuite):
        run_suite("pro:lift_const_2", SuiteConfig(model="euclid"))
    with pytest.raises(UnknownSuite):
        run_all(SuiteConfig(), only=["lem:nope"])


def test_failing_suite_carries_a_witness_or_residual():
    r = run_suite("eq:busemann_flat", SuiteConfig(tolerances={"*": 0.0}))
    assert not r.passed and r.worst_residual > 0


def test_run_all_is_deterministic_across_worker_counts():
    cfg = SuiteConfig(seed=11, k=2)
    a = run_all(cfg, only=FAST, workers=1).to_json()
    b = run_all(cfg, only=FAST, workers=4).to_json()
    c = run_all(cfg, only=FAST, workers=4).to_json()
    assert json.dumps(a) == json.dumps(b) == json.dumps(c)


def test_zero_tolerance_separates_exact_from_limit_suites():
    cfg = SuiteConfig(k=2, tolerances={"*": 0.0})
    zero_tol = [s.tag for s in SUITES.values() if s.tol == 0.0 and "heis" in s.models]
    assert all(r.passed for r in run_all(cfg, only=zero_tol).reports)
    limit = ["eq:busemann_flat", "eq:duality", "lem:busemann_affine_zigzag"]
    assert not any(r.passed for r in run_all(cfg, only=limit).reports)


def test_seed_change_keeps_the_pass_pattern():
    for seed in (0, 5):
        s = run_all(SuiteConfig(seed=seed), only=FAST)
        assert s.ok, [r.tag for r in s.reports if not r.passed]


def test_seed_changes_residuals():
    a = run_suite("eq:koranyi_gauge", SuiteConfig(seed=0)).worst_residual
    b = run_suite("eq:koranyi_gauge", SuiteConfig(seed=1)).worst_residual
    assert a != b


def test_euclidean_model_runs():
    tags = [t for t, _, _ in list_suites("euclid")][:6]
    s = run_all(SuiteConfig(model="euclid", n=2), only=tags)
    assert s.ok and all(r.model == "euclid" and r.k == 2 for r in s.reports)


def test_samples_override_is_reported():
    r = run_suite("eq:koranyi_gauge", SuiteConfig(samples=50))
    assert r.n == 50
