from __future__ import annotations

import json

import pytest

from grexpand.suites import ALIASES, DEFAULT_SELECTION, SUITES, SuiteResult, resolve, run_suites

SMALL = {
    "finite-entropy": {"max_order": 6},
    "certify-oracle": {"max_order": 6},
    "duality-chain": {"max_order": 6, "random_cases": 20, "random_order": 16},
    "duality": {"max_order": 8, "random_cases": 10, "random_order": 16},
    "absorbing-witness": {"cases": 10},
    "direct-sum": {"max_order": 6},
    "extension": {"cases": 10},
    "conjugacy": {"cases": 20},
    "semiconjugacy": {"cases": 10},
    "sum-generators": {"cases": 5},
    "trajectory-shift": {"cases": 10},
    "generator-entropy": {"samples": 3},
}


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes_at_small_scale(name):
    res = SUITES[name](seed=1, **SMALL.get(name, {}))
    assert res.passed, res.to_json()


def test_aliases_resolve():
    assert resolve("prop-2.7") == ["direct-sum"]
    assert resolve("thm-5.1,conj-5.3,duality") == ["duality-chain", "restriction", "duality"]
    assert all(v in SUITES for v in ALIASES.values())
    assert resolve("all") == DEFAULT_SELECTION and "certify-oracle" not in DEFAULT_SELECTION
    with pytest.raises(KeyError):
        resolve("prop-9.9")


def test_unreduced_duality_chain_matches_reduced():
    a = SUITES["duality-chain"](max_order=4, random_cases=0, reduce=False)
    b = SUITES["duality-chain"](max_order=4, random_cases=0, reduce=True)
    assert a.passed and b.passed and a.cases >= b.cases


def test_failures_are_capped_and_counted():
    res = SuiteResult("x")
    for i in range(30):
        res.case(False, i)
    assert res.failure_count == 30 and len(res.failures) == 20 and not res.passed


def test_run_suites_records_table_counts():
    (res,) = run_suites("power")
    assert res.details["tables_checked"] > 0


def test_seed_changes_corpus_but_not_verdict():
    a = SUITES["conjugacy"](seed=1, cases=10).to_json()
    b = SUITES["conjugacy"](seed=1, cases=10).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert SUITES["conjugacy"](seed=2, cases=10).passed
