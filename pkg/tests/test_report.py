import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from besovkit.quadrature import SeminormValue
from besovkit.report import (SCHEMA_VERSION, VERDICTS, Check, VerificationReport, emit_report, inequality_check,
                             parse_report)

num = st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False, width=64))
detail = st.dictionaries(st.text(min_size=1, max_size=8), st.one_of(st.integers(-10, 10), st.booleans(),
                                                                    st.floats(-1e6, 1e6), st.text(max_size=8)),
                         max_size=4)
checks = st.builds(Check, st.text(min_size=1, max_size=20), st.text(max_size=20), num, num, num, num,
                   st.sampled_from(VERDICTS), detail)


@settings(max_examples=100, deadline=None)
@given(st.lists(checks, max_size=6))
def test_json_round_trip(cs):
    rep = VerificationReport("suite", cs, {"tol_rel": 1e-8})
    blob = emit_report(rep)
    back = parse_report(blob)
    assert emit_report(back) == blob
    assert [c.claim_id for c in back.checks] == [c.claim_id for c in cs]


def test_empty_suite():
    rep = VerificationReport("empty", [], {"tol_rel": 1e-8})
    data = json.loads(emit_report(rep))
    assert data["checks"] == [] and data["schema"] == SCHEMA_VERSION
    assert data["environment"] == {"tol_rel": 1e-8}
    assert data["counts"] == {"pass": 0, "fail": 0, "skipped-divergent": 0}
    assert rep.passed


def test_non_finite_values_become_null():
    rep = VerificationReport("s", [Check("a", "", math.inf, math.nan, None, None, "pass", {"x": -math.inf})])
    c = json.loads(emit_report(rep))["checks"][0]
    assert c["lhs"] is None and c["rhs"] is None and c["detail"]["x"] is None


def test_csv_layout():
    rep = VerificationReport("s", [Check("a", "ref, with comma", 1.0, 2.0, 1.0, 1.0, "pass", {"k": 1})], {"e": 1})
    lines = emit_report(rep, "csv").decode().splitlines()
    assert lines[0].startswith("schema,suite_id,claim_id")
    assert lines[1].startswith('1,s,a,"ref, with comma",1.0,2.0')
    assert lines[-1].split(",")[2] == "#environment"
    with pytest.raises(ValueError):
        emit_report(rep, "xml")


def test_bad_verdict():
    with pytest.raises(ValueError):
        Check("a", "", None, None, None, None, "maybe")


def test_sorted_and_counts():
    rep = VerificationReport("s", [Check(i, "", None, None, None, None, v) for i, v in
                                   (("b", "fail"), ("a", "pass"), ("c", "skipped-divergent"))])
    assert [c.claim_id for c in rep.sorted().checks] == ["a", "b", "c"]
    assert rep.counts() == {"pass": 1, "fail": 1, "skipped-divergent": 1}
    assert not rep.passed


def sv(est, delta=0.0, divergent=False):
    return SeminormValue(est, [(0.5, est)], delta, divergent)


def test_inequality_check_verdicts():
    assert inequality_check("x", "", sv(1.0), sv(1.0), 1.0).verdict == "pass"
    assert inequality_check("x", "", sv(1.04), sv(1.0), 1.0).verdict == "pass"  # inside the 1.05 slack
    assert inequality_check("x", "", sv(1.1), sv(1.0), 1.0).verdict == "fail"
    assert inequality_check("x", "", sv(0.0), sv(0.0), 2.0).verdict == "pass"
    assert inequality_check("x", "", sv(1.0, divergent=True), sv(1.0), 1.0).verdict == "skipped-divergent"
    unconverged = inequality_check("x", "", sv(0.1, delta=0.01), sv(1.0), 1.0)
    assert unconverged.verdict == "fail" and "unconverged_lhs" in unconverged.detail
