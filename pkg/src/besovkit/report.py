"""Verification records and their deterministic serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

SCHEMA_VERSION = 1
VERDICTS = ("pass", "fail", "skipped-divergent")
SLACK = 1.05


@dataclass
class Check:
    claim_id: str
    reference: str
    lhs: Optional[float]
    rhs: Optional[float]
    constant: Optional[float]
    margin: Optional[float]
    verdict: str
    detail: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"bad verdict {self.verdict!r}")


@dataclass
class VerificationReport:
    suite_id: str
    checks: List[Check] = field(default_factory=list)
    environment: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.verdict != "fail" for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def counts(self) -> Dict[str, int]:
        return {v: sum(c.verdict == v for c in self.checks) for v in VERDICTS}

    def sorted(self) -> "VerificationReport":
        return VerificationReport(self.suite_id, sorted(self.checks, key=lambda c: c.claim_id), dict(self.environment))

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "suite_id": self.suite_id,
            "environment": self.environment,
            "counts": self.counts(),
            "checks": [asdict(c) for c in self.checks],
        }


def inequality_check(claim_id: str, reference: str, lhs, rhs, constant: float, slack: float = SLACK,
                     detail: Optional[dict] = None) -> Check:
    """Check ``lhs <= slack * constant * rhs``.

    ``lhs`` and ``rhs`` are SeminormValue-like objects.  The left side is
    replaced by its heuristic upper bound and the right side by its last
    ladder value (a lower bound for nonnegative integrands).  A divergent
    side yields ``skipped-divergent``; an unconverged left side (step delta
    of at least 0.5%) fails.
    """
    detail = dict(detail or {})
    if lhs.divergent or rhs.divergent:
        detail["divergent_sides"] = [s for s, v in (("lhs", lhs), ("rhs", rhs)) if v.divergent]
        return Check(claim_id, reference, _num(lhs.estimate), _num(rhs.estimate), constant, None,
                     "skipped-divergent", detail)
    upper = lhs.upper_bound()
    lower = rhs.ladder[-1][1] if rhs.ladder else rhs.estimate
    lower = min(lower, rhs.estimate)
    bound = slack * constant * lower
    margin = bound - upper
    ok = margin >= -1e-12 * max(abs(bound), abs(upper), 1e-300)
    if lhs.last_delta_rel >= 0.005:
        detail["unconverged_lhs"] = lhs.last_delta_rel
        ok = False
    detail.setdefault("lhs_upper", upper)
    detail.setdefault("rhs_lower", lower)
    return Check(claim_id, reference, _num(lhs.estimate), _num(rhs.estimate), constant, _num(margin),
                 "pass" if ok else "fail", detail)


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _canonical(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(obj)
    if isinstance(obj, complex):
        return [_canonical(obj.real), _canonical(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if hasattr(obj, "item"):
        return _canonical(obj.item())
    return obj


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    """Serialize a report; identical reports give identical bytes."""
    data = _canonical(report.to_dict())
    if fmt == "json":
        return (json.dumps(data, sort_keys=True, indent=1) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["schema", "suite_id", "claim_id", "reference", "lhs", "rhs", "constant", "margin",
                    "verdict", "detail"])
        for c in data["checks"]:
            w.writerow([SCHEMA_VERSION, data["suite_id"], c["claim_id"], c["reference"], _cell(c["lhs"]),
                        _cell(c["rhs"]), _cell(c["constant"]), _cell(c["margin"]), c["verdict"],
                        json.dumps(c["detail"], sort_keys=True)])
        w.writerow([SCHEMA_VERSION, data["suite_id"], "#environment", "", "", "", "", "", "",
                    json.dumps(data["environment"], sort_keys=True)])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def _cell(x):
    return "" if x is None else repr(x)


def parse_report(blob: bytes) -> VerificationReport:
    data = json.loads(blob.decode())
    checks = [Check(**c) for c in data["checks"]]
    return VerificationReport(data["suite_id"], checks, data["environment"])
