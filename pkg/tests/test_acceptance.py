"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records a pass/fail line through ``acceptance_log``; the terminal
summary prints one line per criterion (a criterion passes only if all its
parts do).
"""

import math

import pytest
from scipy.integrate import dblquad

from besovkit.cayley import carleson_lattice_dm
from besovkit.report import emit_report
from besovkit.schwarzian import d0_pre_schwarzian, d0_schwarzian
from besovkit.seminorms import seminorm
from besovkit.suites import BOXES, SUITES, box_gallery, run_all

TITLES = {
    1: "Moebius kernel",
    2: "J(log F') = S_F",
    3: "Koebe Schwarzian closed form",
    4: "fiber constancy",
    5: "explicit-constant inequality suite",
    6: "counterexample separation",
    7: "B_1 collapse",
    8: "Cayley transport",
    9: "variational operators",
    10: "Beltrami threshold and section",
    11: "determinism",
}


@pytest.fixture(scope="session")
def reports():
    return run_all(workers=1)


@pytest.fixture
def record(acceptance_log):
    def _record(n, part, ok, info=""):
        acceptance_log.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} {TITLES[n]} | {part} {info}".rstrip())
        return ok
    return _record


def select(rep, prefix):
    return [c for c in rep.checks if c.claim_id.startswith(prefix)]


def failures(checks):
    return [c.claim_id for c in checks if c.verdict != "pass"]


def test_c01_mobius_kernel(reports, record):
    cs = select(reports["schwarzian-identities"], "mobius-kernel:")
    worst = max(c.lhs for c in cs)
    assert len(cs) == 50 and all(c.detail["points"] == 200 for c in cs)
    assert record(1, "50 maps", not failures(cs) and worst < 1e-10, f"max |S| = {worst:.2e}")


def test_c02_jl_equals_s(reports, record):
    cs = select(reports["schwarzian-identities"], "JL=S:")
    worst = max(c.lhs for c in cs)
    assert len(cs) == 6
    assert record(2, "Koebe + 5 variants", not failures(cs) and worst < 1e-9, f"max err = {worst:.2e}")


def test_c03_koebe_closed_form(reports, record):
    (c,) = select(reports["schwarzian-identities"], "koebe:S-closed-form")
    assert record(3, "100 points", c.verdict == "pass" and c.lhs < 1e-10, f"max err = {c.lhs:.2e}")


def test_c04_fiber_constancy(reports, record):
    cs = [c for c in select(reports["schwarzian-identities"], "fiber:") if "derivative-at-0" not in c.claim_id]
    worst = max(c.lhs for c in cs)
    assert len(cs) == 20
    assert record(4, "20 shifts", not failures(cs) and worst < 1e-8, f"max err = {worst:.2e}")


def test_c05_inequality_suite(reports, record):
    rep = reports["norm-inequalities"]
    cs = [c for c in rep.checks if c.claim_id[:2] in ("a:", "b:", "c:", "d:", "e:")]
    labels = {c.claim_id.split(":")[1] for c in cs}
    fails = failures([c for c in cs if c.verdict != "skipped-divergent"])
    assert len(labels) >= 6
    assert record(5, f"{len(cs)} checks", not fails, f"failures: {fails}" if fails else "")


def test_c06_counterexample_separation(reports, record):
    cs = reports["counterexamples"].checks
    assert len(cs) == 4
    growth = [min(c.detail["growth_per_unit_amplitude"]) for c in cs if c.detail["expect"] == "divergent"]
    deltas = [c.detail["step_delta"] for c in cs if c.detail["expect"] == "finite"]
    info = f"finite step deltas {[f'{d:.1e}' for d in deltas]}, min growth {min(growth):.3f} per unit amplitude"
    assert record(6, "four ladders", not failures(cs), info)


def test_c07_collapse(reports, record):
    cs = select(reports["norm-inequalities"], "collapse:")
    consts = [c for c in cs if c.detail["expect"] == "zero"]
    assert len(consts) == 2 and all(c.lhs == 0.0 for c in consts)
    assert record(7, f"{len(cs)} functions", not failures(cs))


def test_c08a_besov2_invariance(reports, record):
    cs = select(reports["cayley-transport"], "invariance:besov2:")
    worst = max(c.detail["relative_gap"] for c in cs)
    assert len(cs) == 3
    assert record(8, "B_2 invariance", not failures(cs), f"max gap {worst:.1e}")


def test_c08b_bmoa_invariance(reports, record):
    # Known to fail: the box-based BMOA seminorm is only comparable under the
    # Cayley transport, not invariant. See README, "Known failure".
    cs = select(reports["cayley-transport"], "invariance:bmoa:")
    ratios = [round(c.detail["ratio"], 3) for c in cs]
    assert len(cs) == 3
    assert record(8, "BMOA invariance", not failures(cs), f"disk/half-plane ratios {ratios}")


def test_c08c_p1_bound(reports, record):
    cs = select(reports["cayley-transport"], "")
    bound = [c for c in cs if c.claim_id.endswith(":bound")]
    cpp = bound[0].detail["c_double_prime"]
    assert len(bound) == 3
    assert record(8, "p = 1 bound", not failures(bound), f"c'' = {cpp:.6f}")


def test_c08d_carleson_windows(reports, record):
    cs = select(reports["cayley-transport"], "carleson-window:")
    worst = max(c.lhs for c in cs)
    assert len(cs) == 8
    assert record(8, "Carleson windows", not failures(cs) and worst <= math.pi, f"max mean {worst:.4f}")


def _dblquad_kernel(c, box, z, m):
    x0, x1, y0, y1 = box
    re = dblquad(lambda y, x: (c * (complex(x, y) - z) ** -m).real, x0, x1, y0, y1, epsabs=1e-13, epsrel=1e-11)[0]
    im = dblquad(lambda y, x: (c * (complex(x, y) - z) ** -m).imag, x0, x1, y0, y1, epsabs=1e-13, epsrel=1e-11)[0]
    return complex(re, im)


def test_c09a_kernel_oracles(record):
    # independent oracle: scipy adaptive dblquad, not the corner formula
    worst = 0.0
    for mu, (c, box) in zip(box_gallery(), BOXES):
        z = complex(0.5 * (box[0] + box[1]) + 0.3, -0.7)
        for fn, m, k in ((d0_pre_schwarzian, 3, -2 / math.pi), (d0_schwarzian, 4, -6 / math.pi)):
            ref = k * _dblquad_kernel(c, box, z, m)
            got = complex(fn(mu, z))
            worst = max(worst, abs(got - ref) / abs(ref))
    assert record(9, "kernels vs dblquad", worst < 1e-7, f"max rel err {worst:.1e}")


def test_c09b_variational_suite(reports, record):
    cs = reports["variational-bounds"].checks
    assert len(cs) == 80
    assert record(9, "derivative identity and norm bounds", not failures(cs))


def test_c10_beltrami(reports, record):
    rep = reports["beltrami-inclusions"]
    cells = select(rep, "pnorm:")
    assert len(cells) == 20
    record(10, "20 cells", not failures(cells))
    gate = select(rep, "section-gate:")
    sections = select(rep, "section:")
    sups = [c.lhs for c in sections]
    ok = not failures(gate + sections) and max(sups) < 1
    record(10, "section gate and sup < 1", ok, f"max sup {max(sups):.4f}")
    assert not failures(cells) and ok


def test_c11_determinism(reports, record):
    first = {s: emit_report(r) for s, r in reports.items()}
    seminorm.cache_clear()
    carleson_lattice_dm.cache_clear()
    second = {s: emit_report(r) for s, r in run_all(workers=4).items()}
    differ = [s for s in SUITES if first[s] != second[s]]
    assert record(11, "serial vs 4 threads, caches cleared", not differ, f"differing: {differ}" if differ else "")
