"""Pre-registered verification suites.

Each suite is a list of independent jobs returning checks.  Jobs may run on a
thread pool; the report is sorted by claim id afterwards, so the serialized
output does not depend on the schedule.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional

import numpy as np

from .beltrami import (BeltramiCoefficient, aw_section, annulus_constant, box_coefficient, inclusion_witness,
                       p_norm, section_sup)
from .cayley import carleson_constant_dm, carleson_lattice_dm, pushforward, transport_report
from .errors import HypothesisError
from .function_model import (Domain, HoloFunction, Koebe, Mobius, compose_mobius, gallery,
                             parse_function_spec)
from .quadrature import QuadratureConfig, SeminormValue, carleson_window_mean
from .report import Check, VerificationReport, emit_report
from .schwarzian import (bounded_univalent_polynomial, canonical_J, d0_pre_schwarzian, d0_schwarzian, disk_grid,
                         koebe_conjugate, log_derivative, mobius_shift, pre_schwarzian, schwarzian,
                         variation_bounds)
from .seminorms import (BMOA, Besov, BesovSharp, Bloch, Decay, inequality_suite, seminorm)

SUITES = ("norm-inequalities", "cayley-transport", "schwarzian-identities", "counterexamples",
          "variational-bounds", "beltrami-inclusions")

SEED = 20240613
AMPLITUDE = 0.1
GROWTH_PER_RUNG = 0.5 * math.log(2.0)
STEP_DELTA = 0.005
INVARIANCE_TOL = 1e-4

INEQUALITY_FUNCTIONS = ("identity", "monomial:k=2", "monomial:k=3", "mobius:a=1,b=0,c=-0.5,d=1",
                        "halfplane_pole:k=2,half=plus", "cayley_pullback:of=monomial,k=2,half=minus")
COLLAPSE_FUNCTIONS = ("identity", "monomial:k=2", "monomial:k=3", "koebe", "log_koebe_prime", "log_witness:a=1",
                      "lacunary_phi1:a=0.1", "logsq_phi1:a=0.1", "mobius:a=1,b=0,c=-0.5,d=1",
                      "halfplane_pole:k=1,half=plus", "halfplane_pole:k=2,half=minus",
                      "cayley_pullback:of=identity,half=minus", "halfplane_log:a=0.2")
CONSTANTS = ("constant:c=0", "constant:c=2.5")
TRANSPORT_CASES = (("halfplane_pole:k=1,half=plus", (1, 2)), ("halfplane_pole:k=2,half=plus", (1, 2)),
                   ("halfplane_pole:k=3,half=minus", (1, 2)))
INVARIANCE_FUNCTIONS = ("halfplane_pole:k=1,half=plus", "halfplane_pole:k=2,half=plus",
                        "halfplane_pole:k=2,half=minus")
SECTION_FUNCTIONS = ("halfplane_log:a=0.1", "halfplane_log:a=0.2", "halfplane_log:a=0.4",
                     "halfplane_pole:k=1,half=minus", "halfplane_pole:k=2,half=minus")
GAMMAS = (0.25, 0.5, 0.75, 1.0)
PS = (1.0, 1.5, 2.0, 3.0, 4.0)
BOXES = ((0.3, (0.0, 1.0, 1.0, 2.0)), (0.5j, (0.0, 1.0, 1.0, 2.0)), (0.2 + 0.2j, (-1.0, 1.0, 0.5, 1.5)),
         (0.9, (2.0, 2.5, 0.25, 0.5)), (-0.4, (-3.0, -1.0, 1.0, 3.0)), (0.6 - 0.3j, (0.0, 0.1, 0.1, 0.2)),
         (0.1, (-5.0, 5.0, 1.0, 2.0)), (0.75, (0.0, 4.0, 4.0, 8.0)), (-0.5j, (-0.5, 0.5, 0.05, 0.1)),
         (0.95, (1.0, 1.5, 2.0, 2.5)))

Job = Callable[[], List[Check]]


def counterexample_config(cfg: QuadratureConfig) -> QuadratureConfig:
    """Lacunary ladders are costly; they use a looser tolerance and stop at eps = 2^-14."""
    from dataclasses import replace
    return replace(cfg, tol_rel=max(cfg.tol_rel, 1e-5)).truncated(14)


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


def _excerpt(v: SeminormValue, n: int = 4):
    return [[e, x] for e, x in v.ladder[-n:]]


# ---------------------------------------------------------------------------
# norm-inequalities


def _norm_jobs(cfg: QuadratureConfig) -> List[Job]:
    jobs: List[Job] = []
    for spec in INEQUALITY_FUNCTIONS + CONSTANTS:
        jobs.append(lambda spec=spec: inequality_suite(parse_function_spec(spec), (1.5, 2.0, 3.0), cfg).checks)
    ccfg = counterexample_config(cfg)
    for spec in COLLAPSE_FUNCTIONS + CONSTANTS:
        jobs.append(lambda spec=spec: [_collapse_check(parse_function_spec(spec), spec, ccfg)])
    return jobs


def _collapse_check(f: HoloFunction, spec: str, cfg: QuadratureConfig) -> Check:
    v = seminorm(f, Besov(1.0), cfg)
    constant = spec.startswith("constant")
    ok = (v.estimate == 0.0 and not v.divergent) if constant else v.divergent
    return Check(f"collapse:{f.label}:{f.domain.value}", "B_1 contains only constants", v.estimate, None, None, None,
                 _verdict(ok), {"divergent": v.divergent, "increments": v.increments()[-3:],
                                "expect": "zero" if constant else "divergent"})


# ---------------------------------------------------------------------------
# cayley-transport


def _transport_jobs(cfg: QuadratureConfig) -> List[Job]:
    jobs: List[Job] = []
    for spec, ps in TRANSPORT_CASES:
        for p in ps:
            jobs.append(lambda spec=spec, p=p: transport_report(parse_function_spec(spec), p, cfg).checks)
    for spec in INVARIANCE_FUNCTIONS:
        jobs.append(lambda spec=spec: _invariance_checks(parse_function_spec(spec), cfg))
    jobs.append(lambda: [_noninvariance_check(cfg)])
    jobs.append(lambda: _carleson_window_checks())
    jobs.append(lambda: [_carleson_constant_check(cfg)])
    return jobs


def _relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _invariance_checks(f: HoloFunction, cfg: QuadratureConfig) -> List[Check]:
    out = []
    push = pushforward(f)
    for name, kind in (("besov2", Besov(2.0)), ("bmoa", BMOA(cfg.depth))):
        a, b = seminorm(f, kind, cfg), seminorm(push, kind, cfg)
        gap = _relative_gap(a.estimate, b.estimate)
        ratio = b.estimate / a.estimate if a.estimate else None
        out.append(Check(f"invariance:{name}:{f.label}", "conformal invariance under the Cayley pushforward",
                         a.estimate, b.estimate, INVARIANCE_TOL, INVARIANCE_TOL - gap, _verdict(gap <= INVARIANCE_TOL),
                         {"relative_gap": gap, "ratio": ratio}))
    return out


def _noninvariance_check(cfg: QuadratureConfig) -> Check:
    f = parse_function_spec("halfplane_pole:k=1,half=plus")
    a, b = seminorm(f, BesovSharp(1.0), cfg), seminorm(pushforward(f), BesovSharp(1.0), cfg)
    gap = _relative_gap(a.estimate, b.estimate)
    return Check(f"noninvariance:besov_sharp1:{f.label}", "B#_1 is comparable, not isometric, under transport",
                 a.estimate, b.estimate, 0.1, gap - 0.1, _verdict(gap > 0.1), {"relative_gap": gap})


def _carleson_window_checks() -> List[Check]:
    dens = lambda z: 1.0 / np.abs(1.0 - z)
    out = []
    for j in range(1, 9):
        r = 2.0 ** -j
        m = carleson_window_mean(dens, r)
        out.append(Check(f"carleson-window:j={j}", "Carleson window mean of 1/|1 - zeta| at most pi", m, math.pi,
                         1.0, math.pi - m, _verdict(m <= math.pi), {"r": r}))
    return out


def _carleson_constant_check(cfg: QuadratureConfig) -> Check:
    c = carleson_constant_dm(cfg.depth)
    lattice = carleson_lattice_dm(cfg.depth)
    ok = math.isfinite(c) and 0 < lattice <= c
    return Check("carleson-constant:dm", "lattice Carleson means of dm stay below the closed-form c''", lattice, c,
                 1.0, c - lattice, _verdict(ok), {"depth": cfg.depth})


# ---------------------------------------------------------------------------
# schwarzian-identities


def random_mobius(rng: np.random.Generator, pole_min: float = 1.5):
    """Random Moebius coefficients with the pole at modulus >= pole_min."""
    while True:
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        pole = (pole_min + 2.0 * rng.random()) * np.exp(2j * math.pi * rng.random())
        c = rng.normal() + 1j * rng.normal()
        d = -c * pole
        if abs(a * d - b * c) > 1e-3:
            return complex(a), complex(b), complex(c), complex(d)


def koebe_variant(rng: np.random.Generator):
    """W o k with the pole of W on the omitted slit, so W o k stays univalent."""
    s = -0.25 - 3.0 * rng.random() - 0.05
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    return (complex(a), complex(b), 1.0, -s)


def _schwarzian_jobs(cfg: QuadratureConfig) -> List[Job]:
    return [_mobius_kernel_checks, _koebe_checks, _fiber_jobs, _affine_checks, lambda: _bloch_three_checks(cfg)]


def _abs_check(cid: str, ref: str, err: float, tol: float, detail: Optional[dict] = None) -> Check:
    return Check(cid, ref, err, tol, None, tol - err, _verdict(err < tol), detail or {})


def _mobius_kernel_checks() -> List[Check]:
    rng = np.random.default_rng(SEED)
    z = disk_grid(10, 20)
    out = []
    for i in range(50):
        W = random_mobius(rng)
        S = schwarzian(compose_mobius(W, gallery("identity"))).function(z)
        out.append(_abs_check(f"mobius-kernel:{i:02d}", "Moebius maps have vanishing Schwarzian",
                              float(np.max(np.abs(S))), 1e-10, {"points": int(z.size)}))
    return out


def _koebe_checks() -> List[Check]:
    rng = np.random.default_rng(SEED + 1)
    k = gallery("koebe")
    z = disk_grid(10, 20)
    out = []
    S_k = schwarzian(k).function(z)
    z100 = disk_grid(10, 10)
    out.append(_abs_check("koebe:S-closed-form", "S of the Koebe function is -6/(1 - z^2)^2",
                          float(np.max(np.abs(schwarzian(k).function(z100) + 6.0 / (1 - z100 ** 2) ** 2))), 1e-10))
    N = pre_schwarzian(k).function(z100)
    out.append(_abs_check("koebe:N-closed-form", "N of the Koebe function is 1/(1+z) + 3/(1-z)",
                          float(np.max(np.abs(N - (1 / (1 + z100) + 3 / (1 - z100))))), 1e-12))
    fs = [k] + [HoloFunction(Mobius(*koebe_variant(rng), Koebe()), Domain.UnitDisk, f"koebe_variant({i})")
                for i in range(5)]
    for f in fs:
        J = canonical_J(log_derivative(f)).function(z)
        S = schwarzian(f).function(z)
        out.append(_abs_check(f"JL=S:{f.label}", "J(log F') = S_F", float(np.max(np.abs(J - S))), 1e-9))
        if f is not k:
            out.append(_abs_check(f"mobius-invariance:{f.label}", "S(W o F) = S_F",
                                  float(np.max(np.abs(S - S_k))), 1e-9))
    return out


def fiber_shifts():
    """Twenty admissible shifts: ten for the identity, ten for z + z^2/4."""
    rng = np.random.default_rng(SEED + 2)
    ident = [(1.2 + 3.0 * rng.random()) * np.exp(2j * math.pi * rng.random()) for _ in range(10)]
    poly = [(1.5 + 3.0 * rng.random()) * np.exp(2j * math.pi * rng.random()) for _ in range(10)]
    return ident, poly


def _fiber_jobs() -> List[Check]:
    ident, poly = fiber_shifts()
    z = disk_grid(10, 20)
    out = []
    for F, shifts in ((gallery("identity"), ident), (bounded_univalent_polynomial(0.25), poly)):
        J0 = canonical_J(log_derivative(F)).function(z)
        for a in shifts:
            Ja = canonical_J(mobius_shift(F, a)).function(z)
            err = float(np.max(np.abs(Ja - J0) / np.maximum(1.0, np.abs(J0))))
            out.append(_abs_check(f"fiber:{F.label}:a={a.real:+.4f}{a.imag:+.4f}j",
                                  "J constant on Moebius fibers", err, 1e-8))
    F = gallery("identity")
    phi = mobius_shift(F, 3.0)
    d = complex(phi.derivatives(np.array(0j), 1)[1])
    out.append(_abs_check("fiber:identity:a=3:derivative-at-0", "shifted derivative at 0 equals 2/3",
                          abs(d - 2.0 / 3.0), 1e-14))
    return out


def _affine_checks() -> List[Check]:
    z = disk_grid(10, 20)
    out = []
    for F in (gallery("koebe"), bounded_univalent_polynomial(0.3), koebe_conjugate(-1.5)):
        N = pre_schwarzian(F).function(z)
        for a, b in ((2.0, 1.0), (-0.5j, 3.0 + 1j)):
            NW = pre_schwarzian(compose_mobius((a, b, 0.0, 1.0), F)).function(z)
            err = float(np.max(np.abs(NW - N) / np.maximum(1.0, np.abs(N))))
            out.append(_abs_check(f"affine:{F.label}:a={a}", "N(W o F) = N_F for affine W", err, 1e-13))
    return out


def _bloch_three_checks(cfg: QuadratureConfig) -> List[Check]:
    out = []
    fs = [gallery("koebe")] + [koebe_conjugate(s) for s in (-0.5, -1.0, -4.0)]
    for F in fs:
        v = seminorm(log_derivative(F), Bloch, cfg)
        out.append(Check(f"bloch-three:{F.label}", "Bloch seminorm of log F' at most 3", v.estimate, 3.0, 1.0,
                         3.0 - v.estimate, _verdict(v.estimate <= 3.0), {"witness": v.witness}))
    return out


# ---------------------------------------------------------------------------
# counterexamples


def growth_per_rung(v: SeminormValue, k_lo: int = 8, k_hi: int = 14) -> List[float]:
    vals = [v.rung(k) for k in range(k_lo, k_hi + 1)]
    return [b - a for a, b in zip(vals, vals[1:])]


def _counterexample_check(spec: str, kind, finite: bool, cfg: QuadratureConfig) -> Check:
    f = parse_function_spec(spec)
    v = seminorm(f, kind, cfg)
    name = {"decay": "B^1", "besov_sharp": "B#_1"}[kind.kind]
    cid = f"separation:{f.label}:{name}"
    if finite:
        ok = (not v.divergent) and v.last_delta_rel < STEP_DELTA
        detail = {"expect": "finite", "step_delta": v.last_delta_rel, "ladder": _excerpt(v)}
        return Check(cid, "incomparability of B^1 and B#_1", v.estimate, None, STEP_DELTA,
                     STEP_DELTA - v.last_delta_rel, _verdict(ok), detail)
    raw = growth_per_rung(v)
    normalized = [g / AMPLITUDE for g in raw]
    ok = v.divergent and min(normalized) >= GROWTH_PER_RUNG
    detail = {"expect": "divergent", "growth_raw": raw, "growth_per_unit_amplitude": normalized,
              "ladder": _excerpt(v)}
    return Check(cid, "incomparability of B^1 and B#_1", v.estimate, None, GROWTH_PER_RUNG,
                 min(normalized) - GROWTH_PER_RUNG, _verdict(ok), detail)


def _counterexample_jobs(cfg: QuadratureConfig) -> List[Job]:
    ccfg = counterexample_config(cfg)
    lac, logsq = f"lacunary_phi1:a={AMPLITUDE}", f"logsq_phi1:a={AMPLITUDE}"
    return [lambda: [_counterexample_check(lac, Decay(1.0), True, ccfg)],
            lambda: [_counterexample_check(lac, BesovSharp(1.0), False, ccfg)],
            lambda: [_counterexample_check(logsq, BesovSharp(1.0), True, ccfg)],
            lambda: [_counterexample_check(logsq, Decay(1.0), False, ccfg)]]


# ---------------------------------------------------------------------------
# variational-bounds


def box_gallery() -> List[BeltramiCoefficient]:
    return [box_coefficient(c, b) for c, b in BOXES]


def _kernel_checks(mu: BeltramiCoefficient) -> List[Check]:
    x0, x1, y0, y1 = mu.support
    z = complex(0.5 * (x0 + x1), -1.0)
    out = []
    for name, fn, m in (("pre", d0_pre_schwarzian, 3), ("schwarzian", d0_schwarzian, 4)):
        q = complex(fn(mu, z))
        ref = complex(fn(mu, z, method="closed"))
        err = abs(q - ref) / max(abs(ref), 1e-300)
        out.append(_abs_check(f"{mu.label}:kernel-{name}", "kernel quadrature against the corner formula",
                              err, 1e-7, {"z": z}))
    h = 1e-3
    pts = z + h * np.array([-2, -1, 1, 2])
    v = d0_pre_schwarzian(mu, pts)
    fd = (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)
    ref = complex(d0_schwarzian(mu, z))
    err = abs(fd - ref) / max(abs(ref), 1e-300)
    out.append(_abs_check(f"{mu.label}:derivative-identity", "d0 S is the derivative of (d0 L)'", err, 1e-6))
    return out


def _variational_jobs(cfg: QuadratureConfig) -> List[Job]:
    jobs: List[Job] = []
    for mu in box_gallery():
        jobs.append(lambda mu=mu: _kernel_checks(mu) + variation_bounds(mu, cfg).checks)
    return jobs


# ---------------------------------------------------------------------------
# beltrami-inclusions


def _section_checks(spec: str, cfg: QuadratureConfig) -> List[Check]:
    phi = parse_function_spec(spec)
    b = seminorm(phi, Bloch, cfg)
    mu = aw_section(phi, cfg, bloch_value=b)
    s = section_sup(mu, cfg).estimate
    ok = s <= 2.0 * b.estimate * (1 + 1e-6) and s < 1.0 and abs(s - 2.0 * b.estimate) <= 1e-3
    return [Check(f"section:{phi.label}", "section coefficient bounded by twice the Bloch seminorm, below 1", s,
                  b.estimate, 2.0, 2.0 * b.estimate - s, _verdict(ok), {"bloch": b.estimate})]


def _gate_check(cfg: QuadratureConfig) -> Check:
    phi = parse_function_spec("halfplane_log:a=0.6")
    try:
        aw_section(phi, cfg)
        raised = False
    except HypothesisError:
        raised = True
    return Check(f"section-gate:{phi.label}", "section needs Bloch seminorm below 1/2", None, 0.5, None, None,
                 _verdict(raised), {"raised": raised})


def _annulus_check(cfg: QuadratureConfig) -> List[Check]:
    out = []
    for c, p in ((0.5, 2.0), (0.3, 1.0), (0.8, 3.0)):
        v = p_norm(annulus_constant(c), p, cfg)
        worst = 0.0
        for e, x in v.ladder:
            exact = 4.0 * math.pi * c ** p * (1.0 / ((1.0 + e) ** 2 - 1.0) - 1.0 / 3.0)
            worst = max(worst, abs(x ** p - exact) / exact)
        out.append(_abs_check(f"annulus:c={c:g}:p={p:g}", "exterior p-norm against the closed-form annulus integral",
                              worst, 1e-8, {"divergent": v.divergent}))
    return out


def _beltrami_jobs(cfg: QuadratureConfig) -> List[Job]:
    jobs: List[Job] = []
    for g in GAMMAS:
        for p in PS:
            jobs.append(lambda g=g, p=p: inclusion_witness(g, p, cfg).checks)
    for spec in SECTION_FUNCTIONS:
        jobs.append(lambda spec=spec: _section_checks(spec, cfg))
    jobs.append(lambda: [_gate_check(cfg)])
    jobs.append(lambda: _annulus_check(cfg))
    return jobs


_JOBS: Dict[str, Callable[[QuadratureConfig], List[Job]]] = {
    "norm-inequalities": _norm_jobs,
    "cayley-transport": _transport_jobs,
    "schwarzian-identities": _schwarzian_jobs,
    "counterexamples": _counterexample_jobs,
    "variational-bounds": _variational_jobs,
    "beltrami-inclusions": _beltrami_jobs,
}


def run_suite(suite_id: str, cfg: Optional[QuadratureConfig] = None, workers: int = 1) -> VerificationReport:
    """Run a suite; with ``workers > 1`` jobs run on a thread pool."""
    if suite_id not in _JOBS:
        raise KeyError(f"unknown suite {suite_id!r}; choose from {', '.join(SUITES)}")
    cfg = cfg or QuadratureConfig()
    jobs = _JOBS[suite_id](cfg)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda j: j(), jobs))
    else:
        results = [j() for j in jobs]
    env = cfg.snapshot()
    if suite_id in ("counterexamples", "norm-inequalities"):
        env["ladder_config"] = counterexample_config(cfg).snapshot()
    rep = VerificationReport(suite_id, [c for r in results for c in r], env)
    return rep.sorted()


def run_all(cfg: Optional[QuadratureConfig] = None, workers: int = 1) -> Dict[str, VerificationReport]:
    return {s: run_suite(s, cfg, workers) for s in SUITES}


__all__ = ["SUITES", "run_suite", "run_all", "emit_report"]
