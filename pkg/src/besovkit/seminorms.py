"""Weighted seminorms of holomorphic functions and the comparison suites.

On a half-plane the hyperbolic weight is ``w = |Im z|`` with area density
``1/w^2``.  On the disk ``w = (1 - |z|^2)/2`` with density
``4/(1 - |z|^2)^2 = 1/w^2``, so every half-plane definition transfers by
substituting the weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, KindDomainError
from .function_model import Composition, Cayley, Const, Domain, HoloFunction
from .quadrature import (QuadratureConfig, SeminormValue, adaptive_interval, carleson_level_maxima,
                         finalize_ladder, integrate_disk, integrate_halfplane, root_value, sup_refine)
from .report import Check, VerificationReport, inequality_check

KINDS = ("besov", "besov_sharp", "bloch", "bloch_sharp", "a", "a_infty", "bmoa", "hardy_h11", "bhat", "decay")


@dataclass(frozen=True)
class SeminormKind:
    kind: str
    p: Optional[float] = None
    gamma: Optional[float] = None
    depth: int = 10

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KindDomainError(f"unknown seminorm kind {self.kind!r}")
        if self.kind in ("besov", "besov_sharp", "a", "bhat"):
            if self.p is None:
                raise KindDomainError(f"{self.kind} needs p")
            # Besov at p = 1 is admitted only as the collapse probe
            if not self.p >= 1:
                raise KindDomainError(f"{self.kind} needs p >= 1, got {self.p}")
        if self.kind == "decay":
            if self.gamma is None or not 0 < self.gamma <= 1:
                raise KindDomainError(f"decay needs 0 < gamma <= 1, got {self.gamma}")
        if self.kind == "bmoa" and self.depth < 1:
            raise KindDomainError("bmoa depth must be positive")

    @property
    def label(self) -> str:
        if self.p is not None:
            return f"{self.kind}:p={self.p:g}"
        if self.gamma is not None:
            return f"{self.kind}:gamma={self.gamma:g}"
        if self.kind == "bmoa":
            return f"bmoa:depth={self.depth}"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> "SeminormKind":
        """Parse ``name[:key=val,...]``, e.g. ``besov:p=2`` or ``decay:gamma=1``."""
        name, _, rest = text.partition(":")
        name = name.strip().lower().replace("-", "_")
        aliases = {"besovsharp": "besov_sharp", "blochsharp": "bloch_sharp", "ainfty": "a_infty",
                   "h11": "hardy_h11", "hardy": "hardy_h11"}
        name = aliases.get(name, name)
        kw = {}
        if rest:
            for item in rest.split(","):
                key, eq, val = item.partition("=")
                if not eq:
                    raise KindDomainError(f"malformed kind parameter {item!r}")
                key = key.strip()
                if key == "p":
                    kw["p"] = float(val)
                elif key == "gamma":
                    kw["gamma"] = float(val)
                elif key == "depth":
                    kw["depth"] = int(val)
                else:
                    raise KindDomainError(f"unknown kind parameter {key!r}")
        return cls(name, **kw)


def Besov(p):
    return SeminormKind("besov", p=p)


def BesovSharp(p):
    return SeminormKind("besov_sharp", p=p)


Bloch = SeminormKind("bloch")
BlochSharp = SeminormKind("bloch_sharp")
AInfty = SeminormKind("a_infty")
HardyH11 = SeminormKind("hardy_h11")


def A(p):
    return SeminormKind("a", p=p)


def BMOA(depth=10):
    return SeminormKind("bmoa", depth=depth)


def BHat(p):
    return SeminormKind("bhat", p=p)


def Decay(gamma):
    return SeminormKind("decay", gamma=gamma)


# ---------------------------------------------------------------------------
# integrands


def _weight(domain: Domain, z):
    if domain is Domain.UnitDisk:
        return 0.5 * (1.0 - np.abs(z) ** 2)
    if domain.is_halfplane:
        return np.abs(z.imag)
    raise DomainError(f"seminorms are defined on the disk and half-planes, not {domain.name}")


def weighted_integrand(f: HoloFunction, order: int, power: float, p: float):
    """``(w^power |f^(order)|)^p / w^2`` as a vectorized function."""

    def g(z):
        w = _weight(f.domain, z)
        d = np.abs(f.derivatives(z, order)[order])
        return (w ** power * d) ** p / w ** 2

    return g


def weighted_sup_function(f: HoloFunction, order: int, power: float):
    def g(z):
        w = _weight(f.domain, z)
        return w ** power * np.abs(f.derivatives(z, order)[order])

    return g


def _integrate(f: HoloFunction, g, cfg):
    if f.domain is Domain.UnitDisk:
        return integrate_disk(g, cfg)
    return integrate_halfplane(g, cfg, upper=f.domain is Domain.UpperHalfPlane)


def _sup(f: HoloFunction, g, cfg):
    return sup_refine(g, f.domain.value, cfg)


def carleson_density(f: HoloFunction):
    """``w |f'|^2``, the measure whose Carleson norm squared is BMOA."""

    def g(z):
        w = _weight(f.domain, z)
        return w * np.abs(f.derivatives(z, 1)[1]) ** 2

    return g


def bmoa(f: HoloFunction, depth: int = 10, tol_rel: float = 1e-8) -> SeminormValue:
    levels = carleson_level_maxima(carleson_density(f), f.domain.value, depth)
    run, ladder = 0.0, []
    for j, v in enumerate(levels):
        run = max(run, v)
        ladder.append((2.0 ** -j, math.sqrt(run)))
    return finalize_ladder(ladder, tol_rel, extrapolate=False)


@lru_cache(maxsize=512)
def seminorm(f: HoloFunction, kind: SeminormKind, cfg: QuadratureConfig = QuadratureConfig()) -> SeminormValue:
    k = kind.kind
    if k == "besov":
        return root_value(_integrate(f, weighted_integrand(f, 1, 1.0, kind.p), cfg), kind.p)
    if k == "besov_sharp":
        return root_value(_integrate(f, weighted_integrand(f, 2, 2.0, kind.p), cfg), kind.p)
    if k == "a":
        return root_value(_integrate(f, weighted_integrand(f, 0, 2.0, kind.p), cfg), kind.p)
    if k == "bloch":
        return _sup(f, weighted_sup_function(f, 1, 1.0), cfg)
    if k == "bloch_sharp":
        return _sup(f, weighted_sup_function(f, 2, 2.0), cfg)
    if k == "a_infty":
        return _sup(f, weighted_sup_function(f, 0, 2.0), cfg)
    if k == "bmoa":
        return bmoa(f, kind.depth, cfg.tol_rel)
    if k == "hardy_h11":
        return hardy_h11(f, cfg)
    if k == "bhat":
        s = seminorm(f, BesovSharp(kind.p), cfg)
        b = seminorm(f, BMOA(cfg.depth), cfg)
        est = s.estimate + b.estimate
        ladder = [(e, v + b.estimate) for e, v in s.ladder]
        ldr = (abs(ladder[-1][1] - ladder[-2][1]) / est) if est and len(ladder) > 1 else 0.0
        return SeminormValue(est, ladder, max(ldr, b.last_delta_rel), s.divergent or b.divergent, s.tail)
    if k == "decay":
        if f.domain is not Domain.UnitDisk:
            raise DomainError("the decay seminorm is defined on the disk")
        gamma = kind.gamma

        def g(z):
            return (1.0 - np.abs(z) ** 2) ** (2.0 - gamma) * np.abs(f.derivatives(z, 2)[2])

        return sup_refine(g, "disk", cfg)
    raise KindDomainError(k)


def besov_one(f: HoloFunction, cfg: QuadratureConfig = QuadratureConfig()) -> SeminormValue:
    """The p = 1 first-derivative ladder, which diverges unless f is constant."""
    return seminorm(f, Besov(1.0), cfg)


# ---------------------------------------------------------------------------
# Hardy seminorm


def hardy_h11(f: HoloFunction, cfg: QuadratureConfig = QuadratureConfig()) -> SeminormValue:
    """Supremum of L1 means of f' over circles (disk) or horizontal lines (half-plane)."""
    d1 = lambda z: np.abs(f.derivatives(z, 1)[1])
    means = []
    if f.domain is Domain.UnitDisk:
        for e in cfg.shell_epsilons:
            r = 1.0 - e
            m = adaptive_interval(lambda th: d1(r * np.exp(1j * th)), 0.0, 2.0 * math.pi, cfg.tol_rel, m0=32, tol_abs=cfg.tol_abs, max_panels=cfg.max_panels)
            means.append(m / (2.0 * math.pi))
        start = d1(np.array([0j]))[0]
    elif f.domain.is_halfplane:
        sign = 1.0 if f.domain is Domain.UpperHalfPlane else -1.0

        def line(t):
            # x = tan(phi) maps (-pi/2, pi/2) onto the real line
            def h(phi):
                c = np.cos(phi)
                return d1(np.tan(phi) + 1j * sign * t) / (c * c)

            return adaptive_interval(h, -0.5 * math.pi, 0.5 * math.pi, cfg.tol_rel, m0=32, tol_abs=cfg.tol_abs, max_panels=cfg.max_panels)

        start = max(line(t) for t in (4.0, 2.0, 1.0, 0.5, 0.25))
        for e in cfg.shell_epsilons:
            means.append(line(e))
    else:
        raise DomainError("Hardy seminorm needs a disk or half-plane function")
    run, ladder = float(start), []
    for e, m in zip(cfg.shell_epsilons, means):
        run = max(run, m)
        ladder.append((e, run))
    return finalize_ladder(ladder, cfg.tol_rel, extrapolate=True)


# ---------------------------------------------------------------------------
# constants


def c_p(p: float) -> float:
    """Bloch-from-Besov constant 2 / p-th root of pi."""
    return 2.0 / math.pi ** (1.0 / p)


def c_pq(p: float, q: float) -> float:
    return c_p(p) ** (1.0 - p / q) if math.isfinite(q) else c_p(p)


C_BLOCH_BMOA = 4.0 / math.sqrt(math.pi)


def c_prime(p: float) -> float:
    """BMOA-from-Besov constant (1 - 2/p)^(1/2 - 1/p), for p > 2."""
    return (1.0 - 2.0 / p) ** (0.5 - 1.0 / p)


def c_sharp_pq(p: float, q: float) -> float:
    """Constant for the second-derivative scale: (4 / p-th root of pi)^(1 - p/q).

    Repeating the mean-value argument with (Im z)^2 f'' and the factor
    v^(2-2p) <= (y/2)^(2-2p) on the disk of radius y/2 gives 4/pi^(1/p) at
    q = infinity; interpolation gives the power 1 - p/q.
    """
    base = 4.0 / math.pi ** (1.0 / p)
    return base ** (1.0 - p / q) if math.isfinite(q) else base


def hardy_disk_constant() -> float:
    """min over 0 < e < 1 of max(1/(2 pi e), 2/(1 - e^2))."""
    obj = lambda e: max(1.0 / (2.0 * math.pi * e), 2.0 / (1.0 - e * e))
    res = minimize_scalar(obj, bounds=(1e-6, 1 - 1e-6), method="bounded", options={"xatol": 1e-14})
    return float(res.fun)


# ---------------------------------------------------------------------------
# suites


def pullback_to_upper(f: HoloFunction) -> HoloFunction:
    return HoloFunction(Composition(f.expr, Cayley("hplus_to_disk")), Domain.UpperHalfPlane, f"pullback({f.label})")


def pushforward_to_disk(f: HoloFunction) -> HoloFunction:
    direction = "disk_to_hplus" if f.domain is Domain.UpperHalfPlane else "disk_to_hminus"
    return HoloFunction(Composition(f.expr, Cayley(direction)), Domain.UnitDisk, f"push({f.label})")


def _is_constant(f: HoloFunction) -> bool:
    return isinstance(f.expr, Const)


def inequality_suite(f: HoloFunction, ps: Sequence[float] = (1.5, 2.0, 3.0),
                     cfg: QuadratureConfig = QuadratureConfig()) -> VerificationReport:
    """Checks (a)-(e): Besov scale, Bloch vs BMOA, BMOA vs Besov, both Hardy bounds."""
    ps = sorted(float(p) for p in ps)
    if any(p <= 1 for p in ps):
        raise KindDomainError("inequality suite needs p > 1")
    rep = VerificationReport("norm-inequalities", environment=cfg.snapshot())
    disk_f = f if f.domain is Domain.UnitDisk else pushforward_to_disk(f)
    half_f = f if f.domain is Domain.UpperHalfPlane else (
        pullback_to_upper(f) if f.domain is Domain.UnitDisk else pullback_to_upper(pushforward_to_disk(f)))
    tag = f.label or "f"

    besov = {p: seminorm(disk_f, Besov(p), cfg) for p in ps}
    bloch = seminorm(disk_f, Bloch, cfg)
    bm = seminorm(disk_f, BMOA(cfg.depth), cfg)
    qs = list(ps) + [math.inf]
    for i, p in enumerate(ps):
        for q in qs[i + 1:]:
            lhs = bloch if not math.isfinite(q) else besov[q]
            qn = "inf" if not math.isfinite(q) else f"{q:g}"
            rep.add(inequality_check(f"a:{tag}:p={p:g}:q={qn}", "Besov scale, c_p^(1-p/q) with c_p = 2/pi^(1/p)",
                                     lhs, besov[p], c_pq(p, q)))
    rep.add(inequality_check(f"b:{tag}", "Bloch bounded by BMOA with c = 4/sqrt(pi)", bloch, bm, C_BLOCH_BMOA))
    for p in ps:
        if p > 2:
            rep.add(inequality_check(f"c:{tag}:p={p:g}", "BMOA bounded by Besov with (1-2/p)^(1/2-1/p)",
                                     bm, besov[p], c_prime(p)))
    h_half = hardy_h11(half_f, cfg)
    s_half = seminorm(half_f, BesovSharp(1.0), cfg)
    rep.add(inequality_check(f"d:{tag}", "half-plane Hardy bound H11 <= B1#", h_half, s_half, 1.0))
    h_disk = hardy_h11(disk_f, cfg)
    s_disk = seminorm(disk_f, BesovSharp(1.0), cfg)
    C = hardy_disk_constant()
    combined = SeminormValue(s_disk.estimate + bloch.estimate,
                             [(e, v + bloch.estimate) for e, v in s_disk.ladder],
                             s_disk.last_delta_rel, s_disk.divergent or bloch.divergent)
    rep.add(inequality_check(f"e:{tag}", "disk Hardy bound H11 <= C (B1# + Bloch)", h_disk, combined, C,
                             detail={"C": C}))
    return rep


def equivalence_probe_p1(f: HoloFunction, cfg: QuadratureConfig = QuadratureConfig(),
                         envelope: float = 50.0) -> VerificationReport:
    """Compare B1# + BMOA, B1# + Bloch and B1# + H11 on the disk."""
    if f.domain is not Domain.UnitDisk:
        raise DomainError("the p = 1 probe runs on the disk")
    rep = VerificationReport("equivalence-p1", environment=cfg.snapshot())
    sharp = seminorm(f, BesovSharp(1.0), cfg)
    others = {"bmoa": seminorm(f, BMOA(cfg.depth), cfg), "bloch": seminorm(f, Bloch, cfg),
              "h11": hardy_h11(f, cfg)}
    totals = {k: sharp.estimate + v.estimate for k, v in others.items()}
    divergent = {k: sharp.divergent or v.divergent for k, v in others.items()}
    names = list(totals)
    tag = f.label or "f"
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            cid = f"equiv:{tag}:{a}/{b}"
            detail = {"variant_a": a, "variant_b": b, "divergent_a": divergent[a], "divergent_b": divergent[b]}
            if divergent[a] or divergent[b]:
                consistent = divergent[a] == divergent[b]
                rep.add(Check(cid, "p = 1 equivalent norms", totals[a], totals[b], envelope, None,
                              "skipped-divergent" if consistent else "fail", detail))
                continue
            va, vb = totals[a], totals[b]
            if va == 0 and vb == 0:
                rep.add(Check(cid, "p = 1 equivalent norms", va, vb, envelope, 0.0, "pass", detail))
                continue
            ratio = va / vb if vb else math.inf
            ok = 1.0 / envelope <= ratio <= envelope
            detail["ratio"] = ratio if math.isfinite(ratio) else None
            margin = min(envelope - ratio, ratio - 1.0 / envelope) if math.isfinite(ratio) else None
            rep.add(Check(cid, "p = 1 equivalent norms", va, vb, envelope, margin, "pass" if ok else "fail", detail))
    return rep
