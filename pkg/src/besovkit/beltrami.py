"""Beltrami coefficients: integrability, boundary decay, the Bloch section.

Coefficients live on the exterior disk or the upper half-plane.  The
hyperbolic density is ``1/|Im z|`` on the half-plane and ``2/(|z|^2 - 1)``
on the exterior disk; p-norms integrate ``|mu|^p`` against its square.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError, HypothesisError
from .function_model import Domain, HoloFunction
from .quadrature import (QuadratureConfig, SeminormValue, annulus_integral, finalize_ladder, integrate_halfplane,
                         root_value, sup_refine)
from .report import Check, VerificationReport
from .seminorms import Bloch, seminorm

Box = Tuple[float, float, float, float]


@dataclass(frozen=True)
class BeltramiCoefficient:
    formula: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    domain: Domain
    declared_sup: float
    label: str = ""
    support: Optional[Box] = None       # half-plane box (x0, x1, y0, y1)
    support_radius: Optional[float] = None  # exterior disk: mu = 0 for |z| >= R
    box_value: Optional[complex] = None  # set when mu is constant on `support`

    def __post_init__(self):
        if self.domain not in (Domain.ExteriorDisk, Domain.UpperHalfPlane):
            raise DomainError("Beltrami coefficients live on the exterior disk or the upper half-plane")
        if not self.declared_sup < 1:
            raise ValueError("declared sup must be below 1")

    def __call__(self, z):
        return self.formula(np.asarray(z, dtype=complex))

    def grid_sup(self, n: int = 100) -> float:
        """Maximum of |mu| on an n x n grid covering the relevant region."""
        if self.domain is Domain.UpperHalfPlane:
            if self.support is not None:
                x0, x1, y0, y1 = self.support
                xs, ys = np.linspace(x0, x1, n), np.linspace(y0, y1, n)
            else:
                xs, ys = np.linspace(-10, 10, n), np.geomspace(1e-4, 10, n)
            Z = xs[:, None] + 1j * ys[None, :]
        else:
            R = self.support_radius or 3.0
            rs = 1.0 + np.geomspace(1e-5, R - 1.0, n)
            th = 2 * math.pi * np.arange(n) / n
            Z = rs[:, None] * np.exp(1j * th[None, :])
        return float(np.max(np.abs(self(Z))))

    def __hash__(self):
        return hash((self.label, self.domain, self.declared_sup, self.support, self.support_radius, self.box_value))

    def __eq__(self, other):
        return isinstance(other, BeltramiCoefficient) and hash(self) == hash(other) and self.label == other.label


def zero_coefficient(domain: Domain = Domain.ExteriorDisk) -> BeltramiCoefficient:
    return BeltramiCoefficient(lambda z: np.zeros(np.shape(z), dtype=complex), domain, 0.0, "zero",
                               support_radius=2.0 if domain is Domain.ExteriorDisk else None,
                               support=(0.0, 1.0, 1.0, 2.0) if domain is Domain.UpperHalfPlane else None,
                               box_value=0.0 if domain is Domain.UpperHalfPlane else None)


def box_coefficient(c: complex, box: Box = (0.0, 1.0, 1.0, 2.0)) -> BeltramiCoefficient:
    """c times the indicator of an axis-parallel box in the upper half-plane."""
    x0, x1, y0, y1 = box
    c = complex(c)

    def f(z):
        inside = (z.real >= x0) & (z.real <= x1) & (z.imag >= y0) & (z.imag <= y1)
        return np.where(inside, c, 0.0 + 0.0j)

    return BeltramiCoefficient(f, Domain.UpperHalfPlane, abs(c), f"box(c={c},{box})", support=tuple(map(float, box)),
                               box_value=c)


def mu_gamma(gamma: float, amplitude: float = 0.5, R: float = 2.0) -> BeltramiCoefficient:
    """amplitude * min(1, (|z|^2 - 1)^gamma) on 1 < |z| < R, zero beyond."""

    def f(z):
        s = np.abs(z) ** 2 - 1.0
        with np.errstate(invalid="ignore"):
            v = amplitude * np.minimum(1.0, np.maximum(s, 0.0) ** gamma)
        return np.where(np.abs(z) < R, v, 0.0).astype(complex)

    return BeltramiCoefficient(f, Domain.ExteriorDisk, amplitude, f"mu_gamma(gamma={gamma:g})", support_radius=R)


def annulus_constant(c: float, R: float = 2.0) -> BeltramiCoefficient:
    def f(z):
        return np.where(np.abs(z) < R, complex(c), 0.0 + 0.0j)

    return BeltramiCoefficient(f, Domain.ExteriorDisk, abs(c), f"annulus_constant(c={c:g})", support_radius=R)


def parse_mu_spec(text: str) -> BeltramiCoefficient:
    """``box:c=0.3,x0=0,x1=1,y0=1,y1=2`` / ``gamma:gamma=0.5`` / ``annulus:c=0.2`` / ``zero``."""
    name, _, rest = text.partition(":")
    kv = {}
    for item in filter(None, rest.split(",")):
        k, eq, v = item.partition("=")
        if not eq:
            raise ValueError(f"malformed parameter {item!r}")
        kv[k.strip()] = v.strip()
    name = name.strip()
    if name == "box":
        box = tuple(float(kv.get(k, d)) for k, d in (("x0", 0), ("x1", 1), ("y0", 1), ("y1", 2)))
        return box_coefficient(complex(kv.get("c", "0.3")), box)
    if name in ("gamma", "mu_gamma"):
        return mu_gamma(float(kv.get("gamma", "1")), float(kv.get("a", "0.5")))
    if name == "annulus":
        return annulus_constant(float(kv.get("c", "0.5")))
    if name == "zero":
        return zero_coefficient()
    raise ValueError(f"unknown coefficient {name!r}")


# ---------------------------------------------------------------------------
# norms


def exterior_density(z):
    """Squared hyperbolic density (2/(|z|^2 - 1))^2 of the exterior disk."""
    return 4.0 / (np.abs(z) ** 2 - 1.0) ** 2


def p_norm(mu: BeltramiCoefficient, p: float, cfg: QuadratureConfig = QuadratureConfig()) -> SeminormValue:
    if p < 1:
        raise ValueError("p must be at least 1")
    if mu.domain is Domain.UpperHalfPlane:
        g = lambda z: np.abs(mu(z)) ** p / z.imag ** 2
        if mu.support is not None:
            if mu.box_value is not None:
                x0, x1, y0, y1 = mu.support
                val = abs(mu.box_value) ** p * (x1 - x0) * (1.0 / y0 - 1.0 / y1)
                raw = SeminormValue(val, [(cfg.eps_min, val)], 0.0, False)
            else:
                raw = integrate_halfplane(g, cfg, support=mu.support)
        else:
            raw = integrate_halfplane(g, cfg)
        return root_value(raw, p)
    R = mu.support_radius or 2.0
    g = lambda z: np.abs(mu(z)) ** p * exterior_density(z)
    eps = cfg.shell_epsilons
    # outer part: 1 + eps_0 .. R split dyadically in (r - 1)
    outer_edges = [1.0 + eps[0]]
    while outer_edges[-1] < R:
        outer_edges.append(min(1.0 + 2.0 * (outer_edges[-1] - 1.0), R))
    base = math.fsum(_radial_adaptive(g, a, b, cfg) for a, b in zip(outer_edges, outer_edges[1:]))
    ladder = [(eps[0], base)]
    acc = [base]
    for e_prev, e in zip(eps, eps[1:]):
        acc.append(annulus_integral(g, 1.0 + e, 1.0 + e_prev, cfg))
        ladder.append((e, math.fsum(acc)))
    return root_value(finalize_ladder(ladder, cfg.tol_rel, extrapolate=True), p)


def _radial_adaptive(g, a: float, b: float, cfg: QuadratureConfig, whole: Optional[float] = None,
                     level: int = 0) -> float:
    # the radial rule is fixed, so kinks such as the cap of mu_gamma need bisection in r
    whole = annulus_integral(g, a, b, cfg) if whole is None else whole
    m = 0.5 * (a + b)
    left, right = annulus_integral(g, a, m, cfg), annulus_integral(g, m, b, cfg)
    if abs(left + right - whole) <= max(cfg.tol_rel * abs(left + right), cfg.tol_abs) or level >= 30:
        return left + right
    return (_radial_adaptive(g, a, m, cfg, left, level + 1) + _radial_adaptive(g, m, b, cfg, right, level + 1))


def decay_check(mu: BeltramiCoefficient, gamma: float, cfg: QuadratureConfig = QuadratureConfig()) -> SeminormValue:
    """Supremum ladder of ((|z|^2 - 1)^-gamma v 1) |mu| toward the unit circle."""
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    if mu.domain is not Domain.ExteriorDisk:
        raise DomainError("decay classes are defined on the exterior disk")

    def g(z):
        s = np.abs(z) ** 2 - 1.0
        return np.maximum(s ** -gamma, 1.0) * np.abs(mu(z))

    return sup_refine(g, "ext-disk", cfg)


def fitted_exponent(v: SeminormValue, p: float) -> Optional[float]:
    """Decay exponent implied by the last two ladder increments of ``|mu|^p``.

    With ``|mu| ~ s^gamma`` the p-th power shell masses scale like
    ``2^(-k (gamma p - 1))``; the fit inverts that relation.
    """
    vals = [x ** p for _, x in v.ladder]
    inc = [b - a for a, b in zip(vals, vals[1:])]
    if len(inc) < 2 or inc[-1] <= 0 or inc[-2] <= 0:
        return None
    e = -math.log2(inc[-1] / inc[-2])
    return (e + 1.0) / p


@dataclass
class MembershipVerdict:
    p_norm: SeminormValue
    sup_norm: float
    gamma_fit: Optional[float]

    @property
    def finite(self) -> bool:
        return not self.p_norm.divergent

    def to_dict(self) -> dict:
        return {"p_norm": self.p_norm.to_dict(), "sup_norm": self.sup_norm, "gamma_fit": self.gamma_fit,
                "finite": self.finite}


def membership(mu: BeltramiCoefficient, p: float, cfg: QuadratureConfig = QuadratureConfig()) -> MembershipVerdict:
    v = p_norm(mu, p, cfg)
    return MembershipVerdict(v, mu.grid_sup(), fitted_exponent(v, p) if mu.domain is Domain.ExteriorDisk else None)


# ---------------------------------------------------------------------------
# Bloch section


def aw_section(phi: HoloFunction, cfg: QuadratureConfig = QuadratureConfig(), modulus: bool = True,
               bloch_value: Optional[SeminormValue] = None) -> BeltramiCoefficient:
    """mu(z) = -2 Im(z) |Phi'(conj z)| on the upper half-plane, for Phi on the lower one.

    ``modulus=False`` drops the absolute value, giving -2 Im(z) Phi'(conj z)
    for comparison.  Requires the Bloch seminorm of Phi below 1/2.
    """
    if phi.domain is not Domain.LowerHalfPlane:
        raise DomainError("the section takes a function on the lower half-plane")
    b = bloch_value or seminorm(phi, Bloch, cfg)
    if not b.estimate < 0.5:
        raise HypothesisError(f"Bloch seminorm {b.estimate:.6g} is not below 1/2")

    def f(z):
        d = phi.derivatives(np.conj(z), 1)[1]
        return (-2.0 * z.imag * (np.abs(d) if modulus else d)).astype(complex)

    return BeltramiCoefficient(f, Domain.UpperHalfPlane, min(2.0 * b.estimate, 0.999999),
                               f"aw_section({phi.label}{'' if modulus else ',no-modulus'})")


def section_sup(mu: BeltramiCoefficient, cfg: QuadratureConfig = QuadratureConfig()) -> SeminormValue:
    """Refined supremum ladder of |mu| over the upper half-plane."""
    return sup_refine(lambda z: np.abs(mu(z)), "hplus", cfg)


# ---------------------------------------------------------------------------
# inclusion witnesses


def inclusion_witness(gamma: float, p: float, cfg: QuadratureConfig = QuadratureConfig()) -> VerificationReport:
    """Decay class membership and p-integrability of mu_gamma, against gamma p > 1."""
    if not 0 < gamma <= 1 or p < 1:
        raise ValueError("need 0 < gamma <= 1 and p >= 1")
    mu = mu_gamma(gamma)
    rep = VerificationReport("beltrami-inclusions", environment=cfg.snapshot())
    d = decay_check(mu, gamma, cfg)
    rep.add(Check(f"decay:gamma={gamma:g}", "decay class membership of mu_gamma", d.estimate, None, None, None,
                  "pass" if not d.divergent else "fail", {"ladder_tail": d.ladder[-3:]}))
    v = membership(mu, p, cfg)
    expected = gamma * p > 1
    got = v.finite
    rep.add(Check(f"pnorm:gamma={gamma:g}:p={p:g}", "gamma p > 1 gives p-integrability",
                  v.p_norm.estimate, None, None, None, "pass" if got == expected else "fail",
                  {"expected_finite": expected, "classified_finite": got, "gamma_fit": v.gamma_fit,
                   "increments": v.p_norm.increments()[-3:]}))
    return rep
