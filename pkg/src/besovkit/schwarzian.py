"""Pre-Schwarzian, Schwarzian and the canonical J operator, plus their variations.

All three operators are built as expression nodes over truncated Taylor
arithmetic, so their own derivatives stay exact.  The variational kernels
integrate a Beltrami coefficient against Cauchy-type kernels of order 3 and 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .beltrami import BeltramiCoefficient, p_norm
from .errors import CriticalPointError, DomainError, FiberError, SupportError
from .function_model import (Domain, Expr, HoloFunction, Identity, Koebe, LogDerivative, Mobius, PowerSeries)
from .quadrature import QuadratureConfig, SeminormValue, gauss_legendre
from .report import Check, VerificationReport, inequality_check
from .taylor import Taylor


@dataclass
class OperatorResult:
    function: HoloFunction
    provenance: dict = field(default_factory=dict)

    def __call__(self, z):
        return self.function(z)


def _first_two(expr: Expr, w0, order: int):
    """F' to order+1 and F'' to order, from one expansion of F."""
    e = expr.expand(w0, order + 2)
    f1 = e.deriv()
    if np.any(f1.c[0] == 0):
        raise CriticalPointError("F' vanishes")
    return f1, f1.deriv()


@dataclass(frozen=True)
class PreSchwarzianNode(Expr):
    a: Expr

    def expand(self, w0, order):
        f1, f2 = _first_two(self.a, w0, order)
        return f2 / f1.truncate(order)


@dataclass(frozen=True)
class SchwarzianNode(Expr):
    a: Expr

    def expand(self, w0, order):
        N = PreSchwarzianNode(self.a).expand(w0, order + 1)
        Nt = N.truncate(order)
        return N.deriv() - Nt * Nt * 0.5


@dataclass(frozen=True)
class CanonicalJNode(Expr):
    a: Expr

    def expand(self, w0, order):
        d1 = self.a.expand(w0, order + 2).deriv()
        d2 = d1.deriv()
        d1 = d1.truncate(order)
        return d2 - d1 * d1 * 0.5


@dataclass(frozen=True)
class MobiusShiftNode(Expr):
    """Phi0 - 2 log(F - a): log of the derivative of 1/(F - a), up to a constant."""

    phi0: Expr
    F: Expr
    a: complex

    def taylor(self, t):
        return self.phi0.taylor(t) - (self.F.taylor(t) - self.a).log(check_branch=False) * 2.0


def _wrap(node: Expr, f: HoloFunction, op: str, **extra) -> OperatorResult:
    return OperatorResult(HoloFunction(node, f.domain, f"{op}({f.label})"), {"operator": op, "input": f.label, **extra})


def pre_schwarzian(F: HoloFunction) -> OperatorResult:
    """N_F = F''/F'.  Raises CriticalPointError where F' = 0."""
    return _wrap(PreSchwarzianNode(F.expr), F, "pre_schwarzian")


def schwarzian(F: HoloFunction) -> OperatorResult:
    """S_F = N_F' - N_F^2 / 2."""
    return _wrap(SchwarzianNode(F.expr), F, "schwarzian")


def canonical_J(phi: HoloFunction) -> OperatorResult:
    """J(Phi) = Phi'' - Phi'^2 / 2."""
    return _wrap(CanonicalJNode(phi.expr), phi, "canonical_J")


def log_derivative(F: HoloFunction) -> HoloFunction:
    return HoloFunction(LogDerivative(F.expr), F.domain, f"log_derivative({F.label})")


# ---------------------------------------------------------------------------
# Moebius fibers


def image_closure_contains(F: HoloFunction, a: complex, samples: int = 4096) -> bool:
    """Whether ``a`` may lie in the closure of F(D).

    Exact for the identity and the Koebe function.  Otherwise the image is
    enclosed in the disk of radius max |F| on a circle close to the boundary,
    and anything within 1% of that radius counts as inside.
    """
    if F.domain is not Domain.UnitDisk:
        raise DomainError("fibers are taken over maps of the unit disk")
    e = F.expr
    if isinstance(e, Identity):
        return abs(a) <= 1.0
    if isinstance(e, Koebe):
        return True  # the slit plane is dense in C
    th = 2 * math.pi * np.arange(samples) / samples
    with np.errstate(all="ignore"):
        vals = F(np.exp(1j * th) * (1.0 - 1e-9))
    if not np.all(np.isfinite(vals)):
        return True
    return abs(a) <= 1.01 * float(np.max(np.abs(vals)))


def mobius_shift(F: HoloFunction, a, phi0: Optional[HoloFunction] = None,
                 image_predicate: Optional[Callable[[complex], bool]] = None) -> HoloFunction:
    """The point of the J-fiber of Phi0 = log F' obtained by post-composing F with 1/(w - a).

    ``a = inf`` returns Phi0.  A finite ``a`` must stay away from the closure of
    F(D); ``image_predicate(a)`` overrides the built-in closure test.
    """
    phi0 = phi0 if phi0 is not None else log_derivative(F)
    if a is None or (isinstance(a, (float, complex)) and math.isinf(abs(a))) or a == "inf":
        return phi0
    a = complex(a)
    inside = image_predicate(a) if image_predicate is not None else image_closure_contains(F, a)
    if inside:
        raise FiberError(f"a = {a} lies in the closure of the image")
    return HoloFunction(MobiusShiftNode(phi0.expr, F.expr, a), F.domain, f"mobius_shift({F.label},a={a})")


# ---------------------------------------------------------------------------
# variational kernels


def _check_support(mu: BeltramiCoefficient, eps: float = 1e-12):
    if mu.domain is not Domain.UpperHalfPlane:
        raise DomainError("the variational kernels take coefficients on the upper half-plane")
    if mu.support is None:
        raise SupportError("a compactly supported coefficient (box support) is required")
    if mu.support[2] <= eps:
        raise SupportError("support touches the real axis")
    return mu.support


def _box_nodes(box, n: int = 12, panels: int = 6):
    x0, x1, y0, y1 = box
    t, w = gauss_legendre(n)

    def axis(a, b):
        edges = np.linspace(a, b, panels + 1)
        h = np.diff(edges) / 2
        pts = ((edges[:-1] + edges[1:]) / 2)[:, None] + h[:, None] * t[None, :]
        return pts.ravel(), (h[:, None] * w[None, :]).ravel()

    xs, wx = axis(x0, x1)
    ys, wy = axis(y0, y1)
    W = xs[:, None] + 1j * ys[None, :]
    return W.ravel(), (wx[:, None] * wy[None, :]).ravel()


def kernel_integral(mu: BeltramiCoefficient, z, m: int, n: int = 12, panels: int = 6) -> np.ndarray:
    """Integral of mu(w) (w - z)^-m over the support box, by tensor Gauss-Legendre."""
    box = _check_support(mu)
    z = np.asarray(z, dtype=complex)
    W, wt = _box_nodes(box, n, panels)
    nu = mu(W) * wt
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for s in range(0, flat.size, 256):
        chunk = flat[s:s + 256]
        out[s:s + 256] = ((W[None, :] - chunk[:, None]) ** (-m)) @ nu
    return out.reshape(z.shape)


def box_kernel_closed_form(c: complex, box, z, m: int) -> np.ndarray:
    """c times the integral of (w - z)^-m over a box, m >= 3, summed over corners."""
    if m < 3:
        raise ValueError("closed form needs m >= 3")
    x0, x1, y0, y1 = box
    z = np.asarray(z, dtype=complex)
    acc = 0
    for u, v, s in ((x1, y1, 1), (x0, y0, 1), (x1, y0, -1), (x0, y1, -1)):
        acc = acc + s * (complex(u, v) - z) ** (2 - m)
    return c * acc / ((1 - m) * (2 - m) * 1j)


def _kernel(mu, z, m, method):
    if method == "closed" or (method == "auto" and mu.box_value is not None):
        if mu.box_value is None:
            raise ValueError("closed form needs a box-constant coefficient")
        _check_support(mu)
        return box_kernel_closed_form(mu.box_value, mu.support, z, m)
    return kernel_integral(mu, z, m)


def d0_pre_schwarzian(mu: BeltramiCoefficient, z, method: str = "quadrature") -> np.ndarray:
    """(d0 L(mu))'(z) = -(2/pi) * integral of mu(w) / (w - z)^3, for z in the lower half-plane."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag >= 0):
        raise DomainError("the variation is evaluated on the lower half-plane")
    return -(2.0 / math.pi) * _kernel(mu, z, 3, method)


def d0_schwarzian(mu: BeltramiCoefficient, z, method: str = "quadrature") -> np.ndarray:
    """d0 S(mu)(z) = -(6/pi) * integral of mu(w) / (w - z)^4."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag >= 0):
        raise DomainError("the variation is evaluated on the lower half-plane")
    return -(6.0 / math.pi) * _kernel(mu, z, 4, method)


@dataclass(frozen=True)
class VariationNode(Expr):
    """Holomorphic function z -> -(k/pi) * integral of mu(w) (w - z)^-m on the lower half-plane.

    The k-th Taylor coefficient at z0 is binom(m+k-1, k) times the same
    integral with exponent m + k.
    """

    mu: BeltramiCoefficient
    m: int
    factor: float
    method: str = "auto"

    def expand(self, w0, order):
        w0 = np.asarray(w0, dtype=complex)
        c = np.stack([math.comb(self.m + k - 1, k) * _kernel(self.mu, w0, self.m + k, self.method)
                      for k in range(order + 1)])
        return Taylor(-(self.factor / math.pi) * c)


def variation_function(mu: BeltramiCoefficient, which: str = "pre", method: str = "auto") -> HoloFunction:
    """(d0 L(mu))' for ``which='pre'`` or d0 S(mu) for ``which='schwarzian'`` as a HoloFunction."""
    m, k = {"pre": (3, 2.0), "schwarzian": (4, 6.0)}[which]
    return HoloFunction(VariationNode(mu, m, k, method), Domain.LowerHalfPlane, f"d0_{which}({mu.label})")


# strip integration over -2^hi <= Im z <= -2^-lo


def strip_integral(h: Callable[[np.ndarray], np.ndarray], center: float = 0.0, width: float = 1.0,
                   k_lo: int = 10, k_hi: int = 10, panels: int = 40, n: int = 10) -> float:
    """Integral of h over {x + iy : 2^-k_lo <= -y <= 2^k_hi}.

    Substitutes y = -e^s and x = center + (|y| + width) tan(phi); both axes use
    composite Gauss-Legendre.
    """
    t, w = gauss_legendre(n)

    def composite(a, b):
        edges = np.linspace(a, b, panels + 1)
        hh = np.diff(edges) / 2
        pts = ((edges[:-1] + edges[1:]) / 2)[:, None] + hh[:, None] * t[None, :]
        return pts.ravel(), (hh[:, None] * w[None, :]).ravel()

    s, ws = composite(-k_lo * math.log(2), k_hi * math.log(2))
    ph, wp = composite(-math.pi / 2, math.pi / 2)
    ay = np.exp(s)
    L = ay + width
    X = center + L[:, None] * np.tan(ph)[None, :]
    Z = X - 1j * ay[:, None]
    jac = (ay * L)[:, None] / np.cos(ph)[None, :] ** 2
    vals = h(Z) * jac * ws[:, None] * wp[None, :]
    return math.fsum(np.asarray(vals, dtype=float).ravel())


def variation_norm(mu: BeltramiCoefficient, p: float, which: str = "pre", method: str = "auto") -> SeminormValue:
    """B_p of d0 L(mu) (which='pre') or A_p of d0 S(mu) (which='schwarzian') on the truncated strip.

    The ladder has two rungs: a coarse and a refined strip rule.
    """
    box = _check_support(mu)
    center = 0.5 * (box[0] + box[1])
    width = (box[1] - box[0]) + box[3]
    f = variation_function(mu, which, method)
    power = 1 if which == "pre" else 2

    def h(Z):
        v = f.derivatives(Z, 0)[0]
        return (np.abs(Z.imag) ** power * np.abs(v)) ** p / Z.imag ** 2

    vals = [strip_integral(h, center, width, panels=pn) for pn in (20, 40)]
    ladder = [(float(pn), v ** (1.0 / p)) for pn, v in zip((20, 40), vals)]
    est = ladder[-1][1]
    ldr = abs(ladder[-1][1] - ladder[0][1]) / max(abs(est), 1e-300)
    return SeminormValue(est, ladder, ldr, False)


def pre_variation_constant(p: float) -> float:
    """(4 pi)^(1/p) * 16/(2 - q) with q the conjugate exponent; needs p > 2."""
    if p <= 2:
        raise ValueError("needs p > 2")
    q = p / (p - 1)
    return (4 * math.pi) ** (1 / p) * 16.0 / (2.0 - q)


SCHWARZIAN_VARIATION_CONSTANT = 24.0  # (6/pi)(4 pi)^(1/q)(4 pi)^(1/p)


def variation_bounds(mu: BeltramiCoefficient, cfg: QuadratureConfig = QuadratureConfig()) -> VerificationReport:
    rep = VerificationReport("variational-bounds", environment=cfg.snapshot())
    for p in (3, 4):
        lhs = variation_norm(mu, p, "pre")
        rep.add(inequality_check(f"{mu.label}:pre:p={p}", "pre-Schwarzian variation bound, p > 2",
                                 lhs, p_norm(mu, p, cfg), pre_variation_constant(p)))
    for p in (1, 2, 3):
        lhs = variation_norm(mu, p, "schwarzian")
        rep.add(inequality_check(f"{mu.label}:schwarzian:p={p}", "Schwarzian variation bound",
                                 lhs, p_norm(mu, p, cfg), SCHWARZIAN_VARIATION_CONSTANT))
    return rep


# ---------------------------------------------------------------------------
# identity checks


def _relerr(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def disk_grid(n_r: int = 5, n_t: int = 10, r_max: float = 0.9) -> np.ndarray:
    r = np.linspace(0.1, r_max, n_r)
    th = 2 * math.pi * (np.arange(n_t) + 0.5) / n_t
    return (r[:, None] * np.exp(1j * th[None, :])).ravel()


def identity_checks(F: HoloFunction, tol: float = 1e-10, grid: Optional[np.ndarray] = None) -> VerificationReport:
    """J(log F') = S_F and N_F = (log F')' on a grid, plus the third-derivative form of S_F."""
    z = disk_grid() if grid is None else grid
    rep = VerificationReport("schwarzian-identities")
    d = F.derivatives(z, 3)
    S_direct = d[3] / d[1] - 1.5 * (d[2] / d[1]) ** 2
    S = schwarzian(F).function(z)
    J = canonical_J(log_derivative(F)).function(z)
    N = pre_schwarzian(F).function(z)
    dlog = log_derivative(F).derivatives(z, 1)[1]
    for cid, a, b in ((f"{F.label}:J=S", J, S), (f"{F.label}:N=dlog", N, dlog),
                      (f"{F.label}:S=third", S, S_direct)):
        e = _relerr(a, b)
        rep.add(Check(cid, "operator identity", e, tol, None, tol - e, "pass" if e <= tol else "fail",
                      {"points": int(np.size(z))}))
    return rep


def fiber_checks(F: HoloFunction, shifts, tol: float = 1e-10, grid: Optional[np.ndarray] = None) -> VerificationReport:
    """J is constant along the Moebius fiber of log F'."""
    z = disk_grid() if grid is None else grid
    rep = VerificationReport("schwarzian-identities")
    J0 = canonical_J(log_derivative(F)).function(z)
    for a in shifts:
        Ja = canonical_J(mobius_shift(F, a)).function(z)
        e = _relerr(Ja, J0)
        rep.add(Check(f"{F.label}:fiber:a={complex(a):.6g}", "J constant on Moebius fibers", e, tol, None, tol - e,
                      "pass" if e <= tol else "fail", {"points": int(np.size(z))}))
    return rep


def bounded_univalent_polynomial(b: float = 0.25) -> HoloFunction:
    """z + b z^2, univalent on the disk for |b| <= 1/2."""
    return HoloFunction(PowerSeries.dense([0.0, 1.0, b]), Domain.UnitDisk, f"poly(b={b:g})")


def koebe_conjugate(a: float) -> HoloFunction:
    """1/(k(z) - a) for real a < -1/4, univalent on the disk."""
    return HoloFunction(Mobius(0.0, 1.0, 1.0, -a, Koebe()), Domain.UnitDisk, f"inv_koebe(a={a:g})")
