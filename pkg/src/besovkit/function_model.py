"""Holomorphic functions with exact 2-jets.

A :class:`HoloFunction` pairs an expression tree with the domain it lives
on.  Expressions are immutable and evaluate on truncated Taylor series, so
first and second derivatives (and higher ones, which the operator module
needs) come out exactly rather than by differencing.

Three representations exist: power series (dense or sparse, centered at 0),
closed-form node trees, and compositions.  The gallery collects the named
functions used by the verification suites.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import CriticalPointError, DomainError, PoleError, UnknownName
from .taylor import Taylor


class Domain(enum.Enum):
    UnitDisk = "disk"
    ExteriorDisk = "ext-disk"
    UpperHalfPlane = "hplus"
    LowerHalfPlane = "hminus"

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self is Domain.UnitDisk:
            return np.abs(z) < 1
        if self is Domain.ExteriorDisk:
            return np.abs(z) > 1
        if self is Domain.UpperHalfPlane:
            return z.imag > 0
        return z.imag < 0

    @property
    def is_halfplane(self) -> bool:
        return self in (Domain.UpperHalfPlane, Domain.LowerHalfPlane)

    @classmethod
    def parse(cls, text: str) -> "Domain":
        for d in cls:
            if d.value == text or d.name == text:
                return d
        raise DomainError(f"unknown domain {text!r}")


@dataclass(frozen=True)
class Jet2:
    value: complex
    d1: complex
    d2: complex

    def as_tuple(self) -> Tuple[complex, complex, complex]:
        return (self.value, self.d1, self.d2)


# ---------------------------------------------------------------------------
# expression nodes


class Expr:
    """Base expression.  Subclasses implement ``taylor`` or ``expand``."""

    tag = "ClosedForm"

    def taylor(self, t: Taylor) -> Taylor:
        e = self.expand(t.c[0], t.order)
        h = Taylor(t.c.copy())
        h.c[0] = 0.0
        return e.compose_into(h)

    def expand(self, w0, order: int) -> Taylor:
        return self.taylor(Taylor.variable(w0, order))


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def taylor(self, t):
        return Taylor.constant(self.value, t.order, t.shape)


@dataclass(frozen=True)
class Identity(Expr):
    def taylor(self, t):
        return t


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr

    def taylor(self, t):
        return self.a.taylor(t) + self.b.taylor(t)


@dataclass(frozen=True)
class Scale(Expr):
    factor: complex
    a: Expr

    def taylor(self, t):
        return self.a.taylor(t) * self.factor


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr

    def taylor(self, t):
        return self.a.taylor(t) * self.b.taylor(t)


@dataclass(frozen=True)
class Recip(Expr):
    a: Expr

    def taylor(self, t):
        return self.a.taylor(t).recip()


@dataclass(frozen=True)
class Log(Expr):
    """Principal logarithm of the child expression."""

    a: Expr

    def taylor(self, t):
        return self.a.taylor(t).log()


@dataclass(frozen=True)
class Pow(Expr):
    a: Expr
    n: int

    def taylor(self, t):
        return self.a.taylor(t).powi(self.n)


@dataclass(frozen=True)
class Koebe(Expr):
    """k(z) = z/(1-z)^2."""

    def taylor(self, t):
        return t * (1.0 - t).powi(-2)


@dataclass(frozen=True)
class LogSquareWitness(Expr):
    """a(1-z)(log 1/(1-z))^2, with log 1/(1-z) = -log(1-z) on the disk."""

    a: complex = 1.0

    def taylor(self, t):
        w = 1.0 - t
        L = -w.log()
        return w * (L * L) * self.a


@dataclass(frozen=True)
class Mobius(Expr):
    """(a w + b)/(c w + d) applied to the child expression."""

    a: complex
    b: complex
    c: complex
    d: complex
    inner: Expr = field(default_factory=Identity)

    def taylor(self, t):
        w = self.inner.taylor(t)
        den = w * self.c + self.d
        if np.any(den.c[0] == 0):
            raise PoleError("evaluation at the pole of the Moebius map")
        return (w * self.a + self.b) / den


@dataclass(frozen=True)
class Composition(Expr):
    outer: Expr
    inner: Expr
    tag = "Composition"

    def taylor(self, t):
        return self.outer.taylor(self.inner.taylor(t))


@dataclass(frozen=True)
class Derivative(Expr):
    """f' as an expression; used to build N_F, S_F and J without differencing."""

    a: Expr

    def expand(self, w0, order):
        return self.a.expand(w0, order + 1).deriv()


@dataclass(frozen=True)
class LogDerivative(Expr):
    """log F'.

    Derivatives are exact and branch independent.  The value uses the
    principal logarithm of F' pointwise, so it is defined up to 2*pi*i.
    """

    a: Expr

    def taylor(self, t):
        fp = Derivative(self.a).taylor(t)
        if np.any(fp.c[0] == 0):
            raise CriticalPointError("F' vanishes")
        return fp.log(check_branch=False)


def _binom(n: int, j: int) -> float:
    return float(math.comb(n, j)) if n < 1 << 60 else float(np.prod([(n - i) / (i + 1) for i in range(j)]))


@dataclass(frozen=True)
class PowerSeries(Expr):
    """Finite power series centered at 0, stored as sparse (index, coefficient) pairs."""

    terms: Tuple[Tuple[int, complex], ...]
    tag = "PowerSeries"

    @classmethod
    def dense(cls, coeffs) -> "PowerSeries":
        return cls(tuple((n, complex(c)) for n, c in enumerate(coeffs) if c != 0))

    def coefficients(self) -> Dict[int, complex]:
        return dict(self.terms)

    def expand(self, w0, order):
        w0 = np.asarray(w0, dtype=complex)
        out = np.zeros((order + 1,) + w0.shape, dtype=complex)
        for n, cn in self.terms:
            for j in range(min(n, order) + 1):
                out[j] = out[j] + cn * _binom(n, j) * w0 ** (n - j)
        return Taylor(out)


@dataclass(frozen=True)
class LacunarySeries(PowerSeries):
    """a * sum_{n=0}^{N} 2^-n z^(2^n), evaluated by repeated squaring."""

    amplitude: complex = 1.0
    N: int = 42

    @classmethod
    def build(cls, a: complex = 1.0, N: int = 42) -> "LacunarySeries":
        terms = tuple((1 << n, complex(a) * 2.0 ** (-n)) for n in range(N + 1))
        return cls(terms=terms, amplitude=complex(a), N=int(N))

    def expand(self, w0, order):
        w0 = np.asarray(w0, dtype=complex)
        K = order
        out = np.zeros((K + 1,) + w0.shape, dtype=complex)
        wp = [np.ones_like(w0)]
        for _ in range(K):
            wp.append(wp[-1] * w0)
        B = None
        with np.errstate(under="ignore"):
            for n in range(self.N + 1):
                e = 1 << n
                cn = self.amplitude * 2.0 ** (-n)
                if e < K:
                    for j in range(e + 1):
                        out[j] = out[j] + cn * _binom(e, j) * wp[e - j]
                    continue
                # B holds w0^(e-K); advance by B <- B^2 w0^K when e doubles
                B = wp[e - K] if B is None else B * B * wp[K]
                if not B.any():
                    break  # every later power underflows as well
                for j in range(K + 1):
                    out[j] = out[j] + (cn * _binom(e, j)) * (B * wp[K - j])
        return Taylor(out)


def lacunary_truncation(r: float) -> int:
    """Smallest N with N >= 2 log2(1/(1-r)) + 10."""
    return int(math.ceil(2.0 * math.log2(1.0 / (1.0 - r)) + 10.0))


def lacunary_tail_bound(a: float, N: int, r: float) -> float:
    """Bound on |sum_{n>N} a 2^-n (2^n)^2 r^(2^n - 2)| for |z| <= r.

    This dominates the tail of the second derivative, hence also of the value
    and the first derivative.
    """
    total = 0.0
    n = N + 1
    while True:
        e = 2.0 ** n
        term = abs(a) * e * r ** (e - 2)
        total += term
        if term < 1e-300 or (n > N + 5 and term < 1e-18 * max(total, 1e-300)):
            break
        n += 1
    return total


_CAYLEY = {
    # name: (a, b, c, d) of the Moebius map
    "hplus_to_disk": (1.0, -1j, 1.0, 1j),       # (z - i)/(z + i)
    "disk_to_hplus": (1j, 1j, -1.0, 1.0),       # i(1 + w)/(1 - w)
    "hminus_to_disk": (-1.0, -1j, -1.0, 1j),    # (-z - i)/(-z + i)
    "disk_to_hminus": (-1j, -1j, -1.0, 1.0),    # -i(1 + w)/(1 - w)
}


@dataclass(frozen=True)
class Cayley(Expr):
    direction: str

    def taylor(self, t):
        a, b, c, d = _CAYLEY[self.direction]
        return Mobius(a, b, c, d).taylor(t)


# ---------------------------------------------------------------------------
# functions


@dataclass(frozen=True)
class HoloFunction:
    expr: Expr
    domain: Domain = Domain.UnitDisk
    label: str = ""

    @property
    def representation(self) -> str:
        return self.expr.tag

    def derivatives(self, z, order: int = 2, check: bool = False) -> np.ndarray:
        """Array of f, f', ..., f^(order) at ``z`` (any shape)."""
        z = np.asarray(z, dtype=complex)
        if check and not np.all(self.domain.contains(z)):
            raise DomainError(f"point outside {self.domain.name}")
        return self.expr.taylor(Taylor.variable(z, order)).derivatives()

    def __call__(self, z):
        return self.derivatives(z, 0)[0]


def eval_jet(f: HoloFunction, z: complex) -> Jet2:
    z = complex(z)
    if not bool(f.domain.contains(z)):
        raise DomainError(f"{z} is not in {f.domain.name}")
    v, d1, d2 = f.derivatives(np.array(z), 2)
    return Jet2(complex(v), complex(d1), complex(d2))


def compose_mobius(W, f: HoloFunction) -> HoloFunction:
    a, b, c, d = (complex(x) for x in W)
    if a * d - b * c == 0:
        raise ValueError("degenerate Moebius map: ad - bc = 0")
    return HoloFunction(Mobius(a, b, c, d, f.expr), f.domain, f"mobius({f.label})")


def scale(f: HoloFunction, c: complex) -> HoloFunction:
    return HoloFunction(Scale(complex(c), f.expr), f.domain, f"{c}*{f.label}")


# ---------------------------------------------------------------------------
# gallery

_ONE_MINUS_Z = Add(Const(1.0), Scale(-1.0, Identity()))


def _domain_param(params, default=Domain.UnitDisk) -> Domain:
    d = params.get("domain")
    return default if d is None else Domain.parse(str(d))


def _g_identity(p):
    return HoloFunction(Identity(), _domain_param(p), "identity")


def _g_constant(p):
    return HoloFunction(Const(complex(p.get("c", 1.0))), _domain_param(p), "constant")


def _g_monomial(p):
    k = int(p.get("k", 2))
    if k < 0:
        raise DomainError("monomial exponent must be >= 0")
    return HoloFunction(Pow(Identity(), k), _domain_param(p), f"monomial(k={k})")


def _g_koebe(p):
    return HoloFunction(Koebe(), Domain.UnitDisk, "koebe")


def _g_log_koebe_prime(p):
    # log k'(z) = log(1+z) - 3 log(1-z); both factors have positive real part on the disk
    e = Add(Log(Add(Const(1.0), Identity())), Scale(-3.0, Log(_ONE_MINUS_Z)))
    return HoloFunction(e, Domain.UnitDisk, "log_koebe_prime")


def _g_log_witness(p):
    a = complex(p.get("a", 1.0))
    return HoloFunction(Scale(-a, Log(_ONE_MINUS_Z)), Domain.UnitDisk, f"log_witness(a={a.real:g})")


def _g_lacunary(p):
    a = complex(p.get("a", 1.0))
    N = int(p.get("N", 42))
    return HoloFunction(LacunarySeries.build(a, N), Domain.UnitDisk, f"lacunary_phi1(a={a.real:g},N={N})")


def _g_logsq(p):
    a = complex(p.get("a", 1.0))
    return HoloFunction(LogSquareWitness(a), Domain.UnitDisk, f"logsq_phi1(a={a.real:g})")


def _g_mobius(p):
    W = tuple(complex(p.get(k, dflt)) for k, dflt in zip("abcd", (1.0, 0.0, 0.0, 1.0)))
    base = HoloFunction(Identity(), _domain_param(p), "identity")
    return compose_mobius(W, base)


def _g_halfplane_pole(p):
    k = int(p.get("k", 1))
    half = str(p.get("half", "minus"))
    if half in ("minus", "hminus", "-"):
        # (z - i)^-k, pole in the upper half-plane
        return HoloFunction(Pow(Add(Identity(), Const(-1j)), -k), Domain.LowerHalfPlane, f"halfplane_pole(k={k},hminus)")
    if half in ("plus", "hplus", "+"):
        return HoloFunction(Pow(Add(Identity(), Const(1j)), -k), Domain.UpperHalfPlane, f"halfplane_pole(k={k},hplus)")
    raise DomainError(f"unknown half-plane {half!r}")


def _g_halfplane_log(p):
    # a log(-z/i) = a log(iz); iz has positive real part on the lower half-plane
    a = complex(p.get("a", 0.2))
    return HoloFunction(Scale(a, Log(Scale(1j, Identity()))), Domain.LowerHalfPlane, f"halfplane_log(a={a.real:g})")


def _g_cayley_pullback(p):
    inner_name = str(p.get("of", "identity"))
    half = str(p.get("half", "minus"))
    rest = {k: v for k, v in p.items() if k not in ("of", "half")}
    base = gallery(inner_name, rest)
    if base.domain is not Domain.UnitDisk:
        raise DomainError("cayley_pullback needs a disk function")
    if half in ("minus", "hminus", "-"):
        return HoloFunction(Composition(base.expr, Cayley("hminus_to_disk")), Domain.LowerHalfPlane,
                            f"cayley_pullback({base.label},hminus)")
    return HoloFunction(Composition(base.expr, Cayley("hplus_to_disk")), Domain.UpperHalfPlane,
                        f"cayley_pullback({base.label},hplus)")


GALLERY: Dict[str, Callable[[dict], HoloFunction]] = {
    "identity": _g_identity,
    "constant": _g_constant,
    "monomial": _g_monomial,
    "koebe": _g_koebe,
    "log_koebe_prime": _g_log_koebe_prime,
    "log_witness": _g_log_witness,
    "lacunary_phi1": _g_lacunary,
    "logsq_phi1": _g_logsq,
    "mobius": _g_mobius,
    "cayley_pullback": _g_cayley_pullback,
    "halfplane_pole": _g_halfplane_pole,
    "halfplane_log": _g_halfplane_log,
}


def gallery(name: str, params: Optional[dict] = None) -> HoloFunction:
    if name not in GALLERY:
        raise UnknownName(name)
    return GALLERY[name](dict(params or {}))


def parse_function_spec(text: str) -> HoloFunction:
    """Parse ``name:key=val,key=val`` into a gallery function."""
    name, _, rest = text.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise ValueError(f"malformed parameter {item!r}")
            params[key.strip()] = _parse_value(val.strip())
    return gallery(name.strip(), params)


def _parse_value(text: str):
    for conv in (int, float, complex):
        try:
            return conv(text)
        except ValueError:
            pass
    return text
