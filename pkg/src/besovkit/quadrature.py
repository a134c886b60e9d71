"""Integration and supremum ladders over the disk and the half-planes.

Every integral is computed on a ladder of shells ``|z| <= 1 - eps`` with
``eps`` running over ``cfg.shell_epsilons``.  Inside each annulus the radial
direction uses a fixed Gauss-Legendre rule and the angular direction uses
Gauss-Legendre panels refined by bisection until the panel error estimate
fits a share of the relative tolerance.  Half-plane integrals are pulled back
to the disk through the Cayley map, so they share the same ladder.

Partial sums are combined with ``math.fsum``, which is exactly rounded and
therefore independent of evaluation order.

The divergence classifier follows one rule for all ladders: the last three
increments must each exceed ``tol_rel * estimate`` and must not shrink by
more than a small jitter factor (:data:`MONOTONE_SLACK`).  Convergent
ladders in this package shrink geometrically (ratio well below 0.95) while
logarithmically divergent ones keep a ratio near one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

Integrand = Callable[[np.ndarray], np.ndarray]

# A non-decreasing increment sequence may dip by this fraction per rung
# before it counts as shrinking (absorbs quadrature jitter).
MONOTONE_SLACK = 0.03

_CHUNK = 200_000


def _default_eps() -> Tuple[float, ...]:
    return tuple(2.0 ** -k for k in range(3, 17))


@dataclass(frozen=True)
class QuadratureConfig:
    tol_rel: float = 1e-8
    shell_epsilons: Tuple[float, ...] = field(default_factory=_default_eps)
    angular_order: int = 8
    max_subdivisions: int = 40
    depth: int = 10
    tol_abs: float = 1e-14
    max_panels: int = 1 << 14

    def __post_init__(self):
        eps = tuple(float(e) for e in self.shell_epsilons)
        object.__setattr__(self, "shell_epsilons", eps)
        if not self.tol_rel > 0:
            raise ValueError("tol_rel must be positive")
        if not eps or any(not 0 < e < 1 for e in eps):
            raise ValueError("shell epsilons must lie in (0, 1)")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("shell epsilons must be strictly decreasing")
        if self.angular_order < 2:
            raise ValueError("angular_order must be at least 2")
        if self.tol_abs < 0 or self.max_panels < 16:
            raise ValueError("tol_abs must be nonnegative and max_panels at least 16")

    @classmethod
    def from_eps_min(cls, eps_min: float = 2.0 ** -16, **kw) -> "QuadratureConfig":
        kmax = int(round(-math.log2(eps_min)))
        return cls(shell_epsilons=tuple(2.0 ** -k for k in range(3, kmax + 1)), **kw)

    @property
    def eps_min(self) -> float:
        return self.shell_epsilons[-1]

    def truncated(self, k_max: int) -> "QuadratureConfig":
        """Same config with the ladder cut at eps = 2^-k_max."""
        eps = tuple(e for e in self.shell_epsilons if e >= 2.0 ** -k_max)
        return replace(self, shell_epsilons=eps)

    def snapshot(self) -> dict:
        return {
            "tol_rel": self.tol_rel,
            "eps_max": self.shell_epsilons[0],
            "eps_min": self.eps_min,
            "rungs": len(self.shell_epsilons),
            "angular_order": self.angular_order,
            "max_subdivisions": self.max_subdivisions,
            "depth": self.depth,
            "tol_abs": self.tol_abs,
            "max_panels": self.max_panels,
        }


@dataclass
class SeminormValue:
    estimate: float
    ladder: List[Tuple[float, float]]
    last_delta_rel: float
    divergent: bool
    tail: float = 0.0
    witness: Optional[complex] = None

    @property
    def finite(self) -> bool:
        return not self.divergent

    def upper_bound(self) -> float:
        """Heuristic upper bound ``estimate * (1 + 10 * last_delta_rel)``."""
        return self.estimate * (1.0 + 10.0 * self.last_delta_rel)

    def increments(self) -> List[float]:
        vals = [v for _, v in self.ladder]
        return [b - a for a, b in zip(vals, vals[1:])]

    def rung(self, k: int) -> float:
        """Ladder value at eps = 2^-k."""
        target = 2.0 ** -k
        for e, v in self.ladder:
            if abs(e - target) <= 1e-15 * target:
                return v
        raise KeyError(k)

    def scaled(self, c: float) -> "SeminormValue":
        return SeminormValue(self.estimate * c, [(e, v * c) for e, v in self.ladder],
                             self.last_delta_rel, self.divergent, self.tail * c, self.witness)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "last_delta_rel": self.last_delta_rel,
            "divergent": self.divergent,
            "tail": self.tail,
            "ladder": [[e, v] for e, v in self.ladder],
        }


def classify(values: Sequence[float], tol_rel: float) -> bool:
    """True when the ladder ``values`` is divergent under the shared rule."""
    if len(values) < 4:
        return False
    est = abs(values[-1])
    inc = [b - a for a, b in zip(values, values[1:])][-3:]
    if any(d <= tol_rel * est for d in inc):
        return False
    return all(inc[i + 1] >= (1.0 - MONOTONE_SLACK) * inc[i] for i in range(2))


def finalize_ladder(ladder: List[Tuple[float, float]], tol_rel: float, extrapolate: bool) -> SeminormValue:
    values = [v for _, v in ladder]
    divergent = classify(values, tol_rel)
    tail = 0.0
    if extrapolate and not divergent and len(values) >= 3:
        d1 = values[-1] - values[-2]
        d0 = values[-2] - values[-3]
        if d1 > 0 and d0 > 0 and d1 < d0:
            rho = d1 / d0
            tail = d1 * rho / (1.0 - rho)
    estimate = values[-1] + tail
    if len(values) >= 2 and estimate != 0:
        ldr = abs(values[-1] - values[-2]) / abs(estimate)
    else:
        ldr = 0.0
    return SeminormValue(float(estimate), list(ladder), float(ldr), bool(divergent), float(tail))


def root_value(v: SeminormValue, p: float) -> SeminormValue:
    """Apply the p-th root to an integral ladder; divergence is inherited."""
    if p == 1:
        return v
    r = lambda x: max(x, 0.0) ** (1.0 / p)
    ladder = [(e, r(x)) for e, x in v.ladder]
    est = r(v.estimate)
    if len(ladder) >= 2 and est != 0:
        ldr = abs(ladder[-1][1] - ladder[-2][1]) / est
    else:
        ldr = 0.0
    return SeminormValue(est, ladder, ldr, v.divergent, est - ladder[-1][1], v.witness)


# ---------------------------------------------------------------------------
# rules


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _evaluate(g: Integrand, z: np.ndarray) -> np.ndarray:
    flat = z.reshape(-1)
    if flat.size <= _CHUNK:
        out = np.asarray(g(flat), dtype=float)
    else:
        out = np.concatenate([np.asarray(g(flat[i:i + _CHUNK]), dtype=float)
                              for i in range(0, flat.size, _CHUNK)])
    return out.reshape(z.shape)


def _breakpoints(eps: Sequence[float]) -> Tuple[List[float], List[int]]:
    """Radii of annulus boundaries and, per rung, the index of its outer radius."""
    radii = [0.0]
    j = 1
    while 2.0 ** -j > eps[0]:
        radii.append(1.0 - 2.0 ** -j)
        j += 1
    rung_index = []
    for e in eps:
        radii.append(1.0 - e)
        rung_index.append(len(radii) - 1)
    return radii, rung_index


def annulus_integral(g: Integrand, ra: float, rb: float, cfg: QuadratureConfig, m0: int = 16) -> float:
    """Integral of ``g`` over ``ra <= |z| <= rb`` (area measure)."""
    n = cfg.angular_order
    xr, wr = gauss_legendre(n + 1)
    xt, wt = gauss_legendre(n)
    r = 0.5 * (rb - ra) * xr + 0.5 * (rb + ra)
    wrr = 0.5 * (rb - ra) * wr * r
    weights = wrr[:, None] * wt[None, :]

    def panels(a, b):
        half = 0.5 * (b - a)
        th = half[:, None] * xt[None, :] + (0.5 * (b + a))[:, None]
        z = r[None, :, None] * np.exp(1j * th[:, None, :])
        vals = _evaluate(g, z)
        return half * (vals * weights[None]).sum(axis=(1, 2))

    edges = 2.0 * math.pi * np.arange(m0 + 1) / m0
    a, b = edges[:-1], edges[1:]
    vals = panels(a, b)
    accepted: List[float] = []
    level = 0
    two_pi = 2.0 * math.pi
    while a.size:
        mid = 0.5 * (a + b)
        left = panels(a, mid)
        right = panels(mid, b)
        fine = left + right
        err = np.abs(fine - vals)
        total = math.fsum(accepted) + math.fsum(fine.tolist())
        budget = max(cfg.tol_rel * abs(total), cfg.tol_abs) * (b - a) / two_pi
        ok = (err <= budget) | (level >= cfg.max_subdivisions) | (2 * a.size > cfg.max_panels)
        accepted.extend(fine[ok].tolist())
        keep = ~ok
        a, b, vals = (np.concatenate([a[keep], mid[keep]]),
                      np.concatenate([mid[keep], b[keep]]),
                      np.concatenate([left[keep], right[keep]]))
        level += 1
    return math.fsum(accepted)


def adaptive_interval(f: Callable[[np.ndarray], np.ndarray], a0: float, b0: float, tol_rel: float,
                      m0: int = 16, n: int = 8, max_levels: int = 40, tol_abs: float = 1e-14,
                      max_panels: int = 1 << 14) -> float:
    """Globally adaptive Gauss-Legendre integral of ``f`` over ``[a0, b0]``."""
    x, w = gauss_legendre(n)

    def panels(a, b):
        half = 0.5 * (b - a)
        t = half[:, None] * x[None, :] + (0.5 * (b + a))[:, None]
        return half * (_evaluate(f, t) * w[None, :]).sum(axis=1)

    edges = a0 + (b0 - a0) * np.arange(m0 + 1) / m0
    a, b = edges[:-1], edges[1:]
    vals = panels(a, b)
    accepted: List[float] = []
    level = 0
    length = b0 - a0
    while a.size:
        mid = 0.5 * (a + b)
        left, right = panels(a, mid), panels(mid, b)
        fine = left + right
        err = np.abs(fine - vals)
        total = math.fsum(accepted) + math.fsum(fine.tolist())
        budget = max(tol_rel * abs(total), tol_abs) * (b - a) / length
        ok = (err <= budget) | (level >= max_levels) | (2 * a.size > max_panels)
        accepted.extend(fine[ok].tolist())
        keep = ~ok
        a, b, vals = (np.concatenate([a[keep], mid[keep]]), np.concatenate([mid[keep], b[keep]]),
                      np.concatenate([left[keep], right[keep]]))
        level += 1
    return math.fsum(accepted)


def integrate_disk(g: Integrand, cfg: QuadratureConfig = QuadratureConfig()) -> SeminormValue:
    """Ladder of integrals of ``g`` over ``|z| <= 1 - eps`` for each shell epsilon."""
    radii, rung_index = _breakpoints(cfg.shell_epsilons)
    pieces = [annulus_integral(g, ra, rb, cfg) for ra, rb in zip(radii, radii[1:])]
    ladder = []
    for e, idx in zip(cfg.shell_epsilons, rung_index):
        ladder.append((e, math.fsum(pieces[:idx])))
    return finalize_ladder(ladder, cfg.tol_rel, extrapolate=True)


# ---------------------------------------------------------------------------
# half-planes


def disk_to_halfplane(zeta: np.ndarray, upper: bool = True) -> np.ndarray:
    w = 1j * (1 + zeta) / (1 - zeta)
    return w if upper else -w


def halfplane_to_disk(z: np.ndarray, upper: bool = True) -> np.ndarray:
    return (z - 1j) / (z + 1j) if upper else (-z - 1j) / (-z + 1j)


def pull_to_disk(g: Integrand, upper: bool = True, jacobian: bool = True) -> Integrand:
    """Disk integrand ``g(K^-1 zeta) |(K^-1)'(zeta)|^2``."""

    def h(zeta):
        z = disk_to_halfplane(zeta, upper)
        v = g(z)
        if jacobian:
            v = v * (4.0 / np.abs(1 - zeta) ** 4)
        return v

    return h


def integrate_box(g: Integrand, box: Tuple[float, float, float, float], n: int = 16, panels: int = 8) -> float:
    """Composite Gauss-Legendre integral over an axis-parallel rectangle ``(x0, x1, y0, y1)``."""
    x0, x1, y0, y1 = box
    x, w = gauss_legendre(n)
    ex = np.linspace(x0, x1, panels + 1)
    ey = np.linspace(y0, y1, panels + 1)
    hx = 0.5 * np.diff(ex)
    hy = 0.5 * np.diff(ey)
    xs = (hx[:, None] * x[None, :] + 0.5 * (ex[1:] + ex[:-1])[:, None]).reshape(-1)
    ys = (hy[:, None] * x[None, :] + 0.5 * (ey[1:] + ey[:-1])[:, None]).reshape(-1)
    wx = (hx[:, None] * w[None, :]).reshape(-1)
    wy = (hy[:, None] * w[None, :]).reshape(-1)
    Z = xs[:, None] + 1j * ys[None, :]
    vals = _evaluate(g, Z)
    return math.fsum((vals * wx[:, None] * wy[None, :]).ravel().tolist())


def integrate_halfplane(g: Integrand, cfg: QuadratureConfig = QuadratureConfig(), upper: bool = True,
                        support: Optional[Tuple[float, float, float, float]] = None) -> SeminormValue:
    """Integral of ``g`` over a half-plane.

    Without ``support`` the integrand is pulled back to the disk through the
    Cayley map (Jacobian ``4/|1 - zeta|^4``) and integrated on the shell
    ladder.  A box ``support`` (x0, x1, y0, y1) bounded away from the real
    axis is integrated directly on the box; a disk rule cannot resolve the
    curved jump of a box indicator to high accuracy.
    """
    if support is not None:
        x0, x1, y0, y1 = support
        if (upper and y0 <= 0) or (not upper and y1 >= 0):
            raise ValueError("support box must lie inside the half-plane")
        val = integrate_box(g, support)
        return SeminormValue(val, [(cfg.eps_min, val)], 0.0, False)
    return integrate_disk(pull_to_disk(g, upper), cfg)


# ---------------------------------------------------------------------------
# suprema


def _domain_map(domain) -> Callable[[np.ndarray], np.ndarray]:
    name = getattr(domain, "value", domain)
    if name == "disk":
        return lambda z: z
    if name == "hplus":
        return lambda z: disk_to_halfplane(z, True)
    if name == "hminus":
        return lambda z: disk_to_halfplane(z, False)
    if name == "ext-disk":
        return lambda z: 1.0 / z
    raise ValueError(f"unknown domain {domain!r}")


def _annulus_sup(h: Integrand, ra: float, rb: float, n_top: int = 3) -> Tuple[float, complex]:
    gap = max(1.0 - rb, 1e-12)
    M = int(min(max(256, 8.0 / gap), 8192))
    radii = np.linspace(ra, rb, 5) if rb > ra else np.array([rb])
    theta = 2.0 * math.pi * np.arange(M) / M
    Z = radii[:, None] * np.exp(1j * theta[None, :])
    with np.errstate(all="ignore"):
        V = _evaluate(h, Z)
    V = np.where(np.isfinite(V), V, -np.inf)
    flat = V.ravel()
    order = np.argsort(-flat, kind="stable")[:n_top]
    best = float(flat[order[0]])
    best_z = complex(Z.ravel()[order[0]])
    dth = 2.0 * math.pi / M
    if not best > 0 or not math.isfinite(best):
        return max(best, 0.0) if math.isfinite(best) else 0.0, best_z
    scale = best  # normalised objective keeps the search scale invariant
    for idx in order:
        i, j = divmod(int(idx), M)
        x0 = np.array([radii[i], theta[j]])

        def neg(x):
            with np.errstate(all="ignore"):
                v = float(_evaluate(h, np.array([x[0] * np.exp(1j * x[1])]))[0])
            return -v / scale if np.isfinite(v) else 0.0

        bounds = [(ra, rb), (theta[j] - 2 * dth, theta[j] + 2 * dth)]
        res = minimize(neg, x0, method="Nelder-Mead", bounds=bounds,
                       options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 600})
        v = float(_evaluate(h, np.array([res.x[0] * np.exp(1j * res.x[1])]))[0])
        if np.isfinite(v) and v > best:
            best = v
            best_z = complex(res.x[0] * np.exp(1j * res.x[1]))
    return best, best_z


def sup_refine(g: Integrand, domain="disk", cfg: QuadratureConfig = QuadratureConfig()) -> SeminormValue:
    """Supremum ladder of a nonnegative function, refined toward the boundary.

    The grid maxima are lower bounds of the true supremum; the witness point
    (in the original domain) is stored on the result.
    """
    phi = _domain_map(domain)
    h = lambda zeta: g(phi(zeta))
    radii, rung_index = _breakpoints(cfg.shell_epsilons)
    best, best_z = -math.inf, 0j
    running = []
    for ra, rb in zip(radii, radii[1:]):
        v, z = _annulus_sup(h, ra, rb)
        if v > best:
            best, best_z = v, z
        running.append(best)
    ladder = [(e, max(running[idx - 1], 0.0)) for e, idx in zip(cfg.shell_epsilons, rung_index)]
    out = finalize_ladder(ladder, cfg.tol_rel, extrapolate=False)
    if best > 0:
        with np.errstate(all="ignore"):
            w = complex(phi(np.array([best_z]))[0])
        out.witness = w if np.isfinite(w) else None
    return out


# ---------------------------------------------------------------------------
# Carleson boxes


def _cell_rule(n: int = 6):
    return gauss_legendre(n)


def _prefix(a: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(a)])


def dyadic_carleson_sup(density: Integrand, domain="disk", depth: int = 10) -> float:
    """Largest Carleson-box mean of ``density`` over dyadic and shifted-dyadic boxes."""
    return max(carleson_level_maxima(density, domain, depth))


def carleson_level_maxima(density: Integrand, domain="disk", depth: int = 10, extra: int = 3,
                          top: int = 3, half_width: int = 2) -> List[float]:
    """Per-level largest mean ``(1/|I|) * integral over the box above I`` over two dyadic families.

    Levels ``j = 0..depth`` are used, together with the copy of each level
    shifted by a third of its interval length.

    On a half-plane, level ``j`` intervals have length ``2^(top - j)`` and lie
    in ``[-L, L]`` with ``L = half_width * 2^top``.  On the disk, level ``j``
    arcs have length ``2 pi 2^-j``, and a window reaches ``min(length, 1)``
    into the disk.

    Box integrals are assembled from horizontal layers of cells aligned with
    every interval edge, so each box is a sum of prefix-sum differences.
    """
    name = getattr(domain, "value", domain)
    x, w = _cell_rule()
    M = depth + extra
    if name in ("hplus", "hminus"):
        sign = 1.0 if name == "hplus" else -1.0
        ell = lambda m: 2.0 ** (top - m)
        L = half_width * 2.0 ** top
        layer_sums = []
        for m in range(M + 1):
            t_lo = ell(m + 1) if m < M else 0.0
            t_hi = ell(m)
            width = ell(m) / 3.0
            ncell = int(round(2 * L / width))
            xe = -L + width * np.arange(ncell + 1)
            xs = (0.5 * width * x[None, :] + 0.5 * (xe[1:] + xe[:-1])[:, None])
            ts = 0.5 * (t_hi - t_lo) * x + 0.5 * (t_hi + t_lo)
            Z = xs[:, :, None] + 1j * sign * ts[None, None, :]
            V = _evaluate(density, Z)
            cell = (V * w[None, :, None] * w[None, None, :]).sum(axis=(1, 2)) * 0.5 * width * 0.5 * (t_hi - t_lo)
            if m == M:
                # the bottom slab reaches down to the axis
                ts2 = 0.5 * ell(M + 1) * x + 0.5 * ell(M + 1)
                Z2 = xs[:, :, None] + 1j * sign * ts2[None, None, :]
                V2 = _evaluate(density, Z2)
                cell = cell + (V2 * w[None, :, None] * w[None, None, :]).sum(axis=(1, 2)) * 0.25 * width * ell(M + 1)
            layer_sums.append(_prefix(cell))
        levels = []
        for j in range(depth + 1):
            best = 0.0
            unit = ell(j) / 3.0
            nunit = int(round(2 * L / unit))
            for s in range(0, nunit - 2):
                if s % 3 == 2:
                    continue
                parts = []
                for m in range(j, M + 1):
                    f = 2 ** (m - j)
                    P = layer_sums[m]
                    parts.append(P[(s + 3) * f] - P[s * f])
                best = max(best, math.fsum(parts) / ell(j))
            levels.append(best)
        return levels

    if name != "disk":
        raise ValueError(f"unsupported domain {domain!r}")
    ell = lambda m: 2.0 * math.pi * 2.0 ** -m
    j0 = 3  # first level whose window is shallower than the whole disk
    layers = [(m, ell(m + 1), ell(m)) for m in range(j0, M + 1)]
    core_width = ell(j0 - 1) / 3.0

    def ring_cells(r_lo, r_hi, width):
        ncell = int(round(2.0 * math.pi / width))
        te = width * np.arange(ncell + 1)
        ths = 0.5 * width * x[None, :] + 0.5 * (te[1:] + te[:-1])[:, None]
        rs = 0.5 * (r_hi - r_lo) * x + 0.5 * (r_hi + r_lo)
        Z = rs[None, None, :] * np.exp(1j * ths[:, :, None])
        V = _evaluate(density, Z) * rs[None, None, :]
        return (V * w[None, :, None] * w[None, None, :]).sum(axis=(1, 2)) * 0.5 * width * 0.5 * (r_hi - r_lo)

    sums = {}
    for m, t_lo, t_hi in layers:
        width = ell(m) / 3.0
        sums[m] = ring_cells(1.0 - t_hi, 1.0 - t_lo, width)
    # bottom slab below the deepest layer reaches the circle
    bottom = ring_cells(1.0 - ell(M + 1), 1.0, ell(M) / 3.0)
    sums[M] = sums[M] + bottom
    core = ring_cells(0.0, 1.0 - ell(j0), core_width)
    prefixes = {m: _prefix(np.concatenate([c, c])) for m, c in sums.items()}
    core_prefix = _prefix(np.concatenate([core, core]))
    levels = []
    for j in range(depth + 1):
        best = 0.0
        n_units = 3 * 2 ** j
        for s in range(n_units):
            if s % 3 == 2:
                continue
            parts = []
            for m in range(max(j, j0), M + 1):
                f = 2 ** (m - j)
                P = prefixes[m]
                parts.append(P[(s + 3) * f] - P[s * f])
            if j < j0:
                f = 2 ** (j0 - 1 - j)
                parts.append(core_prefix[(s + 3) * f] - core_prefix[s * f])
            best = max(best, math.fsum(parts) / ell(j))
        levels.append(best)
    return levels


def carleson_window_mean(density: Integrand, r: float, n: int = 24, panels: int = 12) -> float:
    """``(1/r) * integral of density over the disk window Delta(1, r) ∩ D``.

    Polar coordinates centred at 1: ``zeta = 1 - rho e^{i phi}`` with
    ``|phi| < pi/2`` and ``rho < min(r, 2 cos phi)``.
    """
    x, w = gauss_legendre(n)
    # split phi where the two radial limits cross
    cross = math.acos(min(r / 2.0, 1.0))
    edges = sorted({-math.pi / 2, -cross, cross, math.pi / 2})
    ph_edges = []
    for a, b in zip(edges, edges[1:]):
        ph_edges.extend(np.linspace(a, b, panels + 1)[:-1].tolist())
    ph_edges.append(math.pi / 2)
    ph_edges = np.array(ph_edges)
    total = []
    for a, b in zip(ph_edges[:-1], ph_edges[1:]):
        ph = 0.5 * (b - a) * x + 0.5 * (b + a)
        wp = 0.5 * (b - a) * w
        rho_max = np.minimum(r, 2.0 * np.cos(ph))
        # geometric grading in rho toward the singular centre
        rho_edges = rho_max[:, None] * np.concatenate([[0.0], 2.0 ** np.arange(-30, 1)])[None, :]
        lo, hi = rho_edges[:, :-1], rho_edges[:, 1:]
        rho = 0.5 * (hi - lo)[:, :, None] * x[None, None, :] + 0.5 * (hi + lo)[:, :, None]
        wr = 0.5 * (hi - lo)[:, :, None] * w[None, None, :]
        Z = 1.0 - rho * np.exp(1j * ph)[:, None, None]
        V = _evaluate(density, Z)
        total.append(float(((V * rho * wr).sum(axis=(1, 2)) * wp).sum()))
    return math.fsum(total) / r
