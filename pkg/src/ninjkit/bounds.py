"""Explicit bound pipelines: normal injectivity, rolling, slice certificates,
parallel-curvature envelopes, hyperdisc curvature, gradient bounds and the
graphing-radius constant.

Unless stated otherwise ``c`` is a two-sided bound |sec| <= c.  The convex-domain
operations (:func:`lambda_convex_diameter_bound`, :func:`slice_ball_certificate`)
read ``c`` as a lower sectional bound instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import NamedTuple, Sequence

from .errors import ArityError, DegenerateParams, DomainError
from .kernel import (DEFAULT_TOLERANCES, INF, ExtReal, NumericTolerances, atn, comp_radius,
                     ct, ext, ext_min, quadrature, root_find, sn, tn)

__all__ = [
    "CurvatureData", "GradientBoundParams", "GraphingReport", "Envelope", "RollingRadius",
    "ninj_lower_bound", "rolling_radius", "lambda_convex_diameter_bound",
    "slice_ball_certificate", "parallel_curvature_envelope", "hyperdisc_secfund_bound",
    "psi", "alpha", "gradient_bound", "graphing_radius", "submanifold_derivative_bound",
]


def _nonneg(value, name):
    v = float(value)
    if not math.isfinite(v) or v < 0:
        raise DomainError(f"{name} must be finite and >= 0, got {value}", name)
    return v


@dataclass(frozen=True)
class CurvatureData:
    """Bound bundle for one base point.

    lam bounds |II|, big_lambda bounds |grad Riem|; the ExtReal fields default to INF.
    """

    c: float = 0.0
    lam: float = 0.0
    big_lambda: float = 0.0
    s: ExtReal = INF
    conv: ExtReal = INF
    inj: ExtReal = INF
    r: ExtReal = INF
    delta: ExtReal = INF

    def __post_init__(self):
        for name, key in (("c", "c"), ("lam", "lambda"), ("big_lambda", "big_lambda")):
            object.__setattr__(self, name, _nonneg(getattr(self, name), key))
        for name in ("s", "conv", "inj", "r", "delta"):
            object.__setattr__(self, name, ext(getattr(self, name), name))


@dataclass(frozen=True)
class GradientBoundParams:
    c_sigma: float
    c_f: float
    c_g: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "c_sigma", _nonneg(self.c_sigma, "c_sigma"))
        object.__setattr__(self, "c_f", _nonneg(self.c_f, "c_f"))
        cg = float(self.c_g)
        if not (math.isfinite(cg) and cg > 0):
            raise DomainError(f"c_g must be finite and > 0, got {self.c_g}", "c_g")
        object.__setattr__(self, "c_g", cg)

    @property
    def degenerate(self) -> bool:
        return self.c_sigma == 0.0 and self.c_f == 0.0


class RollingRadius(NamedTuple):
    radius: float
    valid: bool


@dataclass(frozen=True)
class Envelope:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"envelope lo={self.lo} exceeds hi={self.hi}")


def _jsonable(v):
    if v is INF:
        return "inf"
    return v


@dataclass(frozen=True)
class GraphingReport:
    """Every intermediate of the graphing-radius pipeline."""

    r0: ExtReal
    r1: ExtReal
    r2: ExtReal
    r3: ExtReal
    r4: ExtReal
    C: ExtReal
    c_sigma: float
    c_f: float
    c_g: float
    alpha: ExtReal
    degenerate: bool

    def to_dict(self) -> dict:
        """Flat JSON-ready mapping; INF becomes the string ``"inf"``."""
        return {k: _jsonable(v) for k, v in asdict(self).items()}


# ---------------------------------------------------------------------------
# Radius bounds and certificates
# ---------------------------------------------------------------------------

def ninj_lower_bound(d: CurvatureData) -> ExtReal:
    """(1/6) min{s, conv, (6/5) R^c_lambda}."""
    if d.s == 0:
        raise DomainError("slice-ball radius s must be > 0", "s")
    if d.conv == 0:
        raise DomainError("convexity radius conv must be > 0", "conv")
    # Scaling each term separately keeps R/5 exact (1.2 R / 6 is not).
    R = comp_radius(d.c, d.lam)
    return ext_min(*(v if v is INF else v / k for v, k in ((d.s, 6.0), (d.conv, 6.0), (R, 5.0))))


def rolling_radius(r: float, c: float, lam: float) -> RollingRadius:
    """Balls of radius r/3 roll freely on both sides when 5r/6 <= R^c_lambda."""
    r = float(r)
    if not r > 0:
        raise DomainError(f"r must be > 0, got {r}", "r")
    c, lam = _nonneg(c, "c"), _nonneg(lam, "lambda")
    return RollingRadius(r / 3.0, bool(5.0 * r / 6.0 <= comp_radius(c, lam)))


def lambda_convex_diameter_bound(c: float, lam: float) -> ExtReal:
    """Diameter bound 2 R^c_lambda for a lambda-convex domain; c is a lower bound."""
    lam = float(lam)
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam}", "lambda")
    return 2.0 * comp_radius(c, lam)


def slice_ball_certificate(r, conv, delta, c: float, lam: float) -> bool:
    """True when r <= min{conv, delta/2} and R^c_lambda <= r/4."""
    r = ext(r, "r")
    conv, delta = ext(conv, "conv"), ext(delta, "delta")
    lam = _nonneg(lam, "lambda")
    if r is INF:
        return False
    return bool(r <= ext_min(conv, delta / 2.0) and comp_radius(c, lam) <= r / 4.0)


# ---------------------------------------------------------------------------
# Curvature estimates
# ---------------------------------------------------------------------------

def parallel_curvature_envelope(c: float, lam: float, t: float,
                                tol: NumericTolerances = DEFAULT_TOLERANCES) -> Envelope:
    """Bounds on the principal curvatures of the parallel hypersurface at signed distance t.

    The bounds are symmetric in t.  The orientation is the one in which a
    unit sphere (lam = 1, c = 0) has curvature -1/(1 - t) on its inner
    parallels, so principal curvatures obey kappa' = -(kappa^2 + K).
    """
    c, lam = _nonneg(c, "c"), _nonneg(lam, "lambda")
    a = abs(float(t))
    R = comp_radius(c, lam)
    if not a < R:
        raise DomainError(f"|t| = {a} must be below the comparison radius {R}", "t")
    lo = 0.0 if R is INF else -ct(c, R - a, tol)
    k = math.sqrt(c)
    if lam > k:
        hi = ct(-c, a + comp_radius(-c, lam), tol)
    elif lam == k:
        hi = k
    else:
        hi = tn(-c, a + atn(-c, lam), tol)
    return Envelope(lo, hi)


def hyperdisc_secfund_bound(c: float, big_lambda: float, s: float,
                            tol: NumericTolerances = DEFAULT_TOLERANCES) -> float:
    """Bound on |II| of the exponential image of a tangent hyperdisc of radius s."""
    c, L = _nonneg(c, "c"), _nonneg(big_lambda, "big_lambda")
    s = float(s)
    if not s > 0:
        raise DomainError(f"s must be > 0, got {s}", "s")
    if c > 0 and s >= math.pi / math.sqrt(c):
        raise DomainError(f"s must be below pi/sqrt(c) = {math.pi / math.sqrt(c)}", "s")
    if c == 0 and L == 0:
        return 0.0
    h = sn(-c, s / 2.0, tol) ** 2
    return (8.0 / 9.0) * s * s * h / sn(c, s, tol) ** 2 * (3.0 * L * h + 4.0 * c * sn(-c, s, tol))


# ---------------------------------------------------------------------------
# Gradient bound
# ---------------------------------------------------------------------------
# psi is integrated after substituting sigma = tan(theta), which maps [0, inf)
# onto [0, pi/2) and turns the integrand into cos/(C^S + C^F cos), bounded.

def _psi_theta(p: GradientBoundParams, theta: float, tol: NumericTolerances) -> float:
    a, b = p.c_sigma, p.c_f
    val = quadrature(lambda u: math.cos(u) / (a + b * math.cos(u)), 0.0, theta,
                     tol.quadrature_tol * p.c_g)
    return val / p.c_g


def _require_nondegenerate(p: GradientBoundParams):
    if p.degenerate:
        raise DegenerateParams("gradient bound needs c_sigma + c_f > 0", "c_sigma")


def psi(p: GradientBoundParams, s: float, tol: NumericTolerances = DEFAULT_TOLERANCES) -> float:
    """(1/C^G) int_0^s dsigma / (C^S (1+sigma^2)^(3/2) + C^F (1+sigma^2))."""
    _require_nondegenerate(p)
    s = float(s)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}", "s")
    if s == math.inf:
        return alpha(p, tol)
    return _psi_theta(p, math.atan(s), tol)


def alpha(p: GradientBoundParams, tol: NumericTolerances = DEFAULT_TOLERANCES) -> float:
    """Horizon lim psi(s) as s -> inf."""
    _require_nondegenerate(p)
    return _psi_theta(p, 0.5 * math.pi, tol)


def _gradient_theta(p: GradientBoundParams, s: float,
                    tol: NumericTolerances) -> float:
    if s == 0:
        return 0.0
    return root_find(lambda th: _psi_theta(p, th, tol) - s, (0.0, 0.5 * math.pi),
                     tol.root_tol)


def gradient_bound(p: GradientBoundParams, s: float,
                   tol: NumericTolerances = DEFAULT_TOLERANCES) -> float:
    """psi^{-1}(s): bound on |grad f| at distance s from the tangency point."""
    _require_nondegenerate(p)
    s = float(s)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}", "s")
    a = alpha(p, tol)
    if s >= a:
        raise DomainError(f"s = {s} must be below the horizon alpha = {a}", "s")
    return math.tan(_gradient_theta(p, s, tol))


# ---------------------------------------------------------------------------
# Graphing radius
# ---------------------------------------------------------------------------

def _crossing_radius(c: float, L: float, hi, tol: NumericTolerances) -> float:
    """Maximiser of s -> min{s, (6/5) R^c_rho(s)} on (0, hi)."""

    def gap(s):
        return s - 1.2 * comp_radius(c, hyperdisc_secfund_bound(c, L, s, tol))

    cap = math.pi / math.sqrt(c) if c > 0 else math.inf
    if hi is not INF and hi < cap:
        if gap(hi) <= 0:
            return float(hi)
        right = float(hi)
    else:
        # The hyperdisc bound blows up at pi/sqrt(c), so the gap turns positive there.
        right = cap * (1.0 - 1e-12)
        if right == math.inf:
            right = 1.0
            while gap(right) <= 0:
                right *= 2.0
    left = right * 1e-6
    while gap(left) >= 0:
        left *= 1e-3
    return root_find(gap, (left, right), tol.root_tol)


def graphing_radius(d: CurvatureData,
                    tol: NumericTolerances = DEFAULT_TOLERANCES) -> GraphingReport:
    """Radius C on which the hypersurface is a normal graph over its tangent hyperdisc.

    Intermediates are recorded in the returned report.  When c = big_lambda = 0
    both curvature constants vanish, the gradient bound is identically 0 and
    the report is flagged ``degenerate`` with r4 = INF and C = r3.
    """
    for name in ("r", "inj", "conv"):
        if getattr(d, name) == 0:
            raise DomainError(f"{name} must be > 0", name)
    c, L = d.c, d.big_lambda
    r0 = ext_min(d.r, d.inj)
    hi = ext_min(r0, math.pi / math.sqrt(c)) if c > 0 else r0
    degenerate_rho = c == 0 and L == 0

    def R_of(s):
        return comp_radius(c, hyperdisc_secfund_bound(c, L, s, tol))

    if degenerate_rho:
        r1 = hi
        r2 = ext_min(r1, d.conv)
        r2 = r2 if r2 is INF else r2 / 6.0
        c_sigma, c_f, c_g = 0.0, 0.0, 1.0
        return GraphingReport(r0=r0, r1=r1, r2=r2, r3=r2, r4=INF, C=r2, c_sigma=c_sigma,
                              c_f=c_f, c_g=c_g, alpha=INF, degenerate=True)

    r1 = _crossing_radius(c, L, hi, tol)
    r2 = ext_min(r1, d.conv, 1.2 * R_of(r1)) / 6.0
    c_sigma = hyperdisc_secfund_bound(c, L, r2, tol)
    c_f = ct(c, 0.8 * R_of(r2), tol)
    c_g = sn(-c, r2, tol) / r2
    p = GradientBoundParams(c_sigma, c_f, c_g)
    a = alpha(p, tol)
    r3 = min(r2, a)
    # r4 = C^G int_0^{r3} psi^{-1}(s) ds.  Substituting s = psi(tan(theta))
    # gives int_0^{theta*} sin/(C^S + C^F cos), whose integrand stays bounded
    # even when r3 reaches the horizon alpha, where psi^{-1} diverges.
    theta_star = 0.5 * math.pi if r3 >= a else _gradient_theta(p, r3, tol)
    r4 = quadrature(lambda u: math.sin(u) / (c_sigma + c_f * math.cos(u)), 0.0, theta_star,
                    tol.quadrature_tol)
    return GraphingReport(r0=r0, r1=r1, r2=r2, r3=r3, r4=r4, C=min(r3, r4), c_sigma=c_sigma,
                          c_f=c_f, c_g=c_g, alpha=a, degenerate=False)


def submanifold_derivative_bound(k: int, ambient_u_bounds: Sequence[float],
                                 secfund_bounds: Sequence[float]) -> float:
    """Bound on |nabla^k_Sigma u| from ambient derivative bounds and |nabla^j II| bounds.

    ``ambient_u_bounds[i - 1]`` bounds |nabla^i u| for i = 1..k and
    ``secfund_bounds[j]`` bounds |nabla^j II| for j = 0..k-2.
    """
    k = int(k)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}", "k")
    if len(ambient_u_bounds) < k:
        raise ArityError(f"need {k} ambient bounds, got {len(ambient_u_bounds)}",
                         "ambient_u_bounds")
    if len(secfund_bounds) < k - 1:
        raise ArityError(f"need {k - 1} second fundamental form bounds, got {len(secfund_bounds)}",
                         "secfund_bounds")
    u = [float(b) for b in ambient_u_bounds]
    total = u[k - 1]
    for l in range(2, k + 1):
        total += math.comb(k, l) * float(secfund_bounds[l - 2]) * u[k - l]
    return total
