"""Conformal rescalings g[u] = exp(2u) g: second-fundamental-form transformation,
boundary convexification factor and (quasi-)flatzoomer inequality checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .bounds import Envelope
from .errors import BandError, DomainError, ShapeError

__all__ = [
    "conformal_secfund", "conformal_secfund_inverse", "bump_f", "phi_ab", "upsilon",
    "convexified_range", "conformal_sectional_curvature",
    "ConformalFactor", "Polynomial", "FlatzoomerData", "ExhaustionBands", "Violation",
    "Verdict", "flatzoomer_check", "quasi_flatzoomer_check",
]

BUMP_CUTOFF = 1.0 / 750.0


# ---------------------------------------------------------------------------
# Transformation law and convexification
# ---------------------------------------------------------------------------

def conformal_secfund(ii_g: float, x_norm_sq_g: float, du_nu: float, u: float) -> float:
    """II_{g[u]}(X[u], X[u]) = exp(-u) (II_g(X, X) - du(nu) |X|_g^2), with X[u] = exp(-u) X."""
    if not x_norm_sq_g > 0:
        raise DomainError("|X|^2 must be > 0", "x_norm_sq_g")
    return math.exp(-u) * (ii_g - du_nu * x_norm_sq_g)


def conformal_secfund_inverse(ii_gu: float, x_norm_sq_g: float, du_nu: float, u: float) -> float:
    """Recover II_g(X, X) from II_{g[u]}(X[u], X[u])."""
    if not x_norm_sq_g > 0:
        raise DomainError("|X|^2 must be > 0", "x_norm_sq_g")
    return math.exp(u) * ii_gu + du_nu * x_norm_sq_g


def bump_f(t):
    """exp(-1/t) for t > 1/750 and 0 otherwise (below the cutoff the value underflows anyway)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    big = t > BUMP_CUTOFF
    out[big] = np.exp(-1.0 / t[big])
    return out[()] if out.ndim == 0 else out


def _positive(name, v):
    v = float(v)
    if not v > 0:
        raise DomainError(f"{name} must be > 0, got {v}", name)
    return v


def phi_ab(a: float, b: float, t):
    """Smooth odd step equal to -1 for t <= -b and to 1 for t >= b, with slope 1/(a b^2) at 0."""
    a, b = _positive("a", a), _positive("b", b)
    t = np.asarray(t, dtype=float)
    A = bump_f(a * (t + b))
    B = bump_f(a * (b - t))
    # (A - B)/(A + B) equals 2A/(A + B) - 1 and is exactly odd in floating point.
    out = (A - B) / (A + B)
    return out[()] if np.ndim(out) == 0 else out


def upsilon(lam: float, omega: float, C: float, sd):
    """Convexification factor C - phi_{1/(lam omega^2), omega}(sd) of the signed distance sd."""
    lam, omega = _positive("lambda", lam), _positive("omega", omega)
    return C - phi_ab(1.0 / (lam * omega * omega), omega, sd)


def convexified_range(lam: float, C: float) -> Envelope:
    """Range [0, 2 exp(-C) lam] of II after convexifying a boundary with |II| <= lam."""
    lam = _positive("lambda", lam)
    return Envelope(0.0, 2.0 * math.exp(-C) * lam)


def conformal_sectional_curvature(K: float, u: float, du, hess_u, X, Y) -> float:
    """Sectional curvature of exp(2u) g on span(X, Y) for g-orthonormal X, Y.

    K is the g-sectional curvature; du and hess_u are taken in an orthonormal frame.
    """
    du, H = np.asarray(du, dtype=float), np.asarray(hess_u, dtype=float)
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    half = 0.5 * float(du @ du)

    def h(V):
        return float(V @ H @ V) - float(du @ V) ** 2 + half

    return math.exp(-2.0 * u) * (K - h(X) - h(Y))


# ---------------------------------------------------------------------------
# Flatzoomer checks
# ---------------------------------------------------------------------------

PointEvaluator = Callable[[np.ndarray], np.ndarray]


@dataclass
class ConformalFactor:
    """u with evaluators for |nabla^i u|, i = 1..k, on an (N, dim) array of points."""

    u: PointEvaluator
    derivative_norms: Sequence[PointEvaluator] = ()
    normal_derivative: Optional[PointEvaluator] = None

    @classmethod
    def sampled(cls, u_values, derivative_values=()):
        """Factor known only on a fixed sample set, in sample order."""
        u_values = np.asarray(u_values, dtype=float)
        derivs = [np.asarray(d, dtype=float) for d in derivative_values]
        for d in derivs:
            if d.shape != u_values.shape:
                raise ShapeError("derivative samples must match u samples", "derivative_norms")
            if np.any(d < 0):
                raise DomainError("derivative norms must be nonnegative", "derivative_norms")
        return cls(lambda P: u_values, [(lambda P, d=d: d) for d in derivs])


@dataclass
class Polynomial:
    """Sum of coefficient * prod v_j^e_j over monomials in the k+1 arguments.

    A coefficient may be a scalar or an array with one value per sample.
    """

    monomials: Sequence[tuple[Sequence[int], Union[float, np.ndarray]]]

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.monomials), default=0)

    @property
    def arity(self) -> int:
        return len(self.monomials[0][0]) if self.monomials else 0

    def __call__(self, points, V):
        V = np.asarray(V, dtype=float)
        out = np.zeros(len(V))
        for exps, coef in self.monomials:
            out = out + np.asarray(coef, dtype=float) * np.prod(V ** np.asarray(exps), axis=1)
        return out


@dataclass
class FlatzoomerData:
    alpha: float
    degree: int
    order: int
    P: Callable[[np.ndarray, np.ndarray], np.ndarray]
    u0: Union[float, np.ndarray, PointEvaluator] = -math.inf

    def __post_init__(self):
        self.alpha = _positive("alpha", self.alpha)
        if self.order < 0 or self.degree < 0:
            raise DomainError("order and degree must be nonnegative", "order")
        if isinstance(self.P, Polynomial):
            if self.P.degree > self.degree:
                raise DomainError(f"P has degree {self.P.degree} > {self.degree}", "degree")
            if self.P.monomials and self.P.arity != self.order + 1:
                raise ShapeError(f"P must take {self.order + 1} arguments", "P")

    def u0_values(self, points):
        """Threshold at each sample; an array is taken in sample order."""
        u0 = self.u0(points) if callable(self.u0) else self.u0
        u0 = np.asarray(u0, dtype=float)
        if u0.ndim == 0:
            return np.full(len(points), float(u0))
        if u0.shape != (len(points),):
            raise ShapeError(f"{u0.size} u0 values for {len(points)} samples", "u0")
        return u0


@dataclass
class Violation:
    point: list
    lhs: float
    rhs: float
    margin: float


@dataclass
class Verdict:
    passed: bool
    violations: list = field(default_factory=list)
    vacuous: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "violations": [vars(v) for v in self.violations],
                "vacuous": list(self.vacuous)}


def _arguments(phi_values, u: ConformalFactor, fz: FlatzoomerData, samples):
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    phi = np.asarray(phi_values, dtype=float).reshape(-1)
    if len(phi) != len(samples):
        raise ShapeError(f"{len(phi)} Phi values for {len(samples)} samples", "phi_values")
    if len(u.derivative_norms) < fz.order:
        raise ShapeError(f"need {fz.order} derivative norms, got {len(u.derivative_norms)}",
                         "derivative_norms")
    U = np.asarray(u.u(samples), dtype=float).reshape(-1)
    cols = [U] + [np.asarray(d(samples), dtype=float).reshape(-1)
                  for d in u.derivative_norms[:fz.order]]
    if any(len(col) != len(samples) for col in cols):
        raise ShapeError("evaluators returned the wrong number of values", "u")
    V = np.column_stack(cols)
    rhs = np.exp(-fz.alpha * U) * np.asarray(fz.P(samples, V), dtype=float).reshape(-1)
    active = U > fz.u0_values(samples)
    return samples, phi, rhs, active


def _exceeds(lhs, rhs, rtol):
    return lhs - rhs > rtol * np.maximum(np.abs(lhs), np.abs(rhs))


def _verdict(samples, phi, bound, active, rtol):
    bad = active & _exceeds(phi, bound, rtol)
    violations = [Violation(samples[i].tolist(), float(phi[i]), float(bound[i]),
                            float(bound[i] - phi[i])) for i in np.flatnonzero(bad)]
    vacuous = [int(i) for i in np.flatnonzero(~active)]
    return Verdict(passed=not violations, violations=violations, vacuous=vacuous)


def flatzoomer_check(phi_values, u: ConformalFactor, fz: FlatzoomerData, samples,
                     rtol: float = 1e-12) -> Verdict:
    """Check Phi(u)(x) <= exp(-alpha u(x)) P(x)(u, |nabla u|, ..., |nabla^k u|) at each sample.

    Samples with u <= u0 are listed as vacuous and never violate.  ``rtol``
    absorbs rounding in equality cases.
    """
    samples, phi, rhs, active = _arguments(phi_values, u, fz, samples)
    return _verdict(samples, phi, rhs, active, rtol)


@dataclass
class ExhaustionBands:
    """Index i of the band K_i minus K_(i-1) containing each sample."""

    band_index: Union[Sequence[int], PointEvaluator]

    def indices(self, samples) -> np.ndarray:
        idx = self.band_index(samples) if callable(self.band_index) else self.band_index
        idx = np.asarray(idx)
        if len(idx) != len(samples):
            raise ShapeError(f"{len(idx)} band labels for {len(samples)} samples", "bands")
        if idx.size and (np.any(idx < 0) or not np.all(idx == np.round(idx))):
            raise BandError("band indices must be nonnegative integers", "bands")
        return idx.astype(int)

    def band_samples(self, samples) -> dict[int, np.ndarray]:
        """Sample indices of K_(i+1) minus K_(i-2) for each occupied band i."""
        idx = self.indices(samples)
        present = set(idx.tolist())
        missing = [i for i in range(max(present, default=-1) + 1) if i not in present]
        if missing:
            raise BandError(f"bands {missing} have no samples, so neighbour sups are undefined",
                            "bands")
        return {i: np.flatnonzero(np.abs(idx - i) <= 1) for i in sorted(present)}


def quasi_flatzoomer_check(phi_values, u: ConformalFactor, fz: FlatzoomerData,
                           bands: ExhaustionBands, samples, rtol: float = 1e-12) -> Verdict:
    """Check Phi(u)(x) <= sup of exp(-alpha u) P(...) over the neighbouring bands of x.

    A sample in band i is vacuous unless u > u0 on all of K_(i+1) minus K_(i-2).
    """
    samples, phi, rhs, active = _arguments(phi_values, u, fz, samples)
    idx = bands.indices(samples)
    bound = np.empty(len(samples))
    band_active = np.empty(len(samples), dtype=bool)
    for i, members in bands.band_samples(samples).items():
        here = idx == i
        bound[here] = rhs[members].max()
        band_active[here] = bool(active[members].all())
    return _verdict(samples, phi, bound, band_active, rtol)
