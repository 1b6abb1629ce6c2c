"""Closed-form geometry of the constant-curvature model planes M^2(c)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, UnreachableConfig
from ..kernel import ExtReal

__all__ = ["ModelTriangle", "law_of_cosines_side", "law_of_cosines_angle",
           "geodesic_sphere_exact_ninj", "comparison_angle"]

_SLACK = 1e-9


def _clip_cos(x: float, what: str) -> float:
    if x > 1.0 + _SLACK or x < -1.0 - _SLACK:
        raise UnreachableConfig(f"{what}: cosine {x} outside [-1, 1]")
    return min(1.0, max(-1.0, x))


def law_of_cosines_side(c: float, a: float, b: float, gamma: float) -> float:
    """Side opposite the angle gamma enclosed by sides a and b in M^2(c)."""
    c = float(c)
    if c == 0:
        return math.sqrt(max(0.0, a * a + b * b - 2 * a * b * math.cos(gamma)))
    k = math.sqrt(abs(c))
    a, b = a * k, b * k
    if c > 0:
        x = math.cos(a) * math.cos(b) + math.sin(a) * math.sin(b) * math.cos(gamma)
        return math.acos(_clip_cos(x, "side")) / k
    x = math.cosh(a) * math.cosh(b) - math.sinh(a) * math.sinh(b) * math.cos(gamma)
    return math.acosh(max(1.0, x)) / k


def law_of_cosines_angle(c: float, a: float, b: float, opposite: float) -> float:
    """Angle between sides a and b of a triangle in M^2(c) whose third side is ``opposite``."""
    c = float(c)
    if a <= 0 or b <= 0:
        raise DomainError("adjacent sides must be positive", "side")
    if c == 0:
        x = (a * a + b * b - opposite * opposite) / (2 * a * b)
    else:
        k = math.sqrt(abs(c))
        a, b, e = a * k, b * k, opposite * k
        if c > 0:
            x = (math.cos(e) - math.cos(a) * math.cos(b)) / (math.sin(a) * math.sin(b))
        else:
            x = (math.cosh(a) * math.cosh(b) - math.cosh(e)) / (math.sinh(a) * math.sinh(b))
    return math.acos(_clip_cos(x, "angle"))


@dataclass(frozen=True)
class ModelTriangle:
    """Triangle in M^2(c) given by two sides and their enclosed angle."""

    c: float
    side_a: float
    side_b: float
    gamma: float

    def __post_init__(self):
        if self.side_a <= 0 or self.side_b <= 0:
            raise DomainError("sides must be positive", "side")
        if not 0 <= self.gamma <= math.pi:
            raise DomainError("angle must lie in [0, pi]", "gamma")
        if self.c > 0:
            cap = math.pi / math.sqrt(self.c)
            if self.side_a >= cap or self.side_b >= cap:
                raise DomainError("sides must be shorter than pi/sqrt(c)", "side")

    @property
    def side_c(self) -> float:
        return law_of_cosines_side(self.c, self.side_a, self.side_b, self.gamma)

    def angles(self) -> tuple[float, float, float]:
        """Angles opposite side_a, side_b and side_c."""
        e = self.side_c
        return (law_of_cosines_angle(self.c, self.side_b, e, self.side_a),
                law_of_cosines_angle(self.c, self.side_a, e, self.side_b),
                self.gamma)


def geodesic_sphere_exact_ninj(c: float, rho: float) -> ExtReal:
    """Normal injectivity radius of the geodesic sphere of radius rho in M^n(c)."""
    c, rho = float(c), float(rho)
    if not rho > 0:
        raise DomainError(f"rho must be > 0, got {rho}", "rho")
    if c > 0:
        cap = math.pi / math.sqrt(c)
        if rho >= cap:
            raise DomainError(f"rho must be below pi/sqrt(c) = {cap}", "rho")
        return min(rho, cap - rho)
    return rho


# ---------------------------------------------------------------------------
# Comparison radial angles
# ---------------------------------------------------------------------------
# Lengths are rescaled to curvature +-1 (angles are scale invariant, lam scales
# by 1/k).  The unit normal nu of the model curve always points to p's side.

def _minkowski(a, b):
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _fermi_point(x: float, y: float):
    return np.array([math.cosh(y) * math.cosh(x), math.cosh(y) * math.sinh(x), math.sinh(y)])


def _equidistant_angle(h: float, yp: float, d: float, nu_sign: float) -> float:
    # Fermi coordinates (x along the base geodesic, y signed distance), hyperboloid model.
    ch = (math.cosh(d) + math.sinh(yp) * math.sinh(h)) / (math.cosh(yp) * math.cosh(h))
    u = math.acosh(max(1.0, ch))
    p, q = _fermi_point(0.0, yp), _fermi_point(u, h)
    w = p + _minkowski(p, q) * q  # tangent at q pointing toward p
    dy = np.array([math.sinh(h) * math.cosh(u), math.sinh(h) * math.sinh(u), math.cosh(h)])
    nu = nu_sign * dy
    cos_phi = _minkowski(w, nu) / math.sqrt(_minkowski(w, w))
    return math.acos(_clip_cos(cos_phi, "equidistant angle"))


def _horocycle_angle(d0: float, d: float, nu_up: bool) -> float:
    # Upper half plane, horocycle y = 1 with centre at infinity.
    yp = math.exp(d0) if nu_up else math.exp(-d0)
    x2 = 2 * yp * (math.cosh(d) - 1) - (yp - 1) ** 2
    x = math.sqrt(max(0.0, x2))
    if x == 0.0:
        return 0.0
    a = (x * x + 1 - yp * yp) / (2 * x)
    tangent = np.array([1.0, a - x])  # arriving direction of the arc from p
    minus_nu = np.array([0.0, -1.0 if nu_up else 1.0])
    cos_phi = tangent @ minus_nu / np.linalg.norm(tangent)
    return math.acos(_clip_cos(cos_phi, "horocycle angle"))


def _sphere_angle(c: float, R: float, d0: float, d: float, centre_on_p_side: bool) -> float:
    e = R - d0 if centre_on_p_side else R + d0
    if e < -_SLACK:
        raise UnreachableConfig(f"d0 = {d0} exceeds the sphere radius {R}")
    if e <= 0:
        return 0.0
    if centre_on_p_side:
        reach = e + R
        if c > 0:
            reach = min(reach, 2 * math.pi / math.sqrt(c) - reach)
    else:
        reach = e + R
    if d > reach * (1 + _SLACK):
        raise UnreachableConfig(f"d = {d} exceeds the reachable distance {reach}")
    gamma = law_of_cosines_angle(c, R, d, e)
    return gamma if centre_on_p_side else math.pi - gamma


def comparison_angle(c: float, lam: float, d0: float, d: float) -> float:
    """Radial angle on the model curve S^c_lam seen from p at distance d0, at a point q with d(p, q) = d.

    lam > 0 puts the centre of curvature on p's side; lam < 0 puts it on the
    far side.  The result is the angle between the arriving direction of the
    geodesic from p and minus the normal pointing to p's side.
    """
    c, lam, d0, d = float(c), float(lam), float(d0), float(d)
    if not d0 > 0:
        raise DomainError(f"d0 must be > 0, got {d0}", "d0")
    if d < d0 * (1 - 1e-12):
        raise UnreachableConfig(f"d = {d} is below the distance d0 = {d0} to the curve")
    if d <= d0:
        return 0.0
    if c > 0 and d >= math.pi / math.sqrt(c):
        raise UnreachableConfig("d must be below pi/sqrt(c)")
    if c == 0:
        if lam == 0:
            return math.acos(_clip_cos(d0 / d, "plane angle"))
        return _sphere_angle(0.0, 1.0 / abs(lam), d0, d, lam > 0)
    k = math.sqrt(abs(c))
    if c > 0:
        # Every curve of constant curvature on the sphere is a circle; atan2
        # gives its radius about the centre on p's side (lam <= 0 included).
        return _sphere_angle(c, math.atan2(1.0, lam / k) / k, d0, d, True)
    v = abs(lam) / k
    if v > 1:
        return _sphere_angle(c, math.atanh(1.0 / v) / k, d0, d, lam > 0)
    if v == 1:
        return _horocycle_angle(d0 * k, d * k, lam > 0)
    h = math.atanh(v)
    if lam >= 0:
        return _equidistant_angle(h, h - d0 * k, d * k, -1.0)
    return _equidistant_angle(h, h + d0 * k, d * k, 1.0)
