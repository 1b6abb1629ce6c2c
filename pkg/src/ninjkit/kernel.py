"""Extended reals, generalised trigonometric functions and numerical primitives.

Finite values are plain Python floats.  The point at infinity is the singleton
:data:`INF`, which is not a float, so ``min`` chains over radii stay exact and
never depend on IEEE infinity arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

from scipy import integrate, optimize

from .errors import BracketError, DomainError, NoConvergence

__all__ = [
    "INF", "ExtReal", "NumericTolerances", "DEFAULT_TOLERANCES",
    "is_inf", "ext", "ext_min", "reciprocal", "to_float", "parse_ext",
    "sn", "snp", "ct", "act", "tn", "atn", "comp_radius",
    "quadrature", "root_find", "maximize_unimodal",
]


# ---------------------------------------------------------------------------
# Extended nonnegative reals
# ---------------------------------------------------------------------------

class _Infinity:
    """The symbol +inf of the extended nonnegative reals."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("ninjkit.INF")

    def __float__(self):
        return math.inf

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self or _is_number(other):
            return False
        return NotImplemented

    def __le__(self, other):
        if other is self:
            return True
        if _is_number(other):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if _is_number(other):
            return True
        return NotImplemented

    def __ge__(self, other):
        if other is self or _is_number(other):
            return True
        return NotImplemented

    def _scale(self, k):
        if not _is_number(k):
            return NotImplemented
        if k > 0:
            return self
        raise DomainError(f"INF scaled by non-positive factor {k}")

    __mul__ = _scale
    __rmul__ = _scale

    def __truediv__(self, k):
        if not _is_number(k):
            return NotImplemented
        if k > 0:
            return self
        raise DomainError(f"INF divided by non-positive value {k}")

    def __rtruediv__(self, k):
        if not _is_number(k):
            return NotImplemented
        return 0.0

    def __add__(self, k):
        if k is self or _is_number(k):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, k):
        if _is_number(k):
            return self
        raise DomainError("INF - INF is undefined")

    def __rsub__(self, k):
        raise DomainError("finite - INF leaves the nonnegative reals")


INF = _Infinity()
ExtReal = Union[float, _Infinity]


def _is_number(x) -> bool:
    return hasattr(x, "__float__") and not isinstance(x, (_Infinity, bool, str))


def is_inf(x) -> bool:
    return x is INF


def ext(x, name: str = "value") -> ExtReal:
    """Normalise ``x`` to an ExtReal, mapping IEEE +inf to :data:`INF`."""
    if x is INF:
        return INF
    v = float(x)
    if math.isnan(v):
        raise DomainError(f"{name} is NaN", name)
    if v == math.inf:
        return INF
    if v < 0:
        raise DomainError(f"{name} must be nonnegative, got {v}", name)
    return v


def parse_ext(text: str, name: str = "value") -> ExtReal:
    """Parse a flag value; ``inf`` (any case) is infinity."""
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity", "∞"):
        return INF
    try:
        return ext(float(t), name)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"{name}: cannot parse {text!r}", name) from None


def ext_min(*values) -> ExtReal:
    """Minimum with INF above every finite value; INF only if all are INF."""
    if not values:
        raise DomainError("ext_min of an empty sequence")
    finite = [float(v) for v in values if v is not INF]
    return min(finite) if finite else INF


def reciprocal(x) -> ExtReal:
    if x is INF:
        return 0.0
    v = float(x)
    if v < 0:
        raise DomainError(f"reciprocal of negative value {v}")
    return INF if v == 0.0 else 1.0 / v


def to_float(x) -> float:
    """IEEE view of an ExtReal, for numpy and plotting."""
    return math.inf if x is INF else float(x)


# ---------------------------------------------------------------------------
# Tolerances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NumericTolerances:
    quadrature_tol: float = 1e-10
    root_tol: float = 1e-12
    optimize_tol: float = 1e-9
    series_switch: float = 1e-8

    def __post_init__(self):
        for name in ("quadrature_tol", "root_tol", "optimize_tol", "series_switch"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive", name)


DEFAULT_TOLERANCES = NumericTolerances()


# ---------------------------------------------------------------------------
# Generalised trigonometric functions
# ---------------------------------------------------------------------------

def _series(c: float, t: float, tol: NumericTolerances) -> bool:
    return abs(c) * t * t < tol.series_switch


def sn(c: float, t: float, tol: NumericTolerances = DEFAULT_TOLERANCES) -> float:
    """Generalised sine: solution of y'' + c y = 0 with y(0)=0, y'(0)=1."""
    c, t = float(c), float(t)
    if t < 0:
        raise DomainError(f"sn needs t >= 0, got {t}", "t")
    if _series(c, t, tol):
        x = c * t * t
        return t * (1.0 - x / 6.0 + x * x / 120.0 - x ** 3 / 5040.0)
    if c > 0:
        k = math.sqrt(c)
        return math.sin(k * t) / k
    k = math.sqrt(-c)
    return math.sinh(k * t) / k


def snp(c: float, t: float, tol: NumericTolerances = DEFAULT_TOLERANCES) -> float:
    """Derivative of :func:`sn` in t (generalised cosine)."""
    c, t = float(c), float(t)
    if _series(c, t, tol):
        x = c * t * t
        return 1.0 - x / 2.0 + x * x / 24.0 - x ** 3 / 720.0
    if c > 0:
        return math.cos(math.sqrt(c) * t)
    return math.cosh(math.sqrt(-c) * t)


def ct(c: float, t, tol: NumericTolerances = DEFAULT_TOLERANCES) -> float:
    """Generalised cotangent sn'/sn.

    ``t = INF`` is accepted for c <= 0 and returns the limit sqrt(-c).
    """
    c = float(c)
    if t is INF:
        if c > 0:
            raise DomainError("ct(c, inf) is undefined for c > 0", "t")
        return math.sqrt(-c)
    t = float(t)
    if t <= 0:
        raise DomainError(f"ct needs t > 0, got {t}", "t")
    if c > 0 and t >= math.pi / math.sqrt(c):
        raise DomainError(f"ct needs t < pi/sqrt(c) = {math.pi / math.sqrt(c)}, got {t}", "t")
    if _series(c, t, tol):
        x = c * t * t
        return (1.0 - x / 3.0 - x * x / 45.0 - 2.0 * x ** 3 / 945.0) / t
    if c > 0:
        k = math.sqrt(c)
        return k / math.tan(k * t)
    k = math.sqrt(-c)
    return k / math.tanh(k * t)


def act(c: float, v: float) -> ExtReal:
    """Inverse of ct; INF when no finite radius has ct = v."""
    c, v = float(c), float(v)
    if c > 0:
        k = math.sqrt(c)
        # atan2(1, x) is arccot on the principal branch (0, pi).
        return math.atan2(1.0, v / k) / k
    if c == 0:
        return 1.0 / v if v > 0 else INF
    k = math.sqrt(-c)
    if v <= k:
        return INF
    return math.atanh(k / v) / k


def tn(k: float, t: float, tol: NumericTolerances = DEFAULT_TOLERANCES) -> float:
    """Generalised tangent -k sn_k/sn_k'; equals sqrt(-k) tanh(sqrt(-k) t) for k < 0."""
    k, t = float(k), float(t)
    if k > 0 and abs(t) >= math.pi / (2.0 * math.sqrt(k)):
        raise DomainError("tn needs |t| < pi/(2 sqrt(k)) for k > 0", "t")
    sign = -1.0 if t < 0 else 1.0
    a = abs(t)
    return sign * (-k) * sn(k, a, tol) / snp(k, a, tol)


def atn(k: float, v: float) -> float:
    """Inverse of :func:`tn` on its principal branch."""
    k, v = float(k), float(v)
    if k < 0:
        q = math.sqrt(-k)
        if abs(v) >= q:
            raise DomainError(f"atn_{k} needs |v| < {q}, got {v}", "v")
        return math.atanh(v / q) / q
    if k == 0:
        raise DomainError("tn_0 is identically zero and has no inverse", "k")
    q = math.sqrt(k)
    return -math.atan(v / q) / q


def comp_radius(c: float, lam: float) -> ExtReal:
    """Radius R with ct_c(R) = lam of a model sphere, INF if none exists."""
    lam = float(lam)
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}", "lambda")
    return act(c, lam)


# ---------------------------------------------------------------------------
# Numerical primitives (scipy-backed)
# ---------------------------------------------------------------------------

def quadrature(f: Callable[[float], float], a: float, b, tol: float = 1e-10,
               limit: int = 200) -> float:
    """Adaptive Gauss-Kronrod integral of ``f`` over [a, b]; ``b`` may be INF."""
    upper = math.inf if (b is INF or b == math.inf) else float(b)
    out = integrate.quad(f, float(a), upper, epsabs=0.5 * tol, epsrel=1e-13,
                         limit=limit, full_output=1)
    value, err, info = out[0], out[1], out[2]
    if len(out) > 3 and err > tol:
        raise NoConvergence(f"quadrature did not converge: {out[3].splitlines()[0]}",
                            {"estimate": value, "abserr": err, "neval": info.get("neval")})
    return float(value)


def root_find(f: Callable[[float], float], bracket, tol: float = 1e-12,
              maxiter: int = 200) -> float:
    """Brent root of ``f`` inside ``bracket``; the endpoints must straddle zero."""
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if math.isnan(fa) or math.isnan(fb) or (fa > 0) == (fb > 0):
        raise BracketError("bracket does not enclose a sign change",
                           {"a": a, "b": b, "fa": fa, "fb": fb})
    x, res = optimize.brentq(f, a, b, xtol=tol, rtol=8.9e-16, maxiter=maxiter,
                             full_output=True, disp=False)
    if not res.converged:
        raise NoConvergence("root_find exceeded maxiter",
                            {"iterations": res.iterations, "last": x, "flag": res.flag})
    return float(x)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def maximize_unimodal(f: Callable[[float], float], interval, tol: float = 1e-9,
                      maxiter: int = 500):
    """Golden-section search for the maximum of a unimodal ``f``.

    Returns ``(argmax, max)``.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise BracketError("empty interval", {"a": a, "b": b})
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for it in range(maxiter):
        if b - a < tol:
            x = 0.5 * (a + b)
            return x, f(x)
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    raise NoConvergence("maximize_unimodal exceeded maxiter",
                        {"iterations": maxiter, "interval": (a, b)})
