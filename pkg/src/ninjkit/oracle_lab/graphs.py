"""Hypersurfaces given as graphs over a disc, and their normals and second fundamental forms.

Ambient points are written ``(x_1, ..., x_m, t)`` with the height ``t = f(x)``
last.  Evaluators are vectorised: ``f`` maps an ``(N, m)`` array of base points
to ``(N,)``, ``grad_f`` to ``(N, m)`` and ``hess_f`` to ``(N, m, m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import DomainError

__all__ = [
    "GraphHypersurface", "ProductMetric", "flat_metric", "warped_metric",
    "plane", "sphere_cap", "paraboloid", "quadric", "gaussian_bump", "polynomial",
    "graph_normal", "graph_secfund", "shape_operator", "principal_curvatures",
    "secfund_norms", "upward_normals",
]

Evaluator = Callable[[np.ndarray], np.ndarray]


def _batch(x, m):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[-1] != m:
        raise DomainError(f"base points must have {m} coordinates, got {x.shape[-1]}", "x")
    return x, single


@dataclass
class GraphHypersurface:
    """Graph of ``f`` over the disc of radius ``disc_radius`` in R^(dim-1).

    Missing derivative evaluators fall back to central differences with step
    ``1e-5 * disc_radius``, which costs roughly six digits in the result.
    """

    dim: int
    disc_radius: float
    f: Evaluator
    grad_f: Optional[Evaluator] = None
    hess_f: Optional[Evaluator] = None
    tangent_at_origin: bool = False
    name: str = "graph"

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("ambient dimension must be >= 2", "dim")
        if not self.disc_radius > 0:
            raise DomainError("disc_radius must be > 0", "disc_radius")

    @property
    def base_dim(self) -> int:
        return self.dim - 1

    @property
    def fd_step(self) -> float:
        return 1e-5 * self.disc_radius

    def value(self, x):
        X, single = _batch(x, self.base_dim)
        v = np.asarray(self.f(X), dtype=float).reshape(len(X))
        return v[0] if single else v

    def gradient(self, x):
        X, single = _batch(x, self.base_dim)
        if self.grad_f is not None:
            g = np.asarray(self.grad_f(X), dtype=float).reshape(X.shape)
        else:
            h, m = self.fd_step, self.base_dim
            g = np.empty_like(X)
            for i in range(m):
                e = np.zeros(m)
                e[i] = h
                g[:, i] = (self.value(X + e) - self.value(X - e)) / (2 * h)
        return g[0] if single else g

    def hessian(self, x):
        X, single = _batch(x, self.base_dim)
        m = self.base_dim
        if self.hess_f is not None:
            H = np.asarray(self.hess_f(X), dtype=float).reshape(len(X), m, m)
        else:
            h = self.fd_step
            H = np.empty((len(X), m, m))
            if self.grad_f is not None:
                for i in range(m):
                    e = np.zeros(m)
                    e[i] = h
                    H[:, :, i] = (self.gradient(X + e) - self.gradient(X - e)) / (2 * h)
                H = 0.5 * (H + H.transpose(0, 2, 1))
            else:
                f0 = self.value(X)
                for i in range(m):
                    ei = np.zeros(m)
                    ei[i] = h
                    H[:, i, i] = (self.value(X + ei) - 2 * f0 + self.value(X - ei)) / h ** 2
                    for j in range(i + 1, m):
                        ej = np.zeros(m)
                        ej[j] = h
                        v = (self.value(X + ei + ej) - self.value(X + ei - ej)
                             - self.value(X - ei + ej) + self.value(X - ei - ej)) / (4 * h * h)
                        H[:, i, j] = H[:, j, i] = v
        return H[0] if single else H

    def points(self, x):
        """Ambient points over the base points ``x``."""
        X, single = _batch(x, self.base_dim)
        P = np.column_stack([X, self.value(X)])
        return P[0] if single else P

    def contains_base(self, x, slack: float = 1e-12) -> bool:
        return float(np.linalg.norm(x)) <= self.disc_radius * (1 + slack)


# ---------------------------------------------------------------------------
# Product metrics dt^2 + g_t
# ---------------------------------------------------------------------------

@dataclass
class ProductMetric:
    """Metric dt^2 + g_t on I x N in base coordinates.

    ``g_t(t, x)`` and ``dt_g_t(t, x)`` return m x m matrices.  ``dx_g_t(t, x)``
    returns the array ``D[k, i, j] = d g_ij / d x_k``; when omitted g_t is
    taken to be independent of x.  The leaves have II^t = -(1/2) d_t g_t.
    """

    dim: int
    g_t: Callable[[float, np.ndarray], np.ndarray]
    dt_g_t: Callable[[float, np.ndarray], np.ndarray]
    dx_g_t: Optional[Callable[[float, np.ndarray], np.ndarray]] = None

    def christoffel(self, t: float, x: np.ndarray) -> np.ndarray:
        """Gamma[k, i, j] of the frozen leaf metric g_t at x."""
        m = self.dim - 1
        if self.dx_g_t is None:
            return np.zeros((m, m, m))
        D = np.asarray(self.dx_g_t(t, x), dtype=float)
        ginv = np.linalg.inv(self.g_t(t, x))
        # Gamma_kij = 1/2 g^{kl} (d_i g_lj + d_j g_li - d_l g_ij)
        lower = 0.5 * (np.einsum("ilj->lij", D) + np.einsum("jli->lij", D) - D)
        return np.einsum("kl,lij->kij", ginv, lower)


def flat_metric(dim: int) -> ProductMetric:
    m = dim - 1
    return ProductMetric(dim, lambda t, x: np.eye(m), lambda t, x: np.zeros((m, m)))


def warped_metric(dim: int, rate: float = 1.0) -> ProductMetric:
    """g_t = exp(-2 rate t) delta, whose leaves have II^t = rate * g_t."""
    m = dim - 1
    return ProductMetric(dim, lambda t, x: math.exp(-2 * rate * t) * np.eye(m),
                         lambda t, x: -2 * rate * math.exp(-2 * rate * t) * np.eye(m))


# ---------------------------------------------------------------------------
# Graph families
# ---------------------------------------------------------------------------

def plane(dim: int, height: float = 0.0, disc_radius: float = 1.0,
          slope: Sequence[float] | None = None) -> GraphHypersurface:
    m = dim - 1
    a = np.zeros(m) if slope is None else np.asarray(slope, dtype=float)
    return GraphHypersurface(
        dim, disc_radius,
        f=lambda X: height + X @ a,
        grad_f=lambda X: np.broadcast_to(a, X.shape).copy(),
        hess_f=lambda X: np.zeros((len(X), m, m)),
        tangent_at_origin=height == 0 and not a.any(), name="plane")


def sphere_cap(dim: int, radius: float = 1.0, upper: bool = False,
               disc_radius: float | None = None) -> GraphHypersurface:
    """Lower (default) or upper hemisphere of the sphere of the given radius centred at (0, radius).

    The lower cap is tangent to t = 0 at the origin.
    """
    m, R = dim - 1, float(radius)
    rd = 0.95 * R if disc_radius is None else float(disc_radius)
    if rd >= R:
        raise DomainError("disc_radius must be smaller than the sphere radius", "disc_radius")
    s = 1.0 if upper else -1.0

    def root(X):
        return np.sqrt(R * R - np.sum(X * X, axis=-1))

    def hess(X):
        w = root(X)
        H = np.eye(m)[None] / w[:, None, None] + np.einsum("ni,nj->nij", X, X) / w[:, None, None] ** 3
        return -s * H

    return GraphHypersurface(
        dim, rd,
        f=lambda X: R + s * root(X),
        grad_f=lambda X: -s * X / root(X)[:, None],
        hess_f=hess, tangent_at_origin=not upper,
        name="sphere-cap-upper" if upper else "sphere-cap")


def paraboloid(dim: int, k: float = 1.0, disc_radius: float = 1.0) -> GraphHypersurface:
    m = dim - 1
    return GraphHypersurface(
        dim, disc_radius,
        f=lambda X: 0.5 * k * np.sum(X * X, axis=-1),
        grad_f=lambda X: k * X,
        hess_f=lambda X: np.broadcast_to(k * np.eye(m), (len(X), m, m)).copy(),
        tangent_at_origin=True, name="paraboloid")


def quadric(dim: int, A, b=None, offset: float = 0.0, disc_radius: float = 1.0) -> GraphHypersurface:
    """f(x) = offset + b.x + x.A.x / 2 with symmetric A."""
    m = dim - 1
    A = np.asarray(A, dtype=float)
    A = 0.5 * (A + A.T)
    b = np.zeros(m) if b is None else np.asarray(b, dtype=float)
    return GraphHypersurface(
        dim, disc_radius,
        f=lambda X: offset + X @ b + 0.5 * np.einsum("ni,ij,nj->n", X, A, X),
        grad_f=lambda X: b + X @ A,
        hess_f=lambda X: np.broadcast_to(A, (len(X), m, m)).copy(),
        tangent_at_origin=offset == 0 and not b.any(), name="quadric")


def gaussian_bump(dim: int, amplitude: float, width: float, base: float = 0.0,
                  centre=None, disc_radius: float = 1.0) -> GraphHypersurface:
    """f(x) = base + amplitude * exp(-|x - centre|^2 / width^2); negative amplitude dents downward."""
    m = dim - 1
    x0 = np.zeros(m) if centre is None else np.asarray(centre, dtype=float)
    w2 = float(width) ** 2

    def e(X):
        return amplitude * np.exp(-np.sum((X - x0) ** 2, axis=-1) / w2)

    def hess(X):
        Y = X - x0
        return e(X)[:, None, None] * (4 * np.einsum("ni,nj->nij", Y, Y) / w2 ** 2
                                      - 2 * np.eye(m)[None] / w2)

    return GraphHypersurface(
        dim, disc_radius, f=lambda X: base + e(X),
        grad_f=lambda X: -2 * (X - x0) / w2 * e(X)[:, None], hess_f=hess, name="gaussian-bump")


def polynomial(dim: int, terms, disc_radius: float = 1.0) -> GraphHypersurface:
    """Polynomial graph; ``terms`` is a list of ``(exponents, coefficient)``."""
    m = dim - 1
    parsed = []
    for exps, coef in terms:
        exps = tuple(int(e) for e in exps)
        if len(exps) != m or min(exps) < 0:
            raise DomainError(f"exponent tuple {exps} must have {m} nonnegative entries", "terms")
        parsed.append((np.array(exps), float(coef)))

    def monomial(X, exps):
        return np.prod(X ** exps, axis=-1)

    def f(X):
        return sum((c * monomial(X, e) for e, c in parsed), np.zeros(len(X)))

    def grad(X):
        G = np.zeros_like(X)
        for e, c in parsed:
            for i in range(m):
                if e[i]:
                    d = e.copy()
                    d[i] -= 1
                    G[:, i] += c * e[i] * monomial(X, d)
        return G

    def hess(X):
        H = np.zeros((len(X), m, m))
        for e, c in parsed:
            for i in range(m):
                for j in range(m):
                    d = e.copy()
                    k = d[i]
                    d[i] -= 1
                    k *= d[j]
                    d[j] -= 1
                    if k > 0:
                        H[:, i, j] += c * k * monomial(X, d)
        return H

    return GraphHypersurface(dim, disc_radius, f=f, grad_f=grad, hess_f=hess, name="polynomial")


# ---------------------------------------------------------------------------
# Normal and second fundamental form
# ---------------------------------------------------------------------------

def graph_normal(h: GraphHypersurface, m: ProductMetric, x) -> np.ndarray:
    """Unit normal (d_t - grad f)/sqrt(1 + |grad f|^2) in coordinates (x, t)."""
    x = np.asarray(x, dtype=float)
    t = float(h.value(x))
    df = h.gradient(x)
    grad = np.linalg.solve(m.g_t(t, x), df)
    n = math.sqrt(1.0 + float(df @ grad))
    return np.append(-grad / n, 1.0 / n)


def graph_secfund(h: GraphHypersurface, m: ProductMetric, x, X, Y) -> float:
    """Scalar second fundamental form of the graph with respect to :func:`graph_normal`.

    X and Y are base vectors; the graph tangents are (X, df(X)) and (Y, df(Y)).
    """
    x, X, Y = (np.asarray(v, dtype=float) for v in (x, X, Y))
    t = float(h.value(x))
    df = h.gradient(x)
    g = m.g_t(t, x)
    grad = np.linalg.solve(g, df)
    hess = h.hessian(x) - np.einsum("k,kij->ij", df, m.christoffel(t, x))
    ii_t = -0.5 * np.asarray(m.dt_g_t(t, x), dtype=float)
    n = math.sqrt(1.0 + float(df @ grad))
    xf, yf = float(df @ X), float(df @ Y)
    value = X @ hess @ Y + X @ ii_t @ Y + grad @ ii_t @ (xf * Y + yf * X)
    return float(value) / n


def upward_normals(grad: np.ndarray) -> np.ndarray:
    """Flat-ambient unit normals (-grad f, 1)/sqrt(1 + |grad f|^2) for a batch of gradients."""
    n = np.sqrt(1.0 + np.sum(grad * grad, axis=-1))
    return np.column_stack([-grad / n[:, None], 1.0 / n])


def shape_operator(grad: np.ndarray, hess: np.ndarray) -> np.ndarray:
    """Symmetric matrix of II in an orthonormal tangent frame (flat ambient, upward normal).

    With G = I + df df^T this is G^(-1/2) (Hess f / sqrt(1 + |df|^2)) G^(-1/2).
    """
    grad = np.atleast_2d(grad)
    hess = hess.reshape(len(grad), grad.shape[1], grad.shape[1])
    q = np.sum(grad * grad, axis=-1)
    n = np.sqrt(1.0 + q)
    beta = np.where(q > 0, (1.0 - 1.0 / n) / np.where(q > 0, q, 1.0), 0.0)
    m = grad.shape[1]
    Gm = np.eye(m)[None] - beta[:, None, None] * np.einsum("ni,nj->nij", grad, grad)
    B = hess / n[:, None, None]
    return Gm @ B @ Gm


def principal_curvatures(h: GraphHypersurface, x) -> np.ndarray:
    """Principal curvatures (ascending) of a flat-ambient graph w.r.t. the upward normal."""
    X, single = _batch(x, h.base_dim)
    k = np.linalg.eigvalsh(shape_operator(h.gradient(X), h.hessian(X)))
    return k[0] if single else k


def secfund_norms(h: GraphHypersurface, x) -> np.ndarray:
    """Operator norm |II| at each base point (flat ambient)."""
    k = np.atleast_2d(principal_curvatures(h, np.atleast_2d(x)))
    return np.max(np.abs(k), axis=-1)
