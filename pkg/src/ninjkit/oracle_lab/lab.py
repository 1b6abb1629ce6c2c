"""Empirical Euclidean laboratory: sampled reach, radial angles and bitangent spheres.

Every routine here assumes a flat ambient space, where normal geodesics are
straight lines.  A surface is one :class:`GraphHypersurface` or a sequence of
them (charts) sharing the same ambient space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import optimize

from ..errors import DomainError, InsufficientSamples, NotFound
from ..kernel import INF, ExtReal
from .graphs import GraphHypersurface, secfund_norms, upward_normals

__all__ = ["lattice_samples", "SurfaceSample", "sample_surface", "ReachSample", "reach_sample",
           "empirical_ninj", "radial_angle_empirical", "BitangentSphere",
           "bitangent_sphere_search"]

Surface = Union[GraphHypersurface, Sequence[GraphHypersurface]]
MIN_WINDOW_SAMPLES = 100
_BLOCK = 1024


def _charts(surface: Surface) -> list[GraphHypersurface]:
    charts = [surface] if isinstance(surface, GraphHypersurface) else list(surface)
    if not charts:
        raise DomainError("surface has no charts", "surface")
    dims = {c.dim for c in charts}
    if len(dims) != 1:
        raise DomainError("charts must share one ambient dimension", "surface")
    return charts


def lattice_samples(m: int, centre, radius: float, n: int, seed: int) -> np.ndarray:
    """About ``n`` points of a cubic lattice inside the ball B(centre, radius) of R^m.

    The lattice is shifted by one uniform random offset drawn from ``seed``,
    which keeps the low discrepancy of the grid while decorrelating runs.
    """
    if n < 1:
        raise DomainError("n must be positive", "n_samples")
    centre = np.asarray(centre, dtype=float).reshape(m)
    ball = math.pi ** (m / 2) / math.gamma(m / 2 + 1)
    h = radius * (ball / n) ** (1.0 / m)
    rng = np.random.default_rng(seed)
    shift = rng.uniform(-0.5, 0.5, size=m) * h
    k = int(math.ceil(radius / h)) + 1
    axis = np.arange(-k, k + 1) * h
    grid = np.stack(np.meshgrid(*([axis] * m), indexing="ij"), axis=-1).reshape(-1, m) + shift
    inside = np.sum(grid * grid, axis=-1) <= radius * radius
    return centre + grid[inside]


@dataclass
class SurfaceSample:
    """Sampled points, upward unit normals and chart labels."""

    base: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    chart: np.ndarray
    secfund_norm: np.ndarray


def sample_surface(surface: Surface, x, window: float, n_samples: int, seed: int) -> SurfaceSample:
    """Sample every chart over the base ball B(x, window).

    ``n_samples`` is per chart; all charts share one shifted lattice.
    """
    charts = _charts(surface)
    m = charts[0].base_dim
    x = np.asarray(x, dtype=float).reshape(m)
    window = float(window)
    if not window > 0:
        raise DomainError("window must be > 0", "window")
    for c in charts:
        if float(np.linalg.norm(x)) + window > c.disc_radius * (1 + 1e-12):
            raise DomainError(f"window {window} around x leaves the disc of chart {c.name!r}",
                              "window")
    parts = []
    for i, c in enumerate(charts):
        B = lattice_samples(m, x, window, n_samples, seed)
        g = c.gradient(B)
        parts.append((B, c.points(B), upward_normals(g), np.full(len(B), i),
                      secfund_norms(c, B)))
    base, pts, nrm, lab, ii = (np.concatenate(z) for z in zip(*parts))
    if len(pts) < MIN_WINDOW_SAMPLES:
        raise InsufficientSamples(f"only {len(pts)} samples in the window "
                                  f"(need {MIN_WINDOW_SAMPLES})", "n_samples")
    return SurfaceSample(base, pts, nrm, lab, ii)


def _rolling_block(P_rows, N_rows, P_all, row_index, sq_all=None):
    # |q - p|^2 and <q - p, nu_p> via matrix products; points are pre-centred
    # by the caller so the cancellation error stays near machine precision.
    if sq_all is None:
        sq_all = np.einsum("ij,ij->i", P_all, P_all)
    sq_rows = np.einsum("ij,ij->i", P_rows, P_rows)
    num = sq_rows[:, None] + sq_all[None, :] - 2.0 * (P_rows @ P_all.T)
    den = 2.0 * np.abs(N_rows @ P_all.T - np.einsum("ij,ij->i", N_rows, P_rows)[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    rho[np.arange(len(P_rows)), row_index] = np.inf
    return rho


@dataclass
class ReachSample:
    """Full pairwise rolling matrix; ``pairwise_rolling[i, j]`` uses the normal at i."""

    points: np.ndarray
    normals: np.ndarray
    pairwise_rolling: np.ndarray
    focal_term: np.ndarray


def reach_sample(surface: Surface, x, window: float, n_samples: int, seed: int = 0) -> ReachSample:
    """Dense version of :func:`empirical_ninj` for small sample sizes."""
    S = sample_surface(surface, x, window, n_samples, seed)
    P = S.points - S.points.mean(axis=0)
    rho = _rolling_block(P, S.normals, P, np.arange(len(P)))
    with np.errstate(divide="ignore"):
        focal = np.where(S.secfund_norm > 0, 1.0 / S.secfund_norm, np.inf)
    return ReachSample(S.points, S.normals, rho, focal)


def empirical_ninj(surface: Surface, x, window: float, n_samples: int, seed: int = 0) -> ExtReal:
    """Reach-style estimate of the normal injectivity radius near x.

    The estimate is the smaller of the focal term min 1/|II| and the pairwise
    rolling term min |q - p|^2 / (2 |<q - p, nu_p>|) over ordered sample
    pairs.  Samples fill the base ball B(x, window) of every chart.  The
    result is INF when neither term is finite.
    """
    S = sample_surface(surface, x, window, n_samples, seed)
    focal = np.inf
    nz = S.secfund_norm > 0
    if nz.any():
        focal = float(np.min(1.0 / S.secfund_norm[nz]))
    best = focal
    P, N = S.points - S.points.mean(axis=0), S.normals
    sq = np.einsum("ij,ij->i", P, P)
    for start in range(0, len(P), _BLOCK):
        stop = min(start + _BLOCK, len(P))
        rho = _rolling_block(P[start:stop], N[start:stop], P, np.arange(start, stop), sq)
        best = min(best, float(rho.min()))
    return INF if best == math.inf else best


def radial_angle_empirical(h: GraphHypersurface, p, q) -> float:
    """Angle at the graph point Q over q between the direction of the segment from p and -nu.

    nu is the unit normal pointing to the side of the graph that contains p.
    """
    p = np.asarray(p, dtype=float).reshape(h.dim)
    q = np.asarray(q, dtype=float).reshape(h.base_dim)
    Q = h.points(q)
    nu = upward_normals(np.atleast_2d(h.gradient(q)))[0]
    if h.contains_base(p[:-1]):
        side = p[-1] - float(h.value(p[:-1]))
    else:
        side = float((p - Q) @ nu)
    if side == 0:
        raise DomainError("p lies on the graph", "p")
    if side < 0:
        nu = -nu
    u = Q - p
    u = u / np.linalg.norm(u)
    w = -nu
    along = float(u @ w)
    across = float(np.linalg.norm(u - along * w))
    return math.atan2(across, along)


@dataclass
class BitangentSphere:
    r0: float
    s: np.ndarray
    centre: np.ndarray
    p: np.ndarray


def bitangent_sphere_search(surface: Surface, p, R: float, step_tol: float = 1e-9,
                            side: float = 1.0, n_samples: int = 4000, seed: int = 0,
                            exclusion: float | None = None) -> BitangentSphere:
    """Shrink the ball tangent at p until it touches the surface at exactly one other point.

    ``p`` is a base point of the first chart.  The centre moves along
    ``side * nu_p`` (nu upward).  Samples within ``exclusion`` (default R/10)
    of p are ignored, since they only see the tangency at p itself.  The
    radius is bisected on the sampled surface to ``step_tol`` and the second
    touching point is then polished by local minimisation of the touching
    radius over its chart.  Ties go to the first sample in chart order.

    Raises NotFound when the ball of radius R meets nothing besides p.
    """
    charts = _charts(surface)
    R = float(R)
    if not R > 0:
        raise DomainError("R must be > 0", "R")
    c0 = charts[0]
    p = np.asarray(p, dtype=float).reshape(c0.base_dim)
    P = c0.points(p)
    nu = float(np.sign(side)) * upward_normals(np.atleast_2d(c0.gradient(p)))[0]
    excl = 0.1 * R if exclusion is None else float(exclusion)

    base, pts, lab = [], [], []
    for i, c in enumerate(charts):
        B = lattice_samples(c.base_dim, np.zeros(c.base_dim), c.disc_radius, n_samples, seed)
        base.append(B)
        pts.append(c.points(B))
        lab.append(np.full(len(B), i))
    base, pts, lab = np.concatenate(base), np.concatenate(pts), np.concatenate(lab)
    keep = np.linalg.norm(pts - P, axis=1) > excl
    base, pts, lab = base[keep], pts[keep], lab[keep]

    def meets(t):
        return bool(np.any(np.linalg.norm(pts - (P + t * nu), axis=1) <= t))

    if len(pts) == 0 or not meets(R):
        raise NotFound(f"the tangent ball of radius {R} meets no other sampled point")
    lo, hi = 0.0, R
    while hi - lo > step_tol:
        mid = 0.5 * (lo + hi)
        if meets(mid):
            hi = mid
        else:
            lo = mid
    first = int(np.argmax(np.linalg.norm(pts - (P + hi * nu), axis=1) <= hi))
    chart, y0 = charts[lab[first]], base[first]

    def touching_radius(y):
        if not chart.contains_base(y):
            return 1e300
        X = chart.points(y)
        v = X - P
        if np.linalg.norm(v) <= excl:
            return 1e300
        a = float(v @ nu)
        return float(v @ v) / (2 * a) if a > 0 else 1e300

    r0, y = touching_radius(y0), y0
    res = optimize.minimize(touching_radius, y0, method="Nelder-Mead",
                            options={"xatol": step_tol, "fatol": 0.1 * step_tol, "maxiter": 4000})
    if res.fun < r0:
        r0, y = float(res.fun), res.x
    return BitangentSphere(r0=r0, s=chart.points(y), centre=P + r0 * nu, p=P)
