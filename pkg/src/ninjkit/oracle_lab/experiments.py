"""Named oracle experiments and their JSON descriptors.

A descriptor is a mapping with a ``kind`` (``sphere-cap``, ``paraboloid``,
``bump-pair`` or ``custom polynomial``), sampling fields ``window``,
``n_samples`` and ``seed``, optional kind parameters, and optional bound
inputs ``s``, ``conv`` and ``lambda``.  Running it compares the normal
injectivity lower bound against the empirical estimate.
"""

from __future__ import annotations

import math
from typing import Any, Mapping

import numpy as np

from ..bounds import CurvatureData, ninj_lower_bound
from ..errors import DomainError
from ..kernel import INF, ext, to_float
from .graphs import gaussian_bump, paraboloid, polynomial, sphere_cap
from .lab import empirical_ninj, sample_surface

__all__ = ["KINDS", "NAMED_EXPERIMENTS", "DescriptorError", "validate_descriptor",
           "build_surface", "run_experiment"]

KINDS = ("sphere-cap", "paraboloid", "bump-pair", "custom polynomial")


class DescriptorError(ValueError):
    """Malformed experiment descriptor (schema problem, not a domain violation)."""


NAMED_EXPERIMENTS: dict[str, dict[str, Any]] = {
    "unit-sphere-ninj": {"kind": "sphere-cap", "dim": 3, "radius": 1.0, "disc_radius": 0.95,
                         "window": 0.9, "n_samples": 10000, "seed": 0, "s": 10.0,
                         "conv": "inf"},
    "paraboloid-ninj": {"kind": "paraboloid", "dim": 3, "k": 1.0, "disc_radius": 1.0,
                        "window": 0.5, "n_samples": 4000, "seed": 0, "conv": "inf"},
    "bump-pair-ninj": {"kind": "bump-pair", "dim": 3, "amplitude": 0.1, "width": 0.5,
                       "gap": 1.0, "disc_radius": 1.0, "window": 0.6, "n_samples": 2000,
                       "seed": 0, "conv": "inf"},
}

_COMMON = {"kind", "dim", "disc_radius", "window", "n_samples", "seed", "s", "conv", "lambda"}
_EXTRA = {"sphere-cap": {"radius"}, "paraboloid": {"k"},
          "bump-pair": {"amplitude", "width", "gap"}, "custom polynomial": {"terms"}}


def validate_descriptor(desc: Mapping[str, Any]) -> dict[str, Any]:
    if not isinstance(desc, Mapping):
        raise DescriptorError("descriptor must be a JSON object")
    kind = desc.get("kind")
    if kind not in KINDS:
        raise DescriptorError(f"unknown kind {kind!r}; expected one of {KINDS}")
    unknown = set(desc) - _COMMON - _EXTRA[kind]
    if unknown:
        raise DescriptorError(f"unknown descriptor fields {sorted(unknown)}")
    for key in ("window", "n_samples"):
        if key not in desc:
            raise DescriptorError(f"descriptor needs {key!r}")
    if kind == "custom polynomial" and "terms" not in desc:
        raise DescriptorError("custom polynomial descriptor needs 'terms'")
    out = dict(desc)
    try:
        out["dim"] = int(out.get("dim", 3))
        out["window"] = float(out["window"])
        out["n_samples"] = int(out["n_samples"])
        out["seed"] = int(out.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise DescriptorError(f"bad numeric field: {exc}") from None
    return out


def build_surface(desc: Mapping[str, Any]):
    """Charts and default bound inputs (lambda, s) for a validated descriptor."""
    kind, dim = desc["kind"], desc["dim"]
    rd = desc.get("disc_radius")
    if kind == "sphere-cap":
        R = float(desc.get("radius", 1.0))
        return [sphere_cap(dim, R, disc_radius=rd)], 1.0 / R, INF
    if kind == "paraboloid":
        k = float(desc.get("k", 1.0))
        return [paraboloid(dim, k, disc_radius=rd or 1.0)], abs(k), INF
    if kind == "bump-pair":
        a, w, gap = float(desc.get("amplitude", 0.1)), float(desc.get("width", 0.5)), \
            float(desc.get("gap", 1.0))
        if not gap > 2 * a:
            raise DomainError("bump-pair needs gap > 2 * amplitude", "gap")
        rd = rd or 1.0
        charts = [gaussian_bump(dim, a, w, disc_radius=rd),
                  gaussian_bump(dim, -a, w, base=gap, disc_radius=rd)]
        # The apex need not be the most curved point, so lambda is sampled.
        # The slice radius is the apex-to-apex gap.
        return charts, None, gap - 2 * a
    try:
        terms = [(t[:-1], t[-1]) for t in desc["terms"]]
    except (TypeError, IndexError) as exc:
        raise DescriptorError(f"terms must be lists [e_1, ..., e_m, coeff]: {exc}") from None
    return [polynomial(dim, terms, disc_radius=rd or 1.0)], None, None


def run_experiment(desc: Mapping[str, Any]) -> dict[str, Any]:
    """Evaluate ``{bound, empirical, ratio}`` for a descriptor.

    lambda defaults to the closed-form curvature bound of the kind, or to the
    sampled maximum of |II| when none is known.
    """
    d = validate_descriptor(desc)
    charts, lam, s_default = build_surface(d)
    x = np.zeros(d["dim"] - 1)
    if "lambda" in d:
        lam = float(d["lambda"])
    if lam is None:
        S = sample_surface(charts, x, d["window"], d["n_samples"], d["seed"])
        lam = float(np.max(S.secfund_norm))
    s = d.get("s", s_default if s_default is not None else d["window"])
    s = ext(math.inf if s == "inf" else float(s), "s")
    conv = d.get("conv", "inf")
    conv = ext(math.inf if conv == "inf" else float(conv), "conv")
    bound = ninj_lower_bound(CurvatureData(c=0.0, lam=lam, s=s, conv=conv))
    emp = empirical_ninj(charts, x, d["window"], d["n_samples"], d["seed"])
    if emp is INF:
        ratio = 0.0 if bound is not INF else None
    else:
        ratio = to_float(bound) / emp
    return {"bound": bound, "empirical": emp, "ratio": ratio}
