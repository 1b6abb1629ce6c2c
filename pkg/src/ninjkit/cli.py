"""Command-line front end.

Every verb prints one JSON object (or a CSV table) and exits with 0 on
success, 2 when an input violates a precondition (the parameter is named on
stderr) and 1 on I/O or descriptor-schema failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import bounds, conformal
from .errors import DomainError, GeometryError
from .kernel import INF, comp_radius, parse_ext
from .oracle_lab.experiments import NAMED_EXPERIMENTS, DescriptorError, run_experiment

__all__ = ["Command", "build_parser", "parse_command", "run", "main", "VERBS"]

EXIT_OK, EXIT_IO, EXIT_DOMAIN = 0, 1, 2


@dataclass
class Command:
    verb: str
    params: dict[str, Any] = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    sweep: str | None = None


# ---------------------------------------------------------------------------
# Flag conversion
# ---------------------------------------------------------------------------

def _real(params, key, default=None):
    raw = params.get(key)
    if raw is None:
        if default is None:
            raise DomainError(f"--{key} is required", key)
        return default
    try:
        v = float(raw)
    except ValueError:
        raise DomainError(f"--{key}: cannot parse {raw!r} as a number", key) from None
    if math.isnan(v):
        raise DomainError(f"--{key} is NaN", key)
    return v


def _ext(params, key, default="inf"):
    raw = params.get(key)
    return parse_ext(default if raw is None else raw, key)


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise _IOFailure(f"{path} is not valid JSON: {exc}") from None


class _IOFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# Verbs: each maps string params to an ordered output record
# ---------------------------------------------------------------------------

def _comp_radius(p):
    return {"R": comp_radius(_real(p, "c", 0.0), _real(p, "lambda"))}


def _ninj_bound(p):
    d = bounds.CurvatureData(c=_real(p, "c", 0.0), lam=_real(p, "lambda", 0.0),
                             s=_ext(p, "s"), conv=_ext(p, "conv"))
    return {"bound": bounds.ninj_lower_bound(d)}


def _roll(p):
    rr = bounds.rolling_radius(_real(p, "r"), _real(p, "c", 0.0), _real(p, "lambda", 0.0))
    return {"radius": rr.radius, "valid": rr.valid}


def _slice_cert(p):
    if p.get("r") is None:
        raise DomainError("--r is required", "r")
    ok = bounds.slice_ball_certificate(_ext(p, "r"), _ext(p, "conv"), _ext(p, "delta"),
                                       _real(p, "c", 0.0), _real(p, "lambda", 0.0))
    return {"certified": ok}


def _envelope(p):
    env = bounds.parallel_curvature_envelope(_real(p, "c", 0.0), _real(p, "lambda", 0.0),
                                             _real(p, "t"))
    return {"lo": env.lo, "hi": env.hi}


def _hyperdisc(p):
    return {"bound": bounds.hyperdisc_secfund_bound(_real(p, "c", 0.0),
                                                    _real(p, "big_lambda", 0.0), _real(p, "s"))}


def _gradient_bound(p):
    params = bounds.GradientBoundParams(_real(p, "c_sigma", 0.0), _real(p, "c_f", 0.0),
                                        _real(p, "c_g", 1.0))
    return {"alpha": bounds.alpha(params),
            "gradient_bound": bounds.gradient_bound(params, _real(p, "s"))}


def _graphing_radius(p):
    d = bounds.CurvatureData(c=_real(p, "c", 0.0), lam=_real(p, "lambda", 0.0),
                             big_lambda=_real(p, "big_lambda", 0.0), r=_ext(p, "r"),
                             inj=_ext(p, "inj"), conv=_ext(p, "conv"))
    return bounds.graphing_radius(d).to_dict()


def _verify(p):
    if p.get("descriptor"):
        desc = _load_json(p["descriptor"])
    elif p.get("experiment"):
        name = p["experiment"]
        if name not in NAMED_EXPERIMENTS:
            raise DescriptorError(f"unknown experiment {name!r}; known: {sorted(NAMED_EXPERIMENTS)}")
        desc = dict(NAMED_EXPERIMENTS[name])
    else:
        raise DescriptorError("verify needs --experiment or --descriptor")
    if not isinstance(desc, dict):
        raise DescriptorError("descriptor must be a JSON object")
    desc = dict(desc)
    if p.get("samples") is not None:
        desc["n_samples"] = int(_real(p, "samples"))
    if p.get("seed") is not None:
        desc["seed"] = int(_real(p, "seed"))
    return run_experiment(desc)


def _convexify(p):
    lam, C = _real(p, "lambda"), _real(p, "C", 0.0)
    env = conformal.convexified_range(lam, C)
    out = {"lo": env.lo, "hi": env.hi}
    if p.get("ii_g") is not None:
        ii = _real(p, "ii_g")
        if abs(ii) > lam:
            raise DomainError(f"--ii-g must lie in [-lambda, lambda], got {ii}", "ii_g")
        out["value"] = conformal.conformal_secfund(ii, 1.0, -lam, C)
    return out


def _flatzoomer_data(doc):
    try:
        samples = doc["samples"]
        points = np.asarray(samples["points"], dtype=float)
        u_vals = samples["u"]
        derivs = samples.get("derivative_norms", [])
        phi = samples["phi"]
        poly = conformal.Polynomial([(m["exponents"], m["coeff"]) for m in doc["P"]["monomials"]])
        u0 = doc.get("u0", "-inf")
        u0 = -math.inf if u0 in ("-inf", None) else (np.asarray(u0, dtype=float)
                                                 if isinstance(u0, list) else float(u0))
        fz_args = dict(alpha=float(doc["alpha"]), degree=int(doc["degree"]),
                       order=int(doc["order"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DescriptorError(f"malformed flatzoomer data: {exc!r}") from None
    fz = conformal.FlatzoomerData(P=poly, u0=u0, **fz_args)
    factor = conformal.ConformalFactor.sampled(u_vals, derivs)
    return points, phi, factor, fz, samples.get("bands")


def _flatzoomer_check(p):
    if not p.get("data"):
        raise DescriptorError("flatzoomer-check needs --data")
    points, phi, factor, fz, bands = _flatzoomer_data(_load_json(p["data"]))
    if p.get("quasi"):
        if bands is None:
            raise DescriptorError("--quasi needs samples.bands in the data file")
        verdict = conformal.quasi_flatzoomer_check(phi, factor, fz,
                                                   conformal.ExhaustionBands(bands), points)
    else:
        verdict = conformal.flatzoomer_check(phi, factor, fz, points)
    return verdict.to_dict()


# name -> (handler, flags, sweepable)
VERBS: dict[str, tuple[Callable, tuple[str, ...], bool]] = {
    "comp-radius": (_comp_radius, ("c", "lambda"), True),
    "ninj-bound": (_ninj_bound, ("s", "conv", "c", "lambda"), True),
    "roll": (_roll, ("r", "c", "lambda"), True),
    "slice-cert": (_slice_cert, ("r", "conv", "delta", "c", "lambda"), True),
    "envelope": (_envelope, ("c", "lambda", "t"), True),
    "hyperdisc": (_hyperdisc, ("c", "big-lambda", "s"), True),
    "gradient-bound": (_gradient_bound, ("c-sigma", "c-f", "c-g", "s"), True),
    "graphing-radius": (_graphing_radius, ("r", "c", "lambda", "big-lambda", "inj", "conv"), True),
    "verify": (_verify, ("experiment", "descriptor", "samples", "seed"), False),
    "convexify": (_convexify, ("lambda", "C", "ii-g"), True),
    "flatzoomer-check": (_flatzoomer_check, ("data",), False),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ninjkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")
    for verb, (_, flags, sweepable) in VERBS.items():
        sp = sub.add_parser(verb)
        for flag in flags:
            sp.add_argument(f"--{flag}", dest=flag.replace("-", "_"), default=None)
        if verb == "flatzoomer-check":
            sp.add_argument("--quasi", action="store_true",
                            help="check the band-wise inequality using samples.bands")
        if sweepable:
            sp.add_argument("--sweep", default=None, metavar="NAME=START:STOP:NUM",
                            help="evaluate over a linspace of one numeric flag")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", default=None, help="write to this path instead of stdout")
    return parser


def parse_command(argv) -> Command:
    ns = vars(build_parser().parse_args(argv))
    verb = ns.pop("verb")
    output, fmt, sweep = ns.pop("output"), ns.pop("format"), ns.pop("sweep", None)
    params = {k: v for k, v in ns.items() if v is not None and v is not False}
    return Command(verb, params, output, fmt, sweep)


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------

def _plain(v):
    if v is INF:
        return "inf"
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def _to_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True) + "\n"


def _to_csv(rows) -> str:
    buf = io.StringIO()
    keys = list(rows[0])
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for row in rows:
        w.writerow([json.dumps(_plain(row[k])) if isinstance(row[k], (dict, list))
                    else _plain(row[k]) for k in keys])
    return buf.getvalue()


def _sweep_values(text: str):
    try:
        name, rng = text.split("=", 1)
        start, stop, num = rng.split(":")
        values = np.linspace(float(start), float(stop), int(num))
    except ValueError:
        raise DomainError(f"--sweep expects NAME=START:STOP:NUM, got {text!r}", "sweep") from None
    return name.replace("-", "_"), values


def _evaluate(cmd: Command):
    handler, flags, _ = VERBS[cmd.verb]
    if not cmd.sweep:
        return handler(dict(cmd.params)), None
    name, values = _sweep_values(cmd.sweep)
    if name not in {f.replace("-", "_") for f in flags}:
        raise DomainError(f"--sweep parameter {name!r} is not a flag of {cmd.verb}", "sweep")
    rows = []
    for v in values:
        params = dict(cmd.params)
        params[name] = repr(float(v))
        rows.append({name: float(v), **handler(params)})
    return None, rows


def run(cmd: Command) -> tuple[int, str, str]:
    """Execute a command; returns (exit status, stdout text, stderr text)."""
    if cmd.verb not in VERBS:
        return EXIT_IO, "", _to_json({"error": f"unknown verb {cmd.verb!r}"})
    try:
        record, rows = _evaluate(cmd)
    except DomainError as exc:
        return EXIT_DOMAIN, "", _to_json({"error": str(exc), "param": exc.param})
    except (DescriptorError, _IOFailure) as exc:
        return EXIT_IO, "", _to_json({"error": str(exc)})
    except GeometryError as exc:
        return EXIT_DOMAIN, "", _to_json({"error": str(exc), "param": None})
    if cmd.format == "csv":
        text = _to_csv(rows if rows is not None else [record])
    else:
        text = _to_json(rows if rows is not None else record)
    if cmd.output:
        try:
            with open(cmd.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            return EXIT_IO, "", _to_json({"error": f"cannot write {cmd.output}: {exc.strerror}"})
        return EXIT_OK, "", ""
    return EXIT_OK, text, ""


def main(argv=None) -> int:
    cmd = parse_command(sys.argv[1:] if argv is None else argv)
    status, out, err = run(cmd)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())
