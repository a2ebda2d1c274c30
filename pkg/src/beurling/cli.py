"""Command line front end.

Exit codes: 0 success, 1 error, 2 success that needed a scaling constant or
rests on window estimates.  Every command prints its JSON report to stdout
and, with ``--out``, writes the same JSON plus CSV curves into that directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import annulus_fourier as af
from .errors import BeurlingError, InvalidInputError, NotInvertibleOnCircle, NotInvertibleOnLine
from .operator_decay import BlockOperator, inverse_decay_check
from .seq_algebra import MatSeq
from .weights_r import (
    WeightR,
    check_amaw_r,
    check_submultiplicative_r,
    construct_nu_real_L1,
    construct_nu_real_Lp,
    grid,
    rho_bounds_r,
)
from .weights_z import (
    WeightZ,
    check_amaw,
    check_submultiplicative,
    construct_nu_p_gt_1,
    construct_nu_p_le_1,
    rho_bounds,
    weight_from_dict,
)
from .wiener_engine import invert_on_circle, invert_real_line

EXIT_OK, EXIT_ERROR, EXIT_FLAGGED = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    weight: Optional[str] = None
    sequence: Optional[str] = None
    operator: Optional[str] = None
    samples: Optional[str] = None
    p: float = 1.0
    q: Optional[float] = None
    gamma: float = 0.5
    epsilon: float = af.DEFAULT_EPSILON
    grid: int = af.DEFAULT_M
    window: Optional[int] = None
    r1: Optional[float] = None
    r2: Optional[float] = None
    out: Optional[str] = None
    force_estimates: bool = False

    def validate(self):
        if not self.p > 0:
            raise InvalidInputError("--p must be > 0")
        if self.q is not None and not self.q > 1:
            raise InvalidInputError("--q must be > 1")
        if not 0 < self.gamma < 1:
            raise InvalidInputError("--gamma must lie in (0, 1)")
        if not self.epsilon > 0:
            raise InvalidInputError("--epsilon must be > 0")
        af._check_M(self.grid)
        if self.window is not None and self.window < 1:
            raise InvalidInputError("--window must be >= 1")
        need = {
            "weight-check": ("weight",),
            "construct-nu": ("weight",),
            "invert": ("weight", "sequence"),
            "invert-real": ("weight", "samples"),
            "matrix-decay": ("weight", "operator"),
        }[self.command]
        for name in need:
            if getattr(self, name) is None:
                raise InvalidInputError(f"{self.command} needs --{name}")
        if self.command == "invert-real" and self.p < 1:
            raise InvalidInputError("invert-real needs --p >= 1")
        return self


# -- io helpers


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(float(obj.real)), _clean(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InvalidInputError(f"{path}: {exc.strerror}") from None


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v) for v in row])


class _Emitter:
    def __init__(self, out):
        self.out = out
        if out:
            os.makedirs(out, exist_ok=True)

    def json(self, name, obj):
        text = dumps(obj)
        if self.out:
            with open(os.path.join(self.out, name), "w", encoding="utf-8") as fh:
                fh.write(text)
        sys.stdout.write(text)

    def csv(self, name, header, rows):
        if self.out:
            _write_csv(os.path.join(self.out, name), header, rows)


def _weight(cfg):
    w = weight_from_dict(_load_json(cfg.weight))
    if cfg.window is not None and isinstance(w, WeightZ):
        w = w.with_window(cfg.window)
    return w


# -- commands


def cmd_weight_check(cfg, em):
    w = _weight(cfg)
    q = 2.0 if cfg.q is None else cfg.q
    if isinstance(w, WeightR):
        rho = rho_bounds_r(w)
        excess, pair = check_submultiplicative_r(w)
        sub = {"max_excess": excess, "argmax": list(pair), "passes": excess <= 1e-9}
        amaw = check_amaw_r(w, q)
        admissible = abs(rho.rho1) <= 1e-9 and abs(rho.rho2) <= 1e-9
    else:
        rho = rho_bounds(w)
        sub = check_submultiplicative(w).to_dict()
        amaw = check_amaw(w, q)
        admissible = abs(rho.rho1 - 1) <= 1e-9 and abs(rho.rho2 - 1) <= 1e-9
    em.json("weight_check.json", {
        "command": "weight-check",
        "weight": w.to_dict(),
        "rho": rho.to_dict(),
        "admissible": admissible,
        "submultiplicative": sub,
        "amaw": amaw.to_dict(),
    })
    return EXIT_OK if amaw.passes_strict and rho.exact else EXIT_FLAGGED


def cmd_construct_nu(cfg, em):
    w = _weight(cfg)
    real = isinstance(w, WeightR)
    rho = rho_bounds_r(w) if real else rho_bounds(w)
    r1 = rho.rho1 if cfg.r1 is None else cfg.r1
    r2 = rho.rho2 if cfg.r2 is None else cfg.r2
    force = cfg.force_estimates
    if cfg.p <= 1:
        nu = construct_nu_real_L1(w, r1, r2, force) if real else construct_nu_p_le_1(w, r1, r2, force)
    else:
        q = cfg.q if cfg.q is not None else cfg.p / (cfg.p - 1.0)
        if real:
            nu = construct_nu_real_Lp(w, r1, r2, cfg.gamma, q, force)
        else:
            nu = construct_nu_p_gt_1(w, r1, r2, cfg.gamma, q, force)
    em.json("nu.json", {"command": "construct-nu", "p": cfg.p, "nu": nu.to_dict(), "certified": nu.certified})
    if real:
        xs = grid(1.0 / 8, min(w.effective_half_length(), nu.weight.effective_half_length()))
        em.csv("nu.csv", ["x", "nu", "omega"], zip(xs, nu(xs), w(xs)))
    else:
        N = min(w.effective_window(), nu.weight.effective_window())
        ns = np.arange(-N, N + 1)
        em.csv("nu.csv", ["n", "nu", "omega"], zip(ns, nu(ns), w(ns)))
    return EXIT_FLAGGED if nu.estimated else EXIT_OK


def invert_rows(g, nu, p):
    """``(n, ||g(n)||, nu(n), running sum)`` ordered by ``(|n|, n)``."""
    order = sorted(zip(g.support, g.norms()), key=lambda t: (abs(t[0]), t[0]))
    wt = nu.weight
    lim = wt.domain_limit()
    rows, acc = [], 0.0
    for n, a in order:
        if lim is not None and abs(n) > lim:
            break
        v = float(wt(np.array([n]))[0])
        acc += a ** p * v ** p
        rows.append((n, float(a), v, acc))
    return rows


def cmd_invert(cfg, em):
    w = _weight(cfg)
    f = MatSeq.from_dict(_load_json(cfg.sequence))
    rep = invert_on_circle(f, w, cfg.p, cfg.grid, cfg.epsilon, cfg.gamma, cfg.force_estimates)
    d = rep.to_dict()
    d["command"] = "invert"
    em.json("invert.json", d)
    em.csv("invert.csv", ["n", "norm_g", "nu", "partial_sum"], invert_rows(rep.g, rep.nu, cfg.p))
    em.csv("annulus.csv", ["r", "margin"], rep.annulus.margin_fn)
    return EXIT_FLAGGED if rep.nu.estimated else EXIT_OK


def _load_samples(path):
    d = _load_json(path)
    try:
        h = float(d["step"])
        re = np.asarray(d["values"] if "values" in d else d["re"], dtype=float)
        im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed samples document: {exc}") from None
    return re + 1j * im, h


def cmd_invert_real(cfg, em):
    w = _weight(cfg)
    if not isinstance(w, WeightR):
        raise InvalidInputError("invert-real needs a weight with \"domain\": \"R\"")
    f, h = _load_samples(cfg.samples)
    rep = invert_real_line(f, w, cfg.p, h, cfg.epsilon, cfg.gamma, cfg.force_estimates)
    d = rep.to_dict()
    d["command"] = "invert-real"
    em.json("invert_real.json", d)
    gn = np.linalg.norm(rep.g, ord=2, axis=(1, 2)) if rep.g.shape[1] > 1 else np.abs(rep.g[:, 0, 0])
    lim = rep.nu.weight.effective_half_length()
    keep = np.abs(rep.x) <= lim
    em.csv("invert_real.csv", ["x", "norm_g", "nu"], zip(rep.x[keep], gn[keep], rep.nu(rep.x[keep])))
    return EXIT_FLAGGED if rep.nu.estimated else EXIT_OK


def cmd_matrix_decay(cfg, em):
    w = _weight(cfg)
    op = BlockOperator.from_dict(_load_json(cfg.operator))
    rep = inverse_decay_check(op, w, cfg.p, cfg.epsilon, cfg.r1, cfg.r2, cfg.grid, cfg.gamma, cfg.force_estimates)
    d = rep.to_dict()
    d["command"] = "matrix-decay"
    em.json("matrix_decay.json", d)
    em.csv("decay_omega.csv", ["k", "d_A", "weight", "term"], rep.profile_omega.rows())
    em.csv("decay_nu.csv", ["k", "d_A", "weight", "term"], rep.profile_nu.rows())
    return EXIT_FLAGGED if rep.nu.estimated else EXIT_OK


COMMANDS = {
    "weight-check": cmd_weight_check,
    "construct-nu": cmd_construct_nu,
    "invert": cmd_invert,
    "invert-real": cmd_invert_real,
    "matrix-decay": cmd_matrix_decay,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="beurling", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--weight", help="weight spec (JSON file)")
        sp.add_argument("--p", type=float, default=1.0)
        sp.add_argument("--q", type=float, default=None)
        sp.add_argument("--gamma", type=float, default=0.5)
        sp.add_argument("--epsilon", type=float, default=af.DEFAULT_EPSILON)
        sp.add_argument("--grid", type=int, default=af.DEFAULT_M, metavar="M")
        sp.add_argument("--window", type=int, default=None, metavar="N")
        sp.add_argument("--out", default=None, metavar="DIR")
        sp.add_argument("--force-estimates", action="store_true")
        sp.add_argument("--r1", type=float, default=None)
        sp.add_argument("--r2", type=float, default=None)
        if name == "invert":
            sp.add_argument("--sequence", required=True, help="MatSeq JSON file")
        if name == "invert-real":
            sp.add_argument("--samples", required=True, help="sampled function JSON file")
        if name == "matrix-decay":
            sp.add_argument("--operator", required=True, help="BlockOperator JSON file")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command, weight=args.weight,
        sequence=getattr(args, "sequence", None), operator=getattr(args, "operator", None),
        samples=getattr(args, "samples", None), p=args.p, q=args.q, gamma=args.gamma,
        epsilon=args.epsilon, grid=args.grid, window=args.window, r1=args.r1, r2=args.r2,
        out=args.out, force_estimates=args.force_estimates,
    )
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg, _Emitter(cfg.out))
    except NotInvertibleOnCircle as exc:
        sys.stderr.write(dumps({"error": str(exc), "worst_node": exc.node, "margin": exc.margin}))
        return EXIT_ERROR
    except NotInvertibleOnLine as exc:
        sys.stderr.write(dumps({"error": str(exc), "worst_frequency": exc.frequency, "margin": exc.margin}))
        return EXIT_ERROR
    except BeurlingError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
