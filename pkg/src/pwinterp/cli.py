"""Command-line driver wiring families, criteria, operators and
reconstruction into reproducible experiments.

Subcommands: ``family`` (emit node CSV), ``genfn`` (grid dump of the
generating function and weight), ``check`` (criteria verdict with JSON
report), ``interp`` (reconstruction run), ``kadets`` (perturbation sweep),
``counterexample`` (critical-magnitude quotient growth), and
``alpha-scaling`` (weight-exponent scaling across scaled perturbations).

Exit codes: 0 pass/success, 1 fail, 2 inconclusive, 64 usage error,
65 data error.  Every run is deterministic given its flags, including
seeds; reports embed the full configuration.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import nodes as _nodes
from .genfn import (Exponents, build_generating_function,
                    fit_weight_exponent)
from .criteria import (IntervalFamily, Thresholds, continuous_ap,
                       full_verdict, select_subsequence)
from .hilbert import DiscreteHilbertOperator, probe_norm
from .interp import GridSpec, load_samples, reconstruct

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(ValueError):
    pass


def _parse_family(text: str) -> _nodes.FamilySpec:
    """Family spec grammar: kind[:d[:key=value ...]], e.g. signed:0.25."""
    parts = text.split(":")
    kind = parts[0]
    d = 0.0
    kwargs = {}
    for part in parts[1:]:
        if "=" in part:
            key, val = part.split("=", 1)
            if key == "delta0":
                kwargs["delta0"] = float(val)
            elif key == "seed":
                kwargs["seed"] = int(val)
            else:
                raise UsageError(f"unknown family option {key!r}")
        else:
            d = float(part)
    try:
        return _nodes.FamilySpec(kind, d, **kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _check_p(p: float) -> Exponents:
    if not (1.0 < p < float("inf")):
        raise UsageError(
            "p must satisfy 1 < p < inf: complete interpolating sequences "
            "do not exist for p <= 1 or p = inf"
        )
    return Exponents(p)


def _load_sequence(args) -> _nodes.NodeSequence:
    if getattr(args, "nodes", None):
        return _nodes.load_nodes(args.nodes)
    if getattr(args, "family", None):
        spec = _parse_family(args.family)
        return _nodes.make_family(spec, args.K)
    raise UsageError("provide --nodes FILE or --family SPEC")


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True,
                      default=_json_default) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str | None, header, rows) -> None:
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return v

    if path:
        fh = open(path, "w", newline="", encoding="utf-8")
    else:
        fh = sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    finally:
        if path:
            fh.close()


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_family(args) -> int:
    spec = _parse_family(args.family)
    seq = _nodes.make_family(spec, args.K)
    _nodes.save_nodes(seq, args.output)
    return EXIT_PASS


def _cmd_genfn(args) -> int:
    seq = _load_sequence(args)
    gf = build_generating_function(seq)
    grid = GridSpec.parse(args.grid)
    x = grid.points()
    S = gf.value(x)
    F = gf.weight(x)
    rows = zip(map(float, x), map(float, S.real), map(float, S.imag),
               map(float, F))
    _write_csv(args.output, ["x", "re_S", "im_S", "F"], rows)
    return EXIT_PASS


def _verdict_payload(args, seq, rep) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "command": "check",
            "family": getattr(args, "family", None),
            "nodes": getattr(args, "nodes", None),
            "p": args.p,
            "K": getattr(args, "K", None),
            "xmax": args.xmax,
            "seed": args.seed,
            "thresholds": vars(Thresholds()),
            "node_count": len(seq),
        },
        "report": rep.as_dict(),
    }


def _cmd_check(args) -> int:
    p = _check_p(args.p)
    seq = _load_sequence(args)
    gf = build_generating_function(seq)
    rep = full_verdict(seq, p, gf=gf, x_max=args.xmax)
    payload = _verdict_payload(args, seq, rep)
    if args.with_operator_probe:
        # keep the anchors inside the window quarter where the far-tail
        # series is trusted
        sel = select_subsequence(seq, r=1.0,
                                 j_max=min(256, seq.half_width // 16))
        eps = gf.separation / 10.0
        op = DiscreteHilbertOperator(sel.anchors, sel.anchors + 1j * eps)
        logw = gf.node_derivative_logabs(sel.node_indices)
        w = np.exp(p.p * (logw - np.max(logw)))
        probe = probe_norm(op, w, p, trials=args.probe_trials,
                           seed=args.seed)
        payload["operator_probe"] = {
            "anchor_count": len(sel.anchors),
            "eps": eps,
            "lower_bound": probe.lower_bound,
        }
    _write_json(payload, args.json)
    return {"PASS": EXIT_PASS, "FAIL": EXIT_FAIL}.get(rep.verdict,
                                                      EXIT_INCONCLUSIVE)


def _cmd_interp(args) -> int:
    _check_p(args.p)
    seq = _load_sequence(args)
    gf = build_generating_function(seq)
    samples = load_samples(args.samples)
    grid = GridSpec.parse(args.grid)
    rec = reconstruct(gf, samples, grid)
    rows = zip(map(float, rec.grid), map(float, rec.values.real),
               map(float, rec.values.imag))
    _write_csv(args.output, ["x", "re_f", "im_f"], rows)
    return EXIT_PASS


def _cmd_kadets(args) -> int:
    p = _check_p(args.p)
    boundary = 1.0 / (2.0 * p.p_prime)
    d_values = sorted(float(t) for t in args.d_values.split(","))
    orientations = args.orientations.split(",")
    rows = []
    for orient in orientations:
        sign = {"outward": 1.0, "inward": -1.0}.get(orient)
        if sign is None:
            raise UsageError("orientations are outward,inward")
        verdicts = []
        for d in d_values:
            spec = _nodes.FamilySpec("signed", sign * d)
            seq = _nodes.make_family(spec, args.K)
            rep = full_verdict(seq, p, x_max=args.xmax)
            verdicts.append((d, rep))
        seen_fail = False
        for d, rep in verdicts:
            verdict = rep.verdict
            if verdict == "FAIL":
                seen_fail = True
            elif seen_fail and verdict == "PASS":
                # verdicts may not recover once lost along the sweep
                verdict = "INCONCLUSIVE"
            rows.append((orient, d, verdict, rep.ap_sup, rep.growth_slope,
                         rep.growth_r2, rep.ring_ratio))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": {"command": "kadets", "p": args.p, "K": args.K,
                   "d_values": d_values, "orientations": orientations,
                   "xmax": args.xmax, "boundary": boundary},
        "rows": [
            {"orientation": o, "d": d, "verdict": v, "ap_sup": s,
             "growth_slope": g, "growth_r2": r2, "ring_ratio": rr}
            for (o, d, v, s, g, r2, rr) in rows
        ],
    }
    _write_json(payload, args.json)
    return EXIT_PASS


def _cmd_counterexample(args) -> int:
    p = _check_p(args.p)
    d_crit = 1.0 / (2.0 * p.p_prime)
    X_values = ([float(t) for t in args.x_values.split(",")]
                if args.x_values else [float(2 ** m) for m in range(5, 14)])
    X_values = sorted(X_values)
    x_max = X_values[-1]
    results = {}
    for orient, sign in (("outward", 1.0), ("inward", -1.0)):
        spec = _nodes.FamilySpec("signed", sign * d_crit)
        seq = _nodes.make_family(spec, args.K)
        gf = build_generating_function(seq)
        fit = fit_weight_exponent(gf, 32.0, min(4096.0, x_max, args.K / 10))
        quad = gf.separation / 8.0
        m_min = int(np.round(np.log2(X_values[0])))
        fam = IntervalFamily(x_max=x_max, m_min=m_min,
                             m_max=int(np.round(np.log2(x_max))))
        ap = continuous_ap(lambda x: gf.weight(x) ** p.p, p, fam, quad)
        # origin-anchored quotients at the requested lengths
        idx = [int(np.round(np.log2(X))) - m_min for X in X_values]
        anchored = []
        t = np.log1p(np.asarray(X_values)) ** (p.p - 1.0)
        q = ap.level_max[idx]
        A = np.vstack([t, np.ones_like(t)]).T
        coef, *_ = np.linalg.lstsq(A, q, rcond=None)
        pred = A @ coef
        ss_tot = float(np.sum((q - q.mean()) ** 2))
        r2 = 1.0 - float(np.sum((q - pred) ** 2)) / ss_tot if ss_tot else 1.0
        results[orient] = {
            "d": sign * d_crit,
            "weight_exponent": fit.slope,
            "quotients": [{"X": X, "quotient": float(qq)}
                          for X, qq in zip(X_values, q)],
            "slope_vs_logp": float(coef[0]),
            "r2": r2,
            "ring_ratio": ap.ring_ratio,
        }
    growing = max(results, key=lambda o: results[o]["slope_vs_logp"])
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": {"command": "counterexample", "p": args.p, "K": args.K,
                   "X_values": X_values, "critical_d": d_crit},
        "growing_orientation": growing,
        "orientations": results,
    }
    _write_json(payload, args.json)
    return EXIT_PASS


def _cmd_alpha_scaling(args) -> int:
    spec = _parse_family(args.family)
    if spec.kind == "file":
        raise UsageError("alpha-scaling needs a generated family")
    alphas = [float(t) for t in args.alphas.split(",")]
    base = _nodes.make_family(spec, args.K)
    gf0 = build_generating_function(base)
    base_fit = fit_weight_exponent(gf0, args.fit_min, args.fit_max)
    rows = []
    for alpha in alphas:
        if abs(alpha * spec.d) >= 0.5 and spec.kind in ("alternating",
                                                        "random"):
            raise UsageError("scaled perturbation collapses separation")
        scaled = _nodes.FamilySpec(spec.kind, alpha * spec.d,
                                   delta0=alpha * spec.delta0,
                                   seed=spec.seed)
        if alpha == 0.0:
            scaled = _nodes.FamilySpec("integer")
        seq = _nodes.make_family(scaled, args.K)
        gf = build_generating_function(seq)
        fit = fit_weight_exponent(gf, args.fit_min, args.fit_max)
        rows.append({
            "alpha": alpha,
            "exponent": fit.slope,
            "expected": alpha * base_fit.slope,
            "r2": fit.r2,
        })
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": {"command": "alpha-scaling", "family": args.family,
                   "K": args.K, "alphas": alphas,
                   "fit_range": [args.fit_min, args.fit_max]},
        "base_exponent": base_fit.slope,
        "rows": rows,
    }
    _write_json(payload, args.json)
    return EXIT_PASS


# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="pwinterp",
                     description="complete-interpolating-sequence toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(sp, with_K=True):
        sp.add_argument("--nodes", help="node CSV (header k,re,im)")
        sp.add_argument("--family", help="family spec kind[:d[:key=val]]")
        if with_K:
            sp.add_argument("--K", type=int, default=1 << 15,
                            help="window half-size for generated families")

    sp = sub.add_parser("family", help="emit a generated family as CSV")
    sp.add_argument("--family", required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=_cmd_family)

    sp = sub.add_parser("genfn", help="dump S and F over a grid as CSV")
    add_source(sp)
    sp.add_argument("--grid", required=True, help="xmin:xmax:step")
    sp.add_argument("-o", "--out", "--output", dest="output", default=None)
    sp.set_defaults(func=_cmd_genfn)

    sp = sub.add_parser("check", help="criteria verdict (exit 0/1/2)")
    add_source(sp)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--xmax", type=float, default=None)
    sp.add_argument("--json", default=None, help="write the JSON report here")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--with-operator-probe", action="store_true")
    sp.add_argument("--probe-trials", type=int, default=16)
    sp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("interp", help="reconstruct from samples")
    add_source(sp)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--samples", required=True, help="CSV k,re_a,im_a")
    sp.add_argument("--grid", required=True, help="xmin:xmax:step")
    sp.add_argument("-o", "--out", "--output", dest="output", default=None)
    sp.set_defaults(func=_cmd_interp)

    sp = sub.add_parser("kadets", help="perturbation-magnitude sweep")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--K", type=int, default=1 << 15)
    sp.add_argument("--d-values", default="0.05,0.1,0.2,0.25")
    sp.add_argument("--orientations", default="outward,inward")
    sp.add_argument("--xmax", type=float, default=None)
    sp.add_argument("--json", default=None)
    sp.set_defaults(func=_cmd_kadets)

    sp = sub.add_parser("counterexample",
                        help="critical-magnitude quotient growth")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--K", type=int, default=1 << 15)
    sp.add_argument("--x-values", default=None,
                    help="comma list; default 2^5..2^13")
    sp.add_argument("--json", default=None)
    sp.set_defaults(func=_cmd_counterexample)

    sp = sub.add_parser("alpha-scaling",
                        help="weight-exponent scaling across alpha*delta")
    sp.add_argument("--family", required=True)
    sp.add_argument("--K", type=int, default=1 << 15)
    sp.add_argument("--alphas", default="0.25,0.5,1")
    sp.add_argument("--fit-min", type=float, default=32.0)
    sp.add_argument("--fit-max", type=float, default=2048.0)
    sp.add_argument("--json", default=None)
    sp.set_defaults(func=_cmd_alpha_scaling)

    return parser


def _join_grid_flags(argv):
    """Fold ``--grid -10:10:0.01`` into ``--grid=...`` so the leading dash
    of a negative bound is not read as an option."""
    out = []
    it = iter(argv)
    for token in it:
        if token == "--grid":
            value = next(it, None)
            if value is None:
                out.append(token)
            else:
                out.append(f"--grid={value}")
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_join_grid_flags(argv))
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"pwinterp: error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"pwinterp: data error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
