"""Command-line front end.

Every subcommand resolves its settings as defaults < JSON config file <
explicit flags, validates them, runs, prints numbers with 12 significant
digits and, when an output directory is known (``--out`` or the
``SQFNLAB_OUTPUT_DIR`` environment variable), writes a JSON report and a
CSV table. Exit codes: 0 success, 2 invalid input, 3 quadrature did not
converge (partial output still printed).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import experiments as ex
from . import funcspace as fs
from . import martingale as mg
from . import sqfn
from .differences import delta, delta2
from .errors import NoConvergence, SqfnError
from .quadrature import QuadratureSpec

OUTPUT_ENV = "SQFNLAB_OUTPUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_NOCONV = 0, 2, 3


class ConfigError(SqfnError, ValueError):
    pass


def fmt(v):
    return format(float(v), ".12g")


# ---------------------------------------------------------------------------
# value parsers


def floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def int_range(text):
    """``a:b`` (inclusive) or a comma list of integers."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    text = str(text)
    if ":" in text:
        a, b = text.split(":")
        return list(range(int(a), int(b) + 1))
    return [int(v) for v in text.split(",")]


def grid_spec(text):
    """``a:b:n`` -> n midpoints of [a, b]."""
    if isinstance(text, (list, tuple)):
        a, b, n = text
    else:
        a, b, n = str(text).split(":")
    return ex.uniform_grid(float(a), float(b), int(n))


def point(text):
    vals = floats(text)
    if len(vals) != 2:
        raise ConfigError(f"expected a planar point 'a,b', got {text!r}")
    return np.array(vals)


def sectors(text):
    """``a:b,c:d`` angle intervals in radians; ``full`` for the whole circle."""
    if text == "full":
        return [(0.0, 2.0 * math.pi)]
    out = []
    for part in str(text).split(","):
        a, b = part.split(":")
        out.append((float(a), float(b)))
    return out


# ---------------------------------------------------------------------------
# option tables: name -> (parser, default, help)

QUAD_OPTIONS = {
    "nodes": (int, None, "Gauss-Legendre nodes per axis on the first pass"),
    "tol": (float, None, "relative refinement tolerance"),
    "max_levels": (int, None, "node doublings allowed"),
    "max_bands": (int, None, "dyadic band cap when integrating to height 0"),
    "lenient": (bool, False, "flag non-convergence instead of stopping"),
}

COMMON = {
    "threads": (int, None, "parallel workers (default: available cores)"),
    "out": (str, None, f"output directory (default: ${OUTPUT_ENV})"),
    **QUAD_OPTIONS,
}

COMMANDS = {
    "eval": {
        "f": (str, "square", "function id, e.g. square, affine:2, weierstrass:2,40, csv:path"),
        "x": (float, 0.0, "evaluation point"),
    },
    "delta": {
        "f": (str, "square", "function id"),
        "x": (float, 0.0, "centre"),
        "t": (float, 0.5, "scale (nonzero)"),
        "second": (bool, False, "second difference instead of first"),
    },
    "sqfn": {
        "op": (str, "A2", "A2, g2, mean, tilde, star, discrete, kernel, directional, "
                          "directional_mean, sphere, sector"),
        "f": (str, "square", "function id (2-d ids such as sumsq2 for planar ops)"),
        "x": (str, "0", "point (a,b for planar ops)"),
        "h": (float, 0.0, "lower height / scale"),
        "y": (float, 0.5, "height for tilde"),
        "delta": (float, 1.0, "half-width for g2"),
        "levels": (int, 5, "number of scales for discrete"),
        "kernel": (str, "box2", "kernel name or JSON path for kernel"),
        "xi": (str, "1,0", "unit direction a,b for directional ops"),
        "directions": (int, 16, "direction count for sphere"),
        "sectors": (str, "full", "angle intervals a:b,... for sector"),
    },
    "profile": {
        "f": (str, "weierstrass:2", "function id"),
        "x": (float, 0.37, "apex"),
        "j": (int_range, "4:18", "dyadic exponents a:b"),
    },
    "martingale": {
        "action": (str, "lemma21", "lemma21, lemma22, lemma23, lemma24, qv, export"),
        "law": (str, "pm:1", "increment law pm:c or uniform:c"),
        "depth": (int_range, "8", "depth, or a:b cycled over trials"),
        "trials": (int, 1, "number of random martingales"),
        "seed": (int, 0, "master seed"),
        "lam": (floats, "0.25,0.5,1,2,4", "lambda values for lemma22"),
        "alpha": (floats, "0.3,0.6,0.9", "alpha values for lemma23"),
        "bound": (float, 1.0, "bound B for lemma24"),
        "f": (str, None, "build from this function instead of random (qv, export)"),
        "rho": (float, 1.0, "grid parameter rho in [1, 4)"),
        "shift": (float, 0.0, "grid shift s >= 0"),
    },
    "identity": {
        "which": (str, "a", "a (mean divided difference) or b (square function)"),
        "f": (str, "square", "function id"),
        "x": (float, 0.0, "point"),
        "y": (float, 0.5, "height"),
    },
    "goodlambda": {
        "f": (str, "weierstrass:2", "function id"),
        "interval": (floats, "0,1", "interval a,b"),
        "M": (floats, "1,2,3", "M values"),
        "N": (floats, "0.2,0.5,1", "N values"),
        "h_min": (float, 2.0 ** -8, "finest height"),
        "points": (int, 32, "sample points"),
        "per_octave": (int, 2, "heights per octave"),
    },
    "lil": {
        "f": (str, "weierstrass:2", "function id"),
        "grid": (str, "0:1:200", "sample grid a:b:n"),
        "j": (int_range, "6:18", "dyadic exponents a:b"),
    },
    "zygmund": {
        "f": (str, "weierstrass:2", "function id"),
        "grid": (str, "0:1:100", "sample grid a:b:n"),
        "j": (int_range, "4:18", "dyadic exponents a:b"),
    },
    "sobolev": {
        "family": (str, "hat;gauss_sine:1;gauss_sine:3;gauss_sine:9", "function ids separated by ;"),
        "p": (floats, "1.5,2,3", "exponents"),
    },
    "classify": {
        "f": (str, "square", "function id"),
        "grid": (str, "-1:1:100", "sample grid a:b:n"),
        "exclude": (float, 0.0, "drop grid points with |x| < exclude"),
        "osc_tol": (float, 1e-3, "oscillation tolerance for the A-label"),
        "bound": (float, 10.0, "bound on |Delta_2|"),
        "cauchy_j": (int_range, "8:16", "exponents for the oscillation test"),
        "profile_j": (int_range, "4:18", "exponents for the square-function profile"),
    },
}

# the experiment subcommands run at the coarser rough-source tolerance by default
ROUGH_COMMANDS = {"profile", "goodlambda", "lil", "zygmund", "classify"}


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict
    quadrature: dict
    threads: int
    out: str | None

    def spec(self):
        return QuadratureSpec(**self.quadrature)

    def to_dict(self):
        return ex._plain({"command": self.command, "params": self.params,
                          "quadrature": self.quadrature, "threads": self.threads,
                          "out": self.out})


def _base_spec(command, params):
    if command in ROUGH_COMMANDS:
        return ex.ROUGH_SPEC
    if command == "identity":
        return ex.IDENTITY_SPEC
    if command == "sobolev":
        return QuadratureSpec(tol=1e-4)
    return QuadratureSpec()


def _add_option(p, name, parser, default, help_text):
    flag = "--" + name.replace("_", "-")
    if parser is bool:
        p.add_argument(flag, dest=name, action="store_true", default=argparse.SUPPRESS,
                       help=help_text)
    else:
        shown = f" (default: {default})" if default is not None else ""
        p.add_argument(flag, dest=name, default=argparse.SUPPRESS, metavar=name.upper(),
                       help=help_text + shown)


def build_parser():
    parser = argparse.ArgumentParser(prog="sqfnlab", description="Square-function laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, options in COMMANDS.items():
        p = sub.add_parser(command)
        if command == "martingale":
            p.add_argument("action", nargs="?", default=argparse.SUPPRESS,
                           help=options["action"][2])
        p.add_argument("--config", default=None, help="JSON file of option values")
        for name, (parser_fn, default, text) in options.items():
            if command == "martingale" and name == "action":
                continue
            _add_option(p, name, parser_fn, default, text)
        for name, (parser_fn, default, text) in COMMON.items():
            _add_option(p, name, parser_fn, default, text)
    return parser


def _convert(name, parser_fn, value):
    if value is None:
        return None
    if parser_fn is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"option {name!r} must be true or false")
        return value
    try:
        return parser_fn(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"option {name!r}: cannot parse {value!r} ({exc})") from None


def resolve(args):
    """Merge defaults, config file and flags into a validated RunConfig."""
    command = args.command
    table = {**COMMANDS[command], **COMMON}
    raw = {name: default for name, (_, default, _) in table.items()}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(table))
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
        raw.update(loaded)
    for name in table:
        if name in vars(args):
            raw[name] = vars(args)[name]
    values = {name: _convert(name, table[name][0], raw[name]) for name in table}
    params = {k: values[k] for k in COMMANDS[command]}
    base = _base_spec(command, params)
    quad = {
        "nodes": values["nodes"] if values["nodes"] is not None else base.nodes,
        "tol": values["tol"] if values["tol"] is not None else base.tol,
        "max_levels": values["max_levels"] if values["max_levels"] is not None else base.max_levels,
        "max_bands": values["max_bands"] if values["max_bands"] is not None else base.max_bands,
        "strict": not values["lenient"],
    }
    QuadratureSpec(**quad)  # validates
    threads = values["threads"] if values["threads"] is not None else (os.cpu_count() or 1)
    if threads < 1:
        raise ConfigError("--threads must be >= 1")
    out = values["out"] or os.environ.get(OUTPUT_ENV) or None
    return RunConfig(command, params, quad, int(threads), out)


# ---------------------------------------------------------------------------
# subcommands


def _emit(cfg, report, lines):
    report.config = cfg.to_dict()
    for line in lines:
        print(line)
    if cfg.out:
        report.write(cfg.out)


def _scalar_report(cfg, name, value, extra=None):
    rep = ex.ExperimentReport(experiment=name, inputs=dict(cfg.params),
                              summary={"value": value, **(extra or {})})
    _emit(cfg, rep, [fmt(value)])


def run_eval(cfg):
    p = cfg.params
    f = fs.parse_function(p["f"])
    _scalar_report(cfg, "eval", fs.evaluate(f, p["x"]))


def run_delta(cfg):
    p = cfg.params
    f = fs.parse_function(p["f"])
    op = delta2 if p["second"] else delta
    _scalar_report(cfg, "delta", op(f, p["x"], p["t"]))


PLANAR_OPS = {"directional", "directional_mean", "sphere", "sector"}


def run_sqfn(cfg):
    p, spec = cfg.params, cfg.spec()
    op = p["op"]
    if op in PLANAR_OPS:
        f = fs.parse_function_2d(p["f"])
        x = point(p["x"])
        if op == "directional":
            value = sqfn.directional_A2(f, x, point(p["xi"]), p["h"], spec)
        elif op == "directional_mean":
            value = sqfn.directional_mean_dd(f, x, point(p["xi"]), p["h"], spec)
        elif op == "sphere":
            value = sqfn.sphere_A2(f, x, p["h"], p["directions"], spec)
        else:
            value = sqfn.mean_dd_sector(f, x, p["h"], sectors(p["sectors"]), spec)
        return _scalar_report(cfg, "sqfn", value)
    f = fs.parse_function(p["f"])
    x = float(p["x"])
    if op == "A2":
        value = sqfn.conical_A2(f, x, p["h"], spec)
    elif op == "g2":
        value = sqfn.vertical_g2(f, x, p["delta"], spec)
    elif op == "mean":
        value = sqfn.mean_divided_diff(f, x, p["h"], spec)
    elif op == "tilde":
        value = sqfn.tilde_A2(f, x, p["y"], spec)
    elif op == "star":
        value = sqfn.mean_dd_star(f, x, p["h"], spec)
    elif op == "discrete":
        value = sqfn.discrete_A2(f, x, p["levels"], spec)
    elif op == "kernel":
        name = p["kernel"]
        kernel = sqfn.KERNELS.get(name) or sqfn.PiecewiseKernel.from_json(name)
        value = sqfn.kernel_mean_dd(f, x, p["h"], kernel, spec)
    else:
        raise ConfigError(f"unknown sqfn op {op!r}")
    _scalar_report(cfg, "sqfn", value)


def run_profile(cfg):
    p, spec = cfg.params, cfg.spec()
    f = fs.parse_function(p["f"])
    prof = sqfn.square_profile(f, p["x"], p["j"], spec)
    rows = prof.rows()
    rep = ex.ExperimentReport(
        experiment="profile", inputs=dict(cfg.params),
        records=[{"x": x, "h": h, "value": v, "flag": flag} for x, h, v, flag in rows],
        summary={"divergent": prof.divergent, "converged": prof.converged},
        tolerances={"quadrature": cfg.quadrature})
    _emit(cfg, rep, [f"{fmt(h)} {fmt(v)}" for _, h, v, _ in rows] +
          [f"divergent {int(prof.divergent)}"])


def _trial_traces(p):
    depths = p["depth"]
    seeds = mg.trial_seeds(p["seed"], p["trials"])
    grid = mg.DyadicGrid(p["rho"], p["shift"])
    for i, seq in enumerate(seeds):
        yield i, depths[i % len(depths)], mg.random_martingale(seq, depths[i % len(depths)],
                                                               p["law"], grid)


def run_martingale(cfg):
    p = cfg.params
    action = p["action"]
    grid = mg.DyadicGrid(p["rho"], p["shift"])
    if action in ("qv", "export"):
        if p["f"]:
            traces = [(0, p["depth"][0], mg.build_from_function(fs.parse_function(p["f"]), grid,
                                                                p["depth"][0]))]
        else:
            traces = list(_trial_traces(p))
        records, lines = [], []
        for i, depth, tr in traces:
            left, right = mg.orthogonality_gap(tr)
            records.append({"trial": i, "depth": depth, "square_increment_integral": left,
                            "qv_integral": right, "defect": tr.martingale_defect()})
            lines.append(f"{i} {fmt(left)} {fmt(right)}")
            if action == "export" and cfg.out:
                os.makedirs(cfg.out, exist_ok=True)
                tr.to_csv(os.path.join(cfg.out, f"trace_{i}.csv"))
        rep = ex.ExperimentReport(experiment=f"martingale_{action}", inputs=dict(p),
                                  records=records)
        return _emit(cfg, rep, lines)
    if action not in ("lemma21", "lemma22", "lemma23", "lemma24"):
        raise ConfigError(f"unknown martingale action {action!r}")
    records, violations, worst = [], 0, -math.inf
    for i, depth, tr in _trial_traces(p):
        size = tr.base_length
        if action == "lemma21":
            checks = [("", mg.lemma21_integral(tr), size)]
        elif action == "lemma22":
            checks = [(f"lam={lam!r}", mg.lemma22_tail_measure(tr, lam), math.exp(-lam) * size)
                      for lam in p["lam"]]
        elif action == "lemma23":
            checks = [(f"alpha={a!r}", mg.lemma23_exp_moment(tr, a), size / (1.0 - a))
                      for a in p["alpha"]]
        else:
            prof = mg.lemma24_profile(tr, p["bound"])
            checks = [("", prof[-1] if prof else 0.0, 100.0 * tr.grid.rho)]
        for label, value, bound in checks:
            ok = value <= bound
            violations += not ok
            worst = max(worst, value / bound if bound > 0 else math.inf)
            records.append({"trial": i, "depth": depth, "case": label, "value": value,
                            "bound": bound, "holds": ok})
    rep = ex.ExperimentReport(
        experiment=f"martingale_{action}", inputs=dict(p), records=records,
        summary={"violations": violations, "max_value_over_bound": worst,
                 "max_value": max(r["value"] for r in records)},
        verdicts={"no_violations": violations == 0})
    _emit(cfg, rep, [fmt(rep.summary["max_value"])])


def run_identity(cfg):
    p, spec = cfg.params, cfg.spec()
    f = fs.parse_function(p["f"])
    which = p["which"]
    if which not in ("a", "b"):
        raise ConfigError("--which must be a or b")
    chk = (ex.check_identity_a if which == "a" else ex.check_identity_b)(f, p["x"], p["y"], spec)
    rep = ex.ExperimentReport(experiment="identity", inputs=dict(p), records=[chk.record()],
                              summary={"rel_error": chk.rel_error},
                              tolerances={"quadrature": cfg.quadrature})
    _emit(cfg, rep, [f"lhs {fmt(chk.lhs)}", f"rhs {fmt(chk.rhs)}",
                     f"rel_error {fmt(chk.rel_error)}"])


def _summary_lines(rep):
    lines = []
    for key in sorted(rep.summary):
        v = rep.summary[key]
        if isinstance(v, (float, int)) and not isinstance(v, bool):
            lines.append(f"{key} {fmt(v)}")
    for key in sorted(rep.verdicts):
        lines.append(f"{key} {'pass' if rep.verdicts[key] else 'fail'}")
    return lines


def run_goodlambda(cfg):
    p, spec = cfg.params, cfg.spec()
    if len(p["interval"]) != 2:
        raise ConfigError("--interval needs two numbers a,b")
    rep = ex.good_lambda_measure(fs.parse_function(p["f"]), tuple(p["interval"]), p["M"], p["N"],
                                 p["h_min"], p["points"], p["per_octave"], spec, cfg.threads)
    _emit(cfg, rep, [f"M={fmt(r['M'])} N={fmt(r['N'])} measure {fmt(r['measure'])} "
                     f"bound {fmt(r['bound_c1'])}" for r in rep.records] + _summary_lines(rep))


def run_lil(cfg):
    p, spec = cfg.params, cfg.spec()
    rep = ex.lil_profile(fs.parse_function(p["f"]), grid_spec(p["grid"]), p["j"], spec,
                         threads=cfg.threads)
    _emit(cfg, rep, _summary_lines(rep))


def run_zygmund(cfg):
    p, spec = cfg.params, cfg.spec()
    rep = ex.zygmund_growth(fs.parse_function(p["f"]), grid_spec(p["grid"]), p["j"], spec,
                            threads=cfg.threads)
    _emit(cfg, rep, _summary_lines(rep))


def run_sobolev(cfg):
    p, spec = cfg.params, cfg.spec()
    family = [fs.parse_function(t) for t in p["family"].split(";") if t.strip()]
    rep = ex.sobolev_compare(family, p["p"], spec, threads=cfg.threads)
    _emit(cfg, rep, [f"{r['function']} p={fmt(r['p'])} ratio {fmt(r['ratio'])}"
                     for r in rep.records] + _summary_lines(rep))


def run_classify(cfg):
    p, spec = cfg.params, cfg.spec()
    xs = grid_spec(p["grid"])
    xs = xs[np.abs(xs) >= p["exclude"]]
    rep = ex.classify_differentiability(fs.parse_function(p["f"]), xs, p["cauchy_j"],
                                        p["profile_j"], p["osc_tol"], p["bound"], spec, cfg.threads)
    _emit(cfg, rep, _summary_lines(rep))


RUNNERS = {
    "eval": run_eval, "delta": run_delta, "sqfn": run_sqfn, "profile": run_profile,
    "martingale": run_martingale, "identity": run_identity, "goodlambda": run_goodlambda,
    "lil": run_lil, "zygmund": run_zygmund, "sobolev": run_sobolev, "classify": run_classify,
}


def _diagnostic(kind, exc):
    print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)},
                     sort_keys=True), file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        RUNNERS[cfg.command](cfg)
    except NoConvergence as exc:
        if exc.value == exc.value:  # not NaN
            print(fmt(exc.value))
        _diagnostic("no_convergence", exc)
        return EXIT_NOCONV
    except (SqfnError, ValueError, KeyError, OSError) as exc:
        _diagnostic("invalid_input", exc)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
