"""``scatter-topo`` command-line entry point.

Exit codes: 0 success, 1 precondition violation, 2 I/O failure.  Errors
are reported on stderr as a single JSON line ``{"error": ...}``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .design import DesignSpec, fit_decay, validate_design
from .errors import PreconditionError, ScatterTopoError
from .figures import FIGURES, demod_spectra, emit_figure_data, write_csv
from .filters import WH, WAVELET, bank_from_json, build_bank
from .scattering import energy_capture, propagate
from .signal import DEFAULT_ETA, DEFAULT_PERIOD, DEFAULT_SAMPLES, Grid, generate, read_csv
from .topology import (classify_wav, classify_wh, closed_form_report,
                       enumerate_sig_paths_empirical, enumerate_sig_paths_rule,
                       minimize_theta, theta_wh)


# -- deterministic JSON with 17 significant digits -------------------------

def _dump(obj, indent=0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_dump(v, indent + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _dump(obj) + "\n"


def _emit(doc: dict, path: str | None):
    doc = {"version": __version__, **doc}
    text = dumps(doc)
    if path:
        Path(path).write_text(text)
    sys.stdout.write(text)


# -- shared option groups ---------------------------------------------------

def _grid_opts(p):
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="grid size T (power of two)")
    p.add_argument("--period", type=float, default=DEFAULT_PERIOD, help="time window X")


def _input_opts(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", help="CSV file, one sample per line (re or re,im)")
    src.add_argument("--gen", choices=["gaussian", "step", "bandlimited-noise"])
    p.add_argument("--bandwidth", type=float, default=None, help="generator bandwidth")
    p.add_argument("--seed", type=int, default=0)


def _bank_opts(p, flavor_required=True):
    p.add_argument("--flavor", choices=["wh", "wav", "wavelet"], required=flavor_required)
    p.add_argument("--R", type=float, dest="R")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--r", type=float, dest="r")


def _grid(args) -> Grid:
    return Grid(args.samples, args.period)


def _signal(args, grid: Grid, default="gaussian"):
    if getattr(args, "input", None):
        f = read_csv(args.input, period=grid.period)
        if f.grid.num_samples != grid.num_samples:
            raise PreconditionError(
                f"{args.input} has {f.grid.num_samples} samples, grid expects "
                f"{grid.num_samples} (pass --samples)")
        return f
    return generate(args.gen or default, grid, args.bandwidth, args.seed)


def _flavor(args) -> str:
    return WH if args.flavor == "wh" else WAVELET


def _delta(args) -> float:
    return 1.0 if args.delta is None else args.delta


def _bank_params(args) -> dict:
    if _flavor(args) == WH:
        if args.R is None:
            raise PreconditionError("--R is required for --flavor wh")
        return {"R": args.R, "delta": _delta(args)}
    if args.r is None:
        raise PreconditionError("--r is required for --flavor wav")
    return {"r": args.r}


# -- subcommands ------------------------------------------------------------

def cmd_bank(args):
    bank = build_bank(_flavor(args), _grid(args), **_bank_params(args))
    doc = bank.to_json()
    if args.out:
        Path(args.out).write_text(dumps({"version": __version__, **doc}))
    sys.stdout.write(dumps({"version": __version__, "lambda_max": bank.lambda_max,
                            "covered_band": doc["covered_band"],
                            "atoms": len(bank.atoms)}))
    return 0


def cmd_run(args):
    if args.sig_eta is not None and not 0 < args.sig_eta < 1:
        raise PreconditionError(f"--sig-eta must lie in (0, 1), got {args.sig_eta}")
    if args.depth < 0:
        raise PreconditionError("--depth must be >= 0")
    if args.bank:
        bank = bank_from_json(json.loads(Path(args.bank).read_text()))
    else:
        bank = build_bank(_flavor(args), _grid(args), **_bank_params(args))
    f = _signal(args, bank.grid)
    node_filter = "all" if args.sig_eta is None else "significant"
    tree = propagate(f, bank, args.depth, prune=args.prune, node_filter=node_filter,
                     eta=args.sig_eta or DEFAULT_ETA, keep_tree=args.keep_tree,
                     workers=args.workers)
    W, Phi = tree.profile.W, tree.profile.Phi
    norm2 = f.energy()
    try:
        emp = fit_decay(W, 1).empirical_a
    except PreconditionError:
        emp = None
    doc = {
        "params": {"bank": bank.to_json()["params"], "flavor": bank.flavor,
                   "depth": args.depth, "prune": args.prune,
                   "node_filter": node_filter, "sig_eta": args.sig_eta,
                   "samples": bank.grid.num_samples, "period": bank.grid.period},
        "W": W, "Phi": Phi, "dropped": tree.profile.dropped,
        "xi": tree.xi, "materialized": tree.materialized,
        "capture": energy_capture(tree), "empirical_a": emp,
    }
    if args.energy_csv:
        cum = tree.profile.cumulative_capture(norm2)
        write_csv(args.energy_csv, ["n", "W_n", "Phi_n", "cumulative_capture"],
                  [(n, W[n], Phi[n], cum[n]) for n in range(len(W))])
    _emit(doc, args.report)
    return 0


def cmd_count(args):
    flavor = _flavor(args)
    if args.L is None or not args.L > 0:
        raise PreconditionError("--L must be positive")
    if args.depth < 0:
        raise PreconditionError("--depth must be >= 0")
    params = _bank_params(args)
    if args.method == "closed":
        rep = closed_form_report(flavor, params, args.L, args.depth)
    elif args.method == "rule":
        rep = enumerate_sig_paths_rule(flavor, params, args.L, args.depth)
    else:
        grid = _grid(args)
        bank = build_bank(flavor, grid, **params)
        rep = enumerate_sig_paths_empirical(_signal(args, grid), bank, args.depth,
                                            args.eta)
    if flavor == WH:
        cls = classify_wh(params["R"], params["delta"], rep.params.get("L", args.L))
    else:
        cls = classify_wav(params["r"], rep.params.get("L", args.L), args.depth)
    doc = {**rep.to_json(), "topology_class": str(cls)}
    _emit(doc, args.report)
    return 0


def cmd_classify(args):
    flavor = _flavor(args)
    if args.L is None:
        raise PreconditionError("--L is required")
    params = _bank_params(args)
    if flavor == WH:
        cls = classify_wh(params["R"], params["delta"], args.L)
    else:
        cls = classify_wav(params["r"], args.L, args.depth)
    doc = {"params": {"flavor": flavor, **params, "L": args.L, "depth": args.depth},
           "topology_class": cls.name}
    if cls.M is not None:
        doc["M"] = cls.M
    _emit(doc, args.report)
    return 0


def cmd_minimize_theta(args):
    obj = minimize_theta(args.N, _delta(args), args.L, args.step, args.average)
    if args.curve_csv:
        write_csv(args.curve_csv, ["R", "Theta", "topology_class"], obj.rows())
    R_below = obj.R[obj.R < obj.delta][-1]
    doc = {"params": {"N": args.N, "delta": obj.delta, "L": args.L,
                      "step": float(obj.R[1] - obj.R[0]) if len(obj.R) > 1 else args.step,
                      "average": args.average},
           "R_star": obj.R_star, "theta": obj.theta_star,
           "topology_class": classify_wh(obj.R_star, obj.delta, args.L).name,
           "theta_at_2delta": theta_wh(args.N, 2 * obj.delta, obj.delta, args.L, args.average),
           "theta_below_delta": theta_wh(args.N, float(R_below), obj.delta, args.L, args.average)}
    _emit(doc, args.report)
    return 0


def cmd_design(args):
    flavor = _flavor(args)
    delta = _delta(args)
    if flavor == WAVELET and delta != 1.0:
        raise PreconditionError("wavelet designs fix --delta 1")
    grid = _grid(args)
    f = _signal(args, grid)
    spec = DesignSpec.for_signal(f, args.epsilon, args.depth, args.s, delta, args.l)
    val = validate_design(f, spec, flavor, eta=args.sig_eta, workers=args.workers)
    d = val.design
    doc = {"params": {"flavor": flavor, "epsilon": args.epsilon, "depth": args.depth,
                      "s": args.s, "delta": delta, "l": val.spec.l,
                      "gen": args.gen, "input": args.input, "seed": args.seed},
           "kappa": d.kappa, "wh_R_max": d.wh_R_max, "wav_r_max": d.wav_r_max,
           "predicted_decay_factor": d.predicted_decay_factor,
           "validation": {"capture": val.capture, "pass": val.passed, "xi": val.xi,
                          "norm2": val.spec.norm2, "norm_sobolev": val.spec.norms}}
    _emit(doc, args.report)
    return 0


def cmd_demod(args):
    grid = _grid(args)
    f = _signal(args, grid)
    rows, esupp = demod_spectra(f, args.R, _delta(args), args.k, args.eta)
    if args.csv:
        write_csv(args.csv, ["omega", "band", "squared_modulus", "modulus", "relu"], rows)
    doc = {"params": {"R": args.R, "delta": _delta(args), "k": args.k, "eta": args.eta},
           "esupp": esupp, "esupp_over_R": {k: v / args.R for k, v in esupp.items()}}
    _emit(doc, args.report)
    return 0


def cmd_figure(args):
    kw = {"delta": _delta(args), "N": args.N, "L": args.L, "step": args.step,
          "R": args.R if args.R is not None else 1.0, "k": args.k}
    if args.which == "fig_demod":
        grid = _grid(args)
        kw.update(grid=grid, signal=_signal(args, grid))
    paths = emit_figure_data(args.which, args.out_dir, **kw)
    _emit({"files": [str(p) for p in paths]}, None)
    return 0


# -- parser -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors are precondition violations (exit 1), not I/O failures."""

    def error(self, message):
        raise PreconditionError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="scatter-topo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--config", help="key=value file; CLI flags take precedence")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bank", help="build a filter bank and write its metadata")
    _bank_opts(p)
    _grid_opts(p)
    p.add_argument("--out", help="bank JSON path")
    p.set_defaults(func=cmd_bank)

    p = sub.add_parser("run", help="propagate a signal through the scattering tree")
    p.add_argument("--bank", help="bank JSON written by 'bank'")
    _bank_opts(p, flavor_required=False)
    _grid_opts(p)
    _input_opts(p)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--prune", action="store_true", help="mirror-twin symmetry pruning")
    p.add_argument("--sig-eta", type=float, default=None,
                   help="expand only significant children (measured support, threshold eta)")
    p.add_argument("--keep-tree", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--report")
    p.add_argument("--energy-csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("count", help="operationally significant nodes per layer")
    _bank_opts(p)
    _grid_opts(p)
    _input_opts(p)
    p.add_argument("--L", type=float, dest="L")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--method", choices=["closed", "rule", "empirical"], default="closed")
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    p.add_argument("--report")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("classify", help="topology class of the reduced network")
    _bank_opts(p)
    p.add_argument("--L", type=float, dest="L")
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--report")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("minimize-theta", help="minimize the average width over R")
    p.add_argument("--N", type=int, dest="N", required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--L", type=float, dest="L", required=True)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--average", choices=["effective", "nominal"], default="effective")
    p.add_argument("--curve-csv")
    p.add_argument("--report")
    p.set_defaults(func=cmd_minimize_theta)

    p = sub.add_parser("design", help="depth-constrained design and validation")
    p.add_argument("--flavor", choices=["wh", "wav", "wavelet"], required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--s", type=float, dest="s", default=1.0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--l", type=float, dest="l", default=None)
    p.add_argument("--sig-eta", type=float, default=1e-6)
    p.add_argument("--workers", type=int, default=None)
    _grid_opts(p)
    _input_opts(p)
    p.add_argument("--report")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("demod", help="non-linearity spectra of one WH band")
    p.add_argument("--R", type=float, dest="R", default=1.0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--eta", type=float, default=DEFAULT_ETA)
    _grid_opts(p)
    _input_opts(p)
    p.add_argument("--csv")
    p.add_argument("--report")
    p.set_defaults(func=cmd_demod)

    p = sub.add_parser("figure", help="emit CSV data for a figure")
    p.add_argument("which", choices=FIGURES)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--N", type=int, dest="N", default=3)
    p.add_argument("--L", type=float, dest="L", default=10.0)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--R", type=float, dest="R", default=None)
    p.add_argument("--k", type=int, default=5)
    _grid_opts(p)
    _input_opts(p)
    p.set_defaults(func=cmd_figure, gen=None, bandwidth=8.0)
    return ap


def _read_config(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionError(f"config line is not key=value: {line!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _apply_config(parser, argv, config: dict):
    """Install config values as subcommand defaults; explicit flags still win."""
    sub_action = next(a for a in parser._actions
                      if isinstance(a, argparse._SubParsersAction))
    command = next((t for t in argv if t in sub_action.choices), None)
    if command is None:
        return
    sp = sub_action.choices[command]
    known = {a.dest: a for a in sp._actions}
    defaults = {}
    for k, v in config.items():
        if k not in known:
            raise PreconditionError(f"unknown config key {k!r} for '{command}'")
        a = known[k]
        if isinstance(a, argparse._StoreTrueAction):
            defaults[k] = v.lower() in ("1", "true", "yes", "on")
        elif a.type is not None:
            defaults[k] = a.type(v)
        else:
            defaults[k] = v
    sp.set_defaults(**defaults)
    for a in sp._actions:
        if a.dest in defaults:
            a.required = False


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            _apply_config(parser, argv, _read_config(known.config))
        args = parser.parse_args(argv)
        return args.func(args)
    except (ScatterTopoError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": type(exc).__name__}) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "kind": "io"}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
