"""Command-line front end.

Every command writes sorted-key JSON to stdout (or ``--out``) and
diagnostics to stderr. Exit codes: 0 success, 2 parse error, 3 unsupported,
4 budget exceeded, 5 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import formula as F
from .errors import ConfigInvalid, InvalidArgument, ParseError, TraceLogicError
from .evaluator import OptimizerConfig, eval_sentence
from .games import (NonlocalGame, coloring_game, deterministic_value, groups_from_json,
                    relaxed_game_value, round_to_pvm, synchronous_value_lower_bound)
from .matrices import matrix_from_json
from .moments import DEFAULT_DEGREE, density_gap, moment_map, net_lower_bound
from .nets import DEFAULT_BUDGET

log = logging.getLogger("tracelogic")

# flags that may also come from --config; None in argparse means "not given"
DEFAULTS = {
    "p": 1, "mesh": None, "eps": None, "restarts": 8, "iters": 1000, "seed": None,
    "budget": DEFAULT_BUDGET, "tol": 0.25, "beta": None, "threads": 1, "d": DEFAULT_DEGREE,
    "m": 3, "samples": 8, "n": 1, "p_small": 1, "p_large": 2,
}
INT_KEYS = {"p", "restarts", "iters", "seed", "budget", "threads", "d", "m", "samples", "n", "p_small", "p_large"}


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: invalid JSON ({exc})") from None


def _resolve(args) -> dict:
    """Merge flags over the --config file over built-in defaults."""
    config = {}
    if getattr(args, "config", None):
        config = _read_json(args.config)
        if not isinstance(config, dict):
            raise ConfigInvalid("config file must hold a JSON object")
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else config.get(key, default)
    for key in INT_KEYS:
        if out[key] is not None:
            try:
                out[key] = int(out[key])
            except (TypeError, ValueError):
                raise ConfigInvalid(f"{key} must be an integer, got {out[key]!r}") from None
    for key in ("p", "restarts", "budget", "threads", "d", "m", "samples", "n", "p_small", "p_large"):
        if out[key] < 1:
            raise ConfigInvalid(f"{key} must be >= 1, got {out[key]}")
    if out["iters"] < 0:
        raise ConfigInvalid("iters must be >= 0")
    for key in ("mesh", "eps", "tol", "beta"):
        if out[key] is not None:
            try:
                out[key] = Fraction(str(out[key]))
            except (ValueError, ZeroDivisionError):
                raise ConfigInvalid(f"{key} must be a rational number, got {out[key]!r}") from None
            if out[key] <= 0:
                raise ConfigInvalid(f"{key} must be positive")
    return out


def _require_seed(cfg: dict) -> int:
    if cfg["seed"] is None:
        raise ConfigInvalid("this command is stochastic: --seed is required")
    return cfg["seed"]


def _optimizer(cfg: dict, p: int | None = None) -> OptimizerConfig:
    return OptimizerConfig(p=p or cfg["p"], restarts=cfg["restarts"], max_iterations=cfg["iters"],
                           seed=_require_seed(cfg), threads=cfg["threads"]).validate()


def _load_game(path: str) -> NonlocalGame:
    return NonlocalGame.from_json(_read_json(path))


def _load_tuple(path: str) -> list[np.ndarray]:
    obj = _read_json(path)
    if isinstance(obj, dict):
        obj = obj.get("matrices")
    if not isinstance(obj, list) or not obj:
        raise InvalidArgument("tuple JSON must be a non-empty list of matrices or {\"matrices\": [...]}")
    return [matrix_from_json(x) for x in obj]


# --------------------------------------------------------------------------
# commands


def cmd_parse(args, cfg):
    f = F.parse(_read_text(args.file))
    if args.reprint:
        return F.to_text(f) + "\n"
    free = sorted(F.free_vars(f))
    return {"ast": F.to_json(f), "free_vars": free, "sentence": not free,
            "classification": F.classify(f, allow_free=True),
            "lipschitz": str(F.lipschitz_bound(f)) if F.is_quantifier_free(f) else None}


def cmd_eval(args, cfg):
    s = F.Sentence.parse(_read_text(args.file))
    opt = _optimizer(cfg) if s.classification != F.QUANTIFIER_FREE else OptimizerConfig(p=cfg["p"])
    out = eval_sentence(s, opt).to_json()
    out["classification"] = s.classification
    return out


def cmd_game_value(args, cfg):
    g = _load_game(args.file)
    opt = _optimizer(cfg)
    report = synchronous_value_lower_bound(g, cfg["p"], opt)
    out = report.to_json()
    if cfg["beta"] is not None:
        relaxed = relaxed_game_value(g, cfg["p"], cfg["beta"], opt)
        out["relaxed"] = {"value": relaxed.value, "rounded_value": relaxed.extra["rounded_value"],
                          "beta": str(cfg["beta"]), "diagnostics": relaxed.diagnostics}
    return out


def cmd_game_classical(args, cfg):
    g = _load_game(args.file)
    value, assignment = deterministic_value(g, budget=cfg["budget"], return_assignment=True)
    return {"game_id": g.name, "value": str(value), "value_float": float(value),
            "assignment": [int(a) for a in assignment]}


def cmd_gen_coloring(args, cfg):
    obj = _read_json(args.file)
    adjacency = obj.get("adjacency") if isinstance(obj, dict) else obj
    name = obj.get("name", "graph") if isinstance(obj, dict) else "graph"
    if not isinstance(adjacency, list):
        raise InvalidArgument("graph JSON must be an adjacency list or {\"adjacency\": [...]}")
    return coloring_game(adjacency, cfg["m"], name=f"{name}-{cfg['m']}col").to_json()


def cmd_round_pvm(args, cfg):
    obj = _read_json(args.file)
    tol = float(cfg["tol"])
    # a list of fixture cases, each {"groups": ...}
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        return {"cases": [round_to_pvm(groups_from_json(case), tol).to_json() for case in obj]}
    return round_to_pvm(groups_from_json(obj), tol).to_json()


def cmd_moments(args, cfg):
    return moment_map(_load_tuple(args.file), cfg["d"]).to_json()


def cmd_net_bound(args, cfg):
    s = F.Sentence.parse(_read_text(args.file))
    if cfg["mesh"] is None and cfg["eps"] is None:
        raise ConfigInvalid("net-bound needs --mesh or --eps")
    record = [] if args.csv else None
    nb = net_lower_bound(s, cfg["p"], mesh=cfg["mesh"], eps=cfg["eps"], budget=cfg["budget"], record=record)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "value"])
            w.writerows((i, repr(v)) for i, v in record)
    return nb.to_json()


def cmd_density(args, cfg):
    seed = _require_seed(cfg)
    opt = OptimizerConfig(restarts=cfg["restarts"], max_iterations=cfg["iters"], seed=seed,
                          threads=cfg["threads"])
    res = density_gap(cfg["n"], cfg["d"], cfg["p_small"], cfg["p_large"], cfg["samples"], seed, opt)
    out = res.to_json()
    out.update(n=cfg["n"], d=cfg["d"], seed=seed)
    return out


COMMANDS = {
    "parse": (cmd_parse, "parse a formula; print its JSON AST and classification"),
    "eval": (cmd_eval, "evaluate a sentence at dimension p (bounds for quantified sentences)"),
    "game-value": (cmd_game_value, "lower bound on the synchronous value of a game at dimension p"),
    "game-classical": (cmd_game_classical, "exact classical value by brute force"),
    "gen-coloring": (cmd_gen_coloring, "build the m-coloring game of a graph"),
    "round-pvm": (cmd_round_pvm, "round a near-PVM tuple to an exact PVM tuple"),
    "moments": (cmd_moments, "trace moments of a matrix tuple"),
    "net-bound": (cmd_net_bound, "grid-net lower bound with gap for a universal sentence"),
    "density": (cmd_density, "empirical density gap between moment sets at two dimensions"),
}


def _common(sp: argparse.ArgumentParser, *flags):
    g = sp.add_argument_group("options (flags override --config)")
    specs = {
        "p": dict(type=int, help="matrix dimension (default 1)"),
        "mesh": dict(help="net mesh, a rational such as 1/20"),
        "eps": dict(help="target net gap; picks the coarsest dyadic mesh achieving it"),
        "restarts": dict(type=int, help="optimizer restarts (default 8)"),
        "iters": dict(type=int, help="optimizer iterations per restart (default 1000)"),
        "seed": dict(type=int, help="random seed (required for stochastic commands)"),
        "budget": dict(type=int, help=f"max enumeration size (default {DEFAULT_BUDGET})"),
        "tol": dict(help="rounding tolerance on the PVM residual (default 1/4)"),
        "beta": dict(help="also run the penalized relaxation with this penalty weight"),
        "threads": dict(type=int, help="worker threads; never changes results (default 1)"),
        "d": dict(type=int, help=f"moment degree (default {DEFAULT_DEGREE})"),
        "m": dict(type=int, help="number of colors (default 3)"),
        "n": dict(type=int, help="number of matrix variables (default 1)"),
        "samples": dict(type=int, help="number of sampled tuples (default 8)"),
        "p_small": dict(type=int, help="dimension searched for witnesses (default 1)"),
        "p_large": dict(type=int, help="dimension of the samples (default 2)"),
    }
    for f in flags:
        g.add_argument("--" + f.replace("_", "-"), dest=f, default=None, **specs[f])
    g.add_argument("--config", help="JSON object with any of the option names as keys")
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tracelogic", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")
    flags = {
        "parse": (), "eval": ("p", "restarts", "iters", "seed", "threads"),
        "game-value": ("p", "restarts", "iters", "seed", "threads", "beta"),
        "game-classical": ("budget",), "gen-coloring": ("m",), "round-pvm": ("tol",), "moments": ("d",),
        "net-bound": ("p", "mesh", "eps", "budget"),
        "density": ("n", "d", "p_small", "p_large", "samples", "seed", "restarts", "iters", "threads"),
    }
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_)
        if name != "density":
            sp.add_argument("file", help="input file, or - for stdin")
        if name == "parse":
            sp.add_argument("--reprint", action="store_true", help="print canonical formula text instead")
        if name == "net-bound":
            sp.add_argument("--csv", help="also write (index, value) for every net point to this CSV file")
        _common(sp, *flags[name])
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _resolve(args)
        result = COMMANDS[args.command][0](args, cfg)
    except TraceLogicError as exc:
        kind = type(exc).__name__
        print(f"tracelogic {args.command}: {kind}: {exc}", file=sys.stderr)
        if isinstance(exc, ParseError) and exc.position is not None:
            print(f"position: {exc.position}", file=sys.stderr)
        return exc.exit_code
    text = result if isinstance(result, str) else dumps(result)
    if args.out:
        Path(args.out).write_text(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
