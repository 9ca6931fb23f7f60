"""Command-line harness: seeded experiments and scripted structure operations.

Config files hold one ``key = value`` pair per line; ``#`` starts a comment.
Keys are the :class:`ExperimentConfig` field names. Precedence, lowest first:
built-in defaults, the ``NOISYTREES_SEED`` environment variable (seed only),
the config file, then command-line flags.

Reports contain only seeded quantities, so equal configs give equal bytes.
Timing goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from . import experiments as ex
from .autocomplete import Dictionary, run_script
from .oracle import NoisyComparator, QuantumCostParams, QuantumStringComparator
from .rbtree import RBTree
from .segtree import SegTree
from .strsort import SortVariant, cost_scaling_probe, exact_sort, sort_strings

SEED_ENV = "NOISYTREES_SEED"
STRUCTURES = ("walk", "rbtree", "segtree", "sort", "autocomplete")


@dataclass
class ExperimentConfig:
    structure: str = "walk"
    seed: int = 0
    trials: int = 1000
    p: float = 1 / 3
    xi: float = 0.1
    epsilon: Optional[float] = None
    c: float = 108.0
    per_step_boost: float = 0.1
    steps_multiplier: float = 1.0
    n: int = 64
    l: int = 64
    h: int = 8
    heights: str = "8,16"
    n_list: str = "64,128"
    l_list: str = "64,256"
    sweep_c: str = ""
    sweep_s: str = ""
    variant: str = "inorder"
    out: str = "-"
    format: str = "json"

    def validate(self) -> None:
        if self.structure not in STRUCTURES:
            raise ValueError(f"structure must be one of {', '.join(STRUCTURES)}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0 <= self.p < 0.5:
            raise ValueError("p must lie in [0, 0.5)")
        if not 0 <= self.xi < 0.5:
            raise ValueError("xi must lie in [0, 0.5)")
        if self.epsilon is not None and not 0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 0.5)")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        SortVariant(self.variant)

    def to_text(self) -> str:
        return "".join(f"{k} = {'' if v is None else v}\n" for k, v in asdict(self).items())


def _field_types() -> dict:
    return {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key: str, raw: str):
    kind = _field_types()[key]
    if raw == "" and "Optional" in kind:
        return None
    if "float" in kind:
        return float(raw)
    if "int" in kind:
        return int(raw, 0)
    return raw


def parse_config_text(text: str, source: str = "config") -> dict:
    known = _field_types()
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in known:
            raise ValueError(f"{source}:{lineno}: expected 'key = value' with a known key, got {line!r}")
        try:
            out[key] = _coerce(key, value.strip())
        except ValueError as e:
            raise ValueError(f"{source}:{lineno}: bad value for {key}: {e}") from None
    return out


def resolve_config(cli: dict, config_path: Optional[str] = None,
                   env: Optional[dict] = None) -> ExperimentConfig:
    env = os.environ if env is None else env
    values = {}
    if env.get(SEED_ENV):
        values["seed"] = int(env[SEED_ENV], 0)
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read(), config_path))
    values.update({k: v for k, v in cli.items() if v is not None})
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def _floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# -- report writing ---------------------------------------------------------

def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _rows_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def _emit(cfg: ExperimentConfig, text: str) -> None:
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _report(cfg: ExperimentConfig, body: dict, rows: Optional[List[dict]] = None) -> str:
    if cfg.format == "csv":
        return _rows_csv(rows if rows is not None else [_flatten(body)])
    return _dump_json({"config": asdict(cfg), **body})


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        elif isinstance(v, list):
            out[prefix + k] = json.dumps(v)
        else:
            out[prefix + k] = v
    return out


# -- subcommands -------------------------------------------------------------

def cmd_walk_sim(cfg: ExperimentConfig, jobs: int = 1) -> Tuple[str, bool]:
    eps = 0.05 if cfg.epsilon is None else cfg.epsilon
    rows = []
    for c in _floats(cfg.sweep_c) or [cfg.c]:
        for mult in _floats(cfg.sweep_s) or [cfg.steps_multiplier]:
            st = ex.run_trials(ex.walk_trials, cfg.trials, jobs, h=cfg.h, p=cfg.p, epsilon=eps,
                               c=c, seed=cfg.seed, per_step_boost=cfg.per_step_boost,
                               steps_multiplier=mult)
            steps = max(1, math.ceil(ex.WalkConfig(eps, c, height_hint=cfg.h).steps * mult))
            rows.append({"c": c, "steps_multiplier": mult, "steps": steps, **st.summary(),
                         "meets_epsilon": st.failure_rate <= eps})
    ok = all(r["meets_epsilon"] for r in rows)
    flat = [{k: (json.dumps(v) if isinstance(v, list) else v) for k, v in r.items()} for r in rows]
    return _report(cfg, {"epsilon": eps, "rows": rows}, flat), ok


def cmd_boost_baseline(cfg: ExperimentConfig, jobs: int = 1) -> Tuple[str, bool]:
    results = []
    for h in _ints(cfg.heights) or [cfg.h]:
        eps = 2.0 ** -max(h, 2) if cfg.epsilon is None else cfg.epsilon
        results.append(ex.compare_with_baseline(h, cfg.p, eps, cfg.trials, cfg.seed, jobs=jobs))
    ratios = [r.ratio for r in results]
    ok = (all(r.c is not None for r in results) and all(x > 1 for x in ratios)
          and all(a < b for a, b in zip(ratios, ratios[1:])))
    rows = [{"h": r.h, "epsilon": r.epsilon, "calibrated_c": r.c,
             "baseline_calls": r.baseline.mean_calls, "walker_calls": r.walker.mean_calls,
             "baseline_failures": r.baseline.failures, "walker_failures": r.walker.failures,
             "trials": r.baseline.trials, "call_ratio": r.ratio} for r in results]
    return _report(cfg, {"comparisons": [r.summary() for r in results], "ratio_grows": ok}, rows), ok


class ScriptError(ValueError):
    pass


def _key(raw: str):
    try:
        return int(raw)
    except ValueError:
        return raw


def _number(raw: str):
    try:
        return int(raw)
    except ValueError:
        return float(raw)


def run_ops(cfg: ExperimentConfig, lines: Iterable[str]) -> Iterator[dict]:
    """Execute an operation script; one result dict per non-blank line."""
    seed = cfg.seed
    eps = 0.01 if cfg.epsilon is None else cfg.epsilon
    kw = dict(epsilon=eps, c=cfg.c, per_step_boost=cfg.per_step_boost)
    if cfg.structure == "rbtree":
        cmp = NoisyComparator(cfg.p, seed=seed)
        target = RBTree(cmp, **kw)
    elif cfg.structure == "segtree":
        cmp = NoisyComparator(cfg.p, seed=seed)
        target = SegTree([0] * cfg.n, cmp=cmp, **kw)
    elif cfg.structure == "autocomplete":
        cmp = QuantumStringComparator(QuantumCostParams(cfg.xi), seed=seed)
        target = Dictionary(cmp, **kw)
    else:
        raise ScriptError(f"ops does not support structure {cfg.structure!r}")
    op_no = 0
    for lineno, line in enumerate(lines, 1):
        parts = line.split()
        if not parts:
            continue
        op, args = parts[0].upper(), parts[1:]
        try:
            result = _apply(cfg.structure, target, op, args)
        except (ValueError, IndexError, TypeError) as e:
            raise ScriptError(f"line {lineno}: {e}") from None
        op_no += 1
        yield {"op_no": op_no, "op": op, "args": args, **result, "calls": cmp.calls, "cost": cmp.cost}


def _apply(structure: str, target, op: str, args: List[str]) -> dict:
    def need(k: int) -> None:
        if len(args) != k:
            raise ValueError(f"{op} takes {k} argument(s), got {len(args)}")

    if structure == "rbtree":
        need(1)
        x = _key(args[0])
        if op == "INSERT":
            return {"result": target.insert(x)}
        if op == "REMOVE":
            return {"result": target.remove(x)}
        if op == "SEARCH":
            return {"result": target.search(x) is not None}
        raise ValueError(f"unknown rbtree op {op!r} (INSERT, REMOVE, SEARCH)")
    if structure == "segtree":
        need(2)
        if op == "UPDATE":
            target.update(int(args[0]), _number(args[1]))
            return {"result": None}
        if op == "QUERY":
            return {"result": target.query(int(args[0]), int(args[1]))}
        raise ValueError(f"unknown segtree op {op!r} (UPDATE, QUERY)")
    need(1)
    if op == "ADD":
        target.add_string(args[0])
        return {"result": None}
    if op == "QUERY":
        return target.query_complement(args[0]).to_dict(target.r)
    raise ValueError(f"unknown autocomplete op {op!r} (ADD, QUERY)")


def cmd_ops(cfg: ExperimentConfig, lines: Iterable[str]) -> Tuple[str, bool]:
    out = [json.dumps(r, sort_keys=True) for r in run_ops(cfg, lines)]
    return "".join(s + "\n" for s in out), True


def cmd_autocomplete(cfg: ExperimentConfig, lines: Iterable[str]) -> Tuple[str, bool]:
    eps = 0.01 if cfg.epsilon is None else cfg.epsilon
    cmp = QuantumStringComparator(QuantumCostParams(cfg.xi), seed=cfg.seed)
    d = Dictionary(cmp, epsilon=eps, c=cfg.c, per_step_boost=cfg.per_step_boost)
    try:
        out = [json.dumps(ans.to_dict(q)) for q, ans in run_script(d, list(lines))]
    except ValueError as e:
        raise ScriptError(str(e)) from None
    return "".join(s + "\n" for s in out), True


def cmd_sort(cfg: ExperimentConfig, lines: Optional[Iterable[str]]) -> Tuple[str, bool]:
    variant = SortVariant(cfg.variant)
    if lines is not None:
        strings = [s.rstrip("\n") for s in lines if s.strip()]
        if not strings:
            raise ValueError("input holds no strings")
        res = sort_strings(strings, xi=cfg.xi, epsilon=cfg.epsilon, variant=variant,
                           seed=cfg.seed, c=cfg.c, per_step_boost=cfg.per_step_boost)
        ok = res.permutation == exact_sort(strings)
        body = {"result": res.to_dict(), "correct": ok}
        return _report(cfg, body, [{"n": len(strings), "seed": cfg.seed, "cost": res.total_cost,
                                    "calls": res.comparator_calls, "correct": ok}]), ok
    seeds = range(cfg.seed, cfg.seed + cfg.trials)
    cells = cost_scaling_probe(_ints(cfg.n_list), _ints(cfg.l_list), xi=cfg.xi, seeds=seeds,
                               variant=variant, c=cfg.c, per_step_boost=cfg.per_step_boost)
    rows = [{"n": r.n, "l": r.l, "seed": r.seed, "cost": r.cost, "correct": r.correct}
            for cell in cells for r in cell.runs]
    rate = sum(r["correct"] for r in rows) / len(rows)
    ok = rate >= 2 / 3
    if cfg.format == "csv":
        return _rows_csv(rows), ok
    body = {"cells": [{"n": c.n, "l": c.l, "mean_cost": c.mean_cost} for c in cells],
            "runs": rows, "correct_rate": rate}
    return _report(cfg, body), ok


# -- argument parsing ------------------------------------------------------------

def _common(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("experiment settings")
    g.add_argument("--config", help="key = value file; flags override it")
    g.add_argument("--seed", type=lambda s: int(s, 0))
    g.add_argument("--trials", type=int)
    g.add_argument("--p", type=float, help="raw error of a single comparison")
    g.add_argument("--xi", type=float, help="error of one string comparison")
    g.add_argument("--epsilon", type=float, help="target error per operation")
    g.add_argument("--c", type=float, help="step-budget constant")
    g.add_argument("--per-step-boost", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--l", type=int)
    g.add_argument("--height", dest="h", type=int)
    g.add_argument("--out", help="output path, '-' for stdout")
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("--check", action="store_true", help="exit 1 unless the run's checks pass")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for independent trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noisytrees", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk-sim", help="walks to random targets on a complete tree")
    _common(p)
    p.add_argument("--steps-multiplier", type=float)
    p.add_argument("--sweep-c", help="comma-separated c values")
    p.add_argument("--sweep-s", help="comma-separated step multipliers")

    p = sub.add_parser("boost-baseline", help="per-level boosted descent vs. the walker")
    _common(p)
    p.add_argument("--heights", help="comma-separated heights (default: 8,16); "
                   "epsilon defaults to 2**-max(h, 2) per height")

    p = sub.add_parser("ops", help="run an operation script against one structure")
    _common(p)
    p.add_argument("--structure", choices=("rbtree", "segtree", "autocomplete"), required=True)
    p.add_argument("--script", required=True, help="one operation per line, '-' for stdin")

    p = sub.add_parser("sort", help="noisy string sort or the cost-scaling probe")
    _common(p)
    p.add_argument("--input", help="one string per line; omit to run the probe")
    p.add_argument("--n-list")
    p.add_argument("--l-list")
    p.add_argument("--variant", choices=[v.value for v in SortVariant])

    p = sub.add_parser("autocomplete", help="answer an ADD/QUERY script")
    _common(p)
    p.add_argument("--script", required=True, help="ADD/QUERY lines, '-' for stdin")
    return parser


_STRUCTURE = {"walk-sim": "walk", "boost-baseline": "walk", "sort": "sort",
              "autocomplete": "autocomplete"}
_NON_CONFIG = {"command", "config", "check", "jobs", "script", "input"}


def _read_lines(path: str) -> List[str]:
    if path == "-":
        return sys.stdin.readlines()
    with open(path, encoding="utf-8") as fh:
        return fh.readlines()


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cli = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG}
    if args.command in _STRUCTURE:
        cli["structure"] = _STRUCTURE[args.command]
    try:
        cfg = resolve_config(cli, args.config)
    except (OSError, ValueError, TypeError) as e:
        print(f"noisytrees: {e}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        if args.command == "walk-sim":
            text, ok = cmd_walk_sim(cfg, args.jobs)
        elif args.command == "boost-baseline":
            text, ok = cmd_boost_baseline(cfg, args.jobs)
        elif args.command == "ops":
            text, ok = cmd_ops(cfg, _read_lines(args.script))
        elif args.command == "sort":
            text, ok = cmd_sort(cfg, None if args.input is None else _read_lines(args.input))
        else:
            text, ok = cmd_autocomplete(cfg, _read_lines(args.script))
    except (OSError, ValueError) as e:
        print(f"noisytrees: {e}", file=sys.stderr)
        return 2
    _emit(cfg, text)
    print(f"noisytrees: {args.command} finished in {time.perf_counter() - start:.2f}s",
          file=sys.stderr)
    return 0 if ok or not args.check else 1


if __name__ == "__main__":
    sys.exit(main())
