"""Command line entry point: ``treeplan run | make-suite | replay``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import suites
from .harness import emit_scaling_curves, load_config, replay_trace, run_matrix


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _ablation_list(text: str) -> list[frozenset]:
    """``none,g1,g,g1+h2`` -> one ablation set per comma item."""
    out = []
    for item in _csv_list(text):
        parts = [p for p in item.split("+") if p and p != "none"]
        out.append(frozenset(parts))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treeplan", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an algorithm x task matrix")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--algo", type=_csv_list, help="comma list of toolchain,bfs,dfs,mcts,greedy")
    run.add_argument("--ablate", type=_ablation_list,
                     help="toolchain variants, e.g. none,g1,g,h2 (join with + to combine)")
    run.add_argument("--memory-in", type=Path)
    run.add_argument("--memory-out", type=Path)
    run.add_argument("--sweep-T", type=lambda s: [int(x) for x in _csv_list(s)])
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path)
    run.add_argument("--parallelism", type=int)

    mk = sub.add_parser("make-suite", help="write a generated scripted suite")
    mk.add_argument("kind", choices=["crafted", "enumerable", "arithmetic"])
    mk.add_argument("--out", required=True, type=Path)
    mk.add_argument("-n", "--n-tasks", type=int)
    mk.add_argument("--seed", type=int, default=0)

    rp = sub.add_parser("replay", help="rebuild a run's result from its trace file")
    rp.add_argument("trace", type=Path)
    return p


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.algo:
        overrides["algorithms"] = args.algo
    if args.ablate is not None:
        overrides["ablations"] = args.ablate
    for name in ("memory_in", "memory_out", "seed", "parallelism"):
        if getattr(args, name) is not None:
            overrides[name] = getattr(args, name)
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.sweep_T is not None:
        overrides["sweep_T"] = args.sweep_T
    cfg = replace(cfg, **overrides)
    cfg.check_paths()
    result = run_matrix(cfg)
    for row in result.summary:
        print(",".join(str(v) for v in row.values()))
    if cfg.sweep_T:
        emit_scaling_curves(cfg, cfg.sweep_T, cfg.out_dir / "scaling_curves.csv")
    print(f"wrote {cfg.out_dir}", file=sys.stderr)
    return 0


def cmd_make_suite(args) -> int:
    kw = {"seed": args.seed}
    if args.n_tasks is not None:
        kw["n_tasks"] = args.n_tasks
    doc = {
        "crafted": suites.crafted_distractor_suite,
        "enumerable": suites.enumerable_suite,
        "arithmetic": suites.arithmetic_suite,
    }[args.kind](**kw)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    suites.save_suite(doc, args.out)
    print(f"wrote {len(doc['tasks'])} tasks to {args.out}", file=sys.stderr)
    return 0


def cmd_replay(args) -> int:
    print(json.dumps(replay_trace(args.trace), indent=1, sort_keys=True))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "make-suite": cmd_make_suite, "replay": cmd_replay}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
