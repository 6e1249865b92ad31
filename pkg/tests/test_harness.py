import csv
import json
from dataclasses import replace
from fractions import Fraction

import pytest

from treeplan.actions import canonicalize_action
from treeplan.cli import main
from treeplan.cost import CostConfig
from treeplan.harness import (
    RunConfig, _fmt, emit_scaling_curves, load_config, read_trace, replay_trace, run_matrix, trace_path,
)
from treeplan.memory import load_memory
from treeplan.suites import crafted_distractor_suite, load_suite, parse_suite, save_suite


@pytest.fixture
def suite_file(tmp_path):
    path = tmp_path / "suite.json"
    save_suite(crafted_distractor_suite(n_tasks=3), path)
    return path


def cfg_for(suite_file, tmp_path, **kw):
    return RunConfig(suite_path=suite_file, out_dir=tmp_path / "out", **kw)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_matrix_cardinality(suite_file, tmp_path):
    cfg = cfg_for(suite_file, tmp_path, algorithms=["toolchain", "greedy"])
    res = run_matrix(cfg)
    out = tmp_path / "out"
    assert len(read_csv(out / "runs.csv")) == 6
    assert len(list((out / "traces").glob("*.jsonl"))) == 6
    summary = read_csv(out / "summary.csv")
    assert [r["algorithm"] for r in summary] == ["toolchain", "greedy"]
    assert list(summary[0]) == ["algorithm", "suite", "success_rate", "mean_wall_time",
                                "mean_nodes_expanded", "mean_proposer_calls"]
    assert summary[0]["success_rate"] == "1.000000" and summary[1]["success_rate"] == "0.000000"
    assert res.success_rate("toolchain") == 1


def test_rates_are_exact_fractions():
    assert _fmt(Fraction(1, 3)) == "0.333333"
    assert _fmt(Fraction(2, 3)) == "0.666667"
    assert _fmt(Fraction(17, 20)) == "0.850000"
    assert _fmt(Fraction(1, 2_000_000)) == "0.000000"  # half to even
    assert _fmt(Fraction(3, 2_000_000)) == "0.000002"


def test_determinism_and_parallel_equivalence(suite_file, tmp_path):
    algos = ["toolchain", "bfs", "dfs", "mcts", "greedy"]
    outs = []
    for i, par in enumerate([1, 1, 4]):
        cfg = replace(cfg_for(suite_file, tmp_path, algorithms=algos, parallelism=par), out_dir=tmp_path / f"o{i}")
        run_matrix(cfg)
        outs.append({p.relative_to(cfg.out_dir): p.read_bytes() for p in sorted(cfg.out_dir.rglob("*")) if p.is_file()})
    assert outs[0] == outs[1] == outs[2]
    assert len(outs[0]) == 5 * 3 + 2


def test_replay_reconstructs_every_run(suite_file, tmp_path):
    cfg = cfg_for(suite_file, tmp_path, algorithms=["toolchain", "bfs", "dfs", "mcts", "greedy"])
    run_matrix(cfg)
    for row in read_csv(tmp_path / "out" / "runs.csv"):
        rebuilt = replay_trace(trace_path(cfg.out_dir, row["algorithm"], row["task_id"]))
        assert rebuilt["outcome"] == row["outcome"]
        assert " | ".join(rebuilt["best_path"]) == row["best_path"]
        assert rebuilt["nodes_expanded"] == int(row["nodes_expanded"])
        assert rebuilt["proposer_calls"] == int(row["proposer_calls"])
        assert _fmt(rebuilt["wall_time"]) == row["wall_time"]


def test_trace_steps_strictly_increase(suite_file, tmp_path):
    cfg = cfg_for(suite_file, tmp_path, algorithms=["toolchain"])
    run_matrix(cfg)
    for path in (tmp_path / "out" / "traces").glob("*.jsonl"):
        events = read_trace(path)
        assert [e.step for e in events] == list(range(len(events)))
        assert {e.kind for e in events} <= {"select", "expand", "update", "terminal", "error"}
        calls = [e.proposer_call_count for e in events]
        assert calls == sorted(calls)


def test_errors_become_failed_rows(suite_file, tmp_path, monkeypatch):
    monkeypatch.delenv("OPENAI_MODEL", raising=False)
    cfg = cfg_for(suite_file, tmp_path, algorithms=["toolchain"], backend="http")
    res = run_matrix(cfg)
    rows = read_csv(tmp_path / "out" / "runs.csv")
    assert [r["outcome"] for r in rows] == ["error"] * 3
    assert "BackendUnavailable" in rows[0]["reason"]
    assert res.summary[0]["success_rate"] == "0.000000"


def test_ablation_variants(suite_file, tmp_path):
    cfg = cfg_for(suite_file, tmp_path, algorithms=["toolchain", "greedy"],
                  ablations=[frozenset(), frozenset({"drop_g"}), frozenset({"g1", "h2"})])
    labels = [r["algorithm"] for r in run_matrix(cfg).summary]
    assert labels == ["toolchain", "toolchain-drop_g", "toolchain-drop_g1+drop_h2", "greedy"]


def test_scaling_curves(suite_file, tmp_path):
    doc = crafted_distractor_suite(n_tasks=10)
    path = tmp_path / "ten.json"
    save_suite(doc, path)
    cfg = RunConfig(suite_path=path, out_dir=tmp_path / "out")
    rows = emit_scaling_curves(cfg, [1, 5, 10, 20], tmp_path / "curve.csv")
    assert [r["T"] for r in rows] == [1, 5, 10, 20]
    assert len(read_csv(tmp_path / "curve.csv")) == 4
    rates = [Fraction(r["success_rate"]) for r in rows]
    calls = [Fraction(r["mean_proposer_calls"]) for r in rows]
    assert rates == sorted(rates) and calls == sorted(calls)
    with pytest.raises(ValueError):
        emit_scaling_curves(cfg, [])


def test_memory_writeback_in_file_order(tmp_path):
    doc = crafted_distractor_suite(n_tasks=4)
    doc["memory_writeback"] = True
    path = tmp_path / "wb.json"
    save_suite(doc, path)
    cfg = RunConfig(suite_path=path, out_dir=tmp_path / "out", parallelism=4,
                    memory_out=tmp_path / "mem.jsonl")
    res = run_matrix(cfg)
    mem = load_memory(tmp_path / "mem.jsonl")
    learned = [e for e in mem if e.origin == "learned"]
    solved = [r.result.best_keys for r in res.runs if r.success]
    assert [list(e.keys) for e in learned] == [s for s in solved if s not in [list(e.keys) for e in mem if e.origin == "seed"]]
    again = run_matrix(replace(cfg, memory_in=tmp_path / "mem.jsonl", memory_out=None, out_dir=tmp_path / "o2"))
    assert again.success_rate("toolchain") == 1


def test_config_loading(tmp_path, suite_file):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"suite": "suite.json", "algorithms": ["toolchain", "mcts"],
                                   "cost": {"T": 7, "ablations": ["drop_h2"]},
                                   "mcts": {"rollout_depth_cap": 5}, "out_dir": "o"}))
    cfg = load_config(cfgfile)
    assert cfg.suite_path == suite_file and cfg.out_dir == tmp_path / "o"
    assert cfg.cost == CostConfig(T=7, ablations=frozenset({"h2"}))
    assert cfg.mcts.rollout_depth_cap == 5
    cfgfile.write_text(json.dumps({"suite": "missing.json"}))
    with pytest.raises(FileNotFoundError):
        load_config(cfgfile)
    with pytest.raises(ValueError):
        RunConfig(suite_path=suite_file, parallelism=0)
    with pytest.raises(ValueError):
        RunConfig(suite_path=suite_file, algorithms=["astar"])


def test_suite_roundtrip_and_unique_ids(tmp_path):
    doc = crafted_distractor_suite(n_tasks=2)
    save_suite(doc, tmp_path / "s.json")
    suite = load_suite(tmp_path / "s.json")
    assert [t.task_id for t in suite.tasks] == ["home-00", "home-01"]
    solution = [canonicalize_action(a) for a in doc["tasks"][0]["solution"]]
    assert suite.tasks[0].env.verify(solution)
    assert suite.seed_memory("home_search").g1(solution[:1]) is not None
    doc["tasks"][1]["task_id"] = "home-00"
    with pytest.raises(ValueError):
        parse_suite(doc)


def test_cli_end_to_end(tmp_path, capsys):
    suite = tmp_path / "s.json"
    assert main(["make-suite", "crafted", "--out", str(suite), "-n", "2"]) == 0
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"suite": "s.json"}))
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfgfile), "--algo", "toolchain,greedy", "--ablate", "none,g",
                 "--out", str(out), "--sweep-T", "1,20", "--seed", "3",
                 "--memory-out", str(tmp_path / "m.jsonl")]) == 0
    assert (out / "summary.csv").exists() and (out / "scaling_curves.csv").exists()
    assert (tmp_path / "m.jsonl").exists()
    assert len(read_csv(out / "summary.csv")) == 3
    capsys.readouterr()
    assert main(["replay", str(out / "traces" / "toolchain__home-00.jsonl")]) == 0
    assert json.loads(capsys.readouterr().out)["outcome"] == "success"
