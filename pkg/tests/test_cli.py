import csv
import io
import json
import subprocess
import sys

import pytest

from congest_mwc.cli import main
from congest_mwc.experiment import ConfigError, ExperimentConfig, gen_random_graph, run_experiment
from congest_mwc.graph import GraphError


def _parse(text):
    head, body = text.split("\n", 1)
    assert head.startswith("# ")
    return json.loads(head[2:]), list(csv.DictReader(io.StringIO(body)))


def test_random_graph_examples():
    k4 = gen_random_graph(4, 6, 1, 7)
    assert sorted((u, v) for u, v, _ in k4.edges) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    with pytest.raises(GraphError):
        gen_random_graph(3, 4, 1, 0)
    a, b = gen_random_graph(30, 50, 9, 3), gen_random_graph(30, 50, 9, 3)
    assert a.to_text() == b.to_text()
    assert a.to_text() != gen_random_graph(30, 50, 9, 4).to_text()
    assert a.m == 50 and max(w for *_, w in a.edges) <= 9


def test_triangle_row(tmp_path):
    path = tmp_path / "tri.txt"
    path.write_text("3 3 undirected\n0 1 1\n1 2 1\n2 0 1\n")
    meta, rows = _parse(run_experiment(ExperimentConfig("approx", 5, graph=str(path))))
    assert len(rows) == 1
    assert (rows[0]["w_star"], rows[0]["w_tilde"], rows[0]["ratio"]) == ("3", "3", "1.0")
    consts = meta["constants"]["0"]
    for key in ("eps", "k", "h0", "lambda_short", "sigma_short", "lambda_long", "T_short", "T_long",
                "short_L", "long_L", "short_gamma_min", "method2_r", "method2_r_prime", "short_beta", "short_X"):
        assert key in consts
    assert meta["logs"] == {"ln": "natural", "log": "base 2"}


def test_hard_gap_rows():
    meta, rows = _parse(run_experiment(ExperimentConfig("hard-gap", 1, hard=(2, 1, 2, 1, "undirected-weighted"),
                                                        trials=10)))
    assert len(rows) == 10 and all(r["gap_ok"] == "true" for r in rows)
    assert all(r["n"] == "11" for r in rows)
    assert meta["constants"]["H_edges"] == 4


def test_cost_rows():
    _, rows = _parse(run_experiment(ExperimentConfig("cost-model", 0, cost=(100, 10), q=(1, 2, 4))))
    assert [float(r["q"]) for r in rows] == [1, 2, 4]
    for r in rows:
        assert float(r["product"]) == pytest.approx(float(r["T_squared"]), rel=1e-9)
    assert float(rows[0]["T"]) == pytest.approx(35.85, abs=0.01)


def test_moving_cut_and_ldd_rows():
    _, rows = _parse(run_experiment(ExperimentConfig("moving-cut", 0, hard=(2, 1, 2, 1, "undirected-weighted"))))
    assert rows[0]["capacity"] == rows[0]["H_edges"] == "4" and rows[0]["bound_ok"] == "true"
    meta, rows = _parse(run_experiment(ExperimentConfig("ldd-stats", 2, random=(12, 20, 5), trials=25, k=2)))
    assert len(rows) == 25 and meta["constants"]["S"] == 12


@pytest.mark.parametrize("cfg", [
    ExperimentConfig("approx", 3, random=(25, 40, 9), trials=3, budget=2),
    ExperimentConfig("ldd-stats", 3, random=(15, 25, 6), trials=20),
    ExperimentConfig("hard-gap", 3, hard=(3, 1, 2, 2, "directed-unweighted"), trials=5),
    ExperimentConfig("moving-cut", 3, hard=(3, 1, 2, 2, "undirected-weighted")),
    ExperimentConfig("cost-model", 3, cost=(500, 12), q=(1, 3)),
])
def test_reruns_are_identical(cfg):
    assert run_experiment(cfg) == run_experiment(cfg)


def test_thread_pool_keeps_row_order(monkeypatch):
    cfg = ExperimentConfig("approx", 9, random=(20, 30, 7), trials=4, budget=1)
    serial = run_experiment(cfg)
    monkeypatch.setenv("CONGEST_MWC_THREADS", "4")
    assert run_experiment(cfg) == serial
    monkeypatch.setenv("CONGEST_MWC_THREADS", "many")
    with pytest.raises(ConfigError):
        run_experiment(cfg)


@pytest.mark.parametrize("cfg, field", [
    (ExperimentConfig("approx", 0), "graph"),
    (ExperimentConfig("approx", -1, random=(5, 5, 1)), "seed"),
    (ExperimentConfig("approx", 0, random=(3, 4, 1)), "random"),
    (ExperimentConfig("hard-gap", 0), "hard"),
    (ExperimentConfig("approx", 0, hard=(2, 1, 2, 1, "directed-unweighted")), "hard"),
    (ExperimentConfig("cost-model", 0, cost=(100, 10), q=(0.5,)), "q"),
    (ExperimentConfig("approx", 0, random=(5, 5, 1), k_star=0.5), "kstar"),
    (ExperimentConfig("approx", 0, random=(5, 5, 1), trials=0), "trials"),
])
def test_validation_names_the_field(cfg, field):
    with pytest.raises(ConfigError, match=f"^{field}:"):
        cfg.validate()


def test_exit_codes(tmp_path, capsys):
    out = tmp_path / "o.csv"
    assert main(["--mode", "cost-model", "--cost", "100,10", "--seed", "1", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[1].startswith("n,D,q")
    assert main(["--mode", "approx", "--random", "3,4,1", "--seed", "1"]) == 2
    assert main(["--mode", "approx", "--random", "5,5", "--seed", "1"]) == 2
    assert main(["--mode", "approx", "--random", "5,5,1"]) == 2
    assert main(["--mode", "nonsense", "--seed", "1"]) == 2
    assert main(["--mode", "approx", "--graph", str(tmp_path / "missing.txt"), "--seed", "1"]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1 undirected\n0 1 x\n")
    assert main(["--mode", "approx", "--graph", str(bad), "--seed", "1"]) == 2
    capsys.readouterr()
    assert main(["--mode", "hard-gap", "--hard", "2,1,2,1,undirected-weighted", "--trials", "2", "--seed", "4"]) == 0
    assert "gap_ok" in capsys.readouterr().out


def test_invariant_violation_exit(monkeypatch, tmp_path):
    import congest_mwc.experiment as ex
    from congest_mwc.mwc import ApproxResult, MwcEstimate
    from congest_mwc.congest import CostLedger

    def broken(g, *args, **kwargs):
        return ApproxResult(1, MwcEstimate(1, None, "shorthop", 0), None, 1, 0, 0, CostLedger())

    monkeypatch.setattr(ex, "approx_mwc", broken)
    path = tmp_path / "tri.txt"
    path.write_text("3 3 undirected\n0 1 1\n1 2 1\n2 0 1\n")
    assert main(["--mode", "approx", "--graph", str(path), "--seed", "0"]) == 3


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "congest_mwc.cli", "--mode", "cost-model", "--cost", "50,4",
                          "--q", "1,2", "--seed", "0"], capture_output=True, text=True)
    assert res.returncode == 0 and len(res.stdout.splitlines()) == 4
