import csv
import io
import json

import numpy as np
import pytest

from lzcausal.cli import main
from lzcausal.dataio import load_results
from lzcausal.evalbench import run_ar_direction_experiment
from lzcausal.synthgen import ARConfig, gen_coupled_ar
from lzcausal.tree import DecisionTree


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    config = json.loads(lines[0][len("# config: "):])
    rows = list(csv.reader(lines[1:]))
    return config, rows[0], rows[1:]


def make_pairs(directory, n=6):
    rng = np.random.default_rng(3)
    meta = []
    for i in range(1, n + 1):
        np.savetxt(directory / f"pair{i:04d}.txt", rng.normal(size=(40, 2)))
        meta.append(f"{i:04d} 1 1 2 2 1" if i % 2 else f"{i:04d} 2 2 1 1 1")
    (directory / "pairmeta.txt").write_text("\n".join(meta) + "\n")
    return directory


# -- gen ------------------------------------------------------------------------

def test_gen_ar_rows(capsys):
    code, out, err = run(capsys, "gen", "ar", "--p", 1, "--eta", 0.5, "--seed", 7)
    config, header, rows = parse_csv(out)
    assert code == 0 and header == ["X", "Y"] and len(rows) == 2000
    assert config["seed"] == 7 and config["eta"] == 0.5 and "jobs" not in config
    assert "2000 rows" in err


def test_gen_ar_dataset_rows(capsys, tmp_path):
    path = tmp_path / "ar.csv"
    code, _, _ = run(capsys, "gen", "ar-dataset", "--seed", 1, "--out", path)
    _, header, rows = parse_csv(path.read_text())
    assert code == 0 and header == ["feature", "target"] and len(rows) == 300
    assert {r[1] for r in rows} <= {"0", "1"}


def test_gen_logistic_eta_out_of_range(capsys):
    code, out, err = run(capsys, "gen", "logistic", "--eta", 1.1)
    assert code != 0 and out == ""
    assert "--eta" in err


def test_gen_json_format(capsys):
    code, out, _ = run(capsys, "gen", "logistic", "--eta", 0.2, "--length", 50, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["columns"] == ["X", "Y"] and len(doc["rows"]) == 50
    assert doc["config"]["eta"] == 0.2


# -- causality ---------------------------------------------------------------------

def test_causality_symbolic_worked_example(capsys, monkeypatch):
    rows = "\n".join(f"{a},{b}" for a, b in zip("101110", "110111"))
    monkeypatch.setattr("sys.stdin", io.StringIO("X,Y\n" + rows + "\n"))
    code, out, _ = run(capsys, "causality", "-", "--symbolic")
    report = json.loads(out)["report"]
    assert code == 0
    assert (report["penalty_x_to_y"], report["penalty_y_to_x"]) == (1, 1)
    assert report["raw_direction"] == "Tie"


def test_causality_identical_columns(capsys, tmp_path):
    path = tmp_path / "same.csv"
    path.write_text("a,b\n" + "".join(f"{v},{v}\n" for v in [0.1, 0.9, 0.4, 0.7, 0.2]))
    out_file = tmp_path / "report.json"
    code, out, _ = run(capsys, "causality", path, "--out", out_file)
    report = json.loads(out)["report"]
    assert code == 0 and (report["penalty_x_to_y"], report["penalty_y_to_x"]) == (0, 0)
    assert out_file.read_text() == out


def test_causality_ar_pair_direction(capsys, tmp_path):
    x, y = gen_coupled_ar(ARConfig(p=1, eta=0.8, seed=5))
    path = tmp_path / "pair.csv"
    np.savetxt(path, np.column_stack([x, y]), delimiter=",", header="X,Y", comments="")
    code, out, _ = run(capsys, "causality", path, "--seed", 5)
    table = run_ar_direction_experiment(eta_grid=[0.8], n_trials=20, seed=5)
    assert table.column("gap")[0] > 0
    assert code == 0 and json.loads(out)["report"]["direction"] == "YtoX"


def test_causality_rejects_three_columns(capsys, tmp_path):
    path = tmp_path / "wide.csv"
    path.write_text("a,b,c\n1,2,3\n4,5,6\n")
    code, _, err = run(capsys, "causality", path)
    assert code != 0 and "two columns" in err


def test_causality_csv_format(capsys, tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("1 0\n0 0\n1 1\n1 0\n")
    code, out, _ = run(capsys, "causality", path, "--symbolic", "--format", "csv")
    config, header, rows = parse_csv(out)
    assert code == 0 and "penalty_x_to_y" in header and len(rows) == 1
    assert config["symbolic"] is True


# -- tree -----------------------------------------------------------------------------

def test_tree_iris_gini(capsys, tmp_path, iris_path):
    code, out, _ = run(capsys, "tree", iris_path, "--criterion", "gini", "--out", tmp_path)
    doc = json.loads(out)
    assert code == 0 and 0.0 <= doc["metrics"]["macro_f1"] <= 1.0
    assert {p.name for p in tmp_path.iterdir()} == {"metrics.json", "tree.json", "tree.dot"}
    tree = load_results(tmp_path / "tree.json")
    assert isinstance(tree, DecisionTree) and tree.criterion.value == "gini"
    assert (tmp_path / "tree.dot").read_text().startswith("digraph")


def test_tree_ar_causal_ranking(capsys, tmp_path):
    code, out, _ = run(capsys, "tree", "ar", "--criterion", "causal", "--max-depth", 6,
                       "--min-samples", 2, "--out", tmp_path)
    assert code == 0 and json.loads(out)["ranking"] == [["Y", 1.0]]
    _, header, rows = parse_csv((tmp_path / "ranking.csv").read_text())
    assert header == ["feature", "causal_strength"] and rows == [["Y", "1.0"]]


def test_tree_ranking_on_request(capsys, tmp_path, iris_path):
    run(capsys, "tree", iris_path, "--criterion", "distance", "--ranking", "--out", tmp_path)
    _, _, rows = parse_csv((tmp_path / "ranking.csv").read_text())
    scores = [float(r[1]) for r in rows]
    assert scores == sorted(scores, reverse=True) and abs(sum(scores) - 1) < 1e-12


def test_tree_unknown_criterion(capsys, iris_path):
    with pytest.raises(SystemExit) as exc:
        main(["tree", str(iris_path), "--criterion", "entropy"])
    assert exc.value.code != 0 and "--criterion" in capsys.readouterr().err


def test_tree_missing_dataset(capsys):
    code, _, err = run(capsys, "tree", "does-not-exist.csv")
    assert code != 0 and "does-not-exist.csv" in err


def test_data_dir_env(capsys, monkeypatch, iris_path):
    monkeypatch.setenv("LZCAUSAL_DATA_DIR", str(iris_path.parent))
    code, out, _ = run(capsys, "tree", iris_path.name, "--criterion", "gini")
    assert code == 0 and json.loads(out)["config"]["n_train"] == 120


# -- bench --------------------------------------------------------------------------------

def test_bench_ar_direction_table(capsys, tmp_path):
    code, _, _ = run(capsys, "bench", "ar-direction", "--trials", 3, "--length", 200,
                     "--eta-grid", "0.2,0.8", "--out", tmp_path)
    config, header, rows = parse_csv((tmp_path / "ar-direction.csv").read_text())
    assert code == 0 and header[:2] == ["eta", "mean_penalty_x_to_y"] and len(rows) == 2
    summary = json.loads((tmp_path / "ar-direction.json").read_text())
    assert summary["config"] == config and summary["columns"] == header


def test_bench_sensitivity_and_logistic_stdout(capsys):
    code, out, _ = run(capsys, "bench", "sensitivity", "--trials", 2, "--length", 100,
                       "--a-grid", "0.1,0.9")
    assert code == 0 and parse_csv(out)[1][0] == "a"
    code, out, _ = run(capsys, "bench", "logistic", "--trials", 2, "--length", 100,
                       "--eta-grid", "0.1", "--format", "json")
    assert code == 0 and json.loads(out)["columns"][0] == "eta"


def test_bench_tuebingen_curve(capsys, tmp_path):
    (tmp_path / "pairs").mkdir()
    pairs = make_pairs(tmp_path / "pairs")
    out = tmp_path / "out"
    code, _, err = run(capsys, "bench", "tuebingen", "--pairs", pairs, "--exclude", "2",
                       "--out", out)
    config, header, rows = parse_csv((out / "tuebingen-curve.csv").read_text())
    assert code == 0 and header == ["k", "n_pairs", "accuracy"] and len(rows) == 100
    assert [int(r[0]) for r in rows] == list(range(1, 101))
    assert config["exclusions"] == [2] and "5 pairs" in err
    assert (out / "tuebingen-pairs.csv").exists()


def test_bench_tuebingen_needs_pairs(capsys, monkeypatch):
    monkeypatch.delenv("LZCAUSAL_DATA_DIR", raising=False)
    code, _, err = run(capsys, "bench", "tuebingen")
    assert code != 0 and "--pairs" in err


def test_bench_trees_iris(capsys, iris_path):
    code, out, _ = run(capsys, "bench", "trees", "--dataset", iris_path,
                       "--grid-min-samples", "1-2", "--grid-max-depth", "1-4")
    _, header, rows = parse_csv(out)
    assert code == 0 and [r[1] for r in rows] == ["causal", "distance", "gini"]
    assert [r[2] for r in rows] == ["timeseries", "stratified", "timeseries"]
    assert "macro_f1" in header


def test_bench_trees_requires_dataset(capsys):
    code, _, err = run(capsys, "bench", "trees")
    assert code != 0 and "--dataset" in err


# -- determinism ------------------------------------------------------------------------------

def snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


@pytest.mark.parametrize("argv", [
    ["bench", "ar-direction", "--trials", "4", "--length", "150", "--eta-grid", "0.3,0.6"],
    ["bench", "sensitivity", "--trials", "3", "--length", "150", "--a-grid", "0.2,0.7"],
    ["bench", "trees", "--dataset", "ar", "--grid-min-samples", "1-2", "--grid-max-depth", "1-3"],
])
def test_bench_identical_across_runs_and_jobs(capsys, tmp_path, argv):
    outputs = []
    for i, jobs in enumerate([1, 1, 3]):
        out = tmp_path / f"run{i}"
        assert main(argv + ["--seed", "11", "--jobs", str(jobs), "--out", str(out)]) == 0
        outputs.append(snapshot(out))
    capsys.readouterr()
    assert outputs[0] == outputs[1] == outputs[2]


def test_gen_and_tree_identical_across_runs(capsys, tmp_path, iris_path):
    texts = []
    for _ in range(2):
        run(capsys, "gen", "logistic", "--eta", 0.3, "--seed", 4, "--out", tmp_path / "g.csv")
        _, tree_out, _ = run(capsys, "tree", iris_path, "--criterion", "causal", "--seed", 4,
                             "--out", tmp_path / "t")
        texts.append(((tmp_path / "g.csv").read_bytes(), tree_out, snapshot(tmp_path / "t")))
    assert texts[0] == texts[1]
