import csv
import json

import pytest

from conftest import fig2_titles
from litcapture.cli import main, read_config_file
from litcapture.suites import half_shared_pair, special_cases


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_estimate_petersen(capsys):
    code, out, _ = run(capsys, "estimate", "petersen", "--n1", 43, "--n2", 55, "--r", 20)
    data = json.loads(out)
    assert code == 0 and data["schema_version"] == 1
    assert data["point"] == 118.25 and data["stddev"] == pytest.approx(14.298, abs=0.005)
    assert data["manifest"]["subcommand"] == "estimate"


def test_estimate_zero_recapture(capsys):
    code, out, err = run(capsys, "estimate", "petersen", "--n1", 5, "--n2", 5, "--r", 0)
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "ZeroRecapture"


def test_estimate_schnabel_sets(tmp_path, capsys):
    path = tmp_path / "captures.csv"
    path.write_text("a,b\nb,c\n")
    code, out, _ = run(capsys, "estimate", "schnabel", "--sets", path)
    assert code == 0 and json.loads(out)["point"] == 4.0


def test_estimate_schnabel_counts(tmp_path, capsys):
    path = tmp_path / "counts.csv"
    path.write_text("n,r,m\n43,0,0\n55,20,43\n")
    code, out, _ = run(capsys, "estimate", "schnabel", "--counts", path)
    assert code == 0 and json.loads(out)["point"] == 118.25
    code, _, err = run(capsys, "estimate", "schnabel")
    assert code == 2 and json.loads(err)["error"] == "InvalidParams"


def write_csv_list(path, titles):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["title", "authors", "year"])
        for t in titles:
            w.writerow([t, "A. Author", 2020])
    return path


def coverage(tmp_path, capsys, t1, t2, *extra):
    f1 = write_csv_list(tmp_path / "e1.csv", t1)
    f2 = write_csv_list(tmp_path / "e2.csv", t2)
    out_dir = tmp_path / "out"
    code, out, err = run(capsys, "coverage", f1, f2, "--out", out_dir, *extra)
    return code, out, err, out_dir


def test_coverage_identical(tmp_path, capsys):
    titles = [f"t{i}" for i in range(80)]
    code, out, _, out_dir = coverage(tmp_path, capsys, titles, titles)
    assert code == 0
    klass = json.loads((out_dir / "class.json").read_text())
    assert klass["class"] == "TypeIV" and klass["rationale"] == "degenerate: identical inputs"
    rows = list(csv.DictReader(open(out_dir / "series.csv")))
    assert len(rows) == 80 and {r["C"] for r in rows} == {"1.0"}
    assert json.loads((out_dir / "manifest.json").read_text())["schema_version"] == 1


def test_coverage_disjoint(tmp_path, capsys):
    code, out, _, _ = coverage(
        tmp_path, capsys, [f"a{i}" for i in range(500)], [f"b{i}" for i in range(500)]
    )
    assert code == 0 and json.loads(out)["class"] == "TypeI"


def test_coverage_fig2(tmp_path, capsys):
    l1, l2 = fig2_titles()
    code, _, _, out_dir = coverage(tmp_path, capsys, l1, l2, "--max-n", 100)
    klass = json.loads((out_dir / "class.json").read_text())
    assert klass["class"] == "TypeII"
    by_kind = {p["kind"]: p["n"] for p in klass["stopping_points"]}
    assert 15 <= by_kind["LocalMin"] <= 25 and 45 <= by_kind["LocalMax"] <= 75
    points = json.loads((out_dir / "stopping_points.json").read_text())
    assert len(points["information_gain"]) == 99


def test_coverage_parse_error(tmp_path, capsys):
    good = write_csv_list(tmp_path / "good.csv", ["x"])
    bad = tmp_path / "bad.ris"
    bad.write_text("TY  - JOUR\nTI  - never ends\n")
    code, _, err = run(capsys, "coverage", good, bad, "--out", tmp_path / "o")
    payload = json.loads(err)
    assert code == 2 and payload["error"] == "ParseError"
    assert "bad.ris" in payload["message"] and "record 1" in payload["message"]


def write_ranking(path, ids):
    path.write_text("\n".join(str(i) for i in ids) + "\n")
    return path


def test_similarity(tmp_path, capsys):
    ids = list(range(1000))
    a = write_ranking(tmp_path / "a.txt", ids)
    rev = write_ranking(tmp_path / "r.txt", ids[::-1])
    other = write_ranking(tmp_path / "o.txt", range(1000, 2000))
    code, out, _ = run(capsys, "similarity", a, a)
    data = json.loads(out)
    assert (data["s"], data["kendall"], data["overlap"], data["n"]) == (1.0, 1.0, 1.0, 1000)
    curve = tmp_path / "curve.csv"
    code, out, _ = run(capsys, "similarity", a, rev, "--curve", curve)
    assert 0.745 <= json.loads(out)["s"] <= 0.755
    assert open(curve).readline().strip() == "j,R"
    code, out, _ = run(capsys, "similarity", a, other)
    data = json.loads(out)
    assert data["s"] == 0.0 and data["overlap"] == 0.0


def test_similarity_errors(tmp_path, capsys):
    a = write_ranking(tmp_path / "a.txt", [1, 2, 3])
    short = write_ranking(tmp_path / "b.txt", [1, 2])
    dup = write_ranking(tmp_path / "d.txt", [1, 1, 2])
    assert run(capsys, "similarity", a, short)[0] == 2
    code, _, err = run(capsys, "similarity", a, dup)
    assert code == 2 and json.loads(err)["error"] == "DuplicateIds"
    code, _, err = run(capsys, "similarity", a, tmp_path / "missing.txt")
    assert code == 2 and json.loads(err)["error"] == "FileError"


def test_special_cases_small(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, _ = run(capsys, "special-cases", "--n", 40, "--trials", 30, "--seed", 3, "--out", out)
    report = json.loads(out.read_text())
    assert code == 0 and report["schema_version"] == 1
    assert report["asymmetry"]["first_beats_second_every_trial"]
    assert report["random_permutation"]["pearson_s_overlap"] is None


def test_special_cases_thread_independent():
    assert special_cases(20, 25, seed=9, threads=1) == special_cases(20, 25, seed=9, threads=3)


def test_special_cases_odd_n():
    report = special_cases(7, 5, seed=0)
    assert "skipped" in report["first_half_shared"]
    with pytest.raises(Exception):
        half_shared_pair(7, None)


SIM_ARGS = ["--initial-n", 300, "--attach-m", 3, "--churn-mean", 30, "--churn-std", 3,
            "--top-k", 50, "--iterations", 6]


def test_simulate_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        code, _, _ = run(capsys, "simulate", *SIM_ARGS, "--seed", 4, "--out", tmp_path / name)
        assert code == 0
    a = (tmp_path / "a" / "records.csv").read_bytes()
    assert a == (tmp_path / "b" / "records.csv").read_bytes()
    assert a.splitlines()[0] == b"step,s,kendall,overlap,graph_size"
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["summary"]["steps_recorded"] == 6
    assert json.loads((tmp_path / "a" / "manifest.json").read_text())["seed"] == 4


def test_simulate_zero_churn(tmp_path, capsys):
    args = SIM_ARGS[:]
    args[5], args[7] = 0, 0
    code, _, _ = run(capsys, "simulate", *args, "--seed", 1, "--out", tmp_path)
    rows = list(csv.DictReader(open(tmp_path / "records.csv")))
    assert code == 0 and {r["s"] for r in rows} == {"1.0"}


def test_simulate_config_file_and_flags(tmp_path, capsys):
    cfg = tmp_path / "churn.conf"
    cfg.write_text("# small run\ninitial_n = 300\nattach-m = 3\nchurn_mean = 30  # mean\n"
                   "churn_std = 3\ntop_k = 50\niterations = 2\nseed = 8\n")
    assert read_config_file(cfg)["attach_m"] == "3"
    code, out, _ = run(capsys, "simulate", "--config", cfg, "--iterations", 3, "--out", tmp_path / "o")
    data = json.loads(out)
    assert code == 0 and data["config"]["iterations"] == 3 and data["config"]["seed"] == 8


def test_simulate_requires_seed(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", *SIM_ARGS, "--out", tmp_path)
    assert code == 2 and "seed" in json.loads(err)["message"]


def test_simulate_nonconvergence_exit(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", *SIM_ARGS, "--max-iter", 2, "--seed", 1, "--out", tmp_path)
    assert code == 3 and json.loads(err)["error"] == "NotConverged"
