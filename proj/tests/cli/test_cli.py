import json
import os
import subprocess

import pytest

EXE = os.environ.get("LBRIDGE_EXE", "lbridge")


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("LB_SEED", None)
    if env:
        full_env.update(env)
    return subprocess.run([EXE, *args], capture_output=True, text=True, env=full_env)


def write_lines(path, objs):
    path.write_text("".join(json.dumps(o) + "\n" for o in objs))
    return str(path)


def gaussian(rid, mean, var, label=None):
    rec = {"id": rid, "mean": mean, "cov": {"type": "diag", "data": var}}
    if label is not None:
        rec["label"] = label
    return rec


def test_bridge_round_trip(tmp_path):
    alphas = [[1.0, 2.0, 3.0], [0.01, 5e5, 7.25], [1e-3, 1e6, 0.5]]
    src = write_lines(tmp_path / "d.jsonl", [{"id": f"r{i}", "alpha": a} for i, a in enumerate(alphas)])
    g = tmp_path / "g.jsonl"
    back = tmp_path / "back.jsonl"
    assert run("bridge", "forward", "--input", src, "--output", str(g)).returncode == 0
    assert run("bridge", "inverse", "--input", str(g), "--output", str(back)).returncode == 0
    recs = [json.loads(line) for line in back.read_text().splitlines()]
    assert [r["id"] for r in recs] == ["r0", "r1", "r2"]
    for a, r in zip(alphas, recs):
        for x, y in zip(a, r["alpha"]):
            assert abs(x - y) <= 1e-10 * max(a)


def test_bridge_diag_output(tmp_path):
    src = write_lines(tmp_path / "d.jsonl", [{"id": "a", "alpha": [1, 1, 1]}])
    res = run("bridge", "forward", "--input", src, "--cov", "diag")
    assert res.returncode == 0
    rec = json.loads(res.stdout)
    assert rec["cov"]["type"] == "diag"
    assert rec["cov"]["data"] == pytest.approx([2 / 3] * 3, rel=1e-14)


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "a", "alpha": [1, 2]}\n{"id": "b", "alpha": [1, \n')
    res = run("bridge", "forward", "--input", str(path))
    assert res.returncode == 2
    assert "line 2" in res.stderr


def test_domain_error_exit_code(tmp_path):
    src = write_lines(tmp_path / "g.jsonl", [gaussian("z", [0, 0], [1, 0])])
    res = run("bridge", "inverse", "--input", src)
    assert res.returncode == 3
    assert "z" in res.stderr


def test_usage_errors(tmp_path):
    assert run("bridge", "sideways", "--input", "x").returncode == 2
    assert run("bridge", "forward", "--input", str(tmp_path / "missing.jsonl")).returncode == 2
    assert run("kl", "--samples", "1000", env={"LB_SEED": "abc"}).returncode == 2


def test_ood_identical_files(tmp_path):
    recs = [gaussian(f"r{i}", [i * 0.3, 0.0, -0.2], [0.5, 0.2, 0.1]) for i in range(10)]
    src = write_lines(tmp_path / "g.jsonl", recs)
    res = run("ood", "--input", src, "--ood", src, "--method", "lb")
    assert res.returncode == 0
    report = dict(line.split(": ", 1) for line in res.stdout.strip().splitlines())
    assert float(report["auroc"]) == 0.5
    assert report["seed"] == "1234"


def test_ood_separable_and_lb_vs_mc(tmp_path):
    confident = [gaussian(f"c{i}", [6.0, 0.0, 0.0], [0.1, 0.1, 0.1]) for i in range(20)]
    diffuse = [gaussian(f"d{i}", [0.1, 0.0, 0.0], [3.0, 3.0, 3.0]) for i in range(20)]
    a = write_lines(tmp_path / "in.jsonl", confident)
    b = write_lines(tmp_path / "out.jsonl", diffuse)
    reports = {}
    for method in ("lb", "mc", "mackay", "sodpp"):
        res = run("ood", "--input", a, "--ood", b, "--method", method, "--seed", "7")
        assert res.returncode == 0, res.stderr
        reports[method] = dict(line.split(": ", 1) for line in res.stdout.strip().splitlines())
        assert float(reports[method]["auroc"]) >= 0.99
    assert abs(float(reports["lb"]["mmc_in"]) - float(reports["mc"]["mmc_in"])) <= 0.05


def test_topk_report_and_missing_label(tmp_path):
    recs = [gaussian("a", [5.0, 0.0, 0.0], [0.01, 0.01, 0.01], 0),
            gaussian("b", [0.0, 0.0, 0.0], [0.01, 0.01, 0.01], 2)]
    src = write_lines(tmp_path / "t.jsonl", recs)
    hist = tmp_path / "h.csv"
    res = run("topk", "--input", src, "--output", str(hist))
    assert res.returncode == 0, res.stderr
    assert hist.read_text().splitlines()[0] == "k,count"
    unlabeled = write_lines(tmp_path / "u.jsonl", [gaussian("x", [0.0, 0.0], [1.0, 1.0])])
    assert run("topk", "--input", unlabeled).returncode == 2


def test_kl_and_fig2_are_deterministic(tmp_path):
    a = run("kl", "--samples", "2000", "--bins", "10", "--seed", "3")
    b = run("kl", "--samples", "2000", "--bins", "10", "--seed", "3", "--threads", "1")
    assert a.returncode == 0

    def data_columns(out):
        return [line.split(",")[:4] for line in out.splitlines()]

    assert data_columns(a.stdout) == data_columns(b.stdout)
    by_set = {}
    for row in data_columns(a.stdout)[1:]:
        by_set.setdefault(row[0], set()).add(row[3])
    assert len(by_set) == 3
    assert all(len(v) == 1 for v in by_set.values())
    assert a.stdout.splitlines()[0] == (
        "gaussian,sample_count,kl_sampling,kl_lb,wall_time_sampling,wall_time_lb")
    fig = run("fig2", "--pair", "0.8,0.9", "--grid", "32")
    assert fig.returncode == 0
    rows = fig.stdout.strip().splitlines()
    assert len(rows) == 33
    assert all(r.split(",")[5] == "absent" for r in rows[1:])


def test_bench_report():
    res = run("bench", "--batch", "50", "--classes", "4", "--repeats", "1")
    assert res.returncode == 0, res.stderr
    report = dict(line.split(": ", 1) for line in res.stdout.strip().splitlines())
    assert report["seed"] == "1234"
    for n in (10, 100, 1000):
        assert float(report[f"speedup_mc{n}_over_lb"]) >= 1.0
