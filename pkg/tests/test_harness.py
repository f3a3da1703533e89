import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from lpplab.harness import (
    Budget,
    BudgetExceededError,
    COLUMNS,
    ExperimentConfig,
    _replica_rows,
    analyze,
    check_budget,
    load_record,
    plot_data_csv,
    run,
    wishart_lambda_max,
    wishart_probe,
)
from lpplab.weights import exponential, gaussian, pareto, uniform


def _strip_timestamp(path):
    with open(path) as fh:
        return [l for l in fh if not l.startswith("# timestamp")]


def _smoke_config(tmp_path, name="rec.csv", replicas=2, seed=0):
    return ExperimentConfig(
        kind="theorem1",
        families=(gaussian(),),
        a=0.3,
        n_grid=(1000,),
        replicas=replicas,
        master_seed=seed,
        output_path=str(tmp_path / name),
    )


def test_smoke_contract(tmp_path):
    rec = run(_smoke_config(tmp_path))
    assert len(rec.rows) == 2
    assert rec.summary["per_n"][0]["ks_tw"] is not None
    assert rec.summary["complete"] is True
    assert os.path.exists(rec.path)
    assert os.path.exists(rec.path + ".summary.json")
    assert not os.path.exists(rec.path + ".ckpt")


def test_determinism_modulo_timestamp(tmp_path):
    a = run(_smoke_config(tmp_path, "a.csv", replicas=3))
    b = run(_smoke_config(tmp_path, "b.csv", replicas=3))
    la = _strip_timestamp(a.path)
    lb = _strip_timestamp(b.path)
    # output filename is not part of the record header
    assert la == lb
    assert a.rows == b.rows


def test_resume_matches_uninterrupted(tmp_path):
    full = run(_smoke_config(tmp_path, "full.csv", replicas=4))
    # simulate a killed run: checkpoint holds replicas 0 and 2 only
    config = _smoke_config(tmp_path, "resumed.csv", replicas=4)
    with open(config.output_path + ".ckpt", "w") as ck:
        for rep in (0, 2):
            rows = _replica_rows(config, rep)
            ck.write(
                f"{rep}|" + "|".join(",".join(repr(v) for v in r) for r in rows) + "\n"
            )
        ck.write("3|1000,3,")  # torn final line: must be recomputed
    resumed = run(config)
    assert resumed.rows == full.rows
    assert _strip_timestamp(resumed.path) == _strip_timestamp(full.path)
    assert not os.path.exists(config.output_path + ".ckpt")


def test_roundtrip_through_load_record(tmp_path):
    rec = run(_smoke_config(tmp_path, replicas=3))
    back = load_record(rec.path)
    assert back.rows == rec.rows
    assert back.config.kind == "theorem1"
    assert back.config.a == 0.3
    assert back.config.families == rec.config.families
    assert back.summary["replicas"] == 3


def test_config_file_parsing(tmp_path):
    p = tmp_path / "exp.ini"
    p.write_text(
        "[experiment]\n"
        "kind = exponent_chi\n"
        "a = 0.5\n"
        "n_grid = 1000, 3162, 10000\n"
        "replicas = 50\n"
        "master_seed = 7\n"
        f"output = {tmp_path / 'out.csv'}\n"
        "[weights]\n"
        "family = exponential\n"
        "rate = 2.0\n"
        "[budget]\n"
        "max_memory_mb = 512\n"
    )
    cfg = ExperimentConfig.from_file(str(p))
    assert cfg.kind == "exponent_chi"
    assert cfg.n_grid == (1000, 3162, 10000)
    assert cfg.family.family == "exponential"
    assert cfg.family.params["rate"] == 2.0
    assert cfg.replicas == 50
    assert cfg.master_seed == 7
    assert cfg.budget.max_memory_mb == 512


def test_config_multi_family_parsing(tmp_path):
    p = tmp_path / "exp.ini"
    p.write_text(
        "[experiment]\n"
        "kind = universality\n"
        "a = 0.3\n"
        "n_grid = 100\n"
        "replicas = 5\n"
        "[weights]\n"
        "families = family=exponential, rate=1.0 | family=uniform, a=0.0, b=1.0\n"
    )
    cfg = ExperimentConfig.from_file(str(p))
    assert len(cfg.families) == 2
    assert cfg.families[0].family == "exponential"
    assert cfg.families[1].family == "uniform"


def test_invalid_config_rejected():
    with pytest.raises(ValueError):
        ExperimentConfig(kind="nonsense")
    with pytest.raises(ValueError):
        ExperimentConfig(kind="theorem1", families=(gaussian(),), a=1.5)
    with pytest.raises(ValueError):
        ExperimentConfig(kind="theorem1", families=(gaussian(),), a=0.3, replicas=0)


def test_budget_refusal():
    cfg = ExperimentConfig(
        kind="theorem1",
        families=(gaussian(),),
        a=0.3,
        n_grid=(10**9,),
        replicas=2,
        budget=Budget(max_memory_mb=1.0),
        output_path="unused.csv",
    )
    with pytest.raises(BudgetExceededError) as exc:
        check_budget(cfg)
    assert exc.value.estimate_mb > exc.value.budget_mb
    assert "MB" in str(exc.value)


def test_theorem_constraint_warning_pareto():
    cfg = ExperimentConfig(
        kind="theorem1", families=(pareto(2.5),), a=0.3, n_grid=(100,), replicas=1
    )
    warns = cfg.theorem_constraint_warnings()
    assert len(warns) == 1 and "outside the proved range" in warns[0]
    ok = ExperimentConfig(
        kind="theorem1", families=(gaussian(),), a=0.3, n_grid=(100,), replicas=1
    )
    assert ok.theorem_constraint_warnings() == []


def test_load_record_schema_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    with pytest.raises(ValueError, match="bad.csv"):
        load_record(str(bad))
    mism = tmp_path / "mism.csv"
    mism.write_text("# kind = theorem1\nwrong,cols,here\n1,2,3\n")
    with pytest.raises(ValueError, match="schema mismatch"):
        load_record(str(mism))
    unk = tmp_path / "unk.csv"
    unk.write_text("# kind = martian\nn,replica,T\n")
    with pytest.raises(ValueError, match="martian"):
        load_record(str(unk))


def test_analyze_single_record_passthrough(tmp_path):
    rec = run(_smoke_config(tmp_path, replicas=3))
    report = analyze([rec.path])
    assert report["records"][0]["kind"] == "theorem1"
    assert report["records"][0]["summary"]["per_n"][0]["n"] == 1000


def test_analyze_identical_records_ks_zero(tmp_path):
    a = run(_smoke_config(tmp_path, "a.csv", replicas=5))
    b = run(_smoke_config(tmp_path, "b.csv", replicas=5))
    report = analyze([a.path, b.path])
    assert report["universality_ks"][0]["ks"] == 0.0


def test_plot_data_csv(tmp_path):
    rec = run(_smoke_config(tmp_path, replicas=3))
    report = analyze([rec.path])
    text = plot_data_csv(report)
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,series"
    assert any("ks_tw" in l for l in lines[1:])


def test_gue_check_kind(tmp_path):
    cfg = ExperimentConfig(
        kind="gue_check",
        k_grid=(2, 5),
        replicas=200,
        output_path=str(tmp_path / "gue.csv"),
    )
    rec = run(cfg)
    assert len(rec.rows) == 400
    per_k = {d["k"]: d for d in rec.summary["per_k"]}
    # edge expansion 2*sqrt(k) + k^(-1/6) * E[TW] with E[TW] ~ -1.771
    expected = 2 * math.sqrt(5) + 5 ** (-1.0 / 6.0) * (-1.771)
    assert abs(per_k[5]["mean"] - expected) < 0.2


def test_wishart_k1_closed_form_moment():
    n, N = 100, 3000
    s = wishart_probe(gaussian(), n=n, k=1, replicas=N, seed=0)
    # lambda_max = sum of n squared standard normals: mean n, var 2n
    se = math.sqrt(2.0 * n / N)
    assert abs(s.values.mean() - n) < 3 * se


def test_wishart_lambda_max_against_dense_oracle():
    rng = np.random.default_rng(1)
    for _ in range(20):
        A = rng.standard_normal((30, 6))
        lam = wishart_lambda_max(A)
        dense = float(np.linalg.eigvalsh(A @ A.T).max())
        assert lam == pytest.approx(dense, rel=1e-6)
        assert lam >= np.trace(A.T @ A) / 6 - 1e-9


def test_wishart_probe_limits():
    with pytest.raises(ValueError):
        wishart_probe(gaussian(), n=100, k=300, replicas=1, seed=0)


def _run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "lpplab.cli", *args],
        capture_output=True,
        text=True,
    )


def test_cli_tw_table(tmp_path):
    out = tmp_path / "tw.csv"
    r = _run_cli(
        "tw-table", "--min", "-3", "--max", "0", "--step", "0.5", "--order", "60",
        "--out", str(out),
    )
    assert r.returncode == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "s,F"
    assert len(lines) == 8
    vals = [tuple(map(float, l.split(","))) for l in lines[1:]]
    assert all(0.0 <= F <= 1.0 for _, F in vals)
    assert vals == sorted(vals)


def test_cli_simulate_and_report(tmp_path):
    ini = tmp_path / "exp.ini"
    out = tmp_path / "rec.csv"
    ini.write_text(
        "[experiment]\n"
        "kind = theorem1\n"
        "a = 0.3\n"
        "n_grid = 200\n"
        "replicas = 3\n"
        f"output = {out}\n"
        "[weights]\n"
        "family = gaussian\n"
        "mean = 0.0\n"
        "std = 1.0\n"
    )
    r = _run_cli("simulate", str(ini))
    assert r.returncode == 0, r.stderr
    assert out.exists()
    rep_dir = tmp_path / "report"
    r2 = _run_cli("report", str(out), "--out", str(rep_dir))
    assert r2.returncode == 0, r2.stderr
    report = json.loads((rep_dir / "report.json").read_text())
    assert report["records"][0]["kind"] == "theorem1"
    assert (rep_dir / "plot_data.csv").exists()


def test_cli_error_funnel():
    r = _run_cli("simulate", "/nonexistent/path.ini")
    assert r.returncode == 2
    assert r.stderr.startswith("error: ")
    payload = json.loads(r.stderr.split("error: ", 1)[1])
    assert "message" in payload and "error" in payload


def test_workers_env_parallel_matches_serial(tmp_path):
    serial = run(_smoke_config(tmp_path, "serial.csv", replicas=4))
    os.environ["LPPLAB_WORKERS"] = "2"
    try:
        par = run(_smoke_config(tmp_path, "par.csv", replicas=4))
    finally:
        del os.environ["LPPLAB_WORKERS"]
    assert par.rows == serial.rows
    assert _strip_timestamp(par.path) == _strip_timestamp(serial.path)
