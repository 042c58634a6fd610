import json

import numpy as np
import pytest

from mfratio import (MixedGrid, ScalingModel, ingest_series, parse_config, read_realization,
                     sample_mrw, structure_function, write_realization)
from mfratio.cli import main
from mfratio.errors import NonNumeric, ParseError, ShapeError, ValidationError
from mfratio.io import write_mc_reports

CASCADE = "process: cascade\nfamily: lognormal\nlambda2: 0.1\nn: 10\nchi: 0.5\nq: [2]\n"


def test_minimal_config_defaults():
    cfg = parse_config(CASCADE)
    assert cfg.L == 32
    assert (cfg.T, cfg.oversample, cfg.depth_extra, cfg.R) == (1.0, 3, 12, 200)
    assert cfg.model.log_base == "base2"


def test_config_from_file_and_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"process": "mrm", "family": "stable", "alpha": 1.5, "sigma": 0.2,
                             "n": 8, "q": [1, 2], "seed": 5}))
    cfg = parse_config(str(p))
    assert cfg.master_seed == 5 and cfg.model.family == "stable_super"


def test_config_rejections():
    with pytest.raises(ValidationError, match="2q ≥ q_χ"):
        parse_config(CASCADE.replace("[2]", "[3]") + "theorem: cascade-clt\n")
    with pytest.raises(ParseError, match="family"):
        parse_config("process: cascade\nlambda2: 0.1\nn: 10\nq: [2]\n")
    with pytest.raises(ParseError, match="line 2"):
        parse_config("process: cascade\nfamly: lognormal\n")
    with pytest.raises(ParseError, match="line"):
        parse_config("process: [cascade\n")


def test_config_aggregates_violations():
    text = ("process: mrw\nfamily: lognormal\nlambda2: 0.1\nH: 1.2\nn: 0\nq: [1]\nR: 10\n")
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    v = info.value.violations
    assert len(v) >= 3 and any("H" in s for s in v) and any("R" in s for s in v)
    with pytest.raises(ValidationError, match=r"H - psi\(2\)/2"):
        parse_config("process: mrw\nfamily: lognormal\nlambda2: 0.4\nH: 0.6\nn: 5\nq: [1]\n")


def _series(path, values, col="x"):
    path.write_text(col + "\n" + "\n".join(repr(float(v)) for v in values) + "\n")
    return str(path)


def test_ingest_series(tmp_path):
    r = ingest_series(_series(tmp_path / "a.csv", np.arange(1024)), "increments")
    assert (r.grid.n, r.grid.L) == (10, 1)
    r = ingest_series(_series(tmp_path / "b.csv", np.ones(32 * 1024)), "increments", L=32)
    assert r.values.shape == (32, 1024)
    lv = np.cumsum(np.random.default_rng(0).normal(size=1025))
    r = ingest_series(_series(tmp_path / "c.csv", lv), "levels")
    assert r.values.shape == (1, 1024) and np.allclose(r.values[0], np.diff(lv))
    with pytest.raises(ShapeError):
        ingest_series(_series(tmp_path / "d.csv", np.ones(1000)))
    with pytest.raises(ShapeError):
        ingest_series(_series(tmp_path / "e.csv", np.ones(8), col="y"))
    (tmp_path / "f.csv").write_text("x\n1.0\nabc\n")
    with pytest.raises(NonNumeric, match="line 3"):
        ingest_series(str(tmp_path / "f.csv"))


def test_realization_round_trip(tmp_path):
    m = ScalingModel.lognormal(0.05)
    real = sample_mrw(m, 0.65, MixedGrid(7, 0.5, 1), 2, 3)
    path = str(tmp_path / "r.csv")
    write_realization(real, path)
    back = read_realization(path, chi=0.5)
    assert np.array_equal(back.values, real.values)
    assert back.kind == "increments"
    q = [0.5, 1.5, 3.0]
    a = structure_function(real, q, [4, 5, 6, 7]).S
    b = structure_function(back, q, [4, 5, 6, 7]).S
    assert np.allclose(a, b, rtol=1e-12, atol=0)


def test_cli_simulate_deterministic(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(CASCADE.replace("n: 10", "n: 6") + "depth_extra: 3\n")
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(["simulate", "-c", str(cfg), "--seed", "7", "--out", a]) == 0
    assert main(["--seed", "7", "simulate", "-c", str(cfg), "--out", b]) == 0
    assert open(a).read() == open(b).read()
    assert main(["estimate", "--in", a, "--q", "1,2", "--method", "ratio"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["zeta_tilde"][0] == 1.0
    assert main(["estimate", "--in", a, "--q", "2", "--format", "csv",
                 "--out", str(tmp_path / "e.csv")]) == 0
    assert open(tmp_path / "e.csv").read().startswith("q,zeta,")


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["frobnicate"]) == 1
    assert main(["simulate"]) == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text(CASCADE.replace("[2]", "[3]") + "theorem: cascade-clt\n")
    assert main(["verify", "-c", str(bad)]) == 2
    assert "2q ≥ q_χ = 5.477" in capsys.readouterr().err
    assert main(["simulate", "-c", str(tmp_path / "missing.yaml")]) == 1


def test_cli_verify_and_report(tmp_path, capsys):
    cfg = tmp_path / "thm.yaml"
    cfg.write_text("process: cascade\nfamily: lognormal\nlambda2: 0.1\nn: 6\nchi: 0.5\nq: [2]\n"
                   "R: 50\ndepth_extra: 2\nlevels: [3, 4, 5, 6]\ntheorem: cascade-clt\n")
    out = str(tmp_path / "mc.json")
    assert main(["verify", "-c", str(cfg), "--out", out, "--threads", "2"]) == 0
    reps = json.load(open(out))
    assert {r["estimator"] for r in reps} == {"zeta_tilde", "zeta_hat"}
    assert all(r["ks_pvalue"] is not None and r["rate_slope"] is not None for r in reps)
    capsys.readouterr()
    assert main(["report", "--in", out, "--data-dir", str(tmp_path / "dat")]) == 0
    table = capsys.readouterr().out
    assert "zeta_tilde" in table and "ks_p" in table
    assert len(list((tmp_path / "dat").iterdir())) == 2


def test_mc_csv_one_row_per_replication(tmp_path):
    from mfratio import summarize
    rep = summarize(np.random.default_rng(0).normal(size=60), 0.0)
    text = write_mc_reports([rep], None, "csv")
    assert len(text.strip().splitlines()) == 61
