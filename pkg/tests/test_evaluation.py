import csv
import math

import numpy as np
import pytest
from conftest import write_config

import rainbc.evaluation as ev
from rainbc.config import ConfigError, load_config
from rainbc.evaluation import (
    GAUGE,
    UNCORRECTED,
    PipelineError,
    apply_models,
    evaluate_corrected,
    fit_models,
    fmt,
    run_pipeline,
)
from rainbc.models import ModelFileError
from rainbc.synth import SynthSpec, synth_generate

REPORTS = ("metrics", "pod", "annual", "seasonality", "summary")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def run(tmp_path_factory, small_inputs):
    d = tmp_path_factory.mktemp("run")
    cfg = load_config(write_config(d / "run.ini", small_inputs, d / "out"))
    return cfg, run_pipeline(cfg)


def test_counting_contract(tmp_path):
    synth_generate(SynthSpec(n_stations=2, start_year=1996, end_year=2003), tmp_path)
    cfg = load_config(write_config(tmp_path / "c.ini", tmp_path, tmp_path / "out", "LOCI"))
    result = run_pipeline(cfg)
    by = lambda m: [r for r in result.reports if r.method == m]
    assert len(by("LOCI")) == 2 and len(by(UNCORRECTED)) == 2 and len(by(GAUGE)) == 2
    assert len(result.summaries) == 1
    assert not result.failures


def test_report_files_and_headers(run):
    cfg, _result = run
    rep = cfg.out / "reports"
    for name in REPORTS:
        assert (rep / f"{name}.csv").is_file()
    with open(rep / "metrics.csv") as fh:
        assert fh.readline().strip() == ",".join(ev.METRICS_HEADER)
    rows = read_csv(rep / "metrics.csv")
    assert {r["method"] for r in rows} == {UNCORRECTED, "LOCI", "QM"}
    assert all(len(r["me"].split(".")[1]) == 6 for r in rows)
    pods = read_csv(rep / "pod.csv")
    assert {r["category"] for r in pods} == {"Dry", "Heavy", "Violent"}
    curves = list((cfg.out / "curves").glob("*.csv"))
    assert len(curves) == 3
    src = {r["source"] for r in read_csv(curves[0])}
    assert src == {GAUGE, UNCORRECTED, "LOCI", "QM"}


def test_every_triple_reported_once(run):
    cfg, result = run
    seen = [(r.station_id, r.sre, r.method) for r in result.reports
            if r.method not in (GAUGE, UNCORRECTED)]
    seen += [(f.station_id, f.sre, f.method) for f in result.failures]
    expected = {(f"ST{i}", "SYN", m) for i in (1, 2, 3) for m in cfg.methods}
    assert sorted(seen) == sorted(expected)


def test_summary_matches_independent_aggregation(run):
    cfg, _ = run
    rows = read_csv(cfg.out / "reports" / "metrics.csv")
    base = {r["station_id"]: float(r["me"]) for r in rows if r["method"] == UNCORRECTED}
    summary = {r["method"]: r for r in read_csv(cfg.out / "reports" / "summary.csv")}
    for method in cfg.methods:
        mine = [r for r in rows if r["method"] == method]
        reduced = [r for r in mine if abs(float(r["me"])) < abs(base[r["station_id"]])]
        ok = [r for r in mine if r["me_acceptable"] == "true"]
        s = summary[method]
        assert int(s["n_stations"]) == len(mine)
        assert s["prop_reduced_me"] == fmt(len(reduced) / len(mine))
        assert s["prop_acceptable_me"] == fmt(len(ok) / len(mine))
        if reduced:
            assert float(s["mean_rsd_reduced"]) == pytest.approx(
                np.mean([float(r["rsd"]) for r in reduced]), abs=2e-6)


def test_reports_score_only_test_partition(run):
    _cfg, result = run
    r = result.report("ST1", "SYN", "LOCI")
    assert r.metrics.n == 3 * 365             # 2001-2003
    assert r.annual.season.tolist() == [2001, 2002, 2003]


def test_rerun_is_byte_identical_across_job_counts(run, tmp_path):
    cfg, result = run
    other = load_config(None, [f"gauge={cfg.gauge}", f"sre=SYN={cfg.sre['SYN']}",
                               "methods=LOCI,QM", "cap=150", "jobs=2", f"out={tmp_path}"])
    again = run_pipeline(other)
    for name in REPORTS:
        assert (tmp_path / "reports" / f"{name}.csv").read_bytes() == \
               (cfg.out / "reports" / f"{name}.csv").read_bytes()
    assert len(again.reports) == len(result.reports)


def test_failures_are_isolated(monkeypatch, small_inputs, tmp_path):
    real = ev.fit_method

    def flaky(pair, method, **kw):
        if pair.station_id == "ST2" and method == "QM":
            raise RuntimeError("boom")
        return real(pair, method, **kw)

    monkeypatch.setattr(ev, "fit_method", flaky)
    cfg = load_config(write_config(tmp_path / "c.ini", small_inputs, tmp_path / "out"))
    result = run_pipeline(cfg)
    assert [(f.station_id, f.method) for f in result.failures] == [("ST2", "QM")]
    assert "boom" in result.failures[0].error
    rows = read_csv(tmp_path / "out" / "reports" / "failures.csv")
    assert rows[0]["station_id"] == "ST2"
    assert result.summaries and len(result.succeeded_stations) == 3


def test_all_failing_is_pipeline_error(monkeypatch, small_inputs, tmp_path):
    def broken(*a, **k):
        raise RuntimeError("nope")

    monkeypatch.setattr(ev, "fit_method", broken)
    cfg = load_config(write_config(tmp_path / "c.ini", small_inputs, tmp_path / "out"))
    with pytest.raises(PipelineError):
        run_pipeline(cfg)
    assert len(read_csv(tmp_path / "out" / "reports" / "failures.csv")) == 6


def test_fit_apply_evaluate_matches_run(run, tmp_path):
    cfg, _ = run
    split = load_config(None, [f"gauge={cfg.gauge}", f"sre=SYN={cfg.sre['SYN']}",
                               "methods=LOCI,QM", "cap=150", f"out={tmp_path}"])
    with pytest.raises(ModelFileError, match="run fit first"):
        apply_models(split)
    manifest, failures = fit_models(split)
    assert len(manifest["models"]) == 6 and not failures
    apply_models(split)
    for m in ("LOCI", "QM"):
        assert (tmp_path / "corrected" / "SYN" / f"{m}.csv").read_bytes() == \
               (cfg.out / "corrected" / "SYN" / f"{m}.csv").read_bytes()
    evaluate_corrected(split)
    for name in REPORTS:
        assert (tmp_path / "reports" / f"{name}.csv").read_bytes() == \
               (cfg.out / "reports" / f"{name}.csv").read_bytes()


def test_apply_rejects_mismatched_settings(run, tmp_path):
    cfg, _ = run
    base = [f"gauge={cfg.gauge}", f"sre=SYN={cfg.sre['SYN']}", "methods=LOCI",
            f"out={tmp_path}"]
    fit_models(load_config(None, base))
    with pytest.raises(ConfigError, match="threshold"):
        apply_models(load_config(None, base + ["threshold=1.2"]))
    with pytest.raises(ConfigError, match="QM"):
        apply_models(load_config(None, base[:2] + ["methods=LOCI,QM", f"out={tmp_path}"]))


def test_fmt():
    assert fmt(None) == "" and fmt(math.nan) == ""
    assert fmt(-0.0000001) == "0.000000"
    assert fmt(1 / 3) == "0.333333"
    assert fmt(np.True_) == "true" and fmt(7) == "7"
