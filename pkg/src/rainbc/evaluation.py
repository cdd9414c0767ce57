"""Fit, apply and score every (station, SRE product, method) combination.

Models are fitted on the training partition and scored on the test
partition against the gauge, next to the uncorrected SRE. Each combination is
an independent work unit seeded from ``(master seed, station, product,
method)``, so serial and parallel runs give identical files.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig
from .core import DailySeries, EventCategory, PairedSeries
from .ingest import build_pairs, read_series, write_series
from .metrics import MetricReport, acceptable_me, compute_metrics, contingency, pod
from .models import ModelFileError, derive_seed, fit_method, load_model, save_model
from .seasonality import AnnualStats, annual_stats, fit_occurrence, occurrence_curve

log = logging.getLogger(__name__)

GAUGE = "gauge"
UNCORRECTED = "uncorrected"
DOY = np.arange(1, 367)

METRICS_HEADER = ("station_id", "sre", "method", "n", "me", "corr", "rsd", "rmse",
                  "mae", "nse", "me_acceptable")
POD_HEADER = ("station_id", "sre", "method", "category", "hits", "misses",
              "false_alarms", "pod")
ANNUAL_HEADER = ("station_id", "sre", "method", "season", "rainy_days", "total_mm",
                 "mean_per_rainy_day")
SEASONALITY_HEADER = ("station_id", "sre", "method", "doy", "probability")
SUMMARY_HEADER = ("sre", "method", "n_stations", "prop_reduced_me", "mean_rsd_reduced",
                  "prop_acceptable_me", "mean_rsd_acceptable")
FAILURE_HEADER = ("station_id", "sre", "method", "error")
CURVE_HEADER = ("source", "doy", "probability")


class PipelineError(RuntimeError):
    """Raised when no station could be processed."""


@dataclass(frozen=True)
class EvaluationReport:
    station_id: str
    sre: str
    method: str
    metrics: MetricReport | None            # None for the gauge itself
    me_acceptable: bool | None
    contingencies: dict                     # EventCategory -> Contingency
    annual: AnnualStats
    curve: np.ndarray | None                # occurrence probability, doy 1..366

    def pod(self, category: EventCategory) -> float | None:
        return pod(self.contingencies[category])


@dataclass(frozen=True)
class BubbleSummary:
    sre: str
    method: str
    n_stations: int
    prop_reduced_me: float
    mean_rsd_reduced: float | None
    prop_acceptable_me: float
    mean_rsd_acceptable: float | None


@dataclass(frozen=True)
class Failure:
    station_id: str
    sre: str
    method: str
    error: str


@dataclass
class PipelineResult:
    reports: list[EvaluationReport]
    summaries: list[BubbleSummary]
    failures: list[Failure]
    corrected: dict = field(default_factory=dict)   # (sre, method) -> {station: series}
    files: dict = field(default_factory=dict)

    def report(self, station_id: str, sre: str, method: str) -> EvaluationReport:
        for r in self.reports:
            if (r.station_id, r.sre, r.method) == (station_id, sre, method):
                return r
        raise KeyError((station_id, sre, method))

    @property
    def succeeded_stations(self) -> set[str]:
        return {r.station_id for r in self.reports
                if r.method not in (GAUGE, UNCORRECTED)}


# --------------------------------------------------------------------------
# scoring


def _curve(series: DailySeries, cfg: RunConfig, label: str):
    try:
        return occurrence_curve(fit_occurrence(series, cfg.threshold, cfg.harmonics), DOY)
    except (ValueError, np.linalg.LinAlgError) as exc:
        log.warning("%s: no occurrence curve (%s)", label, exc)
        return None


def evaluate_series(pair: PairedSeries, predicted: DailySeries | None, sre: str,
                    method: str, cfg: RunConfig) -> EvaluationReport:
    """Score ``predicted`` (full paired period) on the test partition.

    With ``predicted=None`` the gauge is summarised against itself: only the
    annual statistics and the occurrence curve are filled in.
    """
    test = pair.test_mask
    observed = pair.gauge.select(test)
    label = f"{pair.station_id}/{sre}/{method}"
    target = observed if predicted is None else predicted.select(test)
    annual = annual_stats(target, cfg.threshold, cfg.season_start_month)
    curve = _curve(target, cfg, label)
    if predicted is None:
        return EvaluationReport(pair.station_id, sre, method, None, None, {}, annual, curve)
    P, O = target.values, observed.values
    metrics = compute_metrics(P, O)
    mean_obs = float(O.mean())
    ok = acceptable_me(metrics.me, mean_obs) if mean_obs > 0 else None
    tables = {c: contingency(P, O, c) for c in cfg.events}
    return EvaluationReport(pair.station_id, sre, method, metrics, ok, tables, annual, curve)


def annual_me(method: AnnualStats, gauge: AnnualStats) -> tuple[float, float]:
    """Mean error of rainy-day counts and of mean rain per rainy day over shared seasons."""
    common, i, j = np.intersect1d(method.season, gauge.season, return_indices=True)
    if common.size == 0:
        return math.nan, math.nan
    days = float(np.mean(method.rainy_days[i] - gauge.rainy_days[j]))
    diff = method.mean_per_rainy_day[i] - gauge.mean_per_rainy_day[j]
    diff = diff[~np.isnan(diff)]
    return days, float(diff.mean()) if diff.size else math.nan


def summarize(reports) -> list[BubbleSummary]:
    """Station proportions per (product, method) relative to the uncorrected SRE."""
    base = {(r.station_id, r.sre): r for r in reports if r.method == UNCORRECTED}
    groups: dict[tuple[str, str], list] = {}
    for r in reports:
        if r.method in (GAUGE, UNCORRECTED) or (r.station_id, r.sre) not in base:
            continue
        groups.setdefault((r.sre, r.method), []).append((r, base[(r.station_id, r.sre)]))
    out = []
    for (sre, method), rows in groups.items():
        reduced = [r for r, b in rows if abs(r.metrics.me) < abs(b.metrics.me)]
        accepted = [r for r, _ in rows if r.me_acceptable]
        out.append(BubbleSummary(
            sre, method, len(rows),
            len(reduced) / len(rows), _mean_rsd(reduced),
            len(accepted) / len(rows), _mean_rsd(accepted),
        ))
    return out


def _mean_rsd(reports) -> float | None:
    vals = [r.metrics.rsd for r in reports if r.metrics.rsd is not None]
    return float(np.mean(vals)) if vals else None


# --------------------------------------------------------------------------
# work units


@dataclass(frozen=True)
class _Unit:
    pair: PairedSeries
    sre: str
    method: str
    cfg: RunConfig


def _fit_unit(unit: _Unit):
    seed = derive_seed(unit.cfg.seed, unit.pair.station_id, unit.sre, unit.method)
    return fit_method(unit.pair, unit.method, threshold=unit.cfg.threshold,
                      classes=unit.cfg.classes, seed=seed, cap=unit.cfg.cap)


def _run_unit(unit: _Unit):
    sid = unit.pair.station_id
    try:
        corrected = _fit_unit(unit).correct(unit.pair.sre)
        report = evaluate_series(unit.pair, corrected, unit.sre, unit.method, unit.cfg)
        return corrected, report
    except Exception as exc:  # noqa: BLE001  isolate any per-unit failure
        return Failure(sid, unit.sre, unit.method, f"{type(exc).__name__}: {exc}")


def _model_unit(unit: _Unit):
    try:
        return _fit_unit(unit)
    except Exception as exc:  # noqa: BLE001
        return Failure(unit.pair.station_id, unit.sre, unit.method,
                       f"{type(exc).__name__}: {exc}")


def _execute(units, jobs: int, fn=_run_unit):
    """Yield ``(unit, fn(unit))`` in submission order, optionally in worker processes."""
    if jobs <= 1 or len(units) <= 1:
        for u in units:
            yield u, fn(u)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from zip(units, pool.map(fn, units, chunksize=1))


def load_pairs(cfg: RunConfig):
    """``{product: [PairedSeries]}`` plus failures for stations that could not be paired."""
    cfg.check_inputs()
    gauge = read_series(cfg.gauge, cfg.sentinel)
    pairs, failures = {}, []
    for name, path in cfg.sre.items():
        sre = read_series(path, cfg.sentinel)
        for sid in sorted(set(gauge) ^ set(sre)):
            log.warning("station %s is only in one of %s / %s", sid, cfg.gauge, path)
        pairs[name], skipped = build_pairs(gauge, sre, cfg.split_date)
        for sid, reason in skipped.items():
            failures += [Failure(sid, name, m, reason) for m in cfg.methods]
    return pairs, failures


def run_pipeline(cfg: RunConfig, write: bool = True) -> PipelineResult:
    pairs, failures = load_pairs(cfg)
    reports, units = [], []
    for name, plist in pairs.items():
        for pair in plist:
            reports.append(evaluate_series(pair, None, name, GAUGE, cfg))
            reports.append(evaluate_series(pair, pair.sre, name, UNCORRECTED, cfg))
            units += [_Unit(pair, name, m, cfg) for m in cfg.methods]
    if not units:
        raise PipelineError("no station could be paired")

    corrected: dict = {}
    done = 0
    for unit, outcome in _execute(units, cfg.jobs):
        done += 1
        tag = f"[{done}/{len(units)}] {unit.pair.station_id} {unit.sre} {unit.method}"
        if isinstance(outcome, Failure):
            log.warning("%s failed: %s", tag, outcome.error)
            failures.append(outcome)
            continue
        series, report = outcome
        log.info("%s done", tag)
        corrected.setdefault((unit.sre, unit.method), {})[unit.pair.station_id] = series
        reports.append(report)

    reports = sort_reports(reports, cfg.methods)
    failures.sort(key=lambda f: (f.station_id, f.sre, f.method))
    result = PipelineResult(reports, summarize(reports), failures, corrected)
    if not result.succeeded_stations:
        if write:
            write_failures(Path(cfg.out) / "reports" / "failures.csv", failures)
        raise PipelineError("every station failed; see failures.csv")
    if write:
        result.files = write_outputs(result, cfg)
    return result


def sort_reports(reports, methods):
    order = {m: i for i, m in enumerate((GAUGE, UNCORRECTED, *methods))}
    return sorted(reports, key=lambda r: (r.station_id, r.sre, order.get(r.method, len(order))))


# --------------------------------------------------------------------------
# output


def fmt(value) -> str:
    """Fixed six-decimal text; missing values become empty cells."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return path


def metrics_rows(reports):
    for r in reports:
        if r.metrics is None:
            continue
        m = r.metrics
        yield (r.station_id, r.sre, r.method, m.n, m.me, m.corr, m.rsd, m.rmse, m.mae,
               m.nse, r.me_acceptable)


def pod_rows(reports):
    for r in reports:
        for cat, c in r.contingencies.items():
            yield (r.station_id, r.sre, r.method, cat.value, c.hits, c.misses,
                   c.false_alarms, pod(c))


def annual_rows(reports):
    for r in reports:
        a = r.annual
        for k in range(len(a)):
            yield (r.station_id, r.sre, r.method, a.season[k], a.rainy_days[k],
                   a.total_mm[k], a.mean_per_rainy_day[k])


def seasonality_rows(reports):
    for r in reports:
        if r.curve is not None:
            for d, p in zip(DOY, r.curve):
                yield (r.station_id, r.sre, r.method, d, p)


def summary_rows(summaries):
    for s in summaries:
        yield (s.sre, s.method, s.n_stations, s.prop_reduced_me, s.mean_rsd_reduced,
               s.prop_acceptable_me, s.mean_rsd_acceptable)


def write_failures(path: Path, failures) -> Path:
    return _write_csv(path, FAILURE_HEADER,
                      ((f.station_id, f.sre, f.method, f.error) for f in failures))


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def write_curves(path: Path, curves: dict) -> Path:
    """Occurrence curves as ``source,doy,probability``; ``curves`` maps source to array."""
    rows = ((src, d, p) for src, curve in curves.items() for d, p in zip(DOY, curve))
    return _write_csv(path, CURVE_HEADER, rows)


def write_corrected(out: Path, corrected: dict) -> dict:
    """One ingest-layout CSV per (product, method), full precision."""
    files = {}
    for (sre, method), by_station in sorted(corrected.items()):
        path = out / "corrected" / _safe(sre) / f"{_safe(method)}.csv"
        write_series(path, [by_station[s] for s in sorted(by_station)])
        files[("corrected", sre, method)] = path
    return files


def write_reports(out: Path, reports, summaries, failures) -> dict:
    rep = out / "reports"
    return {
        "metrics": _write_csv(rep / "metrics.csv", METRICS_HEADER, metrics_rows(reports)),
        "pod": _write_csv(rep / "pod.csv", POD_HEADER, pod_rows(reports)),
        "annual": _write_csv(rep / "annual.csv", ANNUAL_HEADER, annual_rows(reports)),
        "seasonality": _write_csv(rep / "seasonality.csv", SEASONALITY_HEADER,
                                  seasonality_rows(reports)),
        "summary": _write_csv(rep / "summary.csv", SUMMARY_HEADER, summary_rows(summaries)),
        "failures": write_failures(rep / "failures.csv", failures),
    }


def write_outputs(result: PipelineResult, cfg: RunConfig) -> dict:
    out = Path(cfg.out)
    files = write_reports(out, result.reports, result.summaries, result.failures)
    files.update(write_corrected(out, result.corrected))
    by_key: dict = {}
    for r in result.reports:
        if r.curve is not None:
            by_key.setdefault((r.station_id, r.sre), {})[r.method] = r.curve
    for (sid, sre), curves in by_key.items():
        path = out / "curves" / f"{_safe(sid)}__{_safe(sre)}.csv"
        files[("curve", sid, sre)] = write_curves(path, curves)
    return files


def evaluate_corrected(cfg: RunConfig, corrected_dir=None) -> PipelineResult:
    """Score corrected CSVs already on disk (as written by ``apply``)."""
    pairs, failures = load_pairs(cfg)
    corrected_dir = Path(corrected_dir or Path(cfg.out) / "corrected")
    reports, found = [], False
    for name, plist in pairs.items():
        files = {m: corrected_dir / _safe(name) / f"{_safe(m)}.csv" for m in cfg.methods}
        loaded = {}
        for m, path in files.items():
            if path.is_file():
                loaded[m] = read_series(path)
                found = True
            else:
                log.warning("no corrected file for %s/%s at %s", name, m, path)
        for pair in plist:
            reports.append(evaluate_series(pair, None, name, GAUGE, cfg))
            reports.append(evaluate_series(pair, pair.sre, name, UNCORRECTED, cfg))
            for m in cfg.methods:
                series = loaded.get(m, {}).get(pair.station_id)
                if series is None or not np.array_equal(series.dates, pair.dates):
                    why = "missing" if series is None else "dates differ from the paired series"
                    failures.append(Failure(pair.station_id, name, m,
                                            f"corrected series {why}"))
                    continue
                reports.append(evaluate_series(pair, series, name, m, cfg))
    if not found:
        raise ConfigError(f"no corrected series under {corrected_dir}; run apply first")
    reports = sort_reports(reports, cfg.methods)
    failures.sort(key=lambda f: (f.station_id, f.sre, f.method))
    result = PipelineResult(reports, summarize(reports), failures)
    if not result.succeeded_stations:
        raise PipelineError("no station could be evaluated")
    result.files = write_reports(Path(cfg.out), reports, result.summaries, failures)
    return result


# --------------------------------------------------------------------------
# fit / apply split

MANIFEST = "manifest.json"


def model_path(out: Path, sre: str, station_id: str, method: str) -> Path:
    return Path(out) / "models" / _safe(sre) / _safe(station_id) / f"{_safe(method)}.json"


def _settings(cfg: RunConfig) -> dict:
    """Configuration items a fitted model depends on."""
    return {
        "threshold": cfg.threshold,
        "classes": [c.lower for c in cfg.classes],
        "split_date": str(cfg.split_date),
        "cap": cfg.cap,
        "seed": cfg.seed,
    }


def fit_models(cfg: RunConfig) -> tuple[dict, list[Failure]]:
    """Fit and save one model per (station, product, method); returns the manifest."""
    pairs, failures = load_pairs(cfg)
    units = [_Unit(p, name, m, cfg) for name, plist in pairs.items()
             for p in plist for m in cfg.methods]
    if not units:
        raise PipelineError("no station could be paired")
    manifest = {**_settings(cfg), "methods": list(cfg.methods),
                "stations": {name: [p.station_id for p in plist]
                             for name, plist in pairs.items()},
                "models": []}
    for unit, outcome in _execute(units, cfg.jobs, _model_unit):
        sid = unit.pair.station_id
        if isinstance(outcome, Failure):
            log.warning("%s %s %s failed: %s", sid, unit.sre, unit.method, outcome.error)
            failures.append(outcome)
            continue
        path = model_path(cfg.out, unit.sre, sid, unit.method)
        save_model(outcome, path, {"station_id": sid, "sre": unit.sre,
                                   "method": unit.method, **_settings(cfg)})
        manifest["models"].append([unit.sre, sid, unit.method])
        log.info("fitted %s %s %s", sid, unit.sre, unit.method)
    mpath = Path(cfg.out) / "models" / MANIFEST
    mpath.parent.mkdir(parents=True, exist_ok=True)
    mpath.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    failures.sort(key=lambda f: (f.station_id, f.sre, f.method))
    if not manifest["models"]:
        raise PipelineError("no model could be fitted")
    return manifest, failures


def read_manifest(out) -> dict:
    path = Path(out) / "models" / MANIFEST
    if not path.is_file():
        raise ModelFileError(f"no fitted models at {path.parent}; run fit first")
    return json.loads(path.read_text(encoding="utf-8"))


def check_manifest(manifest: dict, cfg: RunConfig, pairs: dict) -> None:
    """Raise :class:`ConfigError` when saved models do not match ``cfg``."""
    want = _settings(cfg)
    for key, value in want.items():
        if manifest.get(key) != value:
            raise ConfigError(f"models were fitted with {key}={manifest.get(key)!r}, "
                              f"config has {value!r}")
    missing = [m for m in cfg.methods if m not in manifest["methods"]]
    if missing:
        raise ConfigError(f"no fitted models for method(s) {', '.join(missing)}")
    for name, plist in pairs.items():
        have = manifest["stations"].get(name)
        ids = [p.station_id for p in plist]
        if have != ids:
            raise ConfigError(f"station set for {name} differs from the fitted models")


def apply_models(cfg: RunConfig) -> tuple[dict, list[Failure]]:
    """Correct every paired SRE series with saved models and write the CSVs."""
    manifest = read_manifest(cfg.out)
    pairs, failures = load_pairs(cfg)
    check_manifest(manifest, cfg, pairs)
    fitted = {tuple(k) for k in manifest["models"]}
    corrected: dict = {}
    for name, plist in pairs.items():
        for pair in plist:
            sid = pair.station_id
            for m in cfg.methods:
                if (name, sid, m) not in fitted:
                    failures.append(Failure(sid, name, m, "no fitted model"))
                    continue
                model, meta = load_model(model_path(cfg.out, name, sid, m))
                if (meta.get("station_id"), meta.get("sre"), meta.get("method")) != (sid, name, m):
                    raise ModelFileError(f"model file for {sid}/{name}/{m} has other metadata")
                corrected.setdefault((name, m), {})[sid] = model.correct(pair.sre)
    if not corrected:
        raise PipelineError("no series could be corrected")
    write_corrected(Path(cfg.out), corrected)
    failures.sort(key=lambda f: (f.station_id, f.sre, f.method))
    return corrected, failures
