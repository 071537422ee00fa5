"""Command-line entry point wiring the pipeline end to end.

Subcommands: synth, ingest, describe, spatial, covariates, features, train,
predict. Flag values override config-file values, which override built-in
defaults. Every command is idempotent for fixed inputs and seed; outputs are
declared in `manifest.json` with content hashes. Failures print a
machine-readable error JSON and exit 2 (missing input), 3 (schema/data error),
4 (training failure), or 1 (anything else).
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict
import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from . import __version__
from .covariates import (
    daily_correlations,
    daily_join,
    event_impact,
    holiday_impact,
    hourly_correlations,
    parse_calendar,
    parse_pollution,
    parse_weather,
    pollution_daily_correlations,
    week_contrast,
)
from .descriptive import (
    histogram,
    monthly_change,
    profile_as_dict,
    temporal_profile,
    write_histogram_csv,
    write_monthly_csv,
)
from .errors import (
    DataError,
    MissingInputError,
    ParameterError,
    TrainingError,
    VelotraceError,
)
from .features import (
    aggregate_slots,
    aligned_span,
    build_features,
    chronological_split,
    feature_target_correlation,
    read_features_csv,
    split_plan_as_dict,
    write_features_csv,
)
from .ingest import assemble_trips, parse_points, write_rejections_csv, write_trips_csv
from .models import (
    MODEL_KINDS,
    ModelSpec,
    build_windows,
    evaluate,
    load_artifact,
    model_artifact,
)
from .spatial import (
    build_density_grid,
    hub_report_as_dict,
    hub_spread,
    parse_hub_file,
    write_density_csv,
)
from .synth import (
    Hub,
    RainEvent,
    SpeedDist,
    SynthConfig,
    TempCurve,
    TripLengthDist,
    generate,
)
from .util import (
    format_utc,
    local_date,
    month_key,
    sha256_file,
    thread_count,
    to_local,
    truncate_hour,
    write_json,
)

DEFAULTS = {
    "out": "out",
    "seed": 0,
    "utc_offset_min": 120,
    "bbox": [44.45, 11.28, 44.54, 11.40],
    "paths": {},
    "describe": {"bin_distance_m": 200.0, "bin_duration_s": 60.0, "bin_speed_mps": 0.2},
    "spatial": {"cell_size_m": 50.0, "dest_cell_size_m": 200.0, "top_k": 10, "per_month": False},
    "features": {"width": 60, "split": "90/10", "hour_as_numeric": False, "hour_history_sum": False},
    "train": {"width": None, "split": "90/10", "models": ["all"], "with_cv": True},
    "models": {},
    "synth": {},
}

DEMO_SYNTH = {
    "start_date": "2017-05-01",
    "end_date": "2017-06-05",
    "base_trips_per_day": 300,
    "missing_fraction": 0.02,
    "holiday_suppressions": [["2017-05-25", 0.6]],
    "rain_events": [
        {"day": "2017-05-09", "start_hour": 2, "duration_h": 7, "mm_per_hour": 6.0, "suppression": 0.8},
        {"day": "2017-05-12", "start_hour": 15, "duration_h": 1, "mm_per_hour": 4.0, "suppression": 0.8},
    ],
    "null_events": [["2017-05-17", "strike", "synthetic-strike"]],
}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(args) -> dict:
    cfg = DEFAULTS
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise MissingInputError(path, f"config file not found: {path}")
        with open(path, "r", encoding="utf-8") as f:
            cfg = _merge(cfg, json.load(f))
    for key in ("out", "seed", "utc_offset_min"):
        v = getattr(args, key.replace("-", "_"), None)
        if v is not None:
            cfg = _merge(cfg, {key: v})
    return cfg


def _require(cfg: dict, path_key: str) -> Path:
    p = cfg.get("paths", {}).get(path_key)
    if not p:
        raise MissingInputError(path_key, f"no {path_key!r} path configured (set paths.{path_key} or the flag)")
    path = Path(p)
    if not path.exists():
        raise MissingInputError(path)
    return path


def _outdir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _update_manifest(outdir: Path, files: list[Path]) -> Path:
    manifest_path = outdir / "manifest.json"
    manifest = {"outputs": {}}
    if manifest_path.exists():
        with open(manifest_path, "r", encoding="utf-8") as f:
            manifest = json.load(f)
    for p in files:
        manifest["outputs"][str(Path(p).relative_to(outdir))] = sha256_file(Path(p))
    write_json(manifest_path, manifest)
    return manifest_path


def _emit(summary: dict) -> None:
    print(json.dumps(summary, sort_keys=True))


def _load_trips(cfg: dict):
    points = parse_points(_require(cfg, "points"))
    trips, rejections = assemble_trips(points)
    return points, trips, rejections


# ---------------------------------------------------------------- subcommands

def cmd_synth(cfg: dict, args) -> None:
    outdir = _outdir(cfg)
    sc = synth_config_from_dict(_merge(DEMO_SYNTH, cfg.get("synth", {})), cfg["seed"], cfg["utc_offset_min"])
    result = generate(sc, outdir)
    hub_path = outdir / "hubs.csv"
    with open(hub_path, "w", encoding="utf-8", newline="") as f:
        f.write("name,lat,lon,radius_m\n")
        for h in sc.hubs:
            f.write(f"{h.name},{h.lat!r},{h.lon!r},300.0\n")
    files = [Path(p) for p in result["files"].values()] + [hub_path]
    _update_manifest(outdir, files)
    _emit({"command": "synth", "files": sorted(str(p) for p in files),
           "expected_trips": result["truth"]["totals"]["expected_trips"],
           "actual_trips": result["truth"]["totals"]["actual_trips"]})


def cmd_ingest(cfg: dict, args) -> None:
    outdir = _outdir(cfg)
    points, trips, rejections = _load_trips(cfg)
    trips_path = outdir / "trips.csv"
    rej_path = outdir / "rejections.csv"
    write_trips_csv(trips, trips_path)
    write_rejections_csv(rejections, rej_path)
    _update_manifest(outdir, [trips_path, rej_path])
    _emit({"command": "ingest", "points": len(points), "trips": len(trips),
           "rejections": len(rejections)})


def cmd_describe(cfg: dict, args) -> None:
    outdir = _outdir(cfg)
    _, trips, _ = _load_trips(cfg)
    d = cfg["describe"]
    offset = cfg["utc_offset_min"]
    hists = {
        "distance": histogram([t.distance for t in trips], d["bin_distance_m"]),
        "duration": histogram([t.duration for t in trips], d["bin_duration_s"]),
        "speed": histogram([t.avg_speed for t in trips], d["bin_speed_mps"]),
    }
    files = []
    for name, h in hists.items():
        p = outdir / f"histogram_{name}.csv"
        write_histogram_csv(h, p)
        files.append(p)
    profile = temporal_profile(trips, offset)
    profile_path = outdir / "profile.json"
    write_json(profile_path, profile_as_dict(profile))
    files.append(profile_path)
    monthly_path = outdir / "monthly.csv"
    if len(profile.monthly_counts) >= 2:
        write_monthly_csv(monthly_change(profile), monthly_path)
    else:
        with open(monthly_path, "w", encoding="utf-8", newline="") as f:
            f.write("month,count,pct_change_vs_prev,share_of_peak\n")
            for m, c in profile.monthly_counts.items():
                f.write(f"{m},{c},,1.0\n")
    files.append(monthly_path)
    _update_manifest(outdir, files)
    _emit({"command": "describe", "trips": len(trips),
           "workingday_share": profile.workingday_share,
           "mode_distance_bin": hists["distance"].mode_bin(),
           "mode_duration_bin": hists["duration"].mode_bin(),
           "mode_speed_bin": hists["speed"].mode_bin()})


def cmd_spatial(cfg: dict, args) -> None:
    outdir = _outdir(cfg)
    points, trips, _ = _load_trips(cfg)
    sp = cfg["spatial"]
    offset = cfg["utc_offset_min"]
    bbox = tuple(cfg["bbox"])
    coords = [(p.lat, p.lon) for p in points if p.lat is not None]
    files = []

    grid = build_density_grid(coords, bbox, sp["cell_size_m"])
    density_path = outdir / "density.csv"
    write_density_csv(grid, density_path)
    files.append(density_path)

    periods = {}
    if sp.get("per_month"):
        by_month: dict[str, list] = {}
        for p in points:
            if p.lat is None:
                continue
            by_month.setdefault(month_key(local_date(p.timestamp, offset)), []).append((p.lat, p.lon))
        for mk in sorted(by_month):
            g = build_density_grid(by_month[mk], bbox, sp["cell_size_m"])
            p = outdir / f"density_{mk}.csv"
            write_density_csv(g, p)
            files.append(p)
            periods[mk] = by_month[mk]

    reports = []
    hubs_cfg_path = cfg.get("paths", {}).get("hubs")
    if hubs_cfg_path:
        if not Path(hubs_cfg_path).exists():
            raise MissingInputError(hubs_cfg_path)
        for hub in parse_hub_file(hubs_cfg_path):
            reports.append(hub_spread(trips, (hub.lat, hub.lon), hub.radius_m,
                                      sp["dest_cell_size_m"], sp["top_k"],
                                      period="all", hub_name=hub.name))
            if sp.get("per_month"):
                by_month_trips: dict[str, list] = {}
                for t in trips:
                    by_month_trips.setdefault(month_key(local_date(t.start_time, offset)), []).append(t)
                for mk in sorted(by_month_trips):
                    reports.append(hub_spread(by_month_trips[mk], (hub.lat, hub.lon), hub.radius_m,
                                              sp["dest_cell_size_m"], sp["top_k"],
                                              period=mk, hub_name=hub.name))
    hubs_path = outdir / "hubs.json"
    write_json(hubs_path, [hub_report_as_dict(r) for r in reports])
    files.append(hubs_path)
    _update_manifest(outdir, files)
    _emit({"command": "spatial", "points_binned": int(grid.counts.sum()),
           "ignored": grid.ignored, "hub_reports": len(reports)})


def cmd_covariates(cfg: dict, args) -> None:
    outdir = _outdir(cfg)
    _, trips, _ = _load_trips(cfg)
    offset = cfg["utc_offset_min"]
    weather = parse_weather(_require(cfg, "weather"))
    calendar = parse_calendar(_require(cfg, "calendar"))
    rows = daily_join(trips, weather, offset)

    correlations = [asdict(c) for c in daily_correlations(rows)]
    correlations += [asdict(c) for c in hourly_correlations(trips, weather)]
    if cfg.get("paths", {}).get("pollution"):
        pollution = parse_pollution(_require(cfg, "pollution"))
        correlations += [asdict(c) for c in pollution_daily_correlations(rows, pollution, offset)]
    corr_path = outdir / "correlations.json"
    write_json(corr_path, correlations)

    impacts, skipped = holiday_impact(rows, calendar)
    holidays_path = outdir / "holidays.json"
    write_json(holidays_path, {
        "impacts": [{**asdict(i), "date": str(i.date)} for i in impacts],
        "skipped": [{**asdict(s), "date": str(s.date)} for s in skipped],
    })
    impacts_e, skipped_e = event_impact(rows, calendar)
    events_path = outdir / "events.json"
    write_json(events_path, {
        "impacts": [{**asdict(i), "date": str(i.date)} for i in impacts_e],
        "skipped": [{**asdict(s), "date": str(s.date)} for s in skipped_e],
    })
    files = [corr_path, holidays_path, events_path]

    if args.week_a and args.week_b:
        wc = week_contrast(rows, date.fromisoformat(args.week_a), date.fromisoformat(args.week_b),
                           weather=weather, utc_offset_min=offset)
        wc_path = outdir / "week_contrast.json"
        write_json(wc_path, {
            "week_a_start": str(wc.week_a_start),
            "week_b_start": str(wc.week_b_start),
            "rows": [asdict(r) for r in wc.rows],
            "precip_overlay_a": wc.precip_overlay_a,
        })
        files.append(wc_path)

    _update_manifest(outdir, files)
    _emit({"command": "covariates", "daily_rows": len(rows),
           "complete_days": sum(r.complete for r in rows),
           "holiday_impacts": len(impacts), "event_impacts": len(impacts_e)})


def cmd_features(cfg: dict, args) -> None:
    outdir = _outdir(cfg)
    _, trips, _ = _load_trips(cfg)
    fc = cfg["features"]
    width = int(args.width or fc["width"])
    split = args.split or fc["split"]
    offset = cfg["utc_offset_min"]
    weather = parse_weather(_require(cfg, "weather"))
    calendar = parse_calendar(_require(cfg, "calendar"))
    slots, out_of_span = aggregate_slots(trips, width, aligned_span(trips, width))
    matrix, dropped = build_features(slots, weather, calendar, offset,
                                     hour_as_numeric=fc["hour_as_numeric"],
                                     hour_history_sum=fc["hour_history_sum"])
    plan = chronological_split(matrix, split)
    features_path = outdir / "features.csv"
    write_features_csv(matrix, features_path)
    plan_path = outdir / "splitplan.json"
    write_json(plan_path, split_plan_as_dict(plan))
    corr_path = outdir / "feature_correlations.json"
    write_json(corr_path, [{"column": c, "r": r} for c, r in feature_target_correlation(matrix)])
    _update_manifest(outdir, [features_path, plan_path, corr_path])
    _emit({"command": "features", "rows": matrix.n_rows, "columns": len(matrix.column_names),
           "width": width, "split": split, "dropped_rows": len(dropped),
           "out_of_span_trips": out_of_span})


def _model_specs(cfg: dict, requested: list[str]) -> list[ModelSpec]:
    kinds = list(MODEL_KINDS) if "all" in requested else requested
    mc = cfg.get("models", {})
    seed = int(mc.get("seed", cfg["seed"]))
    return [ModelSpec(k, dict(mc.get(k, {})), seed=seed) for k in kinds]


def cmd_train(cfg: dict, args) -> None:
    outdir = _outdir(cfg)
    tc = cfg["train"]
    features_path = Path(cfg.get("paths", {}).get("features") or (outdir / "features.csv"))
    if not features_path.exists():
        raise MissingInputError(features_path)
    matrix = read_features_csv(features_path)
    width = int(args.width or tc.get("width") or matrix.width_minutes)
    if width != matrix.width_minutes:
        raise ParameterError(
            f"requested width {width} but features.csv was built at {matrix.width_minutes}; rerun `features --width {width}`")
    split = args.split or tc["split"]
    requested = [args.model] if args.model else list(tc["models"])
    specs = _model_specs(cfg, requested)
    plan = chronological_split(matrix, split)
    report, fitted = evaluate(matrix, plan, specs, with_cv=bool(tc.get("with_cv", True)),
                              threads=thread_count())

    files = []
    report_path = outdir / "eval_report.json"
    write_json(report_path, report.as_dict())
    files.append(report_path)
    test_rows = list(plan.test_rows)
    best_kind, best_mae = None, None
    for kind, (tm, test_pred) in fitted.items():
        artifact_path = outdir / f"model_{kind}.json"
        write_json(artifact_path, model_artifact(tm, matrix.column_names))
        files.append(artifact_path)
        pred_path = outdir / f"predictions_{kind}.csv"
        _write_predictions(pred_path, matrix, test_rows, test_pred)
        files.append(pred_path)
        mae = report.entries[kind]["test"]["mae"]
        if best_mae is None or mae < best_mae:
            best_kind, best_mae = kind, mae
    pred_path = outdir / "predictions.csv"
    _write_predictions(pred_path, matrix, test_rows, fitted[best_kind][1])
    files.append(pred_path)
    _update_manifest(outdir, files)
    _emit({"command": "train", "split": split, "width": matrix.width_minutes,
           "models": sorted(fitted), "best_model": best_kind,
           "test_metrics": {k: report.entries[k]["test"] for k in sorted(fitted)}})


def _write_predictions(path: Path, matrix, rows, predictions) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("slot_start,actual,predicted\n")
        for i, j in enumerate(rows):
            f.write(f"{format_utc(matrix.slot_starts[j])},{matrix.y[j]!r},{float(predictions[i])!r}\n")


def cmd_predict(cfg: dict, args) -> None:
    outdir = _outdir(cfg)
    artifact_path = Path(args.artifact or (outdir / "model_lstm.json"))
    if not artifact_path.exists():
        raise MissingInputError(artifact_path)
    features_path = Path(cfg.get("paths", {}).get("features") or (outdir / "features.csv"))
    if not features_path.exists():
        raise MissingInputError(features_path)
    with open(artifact_path, "r", encoding="utf-8") as f:
        tm = load_artifact(json.load(f))
    matrix = read_features_csv(features_path)
    if args.width and int(args.width) != matrix.width_minutes:
        raise ParameterError(
            f"horizon {args.width} does not match the {matrix.width_minutes}-minute features file")
    prediction = _next_slot_prediction(cfg, tm, matrix)
    out_path = outdir / "prediction.json"
    write_json(out_path, prediction)
    _update_manifest(outdir, [out_path])
    _emit({"command": "predict", **prediction})


def _next_slot_prediction(cfg: dict, tm, matrix) -> dict:
    """Predict the count of the slot after the last row of the features file.

    The recurrent model consumes the trailing window directly. Tabular models
    get a constructed next-slot row: calendar dummies from the next slot's
    local time, lags from the stored targets, weather by persistence of the
    last row when the next hour is not covered.
    """
    width = matrix.width_minutes
    next_start = matrix.slot_starts[-1] + timedelta(minutes=width)
    kind = tm.spec.kind
    if kind == "lstm":
        scaled = tm.scaler.transform(matrix)
        lookback = tm.model.params.lookback
        n = matrix.n_rows
        if n < lookback:
            raise ParameterError(f"features file has {n} rows, recurrent model needs {lookback}")
        window = scaled.X[n - lookback:n][np.newaxis, :, :]
        value = float(tm.scaler.inverse_target(tm.model.predict(window))[0])
        return {"slot_start": format_utc(next_start), "width_minutes": width,
                "model": kind, "predicted": value}

    offset = cfg["utc_offset_min"]
    local = to_local(next_start, offset)
    by_start = {format_utc(s): i for i, s in enumerate(matrix.slot_starts)}
    row = np.zeros(len(matrix.column_names))
    names = matrix.column_names

    def set_if_present(name, value):
        if name in names:
            row[names.index(name)] = value

    last = matrix.X[-1]
    for base in ("temperature", "precipitation"):
        set_if_present(base, last[names.index(base)])
    if "hour_of_the_day" in names:
        set_if_present("hour_of_the_day", local.hour)
    else:
        set_if_present(f"hour_of_the_day={local.hour}", 1.0)
    set_if_present(f"month={month_key(local.date())}", 1.0)
    from .features import season_of_month
    set_if_present(f"season={season_of_month(local.month)}", 1.0)
    from .features import DOW_NAMES
    set_if_present(f"day_of_week={DOW_NAMES[local.weekday()]}", 1.0)
    holiday = 0.0
    cal_path = cfg.get("paths", {}).get("calendar")
    if cal_path and Path(cal_path).exists():
        holidays = {e.date for e in parse_calendar(cal_path) if e.kind == "holiday"}
        holiday = 1.0 if local.date() in holidays else 0.0
    set_if_present("holiday", holiday)
    for lag_name, delta in (("hour_history", timedelta(minutes=60)), ("week_history", timedelta(days=7))):
        key = format_utc(next_start - delta)
        if key not in by_start:
            raise ParameterError(f"cannot build {lag_name} for {format_utc(next_start)}: no row at {key}")
        set_if_present(lag_name, matrix.y[by_start[key]])
    value = float(tm.model.predict(row[np.newaxis, :])[0])
    return {"slot_start": format_utc(next_start), "width_minutes": width,
            "model": kind, "predicted": value}


def synth_config_from_dict(d: dict, seed: int, utc_offset_min: int) -> SynthConfig:
    kwargs = {"seed": int(d.get("seed", seed)),
              "start_date": date.fromisoformat(d["start_date"]),
              "end_date": date.fromisoformat(d["end_date"]),
              "utc_offset_min": int(d.get("utc_offset_min", utc_offset_min))}
    if "bbox" in d:
        kwargs["bbox"] = tuple(d["bbox"])
    if "hubs" in d:
        kwargs["hubs"] = tuple(Hub(h["name"], h["lat"], h["lon"], h["weight"]) for h in d["hubs"])
    for key in ("base_trips_per_day", "weekday_multiplier", "missing_fraction",
                "day_noise_sigma", "hub_jitter_m", "point_interval_s", "emit_unmasked"):
        if key in d:
            kwargs[key] = d[key]
    if "hourly_shape" in d:
        kwargs["hourly_shape"] = tuple(d["hourly_shape"])
    if "temp_curve" in d:
        kwargs["temp_curve"] = TempCurve(**d["temp_curve"])
    if "trip_length" in d:
        kwargs["trip_length"] = TripLengthDist(**d["trip_length"])
    if "speed" in d:
        kwargs["speed"] = SpeedDist(**d["speed"])
    if "rain_events" in d:
        kwargs["rain_events"] = tuple(
            RainEvent(date.fromisoformat(e["day"]), int(e["start_hour"]), int(e["duration_h"]),
                      float(e["mm_per_hour"]), float(e["suppression"]))
            for e in d["rain_events"])
    if "holiday_suppressions" in d:
        kwargs["holiday_suppressions"] = tuple(
            (date.fromisoformat(h), float(s)) for h, s in d["holiday_suppressions"])
    if "null_events" in d:
        kwargs["null_events"] = tuple(
            (date.fromisoformat(e[0]), e[1], e[2]) for e in d["null_events"])
    return SynthConfig(**kwargs)


COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "describe": cmd_describe,
    "spatial": cmd_spatial,
    "covariates": cmd_covariates,
    "features": cmd_features,
    "train": cmd_train,
    "predict": cmd_predict,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--utc-offset-min", type=int, dest="utc_offset_min",
                        help="local time = UTC + this many minutes")
    for path_key in ("points", "weather", "pollution", "calendar", "hubs", "features"):
        common.add_argument(f"--{path_key}", dest=f"path_{path_key}", help=f"path to {path_key} file")

    parser = argparse.ArgumentParser(prog="velotrace",
                                     description="cycling trip analytics and demand forecasting")
    parser.add_argument("--version", action="version", version=f"velotrace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("synth", "ingest", "describe", "spatial"):
        sub.add_parser(name, parents=[common])
    p = sub.add_parser("covariates", parents=[common])
    p.add_argument("--week-a", dest="week_a", help="Monday date (YYYY-MM-DD) of the contrast week A")
    p.add_argument("--week-b", dest="week_b", help="Monday date of the contrast week B")
    p = sub.add_parser("features", parents=[common])
    p.add_argument("--width", type=int, choices=(30, 60))
    p.add_argument("--split", choices=("90/10", "80/20", "70/30", "60/40"))
    p = sub.add_parser("train", parents=[common])
    p.add_argument("--width", type=int, choices=(30, 60))
    p.add_argument("--split", choices=("90/10", "80/20", "70/30", "60/40"))
    p.add_argument("--model", choices=MODEL_KINDS + ("all",))
    p = sub.add_parser("predict", parents=[common])
    p.add_argument("--artifact", help="trained model artifact JSON")
    p.add_argument("--width", type=int, choices=(30, 60), help="horizon; must match the features file")
    return parser


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, MissingInputError):
        return 2
    if isinstance(exc, DataError):
        return 3
    if isinstance(exc, TrainingError):
        return 4
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        for path_key in ("points", "weather", "pollution", "calendar", "hubs", "features"):
            v = getattr(args, f"path_{path_key}", None)
            if v:
                cfg = _merge(cfg, {"paths": {path_key: v}})
        COMMANDS[args.command](cfg, args)
        return 0
    except VelotraceError as exc:
        code = _exit_code(exc)
        err = {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}}
        if isinstance(exc, MissingInputError):
            err["error"]["path"] = exc.path
        print(json.dumps(err, sort_keys=True))
        return code


if __name__ == "__main__":
    sys.exit(main())
