"""Command-line interface: CSV in, deterministic CSV/JSON analysis out.

Two subcommands:

``mfdcca run``
    Load one or two series from CSV (optionally inner-joined on a date
    column and transformed to log-returns), run the single-series estimator
    or the full cross-correlation suite, and write plot-ready tables plus a
    machine-readable summary and a run manifest.

``mfdcca binomial``
    Emit a deterministic binomial cascade as a one-column CSV, which makes
    end-to-end pipeline tests self-contained.

Every float is printed with 17 significant digits so downstream consumers
can round-trip the exact double; repeated runs with identical inputs and
configuration produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .binomial import CascadeSpec, generate
from .core import QGrid, ScaleGrid, TimeSeries, default_q_grid, make_scale_grid
from .detrend import DetrendConfig
from .kernels import backend_name
from .mfdfa import ALGORITHM_MFDFA, MfdfaResult, mfdfa
from .xcorr import Algorithm, AlgorithmResult, XcorrResult, run_all

__all__ = [
    "RunConfig",
    "LoadedSeries",
    "load_series",
    "inner_join_on_dates",
    "log_returns",
    "run",
    "main",
]

MISSING_TOKENS = {"", "na", "nan", "null", "none", "-"}
MIN_JOINED_LENGTH = 64


def fmt17(x: float) -> str:
    """17-significant-digit decimal form; round-trips any finite double."""
    return format(float(x), ".17g")


def _json_scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return fmt17(v) if math.isfinite(v) else "null"
    return json.dumps(str(value))


def stable_json(value, indent: int = 0) -> str:
    """Deterministic JSON with 17-digit floats and insertion-ordered keys."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {stable_json(v, indent + 1)}"
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        items = ",\n".join(f"{inner}{stable_json(v, indent + 1)}" for v in value)
        return "[\n" + items + "\n" + pad + "]"
    return _json_scalar(value)


@dataclass(frozen=True)
class LoadedSeries:
    series: TimeSeries
    dates: list[str] | None
    n_rows: int
    n_missing_dropped: int


def _find_column(header: list[str], name: str, path: str) -> int:
    if name in header:
        return header.index(name)
    if name.isdigit() and int(name) < len(header):
        return int(name)
    raise ValueError(f"{path}: no column named {name!r} (header: {', '.join(header)})")


def load_series(path: str, column: str, date_column: str | None = None) -> LoadedSeries:
    """Read one numeric column (optionally with a date column) from a CSV.

    Rows whose value cell is empty or a missing-data token are dropped and
    counted; a cell that fails to parse as a finite float is an error naming
    the row and column.
    """
    p = Path(path)
    if not p.is_file():
        raise ValueError(f"input file not found: {path}")
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        col = _find_column(header, column, path)
        date_col = _find_column(header, date_column, path) if date_column else None
        values: list[float] = []
        dates: list[str] | None = [] if date_column else None
        dropped = 0
        n_rows = 0
        for row_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            n_rows += 1
            cell = row[col].strip() if col < len(row) else ""
            if cell.lower() in MISSING_TOKENS:
                dropped += 1
                continue
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: row {row_number}, column {header[col]!r}: "
                    f"cannot parse {cell!r} as a number"
                ) from None
            if not math.isfinite(value):
                raise ValueError(
                    f"{path}: row {row_number}, column {header[col]!r}: non-finite value"
                )
            values.append(value)
            if dates is not None:
                dates.append(row[date_col].strip() if date_col < len(row) else "")
    if not values:
        raise ValueError(f"{path}: column {column!r} has no usable rows")
    series = TimeSeries(np.asarray(values, dtype=np.float64), label=p.stem)
    return LoadedSeries(series, dates, n_rows, dropped)


def inner_join_on_dates(a: LoadedSeries, b: LoadedSeries) -> tuple[TimeSeries, TimeSeries, dict]:
    """Restrict both series to dates present in each, preserving a's order.

    Duplicate dates keep their first occurrence; the report counts what was
    dropped on each side.
    """
    if a.dates is None or b.dates is None:
        raise ValueError("date-joining requires a date column for both inputs")
    b_index: dict[str, int] = {}
    b_dupes = 0
    for i, d in enumerate(b.dates):
        if d in b_index:
            b_dupes += 1
        else:
            b_index[d] = i
    xs: list[float] = []
    ys: list[float] = []
    seen: set[str] = set()
    a_dupes = 0
    for i, d in enumerate(a.dates):
        if d in seen:
            a_dupes += 1
            continue
        seen.add(d)
        j = b_index.get(d)
        if j is not None:
            xs.append(float(a.series.values[i]))
            ys.append(float(b.series.values[j]))
    report = {
        "joined_length": len(xs),
        "dropped_from_first": len(a.dates) - len(xs),
        "dropped_from_second": len(b.dates) - len(xs),
        "duplicate_dates_first": a_dupes,
        "duplicate_dates_second": b_dupes,
    }
    if not xs:
        raise ValueError("date join produced no common rows")
    return (TimeSeries(np.asarray(xs), a.series.label),
            TimeSeries(np.asarray(ys), b.series.label), report)


def log_returns(series: TimeSeries) -> TimeSeries:
    """r_t = ln(p_t / p_{t-1}); requires strictly positive inputs."""
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, float)
    if len(values) < 2:
        raise ValueError("log returns need at least 2 samples")
    bad = np.flatnonzero(values <= 0)
    if bad.size:
        raise ValueError(f"log returns need positive values; offending index {bad[0]}")
    label = series.label if isinstance(series, TimeSeries) else ""
    return TimeSeries(np.diff(np.log(values)), label=f"{label}_logret" if label else "logret")


@dataclass(frozen=True)
class RunConfig:
    """Everything `mfdcca run` needs; mirrors the CLI flags one-to-one."""

    input: str
    input2: str | None = None
    column: str = "value"
    date_column: str | None = None
    returns: str = "none"
    scale_min: int = 4
    scale_max: int | None = None
    scale_count: int = 30
    q_min: float = -10.0
    q_max: float = 10.0
    q_step: float = 0.25
    order: int = 1
    algorithms: tuple[str, ...] | None = None
    out: str = "out"
    formats: tuple[str, ...] = ("csv", "json")


def _algorithm_order(result) -> list[str]:
    if isinstance(result, MfdfaResult):
        return [ALGORITHM_MFDFA]
    return [a.value for a in result.algorithms]


def _result_map(result) -> dict[str, AlgorithmResult | MfdfaResult]:
    if isinstance(result, MfdfaResult):
        return {ALGORITHM_MFDFA: result}
    return {a.value: result.results[a] for a in result.algorithms}


def _write_fluctuations(path: Path, result) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "scale", "q", "value", "valid", "reason"])
        for name, res in _result_map(result).items():
            table = res.fluctuations if isinstance(res, MfdfaResult) else res.table
            for i, scale in enumerate(table.scales):
                for j, q in enumerate(table.qs):
                    v = table.values[i, j]
                    writer.writerow([
                        name,
                        int(scale),
                        fmt17(q),
                        fmt17(v) if math.isfinite(v) else "",
                        "true" if table.valid[i, j] else "false",
                        table.reason[i, j],
                    ])


def _write_spectra(path: Path, result) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "q", "h", "tau", "alpha", "f"])
        for name, res in _result_map(result).items():
            spectrum = res.spectrum
            if spectrum is None:
                continue
            fit = res.fit
            for k, q in enumerate(spectrum.qs):
                j = int(np.flatnonzero(fit.qs == q)[0])
                writer.writerow([
                    name, fmt17(q), fmt17(fit.h[j]), fmt17(fit.tau[j]),
                    fmt17(spectrum.alpha[k]), fmt17(spectrum.f_alpha[k]),
                ])


def _summary_rows(result) -> list[dict]:
    rows = []
    for name, res in _result_map(result).items():
        params = res.params
        if isinstance(res, MfdfaResult):
            pairs_pct, captured, total, low = None, None, None, False
        else:
            pairs_pct = res.coverage.percent
            captured, total = res.coverage.captured, res.coverage.total
            low = res.low_coverage
        undef = float("nan")
        rows.append({
            "algorithm": name,
            "pairs_pct": pairs_pct,
            "H": params.H if params else undef,
            "alpha0": params.alpha0 if params else undef,
            "W": params.width if params else undef,
            "r": params.skew if params else undef,
            "captured": captured,
            "total": total,
            "low_coverage": low,
        })
    return rows


def _write_summary_json(path: Path, rows: list[dict]) -> None:
    path.write_text(stable_json({"algorithms": rows}) + "\n", encoding="utf-8")


def _write_summary_text(path: Path, rows: list[dict]) -> None:
    def cell(v, spec: str) -> str:
        if v is None or (isinstance(v, float) and not math.isfinite(v)):
            return "-"
        return format(v, spec)

    header = ["algorithm", "pairs_pct", "H", "alpha0", "W", "r"]
    lines = [["algorithm", "pairs%", "H", "alpha0", "W", "r"]]
    for row in rows:
        lines.append([
            row["algorithm"],
            cell(row["pairs_pct"], ".1f"),
            cell(row["H"], ".3f"),
            cell(row["alpha0"], ".3f"),
            cell(row["W"], ".3f"),
            cell(row["r"], ".3f"),
        ])
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    out = []
    for line in lines:
        out.append("  ".join(text.rjust(w) if i else text.ljust(w)
                             for i, (text, w) in enumerate(zip(line, widths))).rstrip())
    path.write_text("\n".join(out) + "\n", encoding="utf-8")


def _diagnostics(result) -> dict:
    diag: dict[str, dict] = {}
    for name, res in _result_map(result).items():
        table = res.fluctuations if isinstance(res, MfdfaResult) else res.table
        by_reason: dict[str, int] = {}
        for code in table.reason.ravel():
            if code:
                by_reason[str(code)] = by_reason.get(str(code), 0) + 1
        diag[name] = {
            "cells": int(table.values.size),
            "invalid_cells": int((~table.valid).sum()),
            "invalid_by_reason": dict(sorted(by_reason.items())),
            "excluded_segments_total": int(table.excluded.sum()),
        }
    return diag


def run(config: RunConfig):
    """Execute a configured analysis and write the output files.

    Returns the in-memory result (MfdfaResult or XcorrResult); raises
    ValueError on any rejected input or configuration.
    """
    pair_mode = config.input2 is not None
    if config.algorithms is None:
        names = [a.value for a in Algorithm] if pair_mode else [ALGORITHM_MFDFA]
    else:
        names = list(config.algorithms)
    cross = [n for n in names if n != ALGORITHM_MFDFA]
    if not pair_mode and cross:
        raise ValueError(
            f"cross-correlation algorithms ({', '.join(cross)}) need two inputs; "
            "pass --input2"
        )
    if pair_mode and ALGORITHM_MFDFA in names:
        raise ValueError("MFDFA is a single-series analysis; drop --input2 or the algorithm")
    for n in cross:
        Algorithm(n)  # raises ValueError on unknown names

    loaded_x = load_series(config.input, config.column, config.date_column)
    join_report = None
    if pair_mode:
        loaded_y = load_series(config.input2, config.column, config.date_column)
        if config.date_column:
            x, y, join_report = inner_join_on_dates(loaded_x, loaded_y)
            if len(x) < MIN_JOINED_LENGTH:
                raise ValueError(
                    f"only {len(x)} rows remain after the date join; "
                    f"need at least {MIN_JOINED_LENGTH}"
                )
        else:
            x, y = loaded_x.series, loaded_y.series
            if len(x) != len(y):
                raise ValueError(
                    f"inputs differ in length ({len(x)} vs {len(y)}); "
                    "use --date-column to align them"
                )
    else:
        x, y = loaded_x.series, None

    if config.returns == "log":
        x = log_returns(x)
        y = log_returns(y) if y is not None else None

    n_samples = len(x)
    scale_max = config.scale_max if config.scale_max is not None else n_samples // 4
    scales = make_scale_grid(n_samples, config.scale_min, scale_max, config.scale_count)
    if config.q_step <= 0 or config.q_max <= config.q_min:
        raise ValueError("need q_min < q_max and a positive q_step")
    count = int(round((config.q_max - config.q_min) / config.q_step))
    qs = QGrid(config.q_min + config.q_step * np.arange(count + 1))
    detrend_config = DetrendConfig(poly_order=config.order)

    if pair_mode:
        result = run_all(x, y, scales, qs, detrend_config, cross)
    else:
        result = mfdfa(x, scales, qs, detrend_config)

    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = _summary_rows(result)
    if "csv" in config.formats:
        _write_fluctuations(out_dir / "fluctuations.csv", result)
        _write_spectra(out_dir / "spectra.csv", result)
    _write_summary_text(out_dir / "summary.txt", rows)
    if "json" in config.formats:
        _write_summary_json(out_dir / "summary.json", rows)
        series_info = {
            "x": {"label": x.label, "length": len(x),
                  "rows_read": loaded_x.n_rows, "missing_dropped": loaded_x.n_missing_dropped},
        }
        if pair_mode:
            series_info["y"] = {"label": y.label, "length": len(y),
                                "rows_read": loaded_y.n_rows,
                                "missing_dropped": loaded_y.n_missing_dropped}
        if join_report:
            series_info["date_join"] = join_report
        manifest = {
            "version": __version__,
            "backend": backend_name(),
            "config": {
                "input": config.input,
                "input2": config.input2,
                "column": config.column,
                "date_column": config.date_column,
                "returns": config.returns,
                "scale_min": scales.min_scale,
                "scale_max": scales.max_scale,
                "scale_count": config.scale_count,
                "scales": [int(s) for s in scales.scales],
                "q_min": config.q_min,
                "q_max": config.q_max,
                "q_step": config.q_step,
                "order": config.order,
                "algorithms": names,
                "formats": list(config.formats),
            },
            "series": series_info,
            "low_coverage": [row["algorithm"] for row in rows if row["low_coverage"]],
            "diagnostics": _diagnostics(result),
        }
        (out_dir / "manifest.json").write_text(stable_json(manifest) + "\n", encoding="utf-8")
    return result


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfdcca",
        description="Multifractal detrended fluctuation and cross-correlation analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="analyze one or two CSV series")
    run_p.add_argument("--input", required=True, help="first series CSV")
    run_p.add_argument("--input2", help="second series CSV (enables cross algorithms)")
    run_p.add_argument("--column", default="value", help="value column name (both inputs)")
    run_p.add_argument("--date-column", help="date column used to inner-join two inputs")
    run_p.add_argument("--returns", choices=["none", "log"], default="none",
                       help="transform prices to log-returns before analysis")
    run_p.add_argument("--scale-min", type=int, default=4)
    run_p.add_argument("--scale-max", type=int, default=None,
                       help="largest segment length (default N/4)")
    run_p.add_argument("--scale-count", type=int, default=30)
    run_p.add_argument("--q-min", type=float, default=-10.0)
    run_p.add_argument("--q-max", type=float, default=10.0)
    run_p.add_argument("--q-step", type=float, default=0.25)
    run_p.add_argument("--order", type=int, default=1, help="detrending polynomial order")
    run_p.add_argument("--algorithms", help="comma list (default: all cross algorithms)")
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument("--format", default="csv,json", dest="formats",
                       help="comma list of output formats: csv,json")

    bin_p = sub.add_parser("binomial", help="emit a binomial cascade as one-column CSV")
    bin_p.add_argument("--stages", type=int, required=True)
    bin_p.add_argument("--p", type=float, required=True)
    bin_p.add_argument("--out", help="output CSV path (default: stdout)")
    return parser


def _cmd_run(args) -> int:
    formats = tuple(t.strip() for t in args.formats.split(",") if t.strip())
    unknown = [t for t in formats if t not in ("csv", "json")]
    if unknown:
        raise ValueError(f"unknown output format: {', '.join(unknown)}")
    algorithms = None
    if args.algorithms:
        algorithms = tuple(t.strip() for t in args.algorithms.split(",") if t.strip())
    config = RunConfig(
        input=args.input,
        input2=args.input2,
        column=args.column,
        date_column=args.date_column,
        returns=args.returns,
        scale_min=args.scale_min,
        scale_max=args.scale_max,
        scale_count=args.scale_count,
        q_min=args.q_min,
        q_max=args.q_max,
        q_step=args.q_step,
        order=args.order,
        algorithms=algorithms,
        out=args.out,
        formats=formats,
    )
    run(config)
    return 0


def _cmd_binomial(args) -> int:
    series = generate(CascadeSpec(stages=args.stages, p=args.p))
    lines = ["value"] + [fmt17(v) for v in series.values]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_binomial(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
