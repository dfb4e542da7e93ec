"""Command-line front end.

Reads a CSV panel, optionally averages monthly rows to quarters, takes logs
and extracts Hodrick-Prescott cycles, then runs one analysis and writes a
tidy per-frequency table as JSON or CSV. Failures exit nonzero and print a
JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bootstrap, sim_harness
from .bc_test import bc_test, bc_test_conditional
from .errors import FreqGCError, MissingColumn, NonNumeric, ParseError
from .filters import hp_filter
from .spectra import CONDITIONAL, DIFFERENCE, UNCONDITIONAL, FrequencyGrid, SpectrumConfig, gc_spectrum
from .var_core import MultiSeries, select_lag_bic

__all__ = ["RunConfig", "ingest_csv", "preprocess", "run_pipeline", "main"]

WORKERS_ENV = "FREQGC_WORKERS"
COMMANDS = ("spectrum", "test-uncond", "test-cond", "test-diff", "bc-test", "simulate", "hp-filter")
_LABEL_HEADERS = {"", "t", "date", "time", "period", "quarter", "month", "label"}


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    effect: str | None = None
    cause: str | None = None
    conditioning: list = field(default_factory=list)
    kind: str | None = None
    log: list | None = None
    hp_lambda: float | None = None
    quarterly_average: bool = False
    n_boot: int = 1000
    alpha: float = 0.05
    block_length: float | None = None
    seed: int = 0
    lag_policy: str = "fixed_from_data"
    k: int | None = None
    k_max: int = 4
    with_intercept: bool = True
    grid_base: int | None = None
    workers: int = 1
    output: str | None = None
    format: str = "json"
    freq_scale: float = 1.0
    design: str | None = None
    designs_file: str | None = None
    n_mc: int | None = None
    T: int | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def ingest_csv(path, schema=None) -> MultiSeries:
    """Read a CSV panel with a header row.

    The first column is kept as observation labels when its header looks
    like a date field or its first cell is not numeric. ``schema`` lists
    column names that must be present.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc})") from exc
    rows = list(csv.reader(io.StringIO(text)))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if len(rows) < 2:
        raise ParseError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}: row {i} has {len(row)} fields, header has {len(header)}")
    has_labels = header[0].lower() in _LABEL_HEADERS or not _is_number(body[0][0].strip())
    first = 1 if has_labels else 0
    names = header[first:]
    if not names:
        raise ParseError(f"{path}: no numeric columns")
    values = np.empty((len(body), len(names)))
    for i, row in enumerate(body):
        for j, cell in enumerate(row[first:]):
            cell = cell.strip()
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise NonNumeric(i + 2, names[j], cell) from None
            if not np.isfinite(values[i, j]):
                raise NonNumeric(i + 2, names[j], cell)
    labels = tuple(row[0] for row in body) if has_labels else None
    data = MultiSeries(tuple(names), values, labels)
    for name in schema or ():
        if name not in data.names:
            raise MissingColumn(f"column {name!r} not found; have {list(data.names)}")
    return data


def quarterly_average(data: MultiSeries) -> MultiSeries:
    """Average consecutive triples of rows; a trailing partial quarter is dropped."""
    n = data.T // 3
    if n < 1:
        raise ParseError("fewer than three rows to average")
    values = data.values[: 3 * n].reshape(n, 3, data.p).mean(axis=1)
    labels = None if data.labels is None else tuple(data.labels[3 * i + 2] for i in range(n))
    return MultiSeries(data.names, values, labels)


def preprocess(data: MultiSeries, config: RunConfig) -> MultiSeries:
    if config.quarterly_average:
        data = quarterly_average(data)
    values = data.values.copy()
    if config.log is not None:
        cols = config.log or list(data.names)
        for name in cols:
            if name not in data.names:
                raise MissingColumn(f"cannot take logs of unknown column {name!r}")
            j = data.names.index(name)
            if np.any(values[:, j] <= 0):
                raise ParseError(f"column {name!r} has nonpositive values; cannot take logs")
            values[:, j] = np.log(values[:, j])
    if config.hp_lambda is not None:
        for j in range(data.p):
            values[:, j] = hp_filter(values[:, j], config.hp_lambda).cycle
    return MultiSeries(data.names, values, data.labels)


def _bootstrap_config(config: RunConfig) -> bootstrap.BootstrapConfig:
    return bootstrap.BootstrapConfig(
        n_boot=config.n_boot, alpha=config.alpha, block_length=config.block_length,
        seed=config.seed, lag_policy=config.lag_policy, k_max=config.k_max, k=config.k,
        with_intercept=config.with_intercept, grid_base=config.grid_base,
        workers=config.workers,
    )


def _spectrum_config(config: RunConfig) -> SpectrumConfig:
    return SpectrumConfig(config.k, config.k_max, config.with_intercept, config.grid_base)


def _require(data: MultiSeries, config: RunConfig, need_conditioning: bool) -> None:
    for role in ("effect", "cause"):
        if getattr(config, role) is None:
            raise MissingColumn(f"--{role} is required for {config.command}")
    if need_conditioning and not config.conditioning:
        raise MissingColumn(f"--conditioning is required for {config.command}")
    for name in [config.effect, config.cause, *config.conditioning]:
        if name not in data.names:
            raise MissingColumn(f"column {name!r} not found; have {list(data.names)}")


def _freq_rows(frequencies, scale):
    return [{"frequency": float(f), "frequency_display": float(f * scale),
             "omega": float(2 * np.pi * f)} for f in frequencies]


def _test_block(res: bootstrap.TestResult, scale: float) -> dict:
    rows = _freq_rows(res.spectrum.frequencies, scale)
    for row, v, fl, bf in zip(rows, res.spectrum.values, res.flags, res.bonferroni_flags):
        row.update(value=float(v), flag=bool(fl), bonferroni_flag=bool(bf))
    return {
        "kind": res.kind,
        "lags": dict(res.lags),
        "q_upper": res.q_upper,
        "q_lower": res.q_lower,
        "bonferroni_upper": res.bonferroni_upper,
        "bonferroni_lower": res.bonferroni_lower,
        "overall_significant": res.overall_significant,
        "null_median": res.null_median,
        "n_failed": res.n_failed,
        "block_length": res.block_length,
        "rows": rows,
    }


def _run_spectrum(data, config):
    conds = config.conditioning or [None]
    kind = config.kind
    if kind is None:
        kind = UNCONDITIONAL if not config.conditioning else CONDITIONAL
    if kind == UNCONDITIONAL:
        conds = [None]
    out = []
    for w in conds:
        spec = gc_spectrum(data, config.effect, config.cause, w, kind, _spectrum_config(config))
        rows = _freq_rows(spec.frequencies, config.freq_scale)
        for row, v in zip(rows, spec.values):
            row["value"] = float(v)
        out.append({"effect": config.effect, "cause": config.cause, "conditioning": w,
                    "kind": kind, "lags": list(spec.k), "rows": rows})
    return out


def _run_test(data, config):
    bconf = _bootstrap_config(config)
    x, y = data.column(config.effect), data.column(config.cause)
    out = []
    if config.command == "test-uncond":
        block = _test_block(bootstrap.test_unconditional(x, y, bconf), config.freq_scale)
        out.append({"effect": config.effect, "cause": config.cause, "conditioning": None, **block})
        return out
    fn = bootstrap.test_conditional if config.command == "test-cond" else bootstrap.test_difference
    for w in config.conditioning:
        block = _test_block(fn(x, y, data.column(w), bconf), config.freq_scale)
        out.append({"effect": config.effect, "cause": config.cause, "conditioning": w, **block})
    return out


def _run_bc(data, config):
    grid = FrequencyGrid(config.grid_base or data.T)
    x, y = data.column(config.effect), data.column(config.cause)
    out = []
    for w in config.conditioning or [None]:
        cols = [config.effect, config.cause] + ([w] if w else [])
        k = config.k or select_lag_bic(data.select(cols), config.k_max, config.with_intercept).chosen_k
        res = bc_test(x, y, k, grid) if w is None else bc_test_conditional(x, y, data.column(w), k, grid)
        rows = _freq_rows(res.frequencies, config.freq_scale)
        for row, f, p, df in zip(rows, res.f_stats, res.p_values, res.df):
            row.update(f_stat=float(f), p_value=float(p), df1=int(df[0]), df2=int(df[1]),
                       flag=bool(p < config.alpha))
        out.append({"effect": config.effect, "cause": config.cause, "conditioning": w,
                    "k": k, "rows": rows})
    return out


def _run_hp(data, config):
    lamb = config.hp_lambda if config.hp_lambda is not None else 1600.0
    out = []
    for name in data.names:
        dec = hp_filter(data.column(name), lamb)
        rows = [{"t": i, "label": None if data.labels is None else data.labels[i],
                 "value": float(v), "trend": float(tr), "cycle": float(c)}
                for i, (v, tr, c) in enumerate(zip(data.column(name), dec.trend, dec.cycle))]
        out.append({"series": name, "lambda": lamb, "rows": rows})
    return out


def _run_simulate(config):
    designs = (sim_harness.load_designs(config.designs_file) if config.designs_file
               else sim_harness.builtin_designs())
    if config.design:
        designs = [sim_harness.design_by_name(config.design, designs)]
    sconf = sim_harness.SimConfig(n_boot=config.n_boot, alpha=config.alpha, seed=config.seed,
                                  block_length=config.block_length,
                                  lag_policy=config.lag_policy, k_max=config.k_max,
                                  workers=config.workers)
    out = []
    for d in designs:
        changes = {}
        if config.n_mc is not None:
            changes["n_mc"] = config.n_mc
        if config.T is not None:
            changes["T"] = config.T
        report = sim_harness.run_design(d.with_(**changes), sconf)
        rows = _freq_rows(report.frequencies, config.freq_scale)
        for i, row in enumerate(rows):
            row.update(rejection_rate=float(report.rejection_rate[i]),
                       prominence_rate=float(report.prominence_rate[i]),
                       degree_of_prominence=float(report.degree_of_prominence[i]))
            if report.bc_rejection_rate is not None:
                row["bc_rejection_rate"] = float(report.bc_rejection_rate[i])
        out.append({"design": d.name, "functional": d.functional, "T": report.design.T,
                    "n_trials": report.n_trials, "n_failed": report.n_failed,
                    "overall_bonferroni_rate": report.overall_bonferroni_rate,
                    "rows": rows})
    return out


def run_pipeline(config: RunConfig) -> dict:
    """Run one command and return the JSON-ready result document."""
    if config.command == "simulate":
        results = _run_simulate(config)
    else:
        if config.input is None:
            raise ParseError(f"{config.command} needs an input CSV")
        data = preprocess(ingest_csv(config.input), config)
        if config.command == "hp-filter":
            results = _run_hp(data, config)
        else:
            _require(data, config, config.command in ("test-cond", "test-diff")
                     or config.kind in (CONDITIONAL, DIFFERENCE))
            if config.command == "spectrum":
                results = _run_spectrum(data, config)
            elif config.command == "bc-test":
                results = _run_bc(data, config)
            else:
                results = _run_test(data, config)
    return {"command": config.command, "seed": config.seed, "results": results}


def to_csv(document: dict) -> str:
    """Flatten a result document to one row per frequency (or time step)."""
    records = []
    for res in document["results"]:
        head = {k: v for k, v in res.items() if k != "rows" and not isinstance(v, (dict, list))}
        for k, v in res.items():
            if isinstance(v, dict):
                head.update({f"{k}_{kk}": vv for kk, vv in v.items()})
            elif isinstance(v, list) and k != "rows":
                head[k] = ";".join(str(x) for x in v)
        records += [{**head, **row} for row in res["rows"]]
    columns = []
    for rec in records:
        columns += [c for c in rec if c not in columns]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: _csv_cell(v) for k, v in rec.items()})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freqgc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--freq-scale", type=float, default=1.0,
                        help="multiply frequencies for display, e.g. 4 for cycles per year on quarterly data")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int,
                        default=int(os.environ.get(WORKERS_ENV, "1")),
                        help=f"worker processes (default: ${WORKERS_ENV} or 1)")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("input", help="CSV file, header row first")
    data.add_argument("--log", nargs="*", metavar="COLUMN",
                      help="take natural logs of these columns (all when none listed)")
    data.add_argument("--hp-lambda", type=float, help="replace each series by its HP cycle")
    data.add_argument("--quarterly-average", action="store_true",
                      help="average consecutive triples of rows")

    roles = argparse.ArgumentParser(add_help=False)
    roles.add_argument("--effect", required=True)
    roles.add_argument("--cause", required=True)
    roles.add_argument("--conditioning", action="append", default=[],
                       help="conditioning series; repeat for one analysis per series")

    var = argparse.ArgumentParser(add_help=False)
    var.add_argument("--k", type=int, help="fixed lag order (default: BIC)")
    var.add_argument("--k-max", type=int, default=4)
    var.add_argument("--no-intercept", dest="with_intercept", action="store_false")
    var.add_argument("--grid-base", type=int, help="Fourier grid base M (default: sample length)")
    var.add_argument("--alpha", type=float, default=0.05)

    boot = argparse.ArgumentParser(add_help=False)
    boot.add_argument("--n-boot", type=int, default=1000)
    boot.add_argument("--block-length", type=float, help="mean block length (default: ceil(T^(1/3)))")
    boot.add_argument("--lag-policy", choices=("fixed_from_data", "reselect_per_replicate"),
                      default="fixed_from_data")

    p = sub.add_parser("spectrum", parents=[common, data, roles, var], help="causality spectrum")
    p.add_argument("--kind", choices=(UNCONDITIONAL, CONDITIONAL, DIFFERENCE))
    for name, text in (("test-uncond", "bootstrap test of the unconditional spectrum"),
                       ("test-cond", "bootstrap test of the conditional spectrum"),
                       ("test-diff", "bootstrap test of unconditional minus conditional")):
        sub.add_parser(name, parents=[common, data, roles, var, boot], help=text)
    sub.add_parser("bc-test", parents=[common, data, roles, var], help="parametric F test per frequency")
    sub.add_parser("hp-filter", parents=[common, data], help="HP trend and cycle of every column")

    p = sub.add_parser("simulate", parents=[common, boot], help="Monte Carlo study of a design")
    p.add_argument("--design", help="catalogue design name (default: all)")
    p.add_argument("--designs-file", help="JSON design catalogue")
    p.add_argument("--n-mc", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--k-max", type=int, default=4)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    kwargs = {k: v for k, v in vars(args).items() if k in fields}
    return RunConfig(**kwargs)


def _emit_error(exc: Exception, code: str) -> None:
    payload = {"error": {"code": code, "type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(payload), file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", bootstrap.QuantileUnstable)
            document = run_pipeline(config)
        notes = sorted({str(w.message) for w in caught})
        if notes:
            document["warnings"] = notes
    except FreqGCError as exc:
        _emit_error(exc, exc.code)
        return 2
    except (ValueError, KeyError) as exc:
        _emit_error(exc, "CLI_INVALID_ARGUMENT")
        return 2
    text = json.dumps(document, indent=2) + "\n" if config.format == "json" else to_csv(document)
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
