"""
Command-line interface.

Usage:
    pi-collisions count --alpha 1e-2
    pi-collisions predict --alpha 1
    pi-collisions trace --alpha 1e-6 -o fig2.csv
    pi-collisions table --format json
    pi-collisions bench

Exit codes: 0 ok, 1 table mismatch, 2 bad input, 3 backend cutoff or
resource budget, 4 unwritable output.
"""

from __future__ import annotations

import json
import sys
import time

import click

from .analytic import predict_count, rotation_angle
from .backends import DEFAULT_MAX_DIGITS, make_backend
from .engine import DEFAULT_MAX_EVENTS, run, write_trace_csv
from .errors import BackendCutoffError, PiCollisionsError, ResourceBudgetError
from .kinematics import MassRatio

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_CUTOFF = 3
EXIT_IO = 4

TABLE_ROWS = (
    ("1", 3),
    ("1e-2", 31),
    ("1e-4", 314),
    ("1e-6", 3141),
    ("1e-12", 3141592),
)

BENCH_BUDGET_S = {"float64": 1.0, "exact": 60.0}


class AlphaType(click.ParamType):
    name = "alpha"

    def convert(self, value, param, ctx):
        if isinstance(value, MassRatio):
            return value
        try:
            return MassRatio.parse(value)
        except (ValueError, TypeError) as exc:
            self.fail(str(exc), param, ctx)


ALPHA = AlphaType()


def _emit(fmt: str, records: list[dict], text: str) -> None:
    if fmt == "json":
        payload = records[0] if len(records) == 1 else records
        click.echo(json.dumps(payload, indent=2))
    elif fmt == "csv":
        keys = list(records[0])
        click.echo(",".join(keys))
        for rec in records:
            click.echo(",".join("" if rec[k] is None else str(rec[k]) for k in keys))
    else:
        click.echo(text)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _backend_options(f):
    f = click.option("--max-digits", type=click.IntRange(min=1), default=DEFAULT_MAX_DIGITS, show_default=True,
                     help="Digit budget for exact numerators.")(f)
    f = click.option("--allow-small-alpha", is_flag=True,
                     help="Let the exact backend run below alpha = 1e-8.")(f)
    f = click.option("--max-events", type=click.IntRange(min=1), default=DEFAULT_MAX_EVENTS, show_default=True)(f)
    f = click.option("--backend", type=click.Choice(["exact", "float64", "auto"]), default="auto", show_default=True)(f)
    return f


def _simulate(alpha, backend, max_events, allow_small_alpha, max_digits, record_trace=False):
    try:
        impl = make_backend(backend, alpha, allow_small_alpha=allow_small_alpha, max_digits=max_digits)
        t0 = time.perf_counter()
        result = run(alpha, impl, record_trace=record_trace, max_events=max_events)
        elapsed_ms = (time.perf_counter() - t0) * 1e3
    except (BackendCutoffError, ResourceBudgetError) as exc:
        _fail(EXIT_CUTOFF, str(exc))
    except PiCollisionsError as exc:
        _fail(EXIT_MISMATCH, str(exc))
    return result, elapsed_ms


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Count block collisions and recover the digits of pi."""


@cli.command()
@click.option("--alpha", type=ALPHA, required=True, help="Mass ratio m/M as p/q, decimal or 1e-N.")
@_backend_options
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
def count(alpha, backend, max_events, allow_small_alpha, max_digits, fmt):
    """Simulate and count collisions."""
    result, elapsed_ms = _simulate(alpha, backend, max_events, allow_small_alpha, max_digits)
    drift = result.drift.as_dict()
    record = {
        "alpha": str(alpha),
        "backend": result.backend,
        "n": result.count,
        "energy_rel_drift": drift["energy_rel_drift"],
        "numerator_digits": result.final_numerator_digits,
        "elapsed_ms": round(elapsed_ms, 3),
    }
    if fmt == "json":
        record = {**record, "drift": drift}
        del record["energy_rel_drift"]
    text = (f"alpha={alpha} backend={result.backend} N={result.count} "
            f"energy_rel_drift={drift['energy_rel_drift']:.3e} elapsed={elapsed_ms:.1f} ms")
    _emit(fmt, [record], text)


@cli.command()
@click.option("--alpha", type=ALPHA, required=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
def predict(alpha, fmt):
    """Predict the count from the rotation angle, no simulation."""
    t0 = time.perf_counter()
    try:
        model = rotation_angle(alpha)
        pred = predict_count(alpha)
    except PiCollisionsError as exc:
        _fail(EXIT_MISMATCH, str(exc))
    except ValueError as exc:
        _fail(EXIT_PARSE, str(exc))
    elapsed_ms = (time.perf_counter() - t0) * 1e3
    record = {
        "alpha": str(alpha),
        "backend": "analytic",
        "n": pred.n_exact_formula,
        "theta": model.theta,
        "n_exact_formula": pred.n_exact_formula,
        "n_paper_floor": pred.n_paper_floor,
        "n_sqrt_approx": pred.n_sqrt_approx,
        "boundary_flag": pred.boundary_flag.value,
        "elapsed_ms": round(elapsed_ms, 3),
    }
    text = "\n".join(
        [
            f"alpha           {alpha}",
            f"theta           {model.theta!r}",
            f"n_exact_formula {pred.n_exact_formula}",
            f"n_paper_floor   {pred.n_paper_floor}",
            f"n_sqrt_approx   {pred.n_sqrt_approx}",
            f"boundary_flag   {pred.boundary_flag.value}",
        ]
    )
    _emit(fmt, [record], text)


@cli.command()
@click.option("--alpha", type=ALPHA, required=True)
@click.option("-o", "--output", "output", required=True, help="CSV path, or - for stdout.")
@_backend_options
def trace(alpha, backend, max_events, allow_small_alpha, max_digits, output):
    """Write the per-collision velocity trace as CSV."""
    result, _ = _simulate(alpha, backend, max_events, allow_small_alpha, max_digits, record_trace=True)
    try:
        if output == "-":
            rows = write_trace_csv(result, sys.stdout)
        else:
            with open(output, "w", newline="") as fh:
                rows = write_trace_csv(result, fh)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {output}: {exc}")
    speeds_V = [float(ev.post_speed_V) for ev in result.trace]
    speeds_v = [float(ev.post_speed_v) for ev in result.trace]
    summary = [f"N={result.count} rows={rows} backend={result.backend}"]
    if result.trace:
        summary.append(
            f"min |v| at index {1 + speeds_v.index(min(speeds_v))}, "
            f"min |V| at index {1 + speeds_V.index(min(speeds_V))}, final |V|={speeds_V[-1]!r}"
        )
    click.echo("\n".join(summary), err=output == "-")


def _table_rows():
    rows = []
    for label, expected in TABLE_ROWS:
        alpha = MassRatio.parse(label)
        impl = make_backend("auto", alpha)
        t0 = time.perf_counter()
        result = run(alpha, impl)
        elapsed_ms = (time.perf_counter() - t0) * 1e3
        predicted = predict_count(alpha).n_exact_formula
        rows.append(
            {
                "alpha": str(alpha),
                "backend": result.backend,
                "n": result.count,
                "predicted": predicted,
                "expected": expected,
                "match": result.count == predicted == expected,
                "elapsed_ms": round(elapsed_ms, 3),
            }
        )
    return rows


@cli.command()
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
def table(fmt):
    """Reproduce the alpha -> N table by simulation and prediction."""
    rows = _table_rows()
    lines = ["| alpha | N | predicted | match |", "|---|---|---|---|"]
    for label_row, row in zip(TABLE_ROWS, rows):
        lines.append(f"| {label_row[0]} | {row['n']} | {row['predicted']} | {'yes' if row['match'] else 'NO'} |")
    ok = sum(r["match"] for r in rows)
    lines.append(f"\n{ok}/{len(rows)} rows match")
    if fmt == "json":
        click.echo(json.dumps(rows, indent=2))
    else:
        _emit(fmt, rows, "\n".join(lines))
    bad = [r for r in rows if not r["match"]]
    if bad:
        _fail(EXIT_MISMATCH, "mismatch at alpha " + ", ".join(r["alpha"] for r in bad))


@cli.command()
@click.option("--alpha", "alphas", type=ALPHA, multiple=True,
              help="Grid point (repeatable); defaults to the table grid.")
@click.option("--backend", "backends", type=click.Choice(["exact", "float64"]), multiple=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True)
def bench(alphas, backends, fmt):
    """Time counting runs per backend and report events per second."""
    alphas = alphas or tuple(MassRatio.parse(label) for label, _ in TABLE_ROWS)
    backends = backends or ("exact", "float64")
    records = []
    for name in backends:
        for alpha in alphas:
            rec = {"alpha": str(alpha), "backend": name, "n": None, "elapsed_ms": None,
                   "events_per_s": None, "numerator_digits": None, "within_budget": None, "note": ""}
            try:
                impl = make_backend(name, alpha)
                t0 = time.perf_counter()
                result = run(alpha, impl)
                elapsed = time.perf_counter() - t0
            except PiCollisionsError as exc:
                rec["note"] = f"skipped: {exc.__class__.__name__}"
                records.append(rec)
                continue
            rec.update(
                n=result.count,
                elapsed_ms=round(elapsed * 1e3, 3),
                events_per_s=round(result.count / elapsed) if elapsed > 0 else None,
                numerator_digits=result.final_numerator_digits,
                within_budget=elapsed < BENCH_BUDGET_S[name],
            )
            records.append(rec)
    lines = [f"{'backend':8} {'alpha':>16} {'N':>9} {'ms':>10} {'events/s':>12} {'digits':>8}"]
    for r in records:
        if r["n"] is None:
            lines.append(f"{r['backend']:8} {r['alpha']:>16} {r['note']}")
            continue
        digits = "" if r["numerator_digits"] is None else r["numerator_digits"]
        lines.append(f"{r['backend']:8} {r['alpha']:>16} {r['n']:>9} {r['elapsed_ms']:>10.1f} "
                     f"{r['events_per_s']:>12} {digits:>8}")
    if fmt == "json":
        click.echo(json.dumps(records, indent=2))
    else:
        _emit(fmt, records, "\n".join(lines))


def main(argv=None):
    cli.main(args=argv, prog_name="pi-collisions")


if __name__ == "__main__":
    main()
