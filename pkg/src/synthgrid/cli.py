"""Command-line entry points.

Exit codes: 0 all items succeeded, 2 partial failures (some items failed
or validation found problems), 1 fatal (bad config, I/O trouble, broken
run directory).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .analytics import (
    compare_signatures,
    compute_signature,
    emit_plot_data,
    signature_from_points,
    read_reference_csv,
    write_signature_json,
)
from .calendars import read_yearly_csv
from .config import StageId, load_config
from .errors import SynthGridError
from .pipeline import assemble_years, run_pipeline, validate_run
from .prompts import dump_prompts


def _fatal(message: str) -> "click.exceptions.Exit":
    click.echo(f"error: {message}", err=True)
    return click.exceptions.Exit(1)


def _dump_prompts_callback(ctx: click.Context, param: click.Parameter, value):
    if not value or ctx.resilient_parsing:
        return
    written = dump_prompts(value)
    for path in written:
        click.echo(str(path))
    ctx.exit(0)


@click.group()
@click.option(
    "--dump-prompts",
    type=click.Path(file_okay=False),
    callback=_dump_prompts_callback,
    expose_value=False,
    is_eager=True,
    help="Write the embedded prompt templates to a directory and exit.",
)
def main() -> None:
    """Distill household energy knowledge from a chat model into datasets."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--through", default=StageId.ENERGY_PATTERNS.value, show_default=True)
@click.option(
    "--replay",
    "replay_dir",
    type=click.Path(exists=True, file_okay=False),
    help="Answer every request from this fixture directory; no network use.",
)
def run(config_path: str | None, through: str, replay_dir: str | None) -> None:
    """Execute the synthesis stages and persist artifacts plus a report."""
    try:
        config = load_config(config_path, {"fixture_dir": replay_dir})
        stage = StageId.parse(through)
        report = run_pipeline(config, stage)
    except SynthGridError as exc:
        raise _fatal(str(exc))
    except OSError as exc:
        raise _fatal(f"I/O failure: {exc}")
    for counts in report.stages:
        click.echo(
            f"{counts.stage.value}: planned {counts.planned}, "
            f"attempted {counts.attempted}, ok {counts.succeeded}, "
            f"failed {counts.failed}, resumed {counts.skipped}"
        )
    for item in report.items:
        if item.status == "failed":
            click.echo(f"FAILED {item.stage.value} {item.name}: {item.detail}", err=True)
    click.echo(f"artifacts under {report.output_dir}")
    raise click.exceptions.Exit(report.exit_code)


@main.command()
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False))
def validate(run_dir: str) -> None:
    """Re-parse and re-validate every artifact in a run directory."""
    try:
        problems = validate_run(run_dir)
    except SynthGridError as exc:
        raise _fatal(str(exc))
    except OSError as exc:
        raise _fatal(f"I/O failure: {exc}")
    for problem in problems:
        click.echo(problem)
    if problems:
        click.echo(f"{len(problems)} problem(s) found", err=True)
        raise click.exceptions.Exit(2)
    click.echo("all artifacts parse and validate cleanly")


@main.command("assemble-year")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def assemble_year_cmd(config_path: str | None) -> None:
    """Expand daily profiles into holiday-aware yearly load CSVs."""
    try:
        config = load_config(config_path, {})
        written = assemble_years(config)
    except SynthGridError as exc:
        raise _fatal(str(exc))
    except OSError as exc:
        raise _fatal(f"I/O failure: {exc}")
    for path in written:
        click.echo(str(path))


@main.command()
@click.argument("yearly_csv", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--reference",
    "reference_csv",
    type=click.Path(exists=True, dir_okay=False),
    help="timestamp,temp_c,total_kwh CSV to compare the signature against.",
)
@click.option("--balance-point", default=18.0, show_default=True)
@click.option("--bin-width", default=1.0, show_default=True)
def signature(
    yearly_csv: str, reference_csv: str | None, balance_point: float, bin_width: float
) -> None:
    """Compute the temperature-vs-consumption signature of a yearly CSV."""
    source = Path(yearly_csv)
    try:
        assembly = read_yearly_csv(source)
        sig = compute_signature(assembly, balance_point, bin_width=bin_width)
        json_path = source.with_suffix("").with_suffix(".signature.json")
        write_signature_json(sig, json_path)
        plot_path = emit_plot_data(sig, source.with_suffix("").with_suffix(".plot.csv"))
    except SynthGridError as exc:
        raise _fatal(str(exc))
    except OSError as exc:
        raise _fatal(f"I/O failure: {exc}")
    slope = "undefined" if sig.cold_slope is None else f"{sig.cold_slope:.6f} kWh/degC"
    click.echo(f"{sig.family}: cold-side slope {slope} below {sig.balance_point} degC")
    click.echo(f"wrote {json_path}")
    click.echo(f"wrote {plot_path}")
    if reference_csv is None:
        return
    try:
        points = read_reference_csv(reference_csv)
        ref = signature_from_points(
            points,
            family=Path(reference_csv).stem,
            balance_point=balance_point,
            bin_width=bin_width,
        )
        comparison = compare_signatures(sig, ref)
    except SynthGridError as exc:
        raise _fatal(str(exc))
    ref_slope = "undefined" if ref.cold_slope is None else f"{ref.cold_slope:.6f}"
    click.echo(f"reference cold-side slope: {ref_slope}")
    if comparison.slope_difference is not None:
        click.echo(f"slope difference: {comparison.slope_difference:.6f}")
    click.echo(
        f"shared bins: {len(comparison.common)}, "
        f"only in {sig.family}: {len(comparison.only_a)}, "
        f"only in reference: {len(comparison.only_b)}"
    )


@main.command()
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False))
def report(run_dir: str) -> None:
    """Summarize a run directory: responses, durations, tokens per stage."""
    path = Path(run_dir) / "report.json"
    if not path.exists():
        raise _fatal(f"no report.json under {run_dir}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise _fatal(f"cannot read {path}: {exc}")
    click.echo(
        f"model {doc.get('model_id')}  year {doc.get('year')}  "
        f"weather {doc.get('weather_source')}  countries {', '.join(doc.get('countries', ()))}"
    )
    header = f"{'stage':<16}{'responses':>10}{'avg time':>10}{'total':>10}{'prompt tok':>12}{'compl tok':>12}"
    click.echo(header)
    for row in doc.get("stages", ()):
        click.echo(
            f"{row.get('stage', ''):<16}{row.get('n_responses', 0):>10}"
            f"{row.get('avg_time') or '-':>10}{row.get('total_duration') or '-':>10}"
            f"{row.get('total_prompt_tokens', 0):>12}{row.get('total_completion_tokens', 0):>12}"
        )
    failed = [item for item in doc.get("items", ()) if item.get("status") == "failed"]
    click.echo(f"items: {len(doc.get('items', ()))} total, {len(failed)} failed")
    for item in failed:
        click.echo(f"  FAILED {item.get('stage')} {item.get('name')}: {item.get('detail')}")


if __name__ == "__main__":
    main()
