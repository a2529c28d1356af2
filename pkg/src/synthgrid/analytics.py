"""Energy signatures, run accounting, and plot-ready CSV emission.

An energy signature pairs every hour's outdoor temperature with total
consumption, bins the pairs at a fixed temperature width, and fits the
cold-side slope (kWh per degC below the balance point) by ordinary least
squares on the raw pairs. The cold slope is the heating-sensitivity
number: more negative means demand climbs faster as it gets colder.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Sequence

from .calendars import YearlyAssembly
from .config import StageId
from .errors import ComparisonError, ParseError, ShapeError
from .gateway import ChatExchange
from .parsing import DailyConsumptionProfile, format_number, parse_number

DEFAULT_BALANCE_POINT_C = 18.0
DEFAULT_BIN_WIDTH_C = 1.0


class SignatureBin(NamedTuple):
    center: float
    mean_kwh: float
    count: int


@dataclass(frozen=True)
class EnergySignature:
    family: str
    points: tuple[tuple[float, float], ...]  # (outdoor temp degC, total kWh)
    binned: tuple[SignatureBin, ...]
    cold_slope: float | None  # None when < 2 distinct temps below balance point
    balance_point: float
    bin_width: float


def signature_from_points(
    points: Iterable[tuple[float, float]],
    *,
    family: str = "",
    balance_point: float = DEFAULT_BALANCE_POINT_C,
    bin_width: float = DEFAULT_BIN_WIDTH_C,
) -> EnergySignature:
    if bin_width <= 0:
        raise ShapeError(f"bin width must be positive, got {bin_width}")
    pairs = tuple((float(t), float(y)) for t, y in points)

    buckets: dict[int, list[float]] = {}
    for temp, kwh in pairs:
        buckets.setdefault(math.floor(temp / bin_width), []).append(kwh)
    binned = tuple(
        SignatureBin(
            center=(index + 0.5) * bin_width,
            mean_kwh=sum(values) / len(values),
            count=len(values),
        )
        for index, values in sorted(buckets.items())
    )

    cold = [(t, y) for t, y in pairs if t < balance_point]
    cold_slope = None
    if len({t for t, _ in cold}) >= 2:
        t_mean = sum(t for t, _ in cold) / len(cold)
        y_mean = sum(y for _, y in cold) / len(cold)
        denominator = sum((t - t_mean) ** 2 for t, _ in cold)
        # temps can be distinct yet so close the spread underflows to zero
        if denominator > 0:
            cold_slope = sum((t - t_mean) * (y - y_mean) for t, y in cold) / denominator

    return EnergySignature(
        family=family,
        points=pairs,
        binned=binned,
        cold_slope=cold_slope,
        balance_point=balance_point,
        bin_width=bin_width,
    )


def compute_signature(
    yearly: YearlyAssembly,
    balance_point: float = DEFAULT_BALANCE_POINT_C,
    *,
    bin_width: float = DEFAULT_BIN_WIDTH_C,
) -> EnergySignature:
    if not yearly.rows:
        raise ShapeError("yearly profile holds no rows")
    return signature_from_points(
        ((row.temp_c, row.total_kwh) for row in yearly.rows),
        family=f"{yearly.country}/{yearly.family_type}",
        balance_point=balance_point,
        bin_width=bin_width,
    )


@dataclass(frozen=True)
class SignatureComparison:
    bin_width: float
    # (center, mean_a, mean_b, mean_a - mean_b)
    common: tuple[tuple[float, float, float, float], ...]
    only_a: tuple[float, ...]  # bin centers covered by a alone
    only_b: tuple[float, ...]
    slope_a: float | None
    slope_b: float | None
    slope_difference: float | None  # None when either slope is undefined


def compare_signatures(a: EnergySignature, b: EnergySignature) -> SignatureComparison:
    """Align bins by center and difference the means; slope gap comes along."""
    if a.bin_width != b.bin_width:
        raise ComparisonError(
            f"bin widths differ: {a.bin_width} vs {b.bin_width}"
        )
    means_a = {bin.center: bin.mean_kwh for bin in a.binned}
    means_b = {bin.center: bin.mean_kwh for bin in b.binned}
    common = tuple(
        (center, means_a[center], means_b[center], means_a[center] - means_b[center])
        for center in sorted(set(means_a) & set(means_b))
    )
    slope_difference = None
    if a.cold_slope is not None and b.cold_slope is not None:
        slope_difference = a.cold_slope - b.cold_slope
    return SignatureComparison(
        bin_width=a.bin_width,
        common=common,
        only_a=tuple(sorted(set(means_a) - set(means_b))),
        only_b=tuple(sorted(set(means_b) - set(means_a))),
        slope_a=a.cold_slope,
        slope_b=b.cold_slope,
        slope_difference=slope_difference,
    )


# --- run accounting ---------------------------------------------------------------


def format_duration(seconds: float) -> str:
    """H:MM:SS with whole seconds, hours unpadded."""
    if seconds < 0:
        raise ValueError(f"negative duration: {seconds}")
    total = int(seconds)
    return f"{total // 3600}:{total % 3600 // 60:02d}:{total % 60:02d}"


@dataclass(frozen=True)
class StageSummary:
    stage: StageId
    n_responses: int
    avg_seconds: float
    total_seconds: float
    total_prompt_tokens: int
    total_completion_tokens: int

    @property
    def avg_time(self) -> str:
        return format_duration(self.avg_seconds)

    @property
    def total_duration(self) -> str:
        return format_duration(self.total_seconds)


def summarize_run(
    log: Sequence[ChatExchange], stage_of: Callable[[ChatExchange], StageId]
) -> list[StageSummary]:
    """Group the exchange log by stage; tokens and latencies are summed as
    reported by the endpoint, never re-estimated."""
    grouped: dict[StageId, list[ChatExchange]] = {}
    for exchange in log:
        grouped.setdefault(stage_of(exchange), []).append(exchange)
    summaries = []
    for stage in sorted(grouped, key=lambda s: s.index):
        exchanges = grouped[stage]
        total_seconds = sum(e.latency for e in exchanges)
        summaries.append(
            StageSummary(
                stage=stage,
                n_responses=len(exchanges),
                avg_seconds=total_seconds / len(exchanges),
                total_seconds=total_seconds,
                total_prompt_tokens=sum(e.prompt_tokens for e in exchanges),
                total_completion_tokens=sum(e.completion_tokens for e in exchanges),
            )
        )
    return summaries


# --- emission -------------------------------------------------------------------

PLOT_CSV_HEADER = "series,x,y"


def emit_plot_data(
    subject: DailyConsumptionProfile | EnergySignature, path: str | Path
) -> Path:
    """Write a long-format `series,x,y` CSV any plotting tool can ingest.

    Daily profiles emit one series per member plus Heating, Cooling, and
    Total, 24 points each, with the day type tagged onto the series name.
    Signatures emit the binned curve plus the raw points.
    """
    lines = [PLOT_CSV_HEADER]
    if isinstance(subject, DailyConsumptionProfile):
        tag = subject.day_type
        for member in subject.members:
            for entry in subject.series[member]:
                lines.append(f"{member}/{tag},{entry.hour},{format_number(entry.value)}")
        for name, entries in (("Heating", subject.heating), ("Cooling", subject.cooling)):
            for entry in entries:
                lines.append(f"{name}/{tag},{entry.hour},{format_number(entry.value)}")
        for hour, total in enumerate(subject.totals):
            lines.append(f"Total/{tag},{hour},{format_number(total)}")
    elif isinstance(subject, EnergySignature):
        for bin in subject.binned:
            lines.append(f"binned,{format_number(bin.center)},{format_number(bin.mean_kwh)}")
        for temp, kwh in subject.points:
            lines.append(f"points,{format_number(temp)},{format_number(kwh)}")
    else:
        raise TypeError(f"cannot plot {type(subject).__name__}")
    target = Path(path)
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target


def signature_report(signature: EnergySignature) -> dict:
    return {
        "cold_slope": signature.cold_slope,
        "balance_point": signature.balance_point,
        "bins": [
            {"center": bin.center, "mean": bin.mean_kwh, "count": bin.count}
            for bin in signature.binned
        ],
    }


def write_signature_json(signature: EnergySignature, path: str | Path) -> Path:
    target = Path(path)
    target.write_text(
        json.dumps(signature_report(signature), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return target


def read_reference_csv(path: str | Path) -> list[tuple[float, float]]:
    """Ingest a generic reference dataset: `timestamp,temp_c,total_kwh` rows.

    The timestamp column is carried by convention and ignored here; ordering
    does not matter for signatures.
    """
    lines = Path(path).read_text(encoding="utf-8").strip().split("\n")
    if not lines or lines[0] != "timestamp,temp_c,total_kwh":
        raise ParseError(f"reference CSV must start with timestamp,temp_c,total_kwh: {path}")
    points = []
    for number, raw in enumerate(lines[1:], start=2):
        cells = raw.split(",")
        if len(cells) != 3:
            raise ParseError(f"{path}:{number}: expected 3 cells, got {len(cells)}")
        points.append((float(parse_number(cells[1])), float(parse_number(cells[2]))))
    return points
