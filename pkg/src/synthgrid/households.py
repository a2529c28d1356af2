"""Household behavior checks and family/consumption synthesis.

Action labels are free-form, so plausibility rules work off a coarse
classification (sleeping, away from home, at home) derived from label
tokens. Validation covers circular time: a sleep block wrapping past
midnight counts as one run.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .config import RunConfig
from .errors import ContentError, ParseError, ParseFailure, ShapeError, StageFailure
from .gateway import ChatGateway
from .parsing import (
    DailyConsumptionProfile,
    FamilyStructure,
    HourEntry,
    HourlyWeatherDay,
    extract_envelope,
    format_number,
    parse_consumption,
    parse_family_structures,
    parse_number,
    slugify_label,
)
from .prompts import stage1_request, stage4_request

log = logging.getLogger(__name__)

MAX_SLEEP_HOURS = 8
MAX_REPEAT_HOURS = 3
HEATING_IMPLAUSIBLE_ABOVE_C = 28.0
COOLING_IMPLAUSIBLE_BELOW_C = 10.0

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")
_AWAY_PREFIXES = ("commut", "work", "school", "outside")
_WEEKEND_FORBIDDEN_PREFIXES = ("work", "school")


class ActionClass(enum.Enum):
    SLEEP = "Sleep"
    AWAY = "Away"
    HOME = "Home"


def classify_action(label: str) -> ActionClass:
    """Coarse classification by token prefix; "homework" stays Home."""
    tokens = [t for t in _TOKEN_SPLIT.split(label.lower()) if t]
    if any(t.startswith("sleep") for t in tokens):
        return ActionClass.SLEEP
    if any(t.startswith(p) for t in tokens for p in _AWAY_PREFIXES):
        return ActionClass.AWAY
    return ActionClass.HOME


class BehaviorKind(enum.Enum):
    SLEEP_TOO_LONG = "SleepTooLong"
    ACTION_REPEAT_TOO_LONG = "ActionRepeatTooLong"
    AWAY_WITH_CONSUMPTION = "AwayWithConsumption"
    SCHOOL_WORK_ON_WEEKEND = "SchoolWorkOnWeekend"
    MEMBER_SERIES_SHAPE = "MemberSeriesShape"
    NEGATIVE_CONSUMPTION = "NegativeConsumption"
    HVAC_IMPLAUSIBLE = "HvacImplausible"
    JOINT_ACTION_IMBALANCE = "JointActionImbalance"


@dataclass(frozen=True)
class BehaviorViolation:
    kind: BehaviorKind
    member: str | None  # None for cross-member findings
    hours: tuple[int, ...]
    detail: str
    severity: str  # "error" | "warning"


def _circular_runs(flags: Sequence[bool]) -> list[list[int]]:
    """Maximal runs of True, treating hour 23 -> 0 as adjacent."""
    n = len(flags)
    if all(flags):
        return [list(range(n))]
    anchor = next(i for i in range(n) if not flags[i])
    runs: list[list[int]] = []
    current: list[int] = []
    for step in range(1, n + 1):
        index = (anchor + step) % n
        if flags[index]:
            current.append(index)
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def _label_runs(labels: Sequence[str]) -> list[list[int]]:
    """Maximal circular runs of identical labels."""
    n = len(labels)
    if len(set(labels)) == 1:
        return [list(range(n))]
    anchor = next(i for i in range(n) if labels[i] != labels[i - 1])
    runs: list[list[int]] = []
    current = [anchor]
    for step in range(1, n):
        index = (anchor + step) % n
        if labels[index] == labels[current[-1]]:
            current.append(index)
        else:
            runs.append(current)
            current = [index]
    runs.append(current)
    return runs


def _series_shape_ok(entries: tuple[HourEntry, ...]) -> bool:
    return len(entries) == 24 and all(e.hour == h for h, e in enumerate(entries))


def validate_behavior(
    profile: DailyConsumptionProfile, weather: HourlyWeatherDay | None = None
) -> list[BehaviorViolation]:
    """Plausibility rules for one daily profile.

    Errors flag schedules worth re-asking for; warnings flag oddities a
    run can live with. HVAC-vs-temperature checks only run when a weather
    day is supplied.
    """
    violations: list[BehaviorViolation] = []

    for name, entries in (("Heating", profile.heating), ("Cooling", profile.cooling)):
        if not _series_shape_ok(entries):
            violations.append(
                BehaviorViolation(
                    kind=BehaviorKind.MEMBER_SERIES_SHAPE,
                    member=name,
                    hours=(),
                    detail=f"{name} series does not cover hours 0..23 once each",
                    severity="error",
                )
            )

    usable_members = []
    for member in profile.members:
        entries = profile.series[member]
        if not _series_shape_ok(entries):
            violations.append(
                BehaviorViolation(
                    kind=BehaviorKind.MEMBER_SERIES_SHAPE,
                    member=member,
                    hours=(),
                    detail=f"series for {member} does not cover hours 0..23 once each",
                    severity="error",
                )
            )
            continue
        usable_members.append(member)

    for member in usable_members:
        entries = profile.series[member]
        labels = [e.label for e in entries]
        classes = [classify_action(l) for l in labels]

        for entry in entries:
            if entry.value < 0:
                violations.append(
                    BehaviorViolation(
                        kind=BehaviorKind.NEGATIVE_CONSUMPTION,
                        member=member,
                        hours=(entry.hour,),
                        detail=(
                            f"{member} consumes {format_number(entry.value)} kWh "
                            f"at hour {entry.hour}"
                        ),
                        severity="error",
                    )
                )

        for run in _circular_runs([c is ActionClass.SLEEP for c in classes]):
            if len(run) > MAX_SLEEP_HOURS:
                violations.append(
                    BehaviorViolation(
                        kind=BehaviorKind.SLEEP_TOO_LONG,
                        member=member,
                        hours=tuple(run),
                        detail=(
                            f"{member} sleeps {len(run)} consecutive hours "
                            f"(limit {MAX_SLEEP_HOURS})"
                        ),
                        severity="error",
                    )
                )

        for run in _label_runs(labels):
            if classes[run[0]] is ActionClass.SLEEP:
                continue
            if len(run) > MAX_REPEAT_HOURS:
                violations.append(
                    BehaviorViolation(
                        kind=BehaviorKind.ACTION_REPEAT_TOO_LONG,
                        member=member,
                        hours=tuple(run),
                        detail=(
                            f"{member} repeats {labels[run[0]]!r} for {len(run)} "
                            f"consecutive hours (limit {MAX_REPEAT_HOURS})"
                        ),
                        severity="error",
                    )
                )

        for entry, klass in zip(entries, classes):
            if klass is ActionClass.AWAY and entry.value > 0:
                violations.append(
                    BehaviorViolation(
                        kind=BehaviorKind.AWAY_WITH_CONSUMPTION,
                        member=member,
                        hours=(entry.hour,),
                        detail=(
                            f"{member} is away ({entry.label}) at hour {entry.hour} "
                            f"yet consumes {format_number(entry.value)} kWh"
                        ),
                        severity="error",
                    )
                )
            if profile.day_type == "Weekend":
                tokens = [t for t in _TOKEN_SPLIT.split(entry.label.lower()) if t]
                if any(t.startswith(p) for t in tokens for p in _WEEKEND_FORBIDDEN_PREFIXES):
                    violations.append(
                        BehaviorViolation(
                            kind=BehaviorKind.SCHOOL_WORK_ON_WEEKEND,
                            member=member,
                            hours=(entry.hour,),
                            detail=(
                                f"{member} has work or school activity "
                                f"({entry.label}) on a weekend at hour {entry.hour}"
                            ),
                            severity="error",
                        )
                    )

    for name, entries in (("Heating", profile.heating), ("Cooling", profile.cooling)):
        if not _series_shape_ok(entries):
            continue
        for entry in entries:
            if entry.value < 0:
                violations.append(
                    BehaviorViolation(
                        kind=BehaviorKind.NEGATIVE_CONSUMPTION,
                        member=name,
                        hours=(entry.hour,),
                        detail=(
                            f"{name} consumes {format_number(entry.value)} kWh "
                            f"at hour {entry.hour}"
                        ),
                        severity="error",
                    )
                )

    if weather is not None and _series_shape_ok(profile.heating) and _series_shape_ok(
        profile.cooling
    ):
        temps = weather.values("Temperature")
        for entry in profile.heating:
            if entry.value > 0 and temps[entry.hour] > HEATING_IMPLAUSIBLE_ABOVE_C:
                violations.append(
                    BehaviorViolation(
                        kind=BehaviorKind.HVAC_IMPLAUSIBLE,
                        member="Heating",
                        hours=(entry.hour,),
                        detail=(
                            f"heating draws {format_number(entry.value)} kWh at hour "
                            f"{entry.hour} despite {format_number(temps[entry.hour])} degC"
                        ),
                        severity="warning",
                    )
                )
        for entry in profile.cooling:
            if entry.value > 0 and temps[entry.hour] < COOLING_IMPLAUSIBLE_BELOW_C:
                violations.append(
                    BehaviorViolation(
                        kind=BehaviorKind.HVAC_IMPLAUSIBLE,
                        member="Cooling",
                        hours=(entry.hour,),
                        detail=(
                            f"cooling draws {format_number(entry.value)} kWh at hour "
                            f"{entry.hour} despite {format_number(temps[entry.hour])} degC"
                        ),
                        severity="warning",
                    )
                )

    if len(usable_members) >= 3:
        for hour in range(24):
            by_label: dict[str, list[tuple[str, float]]] = {}
            for member in usable_members:
                entry = profile.series[member][hour]
                by_label.setdefault(entry.label, []).append((member, entry.value))
            for label, shares in by_label.items():
                if len(shares) < 3:
                    continue
                values = [v for _, v in shares]
                # a shared activity may bill its full cost to one member or be
                # split; flag only totals no two-member split could explain
                if sum(values) > 2 * max(values):
                    names = ", ".join(m for m, _ in shares)
                    violations.append(
                        BehaviorViolation(
                            kind=BehaviorKind.JOINT_ACTION_IMBALANCE,
                            member=None,
                            hours=(hour,),
                            detail=(
                                f"{label!r} at hour {hour} sums to "
                                f"{format_number(sum(values))} kWh across {names}"
                            ),
                            severity="warning",
                        )
                    )

    return violations


def behavior_errors(violations: Sequence[BehaviorViolation]) -> list[BehaviorViolation]:
    return [v for v in violations if v.severity == "error"]


# --- synthesis ----------------------------------------------------------------


def synthesize_families(
    config: RunConfig,
    country: str,
    gateway: ChatGateway,
    on_response: Callable[[str, str, tuple[FamilyStructure, ...]], None] | None = None,
) -> tuple[FamilyStructure, ...]:
    """Stage 1: ask for family structures, retrying while responses fail to parse."""
    request = stage1_request(country, config.families_per_country)
    messages = request.to_messages()
    last_problem: Exception | None = None
    for _ in range(config.max_retries + 1):
        exchange = gateway.complete(messages)
        try:
            families = parse_family_structures(
                extract_envelope(exchange.response_text),
                country,
                config.families_per_country,
            )
        except ParseFailure as exc:
            last_problem = exc
            log.warning("family response for %s rejected: %s", country, exc)
            continue
        if on_response is not None:
            on_response(country, exchange.response_text, families)
        return families
    raise StageFailure(f"family structures for {country} failed: {last_problem}")


def synthesize_consumption(
    config: RunConfig,
    family: FamilyStructure,
    season: str,
    day_type: str,
    weather_day: HourlyWeatherDay,
    gateway: ChatGateway,
    on_response: Callable[[DailyConsumptionProfile, str], None] | None = None,
) -> DailyConsumptionProfile:
    """Stage 4: one daily profile, retried while parsing or behavior checks fail."""
    request = stage4_request(
        family.country,
        config.year,
        family.family_type,
        family.members,
        season,
        day_type,
        weather_day,
    )
    messages = request.to_messages()
    last_problem: Exception | None = None
    for _ in range(config.max_retries + 1):
        exchange = gateway.complete(messages)
        try:
            profile = parse_consumption(
                extract_envelope(exchange.response_text), family, season, day_type
            )
        except ParseFailure as exc:
            last_problem = exc
            log.warning(
                "consumption for %s/%s %s %s rejected: %s",
                family.country,
                family.family_type,
                season,
                day_type,
                exc,
            )
            continue
        violations = validate_behavior(profile, weather_day)
        errors = behavior_errors(violations)
        if errors:
            last_problem = StageFailure(
                "behavior errors: " + "; ".join(v.detail for v in errors)
            )
            log.warning(
                "consumption for %s/%s %s %s rejected: %s",
                family.country,
                family.family_type,
                season,
                day_type,
                last_problem,
            )
            continue
        for violation in violations:
            log.warning(
                "behavior warning for %s/%s %s %s: %s",
                family.country,
                family.family_type,
                season,
                day_type,
                violation.detail,
            )
        if on_response is not None:
            on_response(profile, exchange.response_text)
        return profile
    raise StageFailure(
        f"consumption for {family.country}/{family.family_type} {season} {day_type} "
        f"failed: {last_problem}"
    )


# --- CSV persistence -----------------------------------------------------------


def daily_csv_header(members: Sequence[str]) -> str:
    cols = ["hour", "total_kwh"]
    for member in members:
        slug = slugify_label(member)
        cols.append(f"{slug}_action")
        cols.append(f"{slug}_kwh")
    cols.extend(["heating_action", "heating_kwh", "cooling_action", "cooling_kwh"])
    return ",".join(cols)


def write_daily_csv(profile: DailyConsumptionProfile, path: str | Path) -> None:
    lines = [daily_csv_header(profile.members)]
    for hour in range(24):
        cells = [str(hour), format_number(profile.totals[hour])]
        for member in profile.members:
            entry = profile.series[member][hour]
            cells.append(entry.label)
            cells.append(format_number(entry.value))
        for entries in (profile.heating, profile.cooling):
            entry = entries[hour]
            cells.append(entry.label)
            cells.append(format_number(entry.value))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_daily_csv(
    path: str | Path, *, country: str, family_type: str, season: str, day_type: str
) -> DailyConsumptionProfile:
    """Load a daily profile; totals are recomputed and must match exactly.

    Member names come back as the slugs used in the header, since the CSV
    does not store the original spelling.
    """
    lines = Path(path).read_text(encoding="utf-8").strip().split("\n")
    if not lines:
        raise ParseError(f"empty daily CSV {path}")
    columns = lines[0].split(",")
    if (
        len(columns) < 8
        or columns[:2] != ["hour", "total_kwh"]
        or columns[-4:] != ["heating_action", "heating_kwh", "cooling_action", "cooling_kwh"]
        or (len(columns) - 6) % 2
    ):
        raise ParseError(f"unexpected daily CSV header in {path}")
    members = []
    for i in range(2, len(columns) - 4, 2):
        if not columns[i].endswith("_action") or not columns[i + 1].endswith("_kwh"):
            raise ParseError(f"malformed member columns in {path}")
        name = columns[i][: -len("_action")]
        if columns[i + 1][: -len("_kwh")] != name:
            raise ParseError(f"member column pair mismatch at {columns[i]!r} in {path}")
        members.append(name)
    if not members:
        raise ParseError(f"daily CSV {path} has no member columns")
    rows = lines[1:]
    if len(rows) != 24:
        raise ShapeError(f"daily CSV {path} has {len(rows)} rows, expected 24", count=len(rows))

    series: dict[str, list[HourEntry]] = {m: [] for m in members}
    heating: list[HourEntry] = []
    cooling: list[HourEntry] = []
    stored_totals: list[float] = []
    for expected_hour, raw in enumerate(rows):
        cells = raw.split(",")
        if len(cells) != len(columns):
            raise ParseError(f"daily CSV row for hour {expected_hour} has {len(cells)} cells")
        if parse_number(cells[0]) != expected_hour:
            raise ParseError(f"daily CSV rows out of hour order at {cells[0]!r}")
        stored_totals.append(float(parse_number(cells[1])))
        for offset, member in enumerate(members):
            label = cells[2 + 2 * offset]
            value = parse_number(cells[3 + 2 * offset])
            series[member].append(HourEntry(hour=expected_hour, label=label, value=value))
        heating.append(
            HourEntry(hour=expected_hour, label=cells[-4], value=parse_number(cells[-3]))
        )
        cooling.append(
            HourEntry(hour=expected_hour, label=cells[-2], value=parse_number(cells[-1]))
        )

    totals = tuple(
        sum(series[m][h].value for m in members) + heating[h].value + cooling[h].value
        for h in range(24)
    )
    for hour, (stored, computed) in enumerate(zip(stored_totals, totals)):
        if stored != computed:
            raise ContentError(
                f"daily CSV total at hour {hour} is {format_number(stored)} "
                f"but member+HVAC sum is {format_number(computed)}"
            )
    return DailyConsumptionProfile(
        country=country,
        family_type=family_type,
        season=season,
        day_type=day_type,
        members=tuple(members),
        series={m: tuple(v) for m, v in series.items()},
        heating=tuple(heating),
        cooling=tuple(cooling),
        totals=totals,
    )
