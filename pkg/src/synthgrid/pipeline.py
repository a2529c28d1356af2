"""Run orchestration: plan stage items, execute them, persist, report.

Stages run strictly in order (each is a barrier); items inside a stage fan
out over a bounded thread pool. Every accepted response is persisted the
moment it arrives, and a re-run skips items whose raw response is already
on disk, so interrupted runs resume instead of re-spending requests.
Failures are first-class: an item that exhausts its retries is recorded
and the run continues, finishing with a partial-failure exit status.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .calendars import assemble_year, build_calendar, write_yearly_csv
from .config import RunConfig, StageId
from .errors import AssemblyError, ParseFailure, SynthGridError
from .gateway import ChatExchange, ChatGateway, ChatMessage, RequestParams, request_digest
from .households import (
    read_daily_csv,
    synthesize_consumption,
    synthesize_families,
    validate_behavior,
    write_daily_csv,
)
from .parsing import (
    FamilyStructure,
    HourlyWeatherDay,
    SeasonalWeatherRanges,
    extract_envelope,
    parse_consumption,
    parse_family_structures,
    parse_hourly_weather,
    parse_weather_ranges,
    serialize_family_structures,
    serialize_weather_ranges,
    slugify_label,
)
from .prompts import build_stage3_conversation, stage3_bindings
from .templates import SYSTEM_BODIES
from .weather import (
    CapitalRegistry,
    aggregate_tmy_to_season,
    fetch_tmy,
    read_weather_csv,
    synthesize_ranges,
    synthesize_weather_day,
    validate_hourly,
    write_weather_csv,
)
from .analytics import StageSummary

log = logging.getLogger(__name__)

DAY_TYPES = ("Weekday", "Weekend")

_STAGE_DIRS = {
    StageId.FAMILY_TYPES: "family_types",
    StageId.WEATHER_RANGES: "weather_ranges",
    StageId.WEATHER_DATA: "weather_data",
    StageId.ENERGY_PATTERNS: "energy_patterns",
}

_STAGE_BY_SYSTEM_BODY = {body: StageId(value) for value, body in SYSTEM_BODIES.items()}


def stage_of_exchange(exchange: ChatExchange) -> StageId:
    """Identify an exchange's stage from its (placeholder-free) system message."""
    try:
        return _STAGE_BY_SYSTEM_BODY[exchange.request_messages[0].content]
    except (KeyError, IndexError):
        raise SynthGridError("exchange does not begin with a known system prompt") from None


@dataclass(frozen=True)
class PlanItem:
    stage: StageId
    name: str  # logical id, doubles as the artifact stem
    country: str
    season: str | None = None
    family_index: int | None = None
    day_type: str | None = None


def plan_items(config: RunConfig, through: StageId = StageId.ENERGY_PATTERNS) -> list[PlanItem]:
    """Expand the run configuration into per-stage work items.

    The Stage-4 fan-out is countries x families_per_country x seasons x
    day types regardless of what upstream ends up producing; items whose
    prerequisites failed are still attempted and record failures.
    """
    items: list[PlanItem] = []
    llm_weather = config.weather_source == "llm"
    for country in config.countries:
        stem = slugify_label(country)
        if StageId.FAMILY_TYPES <= through:
            items.append(PlanItem(StageId.FAMILY_TYPES, stem, country))
        if llm_weather and StageId.WEATHER_RANGES <= through:
            items.append(PlanItem(StageId.WEATHER_RANGES, stem, country))
        if StageId.WEATHER_DATA <= through:
            for season in config.seasons:
                items.append(
                    PlanItem(StageId.WEATHER_DATA, f"{stem}_{season}", country, season=season)
                )
        if StageId.ENERGY_PATTERNS <= through:
            for index in range(config.families_per_country):
                for season in config.seasons:
                    for day_type in DAY_TYPES:
                        items.append(
                            PlanItem(
                                StageId.ENERGY_PATTERNS,
                                f"{stem}_f{index}_{season}_{day_type}",
                                country,
                                season=season,
                                family_index=index,
                                day_type=day_type,
                            )
                        )
    return items


@dataclass(frozen=True)
class ItemResult:
    stage: StageId
    name: str
    status: str  # "ok" | "skipped" | "failed"
    detail: str = ""
    artifacts: tuple[str, ...] = ()  # paths relative to the run directory


@dataclass(frozen=True)
class StageCounts:
    stage: StageId
    planned: int
    attempted: int
    succeeded: int
    failed: int
    skipped: int


@dataclass(frozen=True)
class RunReport:
    output_dir: Path
    through: StageId
    stages: tuple[StageCounts, ...]
    items: tuple[ItemResult, ...]
    summaries: tuple[StageSummary, ...]

    @property
    def exit_code(self) -> int:
        return 2 if any(s.failed for s in self.stages) else 0

    def counts_for(self, stage: StageId) -> StageCounts:
        for counts in self.stages:
            if counts.stage is stage:
                return counts
        return StageCounts(stage, 0, 0, 0, 0, 0)


@dataclass
class _RunState:
    config: RunConfig
    out: Path
    gateway: ChatGateway
    registry: CapitalRegistry
    http_get: Callable[[str], str] | None
    families: dict[str, tuple[FamilyStructure, ...]] = field(default_factory=dict)
    ranges: dict[str, SeasonalWeatherRanges] = field(default_factory=dict)
    days: dict[tuple[str, str], HourlyWeatherDay] = field(default_factory=dict)

    def stage_dir(self, stage: StageId) -> Path:
        return self.out / _STAGE_DIRS[stage]

    def relative(self, path: Path) -> str:
        return path.relative_to(self.out).as_posix()


def _network_disabled_get(url: str) -> str:
    raise RuntimeError(f"network disabled in replay mode, refused GET {url}")


def _build_gateway(config: RunConfig, transport) -> ChatGateway:
    api_key = ""
    if transport is None and config.fixture_dir is None:
        api_key = config.api_key()
    return ChatGateway(
        config.endpoint_url,
        config.model_id,
        api_key=api_key,
        temperature=config.temperature,
        max_tokens=config.max_tokens,
        max_retries=config.max_retries,
        fixture_dir=config.fixture_dir,
        record_dir=config.record_dir,
        transport=transport,
    )


def run_pipeline(
    config: RunConfig,
    through: StageId = StageId.ENERGY_PATTERNS,
    *,
    transport=None,
    registry: CapitalRegistry | None = None,
    http_get: Callable[[str], str] | None = None,
) -> RunReport:
    """Execute stages up to `through` and persist artifacts plus report.

    `transport` substitutes the HTTP transport (offline generators, tests);
    `http_get` does the same for the TMY fetcher. With fixture_dir set the
    defaults refuse all network use.
    """
    config.validate()
    out = config.output_path
    out.mkdir(parents=True, exist_ok=True)
    gateway = _build_gateway(config, transport)
    if http_get is None and config.fixture_dir is not None:
        http_get = _network_disabled_get
    state = _RunState(
        config=config,
        out=out,
        gateway=gateway,
        registry=registry or CapitalRegistry.default(config.capitals),
        http_get=http_get,
    )
    plan = plan_items(config, through)
    results: list[ItemResult] = []
    for stage in StageId:
        if not stage <= through:
            break
        stage_items = [item for item in plan if item.stage is stage]
        if not stage_items:
            continue
        state.stage_dir(stage).mkdir(parents=True, exist_ok=True)
        results.extend(_run_stage(state, stage, stage_items))

    records = _merge_ledger(state, gateway.exchanges)
    _write_exchange_log(state, records)
    report = _build_report(state, through, plan, results, records)
    _write_report_json(state, report)
    return report


def _run_stage(state: _RunState, stage: StageId, items: Sequence[PlanItem]) -> list[ItemResult]:
    workers = max(1, state.config.parallelism)
    if stage is StageId.FAMILY_TYPES:
        runner, units = _run_family_item, list(items)
    elif stage is StageId.WEATHER_RANGES:
        runner, units = _run_ranges_item, list(items)
    elif stage is StageId.WEATHER_DATA:
        # the per-country conversation is chained, so seasons stay sequential
        # inside one unit while countries fan out
        by_country: dict[str, list[PlanItem]] = {}
        for item in items:
            by_country.setdefault(item.country, []).append(item)
        runner, units = _run_weather_country, list(by_country.values())
    else:
        runner, units = _run_pattern_item, list(items)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        batches = list(pool.map(lambda unit: runner(state, unit), units))

    results: list[ItemResult] = []
    for batch in batches:
        results.extend(batch)
    results.sort(key=lambda r: r.name)
    for result in results:
        if result.status == "failed":
            log.error("%s %s failed: %s", stage.value, result.name, result.detail)
    return results


# --- stage 1 -----------------------------------------------------------------


def _run_family_item(state: _RunState, item: PlanItem) -> list[ItemResult]:
    directory = state.stage_dir(item.stage)
    response_path = directory / f"{item.name}.response.txt"
    json_path = directory / f"{item.name}.json"
    artifacts = (state.relative(response_path), state.relative(json_path))

    if response_path.exists():
        try:
            families = tuple(
                parse_family_structures(
                    extract_envelope(response_path.read_text(encoding="utf-8")),
                    item.country,
                    state.config.families_per_country,
                )
            )
        except ParseFailure as exc:
            log.warning("stored response for %s no longer parses (%s); refetching", item.name, exc)
        else:
            json_path.write_text(
                serialize_family_structures(item.country, list(families)) + "\n",
                encoding="utf-8",
            )
            state.families[item.country] = families
            return [ItemResult(item.stage, item.name, "skipped", artifacts=artifacts)]

    try:
        families = synthesize_families(
            state.config,
            item.country,
            state.gateway,
            on_response=lambda _country, raw, _families: response_path.write_text(
                raw, encoding="utf-8"
            ),
        )
    except SynthGridError as exc:
        return [ItemResult(item.stage, item.name, "failed", detail=str(exc))]
    json_path.write_text(
        serialize_family_structures(item.country, list(families)) + "\n", encoding="utf-8"
    )
    state.families[item.country] = families
    return [ItemResult(item.stage, item.name, "ok", artifacts=artifacts)]


# --- stage 2 ----------------------------------------------------------------


def _run_ranges_item(state: _RunState, item: PlanItem) -> list[ItemResult]:
    directory = state.stage_dir(item.stage)
    response_path = directory / f"{item.name}.response.txt"
    text_path = directory / f"{item.name}.txt"
    artifacts = (state.relative(response_path), state.relative(text_path))

    if response_path.exists():
        try:
            ranges = parse_weather_ranges(
                extract_envelope(response_path.read_text(encoding="utf-8")), item.country
            )
        except ParseFailure as exc:
            log.warning("stored response for %s no longer parses (%s); refetching", item.name, exc)
        else:
            text_path.write_text(serialize_weather_ranges(ranges) + "\n", encoding="utf-8")
            state.ranges[item.country] = ranges
            return [ItemResult(item.stage, item.name, "skipped", artifacts=artifacts)]

    try:
        ranges = synthesize_ranges(
            state.config,
            item.country,
            state.gateway,
            on_response=lambda _country, raw: response_path.write_text(raw, encoding="utf-8"),
        )
    except SynthGridError as exc:
        return [ItemResult(item.stage, item.name, "failed", detail=str(exc))]
    text_path.write_text(serialize_weather_ranges(ranges) + "\n", encoding="utf-8")
    state.ranges[item.country] = ranges
    return [ItemResult(item.stage, item.name, "ok", artifacts=artifacts)]


# --- stage 3 -----------------------------------------------------------------


def _run_weather_country(state: _RunState, items: Sequence[PlanItem]) -> list[ItemResult]:
    if state.config.weather_source == "external":
        return _run_weather_country_external(state, items)

    directory = state.stage_dir(StageId.WEATHER_DATA)
    country = items[0].country
    ranges = state.ranges.get(country)
    results: list[ItemResult] = []
    prior: list[tuple[ChatMessage, ChatMessage]] = []
    for index, item in enumerate(items):
        season = item.season
        assert season is not None
        response_path = directory / f"{item.name}.response.txt"
        csv_path = directory / f"{item.name}.csv"
        artifacts = (state.relative(response_path), state.relative(csv_path))
        if ranges is None:
            results.append(
                ItemResult(
                    item.stage,
                    item.name,
                    "failed",
                    detail=f"no seasonal ranges available for {country}",
                )
            )
            continue

        if response_path.exists():
            try:
                raw = response_path.read_text(encoding="utf-8")
                day = parse_hourly_weather(extract_envelope(raw), country, season)
            except ParseFailure as exc:
                log.warning(
                    "stored response for %s no longer parses (%s); refetching", item.name, exc
                )
            else:
                write_weather_csv(day, csv_path)
                state.days[(country, season)] = day
                prior.append(_chain_link(state, country, index, prior, season, ranges, raw))
                results.append(ItemResult(item.stage, item.name, "skipped", artifacts=artifacts))
                continue

        try:
            day, raw = synthesize_weather_day(
                state.config, country, season, index, prior, ranges, state.gateway
            )
        except SynthGridError as exc:
            results.append(ItemResult(item.stage, item.name, "failed", detail=str(exc)))
            # the chain is broken; later seasons cannot be requested faithfully
            for later in items[index + 1 :]:
                results.append(
                    ItemResult(
                        later.stage,
                        later.name,
                        "failed",
                        detail=f"conversation chain broken at {season}",
                    )
                )
            return results
        response_path.write_text(raw, encoding="utf-8")
        write_weather_csv(day, csv_path)
        state.days[(country, season)] = day
        prior.append(_chain_link(state, country, index, prior, season, ranges, raw))
        results.append(ItemResult(item.stage, item.name, "ok", artifacts=artifacts))
    return results


def _chain_link(
    state: _RunState,
    country: str,
    season_index: int,
    prior: Sequence[tuple[ChatMessage, ChatMessage]],
    season: str,
    ranges: SeasonalWeatherRanges,
    raw: str,
) -> tuple[ChatMessage, ChatMessage]:
    bindings = stage3_bindings(country, state.config.year, season, ranges)
    conversation = build_stage3_conversation(country, season_index, prior, bindings)
    return conversation[-1], ChatMessage("assistant", raw)


def _run_weather_country_external(
    state: _RunState, items: Sequence[PlanItem]
) -> list[ItemResult]:
    directory = state.stage_dir(StageId.WEATHER_DATA)
    country = items[0].country
    days: Mapping[str, HourlyWeatherDay] | None = None
    failure: str | None = None
    try:
        capital = state.registry.capital(country)
        series = fetch_tmy(
            capital.city,
            capital.lat,
            capital.lon,
            state.config.tmy_cache_path,
            base_url=state.config.pvgis_base_url,
            http_get=state.http_get,
        )
        days = aggregate_tmy_to_season(series, country)
    except (SynthGridError, RuntimeError) as exc:
        failure = str(exc)

    results = []
    for item in items:
        season = item.season
        assert season is not None
        csv_path = directory / f"{item.name}.csv"
        artifacts = (state.relative(csv_path),)
        if csv_path.exists():
            try:
                day = read_weather_csv(csv_path)
            except ParseFailure:
                day = None
            if day is not None and day.country == country and day.season == season:
                state.days[(country, season)] = day
                results.append(ItemResult(item.stage, item.name, "skipped", artifacts=artifacts))
                continue
        if days is None:
            results.append(ItemResult(item.stage, item.name, "failed", detail=failure or ""))
            continue
        day = days[season]
        for violation in validate_hourly(day):
            log.warning(
                "TMY aggregate for %s %s: %s (%s)",
                country,
                season,
                violation.detail,
                violation.severity,
            )
        write_weather_csv(day, csv_path)
        state.days[(country, season)] = day
        results.append(ItemResult(item.stage, item.name, "ok", artifacts=artifacts))
    return results


# --- stage 4 --------------------------------------------------------------------


def _run_pattern_item(state: _RunState, item: PlanItem) -> list[ItemResult]:
    directory = state.stage_dir(item.stage)
    response_path = directory / f"{item.name}.response.txt"
    csv_path = directory / f"{item.name}.csv"
    artifacts = (state.relative(response_path), state.relative(csv_path))
    season, day_type, index = item.season, item.day_type, item.family_index
    assert season is not None and day_type is not None and index is not None

    families = state.families.get(item.country)
    if families is None or index >= len(families):
        return [
            ItemResult(
                item.stage,
                item.name,
                "failed",
                detail=f"no family structure #{index} available for {item.country}",
            )
        ]
    family = families[index]
    day = state.days.get((item.country, season))
    if day is None:
        return [
            ItemResult(
                item.stage,
                item.name,
                "failed",
                detail=f"no weather day available for {item.country} {season}",
            )
        ]

    if response_path.exists():
        try:
            profile = parse_consumption(
                extract_envelope(response_path.read_text(encoding="utf-8")),
                family,
                season,
                day_type,
            )
        except ParseFailure as exc:
            log.warning("stored response for %s no longer parses (%s); refetching", item.name, exc)
        else:
            write_daily_csv(profile, csv_path)
            return [ItemResult(item.stage, item.name, "skipped", artifacts=artifacts)]

    try:
        profile = synthesize_consumption(
            state.config,
            family,
            season,
            day_type,
            day,
            state.gateway,
            on_response=lambda _profile, raw: response_path.write_text(raw, encoding="utf-8"),
        )
    except SynthGridError as exc:
        return [ItemResult(item.stage, item.name, "failed", detail=str(exc))]
    write_daily_csv(profile, csv_path)
    return [ItemResult(item.stage, item.name, "ok", artifacts=artifacts)]


# --- reporting --------------------------------------------------------------------


def _digest_of(config: RunConfig, exchange: ChatExchange) -> str:
    # must mirror the params the gateway used, or the digest will not match
    # the fixture filename the exchange was (or would be) recorded under
    params = RequestParams(
        model_id=exchange.model_id,
        temperature=config.temperature,
        max_tokens=config.max_tokens,
    )
    return request_digest(exchange.request_messages, params)


def _record_of(config: RunConfig, exchange: ChatExchange) -> dict:
    return {
        "stage": stage_of_exchange(exchange).value,
        "digest": _digest_of(config, exchange),
        "model_id": exchange.model_id,
        "prompt_tokens": exchange.prompt_tokens,
        "completion_tokens": exchange.completion_tokens,
        "latency": exchange.latency,
        "timestamp": exchange.timestamp,
    }


def _merge_ledger(state: _RunState, exchanges: Sequence[ChatExchange]) -> list[dict]:
    """Fold this invocation's exchanges into the run's cumulative ledger.

    Grouped by request digest: digests re-issued this run replace their old
    records wholesale (retries keep their multiplicity), untouched digests
    keep the records of the run that produced them. A resumed run that skips
    everything therefore rewrites the ledger byte-identically.
    """
    old: dict[str, list[dict]] = {}
    path = state.out / "exchanges.jsonl"
    if path.exists():
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                log.warning("dropping malformed ledger line %d in %s", lineno, path)
                continue
            old.setdefault(str(record.get("digest", "")), []).append(record)
    new: dict[str, list[dict]] = {}
    for exchange in exchanges:
        record = _record_of(state.config, exchange)
        new.setdefault(record["digest"], []).append(record)
    merged = dict(old)
    merged.update(new)

    def group_key(digest: str) -> tuple[int, str]:
        stage_text = merged[digest][0].get("stage", "")
        try:
            index = StageId.parse(stage_text).index
        except SynthGridError:
            index = len(tuple(StageId))
        return (index, digest)

    records: list[dict] = []
    for digest in sorted(merged, key=group_key):
        records.extend(merged[digest])
    return records


def _write_exchange_log(state: _RunState, records: Sequence[dict]) -> None:
    lines = [json.dumps(record, sort_keys=True) for record in records]
    (state.out / "exchanges.jsonl").write_text(
        "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
    )


def _summaries_from_records(records: Sequence[dict]) -> list[StageSummary]:
    grouped: dict[StageId, list[dict]] = {}
    for record in records:
        try:
            stage = StageId.parse(str(record.get("stage", "")))
        except SynthGridError:
            continue
        grouped.setdefault(stage, []).append(record)
    summaries = []
    for stage in sorted(grouped, key=lambda s: s.index):
        group = grouped[stage]
        total_seconds = sum(float(r.get("latency", 0.0)) for r in group)
        summaries.append(
            StageSummary(
                stage=stage,
                n_responses=len(group),
                avg_seconds=total_seconds / len(group),
                total_seconds=total_seconds,
                total_prompt_tokens=sum(int(r.get("prompt_tokens", 0)) for r in group),
                total_completion_tokens=sum(int(r.get("completion_tokens", 0)) for r in group),
            )
        )
    return summaries


def _build_report(
    state: _RunState,
    through: StageId,
    plan: Sequence[PlanItem],
    results: Sequence[ItemResult],
    records: Sequence[dict],
) -> RunReport:
    summaries = _summaries_from_records(records)
    stages = []
    for stage in StageId:
        if not stage <= through:
            break
        planned = sum(1 for item in plan if item.stage is stage)
        stage_results = [r for r in results if r.stage is stage]
        skipped = sum(1 for r in stage_results if r.status == "skipped")
        succeeded = sum(1 for r in stage_results if r.status == "ok")
        failed = sum(1 for r in stage_results if r.status == "failed")
        stages.append(
            StageCounts(
                stage=stage,
                planned=planned,
                attempted=succeeded + failed,
                succeeded=succeeded,
                failed=failed,
                skipped=skipped,
            )
        )
    ordered = sorted(results, key=lambda r: (r.stage.index, r.name))
    return RunReport(
        output_dir=state.out,
        through=through,
        stages=tuple(stages),
        items=tuple(ordered),
        summaries=tuple(summaries),
    )


def _write_report_json(state: _RunState, report: RunReport) -> None:
    """Persist the run directory's cumulative state.

    The file describes what the directory now holds, not what this
    invocation did: resumed items are recorded as completed, so re-running
    a finished run rewrites the report byte-identically. Fresh-vs-resumed
    accounting lives only on the in-memory RunReport.
    """
    by_stage = {summary.stage: summary for summary in report.summaries}
    stages = []
    for counts in report.stages:
        summary = by_stage.get(counts.stage)
        stages.append(
            {
                "stage": counts.stage.value,
                "planned": counts.planned,
                "completed": counts.succeeded + counts.skipped,
                "failed": counts.failed,
                "n_responses": summary.n_responses if summary else 0,
                "total_prompt_tokens": summary.total_prompt_tokens if summary else 0,
                "total_completion_tokens": summary.total_completion_tokens if summary else 0,
                "avg_time": summary.avg_time if summary else None,
                "total_duration": summary.total_duration if summary else None,
            }
        )
    doc = {
        "countries": list(state.config.countries),
        "year": state.config.year,
        "families_per_country": state.config.families_per_country,
        "seasons": list(state.config.seasons),
        "weather_source": state.config.weather_source,
        "model_id": state.config.model_id,
        "through": report.through.value,
        "stages": stages,
        "items": [
            {
                "stage": item.stage.value,
                "name": item.name,
                "status": "ok" if item.status == "skipped" else item.status,
                "detail": item.detail,
                "artifacts": list(item.artifacts),
            }
            for item in report.items
        ],
    }
    (state.out / "report.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# --- assembly and validation -------------------------------------------------------


def _load_families(config: RunConfig, out: Path, country: str) -> tuple[FamilyStructure, ...]:
    path = out / _STAGE_DIRS[StageId.FAMILY_TYPES] / f"{slugify_label(country)}.response.txt"
    if not path.exists():
        raise AssemblyError(f"missing family structures artifact for {country}: {path.name}")
    return tuple(
        parse_family_structures(
            extract_envelope(path.read_text(encoding="utf-8")),
            country,
            config.families_per_country,
        )
    )


def _load_weather_days(
    config: RunConfig, out: Path, country: str
) -> dict[str, HourlyWeatherDay]:
    days = {}
    stem = slugify_label(country)
    for season in config.seasons:
        path = out / _STAGE_DIRS[StageId.WEATHER_DATA] / f"{stem}_{season}.csv"
        if not path.exists():
            raise AssemblyError(f"missing weather artifact for {country} {season}: {path.name}")
        days[season] = read_weather_csv(path)
    return days


def assemble_years(config: RunConfig, *, run_dir: str | Path | None = None) -> list[Path]:
    """Expand every family's daily profiles into yearly CSVs under yearly/."""
    out = Path(run_dir) if run_dir is not None else config.output_path
    yearly_dir = out / "yearly"
    yearly_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for country in config.countries:
        stem = slugify_label(country)
        families = _load_families(config, out, country)
        weather = _load_weather_days(config, out, country)
        calendar = build_calendar(
            country,
            config.year,
            weekend_days=config.weekend_days,
            holiday_file=config.holiday_file,
        )
        for index, family in enumerate(families):
            profiles = {}
            for season in config.seasons:
                for day_type in DAY_TYPES:
                    path = (
                        out
                        / _STAGE_DIRS[StageId.ENERGY_PATTERNS]
                        / f"{stem}_f{index}_{season}_{day_type}.csv"
                    )
                    if not path.exists():
                        raise AssemblyError(
                            f"missing daily profile for {country} family #{index} "
                            f"{season} {day_type}: {path.name}"
                        )
                    profiles[(season, day_type)] = read_daily_csv(
                        path,
                        country=country,
                        family_type=family.family_type,
                        season=season,
                        day_type=day_type,
                    )
            assembly = assemble_year(calendar, profiles, weather)
            target = yearly_dir / f"{stem}_f{index}.csv"
            write_yearly_csv(assembly, target)
            written.append(target)
    return written


def validate_run(run_dir: str | Path) -> list[str]:
    """Re-parse and re-validate every persisted artifact; return problems."""
    out = Path(run_dir)
    report_path = out / "report.json"
    if not report_path.exists():
        raise SynthGridError(f"no report.json under {run_dir}")
    try:
        doc = json.loads(report_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SynthGridError(f"report.json is not valid JSON: {exc}") from exc

    problems: list[str] = []
    config = RunConfig(
        countries=tuple(doc.get("countries", ())),
        year=int(doc.get("year", 0) or 0),
        families_per_country=int(doc.get("families_per_country", 5)),
        seasons=tuple(doc.get("seasons", ())) or ("Winter", "Spring", "Summer", "Autumn"),
        weather_source=doc.get("weather_source", "llm"),
    )

    families: dict[str, tuple[FamilyStructure, ...]] = {}
    ranges: dict[str, SeasonalWeatherRanges] = {}
    days: dict[tuple[str, str], HourlyWeatherDay] = {}

    for country in config.countries:
        stem = slugify_label(country)
        f_path = out / _STAGE_DIRS[StageId.FAMILY_TYPES] / f"{stem}.response.txt"
        if f_path.exists():
            try:
                families[country] = parse_family_structures(
                    extract_envelope(f_path.read_text(encoding="utf-8")),
                    country,
                    config.families_per_country,
                )
            except ParseFailure as exc:
                problems.append(f"{f_path.name}: {exc}")
        r_path = out / _STAGE_DIRS[StageId.WEATHER_RANGES] / f"{stem}.response.txt"
        if r_path.exists():
            try:
                ranges[country] = parse_weather_ranges(
                    extract_envelope(r_path.read_text(encoding="utf-8")), country
                )
            except ParseFailure as exc:
                problems.append(f"{r_path.name}: {exc}")
        for season in config.seasons:
            w_path = out / _STAGE_DIRS[StageId.WEATHER_DATA] / f"{stem}_{season}.csv"
            if not w_path.exists():
                continue
            try:
                day = read_weather_csv(w_path)
            except ParseFailure as exc:
                problems.append(f"{w_path.name}: {exc}")
                continue
            days[(country, season)] = day
            for violation in validate_hourly(day, ranges.get(country)):
                if violation.severity == "error":
                    problems.append(
                        f"{w_path.name}: hour {violation.hour}: {violation.detail}"
                    )

    for country in config.countries:
        stem = slugify_label(country)
        for index in range(config.families_per_country):
            family = None
            if country in families and index < len(families[country]):
                family = families[country][index]
            for season in config.seasons:
                for day_type in DAY_TYPES:
                    name = f"{stem}_f{index}_{season}_{day_type}"
                    c_path = out / _STAGE_DIRS[StageId.ENERGY_PATTERNS] / f"{name}.csv"
                    if not c_path.exists():
                        continue
                    try:
                        profile = read_daily_csv(
                            c_path,
                            country=country,
                            family_type=family.family_type if family else f"family-{index}",
                            season=season,
                            day_type=day_type,
                        )
                    except ParseFailure as exc:
                        problems.append(f"{c_path.name}: {exc}")
                        continue
                    for violation in validate_behavior(profile, days.get((country, season))):
                        if violation.severity == "error":
                            problems.append(f"{c_path.name}: {violation.detail}")
    return problems
