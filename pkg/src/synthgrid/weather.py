"""Weather validation, TMY ingestion, and weather-day synthesis.

Hourly weather comes from one of two sources: the chat model (validated
against stage-2 ranges, retried on physics errors) or a typical
meteorological year service (aggregated to per-season mean days, where
validation only warns). Physics checks are shared by both paths.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, NamedTuple, Sequence

import requests

from .calendars import SOUTHERN_HEMISPHERE_COUNTRIES, season_for_month
from .config import RunConfig, SEASONS
from .errors import (
    ConfigError,
    CoordError,
    ParseError,
    ParseFailure,
    ShapeError,
    StageFailure,
    TransportError,
)
from .gateway import ChatGateway, ChatMessage
from .parsing import (
    HourEntry,
    HourlyWeatherDay,
    SeasonalWeatherRanges,
    WEATHER_PARAMETERS,
    extract_envelope,
    format_number,
    parse_hourly_weather,
    parse_number,
    parse_weather_ranges,
)
from .prompts import build_stage3_conversation, stage2_request, stage3_bindings

log = logging.getLogger(__name__)

SOLAR_SUM_CAP_WM2 = 1000.0
DIRECT_DOMINANCE_FLOOR_WM2 = 50.0
TEMP_PEAK_WINDOW = (14, 15, 16)
SOLAR_PEAK_WINDOW = (12, 13, 14, 15)

# parameters that are physically non-negative (temperature may dip below zero)
_NON_NEGATIVE = ("Humidity", "SolRad-Diffuse", "SolRad-Direct", "Wind-Speed")


class WeatherKind(enum.Enum):
    SOLAR_SUM_EXCEEDS_CAP = "SolarSumExceedsCap"
    DIFFUSE_NOT_BELOW_DIRECT = "DiffuseNotBelowDirect"
    TEMP_PEAK_OUTSIDE_WINDOW = "TempPeakOutsideWindow"
    SOLAR_PEAK_OUTSIDE_WINDOW = "SolarPeakOutsideWindow"
    RANGE_EXCEEDED = "RangeExceeded"
    NEGATIVE_VALUE = "NegativeValue"


@dataclass(frozen=True)
class WeatherViolation:
    kind: WeatherKind
    hour: int | None  # None for season-level findings
    detail: str
    severity: str  # "error" | "warning"


def validate_ranges(ranges: SeasonalWeatherRanges) -> list[WeatherViolation]:
    """Sanity-check stage-2 seasonal ranges before they steer stage 3."""
    violations: list[WeatherViolation] = []
    for season in SEASONS:
        diffuse_max = ranges.bounds("SolRad-Diffuse", season)[1]
        direct_max = ranges.bounds("SolRad-Direct", season)[1]
        if diffuse_max + direct_max > SOLAR_SUM_CAP_WM2:
            violations.append(
                WeatherViolation(
                    kind=WeatherKind.SOLAR_SUM_EXCEEDS_CAP,
                    hour=None,
                    detail=(
                        f"{season}: diffuse max {format_number(diffuse_max)} + direct max "
                        f"{format_number(direct_max)} exceeds {SOLAR_SUM_CAP_WM2:g} W/m2"
                    ),
                    severity="error",
                )
            )
        for parameter in _NON_NEGATIVE:
            lo = ranges.bounds(parameter, season)[0]
            if lo < 0:
                violations.append(
                    WeatherViolation(
                        kind=WeatherKind.NEGATIVE_VALUE,
                        hour=None,
                        detail=f"{season}: {parameter} minimum {format_number(lo)} is negative",
                        severity="error",
                    )
                )
    return violations


def validate_hourly(
    day: HourlyWeatherDay, ranges: SeasonalWeatherRanges | None = None
) -> list[WeatherViolation]:
    """Physics checks per hour plus whole-day peak-placement warnings."""
    violations: list[WeatherViolation] = []
    temp = day.values("Temperature")
    diffuse = day.values("SolRad-Diffuse")
    direct = day.values("SolRad-Direct")

    for hour in range(24):
        if diffuse[hour] + direct[hour] > SOLAR_SUM_CAP_WM2:
            violations.append(
                WeatherViolation(
                    kind=WeatherKind.SOLAR_SUM_EXCEEDS_CAP,
                    hour=hour,
                    detail=(
                        f"diffuse {format_number(diffuse[hour])} + direct "
                        f"{format_number(direct[hour])} exceeds {SOLAR_SUM_CAP_WM2:g} W/m2"
                    ),
                    severity="error",
                )
            )
        if direct[hour] > DIRECT_DOMINANCE_FLOOR_WM2 and diffuse[hour] >= direct[hour]:
            violations.append(
                WeatherViolation(
                    kind=WeatherKind.DIFFUSE_NOT_BELOW_DIRECT,
                    hour=hour,
                    detail=(
                        f"diffuse {format_number(diffuse[hour])} not below direct "
                        f"{format_number(direct[hour])}"
                    ),
                    severity="error",
                )
            )
        for parameter in _NON_NEGATIVE:
            value = day.series[parameter][hour].value
            if value < 0:
                violations.append(
                    WeatherViolation(
                        kind=WeatherKind.NEGATIVE_VALUE,
                        hour=hour,
                        detail=f"{parameter} is negative: {format_number(value)}",
                        severity="error",
                    )
                )
        if ranges is not None:
            for parameter in WEATHER_PARAMETERS:
                value = day.series[parameter][hour].value
                lo, hi = ranges.bounds(parameter, day.season)
                if not lo <= value <= hi:
                    violations.append(
                        WeatherViolation(
                            kind=WeatherKind.RANGE_EXCEEDED,
                            hour=hour,
                            detail=(
                                f"{parameter} value {format_number(value)} outside "
                                f"[{format_number(lo)}, {format_number(hi)}] for {day.season}"
                            ),
                            severity="error",
                        )
                    )

    temp_peak = max(range(24), key=lambda h: (temp[h], -h))
    if temp_peak not in TEMP_PEAK_WINDOW:
        violations.append(
            WeatherViolation(
                kind=WeatherKind.TEMP_PEAK_OUTSIDE_WINDOW,
                hour=temp_peak,
                detail=f"temperature peaks at hour {temp_peak}, expected {list(TEMP_PEAK_WINDOW)}",
                severity="warning",
            )
        )
    solar_peak = max(range(24), key=lambda h: (direct[h], -h))
    if solar_peak not in SOLAR_PEAK_WINDOW:
        violations.append(
            WeatherViolation(
                kind=WeatherKind.SOLAR_PEAK_OUTSIDE_WINDOW,
                hour=solar_peak,
                detail=(
                    f"direct solar radiation peaks at hour {solar_peak}, "
                    f"expected {list(SOLAR_PEAK_WINDOW)}"
                ),
                severity="warning",
            )
        )
    return violations


def has_errors(violations: Sequence[WeatherViolation]) -> bool:
    return any(v.severity == "error" for v in violations)


# --- capitals and TMY ---------------------------------------------------------


class Capital(NamedTuple):
    city: str
    lat: float
    lon: float


_DEFAULT_CAPITALS = {
    "USA": Capital("Washington D.C.", 38.90, -77.04),
    "Japan": Capital("Tokyo", 35.68, 139.69),
    "India": Capital("New Delhi", 28.61, 77.21),
    "Sweden": Capital("Stockholm", 59.33, 18.07),
    "United Arab Emirates": Capital("Abu Dhabi", 24.45, 54.38),
    "Brazil": Capital("Brasilia", -15.79, -47.88),
}


@dataclass(frozen=True)
class CapitalRegistry:
    """Country -> reference location used for TMY lookups."""

    entries: Mapping[str, Capital]

    @classmethod
    def default(cls, overrides: Mapping[str, tuple[str, float, float]] | None = None):
        entries = dict(_DEFAULT_CAPITALS)
        for country, (city, lat, lon) in (overrides or {}).items():
            entries[country] = Capital(city, float(lat), float(lon))
        return cls(entries=entries)

    def capital(self, country: str) -> Capital:
        try:
            return self.entries[country]
        except KeyError:
            raise ConfigError(f"no reference location registered for {country!r}") from None


class TmyRecord(NamedTuple):
    month: int
    day: int
    hour: int
    temp_c: float
    humidity_pct: float
    diffuse_wm2: float
    direct_wm2: float
    wind_ms: float


@dataclass(frozen=True)
class TmySeries:
    city: str
    lat: float
    lon: float
    records: tuple[TmyRecord, ...]


_TIME_FIELD = re.compile(r"^(\d{4})(\d{2})(\d{2}):(\d{2})(\d{2})$")


def fetch_tmy(
    city: str,
    lat: float,
    lon: float,
    cache_dir: str | Path,
    *,
    base_url: str = "https://re.jrc.ec.europa.eu",
    http_get: Callable[[str], str] | None = None,
) -> TmySeries:
    """Fetch a typical meteorological year, caching the payload verbatim."""
    if not -90 <= lat <= 90 or not -180 <= lon <= 180:
        raise CoordError(f"invalid coordinates lat={lat} lon={lon}")
    cache_dir = Path(cache_dir)
    cache_path = cache_dir / f"tmy_{lat}_{lon}.json"
    if cache_path.exists():
        payload = cache_path.read_text(encoding="utf-8")
        return _parse_tmy(payload, city, lat, lon)

    url = f"{base_url}/api/v5_2/tmy?lat={lat}&lon={lon}&outputformat=json"
    if http_get is None:
        http_get = _http_get_text
    payload = http_get(url)
    series = _parse_tmy(payload, city, lat, lon)
    cache_dir.mkdir(parents=True, exist_ok=True)
    cache_path.write_text(payload, encoding="utf-8")
    return series


def _http_get_text(url: str) -> str:
    try:
        response = requests.get(url, timeout=120)
    except requests.RequestException as exc:
        raise TransportError(f"TMY request failed: {exc}") from exc
    if response.status_code != 200:
        raise TransportError(f"TMY service returned HTTP {response.status_code}")
    return response.text


def _parse_tmy(payload: str, city: str, lat: float, lon: float) -> TmySeries:
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ParseError(f"TMY payload is not JSON: {exc}") from exc
    try:
        rows = doc["outputs"]["tmy_hourly"]
    except (KeyError, TypeError):
        raise ParseError("TMY payload is missing outputs.tmy_hourly") from None
    if not isinstance(rows, list) or len(rows) != 8760:
        count = len(rows) if isinstance(rows, list) else "non-list"
        raise ParseError(f"TMY payload must hold 8760 hourly rows, got {count}")
    records = []
    for row in rows:
        try:
            stamp = _TIME_FIELD.match(str(row["time(UTC)"]))
            if not stamp:
                raise KeyError("time(UTC)")
            records.append(
                TmyRecord(
                    month=int(stamp.group(2)),
                    day=int(stamp.group(3)),
                    hour=int(stamp.group(4)),
                    temp_c=float(row["T2m"]),
                    humidity_pct=float(row["RH"]),
                    diffuse_wm2=float(row["Gd(h)"]),
                    direct_wm2=float(row["Gb(n)"]),
                    wind_ms=float(row["WS10m"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed TMY row: {exc}") from exc
    return TmySeries(city=city, lat=lat, lon=lon, records=tuple(records))


_TMY_FIELDS = (
    ("Temperature", "temp_c"),
    ("Humidity", "humidity_pct"),
    ("SolRad-Diffuse", "diffuse_wm2"),
    ("SolRad-Direct", "direct_wm2"),
    ("Wind-Speed", "wind_ms"),
)


def aggregate_tmy_to_season(series: TmySeries, country: str) -> dict[str, HourlyWeatherDay]:
    """Average the series into one mean day per season (per-hour means)."""
    southern = country in SOUTHERN_HEMISPHERE_COUNTRIES
    buckets: dict[tuple[str, int], list[TmyRecord]] = {}
    for record in series.records:
        season = season_for_month(record.month, southern=southern)
        buckets.setdefault((season, record.hour), []).append(record)

    days: dict[str, HourlyWeatherDay] = {}
    for season in SEASONS:
        series_by_parameter: dict[str, tuple[HourEntry, ...]] = {}
        for parameter, attr in _TMY_FIELDS:
            entries = []
            for hour in range(24):
                rows = buckets.get((season, hour))
                if not rows:
                    raise ShapeError(
                        f"no TMY records for {season} hour {hour}",
                        parameter=parameter,
                        count=0,
                    )
                mean = sum(getattr(r, attr) for r in rows) / len(rows)
                entries.append(HourEntry(hour=hour, label="TMY-mean", value=mean))
            series_by_parameter[parameter] = tuple(entries)
        days[season] = HourlyWeatherDay(country=country, season=season, series=series_by_parameter)
    return days


# --- synthesis ------------------------------------------------------------------


def synthesize_ranges(
    config: RunConfig,
    country: str,
    gateway: ChatGateway,
    on_response: Callable[[str, str], None] | None = None,
) -> SeasonalWeatherRanges:
    """Stage 2: ask for seasonal ranges, retrying while validation errors out."""
    request = stage2_request(country, config.year)
    messages = request.to_messages()
    last_problem: Exception | None = None
    for _ in range(config.max_retries + 1):
        exchange = gateway.complete(messages)
        try:
            ranges = parse_weather_ranges(extract_envelope(exchange.response_text), country)
        except ParseFailure as exc:
            last_problem = exc
            log.warning("range response for %s failed to parse: %s", country, exc)
            continue
        violations = validate_ranges(ranges)
        if has_errors(violations):
            last_problem = StageFailure(
                f"range validation errors for {country}: "
                + "; ".join(v.detail for v in violations if v.severity == "error")
            )
            log.warning("%s", last_problem)
            continue
        for violation in violations:
            log.warning("range warning for %s: %s", country, violation.detail)
        if on_response is not None:
            on_response(country, exchange.response_text)
        return ranges
    raise StageFailure(f"seasonal ranges for {country} failed: {last_problem}")


def synthesize_weather(
    config: RunConfig,
    country: str,
    *,
    gateway: ChatGateway | None = None,
    ranges: SeasonalWeatherRanges | None = None,
    registry: CapitalRegistry | None = None,
    http_get: Callable[[str], str] | None = None,
    on_response: Callable[[str, str, str, HourlyWeatherDay], None] | None = None,
) -> dict[str, HourlyWeatherDay]:
    """Produce one validated weather day per configured season.

    weather_source="llm" chains the per-country conversation season by
    season and retries any day whose validation reports errors.
    weather_source="external" aggregates a TMY series instead; there the
    validators only log.
    """
    if config.weather_source == "external":
        registry = registry or CapitalRegistry.default(config.capitals)
        capital = registry.capital(country)
        series = fetch_tmy(
            capital.city,
            capital.lat,
            capital.lon,
            config.tmy_cache_path,
            base_url=config.pvgis_base_url,
            http_get=http_get,
        )
        days = aggregate_tmy_to_season(series, country)
        for season in config.seasons:
            for violation in validate_hourly(days[season]):
                log.warning(
                    "TMY aggregate for %s %s: %s (%s)",
                    country,
                    season,
                    violation.detail,
                    violation.severity,
                )
        return {season: days[season] for season in config.seasons}

    if gateway is None or ranges is None:
        raise ConfigError("llm weather synthesis needs a gateway and stage-2 ranges")

    days: dict[str, HourlyWeatherDay] = {}
    prior: list[tuple[ChatMessage, ChatMessage]] = []
    for season_index, season in enumerate(config.seasons):
        day, raw = synthesize_weather_day(
            config, country, season, season_index, prior, ranges, gateway
        )
        prior.append(
            (
                build_stage3_conversation(
                    country,
                    season_index,
                    prior,
                    stage3_bindings(country, config.year, season, ranges),
                )[-1],
                ChatMessage("assistant", raw),
            )
        )
        if on_response is not None:
            on_response(country, season, raw, day)
        days[season] = day
    return days


def synthesize_weather_day(
    config: RunConfig,
    country: str,
    season: str,
    season_index: int,
    prior: Sequence[tuple[ChatMessage, ChatMessage]],
    ranges: SeasonalWeatherRanges,
    gateway: ChatGateway,
) -> tuple[HourlyWeatherDay, str]:
    """One chained stage-3 request with validation retries.

    Returns the validated day plus the raw accepted response, which the
    caller must feed back as the assistant turn for the next season.
    """
    bindings = stage3_bindings(country, config.year, season, ranges)
    conversation = build_stage3_conversation(country, season_index, prior, bindings)
    last_problem: Exception | None = None
    for _ in range(config.max_retries + 1):
        exchange = gateway.complete(conversation)
        try:
            candidate = parse_hourly_weather(
                extract_envelope(exchange.response_text), country, season
            )
        except ParseFailure as exc:
            last_problem = exc
            log.warning("weather day for %s %s failed to parse: %s", country, season, exc)
            continue
        violations = validate_hourly(candidate, ranges)
        if has_errors(violations):
            last_problem = StageFailure(
                "validation errors: "
                + "; ".join(
                    f"hour {v.hour}: {v.detail}" for v in violations if v.severity == "error"
                )
            )
            log.warning("weather day for %s %s rejected: %s", country, season, last_problem)
            continue
        for violation in violations:
            log.warning("weather warning for %s %s: %s", country, season, violation.detail)
        return candidate, exchange.response_text
    raise StageFailure(f"weather day for {country} {season} failed: {last_problem}")


# --- CSV persistence --------------------------------------------------------------

WEATHER_CSV_HEADER = (
    "country,season,hour,temp_label,temp_c,humidity_label,humidity_pct,"
    "diffuse_label,diffuse_wm2,direct_label,direct_wm2,wind_label,wind_ms"
)

_CSV_ORDER = ("Temperature", "Humidity", "SolRad-Diffuse", "SolRad-Direct", "Wind-Speed")


def write_weather_csv(day: HourlyWeatherDay, path: str | Path) -> None:
    lines = [WEATHER_CSV_HEADER]
    for hour in range(24):
        cells = [day.country, day.season, str(hour)]
        for parameter in _CSV_ORDER:
            entry = day.series[parameter][hour]
            cells.append(entry.label)
            cells.append(format_number(entry.value))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_weather_csv(path: str | Path) -> HourlyWeatherDay:
    lines = Path(path).read_text(encoding="utf-8").strip().split("\n")
    if not lines or lines[0] != WEATHER_CSV_HEADER:
        raise ParseError(f"unexpected weather CSV header in {path}")
    rows = lines[1:]
    if len(rows) != 24:
        raise ShapeError(f"weather CSV {path} has {len(rows)} rows, expected 24", count=len(rows))
    country = season = None
    entries: dict[str, list[HourEntry]] = {p: [] for p in _CSV_ORDER}
    for expected_hour, row in enumerate(rows):
        cells = row.split(",")
        if len(cells) != 13:
            raise ParseError(f"weather CSV row has {len(cells)} cells, expected 13")
        country, season = cells[0], cells[1]
        hour = parse_number(cells[2])
        if hour != expected_hour:
            raise ShapeError(f"weather CSV rows out of order at hour {hour}")
        for i, parameter in enumerate(_CSV_ORDER):
            label = cells[3 + 2 * i]
            value = parse_number(cells[4 + 2 * i])
            entries[parameter].append(HourEntry(hour=expected_hour, label=label, value=value))
    return HourlyWeatherDay(
        country=country,
        season=season,
        series={p: tuple(v) for p, v in entries.items()},
    )
