"""Structured parsing of model responses.

Every response arrives wrapped in $$MESSAGE_START$$ / $$MESSAGE_END$$
delimiters. Inside, stage 1 is JSON and stages 2-4 use a hash-delimited
section grammar: `#Name#[(f1,f2,f3),(f1,f2,f3),...]`. Models frequently
emit literal backslash-n sequences (two characters) where they were told
not to use real newlines; both are treated as plain separators.

Parsers raise only ParseFailure subclasses, whatever the input. Numeric
fields keep their source notation: integer text parses to int, decimal
text to float, so serializing a parsed value reproduces the original.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .errors import (
    ContentError,
    EnvelopeError,
    MemberMismatch,
    NegativeConsumptionError,
    ParseError,
    RangeError,
    ShapeError,
)
from .templates import ENVELOPE_END, ENVELOPE_START

SEASONS = ("Winter", "Spring", "Summer", "Autumn")

WEATHER_PARAMETERS = (
    "Temperature",
    "Humidity",
    "SolRad-Diffuse",
    "SolRad-Direct",
    "Wind-Speed",
)

HVAC_SECTIONS = ("Heating", "Cooling")


@dataclass(frozen=True)
class Envelope:
    """Delimiter-stripped response payload."""

    inner_text: str


class HourEntry(NamedTuple):
    """One labelled hourly reading: weather value or action consumption."""

    hour: int
    label: str
    value: float  # int is accepted and preserved


@dataclass(frozen=True)
class FamilyStructure:
    country: str
    family_type: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class SeasonalWeatherRanges:
    country: str
    # parameter -> season -> (min, max)
    ranges: Mapping[str, Mapping[str, tuple[float, float]]]

    def bounds(self, parameter: str, season: str) -> tuple[float, float]:
        return self.ranges[parameter][season]


@dataclass(frozen=True)
class HourlyWeatherDay:
    country: str
    season: str
    # parameter -> 24 entries, hours 0..23 in order
    series: Mapping[str, tuple[HourEntry, ...]]

    def values(self, parameter: str) -> tuple[float, ...]:
        return tuple(e.value for e in self.series[parameter])


@dataclass(frozen=True)
class DailyConsumptionProfile:
    country: str
    family_type: str
    season: str
    day_type: str  # "Weekday" | "Weekend"
    members: tuple[str, ...]
    # member -> 24 entries; HVAC kept separately
    series: Mapping[str, tuple[HourEntry, ...]]
    heating: tuple[HourEntry, ...]
    cooling: tuple[HourEntry, ...]
    totals: tuple[float, ...]  # computed member+HVAC sum, never parsed


# --- envelope ---------------------------------------------------------------

# literal backslash escapes and real whitespace hugging the payload edges
_EDGE_NOISE = re.compile(r"^(?:\s|\\n|\\t|\\r)+|(?:\s|\\n|\\t|\\r)+$")


def extract_envelope(raw: str | bytes) -> Envelope:
    """Locate the delimiters and return the trimmed text between them."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="replace")
    if not isinstance(raw, str):
        raise EnvelopeError("not_text", f"expected str or bytes, got {type(raw).__name__}")
    start = raw.find(ENVELOPE_START)
    if start < 0:
        raise EnvelopeError("missing_start", f"no {ENVELOPE_START} delimiter")
    end = raw.find(ENVELOPE_END, start + len(ENVELOPE_START))
    if end < 0:
        if raw.find(ENVELOPE_END) >= 0:
            raise EnvelopeError("end_before_start", f"{ENVELOPE_END} precedes {ENVELOPE_START}")
        raise EnvelopeError("missing_end", f"no {ENVELOPE_END} delimiter")
    inner = _EDGE_NOISE.sub("", raw[start + len(ENVELOPE_START) : end])
    if not inner:
        raise EnvelopeError("empty", "delimiters enclose nothing")
    return Envelope(inner)


def wrap_envelope(inner_text: str) -> str:
    return f"{ENVELOPE_START}{inner_text}{ENVELOPE_END}"


# --- shared helpers ---------------------------------------------------------

# backslash escapes that models emit instead of real separators
_LITERAL_SEPARATORS = re.compile(r"\\n|\\t|\\r")
_REAL_SEPARATORS = re.compile(r"[\n\t\r]")

_SECTION = re.compile(r"#([^#\[\]]+)#\s*\[([^\[\]]*)\]")
_TUPLE = re.compile(r"\(([^()]*)\)")

# characters the prompt format forbids inside labels
_FORBIDDEN_IN_LABEL = re.compile(r"[\"'`&*{}]")

# stage-1 labels are sanitized instead of rejected
_SANITIZE = re.compile(r"[\"'`&*{}]|\\n|\\t|\\r|[\n\t\r]")


def _flatten(text: str) -> str:
    text = _LITERAL_SEPARATORS.sub(" ", text)
    return _REAL_SEPARATORS.sub(" ", text)


def parse_number(text: str):
    """Parse an int or float, preserving which one the text spelled."""
    t = text.strip()
    if not t:
        raise ParseError("empty numeric field")
    try:
        return int(t)
    except ValueError:
        pass
    try:
        value = float(t)
    except ValueError:
        raise ParseError(f"not a number: {t!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite number: {t!r}")
    return value


def format_number(value) -> str:
    """Inverse of parse_number: ints print bare, floats keep their point."""
    if isinstance(value, bool):
        raise ValueError("booleans are not numeric fields")
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _check_label(label: str, where: str) -> str:
    label = label.strip()
    if not label:
        raise ParseError(f"empty label in {where}")
    bad = _FORBIDDEN_IN_LABEL.search(label)
    if bad:
        raise ParseError(f"forbidden character {bad.group(0)!r} in label {label!r} ({where})")
    return label


def slugify_label(label: str) -> str:
    """Collapse internal whitespace to hyphens; used to match member names."""
    return "-".join(str(label).split())


def sanitize_label(label: str) -> str:
    """Stage-1 JSON labels get cleaned rather than rejected."""
    cleaned = _SANITIZE.sub("-", str(label))
    return " ".join(cleaned.split())


def _scan_sections(text: str, where: str) -> dict[str, str]:
    sections: dict[str, str] = {}
    for match in _SECTION.finditer(text):
        name = match.group(1).strip()
        if not name:
            raise ParseError(f"unnamed section in {where}")
        if name in sections:
            raise ParseError(f"duplicate section #{name}# in {where}")
        sections[name] = match.group(2)
    if not sections:
        raise ParseError(f"no #Name#[...] sections found in {where}")
    return sections


def _scan_tuples(content: str, arity: int, where: str) -> list[list[str]]:
    rows = []
    for match in _TUPLE.finditer(content):
        fields = match.group(1).split(",")
        if len(fields) != arity:
            raise ParseError(
                f"expected {arity} comma-separated fields in {where}, got {len(fields)}: "
                f"({match.group(1).strip()})"
            )
        rows.append([f.strip() for f in fields])
    return rows


def _hour_entries(content: str, section: str, where: str) -> tuple[HourEntry, ...]:
    rows = _scan_tuples(content, 3, f"{where} #{section}#")
    if len(rows) != 24:
        raise ShapeError(
            f"#{section}# in {where} has {len(rows)} tuples, expected 24",
            parameter=section,
            count=len(rows),
        )
    entries: dict[int, HourEntry] = {}
    for hour_text, label, value_text in rows:
        hour = parse_number(hour_text)
        if not isinstance(hour, int):
            raise ParseError(f"hour {hour_text!r} in {where} #{section}# is not an integer")
        if not 0 <= hour <= 23:
            raise ShapeError(
                f"hour {hour} out of range in {where} #{section}#",
                parameter=section,
                count=len(rows),
            )
        if hour in entries:
            raise ShapeError(
                f"duplicate hour {hour} in {where} #{section}#",
                parameter=section,
                count=len(rows),
            )
        entries[hour] = HourEntry(
            hour=hour,
            label=_check_label(label, f"{where} #{section}#"),
            value=parse_number(value_text),
        )
    return tuple(entries[h] for h in range(24))


# --- stage 1: family structures ---------------------------------------------


def parse_family_structures(
    envelope: Envelope, expected_country: str, expected_count: int
) -> list[FamilyStructure]:
    """Parse the family-structure JSON for one country."""
    try:
        doc = json.loads(envelope.inner_text)
    except (json.JSONDecodeError, RecursionError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list) or not doc:
        raise ParseError("expected a non-empty JSON array of country objects")

    matches = []
    for entry in doc:
        if not isinstance(entry, dict):
            raise ParseError("country entries must be JSON objects")
        name = entry.get("Country")
        if not isinstance(name, str):
            raise ParseError('country entry is missing a string "Country" key')
        if sanitize_label(name).lower() == sanitize_label(expected_country).lower():
            matches.append(entry)
    if not matches:
        raise ContentError(f"response does not cover the requested country {expected_country!r}")
    if len(matches) > 1:
        raise ContentError(f"response lists {expected_country!r} more than once")

    raw_families = matches[0].get("Families")
    if not isinstance(raw_families, list):
        raise ParseError('country entry is missing a "Families" array')

    families: list[FamilyStructure] = []
    seen_types: set[str] = set()
    for raw in raw_families:
        if not isinstance(raw, dict):
            raise ParseError("family entries must be JSON objects")
        family_type = raw.get("Family Type")
        members = raw.get("Members")
        if not isinstance(family_type, str) or not isinstance(members, list):
            raise ParseError('family entries need "Family Type" and "Members" keys')
        if not all(isinstance(m, str) for m in members):
            raise ParseError("family members must be strings")
        family_type = sanitize_label(family_type)
        clean_members = tuple(sanitize_label(m) for m in members)
        if not family_type:
            raise ContentError("family type label is empty after sanitization")
        if not clean_members or any(not m for m in clean_members):
            raise ContentError(f"family {family_type!r} has an empty member list or member label")
        if family_type in seen_types:
            raise ContentError(f"duplicate family type {family_type!r}")
        seen_types.add(family_type)
        families.append(
            FamilyStructure(
                country=expected_country, family_type=family_type, members=clean_members
            )
        )
    if len(families) != expected_count:
        raise ContentError(f"expected {expected_count} family types, got {len(families)}")
    return families


def serialize_family_structures(country: str, families: list[FamilyStructure]) -> str:
    doc = [
        {
            "Country": country,
            "Families": [
                {"Family Type": f.family_type, "Members": list(f.members)} for f in families
            ],
        }
    ]
    return json.dumps(doc, indent=4)


# --- stage 2: seasonal weather ranges ----------------------------------------


def parse_weather_ranges(envelope: Envelope, country: str) -> SeasonalWeatherRanges:
    """Parse per-season min/max ranges for the five weather parameters."""
    text = _flatten(envelope.inner_text)
    sections = _scan_sections(text, "weather ranges")
    unknown = sorted(set(sections) - set(WEATHER_PARAMETERS))
    if unknown:
        raise ParseError(f"unknown parameter sections: {unknown}")
    missing = [p for p in WEATHER_PARAMETERS if p not in sections]
    if missing:
        raise ParseError(f"missing parameter sections: {missing}")

    ranges: dict[str, dict[str, tuple[float, float]]] = {}
    for parameter in WEATHER_PARAMETERS:
        rows = _scan_tuples(sections[parameter], 3, f"#{parameter}#")
        per_season: dict[str, tuple[float, float]] = {}
        for season_text, lo_text, hi_text in rows:
            season = season_text.strip()
            if season not in SEASONS:
                raise ParseError(f"unknown season {season!r} in #{parameter}#")
            if season in per_season:
                raise ParseError(f"duplicate season {season!r} in #{parameter}#")
            lo = parse_number(lo_text)
            hi = parse_number(hi_text)
            if lo > hi:
                raise RangeError(parameter, season)
            per_season[season] = (lo, hi)
        absent = [s for s in SEASONS if s not in per_season]
        if absent:
            raise ParseError(f"#{parameter}# is missing seasons: {absent}")
        ranges[parameter] = per_season
    return SeasonalWeatherRanges(country=country, ranges=ranges)


def serialize_weather_ranges(ranges: SeasonalWeatherRanges) -> str:
    parts = []
    for parameter in WEATHER_PARAMETERS:
        tuples = ",".join(
            f"({season},{format_number(lo)},{format_number(hi)})"
            for season in SEASONS
            for lo, hi in [ranges.ranges[parameter][season]]
        )
        parts.append(f"#{parameter}#[{tuples}]")
    return "".join(parts)


# --- stage 3: hourly weather --------------------------------------------------


def parse_hourly_weather(envelope: Envelope, country: str, season: str) -> HourlyWeatherDay:
    """Parse a 24-hour weather day: five parameters of (hour, label, value)."""
    text = _flatten(envelope.inner_text)
    sections = _scan_sections(text, "hourly weather")
    unknown = sorted(set(sections) - set(WEATHER_PARAMETERS))
    if unknown:
        raise ParseError(f"unknown parameter sections: {unknown}")
    missing = [p for p in WEATHER_PARAMETERS if p not in sections]
    if missing:
        raise ParseError(f"missing parameter sections: {missing}")
    series = {
        parameter: _hour_entries(sections[parameter], parameter, "hourly weather")
        for parameter in WEATHER_PARAMETERS
    }
    return HourlyWeatherDay(country=country, season=season, series=series)


def serialize_hourly_weather(day: HourlyWeatherDay) -> str:
    parts = []
    for parameter in WEATHER_PARAMETERS:
        tuples = ",".join(
            f"({e.hour},{e.label},{format_number(e.value)})" for e in day.series[parameter]
        )
        parts.append(f"#{parameter}#[{tuples}]")
    return "\n".join(parts)


# --- stage 4: daily consumption -----------------------------------------------

_MEMBERS_MARK = ">>>MEMBERS>>>"
_HVAC_MARK = ">>>HVAC>>>"


def parse_consumption(
    envelope: Envelope, family: FamilyStructure, season: str, day_type: str
) -> DailyConsumptionProfile:
    """Parse per-member and HVAC hourly consumption; totals are computed."""
    text = _flatten(envelope.inner_text)
    members_at = text.find(_MEMBERS_MARK)
    hvac_at = text.find(_HVAC_MARK)
    if members_at < 0:
        raise ParseError(f"missing {_MEMBERS_MARK} marker")
    if hvac_at < 0:
        raise ParseError(f"missing {_HVAC_MARK} marker")
    if hvac_at < members_at:
        raise ParseError(f"{_HVAC_MARK} appears before {_MEMBERS_MARK}")

    member_text = text[members_at + len(_MEMBERS_MARK) : hvac_at]
    hvac_text = text[hvac_at + len(_HVAC_MARK) :]

    member_sections = _scan_sections(member_text, "member consumption")
    expected = {slugify_label(m): m for m in family.members}
    got = {slugify_label(name): name for name in member_sections}
    if len(got) != len(member_sections):
        raise ParseError("member sections collide after whitespace normalization")
    missing = tuple(expected[s] for s in expected if s not in got)
    extra = tuple(got[s] for s in got if s not in expected)
    if missing or extra:
        raise MemberMismatch(missing=missing, extra=extra)

    series: dict[str, tuple[HourEntry, ...]] = {}
    for slug, section_name in got.items():
        member = expected[slug]
        series[member] = _check_consumption(
            _hour_entries(member_sections[section_name], section_name, "member consumption"),
            section_name,
        )

    hvac_sections = _scan_sections(hvac_text, "HVAC consumption")
    bad_hvac = sorted(set(hvac_sections) - set(HVAC_SECTIONS))
    if bad_hvac:
        raise ParseError(f"unknown HVAC sections: {bad_hvac}")
    missing_hvac = [name for name in HVAC_SECTIONS if name not in hvac_sections]
    if missing_hvac:
        raise ParseError(f"missing HVAC sections: {missing_hvac}")
    heating = _check_consumption(
        _hour_entries(hvac_sections["Heating"], "Heating", "HVAC consumption"), "Heating"
    )
    cooling = _check_consumption(
        _hour_entries(hvac_sections["Cooling"], "Cooling", "HVAC consumption"), "Cooling"
    )

    ordered_members = tuple(family.members)
    totals = tuple(
        sum(series[m][h].value for m in ordered_members) + heating[h].value + cooling[h].value
        for h in range(24)
    )
    return DailyConsumptionProfile(
        country=family.country,
        family_type=family.family_type,
        season=season,
        day_type=day_type,
        members=ordered_members,
        series=series,
        heating=heating,
        cooling=cooling,
        totals=totals,
    )


def _check_consumption(entries: tuple[HourEntry, ...], section: str) -> tuple[HourEntry, ...]:
    for entry in entries:
        if entry.value < 0:
            raise NegativeConsumptionError(
                f"negative kWh {entry.value} at hour {entry.hour} in #{section}#"
            )
    return entries


def serialize_consumption(profile: DailyConsumptionProfile) -> str:
    def section(name: str, entries: tuple[HourEntry, ...]) -> str:
        tuples = ",".join(f"({e.hour},{e.label},{format_number(e.value)})" for e in entries)
        return f"#{slugify_label(name)}#[{tuples}]"

    parts = [_MEMBERS_MARK]
    parts.extend(section(m, profile.series[m]) for m in profile.members)
    parts.append(_HVAC_MARK)
    parts.append(section("Heating", profile.heating))
    parts.append(section("Cooling", profile.cooling))
    return "".join(parts)
