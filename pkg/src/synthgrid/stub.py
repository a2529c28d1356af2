"""A deterministic offline stand-in for the chat endpoint.

StubModelTransport speaks the same wire shape as the real endpoint but
synthesizes every response locally: it recognizes which stage a request
belongs to from the rendered prompt text, extracts the bound values, and
emits a grammar-valid, validator-clean response. Identical requests get
identical responses, which makes it useful for demos, fixture recording,
and replay tests that must run with no network at all.
"""

from __future__ import annotations

import math
import re
from typing import Mapping

from .parsing import (
    FamilyStructure,
    HourEntry,
    HourlyWeatherDay,
    DailyConsumptionProfile,
    SeasonalWeatherRanges,
    parse_number,
    serialize_consumption,
    serialize_family_structures,
    serialize_hourly_weather,
    serialize_weather_ranges,
    wrap_envelope,
)

_STAGE1 = re.compile(
    r"Generate (\d+) unique family types for the following country: (.*?)\. \n"
)
_STAGE2 = re.compile(
    r"^For the country of (.+?) and in the year of (\d+), provide typical min-max ranges"
)
_STAGE3 = re.compile(
    r"^For the country of (.+?) in the year of (\d+) and during the (\w+) season, "
    r"generate a 24-hour weather report"
)
_STAGE4_HEAD = re.compile(
    r"^For a family in (.+?) in the year of (\d+), generate their daily electricity "
    r"usage pattern in the (\w+) considering the season is (\w+)\."
)
_STAGE4_FAMILY = re.compile(
    r"The selected family type is (.+?), which includes the following members: "
    r"(.+?) total of (\d+)\."
)
_STAGE4_TEMPS = re.compile(r"temperature = (.+?) \(°C\)")

_RANGE_LINES = {
    "Temperature": re.compile(r"- Temperature: \[(.+?), (.+?)\] \(°C\)"),
    "Humidity": re.compile(r"- Humidity: \[(.+?), (.+?)\] \(%\)"),
    "SolRad-Diffuse": re.compile(r"- Solar Radiation \(Diffuse\): \[(.+?), (.+?)\]"),
    "SolRad-Direct": re.compile(r"- Solar Radiation \(Direct\): \[(.+?), (.+?)\]"),
    "Wind-Speed": re.compile(r"- Wind Speed: \[(.+?), (.+?)\]"),
}

# (family type, members) presets cycled through per requested count
_FAMILY_POOL = (
    ("Nuclear Family", ("Father", "Mother", "Son", "Daughter")),
    ("Single-Parent Household", ("Mother", "Son", "Daughter")),
    ("Retired Couple", ("Grandfather", "Grandmother")),
    ("Multigenerational Family", ("Grandfather", "Grandmother", "Father", "Mother", "Son")),
    ("Young Couple", ("Husband", "Wife")),
    ("Single Professional", ("Adult",)),
    ("Extended Family", ("Father", "Mother", "Uncle", "Aunt", "Son")),
    ("Shared Apartment", ("Roommate-A", "Roommate-B", "Roommate-C")),
)

# (winter low, summer high) temperature anchors per country
_CLIMATE_ANCHORS = {
    "USA": (-5, 33),
    "Japan": (0, 33),
    "India": (8, 45),
    "Sweden": (-16, 26),
    "United Arab Emirates": (12, 48),
    "Brazil": (14, 36),
}
_DEFAULT_ANCHOR = (-2, 30)

_SEASON_SOLAR_DIRECT_MAX = {"Winter": 500, "Spring": 650, "Summer": 700, "Autumn": 600}
_SEASON_HUMIDITY = {
    "Winter": (30, 85),
    "Spring": (30, 80),
    "Summer": (25, 90),
    "Autumn": (30, 85),
}
_SEASON_WIND = {"Winter": (0, 14), "Spring": (0, 12), "Summer": (0, 10), "Autumn": (0, 12)}


class StubModelTransport:
    """Transport that answers every chat request from local rules."""

    def post_chat(self, url: str, payload: Mapping, timeout: float) -> Mapping:
        messages = payload["messages"]
        user = messages[-1]["content"]
        text = _respond(user)
        prompt_chars = sum(len(m["content"]) for m in messages)
        return {
            "choices": [{"message": {"content": text}}],
            "usage": {
                "prompt_tokens": prompt_chars // 4,
                "completion_tokens": len(text) // 4,
            },
        }


def _respond(user: str) -> str:
    match = _STAGE1.search(user)
    if match:
        return _families_response(country=match.group(2), count=int(match.group(1)))
    match = _STAGE2.search(user)
    if match:
        return _ranges_response(country=match.group(1))
    match = _STAGE3.search(user)
    if match:
        return _weather_response(country=match.group(1), season=match.group(3), prompt=user)
    match = _STAGE4_HEAD.search(user)
    if match:
        return _consumption_response(
            country=match.group(1),
            day_type=match.group(3),
            season=match.group(4),
            prompt=user,
        )
    raise ValueError("request does not match any known prompt shape")


# --- stage 1: family structures -----------------------------------------------


def _families_response(country: str, count: int) -> str:
    families = []
    for index in range(count):
        if index < len(_FAMILY_POOL):
            family_type, members = _FAMILY_POOL[index]
        else:
            family_type = f"Shared Household {index + 1}"
            members = ("Adult-1", "Adult-2")
        families.append(
            FamilyStructure(country=country, family_type=family_type, members=members)
        )
    body = serialize_family_structures(country, families)
    return "Here are the requested family types.\n" + wrap_envelope(body)


# --- stage 2: seasonal ranges ----------------------------------------------------


def _season_temperature_range(country: str, season: str) -> tuple[int, int]:
    winter_low, summer_high = _CLIMATE_ANCHORS.get(country, _DEFAULT_ANCHOR)
    if season == "Winter":
        return winter_low, winter_low + 12
    if season == "Summer":
        return summer_high - 12, summer_high
    if season == "Spring":
        return winter_low + 8, summer_high - 8
    return winter_low + 6, summer_high - 6


def _seasonal_ranges(country: str) -> SeasonalWeatherRanges:
    ranges: dict[str, dict[str, tuple[float, float]]] = {
        "Temperature": {},
        "Humidity": {},
        "SolRad-Diffuse": {},
        "SolRad-Direct": {},
        "Wind-Speed": {},
    }
    for season in ("Winter", "Spring", "Summer", "Autumn"):
        ranges["Temperature"][season] = _season_temperature_range(country, season)
        ranges["Humidity"][season] = _SEASON_HUMIDITY[season]
        ranges["SolRad-Diffuse"][season] = (0, 240)
        ranges["SolRad-Direct"][season] = (0, _SEASON_SOLAR_DIRECT_MAX[season])
        ranges["Wind-Speed"][season] = _SEASON_WIND[season]
    return SeasonalWeatherRanges(country=country, ranges=ranges)


def _ranges_response(country: str) -> str:
    body = serialize_weather_ranges(_seasonal_ranges(country))
    return "Typical seasonal ranges follow.\n" + wrap_envelope(body)


# --- stage 3: hourly weather ------------------------------------------------------


def _temperature_label(value: float) -> str:
    if value < 0:
        return "Freezing"
    if value < 10:
        return "Cold"
    if value < 18:
        return "Cool"
    if value < 26:
        return "Mild"
    if value < 34:
        return "Warm"
    return "Hot"


def _prompt_ranges(prompt: str, country: str) -> SeasonalWeatherRanges | None:
    """Honor the ranges quoted in the request when all five lines parse."""
    per_parameter: dict[str, tuple[float, float]] = {}
    for parameter, pattern in _RANGE_LINES.items():
        match = pattern.search(prompt)
        if not match:
            return None
        try:
            per_parameter[parameter] = (
                float(parse_number(match.group(1).strip())),
                float(parse_number(match.group(2).strip())),
            )
        except Exception:
            return None
    return SeasonalWeatherRanges(
        country=country,
        ranges={p: {"_": bounds} for p, bounds in per_parameter.items()},
    )


def _weather_day(country: str, season: str, prompt: str) -> HourlyWeatherDay:
    quoted = _prompt_ranges(prompt, country)
    if quoted is not None:
        temp_lo, temp_hi = quoted.ranges["Temperature"]["_"]
        hum_lo, hum_hi = quoted.ranges["Humidity"]["_"]
        direct_hi = quoted.ranges["SolRad-Direct"]["_"][1]
        diffuse_hi = quoted.ranges["SolRad-Diffuse"]["_"][1]
        wind_lo, wind_hi = quoted.ranges["Wind-Speed"]["_"]
    else:
        preset = _seasonal_ranges(country)
        temp_lo, temp_hi = preset.ranges["Temperature"][season]
        hum_lo, hum_hi = preset.ranges["Humidity"][season]
        direct_hi = preset.ranges["SolRad-Direct"][season][1]
        diffuse_hi = preset.ranges["SolRad-Diffuse"][season][1]
        wind_lo, wind_hi = preset.ranges["Wind-Speed"][season]

    # keep direct + diffuse clear of the physical cap even for quoted ranges
    direct_hi = min(direct_hi, 760)
    temps, hums, diffuse, direct, winds = [], [], [], [], []
    for hour in range(24):
        # afternoon temperature peak at hour 15, humidity in counter-phase
        shape = (1 + math.cos(2 * math.pi * (hour - 15) / 24)) / 2
        temp = round(temp_lo + (temp_hi - temp_lo) * shape, 1)
        humidity = round(hum_hi - (hum_hi - hum_lo) * shape)
        if 7 <= hour <= 19:
            sun = math.sin(math.pi * (hour - 7) / 12)  # midday peak at hour 13
        else:
            sun = 0.0
        direct_value = round(direct_hi * sun)
        diffuse_value = min(round(direct_value * 0.3), round(diffuse_hi))
        wind = round(wind_lo + (wind_hi - wind_lo) * (1 + math.sin(2 * math.pi * (hour - 9) / 24)) / 2, 1)
        temps.append(HourEntry(hour, f"{_temperature_label(temp)}-{season.lower()}-air", temp))
        hums.append(HourEntry(hour, "Humid" if humidity >= 70 else "Moderate-air", humidity))
        diffuse.append(HourEntry(hour, "Sky-glow" if diffuse_value else "Dark-sky", diffuse_value))
        direct.append(HourEntry(hour, "Sunlight" if direct_value else "No-sun", direct_value))
        winds.append(HourEntry(hour, "Breezy" if wind >= 5 else "Calm-air", wind))
    return HourlyWeatherDay(
        country=country,
        season=season,
        series={
            "Temperature": tuple(temps),
            "Humidity": tuple(hums),
            "SolRad-Diffuse": tuple(diffuse),
            "SolRad-Direct": tuple(direct),
            "Wind-Speed": tuple(winds),
        },
    )


def _weather_response(country: str, season: str, prompt: str) -> str:
    body = serialize_hourly_weather(_weather_day(country, season, prompt))
    return f"Hourly {season} weather for {country}.\n" + wrap_envelope(body)


# --- stage 4: daily consumption ----------------------------------------------------

# (label, kWh) by hour; away hours must carry zero consumption
_WORKER_WEEKDAY = {
    6: ("Waking-up", 0.1),
    7: ("Breakfast", 0.2),
    8: ("Commuting", 0.0),
    9: ("At-work", 0.0),
    10: ("At-work", 0.0),
    11: ("At-work", 0.0),
    12: ("Lunch-break", 0.0),
    13: ("At-work", 0.0),
    14: ("At-work", 0.0),
    15: ("At-work", 0.0),
    16: ("Commuting-home", 0.0),
    17: ("Cooking", 0.3),
    18: ("Dinner", 0.3),
    19: ("Relaxing", 0.2),
    20: ("Watching-TV", 0.2),
    21: ("Reading", 0.1),
    22: ("Preparing-for-bed", 0.1),
}
_WORKER_WEEKDAY_ALT = {
    **_WORKER_WEEKDAY,
    17: ("Grocery-sorting", 0.1),
    19: ("Washing-dishes", 0.2),
    21: ("Tidying-up", 0.1),
}
_CHILD_WEEKDAY = {
    6: ("Waking-up", 0.1),
    7: ("Breakfast", 0.2),
    8: ("Commuting-to-school", 0.0),
    9: ("At-school", 0.0),
    10: ("At-school", 0.0),
    11: ("At-school", 0.0),
    12: ("Lunch-break", 0.0),
    13: ("At-school", 0.0),
    14: ("At-school", 0.0),
    15: ("Commuting-home", 0.0),
    16: ("Snack", 0.1),
    17: ("Doing-homework", 0.2),
    18: ("Dinner", 0.3),
    19: ("Playing", 0.2),
    20: ("Family-time", 0.2),
    21: ("Reading", 0.1),
    22: ("Preparing-for-bed", 0.1),
}
_ELDER_WEEKDAY = {
    6: ("Waking-up", 0.1),
    7: ("Breakfast", 0.2),
    8: ("Reading", 0.1),
    9: ("Gardening", 0.1),
    10: ("Tea-time", 0.1),
    11: ("Cooking", 0.3),
    12: ("Lunch", 0.2),
    13: ("Napping", 0.02),
    14: ("Listening-to-radio", 0.1),
    15: ("Stretching", 0.05),
    16: ("Snack", 0.1),
    17: ("Cooking", 0.3),
    18: ("Dinner", 0.3),
    19: ("Television", 0.2),
    20: ("Television", 0.2),
    21: ("Reading", 0.1),
    22: ("Preparing-for-bed", 0.1),
}
_WEEKEND = {
    7: ("Waking-up", 0.1),
    8: ("Breakfast", 0.2),
    9: ("Cleaning", 0.2),
    10: ("Laundry", 0.3),
    11: ("Hobbies", 0.2),
    12: ("Lunch", 0.3),
    13: ("Resting", 0.1),
    14: ("Ironing", 0.1),
    15: ("Hobbies", 0.2),
    16: ("Snack", 0.1),
    17: ("Cooking", 0.3),
    18: ("Dinner", 0.4),
    19: ("Family-time", 0.2),
    20: ("Movie-night", 0.3),
    21: ("Movie-night", 0.3),
    22: ("Preparing-for-bed", 0.1),
}
_WEEKEND_ALT = {
    **_WEEKEND,
    9: ("Baking", 0.3),
    10: ("Gardening", 0.1),
    14: ("Board-games", 0.1),
    15: ("Reading", 0.1),
}

_CHILD_PREFIXES = ("son", "daughter", "child", "kid", "teen")
_ELDER_PREFIXES = ("grand", "baby", "infant", "toddler")


def _member_schedule(member: str, index: int, day_type: str) -> dict[int, tuple[str, float]]:
    lowered = member.lower()
    if day_type == "Weekend":
        return _WEEKEND if index % 2 == 0 else _WEEKEND_ALT
    if any(lowered.startswith(p) for p in _CHILD_PREFIXES):
        return _CHILD_WEEKDAY
    if any(lowered.startswith(p) for p in _ELDER_PREFIXES):
        return _ELDER_WEEKDAY
    return _WORKER_WEEKDAY if index % 2 == 0 else _WORKER_WEEKDAY_ALT


def _daily_profile(
    country: str,
    family_type: str,
    members: tuple[str, ...],
    season: str,
    day_type: str,
    temps: tuple[float, ...],
) -> DailyConsumptionProfile:
    series: dict[str, list[HourEntry]] = {}
    for index, member in enumerate(members):
        schedule = _member_schedule(member, index, day_type)
        entries = []
        for hour in range(24):
            label, value = schedule.get(hour, ("Sleeping", 0.02))
            entries.append(HourEntry(hour, label, value))
        series[member] = entries

    # a shared activity bills its energy to the first participant so the
    # summed draw never exceeds what one appliance would use
    for hour in range(24):
        seen: set[str] = set()
        for member in members:
            entry = series[member][hour]
            if entry.label in seen and entry.value > 0:
                series[member][hour] = HourEntry(hour, entry.label, 0.0)
            seen.add(entry.label)

    heating, cooling = [], []
    for hour in range(24):
        temp = temps[hour] if hour < len(temps) else 18.0
        if temp < 10:
            heating.append(HourEntry(hour, "Strong-heating", 0.5))
        elif temp < 15:
            heating.append(HourEntry(hour, "Mild-heating", 0.3))
        else:
            heating.append(HourEntry(hour, "No-heating-needed", 0.0))
        if temp > 32:
            cooling.append(HourEntry(hour, "Strong-cooling", 0.5))
        elif temp > 26:
            cooling.append(HourEntry(hour, "Mild-cooling", 0.3))
        else:
            cooling.append(HourEntry(hour, "No-cooling-needed", 0.0))

    frozen = {member: tuple(entries) for member, entries in series.items()}
    totals = tuple(
        sum(frozen[m][h].value for m in members) + heating[h].value + cooling[h].value
        for h in range(24)
    )
    return DailyConsumptionProfile(
        country=country,
        family_type=family_type,
        season=season,
        day_type=day_type,
        members=members,
        series=frozen,
        heating=tuple(heating),
        cooling=tuple(cooling),
        totals=totals,
    )


def _consumption_response(country: str, day_type: str, season: str, prompt: str) -> str:
    family_match = _STAGE4_FAMILY.search(prompt)
    if not family_match:
        raise ValueError("consumption request is missing the family description")
    family_type = family_match.group(1)
    members = tuple(m.strip() for m in family_match.group(2).split(",") if m.strip())
    temps_match = _STAGE4_TEMPS.search(prompt)
    temps: tuple[float, ...] = ()
    if temps_match:
        try:
            temps = tuple(
                float(parse_number(cell.strip()))
                for cell in temps_match.group(1).split(",")
            )
        except Exception:
            temps = ()
    profile = _daily_profile(country, family_type, members, season, day_type, temps)
    body = serialize_consumption(profile)
    return (
        f"Daily {day_type.lower()} usage for a {family_type} in {country}.\n"
        + wrap_envelope(body)
    )
