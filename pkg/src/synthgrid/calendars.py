"""Calendar logic: seasons, weekends, holidays, and year assembly.

Seasons follow the meteorological convention (Winter is December through
February in the northern hemisphere) and flip by six months south of the
equator. Holidays are treated as weekend days when picking which daily
profile applies, so a Tuesday holiday gets the weekend consumption shape.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .errors import AssemblyError, ConfigError, ParseError, ShapeError
from .parsing import (
    DailyConsumptionProfile,
    HourlyWeatherDay,
    format_number,
    parse_number,
    slugify_label,
)

SOUTHERN_HEMISPHERE_COUNTRIES = frozenset({"Brazil"})

_NORTHERN_SEASON_BY_MONTH = {
    12: "Winter", 1: "Winter", 2: "Winter",
    3: "Spring", 4: "Spring", 5: "Spring",
    6: "Summer", 7: "Summer", 8: "Summer",
    9: "Autumn", 10: "Autumn", 11: "Autumn",
}

DEFAULT_WEEKEND_DAYS = frozenset({5, 6})  # Saturday, Sunday per date.weekday()

# deliberately minimal fixed-date sets; pass a holiday file for real coverage
_BUILTIN_HOLIDAYS: Mapping[str, tuple[tuple[int, int], ...]] = {
    "USA": ((1, 1), (7, 4), (12, 25)),
    "Japan": ((1, 1), (2, 11), (5, 3)),
    "India": ((1, 26), (8, 15), (10, 2)),
    "Sweden": ((1, 1), (6, 6), (12, 25)),
    "United Arab Emirates": ((1, 1), (12, 2), (12, 3)),
    "Brazil": ((1, 1), (9, 7), (12, 25)),
}


def season_for_month(month: int, *, southern: bool = False) -> str:
    if not 1 <= month <= 12:
        raise ValueError(f"month out of range: {month}")
    if southern:
        month = (month + 5) % 12 + 1
    return _NORTHERN_SEASON_BY_MONTH[month]


@dataclass(frozen=True)
class CountryCalendar:
    country: str
    year: int
    weekend_days: frozenset[int]
    holidays: frozenset[dt.date]

    @property
    def southern(self) -> bool:
        return self.country in SOUTHERN_HEMISPHERE_COUNTRIES

    def season_for(self, date: dt.date) -> str:
        return season_for_month(date.month, southern=self.southern)

    def is_holiday(self, date: dt.date) -> bool:
        return date in self.holidays

    def day_type(self, date: dt.date) -> str:
        """Holidays count as weekend days for profile selection."""
        if date.weekday() in self.weekend_days or date in self.holidays:
            return "Weekend"
        return "Weekday"

    def dates(self) -> Iterable[dt.date]:
        # explicit end guard: incrementing past Dec 31 overflows in year 9999
        date = dt.date(self.year, 1, 1)
        end = dt.date(self.year, 12, 31)
        while True:
            yield date
            if date == end:
                return
            date += dt.timedelta(days=1)


def load_holiday_file(path: str | Path, year: int) -> frozenset[dt.date]:
    """Read `YYYY-MM-DD,label` lines, keeping only dates in the given year."""
    holidays = set()
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        date_part = line.split(",", 1)[0].strip()
        try:
            date = dt.date.fromisoformat(date_part)
        except ValueError:
            raise ConfigError(f"{path}:{number}: bad holiday date {date_part!r}") from None
        if date.year == year:
            holidays.add(date)
    return frozenset(holidays)


def build_calendar(
    country: str,
    year: int,
    *,
    weekend_days: Iterable[int] | None = None,
    holiday_file: str | Path | None = None,
) -> CountryCalendar:
    """Build the per-country calendar; a holiday file replaces the builtin set."""
    if weekend_days is None:
        weekend = DEFAULT_WEEKEND_DAYS
    else:
        weekend = frozenset(int(d) for d in weekend_days)
        if any(d < 0 or d > 6 for d in weekend):
            raise ConfigError(f"weekend days must be 0..6, got {sorted(weekend)}")
    if holiday_file is not None:
        holidays = load_holiday_file(holiday_file, year)
    else:
        holidays = frozenset(
            dt.date(year, month, day) for month, day in _BUILTIN_HOLIDAYS.get(country, ())
        )
    return CountryCalendar(
        country=country, year=year, weekend_days=weekend, holidays=holidays
    )


# --- year assembly -----------------------------------------------------------------


class YearRow(NamedTuple):
    timestamp: str  # naive ISO-8601, local time
    season: str
    day_type: str
    is_holiday: bool
    hour: int
    total_kwh: float
    heating_kwh: float
    cooling_kwh: float
    member_kwh: tuple[float, ...]
    temp_c: float


@dataclass(frozen=True)
class YearlyAssembly:
    country: str
    family_type: str
    year: int
    members: tuple[str, ...]
    rows: tuple[YearRow, ...]


def assemble_year(
    calendar: CountryCalendar,
    profiles: Mapping[tuple[str, str], DailyConsumptionProfile],
    weather: Mapping[str, HourlyWeatherDay],
) -> YearlyAssembly:
    """Expand daily profiles into an hourly year: 8760 rows, 8784 on leap years.

    `profiles` is keyed by (season, day_type) and must cover all four
    seasons for both day types; `weather` supplies the matching outdoor
    temperature trace per season.
    """
    seasons_needed = {calendar.season_for(date) for date in calendar.dates()}
    members: tuple[str, ...] | None = None
    family_type: str | None = None
    for season in sorted(seasons_needed):
        for day_type in ("Weekday", "Weekend"):
            profile = profiles.get((season, day_type))
            if profile is None:
                raise AssemblyError(f"missing daily profile for {season} {day_type}")
            if profile.country != calendar.country:
                raise AssemblyError(
                    f"profile country {profile.country!r} does not match "
                    f"calendar country {calendar.country!r}"
                )
            if profile.season != season or profile.day_type != day_type:
                raise AssemblyError(
                    f"profile labelled {profile.season}/{profile.day_type} "
                    f"filed under {season}/{day_type}"
                )
            if members is None:
                members = profile.members
                family_type = profile.family_type
            elif profile.members != members:
                raise AssemblyError(
                    f"member roster differs across profiles: {profile.members} vs {members}"
                )
            elif profile.family_type != family_type:
                raise AssemblyError(
                    f"family type differs across profiles: "
                    f"{profile.family_type!r} vs {family_type!r}"
                )
        if season not in weather:
            raise AssemblyError(f"missing weather day for {season}")
        if weather[season].country != calendar.country:
            raise AssemblyError(
                f"weather country {weather[season].country!r} does not match "
                f"calendar country {calendar.country!r}"
            )

    assert members is not None and family_type is not None
    rows = []
    for date in calendar.dates():
        season = calendar.season_for(date)
        day_type = calendar.day_type(date)
        profile = profiles[(season, day_type)]
        temps = weather[season].values("Temperature")
        for hour in range(24):
            stamp = dt.datetime.combine(date, dt.time(hour)).isoformat()
            rows.append(
                YearRow(
                    timestamp=stamp,
                    season=season,
                    day_type=day_type,
                    is_holiday=calendar.is_holiday(date),
                    hour=hour,
                    total_kwh=profile.totals[hour],
                    heating_kwh=profile.heating[hour].value,
                    cooling_kwh=profile.cooling[hour].value,
                    member_kwh=tuple(profile.series[m][hour].value for m in members),
                    temp_c=temps[hour],
                )
            )
    return YearlyAssembly(
        country=calendar.country,
        family_type=family_type,
        year=calendar.year,
        members=members,
        rows=tuple(rows),
    )


# --- CSV persistence ----------------------------------------------------------------

_FIXED_HEAD = (
    "timestamp_iso8601,country,family_type,season,day_type,is_holiday,"
    "hour_of_day,total_kwh,heating_kwh,cooling_kwh"
)


def yearly_csv_header(members: Iterable[str]) -> str:
    member_cols = ",".join(f"{slugify_label(m)}_kwh" for m in members)
    return f"{_FIXED_HEAD},{member_cols},outdoor_temp_c"


def write_yearly_csv(assembly: YearlyAssembly, path: str | Path) -> None:
    lines = [yearly_csv_header(assembly.members)]
    for row in assembly.rows:
        cells = [
            row.timestamp,
            assembly.country,
            assembly.family_type,
            row.season,
            row.day_type,
            "true" if row.is_holiday else "false",
            str(row.hour),
            format_number(row.total_kwh),
            format_number(row.heating_kwh),
            format_number(row.cooling_kwh),
        ]
        cells.extend(format_number(v) for v in row.member_kwh)
        cells.append(format_number(row.temp_c))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_yearly_csv(path: str | Path) -> YearlyAssembly:
    lines = Path(path).read_text(encoding="utf-8").strip().split("\n")
    if not lines or not lines[0].startswith(_FIXED_HEAD + ","):
        raise ParseError(f"unexpected yearly CSV header in {path}")
    columns = lines[0].split(",")
    if columns[-1] != "outdoor_temp_c":
        raise ParseError(f"yearly CSV must end with outdoor_temp_c, got {columns[-1]!r}")
    member_cols = columns[10:-1]
    members = tuple(c[: -len("_kwh")] for c in member_cols)
    if any(not c.endswith("_kwh") for c in member_cols) or not members:
        raise ParseError(f"malformed member columns in {path}")
    rows = lines[1:]
    if len(rows) not in (8760, 8784):
        raise ShapeError(
            f"yearly CSV {path} has {len(rows)} rows, expected 8760 or 8784",
            count=len(rows),
        )
    country = family_type = None
    year_rows = []
    for index, raw in enumerate(rows):
        cells = raw.split(",")
        if len(cells) != len(columns):
            raise ParseError(f"yearly CSV row {index + 2} has {len(cells)} cells")
        if cells[6] != str(index % 24):
            raise ParseError(f"yearly CSV rows out of hour order at line {index + 2}")
        country, family_type = cells[1], cells[2]
        year_rows.append(
            YearRow(
                timestamp=cells[0],
                season=cells[3],
                day_type=cells[4],
                is_holiday=cells[5] == "true",
                hour=index % 24,
                total_kwh=float(parse_number(cells[7])),
                heating_kwh=float(parse_number(cells[8])),
                cooling_kwh=float(parse_number(cells[9])),
                member_kwh=tuple(float(parse_number(c)) for c in cells[10:-1]),
                temp_c=float(parse_number(cells[-1])),
            )
        )
    year = int(year_rows[0].timestamp[:4])
    return YearlyAssembly(
        country=country,
        family_type=family_type,
        year=year,
        members=members,
        rows=tuple(year_rows),
    )
