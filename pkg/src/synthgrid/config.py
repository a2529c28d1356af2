"""Run configuration: stage identifiers, the RunConfig record, file loading.

Config files are plain JSON. Flag overrides (from the CLI) win over file
values, which win over defaults.
"""

from __future__ import annotations

import enum
import json
import numbers
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError


class StageId(enum.Enum):
    """The four pipeline stages, ordered; comparisons follow pipeline order."""

    FAMILY_TYPES = "FamilyTypes"
    WEATHER_RANGES = "WeatherRanges"
    WEATHER_DATA = "WeatherData"
    ENERGY_PATTERNS = "EnergyPatterns"

    @property
    def index(self) -> int:
        return _STAGE_ORDER.index(self)

    def __lt__(self, other: "StageId") -> bool:
        if not isinstance(other, StageId):
            return NotImplemented
        return self.index < other.index

    def __le__(self, other: "StageId") -> bool:
        if not isinstance(other, StageId):
            return NotImplemented
        return self.index <= other.index

    def __gt__(self, other: "StageId") -> bool:
        if not isinstance(other, StageId):
            return NotImplemented
        return self.index > other.index

    def __ge__(self, other: "StageId") -> bool:
        if not isinstance(other, StageId):
            return NotImplemented
        return self.index >= other.index

    @classmethod
    def parse(cls, text: str) -> "StageId":
        for stage in cls:
            if stage.value.lower() == text.strip().lower():
                return stage
        raise ConfigError(
            f"unknown stage {text!r}; expected one of {[s.value for s in cls]}"
        )


_STAGE_ORDER = tuple(StageId)

SEASONS = ("Winter", "Spring", "Summer", "Autumn")

DEFAULT_COUNTRIES = ("USA", "Japan", "India", "Sweden", "United Arab Emirates", "Brazil")

# accepted spellings for configured country names
COUNTRY_ALIASES = {
    "usa": "USA",
    "united states": "USA",
    "united states of america": "USA",
    "japan": "Japan",
    "india": "India",
    "sweden": "Sweden",
    "uae": "United Arab Emirates",
    "united arab emirates": "United Arab Emirates",
    "brazil": "Brazil",
}

DEFAULT_MODEL_ID = "meta-llama/Meta-Llama-3.1-405B-Instruct"
DEFAULT_ENDPOINT_URL = "https://api.deepinfra.com/v1/openai"
DEFAULT_API_KEY_VAR = "SYNTHGRID_API_KEY"
DEFAULT_PVGIS_BASE_URL = "https://re.jrc.ec.europa.eu"


def canonical_country(name: str) -> str:
    key = " ".join(str(name).split()).lower()
    try:
        return COUNTRY_ALIASES[key]
    except KeyError:
        raise ConfigError(
            f"unsupported country {name!r}; supported: {list(DEFAULT_COUNTRIES)}"
        ) from None


@dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline run needs, with defaults for a full run."""

    countries: tuple[str, ...] = DEFAULT_COUNTRIES
    year: int = 2023
    families_per_country: int = 5
    seasons: tuple[str, ...] = SEASONS
    weather_source: str = "llm"  # "llm" | "external"
    model_id: str = DEFAULT_MODEL_ID
    endpoint_url: str = DEFAULT_ENDPOINT_URL
    api_key_var: str = DEFAULT_API_KEY_VAR
    temperature: float = 0.7
    max_tokens: int = 8192
    max_retries: int = 3
    parallelism: int = 1
    output_dir: str = "synthgrid-run"
    fixture_dir: str | None = None
    record_dir: str | None = None
    holiday_file: str | None = None
    weekend_days: tuple[int, ...] | None = None  # 0=Mon .. 6=Sun; None -> {Sat, Sun}
    balance_point_c: float = 18.0
    tmy_cache_dir: str | None = None
    pvgis_base_url: str = DEFAULT_PVGIS_BASE_URL
    capitals: Mapping[str, tuple[str, float, float]] | None = None

    def validate(self) -> "RunConfig":
        if not self.countries:
            raise ConfigError("countries must be non-empty")
        if len(set(self.countries)) != len(self.countries):
            raise ConfigError("countries contains duplicates")
        if not isinstance(self.year, int) or isinstance(self.year, bool) or not 1 <= self.year <= 9999:
            raise ConfigError(f"year must be an integer in 1..9999, got {self.year!r}")
        if self.families_per_country < 1:
            raise ConfigError("families_per_country must be >= 1")
        if sorted(self.seasons) != sorted(SEASONS):
            raise ConfigError(f"seasons must be a permutation of {list(SEASONS)}")
        if self.weather_source not in ("llm", "external"):
            raise ConfigError("weather_source must be 'llm' or 'external'")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.weekend_days is not None:
            days = set(self.weekend_days)
            if not days <= set(range(7)) or not 1 <= len(days) <= 3:
                raise ConfigError("weekend_days must be 1..3 distinct values in 0..6")
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ConfigError("max_tokens must be >= 1")
        return self

    def api_key(self) -> str:
        key = os.environ.get(self.api_key_var, "")
        if not key:
            raise ConfigError(
                f"environment variable {self.api_key_var} is not set "
                "(required for live requests; replay runs do not need it)"
            )
        return key

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    @property
    def tmy_cache_path(self) -> Path:
        if self.tmy_cache_dir:
            return Path(self.tmy_cache_dir)
        return self.output_path / "tmy_cache"


_TUPLE_FIELDS = {"countries", "seasons", "weekend_days"}
_INT_FIELDS = {"year", "families_per_country", "max_tokens", "max_retries", "parallelism"}
_FLOAT_FIELDS = {"temperature", "balance_point_c"}


def _coerce(name: str, value: Any) -> Any:
    if value is None:
        return None
    if name in _TUPLE_FIELDS:
        if isinstance(value, str):
            value = [part.strip() for part in value.split(",") if part.strip()]
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{name} must be a list")
        if name == "countries":
            return tuple(canonical_country(v) for v in value)
        if name == "weekend_days":
            try:
                return tuple(int(v) for v in value)
            except (TypeError, ValueError):
                raise ConfigError(f"{name} entries must be integers") from None
        return tuple(str(v) for v in value)
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise ConfigError(f"{name} must be an integer")
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{name} must be an integer, got {value!r}") from None
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (numbers.Real, str)):
            raise ConfigError(f"{name} must be a number")
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if name == "capitals":
        if not isinstance(value, Mapping):
            raise ConfigError("capitals must be a mapping of country -> [city, lat, lon]")
        out = {}
        for country, entry in value.items():
            if not isinstance(entry, (list, tuple)) or len(entry) != 3:
                raise ConfigError(f"capitals[{country!r}] must be [city, lat, lon]")
            out[canonical_country(country)] = (str(entry[0]), float(entry[1]), float(entry[2]))
        return out
    return value


_FIELD_NAMES = None


def _field_names() -> set[str]:
    global _FIELD_NAMES
    if _FIELD_NAMES is None:
        _FIELD_NAMES = {f.name for f in fields(RunConfig)}
    return _FIELD_NAMES


def load_config(path: str | Path | None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Build a validated RunConfig from a JSON file plus flag overrides."""
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if text.strip():
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(
                    f"malformed config file {path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
                ) from exc
            if not isinstance(raw, dict):
                raise ConfigError(f"config file {path} must hold a JSON object")
    merged = dict(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    unknown = sorted(set(merged) - _field_names())
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    coerced = {name: _coerce(name, value) for name, value in merged.items()}
    config = replace(RunConfig(), **coerced)
    return config.validate()
