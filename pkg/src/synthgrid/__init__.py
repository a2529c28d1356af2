"""synthgrid: distill household-energy knowledge from chat LLMs into
validated synthetic load datasets.

The pipeline runs four synthesis stages per country (family structures,
seasonal weather ranges, hourly weather days, hourly consumption
profiles), validates everything against physics and behavior rules, and
assembles holiday-aware yearly load profiles with energy-signature
analytics on top.
"""

from .analytics import (
    EnergySignature,
    SignatureComparison,
    StageSummary,
    compare_signatures,
    compute_signature,
    emit_plot_data,
    signature_from_points,
    summarize_run,
)
from .calendars import (
    CountryCalendar,
    YearlyAssembly,
    assemble_year,
    build_calendar,
    read_yearly_csv,
    season_for_month,
    write_yearly_csv,
)
from .config import RunConfig, StageId, load_config
from .errors import ParseFailure, SynthGridError
from .gateway import ChatExchange, ChatGateway, ChatMessage
from .households import (
    BehaviorViolation,
    classify_action,
    read_daily_csv,
    validate_behavior,
    write_daily_csv,
)
from .parsing import (
    DailyConsumptionProfile,
    FamilyStructure,
    HourlyWeatherDay,
    SeasonalWeatherRanges,
    extract_envelope,
    parse_consumption,
    parse_family_structures,
    parse_hourly_weather,
    parse_weather_ranges,
)
from .pipeline import PlanItem, RunReport, assemble_years, plan_items, run_pipeline, validate_run
from .weather import (
    WeatherViolation,
    aggregate_tmy_to_season,
    fetch_tmy,
    read_weather_csv,
    validate_hourly,
    validate_ranges,
    write_weather_csv,
)

__all__ = [
    "BehaviorViolation",
    "ChatExchange",
    "ChatGateway",
    "ChatMessage",
    "CountryCalendar",
    "DailyConsumptionProfile",
    "EnergySignature",
    "FamilyStructure",
    "HourlyWeatherDay",
    "ParseFailure",
    "PlanItem",
    "RunConfig",
    "RunReport",
    "SeasonalWeatherRanges",
    "SignatureComparison",
    "StageId",
    "StageSummary",
    "SynthGridError",
    "WeatherViolation",
    "YearlyAssembly",
    "aggregate_tmy_to_season",
    "assemble_year",
    "assemble_years",
    "build_calendar",
    "classify_action",
    "compare_signatures",
    "compute_signature",
    "emit_plot_data",
    "extract_envelope",
    "fetch_tmy",
    "load_config",
    "parse_consumption",
    "parse_family_structures",
    "parse_hourly_weather",
    "parse_weather_ranges",
    "plan_items",
    "read_daily_csv",
    "read_weather_csv",
    "read_yearly_csv",
    "run_pipeline",
    "season_for_month",
    "signature_from_points",
    "summarize_run",
    "validate_behavior",
    "validate_hourly",
    "validate_ranges",
    "validate_run",
    "write_daily_csv",
    "write_weather_csv",
    "write_yearly_csv",
]

__version__ = "0.1.0"
