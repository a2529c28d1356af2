"""Prompt assembly: placeholder binding, stage conversations, audit dumps.

Placeholders are $NAME$ or [$NAME$]; the bracketed form drops its brackets
when bound. Substitution is literal and single-pass, so binding values are
never re-scanned for placeholders. The envelope delimiters use doubled
dollar signs precisely so they can never match the placeholder pattern.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import templates
from .config import StageId
from .errors import HistoryError, MissingPlaceholder, ShapeError
from .gateway import ChatMessage
from .parsing import HourlyWeatherDay, SeasonalWeatherRanges, format_number

log = logging.getLogger(__name__)

PLACEHOLDER = re.compile(
    r"\[\$([A-Za-z][A-Za-z0-9_-]*)\$\]|(?<!\$)\$([A-Za-z][A-Za-z0-9_-]*)\$(?!\$)"
)


def extract_placeholders(body: str) -> frozenset[str]:
    return frozenset(m.group(1) or m.group(2) for m in PLACEHOLDER.finditer(body))


@dataclass(frozen=True)
class PromptTemplate:
    stage: StageId
    role: str  # "system" | "user"
    body: str
    placeholders: frozenset[str] = field(default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "placeholders", extract_placeholders(self.body))

    @property
    def checksum(self) -> str:
        return hashlib.sha256(self.body.encode("utf-8")).hexdigest()


def system_template(stage: StageId) -> PromptTemplate:
    return PromptTemplate(stage=stage, role="system", body=templates.SYSTEM_BODIES[stage.value])


def user_template(stage: StageId) -> PromptTemplate:
    return PromptTemplate(stage=stage, role="user", body=templates.USER_BODIES[stage.value])


def all_templates() -> list[PromptTemplate]:
    out = []
    for stage in StageId:
        out.append(system_template(stage))
        out.append(user_template(stage))
    return out


def render(template: PromptTemplate, bindings: Mapping[str, str]) -> ChatMessage:
    """Substitute every placeholder; unused binding names only warn."""
    unused = sorted(set(bindings) - set(template.placeholders))
    if unused:
        log.warning(
            "ignoring bindings with no matching placeholder in %s/%s template: %s",
            template.stage.value,
            template.role,
            unused,
        )

    def _sub(match: re.Match) -> str:
        name = match.group(1) or match.group(2)
        try:
            return str(bindings[name])
        except KeyError:
            raise MissingPlaceholder(name) from None

    return ChatMessage(role=template.role, content=PLACEHOLDER.sub(_sub, template.body))


@dataclass(frozen=True)
class StageRequest:
    """A renderable request: stage, bindings, optional chained history."""

    stage: StageId
    bindings: Mapping[str, str]
    history: tuple[ChatMessage, ...] = ()

    def __post_init__(self):
        if self.history and self.stage is not StageId.WEATHER_DATA:
            raise HistoryError(f"stage {self.stage.value} requests carry no history")

    def to_messages(self) -> list[ChatMessage]:
        messages = [render(system_template(self.stage), {})]
        messages.extend(self.history)
        messages.append(render(user_template(self.stage), self.bindings))
        return messages


# --- stage-specific binding builders -----------------------------------------

_COUNT_PATTERN = re.compile(r"Generate \d+ unique family types")


def stage1_request(country: str, count: int = 5) -> StageRequest:
    """Family-structure request; the canonical body asks for 5 family types,
    other counts swap the number in place."""
    if count < 1:
        raise ShapeError(f"family count must be >= 1, got {count}")
    request = StageRequest(stage=StageId.FAMILY_TYPES, bindings={"COUNTRY": country})
    return request if count == 5 else _with_count(request, count)


def _with_count(request: StageRequest, count: int) -> StageRequest:
    return _CountedStage1Request(stage=request.stage, bindings=request.bindings, count=count)


@dataclass(frozen=True)
class _CountedStage1Request(StageRequest):
    count: int = 5

    def to_messages(self) -> list[ChatMessage]:
        messages = super().to_messages()
        user = messages[-1]
        body = _COUNT_PATTERN.sub(f"Generate {self.count} unique family types", user.content, 1)
        messages[-1] = ChatMessage(role=user.role, content=body)
        return messages


def stage2_request(country: str, year: int) -> StageRequest:
    return StageRequest(
        stage=StageId.WEATHER_RANGES, bindings={"Country": country, "Year": str(year)}
    )


def stage3_bindings(country: str, year: int, season: str, ranges: SeasonalWeatherRanges) -> dict[str, str]:
    bindings = {"Country": country, "Year": str(year), "Season": season}
    for parameter, per_season in ranges.ranges.items():
        lo, hi = per_season[season]
        bindings[f"{parameter}_Min"] = format_number(lo)
        bindings[f"{parameter}_Max"] = format_number(hi)
    return bindings


def build_stage3_conversation(
    country: str,
    season_index: int,
    prior: Sequence[tuple[ChatMessage, ChatMessage]],
    bindings: Mapping[str, str],
) -> list[ChatMessage]:
    """Assemble the chained per-country weather conversation.

    Returns [system, user_1, assistant_1, ..., user_k]: all prior season
    exchanges for this country, then the current season's user message.
    """
    if not 0 <= season_index <= 3:
        raise HistoryError(f"season_index must be 0..3, got {season_index}")
    if len(prior) != season_index:
        raise HistoryError(
            f"season_index {season_index} needs {season_index} prior exchanges, got {len(prior)}"
        )
    if bindings.get("Country") != country:
        raise HistoryError(
            f"bindings are for {bindings.get('Country')!r}, conversation is for {country!r}"
        )
    marker = f"country of {country} "
    messages: list[ChatMessage] = [render(system_template(StageId.WEATHER_DATA), {})]
    for i, (user, assistant) in enumerate(prior):
        if user.role != "user" or assistant.role != "assistant":
            raise HistoryError(f"prior exchange {i} roles must be (user, assistant)")
        if marker not in user.content:
            raise HistoryError(f"prior exchange {i} belongs to a different country's run")
        messages.append(user)
        messages.append(assistant)
    messages.append(render(user_template(StageId.WEATHER_DATA), bindings))
    return messages


def bind_stage4_weather(day: HourlyWeatherDay) -> dict[str, str]:
    """Turn a weather day into the comma-list bindings of the usage prompt."""
    lists: dict[str, str] = {}
    for name, parameter in (
        ("Temperature", "Temperature"),
        ("Humidity", "Humidity"),
        ("SolarRadiationDirect", "SolRad-Direct"),
        ("SolarRadiationDiffuse", "SolRad-Diffuse"),
        ("WindSpeed", "Wind-Speed"),
    ):
        entries = day.series.get(parameter, ())
        if len(entries) != 24 or [e.hour for e in entries] != list(range(24)):
            raise ShapeError(
                f"weather parameter {parameter} must cover hours 0..23",
                parameter=parameter,
                count=len(entries),
            )
        lists[name] = ",".join(format_number(e.value) for e in entries)
    lists["Hour"] = ",".join(str(h) for h in range(24))
    return lists


def stage4_request(
    country: str,
    year: int,
    family_type: str,
    members: Sequence[str],
    season: str,
    day_type: str,
    day: HourlyWeatherDay,
) -> StageRequest:
    bindings = {
        "Country": country,
        "Year": str(year),
        "Pattern": day_type,
        "Season": season,
        "FamilyType": family_type,
        "Members": ", ".join(members),
        "MembersNum": str(len(members)),
    }
    bindings.update(bind_stage4_weather(day))
    return StageRequest(stage=StageId.ENERGY_PATTERNS, bindings=bindings)


def dump_prompts(directory: str | Path) -> list[Path]:
    """Write the eight template bodies out for audit."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for template in all_templates():
        path = directory / f"{template.stage.value}_{template.role}.txt"
        path.write_text(template.body, encoding="utf-8")
        written.append(path)
    return written
