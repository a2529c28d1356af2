"""Tour of the four response grammars, entirely offline.

The bundled stub transport speaks the same delimiter grammar a real chat
endpoint is prompted into, so every parser can be exercised without a key.
Run: python3 demos/grammar_tour.py
"""

from synthgrid.config import RunConfig
from synthgrid.errors import SynthGridError
from synthgrid.gateway import ChatGateway
from synthgrid.households import synthesize_consumption, synthesize_families
from synthgrid.parsing import extract_envelope, format_number, parse_number
from synthgrid.stub import StubModelTransport
from synthgrid.weather import synthesize_ranges, synthesize_weather


def banner(title):
    print()
    print("=" * 72)
    print(title)
    print("=" * 72)


config = RunConfig(countries=("Sweden",), families_per_country=3)
gateway = ChatGateway(
    config.endpoint_url,
    config.model_id,
    api_key="offline-demo",
    max_retries=config.max_retries,
    transport=StubModelTransport(),
)

banner("Stage 1: family structures (JSON body inside the envelope)")
raw_holder = {}
families = synthesize_families(
    config, "Sweden", gateway,
    on_response=lambda country, raw, parsed: raw_holder.setdefault("text", raw),
)
print("raw response starts with:", raw_holder["text"][:60], "...")
for family in families:
    print(f"  {family.family_type}: {', '.join(family.members)}")

banner("Stage 2: seasonal weather ranges (#Parameter#[(Season,min,max),...])")
ranges = synthesize_ranges(config, "Sweden", gateway)
for season in ("Winter", "Summer"):
    lo, hi = ranges.bounds("Temperature", season)
    print(f"  Temperature {season}: {lo} .. {hi} degC")

banner("Stage 3: hourly weather, one validated day per season")
weather = synthesize_weather(config, "Sweden", gateway=gateway, ranges=ranges)
winter = weather["Winter"]
temps = winter.values("Temperature")
print(f"  Winter temperatures: min {min(temps)}, max {max(temps)}")
print(f"  hour 0 entry: {winter.series['Temperature'][0]}")

banner("Stage 4: one daily consumption profile, behavior-checked")
profile = synthesize_consumption(
    config, families[0], "Winter", "Weekday", winter, gateway
)
print(f"  members: {profile.members}")
for hour in (0, 8, 18):
    entry = profile.series[profile.members[0]][hour]
    print(
        f"  hour {hour:2d}: {profile.members[0]} {entry.label} "
        f"{entry.value} kWh, total {round(profile.totals[hour], 6)} kWh"
    )

banner("Number notation survives the round trip")
for text in ("0", "0.30", "-5.0", "7"):
    value = parse_number(text)
    print(f"  {text!r} -> {value!r} -> {format_number(value)!r}")

banner("Garbage in, typed errors out")
for bad in ("no delimiters here", "$$MESSAGE_START$$$$MESSAGE_END$$"):
    try:
        extract_envelope(bad)
    except SynthGridError as exc:
        print(f"  {bad[:40]!r}: {type(exc).__name__}: {exc}")
