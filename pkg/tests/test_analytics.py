"""Energy signatures, stage accounting, plot emission, reference ingestion."""

from __future__ import annotations

import json
import math
import random

import pytest

from synthgrid.analytics import (
    EnergySignature,
    StageSummary,
    compare_signatures,
    compute_signature,
    emit_plot_data,
    format_duration,
    read_reference_csv,
    signature_from_points,
    summarize_run,
    write_signature_json,
)
from synthgrid.calendars import YearRow, YearlyAssembly
from synthgrid.config import StageId
from synthgrid.errors import ComparisonError, ParseError, ShapeError
from synthgrid.gateway import ChatExchange, ChatMessage
from synthgrid.parsing import FamilyStructure, extract_envelope, parse_consumption

from samples import reference_profile_text

REFERENCE_PROFILE = parse_consumption(
    extract_envelope(reference_profile_text()),
    FamilyStructure(
        country="Sweden", family_type="Single-Parent Family", members=("Mother", "Son")
    ),
    "Winter",
    "Weekday",
)


def exchange(prompt_tokens=10, completion_tokens=20, latency=1.0):
    return ChatExchange(
        request_messages=(ChatMessage("user", "hello"),),
        response_text="hi",
        prompt_tokens=prompt_tokens,
        completion_tokens=completion_tokens,
        latency=latency,
        model_id="test-model",
        timestamp="2024-01-01T00:00:00+00:00",
    )


# --- cold-side slope ---------------------------------------------------------------


def test_slope_recovers_exact_line():
    # points below the balance point sit on y = -0.1 t + 5; warm-side
    # points are wild on purpose and must not move the fit
    points = [(t, -0.1 * t + 5) for t in range(-10, 18)]
    points += [(20.0, 99.0), (25.0, 42.0)]
    signature = signature_from_points(points)
    assert signature.cold_slope == pytest.approx(-0.1, rel=1e-9)


def test_slope_between_two_points():
    signature = signature_from_points([(0.0, 4.0), (10.0, 2.0)])
    assert signature.cold_slope == pytest.approx(-0.2, rel=1e-9)


def test_slope_least_squares_by_hand():
    # t_mean 5, y_mean 6: slope = (30+20+20+30) / (4 * 25) = 1.0
    signature = signature_from_points([(0, 0), (0, 2), (10, 10), (10, 12)])
    assert signature.cold_slope == pytest.approx(1.0, rel=1e-9)


def test_slope_needs_two_distinct_cold_temperatures():
    assert signature_from_points([(5.0, 1.0), (5.0, 3.0)]).cold_slope is None
    assert signature_from_points([(20.0, 1.0), (30.0, 2.0)]).cold_slope is None


def test_balance_point_is_exclusive():
    # 18.0 itself is not "below the balance point"
    signature = signature_from_points([(17.0, 1.0), (18.0, 2.0), (18.0, 3.0)])
    assert signature.cold_slope is None
    lowered = signature_from_points([(17.0, 1.0), (18.0, 2.0)], balance_point=18.5)
    assert lowered.cold_slope == pytest.approx(1.0, rel=1e-9)


# --- binning ---------------------------------------------------------------


def test_bins_are_floor_aligned_half_open():
    signature = signature_from_points([(0.2, 1.0), (0.8, 3.0), (1.0, 5.0), (-0.5, 7.0)])
    assert [(b.center, b.mean_kwh, b.count) for b in signature.binned] == [
        (-0.5, 7.0, 1),
        (0.5, 2.0, 2),
        (1.5, 5.0, 1),
    ]


def test_bin_width_scales_centers():
    signature = signature_from_points([(3.0, 1.0)], bin_width=2.5)
    assert signature.binned == ((3.75, 1.0, 1),)


def test_bin_width_must_be_positive():
    with pytest.raises(ShapeError):
        signature_from_points([(1.0, 1.0)], bin_width=0)


def test_binning_conserves_total_consumption():
    rng = random.Random(20240822)
    points = [(rng.uniform(-25, 45), rng.uniform(0, 4)) for _ in range(2000)]
    signature = signature_from_points(points)
    recovered = sum(b.mean_kwh * b.count for b in signature.binned)
    assert recovered == pytest.approx(sum(y for _, y in points), rel=1e-9)
    assert sum(b.count for b in signature.binned) == len(points)
    centers = [b.center for b in signature.binned]
    assert centers == sorted(centers)


# --- signatures from years ---------------------------------------------------------


def tiny_year(pairs):
    rows = tuple(
        YearRow(
            timestamp=f"2022-01-01T{i:02d}:00:00",
            season="Winter",
            day_type="Weekday",
            is_holiday=False,
            hour=i,
            total_kwh=kwh,
            heating_kwh=0.0,
            cooling_kwh=0.0,
            member_kwh=(kwh,),
            temp_c=temp,
        )
        for i, (temp, kwh) in enumerate(pairs)
    )
    return YearlyAssembly(
        country="USA", family_type="Couple", year=2022, members=("Resident",), rows=rows
    )


def test_compute_signature_reads_rows_and_names_family():
    yearly = tiny_year([(0.0, 4.0), (10.0, 2.0), (30.0, 1.0)])
    signature = compute_signature(yearly)
    assert signature.family == "USA/Couple"
    assert signature.cold_slope == pytest.approx(-0.2, rel=1e-9)
    assert signature.balance_point == 18.0


def test_compute_signature_rejects_empty_years():
    with pytest.raises(ShapeError):
        compute_signature(tiny_year([]))


# --- comparison ---------------------------------------------------------------


def test_comparison_with_self_is_all_zeros():
    signature = signature_from_points([(t, -0.1 * t + 5) for t in range(-10, 25)])
    comparison = compare_signatures(signature, signature)
    assert comparison.only_a == () and comparison.only_b == ()
    assert comparison.slope_difference == 0.0
    assert all(diff == 0.0 for _, _, _, diff in comparison.common)
    assert len(comparison.common) == len(signature.binned)


def test_comparison_splits_shared_and_private_bins():
    a = signature_from_points([(0.5, 1.0), (1.5, 2.0)])
    b = signature_from_points([(1.5, 5.0), (2.5, 6.0)])
    comparison = compare_signatures(a, b)
    assert comparison.common == ((1.5, 2.0, 5.0, -3.0),)
    assert comparison.only_a == (0.5,)
    assert comparison.only_b == (2.5,)


def test_comparison_requires_matching_bin_widths():
    a = signature_from_points([(1.0, 1.0)], bin_width=1.0)
    b = signature_from_points([(1.0, 1.0)], bin_width=0.5)
    with pytest.raises(ComparisonError):
        compare_signatures(a, b)


def test_comparison_propagates_undefined_slopes():
    defined = signature_from_points([(0.0, 4.0), (10.0, 2.0)])
    undefined = signature_from_points([(5.0, 1.0)])
    comparison = compare_signatures(defined, undefined)
    assert comparison.slope_a == pytest.approx(-0.2)
    assert comparison.slope_b is None
    assert comparison.slope_difference is None


# --- durations and stage accounting ---------------------------------------------


@pytest.mark.parametrize(
    "seconds, expected",
    [
        (0, "0:00:00"),
        (32, "0:00:32"),
        (193, "0:03:13"),
        (3600, "1:00:00"),
        (3661.9, "1:01:01"),
        (86399, "23:59:59"),
        (90000, "25:00:00"),
    ],
)
def test_format_duration(seconds, expected):
    assert format_duration(seconds) == expected


def test_format_duration_rejects_negatives():
    with pytest.raises(ValueError):
        format_duration(-1)


def test_summary_reproduces_family_stage_accounting():
    # six responses, 2798 prompt and 1821 completion tokens, 193 seconds:
    # averages 0:00:32, totals 0:03:13
    prompts = (466, 466, 466, 466, 467, 467)
    completions = (303, 303, 303, 304, 304, 304)
    latencies = (30, 31, 32, 33, 33, 34)
    log = [
        exchange(prompt_tokens=p, completion_tokens=c, latency=l)
        for p, c, l in zip(prompts, completions, latencies)
    ]
    summaries = summarize_run(log, lambda e: StageId.FAMILY_TYPES)
    assert len(summaries) == 1
    summary = summaries[0]
    assert summary.stage is StageId.FAMILY_TYPES
    assert summary.n_responses == 6
    assert summary.total_prompt_tokens == 2798
    assert summary.total_completion_tokens == 1821
    assert summary.avg_time == "0:00:32"
    assert summary.total_duration == "0:03:13"


def test_summaries_group_by_stage_in_pipeline_order():
    log = [exchange(latency=2.0) for _ in range(5)]
    order = [
        StageId.ENERGY_PATTERNS,
        StageId.FAMILY_TYPES,
        StageId.WEATHER_DATA,
        StageId.FAMILY_TYPES,
        StageId.WEATHER_RANGES,
    ]
    stages = iter(order)
    assignments = {id(e): next(stages) for e in log}
    summaries = summarize_run(log, lambda e: assignments[id(e)])
    assert [s.stage for s in summaries] == [
        StageId.FAMILY_TYPES,
        StageId.WEATHER_RANGES,
        StageId.WEATHER_DATA,
        StageId.ENERGY_PATTERNS,
    ]
    assert [s.n_responses for s in summaries] == [2, 1, 1, 1]
    assert summaries[0].total_seconds == 4.0
    assert summaries[0].avg_seconds == 2.0


# --- plot emission ---------------------------------------------------------------


def test_daily_profile_emits_member_hvac_and_total_series(tmp_path):
    path = emit_plot_data(REFERENCE_PROFILE, tmp_path / "day.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "series,x,y"
    series = {}
    for line in lines[1:]:
        name, x, y = line.split(",")
        series.setdefault(name, []).append((x, y))
    assert set(series) == {
        "Mother/Weekday", "Son/Weekday", "Heating/Weekday", "Cooling/Weekday",
        "Total/Weekday",
    }
    assert all(len(points) == 24 for points in series.values())
    assert series["Heating/Weekday"][0] == ("0", "0.3")


def test_signature_emits_binned_and_raw_series(tmp_path):
    signature = signature_from_points([(0.2, 1.0), (0.8, 3.0), (5.0, 2.0)])
    path = emit_plot_data(signature, tmp_path / "sig.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    binned = [l for l in lines[1:] if l.startswith("binned,")]
    points = [l for l in lines[1:] if l.startswith("points,")]
    assert len(binned) == len(signature.binned) == 2
    assert len(points) == 3
    assert binned[0] == "binned,0.5,2.0"


def test_plot_emission_rejects_other_types(tmp_path):
    with pytest.raises(TypeError):
        emit_plot_data(object(), tmp_path / "nope.csv")


# --- signature JSON and reference ingestion -----------------------------------------


def test_signature_json_round_trips_fields(tmp_path):
    signature = signature_from_points([(0.0, 4.0), (10.0, 2.0)], balance_point=15.0)
    path = write_signature_json(signature, tmp_path / "sig.json")
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert doc["balance_point"] == 15.0
    assert doc["cold_slope"] == pytest.approx(-0.2)
    assert doc["bins"] == [
        {"center": 0.5, "mean": 4.0, "count": 1},
        {"center": 10.5, "mean": 2.0, "count": 1},
    ]


def test_signature_json_encodes_undefined_slope_as_null(tmp_path):
    signature = signature_from_points([(5.0, 1.0)])
    path = write_signature_json(signature, tmp_path / "sig.json")
    assert json.loads(path.read_text(encoding="utf-8"))["cold_slope"] is None


def test_reference_csv_parses_points(tmp_path):
    path = tmp_path / "reference.csv"
    path.write_text(
        "timestamp,temp_c,total_kwh\n"
        "2022-01-01T00:00:00,-3.5,1.2\n"
        "2022-01-01T01:00:00,4,1\n",
        encoding="utf-8",
    )
    assert read_reference_csv(path) == [(-3.5, 1.2), (4.0, 1.0)]


def test_reference_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "reference.csv"
    path.write_text("time,heat\n", encoding="utf-8")
    with pytest.raises(ParseError):
        read_reference_csv(path)


def test_reference_csv_rejects_ragged_rows(tmp_path):
    path = tmp_path / "reference.csv"
    path.write_text("timestamp,temp_c,total_kwh\n2022-01-01T00:00:00,1.0\n", encoding="utf-8")
    with pytest.raises(ParseError, match=":2"):
        read_reference_csv(path)
