from __future__ import annotations

import datetime as dt

import pytest
from hypothesis import given, strategies as st

from clinistruct.values import (
    SENTINEL,
    canonical_unit,
    coerce_text,
    decode_value,
    encode_value,
    format_date,
    format_number,
    format_timestamp,
    match_key,
    parse_date,
    parse_timestamp,
    serialize,
    values_match,
)


@pytest.mark.parametrize("raw, expected", [("MG/DL", "mg/dL"), ("mg/dl", "mg/dL"), (None, None)])
def test_canonical_unit(raw, expected):
    assert canonical_unit(raw) == expected


def test_format_number_drops_trailing_zero():
    assert format_number(5.0) == "5"
    assert format_number(5.25) == "5.25"


def test_dates_in_both_styles_normalize_to_iso():
    assert parse_date("02.11.2022") == dt.date(2022, 11, 2)
    assert parse_date("2022-11-02") == dt.date(2022, 11, 2)
    assert match_key("02.11.2022") == "2022-11-02"
    assert values_match("2022-11-02", "02.11.2022")


def test_narrative_timestamp_form():
    assert parse_timestamp("2020-05-16 at 09:30") == dt.datetime(2020, 5, 16, 9, 30)


def test_timestamp_styles():
    ts = dt.datetime(2020, 1, 2, 3, 4)
    assert format_timestamp(ts, "hl7") == "202001020304"
    assert format_timestamp(ts, "dotted") == "02.01.2020 03:04"
    assert parse_timestamp(format_timestamp(ts, "dotted")) == ts


def test_serialize_and_coerce():
    assert serialize(True) == "Yes"
    assert serialize(5.0, "mg") == "5 mg"
    assert coerce_text("yes") is True
    assert serialize(None) == SENTINEL


def test_match_key_folds_case_and_whitespace():
    assert match_key("  Hello   World ") == "hello world"
    assert not values_match("Hello", "Help")


@given(st.dates(min_value=dt.date(1900, 1, 1), max_value=dt.date(2099, 12, 31)),
       st.sampled_from(["iso", "dotted"]))
def test_date_format_round_trip(day, style):
    assert parse_date(format_date(day, style)) == day


@given(st.one_of(
    st.booleans(),
    st.dates(min_value=dt.date(1900, 1, 1), max_value=dt.date(2099, 12, 31)),
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).map(lambda x: round(x, 3)),
    st.text(alphabet="abcdefghij -", min_size=1, max_size=12).filter(str.strip),
))
def test_encode_decode_round_trip(value):
    kind, payload = encode_value(value)
    assert decode_value(kind, payload) == value
