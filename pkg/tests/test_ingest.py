import datetime as dt
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from candlesig import synthetic
from candlesig.errors import IngestError
from candlesig.ingest import (
    Candle,
    CandleSeries,
    Period,
    RawSeries,
    candles_to_csv,
    ohlc_to_csv,
    parse_ohlc_csv,
    parse_raw_csv,
    raw_to_csv,
    resample,
)

from oracles import naive_monthly_candles


def test_minimal_raw_csv():
    s = parse_raw_csv(b"date,value\n2020-01-03,100\n2020-01-10,101", "x")
    assert len(s) == 2
    assert s.points == ((dt.date(2020, 1, 3), 100.0), (dt.date(2020, 1, 10), 101.0))
    assert s.label == "x"


def test_duplicate_date_rejected():
    with pytest.raises(IngestError, match="duplicate date") as info:
        parse_raw_csv(b"date,value\n2020-01-03,100\n2020-01-03,101", "x")
    assert info.value.line == 3


def test_unsorted_rows_are_sorted():
    s = parse_raw_csv("date,value\r\n2020-01-10,101\r\n2020-01-03,100\r\n")
    assert s.dates == [dt.date(2020, 1, 3), dt.date(2020, 1, 10)]


@pytest.mark.parametrize(
    "body, line, fragment",
    [
        ("2020-01-03,100\n2020-01-10,abc\n", 3, "malformed value"),
        ("2020-01-03,100\n2020-01-10,1,000\n", 3, "expected 2 fields"),
        ("2020-01-03,100\n2020-01-10,$5\n", 3, "malformed value"),
        ("2020-01-03,100\n2020-01-10,0\n", 3, "positive"),
        ("2020-01-03,100\n2020-01-10,-3.5\n", 3, "positive"),
        ("2020-01-03,100\n2020/01/10,3\n", 3, "malformed date"),
        ("2020-01-03,100\n2020-1-10,3\n", 3, "malformed date"),
        ("2020-01-03,nan\n", 2, "malformed value"),
    ],
)
def test_bad_rows_name_the_line(body, line, fragment):
    with pytest.raises(IngestError, match=fragment) as info:
        parse_raw_csv("date,value\n" + body)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_too_few_rows():
    with pytest.raises(IngestError, match="at least 2"):
        parse_raw_csv("date,value\n2020-01-03,100\n")


def test_wrong_header():
    with pytest.raises(IngestError, match="header"):
        parse_raw_csv("day,price\n2020-01-03,100\n2020-01-04,100\n")


def test_five_hundred_weekly_rows_round_trip():
    rng = random.Random(3)
    start = dt.date(2012, 1, 7)
    rows = [(start + dt.timedelta(weeks=i), round(rng.uniform(1e5, 5e5), 2)) for i in range(500)]
    shuffled = rows[:]
    rng.shuffle(shuffled)
    text = "date,value\n" + "".join(f"{d.isoformat()},{v}\n" for d, v in shuffled)
    s = parse_raw_csv(text.encode(), "zillow-like")
    assert len(s) == 500
    assert all(a < b for a, b in zip(s.dates, s.dates[1:]))
    assert s.points == tuple(rows)


def test_canonical_serialization_round_trips_bit_exactly():
    s = synthetic.weekly_prices(n=120, seed=11)
    text = raw_to_csv(s)
    assert raw_to_csv(parse_raw_csv(text.encode())) == text
    assert parse_raw_csv(text).points == s.points


def test_rawseries_invariants():
    with pytest.raises(IngestError):
        RawSeries(((dt.date(2020, 1, 1), 1.0),))
    with pytest.raises(IngestError):
        RawSeries(((dt.date(2020, 1, 2), 1.0), (dt.date(2020, 1, 1), 2.0)))
    with pytest.raises(IngestError):
        RawSeries(((dt.date(2020, 1, 1), 1.0), (dt.date(2020, 1, 2), float("inf"))))


def test_ohlc_single_row():
    s = parse_ohlc_csv("date,open,high,low,close\n2020-01-01,10,12,8,10\n", "etf", Period.MONTH)
    assert len(s) == 1
    c = s[0]
    assert (c.open, c.high, c.low, c.close, c.n_obs) == (10, 12, 8, 10, 1)
    assert (c.start, c.end) == (dt.date(2020, 1, 1), dt.date(2020, 1, 31))


def test_ohlc_high_below_close_names_row():
    text = "date,open,high,low,close\n2020-01-01,10,12,8,10\n2020-02-01,10,11,8,11.5\n"
    with pytest.raises(IngestError, match="high") as info:
        parse_ohlc_csv(text, "etf", Period.MONTH)
    assert info.value.line == 3


def test_ohlc_unordered_dates_rejected():
    text = "date,open,high,low,close\n2020-02-01,10,12,8,10\n2020-01-01,10,12,8,10\n"
    with pytest.raises(IngestError, match="increasing"):
        parse_ohlc_csv(text, "etf", Period.MONTH)


def test_ohlc_two_rows_in_one_bucket_rejected():
    text = "date,open,high,low,close\n2020-01-01,10,12,8,10\n2020-01-15,10,12,8,10\n"
    with pytest.raises(IngestError, match="same month"):
        parse_ohlc_csv(text, "etf", Period.MONTH)


def test_ohlc_36_monthly_rows():
    rng = random.Random(5)
    lines = ["date,open,high,low,close"]
    for i in range(36):
        o, c = rng.uniform(50, 60), rng.uniform(50, 60)
        h, l = max(o, c) + rng.uniform(0, 2), min(o, c) - rng.uniform(0, 2)
        lines.append(f"{2019 + i // 12}-{i % 12 + 1:02d}-01,{o:.4f},{h:.4f},{l:.4f},{c:.4f}")
    s = parse_ohlc_csv("\n".join(lines), "etf", Period.MONTH)
    assert len(s) == 36
    for a, b in zip(s, s.candles[1:]):
        assert a.end < b.start
    assert parse_ohlc_csv(ohlc_to_csv(s), "etf", Period.MONTH) == s


def test_resample_one_month_of_weeks():
    pts = tuple((dt.date(2021, 3, d), v) for d, v in zip((6, 13, 20, 27), (10, 13, 9, 11)))
    s = resample(RawSeries(pts), Period.MONTH)
    assert len(s) == 1
    c = s[0]
    assert (c.open, c.high, c.low, c.close, c.n_obs) == (10, 13, 9, 11, 4)


def test_resample_single_point_bucket():
    pts = ((dt.date(2021, 3, 6), 10.0), (dt.date(2021, 4, 6), 7.5))
    s = resample(RawSeries(pts), Period.MONTH)
    assert [(c.open, c.high, c.low, c.close, c.n_obs) for c in s] == [(10, 10, 10, 10, 1), (7.5, 7.5, 7.5, 7.5, 1)]


def test_resample_skips_empty_buckets():
    pts = ((dt.date(2021, 1, 6), 10.0), (dt.date(2021, 5, 6), 11.0))
    s = resample(RawSeries(pts), Period.MONTH)
    assert [c.start.month for c in s] == [1, 5]


def test_104_weeks_give_24_months():
    # 2021-01-02 is a Saturday; 104 weeks end in 2022-12-24.
    s = synthetic.weekly_prices(n=104, seed=1, start=dt.date(2021, 1, 2))
    candles = resample(s, Period.MONTH)
    assert len(candles) == 24
    expected = naive_monthly_candles(s.points)
    assert [c.high for c in candles] == [e[2] for e in expected]


def test_week_and_year_buckets():
    assert Period.WEEK.bucket(dt.date(2024, 1, 3)) == (dt.date(2024, 1, 1), dt.date(2024, 1, 7))
    assert Period.WEEK.bucket(dt.date(2024, 1, 7)) == (dt.date(2024, 1, 1), dt.date(2024, 1, 7))
    assert Period.MONTH.bucket(dt.date(2024, 2, 10)) == (dt.date(2024, 2, 1), dt.date(2024, 2, 29))
    assert Period.YEAR.bucket(dt.date(2024, 7, 1)) == (dt.date(2024, 1, 1), dt.date(2024, 12, 31))


def test_daily_to_weekly_uses_iso_weeks():
    pts = tuple((dt.date(2024, 1, 1) + dt.timedelta(days=i), float(i + 1)) for i in range(14))
    s = resample(RawSeries(pts), Period.WEEK)
    assert [(c.open, c.close, c.n_obs) for c in s] == [(1, 7, 7), (8, 14, 7)]


def test_resample_is_identity_on_one_point_per_bucket():
    pts = tuple((dt.date(2000 + i, 6, 15), 1.0 + i) for i in range(10))
    s = resample(RawSeries(pts), Period.YEAR)
    assert [(c.open, c.high, c.low, c.close) for c in s] == [(v, v, v, v) for _, v in pts]


def test_candle_invariants():
    d = dt.date(2020, 1, 1)
    with pytest.raises(IngestError):
        Candle(10, 9, 8, 10, d, d)
    with pytest.raises(IngestError):
        Candle(10, 12, 10.5, 11, d, d)
    with pytest.raises(IngestError):
        Candle(10, 12, 8, 10, d, d - dt.timedelta(days=1))


def test_candle_series_rejects_overlap():
    d = dt.date(2020, 1, 1)
    a = Candle(1, 1, 1, 1, d, d + dt.timedelta(days=10))
    b = Candle(1, 1, 1, 1, d + dt.timedelta(days=5), d + dt.timedelta(days=20))
    with pytest.raises(IngestError, match="overlap"):
        CandleSeries((a, b), Period.MONTH)


def test_candles_csv_layout():
    s = resample(synthetic.weekly_prices(n=10, seed=2), Period.MONTH)
    lines = candles_to_csv(s).splitlines()
    assert lines[0] == "index,start,end,n_obs,open,high,low,close"
    assert len(lines) == len(s) + 1
    assert lines[1].startswith("0,2008-01-01,2008-01-31,4,")


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 2000), st.floats(0.01, 1e6, allow_nan=False)),
        min_size=2,
        max_size=80,
        unique_by=lambda t: t[0],
    ),
    st.sampled_from(list(Period)),
)
def test_resample_matches_member_extremes(rows, period):
    base = dt.date(2015, 1, 1)
    pts = tuple(sorted((base + dt.timedelta(days=o), v) for o, v in rows))
    raw = RawSeries(pts)
    candles = resample(raw, period)
    assert sum(c.n_obs for c in candles) == len(pts)
    for c in candles:
        members = [v for d, v in pts if c.start <= d <= c.end]
        assert (c.open, c.high, c.low, c.close, c.n_obs) == (members[0], max(members), min(members), members[-1], len(members))
