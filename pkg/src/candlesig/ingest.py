"""CSV ingestion and calendar resampling into candlestick series."""

from __future__ import annotations

import calendar
import datetime as dt
import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import IngestError

# Plain decimals only: no thousands separators, currency symbols or exponents.
_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")


class Period(str, enum.Enum):
    WEEK = "week"
    MONTH = "month"
    YEAR = "year"

    def bucket(self, day: dt.date) -> tuple[dt.date, dt.date]:
        """Return the inclusive (start, end) calendar bucket containing ``day``.

        Weeks are ISO weeks starting on Monday.
        """
        if self is Period.WEEK:
            start = day - dt.timedelta(days=day.weekday())
            return start, start + dt.timedelta(days=6)
        if self is Period.MONTH:
            last = calendar.monthrange(day.year, day.month)[1]
            return dt.date(day.year, day.month, 1), dt.date(day.year, day.month, last)
        return dt.date(day.year, 1, 1), dt.date(day.year, 12, 31)


@dataclass(frozen=True)
class RawSeries:
    points: tuple[tuple[dt.date, float], ...]
    label: str = ""
    market_tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise IngestError(f"need at least 2 observations, got {len(self.points)}")
        for i, (day, value) in enumerate(self.points):
            if not (math.isfinite(value) and value > 0):
                raise IngestError(f"value must be finite and positive, got {value!r}", index=i)
            if i and day <= self.points[i - 1][0]:
                raise IngestError(f"dates not strictly increasing at {day.isoformat()}", index=i)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dates(self) -> list[dt.date]:
        return [d for d, _ in self.points]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.points]


@dataclass(frozen=True)
class Candle:
    open: float
    high: float
    low: float
    close: float
    start: dt.date
    end: dt.date
    n_obs: int = 1

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.open, self.high, self.low, self.close)):
            raise IngestError("candle prices must be finite")
        if not (self.low <= min(self.open, self.close) and max(self.open, self.close) <= self.high):
            raise IngestError(
                f"candle violates low <= min(open, close) <= max(open, close) <= high: "
                f"O={self.open} H={self.high} L={self.low} C={self.close}"
            )
        if self.start > self.end:
            raise IngestError(f"candle start {self.start} after end {self.end}")
        if self.n_obs < 1:
            raise IngestError("candle must hold at least one observation")

    @property
    def body(self) -> float:
        return abs(self.close - self.open)

    @property
    def range(self) -> float:
        return self.high - self.low

    @property
    def upper_shadow(self) -> float:
        return self.high - max(self.open, self.close)

    @property
    def lower_shadow(self) -> float:
        return min(self.open, self.close) - self.low

    @property
    def bullish(self) -> bool:
        return self.close > self.open

    @property
    def bearish(self) -> bool:
        return self.close < self.open


@dataclass(frozen=True)
class CandleSeries:
    candles: tuple[Candle, ...]
    period: Period
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "candles", tuple(self.candles))
        for i in range(1, len(self.candles)):
            prev, cur = self.candles[i - 1], self.candles[i]
            if cur.start <= prev.start:
                raise IngestError("candle start dates not strictly increasing", index=i)
            if cur.start <= prev.end:
                raise IngestError("candle buckets overlap", index=i)

    def __len__(self) -> int:
        return len(self.candles)

    def __getitem__(self, i):
        return self.candles[i]

    def __iter__(self):
        return iter(self.candles)

    @property
    def closes(self) -> list[float]:
        return [c.close for c in self.candles]


def _decode_lines(data: bytes | str) -> list[str]:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError(f"input is not valid UTF-8: {exc}") from None
    data = data.removeprefix("\ufeff")
    return data.splitlines()


def _parse_date(text: str, line: int) -> dt.date:
    try:
        if len(text) != 10:
            raise ValueError
        return dt.date.fromisoformat(text)
    except ValueError:
        raise IngestError(f"malformed date {text!r}, expected YYYY-MM-DD", line=line) from None


def _parse_decimal(text: str, line: int, column: str) -> float:
    if not _DECIMAL.match(text):
        raise IngestError(f"malformed {column} {text!r}, expected a plain decimal", line=line)
    return float(text)


def _rows(data: bytes | str, header: Sequence[str]) -> Iterable[tuple[int, list[str]]]:
    lines = _decode_lines(data)
    if not lines:
        raise IngestError("empty input, missing header", line=1)
    got = [h.strip().lower() for h in lines[0].split(",")]
    if got != list(header):
        raise IngestError(f"header must be {','.join(header)!r}, got {lines[0]!r}", line=1)
    for lineno, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue
        fields = [f.strip() for f in text.split(",")]
        if len(fields) != len(header):
            raise IngestError(f"expected {len(header)} fields, got {len(fields)}", line=lineno)
        yield lineno, fields


def parse_raw_csv(data: bytes | str, label: str = "", market_tag: str | None = None) -> RawSeries:
    """Parse a ``date,value`` CSV into a :class:`RawSeries`.

    Rows may arrive in any order and are sorted by date. Duplicate dates,
    non-positive values and malformed rows raise :class:`IngestError` with
    the offending line number.
    """
    seen: dict[dt.date, int] = {}
    points = []
    for lineno, (date_text, value_text) in _rows(data, ("date", "value")):
        day = _parse_date(date_text, lineno)
        value = _parse_decimal(value_text, lineno, "value")
        if not (math.isfinite(value) and value > 0):
            raise IngestError(f"value must be finite and positive, got {value_text!r}", line=lineno)
        if day in seen:
            raise IngestError(f"duplicate date {date_text} (first seen on line {seen[day]})", line=lineno)
        seen[day] = lineno
        points.append((day, value))
    if len(points) < 2:
        raise IngestError(f"need at least 2 valid rows, got {len(points)}")
    points.sort(key=lambda p: p[0])
    return RawSeries(tuple(points), label=label, market_tag=market_tag)


def parse_ohlc_csv(data: bytes | str, label: str = "", period: Period = Period.MONTH) -> CandleSeries:
    """Parse a ``date,open,high,low,close`` CSV holding one row per period bucket.

    Unlike :func:`parse_raw_csv` rows are not re-sorted: out-of-order dates
    are an error, as are two rows falling in the same bucket.
    """
    candles = []
    prev_day = None
    for lineno, fields in _rows(data, ("date", "open", "high", "low", "close")):
        day = _parse_date(fields[0], lineno)
        o, h, l, c = (_parse_decimal(f, lineno, name) for f, name in zip(fields[1:], ("open", "high", "low", "close")))
        if prev_day is not None and day <= prev_day:
            raise IngestError(f"dates not strictly increasing at {fields[0]}", line=lineno)
        if not all(x > 0 for x in (o, h, l, c)):
            raise IngestError("prices must be positive", line=lineno)
        start, end = period.bucket(day)
        if candles and start <= candles[-1].end:
            raise IngestError(f"{fields[0]} falls in the same {period.value} as the previous row", line=lineno)
        try:
            candles.append(Candle(o, h, l, c, start, end, 1))
        except IngestError as exc:
            raise IngestError(exc.args[0], line=lineno) from None
        prev_day = day
    if not candles:
        raise IngestError("no candle rows")
    return CandleSeries(tuple(candles), period, label)


def resample(series: RawSeries, period: Period) -> CandleSeries:
    """Bucket observations into calendar periods.

    open/close are the first/last observation in the bucket, high/low the
    extremes. Empty buckets produce no candle.
    """
    candles: list[Candle] = []
    bucket: list[float] = []
    bounds = None
    for day, value in series.points:
        b = period.bucket(day)
        if b != bounds:
            if bucket:
                candles.append(_bucket_candle(bucket, bounds))
            bucket, bounds = [], b
        bucket.append(value)
    candles.append(_bucket_candle(bucket, bounds))
    return CandleSeries(tuple(candles), period, series.label)


def _bucket_candle(values: list[float], bounds: tuple[dt.date, dt.date]) -> Candle:
    return Candle(values[0], max(values), min(values), values[-1], bounds[0], bounds[1], len(values))


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def raw_to_csv(series: RawSeries) -> str:
    """Canonical ``date,value`` CSV with 6-decimal fixed values and LF endings."""
    lines = ["date,value"]
    lines += [f"{d.isoformat()},{_fmt(v)}" for d, v in series.points]
    return "\n".join(lines) + "\n"


def candles_to_csv(series: CandleSeries, heikin_ashi: CandleSeries | None = None) -> str:
    """Canonical candle CSV, optionally with Heikin Ashi columns alongside."""
    header = ["index", "start", "end", "n_obs", "open", "high", "low", "close"]
    if heikin_ashi is not None:
        if len(heikin_ashi) != len(series):
            raise IngestError("Heikin Ashi series length differs from raw series")
        header += ["ha_open", "ha_high", "ha_low", "ha_close"]
    lines = [",".join(header)]
    for i, c in enumerate(series):
        row = [str(i), c.start.isoformat(), c.end.isoformat(), str(c.n_obs)]
        row += [_fmt(x) for x in (c.open, c.high, c.low, c.close)]
        if heikin_ashi is not None:
            h = heikin_ashi[i]
            row += [_fmt(x) for x in (h.open, h.high, h.low, h.close)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def ohlc_to_csv(series: CandleSeries) -> str:
    """``date,open,high,low,close`` CSV that :func:`parse_ohlc_csv` reads back."""
    lines = ["date,open,high,low,close"]
    for c in series:
        lines.append(",".join([c.start.isoformat()] + [_fmt(x) for x in (c.open, c.high, c.low, c.close)]))
    return "\n".join(lines) + "\n"
