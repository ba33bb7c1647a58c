"""Heikin Ashi transform and the five single/two-candle reversal patterns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CandlestickError
from .ingest import Candle, CandleSeries
from .signals import PATTERN_KINDS, Signal, SignalKind, sort_signals


@dataclass(frozen=True)
class PatternConfig:
    """Geometry thresholds for the shape patterns.

    shadow_body_ratio: minimum lower shadow as a multiple of the body.
    upper_shadow_cap: maximum upper shadow as a fraction of the body.
    trend_lookback: k, the close at t-1 is compared against the close at t-1-k.
    body_epsilon: minimum body as a fraction of the candle range.
    """

    shadow_body_ratio: float = 2.0
    upper_shadow_cap: float = 0.25
    trend_lookback: int = 3
    body_epsilon: float = 1e-9

    def __post_init__(self):
        if not self.shadow_body_ratio > 0:
            raise CandlestickError(f"shadow_body_ratio must be > 0, got {self.shadow_body_ratio}")
        if self.trend_lookback < 1:
            raise CandlestickError(f"trend_lookback must be >= 1, got {self.trend_lookback}")
        if not self.upper_shadow_cap >= 0:
            raise CandlestickError(f"upper_shadow_cap must be >= 0, got {self.upper_shadow_cap}")
        if not 0 < self.body_epsilon < 1:
            raise CandlestickError(f"body_epsilon must lie in (0, 1), got {self.body_epsilon}")


def heikin_ashi(series: CandleSeries) -> CandleSeries:
    """Return the Heikin Ashi transform of ``series``.

    The close is the mean of the four raw fields; the open averages the
    previous Heikin Ashi open and close (seeded with the first raw open and
    close); high and low extend the raw extremes to cover the new body.
    """
    if not len(series):
        raise CandlestickError("cannot transform an empty series")
    out = []
    prev_open = prev_close = None
    for i, c in enumerate(series):
        ha_close = (c.open + c.high + c.low + c.close) / 4
        if i == 0:
            ha_open = (c.open + c.close) / 2
        else:
            ha_open = (prev_open + prev_close) / 2
        ha_high = max(c.high, ha_open, ha_close)
        ha_low = min(c.low, ha_open, ha_close)
        out.append(Candle(ha_open, ha_high, ha_low, ha_close, c.start, c.end, c.n_obs))
        prev_open, prev_close = ha_open, ha_close
    return CandleSeries(tuple(out), series.period, series.label)


def _shape_ok(c: Candle, cfg: PatternConfig) -> bool:
    body = c.body
    # H == L gives a zero threshold on a zero body, so flat candles never match.
    return (
        body > cfg.body_epsilon * c.range
        and c.lower_shadow >= cfg.shadow_body_ratio * body
        and c.upper_shadow <= cfg.upper_shadow_cap * body
    )


def _bullish_engulfing(prev: Candle, cur: Candle) -> bool:
    return prev.bearish and cur.bullish and cur.open < prev.close and cur.close > prev.open


def _bearish_engulfing(prev: Candle, cur: Candle) -> bool:
    return prev.bullish and cur.bearish and cur.open > prev.close and cur.close < prev.open


def _dark_cloud_cover(prev: Candle, cur: Candle) -> bool:
    midpoint = (prev.open + prev.close) / 2
    return prev.bullish and cur.open > prev.close and prev.open < cur.close < midpoint


def detect_patterns(
    series: CandleSeries,
    config: PatternConfig | None = None,
    kinds: Iterable[SignalKind] | None = None,
    trend_closes: Sequence[float] | None = None,
) -> list[Signal]:
    """Scan ``series`` for candlestick patterns.

    Each signal is placed at the candle completing the pattern. Trend
    context for Hammer/HangingMan compares ``trend_closes[t-1]`` with
    ``trend_closes[t-1-k]``; it defaults to the series' own closes, pass the
    raw closes when scanning a Heikin Ashi series.
    """
    cfg = config or PatternConfig()
    wanted = PATTERN_KINDS if kinds is None else frozenset(kinds) & PATTERN_KINDS
    closes = series.closes if trend_closes is None else list(trend_closes)
    if len(closes) != len(series):
        raise CandlestickError(f"trend_closes has {len(closes)} values for {len(series)} candles")
    k = cfg.trend_lookback
    found = []
    for t in range(1, len(series)):
        prev, cur = series[t - 1], series[t]
        if SignalKind.BULLISH_ENGULFING in wanted and _bullish_engulfing(prev, cur):
            found.append(Signal(t, SignalKind.BULLISH_ENGULFING))
        if SignalKind.BEARISH_ENGULFING in wanted and _bearish_engulfing(prev, cur):
            found.append(Signal(t, SignalKind.BEARISH_ENGULFING))
        if SignalKind.DARK_CLOUD_COVER in wanted and _dark_cloud_cover(prev, cur):
            found.append(Signal(t, SignalKind.DARK_CLOUD_COVER))
        if t - 1 - k < 0 or not _shape_ok(cur, cfg):
            continue
        if SignalKind.HAMMER in wanted and closes[t - 1] < closes[t - 1 - k]:
            found.append(Signal(t, SignalKind.HAMMER))
        if SignalKind.HANGING_MAN in wanted and closes[t - 1] > closes[t - 1 - k]:
            found.append(Signal(t, SignalKind.HANGING_MAN))
    return sort_signals(found)
