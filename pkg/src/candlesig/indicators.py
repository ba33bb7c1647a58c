"""EMA, MACD with signal line, RSI, and the crossing detectors built on them."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .errors import IndicatorError
from .signals import Signal, SignalKind


class IndicatorKind(str, enum.Enum):
    EMA = "EMA"
    MACD = "MACD"
    MACD_SIGNAL = "MACDSignal"
    RSI = "RSI"


@dataclass(frozen=True)
class IndicatorSeries:
    """Indicator values keyed by candle position."""

    indices: tuple[int, ...]
    values: tuple[float, ...]
    kind: IndicatorKind

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.indices) != len(self.values):
            raise IndicatorError("indices and values differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise IndicatorError("indices must be strictly increasing")
        if self.indices and self.indices[0] < 0:
            raise IndicatorError("indices must be non-negative")
        if self.kind is IndicatorKind.RSI and any(not 0 <= v <= 100 for v in self.values):
            raise IndicatorError("RSI values must lie in [0, 100]")

    def __len__(self) -> int:
        return len(self.values)

    def items(self):
        return zip(self.indices, self.values)

    def as_dict(self) -> dict[int, float]:
        return dict(self.items())

    def to_csv(self) -> str:
        lines = ["index,value"] + [f"{i},{v:.6f}" for i, v in self.items()]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class IndicatorConfig:
    rsi_period: int = 14
    rsi_upper: float = 70.0
    rsi_lower: float = 30.0
    macd_fast: int = 12
    macd_slow: int = 26
    macd_signal_period: int = 9
    # Relative gains (C_t - C_{t-1}) / C_t instead of plain differences.
    rsi_relative: bool = False

    def __post_init__(self):
        for name in ("rsi_period", "macd_fast", "macd_slow", "macd_signal_period"):
            if getattr(self, name) < 1:
                raise IndicatorError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0 <= self.rsi_lower < self.rsi_upper <= 100:
            raise IndicatorError(
                f"need 0 <= rsi_lower < rsi_upper <= 100, got rsi_lower={self.rsi_lower} rsi_upper={self.rsi_upper}"
            )
        if not self.macd_fast < self.macd_slow:
            raise IndicatorError(
                f"need macd_fast < macd_slow, got macd_fast={self.macd_fast} macd_slow={self.macd_slow}"
            )


def _smooth(xs: Sequence[float], alpha: float) -> list[float]:
    out = [float(xs[0])]
    for x in xs[1:]:
        out.append(alpha * x + (1 - alpha) * out[-1])
    return out


def ema(closes: Sequence[float], period: int) -> IndicatorSeries:
    """Exponential moving average with smoothing 2/(period+1), seeded with the first close."""
    if not len(closes):
        raise IndicatorError("ema needs at least one value")
    if period < 1:
        raise IndicatorError(f"ema period must be >= 1, got {period}")
    values = _smooth(closes, 2 / (period + 1))
    return IndicatorSeries(tuple(range(len(values))), tuple(values), IndicatorKind.EMA)


def macd(closes: Sequence[float], config: IndicatorConfig | None = None) -> tuple[IndicatorSeries, IndicatorSeries]:
    """Return (MACD line, signal line), both full length.

    The MACD line is fast EMA minus slow EMA; the signal line is the EMA of
    the MACD line over ``macd_signal_period``.
    """
    cfg = config or IndicatorConfig()
    if len(closes) < 2:
        raise IndicatorError(f"macd needs at least 2 closes, got {len(closes)}")
    fast = ema(closes, cfg.macd_fast).values
    slow = ema(closes, cfg.macd_slow).values
    line = [f - s for f, s in zip(fast, slow)]
    signal = _smooth(line, 2 / (cfg.macd_signal_period + 1))
    idx = tuple(range(len(line)))
    return IndicatorSeries(idx, tuple(line), IndicatorKind.MACD), IndicatorSeries(idx, tuple(signal), IndicatorKind.MACD_SIGNAL)


def rsi(closes: Sequence[float], period: int = 14, relative: bool = False) -> IndicatorSeries:
    """Relative strength index, defined from the second close onward.

    Gains and losses are smoothed recursively with factor 1/period, seeded by
    the first step. A flat history (no gains and no losses yet) reads 50.
    """
    if len(closes) < 2:
        raise IndicatorError(f"rsi needs at least 2 closes, got {len(closes)}")
    if period < 1:
        raise IndicatorError(f"rsi period must be >= 1, got {period}")
    alpha = 1 / period
    avg_gain = avg_loss = 0.0
    values = []
    for t in range(1, len(closes)):
        delta = closes[t] - closes[t - 1]
        scale = closes[t] if relative else 1.0
        gain = max(delta, 0.0) / scale
        loss = max(-delta, 0.0) / scale
        if t == 1:
            avg_gain, avg_loss = gain, loss
        else:
            avg_gain = alpha * gain + (1 - alpha) * avg_gain
            avg_loss = alpha * loss + (1 - alpha) * avg_loss
        total = avg_gain + avg_loss
        values.append(50.0 if total == 0 else min(100.0, 100 * avg_gain / total))
    return IndicatorSeries(tuple(range(1, len(closes))), tuple(values), IndicatorKind.RSI)


def macd_crossovers(line: IndicatorSeries, signal: IndicatorSeries) -> list[Signal]:
    """MACDBullish where the line crosses above the signal, MACDBearish where it crosses below.

    The previous step may touch the signal line; the current step must be
    strictly on the other side.
    """
    if len(line) != len(signal):
        raise IndicatorError(f"macd has {len(line)} values but signal has {len(signal)}")
    if line.indices != signal.indices:
        raise IndicatorError("macd and signal are not aligned on the same candle indices")
    out = []
    m, s = line.values, signal.values
    for j in range(1, len(m)):
        if m[j - 1] <= s[j - 1] and m[j] > s[j]:
            out.append(Signal(line.indices[j], SignalKind.MACD_BULLISH))
        elif m[j - 1] >= s[j - 1] and m[j] < s[j]:
            out.append(Signal(line.indices[j], SignalKind.MACD_BEARISH))
    return out


def rsi_threshold_signals(series: IndicatorSeries, config: IndicatorConfig | None = None) -> list[Signal]:
    """RSIBearish on an upward cross of the upper threshold, RSIBullish on a downward cross of the lower."""
    cfg = config or IndicatorConfig()
    out = []
    v = series.values
    for j in range(1, len(v)):
        if v[j - 1] <= cfg.rsi_upper < v[j]:
            out.append(Signal(series.indices[j], SignalKind.RSI_BEARISH))
        if v[j - 1] >= cfg.rsi_lower > v[j]:
            out.append(Signal(series.indices[j], SignalKind.RSI_BULLISH))
    return out

