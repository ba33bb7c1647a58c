"""Signal taxonomy shared by the pattern detector and the indicator crossings."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Direction(str, enum.Enum):
    BULLISH = "bullish"
    BEARISH = "bearish"


class SignalKind(str, enum.Enum):
    HAMMER = "Hammer"
    HANGING_MAN = "HangingMan"
    BULLISH_ENGULFING = "BullishEngulfing"
    BEARISH_ENGULFING = "BearishEngulfing"
    DARK_CLOUD_COVER = "DarkCloudCover"
    MACD_BULLISH = "MACDBullish"
    MACD_BEARISH = "MACDBearish"
    RSI_BULLISH = "RSIBullish"
    RSI_BEARISH = "RSIBearish"

    @property
    def direction(self) -> Direction:
        return _DIRECTIONS[self]

    @property
    def is_pattern(self) -> bool:
        return self in PATTERN_KINDS

    @classmethod
    def parse(cls, name: str) -> "SignalKind":
        """Look a kind up by its value, case-insensitively."""
        folded = name.strip().lower()
        for kind in cls:
            if kind.value.lower() == folded:
                return kind
        raise ValueError(f"unknown signal kind {name!r}")


_DIRECTIONS = {
    SignalKind.HAMMER: Direction.BULLISH,
    SignalKind.BULLISH_ENGULFING: Direction.BULLISH,
    SignalKind.HANGING_MAN: Direction.BEARISH,
    SignalKind.BEARISH_ENGULFING: Direction.BEARISH,
    SignalKind.DARK_CLOUD_COVER: Direction.BEARISH,
    SignalKind.MACD_BULLISH: Direction.BULLISH,
    SignalKind.MACD_BEARISH: Direction.BEARISH,
    SignalKind.RSI_BULLISH: Direction.BULLISH,
    SignalKind.RSI_BEARISH: Direction.BEARISH,
}

PATTERN_KINDS = frozenset(
    {
        SignalKind.HAMMER,
        SignalKind.HANGING_MAN,
        SignalKind.BULLISH_ENGULFING,
        SignalKind.BEARISH_ENGULFING,
        SignalKind.DARK_CLOUD_COVER,
    }
)

# Deterministic report order is alphabetical by kind name.
ALL_KINDS = tuple(sorted(SignalKind, key=lambda k: k.value))


@dataclass(frozen=True, order=True)
class Signal:
    """A detected event at the candle that completes it."""

    index: int
    kind: SignalKind

    @property
    def direction(self) -> Direction:
        return self.kind.direction

    def to_dict(self) -> dict:
        return {"index": self.index, "kind": self.kind.value, "direction": self.direction.value}


def sort_signals(signals) -> list[Signal]:
    return sorted(signals, key=lambda s: (s.index, s.kind.value))
