"""Exception hierarchy.

Every error carries the name of the module that raised it so the CLI can
report where a failure originated.
"""

from __future__ import annotations


class CandlesigError(ValueError):
    module = "candlesig"

    def __init__(self, message: str, *, line: int | None = None, index: int | None = None):
        self.line = line
        self.index = index
        super().__init__(message)

    def __str__(self) -> str:
        where = ""
        if self.line is not None:
            where = f" line {self.line}"
        elif self.index is not None:
            where = f" index {self.index}"
        return f"[{self.module}{where}] {self.args[0]}"


class IngestError(CandlesigError):
    module = "ingest"


class CandlestickError(CandlesigError):
    module = "candlestick"


class IndicatorError(CandlesigError):
    module = "indicator"


class SignificanceError(CandlesigError):
    module = "significance"


class ConfigError(CandlesigError):
    module = "config"
