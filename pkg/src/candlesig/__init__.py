"""Technical-analysis signals on price series and their forward-return significance."""

from .candlestick import PatternConfig, detect_patterns, heikin_ashi
from .errors import CandlesigError, CandlestickError, ConfigError, IndicatorError, IngestError, SignificanceError
from .indicators import IndicatorConfig, IndicatorKind, IndicatorSeries, ema, macd, macd_crossovers, rsi, rsi_threshold_signals
from .ingest import Candle, CandleSeries, Period, RawSeries, parse_ohlc_csv, parse_raw_csv, resample
from .report import RunConfig, TrendLine, linear_trend, run
from .signals import Direction, Signal, SignalKind
from .significance import (
    ForecastWindow,
    ForwardReturnSample,
    SignificanceReport,
    WilcoxonResult,
    evaluate_signals,
    forecast_windows,
    forward_returns,
    wilcoxon_signed_rank,
)

__version__ = "0.1.0"
