"""Pipeline orchestration, linear trend fit and report rendering."""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import candlestick, indicators, ingest, significance
from .candlestick import PatternConfig
from .errors import CandlesigError, ConfigError
from .indicators import IndicatorConfig
from .ingest import CandleSeries, Period, RawSeries
from .signals import ALL_KINDS, Signal, SignalKind, sort_signals
from .significance import SignificanceReport

log = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
BUNDLED_DATASET = DATA_DIR / "synthetic_weekly.csv"

FORMATS = ("json", "csv", "text")
OUTPUT_FILES = {
    "csv": ("candles.csv", "indicators.csv"),
    "json": ("signals.json", "significance.json", "forecasts.json", "trend.json"),
    "text": ("significance.txt",),
}


@dataclass(frozen=True)
class TrendLine:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def at(self, x: float) -> float:
        return self.intercept + self.slope * x


def linear_trend(series: RawSeries | Sequence[float]) -> TrendLine:
    """Ordinary least squares of value against observation index 0..n-1.

    Flat data (zero total variance) reports r_squared = 0.
    """
    ys = list(series.values if isinstance(series, RawSeries) else series)
    n = len(ys)
    if n < 2:
        raise CandlesigError(f"linear trend needs at least 2 points, got {n}")
    x_mean = (n - 1) / 2
    y_mean = math.fsum(ys) / n
    sxx = math.fsum((i - x_mean) ** 2 for i in range(n))
    sxy = math.fsum((i - x_mean) * (y - y_mean) for i, y in enumerate(ys))
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    ss_tot = math.fsum((y - y_mean) ** 2 for y in ys)
    if ss_tot == 0:
        r2 = 0.0
    else:
        ss_res = math.fsum((y - (intercept + slope * i)) ** 2 for i, y in enumerate(ys))
        r2 = min(1.0, max(0.0, 1 - ss_res / ss_tot))
    return TrendLine(slope, intercept, r2, n)


@dataclass(frozen=True)
class RunConfig:
    input_path: Path
    output_dir: Path
    input_kind: str = "raw"
    period: Period = Period.MONTH
    indicator: IndicatorConfig = field(default_factory=IndicatorConfig)
    patterns: PatternConfig = field(default_factory=PatternConfig)
    horizon: int = 6
    min_signals: int = 3
    alpha: float = 0.05
    kinds: tuple[SignalKind, ...] = ALL_KINDS
    use_heikin_ashi: bool = False
    formats: tuple[str, ...] = FORMATS
    label: str | None = None
    market_tag: str | None = None
    timestamp: str | None = None

    def __post_init__(self):
        if self.input_kind not in ("raw", "ohlc"):
            raise ConfigError(f"input_kind must be 'raw' or 'ohlc', got {self.input_kind!r}")
        if not self.kinds:
            raise ConfigError("at least one signal kind must be enabled")
        if not self.formats or set(self.formats) - set(FORMATS):
            raise ConfigError(f"formats must be a non-empty subset of {FORMATS}, got {self.formats}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.min_signals < 3:
            raise ConfigError(f"min_signals must be >= 3, got {self.min_signals}")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")

    def snapshot(self) -> dict:
        """Settings that influence results; paths and timestamps are left out."""
        return {
            "input_kind": self.input_kind,
            "period": self.period.value,
            "use_heikin_ashi": self.use_heikin_ashi,
            "horizon": self.horizon,
            "min_signals": self.min_signals,
            "alpha": self.alpha,
            "kinds": [k.value for k in sorted(self.kinds, key=lambda k: k.value)],
            "indicator": dataclasses.asdict(self.indicator),
            "patterns": dataclasses.asdict(self.patterns),
        }


@dataclass(frozen=True)
class Analysis:
    """Everything one pipeline run computes, before rendering."""

    raw: RawSeries
    candles: CandleSeries
    heikin_ashi: CandleSeries | None
    macd_line: indicators.IndicatorSeries
    macd_signal: indicators.IndicatorSeries
    rsi: indicators.IndicatorSeries
    signals: tuple[Signal, ...]
    report: SignificanceReport
    windows: tuple[significance.ForecastWindow, ...]
    trend: TrendLine


def analyze(
    raw: RawSeries | None,
    candles: CandleSeries,
    config: RunConfig,
) -> Analysis:
    if len(candles) < 2:
        raise CandlesigError(f"need at least 2 candles, got {len(candles)}")
    if raw is None:
        raw = RawSeries(tuple((c.start, c.close) for c in candles), candles.label, config.market_tag)
    closes = candles.closes
    ha = candlestick.heikin_ashi(candles) if config.use_heikin_ashi else None
    scan = ha if ha is not None else candles
    kinds = frozenset(config.kinds)

    line, sig_line = indicators.macd(closes, config.indicator)
    rsi = indicators.rsi(closes, config.indicator.rsi_period, relative=config.indicator.rsi_relative)
    found = candlestick.detect_patterns(scan, config.patterns, kinds, trend_closes=closes)
    found += indicators.macd_crossovers(line, sig_line)
    found += indicators.rsi_threshold_signals(rsi, config.indicator)
    signals = tuple(sort_signals(s for s in found if s.kind in kinds))
    log.info("%d candles, %d signals", len(candles), len(signals))

    report = significance.evaluate_signals(
        candles,
        signals,
        horizon=config.horizon,
        min_signals=config.min_signals,
        kinds=config.kinds,
        alpha=config.alpha,
        config=config.snapshot(),
        market_tag=config.market_tag,
        generated_at=config.timestamp,
    )
    windows = tuple(significance.forecast_windows(candles, signals, config.horizon))
    return Analysis(raw, candles, ha, line, sig_line, rsi, signals, report, windows, linear_trend(raw))


def load(config: RunConfig) -> tuple[RawSeries | None, CandleSeries]:
    """Read and parse the input file. OSError propagates for the caller to map to an I/O failure."""
    data = Path(config.input_path).read_bytes()
    label = config.label if config.label is not None else Path(config.input_path).stem
    if config.input_kind == "ohlc":
        return None, ingest.parse_ohlc_csv(data, label, config.period)
    raw = ingest.parse_raw_csv(data, label, config.market_tag)
    return raw, ingest.resample(raw, config.period)


# --- rendering -------------------------------------------------------------

def round_sig(x: float | None, digits: int = 10) -> float | None:
    """Round to ``digits`` significant digits, the precision reported numbers are emitted at."""
    if x is None:
        return None
    return float(f"{x:.{digits - 1}e}")


def format_p(p: float | None) -> str:
    if p is None:
        return "-"
    if p < 1e-4:
        return f"{p:.3e}"
    return f"{p:.4f}"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def signals_json(a: Analysis) -> str:
    closes = a.candles.closes
    horizon = a.report.horizon
    items = []
    for s in a.signals:
        c = a.candles[s.index]
        fwd = None
        if s.index + horizon < len(closes):
            fwd = round_sig(significance.forward_return(closes, s.index, horizon))
        items.append(
            {
                **s.to_dict(),
                "start": c.start.isoformat(),
                "end": c.end.isoformat(),
                "close": c.close,
                "forward_return": fwd,
            }
        )
    return _json(
        {
            "label": a.candles.label,
            "period": a.candles.period.value,
            "heikin_ashi": a.heikin_ashi is not None,
            "horizon": horizon,
            "n_candles": len(a.candles),
            "signals": items,
        }
    )


def report_to_dict(report: SignificanceReport) -> dict:
    rows = []
    for r in report.rows:
        res = r.result
        rows.append(
            {
                "kind": r.kind.value,
                "direction": r.direction.value,
                "alternative": significance.alternative_for(r.kind),
                "signals": r.signals,
                "usable": r.usable,
                "skipped": r.skipped,
                "status": r.status,
                "n": None if res is None else res.n,
                "w_plus": None if res is None else res.w_plus,
                "p_value": None if res is None else res.p_value,
                "method": None if res is None else res.method,
                "median_return": round_sig(r.median_return),
                "verdict": r.verdict,
            }
        )
    return {
        "label": report.label,
        "market_tag": report.market_tag,
        "period": report.period,
        "horizon": report.horizon,
        "min_signals": report.min_signals,
        "alpha": report.alpha,
        "generated_at": report.generated_at,
        "config": report.config,
        "rows": rows,
    }


def significance_json(report: SignificanceReport) -> str:
    return _json(report_to_dict(report))


_COLUMNS = ("kind", "direction", "signals", "usable", "n", "W+", "p-value", "method", "verdict")


def significance_text(report: SignificanceReport) -> str:
    """Aligned kind-by-p-value table. Columns are separated by at least two spaces."""
    body = []
    for r in report.rows:
        res = r.result
        body.append(
            (
                r.kind.value,
                r.direction.value,
                str(r.signals),
                str(r.usable),
                "-" if res is None else str(res.n),
                "-" if res is None else f"{res.w_plus:g}",
                format_p(r.p_value),
                "-" if res is None else res.method,
                r.verdict or r.status,
            )
        )
    widths = [max(len(row[i]) for row in [_COLUMNS, *body]) for i in range(len(_COLUMNS))]
    render = lambda row: "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
    title = f"Signal significance: {report.label} (period={report.period}, horizon={report.horizon}, alpha={report.alpha:g})"
    lines = [title, render(_COLUMNS), render(tuple("-" * w for w in widths))]
    lines += [render(row) for row in body]
    return "\n".join(lines) + "\n"


def parse_significance_text(text: str) -> dict[str, float | None]:
    """Read a table written by :func:`significance_text` back into kind -> p-value."""
    lines = text.splitlines()
    header = re.split(r"\s{2,}", lines[1].strip())
    col = header.index("p-value")
    out = {}
    for line in lines[3:]:
        if not line.strip():
            continue
        cells = re.split(r"\s{2,}", line.strip())
        out[cells[0]] = None if cells[col] == "-" else float(cells[col])
    return out


def forecasts_json(a: Analysis) -> str:
    items = []
    for w in a.windows:
        items.append(
            {
                "kind": w.kind.value,
                "direction": w.direction.value,
                "start_index": w.start,
                "end_index": w.end,
                "start": a.candles[w.start].start.isoformat(),
                "end": a.candles[w.end].end.isoformat(),
                "truncated": w.truncated,
            }
        )
    return _json({"label": a.candles.label, "horizon": a.report.horizon, "windows": items})


def trend_json(a: Analysis) -> str:
    t = a.trend
    return _json(
        {
            "label": a.raw.label,
            "x": "observation index",
            "slope": t.slope,
            "intercept": t.intercept,
            "r_squared": t.r_squared,
            "n_points": t.n_points,
            "first_date": a.raw.points[0][0].isoformat(),
            "last_date": a.raw.points[-1][0].isoformat(),
            "fitted_first": t.at(0),
            "fitted_last": t.at(t.n_points - 1),
        }
    )


def indicators_csv(a: Analysis) -> str:
    rsi = a.rsi.as_dict()
    lines = ["index,date,close,macd,signal,rsi"]
    for i, c in enumerate(a.candles):
        r = rsi.get(i)
        lines.append(
            f"{i},{c.start.isoformat()},{c.close:.6f},{a.macd_line.values[i]:.6f},"
            f"{a.macd_signal.values[i]:.6f},{'' if r is None else f'{r:.6f}'}"
        )
    return "\n".join(lines) + "\n"


def render(a: Analysis, formats: Sequence[str] = FORMATS) -> dict[str, str]:
    files = {}
    if "csv" in formats:
        files["candles.csv"] = ingest.candles_to_csv(a.candles, a.heikin_ashi)
        files["indicators.csv"] = indicators_csv(a)
    if "json" in formats:
        files["signals.json"] = signals_json(a)
        files["significance.json"] = significance_json(a.report)
        files["forecasts.json"] = forecasts_json(a)
        files["trend.json"] = trend_json(a)
    if "text" in formats:
        files["significance.txt"] = significance_text(a.report)
    return files


def run(config: RunConfig) -> dict[str, Path]:
    """Run the full pipeline and write the report files.

    Everything is computed before the first file is written, so a failed run
    leaves no partial output behind.
    """
    raw, candles = load(config)
    files = render(analyze(raw, candles, config), config.formats)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = {}
    for name, text in files.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8", newline="\n")
        written[name] = path
    return written
