"""Command line entry point: ``candlesig ingest|analyze|wilcoxon``.

Exit status is 0 on success, 1 on a validation error and 2 on an I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from pathlib import Path

from . import ingest, report, significance
from .candlestick import PatternConfig
from .errors import CandlesigError, ConfigError
from .indicators import IndicatorConfig
from .ingest import Period
from .signals import ALL_KINDS, SignalKind

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

log = logging.getLogger("candlesig")

# option name -> (type, default). Names double as config-file keys.
_ANALYZE_OPTIONS = {
    "input_kind": (str, "raw"),
    "period": (str, "month"),
    "heikin_ashi": (bool, False),
    "rsi_period": (int, 14),
    "rsi_upper": (float, 70.0),
    "rsi_lower": (float, 30.0),
    "rsi_relative": (bool, False),
    "macd_fast": (int, 12),
    "macd_slow": (int, 26),
    "macd_signal_period": (int, 9),
    "shadow_body_ratio": (float, 2.0),
    "upper_shadow_cap": (float, 0.25),
    "trend_lookback": (int, 3),
    "body_epsilon": (float, 1e-9),
    "horizon": (int, 6),
    "min_signals": (int, 3),
    "alpha": (float, 0.05),
    "kinds": (str, ",".join(k.value for k in ALL_KINDS)),
    "formats": (str, ",".join(report.FORMATS)),
    "output_dir": (str, "out"),
    "label": (str, None),
    "market_tag": (str, None),
    "timestamp": (str, None),
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, kind, text: str):
    try:
        if kind is bool:
            folded = text.strip().lower()
            if folded in _TRUE:
                return True
            if folded in _FALSE:
                return False
            raise ValueError(text)
        return kind(text.strip())
    except ValueError:
        raise ConfigError(f"invalid value {text!r} for {name}") from None


def read_config_file(path: Path) -> dict:
    """Read ``key = value`` settings; a leading ``[section]`` header is optional."""
    text = Path(path).read_text(encoding="utf-8")
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from None
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            name = key.replace("-", "_")
            if name not in _ANALYZE_OPTIONS:
                raise ConfigError(f"unknown config key {key!r} in {path}")
            values[name] = _coerce(name, _ANALYZE_OPTIONS[name][0], raw)
    return values


def _split(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def build_run_config(args: argparse.Namespace) -> report.RunConfig:
    settings = {name: default for name, (_, default) in _ANALYZE_OPTIONS.items()}
    if args.config is not None:
        settings.update(read_config_file(args.config))
    for name in _ANALYZE_OPTIONS:
        value = getattr(args, name, None)
        if value is not None:
            settings[name] = value
    try:
        period = Period(settings["period"])
    except ValueError:
        raise ConfigError(f"period must be one of week, month, year; got {settings['period']!r}") from None
    try:
        kinds = tuple(SignalKind.parse(k) for k in _split(settings["kinds"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    indicator = IndicatorConfig(
        rsi_period=settings["rsi_period"],
        rsi_upper=settings["rsi_upper"],
        rsi_lower=settings["rsi_lower"],
        macd_fast=settings["macd_fast"],
        macd_slow=settings["macd_slow"],
        macd_signal_period=settings["macd_signal_period"],
        rsi_relative=settings["rsi_relative"],
    )
    patterns = PatternConfig(
        shadow_body_ratio=settings["shadow_body_ratio"],
        upper_shadow_cap=settings["upper_shadow_cap"],
        trend_lookback=settings["trend_lookback"],
        body_epsilon=settings["body_epsilon"],
    )
    return report.RunConfig(
        input_path=Path(args.input),
        output_dir=Path(settings["output_dir"]),
        input_kind=settings["input_kind"],
        period=period,
        indicator=indicator,
        patterns=patterns,
        horizon=settings["horizon"],
        min_signals=settings["min_signals"],
        alpha=settings["alpha"],
        kinds=kinds,
        use_heikin_ashi=settings["heikin_ashi"],
        formats=tuple(_split(settings["formats"])),
        label=settings["label"],
        market_tag=settings["market_tag"],
        timestamp=settings["timestamp"],
    )


def cmd_analyze(args) -> int:
    config = build_run_config(args)
    if not config.input_path.is_file():
        raise FileNotFoundError(f"input file not found: {config.input_path}")
    written = report.run(config)
    for name, path in written.items():
        print(path)
    return EXIT_OK


def cmd_ingest(args) -> int:
    data = Path(args.input).read_bytes()
    period = Period(args.period)
    label = Path(args.input).stem
    if args.input_kind == "ohlc":
        series = ingest.parse_ohlc_csv(data, label, period)
    else:
        series = ingest.resample(ingest.parse_raw_csv(data, label), period)
    text = ingest.candles_to_csv(series)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def read_diffs(path: Path) -> list[float]:
    """One number per line; blank lines, ``#`` comments and a non-numeric header line are ignored."""
    diffs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        cell = line.split("#", 1)[0].strip().split(",")[-1].strip()
        if not cell:
            continue
        try:
            diffs.append(float(cell))
        except ValueError:
            if diffs or lineno > 1:
                raise CandlesigError(f"not a number: {cell!r}", line=lineno) from None
    return diffs


def cmd_wilcoxon(args) -> int:
    res = significance.wilcoxon_signed_rank(read_diffs(args.input), args.alternative)
    if args.json:
        print(json.dumps(res.to_dict(), indent=2))
    else:
        print(f"n={res.n} W+={res.w_plus:g} p={report.format_p(res.p_value)} ({res.method}, {res.alternative})")
    return EXIT_OK


def _add_analyze_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="price CSV (date,value or date,open,high,low,close)")
    p.add_argument("--config", type=Path, help="key = value settings file; flags override it")
    p.add_argument("--input-kind", choices=("raw", "ohlc"))
    p.add_argument("--period", choices=[x.value for x in Period])
    p.add_argument("--heikin-ashi", action=argparse.BooleanOptionalAction, default=None,
                   help="scan patterns on Heikin Ashi candles")
    p.add_argument("--rsi-period", type=int)
    p.add_argument("--rsi-upper", type=float)
    p.add_argument("--rsi-lower", type=float)
    p.add_argument("--rsi-relative", action=argparse.BooleanOptionalAction, default=None,
                   help="normalise RSI gains and losses by the current close")
    p.add_argument("--macd-fast", type=int)
    p.add_argument("--macd-slow", type=int)
    p.add_argument("--macd-signal-period", type=int)
    p.add_argument("--shadow-body-ratio", type=float)
    p.add_argument("--upper-shadow-cap", type=float)
    p.add_argument("--trend-lookback", type=int)
    p.add_argument("--body-epsilon", type=float)
    p.add_argument("--horizon", type=int, help="forward-return horizon in candles (default 6)")
    p.add_argument("--min-signals", type=int)
    p.add_argument("--alpha", type=float, help="significance level for the verdict column")
    p.add_argument("--kinds", help="comma-separated signal kinds to evaluate")
    p.add_argument("--formats", help="comma-separated subset of json,csv,text")
    p.add_argument("--output-dir")
    p.add_argument("--label")
    p.add_argument("--market-tag", help="free-text market label, e.g. stable, volatile, saturated")
    p.add_argument("--timestamp", help="fixed generated_at value for reproducible reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="candlesig", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full signal and significance pipeline")
    _add_analyze_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("ingest", help="parse a price CSV and print canonical candles")
    p.add_argument("input")
    p.add_argument("--input-kind", choices=("raw", "ohlc"), default="raw")
    p.add_argument("--period", choices=[x.value for x in Period], default="month")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("wilcoxon", help="one-sided signed-rank test on a file of differences")
    p.add_argument("input")
    p.add_argument("--alternative", choices=(significance.GREATER, significance.LESS), default=significance.GREATER)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_wilcoxon)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CandlesigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
