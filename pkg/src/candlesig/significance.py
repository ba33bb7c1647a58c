"""Forward returns after signals and one-sided Wilcoxon signed-rank tests on them."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from statistics import median
from typing import Iterable, Sequence

from .errors import SignificanceError
from .ingest import CandleSeries
from .signals import ALL_KINDS, Direction, Signal, SignalKind

EXACT_MAX_N = 25

GREATER = "greater"
LESS = "less"

TESTED = "tested"
INSUFFICIENT = "insufficient signals"
NO_NONZERO = "no nonzero returns"


@dataclass(frozen=True)
class WilcoxonResult:
    n: int
    w_plus: float
    p_value: float
    method: str  # "exact" or "normal-approximation"
    alternative: str

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "w_plus": self.w_plus,
            "p_value": self.p_value,
            "method": self.method,
            "alternative": self.alternative,
        }


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks of ``values`` with tied values sharing their mean rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + j + 2) / 2
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


@lru_cache(maxsize=None)
def signed_rank_counts(n: int) -> tuple[int, ...]:
    """Number of sign assignments of ranks 1..n giving each W+ value 0..n(n+1)/2.

    Built by the subset-sum recursion: adding rank r either leaves W+ alone
    or shifts it by r.
    """
    if n < 0:
        raise SignificanceError(f"n must be >= 0, got {n}")
    counts = [1]
    for r in range(1, n + 1):
        nxt = counts + [0] * r
        for s, c in enumerate(counts):
            nxt[s + r] += c
        counts = nxt
    return tuple(counts)


def exact_p_value(w_plus: int, n: int, alternative: str) -> float:
    """Exact tail probability of the null signed-rank distribution for tie-free data."""
    counts = signed_rank_counts(n)
    w = int(w_plus)
    if alternative == GREATER:
        tail = sum(counts[max(w, 0):])
    elif alternative == LESS:
        tail = sum(counts[: min(w, len(counts) - 1) + 1]) if w >= 0 else 0
    else:
        raise SignificanceError(f"alternative must be 'greater' or 'less', got {alternative!r}")
    return float(Fraction(tail, 2**n))


def normal_p_value(w_plus: float, n: int, tie_sizes: Iterable[int], alternative: str) -> float:
    """Normal approximation with tie-corrected variance and a 0.5 continuity correction."""
    mean = n * (n + 1) / 4
    var = n * (n + 1) * (2 * n + 1) / 24 - sum(t**3 - t for t in tie_sizes) / 48
    sd = math.sqrt(var)
    if alternative == GREATER:
        z = (w_plus - mean - 0.5) / sd
        p = 0.5 * math.erfc(z / math.sqrt(2))
    elif alternative == LESS:
        z = (w_plus - mean + 0.5) / sd
        p = 0.5 * math.erfc(-z / math.sqrt(2))
    else:
        raise SignificanceError(f"alternative must be 'greater' or 'less', got {alternative!r}")
    return min(1.0, max(0.0, p))


def wilcoxon_signed_rank(diffs: Sequence[float], alternative: str = GREATER) -> WilcoxonResult:
    """One-sample Wilcoxon signed-rank test of median(diffs) > 0 or < 0.

    Exact zeros are dropped. Tie-free samples of at most 25 use the exact
    null distribution; anything else falls back to the normal approximation.
    """
    if alternative not in (GREATER, LESS):
        raise SignificanceError(f"alternative must be 'greater' or 'less', got {alternative!r}")
    if not len(diffs):
        raise SignificanceError("wilcoxon needs at least one difference")
    for i, d in enumerate(diffs):
        if not math.isfinite(d):
            raise SignificanceError(f"non-finite difference {d!r}", index=i)
    nonzero = [float(d) for d in diffs if d != 0]
    if not nonzero:
        raise SignificanceError("no nonzero differences")
    n = len(nonzero)
    mags = [abs(d) for d in nonzero]
    ranks = average_ranks(mags)
    w_plus = sum(r for r, d in zip(ranks, nonzero) if d > 0)

    tie_sizes = _tie_sizes(mags)
    has_ties = any(t > 1 for t in tie_sizes)
    if n <= EXACT_MAX_N and not has_ties:
        p = exact_p_value(int(w_plus), n, alternative)
        method = "exact"
    else:
        p = normal_p_value(w_plus, n, tie_sizes, alternative)
        method = "normal-approximation"
    return WilcoxonResult(n, w_plus, p, method, alternative)


def _tie_sizes(values: Sequence[float]) -> list[int]:
    sizes: dict[float, int] = {}
    for v in values:
        sizes[v] = sizes.get(v, 0) + 1
    return sorted(sizes.values())


@dataclass(frozen=True)
class ForwardReturnSample:
    kind: SignalKind
    horizon: int
    returns: tuple[float, ...]
    indices: tuple[int, ...]
    skipped: int

    @property
    def total(self) -> int:
        return len(self.returns) + self.skipped


def forward_return(closes: Sequence[float], t: int, horizon: int) -> float:
    return (closes[t + horizon] - closes[t]) / closes[t]


def forward_returns(
    series: CandleSeries,
    signals: Iterable[Signal],
    horizon: int = 6,
    kinds: Iterable[SignalKind] | None = None,
) -> dict[SignalKind, ForwardReturnSample]:
    """Relative close-to-close change ``horizon`` candles after each signal, grouped by kind.

    Signals with fewer than ``horizon`` candles after them are counted as
    skipped. Every kind in ``kinds`` (default: all) gets a sample, possibly empty.
    """
    if horizon < 1:
        raise SignificanceError(f"horizon must be >= 1, got {horizon}")
    closes = series.closes
    wanted = tuple(ALL_KINDS if kinds is None else kinds)
    buckets: dict[SignalKind, tuple[list[float], list[int], list[int]]] = {k: ([], [], [0]) for k in wanted}
    for sig in signals:
        if not 0 <= sig.index < len(closes):
            raise SignificanceError(f"signal {sig.kind.value} outside the series", index=sig.index)
        if sig.kind not in buckets:
            continue
        rets, idx, skipped = buckets[sig.kind]
        if sig.index + horizon < len(closes):
            rets.append(forward_return(closes, sig.index, horizon))
            idx.append(sig.index)
        else:
            skipped[0] += 1
    return {
        k: ForwardReturnSample(k, horizon, tuple(r), tuple(i), s[0])
        for k, (r, i, s) in buckets.items()
    }


def alternative_for(kind: SignalKind) -> str:
    return GREATER if kind.direction is Direction.BULLISH else LESS


@dataclass(frozen=True)
class ReportRow:
    kind: SignalKind
    signals: int
    usable: int
    skipped: int
    horizon: int
    status: str
    result: WilcoxonResult | None = None
    median_return: float | None = None
    verdict: str | None = None

    @property
    def direction(self) -> Direction:
        return self.kind.direction

    @property
    def p_value(self) -> float | None:
        return None if self.result is None else self.result.p_value


@dataclass(frozen=True)
class SignificanceReport:
    label: str
    period: str
    horizon: int
    min_signals: int
    alpha: float
    rows: tuple[ReportRow, ...]
    config: dict = field(default_factory=dict)
    market_tag: str | None = None
    generated_at: str = ""

    def row(self, kind: SignalKind) -> ReportRow:
        for r in self.rows:
            if r.kind is kind:
                return r
        raise KeyError(kind)


def evaluate_signals(
    series: CandleSeries,
    signals: Iterable[Signal],
    horizon: int = 6,
    min_signals: int = 3,
    kinds: Iterable[SignalKind] | None = None,
    alpha: float = 0.05,
    config: dict | None = None,
    market_tag: str | None = None,
    generated_at: str | None = None,
) -> SignificanceReport:
    """Test every enabled signal kind's forward returns in its own direction.

    Bullish kinds test for a positive median forward return, bearish kinds
    for a negative one. Kinds with fewer than ``min_signals`` usable
    returns are reported without a p-value.
    """
    if min_signals < 3:
        raise SignificanceError(f"min_signals must be >= 3, got {min_signals}")
    if not 0 < alpha < 1:
        raise SignificanceError(f"alpha must lie in (0, 1), got {alpha}")
    wanted = sorted(set(ALL_KINDS if kinds is None else kinds), key=lambda k: k.value)
    samples = forward_returns(series, signals, horizon, wanted)
    rows = []
    for kind in wanted:
        s = samples[kind]
        common = dict(kind=kind, signals=s.total, usable=len(s.returns), skipped=s.skipped, horizon=horizon)
        if len(s.returns) < min_signals:
            rows.append(ReportRow(status=INSUFFICIENT, **common))
            continue
        med = median(s.returns)
        if not any(s.returns):
            rows.append(ReportRow(status=NO_NONZERO, median_return=med, **common))
            continue
        res = wilcoxon_signed_rank(s.returns, alternative_for(kind))
        verdict = "significant" if res.p_value < alpha else "not significant"
        rows.append(ReportRow(status=TESTED, result=res, median_return=med, verdict=verdict, **common))
    if generated_at is None:
        generated_at = dt.datetime.now(dt.timezone.utc).replace(microsecond=0).isoformat()
    return SignificanceReport(
        label=series.label,
        period=series.period.value,
        horizon=horizon,
        min_signals=min_signals,
        alpha=alpha,
        rows=tuple(rows),
        config=dict(config or {}),
        market_tag=market_tag,
        generated_at=generated_at,
    )


@dataclass(frozen=True)
class ForecastWindow:
    kind: SignalKind
    start: int
    end: int
    direction: Direction
    truncated: bool = False


def forecast_windows(series: CandleSeries, signals: Iterable[Signal], horizon: int = 6) -> list[ForecastWindow]:
    """One predicted-direction window [t, t+horizon] per signal, clipped at the last candle."""
    if horizon < 1:
        raise SignificanceError(f"horizon must be >= 1, got {horizon}")
    last = len(series) - 1
    out = []
    for sig in signals:
        end = sig.index + horizon
        out.append(ForecastWindow(sig.kind, sig.index, min(end, last), sig.direction, end > last))
    return out
