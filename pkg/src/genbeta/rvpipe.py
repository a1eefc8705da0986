"""Realized volatility from daily closing prices.

A window of ``n`` daily log returns gives ``RV = scale * sqrt(periods / n * sum r^2)``
with ``scale = 100`` (percent) and ``periods = 252`` (trading days per year) by
default. Windows slide with stride 1 unless configured otherwise, so the
sample count barely changes with ``n``.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError

log = logging.getLogger(__name__)

DEFAULT_WINDOWS = (1, 2, 3, 5, 7, 9, 13, 17, 21)


@dataclass(frozen=True)
class RvConfig:
    """Annualization and windowing knobs.

    Setting ``scale=1`` and ``periods=1`` turns RV into a plain root mean
    square of the returns in each window.
    """

    scale: float = 100.0
    periods: float = 252.0
    stride: int = 1

    def __post_init__(self):
        if not (self.scale > 0 and self.periods > 0):
            raise DomainError("scale and periods must be positive")
        if int(self.stride) != self.stride or self.stride < 1:
            raise DomainError(f"stride must be a positive integer, got {self.stride}")


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple
    closes: np.ndarray
    source_digest: str | None = None

    def __post_init__(self):
        closes = np.asarray(self.closes, dtype=float)
        object.__setattr__(self, "closes", closes)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != closes.size:
            raise DomainError("dates and closes differ in length")
        if np.any(~np.isfinite(closes)) or np.any(closes <= 0):
            raise DomainError("closing prices must be finite and positive")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if not cur > prev:
                raise DomainError(f"dates must increase strictly ({prev} then {cur})")

    def __len__(self):
        return self.closes.size


@dataclass
class RvDataset:
    """Positive RV observations for one window length.

    Windows whose returns are all zero produce RV = 0, which lies outside the
    support of every family; they are dropped and counted in ``zero_excluded``.
    """

    n: int
    values: np.ndarray
    zero_excluded: int = 0
    config: RvConfig = field(default_factory=RvConfig)

    @property
    def count(self) -> int:
        return int(self.values.size)


def read_csv(path) -> PriceSeries:
    """Read ``date,close`` rows (ISO-8601 date, header optional).

    Every row whose date or price does not parse is collected, and a single
    :class:`DomainError` lists their line numbers.
    """
    path = Path(path)
    raw = path.read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    dates, closes, bad = [], [], []
    reader = csv.reader(raw.decode("utf-8-sig").splitlines())
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            if len(row) != 2:
                raise ValueError
            day = _dt.date.fromisoformat(row[0].strip())
            price = float(row[1])
            if not math.isfinite(price):
                raise ValueError
        except ValueError:
            if lineno == 1 and not dates:
                continue  # header
            bad.append(lineno)
            continue
        dates.append(day)
        closes.append(price)
    if bad:
        shown = ", ".join(map(str, bad[:20])) + (" ..." if len(bad) > 20 else "")
        raise DomainError(f"{path}: unparseable rows at lines {shown}")
    return PriceSeries(dates, np.array(closes), source_digest=digest)


def log_returns(series) -> np.ndarray:
    """Daily log returns ``ln(S_i / S_(i-1))``."""
    closes = series.closes if isinstance(series, PriceSeries) else np.asarray(series, dtype=float)
    if closes.size < 2:
        raise DomainError("need at least two prices")
    if np.any(closes <= 0):
        raise DomainError("prices must be positive")
    # log of the ratio keeps exact invariance under power-of-two rescaling
    return np.log(closes[1:] / closes[:-1])


def realized_volatility(returns, n: int, config: RvConfig | None = None) -> RvDataset:
    """Annualized realized volatility over sliding windows of ``n`` returns.

    Parameters
    ----------
    returns : array_like
        Daily log returns.
    n : int
        Window length in trading days.
    config : RvConfig, optional
        Scale, annualization period and stride between window starts.
    """
    config = config or RvConfig()
    r = np.asarray(returns, dtype=float)
    if int(n) != n or n < 1:
        raise DomainError(f"window must be a positive integer, got {n}")
    if r.size < n:
        raise DomainError(f"window {n} is longer than the {r.size} returns")
    csum = np.concatenate([[0.0], np.cumsum(r * r)])
    starts = np.arange(0, r.size - n + 1, config.stride)
    sums = csum[starts + n] - csum[starts]
    # cumulative sums can leave tiny negative residue on all-zero windows
    sums = np.where(sums < 0, 0.0, sums)
    rv = config.scale * np.sqrt(config.periods / n * sums)
    zero = rv <= 0
    if np.any(zero):
        log.info("window %d: %d zero RV values excluded", n, int(zero.sum()))
    return RvDataset(n=int(n), values=rv[~zero], zero_excluded=int(zero.sum()), config=config)


def empirical_ccdf(dataset) -> tuple:
    """Sorted unique values and ``(count - rank)/count``, with the last point at ``1/count``.

    ``rank`` counts observations at or below the value, so a value of 2 in
    (1, 2, 3, 4) has ccdf 0.5. The largest value would then sit at 0; it is
    reported as ``1/count`` so log-log plots stay finite.
    """
    values = dataset.values if isinstance(dataset, RvDataset) else np.asarray(dataset, dtype=float)
    if values.size < 1:
        raise DomainError("empirical ccdf needs at least one value")
    x, counts = np.unique(values, return_counts=True)
    total = values.size
    ccdf = (total - np.cumsum(counts)) / total
    ccdf[-1] = 1.0 / total
    return x, ccdf


def build_all(series, n_list=DEFAULT_WINDOWS, config: RvConfig | None = None) -> list:
    """One :class:`RvDataset` per window length."""
    r = log_returns(series)
    out = []
    for n in n_list:
        ds = realized_volatility(r, n, config)
        log.info("window %d: %d values", n, ds.count)
        out.append(ds)
    return out


def export(dataset: RvDataset, prefix, source_digest: str | None = None) -> tuple:
    """Write ``<prefix>.txt`` (one value per line), ``<prefix>.json`` and ``<prefix>_ccdf.tsv``."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    txt = prefix.with_suffix(".txt")
    meta = prefix.with_suffix(".json")
    tsv = prefix.with_name(prefix.name + "_ccdf.tsv")
    np.savetxt(txt, dataset.values, fmt="%.17g")
    meta.write_text(json.dumps({"n": dataset.n, "count": dataset.count, "source_digest": source_digest},
                               sort_keys=True) + "\n")
    x, c = empirical_ccdf(dataset)
    tsv.write_text("x\tccdf\n" + "".join(f"{a:.17g}\t{b:.17g}\n" for a, b in zip(x, c)))
    return txt, meta, tsv
