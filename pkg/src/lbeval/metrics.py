"""RMSE, MAPE, the lower bound error, and their uncertainty-aware variants.

All sums run in ascending sample order with plain binary64 accumulation, so a
given window always produces the same bits.  Windows are inclusive:
``start..end``.

In LRMSE/LMAPE the prediction at each sample is inflated to
``yhat*(1 - delta)`` where it lies below the data and ``yhat*(1 + delta)``
where it lies above, ``delta`` being the lower bound error at that sample.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

METRICS = ("rmse", "mape", "lrmse", "lmape")


class UndefinedIndexError(ValueError):
    """The index has a zero denominator on the requested window."""


@dataclass(frozen=True)
class LbeSeries:
    delta: tuple[float, ...]

    def __len__(self):
        return len(self.delta)

    def __getitem__(self, k):
        return self.delta[k]

    def __iter__(self):
        return iter(self.delta)


def lbe(orbit_a: Sequence[float], orbit_b: Sequence[float]) -> LbeSeries:
    """Per-sample lower bound error ``|a_n - b_n| / 2``."""
    a, b = list(orbit_a), list(orbit_b)
    if len(a) != len(b):
        raise ValueError(f"orbit lengths differ: {len(a)} vs {len(b)}")
    return LbeSeries(tuple(abs(p - q) / 2 for p, q in zip(a, b)))


def _window(y, yhat, delta, start, end):
    y = list(y)
    yhat = list(yhat)
    if len(y) != len(yhat):
        raise ValueError(f"lengths differ: y has {len(y)}, yhat {len(yhat)}")
    if delta is not None:
        delta = list(delta)
        if len(delta) != len(y):
            raise ValueError(f"delta has {len(delta)} samples, orbits "
                             f"{len(y)}")
    if end is None:
        end = len(y) - 1
    if not 0 <= start <= end < len(y):
        raise ValueError(f"invalid window {start}..{end} for {len(y)} samples")
    return y, yhat, delta, start, end


def inflate(yk: float, yhatk: float, dk: float) -> float:
    """Prediction pushed away from the data by its lower bound error."""
    if yhatk > yk:
        return yhatk * (1.0 + dk)
    # below the data; at equality either branch gives |dk*yhatk|
    return yhatk * (1.0 - dk)


def _rmse(y, yhat, delta, start, end) -> float:
    m = end - start + 1
    total = 0.0
    for k in range(start, end + 1):
        total += y[k]
    mean = total / m
    num = 0.0
    den = 0.0
    for k in range(start, end + 1):
        pred = yhat[k] if delta is None else inflate(y[k], yhat[k], delta[k])
        r = y[k] - pred
        num += r * r
        c = y[k] - mean
        den += c * c
    if den == 0.0:
        raise UndefinedIndexError(
            f"data are constant over window {start}..{end}")
    return math.sqrt(num) / math.sqrt(den)


def _mape(y, yhat, delta, start, end) -> tuple[float, int]:
    total = 0.0
    used = 0
    for k in range(start, end + 1):
        if y[k] == 0.0:
            continue
        pred = yhat[k] if delta is None else inflate(y[k], yhat[k], delta[k])
        total += abs((pred - y[k]) / y[k])
        used += 1
    skipped = end - start + 1 - used
    if used == 0:
        raise UndefinedIndexError(
            f"every sample in window {start}..{end} has y = 0")
    return total / used, skipped


def rmse(y, yhat, end: int | None = None, start: int = 0) -> float:
    y, yhat, _, start, end = _window(y, yhat, None, start, end)
    return _rmse(y, yhat, None, start, end)


def lrmse(y, yhat, delta, end: int | None = None, start: int = 0) -> float:
    y, yhat, delta, start, end = _window(y, yhat, delta, start, end)
    return _rmse(y, yhat, delta, start, end)


def mape(y, yhat, end: int | None = None, start: int = 0) -> float:
    """Mean absolute relative error; samples with ``y == 0`` are skipped.

    See :func:`mape_skipped` for how many were dropped.
    """
    y, yhat, _, start, end = _window(y, yhat, None, start, end)
    return _mape(y, yhat, None, start, end)[0]


def lmape(y, yhat, delta, end: int | None = None, start: int = 0) -> float:
    y, yhat, delta, start, end = _window(y, yhat, delta, start, end)
    return _mape(y, yhat, delta, start, end)[0]


def mape_skipped(y, end: int | None = None, start: int = 0) -> int:
    y = list(y)
    end = len(y) - 1 if end is None else end
    return sum(1 for k in range(start, end + 1) if y[k] == 0.0)


def difference_metric(classical: float, modified: float) -> float:
    """Percent gap between two index values, normalised by the larger one."""
    scale = max(abs(classical), abs(modified))
    if scale == 0.0:
        return 0.0
    return abs(modified - classical) / scale * 100.0


@dataclass(frozen=True)
class IndexSeries:
    """Running index: ``values[n]`` covers window ``k_start..n``.

    ``values`` spans every sample ``0..N``; entries before ``k_start`` and
    entries where the index is undefined are ``None``.
    """
    name: str
    values: tuple[float | None, ...]
    k_start: int
    skipped_samples: int = 0

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def first_defined(self) -> int | None:
        for n, v in enumerate(self.values):
            if v is not None:
                return n
        return None

    def defined(self) -> dict[int, float]:
        return {n: v for n, v in enumerate(self.values) if v is not None}


def running_series(metric: str, y, yhat, delta=None,
                   k_start: int = 0) -> IndexSeries:
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    modified = metric.startswith("l")
    if modified and delta is None:
        raise ValueError(f"{metric} needs a delta series")
    y, yhat, delta, _, _ = _window(y, yhat, delta if modified else None,
                                   0, None)
    is_rmse = metric.endswith("rmse")
    values: list[float | None] = [None] * len(y)
    for n in range(k_start, len(y)):
        try:
            if is_rmse:
                values[n] = _rmse(y, yhat, delta, k_start, n)
            else:
                values[n] = _mape(y, yhat, delta, k_start, n)[0]
        except UndefinedIndexError:
            pass
    skipped = 0 if is_rmse or k_start >= len(y) else mape_skipped(y, None,
                                                                   k_start)
    return IndexSeries(metric.upper(), tuple(values), k_start, skipped)


def _diff_series(a: IndexSeries, b: IndexSeries) -> tuple:
    return tuple(None if p is None or q is None else difference_metric(p, q)
                 for p, q in zip(a.values, b.values))


@dataclass(frozen=True)
class ValidationReport:
    y: tuple[float, ...]
    yhat: tuple[float, ...]
    lbe: LbeSeries
    rmse: IndexSeries
    lrmse: IndexSeries
    mape: IndexSeries
    lmape: IndexSeries
    d_rmse_pct: tuple[float | None, ...]
    d_mape_pct: tuple[float | None, ...]
    k_start: int
    provenance: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.y) - 1

    def at(self, n: int) -> dict:
        return {
            "rmse": self.rmse[n], "lrmse": self.lrmse[n],
            "mape": self.mape[n], "lmape": self.lmape[n],
            "d_rmse_pct": self.d_rmse_pct[n],
            "d_mape_pct": self.d_mape_pct[n],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for n in range(len(self.y)):
            w.writerow([n] + [_cell(v) for v in (
                self.y[n], self.yhat[n], self.lbe[n], self.rmse[n],
                self.lrmse[n], self.mape[n], self.lmape[n],
                self.d_rmse_pct[n], self.d_mape_pct[n])])
        return buf.getvalue()

    def summary(self, checkpoints: Sequence[int] = ()) -> dict:
        out = {
            "provenance": dict(self.provenance),
            "N": self.N,
            "k_start": self.k_start,
            "final": self.at(self.N),
            "mape_skipped_samples": self.mape.skipped_samples,
            "lmape_skipped_samples": self.lmape.skipped_samples,
            "difference_metric": "|modified - classical| / "
                                 "max(|modified|, |classical|) * 100",
        }
        for n in checkpoints:
            if n <= self.N:
                out[f"at_{n}"] = self.at(n)
        return out


REPORT_COLUMNS = ["n", "y", "yhat", "delta", "rmse", "lrmse", "mape", "lmape",
                  "d_rmse_pct", "d_mape_pct"]


def _cell(v) -> str:
    return "" if v is None else repr(float(v))


def validation_report(y, yhat, delta: LbeSeries, k_start: int,
                      provenance: dict | None = None) -> ValidationReport:
    y, yhat = tuple(y), tuple(yhat)
    series = {m: running_series(m, y, yhat, delta, k_start) for m in METRICS}
    return ValidationReport(
        y=y, yhat=yhat, lbe=delta,
        rmse=series["rmse"], lrmse=series["lrmse"],
        mape=series["mape"], lmape=series["lmape"],
        d_rmse_pct=_diff_series(series["rmse"], series["lrmse"]),
        d_mape_pct=_diff_series(series["mape"], series["lmape"]),
        k_start=k_start, provenance=dict(provenance or {}))


def read_report_csv(text: str) -> dict[str, list[float | None]]:
    """Parse a report CSV back into columns; empty cells become ``None``."""
    rows = list(csv.reader(io.StringIO(text)))
    if rows[0] != REPORT_COLUMNS:
        raise ValueError("unexpected report header")
    cols: dict[str, list] = {c: [] for c in REPORT_COLUMNS}
    for row in rows[1:]:
        for c, cell in zip(REPORT_COLUMNS, row):
            if c == "n":
                cols[c].append(int(cell))
            else:
                cols[c].append(None if cell == "" else float(cell))
    return cols
