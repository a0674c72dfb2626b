"""Trading signals from the trailing J months of returns.

A signal dated month ``t`` is the position held during ``t``; it is built
only from months ``t-J .. t-1``, so there is no gap between look-back and
holding windows.

* MOP: sign of the mean excess return over the window.
* HL: sign of the linearly decaying weighted average of raw returns,
  ``(J r_{t-1} + (J-1) r_{t-2} + ... + r_{t-J}) / J``.

``sign(0) == 0``: a flat window means holding the risk-free asset.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InsufficientHistory
from .market_data import (
    MonthStamp,
    ReturnSeries,
    RiskFreeSeries,
    _Monthly,
    _frozen_array,
    excess_returns,
)


class SignalMethod(enum.Enum):
    MOP = "mop"
    HL = "hl"

    @classmethod
    def parse(cls, text: str) -> "SignalMethod":
        return cls(str(text).strip().lower())

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=False)
class SignalSeries(_Monthly):
    asset: str
    method: SignalMethod
    lookback: int
    start: MonthStamp
    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.values, dtype=np.int8)
        if not np.isin(arr, (-1, 0, 1)).all():
            raise ValueError("signals must be -1, 0 or +1")
        object.__setattr__(self, "values", arr)

    def __eq__(self, other):
        if not isinstance(other, SignalSeries):
            return NotImplemented
        return (
            self.asset == other.asset
            and self.method is other.method
            and self.lookback == other.lookback
            and self.start == other.start
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _windows(x: np.ndarray, J: int) -> np.ndarray:
    # row i holds x[i .. i+J-1], oldest first; excludes the final month
    return sliding_window_view(x[:-1] if len(x) else x, J)


def _mop_score(windows: np.ndarray, J: int) -> np.ndarray:
    return windows.sum(axis=1) / J


def _hl_score(windows: np.ndarray, J: int) -> np.ndarray:
    weights = np.arange(1, J + 1, dtype=float)  # oldest gets 1, newest gets J
    return (windows * weights).sum(axis=1) / J


_SCORES = {SignalMethod.MOP: _mop_score, SignalMethod.HL: _hl_score}


def _window_before(series: ReturnSeries, J: int, t: MonthStamp) -> np.ndarray:
    if J < 1:
        raise ValueError(f"look-back must be >= 1, got {J}")
    lo = (t - J) - series.start
    hi = t - series.start
    if lo < 0 or hi > len(series):
        raise InsufficientHistory(f"{series.asset}: window {t - J}..{t - 1} not covered")
    return series.values[lo:hi][None, :]


def signal_mop(excess: ReturnSeries, J: int, t: MonthStamp) -> int:
    """MOP signal for month ``t`` from excess returns ``t-J .. t-1``."""
    return int(np.sign(_mop_score(_window_before(excess, J, t), J))[0])


def signal_hl(returns: ReturnSeries, J: int, t: MonthStamp) -> int:
    """HL signal for month ``t`` from raw returns ``t-J .. t-1``."""
    return int(np.sign(_hl_score(_window_before(returns, J, t), J))[0])


def signal_series(
    returns: ReturnSeries,
    rf: RiskFreeSeries | None,
    J: int,
    method: SignalMethod,
    hl_uses_excess: bool = False,
) -> SignalSeries:
    """Signals for every month from the (J+1)-th month of ``returns`` on.

    MOP reads excess returns, HL raw returns. ``hl_uses_excess`` feeds excess
    returns to HL as a sensitivity switch. ``rf=None`` means a zero rate.
    """
    if J < 1:
        raise ValueError(f"look-back must be >= 1, got {J}")
    if len(returns) <= J:
        raise InsufficientHistory(
            f"{returns.asset}: {len(returns)} months cannot support look-back {J}"
        )
    use_excess = method is SignalMethod.MOP or hl_uses_excess
    src = returns
    if use_excess and rf is not None:
        src = excess_returns(returns, rf)
    score = _SCORES[method](_windows(src.values, J), J)
    return SignalSeries(returns.asset, method, J, returns.start + J, np.sign(score))
