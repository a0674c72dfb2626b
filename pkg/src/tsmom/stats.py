"""Newey-West inference for the mean of a return stream, and plain OLS.

The HAC estimator uses Bartlett weights ``w_j = 1 - j / (L + 1)`` and
autocovariances normalized by ``1/T`` (not ``1/(T - j)``), which keeps the
estimate non-negative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientData, LagTooLarge, SingularDesign, ZeroVariance

CRIT_5 = 1.960
CRIT_1 = 2.576


@dataclass(frozen=True)
class LagPolicy:
    """Newey-West truncation lag: a fixed ``L`` or ``L = K - 1``."""

    fixed: int | None = None

    def __post_init__(self):
        if self.fixed is not None and self.fixed < 0:
            raise ValueError(f"fixed lag must be >= 0, got {self.fixed}")

    @classmethod
    def holding_linked(cls) -> "LagPolicy":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "LagPolicy":
        text = str(text).strip().lower()
        if text in ("auto", "holding", "k-1"):
            return cls.holding_linked()
        return cls(int(text))

    def lag_for(self, holding: int) -> int:
        return self.fixed if self.fixed is not None else holding - 1

    def __str__(self):
        return "K-1" if self.fixed is None else str(self.fixed)


class Significance(enum.Enum):
    NONE = ""
    SIG5 = "*"
    SIG1 = "**"


@dataclass(frozen=True)
class SignificanceRule:
    """Two-sided critical values; normal quantiles by default."""

    crit5: float = CRIT_5
    crit1: float = CRIT_1

    def __post_init__(self):
        if not 0 < self.crit5 <= self.crit1:
            raise ValueError("need 0 < crit5 <= crit1")

    def classify(self, t: float) -> Significance:
        if not np.isfinite(t):
            return Significance.NONE
        a = abs(t)
        if a >= self.crit1:
            return Significance.SIG1
        if a >= self.crit5:
            return Significance.SIG5
        return Significance.NONE


def nw_variance(stream: Sequence[float], lag: int) -> float:
    """Newey-West long-run variance of the sample mean of ``stream``."""
    x = np.asarray(stream, dtype=float)
    T = len(x)
    if T < 2:
        raise InsufficientData(f"need at least 2 observations, got {T}")
    if lag < 0:
        raise ValueError("lag must be non-negative")
    if lag >= T:
        raise LagTooLarge(f"lag {lag} must be below sample size {T}")
    if np.ptp(x) == 0.0:
        return 0.0  # the sample mean of a constant is not always exact
    d = x - x.mean()
    s = np.dot(d, d)
    for j in range(1, lag + 1):
        w = 1.0 - j / (lag + 1.0)
        s += 2.0 * w * np.dot(d[j:], d[:-j])
    return max(float(s / T) / T, 0.0)


def nw_tstat(stream: Sequence[float], lag: int) -> float:
    x = np.asarray(stream, dtype=float)
    var = nw_variance(x, lag)
    if var <= 0.0:
        raise ZeroVariance()
    return float(x.mean() / np.sqrt(var))


def annualize(mean_monthly: float) -> float:
    return 12.0 * mean_monthly


GROUP_REGRESSION_NAMES = ("alpha", "beta_J", "beta_K", "g_2", "g_3", "g_4", "g_5")


@dataclass(frozen=True)
class RegressionFit:
    coef: np.ndarray
    std_err: np.ndarray
    t_stats: np.ndarray
    r_squared: float
    sigma_eps_sq: float
    n_obs: int
    names: tuple[str, ...] = GROUP_REGRESSION_NAMES

    def __getitem__(self, name: str) -> float:
        return float(self.coef[self.names.index(name)])

    def t(self, name: str) -> float:
        return float(self.t_stats[self.names.index(name)])

    @property
    def alpha(self) -> float:
        return self["alpha"]

    @property
    def beta_J(self) -> float:
        return self["beta_J"]

    @property
    def beta_K(self) -> float:
        return self["beta_K"]

    @property
    def g(self) -> np.ndarray:
        return np.array([self[n] for n in ("g_2", "g_3", "g_4", "g_5")])


def ols_fit(design, response, names: Sequence[str] | None = None) -> RegressionFit:
    """Least squares with classical homoskedastic standard errors.

    Solved through a QR factorization of the design, which yields the normal
    equations' solution without forming ``X'X``. With ``n == p`` the fit is
    exact and standard errors are undefined (NaN).
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("design must be n x p and response length n")
    n, p = X.shape
    if n < p or n == 0:
        raise InsufficientData(f"{n} observations for {p} regressors")
    if np.linalg.matrix_rank(X) < p:
        raise SingularDesign("design matrix is rank deficient")
    if names is None:
        names = GROUP_REGRESSION_NAMES if p == len(GROUP_REGRESSION_NAMES) else tuple(f"x{i}" for i in range(p))

    Q, R = np.linalg.qr(X)
    coef = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ coef
    rss = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    if tss > 0:
        r2 = max(0.0, 1.0 - rss / tss)
    else:
        r2 = 1.0 if rss == 0 else 0.0

    if n > p:
        sigma2 = rss / (n - p)
        Rinv = np.linalg.solve(R, np.eye(p))
        cov = sigma2 * (Rinv @ Rinv.T)
        se = np.sqrt(np.diag(cov))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = coef / se
    else:
        sigma2 = float("nan")
        se = np.full(p, np.nan)
        t = np.full(p, np.nan)
    return RegressionFit(coef, se, t, r2, sigma2, n, tuple(names))
