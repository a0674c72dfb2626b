"""Independent reference implementations used as test oracles.

These are written in plain Python with the conventional time indexing
(a signal is dated by the last month in its window) so they share no code
or indexing convention with the engine.
"""

import math


def _sign(x):
    return int(x > 0) - int(x < 0)


def brute_signals(r, rf, J, method):
    """{s: signal formed at the end of month s}, 0-based month offsets."""
    out = {}
    for s in range(J - 1, len(r)):
        if method == "mop":
            total = 0.0
            for j in range(J):
                total += r[s - j] - rf[s - j]
            out[s] = _sign(total / J)
        else:
            total = 0.0
            for j in range(J):
                total += (J - j) * r[s - j]
            out[s] = _sign(total / J)
    return out


def brute_stream(r, rf, J, K, method):
    """[(t, return)] with return_t = mean(TS_{t-1..t-K}) * (r_t - rf_t)."""
    ts = brute_signals(r, rf, J, method)
    out = []
    for t in range(len(r)):
        lagged = [t - m for m in range(1, K + 1)]
        if all(s in ts for s in lagged):
            pos = sum(ts[s] for s in lagged) / K
            out.append((t, pos * (r[t] - rf[t])))
    return out


def classical_t(x):
    """mean / (population sd / sqrt(T))."""
    T = len(x)
    m = sum(x) / T
    var = sum((v - m) ** 2 for v in x) / T
    return m / math.sqrt(var / T)


def brute_nw_variance(x, L):
    T = len(x)
    m = sum(x) / T
    d = [v - m for v in x]
    total = 0.0
    for i in range(T):
        for j in range(T):
            lag = abs(i - j)
            if lag <= L:
                total += (1 - lag / (L + 1)) * d[i] * d[j]
    return total / T / T


def normal_equations(X, y):
    """Coefficients, classical t-stats and sigma^2 via Gauss-Jordan on X'X."""
    n, p = len(X), len(X[0])
    A = [[sum(X[k][i] * X[k][j] for k in range(n)) for j in range(p)] for i in range(p)]
    b = [sum(X[k][i] * y[k] for k in range(n)) for i in range(p)]
    # augment with identity to get the inverse as well
    M = [A[i] + [b[i]] + [1.0 if i == j else 0.0 for j in range(p)] for i in range(p)]
    for c in range(p):
        piv = max(range(c, p), key=lambda r: abs(M[r][c]))
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [v / pv for v in M[c]]
        for r in range(p):
            if r != c:
                f = M[r][c]
                M[r] = [a - f * bb for a, bb in zip(M[r], M[c])]
    coef = [M[i][p] for i in range(p)]
    inv = [M[i][p + 1 :] for i in range(p)]
    resid = [y[k] - sum(X[k][i] * coef[i] for i in range(p)) for k in range(n)]
    sigma2 = sum(e * e for e in resid) / (n - p)
    t = [coef[i] / math.sqrt(sigma2 * inv[i][i]) for i in range(p)]
    return coef, t, sigma2
