"""Hot inner loops: posterior-price classification of sampled markets.

Each kernel has a numba version and a pure-numpy twin with identical
semantics. The numba path is used when numba imports and the environment
variable ``PRIVSEG_DISABLE_NUMBA`` is unset (or "0"). The benchmark in
``benchmarks/bench_kernels.py`` times both paths.
"""

import os

import numpy as np

TIE_RTOL = 1e-12

# tie policies understood by the kernels
TIE_LOWEST = 0
TIE_HIGHEST = 1
TIE_UNIFORM = 2

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is installed in CI
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return decorator


USE_NUMBA = _HAVE_NUMBA and os.environ.get("PRIVSEG_DISABLE_NUMBA", "0") in ("", "0")


# ---------------------------------------------------------------------------
# numpy reference path


def _scores_np(draws, values, beta):
    # draws: (n, K) nonnegative, rows need not be normalized
    K = values.shape[0]
    total = draws.sum(axis=1, keepdims=True)
    ccdf = np.cumsum(draws[:, ::-1], axis=1)[:, ::-1] / total
    prior = (K - np.arange(K)) / K
    return values * ((1.0 - beta) * ccdf + beta * prior)


def _tie_mask_np(scores):
    best = scores.max(axis=1, keepdims=True)
    tol = TIE_RTOL * np.maximum(1.0, np.abs(best))
    return scores >= best - tol


def region_moments_numpy(draws, values, beta):
    """Per-region (sum, sum of squares) of tie-split membership weights."""
    tied = _tie_mask_np(_scores_np(draws, values, beta))
    weights = tied / tied.sum(axis=1, keepdims=True)
    return weights.sum(axis=0), (weights * weights).sum(axis=0)


def choose_prices_numpy(draws, values, beta, policy, u):
    tied = _tie_mask_np(_scores_np(draws, values, beta))
    K = values.shape[0]
    if policy == TIE_LOWEST:
        return np.argmax(tied, axis=1)
    if policy == TIE_HIGHEST:
        return K - 1 - np.argmax(tied[:, ::-1], axis=1)
    counts = tied.sum(axis=1)
    pick = np.minimum((u * counts).astype(np.int64), counts - 1)
    # index of the (pick+1)-th True in each row
    rank = np.cumsum(tied, axis=1) - 1
    hit = tied & (rank == pick[:, None])
    return np.argmax(hit, axis=1)


# ---------------------------------------------------------------------------
# numba path


@njit(cache=True)
def _row_scores(row, values, beta, out):
    K = values.shape[0]
    total = 0.0
    for k in range(K):
        total += row[k]
    acc = 0.0
    for k in range(K - 1, -1, -1):
        acc += row[k]
        out[k] = values[k] * ((1.0 - beta) * (acc / total) + beta * (K - k) / K)


@njit(cache=True)
def _region_moments_nb(draws, values, beta):
    n, K = draws.shape
    sums = np.zeros(K)
    sumsq = np.zeros(K)
    scores = np.empty(K)
    for r in range(n):
        _row_scores(draws[r], values, beta, scores)
        best = scores.max()
        tol = TIE_RTOL * max(1.0, abs(best))
        m = 0
        for k in range(K):
            if scores[k] >= best - tol:
                m += 1
        w = 1.0 / m
        for k in range(K):
            if scores[k] >= best - tol:
                sums[k] += w
                sumsq[k] += w * w
    return sums, sumsq


@njit(cache=True)
def _choose_prices_nb(draws, values, beta, policy, u):
    n, K = draws.shape
    out = np.empty(n, dtype=np.int64)
    scores = np.empty(K)
    for r in range(n):
        _row_scores(draws[r], values, beta, scores)
        best = scores.max()
        tol = TIE_RTOL * max(1.0, abs(best))
        m = 0
        for k in range(K):
            if scores[k] >= best - tol:
                m += 1
        if policy == 0:
            target = 0
        elif policy == 1:
            target = m - 1
        else:
            target = min(int(u[r] * m), m - 1)
        seen = 0
        for k in range(K):
            if scores[k] >= best - tol:
                if seen == target:
                    out[r] = k
                    break
                seen += 1
    return out


# ---------------------------------------------------------------------------
# dispatch


def region_moments(draws, values, beta):
    draws = np.ascontiguousarray(draws, dtype=np.float64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if USE_NUMBA:
        return _region_moments_nb(draws, values, float(beta))
    return region_moments_numpy(draws, values, float(beta))


def choose_prices(draws, values, beta, policy, u=None):
    """Price index chosen for each observed row under a tie policy."""
    draws = np.ascontiguousarray(draws, dtype=np.float64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if u is None:
        u = np.zeros(draws.shape[0])
    u = np.ascontiguousarray(u, dtype=np.float64)
    if USE_NUMBA:
        return _choose_prices_nb(draws, values, float(beta), int(policy), u)
    return choose_prices_numpy(draws, values, float(beta), int(policy), u)
