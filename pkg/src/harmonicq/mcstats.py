"""Monte Carlo statistics of energy increments and convergence diagnostics.

``Q_t = X_t.L X_t - X_0.L X_0`` is sampled from the exact joint Gaussian
law of ``(X_0, X_t)``, so large lags cost the same as small ones and there
is no discretization error.  Sampling is organized in worker-indexed
substreams spawned from one master seed: a fixed ``(seed, workers)`` pair
reproduces the sample bit for bit regardless of chunking.

Diagnostics: one-sample Kolmogorov-Smirnov distance to a variance-gamma
law, tail-slope estimation (theory: ``-1/lambda_n``), rate-function scans
``(1/t) log P(Q_t in t*O)`` with Wilson-interval error bars, and
density-normalized histograms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .ou import LinearSDEModel, _observable_parts
from .vargamma import VarianceGammaLaw, make_vg

__all__ = [
    "EmpiricalSample",
    "LDPEstimate",
    "sample_qt",
    "ks_distance",
    "ks_critical_value",
    "ldp_scan",
    "tail_slope",
    "histogram",
    "wilson_interval",
]

#: Samples are generated in blocks of this size to bound memory.
_CHUNK = 262_144

#: Asymptotic Kolmogorov-Smirnov critical coefficients c(alpha)/sqrt(n).
_KS_COEFF = {0.10: 1.22, 0.05: 1.36, 0.01: 1.63}


@dataclass(frozen=True)
class EmpiricalSample:
    """Monte Carlo sample of ``Q_t`` with its reproducibility metadata."""

    values: np.ndarray
    t: float
    seed: int
    count: int
    workers: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.size != self.count:
            raise ValueError(
                f"count {self.count} does not match {values.size} values"
            )


@dataclass(frozen=True)
class LDPEstimate:
    """Empirical rate-function scan over a window ``O = (a, b)``.

    ``estimates[i] = log(P(Q_t in t*O)) / t`` at ``t = t_list[i]``;
    ``lower``/``upper`` are Wilson-interval bounds on the same quantity and
    ``theoretical`` the limit ``-inf_{theta in O} |theta| / lambda_n``.
    Entries with zero hits carry ``-inf`` estimates and are flagged: only
    the Wilson upper bound is informative there.
    """

    window: tuple
    t_list: np.ndarray
    hits: np.ndarray
    estimates: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    theoretical: float
    flagged: np.ndarray
    count: int


def _limit_law(model: LinearSDEModel, observable) -> VarianceGammaLaw:
    matrix, support = _observable_parts(observable, model.dim)
    idx = np.ix_(support, support)
    return make_vg(matrix[idx], model.m_stat[idx])


def sample_qt(
    model: LinearSDEModel,
    observable,
    t: float,
    count: int,
    seed,
    workers: int = 1,
) -> EmpiricalSample:
    """Draw ``count`` i.i.d. samples of ``Q_t``.

    The draws come from the exact joint law of ``(X_0, X_t)``; mean zero by
    stationarity.  ``seed`` may be an int or a ``SeedSequence``; ``workers``
    partitions the work into independent substreams.
    """
    count = int(count)
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    matrix, support = _observable_parts(observable, model.dim)
    l_sub = matrix[np.ix_(support, support)]
    master = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = master.spawn(workers)
    shares = [count // workers + (1 if w < count % workers else 0) for w in range(workers)]
    pieces = []
    for stream, share in zip(streams, shares):
        rng = np.random.default_rng(stream)
        done = 0
        while done < share:
            block = min(_CHUNK, share - done)
            x0, xt = model.sample_stationary_pair(t, rng, block)
            a0 = x0[:, support] @ l_sub
            at = xt[:, support] @ l_sub
            pieces.append(
                np.einsum("ij,ij->i", at, xt[:, support])
                - np.einsum("ij,ij->i", a0, x0[:, support])
            )
            done += block
    values = np.concatenate(pieces) if pieces else np.empty(0)
    seed_tag = master.entropy if np.ndim(master.entropy) == 0 else -1
    return EmpiricalSample(
        values=values, t=float(t), seed=int(seed_tag), count=count, workers=workers
    )


def ks_distance(sample: EmpiricalSample, law: VarianceGammaLaw) -> float:
    """One-sample Kolmogorov-Smirnov distance to a variance-gamma law."""
    values = np.sort(sample.values)
    n = values.size
    if n == 0:
        raise ValueError("sample is empty")
    cdf = law.cdf_batch(values)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    return float(max(upper, lower))


def ks_critical_value(count: int, level: float = 0.01) -> float:
    """Asymptotic KS critical value ``c(level) / sqrt(count)``."""
    try:
        coeff = _KS_COEFF[level]
    except KeyError:
        raise ValueError(f"level must be one of {sorted(_KS_COEFF)}, got {level}")
    return coeff / math.sqrt(count)


def wilson_interval(hits: int, count: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if count <= 0:
        raise ValueError("count must be positive")
    p = hits / count
    z2 = z * z
    denom = 1.0 + z2 / count
    center = (p + z2 / (2.0 * count)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / count + z2 / (4.0 * count * count))
    return max(center - half, 0.0), min(center + half, 1.0)


def ldp_scan(
    model: LinearSDEModel,
    observable,
    window,
    t_list,
    count: int,
    seed,
    workers: int = 1,
    z: float = 1.96,
) -> LDPEstimate:
    """Estimate ``(1/t) log P(Q_t in t*(a, b))`` along a time schedule.

    The theoretical limit is ``-d(0, (a, b)) / lambda_n`` with ``d`` the
    distance of the window to the origin (0 when the window contains 0).
    A fresh substream is used per time point; zero-hit entries are flagged
    and carry only their Wilson upper bound.
    """
    a, b = (float(window[0]), float(window[1]))
    if not (a < b):
        raise ValueError(f"window must satisfy a < b, got ({a}, {b})")
    times = np.asarray(t_list, dtype=float).ravel()
    if times.size == 0 or np.any(times <= 0.0) or np.any(np.diff(times) <= 0.0):
        raise ValueError("t_list must be positive and strictly increasing")
    law = _limit_law(model, observable)
    distance = max(a, -b, 0.0)
    theoretical = -distance / law.lambda_max
    master = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = master.spawn(times.size)
    hits = np.zeros(times.size, dtype=int)
    est = np.full(times.size, -np.inf)
    lo = np.full(times.size, -np.inf)
    hi = np.zeros(times.size)
    flagged = np.zeros(times.size, dtype=bool)
    for i, (t, stream) in enumerate(zip(times, streams)):
        sample = sample_qt(model, observable, t, count, stream, workers)
        inside = int(np.sum((sample.values > t * a) & (sample.values < t * b)))
        hits[i] = inside
        p_lo, p_hi = wilson_interval(inside, count, z)
        if inside > 0:
            est[i] = math.log(inside / count) / t
        else:
            flagged[i] = True
        lo[i] = math.log(p_lo) / t if p_lo > 0.0 else -np.inf
        hi[i] = math.log(p_hi) / t if p_hi > 0.0 else -np.inf
    if hits[-1] < 30:
        warnings.warn(
            f"only {hits[-1]} hits at the largest time t={times[-1]:g}; "
            "increase count for a usable estimate",
            RuntimeWarning,
            stacklevel=2,
        )
    return LDPEstimate(
        window=(a, b),
        t_list=times,
        hits=hits,
        estimates=est,
        lower=lo,
        upper=hi,
        theoretical=theoretical,
        flagged=flagged,
        count=count,
    )


def tail_slope(data, window) -> float:
    """Least-squares slope of the log tail over ``window = (a, b)``.

    ``data`` is either an :class:`EmpiricalSample` (the empirical
    log-survival function is fitted) or a ``(len, 2)`` array / ``(s, f)``
    pair of density values (the log-density is fitted).  The theoretical
    value for a variance-gamma tail is ``-1/lambda_n``.  At least 100
    points must fall inside the window.
    """
    a, b = (float(window[0]), float(window[1]))
    if not (0.0 <= a < b):
        raise ValueError(f"window must satisfy 0 <= a < b, got ({a}, {b})")
    if isinstance(data, EmpiricalSample):
        values = np.sort(data.values)
        n = values.size
        mask = (values >= a) & (values <= b)
        if int(np.sum(mask)) < 100:
            raise ValueError(
                f"only {int(np.sum(mask))} sample points in the tail window; need >= 100"
            )
        xs = values[mask]
        survival = (n - np.nonzero(mask)[0]) / n
        return float(np.polyfit(xs, np.log(survival), 1)[0])
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:
        s, f = arr[:, 0], arr[:, 1]
    elif arr.ndim == 2 and arr.shape[0] == 2:
        s, f = arr[0], arr[1]
    else:
        raise ValueError("grid data must be an (len, 2) array of (s, f) pairs")
    mask = (s >= a) & (s <= b) & (f > 0.0)
    if int(np.sum(mask)) < 100:
        raise ValueError(
            f"only {int(np.sum(mask))} grid points in the tail window; need >= 100"
        )
    return float(np.polyfit(s[mask], np.log(f[mask]), 1)[0])


def histogram(sample: EmpiricalSample, bins: int, range=None):
    """Density-normalized histogram; returns ``(centers, density)``."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    density, edges = np.histogram(sample.values, bins=bins, range=range, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, density
