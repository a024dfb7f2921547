"""Variance-gamma laws of quadratic Gaussian increments.

The variance-gamma law of a pair ``(L, M)`` of positive symmetric matrices
is the distribution of ``Q = X.L X - Y.L Y`` for independent centered
Gaussian vectors ``X, Y`` with covariance ``M``.  It is fully parameterized
by the ascending eigenvalues ``lambda_1 <= ... <= lambda_n`` of
``N = 2 L^{1/2} M L^{1/2}``: in eigencoordinates ``Q = sum_j lambda_j U_j V_j``
with ``U, V`` independent standard normal vectors, so the characteristic
function is the product ``prod_j (1 + alpha^2 lambda_j^2)^{-1/2}``.

The density is evaluated by the cheapest exact route available:

* ``n = 1``: ``K_0(|s|/lambda) / (pi lambda)`` (diverges logarithmically
  at ``s = 0``),
* isotropic spectra (all ``lambda_j`` equal): the closed Bessel form
  ``|S^{n-1}| K_{(n-1)/2}(|s|/lambda) |s|^{(n-1)/2} / (2 pi lambda)^{(n+1)/2}``,
* ``n = 2``: the single angular integral
  ``(theta/2pi) int_0^pi sqrt((1-eps^2)/(1+eps*cos(phi)))
  exp(-theta |s| sqrt(1+eps*cos(phi))) dphi``,
* general ``n >= 3``: cosine-transform inversion of the product
  characteristic function on a cached uniform grid whose Nyquist span
  covers ``+-60 lambda_n``, with an analytic closure of the truncated
  high-frequency tail.  This route is accurate to about 1e-11 of the peak
  value in absolute terms; the closed-form routes above retain full
  relative accuracy arbitrarily far into the tails.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import linalg
from .bessel import UnderflowWarning, bessel_k

__all__ = [
    "TwoDimVGParams",
    "VarianceGammaLaw",
    "make_vg",
]

#: Relative spread below which a spectrum is treated as isotropic.
ISOTROPY_RTOL = 1e-12

#: Relative tolerance of the adaptive angular quadrature (n = 2 routes).
_QUAD_RTOL = 1e-11

#: Half-width of the cached CDF grid, in units of lambda_n.
_CDF_SPAN = 45.0


def _sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class TwoDimVGParams:
    """Anisotropy/scale parameters of a two-eigenvalue law.

    ``epsilon = (l2^2 - l1^2) / (l2^2 + l1^2)`` in [0, 1) and
    ``theta = sqrt((l1^-2 + l2^-2) / 2)``.
    """

    epsilon: float
    theta: float


class VarianceGammaLaw:
    """Symmetric variance-gamma law with eigenvalue spectrum ``lambdas``.

    Parameters
    ----------
    lambdas : array_like
        Positive eigenvalues of ``N = 2 L^{1/2} M L^{1/2}``; stored sorted
        ascending.

    Notes
    -----
    Instances are immutable; evaluation grids are cached lazily but
    idempotently, so concurrent use is safe.
    """

    def __init__(self, lambdas):
        arr = np.sort(np.asarray(lambdas, dtype=float).ravel())
        if arr.size == 0:
            raise ValueError("need at least one eigenvalue")
        if not np.all(np.isfinite(arr)) or arr[0] <= 0.0:
            raise ValueError(f"eigenvalues must be finite and > 0, got {arr}")
        arr.setflags(write=False)
        self.lambdas = arr
        self._inversion_cache = None
        self._cdf_cache = None

    # -- basic descriptors -------------------------------------------------

    @property
    def n(self) -> int:
        return int(self.lambdas.size)

    @property
    def lambda_max(self) -> float:
        return float(self.lambdas[-1])

    @property
    def is_isotropic(self) -> bool:
        lo, hi = float(self.lambdas[0]), float(self.lambdas[-1])
        return (hi - lo) <= ISOTROPY_RTOL * hi

    def two_dim_params(self) -> TwoDimVGParams:
        if self.n != 2:
            raise ValueError(f"two_dim_params requires n = 2, got n = {self.n}")
        l1, l2 = self.lambdas
        eps = (l2 * l2 - l1 * l1) / (l2 * l2 + l1 * l1)
        theta = math.sqrt(0.5 * (l1 ** -2 + l2 ** -2))
        return TwoDimVGParams(epsilon=eps, theta=theta)

    def __repr__(self) -> str:
        return f"VarianceGammaLaw(lambdas={np.array2string(self.lambdas, precision=6)})"

    # -- characteristic function and rate function -------------------------

    def char_fn(self, alpha):
        """Characteristic function ``prod_j (1 + alpha^2 lambda_j^2)^{-1/2}``.

        Real, even, equal to 1 at ``alpha = 0``.  Accepts scalars or arrays.
        """
        a = np.asarray(alpha, dtype=float)
        log_terms = np.log1p(np.square(np.outer(a.ravel(), self.lambdas)))
        out = np.exp(-0.5 * np.sum(log_terms, axis=1)).reshape(a.shape)
        return float(out) if a.ndim == 0 else out

    def ldp_rate(self, theta) -> float:
        """Large-deviation rate ``|theta| / lambda_n`` of ``Q_t / t``."""
        return abs(float(theta)) / self.lambda_max

    # -- density -----------------------------------------------------------

    def density(self, s):
        """Probability density at ``s`` (scalar or array).

        Even, strictly positive away from 0, monotone decreasing in ``|s|``.
        For ``n = 1`` the density diverges logarithmically at 0 and the call
        is rejected there.
        """
        s_arr = np.asarray(s, dtype=float)
        scalar = s_arr.ndim == 0
        x = np.abs(np.atleast_1d(s_arr).astype(float))
        if not np.all(np.isfinite(x)):
            raise ValueError("density arguments must be finite")
        if self.n == 1:
            out = self._density_one(x)
        elif self.is_isotropic:
            out = self._density_isotropic(x)
        elif self.n == 2:
            out = self._density_two(x)
        else:
            out = self._density_inversion(x)
        return float(out[0]) if scalar else out.reshape(s_arr.shape)

    def _density_one(self, x: np.ndarray) -> np.ndarray:
        lam = float(self.lambdas[0])
        if np.any(x == 0.0):
            raise ValueError("n = 1 variance-gamma density diverges at s = 0")
        out = np.empty_like(x)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnderflowWarning)
            for i, xi in enumerate(x):
                out[i] = bessel_k(0.0, xi / lam) / (math.pi * lam)
        return out

    def _peak_isotropic(self) -> float:
        # f(0) = Gamma((n-1)/2) / (4 pi^{(n+1)/2}) * |S^{n-1}| / lambda
        n = self.n
        lam = float(self.lambdas[-1])
        return (
            math.gamma((n - 1) / 2.0)
            * _sphere_area(n)
            / (4.0 * math.pi ** ((n + 1) / 2.0) * lam)
        )

    def _density_isotropic(self, x: np.ndarray) -> np.ndarray:
        n = self.n
        lam = float(self.lambdas[-1])
        nu = (n - 1) / 2.0
        pref = _sphere_area(n) / (2.0 * math.pi * lam) ** ((n + 1) / 2.0)
        out = np.empty_like(x)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnderflowWarning)
            for i, xi in enumerate(x):
                if xi == 0.0:
                    out[i] = self._peak_isotropic()
                elif xi / lam > 700.0:
                    out[i] = 0.0
                else:
                    out[i] = pref * bessel_k(nu, xi / lam) * xi ** nu
        return out

    def _density_two(self, x: np.ndarray) -> np.ndarray:
        p = self.two_dim_params()
        pref = p.theta / (2.0 * math.pi) * math.sqrt(1.0 - p.epsilon ** 2)
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            def integrand(phi, _x=xi):
                root = math.sqrt(1.0 + p.epsilon * math.cos(phi))
                return math.exp(-p.theta * _x * root) / root

            val, _ = integrate.quad(
                integrand, 0.0, math.pi, epsabs=0.0, epsrel=_QUAD_RTOL, limit=200
            )
            out[i] = pref * val
        return out

    # -- cosine-transform inversion (general n >= 3) ------------------------

    def _inversion_grid(self):
        if self._inversion_cache is not None:
            return self._inversion_cache
        lam = self.lambdas
        n = self.n
        lam_n = float(lam[-1])
        dalpha = math.pi / (60.0 * lam_n)
        coeff = float(np.prod(1.0 / lam))
        s2 = float(np.sum(lam ** -2.0))
        lam_gm = float(np.exp(np.mean(np.log(lam))))
        eps_abs = 1e-13 * 0.1 / lam_gm
        # Truncation point: the residual after the analytic tail closure is
        # bounded by coeff * s2 * A^-(n+1) / (2 (n+1) pi).
        cutoff = (coeff * s2 / (2.0 * (n + 1) * math.pi * eps_abs)) ** (1.0 / (n + 1))
        cutoff = max(cutoff, 30.0 / float(lam[0]))
        count = int(math.ceil(cutoff / dalpha))
        count = min(count, 4_000_000)
        cutoff = count * dalpha
        alphas = dalpha * np.arange(count + 1)
        log_terms = np.log1p(np.square(np.outer(alphas, lam)))
        chi = np.exp(-0.5 * np.sum(log_terms, axis=1))
        weights = np.full(alphas.size, dalpha)
        weights[0] = weights[-1] = 0.5 * dalpha
        cache = (alphas, chi * weights, cutoff, coeff)
        self._inversion_cache = cache
        return cache

    def _tail_cosine_integral(self, x: np.ndarray, cutoff: float) -> np.ndarray:
        """``int_A^inf cos(alpha x) alpha^-n dalpha`` for every x >= 0.

        Two complementary evaluations: an upward Si/Ci recursion for small
        ``x*A`` (stable there, but its roundoff grows like ``(xA)^{n-1}``)
        and, past ``x*A ~ 12n``, integration by parts against the
        oscillation, whose terms decrease like ``m(m+1)/(xA)^2``.
        """
        n = self.n
        out = np.empty_like(x)
        zero = x == 0.0
        out[zero] = cutoff ** (1 - n) / (n - 1)
        crossover = 12.0 * max(n, 1)
        small = (~zero) & (x * cutoff < crossover)
        large = (~zero) & (x * cutoff >= crossover)
        if np.any(small):
            xp = x[small]
            ax = cutoff * xp
            si, ci = special.sici(ax)
            cos_m = -ci
            sin_m = 0.5 * math.pi - si
            for m in range(2, n + 1):
                edge = cutoff ** (1 - m) / (m - 1)
                cos_next = np.cos(ax) * edge - xp * sin_m / (m - 1)
                sin_next = np.sin(ax) * edge + xp * cos_m / (m - 1)
                cos_m, sin_m = cos_next, sin_next
            out[small] = cos_m
        if np.any(large):
            xp = x[large]
            ax = cutoff * xp
            sin_ax, cos_ax = np.sin(ax), np.cos(ax)
            coeff = np.ones_like(xp)
            total = np.zeros_like(xp)
            m = n
            for _ in range(12):
                total += coeff * (-sin_ax) * cutoff ** (-m) / xp
                coeff = coeff * m / xp
                total += coeff * cos_ax * cutoff ** (-(m + 1)) / xp
                coeff = coeff * (-(m + 1.0)) / xp
                m += 2
                if np.all(np.abs(coeff) * cutoff ** (-m) < 1e-18 * np.abs(total) + 1e-300):
                    break
            out[large] = total
        return out

    def _density_inversion(self, x: np.ndarray) -> np.ndarray:
        alphas, weighted_chi, cutoff, coeff = self._inversion_grid()
        out = np.empty_like(x)
        chunk = max(1, int(4e6 // max(alphas.size, 1)))
        for start in range(0, x.size, chunk):
            block = x[start : start + chunk]
            out[start : start + chunk] = np.cos(np.outer(block, alphas)) @ weighted_chi
        out += coeff * self._tail_cosine_integral(x, cutoff)
        return np.maximum(out / math.pi, 0.0)

    # -- profiles ------------------------------------------------------------

    def density_profile(self, s_grid) -> np.ndarray:
        """Density on an ascending grid; returns an ``(len, 2)`` array of
        ``(s, f)`` pairs."""
        grid = np.asarray(s_grid, dtype=float).ravel()
        if grid.size == 0:
            raise ValueError("grid must be non-empty")
        if not np.all(np.isfinite(grid)):
            raise ValueError("grid must be finite")
        if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
            raise ValueError("grid must be strictly ascending")
        return np.column_stack([grid, self.density(grid)])

    # -- cumulative distribution ---------------------------------------------

    def cdf(self, s) -> float:
        """Cumulative distribution at scalar ``s``.

        Monotone with ``cdf(0) = 1/2`` and ``cdf(-s) = 1 - cdf(s)``.  Exact
        single-integral survival forms are used for ``n <= 2``; for
        ``n >= 3`` a dense cached cumulative grid with an exponential tail
        closure of slope ``1/lambda_n`` is interpolated.
        """
        val = float(s)
        if not math.isfinite(val):
            if math.isinf(val):
                return 1.0 if val > 0 else 0.0
            raise ValueError("cdf argument must not be NaN")
        sur = self._survival(abs(val))
        return 1.0 - sur if val >= 0.0 else sur

    def cdf_batch(self, values) -> np.ndarray:
        """Vectorized CDF for large batches (empirical-distribution work).

        Accuracy is about 1e-7 for ``n <= 2`` and 1e-5 for ``n >= 3``, which
        is far below any Kolmogorov-Smirnov resolution of interest.
        """
        v = np.asarray(values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        sur = self._survival_batch(np.abs(v))
        return np.where(v >= 0.0, 1.0 - sur, sur)

    def _survival(self, x: float) -> float:
        """P(Q > x) for x >= 0 (== P(Q < -x) by symmetry)."""
        if x == 0.0:
            return 0.5
        if self.n == 2 and self.is_isotropic:
            return 0.5 * math.exp(-x / self.lambda_max)
        if self.n == 2:
            p = self.two_dim_params()
            pref = math.sqrt(1.0 - p.epsilon ** 2) / (2.0 * math.pi)

            def integrand(phi):
                u = 1.0 + p.epsilon * math.cos(phi)
                return math.exp(-p.theta * x * math.sqrt(u)) / u

            val, _ = integrate.quad(
                integrand, 0.0, math.pi, epsabs=0.0, epsrel=_QUAD_RTOL, limit=200
            )
            return pref * val
        if self.n == 1:
            lam = self.lambda_max
            span = _CDF_SPAN * lam
            if x >= span:
                # exponential closure anchored at x itself
                if x / lam > 700.0:
                    return 0.0
                return self._density_one(np.array([x]))[0] * lam
            val, _ = integrate.quad(
                lambda u: self._density_one(np.array([u]))[0], x, span, limit=400
            )
            closure = self._density_one(np.array([span]))[0] * lam
            return val + closure
        grid, cum = self._cdf_grid()
        return float(self._survival_from_grid(np.array([x]), grid, cum)[0])

    def _survival_batch(self, x: np.ndarray) -> np.ndarray:
        if self.n == 2 and self.is_isotropic:
            return 0.5 * np.exp(-x / self.lambda_max)
        if self.n == 2:
            return self._survival_two_batch(x)
        grid, cum = self._cdf_grid()
        return self._survival_from_grid(x, grid, cum)

    def _survival_two_batch(self, x: np.ndarray) -> np.ndarray:
        # Fixed-order Gauss-Legendre in the angle; the integrand peaks at the
        # endpoint phi = pi where the nodes cluster, so 192 nodes give ~1e-9.
        p = self.two_dim_params()
        nodes, wts = np.polynomial.legendre.leggauss(192)
        phi = 0.5 * math.pi * (nodes + 1.0)
        w = 0.5 * math.pi * wts
        u = 1.0 + p.epsilon * np.cos(phi)
        pref = math.sqrt(1.0 - p.epsilon ** 2) / (2.0 * math.pi)
        chunk = 65536
        out = np.empty_like(x)
        for start in range(0, x.size, chunk):
            block = x[start : start + chunk]
            expo = np.exp(-p.theta * np.outer(block, np.sqrt(u)))
            out[start : start + chunk] = pref * (expo @ (w / u))
        return out

    def _cdf_grid(self):
        if self._cdf_cache is not None:
            return self._cdf_cache
        lam_n = self.lambda_max
        span = _CDF_SPAN * lam_n
        # Graded grid, denser near the origin where the density has a cusp.
        base = np.linspace(0.0, 1.0, 6001)
        grid = span * base ** 2
        dens = self.density(grid) if self.n != 1 else self._grid_density_one(grid)
        cum = integrate.cumulative_trapezoid(dens, grid, initial=0.0)
        self._cdf_cache = (grid, cum)
        return self._cdf_cache

    def _grid_density_one(self, grid: np.ndarray) -> np.ndarray:
        vals = np.empty_like(grid)
        vals[1:] = self._density_one(grid[1:])
        vals[0] = vals[1]
        return vals

    def _survival_from_grid(self, x: np.ndarray, grid, cum) -> np.ndarray:
        lam_n = self.lambda_max
        span = grid[-1]
        half = cum[-1]
        inside = np.interp(np.minimum(x, span), grid, cum)
        sur = np.maximum(0.5 - inside, 0.0)
        beyond = x > span
        if np.any(beyond):
            residual = max(0.5 - half, 0.0)
            sur[beyond] = residual * np.exp(-(x[beyond] - span) / lam_n)
        return sur

    # -- sampling ------------------------------------------------------------

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw ``count`` i.i.d. variates ``sum_j lambda_j U_j V_j``.

        ``rng`` is a caller-owned seeded generator; use independent streams
        per thread.
        """
        count = int(count)
        if count < 0:
            raise ValueError(f"count must be >= 0, got {count}")
        if count == 0:
            return np.empty(0)
        u = rng.standard_normal((count, self.n))
        v = rng.standard_normal((count, self.n))
        return (u * v) @ self.lambdas


def make_vg(l, m) -> VarianceGammaLaw:
    """Variance-gamma law of the pair ``(L, M)``.

    Parameters
    ----------
    l, m : array_like
        Symmetric positive-definite matrices of equal dimension.

    Returns
    -------
    VarianceGammaLaw
        Law with the ascending eigenvalues of ``2 L^{1/2} M L^{1/2}``.
    """
    l = linalg.require_positive_definite(l, "observable matrix")
    m = linalg.require_positive_definite(m, "covariance")
    if l.shape != m.shape:
        raise ValueError(f"dimension mismatch: {l.shape} vs {m.shape}")
    l_half = linalg.sym_sqrt(l)
    n_matrix = 2.0 * (l_half @ m @ l_half)
    w, _ = linalg.sym_eigen(n_matrix)
    if w[0] <= 0.0:
        raise ValueError(
            f"spectrum of 2 L^1/2 M L^1/2 is not positive: min eigenvalue {w[0]:.3e}"
        )
    return VarianceGammaLaw(w)
