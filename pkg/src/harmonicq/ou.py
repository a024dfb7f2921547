"""Linear SDE (Ornstein-Uhlenbeck) engine.

Models ``dZ = A Z dt + B dw`` with stable drift ``A``.  The stationary
covariance ``M`` solves ``A M + M A^T + B B^T = 0``; the lagged covariance
is ``Delta(t) = e^{tA} M``.  Sampling is exact everywhere (no
Euler-Maruyama): the joint law of ``(X_0, X_t)`` is Gaussian with block
covariance ``[[M, Delta^T], [Delta, M]]`` and path skeletons use the exact
one-step recursion ``Z_{k+1} = e^{hA} Z_k + xi_k`` with
``Cov(xi_k) = M - e^{hA} M e^{hA^T}``.

The finite-time law of the energy increment ``Q_t = X_t.L X_t - X_0.L X_0``
is carried by :class:`FiniteTimeQtLaw`: in normalized coordinates
``Q_t = Z.Ntilde Z`` with ``Ntilde = [[0, N], [N, 0]] / 2`` and ``Z``
Gaussian with covariance ``Mtilde_t = [[I - A(t), B(t)], [B(t)^T, I + A(t)]]``
built from ``A(t) = N^{-1/2} L^{1/2} (Delta + Delta^T) L^{1/2} N^{-1/2}``
and ``B(t) = N^{-1/2} L^{1/2} (Delta - Delta^T) L^{1/2} N^{-1/2}``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg

__all__ = [
    "LinearSDEModel",
    "LagCovariance",
    "FiniteTimeQtLaw",
    "build_model",
    "finite_time_qt_law",
]

#: Eigenvalues of conditional covariances may dip this far (relative)
#: below zero before the sampler refuses to proceed.
PSD_CLAMP_RTOL = 1e-12


def _psd_factor(c: np.ndarray, name: str = "covariance") -> np.ndarray:
    """Factor ``F`` with ``F F^T = c`` for symmetric PSD ``c``.

    Symmetric eigenfactorization with clamping of tiny negative eigenvalues;
    genuinely indefinite input raises a conditioning error.
    """
    c = 0.5 * (c + c.T)
    w, v = np.linalg.eigh(c)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if scale > 0.0 and w[0] < -PSD_CLAMP_RTOL * scale:
        raise ValueError(
            f"{name} is not PSD within tolerance: min eigenvalue {w[0]:.3e} "
            f"vs clamp {-PSD_CLAMP_RTOL * scale:.3e}"
        )
    return v * np.sqrt(np.clip(w, 0.0, None))


def _observable_parts(observable, dim: int):
    """Extract ``(matrix, support)`` from an observable-like object.

    Accepts anything with ``matrix``/``support`` attributes (e.g.
    :class:`harmonicq.networks.QuadraticObservable`) or a bare symmetric
    positive matrix, which is taken to be supported everywhere.
    """
    if hasattr(observable, "matrix") and hasattr(observable, "support"):
        matrix = np.asarray(observable.matrix, dtype=float)
        support = np.asarray(observable.support, dtype=int)
    else:
        matrix = linalg.require_symmetric(observable, "observable")
        support = np.arange(matrix.shape[0])
    if matrix.shape != (dim, dim):
        raise ValueError(
            f"observable has shape {matrix.shape}, expected {(dim, dim)}"
        )
    return matrix, support


@dataclass(frozen=True)
class LagCovariance:
    """Lagged covariance ``Delta(t) = e^{tA} M`` with ``Delta(0) = M``."""

    t: float
    delta: np.ndarray


@dataclass(frozen=True)
class FiniteTimeQtLaw:
    """Exact finite-time law of the quadratic increment ``Q_t``.

    ``mtilde`` tends to the identity as ``t`` grows, at which point the law
    coincides with the variance-gamma limit.
    """

    mtilde: np.ndarray
    ntilde: np.ndarray
    #: eigenvalues of ``mtilde^{1/2} ntilde mtilde^{1/2}``
    mu: np.ndarray = field(repr=False)

    def char_fn(self, alpha):
        """Characteristic function ``det(I - 2i a M~^1/2 N~ M~^1/2)^{-1/2}``.

        Evaluated as ``prod_j (1 - 2i alpha mu_j)^{-1/2}`` over the (real)
        eigenvalues ``mu_j``; each factor keeps a strictly positive real
        part, so the principal branch is continuous in ``alpha`` and matches
        the branch tracked from ``alpha = 0``.  Accepts scalars or arrays;
        ``|char_fn| <= 1`` everywhere and ``char_fn(0) = 1``.
        """
        a = np.asarray(alpha, dtype=float)
        factors = 1.0 - 2.0j * np.outer(a.ravel(), self.mu)
        out = np.exp(-0.5 * np.sum(np.log(factors), axis=1)).reshape(a.shape)
        return complex(out) if a.ndim == 0 else out


@dataclass(frozen=True)
class LinearSDEModel:
    """Stable linear SDE with certificates and stationary covariance.

    Attributes
    ----------
    a, b : ndarray
        Drift (n x n) and noise (n x m) matrices.
    m_stat : ndarray
        Stationary covariance, solving the Lyapunov equation.
    abscissa : float
        Spectral abscissa of ``a`` (certified < 0).
    controllable : bool
        Kalman rank certificate; when True ``m_stat`` is positive definite.
    krylov_rank : int
        Rank of the controllability matrix.
    """

    a: np.ndarray
    b: np.ndarray
    m_stat: np.ndarray
    abscissa: float
    controllable: bool
    krylov_rank: int

    @property
    def dim(self) -> int:
        return int(self.a.shape[0])

    @property
    def mixing_time(self) -> float:
        """Relaxation scale ``1/|abscissa|``."""
        return 1.0 / abs(self.abscissa)

    def lag_cov(self, t: float) -> LagCovariance:
        """Lagged covariance ``Delta(t) = e^{tA} M`` for ``t >= 0``."""
        t = float(t)
        if t < 0.0:
            raise ValueError(f"lag must be >= 0, got {t}")
        return LagCovariance(t=t, delta=linalg.expm(t * self.a) @ self.m_stat)

    def _require_positive_stationary(self):
        if not self.controllable:
            raise ValueError(
                "exact joint sampling requires a controllable pair "
                "(positive-definite stationary covariance)"
            )

    def sample_stationary_pair(self, t: float, rng: np.random.Generator, count: int):
        """Draw ``count`` exact joint samples of ``(X_0, X_t)`` at lag ``t``.

        ``X_0 ~ N(0, M)`` and ``X_t = Delta M^{-1} X_0 + N(0, M - Delta
        M^{-1} Delta^T)``.  Returns arrays ``x0, xt`` of shape (count, n).
        """
        self._require_positive_stationary()
        count = int(count)
        if count < 0:
            raise ValueError(f"count must be >= 0, got {count}")
        m = self.m_stat
        delta = self.lag_cov(t).delta
        gain = np.linalg.solve(m, delta.T).T
        cond = m - gain @ delta.T
        factor = _psd_factor(cond, "conditional covariance")
        m_factor = _psd_factor(m, "stationary covariance")
        x0 = rng.standard_normal((count, self.dim)) @ m_factor.T
        xt = x0 @ gain.T + rng.standard_normal((count, self.dim)) @ factor.T
        return x0, xt

    def sample_path(self, t_grid, rng: np.random.Generator) -> np.ndarray:
        """Exact stationary path skeleton on an ascending time grid.

        Returns an array of shape (len(t_grid), n); the first point is a
        stationary draw.
        """
        self._require_positive_stationary()
        grid = np.asarray(t_grid, dtype=float).ravel()
        if grid.size == 0:
            raise ValueError("time grid must be non-empty")
        if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
            raise ValueError("time grid must be strictly ascending")
        m = self.m_stat
        out = np.empty((grid.size, self.dim))
        out[0] = _psd_factor(m, "stationary covariance") @ rng.standard_normal(self.dim)
        step_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}
        for k in range(grid.size - 1):
            h = float(grid[k + 1] - grid[k])
            if h not in step_cache:
                propagator = linalg.expm(h * self.a)
                noise_cov = m - propagator @ m @ propagator.T
                step_cache[h] = (propagator, _psd_factor(noise_cov, "step covariance"))
            propagator, factor = step_cache[h]
            out[k + 1] = propagator @ out[k] + factor @ rng.standard_normal(self.dim)
        return out


def build_model(a, b) -> LinearSDEModel:
    """Certify and assemble a linear SDE model from drift and noise.

    Rejects unstable drifts.  An uncontrollable pair is accepted with a
    warning; its stationary covariance is only positive semidefinite.
    """
    a = linalg.as_square(a, "drift")
    b = linalg.as_matrix(b, "noise")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"incompatible shapes: drift {a.shape} vs noise {b.shape}")
    abscissa = linalg.spectral_abscissa(a)
    if abscissa >= 0.0:
        raise ValueError(
            f"drift is not stable: spectral abscissa {abscissa:.6e} >= 0"
        )
    controllable, rank = linalg.is_controllable(a, b)
    if not controllable:
        warnings.warn(
            f"pair (A, B) is not controllable (rank {rank} < {a.shape[0]}); "
            "the stationary covariance is only positive semidefinite",
            RuntimeWarning,
            stacklevel=2,
        )
    m_stat = linalg.solve_lyapunov(a, b @ b.T)
    if controllable:
        w = np.linalg.eigvalsh(m_stat)
        if w[0] <= 0.0:
            raise ValueError(
                f"controllable pair produced a non-PD stationary covariance "
                f"(min eigenvalue {w[0]:.3e}); the model is too stiff for "
                "double precision"
            )
    return LinearSDEModel(
        a=a,
        b=b,
        m_stat=m_stat,
        abscissa=abscissa,
        controllable=controllable,
        krylov_rank=rank,
    )


def finite_time_qt_law(model: LinearSDEModel, observable, t: float) -> FiniteTimeQtLaw:
    """Exact law of ``Q_t = X_t.L X_t - X_0.L X_0`` at lag ``t``.

    ``observable`` is a quadratic form, positive definite on its support.
    The normalized-block symmetry (``A(t)`` symmetric, ``B(t)``
    antisymmetric) is verified on assembly.
    """
    model._require_positive_stationary()
    matrix, support = _observable_parts(observable, model.dim)
    idx = np.ix_(support, support)
    l_sub = linalg.require_positive_definite(matrix[idx], "observable on support")
    m_sub = model.m_stat[idx]
    delta_sub = model.lag_cov(t).delta[idx]
    l_half = linalg.sym_sqrt(l_sub)
    n_matrix = 2.0 * (l_half @ m_sub @ l_half)
    w, v = linalg.sym_eigen(n_matrix)
    if w[0] <= 0.0:
        raise ValueError(
            f"normalization matrix is not PD: min eigenvalue {w[0]:.3e}"
        )
    n_inv_half = (v / np.sqrt(w)) @ v.T
    core = n_inv_half @ l_half
    sym_part = core @ (delta_sub + delta_sub.T) @ core.T
    skew_part = core @ (delta_sub - delta_sub.T) @ core.T
    scale = max(float(np.max(np.abs(sym_part))), float(np.max(np.abs(skew_part))), 1e-300)
    if float(np.max(np.abs(sym_part - sym_part.T))) > 1e-8 * scale:
        raise ValueError("block A(t) failed its symmetry check")
    if float(np.max(np.abs(skew_part + skew_part.T))) > 1e-8 * scale:
        raise ValueError("block B(t) failed its antisymmetry check")
    sym_part = 0.5 * (sym_part + sym_part.T)
    skew_part = 0.5 * (skew_part - skew_part.T)
    k = l_sub.shape[0]
    eye = np.eye(k)
    mtilde = np.block(
        [[eye - sym_part, skew_part], [skew_part.T, eye + sym_part]]
    )
    ntilde = 0.5 * np.block(
        [[np.zeros((k, k)), n_matrix], [n_matrix, np.zeros((k, k))]]
    )
    m_half = linalg.sym_sqrt(mtilde, "finite-time covariance")
    mu = np.linalg.eigvalsh(m_half @ ntilde @ m_half)
    return FiniteTimeQtLaw(mtilde=mtilde, ntilde=ntilde, mu=mu)
