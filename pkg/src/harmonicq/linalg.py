"""Dense linear algebra kernels shared by the rest of the package.

Everything here operates on small dense real matrices (dimensions up to a
few dozen): symmetric eigendecompositions, symmetric square roots, matrix
exponentials, continuous Lyapunov equations and the stability /
controllability certificates of linear SDE models.  All functions are pure
and treat their inputs as immutable, so they are safe to call concurrently.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "as_matrix",
    "as_square",
    "require_symmetric",
    "require_positive_definite",
    "sym_eigen",
    "sym_sqrt",
    "expm",
    "solve_lyapunov",
    "spectral_abscissa",
    "controllability_matrix",
    "is_controllable",
]

#: Relative tolerance used to accept a matrix as symmetric.
SYMMETRY_RTOL = 1e-12

#: Relative residual accepted from the Lyapunov solver.
LYAPUNOV_RTOL = 1e-10

#: Relative rank tolerance of the controllability test.
RANK_RTOL = 1e-10


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-d float array with finite entries."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_square(a, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr


def require_symmetric(m, name: str = "matrix", rtol: float = SYMMETRY_RTOL) -> np.ndarray:
    """Validate symmetry of ``m`` and return the symmetrized copy.

    The asymmetry ``max|m - m.T|`` must not exceed ``rtol`` times the largest
    entry magnitude.
    """
    arr = as_square(m, name)
    scale = float(np.max(np.abs(arr)))
    skew = float(np.max(np.abs(arr - arr.T)))
    if scale > 0.0 and skew > rtol * scale:
        raise ValueError(
            f"{name} is not symmetric: max asymmetry {skew:.3e} exceeds "
            f"{rtol:.1e} * max|entry| = {rtol * scale:.3e}"
        )
    return 0.5 * (arr + arr.T)


def require_positive_definite(m, name: str = "matrix") -> np.ndarray:
    """Validate that ``m`` is symmetric positive definite."""
    arr = require_symmetric(m, name)
    w = np.linalg.eigvalsh(arr)
    if w[0] <= 0.0:
        raise ValueError(
            f"{name} is not positive definite: smallest eigenvalue {w[0]:.3e}"
        )
    return arr


def sym_eigen(m, name: str = "matrix"):
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    m : array_like
        Symmetric matrix.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order.
    v : ndarray
        Orthogonal matrix of eigenvectors (columns), ``m = v @ diag(w) @ v.T``.
    """
    arr = require_symmetric(m, name)
    w, v = np.linalg.eigh(arr)
    return w, v


def sym_sqrt(m, name: str = "matrix") -> np.ndarray:
    """Symmetric PSD square root of a symmetric PSD matrix.

    Eigenvalues below ``-1e-10 * max|eig|`` are rejected; small negative
    eigenvalues caused by roundoff are clamped to zero.
    """
    w, v = sym_eigen(m, name)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if scale > 0.0 and w[0] < -1e-10 * scale:
        raise ValueError(
            f"{name} is not positive semidefinite: eigenvalue {w[0]:.3e} "
            f"below tolerance {-1e-10 * scale:.3e}"
        )
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def expm(a) -> np.ndarray:
    """Matrix exponential of a square matrix (scaling-and-squaring Pade)."""
    return scipy.linalg.expm(as_square(a, "matrix"))


def spectral_abscissa(a) -> float:
    """Largest real part over the eigenvalues of a square matrix."""
    arr = as_square(a, "matrix")
    return float(np.max(np.real(np.linalg.eigvals(arr))))


def solve_lyapunov(a, q, rtol: float = LYAPUNOV_RTOL) -> np.ndarray:
    """Solve ``a @ m + m @ a.T + q = 0`` for symmetric PSD ``m``.

    ``a`` must be stable (spectral abscissa < 0) and ``q`` symmetric PSD.
    The equation is vectorized to the ``kron(I, a) + kron(a, I)`` linear
    system and solved by partial-pivoting elimination, which is exact at the
    problem sizes used here.

    Raises
    ------
    ValueError
        If ``a`` is not stable, or the residual exceeds
        ``rtol * max|q|``.
    """
    a = as_square(a, "drift")
    q = require_symmetric(q, "forcing")
    if a.shape != q.shape:
        raise ValueError(f"shape mismatch: drift {a.shape} vs forcing {q.shape}")
    alpha = spectral_abscissa(a)
    if alpha >= 0.0:
        raise ValueError(f"drift is not stable: spectral abscissa {alpha:.6e} >= 0")
    n = a.shape[0]
    eye = np.eye(n)
    system = np.kron(eye, a) + np.kron(a, eye)
    m_vec = np.linalg.solve(system, -q.flatten(order="F"))
    m = m_vec.reshape((n, n), order="F")
    m = 0.5 * (m + m.T)
    scale = float(np.max(np.abs(q)))
    residual = float(np.max(np.abs(a @ m + m @ a.T + q)))
    if residual > rtol * scale + np.finfo(float).tiny:
        raise ValueError(
            f"Lyapunov solve failed: residual {residual:.3e} exceeds "
            f"{rtol:.1e} * max|q| = {rtol * scale:.3e}"
        )
    return m


def controllability_matrix(a, b) -> np.ndarray:
    """Krylov block matrix ``[b, a@b, ..., a^(n-1)@b]``."""
    a = as_square(a, "drift")
    b = as_matrix(b, "noise")
    if b.shape[0] != a.shape[0]:
        raise ValueError(
            f"incompatible shapes: drift {a.shape} vs noise {b.shape}"
        )
    blocks = [b]
    for _ in range(a.shape[0] - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)

def is_controllable(a, b, rtol: float = RANK_RTOL):
    """Kalman rank test for the pair ``(a, b)``.

    Returns
    -------
    controllable : bool
        True iff the Krylov matrix has full row rank.
    rank : int
        Numerical rank certificate (singular values above
        ``rtol * sigma_max``).
    """
    a = as_square(a, "drift")
    krylov = controllability_matrix(a, b)
    sigma = np.linalg.svd(krylov, compute_uv=False)
    if sigma[0] == 0.0:
        return False, 0
    rank = int(np.sum(sigma > rtol * sigma[0]))
    return rank == a.shape[0], rank
