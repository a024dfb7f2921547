"""Physical model builders: harmonic networks and the two-resistor RC circuit.

Networks
--------
A finite harmonic network has one oscillator per vertex with mass ``m_x``,
pinning frequency ``omega_x`` and symmetric coupling ``C_xy``; its state is
``z = (p, q)``.  Each vertex may carry a Langevin thermostat with relaxation
rate ``gamma_x`` and temperature ``T_x``, giving the drift/noise pair

    A = [[-gamma, -(m omega^2 + C)], [m^{-1}, 0]],
    B = [[sqrt(2 gamma k_B T), 0], [0, 0]].

Quadratic energy observables of a subnetwork ``G0`` (total kinetic energy,
total internal energy) are assembled as positive quadratic forms supported
on the relevant coordinates; combined with the stationary covariance they
yield the variance-gamma laws of the long-run energy increments.  The
deterministic first-law bookkeeping (external/internal work versus energy
changes along the Hamiltonian flow) is provided for verification.

RC circuit
----------
Two resistors at temperatures ``T1, T2`` coupled through capacitance ``C``
with inner capacitances ``C1, C2``.  With the capacitance matrix
``Cmat = [[C + C2, -C], [-C, C + C1]]`` the voltages obey
``dV = A V dt + B dw`` where ``A = -Cmat^{-1} R^{-1}`` and
``B = Cmat^{-1} (T R^{-1})^{1/2}``, ``T = 2 k_B diag(T1, T2)``.  The total
dissipated heat is ``Q_t = (V_t.Cmat V_t - V_0.Cmat V_0) / 2`` and its
limit law has the closed-form eigenvalues

    lambda_pm = (k_B/2) (T1 + T2 +- |T1 - T2| sqrt(1 - Lambda^2)),
    Lambda = sqrt(R1 R2) C / ((R1 + R2) C / 2 + (R1 C1 + R2 C2) / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, ou
from .vargamma import VarianceGammaLaw, make_vg

__all__ = [
    "BOLTZMANN",
    "NetworkSpec",
    "SubnetworkSelection",
    "QuadraticObservable",
    "FirstLawReport",
    "langevin_model",
    "kinetic_observable",
    "total_energy_observable",
    "heat_schur_theta",
    "first_law_check",
    "RCCircuitSpec",
    "RCEigenvalues",
    "rc_model",
    "rc_heat_observable",
    "rc_eigenvalues",
    "rc_limit_law",
    "rc_limit_density",
]

#: Boltzmann constant in J/K (exact SI value).  Reduced-unit work passes
#: ``boltzmann=1.0`` to the model constructors instead.
BOLTZMANN = 1.380649e-23


def _positive_vector(values, name: str, size: int | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if size is not None and arr.size != size:
        raise ValueError(f"{name} must have length {size}, got {arr.size}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} must be finite and strictly positive")
    return arr


@dataclass(frozen=True)
class NetworkSpec:
    """Finite harmonic network with per-vertex Langevin thermostats.

    Parameters
    ----------
    masses, frequencies : array_like
        Strictly positive, one entry per vertex (kg, rad/s).
    coupling : array_like
        Symmetric coupling matrix (N/m); together with the pinning terms
        the stiffness ``diag(m omega^2) + coupling`` must be positive
        definite.
    gammas : array_like
        Relaxation rates >= 0 (1/s); at least one must be positive for the
        stochastic dynamics to relax.
    temperatures : array_like
        Reservoir temperatures > 0 (K).
    boltzmann : float
        Boltzmann constant (J/K); set to 1 for reduced units.
    """

    masses: np.ndarray
    frequencies: np.ndarray
    coupling: np.ndarray
    gammas: np.ndarray
    temperatures: np.ndarray
    boltzmann: float = BOLTZMANN

    def __post_init__(self):
        masses = _positive_vector(self.masses, "masses")
        n = masses.size
        freqs = _positive_vector(self.frequencies, "frequencies", n)
        temps = _positive_vector(self.temperatures, "temperatures", n)
        gammas = np.asarray(self.gammas, dtype=float).ravel()
        if gammas.size != n:
            raise ValueError(f"gammas must have length {n}, got {gammas.size}")
        if not np.all(np.isfinite(gammas)) or np.any(gammas < 0.0):
            raise ValueError("gammas must be finite and >= 0")
        if not np.any(gammas > 0.0):
            raise ValueError("at least one vertex needs gamma > 0")
        coupling = linalg.require_symmetric(self.coupling, "coupling")
        if coupling.shape[0] != n:
            raise ValueError(
                f"coupling must be {n}x{n}, got {coupling.shape}"
            )
        if not (math.isfinite(self.boltzmann) and self.boltzmann > 0.0):
            raise ValueError("boltzmann must be finite and > 0")
        stiffness = np.diag(masses * freqs ** 2) + coupling
        linalg.require_positive_definite(stiffness, "stiffness m*omega^2 + coupling")
        for name, value in (
            ("masses", masses),
            ("frequencies", freqs),
            ("temperatures", temps),
            ("gammas", gammas),
            ("coupling", coupling),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_vertices(self) -> int:
        return int(self.masses.size)

    @property
    def stiffness(self) -> np.ndarray:
        """Full stiffness matrix ``diag(m omega^2) + coupling``."""
        return np.diag(self.masses * self.frequencies ** 2) + self.coupling

    @property
    def is_equilibrium(self) -> bool:
        t = self.temperatures
        return bool(np.max(t) - np.min(t) <= 1e-14 * np.max(t))

    def equilibrium_covariance(self) -> np.ndarray:
        """Closed-form stationary covariance ``k_B T diag(m, V^{-1})`` valid
        when every reservoir shares one temperature."""
        if not self.is_equilibrium:
            raise ValueError("closed-form covariance requires equal temperatures")
        kbt = self.boltzmann * float(self.temperatures[0])
        n = self.n_vertices
        cov = np.zeros((2 * n, 2 * n))
        cov[:n, :n] = kbt * np.diag(self.masses)
        cov[n:, n:] = kbt * np.linalg.inv(self.stiffness)
        return 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class SubnetworkSelection:
    """Subset of vertex indices singled out for energy bookkeeping."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(sorted(set(int(v) for v in np.atleast_1d(np.asarray(self.vertices)))))
        if len(verts) == 0:
            raise ValueError("selection must be non-empty")
        object.__setattr__(self, "vertices", verts)

    def indices(self, spec: NetworkSpec) -> np.ndarray:
        idx = np.asarray(self.vertices, dtype=int)
        if idx[0] < 0 or idx[-1] >= spec.n_vertices:
            raise ValueError(
                f"selection {self.vertices} out of range for {spec.n_vertices} vertices"
            )
        return idx

    def complement(self, spec: NetworkSpec) -> np.ndarray:
        idx = self.indices(spec)
        mask = np.ones(spec.n_vertices, dtype=bool)
        mask[idx] = False
        return np.nonzero(mask)[0]

    def is_proper(self, spec: NetworkSpec) -> bool:
        return len(self.vertices) < spec.n_vertices

    def has_boundary_coupling(self, spec: NetworkSpec) -> bool:
        """True when some selected vertex couples to the complement."""
        inside = self.indices(spec)
        outside = self.complement(spec)
        if outside.size == 0:
            return False
        return bool(np.any(spec.coupling[np.ix_(inside, outside)] != 0.0))

    def require_nontrivial(self, spec: NetworkSpec) -> None:
        """Reject selections with no coupling across their boundary."""
        if not self.is_proper(spec):
            raise ValueError("selection must be a proper subset of the vertices")
        if not self.has_boundary_coupling(spec):
            raise ValueError(
                "selection has no coupling to its complement; the energy "
                "exchange problem is trivial"
            )


@dataclass(frozen=True)
class QuadraticObservable:
    """Positive quadratic form ``z . L z`` on the model state space.

    ``matrix`` lives on the full state space and vanishes off ``support``;
    it must be positive definite on the support block.
    """

    matrix: np.ndarray
    support: np.ndarray
    kind: str

    def __post_init__(self):
        matrix = linalg.require_symmetric(self.matrix, "observable")
        support = np.unique(np.asarray(self.support, dtype=int))
        if support.size == 0:
            raise ValueError("observable support must be non-empty")
        if support[0] < 0 or support[-1] >= matrix.shape[0]:
            raise ValueError("observable support out of range")
        linalg.require_positive_definite(
            matrix[np.ix_(support, support)], "observable on support"
        )
        matrix.setflags(write=False)
        support.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "support", support)

    def restricted(self) -> np.ndarray:
        return self.matrix[np.ix_(self.support, self.support)]


def langevin_model(spec: NetworkSpec) -> ou.LinearSDEModel:
    """Stochastic network as a linear SDE on ``z = (p, q)``.

    The thermostat force on vertex ``x`` is
    ``-gamma_x p_x + sqrt(2 gamma_x m_x k_B T_x) dw_x``; the noise amplitude
    carries the mass factor required by fluctuation-dissipation, so equal
    reservoir temperatures reproduce the Gibbs covariance
    ``k_B T diag(m, V^{-1})`` exactly.
    """
    n = spec.n_vertices
    stiffness = spec.stiffness
    a = np.zeros((2 * n, 2 * n))
    a[:n, :n] = -np.diag(spec.gammas)
    a[:n, n:] = -stiffness
    a[n:, :n] = np.diag(1.0 / spec.masses)
    b = np.zeros((2 * n, 2 * n))
    b[:n, :n] = np.diag(
        np.sqrt(2.0 * spec.gammas * spec.masses * spec.boltzmann * spec.temperatures)
    )
    return ou.build_model(a, b)


def kinetic_observable(spec: NetworkSpec, selection: SubnetworkSelection) -> QuadraticObservable:
    """Kinetic energy ``sum_{x in G0} p_x^2 / (2 m_x)`` of the selection."""
    idx = selection.indices(spec)
    n = spec.n_vertices
    matrix = np.zeros((2 * n, 2 * n))
    matrix[idx, idx] = 0.5 / spec.masses[idx]
    return QuadraticObservable(matrix=matrix, support=idx, kind="kinetic")


def total_energy_observable(spec: NetworkSpec, selection: SubnetworkSelection) -> QuadraticObservable:
    """Internal energy of the selection: kinetic part plus the potential
    quadratic form of the stiffness restricted to it (Dirichlet principal
    submatrix)."""
    idx = selection.indices(spec)
    n = spec.n_vertices
    matrix = np.zeros((2 * n, 2 * n))
    matrix[idx, idx] = 0.5 / spec.masses[idx]
    pos = n + idx
    matrix[np.ix_(pos, pos)] = 0.5 * spec.stiffness[np.ix_(idx, idx)]
    support = np.concatenate([idx, pos])
    return QuadraticObservable(matrix=matrix, support=support, kind="total")


def heat_schur_theta(spec: NetworkSpec, selection: SubnetworkSelection) -> float:
    """Schur parameter ``theta = || V0^{-1/2} C V1^{-1} C V0^{-1/2} ||``.

    ``V0``/``V1`` are the stiffness blocks of the selection and its
    complement and ``C`` the coupling block between them.  At equilibrium
    the largest eigenvalue of the internal-energy law equals
    ``k_B T / (1 - theta)``; the selection must couple to its complement
    for the parameter to be positive.
    """
    selection.require_nontrivial(spec)
    inside = selection.indices(spec)
    outside = selection.complement(spec)
    stiffness = spec.stiffness
    v0 = stiffness[np.ix_(inside, inside)]
    v1 = stiffness[np.ix_(outside, outside)]
    cross = stiffness[np.ix_(inside, outside)]
    w, vec = linalg.sym_eigen(v0)
    v0_inv_half = (vec / np.sqrt(w)) @ vec.T
    middle = cross @ np.linalg.solve(v1, cross.T)
    core = v0_inv_half @ middle @ v0_inv_half
    return float(np.max(np.linalg.eigvalsh(0.5 * (core + core.T))))


@dataclass(frozen=True)
class FirstLawReport:
    """Work/energy bookkeeping along a deterministic trajectory.

    ``w_ext``/``w_int`` are the external/internal work on the subnetwork;
    ``dh``, ``dk``, ``dv`` the changes of its internal, kinetic and
    potential energies.  ``max_residual`` is the largest violation of the
    identities ``w_ext = dh``, ``w_ext + w_int = dk``, ``-w_int = dv``,
    and ``energy_scale`` the normalization used to judge it.
    """

    w_ext: float
    w_int: float
    dh: float
    dk: float
    dv: float
    energy_scale: float
    max_residual: float
    converged: bool

    @property
    def relative_residual(self) -> float:
        return self.max_residual / self.energy_scale


def _hamiltonian_flow(spec: NetworkSpec, p0: np.ndarray, q0: np.ndarray):
    """Exact normal-mode propagator of the undamped network.

    Returns a callable mapping an array of times to ``(p, q, qdot)`` arrays
    of shape (n, len(times)).
    """
    root_m = np.sqrt(spec.masses)
    omega_sq = spec.stiffness / np.outer(root_m, root_m)
    w2, modes = linalg.sym_eigen(omega_sq, "mass-weighted stiffness")
    omega = np.sqrt(w2)
    coeff_pos = modes.T @ (root_m * q0)
    coeff_vel = modes.T @ (p0 / root_m)

    def at(times: np.ndarray):
        phase = np.outer(omega, times)
        cos_t, sin_t = np.cos(phase), np.sin(phase)
        y = modes @ (coeff_pos[:, None] * cos_t + (coeff_vel / omega)[:, None] * sin_t)
        ydot = modes @ (-(coeff_pos * omega)[:, None] * sin_t + coeff_vel[:, None] * cos_t)
        q = y / root_m[:, None]
        qdot = ydot / root_m[:, None]
        p = root_m[:, None] * ydot
        return p, q, qdot

    return at


def _work_integrals(spec, selection, flow, t, steps, nodes=12):
    """Gauss-Legendre time quadrature of the external/internal power."""
    idx = selection.indices(spec)
    outside = selection.complement(spec)
    coupling = spec.coupling
    pinning = spec.masses[idx] * spec.frequencies[idx] ** 2
    gl_nodes, gl_weights = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, t, steps + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    centers = 0.5 * (edges[1:] + edges[:-1])
    times = (centers[:, None] + half[:, None] * gl_nodes[None, :]).ravel()
    weights = (half[:, None] * gl_weights[None, :]).ravel()
    _, q, qdot = flow(times)
    qd_in = qdot[idx]
    force_ext = (
        -coupling[np.ix_(idx, outside)] @ q[outside]
        if outside.size
        else np.zeros_like(qd_in)
    )
    force_int = -pinning[:, None] * q[idx] - coupling[np.ix_(idx, idx)] @ q[idx]
    w_ext = float(np.sum(force_ext * qd_in, axis=0) @ weights)
    w_int = float(np.sum(force_int * qd_in, axis=0) @ weights)
    return w_ext, w_int


def first_law_check(
    spec: NetworkSpec,
    selection: SubnetworkSelection,
    initial,
    t: float,
    steps: int = 64,
) -> FirstLawReport:
    """Verify the first-law identities along the deterministic flow.

    The undamped Hamiltonian flow is evaluated exactly in normal modes
    (``gammas`` are ignored); work integrals use composite Gauss-Legendre
    quadrature with ``steps`` panels.  The report is flagged unconverged
    when halving the panel count moves the work integrals by more than
    1e-8 of the energy scale.
    """
    t = float(t)
    if t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    if steps < 2:
        raise ValueError(f"need at least 2 quadrature panels, got {steps}")
    n = spec.n_vertices
    state = np.asarray(initial, dtype=float).ravel()
    if state.size != 2 * n:
        raise ValueError(f"initial state must have length {2 * n}, got {state.size}")
    p0, q0 = state[:n], state[n:]
    idx = selection.indices(spec)
    flow = _hamiltonian_flow(spec, p0, q0)

    def energies(times):
        p, q, _ = flow(np.asarray(times, dtype=float))
        kin = 0.5 * np.sum(p[idx] ** 2 / spec.masses[idx, None], axis=0)
        v_block = spec.stiffness[np.ix_(idx, idx)]
        pot = 0.5 * np.einsum("it,ij,jt->t", q[idx], v_block, q[idx])
        return kin, pot

    (k0, v0), (k1, v1) = (energies([0.0]), energies([t]))
    dk = float(k1[0] - k0[0])
    dv = float(v1[0] - v0[0])
    dh = dk + dv
    w_ext, w_int = _work_integrals(spec, selection, flow, t, steps)
    w_ext_coarse, w_int_coarse = _work_integrals(
        spec, selection, flow, t, max(1, steps // 2)
    )
    scale = max(
        abs(float(k0[0] + v0[0])), abs(float(k1[0] + v1[0])),
        abs(w_ext), abs(w_int), 1e-300,
    )
    converged = (
        abs(w_ext - w_ext_coarse) <= 1e-8 * scale
        and abs(w_int - w_int_coarse) <= 1e-8 * scale
    )
    residuals = (w_ext - dh, (w_ext + w_int) - dk, -w_int - dv)
    return FirstLawReport(
        w_ext=w_ext,
        w_int=w_int,
        dh=dh,
        dk=dk,
        dv=dv,
        energy_scale=scale,
        max_residual=float(np.max(np.abs(residuals))),
        converged=converged,
    )


# ---------------------------------------------------------------------------
# RC circuit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RCCircuitSpec:
    """Two thermally driven resistors coupled through a capacitance.

    All parameters strictly positive: resistances ``r1, r2`` (Ohm),
    capacitances ``c`` (coupling), ``c1, c2`` (inner) in Farad,
    temperatures ``t1, t2`` (K).
    """

    r1: float
    r2: float
    c: float
    c1: float
    c2: float
    t1: float
    t2: float
    boltzmann: float = BOLTZMANN

    def __post_init__(self):
        for name in ("r1", "r2", "c", "c1", "c2", "t1", "t2", "boltzmann"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")
            object.__setattr__(self, name, value)
        linalg.require_positive_definite(self.capacitance_matrix, "capacitance matrix")

    @property
    def capacitance_matrix(self) -> np.ndarray:
        return np.array(
            [[self.c + self.c2, -self.c], [-self.c, self.c + self.c1]]
        )

    @property
    def is_equilibrium(self) -> bool:
        hi = max(self.t1, self.t2)
        return abs(self.t1 - self.t2) <= 1e-14 * hi


@dataclass(frozen=True)
class RCEigenvalues:
    """Closed-form limit-law parameters of the total dissipated heat.

    ``lambda_minus <= lambda_plus`` (Joule); ``big_lambda`` is the
    dimensionless coupling ratio in (0, 1); ``epsilon``/``theta`` are the
    two-eigenvalue law parameters.
    """

    lambda_minus: float
    lambda_plus: float
    big_lambda: float
    epsilon: float
    theta: float


def rc_model(spec: RCCircuitSpec) -> ou.LinearSDEModel:
    """Voltage SDE of the circuit: ``A = -Cmat^{-1} R^{-1}``,
    ``B = Cmat^{-1} (T R^{-1})^{1/2}``."""
    cmat = spec.capacitance_matrix
    r_inv = np.diag([1.0 / spec.r1, 1.0 / spec.r2])
    noise_sq = np.diag(
        [
            math.sqrt(2.0 * spec.boltzmann * spec.t1 / spec.r1),
            math.sqrt(2.0 * spec.boltzmann * spec.t2 / spec.r2),
        ]
    )
    a = -np.linalg.solve(cmat, r_inv)
    b = np.linalg.solve(cmat, noise_sq)
    return ou.build_model(a, b)


def rc_heat_observable(spec: RCCircuitSpec) -> QuadraticObservable:
    """Quadratic form of the total dissipated heat, ``L = Cmat / 2``."""
    return QuadraticObservable(
        matrix=0.5 * spec.capacitance_matrix,
        support=np.arange(2),
        kind="rc-heat",
    )


def rc_eigenvalues(spec: RCCircuitSpec) -> RCEigenvalues:
    """Closed-form eigenvalues and limit-law parameters of the heat law.

    ``Lambda`` pairs each resistance with the inner capacitance on its own
    node of the capacitance matrix (``R1`` with ``C2``, ``R2`` with ``C1``),
    which is what the stationary covariance of the voltage SDE demands; for
    ``R1 = R2`` the pairing is immaterial.
    """
    kb = spec.boltzmann
    numerator = math.sqrt(spec.r1 * spec.r2) * spec.c
    denominator = 0.5 * (spec.r1 + spec.r2) * spec.c + 0.5 * (
        spec.r1 * spec.c2 + spec.r2 * spec.c1
    )
    big_lambda = numerator / denominator
    root = math.sqrt(1.0 - big_lambda ** 2)
    spread = abs(spec.t1 - spec.t2) * root
    lam_minus = 0.5 * kb * (spec.t1 + spec.t2 - spread)
    lam_plus = 0.5 * kb * (spec.t1 + spec.t2 + spread)
    epsilon = (lam_plus ** 2 - lam_minus ** 2) / (lam_plus ** 2 + lam_minus ** 2)
    theta = math.sqrt(0.5 * (lam_minus ** -2 + lam_plus ** -2))
    return RCEigenvalues(
        lambda_minus=lam_minus,
        lambda_plus=lam_plus,
        big_lambda=big_lambda,
        epsilon=epsilon,
        theta=theta,
    )


def rc_limit_law(spec: RCCircuitSpec, units: str = "si") -> VarianceGammaLaw:
    """Limit law of the dissipated heat from the closed-form eigenvalues.

    ``units`` is ``'si'`` (Joule) or ``'kbt2'`` (multiples of ``k_B T2``).
    """
    eig = rc_eigenvalues(spec)
    scale = _heat_unit(spec, units)
    return VarianceGammaLaw([eig.lambda_minus / scale, eig.lambda_plus / scale])


def rc_limit_density(spec: RCCircuitSpec, s_grid, units: str = "si") -> np.ndarray:
    """Limit density of the dissipated heat on ``s_grid``.

    Equal temperatures give the pure exponential profile
    ``exp(-|s|/k_B T) / (2 k_B T)``; unequal temperatures the two-eigenvalue
    angular average.  Grid and density are in the requested units.
    """
    return rc_limit_law(spec, units).density_profile(s_grid)


def _heat_unit(spec: RCCircuitSpec, units: str) -> float:
    if units == "si":
        return 1.0
    if units == "kbt2":
        return spec.boltzmann * spec.t2
    raise ValueError(f"units must be 'si' or 'kbt2', got {units!r}")
