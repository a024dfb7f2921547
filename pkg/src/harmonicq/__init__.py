"""harmonicq: energy-increment statistics of stochastic harmonic systems.

The package computes the exact large-time laws (variance-gamma
distributions and their large-deviation rate functions) of quadratic energy
increments ``Q_t = X_t.L X_t - X_0.L X_0`` along stationary Gaussian
processes, builds the underlying linear SDE models for damped harmonic
networks and thermally driven RC circuits, and validates every closed form
against direct Monte Carlo sampling.
"""

__version__ = "0.1.0"

from .bessel import (
    UnderflowWarning,
    bessel_k,
    bessel_k_asymptotic,
    bessel_k_half_integer,
    bessel_k_integral,
)
from .linalg import (
    expm,
    is_controllable,
    solve_lyapunov,
    spectral_abscissa,
    sym_eigen,
    sym_sqrt,
)
from .mcstats import (
    EmpiricalSample,
    LDPEstimate,
    histogram,
    ks_critical_value,
    ks_distance,
    ldp_scan,
    sample_qt,
    tail_slope,
    wilson_interval,
)
from .networks import (
    BOLTZMANN,
    FirstLawReport,
    NetworkSpec,
    QuadraticObservable,
    RCCircuitSpec,
    RCEigenvalues,
    SubnetworkSelection,
    first_law_check,
    heat_schur_theta,
    kinetic_observable,
    langevin_model,
    rc_eigenvalues,
    rc_heat_observable,
    rc_limit_density,
    rc_limit_law,
    rc_model,
    total_energy_observable,
)
from .ou import (
    FiniteTimeQtLaw,
    LagCovariance,
    LinearSDEModel,
    build_model,
    finite_time_qt_law,
)
from .vargamma import TwoDimVGParams, VarianceGammaLaw, make_vg

__all__ = [
    "__version__",
    "BOLTZMANN",
    "UnderflowWarning",
    "bessel_k",
    "bessel_k_asymptotic",
    "bessel_k_half_integer",
    "bessel_k_integral",
    "expm",
    "is_controllable",
    "solve_lyapunov",
    "spectral_abscissa",
    "sym_eigen",
    "sym_sqrt",
    "TwoDimVGParams",
    "VarianceGammaLaw",
    "make_vg",
    "FiniteTimeQtLaw",
    "LagCovariance",
    "LinearSDEModel",
    "build_model",
    "finite_time_qt_law",
    "NetworkSpec",
    "SubnetworkSelection",
    "QuadraticObservable",
    "FirstLawReport",
    "first_law_check",
    "heat_schur_theta",
    "kinetic_observable",
    "langevin_model",
    "total_energy_observable",
    "RCCircuitSpec",
    "RCEigenvalues",
    "rc_eigenvalues",
    "rc_heat_observable",
    "rc_limit_density",
    "rc_limit_law",
    "rc_model",
    "EmpiricalSample",
    "LDPEstimate",
    "histogram",
    "ks_critical_value",
    "ks_distance",
    "ldp_scan",
    "sample_qt",
    "tail_slope",
    "wilson_interval",
]
