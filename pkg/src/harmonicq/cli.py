"""Command-line interface.

Commands: ``vg-density``, ``rc``, ``network``, ``ldp``, ``selftest``.
Model parameters come from a single JSON document with exactly one of the
payload keys ``network`` / ``rc_circuit`` / ``vg``, a mandatory ``units``
field (``"si"`` or ``"reduced"``) and an optional ``seed``; unknown keys are
rejected.  Every run writes a ``<out>.manifest.json`` echoing the fully
resolved configuration, so outputs are reproducible byte for byte.

CSV output uses 17 significant digits, ``.`` decimal separator and a single
``#``-prefixed header line.  Exit codes: 0 success, 2 configuration error,
3 numerical failure, 4 statistical selftest failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from . import mcstats, networks, ou
from .bessel import bessel_k_half_integer, bessel_k_integral
from .linalg import expm, solve_lyapunov
from .vargamma import VarianceGammaLaw, make_vg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_STATISTICAL = 4

_TOP_KEYS = {"network", "rc_circuit", "vg", "units", "seed"}
_NETWORK_KEYS = {
    "masses",
    "frequencies",
    "coupling",
    "gammas",
    "temperatures",
    "subnetwork",
    "observable",
}
_RC_KEYS = {"r1", "r2", "c", "c1", "c2", "t1", "t2"}
_VG_KEYS = {"lambdas", "l", "m"}


class ConfigError(Exception):
    """Invalid configuration or model document."""


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read model document: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model document is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("model document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    payload = [key for key in ("network", "rc_circuit", "vg") if key in doc]
    if len(payload) != 1:
        raise ConfigError(
            "document must contain exactly one of 'network', 'rc_circuit', 'vg'"
        )
    units = doc.get("units")
    if units not in ("si", "reduced"):
        raise ConfigError("document requires a 'units' field of 'si' or 'reduced'")
    if "seed" in doc and not isinstance(doc["seed"], int):
        raise ConfigError("'seed' must be an integer")
    return doc


def _boltzmann(units: str) -> float:
    return networks.BOLTZMANN if units == "si" else 1.0


def _check_keys(section: dict, allowed: set, name: str) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"'{name}' must be a JSON object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")


def _network_from_document(doc: dict):
    section = doc["network"]
    _check_keys(section, _NETWORK_KEYS, "network")
    required = {"masses", "frequencies", "coupling", "gammas", "temperatures"}
    missing = required - set(section)
    if missing:
        raise ConfigError(f"'network' is missing keys: {sorted(missing)}")
    try:
        spec = networks.NetworkSpec(
            masses=section["masses"],
            frequencies=section["frequencies"],
            coupling=section["coupling"],
            gammas=section["gammas"],
            temperatures=section["temperatures"],
            boltzmann=_boltzmann(doc["units"]),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid network: {exc}")
    if "subnetwork" not in section:
        raise ConfigError("'network' requires a 'subnetwork' list of vertex indices")
    try:
        selection = networks.SubnetworkSelection(tuple(section["subnetwork"]))
        selection.require_nontrivial(spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid subnetwork selection: {exc}")
    observable = section.get("observable", "kinetic")
    if observable not in ("kinetic", "total"):
        raise ConfigError("'observable' must be 'kinetic' or 'total'")
    return spec, selection, observable


def _rc_from_document(doc: dict) -> networks.RCCircuitSpec:
    section = doc["rc_circuit"]
    _check_keys(section, _RC_KEYS, "rc_circuit")
    missing = _RC_KEYS - set(section)
    if missing:
        raise ConfigError(f"'rc_circuit' is missing keys: {sorted(missing)}")
    try:
        return networks.RCCircuitSpec(
            boltzmann=_boltzmann(doc["units"]), **{k: section[k] for k in _RC_KEYS}
        )
    except ValueError as exc:
        raise ConfigError(f"invalid rc_circuit: {exc}")


def _vg_from_document(doc: dict) -> VarianceGammaLaw:
    section = doc["vg"]
    _check_keys(section, _VG_KEYS, "vg")
    try:
        if "lambdas" in section:
            if "l" in section or "m" in section:
                raise ConfigError("'vg' takes either 'lambdas' or the pair 'l'/'m'")
            return VarianceGammaLaw(section["lambdas"])
        if "l" in section and "m" in section:
            return make_vg(section["l"], section["m"])
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid vg section: {exc}")
    raise ConfigError("'vg' requires 'lambdas' or both 'l' and 'm'")


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--grid must be MIN:MAX:COUNT")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad --grid value: {exc}")
    if not (lo < hi) or count < 1:
        raise ConfigError("--grid requires MIN < MAX and COUNT >= 1")
    return np.linspace(lo, hi, count)


def _parse_window(text: str):
    parts = text.split(":")
    if len(parts) < 2:
        raise ConfigError("--grid must be A:B (window) for ldp")
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"bad window value: {exc}")
    if not a < b:
        raise ConfigError("window requires A < B")
    return a, b


def _parse_t_list(text: str):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --t-list value: {exc}")
    if not values:
        raise ConfigError("--t-list must contain at least one time")
    return values


def _resolve_seed(args, doc) -> int:
    if args.seed is not None:
        return int(args.seed)
    if doc is not None and "seed" in doc:
        return int(doc["seed"])
    return 0


def _resolve_units(args, doc) -> str:
    if doc is None:
        return args.units or "reduced"
    if args.units is not None and args.units != doc["units"]:
        raise ConfigError(
            f"--units {args.units} contradicts the document units {doc['units']!r}"
        )
    return doc["units"]


def _write_csv(path: str, columns: np.ndarray, header: str) -> None:
    np.savetxt(path, columns, fmt="%.17g", delimiter=",", header=header, comments="# ")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _write_manifest(args, doc, written) -> None:
    manifest = {
        "command": args.command,
        "package": "harmonicq",
        "version": __version__,
        "spec_path": getattr(args, "spec", None),
        "document": doc,
        "out": args.out,
        "seed": getattr(args, "seed", None),
        "count": getattr(args, "count", None),
        "t": getattr(args, "t", None),
        "t_list": getattr(args, "t_list", None),
        "grid": getattr(args, "grid", None),
        "units": getattr(args, "units", None),
        "workers": getattr(args, "workers", None),
        "written_files": written,
    }
    _write_json(f"{args.out}.manifest.json", manifest)


def cmd_vg_density(args) -> int:
    doc = _load_document(args.spec)
    _resolve_units(args, doc)
    if "vg" not in doc:
        raise ConfigError("vg-density requires a 'vg' document")
    law = _vg_from_document(doc)
    if args.grid is None:
        raise ConfigError("vg-density requires --grid MIN:MAX:COUNT")
    grid = _parse_grid(args.grid)
    profile = law.density_profile(grid)
    lam_text = ",".join(_fmt(v) for v in law.lambdas)
    header = f"s,f_vg  lambdas=[{lam_text}]"
    if law.n == 2:
        p = law.two_dim_params()
        header += f" epsilon={_fmt(p.epsilon)} theta={_fmt(p.theta)}"
    _write_csv(args.out, profile, header)
    _write_manifest(args, doc, [args.out])
    return EXIT_OK


def cmd_rc(args) -> int:
    doc = _load_document(args.spec)
    units = _resolve_units(args, doc)
    if "rc_circuit" not in doc:
        raise ConfigError("rc requires an 'rc_circuit' document")
    spec = _rc_from_document(doc)
    model = networks.rc_model(spec)
    eig = networks.rc_eigenvalues(spec)
    kbt2 = spec.boltzmann * spec.t2
    report = {
        "units": units,
        "boltzmann": spec.boltzmann,
        "a": model.a.tolist(),
        "b": model.b.tolist(),
        "m_stat": model.m_stat.tolist(),
        "spectral_abscissa": model.abscissa,
        "controllable": model.controllable,
        "big_lambda": eig.big_lambda,
        "lambda_minus": eig.lambda_minus,
        "lambda_plus": eig.lambda_plus,
        "lambda_minus_kbt2": eig.lambda_minus / kbt2,
        "lambda_plus_kbt2": eig.lambda_plus / kbt2,
        "epsilon": eig.epsilon,
        "theta": eig.theta,
        "theta_kbt2": eig.theta * kbt2,
        "heat_unit_kbt2": kbt2,
    }
    written = [args.out]
    if args.grid is not None:
        grid = _parse_grid(args.grid)
        profile = networks.rc_limit_density(spec, grid, units="kbt2")
        density_path = f"{args.out}.density.csv"
        _write_csv(
            density_path,
            profile,
            "s_kbt2,f_limit  heat unit = k_B*T2",
        )
        written.append(density_path)
    if args.count is not None:
        if args.t is None:
            raise ConfigError("rc with --count requires --t")
        seed = _resolve_seed(args, doc)
        sample = mcstats.sample_qt(
            model,
            networks.rc_heat_observable(spec),
            args.t,
            args.count,
            seed,
            workers=args.workers,
        )
        scaled = mcstats.EmpiricalSample(
            values=sample.values / kbt2,
            t=sample.t,
            seed=sample.seed,
            count=sample.count,
            workers=sample.workers,
        )
        law = networks.rc_limit_law(spec, units="kbt2")
        centers, density = mcstats.histogram(
            scaled, bins=args.bins, range=(-12.0, 12.0)
        )
        hist_path = f"{args.out}.hist.csv"
        _write_csv(
            hist_path,
            np.column_stack([centers, density, law.density(centers)]),
            "s_kbt2,empirical_density,limit_density",
        )
        written.append(hist_path)
        report["mc"] = {
            "t": args.t,
            "count": args.count,
            "seed": seed,
            "workers": args.workers,
            "ks_distance": mcstats.ks_distance(scaled, law),
            "ks_critical_1pct": mcstats.ks_critical_value(args.count, 0.01),
        }
    _write_json(args.out, report)
    _write_manifest(args, doc, written)
    return EXIT_OK


def cmd_network(args) -> int:
    doc = _load_document(args.spec)
    units = _resolve_units(args, doc)
    if "network" not in doc:
        raise ConfigError("network requires a 'network' document")
    spec, selection, observable_kind = _network_from_document(doc)
    model = networks.langevin_model(spec)
    kin = networks.kinetic_observable(spec, selection)
    tot = networks.total_energy_observable(spec, selection)
    law_kin = mcstats._limit_law(model, kin)
    law_tot = mcstats._limit_law(model, tot)
    theta_schur = networks.heat_schur_theta(spec, selection)
    report = {
        "units": units,
        "boltzmann": spec.boltzmann,
        "subnetwork": list(selection.vertices),
        "spectral_abscissa": model.abscissa,
        "controllable": model.controllable,
        "kinetic_lambdas": law_kin.lambdas.tolist(),
        "total_lambdas": law_tot.lambdas.tolist(),
        "theta_schur": theta_schur,
        "kinetic_rate_slope": 1.0 / law_kin.lambda_max,
        "total_rate_slope": 1.0 / law_tot.lambda_max,
    }
    if spec.is_equilibrium:
        kbt = spec.boltzmann * float(spec.temperatures[0])
        report["equilibrium_kbt"] = kbt
        report["total_lambda_max_schur"] = kbt / (1.0 - theta_schur)
    written = [args.out]
    if args.count is not None:
        if args.t is None:
            raise ConfigError("network with --count requires --t")
        seed = _resolve_seed(args, doc)
        observable = kin if observable_kind == "kinetic" else tot
        law = law_kin if observable_kind == "kinetic" else law_tot
        sample = mcstats.sample_qt(
            model, observable, args.t, args.count, seed, workers=args.workers
        )
        report["mc"] = {
            "observable": observable_kind,
            "t": args.t,
            "count": args.count,
            "seed": seed,
            "workers": args.workers,
            "ks_distance": mcstats.ks_distance(sample, law),
            "ks_critical_1pct": mcstats.ks_critical_value(args.count, 0.01),
        }
    _write_json(args.out, report)
    _write_manifest(args, doc, written)
    return EXIT_OK


def cmd_ldp(args) -> int:
    doc = _load_document(args.spec)
    _resolve_units(args, doc)
    if "vg" in doc:
        raise ConfigError("ldp requires a model document ('network' or 'rc_circuit')")
    if args.grid is None:
        raise ConfigError("ldp requires --grid A:B as the target window")
    if args.t_list is None:
        raise ConfigError("ldp requires --t-list T1,T2,...")
    window = _parse_window(args.grid)
    times = _parse_t_list(args.t_list)
    if "rc_circuit" in doc:
        spec = _rc_from_document(doc)
        model = networks.rc_model(spec)
        observable = networks.rc_heat_observable(spec)
    else:
        net, selection, observable_kind = _network_from_document(doc)
        model = networks.langevin_model(net)
        observable = (
            networks.kinetic_observable(net, selection)
            if observable_kind == "kinetic"
            else networks.total_energy_observable(net, selection)
        )
    seed = _resolve_seed(args, doc)
    scan = mcstats.ldp_scan(
        model,
        observable,
        window,
        times,
        count=args.count or 100_000,
        seed=seed,
        workers=args.workers,
    )
    rows = np.column_stack(
        [
            scan.t_list,
            scan.hits,
            scan.hits / scan.count,
            scan.estimates,
            scan.lower,
            scan.upper,
            np.full(scan.t_list.size, scan.theoretical),
            scan.flagged.astype(float),
        ]
    )
    _write_csv(
        args.out,
        rows,
        "t,hits,p_hat,estimate,wilson_lo,wilson_hi,theory,zero_hit_flag"
        f"  window=({_fmt(window[0])},{_fmt(window[1])}) count={scan.count}",
    )
    _write_manifest(args, doc, [args.out])
    return EXIT_OK


def _selftest_checks(scale: float):
    """Cross-oracle checks: (name, metric, tolerance, statistical)."""
    rng = np.random.default_rng(20260809)

    # Lyapunov solve vs quadrature of the covariance integral.
    a = rng.standard_normal((4, 4))
    a -= (np.max(np.real(np.linalg.eigvals(a))) + 0.5) * np.eye(4)
    g = rng.standard_normal((4, 4))
    q = g @ g.T
    m = solve_lyapunov(a, q)
    nodes, weights = np.polynomial.legendre.leggauss(32)
    horizon = 40.0
    quad = np.zeros_like(q)
    for lo in np.arange(0.0, horizon, 2.0):
        ts = lo + 1.0 + nodes
        for t, w in zip(ts, weights):
            e = expm(t * a)
            quad += w * (e @ q @ e.T)
    lyap_err = float(np.max(np.abs(quad - m)) / np.max(np.abs(m)))
    yield ("lyapunov_vs_quadrature", lyap_err, 1e-6 * scale, False)

    # Closed-form RC eigenvalues vs the numeric spectral route.
    spec = networks.RCCircuitSpec(
        r1=1e8, r2=1e8, c=1e-10, c1=6.8e-10, c2=4.2e-10, t1=88.0, t2=296.0
    )
    model = networks.rc_model(spec)
    law = make_vg(0.5 * spec.capacitance_matrix, model.m_stat)
    eig = networks.rc_eigenvalues(spec)
    closed = np.array([eig.lambda_minus, eig.lambda_plus])
    rc_err = float(np.max(np.abs(law.lambdas - closed)) / eig.lambda_plus)
    yield ("rc_closed_form_eigenvalues", rc_err, 1e-9 * scale, False)

    # Two-eigenvalue density vs an independent characteristic-function
    # inversion on a uniform grid.
    law2 = VarianceGammaLaw([0.6, 1.7])
    l1, l2 = law2.lambdas
    cutoff, npts = 3000.0, 600_000
    alphas = np.linspace(0.0, cutoff, npts + 1)
    chi = np.exp(
        -0.5 * (np.log1p((alphas * l1) ** 2) + np.log1p((alphas * l2) ** 2))
    )
    w = np.full(alphas.size, alphas[1])
    w[0] = w[-1] = 0.5 * alphas[1]
    svals = np.linspace(0.0, 8.0, 33)
    base = np.cos(np.outer(svals, alphas)) @ (chi * w)
    from scipy.special import sici

    si, _ = sici(cutoff * svals[1:])
    tail = np.empty_like(svals)
    tail[0] = 1.0 / cutoff
    tail[1:] = np.cos(cutoff * svals[1:]) / cutoff - svals[1:] * (
        0.5 * math.pi - si
    )
    inverted = (base + tail / (l1 * l2)) / math.pi
    dens_err = float(np.max(np.abs(law2.density(svals) - inverted)))
    yield ("density_vs_inversion", dens_err, 1e-6 * scale, False)

    # Quadrature vs half-integer closed forms.
    bessel_err = 0.0
    for m_idx in (0, 1, 3, 7):
        for x in (0.3, 1.0, 4.0, 15.0):
            closed_k = bessel_k_half_integer(m_idx, x)
            bessel_err = max(
                bessel_err,
                abs(bessel_k_integral(m_idx + 0.5, x) - closed_k) / closed_k,
            )
    yield ("bessel_integral_vs_half_integer", bessel_err, 1e-10 * scale, False)

    # Finite-time characteristic function against the limit law.
    model_iso = ou.build_model(-np.eye(2), math.sqrt(2.0) * np.eye(2))
    qt_law = ou.finite_time_qt_law(model_iso, 0.5 * np.eye(2), t=20.0)
    vg_iso = VarianceGammaLaw([1.0, 1.0])
    agrid = np.linspace(-10.0, 10.0, 161)
    char_err = float(np.max(np.abs(qt_law.char_fn(agrid) - vg_iso.char_fn(agrid))))
    yield ("finite_time_char_fn_limit", char_err, 1e-6 * scale, False)

    # Equilibrium covariance identity on a reduced-units chain.
    coupling = np.zeros((3, 3))
    coupling[0, 1] = coupling[1, 0] = -0.4
    coupling[1, 2] = coupling[2, 1] = -0.3
    net = networks.NetworkSpec(
        masses=[1.0, 2.0, 0.7],
        frequencies=[1.1, 0.9, 1.3],
        coupling=coupling,
        gammas=[0.8, 0.0, 1.2],
        temperatures=[1.0, 1.0, 1.0],
        boltzmann=1.0,
    )
    net_model = networks.langevin_model(net)
    closed_cov = net.equilibrium_covariance()
    cov_err = float(
        np.max(np.abs(net_model.m_stat - closed_cov)) / np.max(np.abs(closed_cov))
    )
    yield ("equilibrium_covariance", cov_err, 1e-10 * scale, False)

    # Statistical: sampler against its own law at 2e5 draws.
    draws = vg_iso.sample(np.random.default_rng(7), 200_000)
    sample = mcstats.EmpiricalSample(
        values=draws, t=math.inf, seed=7, count=draws.size, workers=1
    )
    ks = mcstats.ks_distance(sample, vg_iso)
    yield (
        "sampling_ks",
        ks,
        mcstats.ks_critical_value(200_000, 0.01) * scale,
        True,
    )


def cmd_selftest(args) -> int:
    scale = args.tolerance_scale
    failed_numerical = False
    failed_statistical = False
    for name, metric, tol, statistical in _selftest_checks(scale):
        ok = metric <= tol
        print(
            f"selftest: {name:34s} {'ok' if ok else 'FAIL'} "
            f"(metric={metric:.3e}, tol={tol:.3e})"
        )
        if not ok:
            if statistical:
                failed_statistical = True
            else:
                failed_numerical = True
    worst = EXIT_OK
    if failed_statistical:
        worst = EXIT_STATISTICAL
    if failed_numerical:
        worst = EXIT_NUMERICAL
    if args.out:
        _write_json(args.out, {"exit_code": worst, "tolerance_scale": scale})
        args.command = "selftest"
        _write_manifest(args, None, [args.out])
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonicq",
        description=(
            "Variance-gamma energy statistics of stochastic harmonic "
            "networks and RC circuits"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_out=True):
        p.add_argument("--spec", required=True, help="JSON model document")
        p.add_argument("--out", required=needs_out, help="output file path")
        p.add_argument("--seed", type=int, default=None, help="64-bit master seed")
        p.add_argument("--count", type=int, default=None, help="Monte Carlo sample count")
        p.add_argument("--t", type=float, default=None, help="lag time")
        p.add_argument("--t-list", dest="t_list", default=None, help="comma-separated lag times")
        p.add_argument("--grid", default=None, help="MIN:MAX:COUNT grid (ldp: A:B window)")
        p.add_argument("--units", choices=("si", "reduced"), default=None)
        p.add_argument("--workers", type=int, default=1, help="substream count")

    p_vg = sub.add_parser("vg-density", help="tabulate a variance-gamma density")
    add_common(p_vg)
    p_vg.set_defaults(handler=cmd_vg_density)

    p_rc = sub.add_parser("rc", help="RC-circuit report and limit-law curves")
    add_common(p_rc)
    p_rc.add_argument("--bins", type=int, default=120, help="histogram bins")
    p_rc.set_defaults(handler=cmd_rc)

    p_net = sub.add_parser("network", help="harmonic-network energy laws")
    add_common(p_net)
    p_net.set_defaults(handler=cmd_network)

    p_ldp = sub.add_parser("ldp", help="rate-function scan of tail probabilities")
    add_common(p_ldp)
    p_ldp.set_defaults(handler=cmd_ldp)

    p_self = sub.add_parser("selftest", help="run the cross-oracle checks")
    p_self.add_argument("--out", default=None, help="optional JSON result path")
    p_self.add_argument(
        "--tolerance-scale",
        dest="tolerance_scale",
        type=float,
        default=1.0,
        help="multiply every tolerance (values < 1 tighten the suite)",
    )
    p_self.set_defaults(handler=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"harmonicq: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # numerical / tolerance failures
        print(f"harmonicq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
