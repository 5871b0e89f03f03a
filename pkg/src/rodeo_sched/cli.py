"""Command-line front end.

Subcommands cover residual-weight evaluation (rsn), schedule and ratio
optimization (optimize-times, optimize-alpha, table1), benchmark curve
generation against exact-diagonalization backends (curve, spectrum),
the suppression-product utilities (product-function, decay-fit), and
Trotter-aware ratio fitting for user spectral functions (schedule-fit).

Outputs are data files only (CSV or JSON; no plotting). Every run
resolves its full parameter set into a manifest whose hash covers the
fields needed to reproduce the run bit-identically; CSV outputs carry
the hash as a leading comment line and a sidecar .manifest.json, JSON
outputs embed the manifest. All energies are in the Hamiltonian's
natural units and times in inverse energy.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .closed_form import FAST_ENUM_N, MAX_ENUM_N, BandModel, rsn_closed_form
from .hamiltonians import (HamiltonianSpec, RodeoObjective, build_sector_hamiltonian,
                           eigendecompose, make_initial_state, minimum_gap)
from .optimize import (OptimizationConfig, adaptive_alpha_curve, optimize_alpha,
                       optimize_times)
from .quadrature import QuadratureError
from .schedules import (TimeSchedule, read_schedule, superiteration_schedule,
                        trotter_round)
from .spectral import (ContinuousBand, band_from_json, load_spectrum_csv,
                       rsn_quadrature)

# Spectral-function presets for schedule fitting; shapes are normalized
# internally. Both live on [0, 1] and pair with a target below the band.
PRESETS = {
    "xi1": lambda: ContinuousBand(0.0, 1.0, density="gaussian"),
    "xi2": lambda: ContinuousBand(0.0, 1.0, density="constant"),
}


def _manifest(command: str, args: argparse.Namespace, extra: dict | None = None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "out", "format", "config") and not k.startswith("_")}
    for k, v in params.items():
        if isinstance(v, np.ndarray):
            params[k] = v.tolist()
    if extra:
        params.update(extra)
    core = {"command": command, "params": params,
            "seed": params.get("seed"), "version": __version__}
    digest = hashlib.sha256(
        json.dumps(core, sort_keys=True, separators=(",", ":")).encode()).hexdigest()
    core["hash"] = digest
    return core


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_, str)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: str, header: list, rows: list, manifest: dict) -> None:
    with open(path, "w") as fh:
        fh.write(f"# manifest_hash={manifest['hash']}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")
    with open(path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(args, manifest: dict, result: dict, header: list | None = None,
          rows: list | None = None) -> None:
    """Write CSV rows or a JSON document to --out, else print JSON."""
    wall = time.perf_counter() - args._t_start
    manifest = dict(manifest, wall_time=round(wall, 3),
                    outputs=[args.out] if args.out else [])
    if args.out and args.format == "csv" and rows is not None:
        _write_csv(args.out, header, rows, manifest)
        return
    doc = {"manifest": manifest, "result": result}
    text = json.dumps(doc, indent=2, sort_keys=True, default=float)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_floats(text: str) -> np.ndarray:
    items = [p for chunk in text.split(",") for p in chunk.split()]
    try:
        return np.array([float(p) for p in items])
    except ValueError as exc:
        raise ValueError(f"could not parse float list {text!r}: {exc}") from None


def _resolve_schedule(args) -> TimeSchedule:
    if getattr(args, "times", None):
        return TimeSchedule(times=_parse_floats(args.times))
    if getattr(args, "schedule_file", None):
        return read_schedule(args.schedule_file)
    if getattr(args, "alpha", None):
        if not args.total_time:
            raise ValueError("a geometric schedule needs --total-time")
        return superiteration_schedule(args.alpha, args.n_samples, args.total_time)
    return TimeSchedule(times=np.array([]))


def _two_sided_band(dmin: float, dmax: float) -> ContinuousBand:
    """Quadrature twin of BandModel: unit overlap on both signed gaps.

    The closed form counts every level with |E - E_t| in [dmin, dmax]
    at unit overlap; with the target at zero that is a density of 2
    (both signs folded) on [dmin, dmax], deliberately unnormalized.
    """
    table = np.array([[dmin, 2.0], [dmax, 2.0]])
    return ContinuousBand(dmin, dmax, table, normalize=False)


def _hamiltonian_backend(args):
    """(objective, batch, eig, t0, extras) for the requested chain."""
    spec = HamiltonianSpec(model=args.model, length=args.length,
                           coupling=args.coupling, field=args.field,
                           boundary=args.boundary or "", sector=args.sector or "")
    eig = eigendecompose(build_sector_hamiltonian(spec))
    state_name = args.initial_state or ("e1" if spec.model == "xx" else "plus")
    if getattr(args, "basis_index", None) is not None:
        psi = make_initial_state(spec, "basis_index", basis_index=args.basis_index)
        state_name = f"basis_index:{args.basis_index}"
    elif state_name == "e1":
        psi = make_initial_state(spec, "basis_index", basis_index=1)
    elif state_name == "fusion":
        psi = make_initial_state(spec, "fusion")
    elif state_name == "plus":
        psi = make_initial_state(spec, "plus_projected")
    else:
        raise ValueError(f"unknown initial state {state_name!r}")
    e_target = float(eig.eigenvalues[0])
    objective = RodeoObjective(eig, psi, e_target)
    gap = minimum_gap(eig, e_target)
    extras = {"resolved_initial_state": state_name, "e_target": e_target,
              "gap": gap, "characteristic_time": math.pi / gap,
              "sector_dim": eig.sector_dim}
    return objective, eig, math.pi / gap, extras


def cmd_rsn(args) -> int:
    schedule = _resolve_schedule(args)
    result: dict = {"n_samples": len(schedule), "total_time": schedule.total_time}
    if args.spectrum_file:
        spectrum = load_spectrum_csv(args.spectrum_file)
        result["zeta_quadrature"] = rsn_quadrature(spectrum, args.e_target, schedule)
        result["zeta_closed_form"] = None
    elif args.band_file:
        band = band_from_json(args.band_file)
        zeta = rsn_quadrature(band, args.e_target, schedule)
        result["zeta_quadrature"] = zeta
        result["zeta_closed_form"] = None
        result["band_average"] = zeta / band.total_weight()
    else:
        dmin, dmax = args.band
        band = BandModel(dmin, dmax)
        closed = rsn_closed_form(band, schedule) if len(schedule) <= MAX_ENUM_N else None
        zeta = rsn_quadrature(_two_sided_band(dmin, dmax), 0.0, schedule)
        result["zeta_quadrature"] = zeta
        result["zeta_closed_form"] = closed
        if closed is not None:
            result["discrepancy"] = abs(closed - zeta)
        result["band_average"] = zeta / (2.0 * (dmax - dmin))
    manifest = _manifest("rsn", args)
    rows = [[k, v] for k, v in result.items()]
    _emit(args, manifest, result, header=["quantity", "value"], rows=rows)
    return 0


def cmd_optimize_times(args) -> int:
    dmin, dmax = args.band
    band = BandModel(dmin, dmax)
    total = args.total_time if args.total_time else args.t0_multiple * math.pi / dmin
    cfg = OptimizationConfig(budget=args.budget, restarts=args.restarts,
                             seed=args.seed, tolerance=args.tolerance)
    res = optimize_times(band, args.n_samples, total, cfg)
    result = {
        "schedule": res.best_schedule.times.tolist(),
        "zeta": res.best_objective,
        "total_time_limit": total,
        "total_time_used": res.best_schedule.total_time,
        "surviving_times": len(res.best_schedule),
        "evaluations": res.evaluations_used,
        "restart_bests": res.restart_bests,
        "converged": res.converged,
    }
    manifest = _manifest("optimize-times", args, {"resolved_total_time": total})
    rows = [[i, t] for i, t in enumerate(res.best_schedule.times)]
    _emit(args, manifest, result, header=["index", "time"], rows=rows)
    return 0 if res.converged else 1


def cmd_optimize_alpha(args) -> int:
    extras: dict = {}
    if args.model:
        objective_backend, _, t0, extras = _hamiltonian_backend(args)
        objective = lambda sched: objective_backend.value(sched.times)
    else:
        dmin, dmax = args.band
        t0 = math.pi / dmin
        if args.n_samples <= FAST_ENUM_N:
            band = BandModel(dmin, dmax)
            objective = lambda sched: rsn_closed_form(band, sched)
        else:
            band_q = _two_sided_band(dmin, dmax)
            objective = lambda sched: rsn_quadrature(band_q, 0.0, sched)
    total = args.total_time if args.total_time else args.t0_multiple * t0
    cfg = OptimizationConfig(seed=args.seed, alpha_bounds=(args.alpha_min, args.alpha_cap))
    opt = optimize_alpha(objective, args.n_samples, total, cfg)
    result = {"alpha_opt": opt.alpha, "objective": opt.objective, "flat": opt.flat,
              "total_time": total, "n_samples": args.n_samples}
    manifest = _manifest("optimize-alpha", args, dict(extras, resolved_total_time=total))
    rows = [[k, v] for k, v in result.items()]
    _emit(args, manifest, result, header=["quantity", "value"], rows=rows)
    return 0


def cmd_table1(args) -> int:
    dmin, dmax = args.band
    band = BandModel(dmin, dmax)
    t0 = math.pi / dmin
    rows, entries, all_converged = [], [], True
    for mult in (0.5, 1.0, 2.0, 3.0):
        cfg = OptimizationConfig(budget=args.budget, restarts=args.restarts,
                                 seed=args.seed, tolerance=args.tolerance)
        res = optimize_times(band, args.n_samples, mult * t0, cfg)
        all_converged &= res.converged
        times = " ".join(f"{t:.6f}" for t in res.best_schedule.times)
        rows.append([f"{mult:g}*T0", mult * t0, res.best_objective,
                     len(res.best_schedule), res.converged, times])
        entries.append({"limit": f"{mult:g}*T0", "total_time_limit": mult * t0,
                        "zeta": res.best_objective,
                        "surviving_times": len(res.best_schedule),
                        "converged": res.converged,
                        "schedule": res.best_schedule.times.tolist()})
    manifest = _manifest("table1", args, {"characteristic_time": t0})
    _emit(args, manifest, {"rows": entries},
          header=["limit", "total_time", "zeta", "surviving_times", "converged", "schedule"],
          rows=rows)
    return 0 if all_converged else 1


def cmd_curve(args) -> int:
    objective, _, t0, extras = _hamiltonian_backend(args)
    fixed_alphas = _parse_floats(args.alphas)
    t_grid = np.geomspace(args.t_min_mult, args.t_max_mult, args.t_points) * t0

    def fidelity(times: np.ndarray, raw: bool) -> float:
        if raw:
            return objective.result(TimeSchedule(times=times)).target_weight
        return 1.0 - objective.value(times)

    columns: dict = {}
    for a in fixed_alphas:
        columns[f"fidelity_alpha_{a:g}"] = [
            fidelity(superiteration_schedule(a, args.n_samples, t).times, args.raw_fidelity)
            for t in t_grid]
    cfg = OptimizationConfig(seed=args.seed, alpha_bounds=(args.alpha_min, args.alpha_cap))
    curve = adaptive_alpha_curve(lambda s: objective.value(s.times), args.n_samples,
                                 t_grid, monotone=args.monotone, cfg=cfg)
    columns["alpha_opt"] = [p.alpha for p in curve]
    if args.raw_fidelity:
        columns["fidelity_adaptive"] = [
            fidelity(superiteration_schedule(p.alpha, args.n_samples, p.total_time).times, True)
            for p in curve]
    else:
        columns["fidelity_adaptive"] = [1.0 - p.objective for p in curve]
    if not args.skip_rra:
        # Budget-matched random baseline: the half-normal width is fixed
        # by the mean total time, sigma = (T/N) sqrt(pi/2), and the same
        # draws are reused across the grid so the curve is smooth.
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence((args.seed, 977))))
        base = np.abs(rng.normal(size=(args.n_samples, args.rra_samples)))
        means, p10, p90 = [], [], []
        for t in t_grid:
            sigma = (t / args.n_samples) * math.sqrt(math.pi / 2.0)
            shots = 1.0 - objective.batch(sigma * base)
            means.append(float(shots.mean()))
            p10.append(float(np.percentile(shots, 10)))
            p90.append(float(np.percentile(shots, 90)))
        columns["fidelity_rra_mean"] = means
        columns["fidelity_rra_p10"] = p10
        columns["fidelity_rra_p90"] = p90

    header = ["total_time", "t_over_t0"] + list(columns)
    rows = [[t_grid[i], t_grid[i] / t0] + [columns[c][i] for c in columns]
            for i in range(len(t_grid))]
    result = {"t_grid": t_grid.tolist(), "t0": t0,
              **{c: list(map(float, columns[c])) for c in columns}}
    manifest = _manifest("curve", args, extras)
    _emit(args, manifest, result, header=header, rows=rows)
    return 0


def cmd_product_function(args) -> int:
    from .asymptotics import product_function
    n_terms = args.n_terms if args.n_terms else None
    if args.theta is not None:
        value = product_function(args.alpha, args.theta, n_terms)
        result = {"alpha": args.alpha, "theta": args.theta, "value": value}
        manifest = _manifest("product-function", args)
        _emit(args, manifest, result, header=["theta", "value"],
              rows=[[args.theta, value]])
        return 0
    thetas = np.geomspace(args.theta_min, args.theta_max, args.theta_points)
    values = product_function(args.alpha, thetas, n_terms)
    manifest = _manifest("product-function", args)
    _emit(args, manifest,
          {"alpha": args.alpha, "theta": thetas.tolist(), "value": values.tolist()},
          header=["theta", "value"], rows=list(map(list, zip(thetas, values))))
    return 0


def cmd_decay_fit(args) -> int:
    from .asymptotics import fit_decay_exponent
    fit = fit_decay_exponent(args.alpha, args.theta_max,
                             args.n_terms if args.n_terms else None,
                             theta_min=args.theta_min, n_windows=args.windows)
    result = {"alpha": args.alpha, "gamma": fit.gamma, "residual": fit.residual,
              "non_decaying": fit.non_decaying,
              "theta_range": list(fit.theta_range), "n_windows": args.windows}
    manifest = _manifest("decay-fit", args)
    rows = list(map(list, zip(fit.window_centers, fit.window_maxima)))
    _emit(args, manifest, result, header=["theta_center", "envelope_max"], rows=rows)
    return 0


def _spectral_input(args):
    """(spectrum, label) from a preset name, band file, or discrete CSV."""
    if args.preset:
        return PRESETS[args.preset](), args.preset
    if args.band_file:
        return band_from_json(args.band_file), args.band_file
    if args.spectrum_file:
        return load_spectrum_csv(args.spectrum_file), args.spectrum_file
    raise ValueError("schedule-fit needs --preset, --band-file, or --spectrum-file")


def _gap_to_target(spectrum, e_target: float) -> float:
    if isinstance(spectrum, ContinuousBand):
        lo, hi = spectrum.delta_min, spectrum.delta_max
        if lo < e_target < hi or e_target in (lo, hi):
            raise ValueError(f"target {e_target} must lie outside the band [{lo}, {hi}]")
        return min(abs(lo - e_target), abs(hi - e_target))
    gaps = np.abs(spectrum.energies - e_target)
    gaps = gaps[gaps > 0]
    if len(gaps) == 0:
        raise ValueError("spectrum has no level away from the target")
    return float(gaps.min())


def cmd_schedule_fit(args) -> int:
    spectrum, label = _spectral_input(args)
    t0 = math.pi / _gap_to_target(spectrum, args.e_target)
    cfg = OptimizationConfig(seed=args.seed, alpha_bounds=(args.alpha_min, args.alpha_cap))

    def fit_one(total: float, dt: float):
        if dt >= total:
            raise ValueError(f"trotter step {dt} must be smaller than the total time {total}")
        objective = lambda sched: rsn_quadrature(
            spectrum, args.e_target, trotter_round(sched, dt))
        opt = optimize_alpha(objective, args.n_samples, total, cfg)
        rounded = trotter_round(
            superiteration_schedule(opt.alpha, args.n_samples, total), dt)
        return opt, rounded

    manifest_extra = {"spectral_input": label, "characteristic_time": t0}
    if args.sweep:
        dt_mults = _parse_floats(args.dt_mults)
        t_grid = np.geomspace(args.t_min_mult, args.t_max_mult, args.t_points) * t0
        rows, entries = [], []
        for dm in dt_mults:
            for t in t_grid:
                opt, rounded = fit_one(float(t), float(dm * t0))
                rows.append([t, t / t0, dm, opt.alpha, opt.objective, len(rounded)])
                entries.append({"total_time": float(t), "dt_mult": float(dm),
                                "alpha_opt": opt.alpha, "zeta": opt.objective,
                                "surviving_times": len(rounded)})
        manifest = _manifest("schedule-fit", args, manifest_extra)
        _emit(args, manifest, {"points": entries},
              header=["total_time", "t_over_t0", "dt_mult", "alpha_opt", "zeta",
                      "surviving_times"],
              rows=rows)
        return 0
    total = args.total_time if args.total_time else args.t0_multiple * t0
    if args.trotter_dt <= 0:
        raise ValueError("--trotter-dt must be positive (or use --sweep)")
    opt, rounded = fit_one(total, args.trotter_dt)
    result = {"alpha_opt": opt.alpha, "zeta": opt.objective, "flat": opt.flat,
              "total_time": total, "trotter_dt": args.trotter_dt,
              "schedule": rounded.times.tolist(),
              "surviving_times": len(rounded)}
    manifest = _manifest("schedule-fit", args, manifest_extra)
    _emit(args, manifest, result, header=["index", "time"],
          rows=[[i, t] for i, t in enumerate(rounded.times)])
    return 0


def cmd_spectrum(args) -> int:
    spec = HamiltonianSpec(model=args.model, length=args.length,
                           coupling=args.coupling, field=args.field,
                           boundary=args.boundary or "", sector=args.sector or "")
    eig = eigendecompose(build_sector_hamiltonian(spec))
    gap = minimum_gap(eig)
    result = {"eigenvalues": eig.eigenvalues.tolist(),
              "ground_energy": float(eig.eigenvalues[0]),
              "gap": gap, "characteristic_time": math.pi / gap,
              "sector_dim": eig.sector_dim}
    manifest = _manifest("spectrum", args, {"gap": gap, "sector_dim": eig.sector_dim})
    rows = [[i, e] for i, e in enumerate(eig.eigenvalues)]
    _emit(args, manifest, result, header=["index", "energy"], rows=rows)
    return 0


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file path (default: print JSON to stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format when --out is given")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--config", help="JSON file of flag defaults; flags override it")


def _add_band_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--band", nargs=2, type=float, default=[0.1, 1.0],
                   metavar=("DMIN", "DMAX"), help="gap band edges")


def _add_model_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--model", choices=("xx", "tfim"), required=required)
    p.add_argument("--length", type=int, default=10)
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--field", type=float, default=1.0)
    p.add_argument("--boundary", choices=("open", "periodic"), default=None)
    p.add_argument("--sector", default=None,
                   help="zero_magnetization, even_parity, full, or auto")
    p.add_argument("--initial-state", choices=("e1", "fusion", "plus"), default=None)
    p.add_argument("--basis-index", type=int, default=None,
                   help="start from this ordered sector basis vector")


def _add_alpha_bounds(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha-min", type=float, default=1.0)
    p.add_argument("--alpha-cap", type=float, default=2.0,
                   help="upper bound of the ratio search")


def build_parser() -> tuple:
    parser = argparse.ArgumentParser(
        prog="rodeo-sched",
        description="Evaluate and optimize filtering time schedules.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {}

    p = sub.add_parser("rsn", help="residual weight of a schedule on a spectrum")
    _add_band_flags(p)
    p.add_argument("--band-file", help="JSON band description")
    p.add_argument("--spectrum-file", help="discrete spectrum CSV (energy,weight)")
    p.add_argument("--e-target", type=float, default=0.0)
    p.add_argument("--times", help="comma-separated time samples")
    p.add_argument("--schedule-file", help="schedule CSV or JSON")
    p.add_argument("--alpha", type=float, help="geometric ratio (with --total-time)")
    p.add_argument("--n-samples", type=int, default=10)
    p.add_argument("--total-time", type=float)
    _add_output_flags(p)
    p.set_defaults(func=cmd_rsn)
    commands["rsn"] = p

    p = sub.add_parser("optimize-times", help="full schedule optimization on a band")
    _add_band_flags(p)
    p.add_argument("--n-samples", type=int, default=10)
    p.add_argument("--total-time", type=float)
    p.add_argument("--t0-multiple", type=float, default=1.0,
                   help="time budget in units of pi/DMIN (when --total-time absent)")
    p.add_argument("--budget", type=int, default=60000)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--tolerance", type=float, default=0.01)
    _add_output_flags(p)
    p.set_defaults(func=cmd_optimize_times)
    commands["optimize-times"] = p

    p = sub.add_parser("optimize-alpha", help="geometric-ratio optimization")
    _add_band_flags(p)
    _add_model_flags(p, required=False)
    _add_alpha_bounds(p)
    p.add_argument("--n-samples", type=int, default=10)
    p.add_argument("--total-time", type=float)
    p.add_argument("--t0-multiple", type=float, default=1.0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_optimize_alpha)
    commands["optimize-alpha"] = p

    p = sub.add_parser("table1", help="optimized residual weight at four time budgets")
    _add_band_flags(p)
    p.add_argument("--n-samples", type=int, default=10)
    p.add_argument("--budget", type=int, default=30000)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--tolerance", type=float, default=0.01)
    _add_output_flags(p)
    p.set_defaults(func=cmd_table1)
    commands["table1"] = p

    p = sub.add_parser("curve", help="fidelity-vs-time curves for a spin chain")
    _add_model_flags(p, required=True)
    _add_alpha_bounds(p)
    p.add_argument("--n-samples", type=int, default=100)
    p.add_argument("--alphas", default="2.0,1.5,1.2",
                   help="comma-separated fixed ratios to plot")
    p.add_argument("--t-min-mult", type=float, default=0.1,
                   help="grid start in characteristic-time units")
    p.add_argument("--t-max-mult", type=float, default=20.0)
    p.add_argument("--t-points", type=int, default=12)
    p.add_argument("--monotone", action="store_true",
                   help="constrain the adaptive ratio to be nonincreasing in time")
    p.add_argument("--skip-rra", action="store_true",
                   help="omit the Gaussian-random baseline columns")
    p.add_argument("--rra-samples", type=int, default=50,
                   help="Monte Carlo schedules per width")
    p.add_argument("--raw-fidelity", action="store_true",
                   help="report unnormalized surviving target weight instead of "
                        "the post-selected fidelity")
    _add_output_flags(p)
    p.set_defaults(func=cmd_curve)
    commands["curve"] = p

    p = sub.add_parser("product-function", help="evaluate the suppression product")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float)
    p.add_argument("--theta-min", type=float, default=0.1)
    p.add_argument("--theta-max", type=float, default=100.0)
    p.add_argument("--theta-points", type=int, default=200)
    p.add_argument("--n-terms", type=int, default=0,
                   help="cycle count (0 means the infinite-product truncation)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_product_function)
    commands["product-function"] = p

    p = sub.add_parser("decay-fit", help="power-law fit of the suppression envelope")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta-min", type=float, default=100.0)
    p.add_argument("--theta-max", type=float, default=1e4)
    p.add_argument("--windows", type=int, default=50)
    p.add_argument("--n-terms", type=int, default=0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_decay_fit)
    commands["decay-fit"] = p

    p = sub.add_parser("schedule-fit",
                       help="optimal ratio for a Trotter-rounded schedule")
    p.add_argument("--preset", choices=tuple(PRESETS))
    p.add_argument("--band-file")
    p.add_argument("--spectrum-file")
    p.add_argument("--e-target", type=float, default=-1.0)
    p.add_argument("--n-samples", type=int, default=100)
    p.add_argument("--total-time", type=float)
    p.add_argument("--t0-multiple", type=float, default=1.0)
    p.add_argument("--trotter-dt", type=float, default=0.0)
    p.add_argument("--sweep", action="store_true",
                   help="emit a grid over total time and Trotter step")
    p.add_argument("--t-min-mult", type=float, default=0.1)
    p.add_argument("--t-max-mult", type=float, default=10.0)
    p.add_argument("--t-points", type=int, default=20)
    p.add_argument("--dt-mults", default="0.01,0.1,1.0",
                   help="Trotter steps in characteristic-time units (sweep mode)")
    _add_alpha_bounds(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_schedule_fit)
    commands["schedule-fit"] = p

    p = sub.add_parser("spectrum", help="sector eigenvalues of a spin chain")
    _add_model_flags(p, required=True)
    _add_output_flags(p)
    p.set_defaults(func=cmd_spectrum)
    commands["spectrum"] = p

    return parser, commands


def _apply_config(commands: dict, argv: list) -> None:
    """Install JSON config values as defaults of the active subparser.

    Explicit flags still win because defaults only fill dests the parse
    left untouched. Defaults must land on the subparser itself: the top
    parser's namespace is rebuilt by the subparser pass.
    """
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if not path:
        return
    sub_name = argv[0] if argv and not argv[0].startswith("-") else None
    if sub_name not in commands:
        return
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    subparser = commands[sub_name]
    known = {a.dest for a in subparser._actions}
    defaults = {}
    for key, value in raw.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise ValueError(f"unknown config key {key!r} in {path} for {sub_name}")
        defaults[dest] = value
    subparser.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = build_parser()
    try:
        _apply_config(commands, argv)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    args = parser.parse_args(argv)
    args._t_start = time.perf_counter()
    try:
        return args.func(args)
    except (ValueError, OSError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
