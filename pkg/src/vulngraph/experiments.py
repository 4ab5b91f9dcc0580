"""End-to-end experiment harness: build graphs, run ensembles, persist outputs.

Each experiment writes, into its output directory:

* raw per-run C_t samples (``<name>_runs.csv``),
* aggregated curves / tables (``<name>_curves.csv`` etc.),
* a summary JSON with every derived number,
* a rendered PNG and a gnuplot-dialect script for the figure,
* ``manifest.json`` listing parameters, derived seeds, and files.

Everything is a pure function of (experiment defaults, overrides, seed), so
re-running an experiment reproduces its primary outputs byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import plots
from ._rng import derive_seed
from .analytic import (
    Parameters,
    Strategy,
    ThresholdVerdict,
    solve_steady_state,
    steady_state_bounds,
    strategy_apply,
    strategy_condition,
    threshold_check,
)
from .distributions import DegreeDistribution, power_law_exponent_for_mean
from .errors import ConstructionError, DomainError
from .graphs import VulnerabilityGraph, empirical_distribution, gen_powerlaw, gen_random, gen_regular
from .simulate import (
    DEFAULT_BURN_IN,
    DEFAULT_HORIZON,
    DEFAULT_N_WINDOWS,
    DEFAULT_WINDOW,
    SimConfig,
    fit_windows,
    run_ensemble,
    simulate,
)

DEFAULT_ALPHA = 0.05
DEFAULT_BETA = 0.2
DEFAULT_GAMMA = 0.1

EXPERIMENT_NAMES = (
    "stability",
    "topology_regular",
    "topology_random",
    "topology_powerlaw",
    "strategies_1v2",
    "strategies_2v1",
    "strategies_3v2",
    "bounds_surface",
    "threshold_validation",
)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    output_dir: Path
    seed: int = 1
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in EXPERIMENT_NAMES:
            raise DomainError(
                f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENT_NAMES)}"
            )
        object.__setattr__(self, "output_dir", Path(self.output_dir))


@dataclass(frozen=True, eq=False)
class SurfaceGrid:
    """One bounds-vs-simulation surface: two swept rates, one held fixed."""

    axis1: str
    axis1_values: np.ndarray
    axis2: str
    axis2_values: np.ndarray
    fixed: str
    fixed_value: float
    simulated: np.ndarray  # (len(axis1), len(axis2)) steady-state mean C_t
    stderr: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.axis1_values) <= 0) or np.any(np.diff(self.axis2_values) <= 0):
            raise DomainError("grid values must be strictly increasing")
        if np.any(self.lower > self.upper):
            raise DomainError("every cell must satisfy lower <= upper")


@dataclass(frozen=True, eq=False)
class ThresholdExceedance:
    exceed_fraction: float
    verdict: ThresholdVerdict
    runs: int
    sample_times: np.ndarray
    run_ct: np.ndarray  # (runs, samples)
    threshold_count: float


def run_experiment(spec: ExperimentSpec) -> dict:
    """Run one named experiment; returns (and writes) its manifest."""
    spec.output_dir.mkdir(parents=True, exist_ok=True)
    runner = {
        "stability": _run_stability,
        "topology_regular": _run_topology_regular,
        "topology_random": _run_topology_random,
        "topology_powerlaw": _run_topology_powerlaw,
        "strategies_1v2": _run_strategies,
        "strategies_2v1": _run_strategies,
        "strategies_3v2": _run_strategies,
        "bounds_surface": _run_bounds_surface,
        "threshold_validation": _run_threshold_validation,
    }[spec.name]
    manifest = runner(spec)
    manifest_path = spec.output_dir / "manifest.json"
    _write_json(manifest_path, manifest)
    return manifest


def threshold_exceedance(
    graph: VulnerabilityGraph,
    params: Parameters,
    c: float,
    eps: float,
    runs: int,
    base_seed: int,
    horizon: float = DEFAULT_HORIZON,
    burn_in: float = DEFAULT_BURN_IN,
) -> ThresholdExceedance:
    """Fraction of post-burn-in C_t samples exceeding c*n, with the analytic
    threshold verdict computed on the graph's empirical degree distribution."""
    verdict = threshold_check(params, empirical_distribution(graph), graph.n, c, eps)
    threshold = c * graph.n
    curves = []
    sample_times = None
    exceed = total = 0
    for i in range(runs):
        cfg = SimConfig(params=params, horizon=horizon, burn_in=burn_in, seed=derive_seed(base_seed, i))
        traj = simulate(graph, cfg)
        sample_times = traj.sample_times
        curves.append(traj.ct_samples)
        steady = traj.ct_samples[traj.sample_times > burn_in]
        exceed += int(np.sum(steady > threshold))
        total += steady.size
    return ThresholdExceedance(
        exceed_fraction=exceed / total,
        verdict=verdict,
        runs=runs,
        sample_times=sample_times,
        run_ct=np.vstack(curves),
        threshold_count=threshold,
    )


def search_powerlaw_graphs(
    n: int,
    min_degree: int,
    exponents: list[float],
    mean_window: tuple[float, float],
    budget: int,
    base_seed: int,
) -> list[tuple[float, VulnerabilityGraph]]:
    """For each exponent, generate candidates until one lands with empirical
    mean degree inside `mean_window`; the budget caps total candidates."""
    lo, hi = mean_window
    found: list[tuple[float, VulnerabilityGraph]] = []
    spent = 0
    for nu in exponents:
        hit = None
        while hit is None:
            if spent >= budget:
                raise ConstructionError(
                    f"candidate budget {budget} exhausted; found {len(found)} of "
                    f"{len(exponents)} graphs with mean degree in [{lo}, {hi}]"
                )
            g = gen_powerlaw(n, min_degree, nu, derive_seed(base_seed, spent))
            spent += 1
            if lo <= g.mean_degree <= hi:
                hit = g
        found.append((nu, hit))
    return found


# -- shared machinery ----------------------------------------------------------

def _resolve(defaults: dict, overrides: dict) -> dict:
    unknown = set(overrides) - set(defaults)
    if unknown:
        raise DomainError(f"unknown override keys: {sorted(unknown)}")
    out = dict(defaults)
    out.update(overrides)
    return out


def _params_from(cfg: dict) -> Parameters:
    return Parameters(cfg["alpha"], cfg["beta"], cfg["gamma"], cfg["eta"])


def _params_dict(p: Parameters) -> dict:
    return {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "eta": p.eta}


def _fmt(value) -> str:
    if isinstance(value, float) or isinstance(value, np.floating):
        return repr(float(value))
    return str(value)


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_runs_csv(path, labeled_results) -> None:
    def rows():
        for label, res in labeled_results:
            for run in range(res.run_ct.shape[0]):
                for t, ct in zip(res.sample_times, res.run_ct[run]):
                    yield label, run, t, int(ct)

    _write_csv(path, ["label", "run", "t", "ct"], rows())


def _write_curves_csv(path, sample_times, curves: dict[str, np.ndarray]) -> None:
    labels = list(curves)
    rows = (
        [t] + [curves[label][i] for label in labels]
        for i, t in enumerate(sample_times)
    )
    _write_csv(path, ["t"] + labels, rows)


def _ensemble(graph, params, cfg_dict, base_seed, keep_runs=True):
    cfg = SimConfig(
        params=params,
        horizon=cfg_dict["horizon"],
        burn_in=cfg_dict["burn_in"],
        sample_interval=cfg_dict.get("sample_interval", 1.0),
    )
    window, n_windows = fit_windows(
        cfg.horizon, cfg.burn_in, cfg_dict.get("window"), cfg_dict.get("n_windows")
    )
    return run_ensemble(
        graph,
        cfg,
        runs=cfg_dict["runs"],
        base_seed=base_seed,
        window=window,
        n_windows=n_windows,
        keep_run_curves=keep_runs,
    )


# -- stability -----------------------------------------------------------------

def _run_stability(spec: ExperimentSpec) -> dict:
    cfg = _resolve(
        {
            "n": 2000,
            "regular_degree": 5,
            "random_edge_prob": 0.002,
            "powerlaw_min_degree": 2,
            "powerlaw_mean": 4.0,
            "alpha": DEFAULT_ALPHA,
            "beta": DEFAULT_BETA,
            "gamma": DEFAULT_GAMMA,
            "eta": 0.0,
            "runs": 100,
            "horizon": DEFAULT_HORIZON,
            "burn_in": DEFAULT_BURN_IN,
            "window": DEFAULT_WINDOW,
            "n_windows": DEFAULT_N_WINDOWS,
            "stddev_threshold": 0.03,
        },
        spec.overrides,
    )
    params = _params_from(cfg)
    n = cfg["n"]
    nu = power_law_exponent_for_mean(cfg["powerlaw_min_degree"], n, cfg["powerlaw_mean"])
    graph_seeds = {label: derive_seed(spec.seed, i) for i, label in enumerate(("regular", "random", "powerlaw"))}
    graphs = {
        "regular": gen_regular(n, cfg["regular_degree"], graph_seeds["regular"]),
        "random": gen_random(n, cfg["random_edge_prob"], graph_seeds["random"]),
        "powerlaw": gen_powerlaw(n, cfg["powerlaw_min_degree"], nu, graph_seeds["powerlaw"]),
    }
    ensemble_seeds = {label: derive_seed(spec.seed, 100 + i) for i, label in enumerate(graphs)}

    results = {}
    summary = {}
    for label, graph in graphs.items():
        res = _ensemble(graph, params, cfg, ensemble_seeds[label], keep_runs=False)
        results[label] = res
        stddev = res.estimate.q_i_stddev
        summary[label] = {
            "mean_degree": graph.mean_degree,
            "q_bar": res.q_bar,
            "fraction_below_threshold": float(np.mean(stddev < cfg["stddev_threshold"])),
            "max_stddev": float(stddev.max()),
        }

    per_node = spec.output_dir / "stability_stddev.csv"
    _write_csv(
        per_node,
        ["graph", "node", "q_i", "q_i_stddev"],
        (
            (label, node, res.estimate.q_i[node], res.estimate.q_i_stddev[node])
            for label, res in results.items()
            for node in range(n)
        ),
    )
    bins = np.arange(0.0, 0.1001, 0.0025)
    hist_csv = spec.output_dir / "stability_histogram.csv"
    counts = {
        label: np.histogram(res.estimate.q_i_stddev, bins=bins)[0]
        for label, res in results.items()
    }
    _write_csv(
        hist_csv,
        ["bin_lo", "bin_hi"] + list(counts),
        (
            [bins[i], bins[i + 1]] + [int(counts[label][i]) for label in counts]
            for i in range(bins.size - 1)
        ),
    )
    summary_path = spec.output_dir / "stability_summary.json"
    _write_json(summary_path, {"powerlaw_exponent": nu, "graphs": summary})
    png = spec.output_dir / "stability.png"
    plots.render_histogram(
        png,
        {label: res.estimate.q_i_stddev for label, res in results.items()},
        bins,
        "per-node stddev of windowed compromised fraction",
    )
    gp = spec.output_dir / "stability.gp"
    plots.gnuplot_histogram(gp, hist_csv.name, list(results))

    return _manifest(
        spec,
        cfg,
        seeds={"graphs": graph_seeds, "ensembles": ensemble_seeds},
        files=[per_node, hist_csv, summary_path, png, gp],
        extra={"powerlaw_exponent": nu},
    )


# -- topology comparisons --------------------------------------------------------

def _run_topology_regular(spec: ExperimentSpec) -> dict:
    cfg = _resolve(_topology_defaults({"degrees": [2, 3, 4]}), spec.overrides)
    labeled = [
        (f"degree {d}", lambda seed, d=d: gen_regular(cfg["n"], d, seed))
        for d in cfg["degrees"]
    ]
    return _topology_common(spec, cfg, labeled)


def _run_topology_random(spec: ExperimentSpec) -> dict:
    cfg = _resolve(_topology_defaults({"edge_probs": [0.001, 0.002, 0.003]}), spec.overrides)
    labeled = [
        (f"edge prob {p}", lambda seed, p=p: gen_random(cfg["n"], p, seed))
        for p in cfg["edge_probs"]
    ]
    return _topology_common(spec, cfg, labeled)


def _run_topology_powerlaw(spec: ExperimentSpec) -> dict:
    cfg = _resolve(
        _topology_defaults(
            {
                "min_degree": 2,
                "exponents": [1.421, 1.424, 1.429],
                "mean_window": None,  # None: auto-derive from the pmf means
                "candidate_budget": 3000,
            }
        ),
        spec.overrides,
    )
    window = cfg["mean_window"]
    if window is None:
        means = [
            DegreeDistribution.power_law(cfg["min_degree"], nu, cfg["n"]).mean
            for nu in cfg["exponents"]
        ]
        window = (min(means) - 0.05, max(means) + 0.05)
    found = search_powerlaw_graphs(
        cfg["n"],
        cfg["min_degree"],
        cfg["exponents"],
        tuple(window),
        cfg["candidate_budget"],
        derive_seed(spec.seed, 0),
    )
    labeled = [
        (f"exponent {nu}", lambda seed, g=graph: g) for nu, graph in found
    ]
    extra = {
        "mean_window": list(window),
        "found_mean_degrees": {f"{nu}": g.mean_degree for nu, g in found},
    }
    return _topology_common(spec, cfg, labeled, extra=extra)


def _topology_defaults(specific: dict) -> dict:
    base = {
        "n": 2000,
        "alpha": DEFAULT_ALPHA,
        "beta": DEFAULT_BETA,
        "gamma": DEFAULT_GAMMA,
        "eta": 0.0,
        "runs": 100,
        "horizon": DEFAULT_HORIZON,
        "burn_in": DEFAULT_BURN_IN,
    }
    base.update(specific)
    return base


def _topology_common(spec: ExperimentSpec, cfg: dict, labeled_builders, extra=None) -> dict:
    params = _params_from(cfg)
    graph_seeds = {}
    ensemble_seeds = {}
    results = []
    summary = {}
    for i, (label, builder) in enumerate(labeled_builders):
        gseed = derive_seed(spec.seed, i)
        graph = builder(gseed)
        graph_seeds[label] = gseed
        eseed = derive_seed(spec.seed, 100 + i)
        ensemble_seeds[label] = eseed
        res = _ensemble(graph, params, cfg, eseed)
        results.append((label, res))
        solved = solve_steady_state(params, empirical_distribution(graph))
        summary[label] = {
            "mean_degree": graph.mean_degree,
            "q_solved": solved.q,
            "q_bar": res.q_bar,
            "steady_mean_ct": res.steady_mean,
            "steady_stderr": res.steady_stderr,
        }
    ordering = [label for label, _ in sorted(results, key=lambda lr: lr[1].steady_mean)]

    runs_csv = spec.output_dir / f"{spec.name}_runs.csv"
    _write_runs_csv(runs_csv, results)
    curves_csv = spec.output_dir / f"{spec.name}_curves.csv"
    curves = {label: res.mean_ct for label, res in results}
    _write_curves_csv(curves_csv, results[0][1].sample_times, curves)
    summary_path = spec.output_dir / f"{spec.name}_summary.json"
    _write_json(summary_path, {"per_graph": summary, "ordering_by_steady_mean": ordering})
    png = spec.output_dir / f"{spec.name}.png"
    plots.render_curves(png, results[0][1].sample_times, curves, "mean compromised count")
    gp = spec.output_dir / f"{spec.name}.gp"
    plots.gnuplot_curves(gp, curves_csv.name, list(curves), "mean compromised count")

    return _manifest(
        spec,
        cfg,
        seeds={"graphs": graph_seeds, "ensembles": ensemble_seeds},
        files=[runs_csv, curves_csv, summary_path, png, gp],
        extra=extra,
    )


# -- strategy comparisons ---------------------------------------------------------

_STRATEGY_SETUPS = {
    # baseline (alpha, beta, gamma, eta), omega, and the claimed-better /
    # compared-against strategies; each baseline satisfies its condition
    "strategies_1v2": ((0.1, 0.05, 0.1, 0.0), 0.05, (Strategy.S1, Strategy.S2)),
    "strategies_2v1": ((0.05, 0.3, 0.05, 0.0), 0.04, (Strategy.S2, Strategy.S1)),
    "strategies_3v2": ((0.1, 0.2, 0.1, 0.0), 0.05, (Strategy.S3, Strategy.S2)),
}


def _run_strategies(spec: ExperimentSpec) -> dict:
    (a, b, g, e), omega, (first, second) = _STRATEGY_SETUPS[spec.name]
    cfg = _resolve(
        {
            "n": 2000,
            "edge_prob": 0.002,
            "alpha": a,
            "beta": b,
            "gamma": g,
            "eta": e,
            "omega": omega,
            "runs": 100,
            "horizon": DEFAULT_HORIZON,
            "burn_in": DEFAULT_BURN_IN,
        },
        spec.overrides,
    )
    base = _params_from(cfg)
    graph_seed = derive_seed(spec.seed, 0)
    graph = gen_random(cfg["n"], cfg["edge_prob"], graph_seed)
    dist = empirical_distribution(graph)
    condition = strategy_condition(base, dist, cfg["omega"])

    variants = {"base": base}
    for strat in (first, second):
        variants[strat.value] = strategy_apply(base, strat, cfg["omega"])

    results = []
    summary = {}
    ensemble_seeds = {}
    for i, (label, params) in enumerate(variants.items()):
        eseed = derive_seed(spec.seed, 100 + i)
        ensemble_seeds[label] = eseed
        res = _ensemble(graph, params, cfg, eseed)
        results.append((label, res))
        summary[label] = {
            "params": _params_dict(params),
            "q_solved": solve_steady_state(params, dist).q,
            "steady_mean_ct": res.steady_mean,
            "steady_stderr": res.steady_stderr,
        }
    compared = {label: res.steady_mean for label, res in results if label != "base"}
    measured_better = min(compared, key=compared.get)

    runs_csv = spec.output_dir / f"{spec.name}_runs.csv"
    _write_runs_csv(runs_csv, results)
    curves_csv = spec.output_dir / f"{spec.name}_curves.csv"
    curves = {label: res.mean_ct for label, res in results}
    _write_curves_csv(curves_csv, results[0][1].sample_times, curves)
    summary_path = spec.output_dir / f"{spec.name}_summary.json"
    _write_json(
        summary_path,
        {
            "condition": {
                "s1_beats_s2": condition.s1_beats_s2.value,
                "s2_beats_s1": condition.s2_beats_s1.value,
                "s3_beats_s2": condition.s3_beats_s2.value,
            },
            "claimed_better": first.value,
            "measured_better": measured_better,
            "per_variant": summary,
        },
    )
    png = spec.output_dir / f"{spec.name}.png"
    plots.render_curves(png, results[0][1].sample_times, curves, "mean compromised count")
    gp = spec.output_dir / f"{spec.name}.gp"
    plots.gnuplot_curves(gp, curves_csv.name, list(curves), "mean compromised count")

    return _manifest(
        spec,
        cfg,
        seeds={"graph": graph_seed, "ensembles": ensemble_seeds},
        files=[runs_csv, curves_csv, summary_path, png, gp],
        extra={"claimed_better": first.value, "measured_better": measured_better},
    )


# -- bounds surface ----------------------------------------------------------------

def _run_bounds_surface(spec: ExperimentSpec) -> dict:
    cfg = _resolve(
        {
            "graph_kind": "regular",  # regular | random | powerlaw
            "n": 2000,
            "regular_degree": 5,
            "random_edge_prob": 0.002,
            "powerlaw_min_degree": 2,
            "powerlaw_mean": 4.0,
            "axes": ("alpha", "beta"),
            "fixed_value": 0.1,
            "grid": [0.1, 0.2, 0.3, 0.4, 0.5],
            "eta": 0.0,
            "runs": 30,
            "horizon": DEFAULT_HORIZON,
            "burn_in": DEFAULT_BURN_IN,
        },
        spec.overrides,
    )
    axis1, axis2 = cfg["axes"]
    if {axis1, axis2} - {"alpha", "beta", "gamma"} or axis1 == axis2:
        raise DomainError("axes must be two distinct names among alpha/beta/gamma")
    (fixed,) = {"alpha", "beta", "gamma"} - {axis1, axis2}
    grid = np.asarray(cfg["grid"], dtype=float)

    graph_seed = derive_seed(spec.seed, 0)
    graph = _build_surface_graph(cfg, graph_seed)
    dist = empirical_distribution(graph)

    shape = (grid.size, grid.size)
    simulated = np.empty(shape)
    stderr = np.empty(shape)
    lower = np.empty(shape)
    upper = np.empty(shape)
    cell_seeds = {}
    for i, v1 in enumerate(grid):
        for j, v2 in enumerate(grid):
            rates = {axis1: float(v1), axis2: float(v2), fixed: cfg["fixed_value"], "eta": cfg["eta"]}
            params = Parameters(rates["alpha"], rates["beta"], rates["gamma"], rates["eta"])
            seed = derive_seed(spec.seed, 1 + i * grid.size + j)
            cell_seeds[f"{v1},{v2}"] = seed
            res = _ensemble(graph, params, cfg, seed, keep_runs=False)
            simulated[i, j] = res.steady_mean
            stderr[i, j] = res.steady_stderr
            lo, hi = steady_state_bounds(params, dist)
            lower[i, j] = lo * graph.n
            upper[i, j] = hi * graph.n
    surface = SurfaceGrid(
        axis1=axis1,
        axis1_values=grid,
        axis2=axis2,
        axis2_values=grid,
        fixed=fixed,
        fixed_value=cfg["fixed_value"],
        simulated=simulated,
        stderr=stderr,
        lower=lower,
        upper=upper,
    )
    contained = (lower - stderr <= simulated) & (simulated <= upper + stderr)

    cells_csv = spec.output_dir / "bounds_surface_cells.csv"
    _write_csv(
        cells_csv,
        [axis1, axis2, "mean_ct", "stderr", "lower", "upper", "contained"],
        (
            (
                grid[i],
                grid[j],
                simulated[i, j],
                stderr[i, j],
                lower[i, j],
                upper[i, j],
                int(contained[i, j]),
            )
            for i in range(grid.size)
            for j in range(grid.size)
        ),
    )
    summary_path = spec.output_dir / "bounds_surface_summary.json"
    _write_json(
        summary_path,
        {
            "graph_kind": cfg["graph_kind"],
            "mean_degree": graph.mean_degree,
            "axes": [axis1, axis2],
            "fixed": {fixed: cfg["fixed_value"]},
            "contained_fraction": float(contained.mean()),
            "cells_total": int(contained.size),
        },
    )
    png = spec.output_dir / "bounds_surface.png"
    plots.render_surface(png, axis1, grid, axis2, grid, simulated, lower, upper)
    gp = spec.output_dir / "bounds_surface.gp"
    plots.gnuplot_surface(gp, cells_csv.name, axis1, axis2, grid.size)

    return _manifest(
        spec,
        cfg,
        seeds={"graph": graph_seed, "cells": cell_seeds},
        files=[cells_csv, summary_path, png, gp],
        extra={"contained_fraction": float(contained.mean())},
    )


def _build_surface_graph(cfg: dict, seed: int) -> VulnerabilityGraph:
    kind = cfg["graph_kind"]
    n = cfg["n"]
    if kind == "regular":
        return gen_regular(n, cfg["regular_degree"], seed)
    if kind == "random":
        return gen_random(n, cfg["random_edge_prob"], seed)
    if kind == "powerlaw":
        nu = power_law_exponent_for_mean(cfg["powerlaw_min_degree"], n, cfg["powerlaw_mean"])
        return gen_powerlaw(n, cfg["powerlaw_min_degree"], nu, seed)
    raise DomainError(f"unknown graph kind {kind!r}")


# -- threshold validation -------------------------------------------------------------

def _run_threshold_validation(spec: ExperimentSpec) -> dict:
    cfg = _resolve(
        {
            "n": 2000,
            "edge_prob": 0.002,
            "alpha": 0.25,
            "beta": 0.002,
            "gamma": 0.1,
            "eta": 0.0,
            "c": 0.5,
            "epsilon": 0.159,
            "runs": 10,
            "horizon": DEFAULT_HORIZON,
            "burn_in": DEFAULT_BURN_IN,
        },
        spec.overrides,
    )
    params = _params_from(cfg)
    graph_seed = derive_seed(spec.seed, 0)
    graph = gen_random(cfg["n"], cfg["edge_prob"], graph_seed)
    runs_seed = derive_seed(spec.seed, 1)
    outcome = threshold_exceedance(
        graph,
        params,
        cfg["c"],
        cfg["epsilon"],
        cfg["runs"],
        runs_seed,
        horizon=cfg["horizon"],
        burn_in=cfg["burn_in"],
    )
    # The z = 2 reading: the epsilon whose upper-tail quantile is exactly 2.
    eps_for_z2 = 0.5 * math.erfc(2.0 / math.sqrt(2.0))
    verdict_z2 = threshold_check(
        params, empirical_distribution(graph), graph.n, cfg["c"], eps_for_z2
    )
    solved = solve_steady_state(params, empirical_distribution(graph))

    runs_csv = spec.output_dir / "threshold_validation_runs.csv"
    _write_runs_csv(runs_csv, [("threshold", outcome)])
    summary_path = spec.output_dir / "threshold_validation_summary.json"
    _write_json(
        summary_path,
        {
            "threshold_count": outcome.threshold_count,
            "exceed_fraction": outcome.exceed_fraction,
            "epsilon": cfg["epsilon"],
            "within_epsilon": outcome.exceed_fraction <= cfg["epsilon"],
            "q_solved": solved.q,
            "verdict_from_epsilon": _verdict_dict(outcome.verdict),
            "verdict_z_equals_2": _verdict_dict(verdict_z2),
        },
    )
    png = spec.output_dir / "threshold_validation.png"
    plots.render_threshold_scatter(png, outcome.sample_times, outcome.run_ct, outcome.threshold_count)
    gp = spec.output_dir / "threshold_validation.gp"
    plots.gnuplot_threshold(gp, runs_csv.name, outcome.threshold_count)

    return _manifest(
        spec,
        cfg,
        seeds={"graph": graph_seed, "runs": runs_seed},
        files=[runs_csv, summary_path, png, gp],
        extra={"exceed_fraction": outcome.exceed_fraction},
    )


def _verdict_dict(v: ThresholdVerdict) -> dict:
    return {
        "sufficient_holds": v.sufficient_holds,
        "sufficient_sharp_holds": v.sufficient_sharp_holds,
        "necessary_holds": v.necessary_holds,
        "lambda": v.lam,
        "z": v.z,
        "rhs": v.rhs,
        "q_lower": v.q_lower,
        "q_upper": v.q_upper,
    }


def _manifest(spec: ExperimentSpec, cfg: dict, seeds, files, extra=None) -> dict:
    manifest = {
        "experiment": spec.name,
        "seed": spec.seed,
        "params": _jsonable(cfg),
        "seeds": _jsonable(seeds),
        "files": sorted(Path(f).name for f in files),
    }
    if extra:
        manifest["extra"] = _jsonable(extra)
    return manifest


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
