"""Command-line front end.

Contract: stdout carries data (JSON, one object per line, or file paths),
stderr carries diagnostics; exit code 0 on success, 2 on flag errors, 3 on
operational failures (with a machine-readable error JSON on stderr).
Randomized commands require --seed so every manifest is reproducible.

Distribution specs use a small grammar:
    regular:G | random:N:R | powerlaw:L:NU:N | empirical:PATH
where PATH points at a distribution JSON file.
"""

from __future__ import annotations

import json
import sys
from functools import wraps
from pathlib import Path

import click

from ._rng import derive_seed
from .analytic import (
    Parameters,
    Strategy,
    solve_steady_state,
    strategy_apply,
    strategy_condition,
    threshold_check,
)
from .distributions import (
    DegreeDistribution,
    Relation,
    order_cross_family,
    order_same_family,
    read_distribution_file,
    stochastic_order,
)
from .errors import VulngraphError
from .experiments import EXPERIMENT_NAMES, ExperimentSpec, run_experiment
from .graphs import (
    empirical_distribution,
    gen_powerlaw,
    gen_random,
    gen_regular,
    read_graph_file,
    write_graph_file,
)
from .simulate import SimConfig, fit_windows, run_ensemble, simulate


def _guarded(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (VulngraphError, OSError, ValueError) as exc:
            _emit_error(exc)
            sys.exit(3)

    return wrapper


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(payload, sort_keys=True), err=True)


def _print_json(obj) -> None:
    click.echo(json.dumps(obj, sort_keys=True))


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise click.UsageError("--config must contain a JSON object")
    return cfg


def _resolve(flag_value, config: dict, key: str, default=None, required: bool = False):
    """Flag beats config file beats built-in default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    if required and default is None:
        raise click.UsageError(f"missing required option --{key.replace('_', '-')}")
    return default


def parse_dist_spec(text: str) -> DegreeDistribution:
    kind, _, rest = text.partition(":")
    try:
        if kind == "regular":
            return DegreeDistribution.regular(int(rest))
        if kind == "random":
            n, r = rest.split(":")
            return DegreeDistribution.random(int(n), float(r))
        if kind == "powerlaw":
            l, nu, n = rest.split(":")
            return DegreeDistribution.power_law(int(l), float(nu), int(n))
        if kind == "empirical":
            return read_distribution_file(rest)
    except (ValueError, OSError) as exc:
        raise click.UsageError(f"bad distribution spec {text!r}: {exc}") from exc
    raise click.UsageError(
        f"bad distribution spec {text!r}; expected regular:G, random:N:R, "
        "powerlaw:L:NU:N, or empirical:PATH"
    )


def _params_options(fn):
    for name in ("eta", "gamma", "beta", "alpha"):
        fn = click.option(f"--{name}", type=float, default=None)(fn)
    return fn


def _resolve_params(config: dict, alpha, beta, gamma, eta) -> Parameters:
    return Parameters(
        alpha=_resolve(alpha, config, "alpha", required=True),
        beta=_resolve(beta, config, "beta", required=True),
        gamma=_resolve(gamma, config, "gamma", required=True),
        eta=_resolve(eta, config, "eta", default=0.0),
    )


def _gather_inputs(dists: tuple[str, ...], graphs: tuple[str, ...]):
    """Distributions from --dist specs and --graph files, --dist first."""
    out = []
    for spec in dists:
        out.append(("dist", spec, parse_dist_spec(spec)))
    for path in graphs:
        out.append(("graph", path, empirical_distribution(read_graph_file(path))))
    return out


@click.group()
def main():
    """Security analytics on vulnerability graphs: generators, the
    steady-state solver, ordering checks, strategy ranking, thresholds,
    simulation, and experiment reproduction."""


@main.command("gen")
@click.option("--type", "kind", type=click.Choice(["regular", "random", "powerlaw"]), required=True)
@click.option("--n", type=int, required=True)
@click.option("--degree", type=int, default=None, help="regular: node degree")
@click.option("--edge-prob", type=float, default=None, help="random: edge probability")
@click.option("--min-degree", type=int, default=None, help="powerlaw: minimum degree")
@click.option("--exponent", type=float, default=None, help="powerlaw: tail exponent")
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_guarded
def cmd_gen(kind, n, degree, edge_prob, min_degree, exponent, seed, out):
    """Generate a graph and write it in the plain-text edge format."""
    if kind == "regular":
        if degree is None:
            raise click.UsageError("--degree is required for --type regular")
        graph = gen_regular(n, degree, seed)
        spec = f"regular degree={degree}"
    elif kind == "random":
        if edge_prob is None:
            raise click.UsageError("--edge-prob is required for --type random")
        graph = gen_random(n, edge_prob, seed)
        spec = f"random edge_prob={edge_prob}"
    else:
        if min_degree is None or exponent is None:
            raise click.UsageError("--min-degree and --exponent are required for --type powerlaw")
        graph = gen_powerlaw(n, min_degree, exponent, seed)
        spec = f"powerlaw min_degree={min_degree} exponent={exponent}"
    write_graph_file(graph, out, comment=f"{spec} n={n} seed={seed}")
    _print_json(
        {
            "out": str(out),
            "n": graph.n,
            "edges": graph.m,
            "mean_degree": graph.mean_degree,
            "meta": dict(graph.meta) if graph.meta else None,
        }
    )


@main.command("solve")
@click.option("--dist", "dist_spec", default=None)
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_params_options
@click.option("--tol", type=float, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_guarded
def cmd_solve(dist_spec, graph_path, alpha, beta, gamma, eta, tol, config_path):
    """Solve the steady-state compromise probability for one distribution."""
    config = _load_config(config_path)
    dist_spec = _resolve(dist_spec, config, "dist")
    graph_path = _resolve(graph_path, config, "graph")
    if (dist_spec is None) == (graph_path is None):
        raise click.UsageError("provide exactly one of --dist or --graph")
    dist = (
        parse_dist_spec(dist_spec)
        if dist_spec
        else empirical_distribution(read_graph_file(graph_path))
    )
    params = _resolve_params(config, alpha, beta, gamma, eta)
    result = solve_steady_state(params, dist, tol=_resolve(tol, config, "tol", default=1e-10))
    _print_json(
        {
            "q": result.q,
            "lower": result.lower,
            "upper": result.upper,
            "residual": result.residual,
            "iterations": result.iterations,
            "mean_degree": dist.mean,
        }
    )


@main.command("compare")
@click.option("--dist", "dist_specs", multiple=True)
@click.option("--graph", "graph_paths", multiple=True, type=click.Path(exists=True, dir_okay=False))
@_params_options
@click.option("--tol", type=float, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_guarded
def cmd_compare(dist_specs, graph_paths, alpha, beta, gamma, eta, tol, config_path):
    """Stochastically order two degree distributions and solve both.

    Inputs are taken in order: every --dist first, then every --graph.
    """
    config = _load_config(config_path)
    inputs = _gather_inputs(dist_specs, graph_paths)
    if len(inputs) != 2:
        raise click.UsageError("compare needs exactly two inputs (--dist/--graph)")
    (kind1, name1, d1), (kind2, name2, d2) = inputs
    order_tol = _resolve(tol, config, "tol", default=1e-12)

    if d1.is_parametric and d2.is_parametric and d1.kind == d2.kind:
        verdict = order_same_family(d1, d2)
        method = "same_family"
    elif {d1.kind, d2.kind} == {"powerlaw", "regular"} or {d1.kind, d2.kind} == {
        "powerlaw",
        "random",
    }:
        pl = d1 if d1.kind == "powerlaw" else d2
        verdict = order_cross_family(d1, d2, int(pl.params["n"]))
        method = "cross_family"
    else:
        verdict = stochastic_order(d1, d2, tol=order_tol)
        method = "survival_functions"

    params = _resolve_params(config, alpha, beta, gamma, eta)
    q1 = solve_steady_state(params, d1).q
    q2 = solve_steady_state(params, d2).q
    implication = None
    if verdict.relation in (Relation.LE, Relation.GE, Relation.EQ):
        expected = {"LE": q1 <= q2, "GE": q2 <= q1, "EQ": True}[verdict.relation.value]
        implication = {
            "statement": "stochastically smaller degree distribution gives smaller q",
            "consistent": bool(expected),
        }
    _print_json(
        {
            "first": name1,
            "second": name2,
            "method": method,
            "relation": verdict.relation.value,
            "witness": verdict.witness,
            "q_first": q1,
            "q_second": q2,
            "implication": implication,
        }
    )


@main.command("strategies")
@click.option("--dist", "dist_spec", default=None)
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_params_options
@click.option("--omega", type=float, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_guarded
def cmd_strategies(dist_spec, graph_path, alpha, beta, gamma, eta, omega, config_path):
    """Check the strategy-ranking conditions and solve each tuned system."""
    config = _load_config(config_path)
    dist_spec = _resolve(dist_spec, config, "dist")
    graph_path = _resolve(graph_path, config, "graph")
    if (dist_spec is None) == (graph_path is None):
        raise click.UsageError("provide exactly one of --dist or --graph")
    dist = (
        parse_dist_spec(dist_spec)
        if dist_spec
        else empirical_distribution(read_graph_file(graph_path))
    )
    params = _resolve_params(config, alpha, beta, gamma, eta)
    omega = _resolve(omega, config, "omega", required=True)
    _print_json(
        {
            "command": "strategies",
            "config": {
                "dist": dist.spec_string(),
                "alpha": params.alpha,
                "beta": params.beta,
                "gamma": params.gamma,
                "eta": params.eta,
                "omega": omega,
                "mean_degree": dist.mean,
            },
        }
    )
    comparison = strategy_condition(params, dist, omega)
    solved = {}
    for strat in Strategy:
        try:
            tuned = strategy_apply(params, strat, omega)
            solved[strat.value] = {
                "params": {
                    "alpha": tuned.alpha,
                    "beta": tuned.beta,
                    "gamma": tuned.gamma,
                    "eta": tuned.eta,
                },
                "q": solve_steady_state(tuned, dist).q,
            }
        except VulngraphError as exc:
            solved[strat.value] = {"error": str(exc)}
    _print_json(
        {
            "S1_beats_S2": comparison.s1_beats_s2.value,
            "S2_beats_S1": comparison.s2_beats_s1.value,
            "S3_beats_S2": comparison.s3_beats_s2.value,
            "q_base": solve_steady_state(params, dist).q,
            "tuned": solved,
        }
    )


@main.command("threshold")
@click.option("--dist", "dist_spec", default=None)
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_params_options
@click.option("--c", "c", type=float, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--n", type=int, default=None, help="node count when the distribution carries none")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_guarded
def cmd_threshold(dist_spec, graph_path, alpha, beta, gamma, eta, c, epsilon, n, config_path):
    """Check the sufficient/necessary compromise-threshold conditions."""
    config = _load_config(config_path)
    dist_spec = _resolve(dist_spec, config, "dist")
    graph_path = _resolve(graph_path, config, "graph")
    if (dist_spec is None) == (graph_path is None):
        raise click.UsageError("provide exactly one of --dist or --graph")
    if graph_path:
        graph = read_graph_file(graph_path)
        dist = empirical_distribution(graph)
        n_value = graph.n
    else:
        dist = parse_dist_spec(dist_spec)
        n_value = _resolve(n, config, "n", default=dist.params.get("n"))
        if n_value is None:
            raise click.UsageError("--n is required when the distribution has no node count")
    params = _resolve_params(config, alpha, beta, gamma, eta)
    c = _resolve(c, config, "c", required=True)
    epsilon = _resolve(epsilon, config, "epsilon", required=True)
    _print_json(
        {
            "command": "threshold",
            "config": {
                "dist": dist.spec_string(),
                "n": int(n_value),
                "c": c,
                "epsilon": epsilon,
                "alpha": params.alpha,
                "beta": params.beta,
                "gamma": params.gamma,
                "eta": params.eta,
            },
        }
    )
    verdict = threshold_check(params, dist, int(n_value), c, epsilon)
    _print_json(
        {
            "sufficient_holds": verdict.sufficient_holds,
            "sufficient_sharp_holds": verdict.sufficient_sharp_holds,
            "necessary_holds": verdict.necessary_holds,
            "lambda": verdict.lam,
            "z": verdict.z,
            "rhs": verdict.rhs,
            "q_lower": verdict.q_lower,
            "q_upper": verdict.q_upper,
        }
    )


@main.command("simulate")
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False), required=True)
@_params_options
@click.option("--runs", type=int, default=None)
@click.option("--seed", type=int, required=True)
@click.option("--horizon", type=float, default=None)
@click.option("--burn-in", type=float, default=None)
@click.option("--sample-interval", type=float, default=None)
@click.option("--window", type=float, default=None)
@click.option("--n-windows", type=int, default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_guarded
def cmd_simulate(
    graph_path, alpha, beta, gamma, eta, runs, seed, horizon, burn_in,
    sample_interval, window, n_windows, out_dir, config_path,
):
    """Run a seeded ensemble; write the C_t curve CSV and estimates JSON.

    With --runs 1 the full event log is exported as events.csv (t,node,state).
    """
    config = _load_config(config_path)
    params = _resolve_params(config, alpha, beta, gamma, eta)
    runs = _resolve(runs, config, "runs", default=100)
    horizon = _resolve(horizon, config, "horizon", default=330.0)
    burn_in = _resolve(burn_in, config, "burn_in", default=30.0)
    sample_interval = _resolve(sample_interval, config, "sample_interval", default=1.0)
    # Default measurement windows shrink to fit short horizons; explicit
    # values are passed through and may be rejected downstream.
    window, n_windows = fit_windows(
        horizon,
        burn_in,
        _resolve(window, config, "window", default=None),
        _resolve(n_windows, config, "n_windows", default=None),
    )
    graph = read_graph_file(graph_path)
    resolved = {
        "graph": str(graph_path),
        "n": graph.n,
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "eta": params.eta,
        "runs": runs,
        "seed": seed,
        "horizon": horizon,
        "burn_in": burn_in,
        "sample_interval": sample_interval,
        "window": window,
        "n_windows": n_windows,
    }
    _print_json({"command": "simulate", "config": resolved})

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = SimConfig(
        params=params,
        horizon=horizon,
        burn_in=burn_in,
        sample_interval=sample_interval,
        seed=seed,
    )
    result = run_ensemble(graph, cfg, runs=runs, base_seed=seed, window=window, n_windows=n_windows)
    ct_path = out / "ct.csv"
    with open(ct_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,ct\r\n")
        for t, ct in zip(result.sample_times, result.mean_ct):
            fh.write(f"{float(t)!r},{float(ct)!r}\r\n")
    est_path = out / "estimates.json"
    with open(est_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "q_bar": result.q_bar,
                "q_i": result.estimate.q_i.tolist(),
                "q_i_stddev": result.estimate.q_i_stddev.tolist(),
                "occupancy_fraction": result.occupancy_fraction.tolist(),
                "steady_mean_ct": result.steady_mean,
                "steady_stderr": result.steady_stderr,
            },
            fh,
            sort_keys=True,
            indent=2,
        )
        fh.write("\n")
    files = [ct_path.name, est_path.name]
    if runs == 1:
        # Export the single ensemble member's full event log; it runs with
        # the seed derived for run index 0, matching the ensemble.
        traj = simulate(
            graph,
            SimConfig(
                params=params,
                horizon=horizon,
                burn_in=burn_in,
                sample_interval=sample_interval,
                seed=derive_seed(seed, 0),
            ),
        )
        ev_path = out / "events.csv"
        with open(ev_path, "w", encoding="utf-8", newline="") as fh:
            fh.write("t,node,state\r\n")
            for t, node, state in zip(traj.times, traj.nodes, traj.states):
                fh.write(f"{float(t)!r},{int(node)},{int(state)}\r\n")
        files.append(ev_path.name)
    _print_json({"out_dir": str(out), "files": sorted(files), "q_bar": result.q_bar})


@main.command("experiment")
@click.option("--name", type=click.Choice(list(EXPERIMENT_NAMES)), required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, required=True)
@click.option("--overrides", "overrides_json", default=None, help="JSON object of overrides")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_guarded
def cmd_experiment(name, out_dir, seed, overrides_json, config_path):
    """Reproduce one named study end to end."""
    config = _load_config(config_path)
    overrides = dict(config.get("overrides", {}))
    if overrides_json:
        try:
            overrides.update(json.loads(overrides_json))
        except json.JSONDecodeError as exc:
            raise click.UsageError(f"--overrides is not valid JSON: {exc}") from exc
    spec = ExperimentSpec(name=name, output_dir=Path(out_dir), seed=seed, overrides=overrides)
    _print_json({"command": "experiment", "config": {"name": name, "out": str(out_dir), "seed": seed, "overrides": overrides}})
    manifest = run_experiment(spec)
    _print_json(manifest)


if __name__ == "__main__":
    main()
