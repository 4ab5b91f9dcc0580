import json
from pathlib import Path

import pytest

from vulngraph import (
    ConstructionError,
    DomainError,
    ExperimentSpec,
    Parameters,
    gen_random,
    run_experiment,
    search_powerlaw_graphs,
    threshold_exceedance,
)

SMALL = {"n": 60, "runs": 4, "horizon": 120.0}


def _read(path: Path) -> bytes:
    return path.read_bytes()


def test_experiment_spec_validation(tmp_path):
    with pytest.raises(DomainError):
        ExperimentSpec(name="nope", output_dir=tmp_path)
    with pytest.raises(DomainError):
        run_experiment(
            ExperimentSpec(name="stability", output_dir=tmp_path, overrides={"bogus": 1})
        )


def test_topology_regular_experiment(tmp_path):
    spec = ExperimentSpec(
        name="topology_regular",
        output_dir=tmp_path,
        seed=5,
        overrides={**SMALL, "degrees": [2, 4], "runs": 6, "horizon": 230.0},
    )
    manifest = run_experiment(spec)
    assert set(manifest["files"]) == {
        "topology_regular.gp",
        "topology_regular.png",
        "topology_regular_curves.csv",
        "topology_regular_runs.csv",
        "topology_regular_summary.json",
    }
    assert (tmp_path / "manifest.json").exists()
    summary = json.loads((tmp_path / "topology_regular_summary.json").read_text())
    assert summary["ordering_by_steady_mean"] == ["degree 2", "degree 4"]
    per = summary["per_graph"]
    assert per["degree 2"]["q_solved"] < per["degree 4"]["q_solved"]
    curves = (tmp_path / "topology_regular_curves.csv").read_text().splitlines()
    assert curves[0] == "t,degree 2,degree 4"
    runs_header = (tmp_path / "topology_regular_runs.csv").read_text().splitlines()[0]
    assert runs_header == "label,run,t,ct"


def test_experiment_reproducible_byte_for_byte(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    overrides = {**SMALL, "degrees": [2, 3]}
    for out in (out1, out2):
        run_experiment(
            ExperimentSpec(name="topology_regular", output_dir=out, seed=9, overrides=overrides)
        )
    for name in (
        "manifest.json",
        "topology_regular_curves.csv",
        "topology_regular_runs.csv",
        "topology_regular_summary.json",
        "topology_regular.gp",
    ):
        assert _read(out1 / name) == _read(out2 / name), name


def test_stability_experiment_downscaled(tmp_path):
    spec = ExperimentSpec(
        name="stability",
        output_dir=tmp_path,
        seed=3,
        overrides={
            "n": 50,
            "runs": 5,
            "horizon": 130.0,
            "regular_degree": 4,
            "random_edge_prob": 0.08,
            "powerlaw_mean": 4.0,
            "window": 20.0,
            "n_windows": 5,
        },
    )
    run_experiment(spec)
    summary = json.loads((tmp_path / "stability_summary.json").read_text())
    assert set(summary["graphs"]) == {"regular", "random", "powerlaw"}
    for stats in summary["graphs"].values():
        assert 0.0 <= stats["fraction_below_threshold"] <= 1.0
        assert 0.0 <= stats["q_bar"] <= 1.0
    stddev_rows = (tmp_path / "stability_stddev.csv").read_text().splitlines()
    assert stddev_rows[0] == "graph,node,q_i,q_i_stddev"
    assert len(stddev_rows) == 1 + 3 * 50


def test_strategies_experiment_downscaled(tmp_path):
    spec = ExperimentSpec(
        name="strategies_1v2",
        output_dir=tmp_path,
        seed=2,
        overrides={"n": 80, "edge_prob": 0.05, "runs": 6, "horizon": 230.0},
    )
    manifest = run_experiment(spec)
    summary = json.loads((tmp_path / "strategies_1v2_summary.json").read_text())
    assert summary["condition"]["s1_beats_s2"] == "HOLDS"
    assert summary["claimed_better"] == "S1"
    assert set(summary["per_variant"]) == {"base", "S1", "S2"}
    assert manifest["extra"]["measured_better"] in {"S1", "S2"}


def test_bounds_surface_downscaled(tmp_path):
    spec = ExperimentSpec(
        name="bounds_surface",
        output_dir=tmp_path,
        seed=4,
        overrides={
            "graph_kind": "regular",
            "n": 60,
            "regular_degree": 4,
            "grid": [0.1, 0.3],
            "runs": 5,
            "horizon": 130.0,
        },
    )
    manifest = run_experiment(spec)
    cells = (tmp_path / "bounds_surface_cells.csv").read_text().splitlines()
    assert cells[0] == "alpha,beta,mean_ct,stderr,lower,upper,contained"
    assert len(cells) == 1 + 4
    summary = json.loads((tmp_path / "bounds_surface_summary.json").read_text())
    assert 0.0 <= summary["contained_fraction"] <= 1.0
    assert manifest["extra"]["contained_fraction"] == summary["contained_fraction"]


def test_bounds_surface_axes_validation(tmp_path):
    with pytest.raises(DomainError):
        run_experiment(
            ExperimentSpec(
                name="bounds_surface",
                output_dir=tmp_path,
                overrides={"axes": ("alpha", "alpha")},
            )
        )


def test_threshold_validation_downscaled(tmp_path):
    spec = ExperimentSpec(
        name="threshold_validation",
        output_dir=tmp_path,
        seed=6,
        overrides={"n": 60, "edge_prob": 0.06, "runs": 3, "horizon": 130.0},
    )
    run_experiment(spec)
    summary = json.loads((tmp_path / "threshold_validation_summary.json").read_text())
    assert 0.0 <= summary["exceed_fraction"] <= 1.0
    assert summary["verdict_from_epsilon"]["z"] == pytest.approx(0.99858, abs=1e-3)
    assert summary["verdict_z_equals_2"]["z"] == pytest.approx(2.0, abs=1e-6)


def test_threshold_exceedance_trivial_cases():
    g = gen_random(40, 0.08, seed=1)
    # c = 1: C_t can never exceed n
    out = threshold_exceedance(
        g, Parameters(0.3, 0.1, 0.1, 0.0), c=0.999999, eps=0.1, runs=2, base_seed=3,
        horizon=60.0, burn_in=10.0,
    )
    assert out.exceed_fraction == 0.0
    # alpha = 0 with the all-secure start: nothing ever gets compromised
    out = threshold_exceedance(
        g, Parameters(0.0, 0.1, 0.1, 0.0), c=0.01, eps=0.1, runs=2, base_seed=3,
        horizon=60.0, burn_in=10.0,
    )
    assert out.exceed_fraction == 0.0
    assert out.run_ct.shape[0] == 2


def test_topology_powerlaw_downscaled(tmp_path):
    spec = ExperimentSpec(
        name="topology_powerlaw",
        output_dir=tmp_path,
        seed=8,
        overrides={
            "n": 200,
            "runs": 3,
            "horizon": 130.0,
            "exponents": [1.6, 2.2],
            "mean_window": None,
            "candidate_budget": 400,
        },
    )
    manifest = run_experiment(spec)
    assert "found_mean_degrees" in manifest["extra"]
    summary = json.loads((tmp_path / "topology_powerlaw_summary.json").read_text())
    assert len(summary["per_graph"]) == 2


def test_search_powerlaw_budget_exhaustion():
    with pytest.raises(ConstructionError):
        search_powerlaw_graphs(
            100, 2, [1.5], mean_window=(99.0, 100.0), budget=3, base_seed=1
        )
