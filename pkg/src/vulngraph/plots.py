"""Figure output for experiments: rendered PNGs and gnuplot scripts.

Every experiment ships its data as CSV; alongside it we render a PNG with
matplotlib and emit a small gnuplot-dialect script that plots the same CSV,
so the figures can be regenerated outside Python.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (8.0, 5.0)
_DPI = 120


def render_curves(path, sample_times, curves: dict[str, np.ndarray], ylabel: str) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for label, values in curves.items():
        ax.plot(sample_times, values, label=label, linewidth=1.2)
    ax.set_xlabel("time")
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def render_histogram(path, series: dict[str, np.ndarray], bins: np.ndarray, xlabel: str) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for label, values in series.items():
        ax.hist(values, bins=bins, histtype="step", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("node count")
    ax.legend()
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def render_surface(
    path,
    axis1_name: str,
    axis1_values: np.ndarray,
    axis2_name: str,
    axis2_values: np.ndarray,
    simulated: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
) -> None:
    fig = plt.figure(figsize=(9.0, 6.0))
    ax = fig.add_subplot(projection="3d")
    grid1, grid2 = np.meshgrid(axis1_values, axis2_values, indexing="ij")
    ax.plot_wireframe(grid1, grid2, lower, color="tab:blue", label="lower bound")
    ax.plot_wireframe(grid1, grid2, upper, color="tab:red", label="upper bound")
    ax.scatter(grid1.ravel(), grid2.ravel(), simulated.ravel(), color="black", label="simulated")
    ax.set_xlabel(axis1_name)
    ax.set_ylabel(axis2_name)
    ax.set_zlabel("steady-state mean compromised count")
    ax.legend()
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def render_threshold_scatter(path, sample_times, run_ct: np.ndarray, threshold: float) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for i in range(run_ct.shape[0]):
        ax.scatter(sample_times, run_ct[i], s=2.0, alpha=0.5)
    ax.axhline(threshold, color="red", linewidth=1.5, label="threshold")
    ax.set_xlabel("time")
    ax.set_ylabel("compromised count")
    ax.legend()
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


# -- gnuplot scripts ---------------------------------------------------------

_GP_HEADER = (
    "set datafile separator ','\n"
    "set terminal pngcairo size 960,600\n"
)


def gnuplot_curves(path, csv_name: str, labels: list[str], ylabel: str) -> None:
    lines = [
        _GP_HEADER,
        f"set output '{_stem(path)}.gnuplot.png'\n",
        "set xlabel 'time'\n",
        f"set ylabel '{ylabel}'\n",
        "plot \\\n",
    ]
    plots = [
        f"  '{csv_name}' every ::1 using 1:{i + 2} with lines title '{label}'"
        for i, label in enumerate(labels)
    ]
    lines.append(", \\\n".join(plots) + "\n")
    _write(path, lines)


def gnuplot_histogram(path, csv_name: str, labels: list[str]) -> None:
    lines = [
        _GP_HEADER,
        f"set output '{_stem(path)}.gnuplot.png'\n",
        "set style fill solid 0.4\n",
        "set xlabel 'per-node stddev of windowed compromised fraction'\n",
        "set ylabel 'node count'\n",
        "plot \\\n",
    ]
    plots = [
        f"  '{csv_name}' every ::1 using (($1+$2)/2):{i + 3} with boxes title '{label}'"
        for i, label in enumerate(labels)
    ]
    lines.append(", \\\n".join(plots) + "\n")
    _write(path, lines)


def gnuplot_surface(path, csv_name: str, axis1_name: str, axis2_name: str, grid_size: int) -> None:
    lines = [
        _GP_HEADER,
        f"set output '{_stem(path)}.gnuplot.png'\n",
        f"set dgrid3d {grid_size},{grid_size}\n",
        f"set xlabel '{axis1_name}'\n",
        f"set ylabel '{axis2_name}'\n",
        "set zlabel 'steady-state mean compromised count'\n",
        "splot \\\n",
        f"  '{csv_name}' every ::1 using 1:2:3 with lines title 'simulated', \\\n",
        f"  '{csv_name}' every ::1 using 1:2:5 with lines title 'lower bound', \\\n",
        f"  '{csv_name}' every ::1 using 1:2:6 with lines title 'upper bound'\n",
    ]
    _write(path, lines)


def gnuplot_threshold(path, csv_name: str, threshold: float) -> None:
    lines = [
        _GP_HEADER,
        f"set output '{_stem(path)}.gnuplot.png'\n",
        "set xlabel 'time'\n",
        "set ylabel 'compromised count'\n",
        "plot \\\n",
        f"  '{csv_name}' every ::1 using 3:4 with points pt 7 ps 0.3 title 'C_t samples', \\\n",
        f"  {threshold!r} with lines title 'threshold'\n",
    ]
    _write(path, lines)


def _stem(path) -> str:
    return Path(path).stem


def _write(path, lines) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(lines)
