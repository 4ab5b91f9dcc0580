"""Event-driven simulation of the continuous-time compromise/recovery process.

Each secure node v fires "compromise" at rate alpha + gamma * (number of
currently compromised neighbors of v); each compromised node fires
"recovery" at rate beta + eta.  The engine keeps one tentative exponential
firing time per node in an indexed priority queue with lazy invalidation:
whenever a secure node's compromised-neighbor count changes (in either
direction) its pending time is cancelled and redrawn at the updated rate,
which is exact by memorylessness.  Ties in firing times are broken by node
id so a run is a pure function of (graph, config).

The hot loop emits a bare (time, node) event stream; C_t samples, per-node
occupancy, and windowed steady-state estimates are all derived from it
afterwards, so single runs and ensemble members share one code path.

For graphs of up to 12 nodes, `exact_stationary` builds the full
2**n-state generator matrix and solves pi Q = 0 directly; it is the
correctness oracle for the resampling scheme.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from heapq import heappop, heappush
from math import log
from random import Random

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from ._rng import derive_seed
from .analytic import Parameters
from .errors import DomainError
from .graphs import VulnerabilityGraph

DEFAULT_HORIZON = 330.0
DEFAULT_BURN_IN = 30.0
DEFAULT_SAMPLE_INTERVAL = 1.0
DEFAULT_WINDOW = 20.0
DEFAULT_N_WINDOWS = 15
EXACT_MAX_NODES = 12


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: rates, time horizon, sampling, and seed.

    Unlike the analytic solver, the simulator accepts alpha = 0 (with an
    all-secure start that is simply the empty trajectory) and
    beta + eta = 0 (compromise becomes absorbing).
    """

    params: Parameters
    horizon: float = DEFAULT_HORIZON
    sample_interval: float = DEFAULT_SAMPLE_INTERVAL
    burn_in: float = DEFAULT_BURN_IN
    seed: int = 0
    initial_compromised: frozenset = frozenset()

    def __post_init__(self):
        if self.horizon <= 0.0:
            raise DomainError("horizon must be > 0")
        if not 0.0 <= self.burn_in < self.horizon:
            raise DomainError("need 0 <= burn_in < horizon")
        if self.sample_interval <= 0.0:
            raise DomainError("sample_interval must be > 0")
        object.__setattr__(self, "initial_compromised", frozenset(self.initial_compromised))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One sample path: the event log plus everything derived from it."""

    n: int
    horizon: float
    burn_in: float
    initial: np.ndarray  # state at t = 0, 1 = compromised
    times: np.ndarray   # event times, strictly increasing
    nodes: np.ndarray   # node flipping at each event
    states: np.ndarray  # new state per event, 1 = compromised
    sample_times: np.ndarray
    ct_samples: np.ndarray        # compromised count at each sample time
    node_occupancy: np.ndarray    # compromised time per node in [burn_in, horizon]
    intervals: tuple = field(repr=False, default=())  # per-node (starts, ends)

    @property
    def events(self) -> list[tuple[float, int, int]]:
        return list(zip(self.times.tolist(), self.nodes.tolist(), self.states.tolist()))

    @property
    def occupancy_fraction(self) -> np.ndarray:
        return self.node_occupancy / (self.horizon - self.burn_in)


@dataclass(frozen=True, eq=False)
class SteadyStateEstimate:
    """Windowed per-node compromised-time fractions and their dispersion."""

    q_i: np.ndarray               # per-node mean fraction across windows
    q_bar: float                  # mean of q_i
    interval_samples: np.ndarray  # (n_windows, n) per-window fractions
    q_i_stddev: np.ndarray        # per-node sample stddev across windows


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    runs: int
    sample_times: np.ndarray
    mean_ct: np.ndarray
    occupancy_fraction: np.ndarray  # run-averaged per-node fractions
    estimate: SteadyStateEstimate   # windows averaged across runs first
    q_bar: float
    run_steady_means: np.ndarray    # per-run mean C_t past burn-in
    run_ct: np.ndarray | None = None  # (runs, samples), kept on request

    @property
    def steady_mean(self) -> float:
        return float(self.run_steady_means.mean())

    @property
    def steady_stderr(self) -> float:
        if self.runs < 2:
            return 0.0
        return float(self.run_steady_means.std(ddof=1) / np.sqrt(self.runs))


def simulate(graph: VulnerabilityGraph, cfg: SimConfig) -> Trajectory:
    """Run one sample path of the process on `graph` under `cfg`."""
    for v in cfg.initial_compromised:
        if not 0 <= v < graph.n:
            raise DomainError(f"initial compromised node {v} out of range")
    times, nodes = _event_stream(graph.adjacency, graph.n, cfg)
    return _assemble(graph.n, cfg, times, nodes)


def _event_stream(adjacency, n: int, cfg: SimConfig) -> tuple[list, list]:
    alpha = cfg.params.alpha
    gamma = cfg.params.gamma
    recovery = cfg.params.recovery_rate
    horizon = cfg.horizon
    rnd = Random(cfg.seed).random

    comp = bytearray(n)
    hot = [0] * n  # compromised-neighbor counts
    for v in cfg.initial_compromised:
        comp[v] = 1
    for v in cfg.initial_compromised:
        for u in adjacency[v]:
            hot[u] += 1

    version = [0] * n
    heap: list = []
    push, pop = heappush, heappop
    for v in range(n):
        if comp[v]:
            if recovery > 0.0:
                push(heap, (-log(1.0 - rnd()) / recovery, v, 0))
        else:
            rate = alpha + gamma * hot[v]
            if rate > 0.0:
                push(heap, (-log(1.0 - rnd()) / rate, v, 0))

    times: list[float] = []
    nodes: list[int] = []
    while heap:
        t, v, stamp = pop(heap)
        if t > horizon:
            break
        if stamp != version[v]:
            continue
        times.append(t)
        nodes.append(v)
        version[v] += 1
        if comp[v]:
            comp[v] = 0
            rate = alpha + gamma * hot[v]
            if rate > 0.0:
                push(heap, (t - log(1.0 - rnd()) / rate, v, version[v]))
            for u in adjacency[v]:
                # counts track every node (a compromised node needs a correct
                # count the moment it recovers); only secure nodes redraw
                hot[u] -= 1
                if not comp[u]:
                    version[u] += 1
                    rate = alpha + gamma * hot[u]
                    if rate > 0.0:
                        push(heap, (t - log(1.0 - rnd()) / rate, u, version[u]))
        else:
            comp[v] = 1
            if recovery > 0.0:
                push(heap, (t - log(1.0 - rnd()) / recovery, v, version[v]))
            for u in adjacency[v]:
                hot[u] += 1
                if not comp[u]:
                    version[u] += 1
                    rate = alpha + gamma * hot[u]
                    if rate > 0.0:
                        push(heap, (t - log(1.0 - rnd()) / rate, u, version[u]))
    return times, nodes


def _assemble(n: int, cfg: SimConfig, times: list, nodes: list) -> Trajectory:
    t = np.asarray(times, dtype=float)
    v = np.asarray(nodes, dtype=np.int64)
    init = np.zeros(n, dtype=np.int8)
    for node in cfg.initial_compromised:
        init[node] = 1

    # New state per event: node v's k-th event flips it, starting from init.
    states = np.empty(v.size, dtype=np.int8)
    per_node_times: list[np.ndarray] = [np.empty(0)] * n
    if v.size:
        order = np.argsort(v, kind="stable")
        sv = v[order]
        boundaries = np.nonzero(np.r_[True, sv[1:] != sv[:-1]])[0]
        counts = np.diff(np.r_[boundaries, sv.size])
        offsets = np.arange(sv.size) - np.repeat(boundaries, counts)
        states[order] = init[sv] ^ ((offsets + 1) % 2).astype(np.int8)
        st = t[order]
        for start, cnt in zip(boundaries, counts):
            per_node_times[int(sv[start])] = st[start : start + cnt]

    # C_t at multiples of the sample interval.
    num = int(np.floor(cfg.horizon / cfg.sample_interval + 1e-9))
    sample_times = np.arange(num + 1) * cfg.sample_interval
    c0 = int(init.sum())
    ct_steps = np.concatenate(([c0], c0 + np.cumsum(np.where(states == 1, 1, -1))))
    ct_samples = ct_steps[np.searchsorted(t, sample_times, side="right")]

    # Per-node compromised intervals, clipped later as needed.
    intervals = []
    occupancy = np.empty(n)
    lo, hi = cfg.burn_in, cfg.horizon
    for node in range(n):
        starts, ends = _compromised_intervals(per_node_times[node], bool(init[node]), cfg.horizon)
        intervals.append((starts, ends))
        occupancy[node] = float(
            np.sum(np.clip(ends, lo, hi) - np.clip(starts, lo, hi))
        )
    return Trajectory(
        n=n,
        horizon=cfg.horizon,
        burn_in=cfg.burn_in,
        initial=init,
        times=t,
        nodes=v,
        states=states,
        sample_times=sample_times,
        ct_samples=ct_samples,
        node_occupancy=occupancy,
        intervals=tuple(intervals),
    )


def _compromised_intervals(event_times: np.ndarray, initially_compromised: bool, horizon: float):
    """(starts, ends) of the compromised stretches of one node."""
    if initially_compromised:
        starts = np.r_[0.0, event_times[1::2]]
        ends = event_times[0::2]
    else:
        starts = event_times[0::2]
        ends = event_times[1::2]
    if starts.size > ends.size:  # still compromised at the horizon
        ends = np.r_[ends, horizon]
    return starts, ends


def estimate_steady_state(
    traj: Trajectory,
    window: float = DEFAULT_WINDOW,
    n_windows: int = DEFAULT_N_WINDOWS,
) -> SteadyStateEstimate:
    """Per-node compromised fraction in each of `n_windows` consecutive
    windows of length `window` starting at burn-in, plus mean/stddev."""
    samples = window_fractions(traj, window, n_windows)
    return summarize_windows(samples)


def window_fractions(traj: Trajectory, window: float, n_windows: int) -> np.ndarray:
    if window <= 0.0 or n_windows < 1:
        raise DomainError("window and n_windows must be positive")
    if traj.burn_in + window * n_windows > traj.horizon + 1e-9:
        raise DomainError("horizon too short for the requested windows")
    bounds = traj.burn_in + window * np.arange(n_windows + 1)
    out = np.empty((n_windows, traj.n))
    for node, (starts, ends) in enumerate(traj.intervals):
        if starts.size == 0:
            out[:, node] = 0.0
            continue
        cum = np.sum(
            np.clip(ends[None, :], 0.0, bounds[:, None])
            - np.clip(starts[None, :], 0.0, bounds[:, None]),
            axis=1,
        )
        out[:, node] = np.diff(cum) / window
    return out


def fit_windows(
    horizon: float,
    burn_in: float,
    window: float | None = None,
    n_windows: int | None = None,
) -> tuple[float, int]:
    """Measurement windows, shrunk from the (20, 15) defaults to fit the
    horizon when not given explicitly."""
    if window is None:
        window = min(DEFAULT_WINDOW, (horizon - burn_in) / (n_windows or 1))
    if n_windows is None:
        n_windows = max(1, min(DEFAULT_N_WINDOWS, int((horizon - burn_in) / window + 1e-9)))
    return window, n_windows


def summarize_windows(samples: np.ndarray) -> SteadyStateEstimate:
    q_i = samples.mean(axis=0)
    stddev = (
        samples.std(axis=0, ddof=1) if samples.shape[0] > 1 else np.zeros(samples.shape[1])
    )
    return SteadyStateEstimate(
        q_i=q_i,
        q_bar=float(q_i.mean()),
        interval_samples=samples,
        q_i_stddev=stddev,
    )


# -- ensembles ---------------------------------------------------------------

def _run_summary(args):
    adjacency, n, params_tuple, horizon, sample_interval, burn_in, seed, initial, window, n_windows = args
    cfg = SimConfig(
        params=Parameters(*params_tuple),
        horizon=horizon,
        sample_interval=sample_interval,
        burn_in=burn_in,
        seed=seed,
        initial_compromised=initial,
    )
    times, nodes = _event_stream(adjacency, n, cfg)
    traj = _assemble(n, cfg, times, nodes)
    steady = float(traj.ct_samples[traj.sample_times > burn_in].mean())
    return (
        traj.ct_samples,
        traj.occupancy_fraction,
        window_fractions(traj, window, n_windows),
        steady,
    )


def run_ensemble(
    graph: VulnerabilityGraph,
    cfg: SimConfig,
    runs: int,
    base_seed: int,
    window: float | None = None,
    n_windows: int | None = None,
    workers: int | None = None,
    keep_run_curves: bool = False,
) -> EnsembleResult:
    """Average `runs` independent runs, seeded as splitmix64(base_seed, i).

    Per-node window fractions are averaged across runs first; the reported
    q_i / q_i_stddev are then the mean/stddev of those run-averaged window
    samples.  Runs may execute on worker processes; aggregation happens in
    run-index order, so the result is identical to sequential execution.
    """
    if runs < 1:
        raise DomainError("runs must be >= 1")
    window, n_windows = fit_windows(cfg.horizon, cfg.burn_in, window, n_windows)
    p = cfg.params
    tasks = [
        (
            graph.adjacency,
            graph.n,
            (p.alpha, p.beta, p.gamma, p.eta),
            cfg.horizon,
            cfg.sample_interval,
            cfg.burn_in,
            derive_seed(base_seed, i),
            cfg.initial_compromised,
            window,
            n_windows,
        )
        for i in range(runs)
    ]
    if workers is None:
        import os

        workers = min(os.cpu_count() or 1, runs)
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_summary, tasks, chunksize=max(1, runs // (4 * workers))))
    else:
        summaries = [_run_summary(task) for task in tasks]

    ct_sum = np.zeros_like(summaries[0][0], dtype=float)
    occ_sum = np.zeros(graph.n)
    win_sum = np.zeros_like(summaries[0][2])
    steady_means = np.empty(runs)
    for i, (ct, occ, win, steady) in enumerate(summaries):
        ct_sum += ct
        occ_sum += occ
        win_sum += win
        steady_means[i] = steady
    estimate = summarize_windows(win_sum / runs)
    num = int(np.floor(cfg.horizon / cfg.sample_interval + 1e-9))
    return EnsembleResult(
        runs=runs,
        sample_times=np.arange(num + 1) * cfg.sample_interval,
        mean_ct=ct_sum / runs,
        occupancy_fraction=occ_sum / runs,
        estimate=estimate,
        q_bar=estimate.q_bar,
        run_steady_means=steady_means,
        run_ct=np.vstack([s[0] for s in summaries]) if keep_run_curves else None,
    )


# -- exact oracle for small graphs --------------------------------------------

@dataclass(frozen=True, eq=False)
class ExactStationary:
    pi: np.ndarray        # stationary distribution over the 2**n states
    marginal: np.ndarray  # per-node compromised probability

    def joint(self, state_mask: int) -> float:
        return float(self.pi[state_mask])


def exact_stationary(graph: VulnerabilityGraph, params: Parameters) -> ExactStationary:
    """Stationary distribution of the exact 2**n-state Markov chain.

    States are bitmasks (bit v set = node v compromised).  Solves pi Q = 0
    with the normalization row appended; the absorbing corner cases
    (beta + eta = 0) return the appropriate point mass directly.
    """
    n = graph.n
    if n > EXACT_MAX_NODES:
        raise DomainError(f"exact solve limited to {EXACT_MAX_NODES} nodes, got {n}")
    size = 1 << n
    alpha, gamma, recovery = params.alpha, params.gamma, params.recovery_rate

    if recovery == 0.0:
        pi = np.zeros(size)
        pi[size - 1 if alpha > 0.0 else 0] = 1.0
        return ExactStationary(pi=pi, marginal=_marginals(pi, n))

    masks = [0] * n
    for v in range(n):
        m = 0
        for u in graph.adjacency[v]:
            m |= 1 << u
        masks[v] = m

    rows, cols, vals = [], [], []
    for s in range(size):
        out_rate = 0.0
        for v in range(n):
            bit = 1 << v
            if s & bit:
                rate = recovery
                dest = s & ~bit
            else:
                rate = alpha + gamma * int(s & masks[v]).bit_count()
                dest = s | bit
            if rate > 0.0:
                rows.append(s)
                cols.append(dest)
                vals.append(rate)
                out_rate += rate
        rows.append(s)
        cols.append(s)
        vals.append(-out_rate)
    generator = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()

    system = scipy.sparse.lil_matrix(generator.T)
    system[size - 1, :] = 1.0
    rhs = np.zeros(size)
    rhs[size - 1] = 1.0
    pi = scipy.sparse.linalg.spsolve(system.tocsc(), rhs)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    return ExactStationary(pi=pi, marginal=_marginals(pi, n))


def _marginals(pi: np.ndarray, n: int) -> np.ndarray:
    out = np.empty(n)
    states = np.arange(pi.size)
    for v in range(n):
        out[v] = float(pi[(states >> v) & 1 == 1].sum())
    return out


def joint_state_occupancy(traj: Trajectory) -> np.ndarray:
    """Empirical time fraction spent in each joint state (bitmask-indexed)
    over [burn_in, horizon].  Only sensible for small n."""
    if traj.n > EXACT_MAX_NODES:
        raise DomainError("joint occupancy limited to small graphs")
    occupancy = np.zeros(1 << traj.n)
    state = int(np.sum(traj.initial.astype(np.int64) << np.arange(traj.n)))
    prev = 0.0
    lo, hi = traj.burn_in, traj.horizon
    for t, v, s in zip(traj.times, traj.nodes, traj.states):
        seg = min(t, hi) - max(prev, lo)
        if seg > 0.0:
            occupancy[state] += seg
        if s:
            state |= 1 << int(v)
        else:
            state &= ~(1 << int(v))
        prev = t
    seg = hi - max(prev, lo)
    if seg > 0.0:
        occupancy[state] += seg
    return occupancy / (hi - lo)
