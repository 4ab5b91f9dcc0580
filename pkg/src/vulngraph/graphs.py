"""Vulnerability graphs: the value type, three generators, and file I/O.

All generators are pure functions of (parameters, seed).  Graphs are
immutable after construction and every constructor validates simplicity
(no self-loops, no duplicate edges, ids in range) and builds the symmetric
adjacency structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log
from random import Random
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .distributions import DegreeDistribution
from .errors import ConstructionError, DomainError

PAIRING_ATTEMPTS = 100


@dataclass(frozen=True, eq=False)
class VulnerabilityGraph:
    """Undirected simple graph over node ids 0..n-1."""

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...]
    meta: Mapping | None = field(default=None, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], meta=None) -> "VulnerabilityGraph":
        if n < 1:
            raise DomainError("graph needs at least one node")
        seen = set()
        normalized = []
        neighbors: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise DomainError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) out of range for n={n}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise DomainError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            normalized.append((u, v))
            neighbors[u].append(v)
            neighbors[v].append(u)
        normalized.sort()
        return cls(
            n=n,
            edges=tuple(normalized),
            adjacency=tuple(tuple(sorted(ns)) for ns in neighbors),
            meta=MappingProxyType(dict(meta)) if meta is not None else None,
        )

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(ns) for ns in self.adjacency], dtype=int)

    @property
    def mean_degree(self) -> float:
        return 2.0 * self.m / self.n

    def degree_distribution(self) -> DegreeDistribution:
        return DegreeDistribution.from_graph(self)


def empirical_distribution(graph: VulnerabilityGraph) -> DegreeDistribution:
    """pmf(d) = fraction of nodes with degree d."""
    return DegreeDistribution.from_graph(graph)


# -- generators --------------------------------------------------------------

def gen_regular(n: int, degree: int, seed: int) -> VulnerabilityGraph:
    """Random graph where every node has exactly `degree` neighbors.

    Configuration-model stub pairing with conflict repair; restarts up to
    PAIRING_ATTEMPTS times before giving up.
    """
    if not 1 <= degree <= n - 1:
        raise ConstructionError(f"degree {degree} infeasible for n={n}")
    if (n * degree) % 2 != 0:
        raise ConstructionError("n * degree must be even")
    rnd = Random(seed)
    for _ in range(PAIRING_ATTEMPTS):
        edges = _regular_pairing(n, degree, rnd)
        if edges is not None:
            return VulnerabilityGraph.from_edges(n, edges)
    raise ConstructionError(
        f"regular pairing failed after {PAIRING_ATTEMPTS} attempts (n={n}, degree={degree})"
    )


def _regular_pairing(n: int, degree: int, rnd: Random) -> set | None:
    edges: set[tuple[int, int]] = set()
    stubs = list(range(n)) * degree
    while stubs:
        rnd.shuffle(stubs)
        conflicted: dict[int, int] = {}
        it = iter(stubs)
        for u, v in zip(it, it):
            if u > v:
                u, v = v, u
            if u != v and (u, v) not in edges:
                edges.add((u, v))
            else:
                conflicted[u] = conflicted.get(u, 0) + 1
                conflicted[v] = conflicted.get(v, 0) + 1
        if conflicted and not _placeable_pair_exists(conflicted, edges):
            return None
        stubs = [node for node, cnt in conflicted.items() for _ in range(cnt)]
    return edges


def _placeable_pair_exists(stub_counts: dict[int, int], edges: set) -> bool:
    # Self-pairs are never placeable, so only distinct leftover nodes count.
    nodes = list(stub_counts)
    for i, u in enumerate(nodes):
        for v in nodes[i + 1 :]:
            a, b = (u, v) if u < v else (v, u)
            if (a, b) not in edges:
                return True
    return False


def gen_random(n: int, edge_prob: float, seed: int) -> VulnerabilityGraph:
    """G(n, r): each unordered pair is an edge independently with prob r.

    Geometric skipping over the pair sequence, so the cost is O(n + m).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise DomainError("edge probability must lie in [0, 1]")
    edges: list[tuple[int, int]] = []
    if edge_prob >= 1.0:
        edges = [(u, v) for v in range(n) for u in range(v)]
    elif edge_prob > 0.0:
        rnd = Random(seed)
        lp = log(1.0 - edge_prob)
        v, w = 1, -1
        while v < n:
            w += 1 + int(log(1.0 - rnd.random()) / lp)
            while w >= v and v < n:
                w -= v
                v += 1
            if v < n:
                edges.append((w, v))
    return VulnerabilityGraph.from_edges(n, edges)


def gen_powerlaw(n: int, min_degree: int, exponent: float, seed: int) -> VulnerabilityGraph:
    """Power-law graph: degrees sampled i.i.d. from the truncated pmf, then
    wired by configuration-model pairing with self-loop/multi-edge rejection.

    Stubs that cannot be placed after the repair rounds are dropped, so a few
    nodes may end up below `min_degree`; the drop count, the parity fix, and
    the attempt count are recorded in the graph's `meta`.
    """
    dist = DegreeDistribution.power_law(min_degree, exponent, n)  # validates inputs
    rng = np.random.default_rng(seed)
    degrees = rng.choice(n, size=n, p=dist.pmf).astype(int)

    parity_node = None
    if degrees.sum() % 2 == 1:
        candidates = np.nonzero(degrees < n - 1)[0]
        parity_node = int(candidates[rng.integers(candidates.size)])
        degrees[parity_node] += 1

    total_stubs = int(degrees.sum())
    drop_budget = max(2, int(0.01 * total_stubs))
    best: tuple[int, set] | None = None
    attempts = 0
    for attempts in range(1, PAIRING_ATTEMPTS + 1):
        edges, dropped = _powerlaw_pairing(degrees, rng)
        if best is None or dropped < best[0]:
            best = (dropped, edges)
        if best[0] <= drop_budget:
            break
    if best is None or best[0] > drop_budget:
        raise ConstructionError(
            f"power-law pairing dropped {best[0]}/{total_stubs} stubs after "
            f"{PAIRING_ATTEMPTS} attempts"
        )
    meta = {
        "requested_degree_sum": total_stubs,
        "dropped_stubs": best[0],
        "parity_increment_node": parity_node,
        "pairing_attempts": attempts,
    }
    return VulnerabilityGraph.from_edges(n, best[1], meta=meta)


def _powerlaw_pairing(degrees: np.ndarray, rng: np.random.Generator) -> tuple[set, int]:
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(degrees.size), degrees).tolist()
    for _ in range(30):
        order = rng.permutation(len(stubs))
        shuffled = [stubs[i] for i in order]
        leftover: list[int] = []
        it = iter(shuffled)
        for u, v in zip(it, it):
            if u > v:
                u, v = v, u
            if u != v and (u, v) not in edges:
                edges.add((u, v))
            else:
                leftover.append(u)
                leftover.append(v)
        stubs = leftover
        if not stubs:
            break
        counts: dict[int, int] = {}
        for s in stubs:
            counts[s] = counts.get(s, 0) + 1
        if not _placeable_pair_exists(counts, edges):
            break
    if not stubs:
        return edges, 0
    # Conflicted stubs cluster on hubs, so re-pairing them among themselves
    # stalls; place each remaining pair by splitting a random existing edge
    # (u,v) + (x,y) -> (u,x) + (v,y), which preserves x's and y's degrees.
    edge_list = list(edges)
    dropped = 0
    it = iter(stubs)
    for u, v in zip(it, it):
        placed = False
        for _ in range(200):
            idx = int(rng.integers(len(edge_list)))
            x, y = edge_list[idx]
            if rng.integers(2):
                x, y = y, x
            if u == x or u == y or v == x or v == y:
                continue
            e1 = (u, x) if u < x else (x, u)
            e2 = (v, y) if v < y else (y, v)
            if e1 == e2 or e1 in edges or e2 in edges:
                continue
            edges.remove((x, y) if x < y else (y, x))
            edges.add(e1)
            edges.add(e2)
            edge_list[idx] = e1
            edge_list.append(e2)
            placed = True
            break
        if not placed:
            dropped += 2
    return edges, dropped


# -- graph files -------------------------------------------------------------
#
# UTF-8 text; `#` starts a comment line; first non-comment line is `n m`;
# then m lines `u v` with 0-based ids and u < v.

def write_graph_file(graph: VulnerabilityGraph, path, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"{graph.n} {graph.m}\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def read_graph_file(path) -> VulnerabilityGraph:
    header = None
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                parts = line.split()
                if len(parts) != 2:
                    raise DomainError(f"malformed header line: {line!r}")
                header = (int(parts[0]), int(parts[1]))
                continue
            u, v = line.split()
            edges.append((int(u), int(v)))
    if header is None:
        raise DomainError("graph file has no header line")
    n, m = header
    if len(edges) != m:
        raise DomainError(f"header claims {m} edges, file has {len(edges)}")
    return VulnerabilityGraph.from_edges(n, edges)
