"""Degree distributions of vulnerability graphs and their stochastic ordering.

A degree distribution is always materialized as an explicit pmf vector over
degrees 0..L-1.  Four kinds are supported:

* regular   -- point mass at a fixed degree g
* random    -- Binomial(n-1, r), the degree of a G(n, r) vertex
* powerlaw  -- pmf(d) proportional to nu * l**nu / d**(nu+1) on l <= d <= n-1,
               renormalized after truncation
* empirical -- any explicit pmf (e.g. measured from a concrete graph)

First-order stochastic comparison (is one distribution pointwise "larger"
than another?) is decided either directly on survival functions or through
the closed-form same-family / cross-family criteria.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import ComparisonError, DomainError

PMF_TOL = 1e-12
ORDER_TOL = 1e-12


def binomial_pmf(trials: int, p: float) -> np.ndarray:
    """Binomial(trials, p) pmf over 0..trials via the stable Pascal recurrence.

    Each row is a convex combination of the previous one, so entries stay
    non-negative and no factorials are formed.
    """
    b = np.zeros(trials + 1)
    b[0] = 1.0
    q = 1.0 - p
    for d in range(1, trials + 1):
        b[1 : d + 1] = q * b[1 : d + 1] + p * b[:d]
        b[0] *= q
    return b


class Relation(Enum):
    """Outcome of a first-order stochastic comparison of (D1, D2)."""

    LE = "LE"  # D1 is stochastically smaller (or equal)
    GE = "GE"
    EQ = "EQ"
    INCOMPARABLE = "INCOMPARABLE"


@dataclass(frozen=True)
class OrderVerdict:
    relation: Relation
    witness: int | None = None  # degree where the survival curves cross

    def flipped(self) -> "OrderVerdict":
        if self.relation is Relation.LE:
            return OrderVerdict(Relation.GE, self.witness)
        if self.relation is Relation.GE:
            return OrderVerdict(Relation.LE, self.witness)
        return self


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """A materialized degree distribution with its originating parameters."""

    kind: str  # "regular" | "random" | "powerlaw" | "empirical"
    params: Mapping[str, float]
    pmf: np.ndarray

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.ndim != 1 or pmf.size == 0:
            raise DomainError("pmf must be a non-empty 1-d vector")
        if np.any(pmf < 0.0) or not np.all(np.isfinite(pmf)):
            raise DomainError("pmf entries must be finite and >= 0")
        total = float(pmf.sum())
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"pmf sums to {total!r}, not 1")
        pmf = pmf / total  # exact renormalization, then freeze
        pmf.flags.writeable = False
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        assert abs(float(self.pmf.sum()) - 1.0) <= PMF_TOL

    # -- constructors ------------------------------------------------------

    @classmethod
    def regular(cls, degree: int) -> "DegreeDistribution":
        if degree < 0:
            raise DomainError("degree must be >= 0")
        pmf = np.zeros(degree + 1)
        pmf[degree] = 1.0
        return cls("regular", {"degree": degree}, pmf)

    @classmethod
    def random(cls, n: int, edge_prob: float) -> "DegreeDistribution":
        if n < 1:
            raise DomainError("n must be >= 1")
        if not 0.0 <= edge_prob <= 1.0:
            raise DomainError("edge probability must lie in [0, 1]")
        return cls(
            "random",
            {"n": n, "edge_prob": edge_prob},
            binomial_pmf(n - 1, edge_prob),
        )

    @classmethod
    def power_law(cls, min_degree: int, exponent: float, n: int) -> "DegreeDistribution":
        if min_degree < 1:
            raise DomainError("min_degree must be >= 1")
        if exponent < 1.0:
            raise DomainError("exponent must be >= 1")
        if min_degree > n - 1:
            raise DomainError("min_degree must be <= n - 1")
        d = np.arange(n, dtype=float)
        pmf = np.zeros(n)
        tail = d >= min_degree
        pmf[tail] = exponent * min_degree**exponent / d[tail] ** (exponent + 1)
        pmf /= pmf.sum()
        return cls(
            "powerlaw",
            {"min_degree": min_degree, "exponent": exponent, "n": n},
            pmf,
        )

    @classmethod
    def empirical(cls, pmf) -> "DegreeDistribution":
        return cls("empirical", {}, np.asarray(pmf, dtype=float))

    @classmethod
    def from_graph(cls, graph) -> "DegreeDistribution":
        counts = np.bincount(graph.degrees(), minlength=graph.n)
        return cls.empirical(counts / graph.n)

    # -- accessors ---------------------------------------------------------

    @property
    def mean(self) -> float:
        return float(np.dot(np.arange(self.pmf.size), self.pmf))

    @property
    def is_parametric(self) -> bool:
        return self.kind != "empirical"

    def pmf_padded(self, length: int) -> np.ndarray:
        if length < self.pmf.size:
            raise DomainError("cannot shrink a pmf's support")
        out = np.zeros(length)
        out[: self.pmf.size] = self.pmf
        return out

    def survival(self, length: int | None = None) -> np.ndarray:
        """S[d] = Pr[D > d] for d = 0..length-1."""
        pmf = self.pmf_padded(length) if length else self.pmf
        return np.cumsum(pmf[::-1])[::-1] - pmf

    def spec_string(self) -> str:
        p = self.params
        if self.kind == "regular":
            return f"regular:{int(p['degree'])}"
        if self.kind == "random":
            return f"random:{int(p['n'])}:{p['edge_prob']}"
        if self.kind == "powerlaw":
            return f"powerlaw:{int(p['min_degree'])}:{p['exponent']}:{int(p['n'])}"
        return "empirical"


def stochastic_order(
    d1: DegreeDistribution, d2: DegreeDistribution, tol: float = ORDER_TOL
) -> OrderVerdict:
    """Compare survival functions pointwise over the common support.

    LE means Pr[D1 > d] <= Pr[D2 > d] + tol for every degree d (D1 is
    stochastically smaller); INCOMPARABLE carries a witness degree past
    which the curves have crossed in both directions.
    """
    length = max(d1.pmf.size, d2.pmf.size)
    s1 = d1.survival(length)
    s2 = d2.survival(length)
    le_viol = np.nonzero(s1 > s2 + tol)[0]
    ge_viol = np.nonzero(s2 > s1 + tol)[0]
    if le_viol.size == 0 and ge_viol.size == 0:
        return OrderVerdict(Relation.EQ)
    if le_viol.size == 0:
        return OrderVerdict(Relation.LE)
    if ge_viol.size == 0:
        return OrderVerdict(Relation.GE)
    return OrderVerdict(Relation.INCOMPARABLE, witness=int(max(le_viol[0], ge_viol[0])))


def order_same_family(d1: DegreeDistribution, d2: DegreeDistribution) -> OrderVerdict:
    """Closed-form ordering of two parametric distributions of one kind.

    Regular: smaller degree is smaller.  Random (same n): smaller edge
    probability is smaller.  Power law (same min degree and support): the
    LARGER exponent is stochastically smaller, since its survival tail
    l**nu / d**nu decays faster.  Falls back to the materialized comparison
    when supports differ.
    """
    if not (d1.is_parametric and d2.is_parametric):
        raise ComparisonError("order_same_family needs parametric distributions")
    if d1.kind != d2.kind:
        raise ComparisonError(f"kind mismatch: {d1.kind} vs {d2.kind}")
    p1, p2 = d1.params, d2.params
    if d1.kind == "regular":
        return _from_scalar_order(p1["degree"], p2["degree"])
    if d1.kind == "random":
        if p1["n"] != p2["n"]:
            return stochastic_order(d1, d2)
        return _from_scalar_order(p1["edge_prob"], p2["edge_prob"])
    if p1["min_degree"] != p2["min_degree"] or p1["n"] != p2["n"]:
        return stochastic_order(d1, d2)
    return _from_scalar_order(p2["exponent"], p1["exponent"])  # larger nu => smaller D


def order_cross_family(
    d1: DegreeDistribution, d2: DegreeDistribution, n: int
) -> OrderVerdict:
    """Ordering across (regular, powerlaw) or (random, powerlaw) pairs.

    Regular(g) vs PowerLaw(l, nu): if l >= g the regular distribution is
    smaller.  Random(r) vs PowerLaw(l, nu): the random one is smaller when
    l**2 / (2*pi*(n-l-1)*nu**2) <= r <= l / (n-1).  Outside these windows
    the verdict comes from the materialized survival functions.
    """
    kinds = (d1.kind, d2.kind)
    if "powerlaw" not in kinds or kinds == ("powerlaw", "powerlaw"):
        raise ComparisonError(f"unsupported kind pair: {kinds[0]} vs {kinds[1]}")
    if d1.kind == "powerlaw":
        return order_cross_family(d2, d1, n).flipped()

    pl = d2
    min_degree = pl.params["min_degree"]
    exponent = pl.params["exponent"]
    if pl.params["n"] != n:
        pl = DegreeDistribution.power_law(int(min_degree), exponent, n)

    if d1.kind == "regular":
        if min_degree >= d1.params["degree"]:
            return OrderVerdict(Relation.LE)
        return stochastic_order(d1, pl)
    if d1.kind == "random":
        lo, hi = random_vs_powerlaw_window(int(min_degree), exponent, n)
        if lo <= d1.params["edge_prob"] <= hi:
            return OrderVerdict(Relation.LE)
        return stochastic_order(d1, pl)
    raise ComparisonError(f"unsupported kind pair: {d1.kind} vs powerlaw")


def random_vs_powerlaw_window(min_degree: int, exponent: float, n: int) -> tuple[float, float]:
    """Edge-probability window [lo, hi] inside which Random(n, r) is
    stochastically below PowerLaw(min_degree, exponent, n)."""
    if n <= min_degree + 1:
        raise DomainError("n must exceed min_degree + 1")
    lo = min_degree**2 / (2.0 * np.pi * (n - min_degree - 1) * exponent**2)
    hi = min_degree / (n - 1)
    return float(lo), float(hi)


def power_law_exponent_for_mean(min_degree: int, n: int, target_mean: float) -> float:
    """Exponent whose truncated power-law pmf on [min_degree, n-1] has the
    requested mean (bisection; the mean is strictly decreasing in the
    exponent)."""

    def mean_at(nu: float) -> float:
        return DegreeDistribution.power_law(min_degree, nu, n).mean

    lo, hi = 1.0, 64.0
    if not mean_at(hi) <= target_mean <= mean_at(lo):
        raise DomainError(
            f"target mean {target_mean} unreachable for min_degree={min_degree}, n={n}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean_at(mid) > target_mean:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def _from_scalar_order(a: float, b: float) -> OrderVerdict:
    if a < b:
        return OrderVerdict(Relation.LE)
    if a > b:
        return OrderVerdict(Relation.GE)
    return OrderVerdict(Relation.EQ)


# -- distribution files ----------------------------------------------------

def to_json_dict(dist: DegreeDistribution) -> dict:
    if dist.kind == "empirical":
        return {"kind": "empirical", "pmf": [float(x) for x in dist.pmf]}
    out = {"kind": dist.kind}
    out.update({k: v for k, v in dist.params.items()})
    return out


def from_json_dict(obj: dict) -> DegreeDistribution:
    kind = obj.get("kind")
    if kind == "regular":
        return DegreeDistribution.regular(int(obj["degree"]))
    if kind == "random":
        return DegreeDistribution.random(int(obj["n"]), float(obj["edge_prob"]))
    if kind == "powerlaw":
        return DegreeDistribution.power_law(
            int(obj["min_degree"]), float(obj["exponent"]), int(obj["n"])
        )
    if kind == "empirical":
        return DegreeDistribution.empirical(obj["pmf"])
    raise DomainError(f"unknown distribution kind: {kind!r}")


def write_distribution_file(dist: DegreeDistribution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(dist), fh, sort_keys=True)
        fh.write("\n")


def read_distribution_file(path) -> DegreeDistribution:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))
