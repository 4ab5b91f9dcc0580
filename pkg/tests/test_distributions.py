import json

import numpy as np
import pytest
from scipy import stats

from vulngraph import (
    ComparisonError,
    DegreeDistribution,
    DomainError,
    Relation,
    VulnerabilityGraph,
    order_cross_family,
    order_same_family,
    power_law_exponent_for_mean,
    read_distribution_file,
    stochastic_order,
    write_distribution_file,
)
from vulngraph.distributions import binomial_pmf, random_vs_powerlaw_window


def test_regular_is_point_mass():
    d = DegreeDistribution.regular(5)
    assert d.pmf.size == 6
    assert d.pmf[5] == 1.0
    assert d.mean == 5.0


def test_random_pmf_matches_binomial():
    d = DegreeDistribution.random(50, 0.13)
    expected = stats.binom.pmf(np.arange(50), 49, 0.13)
    np.testing.assert_allclose(d.pmf, expected, atol=1e-12)
    assert abs(d.mean - 49 * 0.13) < 1e-9


def test_binomial_pmf_recurrence_against_scipy():
    for n, p in [(1, 0.5), (7, 0.2), (60, 0.9), (200, 0.013)]:
        np.testing.assert_allclose(
            binomial_pmf(n, p), stats.binom.pmf(np.arange(n + 1), n, p), atol=1e-12
        )


def test_powerlaw_pmf_formula():
    l, nu, n = 2, 1.5, 40
    d = DegreeDistribution.power_law(l, nu, n)
    raw = np.zeros(n)
    for k in range(l, n):
        raw[k] = nu * l**nu / k ** (nu + 1)
    np.testing.assert_allclose(d.pmf, raw / raw.sum(), atol=1e-12)
    assert d.pmf[0] == 0.0 and d.pmf[1] == 0.0


def test_powerlaw_truncation_forces_point_mass():
    d = DegreeDistribution.power_law(4, 2.0, 5)
    assert d.pmf[4] == 1.0


def test_pmf_normalization_invariant():
    for d in (
        DegreeDistribution.regular(3),
        DegreeDistribution.random(30, 0.2),
        DegreeDistribution.power_law(1, 1.2, 100),
        DegreeDistribution.empirical([0.25, 0.25, 0.5]),
    ):
        assert np.all(d.pmf >= 0.0)
        assert abs(float(d.pmf.sum()) - 1.0) <= 1e-12


def test_empirical_validation():
    with pytest.raises(DomainError):
        DegreeDistribution.empirical([0.5, -0.1, 0.6])
    with pytest.raises(DomainError):
        DegreeDistribution.empirical([0.5, 0.3])  # sums to 0.8


def test_survival_function():
    d = DegreeDistribution.empirical([0.2, 0.3, 0.5])
    np.testing.assert_allclose(d.survival(), [0.8, 0.5, 0.0], atol=1e-12)
    np.testing.assert_allclose(d.survival(5), [0.8, 0.5, 0.0, 0.0, 0.0], atol=1e-12)


# -- direct stochastic order ---------------------------------------------------

def test_order_regular_3_vs_5():
    v = stochastic_order(DegreeDistribution.regular(3), DegreeDistribution.regular(5))
    assert v.relation is Relation.LE


def test_order_identity_is_eq():
    d = DegreeDistribution.random(20, 0.3)
    assert stochastic_order(d, d).relation is Relation.EQ


def test_order_crossing_has_witness():
    pmf = np.zeros(11)
    pmf[1] = 0.5
    pmf[10] = 0.5
    emp = DegreeDistribution.empirical(pmf)
    v = stochastic_order(emp, DegreeDistribution.regular(5))
    assert v.relation is Relation.INCOMPARABLE
    assert v.witness is not None
    assert v.witness in set(range(1, 5)) | set(range(5, 10))
    # tabulated survival check: the two curves really do cross
    s1 = emp.survival(11)
    s2 = DegreeDistribution.regular(5).survival(11)
    assert np.any(s1 > s2) and np.any(s2 > s1)


def test_order_antisymmetric_and_reflexive():
    rng = np.random.default_rng(5)
    for _ in range(25):
        p1 = rng.dirichlet(np.ones(8))
        p2 = rng.dirichlet(np.ones(8))
        d1 = DegreeDistribution.empirical(p1)
        d2 = DegreeDistribution.empirical(p2)
        v12 = stochastic_order(d1, d2)
        v21 = stochastic_order(d2, d1)
        assert v21.relation is v12.flipped().relation
        assert stochastic_order(d1, d1).relation is Relation.EQ


def test_order_mean_monotonicity_necessary_condition():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(200):
        d1 = DegreeDistribution.empirical(rng.dirichlet(np.ones(6)))
        d2 = DegreeDistribution.empirical(rng.dirichlet(np.ones(6)))
        v = stochastic_order(d1, d2)
        if v.relation is Relation.LE:
            assert d1.mean <= d2.mean + 1e-9
            checked += 1
        elif v.relation is Relation.GE:
            assert d2.mean <= d1.mean + 1e-9
            checked += 1
    assert checked > 0


# -- same-family ordering -------------------------------------------------------

def test_same_family_random():
    v = order_same_family(
        DegreeDistribution.random(2000, 0.001), DegreeDistribution.random(2000, 0.003)
    )
    assert v.relation is Relation.LE


def test_same_family_powerlaw_larger_exponent_is_smaller():
    v = order_same_family(
        DegreeDistribution.power_law(2, 2.0, 100), DegreeDistribution.power_law(2, 1.5, 100)
    )
    assert v.relation is Relation.LE


def test_same_family_regular_eq():
    v = order_same_family(DegreeDistribution.regular(4), DegreeDistribution.regular(4))
    assert v.relation is Relation.EQ


def test_same_family_kind_mismatch():
    with pytest.raises(ComparisonError):
        order_same_family(DegreeDistribution.regular(4), DegreeDistribution.random(10, 0.5))
    with pytest.raises(ComparisonError):
        order_same_family(
            DegreeDistribution.regular(4), DegreeDistribution.empirical([0.0, 1.0])
        )


def test_same_family_agrees_with_survival_comparison():
    rng = np.random.default_rng(23)
    for _ in range(50):
        g1, g2 = rng.integers(1, 20, size=2)
        va = order_same_family(
            DegreeDistribution.regular(int(g1)), DegreeDistribution.regular(int(g2))
        )
        vb = stochastic_order(
            DegreeDistribution.regular(int(g1)), DegreeDistribution.regular(int(g2))
        )
        assert va.relation is vb.relation
    for _ in range(50):
        n = int(rng.integers(5, 60))
        r1, r2 = rng.uniform(0.0, 1.0, size=2)
        va = order_same_family(
            DegreeDistribution.random(n, float(r1)), DegreeDistribution.random(n, float(r2))
        )
        vb = stochastic_order(
            DegreeDistribution.random(n, float(r1)), DegreeDistribution.random(n, float(r2))
        )
        assert va.relation is vb.relation
    for _ in range(50):
        n = int(rng.integers(10, 80))
        l = int(rng.integers(1, 5))
        nu1, nu2 = rng.uniform(1.0, 3.0, size=2)
        va = order_same_family(
            DegreeDistribution.power_law(l, float(nu1), n),
            DegreeDistribution.power_law(l, float(nu2), n),
        )
        vb = stochastic_order(
            DegreeDistribution.power_law(l, float(nu1), n),
            DegreeDistribution.power_law(l, float(nu2), n),
        )
        assert va.relation is vb.relation


# -- cross-family ordering --------------------------------------------------------

def test_cross_family_regular_vs_powerlaw():
    v = order_cross_family(
        DegreeDistribution.regular(3), DegreeDistribution.power_law(3, 2.0, 100), n=100
    )
    assert v.relation is Relation.LE
    flipped = order_cross_family(
        DegreeDistribution.power_law(3, 2.0, 100), DegreeDistribution.regular(3), n=100
    )
    assert flipped.relation is Relation.GE


def test_cross_family_window_arithmetic():
    lo, hi = random_vs_powerlaw_window(4, 1.5, 2000)
    assert lo == pytest.approx(16.0 / (2.0 * np.pi * 1995.0 * 2.25), rel=1e-12)
    assert hi == pytest.approx(4.0 / 1999.0, rel=1e-12)
    assert lo == pytest.approx(5.673e-4, rel=1e-3)
    assert hi == pytest.approx(2.001e-3, rel=1e-3)


def test_cross_family_random_inside_window():
    pl = DegreeDistribution.power_law(4, 1.5, 2000)
    v = order_cross_family(DegreeDistribution.random(2000, 0.001), pl, n=2000)
    assert v.relation is Relation.LE


def test_cross_family_fallback_outside_condition():
    reg = DegreeDistribution.regular(5)
    pl = DegreeDistribution.power_law(2, 3.0, 2000)
    v = order_cross_family(reg, pl, n=2000)
    direct = stochastic_order(reg, pl)
    assert v.relation is direct.relation


def test_cross_family_unsupported_pair():
    with pytest.raises(ComparisonError):
        order_cross_family(
            DegreeDistribution.regular(3), DegreeDistribution.random(10, 0.2), n=10
        )


# -- helpers and files -------------------------------------------------------------

def test_power_law_exponent_for_mean():
    nu = power_law_exponent_for_mean(2, 2000, 4.0)
    assert DegreeDistribution.power_law(2, nu, 2000).mean == pytest.approx(4.0, abs=1e-9)
    with pytest.raises(DomainError):
        power_law_exponent_for_mean(2, 2000, 1.0)  # below min_degree


def test_from_graph():
    square = VulnerabilityGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    d = DegreeDistribution.from_graph(square)
    assert d.pmf[2] == 1.0
    empty = VulnerabilityGraph.from_edges(10, [])
    assert DegreeDistribution.from_graph(empty).pmf[0] == 1.0


def test_distribution_file_round_trip(tmp_path):
    for d in (
        DegreeDistribution.regular(5),
        DegreeDistribution.random(30, 0.25),
        DegreeDistribution.power_law(2, 1.7, 50),
        DegreeDistribution.empirical([0.5, 0.25, 0.25]),
    ):
        path = tmp_path / "dist.json"
        write_distribution_file(d, path)
        loaded = read_distribution_file(path)
        assert loaded.kind == d.kind
        np.testing.assert_allclose(loaded.pmf, d.pmf, atol=1e-15)
    obj = json.loads((tmp_path / "dist.json").read_text())
    assert obj["kind"] == "empirical"
