import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import discrete_pareto, geometric_mean_by_size, graph_from_edges, random_digraph
from wnstat.graph import supremacy_all
from wnstat.model import (
    ANTONYM,
    HYPERNYM,
    Lexeme,
    PartOfSpeech,
    RelationEdge,
    Synset,
    WordnetGraph,
)
from wnstat.stats import (
    BinnedDistribution,
    InsufficientBins,
    InsufficientClasses,
    NonPositiveValue,
    ProfileRow,
    ZeroSupremacy,
    bin_edge,
    fit_exponential_scaling,
    fit_power_law,
    geometric_profile,
    ilink_census,
    log_bin,
    polysemy_histogram,
    relation_census,
    supremacy_size_profile,
    synset_size_histogram,
)

N, V = PartOfSpeech.NOUN, PartOfSpeech.VERB


def syn(sid, pos, *lemmas):
    return Synset(sid, pos, tuple(Lexeme(l, pos) for l in lemmas))


# ---------------------------------------------------------------- histograms


def test_synset_sizes():
    g = WordnetGraph("t", [syn("a", N, "x"), syn("b", N, "y"), syn("c", N, "p", "q")], [])
    h = synset_size_histogram(g)
    assert h.counts == {1: 2, 2: 1} and h.total == 3


def test_pos_filter_on_noun_only_graph():
    g = WordnetGraph("t", [syn("a", N, "x")], [])
    assert synset_size_histogram(g, V).counts == {}


def test_polysemy_within_pos():
    g = WordnetGraph("t", [syn(f"s{i}", N, "bank") for i in range(3)], [])
    assert polysemy_histogram(g, N).counts == {3: 1}


def test_polysemy_pools_pos_without_filter():
    g = WordnetGraph("t", [syn("a", N, "run"), syn("b", V, "run")], [])
    assert polysemy_histogram(g).counts == {2: 1}
    assert polysemy_histogram(g, N).counts == {1: 1}


def test_unique_lexemes():
    g = WordnetGraph("t", [syn("a", N, "x", "y"), syn("b", N, "z")], [])
    assert polysemy_histogram(g).counts == {1: 3}


def test_histogram_totals(tiny_graph):
    # s1 {bank, depository} n, s2 {bank} n, s3 {bank, deposit} v
    assert synset_size_histogram(tiny_graph, N).total == 2
    assert polysemy_histogram(tiny_graph).counts == {3: 1, 1: 2}
    assert polysemy_histogram(tiny_graph, N).counts == {2: 1, 1: 1}


def test_relation_census():
    g = WordnetGraph(
        "t",
        [syn("a", N, "x"), syn("b", N, "y"), syn("c", N, "z")],
        [RelationEdge("a", "b", HYPERNYM), RelationEdge("c", "b", HYPERNYM), RelationEdge("a", "c", ANTONYM)],
    )
    assert relation_census(g) == {"hypernym": 2, "antonym": 1}
    assert relation_census(WordnetGraph("t", [], [])) == {}


def test_ilink_census():
    from wnstat.model import InterlingualLink, LinkType

    links = [InterlingualLink("a", "b"), InterlingualLink("c", "d"), InterlingualLink("a", "e", LinkType.parse("i_hyponymy"))]
    assert ilink_census(links) == {"i_synonymy": 2, "i_hyponymy": 1}


# ---------------------------------------------------------------- binning


def test_three_ones():
    d = log_bin([1, 1, 1], 5)
    assert [(b.k, b.count) for b in d] == [(0, 3)]


def test_power_of_ten_opens_its_bin():
    assert [b.k for b in log_bin([10], 5)] == [5]
    assert [b.k for b in log_bin([10.0], 5)] == [5]
    assert [b.k for b in log_bin([1000, 10**6], 5)][::15] == [15, 30]


def test_interior_empty_bins_kept():
    d = log_bin([1, 100], 5)
    assert [b.k for b in d] == list(range(0, 11))
    assert [b.count for b in d] == [1] + [0] * 9 + [1]


def test_values_below_one_rejected():
    with pytest.raises(NonPositiveValue) as info:
        log_bin([3, 0.5, 2], 5)
    assert info.value.index == 1
    with pytest.raises(NonPositiveValue):
        log_bin([0], 5)


def test_bin_records():
    d = log_bin([1, 2, 2, 3], 5)
    b = d.bins[0]
    assert b.lower == 1 and b.upper == pytest.approx(10 ** 0.2)
    assert b.midpoint == pytest.approx(math.sqrt(b.lower * b.upper))
    assert b.density == pytest.approx(1 / (4 * (b.upper - b.lower)))


def _oracle_bin(v, b):
    k = 0
    while bin_edge(k + 1, b) <= v:
        k += 1
    return k


@given(st.lists(st.floats(1, 1e6, allow_nan=False), min_size=1, max_size=200), st.integers(1, 12))
@settings(max_examples=100, deadline=None)
def test_binning_partition_floats(values, b):
    d = log_bin(values, b)
    assert d.total == len(values) == int(d.counts.sum())
    ks = [bb.k for bb in d]
    assert ks == list(range(ks[0], ks[-1] + 1))
    lookup = {bb.k: bb for bb in d}
    expected = {}
    for v in values:
        k = _oracle_bin(v, b)
        assert lookup[k].lower <= v < lookup[k].upper
        expected[k] = expected.get(k, 0) + 1
    assert {bb.k: bb.count for bb in d if bb.count} == expected


@given(st.lists(st.integers(1, 10**7), min_size=1, max_size=200), st.integers(1, 10))
@settings(max_examples=100, deadline=None)
def test_binning_partition_integers(values, b):
    d = log_bin(np.array(values, dtype=np.int64), b)
    got = {bb.k: bb.count for bb in d if bb.count}
    expected = {}
    for v in values:
        # exact: v lies in bin k iff 10**k <= v**b < 10**(k+1)
        k = 0
        while 10 ** (k + 1) <= v**b:
            k += 1
        expected[k] = expected.get(k, 0) + 1
    assert got == expected


def test_hundred_thousand_random_values_partition():
    rng = np.random.default_rng(0)
    values = rng.uniform(1, 1e5, 10**5)
    assert log_bin(values, 5).counts.sum() == 10**5


# ---------------------------------------------------------------- power law


def exact_power_law(gamma, b=5, ks=range(0, 25)):
    return BinnedDistribution.from_densities(
        [(k, math.sqrt(bin_edge(k, b) * bin_edge(k + 1, b)) ** -gamma) for k in ks], b
    )


def test_exact_power_law_slope():
    fit = fit_power_law(exact_power_law(1.8))
    assert fit.exponent == pytest.approx(1.8, abs=0.01)
    assert fit.r_squared == pytest.approx(1.0)


def test_density_scale_changes_intercept_only():
    d = exact_power_law(1.8)
    scaled = BinnedDistribution.from_densities([(b.k, 7.5 * b.density) for b in d], 5)
    f1, f2 = fit_power_law(d), fit_power_law(scaled)
    assert f2.exponent == pytest.approx(f1.exponent, abs=1e-12)
    assert f2.intercept == pytest.approx(f1.intercept + math.log10(7.5))


def test_pareto_samples():
    values = discrete_pareto(np.random.default_rng(2024), 10**5, 1.8)
    fit = fit_power_law(log_bin(values, 5))
    assert 1.65 <= fit.exponent <= 1.95


def test_two_bins_insufficient():
    with pytest.raises(InsufficientBins):
        fit_power_law(log_bin([1, 2, 2], 5))


def test_s_min_restricts_bins():
    d = exact_power_law(2.0)
    fit = fit_power_law(d, s_min=100)
    assert fit.n_bins == sum(1 for b in d if b.midpoint >= 100)
    assert fit.exponent == pytest.approx(2.0)


# ---------------------------------------------------------------- supremacy profile


def test_geometric_mean_of_one_and_hundred():
    rows = geometric_profile([(1, 1), (1, 100)])
    assert rows == [ProfileRow(1, pytest.approx(10.0), 2)]


def test_all_size_one():
    g = graph_from_edges(5, [(0, 1), (1, 2)])
    rows = supremacy_size_profile(g, supremacy_all(g))
    assert len(rows) == 1 and rows[0].size == 1 and rows[0].count == 5


def test_zero_supremacy_rejected():
    with pytest.raises(ZeroSupremacy):
        geometric_profile([(1, 0), (1, 3)])


def test_profile_matches_independent_recomputation():
    rng = np.random.default_rng(9)
    n = 400
    edges = random_digraph(rng, n, 500, dag=True)
    sizes = rng.integers(1, 6, n)
    ids = [f"v{i:04d}" for i in range(n)]
    synsets = [Synset(ids[i], N, tuple(Lexeme(f"w{i}_{j}", N) for j in range(sizes[i]))) for i in range(n)]
    g = WordnetGraph("t", synsets, [RelationEdge(ids[a], ids[b], HYPERNYM) for a, b in edges])
    table = supremacy_all(g)
    rows = supremacy_size_profile(g, table)
    ref = geometric_mean_by_size([(int(sizes[i]), table[ids[i]]) for i in range(n)])
    assert [r.size for r in rows] == list(ref)
    for r in rows:
        assert abs(r.geometric_mean - ref[r.size]) <= 1e-12 * ref[r.size]


# ---------------------------------------------------------------- exponential scaling


@pytest.mark.parametrize("alpha", [0.26, 0.08])
def test_exact_exponential_profile(alpha):
    profile = [ProfileRow(l, math.exp(alpha * l), 100) for l in range(1, 6)]
    fit = fit_exponential_scaling(profile)
    assert fit.exponent == pytest.approx(alpha, abs=1e-6)
    assert (fit.l_min, fit.l_max) == (1, 5)


def test_coverage_prefix():
    counts = [900, 80, 15, 4, 1]
    profile = [ProfileRow(l, math.exp(0.3 * l), c) for l, c in zip(range(1, 6), counts)]
    fit = fit_exponential_scaling(profile, 0.99)
    # 900+80+15 = 995 >= 990
    assert fit.l_max == 3 and fit.coverage == pytest.approx(0.995)


def test_insufficient_classes():
    with pytest.raises(InsufficientClasses):
        fit_exponential_scaling([ProfileRow(1, 1.0, 99), ProfileRow(2, 2.0, 1)])


@given(st.floats(-1, 1), st.floats(-5, 5), st.integers(3, 30))
@settings(max_examples=50, deadline=None)
def test_exponential_recovery_property(alpha, c, top):
    profile = [ProfileRow(l, math.exp(alpha * l + c), 10) for l in range(1, top + 1)]
    fit = fit_exponential_scaling(profile, 1.0)
    assert fit.exponent == pytest.approx(alpha, rel=1e-6, abs=1e-9)
