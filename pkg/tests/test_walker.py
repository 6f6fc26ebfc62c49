import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from div2vec.alias import AliasTable
from div2vec.datasets import preferential_attachment_graph, rewire_degree_preserving
from div2vec.graph import build_graph
from div2vec.walker import (
    COMMON_NEIGHBOR,
    DeadEnd,
    WalkStrategy,
    corpus_from_walks,
    frequency_profile,
    generate_corpus,
    second_order_weights,
    transition_distribution,
    WalkCorpus,
)

INVERSE = WalkStrategy.degree_biased("inverse")


def hub_graph():
    # node 0 has neighbours 1 (degree 10) and 2 (degree 90)
    edges = [(0, 1), (0, 2)]
    nxt = 3
    for hub, deg in ((1, 10), (2, 90)):
        for _ in range(deg - 1):
            edges.append((hub, nxt))
            nxt += 1
    return build_graph(edges)


def random_graph(seed, n=12, p=0.3):
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return build_graph(edges, node_count=n)


# alias tables ---------------------------------------------------------------


def test_alias_encodes_exact_distribution():
    w = np.array([0.25, 0.4, 0.35, 0.0, 2.0])
    t = AliasTable(w)
    np.testing.assert_allclose(t.exact(), w / w.sum(), atol=1e-15)


@pytest.mark.parametrize("f", ["inverse", "inverse_sqrt"])
def test_alias_sampling_chi_square_every_node(f):
    g = random_graph(4, n=10, p=0.5)
    weights = {"inverse": 1.0 / g.degrees[g.neighbors], "inverse_sqrt": 1.0 / np.sqrt(g.degrees[g.neighbors])}[f]
    t = AliasTable(weights, g.offsets)
    for v in range(g.node_count):
        if g.degrees[v] < 2:
            continue
        exact = transition_distribution(g, WalkStrategy.degree_biased(f), v)
        draws = t.draw(100_000, seed=v, slot=v)
        obs = np.bincount(draws, minlength=g.degrees[v])
        assert chisquare(obs, exact * draws.shape[0]).pvalue > 0.001


def test_alias_rejects_bad_weights():
    with pytest.raises(ValueError):
        AliasTable([1.0, -1.0])
    with pytest.raises(ValueError):
        AliasTable([0.0, 0.0])


# transition distributions ---------------------------------------------------


def test_inverse_degree_example():
    g = hub_graph()
    assert g.degrees[1] == 10 and g.degrees[2] == 90
    p = transition_distribution(g, INVERSE, 0)
    assert abs(p[0] - 0.9) < 1e-12 and abs(p[1] - 0.1) < 1e-12


def test_uniform_star():
    g = build_graph([(0, 1), (0, 2), (0, 3)])
    assert transition_distribution(g, WalkStrategy.uniform(), 0).tolist() == [1 / 3] * 3


def test_second_order_cases():
    # current 0, previous 1; 2 is adjacent to 1, 3 is not
    g = build_graph([(0, 1), (0, 2), (1, 2), (0, 3)])
    p = transition_distribution(g, WalkStrategy.second_order(2.0, 0.5), 0, previous=1)
    np.testing.assert_allclose(p, [1 / 7, 2 / 7, 4 / 7], rtol=0, atol=1e-15)


def test_constant_matches_uniform():
    g = hub_graph()
    for v in range(g.node_count):
        assert np.array_equal(
            transition_distribution(g, WalkStrategy.degree_biased("constant"), v),
            transition_distribution(g, WalkStrategy.uniform(), v),
        )


def test_dead_end():
    g = build_graph([(0, 1)], node_count=3)
    with pytest.raises(DeadEnd):
        transition_distribution(g, WalkStrategy.uniform(), 2)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_strategy_equivalence(seed):
    g = random_graph(seed, n=9, p=0.4)
    uni, n2v, const = WalkStrategy.uniform(), WalkStrategy.second_order(1, 1), WalkStrategy.degree_biased("constant")
    for v in range(g.node_count):
        if g.degrees[v] == 0:
            continue
        ref = transition_distribution(g, uni, v)
        assert np.array_equal(ref, transition_distribution(g, const, v))
        for prev in g.neighbors_of(v):
            assert np.array_equal(ref, transition_distribution(g, n2v, v, int(prev)))


def test_strategy_validation():
    with pytest.raises(ValueError):
        WalkStrategy.second_order(0, 1)
    with pytest.raises(ValueError):
        WalkStrategy.degree_biased("log")
    for s in (WalkStrategy.uniform(), WalkStrategy.second_order(0.5, 2), INVERSE):
        assert WalkStrategy.parse(s.describe()) == s


# corpora ----------------------------------------------------------------------


def is_valid(corpus, g):
    return all(g.has_edge(int(a), int(b)) for w in corpus.walks for a, b in zip(w[:-1], w[1:]))


def test_single_edge_alternates():
    g = build_graph([(0, 1)])
    c = generate_corpus(g, WalkStrategy.uniform(), walk_length=4, walks_per_node=3)
    for w in c.walks:
        assert w.tolist() in ([0, 1, 0, 1], [1, 0, 1, 0])


def test_walk_count_and_order():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    c = generate_corpus(g, WalkStrategy.uniform(), walk_length=6, walks_per_node=10)
    assert len(c) == 50
    assert [int(w[0]) for w in c.walks] == [v for v in range(5) for _ in range(10)]


@pytest.mark.parametrize("strategy", [WalkStrategy.uniform(), WalkStrategy.second_order(0.5, 2.0), INVERSE])
def test_walks_are_valid_and_reproducible(strategy, tmp_path):
    g = random_graph(11, n=30, p=0.15)
    a = generate_corpus(g, strategy, 20, 3, seed=5)
    b = generate_corpus(g, strategy, 20, 3, seed=5)
    assert is_valid(a, g)
    a.write(tmp_path / "a.txt")
    b.write(tmp_path / "b.txt")
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()
    assert generate_corpus(g, strategy, 20, 3, seed=6).nodes.tolist() != a.nodes.tolist()
    back = WalkCorpus.read(tmp_path / "a.txt")
    assert back.strategy == strategy and np.array_equal(back.nodes, a.nodes)


def test_corpus_rejects():
    g = build_graph([(0, 1)])
    with pytest.raises(ValueError):
        generate_corpus(g, WalkStrategy.uniform(), walk_length=1)
    with pytest.raises(ValueError):
        generate_corpus(g, WalkStrategy.uniform(), walks_per_node=0)
    with pytest.raises(ValueError):
        generate_corpus(build_graph([], node_count=3), WalkStrategy.uniform())


def transition_counts(corpus, n):
    counts = np.zeros((n, n), dtype=np.int64)
    for w in corpus.walks:
        np.add.at(counts, (w[:-1], w[1:]), 1)
    return counts


def test_p3_transitions_match():
    g = build_graph([(0, 1), (1, 2)])
    c = generate_corpus(g, INVERSE, walk_length=40, walks_per_node=200, seed=2)
    counts = transition_counts(c, 3)
    # brute-force transition matrix of P3: ends are forced, middle splits evenly
    brute = np.array([[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]])
    assert counts[0].sum() == counts[0, 1] and counts[2].sum() == counts[2, 1]
    assert chisquare(counts[1, [0, 2]], brute[1, [0, 2]] * counts[1].sum()).pvalue > 0.01


@pytest.mark.parametrize("f", ["inverse", "inverse_sqrt"])
def test_degree_biased_transitions_match(f):
    g = hub_graph()
    strategy = WalkStrategy.degree_biased(f)
    c = generate_corpus(g, strategy, walk_length=30, walks_per_node=20, seed=9)
    counts = transition_counts(c, g.node_count)
    for v in (0, 1, 2):
        nb = g.neighbors_of(v)
        obs = counts[v, nb]
        exp = transition_distribution(g, strategy, v) * obs.sum()
        keep = exp > 0
        assert chisquare(obs[keep], exp[keep]).pvalue > 0.001


def test_second_order_rejection_sampler_matches():
    g = build_graph([(0, 1), (0, 2), (1, 2), (0, 3), (3, 4), (2, 4)])
    strategy = WalkStrategy.second_order(2.0, 0.5)
    c = generate_corpus(g, strategy, walk_length=60, walks_per_node=400, seed=1)
    n = g.node_count
    counts = np.zeros((n, n, n), dtype=np.int64)
    for w in c.walks:
        np.add.at(counts, (w[:-2], w[1:-1], w[2:]), 1)
    for prev, cur in itertools.permutations(range(n), 2):
        if not g.has_edge(prev, cur):
            continue
        nb = g.neighbors_of(cur)
        obs = counts[prev, cur, nb]
        exp = transition_distribution(g, strategy, cur, prev) * obs.sum()
        assert chisquare(obs, exp).pvalue > 0.001


def test_bipartite_middle_case_never_fires():
    rng = np.random.default_rng(0)
    edges = {(int(u), 20 + int(i)) for u, i in zip(rng.integers(0, 20, 80), rng.integers(0, 30, 80))}
    g = build_graph(sorted(edges), partition=[0] * 20 + [1] * 30)
    for cur in range(g.node_count):
        for prev in g.neighbors_of(cur):
            _, cases = second_order_weights(g, cur, int(prev), 0.5, 2.0)
            assert not np.any(cases == COMMON_NEIGHBOR)
    c = generate_corpus(g, WalkStrategy.second_order(0.5, 2.0), walk_length=30, walks_per_node=5)
    assert c.middle_case_hits == 0
    triangle = build_graph([(0, 1), (1, 2), (0, 2)])
    assert generate_corpus(triangle, WalkStrategy.second_order(1, 1), 10, 5).middle_case_hits > 0


# frequency profiles --------------------------------------------------------


def test_frequency_counts():
    g = build_graph([(0, 1)])
    prof = frequency_profile(corpus_from_walks([[0, 1, 0]]), g)
    assert dict(zip(prof.nodes.tolist(), prof.occurrences.tolist())) == {0: 2, 1: 1}


def test_frequency_profile_sums_and_sorting(tmp_path):
    g = preferential_attachment_graph(200, 2, seed=1)
    c = generate_corpus(g, WalkStrategy.uniform(), 20, 2, seed=0)
    prof = frequency_profile(c, g)
    assert prof.occurrences.sum() == np.diff(c.offsets).sum()
    assert np.all(np.diff(prof.degrees) >= 0)
    prof.write_csv(tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "node,degree,occurrences" and lines[-1].startswith("# spearman,")


def test_uniform_frequency_tracks_degree_on_scale_free_graph():
    g = preferential_attachment_graph(1000, 3, seed=0)
    prof = frequency_profile(generate_corpus(g, WalkStrategy.uniform(), 80, 10, seed=0), g)
    assert prof.spearman > 0.8


def test_inverse_frequency_flat_without_degree_correlations():
    # same scale-free degree sequence, wiring randomised; here the stationary
    # mass of the inverse-degree walk no longer depends on degree
    g = rewire_degree_preserving(preferential_attachment_graph(1000, 3, seed=0), 30_000, seed=0)
    rho = {}
    for name, s in [("uniform", WalkStrategy.uniform()), ("sqrt", WalkStrategy.degree_biased("inverse_sqrt")),
                    ("inverse", INVERSE)]:
        rho[name] = frequency_profile(generate_corpus(g, s, 80, 10, seed=0), g).spearman
    assert abs(rho["inverse"]) < 0.3
    assert rho["inverse"] < rho["sqrt"] < rho["uniform"]
