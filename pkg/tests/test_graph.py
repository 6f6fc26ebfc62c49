import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from div2vec.graph import (
    IdMap,
    ItemFeatureMatrix,
    LabeledEdgeSet,
    RatingRecord,
    binarize_ratings,
    build_graph,
    filter_records,
    read_edgelist,
    read_item_features,
    read_ratings,
    split_edges,
    write_edgelist,
)


def check_invariants(g):
    assert g.offsets[0] == 0 and g.offsets[-1] == g.neighbors.shape[0]
    assert np.all(np.diff(g.offsets) >= 0)
    assert np.array_equal(g.degrees, np.diff(g.offsets))
    for v in range(g.node_count):
        nb = g.neighbors_of(v)
        assert np.all(np.diff(nb) > 0)
        assert v not in nb
        for u in nb:
            assert g.has_edge(u, v)
    assert g.degrees.sum() == 2 * g.edge_count


def test_path_graph():
    g = build_graph([(0, 1), (1, 2)])
    assert g.degrees.tolist() == [1, 2, 1]
    check_invariants(g)


def test_symmetric_duplicates_collapse():
    g = build_graph([(0, 1), (1, 0)])
    assert g.degrees.tolist() == [1, 1]
    assert g.edge_count == 1


def test_star():
    g = build_graph([(0, 1), (0, 2), (0, 3)])
    assert g.degrees.tolist() == [3, 1, 1, 1]


def test_self_loop_rejected():
    with pytest.raises(ValueError, match="self-loop"):
        build_graph([(0, 1), (2, 2)])


def test_partition_violation_rejected():
    with pytest.raises(ValueError, match="same partition"):
        build_graph([(0, 2), (0, 1)], partition=[0, 0, 1])


def test_isolated_nodes_kept():
    g = build_graph([(0, 1)], node_count=4)
    assert g.degrees.tolist() == [1, 1, 0, 0]


edge_lists = st.lists(
    st.tuples(st.integers(0, 15), st.integers(0, 15)).filter(lambda e: e[0] != e[1]), max_size=60
)


@given(edge_lists)
def test_invariants_hold(edges):
    g = build_graph(edges, node_count=16)
    check_invariants(g)
    assert g.edge_count == len({tuple(sorted(e)) for e in edges})


@given(edge_lists)
@settings(max_examples=30)
def test_edgelist_roundtrip(tmp_path_factory, edges):
    path = tmp_path_factory.mktemp("el") / "g.tsv"
    g = build_graph(edges, node_count=16)
    write_edgelist(g, path)
    assert read_edgelist(path).same_structure(g)


def test_edgelist_roundtrip_bipartite(tmp_path):
    g = build_graph([(0, 3), (1, 3), (2, 4)], partition=[0, 0, 0, 1, 1])
    write_edgelist(g, tmp_path / "g.tsv")
    h = read_edgelist(tmp_path / "g.tsv")
    assert h.same_structure(g)
    u, v = h.edges().T
    assert np.all(h.partition[u] != h.partition[v])


# ratings -------------------------------------------------------------------


def test_binarize_examples():
    recs = [RatingRecord("a", "x", 4.5), RatingRecord("a", "y", 2.0), RatingRecord("a", "z", 3.5)]
    pos, neg = binarize_ratings(recs, 4.0, 3.0)
    assert pos == [("a", "x")]
    assert neg == [("a", "y")]


def test_binarize_boundaries_inclusive_and_strict():
    recs = [RatingRecord("a", "x", 4.0), RatingRecord("a", "y", 3.0)]
    assert binarize_ratings(recs) == ([("a", "x")], [("a", "y")])
    assert binarize_ratings(recs, strict=True) == ([], [])


def test_binarize_threshold_order():
    with pytest.raises(ValueError):
        binarize_ratings([], 3.0, 4.0)


def test_filter_small_user_removed():
    recs = [("u1", f"i{k}") for k in range(5)] + [(f"v{k}", f"i{j}") for k in range(10) for j in range(10)]
    out = filter_records(recs, 1, 10, 1000)
    assert not any(r[0] == "u1" for r in out)


def test_filter_heavy_user_removed():
    recs = [("big", f"i{k}") for k in range(1500)] + [("ok", f"i{k}") for k in range(20)]
    out = filter_records(recs, 1, 10, 1000)
    assert {r[0] for r in out} == {"ok"}


def test_filter_boundary_kept():
    recs = [(f"u{k}", f"i{j}") for k in range(10) for j in range(10)]
    assert filter_records(recs, 10, 10, 1000) == recs


def test_filter_fixed_point_vs_single_pass():
    # dropping rare item i9 pushes u0 below 10 records
    recs = [("u0", f"i{j}") for j in range(10)] + [(f"u{k}", f"i{j}") for k in range(1, 11) for j in range(9)]
    single = filter_records(recs, 10, 10, 1000, single_pass=True)
    fixed = filter_records(recs, 10, 10, 1000)
    assert any(r[0] == "u0" for r in single)
    assert not any(r[0] == "u0" for r in fixed)


records_st = st.lists(
    st.tuples(st.sampled_from("abcdef"), st.sampled_from("vwxyz"), st.sampled_from([0.5 * k for k in range(1, 11)])),
    max_size=80,
)


@given(records_st, st.randoms())
def test_binarize_filter_order_independent(raw, rnd):
    def run(rows):
        pos, neg = binarize_ratings([RatingRecord(*r) for r in rows])
        lab = [(u, i, 1) for u, i in pos] + [(u, i, 0) for u, i in neg]
        return sorted(filter_records(lab, 2, 2, 4))

    shuffled = list(raw)
    rnd.shuffle(shuffled)
    assert run(raw) == run(shuffled)


def test_read_ratings_formats(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("userId,movieId,rating,timestamp\n1,10,4.5,123\n2,10,3.0,124\n")
    assert read_ratings(p) == [RatingRecord("1", "10", 4.5), RatingRecord("2", "10", 3.0)]
    q = tmp_path / "u.data"
    q.write_text("1\t10\t4\t99\n")
    assert read_ratings(q) == [RatingRecord("1", "10", 4.0)]
    bad = tmp_path / "bad.csv"
    bad.write_text("1,10,4.2,0\n")
    with pytest.raises(ValueError, match="half-star"):
        read_ratings(bad)


# splits / id maps ------------------------------------------------------------


def test_split_counts():
    pairs = [(i, 100 + i) for i in range(10)]
    e = split_edges(pairs, 0.2, seed=3)
    assert e.test.sum() == 2 and (~e.test).sum() == 8
    e2 = split_edges(pairs[:2], 0.5, seed=0)
    assert e2.test.sum() == 1


def test_split_deterministic():
    pairs = [(i, 100 + i) for i in range(50)]
    a = split_edges(pairs, 0.2, seed=7)
    b = split_edges(pairs, 0.2, seed=7)
    assert np.array_equal(a.test, b.test)


def test_split_rejects():
    with pytest.raises(ValueError):
        split_edges([(0, 1)], 0.2)
    with pytest.raises(ValueError):
        split_edges([(0, 1), (1, 0)], 0.5)
    with pytest.raises(ValueError):
        split_edges([(0, 1), (1, 2)], 1.0)


def test_labeled_edges_csv_roundtrip(tmp_path):
    e = split_edges([(0, 5), (1, 5), (2, 6), (3, 7)], 0.5, seed=1, labels=[1, 0, 1, 0])
    e.write_csv(tmp_path / "e.csv")
    f = LabeledEdgeSet.read_csv(tmp_path / "e.csv")
    for a in ("u", "v", "label", "test"):
        assert np.array_equal(getattr(e, a), getattr(f, a))


def test_idmap_roundtrip(tmp_path):
    m = IdMap.from_pairs([("7", "7"), ("3", "9")])
    assert m.external == ["u:3", "u:7", "i:7", "i:9"]
    assert m.partition().tolist() == [0, 0, 1, 1]
    m.write(tmp_path / "ids.tsv")
    assert IdMap.read(tmp_path / "ids.tsv").external == m.external


def test_item_features(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("movieId,tagId,relevance\n1,1,0.5\n1,2,0.1\n2,2,0.9\n")
    fm = read_item_features(p)
    assert fm.items == ["1", "2"] and fm.tags == ["1", "2"]
    assert fm.vector("2").tolist() == [0.0, 0.9]
    with pytest.raises(ValueError, match="all-zero"):
        ItemFeatureMatrix(["a"], ["t"], np.zeros((1, 1)))
    with pytest.raises(ValueError):
        ItemFeatureMatrix(["a"], ["t"], np.array([[1.5]]))
