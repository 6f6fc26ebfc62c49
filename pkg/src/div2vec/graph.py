"""Undirected graphs in CSR form, plus MovieLens-style rating ingestion.

The ingestion path is: read ratings, binarize into liked/disliked pairs,
filter sparse users and items, map external ids to dense node ids, split into
train/test edges, and build one graph per polarity from the training edges.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

USER = 0
ITEM = 1
_PARTITION_CHARS = "ui"


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph in compressed sparse adjacency form.

    ``neighbors[offsets[v]:offsets[v+1]]`` lists the neighbours of ``v`` in
    strictly increasing order. ``partition`` optionally tags every node as
    ``USER`` or ``ITEM``.
    """

    node_count: int
    offsets: np.ndarray
    neighbors: np.ndarray
    degrees: np.ndarray
    partition: Optional[np.ndarray] = None

    @property
    def edge_count(self) -> int:
        return int(self.neighbors.shape[0] // 2)

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v] : self.offsets[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors_of(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < nbrs.shape[0] and nbrs[i] == v)

    def edges(self) -> np.ndarray:
        """Each undirected edge once, as ``(u, v)`` rows with ``u < v``."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        keep = src < self.neighbors
        return np.stack([src[keep], self.neighbors[keep]], axis=1)

    def same_structure(self, other: "Graph") -> bool:
        if self.node_count != other.node_count:
            return False
        if not (
            np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.neighbors, other.neighbors)
        ):
            return False
        if (self.partition is None) != (other.partition is None):
            return False
        return self.partition is None or np.array_equal(self.partition, other.partition)


def build_graph(
    edges: Iterable[Sequence[int]],
    node_count: Optional[int] = None,
    partition: Optional[Sequence[int]] = None,
) -> Graph:
    """Build a :class:`Graph` from integer ``(u, v)`` pairs.

    Duplicate pairs, in either orientation, collapse to one edge. Nodes
    ``0..node_count-1`` all exist even when isolated.

    Raises:
        ValueError: on self-loops, negative ids, ids beyond ``node_count``, or
            an edge joining two nodes with the same partition tag.
    """
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if arr.size and arr.min() < 0:
        raise ValueError("node ids must be nonnegative")
    loops = arr[:, 0] == arr[:, 1]
    if np.any(loops):
        raise ValueError(f"self-loop on node {int(arr[loops][0, 0])} is not allowed")
    n_needed = int(arr.max()) + 1 if arr.size else 0
    if node_count is None:
        node_count = n_needed
    elif n_needed > node_count:
        raise ValueError(f"edge references node {n_needed - 1} but node_count is {node_count}")

    part = None
    if partition is not None:
        part = np.asarray(partition, dtype=np.int8)
        if part.shape != (node_count,):
            raise ValueError("partition must tag every node")
        bad = part[arr[:, 0]] == part[arr[:, 1]]
        if np.any(bad):
            u, v = arr[bad][0]
            raise ValueError(f"edge ({u}, {v}) joins two nodes of the same partition")

    both = np.concatenate([arr, arr[:, ::-1]])
    keys = np.unique(both[:, 0] * max(node_count, 1) + both[:, 1])
    src = keys // max(node_count, 1)
    dst = keys % max(node_count, 1)
    degrees = np.bincount(src, minlength=node_count).astype(np.int64)
    offsets = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    for a in (offsets, dst, degrees):
        a.setflags(write=False)
    if part is not None:
        part.setflags(write=False)
    return Graph(node_count, offsets, dst, degrees, part)


def write_edgelist(graph: Graph, path) -> None:
    """Write ``u<TAB>v`` lines; node count and partition go in ``#`` comments."""
    with open(path, "w") as fh:
        fh.write(f"# node_count {graph.node_count}\n")
        if graph.partition is not None:
            tags = "".join(_PARTITION_CHARS[t] for t in graph.partition)
            fh.write(f"# partition {tags}\n")
        for u, v in graph.edges():
            fh.write(f"{u}\t{v}\n")


def read_edgelist(path) -> Graph:
    node_count = None
    partition = None
    pairs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "node_count":
                    node_count = int(parts[1])
                elif len(parts) == 2 and parts[0] == "partition":
                    partition = [_PARTITION_CHARS.index(c) for c in parts[1]]
                continue
            u, v = line.split()[:2]
            pairs.append((int(u), int(v)))
    return build_graph(pairs, node_count=node_count, partition=partition)


# --------------------------------------------------------------------------
# ratings


class RatingRecord(NamedTuple):
    user: str
    item: str
    rating: float


def _check_rating(r: float) -> float:
    if not (0.5 <= r <= 5.0) or (r * 2) != int(r * 2):
        raise ValueError(f"rating {r} is not a half-star value in [0.5, 5.0]")
    return r


def read_ratings(path) -> list[RatingRecord]:
    """Read ``user,item,rating[,timestamp]`` rows. Header and tab separators are tolerated."""
    path = Path(path)
    out = []
    with open(path, newline="") as fh:
        first = fh.readline()
        delim = "\t" if "\t" in first else ","
        fh.seek(0)
        for i, row in enumerate(csv.reader(fh, delimiter=delim)):
            if not row or row[0].startswith("#"):
                continue
            try:
                rating = float(row[2])
            except (ValueError, IndexError):
                if i == 0:
                    continue  # header
                raise ValueError(f"{path}:{i + 1}: malformed rating row {row!r}")
            out.append(RatingRecord(row[0].strip(), row[1].strip(), _check_rating(rating)))
    return out


def binarize_ratings(
    records: Iterable[RatingRecord],
    pos_threshold: float = 4.0,
    neg_threshold: float = 3.0,
    strict: bool = False,
) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    """Split ratings into liked and disliked ``(user, item)`` pairs.

    With ``strict=False`` a rating ``>= pos_threshold`` is positive and
    ``<= neg_threshold`` negative; ``strict=True`` uses ``>`` and ``<``.
    Ratings between the thresholds are dropped.
    """
    if pos_threshold <= neg_threshold:
        raise ValueError("pos_threshold must exceed neg_threshold")
    pos, neg = [], []
    for rec in records:
        if strict:
            is_pos, is_neg = rec.rating > pos_threshold, rec.rating < neg_threshold
        else:
            is_pos, is_neg = rec.rating >= pos_threshold, rec.rating <= neg_threshold
        if is_pos:
            pos.append((rec.user, rec.item))
        elif is_neg:
            neg.append((rec.user, rec.item))
    return pos, neg


def filter_records(
    records: Sequence,
    min_item_records: int = 10,
    min_user_records: int = 10,
    max_user_records: int = 1000,
    single_pass: bool = False,
) -> list:
    """Drop records of rare items and of users with too few or too many records.

    Records are any tuples whose first two fields are user and item. By
    default removal repeats until nothing changes; ``single_pass`` applies the
    thresholds once using the input counts.
    """
    if min(min_item_records, min_user_records, max_user_records) <= 0:
        raise ValueError("filter thresholds must be positive")
    current = list(records)
    while True:
        users = Counter(r[0] for r in current)
        items = Counter(r[1] for r in current)
        kept = [
            r
            for r in current
            if items[r[1]] >= min_item_records
            and min_user_records <= users[r[0]] <= max_user_records
        ]
        if single_pass or len(kept) == len(current):
            return kept
        current = kept


@dataclass
class IdMap:
    """Dense ids for external user/item keys.

    External keys are stored with a ``u:`` or ``i:`` prefix so that a user and
    an item sharing a raw key stay distinct.
    """

    external: list[str] = field(default_factory=list)
    index: dict[str, int] = field(default_factory=dict)

    def add(self, key: str) -> int:
        if key not in self.index:
            self.index[key] = len(self.external)
            self.external.append(key)
        return self.index[key]

    def __len__(self):
        return len(self.external)

    def __getitem__(self, key: str) -> int:
        return self.index[key]

    def user(self, raw) -> int:
        return self.index[f"u:{raw}"]

    def item(self, raw) -> int:
        return self.index[f"i:{raw}"]

    def partition(self) -> np.ndarray:
        return np.array([USER if k.startswith("u:") else ITEM for k in self.external], dtype=np.int8)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            for i, key in enumerate(self.external):
                fh.write(f"{key}\t{i}\n")

    @classmethod
    def read(cls, path) -> "IdMap":
        pairs = []
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    key, idx = line.rstrip("\n").split("\t")
                    pairs.append((int(idx), key))
        pairs.sort()
        if [i for i, _ in pairs] != list(range(len(pairs))):
            raise ValueError(f"{path}: internal ids are not contiguous")
        out = cls()
        for _, key in pairs:
            out.add(key)
        return out

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "IdMap":
        """Users first (sorted), then items (sorted), for a reproducible layout."""
        pairs = list(pairs)
        out = cls()
        for u in sorted({u for u, _ in pairs}):
            out.add(f"u:{u}")
        for i in sorted({i for _, i in pairs}):
            out.add(f"i:{i}")
        return out


# --------------------------------------------------------------------------
# labeled edges


@dataclass
class LabeledEdgeSet:
    """Labeled ``(u, v)`` edges with a train/test flag.

    ``label`` is 1 for a positive (liked) edge and 0 for a negative one.
    """

    u: np.ndarray
    v: np.ndarray
    label: np.ndarray
    test: np.ndarray

    def __len__(self):
        return self.u.shape[0]

    def subset(self, mask) -> "LabeledEdgeSet":
        return LabeledEdgeSet(self.u[mask], self.v[mask], self.label[mask], self.test[mask])

    def train(self) -> "LabeledEdgeSet":
        return self.subset(~self.test)

    def testing(self) -> "LabeledEdgeSet":
        return self.subset(self.test)

    def pairs(self) -> np.ndarray:
        return np.stack([self.u, self.v], axis=1)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("u,v,label,split\n")
            for a, b, lab, t in zip(self.u, self.v, self.label, self.test):
                fh.write(f"{a},{b},{'positive' if lab else 'negative'},{'test' if t else 'train'}\n")

    @classmethod
    def read_csv(cls, path) -> "LabeledEdgeSet":
        u, v, lab, test = [], [], [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                u.append(int(row["u"]))
                v.append(int(row["v"]))
                lab.append(row["label"] == "positive")
                test.append(row["split"] == "test")
        return cls(
            np.array(u, dtype=np.int64),
            np.array(v, dtype=np.int64),
            np.array(lab, dtype=np.int8),
            np.array(test, dtype=bool),
        )


def split_edges(pairs, test_fraction: float = 0.2, seed: int = 0, labels=None) -> LabeledEdgeSet:
    """Randomly mark ``round(test_fraction * n)`` of the pairs as test.

    Args:
        pairs: ``(u, v)`` integer pairs; an unordered pair may appear once.
        test_fraction: Fraction in (0, 1).
        seed: Seed for the permutation.
        labels: Optional 0/1 label per pair; defaults to all positive.
    """
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    n = arr.shape[0]
    if n < 2:
        raise ValueError("need at least 2 pairs to split")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    canon = np.sort(arr, axis=1)
    if np.unique(canon, axis=0).shape[0] != n:
        raise ValueError("duplicate (u, v) pairs in edge set")
    lab = np.ones(n, dtype=np.int8) if labels is None else np.asarray(labels, dtype=np.int8)
    n_test = int(np.floor(test_fraction * n + 0.5))
    perm = np.random.default_rng(seed).permutation(n)
    test = np.zeros(n, dtype=bool)
    test[perm[:n_test]] = True
    return LabeledEdgeSet(arr[:, 0].copy(), arr[:, 1].copy(), lab, test)


# --------------------------------------------------------------------------
# item features


@dataclass
class ItemFeatureMatrix:
    """Dense item x tag relevance matrix with values in [0, 1]."""

    items: list[str]
    tags: list[str]
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape != (len(self.items), len(self.tags)):
            raise ValueError("feature matrix shape does not match item/tag lists")
        if np.any(m < 0) or np.any(m > 1) or not np.all(np.isfinite(m)):
            raise ValueError("relevance values must lie in [0, 1]")
        zero = ~np.any(m > 0, axis=1)
        if np.any(zero):
            raise ValueError(f"item {self.items[int(np.argmax(zero))]} has an all-zero feature vector")
        self._row = {it: i for i, it in enumerate(self.items)}

    def __contains__(self, item) -> bool:
        return item in self._row

    def vector(self, item) -> np.ndarray:
        return self.matrix[self._row[item]]

    def rows(self, items: Sequence) -> np.ndarray:
        try:
            idx = [self._row[i] for i in items]
        except KeyError as exc:
            raise KeyError(f"item {exc.args[0]!r} has no feature vector") from None
        return self.matrix[idx]

    def reindex(self, mapping: dict) -> "ItemFeatureMatrix":
        """Rename items through ``mapping`` (e.g. raw movie id -> node id), dropping unmapped ones."""
        keep = [i for i, it in enumerate(self.items) if it in mapping]
        return ItemFeatureMatrix([mapping[self.items[i]] for i in keep], self.tags, self.matrix[keep])


def read_item_features(path) -> ItemFeatureMatrix:
    """Assemble ``item,tag,relevance`` triples into dense vectors; missing triples are 0."""
    triples = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].startswith("#"):
                continue
            try:
                rel = float(row[2])
            except (ValueError, IndexError):
                if i == 0:
                    continue
                raise ValueError(f"{path}:{i + 1}: malformed feature row {row!r}")
            triples.append((row[0].strip(), row[1].strip(), rel))
    items = sorted({t[0] for t in triples}, key=_natural)
    tags = sorted({t[1] for t in triples}, key=_natural)
    ir = {it: k for k, it in enumerate(items)}
    tr = {t: k for k, t in enumerate(tags)}
    mat = np.zeros((len(items), len(tags)))
    for it, tag, rel in triples:
        mat[ir[it], tr[tag]] = rel
    return ItemFeatureMatrix(items, tags, mat)


def _natural(s: str):
    return (0, int(s), "") if s.isdigit() else (1, 0, s)
