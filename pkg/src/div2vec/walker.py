"""Random-walk corpora: uniform (DeepWalk), second order (node2vec) and
degree biased (div2vec) transitions, plus node frequency analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numba import njit, prange
from scipy.stats import spearmanr

from ._rng import next_float, next_index, stream_seed
from .alias import AliasTable, alias_draw
from .graph import Graph

# Degree reweighting functions for degree-biased walks. New entries are
# picked up by name everywhere (configs, corpus headers).
DEGREE_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "inverse": lambda d: 1.0 / d,
    "inverse_sqrt": lambda d: 1.0 / np.sqrt(d),
    "constant": lambda d: np.ones_like(d),
}

_UNIFORM, _SECOND_ORDER, _DEGREE_BIASED = 0, 1, 2
_KINDS = {"uniform": _UNIFORM, "second_order": _SECOND_ORDER, "degree_biased": _DEGREE_BIASED}


class DeadEnd(ValueError):
    """Raised when a walk reaches a node with no neighbours."""


@dataclass(frozen=True)
class WalkStrategy:
    kind: str = "uniform"
    p: float = 1.0
    q: float = 1.0
    f: str = "constant"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown walk kind {self.kind!r}")
        if not (self.p > 0 and self.q > 0):
            raise ValueError("p and q must be positive")
        if self.kind == "degree_biased" and self.f not in DEGREE_FUNCTIONS:
            raise ValueError(f"unknown degree function {self.f!r}; choose from {sorted(DEGREE_FUNCTIONS)}")

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def second_order(cls, p: float, q: float):
        return cls("second_order", p=p, q=q)

    @classmethod
    def degree_biased(cls, f: str = "inverse"):
        return cls("degree_biased", f=f)

    def describe(self) -> str:
        if self.kind == "second_order":
            return f"second_order(p={self.p!r},q={self.q!r})"
        if self.kind == "degree_biased":
            return f"degree_biased(f={self.f})"
        return "uniform"

    @classmethod
    def parse(cls, text: str) -> "WalkStrategy":
        text = text.strip()
        if text == "uniform":
            return cls.uniform()
        name, _, rest = text.partition("(")
        args = dict(kv.split("=") for kv in rest.rstrip(")").split(",") if kv)
        if name == "second_order":
            return cls.second_order(float(args["p"]), float(args["q"]))
        if name == "degree_biased":
            return cls.degree_biased(args["f"])
        raise ValueError(f"cannot parse walk strategy {text!r}")


# node2vec weight cases, also reported by second_order_weights
PREVIOUS, COMMON_NEIGHBOR, OUTWARD = 0, 1, 2


def second_order_weights(graph: Graph, current: int, previous: int, p: float, q: float):
    """Unnormalised second-order weights over ``N(current)`` and the case of each neighbour."""
    nbrs = graph.neighbors_of(current)
    prev_nbrs = graph.neighbors_of(previous)
    cases = np.full(nbrs.shape[0], OUTWARD, dtype=np.int8)
    pos = np.searchsorted(prev_nbrs, nbrs)
    adjacent = (pos < prev_nbrs.shape[0]) & (prev_nbrs[np.minimum(pos, prev_nbrs.shape[0] - 1)] == nbrs)
    cases[adjacent] = COMMON_NEIGHBOR
    cases[nbrs == previous] = PREVIOUS
    weights = np.array([1.0 / p, 1.0, 1.0 / q])[cases]
    return weights, cases


def transition_distribution(
    graph: Graph, strategy: WalkStrategy, current: int, previous: Optional[int] = None
) -> np.ndarray:
    """Probability of stepping to each neighbour of ``current`` (in neighbour order).

    ``previous`` is used only by second-order walks; without it the first step
    is uniform.
    """
    deg = int(graph.degrees[current])
    if deg == 0:
        raise DeadEnd(f"node {current} has no neighbours")
    if strategy.kind == "uniform":
        return np.ones(deg) / deg
    if strategy.kind == "degree_biased":
        nbr_deg = graph.degrees[graph.neighbors_of(current)].astype(np.float64)
        w = DEGREE_FUNCTIONS[strategy.f](nbr_deg)
    elif previous is None:
        w = np.ones(deg)
    else:
        w, _ = second_order_weights(graph, current, previous, strategy.p, strategy.q)
    return w / w.sum()


# --------------------------------------------------------------------------
# corpus generation


@njit(cache=True)
def _is_neighbor(offsets, neighbors, u, x):
    lo = offsets[u]
    hi = offsets[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        if neighbors[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < offsets[u + 1] and neighbors[lo] == x


@njit(cache=True, parallel=True)
def _walk_kernel(offsets, neighbors, kind, prob, alias, inv_p, inv_q, envelope,
                 starts, walks_per_node, walk_length, seed, out, lengths, middle_hits):
    n_walks = starts.shape[0] * walks_per_node
    for w in prange(n_walks):
        start = starts[w // walks_per_node]
        state = stream_seed(seed, start, w % walks_per_node)
        out[w, 0] = start
        cur = start
        prev = -1
        length = 1
        hits = 0
        while length < walk_length:
            lo = offsets[cur]
            deg = offsets[cur + 1] - lo
            if deg == 0:
                break
            if kind == 2:
                state, j = alias_draw(prob, alias, lo, deg, state)
                nxt = neighbors[lo + j]
            elif kind == 1 and prev >= 0:
                while True:
                    state, j = next_index(state, deg)
                    x = neighbors[lo + j]
                    if x == prev:
                        wgt = inv_p
                    elif _is_neighbor(offsets, neighbors, prev, x):
                        wgt = 1.0
                        hits += 1
                    else:
                        wgt = inv_q
                    state, u = next_float(state)
                    if u * envelope < wgt:
                        nxt = x
                        break
            else:
                state, j = next_index(state, deg)
                nxt = neighbors[lo + j]
            out[w, length] = nxt
            length += 1
            prev = cur
            cur = nxt
        lengths[w] = length
        middle_hits[w] = hits


@dataclass
class WalkCorpus:
    """Walks stored back to back: walk ``i`` is ``nodes[offsets[i]:offsets[i+1]]``.

    Walks are ordered by start node, then by walk index.
    """

    nodes: np.ndarray
    offsets: np.ndarray
    walk_length: int
    walks_per_node: int
    strategy: WalkStrategy
    seed: int
    # second-order "x adjacent to previous" cases evaluated while sampling
    middle_case_hits: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.offsets.shape[0] - 1

    def walk(self, i: int) -> np.ndarray:
        return self.nodes[self.offsets[i] : self.offsets[i + 1]]

    @property
    def walks(self) -> list[np.ndarray]:
        return [self.walk(i) for i in range(len(self))]

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(
                f"# strategy={self.strategy.describe()} seed={self.seed} "
                f"walk_length={self.walk_length} walks_per_node={self.walks_per_node}\n"
            )
            for i in range(len(self)):
                fh.write(" ".join(map(str, self.walk(i).tolist())))
                fh.write("\n")

    @classmethod
    def read(cls, path) -> "WalkCorpus":
        header = {}
        walks = []
        with open(path) as fh:
            for line in fh:
                if line.startswith("#"):
                    header.update(kv.split("=", 1) for kv in line[1:].split())
                elif line.strip():
                    walks.append(np.array(line.split(), dtype=np.int64))
        return corpus_from_walks(
            walks,
            walk_length=int(header.get("walk_length", max((len(w) for w in walks), default=0))),
            walks_per_node=int(header.get("walks_per_node", 1)),
            strategy=WalkStrategy.parse(header.get("strategy", "uniform")),
            seed=int(header.get("seed", 0)),
        )


def corpus_from_walks(walks, walk_length=None, walks_per_node=1, strategy=None, seed=0) -> WalkCorpus:
    walks = [np.asarray(w, dtype=np.int64) for w in walks]
    offsets = np.zeros(len(walks) + 1, dtype=np.int64)
    np.cumsum([len(w) for w in walks], out=offsets[1:])
    nodes = np.concatenate(walks) if walks else np.zeros(0, dtype=np.int64)
    if walk_length is None:
        walk_length = max((len(w) for w in walks), default=0)
    return WalkCorpus(nodes, offsets, walk_length, walks_per_node, strategy or WalkStrategy.uniform(), seed)


def generate_corpus(
    graph: Graph,
    strategy: WalkStrategy,
    walk_length: int = 80,
    walks_per_node: int = 10,
    seed: int = 0,
) -> WalkCorpus:
    """Sample ``walks_per_node`` walks from every non-isolated node.

    Each walk uses its own random stream keyed by (seed, start node, walk
    index), so the corpus is identical however many threads numba uses.
    """
    if walk_length < 2:
        raise ValueError("walk_length must be at least 2")
    if walks_per_node < 1:
        raise ValueError("walks_per_node must be at least 1")
    if graph.edge_count == 0:
        raise ValueError("cannot walk a graph with no edges")
    if seed < 0:
        raise ValueError("seed must be nonnegative")

    kind = _KINDS[strategy.kind]
    if kind == _DEGREE_BIASED:
        nbr_deg = graph.degrees[graph.neighbors].astype(np.float64)
        table = AliasTable(DEGREE_FUNCTIONS[strategy.f](nbr_deg), graph.offsets)
        prob, alias = table.prob, table.alias
    else:
        prob, alias = np.zeros(1), np.zeros(1, dtype=np.int64)
    inv_p, inv_q = 1.0 / strategy.p, 1.0 / strategy.q

    starts = np.flatnonzero(graph.degrees > 0).astype(np.int64)
    n_walks = starts.shape[0] * walks_per_node
    out = np.empty((n_walks, walk_length), dtype=np.int64)
    lengths = np.empty(n_walks, dtype=np.int64)
    hits = np.zeros(n_walks, dtype=np.int64)
    _walk_kernel(
        graph.offsets, graph.neighbors, kind, prob, alias, inv_p, inv_q,
        max(inv_p, 1.0, inv_q), starts, walks_per_node, walk_length, seed, out, lengths, hits,
    )
    # walks truncated below 2 nodes carry no pairs
    keep = lengths >= 2
    lengths = lengths[keep]
    mask = np.arange(walk_length)[None, :] < lengths[:, None]
    nodes = out[keep][mask]
    offsets = np.zeros(lengths.shape[0] + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    return WalkCorpus(nodes, offsets, walk_length, walks_per_node, strategy, seed, int(hits.sum()))


# --------------------------------------------------------------------------
# frequency analysis


@dataclass
class FrequencyProfile:
    """Per-node degree and corpus occurrence count, sorted by degree."""

    nodes: np.ndarray
    degrees: np.ndarray
    occurrences: np.ndarray
    spearman: float

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("node,degree,occurrences\n")
            for n, d, o in zip(self.nodes, self.degrees, self.occurrences):
                fh.write(f"{n},{d},{o}\n")
            fh.write(f"# spearman,{self.spearman!r}\n")


def frequency_profile(corpus: WalkCorpus, graph: Graph) -> FrequencyProfile:
    """Count how often every non-isolated node appears in the corpus.

    Rows are sorted by degree ascending (ties by node id). ``spearman`` is the
    rank correlation between degree and occurrences.
    """
    counts = np.bincount(corpus.nodes, minlength=graph.node_count)
    if counts.shape[0] > graph.node_count:
        raise ValueError("corpus mentions nodes outside the graph")
    nodes = np.flatnonzero(graph.degrees > 0)
    order = np.lexsort((nodes, graph.degrees[nodes]))
    nodes = nodes[order]
    deg = graph.degrees[nodes]
    occ = counts[nodes]
    if np.all(deg == deg[0]) or np.all(occ == occ[0]):
        rho = math.nan
    else:
        rho = float(spearmanr(deg, occ)[0])
    return FrequencyProfile(nodes, deg, occ, rho)
