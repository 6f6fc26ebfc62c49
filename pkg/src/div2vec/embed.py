"""Skip-gram with negative sampling (SGNS) over walk corpora."""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
import numba
from numba import njit, prange

from ._rng import stream_seed
from .alias import AliasTable, alias_draw
from .walker import WalkCorpus

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SkipGramConfig:
    dimension: int = 64
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_learning_rate: float = 0.025
    min_learning_rate: float = 1e-4
    seed: int = 0
    unigram_power: float = 0.75
    shuffle: bool = True
    # >1 switches to lock-free parallel updates (not bit-reproducible)
    threads: int = 1

    def __post_init__(self):
        if self.dimension < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("dimension, window, negatives and epochs must be >= 1")
        if not (0 < self.min_learning_rate <= self.initial_learning_rate):
            raise ValueError("need 0 < min_learning_rate <= initial_learning_rate")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class EmbeddingMatrix:
    """Node vectors indexed by node id; ``present`` marks nodes seen in training."""

    vectors: np.ndarray
    present: np.ndarray
    context_vectors: Optional[np.ndarray] = None
    epoch_losses: tuple = ()

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    @property
    def node_count(self) -> int:
        return self.vectors.shape[0]

    def lookup(self, node: int) -> tuple[np.ndarray, bool]:
        """Vector of ``node`` and whether it was found; absent nodes get zeros."""
        if 0 <= node < self.node_count and self.present[node]:
            return self.vectors[node], True
        return np.zeros(self.dimension), False

    def lookup_many(self, nodes) -> tuple[np.ndarray, np.ndarray]:
        nodes = np.asarray(nodes, dtype=np.int64)
        inside = (nodes >= 0) & (nodes < self.node_count)
        found = np.zeros(nodes.shape, dtype=bool)
        found[inside] = self.present[nodes[inside]]
        out = np.zeros(nodes.shape + (self.dimension,))
        out[found] = self.vectors[nodes[found]]
        return out, found


def lookup(matrix: EmbeddingMatrix, node: int) -> tuple[np.ndarray, bool]:
    return matrix.lookup(node)


# --------------------------------------------------------------------------
# pairs and the single SGNS update


def training_pairs(corpus, window: int) -> Iterator[tuple[int, int]]:
    """Yield ``(center, context)`` for every pair within ``window`` positions."""
    if window < 1:
        raise ValueError("window must be >= 1")
    walks = corpus.walks if isinstance(corpus, WalkCorpus) else corpus
    for walk in walks:
        n = len(walk)
        for i in range(n):
            for j in range(max(0, i - window), min(n, i + window + 1)):
                if j != i:
                    yield walk[i], walk[j]


def pairs_per_walk(length: int, window: int) -> int:
    return sum(min(i, window) + min(length - 1 - i, window) for i in range(length))


def learning_rate_at(t: int, total_pairs: int, initial: float, minimum: float) -> float:
    return max(minimum, initial * (1.0 - t / total_pairs))


def _softplus(x):
    return np.logaddexp(0.0, x)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def sgns_gradients(center_vec, context_vec, negative_vecs):
    """Loss and gradients of ``-ln s(c.o) - sum ln s(-c.n)``.

    Returns:
        ``(loss, d_center, d_context, d_negatives)`` with ``d_negatives``
        shaped like ``negative_vecs`` (one row per negative draw).
    """
    negative_vecs = np.atleast_2d(negative_vecs)
    pos = center_vec @ context_vec
    neg = negative_vecs @ center_vec
    loss = _softplus(-pos) + _softplus(neg).sum()
    g_pos = _sigmoid(pos) - 1.0
    g_neg = _sigmoid(neg)
    d_center = g_pos * context_vec + g_neg @ negative_vecs
    return float(loss), d_center, g_pos * center_vec, np.outer(g_neg, center_vec)


def sgns_step(center, context, negatives, learning_rate, w_in, w_out) -> float:
    """One gradient-descent step on a (center, context, negatives) example, in place.

    All gradients use pre-update parameters; a node drawn several times as a
    negative accumulates each contribution. Returns the pre-update loss.
    """
    if learning_rate < 0:
        raise ValueError("learning_rate must be nonnegative")
    negatives = np.asarray(negatives, dtype=np.int64)
    loss, d_c, d_o, d_n = sgns_gradients(w_in[center], w_out[context], w_out[negatives])
    if not (math.isfinite(loss) and np.all(np.isfinite(d_c))):
        raise FloatingPointError(f"non-finite SGNS step at center {center}, context {context}")
    w_out[context] -= learning_rate * d_o
    np.add.at(w_out, negatives, -learning_rate * d_n)
    w_in[center] -= learning_rate * d_c
    return loss


# --------------------------------------------------------------------------
# compiled training loops


@njit(cache=True)
def _sig_softplus(x):
    """``(s(x), softplus(-x), softplus(x))`` from a single exponential."""
    e = math.exp(-abs(x))
    l1p = math.log1p(e)
    if x >= 0:
        return 1.0 / (1.0 + e), l1p, x + l1p
    return e / (1.0 + e), l1p - x, l1p


@njit(cache=True, fastmath=True)
def _train_walks(nodes, walk_offsets, walk_ids, w_in, w_out, neg_prob, neg_alias, neg_nodes,
                 window, negatives, lr0, lr_min, total_pairs, t0, state, targets, grads, grad_c):
    dim = w_in.shape[1]
    n_neg = neg_nodes.shape[0]
    t = t0
    loss = 0.0
    for k in range(walk_ids.shape[0]):
        wid = walk_ids[k]
        lo = walk_offsets[wid]
        n = walk_offsets[wid + 1] - lo
        for i in range(n):
            c = nodes[lo + i]
            j0 = max(0, i - window)
            j1 = min(n, i + window + 1)
            for j in range(j0, j1):
                if j == i:
                    continue
                lr = lr0 * (1.0 - t / total_pairs)
                if lr < lr_min:
                    lr = lr_min
                t += 1
                targets[0] = nodes[lo + j]
                for r in range(negatives):
                    state, s = alias_draw(neg_prob, neg_alias, 0, n_neg, state)
                    targets[r + 1] = neg_nodes[s]
                for d in range(dim):
                    grad_c[d] = 0.0
                for r in range(negatives + 1):
                    o = targets[r]
                    dot = 0.0
                    for d in range(dim):
                        dot += w_in[c, d] * w_out[o, d]
                    sig, sp_neg, sp_pos = _sig_softplus(dot)
                    if r == 0:
                        loss += sp_neg
                        g = sig - 1.0
                    else:
                        loss += sp_pos
                        g = sig
                    grads[r] = g
                    for d in range(dim):
                        grad_c[d] += g * w_out[o, d]
                for r in range(negatives + 1):
                    o = targets[r]
                    g = lr * grads[r]
                    for d in range(dim):
                        w_out[o, d] -= g * w_in[c, d]
                for d in range(dim):
                    w_in[c, d] -= lr * grad_c[d]
    return loss, t, state


@njit(cache=True)
def _sequential_epoch(nodes, walk_offsets, order, w_in, w_out, neg_prob, neg_alias, neg_nodes,
                      window, negatives, lr0, lr_min, total_pairs, t0, seed, epoch):
    state = stream_seed(seed, epoch, 0)
    targets = np.empty(negatives + 1, dtype=np.int64)
    grads = np.empty(negatives + 1)
    grad_c = np.empty(w_in.shape[1])
    loss, t, state = _train_walks(nodes, walk_offsets, order, w_in, w_out, neg_prob, neg_alias,
                                  neg_nodes, window, negatives, lr0, lr_min, total_pairs, t0,
                                  state, targets, grads, grad_c)
    return loss, t


@njit(cache=True, parallel=True)
def _parallel_epoch(nodes, walk_offsets, order, shard_bounds, shard_t0, w_in, w_out, neg_prob,
                    neg_alias, neg_nodes, window, negatives, lr0, lr_min, total_pairs, seed, epoch):
    n_shards = shard_bounds.shape[0] - 1
    losses = np.zeros(n_shards)
    for s in prange(n_shards):
        state = stream_seed(seed, epoch, s + 1)
        targets = np.empty(negatives + 1, dtype=np.int64)
        grads = np.empty(negatives + 1)
        grad_c = np.empty(w_in.shape[1])
        loss, _, _ = _train_walks(nodes, walk_offsets, order[shard_bounds[s]:shard_bounds[s + 1]],
                                  w_in, w_out, neg_prob, neg_alias, neg_nodes, window, negatives,
                                  lr0, lr_min, total_pairs, shard_t0[s], state, targets, grads,
                                  grad_c)
        losses[s] = loss
    return losses.sum()


class NegativeSampler:
    """Draws nodes from the unigram distribution raised to ``power``."""

    def __init__(self, counts: np.ndarray, power: float = 0.75):
        counts = np.asarray(counts)
        self.nodes = np.flatnonzero(counts > 0).astype(np.int64)
        self.weights = counts[self.nodes].astype(np.float64) ** power
        self.table = AliasTable(self.weights)

    def probabilities(self) -> np.ndarray:
        return self.weights / self.weights.sum()

    def draw(self, count: int, seed: int = 0) -> np.ndarray:
        return self.nodes[self.table.draw(count, seed)]


def train_embeddings(corpus: WalkCorpus, config: SkipGramConfig = SkipGramConfig(),
                     node_count: Optional[int] = None) -> EmbeddingMatrix:
    """Fit SGNS vectors for every node occurring in ``corpus``.

    The learning rate decays linearly per training pair, from
    ``initial_learning_rate`` to a floor of ``min_learning_rate``. With
    ``threads == 1`` results are bit-for-bit reproducible for a given seed.
    """
    if len(corpus) == 0 or corpus.nodes.shape[0] == 0:
        raise ValueError("cannot train on an empty corpus")
    counts = np.bincount(corpus.nodes, minlength=node_count or 0)
    n = counts.shape[0] if node_count is None else node_count
    if counts.shape[0] > n:
        raise ValueError("corpus mentions nodes beyond node_count")
    present = counts > 0
    rng = np.random.default_rng(config.seed)
    dim = config.dimension
    w_in = (rng.random((n, dim)) - 0.5) / dim
    w_out = np.zeros((n, dim))
    sampler = NegativeSampler(counts, config.unigram_power)

    lengths = np.diff(corpus.offsets)
    per_walk = np.array([pairs_per_walk(int(L), config.window) for L in lengths], dtype=np.int64)
    pairs_per_epoch = int(per_walk.sum())
    total = pairs_per_epoch * config.epochs
    if total == 0:
        raise ValueError("corpus yields no training pairs")

    losses = []
    t = 0
    for epoch in range(config.epochs):
        order = (rng.permutation(len(corpus)) if config.shuffle
                 else np.arange(len(corpus))).astype(np.int64)
        if config.threads == 1:
            loss, t = _sequential_epoch(
                corpus.nodes, corpus.offsets, order, w_in, w_out, sampler.table.prob,
                sampler.table.alias, sampler.nodes, config.window, config.negatives,
                config.initial_learning_rate, config.min_learning_rate, total, t, config.seed, epoch,
            )
        else:
            bounds = np.linspace(0, len(order), config.threads + 1).astype(np.int64)
            cum = np.concatenate([[0], np.cumsum(per_walk[order])])
            shard_t0 = t + cum[bounds[:-1]]
            prev = numba.get_num_threads()
            numba.set_num_threads(min(config.threads, numba.config.NUMBA_NUM_THREADS))
            try:
                loss = _parallel_epoch(
                    corpus.nodes, corpus.offsets, order, bounds, shard_t0, w_in, w_out,
                    sampler.table.prob, sampler.table.alias, sampler.nodes, config.window,
                    config.negatives, config.initial_learning_rate, config.min_learning_rate,
                    total, config.seed, epoch,
                )
            finally:
                numba.set_num_threads(prev)
            t += pairs_per_epoch
        if not (np.isfinite(loss) and np.all(np.isfinite(w_in)) and np.all(np.isfinite(w_out))):
            raise FloatingPointError(f"SGNS diverged in epoch {epoch}: non-finite parameters")
        losses.append(loss / pairs_per_epoch)
        if epoch and losses[-1] > losses[-2]:
            log.warning("mean SGNS loss rose in epoch %d: %.4f -> %.4f", epoch, losses[-2], losses[-1])

    w_in[~present] = 0.0
    w_out[~present] = 0.0
    return EmbeddingMatrix(w_in, present, w_out, tuple(losses))


# --------------------------------------------------------------------------
# files


def write_embeddings_text(matrix: EmbeddingMatrix, path) -> None:
    ids = np.flatnonzero(matrix.present)
    with open(path, "w") as fh:
        fh.write(f"{ids.shape[0]} {matrix.dimension}\n")
        for i in ids:
            fh.write(f"{i} " + " ".join(repr(float(x)) for x in matrix.vectors[i]) + "\n")


def read_embeddings_text(path, node_count: Optional[int] = None) -> EmbeddingMatrix:
    with open(path) as fh:
        count, dim = map(int, fh.readline().split())
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != count:
        raise ValueError(f"{path}: header says {count} vectors, found {len(rows)}")
    ids = np.array([int(r[0]) for r in rows], dtype=np.int64)
    vals = np.array([[float(x) for x in r[1:]] for r in rows]).reshape(count, dim)
    return _assemble(ids, vals, dim, node_count)


def write_embeddings_binary(matrix: EmbeddingMatrix, path) -> None:
    """``<count:int32><dim:int32>`` then ``<id:int32><dim x float32>`` rows, little-endian."""
    ids = np.flatnonzero(matrix.present)
    rec = np.dtype([("id", "<i4"), ("v", "<f4", (matrix.dimension,))])
    arr = np.empty(ids.shape[0], dtype=rec)
    arr["id"] = ids
    arr["v"] = matrix.vectors[ids]
    with open(path, "wb") as fh:
        fh.write(struct.pack("<ii", ids.shape[0], matrix.dimension))
        fh.write(arr.tobytes())


def read_embeddings_binary(path, node_count: Optional[int] = None) -> EmbeddingMatrix:
    with open(path, "rb") as fh:
        count, dim = struct.unpack("<ii", fh.read(8))
        rec = np.dtype([("id", "<i4"), ("v", "<f4", (dim,))])
        arr = np.frombuffer(fh.read(), dtype=rec, count=count)
    return _assemble(arr["id"].astype(np.int64), arr["v"].astype(np.float64), dim, node_count)


def _assemble(ids, vals, dim, node_count):
    n = node_count if node_count is not None else (int(ids.max()) + 1 if ids.size else 0)
    vectors = np.zeros((n, dim))
    present = np.zeros(n, dtype=bool)
    vectors[ids] = vals
    present[ids] = True
    return EmbeddingMatrix(vectors, present)
