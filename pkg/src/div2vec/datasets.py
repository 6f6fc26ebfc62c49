"""Synthetic inputs: preferential-attachment graphs and a MovieLens-like
ratings set with a tag-relevance matrix.

The ratings generator mimics the published MovieLens-100k statistics (943
users, 1,682 movies, 100,000 ratings, at least 20 ratings per user, long-tail
movie popularity) on the half-star scale of the newer MovieLens releases.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .graph import Graph, build_graph

# MovieLens-25M marginal of half-star ratings, 0.5 .. 5.0
HALF_STAR_SHARES = np.array([0.016, 0.031, 0.016, 0.066, 0.050, 0.196, 0.126, 0.266, 0.085, 0.148])


def preferential_attachment_graph(n: int, m: int, seed: int = 0) -> Graph:
    """Barabasi-Albert graph: each new node links to ``m`` existing nodes
    chosen proportionally to their degree."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    rng = np.random.default_rng(seed)
    edges = []
    targets = list(range(m))
    repeated: list[int] = []
    for source in range(m, n):
        edges.extend((source, t) for t in targets)
        repeated.extend(targets)
        repeated.extend([source] * m)
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(repeated[rng.integers(len(repeated))])
        targets = sorted(chosen)
    return build_graph(edges, node_count=n)


def rewire_degree_preserving(graph: Graph, swaps: int, seed: int = 0) -> Graph:
    """Randomise wiring by double-edge swaps; every node keeps its degree."""
    rng = np.random.default_rng(seed)
    edges = [tuple(e) for e in graph.edges().tolist()]
    present = set(edges)
    done = 0
    tries = 0
    while done < swaps and tries < 100 * swaps:
        tries += 1
        i, j = rng.integers(len(edges), size=2)
        (a, b), (c, d) = edges[i], edges[j]
        if rng.random() < 0.5:
            c, d = d, c
        if len({a, b, c, d}) < 4:
            continue
        e1, e2 = (min(a, d), max(a, d)), (min(c, b), max(c, b))
        if e1 in present or e2 in present:
            continue
        present -= {edges[i], edges[j]}
        present |= {e1, e2}
        edges[i], edges[j] = e1, e2
        done += 1
    return build_graph(edges, node_count=graph.node_count)


def synthetic_movielens(
    seed: int = 0,
    n_users: int = 943,
    n_items: int = 1682,
    n_ratings: int = 100_000,
    latent_dim: int = 16,
    n_genres: int = 20,
    n_tags: int = 64,
):
    """Generate ``(ratings, genome)``.

    ``ratings`` is a list of ``(user, item, rating, timestamp)`` tuples and
    ``genome`` an ``(n_items, n_tags)`` relevance array in (0, 1).

    Users pick movies with probability proportional to popularity times
    ``exp(affinity)``; ratings add user and movie biases to the same affinity
    and are mapped onto the half-star marginal by rank.
    """
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(latent_dim)

    centroids = rng.normal(size=(n_genres, latent_dim))
    genre = rng.integers(n_genres, size=n_items)
    item_vec = centroids[genre] + 0.6 * rng.normal(size=(n_items, latent_dim))
    user_vec = rng.normal(size=(n_users, latent_dim))

    pop = 1.0 / np.arange(1, n_items + 1) ** 0.9
    rng.shuffle(pop)
    log_pop = np.log(pop)

    counts = np.exp(rng.normal(np.log(65), 0.9, n_users))
    counts = np.clip(counts * n_ratings / counts.sum(), 20, 737)
    counts = np.round(counts * n_ratings / counts.sum()).astype(int)
    counts = np.clip(counts, 20, min(737, n_items))

    user_bias = rng.normal(0.0, 0.45, n_users)
    zpop = (log_pop - log_pop.mean()) / log_pop.std()
    item_bias = 0.25 * zpop + rng.normal(0.0, 0.45, n_items)

    users, items, raw = [], [], []
    for u in range(n_users):
        affinity = (item_vec @ user_vec[u]) * scale
        keys = log_pop + 0.8 * affinity + rng.gumbel(size=n_items)
        picked = np.argpartition(-keys, min(counts[u], n_items - 1))[: counts[u]]
        score = user_bias[u] + item_bias[picked] + affinity[picked] + rng.normal(0.0, 0.5, picked.shape[0])
        users.append(np.full(picked.shape[0], u))
        items.append(picked)
        raw.append(score)
    users = np.concatenate(users)
    items = np.concatenate(items)
    raw = np.concatenate(raw)

    # rank-map raw scores onto the half-star marginal
    cuts = np.cumsum(HALF_STAR_SHARES / HALF_STAR_SHARES.sum())[:-1]
    ranks = np.argsort(np.argsort(raw)) / raw.shape[0]
    stars = (np.searchsorted(cuts, ranks, side="right") + 1) * 0.5
    stamps = 1_500_000_000 + rng.integers(0, 5 * 365 * 86400, size=raw.shape[0])

    tag_dir = rng.normal(size=(n_tags, latent_dim))
    z = 1.5 * (item_vec @ tag_dir.T) * scale - 1.5 + rng.normal(0.0, 0.3, (n_items, n_tags))
    genome = np.clip(1.0 / (1.0 + np.exp(-z)), 1e-4, 1.0)

    ratings = [
        (int(u) + 1, int(i) + 1, float(s), int(t)) for u, i, s, t in zip(users, items, stars, stamps)
    ]
    return ratings, genome


def write_synthetic_movielens(directory, seed: int = 0, **kwargs) -> tuple[Path, Path]:
    """Write ``ratings.csv`` and ``genome-scores.csv`` in MovieLens layout."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ratings, genome = synthetic_movielens(seed, **kwargs)
    rpath = directory / "ratings.csv"
    gpath = directory / "genome-scores.csv"
    with open(rpath, "w") as fh:
        fh.write("userId,movieId,rating,timestamp\n")
        for u, i, r, t in ratings:
            fh.write(f"{u},{i},{r:.1f},{t}\n")
    with open(gpath, "w") as fh:
        fh.write("movieId,tagId,relevance\n")
        for i in range(genome.shape[0]):
            for t in range(genome.shape[1]):
                fh.write(f"{i + 1},{t + 1},{genome[i, t]:.5f}\n")
    return rpath, gpath
