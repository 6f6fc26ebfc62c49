"""Top-k recommendation lists and list diversity metrics.

Metrics:

* coverage ``CO(k)``: number of distinct items in any user's list;
* entropy diversity ``ED(k)``: Shannon entropy of how often each item is
  recommended, normalised by ``k * |U|``;
* intra-list similarity ``ILS``: mean pairwise ``1 - cosine`` between item
  feature vectors in one list. Larger means the items are *less* alike.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from .edgeops import apply_operator
from .embed import EmbeddingMatrix
from .graph import ItemFeatureMatrix
from .predictor import MlpModel, mlp_forward


@dataclass
class RecommendationTable:
    """Ranked item lists per user (best first) with their scores."""

    lists: dict = field(default_factory=dict)
    scores: dict = field(default_factory=dict)
    k: int = 0
    # users that had no candidate items at all
    flagged: list = field(default_factory=list)

    def __len__(self):
        return len(self.lists)

    def truncate(self, k: int) -> "RecommendationTable":
        return RecommendationTable(
            {u: l[:k] for u, l in self.lists.items()},
            {u: s[:k] for u, s in self.scores.items()},
            k,
            list(self.flagged),
        )

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("user,rank,item,score\n")
            for u in sorted(self.lists):
                for r, (it, s) in enumerate(zip(self.lists[u], self.scores[u]), 1):
                    fh.write(f"{u},{r},{it},{float(s)!r}\n")


def top_k(items: np.ndarray, scores: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Highest scores first; equal scores ordered by ascending item id."""
    order = np.lexsort((items, -scores))[:k]
    return items[order], scores[order]


def score_user(model: MlpModel, operator: str, user: int, items: np.ndarray,
               pos: EmbeddingMatrix, neg: EmbeddingMatrix) -> np.ndarray:
    pu, _ = pos.lookup(user)
    nu, _ = neg.lookup(user)
    pi, _ = pos.lookup_many(items)
    ni, _ = neg.lookup_many(items)
    feats = np.concatenate([apply_operator(operator, pu, pi), apply_operator(operator, nu, ni)], axis=1)
    return mlp_forward(model, feats)


def recommend_topk(model: MlpModel, operator: str, pos: EmbeddingMatrix, neg: EmbeddingMatrix,
                   users: Iterable[int], items: np.ndarray, k: int,
                   exclude: Optional[Mapping[int, Iterable[int]]] = None) -> RecommendationTable:
    """Score every candidate item for each user and keep the best ``k``.

    Candidates are ``items`` minus ``exclude[user]`` (the user's training
    positives).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    items = np.asarray(items, dtype=np.int64)
    exclude = exclude or {}
    table = RecommendationTable(k=k)
    for u in users:
        cand = items
        seen = exclude.get(u)
        if seen is not None and len(seen):
            cand = items[~np.isin(items, np.fromiter(seen, dtype=np.int64))]
        if cand.shape[0] == 0:
            table.flagged.append(u)
            table.lists[u] = np.zeros(0, dtype=np.int64)
            table.scores[u] = np.zeros(0)
            continue
        s = score_user(model, operator, u, cand, pos, neg)
        table.lists[u], table.scores[u] = top_k(cand, s, k)
    return table


def coverage(table: RecommendationTable) -> int:
    seen = set()
    for lst in table.lists.values():
        seen.update(int(i) for i in lst)
    return len(seen)


def recommendation_counts(table: RecommendationTable) -> dict:
    counts: dict = {}
    for lst in table.lists.values():
        for i in lst:
            counts[int(i)] = counts.get(int(i), 0) + 1
    return counts


def entropy_diversity(table: RecommendationTable, user_count: Optional[int] = None,
                      k: Optional[int] = None) -> float:
    """``-sum_i p_i ln p_i`` with ``p_i = rec(i) / (k |U|)``; unrecommended items contribute 0.

    Raises:
        ValueError: when lists do not all have length ``k``.
    """
    lengths = {len(l) for l in table.lists.values()}
    if k is None:
        k = table.k
    if lengths and lengths != {k}:
        raise ValueError(f"entropy diversity needs every list to hold exactly k={k} items, got lengths {sorted(lengths)}")
    if user_count is None:
        user_count = len(table)
    total = k * user_count
    ed = 0.0
    for c in recommendation_counts(table).values():
        p = c / total
        ed -= p * math.log(p)
    return ed


def similarity_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``1 - cos(a, b)``."""
    return 1.0 - float(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))


def intra_list_similarity(items, features: ItemFeatureMatrix) -> float:
    """Mean of ``1 - cos`` over the unordered item pairs of a list.

    Raises:
        KeyError: if an item has no feature vector.
        ValueError: if the list has fewer than two items.
    """
    items = list(items)
    if len(items) < 2:
        raise ValueError("intra-list similarity needs at least two items")
    V = features.rows(items)
    U = V / np.linalg.norm(V, axis=1, keepdims=True)
    cos = U @ U.T
    iu = np.triu_indices(len(items), 1)
    return float(np.mean(1.0 - cos[iu]))


@dataclass
class AverageIls:
    value: float
    users: int
    # users skipped because their list had fewer than two items
    excluded: int


def average_ils(table: RecommendationTable, features: ItemFeatureMatrix) -> AverageIls:
    vals = []
    excluded = 0
    for u in sorted(table.lists):
        lst = table.lists[u]
        if len(lst) < 2:
            excluded += 1
            continue
        vals.append(intra_list_similarity(lst, features))
    if not vals:
        raise ValueError("no user has a list of two or more items")
    return AverageIls(float(np.mean(vals)), len(vals), excluded)


# --------------------------------------------------------------------------
# reports


@dataclass
class MetricReport:
    method: str
    operator: str
    auc: float
    # k -> value; ILS is absent for k < 2
    coverage: dict = field(default_factory=dict)
    entropy_diversity: dict = field(default_factory=dict)
    ils: dict = field(default_factory=dict)


def report_columns(ks) -> list[str]:
    cols = ["method", "operator", "auc"]
    for k in ks:
        cols += [f"co_{k}", f"ed_{k}"]
        if k >= 2:
            cols.append(f"ils_{k}")
    return cols


def write_reports_csv(reports: list[MetricReport], ks, path) -> None:
    cols = report_columns(ks)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in reports:
            row = [r.method, r.operator, repr(r.auc)]
            for k in ks:
                row += [str(r.coverage[k]), repr(r.entropy_diversity[k])]
                if k >= 2:
                    row.append(repr(r.ils[k]))
            fh.write(",".join(row) + "\n")


def read_reports_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
