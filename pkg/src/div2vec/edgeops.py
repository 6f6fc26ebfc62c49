"""Edge embeddings from node embeddings.

Each edge gets ``[op(pos(u), pos(v)) | op(neg(u), neg(v))]``: the operator
applied to vectors from the liked-edge graph, then to vectors from the
disliked-edge graph.
"""

import numpy as np

from .embed import EmbeddingMatrix

OPERATORS = {
    "average": lambda a, b: (a + b) / 2.0,
    "hadamard": lambda a, b: a * b,
    "weighted_l1": lambda a, b: np.abs(a - b),
    "weighted_l2": lambda a, b: (a - b) ** 2,
}


def apply_operator(op: str, a, b) -> np.ndarray:
    """Combine two node vectors (or row-aligned batches of them) elementwise."""
    try:
        fn = OPERATORS[op]
    except KeyError:
        raise ValueError(f"unknown edge operator {op!r}; choose from {sorted(OPERATORS)}") from None
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return fn(a, b)


def edge_feature(op: str, u: int, v: int, pos: EmbeddingMatrix, neg: EmbeddingMatrix) -> np.ndarray:
    return edge_features(op, [u], [v], pos, neg)[0]


def edge_features(op, us, vs, pos: EmbeddingMatrix, neg: EmbeddingMatrix) -> np.ndarray:
    """Feature rows for the edges ``zip(us, vs)``; nodes missing from a graph count as zero vectors."""
    if pos.dimension != neg.dimension:
        raise ValueError("positive and negative embeddings must share a dimension")
    pu, _ = pos.lookup_many(us)
    pv, _ = pos.lookup_many(vs)
    nu, _ = neg.lookup_many(us)
    nv, _ = neg.lookup_many(vs)
    return np.concatenate([apply_operator(op, pu, pv), apply_operator(op, nu, nv)], axis=-1)


def write_edge_features_csv(path, us, vs, labels, features) -> None:
    dim = features.shape[1]
    with open(path, "w") as fh:
        fh.write("u,v,label," + ",".join(f"f{i + 1}" for i in range(dim)) + "\n")
        for u, v, lab, row in zip(us, vs, labels, features):
            fh.write(f"{u},{v},{int(lab)}," + ",".join(repr(float(x)) for x in row) + "\n")
