"""
Link prediction on a liked/disliked graph pair
==============================================

Ratings become two graphs: edges for liked items (>= 4 stars) and for
disliked items (<= 3 stars). Each user-item pair gets a feature built from
both graphs' embeddings, and a one-hidden-layer network predicts whether the
user liked the item.
"""

from div2vec import (
    IdMap, RatingRecord, SkipGramConfig, TrainConfig, WalkStrategy, auc, binarize_ratings, build_graph,
    edge_features, filter_records, generate_corpus, mlp_forward, split_edges, train_classifier, train_embeddings,
)
from div2vec.datasets import synthetic_movielens

ratings, _ = synthetic_movielens(seed=0, n_users=300, n_items=500, n_ratings=30_000)
pos, neg = binarize_ratings([RatingRecord(str(u), str(i), r) for u, i, r, _ in ratings])
labeled = filter_records([(u, i, 1) for u, i in pos] + [(u, i, 0) for u, i in neg])
ids = IdMap.from_pairs((u, i) for u, i, _ in labeled)
edges = split_edges([(ids.user(u), ids.item(i)) for u, i, _ in labeled], 0.2, seed=0,
                    labels=[l for *_, l in labeled])
train, test = edges.train(), edges.testing()
print(len(ids), "nodes,", len(train.u), "train edges,", len(test.u), "test edges")

graphs = [build_graph(train.pairs()[train.label == lab], len(ids), ids.partition()) for lab in (1, 0)]

for strategy in (WalkStrategy.uniform(), WalkStrategy.degree_biased("inverse")):
    mats = [train_embeddings(generate_corpus(g, strategy, 40, 10, seed=0), SkipGramConfig(epochs=1), len(ids))
            for g in graphs]
    for op in ("hadamard", "weighted_l2"):
        model = train_classifier(edge_features(op, train.u, train.v, *mats), train.label, TrainConfig())
        scores = mlp_forward(model, edge_features(op, test.u, test.v, *mats))
        print(f"{strategy.describe():28s} {op:12s} AUC = {auc(scores, test.label):.4f}")
