"""
Skip-gram embeddings from walks
===============================

Nodes that co-occur in walks end up with similar vectors.
"""

import numpy as np

from div2vec import SkipGramConfig, WalkStrategy, build_graph, generate_corpus, train_embeddings, training_pairs

print(list(training_pairs([["a", "b", "c"]], window=1)))

# two triangles joined by one edge
g = build_graph([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
corpus = generate_corpus(g, WalkStrategy.uniform(), walk_length=20, walks_per_node=40, seed=0)
emb = train_embeddings(corpus, SkipGramConfig(dimension=16, epochs=3, initial_learning_rate=0.01, seed=0))
print("mean loss per epoch:", np.round(emb.epoch_losses, 3))

V = emb.vectors / np.linalg.norm(emb.vectors, axis=1, keepdims=True)
print(np.round(V @ V.T, 2))
