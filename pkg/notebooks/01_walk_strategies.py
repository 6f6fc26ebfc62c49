"""
Walk strategies and their transition probabilities
==================================================

Three ways to pick the next node of a random walk: uniform (DeepWalk),
second order with return/in-out parameters (node2vec), and biased toward
low-degree neighbours (div2vec).
"""

import numpy as np

from div2vec import WalkStrategy, build_graph, generate_corpus, transition_distribution

# node 0 has two neighbours: node 1 of degree 10 and node 2 of degree 90
edges = [(0, 1), (0, 2)]
edges += [(1, 3 + k) for k in range(9)]
edges += [(2, 12 + k) for k in range(89)]
g = build_graph(edges)
print("degrees of 1 and 2:", g.degrees[1], g.degrees[2])

for s in (WalkStrategy.uniform(),
          WalkStrategy.degree_biased("inverse_sqrt"),
          WalkStrategy.degree_biased("inverse")):
    print(f"{s.describe():32s}", np.round(transition_distribution(g, s, 0), 4))

# second order: the previous node, a common neighbour and an outward node
tri = build_graph([(0, 1), (0, 2), (1, 2), (0, 3)])
print("p=2, q=0.5 from 0 after 1:", transition_distribution(tri, WalkStrategy.second_order(2.0, 0.5), 0, previous=1))

# a few walks
corpus = generate_corpus(g, WalkStrategy.degree_biased("inverse"), walk_length=8, walks_per_node=1, seed=0)
for w in corpus.walks[:3]:
    print(w.tolist())
