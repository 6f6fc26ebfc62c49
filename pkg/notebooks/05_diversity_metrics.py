"""
Coverage, entropy diversity and intra-list similarity
=====================================================

Two toy recommenders for three users: one gives everybody the same three
items, the other gives each user different ones.
"""

import math

import numpy as np

from div2vec import ItemFeatureMatrix, RecommendationTable, average_ils, coverage, entropy_diversity

same = RecommendationTable({u: [1, 2, 3] for u in range(3)}, {}, 3)
spread = RecommendationTable({0: [1, 2, 3], 1: [4, 5, 6], 2: [7, 8, 9]}, {}, 3)

for name, t in (("same lists", same), ("disjoint lists", spread)):
    print(f"{name:15s} CO = {coverage(t)}  ED = {entropy_diversity(t):.4f}")
print("ln 3 =", round(math.log(3), 4), " ln 9 =", round(math.log(9), 4))

# ILS uses item feature vectors; 1 - cosine, so larger means less alike
rng = np.random.default_rng(0)
feats = ItemFeatureMatrix([str(i) for i in range(1, 10)], [f"tag{j}" for j in range(5)], rng.uniform(0.01, 1, (9, 5)))
as_str = RecommendationTable({u: [str(i) for i in l] for u, l in spread.lists.items()}, {}, 3)
r = average_ils(as_str, feats)
print(f"average ILS over {r.users} users: {r.value:.4f}")
