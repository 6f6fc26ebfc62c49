"""
How often each node shows up in the walks
=========================================

On a scale-free graph, uniform walks visit nodes roughly in proportion to
their degree. Biasing toward low-degree neighbours flattens that profile.
The flattening is only partial on a preferential-attachment graph, because
hubs there are wired to many low-degree nodes, which all send their walkers
back to the hub. A degree-preserving rewiring removes that correlation.
"""

import numpy as np
from scipy.stats import spearmanr

from div2vec import WalkStrategy, frequency_profile, generate_corpus
from div2vec.datasets import preferential_attachment_graph, rewire_degree_preserving

strategies = [WalkStrategy.uniform(),
              WalkStrategy.degree_biased("inverse_sqrt"),
              WalkStrategy.degree_biased("inverse")]

ba = preferential_attachment_graph(1000, 3, seed=0)
rewired = rewire_degree_preserving(ba, 30_000, seed=0)

for name, g in (("preferential attachment", ba), ("rewired", rewired)):
    print(name)
    d = g.degrees.astype(float)
    for s in strategies:
        prof = frequency_profile(generate_corpus(g, s, 80, 10, seed=0), g)
        # stationary mass of the walk is f(d_v) * sum of f over the neighbours of v
        f = {"uniform": np.ones_like, "inverse_sqrt": lambda x: x ** -0.5, "inverse": lambda x: 1.0 / x}
        fd = f["uniform" if s.kind == "uniform" else s.f](d)
        nb_sum = np.add.reduceat(fd[g.neighbors], g.offsets[:-1])
        rho_pi = spearmanr(d, fd * nb_sum)[0]
        print(f"  {s.describe():32s} spearman(degree, visits) = {prof.spearman:+.3f}"
              f"   (stationary: {rho_pi:+.3f})")

# the profile itself: one row per node, sorted by degree
prof = frequency_profile(generate_corpus(ba, strategies[2], 80, 10, seed=0), ba)
print(np.c_[prof.nodes, prof.degrees, prof.occurrences][-5:])
