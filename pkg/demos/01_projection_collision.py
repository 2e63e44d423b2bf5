"""Two different hypergraphs, one adjacency projection.

The pair-count projection A_ij = #{present hyperedges containing both i and j}
is lossy: distinct 4-uniform hypergraphs on 8 vertices can produce the same
matrix entry for entry. This script builds the canonical colliding pair and
prints both projections side by side — they match bit for bit, which is why
every downstream method here works with the projection's law, never assuming
the hypergraph can be read back from it.
"""

import numpy as np

from hcl import HypergraphSample, ModelParams, project

E1 = [(1, 2, 3, 5), (1, 2, 4, 6), (3, 6, 7, 8), (4, 5, 7, 8)]
E2 = [(1, 2, 3, 6), (1, 2, 4, 5), (3, 5, 7, 8), (4, 6, 7, 8)]

params = ModelParams(n=8, d=4, k=0, p=0.5)
h1 = HypergraphSample(params, (), np.array(E1, dtype=np.int64))
h2 = HypergraphSample(params, (), np.array(E2, dtype=np.int64))

A1, A2 = project(h1), project(h2)

print("hyperedges of H1:", E1)
print("hyperedges of H2:", E2)
print("shared edges:", sorted(set(E1) & set(E2)) or "none")
print()
print("projection of H1:")
print(A1)
print()
print("projection of H2:")
print(A2)
print()
print("identical:", np.array_equal(A1, A2))
