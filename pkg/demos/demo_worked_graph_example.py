"""Readership graph construction, end to end on a 3-article toy.

Two users, three articles. User u1 reposted article 0 twice and article 1
once; user u2 reposted article 1 three times and article 2 once. The
projection counts shared readership, and the symmetric normalization turns
it into propagation weights.
"""

import numpy as np
from scipy import sparse

from veraprop.graph import EngagementMatrix, normalize, project

b = EngagementMatrix(
    matrix=sparse.csr_matrix(np.array([[2, 1, 0], [0, 3, 1]], dtype=np.int64)),
    user_ids=("u1", "u2"),
    n_articles=3,
)
print("engagement matrix B (users x articles):")
print(b.matrix.toarray())

a_n = project(b)
print("\nco-readership projection B^T B:")
print(a_n.toarray())
print("article 0 and 1 share reader u1 (weight 2*1), articles 1 and 2 share u2 (3*1)")

graph = normalize(a_n)
print("\ndegrees (row sums):", graph.degrees)
print("normalized adjacency:")
print(np.round(graph.a_t.toarray(), 5))
print(f"\nedge (0,1): 2/sqrt(6*15)  = {2 / np.sqrt(6 * 15):.5f}")
print(f"edge (1,2): 3/sqrt(15*4) = {3 / np.sqrt(15 * 4):.5f}")

# isolated articles keep themselves alive through propagation
lonely = np.zeros((4, 4))
lonely[:2, :2] = a_n.toarray()[:2, :2]
g2 = normalize(lonely)
print("\nwith article 3 unread by anyone, its row is the identity row:")
print(np.round(g2.a_t.toarray(), 5))
