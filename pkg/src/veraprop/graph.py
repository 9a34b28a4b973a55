"""Readership-similarity graph over articles.

Active users' merged repost counts form a sparse engagement matrix B
(users x articles). Projecting B^T B gives the article-by-article
co-readership weights, which are then symmetrically normalized by
D^{-1/2} A D^{-1/2} with D the diagonal of row sums.

Articles with no active readership would otherwise be zeroed by
propagation; the default isolated-node policy gives them an identity row
so their incoming confidence is preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .data import DataError, Dataset
from .fna import WEIGHTINGS

ISOLATED_POLICIES = ("self-loop", "zero")
DIAGONAL_POLICIES = ("keep", "zero")


@dataclass(frozen=True)
class EngagementMatrix:
    """Sparse |U'| x N matrix of merged repost counts for active users.

    Rows follow ``user_ids`` (sorted); columns are the dataset's dense
    article index and always span all N articles, however aggressive the
    user filter.
    """

    matrix: sparse.csr_matrix
    user_ids: tuple[str, ...]
    n_articles: int


@dataclass(frozen=True)
class ProximityGraph:
    """Symmetric nonnegative normalized adjacency over N articles."""

    a_t: sparse.csr_matrix
    degrees: np.ndarray  # row sums of the unnormalized projection
    t_u: int | None
    diagonal_policy: str
    isolated_policy: str

    @property
    def n(self) -> int:
        return self.a_t.shape[0]

    @property
    def isolated(self) -> np.ndarray:
        return np.flatnonzero(self.degrees == 0.0)


def filter_active_users(dataset: Dataset, t_u: int, weighting: str = "by-article") -> EngagementMatrix:
    """Engagement matrix over users whose activity is at least ``t_u``."""
    if t_u < 1:
        raise ValueError(f"t_u must be >= 1, got {t_u}")
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")

    activity: dict[str, int] = {}
    for rec in dataset.engagements:
        weight = 1 if weighting == "by-article" else rec.reposts
        activity[rec.user_id] = activity.get(rec.user_id, 0) + weight
    active = tuple(sorted(u for u, act in activity.items() if act >= t_u))
    row_of = {u: k for k, u in enumerate(active)}

    rows, cols, vals = [], [], []
    for rec in dataset.engagements:
        if rec.user_id in row_of:
            rows.append(row_of[rec.user_id])
            cols.append(dataset.index_of(rec.article_id))
            vals.append(rec.reposts)
    matrix = sparse.csr_matrix(
        (np.asarray(vals, dtype=np.int64), (rows, cols)),
        shape=(len(active), dataset.n_articles),
    )
    return EngagementMatrix(matrix=matrix, user_ids=active, n_articles=dataset.n_articles)


def project(b: EngagementMatrix) -> sparse.csr_matrix:
    """Co-readership weights B^T B, kept sparse throughout.

    Entry (i, j) sums, over every active user, the product of the user's
    repost counts on articles i and j. Integer counts keep the float64
    result exact, so the matrix is exactly symmetric.
    """
    a_n = (b.matrix.T @ b.matrix).astype(np.float64).tocsr()
    a_n.sum_duplicates()
    a_n.sort_indices()
    return a_n


def normalize(
    a_n,
    isolated_policy: str = "self-loop",
    t_u: int | None = None,
    diagonal_policy: str = "keep",
) -> ProximityGraph:
    """Symmetric normalization of a nonnegative co-readership matrix.

    Each stored value is computed once per unordered pair and mirrored, so
    the result is bit-exactly symmetric. Rows with zero degree are handled
    per ``isolated_policy``: "self-loop" plants a unit diagonal entry,
    "zero" leaves the row empty.
    """
    if isolated_policy not in ISOLATED_POLICIES:
        raise ValueError(f"isolated_policy must be one of {ISOLATED_POLICIES}")
    a_n = sparse.csr_matrix(a_n, dtype=np.float64)
    a_n.eliminate_zeros()  # a stored zero in a zero-degree row would make 0/0
    if a_n.shape[0] != a_n.shape[1]:
        raise DataError(f"matrix must be square, got {a_n.shape}")
    if a_n.nnz and a_n.data.min() < 0:
        raise DataError("co-readership matrix has negative entries")
    if (a_n != a_n.T).nnz:
        raise DataError("co-readership matrix is not symmetric")

    degrees = np.asarray(a_n.sum(axis=1)).ravel()
    coo = a_n.tocoo()
    upper = coo.row <= coo.col
    rows_u, cols_u, vals_u = coo.row[upper], coo.col[upper], coo.data[upper]

    inv_sqrt_prod = 1.0 / np.sqrt(degrees[rows_u] * degrees[cols_u])
    weights = vals_u * inv_sqrt_prod

    off = rows_u < cols_u
    rows = np.concatenate([rows_u, cols_u[off]])
    cols = np.concatenate([cols_u, rows_u[off]])
    data = np.concatenate([weights, weights[off]])

    if isolated_policy == "self-loop":
        iso = np.flatnonzero(degrees == 0.0)
        rows = np.concatenate([rows, iso])
        cols = np.concatenate([cols, iso])
        data = np.concatenate([data, np.ones(iso.size)])

    a_t = sparse.csr_matrix((data, (rows, cols)), shape=a_n.shape)
    a_t.sum_duplicates()
    a_t.sort_indices()
    return ProximityGraph(
        a_t=a_t,
        degrees=degrees,
        t_u=t_u,
        diagonal_policy=diagonal_policy,
        isolated_policy=isolated_policy,
    )


def build_proximity_graph(
    dataset: Dataset,
    t_u: int,
    weighting: str = "by-article",
    zero_diagonal: bool = False,
    isolated_policy: str = "self-loop",
) -> ProximityGraph:
    """Full pipeline: filter users, project, optionally drop self-readership
    mass, normalize."""
    b = filter_active_users(dataset, t_u, weighting)
    a_n = project(b)
    diagonal_policy = "keep"
    if zero_diagonal:
        a_n.setdiag(0.0)
        a_n.eliminate_zeros()
        diagonal_policy = "zero"
    return normalize(a_n, isolated_policy, t_u=t_u, diagonal_policy=diagonal_policy)


def save_graph(graph: ProximityGraph, path) -> None:
    """Coordinate-list dump, round-trip exact via 17-significant-digit
    decimals."""
    coo = graph.a_t.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# news-proximity-graph v1\n")
        fh.write(
            f"# n={graph.n} t_u={graph.t_u if graph.t_u is not None else 'none'}"
            f" diagonal_policy={graph.diagonal_policy} isolated_policy={graph.isolated_policy}\n"
        )
        fh.write("# degrees=" + ",".join(f"{d:.17g}" for d in graph.degrees) + "\n")
        fh.write("i,j,value\n")
        for idx in order:
            fh.write(f"{coo.row[idx]},{coo.col[idx]},{coo.data[idx]:.17g}\n")


def load_graph(path) -> ProximityGraph:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 4 or lines[0] != "# news-proximity-graph v1":
        raise DataError(f"{path}: not a proximity graph dump")
    meta = dict(kv.split("=", 1) for kv in lines[1][2:].split())
    n = int(meta["n"])
    t_u = None if meta["t_u"] == "none" else int(meta["t_u"])
    degrees = np.array([float(x) for x in lines[2].split("=", 1)[1].split(",")])
    if lines[3] != "i,j,value":
        raise DataError(f"{path}: missing coordinate header")
    rows, cols, vals = [], [], []
    for line in lines[4:]:
        i, j, v = line.split(",")
        rows.append(int(i))
        cols.append(int(j))
        vals.append(float(v))
    a_t = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    a_t.sort_indices()
    return ProximityGraph(
        a_t=a_t,
        degrees=degrees,
        t_u=t_u,
        diagonal_policy=meta["diagonal_policy"],
        isolated_policy=meta["isolated_policy"],
    )
