"""Dynamic-network harness: preferential attachment, vertex churn and
eigenvector-centrality rankings.

Each step removes a normally distributed number of random vertices, adds a
normally distributed number of new ones by preferential attachment, and
compares the top-k centrality rankings before and after.
"""

from dataclasses import asdict, dataclass, fields
import logging
import math

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from sklearn.base import BaseEstimator

from ._validation import check_non_negative_real, check_positive_int
from .exceptions import DegenerateInput, InvalidParams, KTooLarge, NotConverged
from .ranksim import TruncatedRanking, kendall_tau_truncated, normalized_overlap, pearson, similarity_s

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10000
MAX_REDRAWS = 1000


class Graph:
    """Undirected simple graph keyed by integer vertex ids."""

    def __init__(self, adj=None, next_id=None):
        self.adj = {v: set(nbrs) for v, nbrs in (adj or {}).items()}
        if next_id is None:
            next_id = max(self.adj, default=-1) + 1
        self.next_id = next_id

    @classmethod
    def from_edges(cls, edges, vertices=()):
        g = cls()
        for v in vertices:
            g.adj.setdefault(v, set())
        for u, v in edges:
            g.adj.setdefault(u, set())
            g.adj.setdefault(v, set())
            g.add_edge(u, v)
        g.next_id = max(g.adj, default=-1) + 1
        return g

    def copy(self):
        return Graph(self.adj, self.next_id)

    @property
    def vertices(self):
        return set(self.adj)

    def __len__(self):
        return len(self.adj)

    def degree(self, v):
        return len(self.adj[v])

    def number_of_edges(self):
        return sum(len(n) for n in self.adj.values()) // 2

    def edges(self):
        return {(u, v) for u, nbrs in self.adj.items() for v in nbrs if u < v}

    def add_vertex(self):
        v = self.next_id
        self.next_id += 1
        self.adj[v] = set()
        return v

    def add_edge(self, u, v):
        if u == v:
            raise InvalidParams(f"self-loop on vertex {u}")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def remove_vertex(self, v):
        for u in self.adj.pop(v):
            self.adj[u].discard(v)

    def check(self):
        """Raise if the adjacency is not a simple undirected graph."""
        for u, nbrs in self.adj.items():
            if u in nbrs:
                raise InvalidParams(f"self-loop at {u}")
            for v in nbrs:
                if v not in self.adj or u not in self.adj[v]:
                    raise InvalidParams(f"dangling or asymmetric edge {u}-{v}")


class _AttachmentPool:
    """Degree-weighted sampler; isolated vertices get weight 1."""

    def __init__(self, graph):
        self.graph = graph
        pool = []
        for v in sorted(graph.adj):
            pool.extend([v] * max(len(graph.adj[v]), 1))
        self.pool = pool

    def attach(self, m, rng):
        g = self.graph
        if len(g) < m:
            raise InvalidParams(f"cannot attach {m} edges in a graph of {len(g)} vertices")
        targets = []
        chosen = set()
        size = len(self.pool)
        while len(targets) < m:
            t = self.pool[int(rng.integers(size))]
            if t not in chosen:
                chosen.add(t)
                targets.append(t)
        v = g.add_vertex()
        for t in targets:
            if g.adj[t]:
                self.pool.append(t)
            g.add_edge(v, t)
        self.pool.extend([v] * m)
        return v


def _check_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def ba_generate(n, m, seed=None):
    """Barabási–Albert graph: a clique on ``m + 1`` vertices, then each new
    vertex links to ``m`` distinct vertices picked proportionally to degree."""
    n = check_positive_int(n, "n")
    m = check_positive_int(m, "m")
    if n <= m:
        raise InvalidParams(f"need n > m, got n={n}, m={m}")
    rng = _check_rng(seed)
    g = Graph.from_edges(
        [(u, v) for u in range(m + 1) for v in range(u + 1, m + 1)], vertices=range(m + 1)
    )
    pool = _AttachmentPool(g)
    for _ in range(n - m - 1):
        pool.attach(m, rng)
    return g


def adjacency_matrix(g):
    """CSR adjacency over ``sorted(g.vertices)``; returns (matrix, ids)."""
    ids = np.array(sorted(g.adj), dtype=np.int64)
    index = {v: i for i, v in enumerate(ids.tolist())}
    rows, cols = [], []
    for u, nbrs in g.adj.items():
        iu = index[u]
        for v in nbrs:
            rows.append(iu)
            cols.append(index[v])
    data = np.ones(len(rows), dtype=float)
    A = sp.csr_matrix((data, (rows, cols)), shape=(len(ids), len(ids)))
    return A, ids


def largest_component(A):
    """Boolean mask of the largest connected component; ties go to the
    component holding the smallest index."""
    _, labels = connected_components(A, directed=False)
    sizes = np.bincount(labels)
    tied = np.flatnonzero(sizes == sizes.max())
    winner = min(tied, key=lambda lab: int(np.argmax(labels == lab)))
    return labels == winner


def eigenvector_centrality(g, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Principal adjacency eigenvector on the largest component.

    Power iteration on ``A + I`` (same eigenvectors as ``A``, but no
    oscillation on bipartite components) from a uniform start, normalised to
    unit L2 norm. Stops once successive iterates differ by less than ``tol``
    in max-norm and the eigen-residual ``|A v - (v.A v) v|`` is below ``tol``
    too. Vertices outside the largest component score 0.

    Raises
    ------
    NotConverged
        After ``max_iter`` iterations; ``exc.scores`` has the last iterate.
    """
    if len(g) == 0:
        raise InvalidParams("eigenvector centrality of an empty graph")
    tol = check_non_negative_real(tol, "tol")
    max_iter = check_positive_int(max_iter, "max_iter")
    A, ids = adjacency_matrix(g)
    mask = largest_component(A)
    sub = A[mask][:, mask]
    k = sub.shape[0]
    x = np.full(k, 1.0 / math.sqrt(k))
    converged = False
    for _ in range(max_iter):
        ax = sub @ x
        # the step size alone understates the error by up to a factor
        # lambda + 1, so the eigen-residual must be small as well
        residual = np.max(np.abs(ax - (x @ ax) * x))
        y = ax + x
        y /= np.linalg.norm(y)
        delta = np.max(np.abs(y - x))
        x = y
        if delta < tol and residual < tol:
            converged = True
            break
    full = np.zeros(len(ids))
    full[mask] = x
    scores = dict(zip(ids.tolist(), full.tolist()))
    if not converged:
        raise NotConverged(
            f"power iteration did not converge in {max_iter} iterations (last change {delta:.3g})",
            scores=scores, iterations=max_iter,
        )
    return scores


def top_k_ranking(scores, k):
    """Highest-scoring ``k`` ids; ties broken by ascending id."""
    k = check_positive_int(k, "k")
    if k > len(scores):
        raise KTooLarge(f"k={k} exceeds the {len(scores)} scored vertices")
    ordered = sorted(scores, key=lambda v: (-scores[v], v))
    return TruncatedRanking(tuple(ordered[:k]))


@dataclass(frozen=True)
class ChurnConfig:
    initial_n: int = 10000
    attach_m: int = 5
    churn_mean: float = 1000.0
    churn_std: float = 100.0
    top_k: int = 1000
    iterations: int = 1000
    seed: int = 0
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        for name in ("initial_n", "attach_m", "top_k", "iterations", "max_iter"):
            object.__setattr__(self, name, check_positive_int(getattr(self, name), name))
        for name in ("churn_mean", "churn_std", "tol"):
            object.__setattr__(self, name, check_non_negative_real(getattr(self, name), name))
        object.__setattr__(self, "seed", int(self.seed))
        if self.attach_m >= self.initial_n:
            raise InvalidParams(f"attach_m={self.attach_m} must be < initial_n={self.initial_n}")
        if self.top_k > self.initial_n - 3 * self.churn_std:
            raise InvalidParams(
                f"top_k={self.top_k} exceeds initial_n - 3*churn_std = {self.initial_n - 3 * self.churn_std}"
            )

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name: f.type for f in fields(cls)}
        unknown = set(mapping) - set(known)
        if unknown:
            raise InvalidParams(f"unknown config keys: {sorted(unknown)}")
        return cls(**dict(mapping))

    def to_dict(self):
        return asdict(self)


def _draw(rng, config):
    return max(0, int(round(rng.normal(config.churn_mean, config.churn_std))))


def churn_step(g, config, rng, sizes=None):
    """One churn step; returns a new graph and leaves ``g`` untouched.

    Removal and addition sizes are drawn independently from
    ``N(churn_mean, churn_std)``, rounded and clamped at 0. Draws that would
    leave fewer than ``attach_m + 1`` vertices are redrawn. ``sizes`` fixes
    ``(x_r, x_a)`` instead of drawing them.
    """
    rng = _check_rng(rng)
    m = config.attach_m
    if sizes is not None:
        x_r, x_a = (int(x) for x in sizes)
    else:
        for _ in range(MAX_REDRAWS):
            x_r = _draw(rng, config)
            x_a = _draw(rng, config)
            if len(g) > x_r + m or config.churn_std == 0:
                break
    if len(g) <= x_r + m:
        raise InvalidParams(f"graph of {len(g)} vertices too small to remove {x_r} and attach {m}")
    out = g.copy()
    if x_r:
        doomed = rng.choice(np.array(sorted(out.adj), dtype=np.int64), size=x_r, replace=False)
        for v in doomed.tolist():
            out.remove_vertex(v)
    if x_a:
        pool = _AttachmentPool(out)
        for _ in range(x_a):
            pool.attach(m, rng)
    return out


@dataclass(frozen=True)
class ExperimentRecord:
    step: int
    s_value: float
    kendall: float
    overlap: float
    graph_size: int


RECORD_COLUMNS = ("step", "s", "kendall", "overlap", "graph_size")


def _safe_pearson(xs, ys):
    try:
        return pearson(xs, ys)
    except DegenerateInput:
        return None


def summarize(records, skipped=0):
    s = np.array([r.s_value for r in records], dtype=float)
    tau = np.array([r.kendall for r in records], dtype=float)
    ov = np.array([r.overlap for r in records], dtype=float)
    ddof = 1 if len(records) > 1 else 0
    empty = len(records) == 0
    return {
        "steps_recorded": len(records),
        "steps_skipped_not_converged": skipped,
        "mean_s": None if empty else float(s.mean()),
        "std_s": None if empty else float(s.std(ddof=ddof)),
        "mean_kendall": None if empty else float(tau.mean()),
        "std_kendall": None if empty else float(tau.std(ddof=ddof)),
        "mean_overlap": None if empty else float(ov.mean()),
        "pearson_s_overlap": None if len(records) < 2 else _safe_pearson(s, ov),
        "pearson_s_kendall": None if len(records) < 2 else _safe_pearson(s, tau),
    }


def run_experiment(config, progress=None):
    """Run the churn experiment; returns ``(records, summary)``.

    Steps where centrality fails to converge are skipped and counted in
    ``summary["steps_skipped_not_converged"]``; the step after a skipped one
    only re-establishes the baseline ranking.
    """
    rng = np.random.default_rng(config.seed)
    g = ba_generate(config.initial_n, config.attach_m, rng)

    def ranking(graph):
        try:
            return top_k_ranking(eigenvector_centrality(graph, config.tol, config.max_iter), config.top_k)
        except NotConverged as exc:
            log.warning("step skipped: %s", exc)
            return None

    prev = ranking(g)
    skipped = 0 if prev is not None else 1
    records = []
    for step in range(1, config.iterations + 1):
        g = churn_step(g, config, rng)
        cur = ranking(g)
        if cur is None:
            skipped += 1
        elif prev is not None:
            tau = kendall_tau_truncated(prev, cur)
            records.append(
                ExperimentRecord(step, similarity_s(prev, cur), tau.tau, normalized_overlap(prev, cur), len(g))
            )
        prev = cur
        if progress is not None:
            progress(step)
    return records, summarize(records, skipped)


class ChurnExperiment(BaseEstimator):
    """Estimator-style wrapper around :func:`run_experiment`.

    Every :class:`ChurnConfig` field is a constructor parameter, so
    ``get_params``/``set_params`` work as usual. ``fit`` ignores its inputs.

    Attributes
    ----------
    records_ : list of ExperimentRecord
    summary_ : dict
    """

    def __init__(self, initial_n=10000, attach_m=5, churn_mean=1000.0, churn_std=100.0,
                 top_k=1000, iterations=1000, seed=0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
        self.initial_n = initial_n
        self.attach_m = attach_m
        self.churn_mean = churn_mean
        self.churn_std = churn_std
        self.top_k = top_k
        self.iterations = iterations
        self.seed = seed
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X=None, y=None):
        self.config_ = ChurnConfig(**self.get_params())
        self.records_, self.summary_ = run_experiment(self.config_)
        return self

    def transform(self, X=None):
        return np.array(
            [[r.step, r.s_value, r.kendall, r.overlap, r.graph_size] for r in self.records_], dtype=float
        ).reshape(-1, 5)
