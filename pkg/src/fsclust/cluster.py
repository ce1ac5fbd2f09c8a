"""Complexity-invariant distance and k-medoids clustering with silhouette selection."""
from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .errors import DegenerateComplexity, InvalidK, LengthMismatch, SeriesTooShort

DEFAULT_RESTARTS = 20
DEFAULT_K_MAX = 10
_EPS_REL = 1e-12
_MAX_ITER = 100


def complexity_estimate(x):
    """sqrt(sum of squared first differences)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] < 2:
        raise SeriesTooShort("complexity estimate needs at least 2 samples")
    d = np.diff(x)
    return math.sqrt(float(np.dot(d, d)))


def correction_factor(ce_x, ce_y, strict=True):
    """Return ``(cf, flagged)`` where ``flagged`` marks an epsilon-guarded pair."""
    hi, lo = max(ce_x, ce_y), min(ce_x, ce_y)
    if hi == 0.0:
        return 1.0, False
    if lo == 0.0:
        if strict:
            raise DegenerateComplexity("one series has zero complexity (constant)")
        return hi / (_EPS_REL * hi), True
    return hi / lo, False


def cid(x, y, strict=True):
    """Complexity-invariant distance: correction factor times Euclidean distance."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise LengthMismatch(f"series lengths differ: {x.shape[0]} vs {y.shape[0]}")
    cf, _ = correction_factor(complexity_estimate(x), complexity_estimate(y), strict)
    d = x - y
    return cf * math.sqrt(float(np.dot(d, d)))


@dataclass(frozen=True)
class DistanceMatrix:
    ids: tuple
    d: np.ndarray
    flagged_pairs: tuple = ()

    def __post_init__(self):
        d = np.array(self.d, dtype=np.float64)
        ids = tuple(str(i) for i in self.ids)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] != len(ids):
            raise ValueError("distance matrix must be square and match ids")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValueError("distances must be finite and non-negative")
        if not np.array_equal(d, d.T) or np.any(np.diag(d) != 0):
            raise ValueError("distance matrix must be symmetric with zero diagonal")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "ids", ids)

    @property
    def m(self):
        return len(self.ids)

    def take(self, order):
        order = list(order)
        return DistanceMatrix([self.ids[i] for i in order], self.d[np.ix_(order, order)])


def distance_matrix(series, ids=None, strict=True):
    """Pairwise CID over equal-length series (upper triangle computed, mirrored)."""
    arrs = [np.asarray(s, dtype=np.float64).ravel() for s in series]
    if ids is None:
        ids = [str(i) for i in range(len(arrs))]
    ids = list(ids)
    if len(ids) != len(arrs):
        raise ValueError("ids and series differ in count")
    m = len(arrs)
    if m and any(a.shape != arrs[0].shape for a in arrs):
        raise LengthMismatch("all series must have the same length; align them first")
    ce = [complexity_estimate(a) for a in arrs]
    d = np.zeros((m, m))
    flagged = []
    for i in range(m):
        for j in range(i + 1, m):
            try:
                cf, flag = correction_factor(ce[i], ce[j], strict)
            except DegenerateComplexity as exc:
                raise DegenerateComplexity(f"pair ({ids[i]!r}, {ids[j]!r}): {exc}") from None
            diff = arrs[i] - arrs[j]
            d[i, j] = d[j, i] = cf * math.sqrt(float(np.dot(diff, diff)))
            if flag:
                flagged.append((ids[i], ids[j]))
    return DistanceMatrix(ids, d, tuple(flagged))


@dataclass(frozen=True)
class Clustering:
    k: int
    labels: np.ndarray
    medoids: tuple
    silhouettes: np.ndarray
    avg_silhouette: float
    cost: float = math.nan
    cost_history: tuple = field(default=(), repr=False)


def _assign(d, medoids):
    # argmin picks the first (lowest-index) medoid on ties
    labels = np.argmin(d[:, medoids], axis=1)
    labels[list(medoids)] = np.arange(len(medoids))
    return labels


def _cost(d, medoids, labels):
    return float(d[np.arange(d.shape[0]), np.asarray(medoids)[labels]].sum())


def _alternate(d, medoids):
    medoids = list(medoids)
    labels = _assign(d, medoids)
    cost = _cost(d, medoids, labels)
    history = [cost]
    for _ in range(_MAX_ITER):
        new = []
        for c in range(len(medoids)):
            members = np.flatnonzero(labels == c)
            within = d[np.ix_(members, members)].sum(axis=1)
            new.append(int(members[np.argmin(within)]))
        new_labels = _assign(d, new)
        new_cost = _cost(d, new, new_labels)
        if not new_cost < cost:
            break
        medoids, labels, cost = new, new_labels, new_cost
        history.append(cost)
    return medoids, labels, cost, history


def _initial_medoid_sets(m, k, seed, restarts):
    rng = np.random.default_rng(seed)
    if math.comb(m, k) <= restarts:
        combos = list(itertools.combinations(range(m), k))
        order = rng.permutation(len(combos))
        return [list(combos[i]) for i in order]
    return [sorted(rng.choice(m, size=k, replace=False).tolist()) for _ in range(restarts)]


def partition_medoids(dm, k, seed=0, restarts=DEFAULT_RESTARTS):
    """k-medoids by alternating assignment and medoid update, best of several starts.

    When there are no more distinct starting medoid sets than ``restarts``,
    every set is tried, which makes the result the global optimum.
    """
    d = dm.d if isinstance(dm, DistanceMatrix) else np.asarray(dm, dtype=np.float64)
    m = d.shape[0]
    if not (2 <= k <= m - 1):
        raise InvalidK(f"k={k} outside [2, {m - 1}] for {m} series")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    for init in _initial_medoid_sets(m, k, seed, restarts):
        medoids, labels, cost, history = _alternate(d, init)
        if best is None or cost < best[2]:
            best = (medoids, labels, cost, history)
    medoids, labels, cost, history = best
    labels, medoids = _canonical(labels, medoids)
    s, avg = silhouette(d, labels)
    return Clustering(k, labels, tuple(medoids), s, avg, cost, tuple(history))


def _canonical(labels, medoids):
    """Relabel clusters in order of their first member."""
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty(len(medoids), dtype=np.int64)
    remap[order] = np.arange(len(medoids))
    return remap[labels], [medoids[i] for i in order]


def silhouette(dm, labels):
    """Per-point silhouette widths and their mean; singletons score 0."""
    d = dm.d if isinstance(dm, DistanceMatrix) else np.asarray(dm, dtype=np.float64)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    if clusters.shape[0] < 2:
        raise InvalidK("silhouette needs at least 2 clusters")
    m = d.shape[0]
    s = np.zeros(m)
    sizes = {c: int(np.sum(labels == c)) for c in clusters}
    for i in range(m):
        own = labels[i]
        if sizes[own] == 1:
            continue
        same = labels == own
        a = d[i, same].sum() / (sizes[own] - 1)
        b = min(d[i, labels == c].mean() for c in clusters if c != own)
        denom = max(a, b)
        s[i] = 0.0 if denom == 0 else (b - a) / denom
    return s, float(s.mean())


def select_k(dm, k_min=2, k_max=None, seed=0, restarts=DEFAULT_RESTARTS):
    """Pick k with the highest average silhouette (smaller k wins ties).

    Returns ``(best_clustering, {k: avg_silhouette})``.
    """
    m = dm.m if isinstance(dm, DistanceMatrix) else np.asarray(dm).shape[0]
    if k_max is None:
        k_max = min(DEFAULT_K_MAX, m - 1)
    if not (2 <= k_min <= k_max <= m - 1):
        raise InvalidK(f"need 2 <= k_min <= k_max <= {m - 1}, got [{k_min}, {k_max}]")
    curve = {}
    best = None
    for k in range(k_min, k_max + 1):
        c = partition_medoids(dm, k, seed=seed, restarts=restarts)
        curve[k] = c.avg_silhouette
        if best is None or c.avg_silhouette > best.avg_silhouette:
            best = c
    return best, curve
