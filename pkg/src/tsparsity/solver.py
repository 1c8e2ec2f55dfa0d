"""Exact, brute-force and greedy computation of the t-sparsity number.

The exact solver sweeps the target size k and, for each k, decides whether
some k-set spans at most ``floor(t k / 2)`` edges.  Feasibility is monotone
in k: dropping a maximum-degree vertex (degree >= average) from a t-sparse
set keeps it t-sparse, so the first feasible k met on the way down (or the
last one on the way up) is the optimum.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graphs import Graph, _bits, induced_edges, mask_vertices, within_quota
from .rates import RateParams, as_rational

BRUTEFORCE_MAX_N = 24

# added to the predicted size when seeding the sweep for sampled graphs
SEED_SLACK = 2


@dataclass
class SparsityResult:
    size: int
    witness: tuple[int, ...]
    edges: int
    optimal: bool
    nodes_explored: int = 0
    elapsed: float = field(default=0.0, compare=False)

    def as_record(self, timing: bool = False) -> dict:
        rec = {
            "size": self.size,
            "witness": " ".join(map(str, self.witness)),
            "edges": self.edges,
            "optimal": self.optimal,
            "nodes": self.nodes_explored,
        }
        if timing:
            rec["millis"] = round(self.elapsed * 1000, 3)
        return rec


class BudgetExhausted(Exception):
    pass


def _result(graph: Graph, mask: int, optimal: bool, nodes: int, started: float) -> SparsityResult:
    return SparsityResult(
        size=mask.bit_count(),
        witness=tuple(mask_vertices(mask)),
        edges=induced_edges(graph, mask),
        optimal=optimal,
        nodes_explored=nodes,
        elapsed=time.perf_counter() - started,
    )


def greedy_peel(graph: Graph, t) -> SparsityResult:
    """Delete a maximum-degree vertex (lowest index on ties) until t-sparse."""
    started = time.perf_counter()
    t = as_rational(t)
    adj = graph.adjacency
    mask = (1 << graph.n) - 1
    deg = [row.bit_count() for row in adj]
    edges = sum(deg) // 2
    size = graph.n
    while size and not within_quota(edges, size, t):
        v = max(_bits(mask), key=lambda u: (deg[u], -u))
        mask &= ~(1 << v)
        size -= 1
        edges -= deg[v]
        for u in _bits(adj[v] & mask):
            deg[u] -= 1
    return _result(graph, mask, False, 0, started)


def sparsity_bruteforce(graph: Graph, t) -> SparsityResult:
    """Enumerate all 2**n subsets; the largest t-sparse one wins (lowest mask on ties)."""
    n = graph.n
    if n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force refused for n={n} > {BRUTEFORCE_MAX_N}")
    started = time.perf_counter()
    t = as_rational(t)
    edges = np.zeros(1 << n, dtype=np.int32)
    sizes = np.zeros(1 << n, dtype=np.int32)
    for v in range(n):
        lo = np.arange(1 << v, dtype=np.int64)
        low_nbrs = graph.adjacency[v] & ((1 << v) - 1)
        edges[(1 << v):(1 << (v + 1))] = edges[: 1 << v] + np.bitwise_count(lo & low_nbrs)
        sizes[(1 << v):(1 << (v + 1))] = sizes[: 1 << v] + 1
    feasible = 2 * edges.astype(np.int64) * t.denominator <= t.numerator * sizes.astype(np.int64)
    score = np.where(feasible, sizes, -1)
    mask = int(np.argmax(score))
    return _result(graph, mask, True, 1 << n, started)


def _cover_bound(adj, costs: list[tuple[int, int]], r: int) -> int:
    """Fewest extra edges any r of the candidates can bring, via a greedy clique cover.

    ``costs`` holds (edges into the partial set, vertex) in ascending order.
    The j-th vertex taken from one clique (0-based) adds its own cost plus
    j edges inside the clique.  Those marginals never decrease within a
    clique, so the r smallest marginals overall give the exact minimum of
    this relaxation.
    """
    cliques: list[int] = []
    taken: list[int] = []
    marginals: list[int] = []
    for cost, v in costs:
        nbrs = adj[v]
        for i, members in enumerate(cliques):
            if members & nbrs == members:
                cliques[i] = members | (1 << v)
                marginals.append(cost + taken[i])
                taken[i] += 1
                break
        else:
            cliques.append(1 << v)
            taken.append(1)
            marginals.append(cost)
    marginals.sort()
    return sum(marginals[:r])


class _Search:
    def __init__(self, graph: Graph, t: Fraction, budget: int | None):
        self.graph = graph
        self.adj = graph.adjacency
        self.t = t
        self.budget = budget
        self.nodes = 0

    def _tick(self):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExhausted

    def decide(self, k: int) -> int | None:
        """Mask of some k-set spanning at most floor(t k / 2) edges, or None."""
        quota = (self.t.numerator * k) // (2 * self.t.denominator)
        full = (1 << self.graph.n) - 1
        return self._expand(k, quota, 0, 0, 0, full, [0] * self.graph.n)

    def _expand(self, k, quota, chosen, size, edges, cand, into):
        adj = self.adj
        self._tick()
        r = k - size
        if r == 0:
            return chosen
        while True:
            slack = quota - edges
            keep = 0
            costs = []
            for u in _bits(cand):
                if into[u] <= slack:
                    keep |= 1 << u
                    costs.append((into[u], u))
            cand = keep
            if len(costs) < r:
                return None
            costs.sort()
            if sum(c for c, _ in costs[:r]) > slack:
                return None
            if r > 1 and _cover_bound(adj, costs, r) > slack:
                return None
            cost, v = costs[0]
            if r == 1:
                return chosen | (1 << v)
            cand &= ~(1 << v)
            bumped = list(into)
            for u in _bits(adj[v] & cand):
                bumped[u] += 1
            found = self._expand(k, quota, chosen | (1 << v), size + 1, edges + cost, cand, bumped)
            if found is not None:
                return found
            self._tick()


def seed_size(n: int, t: Fraction, params: RateParams) -> int:
    """Sweep start for a G(n, p) sample; only a heuristic, never trusted for correctness."""
    np_ = n * params.p
    if np_ <= params.b:  # log_b(np) <= 1: no useful prediction
        return n
    lb = params.log_b(np_)
    guess = math.floor(2 * lb) + math.ceil(float(t) * math.ceil(params.log_b(lb))) + SEED_SLACK
    return max(1, min(n, guess))


def sparsity_exact(graph: Graph, t, budget: int | None = None, params: RateParams | None = None) -> SparsityResult:
    """Maximum size of a t-sparse vertex set.

    ``params`` marks ``graph`` as a G(n, p) sample and moves the sweep start
    near the predicted size.  When the node ``budget`` runs out the best set
    found so far is returned with ``optimal=False``.
    """
    started = time.perf_counter()
    t = as_rational(t)
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    n = graph.n
    best = greedy_peel(graph, t)
    best_mask = sum(1 << v for v in best.witness)
    if best.size == n:
        return _result(graph, best_mask, True, 0, started)

    search = _Search(graph, t, budget)
    start = seed_size(n, t, params) if params is not None else n
    k = min(n, max(start, best.size + 1))
    try:
        found = search.decide(k)
        if found is not None:
            best_mask = found
            while k < n:
                k += 1
                found = search.decide(k)
                if found is None:
                    break
                best_mask = found
        else:
            while k - 1 > best.size:
                k -= 1
                found = search.decide(k)
                if found is not None:
                    best_mask = found
                    break
    except BudgetExhausted:
        return _result(graph, best_mask, False, search.nodes, started)
    return _result(graph, best_mask, True, search.nodes, started)
