"""Bitset graphs, reproducible G(n, p) sampling and induced-subgraph statistics.

Randomness comes from SplitMix64 (Steele, Lea and Flood 2014), with its
published constants:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

all arithmetic mod 2**64.  The sampler takes one draw per unordered pair
(i, j), i < j, in row-major order, and keeps the edge iff the draw is below
``floor(p * 2**64)``.  That stream layout is part of the output contract.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .rates import RateParams, as_rational

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit integers."""
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64(seed: int) -> Iterator[int]:
    state = seed & MASK64
    while True:
        state = (state + GOLDEN_GAMMA) & MASK64
        yield mix64(state)


def edge_threshold(p) -> int:
    """``floor(p * 2**64)`` computed exactly."""
    if isinstance(p, RateParams):
        p = p.p
    p = as_rational(p)
    if not 0 <= p <= 1:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    return math.floor(p * (1 << 64))


class GraphFormatError(ValueError):
    """Malformed graph file (bad header or edge line)."""


class GraphValidationError(ValueError):
    """Well-formed file describing an invalid simple graph."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1; row ``v`` is a bitmask of N(v)."""

    n: int
    adjacency: tuple[int, ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency must have one row per vertex")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adjacency):
            if row & ~full or row >> v & 1:
                raise ValueError(f"row {v} has out-of-range bits or a loop")
            for u in _bits(row):
                if not self.adjacency[u] >> v & 1:
                    raise ValueError(f"adjacency not symmetric at ({v}, {u})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << v) for v in range(n)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    @property
    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return self.adjacency[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, row in enumerate(self.adjacency) for v in _bits(row >> (u + 1) << (u + 1))]


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def vertex_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def mask_vertices(mask: int) -> list[int]:
    return list(_bits(mask))


def gnp_sample(n: int, p, seed: int) -> Graph:
    """Sample G(n, p); identical (n, p, seed) give identical graphs everywhere."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    threshold = edge_threshold(p)
    draws = splitmix64(seed)
    rows = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if next(draws) < threshold:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return Graph(n, tuple(rows))


@dataclass(frozen=True)
class SubsetStats:
    size: int
    edges: int

    @property
    def avg_degree(self) -> Fraction:
        return Fraction(2 * self.edges, self.size) if self.size else Fraction(0)


def induced_edges(graph: Graph, mask: int) -> int:
    adj = graph.adjacency
    return sum((adj[v] & mask).bit_count() for v in _bits(mask)) // 2


def subset_stats(graph: Graph, vertices: Iterable[int]) -> SubsetStats:
    mask = vertex_mask(vertices)
    if mask >> graph.n:
        raise ValueError("subset contains vertices outside the graph")
    return SubsetStats(mask.bit_count(), induced_edges(graph, mask))


def within_quota(edges: int, size: int, t: Fraction) -> bool:
    """Exact test of ``2 e / size <= t``."""
    return 2 * edges * t.denominator <= t.numerator * size


def is_t_sparse(graph: Graph, vertices: Iterable[int], t) -> bool:
    """True iff the induced subgraph on ``vertices`` has average degree at most ``t``."""
    stats = subset_stats(graph, vertices)
    return within_quota(stats.edges, stats.size, as_rational(t))


def write_graph(graph: Graph, path) -> None:
    """Write the ``n m`` header followed by one ``u v`` line per edge (u < v)."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_graph(graph))


def format_graph(graph: Graph) -> str:
    edges = graph.edges()
    return "".join(f"{line}\n" for line in [f"{graph.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges])


def parse_graph(text: str, source: str = "<string>") -> Graph:
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError(f"{source}:1: missing 'n m' header")
    try:
        n, m = (int(x) for x in lines[0].split())
    except ValueError:
        raise GraphFormatError(f"{source}:1: malformed header {lines[0]!r}") from None
    if n < 0 or m < 0:
        raise GraphFormatError(f"{source}:1: negative count in header")
    body = [(i, ln) for i, ln in enumerate(lines[1:], start=2) if ln.strip()]
    if len(body) != m:
        raise GraphFormatError(f"{source}: header announces {m} edges, found {len(body)}")
    rows = [0] * n
    for lineno, line in body:
        try:
            u, v = (int(x) for x in line.split())
        except ValueError:
            raise GraphFormatError(f"{source}:{lineno}: malformed edge line {line!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphValidationError(f"{source}:{lineno}: vertex out of range in {line!r}")
        if u == v:
            raise GraphValidationError(f"{source}:{lineno}: loop at vertex {u}")
        if rows[u] >> v & 1:
            raise GraphValidationError(f"{source}:{lineno}: duplicate edge {line!r}")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, tuple(rows))


def read_graph(path) -> Graph:
    with open(path, encoding="ascii") as fh:
        return parse_graph(fh.read(), os.fspath(path))
