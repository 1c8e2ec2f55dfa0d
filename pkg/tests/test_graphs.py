import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsparsity.graphs import (
    MASK64,
    Graph,
    GraphFormatError,
    GraphValidationError,
    edge_threshold,
    format_graph,
    gnp_sample,
    induced_edges,
    is_t_sparse,
    mix64,
    parse_graph,
    read_graph,
    splitmix64,
    subset_stats,
    vertex_mask,
    write_graph,
)
from tsparsity.rates import RateParams


def naive_edges(graph, vertices):
    vs = sorted(vertices)
    return sum(1 for u, v in itertools.combinations(vs, 2) if graph.adjacency[u] >> v & 1)


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k])


# PRNG ----------------------------------------------------------------------

def test_splitmix64_reference_vector():
    # published outputs of the reference generator seeded with 1234567
    g = splitmix64(1234567)
    assert [next(g) for _ in range(5)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]


def test_mix64_is_injective_on_a_sample():
    xs = list(range(0, 1 << 20, 7)) + [MASK64, MASK64 - 1]
    assert len({mix64(x) for x in xs}) == len(xs)


def test_edge_threshold_exact():
    assert edge_threshold(0) == 0
    assert edge_threshold(1) == 1 << 64
    assert edge_threshold(0.5) == 1 << 63
    assert edge_threshold(Fraction(1, 3)) == (1 << 64) // 3
    assert edge_threshold(RateParams(0.25)) == 1 << 62
    with pytest.raises(ValueError):
        edge_threshold(1.5)


# sampler -------------------------------------------------------------------

def test_sampler_extremes():
    assert gnp_sample(7, 0, 1).num_edges == 0
    assert gnp_sample(7, 1, 1) == Graph.complete(7)
    assert gnp_sample(7, 1, 1).num_edges == 21


def test_sampler_stream_layout():
    # one draw per pair in row-major (i < j) order, kept iff below the threshold
    n, seed, p = 9, 42, 0.37
    draws = splitmix64(seed)
    thr = edge_threshold(p)
    want = [(i, j) for i in range(n) for j in range(i + 1, n) if next(draws) < thr]
    assert gnp_sample(n, p, seed).edges() == want


def test_sampler_reproducible_and_edge_fraction():
    # 142 vertices gives 10011 pairs
    n, p = 142, 0.3
    g1, g2 = gnp_sample(n, p, 2024), gnp_sample(n, p, 2024)
    assert g1 == g2
    pairs = math.comb(n, 2)
    sd = math.sqrt(pairs * p * (1 - p))
    assert abs(g1.num_edges - pairs * p) < 3 * sd
    assert gnp_sample(n, p, 2025) != g1


def test_sampler_accepts_rate_params():
    assert gnp_sample(20, RateParams(0.4), 5) == gnp_sample(20, 0.4, 5)


def test_sampler_rejects_empty():
    with pytest.raises(ValueError):
        gnp_sample(0, 0.5, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.floats(0, 1), st.integers(0, MASK64))
def test_sampled_graph_invariants(n, p, seed):
    g = gnp_sample(n, p, seed)
    for v, row in enumerate(g.adjacency):
        assert not row >> v & 1
        for u in range(n):
            assert (row >> u & 1) == (g.adjacency[u] >> v & 1)
    assert g.num_edges == sum(r.bit_count() for r in g.adjacency) // 2
    assert subset_stats(g, range(n)).edges == g.num_edges


# graph construction --------------------------------------------------------

@pytest.mark.parametrize(
    "rows", [(0b10, 0b00), (0b01, 0b00), (0b100, 0b000)],
)
def test_graph_rejects_bad_adjacency(rows):
    with pytest.raises(ValueError):
        Graph(2, rows)


def test_from_edges_rejects_loops_and_range():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])


# subset statistics ---------------------------------------------------------

def test_subset_stats_examples():
    k4 = Graph.complete(4)
    s = subset_stats(k4, range(4))
    assert (s.size, s.edges, s.avg_degree) == (4, 6, 3)
    single = subset_stats(gnp_sample(10, 0.5, 3), [7])
    assert (single.edges, single.avg_degree) == (0, 0)
    empty = subset_stats(k4, [])
    assert (empty.size, empty.edges, empty.avg_degree) == (0, 0, 0)


def test_five_cycle_subset():
    c5 = Graph.cycle(5)  # vertex i stands for i+1 of the cycle 1-2-3-4-5-1
    s = subset_stats(c5, [0, 1, 3])
    assert (s.edges, s.avg_degree) == (1, Fraction(2, 3))
    assert s.edges == naive_edges(c5, [0, 1, 3])


def test_subset_outside_graph_rejected():
    with pytest.raises(ValueError):
        subset_stats(Graph.empty(3), [0, 5])


@settings(max_examples=80, deadline=None)
@given(graphs(), st.data())
def test_subset_stats_invariants(g, data):
    vs = data.draw(st.sets(st.integers(0, g.n - 1)))
    s = subset_stats(g, vs)
    assert s.edges == naive_edges(g, vs)
    assert 0 <= s.edges <= math.comb(s.size, 2)
    assert s.avg_degree * s.size == 2 * s.edges
    assert induced_edges(g, vertex_mask(vs)) == s.edges


# sparsity predicate --------------------------------------------------------

def test_is_t_sparse_examples():
    k5 = Graph.complete(5)
    assert is_t_sparse(k5, [0, 1, 2], 2)
    assert not is_t_sparse(k5, [0, 1, 2, 3], 2)
    assert is_t_sparse(k5, [], 0) and is_t_sparse(k5, [4], 0)


@settings(max_examples=80, deadline=None)
@given(graphs(), st.data())
def test_zero_sparse_means_independent(g, data):
    vs = data.draw(st.sets(st.integers(0, g.n - 1)))
    independent = all(not g.adjacency[u] >> v & 1 for u, v in itertools.combinations(vs, 2))
    assert is_t_sparse(g, vs, 0) == independent


@settings(max_examples=80, deadline=None)
@given(graphs(), st.data(), st.fractions(0, 10), st.fractions(0, 10))
def test_is_t_sparse_monotone_in_t(g, data, t1, t2):
    vs = data.draw(st.sets(st.integers(0, g.n - 1)))
    lo, hi = sorted((t1, t2))
    if is_t_sparse(g, vs, lo):
        assert is_t_sparse(g, vs, hi)


def test_is_t_sparse_exact_at_rational_boundary():
    # path 0-1-2: average degree 4/3
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert is_t_sparse(path, range(3), Fraction(4, 3))
    assert not is_t_sparse(path, range(3), Fraction(4, 3) - Fraction(1, 10**30))


# file format ---------------------------------------------------------------

def test_format_examples():
    assert format_graph(Graph.empty(3)) == "3 0\n"
    assert format_graph(Graph.complete(3)) == "3 3\n0 1\n0 2\n1 2\n"


def test_round_trip_sampled(tmp_path):
    g = gnp_sample(50, 0.3, 99)
    path = tmp_path / "g.txt"
    write_graph(g, path)
    assert read_graph(path).adjacency == g.adjacency


@settings(max_examples=50, deadline=None)
@given(graphs(max_n=20))
def test_round_trip_property(g):
    assert parse_graph(format_graph(g)) == g


@pytest.mark.parametrize(
    "text,needle",
    [
        ("", ":1:"),
        ("3\n", ":1:"),
        ("x y\n", ":1:"),
        ("3 1\n0 a\n", ":2:"),
        ("3 2\n0 1\n", "announces 2"),
    ],
)
def test_parse_errors_carry_line_numbers(text, needle):
    with pytest.raises(GraphFormatError, match=needle):
        parse_graph(text, "g.txt")


@pytest.mark.parametrize(
    "text,needle",
    [("3 1\n0 3\n", ":2:.*out of range"), ("3 1\n1 1\n", ":2:.*loop"), ("3 2\n0 1\n1 0\n", ":3:.*duplicate")],
)
def test_parse_validation_errors(text, needle):
    with pytest.raises(GraphValidationError, match=needle):
        parse_graph(text, "g.txt")
