import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import edge_scan_cut, random_edges
from sparsecut.graph import (
    InstanceParseError,
    WeightedGraph,
    complement,
    cut_weight,
    format_instance,
    generate_instance,
    load_instance,
    save_instance,
)


def write(tmp_path, text, name="g.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_absolute_value(tmp_path):
    g = load_instance(write(tmp_path, "2 1\n1 2 -5.0\n"))
    assert g.node_count == 2
    assert g.edges == [(0, 1, 5.0)]


def test_load_triangle(tmp_path):
    g = load_instance(write(tmp_path, "3 3\n1 2 1\n2 3 1\n1 3 1"))
    assert g.node_count == 3
    assert sorted(g.edges) == [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]


def test_load_comments_zero_loops_duplicates(tmp_path, caplog):
    text = "# a comment\n4 5\n1 2 2\n2 1 -3\n3 3 7\n1 3 0\n3 4 0.5\n"
    g = load_instance(write(tmp_path, text))
    assert g.edges == [(0, 1, 5.0), (2, 3, 0.5)]
    assert "self-loop" in caplog.text


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("3 2\n1 2 1\n2 x 1\n", 3),
        ("3 1\n1 4 1\n", 2),
        ("3 1\n0 2 1\n", 2),
        ("3 2\n1 2 1\n", 2),
        ("3 1\n1 2 1\n2 3 1\n", 3),
        ("3\n1 2 1\n", 1),
        ("3 1\n1 2\n", 2),
    ],
)
def test_load_errors_name_line(tmp_path, text, lineno):
    with pytest.raises(InstanceParseError) as err:
        load_instance(write(tmp_path, text))
    assert err.value.lineno == lineno
    assert f":{lineno}:" in str(err.value)


def test_save_load_round_trip(tmp_path):
    g = generate_instance("weighted-style", 25, 0.4, 50, seed=3)
    g = WeightedGraph(g.node_count, g.u, g.v, g.w / 7.0)  # non-terminating decimals
    p = tmp_path / "rt.txt"
    save_instance(g, p, comment="round trip")
    assert load_instance(p) == g
    assert format_instance(load_instance(p)) == format_instance(g)


def test_cut_weight_triangle(triangle):
    assert cut_weight(triangle, [1, 0, 0]) == 2.0
    assert cut_weight(triangle, [0, 0, 0]) == 0.0
    assert cut_weight(triangle, [1, 1, 1]) == 0.0


def test_cut_weight_length_mismatch(triangle):
    with pytest.raises(ValueError):
        cut_weight(triangle, [1, 0])
    with pytest.raises(ValueError):
        cut_weight(triangle, [1, 0, 2])


def test_cut_weight_matches_edge_scan(rng):
    for _ in range(20):
        edges = random_edges(rng, 12, 0.5, weighted=True)
        g = WeightedGraph.from_edges(12, edges)
        bits = rng.integers(0, 2, 12)
        assert cut_weight(g, bits) == pytest.approx(edge_scan_cut(12, edges, bits), abs=1e-12)


@st.composite
def graph_and_bits(draw, max_n=15):
    n = draw(st.integers(2, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    weights = draw(st.lists(st.floats(0.01, 1e3), min_size=len(chosen), max_size=len(chosen)))
    bits = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return WeightedGraph.from_edges(n, [(u, v, w) for (u, v), w in zip(chosen, weights)]), bits


@given(graph_and_bits())
@settings(max_examples=200, deadline=None)
def test_cut_symmetry_and_bounds(data):
    g, bits = data
    c = cut_weight(g, bits)
    assert c == cut_weight(g, complement(bits))
    assert 0.0 <= c <= g.total_weight() + 1e-9


def test_graph_is_immutable(triangle):
    with pytest.raises(ValueError):
        triangle.w[0] = 3.0


def test_constructor_rejects_bad_edges():
    with pytest.raises(ValueError):
        WeightedGraph(3, np.array([1]), np.array([0]), np.array([1.0]))
    with pytest.raises(ValueError):
        WeightedGraph(3, np.array([0, 0]), np.array([1, 1]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        WeightedGraph(3, np.array([0]), np.array([1]), np.array([0.0]))


def test_generate_g05_edge_count():
    g = generate_instance("g05-style", 100, 0.5, seed=7)
    pairs = 100 * 99 // 2
    sd = (pairs * 0.25) ** 0.5
    assert abs(g.edge_count - 2475) <= 3 * sd
    assert np.all(g.w == 1.0)


def test_generate_two_nodes_full_density():
    g = generate_instance("g05-style", 2, 1.0, seed=0)
    assert g.edges == [(0, 1, 1.0)]


def test_generate_deterministic():
    a = generate_instance("weighted-style", 20, 0.5, 100, seed=99)
    b = generate_instance("weighted-style", 20, 0.5, 100, seed=99)
    assert a.edges == b.edges
    assert set(a.w) <= set(float(k) for k in range(1, 101))


@pytest.mark.parametrize("args", [("g05-style", 1, 0.5), ("g05-style", 5, 0.0), ("bogus", 5, 0.5)])
def test_generate_preconditions(args):
    with pytest.raises(ValueError):
        generate_instance(*args)


CORPUS = os.environ.get("SPARSECUT_CORPUS")


@pytest.mark.skipif(not CORPUS, reason="set SPARSECUT_CORPUS to a directory with the public instances")
@pytest.mark.parametrize("name, n, m", [("be120.3.1", 121, 2242), ("be250.1", 251, 3269)])
def test_named_instance_sizes(name, n, m):
    g = load_instance(Path(CORPUS) / name)
    assert (g.node_count, g.edge_count) == (n, m)
