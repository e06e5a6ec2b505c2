import networkx as nx
import pytest
from hypothesis import strategies as st

from finehyp.graph import build_graph


@st.composite
def connected_graphs(draw, max_n=9, extra=6):
    """Random connected graph: a random tree plus a few chords."""
    n = draw(st.integers(1, max_n))
    edges = set()
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges.add((u, v))
    if n >= 3:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        for p in draw(st.lists(st.sampled_from(pairs), max_size=extra)):
            edges.add(p)
    return build_graph(sorted(edges), vertices=range(n))


@st.composite
def trees(draw, max_n=14):
    n = draw(st.integers(1, max_n))
    edges = [(draw(st.integers(0, v - 1)), v) for v in range(1, n)]
    return build_graph(edges, vertices=range(n))


def adj_of(g):
    return {v: set(g.neighbors(v)) for v in range(g.n)}


@pytest.fixture
def c6():
    return build_graph([(i, (i + 1) % 6) for i in range(6)])


def petersen():
    return build_graph(sorted(nx.petersen_graph().edges()))
