"""Hypothesis strategies for small Fourier-NC instances"""
from collections import Counter

from hypothesis import strategies as st

from fourier_nc.services.instance_service import InstanceService


@st.composite
def connected_edges(draw, n):
    """Path 0-1-...-(n-1) plus a random subset of the remaining pairs, i < j"""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if j != i + 1]
    extra = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return sorted({(i, i + 1) for i in range(n - 1)} | set(extra))


@st.composite
def cyclic_instances(draw, max_n=4, max_C=5, values=st.integers(min_value=-3, max_value=3)):
    n = draw(st.integers(min_value=2, max_value=max_n))
    C = draw(st.integers(min_value=2, max_value=max_C))
    edges = draw(connected_edges(n))
    costs = [
        InstanceService.make_cost("table", C, values=draw(st.lists(values, min_size=C, max_size=C)))
        for _ in edges
    ]
    return InstanceService.make_instance(InstanceService.make_graph(n, edges), "cyclic", C, costs)


@st.composite
def partition_strategy(draw, max_n=8):
    n = draw(st.integers(min_value=1, max_value=max_n))
    k = draw(st.integers(min_value=1, max_value=n))

    # Assign each element to a random bin
    bins = draw(st.lists(st.integers(min_value=0, max_value=k - 1), min_size=n, max_size=n))
    return tuple(sorted(Counter(bins).values(), reverse=True))
