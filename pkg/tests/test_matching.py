import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from oracles import brute_force_transport

from opdist import _backend
from opdist.matching import (
    cost_matrix,
    flow_to_mapping,
    solve_transport,
    transport,
    transport_objective,
)
from opdist.semantics import ConceptEmbeddingProvider, PrecomputedEmbeddings
from opdist.spotter import OpinionSubject

KERNELS = [_backend.python_min_cost_transport]
if _backend.compiled_min_cost_transport is not None:
    KERNELS.append(_backend.compiled_min_cost_transport)

costs = st.tuples(st.integers(1, 4), st.integers(1, 4)).flatmap(
    lambda s: arrays(np.float64, s, elements=st.floats(0, 1, allow_nan=False))
)


@pytest.mark.parametrize("kernel", KERNELS)
@settings(max_examples=150, deadline=None)
@given(cost=costs)
def test_matches_vertex_enumeration(kernel, cost):
    flow = solve_transport(cost, kernel=kernel)
    n1, n2 = cost.shape
    np.testing.assert_allclose(flow.sum(axis=1), 1 / n1)
    np.testing.assert_allclose(flow.sum(axis=0), 1 / n2)
    assert transport_objective(flow, cost) == pytest.approx(brute_force_transport(cost), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(cost=costs)
def test_transpose_has_same_objective(cost):
    a = transport_objective(solve_transport(cost), cost)
    b = transport_objective(solve_transport(cost.T), cost.T)
    assert a == pytest.approx(b, abs=1e-12)


@pytest.mark.skipif(len(KERNELS) < 2, reason="compiled kernel not built")
def test_backends_agree_exactly():
    rng = np.random.default_rng(5)
    for _ in range(200):
        cost = np.round(rng.random(tuple(rng.integers(1, 7, size=2))), 2)
        np.testing.assert_array_equal(solve_transport(cost, KERNELS[0]), solve_transport(cost, KERNELS[1]))


def test_ties_go_to_lowest_index():
    flow = solve_transport(np.zeros((2, 2)))
    assert flow[0, 0] == 0.5 and flow[1, 1] == 0.5


def test_weighted_masses():
    flow = transport(np.array([[0.0, 1.0], [1.0, 0.0]]), [3, 1], [1, 1])
    np.testing.assert_allclose(flow, [[0.5, 0.25], [0.0, 0.25]])
    with pytest.raises(ValueError):
        transport(np.zeros((1, 1)), [0], [1])
    with pytest.raises(ValueError):
        transport(np.zeros((1, 2)), [1], [1])


def test_mapping_respects_tau_and_eps():
    cost = np.array([[0.1, 0.5], [0.31, 0.3]])
    flow = np.array([[0.5, 0.0], [1e-12, 0.5]])
    assert flow_to_mapping(flow, cost, 0.3).index_pairs() == {(0, 0), (1, 1)}
    assert flow_to_mapping(flow, cost, 0.2).index_pairs() == {(0, 0)}
    with pytest.raises(ValueError):
        flow_to_mapping(flow, cost, 1.5)


@settings(max_examples=100, deadline=None)
@given(cost=costs, t1=st.floats(0, 1), t2=st.floats(0, 1))
def test_mapping_grows_with_tau(cost, t1, t2):
    lo, hi = sorted((t1, t2))
    flow = solve_transport(cost)
    assert flow_to_mapping(flow, cost, lo).index_pairs() <= flow_to_mapping(flow, cost, hi).index_pairs()


def test_cost_matrix():
    emb = PrecomputedEmbeddings({"A": np.array([1.0, 0.0]), "B": np.array([1.0, 1.0])})
    subs1 = [OpinionSubject("A", ()), OpinionSubject("Z", ())]
    subs2 = [OpinionSubject("B", ()), OpinionSubject("Z", ())]
    c = cost_matrix(subs1, subs2, ConceptEmbeddingProvider(emb))
    np.testing.assert_allclose(c, [[1 - 1 / np.sqrt(2), 1.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        cost_matrix([], subs2)
