import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourier_nc.config import settings as lab_settings
from fourier_nc.exceptions import DomainMismatchError, GuardExceededError, LinearisationError
from fourier_nc.services.fourier_service import FourierService
from fourier_nc.services.instance_service import InstanceService
from fourier_nc.services.topology_service import TopologyService
from strategies import cyclic_instances


def cosine_instance(graph, C, weights):
    cost = InstanceService.make_cost("cosine", C, weights=weights)
    return InstanceService.make_instance(graph, "cyclic", C, [cost] * graph.edge_count)


def test_edge_dft_of_cosine():
    spectrum = FourierService.edge_dft(InstanceService.make_cost("cosine", 8, weights=[1.0]))
    assert spectrum.frequencies == (1, 7)
    assert spectrum.coefficient(1) == pytest.approx(0.5)
    assert spectrum.coefficient(7) == pytest.approx(0.5)


def test_edge_dft_of_constant():
    spectrum = FourierService.edge_dft(InstanceService.make_cost("table", 4, values=[3, 3, 3, 3]))
    assert spectrum.frequencies == (0,)
    assert spectrum.coefficient(0) == pytest.approx(3.0)


def test_edge_dft_matches_direct_summation():
    table = np.array([0, 0.5, 1, 0.5])
    spectrum = FourierService.edge_dft(InstanceService.make_cost("pwl", 4, breakpoints=[(0, 0), (2, 1)]))
    for k in range(4):
        direct = sum(table[x] * np.exp(-2j * np.pi * k * x / 4) for x in range(4)) / 4
        assert spectrum.coefficient(k) == pytest.approx(direct, abs=1e-12)


@given(st.integers(2, 12).flatmap(lambda C: st.lists(st.floats(-5, 5), min_size=C, max_size=C)))
@settings(max_examples=50, deadline=None)
def test_edge_spectrum_parseval_and_conjugate_symmetry(values):
    C = len(values)
    spectrum = FourierService.edge_dft(InstanceService.make_cost("table", C, values=values))
    energy = sum(entry.weight for entry in spectrum.coefficients)
    assert energy == pytest.approx(sum(v * v for v in values) / C, abs=1e-9)
    for entry in spectrum.coefficients:
        assert spectrum.coefficient((C - entry.k) % C) == pytest.approx(np.conj(entry.value), abs=1e-9)
    reconstructed = np.zeros(C, dtype=complex)
    for entry in spectrum.coefficients:
        reconstructed += entry.value * np.exp(2j * np.pi * entry.k * np.arange(C) / C)
    assert np.abs(reconstructed.real - np.array(values)).max() < 1e-9


def test_global_modes_counts():
    edge = InstanceService.make_graph(2, [(0, 1)])
    assert len(FourierService.global_modes(cosine_instance(edge, 8, [1.0]))) == 2
    assert len(FourierService.global_modes(cosine_instance(TopologyService.complete(3), 4, [1.0]))) == 6

    path = InstanceService.make_graph(3, [(0, 1), (1, 2)])
    constant = InstanceService.make_cost("table", 4, values=[2, 2, 2, 2])
    assert FourierService.global_modes(InstanceService.make_instance(path, "cyclic", 4, [constant, constant])) == []


def test_global_modes_lie_on_anti_diagonal(k4_planted):
    for mode in FourierService.global_modes(k4_planted):
        vector = mode.frequency_vector(k4_planted.n)
        assert (vector[mode.edge[0]] + vector[mode.edge[1]]) % k4_planted.order == 0
        assert sum(1 for k in vector if k) == 2


def test_brute_force_dft_two_node_example():
    cost = InstanceService.make_cost("table", 2, values=[1, -1])
    instance = InstanceService.make_instance(InstanceService.make_graph(2, [(0, 1)]), "cyclic", 2, [cost])
    dense = FourierService.brute_force_global_dft(instance)
    assert dense[1, 1] == pytest.approx(1.0)
    assert abs(dense[0, 1]) < 1e-12 and abs(dense[1, 0]) < 1e-12 and abs(dense[0, 0]) < 1e-12


def test_brute_force_dft_of_constants_is_zero_mode_only():
    graph = InstanceService.make_graph(3, [(0, 1), (0, 2), (1, 2)])
    cost = InstanceService.make_cost("table", 3, values=[1, 1, 1])
    instance = InstanceService.make_instance(graph, "cyclic", 3, [cost] * 3)
    support = FourierService.dense_support(FourierService.brute_force_global_dft(instance))
    assert list(support) == [(0, 0, 0)]
    assert support[(0, 0, 0)] == pytest.approx(3.0)


@given(cyclic_instances(max_n=4, max_C=4))
@settings(max_examples=40, deadline=None)
def test_factorisation_matches_dense_oracle(instance):
    dense = FourierService.brute_force_global_dft(instance)
    factored = FourierService.global_dft_from_modes(instance)
    support = FourierService.dense_support(dense)
    assert set(support) == {k for k, v in factored.items() if abs(v) > 1e-9}
    for k, value in factored.items():
        assert dense[k] == pytest.approx(value, abs=1e-9)


def test_dense_oracle_guard():
    graph = TopologyService.path(5)
    instance = cosine_instance(graph, 64, [1.0])
    with pytest.raises(GuardExceededError):
        FourierService.brute_force_global_dft(instance)


def test_p_min_examples():
    edge = InstanceService.make_graph(2, [(0, 1)])
    assert FourierService.p_min(cosine_instance(edge, 8, [1.0])) == pytest.approx(0.5)
    assert FourierService.p_min(cosine_instance(edge, 8, [1.0, 0.5])) == pytest.approx(0.1)


def test_p_min_grows_when_weak_harmonic_is_pruned(monkeypatch):
    edge = InstanceService.make_graph(2, [(0, 1)])
    instance = cosine_instance(edge, 8, [1.0, 0.05])
    assert FourierService.edge_dft(instance.costs[0]).sparsity == 4
    full = FourierService.p_min(instance)

    monkeypatch.setattr(lab_settings, "prune_tolerance", 0.1)
    assert FourierService.edge_dft(instance.costs[0]).frequencies == (1, 7)
    pruned = FourierService.p_min(instance)
    assert pruned == pytest.approx(0.5)
    assert pruned >= full


def test_p_min_does_not_drop_when_weakest_edge_is_removed():
    triangle = InstanceService.make_graph(3, [(0, 1), (0, 2), (1, 2)])
    costs = [InstanceService.make_cost("cosine", 8, weights=[w]) for w in (1.0, 0.6, 1.2)]
    full = FourierService.p_min(InstanceService.make_instance(triangle, "cyclic", 8, costs))

    path = InstanceService.make_graph(3, [(0, 1), (1, 2)])
    reduced = FourierService.p_min(InstanceService.make_instance(path, "cyclic", 8, [costs[0], costs[2]]))
    assert full == pytest.approx(0.36 / 5.6)
    assert reduced >= full


def test_grid_p_min_clears_polynomial_threshold():
    grid = TopologyService.grid(4, 4)
    costs = [
        InstanceService.make_cost("cosine", 32, weights=[0.8 if index % 2 else 1.2])
        for index in range(grid.edge_count)
    ]
    instance = InstanceService.make_instance(grid, "cyclic", 32, costs)
    threshold = FourierService.polynomial_threshold(instance)
    assert threshold == pytest.approx(1 / (16 * 24 * 2))
    assert FourierService.p_min(instance) >= 5 * threshold


def test_p_min_rejects_constant_instance():
    constant = InstanceService.make_cost("table", 4, values=[1, 1, 1, 1])
    instance = InstanceService.make_instance(InstanceService.make_graph(2, [(0, 1)]), "cyclic", 4, [constant])
    with pytest.raises(LinearisationError):
        FourierService.p_min(instance)


def test_pmin_bound_cosine_formula():
    ring = cosine_instance(TopologyService.ring(8), 16, [1.0])
    assert FourierService.pmin_bound_cosine(ring) == pytest.approx(0.0625)

    k8 = cosine_instance(TopologyService.complete(8), 16, [2.0, 1.0])
    assert FourierService.pmin_bound_cosine(k8) == pytest.approx(1 / (7 * 28 * 2 * 4))


def test_pmin_bound_pwl_formula():
    ring = TopologyService.with_costs(TopologyService.ring(8), 32, TopologyService.skewed_pwl_costs(harmonics=4), seed=1)
    assert FourierService.pmin_bound_pwl(ring) == pytest.approx(1 / (2 * 8 * 4 * 256))

    single = TopologyService.with_costs(TopologyService.ring(8), 32, TopologyService.skewed_pwl_costs(harmonics=1), seed=1)
    assert FourierService.pmin_bound_pwl(single) == pytest.approx(FourierService.pmin_bound_cosine(
        cosine_instance(TopologyService.ring(8), 32, [1.0])
    ))


def test_bounds_reject_other_families(k4_planted):
    with pytest.raises(DomainMismatchError):
        FourierService.pmin_bound_cosine(k4_planted)
    with pytest.raises(DomainMismatchError):
        FourierService.pmin_bound_pwl(k4_planted)


@pytest.mark.parametrize("seed", range(100))
def test_cosine_bound_below_measured_p_min(seed):
    rng = np.random.default_rng(seed)
    graph = TopologyService.random_connected(int(rng.integers(3, 7)), rng)
    instance = TopologyService.with_costs(graph, 16, TopologyService.cosine_costs(harmonics=2), seed)
    assert FourierService.pmin_bound_cosine(instance) <= FourierService.p_min(instance)


@pytest.mark.parametrize("seed", range(100))
def test_pwl_bound_below_measured_p_min(seed):
    rng = np.random.default_rng(seed)
    graph = TopologyService.random_connected(int(rng.integers(3, 7)), rng)
    instance = TopologyService.with_costs(graph, 32, TopologyService.skewed_pwl_costs(), seed)
    assert FourierService.pmin_bound_pwl(instance) <= FourierService.p_min(instance)


def test_linearisation_params():
    edge = InstanceService.make_graph(2, [(0, 1)])
    params = FourierService.linearisation_params(cosine_instance(edge, 8, [1.0]))
    assert params.P == 8 and params.K == pytest.approx(8)

    triangle = cosine_instance(TopologyService.complete(3), 8, [1.0])
    assert FourierService.linearisation_params(triangle).P == 108


def test_linearised_phases_stay_small(k4_planted, rng):
    params = FourierService.linearisation_params(k4_planted)
    for _ in range(50):
        offsets = rng.integers(k4_planted.order, size=k4_planted.n).tolist()
        H = InstanceService.eval_cost(k4_planted, InstanceService.assignment(k4_planted, offsets))
        assert abs(H) / params.K <= 1 / params.P + 1e-12


def test_export_spectra(single_cosine_edge):
    document = json.loads(FourierService.export_spectra(single_cosine_edge))
    assert document[0]["edge"] == [0, 1]
    assert [mode["k"] for mode in document[0]["modes"]] == [1, 7]
