import itertools
from fractions import Fraction

import pytest

from fourier_nc.exceptions import UsageError
from fourier_nc.services.analytics_service import AnalyticsService, grover_iterations, qubits_per_node, scientific
from fourier_nc.services.instance_service import InstanceService


# ============================================
# Gate counts
# ============================================

def test_gate_counts_n10_row():
    report = AnalyticsService.gate_counts(10, 45, 2, 64)
    assert report.q == 6
    assert report.gates_per_repetition == 3600
    assert report.repetitions == 4500
    assert report.fourier_total == 16_200_000
    assert report.grover_iterations == 843_314_857
    assert scientific(report.fourier_total) == "1.6e+07"
    assert scientific(report.grover_total) == "1.4e+12"
    assert scientific(report.speedup) == "8.4e+04"


def test_gate_counts_n20_row():
    report = AnalyticsService.gate_counts(20, 190, 2, 64)
    assert report.gates_per_repetition == 14400
    assert report.repetitions == 45600
    assert scientific(report.speedup) == "9.4e+12"


def test_gate_counts_clamp_single_repetition():
    assert AnalyticsService.gate_counts(1, 1, 1, 2).repetitions == 1


def test_gate_counts_reject_bad_parameters():
    with pytest.raises(UsageError):
        AnalyticsService.gate_counts(0, 1, 1, 2)


def test_dihedral_gate_counts():
    assert AnalyticsService.dihedral_gate_counts(10, 45, 2, 64) == 13320
    assert AnalyticsService.dihedral_gate_counts(2, 1, 1, 4) == 24


def test_gate_frame_columns():
    frame = AnalyticsService.gate_frame([AnalyticsService.gate_counts(10, 45, 2, 64)])
    assert frame.loc[0, "G_QFT"] == 3600
    assert frame.loc[0, "speedup"] == "8.4e+04"


def test_qubits_and_grover_iterations():
    assert [qubits_per_node(C) for C in (2, 3, 4, 5, 64, 65)] == [1, 2, 2, 3, 6, 7]
    assert grover_iterations(2, 2) == 2
    assert grover_iterations(2, 4) == 4
    assert grover_iterations(4, 1) == 2


@pytest.mark.parametrize("value, text", [
    (84319, "8.4e+04"),
    (0, "0.0e+00"),
    (995, "1.0e+03"),
    (-84319, "-8.4e+04"),
    (Fraction(1, 8), "1.3e-01"),
    (Fraction(1, 3), "3.3e-01"),
])
def test_scientific_rounds_half_up(value, text):
    assert scientific(value) == text


# ============================================
# Hardness constructions
# ============================================

def test_maxcut_identity_exhaustive():
    for n in range(2, 6):
        pairs = list(itertools.combinations(range(n), 2))
        for size in range(1, len(pairs) + 1):
            for edges in itertools.combinations(pairs, size):
                graph = InstanceService.make_graph(n, list(edges))
                instance = AnalyticsService.maxcut_reduce(graph)
                for sides in itertools.product((0, 1), repeat=n):
                    assignment = InstanceService.assignment(instance, list(sides))
                    H = InstanceService.eval_cost(instance, assignment)
                    assert H == pytest.approx(graph.edge_count - 2 * AnalyticsService.cut_size(graph, assignment))


def test_maxcut_rejects_directed_graph():
    with pytest.raises(UsageError):
        AnalyticsService.maxcut_reduce(InstanceService.make_graph(2, [(0, 1)], directed=True))


def test_adversary_counts():
    assert AnalyticsService.adversary_query_count(3, 2) == 4
    assert AnalyticsService.adversary_query_count(1, 3) == 2
    rows = AnalyticsService.adversary_table([1, 2], 4)
    assert [(row.classical_queries, row.grover_iterations) for row in rows] == [(2, 2), (8, 4)]


# ============================================
# Validation harness
# ============================================

def test_validation_instances():
    instances = AnalyticsService.validation_instances(seed=1)
    assert [name for name, _, _ in instances] == ["4x4 grid", "8-ring", "K8", "barbell", "8-ring pwl"]
    sizes = [(instance.n, instance.m) for _, _, instance in instances]
    assert sizes == [(16, 24), (8, 8), (8, 28), (10, 21), (8, 8)]


def test_render_formats():
    frame = AnalyticsService.rows_frame(AnalyticsService.adversary_table([1], 2))
    assert AnalyticsService.render(frame, "csv") == "n,C,classical_queries,grover_iterations\n1,2,1,2\n"
    assert "classical_queries" in AnalyticsService.render(frame, "text")
    with pytest.raises(UsageError):
        AnalyticsService.render(frame, "xml")


@pytest.mark.slow
def test_validation_suite():
    rows = AnalyticsService.validation_suite(seed=1, trials=100)
    assert len(rows) == 5
    for row in rows:
        assert row.bound == pytest.approx(1 / (row.n * row.m * row.r))
        assert row.mean_measurements > 0
    summary = AnalyticsService.summary(rows)
    assert summary["min_ratio"] <= summary["max_ratio"]
