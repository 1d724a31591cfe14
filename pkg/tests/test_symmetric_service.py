import math
from fractions import Fraction

import pytest

from fourier_nc.exceptions import (
    DomainMismatchError, FrustrationError, GuardExceededError, InstanceValidationError,
    LinearisationError, UnsupportedGroupError,
)
from fourier_nc.models import DomainKind, FrustrationStatus
from fourier_nc.services import permutations as perm
from fourier_nc.services.character_service import CharacterService
from fourier_nc.services.instance_service import InstanceService
from fourier_nc.services.symmetric_service import SymmetricService, parse_group
from fourier_nc.services.topology_service import TopologyService


def sk_instance(n, edges, k, costs):
    graph = InstanceService.make_graph(n, edges)
    return InstanceService.make_instance(graph, "symmetric", k, costs)


def triangle(f):
    return sk_instance(3, [(0, 1), (0, 2), (1, 2)], f.k, [f] * 3)


def cost_of(instance, assignment):
    return InstanceService.eval_cost(instance, assignment)


# ============================================
# Cost library
# ============================================

def test_hamming_cost_values_and_spectrum():
    f = SymmetricService.hamming_cost(3)
    values = CharacterService.class_values(f)
    assert values[(1, 1, 1)] == 0
    assert values[(3,)] == 3
    assert f.sparsity == 2
    for sigma in perm.all_permutations(4):
        assert CharacterService.evaluate(SymmetricService.hamming_cost(4), perm.cycle_type(sigma)) == pytest.approx(
            4 - perm.fixed_points(sigma)
        )


def test_kendall_class_average():
    values = CharacterService.class_values(SymmetricService.kendall_class_average(3))
    assert values[(1, 1, 1)] == 0
    assert values[(2, 1)] == pytest.approx(5 / 3)
    assert values[(3,)] == pytest.approx(2)


def test_kendall_guard():
    with pytest.raises(GuardExceededError):
        SymmetricService.kendall_class_average(11)


def test_composite_cost_is_weighted_sum():
    hamming = SymmetricService.hamming_cost(4)
    kendall = SymmetricService.kendall_class_average(4)
    composite = CharacterService.class_values(SymmetricService.composite_cost(4, [(hamming, 2.0), (kendall, -1.0)]))
    h, t = CharacterService.class_values(hamming), CharacterService.class_values(kendall)
    for mu, value in composite.items():
        assert value == pytest.approx(2 * h[mu] - t[mu])


def test_composite_rejects_mixed_groups():
    with pytest.raises(DomainMismatchError):
        SymmetricService.composite_cost(4, [(SymmetricService.hamming_cost(3), 1.0)])


# ============================================
# Irrep-label sampling
# ============================================

def test_hamming_distribution_is_single_label():
    distribution = SymmetricService.sk_measurement_distribution(SymmetricService.hamming_cost(4))
    assert distribution.labels == ((3, 1),)
    assert distribution.probabilities == pytest.approx((1.0,))
    assert distribution.trivial_mass == pytest.approx(0.5)


def test_distribution_weights_by_squared_dimension():
    f = CharacterService.from_coefficients(4, {(3, 1): 1.0, (2, 2): 1.0})
    distribution = SymmetricService.sk_measurement_distribution(f)
    assert distribution.labels == ((3, 1), (2, 2))
    assert distribution.probabilities == pytest.approx((9 / 13, 4 / 13))
    assert distribution.trivial_mass == 0.0


def test_zero_function_has_no_distribution():
    zero = CharacterService.from_values(3, {(3,): 0.0, (2, 1): 0.0, (1, 1, 1): 0.0})
    with pytest.raises(LinearisationError):
        SymmetricService.sk_measurement_distribution(zero)


def test_recover_support_of_hamming():
    f = SymmetricService.hamming_cost(5)
    recovered = SymmetricService.sk_recover_support(f, seed=3)
    assert recovered.keys() == {(5,), (4, 1)}
    assert recovered[(5,)] == pytest.approx(4.0)
    assert recovered[(4, 1)] == pytest.approx(-1.0)


def test_recover_support_matches_class_dft():
    f = CharacterService.from_coefficients(5, {(5,): 1.0, (4, 1): 0.5, (3, 2): -0.7, (2, 2, 1): 0.3})
    recovered = SymmetricService.sk_recover_support(f, seed=8)
    expected = CharacterService.class_dft(f).coefficient_map()
    assert recovered.keys() == expected.keys()
    for lam, c in expected.items():
        assert recovered[lam] == pytest.approx(c, abs=1e-9)


# ============================================
# Solvers
# ============================================

def test_minimizing_classes():
    assert SymmetricService.minimizing_classes(SymmetricService.hamming_cost(4)) == [(1, 1, 1, 1)]
    tie = CharacterService.from_values(3, {(3,): 0.0, (2, 1): 0.0, (1, 1, 1): 1.0})
    assert SymmetricService.minimizing_classes(tie) == [(2, 1), (3,)]


def test_class_members_and_representatives():
    assert perm.class_representative((2, 1)) == (0, 2, 1)
    assert perm.class_representative((3, 2)) == (1, 0, 3, 4, 2)
    assert len(perm.class_members((2, 1))) == 3
    assert perm.class_members((3,)) == [(1, 2, 0), (2, 0, 1)]
    sizes = CharacterService.class_sizes(5)
    for mu in CharacterService.partitions(5):
        members = perm.class_members(mu)
        assert len(members) == sizes[mu]
        assert members[0] == perm.class_representative(mu)
        assert all(perm.cycle_type(sigma) == mu for sigma in members)


def test_dmpc_on_hamming_pair(hamming_pair):
    assignment = SymmetricService.dmpc_solve(hamming_pair)
    assert assignment.elements == (perm.identity(3), perm.identity(3))
    assert cost_of(hamming_pair, assignment) == 0


def test_dmpc_matches_brute_force_on_path():
    graph = TopologyService.path(3)
    costs = [SymmetricService.kendall_class_average(4), SymmetricService.hamming_cost(4)]
    instance = InstanceService.make_instance(graph, "symmetric", 4, costs)
    dmpc = SymmetricService.dmpc_solve(instance)
    brute = SymmetricService.sk_brute_force_solve(instance)
    assert dmpc.elements[0] == perm.identity(4)
    assert cost_of(instance, dmpc) == pytest.approx(cost_of(instance, brute))


def test_transposition_triangle_is_frustrated():
    f = CharacterService.from_values(3, {(3,): 1.0, (2, 1): 0.0, (1, 1, 1): 1.0})
    instance = triangle(f)
    report = SymmetricService.sk_detect_frustration(instance)
    assert report.status == FrustrationStatus.FRUSTRATED
    assert report.cycle_rank == 1
    with pytest.raises(FrustrationError):
        SymmetricService.dmpc_solve(instance)
    assert cost_of(instance, SymmetricService.sk_brute_force_solve(instance)) == pytest.approx(1.0)


def test_three_cycle_triangle_is_frustration_free():
    f = CharacterService.from_values(3, {(3,): 0.0, (2, 1): 1.0, (1, 1, 1): 1.0})
    instance = triangle(f)
    report = SymmetricService.sk_detect_frustration(instance)
    assert report.status == FrustrationStatus.FREE
    assert report.cycles[0].holonomy == perm.identity(3)
    assignment = SymmetricService.dmpc_solve(instance)
    assert cost_of(instance, assignment) == 0


def test_explicit_relatives_are_checked_as_given():
    f = CharacterService.from_values(3, {(3,): 0.0, (2, 1): 1.0, (1, 1, 1): 1.0})
    instance = triangle(f)
    c = (1, 2, 0)
    assert SymmetricService.sk_detect_frustration(instance, relatives=[c, c, c]).status == FrustrationStatus.FRUSTRATED
    assert SymmetricService.sk_detect_frustration(
        instance, relatives=[c, perm.compose(c, c), c]
    ).status == FrustrationStatus.FREE


def test_dmpc_hint_validation(hamming_pair):
    assert SymmetricService.dmpc_solve(hamming_pair, minimizer_hint=[(1, 1, 1)]).elements[1] == perm.identity(3)
    with pytest.raises(InstanceValidationError):
        SymmetricService.dmpc_solve(hamming_pair, minimizer_hint=[(1, 1, 1), (3,)])
    with pytest.raises(InstanceValidationError) as excinfo:
        SymmetricService.dmpc_solve(hamming_pair, minimizer_hint=[(2, 2)])
    assert excinfo.value.path == "hint[0]"


def test_dmpc_rejects_cyclic_instance(maxcut_triangle):
    with pytest.raises(DomainMismatchError):
        SymmetricService.dmpc_solve(maxcut_triangle)


# ============================================
# Query complexity
# ============================================

def test_query_table_values():
    rows = {row.k: row for row in SymmetricService.query_table(range(2, 16))}
    assert (rows[3].quantum, rows[3].classical) == (540, 60)
    assert (rows[10].quantum, rows[10].classical) == (12000, 36288000)
    assert rows[10].speedup == 3024
    assert float(rows[15].speedup) == pytest.approx(4.84e8, rel=1e-3)


def test_query_crossover():
    assert SymmetricService.crossover(SymmetricService.query_table(range(2, 16))) == 6
    assert SymmetricService.crossover(SymmetricService.query_table([2, 3, 4])) is None


# ============================================
# Extremal conjugacy classes
# ============================================

@pytest.mark.parametrize("k", [3, 4, 5])
def test_ecc_holds_for_small_k(k):
    stats = SymmetricService.ecc_experiment(k, 2, trials=200, seed=1)
    assert stats.fraction_outside == 0
    assert stats.max_distinct_parts <= 2


def test_ecc_counterexamples_appear():
    stats = SymmetricService.ecc_experiment(8, 2, trials=1000, seed=1)
    assert stats.fraction_outside > 0
    assert sum(stats.distinct_parts_histogram.values()) == 1000


def test_ecc_is_thread_independent():
    one = SymmetricService.ecc_experiment(7, 2, trials=100, seed=5, threads=1)
    four = SymmetricService.ecc_experiment(7, 2, trials=100, seed=5, threads=4)
    assert one == four


def test_ecc_guards():
    with pytest.raises(GuardExceededError):
        SymmetricService.ecc_experiment(31, 2, trials=1, seed=1)


def test_distinct_parts_coverage():
    assert SymmetricService.distinct_parts_coverage(9, 1) == Fraction(1, 10)
    assert SymmetricService.distinct_parts_coverage(6, 2) == Fraction(10, 11)
    for k in range(3, 26):
        assert SymmetricService.distinct_parts_coverage(k, math.isqrt(k - 1) + 1) >= Fraction(94, 100)


@pytest.mark.slow
def test_ecc_at_k25():
    stats = SymmetricService.ecc_experiment(25, 2, trials=5000, seed=1, threads=4)
    assert 0.37 <= stats.fraction_outside <= 0.57
    assert stats.max_distinct_parts <= 6


# ============================================
# Abelian index
# ============================================

def test_parse_group():
    assert parse_group("Z12") == (DomainKind.CYCLIC, 12)
    assert parse_group("dihedral:8") == (DomainKind.DIHEDRAL, 8)
    with pytest.raises(UnsupportedGroupError):
        parse_group("A5")


def test_abelian_index_small_groups():
    assert SymmetricService.abelian_index("Z12").alpha == 1
    assert SymmetricService.abelian_index("D8").alpha == 2
    assert SymmetricService.abelian_index("D2").alpha == 1
    assert SymmetricService.abelian_index("S3").alpha == 2


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_exact_abelian_order_matches_search(k):
    assert SymmetricService.abelian_index(f"S{k}", mode="brute").largest_abelian == \
        SymmetricService.largest_abelian_order(k)


def test_abelian_index_modes():
    formula = SymmetricService.abelian_index("S6", mode="formula")
    assert formula.asymptotic and formula.largest_abelian is None
    assert float(formula.alpha) == pytest.approx(720 / 9)
    with pytest.raises(GuardExceededError):
        SymmetricService.abelian_index("S9", mode="brute")
    with pytest.raises(UnsupportedGroupError):
        SymmetricService.abelian_index("S4", mode="guess")


@pytest.mark.parametrize("k, d_max, alpha", [(3, 2, 2), (4, 3, 6), (5, 6, 20), (6, 16, 80)])
def test_fundamental_inequality(k, d_max, alpha):
    holds, measured, index = SymmetricService.fundamental_ineq_check(k)
    assert holds
    assert measured == d_max
    assert index == alpha
