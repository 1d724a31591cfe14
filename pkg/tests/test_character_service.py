from io import StringIO
from math import factorial

import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st

from fourier_nc.exceptions import DomainMismatchError, GuardExceededError, InstanceValidationError
from fourier_nc.models import ClassFunction, ClassValue, IrrepCoefficient
from fourier_nc.services import permutations as perm
from fourier_nc.services.character_service import CharacterService
from strategies import partition_strategy


@pytest.mark.parametrize("k, count", [(1, 1), (4, 5), (5, 7), (10, 42)])
def test_partition_counts(k, count):
    assert len(CharacterService.partitions(k)) == count


def test_partitions_in_descending_order():
    assert CharacterService.partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_partition_guard():
    with pytest.raises(GuardExceededError):
        CharacterService.partitions(41)
    with pytest.raises(InstanceValidationError):
        CharacterService.partitions(0)


def test_hook_dimensions_of_s4():
    dims = [CharacterService.hook_dimension(lam) for lam in CharacterService.partitions(4)]
    assert dims == [1, 3, 2, 3, 1]


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_dimensions_square_sum_to_group_order(k):
    assert sum(CharacterService.hook_dimension(lam) ** 2 for lam in CharacterService.partitions(k)) == factorial(k)


def test_conjugate_and_hook_lengths():
    assert CharacterService.conjugate((3, 1)) == (2, 1, 1)
    assert CharacterService.hook_lengths((3, 1)) == [[4, 2, 1], [1]]


@given(partition_strategy())
@settings(max_examples=40, deadline=None)
def test_trivial_and_sign_characters(mu):
    k = sum(mu)
    assert CharacterService.character((k,), mu) == 1
    assert CharacterService.character((1,) * k, mu) == (-1) ** (k - len(mu))


def test_standard_character_counts_fixed_points():
    assert CharacterService.character((3, 1), (2, 1, 1)) == 1
    for sigma in perm.all_permutations(4):
        assert CharacterService.character((3, 1), perm.cycle_type(sigma)) == perm.fixed_points(sigma) - 1


def test_character_rejects_mismatched_sizes():
    with pytest.raises(DomainMismatchError):
        CharacterService.character((2, 1), (2, 2))


def test_class_sizes():
    sizes = CharacterService.class_sizes(3)
    assert sizes == {(3,): 2, (2, 1): 3, (1, 1, 1): 1}
    assert sum(CharacterService.class_sizes(5).values()) == 120


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_row_orthogonality(k):
    table = CharacterService.character_table(k)
    for a, row_a in enumerate(table.values):
        for b, row_b in enumerate(table.values):
            inner = sum(size * x * y for size, x, y in zip(table.class_sizes, row_a, row_b))
            assert inner == (factorial(k) if a == b else 0)


def test_character_table_dimensions():
    assert CharacterService.character_table(4).dimensions == (1, 3, 2, 3, 1)


def test_character_table_csv():
    assert CharacterService.character_table_csv(3) == (
        "irrep,(3),(2 1),(1 1 1)\n"
        "(3),1,1,1\n"
        "(2 1),-1,0,2\n"
        "(1 1 1),1,-1,1\n"
    )


def test_character_table_csv_reads_back_as_integers():
    frame = pd.read_csv(StringIO(CharacterService.character_table_csv(5)), index_col="irrep")
    assert frame.shape == (7, 7)
    assert frame["(1 1 1 1 1)"].tolist() == [1, 4, 5, 6, 5, 4, 1]
    assert all(dtype.kind == "i" for dtype in frame.dtypes)


def test_class_dft_round_trip():
    f = CharacterService.from_coefficients(4, {(4,): 2.0, (2, 2): -1.0})
    recovered = CharacterService.class_dft(ClassFunction(k=4, class_values=f.class_values)).coefficient_map()
    assert recovered.keys() == {(4,), (2, 2)}
    assert recovered[(4,)] == pytest.approx(2.0)
    assert recovered[(2, 2)] == pytest.approx(-1.0)


def test_class_values_from_coefficients_only():
    f = ClassFunction(k=3, coefficients=(IrrepCoefficient(irrep=(2, 1), coeff=1.0),))
    assert CharacterService.class_values(f) == {(3,): -1.0, (2, 1): 0.0, (1, 1, 1): 2.0}
    assert CharacterService.evaluate(f, (1, 1, 1)) == 2.0


def test_validate_rejects_inconsistent_forms():
    f = ClassFunction(
        k=3,
        class_values=(
            ClassValue(cycle_type=(3,), value=1.0),
            ClassValue(cycle_type=(2, 1), value=1.0),
            ClassValue(cycle_type=(1, 1, 1), value=1.0),
        ),
        coefficients=(IrrepCoefficient(irrep=(3,), coeff=2.0),),
    )
    with pytest.raises(InstanceValidationError):
        CharacterService.validate(f)
