import math

import numpy as np
import pytest
from hypothesis import given

from dicke_protocols.dicke_space import (
    DickeIndex,
    SymmetricState,
    dicke_state,
    fidelity,
    inner_product,
    last_qubit_split_coeffs,
    normalize,
    random_state,
    state_from_json,
    state_to_json,
    vacuum,
    zero_state,
)
from dicke_protocols.errors import DegenerateStateError, DimensionError, DomainError

from strategies import unit_states


@pytest.mark.parametrize(
    "n, i, amps",
    [(1, 0, [1, 0]), (0, 0, [1]), (3, 2, [0, 0, 1, 0])],
)
def test_dicke_state(n, i, amps):
    s = dicke_state(n, i)
    assert s.n == n
    np.testing.assert_array_equal(s.amps, amps)
    assert s.is_normalized


def test_vacuum():
    assert vacuum() == dicke_state(0, 0)


@pytest.mark.parametrize("n, i", [(2, 3), (2, -1), (-1, 0), (2.0, 1)])
def test_invalid_index(n, i):
    with pytest.raises(DomainError):
        DickeIndex(n, i)


def test_inner_product_basis():
    assert inner_product(dicke_state(2, 1), dicke_state(2, 1)) == 1
    assert inner_product(dicke_state(2, 0), dicke_state(2, 1)) == 0


def test_inner_product_antilinear_first_argument():
    a = SymmetricState(1, [1j, 0])
    b = SymmetricState(1, [1, 0])
    assert inner_product(a, b) == -1j


def test_inner_product_dimension_mismatch():
    with pytest.raises(DimensionError):
        inner_product(dicke_state(1, 0), dicke_state(2, 0))


@given(unit_states())
def test_self_overlap(state):
    assert abs(inner_product(state, state) - 1) <= 1e-12


def test_orthonormal_basis():
    for n in range(6):
        G = np.array([[inner_product(dicke_state(n, i), dicke_state(n, j)) for j in range(n + 1)] for i in range(n + 1)])
        np.testing.assert_array_equal(G, np.eye(n + 1))


def test_split_coeffs_example():
    a, b = last_qubit_split_coeffs(3, 2)
    assert a == pytest.approx(math.sqrt(2 / 3), abs=1e-15)
    assert b == pytest.approx(math.sqrt(1 / 3), abs=1e-15)


@pytest.mark.parametrize("i, expected", [(0, (0.0, 1.0)), (2, (1.0, 0.0))])
def test_split_coeffs_edges(i, expected):
    assert last_qubit_split_coeffs(2, i) == expected


def test_split_coeffs_norm():
    for n in range(1, 12):
        for i in range(n + 1):
            a, b = last_qubit_split_coeffs(n, i)
            assert abs(a * a + b * b - 1) <= 1e-15


def test_split_coeffs_vacuum():
    with pytest.raises(DomainError):
        last_qubit_split_coeffs(0, 0)


def test_normalize_examples():
    s, norm = normalize(SymmetricState(1, [2, 0]))
    np.testing.assert_array_equal(s.amps, [1, 0])
    assert norm == 2
    s, norm = normalize(SymmetricState(1, [1, 1]))
    np.testing.assert_allclose(s.amps, [1 / math.sqrt(2)] * 2)
    assert norm == pytest.approx(math.sqrt(2))
    with pytest.raises(DegenerateStateError):
        normalize(SymmetricState(1, [0, 0]))


def test_immutable():
    s = dicke_state(2, 1)
    with pytest.raises(AttributeError):
        s.n = 3
    with pytest.raises(ValueError):
        s.amps[0] = 1


def test_wrong_length():
    with pytest.raises(DimensionError):
        SymmetricState(2, [1, 0])


def test_arithmetic_requires_same_n():
    with pytest.raises(DimensionError):
        dicke_state(1, 0) + dicke_state(2, 0)
    s = 2 * dicke_state(1, 0) - dicke_state(1, 1)
    np.testing.assert_array_equal(s.amps, [2, -1])
    assert zero_state(3).is_zero


def test_fidelity_ignores_phase_and_scale():
    s = random_state(4, np.random.default_rng(3))
    assert fidelity(s, (2j) * s) == pytest.approx(1.0, abs=1e-14)


@given(unit_states())
def test_json_round_trip_is_lossless(state):
    back = state_from_json(state_to_json(state))
    assert back == state


@pytest.mark.parametrize(
    "data, err",
    [
        ([], DomainError),
        ({"n": 1}, DomainError),
        ({"n": "1", "amplitudes": [[1, 0], [0, 0]]}, DomainError),
        ({"n": 1, "amplitudes": [[1, 0]]}, DimensionError),
        ({"n": 1, "amplitudes": [[1, 0], [0]]}, DomainError),
        ({"n": 1, "amplitudes": [[1, 0], ["a", 0]]}, DomainError),
        ({"n": 1, "amplitudes": [[1, 0], [float("nan"), 0]]}, DomainError),
    ],
)
def test_json_rejects_malformed(data, err):
    with pytest.raises(err):
        state_from_json(data)
