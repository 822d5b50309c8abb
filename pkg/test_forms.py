"""Tests for instance validation, form evaluation, the pencil, tau and realification.

Usage:
    pytest test_forms.py -v
"""

import math

import numpy as np
import pytest

from conftest import E1, E2, I2
from errors import BothZero, DimensionMismatch, NonPositiveS, NotHermitian, NotPsd, ZeroForm
from forms import (
    Instance,
    complexify_vector,
    evaluate,
    hermitian_evaluate,
    pencil,
    positive_direction,
    realify,
    realify_matrix,
    realify_vector,
    tau,
    validate_hermitian,
    validate_instance,
)


def _random_psd(rng: np.random.Generator, n: int, rank: int) -> np.ndarray:
    r = rng.uniform(-1.0, 1.0, size=(n, rank))
    return r @ r.T


def _random_hermitian_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    r = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return r @ r.conj().T


class TestValidateInstance:
    """Tests for validate_instance()."""

    def test_canonical(self, canonical: Instance) -> None:
        assert canonical.dim == 2
        assert canonical.scale == pytest.approx(math.sqrt(2.0) + 2.0)

    def test_zero_a(self) -> None:
        with pytest.raises(ZeroForm) as info:
            validate_instance(I2, np.zeros((2, 2)), E2)
        assert info.value.which == "A"

    def test_zero_b(self) -> None:
        with pytest.raises(ZeroForm) as info:
            validate_instance(I2, E1, np.zeros((2, 2)))
        assert info.value.which == "B"

    def test_not_psd(self) -> None:
        with pytest.raises(NotPsd) as info:
            validate_instance(I2, E1, [[1.0, 2.0], [2.0, 1.0]])
        assert info.value.which == "B"
        assert info.value.lambda_min == pytest.approx(-1.0)

    def test_dimension_mismatch(self) -> None:
        with pytest.raises(DimensionMismatch):
            validate_instance(np.eye(3), E1, E2)

    def test_t_not_gated(self) -> None:
        inst = validate_instance(-I2, E1, E2)
        assert inst.T.entries[0, 0] == -1.0

    def test_rounding_negativity_clamped(self) -> None:
        a = np.diag([1.0, -1e-12])
        inst = validate_instance(I2, a, E2)
        assert inst.A.entries[1, 1] == -1e-12
        assert inst.a_psd.entries[1, 1] == pytest.approx(0.0, abs=1e-15)
        assert inst.a_psd.entries[0, 0] == pytest.approx(1.0 + 1e-12)

    def test_swapped(self, canonical: Instance) -> None:
        swapped = canonical.swapped()
        np.testing.assert_array_equal(swapped.A.entries, E2)
        np.testing.assert_array_equal(swapped.B.entries, E1)

    def test_scaled(self, canonical: Instance) -> None:
        scaled = canonical.scaled(3.0)
        np.testing.assert_array_equal(scaled.T.entries, 3.0 * I2)
        assert scaled.scale == pytest.approx(3.0 * canonical.scale)


class TestEvaluate:
    """Tests for evaluate()."""

    @pytest.mark.parametrize(
        "m, x, expected",
        [
            (np.diag([2.0, 2.0]), [1.0, 0.0], 2.0),
            ([[1.0, 1.0], [1.0, 1.0]], [1.0, -1.0], 0.0),
            ([[1.0, 2.0], [2.0, 5.0]], [1.0, 1.0], 10.0),
        ],
    )
    def test_values(self, m, x, expected: float) -> None:
        assert evaluate(m, x) == expected

    def test_length_mismatch(self) -> None:
        with pytest.raises(DimensionMismatch):
            evaluate(I2, [1.0, 0.0, 0.0])


class TestPencil:
    """Tests for pencil()."""

    def test_at_one_is_zero(self, canonical: Instance) -> None:
        np.testing.assert_array_equal(pencil(canonical, 1.0).entries, np.zeros((2, 2)))

    def test_at_two(self, canonical: Instance) -> None:
        np.testing.assert_array_equal(pencil(canonical, 2.0).entries, np.diag([-1.0, 0.5]))

    @pytest.mark.parametrize("s", [0.0, -1.0, math.inf, math.nan])
    def test_bad_parameter(self, canonical: Instance, s: float) -> None:
        with pytest.raises(NonPositiveS):
            pencil(canonical, s)

    def test_linearity_identity(self) -> None:
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(2, 7))
            t = rng.uniform(-1.0, 1.0, size=(n, n))
            inst = validate_instance(t + t.T, _random_psd(rng, n, n), _random_psd(rng, n, 1))
            s = 10.0 ** rng.uniform(-3.0, 3.0)
            x = rng.standard_normal(n)
            direct = evaluate(inst.T, x) - s * evaluate(inst.A, x) - evaluate(inst.B, x) / s
            value = evaluate(pencil(inst, s), x)
            size = abs(evaluate(inst.T, x)) + s * evaluate(inst.A, x) + evaluate(inst.B, x) / s
            assert value == pytest.approx(direct, abs=1e-12 * (1.0 + size))


class TestTau:
    """Tests for tau()."""

    def test_diagonal(self, canonical: Instance) -> None:
        assert tau(canonical, [1.0, 1.0]) == pytest.approx(1.0)

    def test_zero(self, canonical: Instance) -> None:
        assert tau(canonical, [1.0, 0.0]) == 0.0

    def test_infinite(self, canonical: Instance) -> None:
        assert tau(canonical, [0.0, 1.0]) == math.inf

    def test_identical_forms(self, equal_forms: Instance) -> None:
        assert tau(equal_forms, [0.3, -2.0]) == pytest.approx(1.0)

    def test_both_zero(self) -> None:
        inst = validate_instance(np.eye(3), np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 0.0]))
        with pytest.raises(BothZero):
            tau(inst, [0.0, 0.0, 1.0])

    def test_scale_invariant(self) -> None:
        rng = np.random.default_rng(4)
        inst = validate_instance(np.eye(4), _random_psd(rng, 4, 4), _random_psd(rng, 4, 4))
        x = rng.standard_normal(4)
        base = tau(inst, x)
        for c in (-1.0, 3.5, -0.01):
            assert tau(inst, c * x) == pytest.approx(base, rel=1e-12)


class TestPositiveDirection:
    """Tests for positive_direction()."""

    def test_canonical(self, canonical: Instance) -> None:
        x = positive_direction(canonical)
        assert evaluate(canonical.A, x) > 0.0
        assert evaluate(canonical.B, x) > 0.0
        assert np.linalg.norm(x) == pytest.approx(1.0)

    def test_rank_one_random(self) -> None:
        rng = np.random.default_rng(8)
        for _ in range(50):
            inst = validate_instance(np.eye(5), _random_psd(rng, 5, 1), _random_psd(rng, 5, 1))
            x = positive_direction(inst)
            assert evaluate(inst.a_psd, x) > 0.0
            assert evaluate(inst.b_psd, x) > 0.0


class TestRealify:
    """Tests for the complex-to-real reduction."""

    def test_form_value_preserved(self) -> None:
        m = np.array([[2.0, 1j], [-1j, 2.0]])
        h = np.array([1.0, 1j])
        assert hermitian_evaluate(m, h) == pytest.approx(2.0)
        x = realify_vector(h)
        np.testing.assert_array_equal(x, [1.0, 0.0, 0.0, 1.0])
        assert evaluate(realify_matrix(m), x) == pytest.approx(2.0)

    def test_real_matrix_block_diagonal(self) -> None:
        m = np.array([[1.0, 2.0], [2.0, 3.0]], dtype=complex)
        expected = np.zeros((4, 4))
        expected[:2, :2] = expected[2:, 2:] = m.real
        np.testing.assert_array_equal(realify_matrix(m), expected)

    def test_identity(self) -> None:
        np.testing.assert_array_equal(realify_matrix(np.eye(3, dtype=complex)), np.eye(6))

    def test_rectangular(self) -> None:
        assert realify_matrix(np.ones((3, 2), dtype=complex)).shape == (6, 4)

    def test_vector_round_trip(self) -> None:
        h = np.array([1.0 - 2.0j, 0.5j, 3.0])
        np.testing.assert_array_equal(complexify_vector(realify_vector(h)), h)

    def test_form_values_preserved(self) -> None:
        rng = np.random.default_rng(21)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            m = _random_hermitian_psd(rng, n) - _random_hermitian_psd(rng, n)
            h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            expected = hermitian_evaluate(m, h)
            value = evaluate(realify_matrix(m), realify_vector(h))
            bound = 1e-10 * (1.0 + np.linalg.norm(m) * np.linalg.norm(h) ** 2)
            assert value == pytest.approx(expected, abs=bound)

    def test_psd_equivalence(self) -> None:
        rng = np.random.default_rng(22)
        m = _random_hermitian_psd(rng, 3)
        h = validate_hermitian(m, m, m)
        inst = realify(h)
        assert inst.dim == 6
        assert np.linalg.eigvalsh(inst.A.entries).min() >= -1e-10

    def test_not_hermitian(self) -> None:
        with pytest.raises(NotHermitian):
            validate_hermitian(np.array([[1.0, 1j], [1j, 1.0]]), np.eye(2), np.eye(2))

    def test_hermitian_not_psd(self) -> None:
        with pytest.raises(NotPsd):
            validate_hermitian(np.eye(2), np.array([[0.0, 1j], [-1j, 0.0]]), np.eye(2))
