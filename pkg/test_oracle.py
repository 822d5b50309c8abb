"""Tests for the PRNG, the instance generators and the brute-force scans.

Usage:
    pytest test_oracle.py -v
"""

import math

import numpy as np
import pytest

from certify import Certified, Refuted, certify, fval, maximize
from conftest import E1, E2, I2
from errors import GeneratorExhausted, InvalidConfig, UnsupportedDimension
from forms import Instance, evaluate, tau, validate_instance
from oracle import (
    Family,
    GeneratorSpec,
    Lcg64,
    gen_certified,
    gen_tight,
    gen_violating,
    generate,
    grid_alpha,
    random_orthogonal,
    random_projection_pair,
    random_psd,
    sphere_scan,
)

SQRT_HALF = math.sqrt(0.5)


class TestLcg64:
    """Tests for the fixed linear congruential generator."""

    def test_first_outputs(self) -> None:
        rng = Lcg64(0)
        assert rng.next_u64() == Lcg64.INCREMENT
        assert rng.next_u64() == (Lcg64.MULTIPLIER * Lcg64.INCREMENT + Lcg64.INCREMENT) % (1 << 64)

    def test_deterministic(self) -> None:
        first, second = Lcg64(12345), Lcg64(12345)
        assert [first.next_u64() for _ in range(10)] == [second.next_u64() for _ in range(10)]

    def test_uniform_range(self) -> None:
        rng = Lcg64(1)
        values = [rng.uniform() for _ in range(2000)]
        assert all(-1.0 <= v < 1.0 for v in values)
        assert abs(float(np.mean(values))) < 0.1

    def test_below(self) -> None:
        rng = Lcg64(2)
        values = {rng.below(5) for _ in range(500)}
        assert values == {0, 1, 2, 3, 4}

    def test_matrix_row_major(self) -> None:
        flat = Lcg64(9)
        expected = [flat.uniform() for _ in range(6)]
        np.testing.assert_array_equal(Lcg64(9).matrix(2, 3).ravel(), expected)


class TestRandomMatrices:
    """Tests for random_psd(), random_orthogonal() and random_projection_pair()."""

    def test_psd(self) -> None:
        m = random_psd(Lcg64(4), 5)
        np.testing.assert_array_equal(m, m.T)
        assert np.linalg.eigvalsh(m).min() >= -1e-12

    @pytest.mark.parametrize("rank", [0, 1, 3])
    def test_rank(self, rank: int) -> None:
        m = random_psd(Lcg64(5), 5, rank)
        assert np.linalg.matrix_rank(m, tol=1e-10) == rank

    def test_orthogonal(self) -> None:
        q = random_orthogonal(Lcg64(6), 6)
        np.testing.assert_allclose(q.T @ q, np.eye(6), atol=1e-12)

    def test_projection_pair(self) -> None:
        p1, p2 = random_projection_pair(Lcg64(7), 5)
        np.testing.assert_allclose(p1 @ p1, p1, atol=1e-12)
        np.testing.assert_allclose(p1 @ p2, np.zeros((5, 5)), atol=1e-12)
        assert np.trace(p1) >= 1.0 - 1e-12 and np.trace(p2) >= 1.0 - 1e-12

    def test_projection_pair_needs_two_dims(self) -> None:
        with pytest.raises(InvalidConfig):
            random_projection_pair(Lcg64(7), 1)


class TestGeneratorSpec:
    """Tests for GeneratorSpec.validate()."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dim": 1, "seed": 0},
            {"dim": 3, "seed": 0, "alpha": 0.0},
            {"dim": 3, "seed": 0, "alpha": math.nan},
            {"dim": 3, "seed": 0, "family": Family.VIOLATING, "shrink": 1.0},
            {"dim": 3, "seed": 0, "family": Family.VIOLATING, "shrink": 0.0},
        ],
    )
    def test_rejected(self, kwargs: dict) -> None:
        with pytest.raises(InvalidConfig):
            GeneratorSpec(**kwargs).validate()


class TestGenCertified:
    """Tests for gen_certified()."""

    def test_canonical_override(self) -> None:
        spec = GeneratorSpec(2, 0, a_override=E1, b_override=E2, c_override=np.zeros((2, 2)))
        np.testing.assert_array_equal(gen_certified(spec).T.entries, I2)

    def test_deterministic(self) -> None:
        first = gen_certified(GeneratorSpec(6, 99, alpha=2.0))
        second = gen_certified(GeneratorSpec(6, 99, alpha=2.0))
        for name in ("T", "A", "B"):
            np.testing.assert_array_equal(getattr(first, name).entries, getattr(second, name).entries)

    def test_alpha_swap_symmetry(self) -> None:
        high = gen_certified(GeneratorSpec(5, 42, alpha=10.0))
        low = gen_certified(GeneratorSpec(5, 42, alpha=0.1, swap_forms=True))
        np.testing.assert_array_equal(high.T.entries, low.T.entries)
        np.testing.assert_array_equal(high.A.entries, low.B.entries)

    def test_construction_alpha_is_certificate(self) -> None:
        for seed in range(20):
            inst = gen_certified(GeneratorSpec(2 + seed % 9, seed, alpha=1.7))
            assert fval(inst, 1.7) >= -1e-12 * inst.scale

    def test_always_certified(self) -> None:
        for seed in range(30):
            inst = gen_certified(GeneratorSpec(2 + seed % 11, 7000 + seed))
            assert isinstance(certify(inst), Certified)


class TestGenTight:
    """Tests for gen_tight()."""

    def test_pencil_vanishes(self) -> None:
        for seed in range(10):
            inst = gen_tight(GeneratorSpec(4, seed, Family.TIGHT, alpha=3.0))
            assert abs(fval(inst, 3.0)) <= 1e-12 * inst.scale

    def test_generate_dispatch(self) -> None:
        inst, witness = generate(GeneratorSpec(3, 1, Family.TIGHT))
        assert isinstance(inst, Instance)
        assert witness is None


class TestGenViolating:
    """Tests for gen_violating()."""

    def test_canonical_override(self) -> None:
        spec = GeneratorSpec(2, 0, Family.VIOLATING, shrink=0.5, a_override=E1, b_override=E2)
        inst, witness = gen_violating(spec)
        np.testing.assert_array_equal(inst.T.entries, 0.5 * I2)
        np.testing.assert_allclose(witness, [SQRT_HALF, SQRT_HALF], atol=1e-12)

    def test_witness_violates(self) -> None:
        for seed in range(20):
            spec = GeneratorSpec(2 + seed % 8, seed, Family.VIOLATING, alpha=0.4 + seed % 3, shrink=0.5)
            inst, x = gen_violating(spec)
            a, b = evaluate(inst.A, x), evaluate(inst.B, x)
            assert a > 0.0 and b > 0.0
            assert evaluate(inst.T, x) < 2.0 * math.sqrt(a * b)
            assert tau(inst, x) == pytest.approx(spec.alpha, rel=1e-6)

    def test_singular_a_plus_b_retried(self) -> None:
        # A + B = diag(1, 0, 1) is singular for every seed.
        a = np.diag([1.0, 0.0, 0.0])
        b = np.diag([0.0, 0.0, 1.0])
        spec = GeneratorSpec(3, 0, Family.VIOLATING, a_override=a, b_override=b)
        with pytest.raises(GeneratorExhausted):
            gen_violating(spec)

    def test_generate_dispatch(self) -> None:
        inst, witness = generate(GeneratorSpec(3, 1, Family.VIOLATING))
        assert witness.shape == (3,)
        assert isinstance(certify(inst), Refuted)

    def test_near_boundary_never_certified(self) -> None:
        for seed in range(5):
            inst, _ = gen_violating(GeneratorSpec(3, seed, Family.VIOLATING, shrink=0.999))
            assert not isinstance(certify(inst), Certified)


class TestSphereScan:
    """Tests for sphere_scan()."""

    def test_canonical(self, canonical: Instance) -> None:
        scan = sphere_scan(canonical, math.pi / 1800.0)
        assert scan.min_value == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(np.abs(scan.argmin), [SQRT_HALF, SQRT_HALF], atol=1e-6)

    def test_equal_forms(self, equal_forms: Instance) -> None:
        assert sphere_scan(equal_forms).min_value == pytest.approx(0.0, abs=1e-12)

    def test_shrunk(self, shrunk: Instance) -> None:
        scan = sphere_scan(shrunk, math.pi / 1800.0)
        assert scan.min_value == pytest.approx(-0.5, abs=1e-9)

    def test_grid_size_and_bound(self, canonical: Instance) -> None:
        scan = sphere_scan(canonical, 0.01)
        assert scan.points == 315
        assert scan.error_bound == pytest.approx(0.02 * canonical.scale)
        assert np.linalg.norm(scan.argmin) == pytest.approx(1.0, abs=1e-12)

    def test_three_dims(self) -> None:
        inst = validate_instance(0.5 * np.eye(3), np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 1.0, 0.0]))
        scan = sphere_scan(inst, 0.01)
        assert scan.min_value <= -0.5 + scan.error_bound
        assert scan.min_value >= -0.5 - 1e-12
        assert abs(scan.argmin[2]) < 0.05

    def test_unsupported_dimension(self) -> None:
        inst = validate_instance(np.eye(4), np.diag([1.0, 0, 0, 0]), np.diag([0, 1.0, 0, 0]))
        with pytest.raises(UnsupportedDimension):
            sphere_scan(inst)

    @pytest.mark.parametrize("resolution", [0.0, 0.06, -0.01])
    def test_bad_resolution(self, canonical: Instance, resolution: float) -> None:
        with pytest.raises(InvalidConfig):
            sphere_scan(canonical, resolution)

    def test_agrees_with_certify(self) -> None:
        rng = Lcg64(77)
        checked = 0
        for index in range(30):
            family = (Family.CERTIFIED, Family.VIOLATING)[index % 2]
            spec = GeneratorSpec(2 + rng.below(2), rng.next_u64() >> 1, family, alpha=0.5 + rng.below(3))
            inst, _ = generate(spec)
            scan = sphere_scan(inst)
            if abs(scan.min_value) <= 10.0 * 1e-7 * inst.scale:
                continue
            verdict = certify(inst)
            expected = Certified if scan.min_value > 0.0 else Refuted
            assert isinstance(verdict, expected)
            checked += 1
        assert checked >= 10


class TestGridAlpha:
    """Tests for grid_alpha()."""

    def test_canonical(self, canonical: Instance) -> None:
        best_s, best_f = grid_alpha(canonical)
        assert best_s == pytest.approx(1.0, rel=0.03)
        assert best_f == pytest.approx(0.0, abs=1e-3)

    def test_swap_gives_reciprocal(self) -> None:
        inst = validate_instance(I2, 4.0 * E1, E2)
        best_s, best_f = grid_alpha(inst)
        swap_s, swap_f = grid_alpha(inst.swapped())
        assert best_s == pytest.approx(0.5, rel=0.03)
        assert swap_s * best_s == pytest.approx(1.0, rel=0.03)
        assert swap_f == pytest.approx(best_f, abs=1e-2)

    def test_equal_forms(self, equal_forms: Instance) -> None:
        best_s, best_f = grid_alpha(equal_forms)
        assert best_s == pytest.approx(1.0, rel=1e-6)
        assert best_f == pytest.approx(0.0, abs=1e-9)

    def test_close_to_search(self) -> None:
        for seed in range(10):
            inst = gen_certified(GeneratorSpec(2 + seed, 300 + seed, alpha=0.5 + 0.25 * seed))
            _, best_f = grid_alpha(inst)
            search = maximize(inst)
            assert search.f_star >= best_f - 1e-10 * inst.scale
            assert search.f_star - best_f <= 1e-2 * inst.scale

    def test_bad_arguments(self, canonical: Instance) -> None:
        with pytest.raises(InvalidConfig):
            grid_alpha(canonical, points_per_decade=5)
        with pytest.raises(InvalidConfig):
            grid_alpha(canonical, bounds=(1.0, 1.0))
