import itertools

import numpy as np
import pytest

from icatcma.problems import (
    ProblemInstance,
    evaluate,
    evaluate_batch,
    f_c,
    from_record,
    generate_instance,
    optimal_bits_for_x,
    optimum,
    phi_star,
    to_record,
)


def all_binary_vectors(m):
    return np.array(list(itertools.product([0, 1], repeat=m)), dtype=float)


class TestGenerateInstance:
    def test_deterministic(self):
        a = generate_instance("f2", 4, 3, 2.0, 99)
        b = generate_instance("f2", 4, 3, 2.0, 99)
        assert np.array_equal(a.v_star, b.v_star)
        assert np.array_equal(a.b_star, b.b_star)

    def test_normalization(self):
        inst = generate_instance("f2", 6, 4, 1.0, 5)
        assert abs(np.linalg.norm(inst.v_star) - 1.0) < 1e-12
        assert abs(np.linalg.norm(inst.b_star) - 1.0) < 1e-12

    def test_different_seeds_differ(self):
        a = generate_instance("f2", 4, 4, 1.0, 1)
        b = generate_instance("f2", 4, 4, 1.0, 2)
        assert np.any(a.v_star != b.v_star)

    def test_b_star_components_nonzero(self):
        for seed in range(50):
            inst = generate_instance("f1", 5, 5, 0.0, seed)
            assert np.all(np.abs(inst.b_star) > 1e-12)

    def test_dimension_rules(self):
        with pytest.raises(ValueError):
            generate_instance("f1", 4, 5, 0.0, 1)
        with pytest.raises(ValueError):
            generate_instance("f3", 3, 5, 1.0, 1)
        with pytest.raises(ValueError):
            generate_instance("f2", 0, 5, 1.0, 1)
        with pytest.raises(ValueError):
            generate_instance("nope", 5, 5, 1.0, 1)
        with pytest.raises(ValueError):
            generate_instance("f2", 5, 5, -1.0, 1)


class TestPhiStar:
    def test_zero_bits(self):
        inst = generate_instance("f2", 4, 3, 2.0, 7)
        assert phi_star(inst, np.zeros(3)) == pytest.approx(inst.b_star)
        tanh_inst = generate_instance("f2tanh", 4, 3, 2.0, 7)
        assert phi_star(tanh_inst, np.zeros(3)) == pytest.approx(np.tanh(inst.b_star))

    def test_alpha_zero_constant(self):
        inst = generate_instance("f2", 4, 3, 0.0, 8)
        for c in all_binary_vectors(3):
            assert phi_star(inst, c) == pytest.approx(inst.b_star)

    def test_tanh_range(self):
        inst = generate_instance("f2tanh", 5, 5, 16.0, 9)
        for c in all_binary_vectors(5)[::5]:
            out = phi_star(inst, c)
            assert np.all(out > -1.0) and np.all(out < 1.0)

    def test_wrong_kind(self):
        inst = generate_instance("f1", 3, 3, 0.0, 10)
        with pytest.raises(ValueError):
            phi_star(inst, np.zeros(3))


class TestEvaluate:
    def test_f1_optimum_is_zero(self):
        inst = generate_instance("f1", 5, 5, 0.0, 11)
        assert evaluate(inst, np.ones(5), inst.b_star) == 0.0

    def test_f1_masked_coordinate(self):
        b = np.array([1.0, -1.0]) / np.sqrt(2.0)
        inst = ProblemInstance("f1", 2, 2, 0.0, np.zeros((2, 2)), b, seed=0)
        value = evaluate(inst, np.array([1.0, 0.0]), np.array([b[0], 123.456]))
        assert value == pytest.approx(0.5)

    def test_f2_optimum_is_zero(self):
        inst = generate_instance("f2", 5, 5, 4.0, 12)
        ones = np.ones(5)
        assert evaluate(inst, ones, phi_star(inst, ones)) == pytest.approx(0.0, abs=1e-24)

    def test_f3_alpha0_equals_f1(self):
        f3 = generate_instance("f3", 5, 5, 0.0, 13)
        f1 = generate_instance("f1", 5, 5, 0.0, 13)
        rng = np.random.default_rng(0)
        for _ in range(20):
            c = (rng.random(5) < 0.5).astype(float)
            x = rng.standard_normal(5)
            assert evaluate(f3, c, x) == pytest.approx(evaluate(f1, c, x))

    def test_nonnegative_everywhere(self):
        rng = np.random.default_rng(14)
        for kind in ("f1", "f2", "f2tanh", "f3"):
            inst = generate_instance(kind, 4, 4, 3.0, 15)
            for _ in range(50):
                c = (rng.random(4) < 0.5).astype(float)
                x = 3.0 * rng.standard_normal(4)
                assert evaluate(inst, c, x) >= 0.0

    def test_f2_separable_at_alpha0(self):
        inst = generate_instance("f2", 4, 4, 0.0, 16)
        rng = np.random.default_rng(1)
        c1 = np.array([1.0, 0.0, 1.0, 0.0])
        c2 = np.array([0.0, 0.0, 1.0, 1.0])
        diffs = set()
        for _ in range(10):
            x = rng.standard_normal(4)
            diffs.add(round(evaluate(inst, c1, x) - evaluate(inst, c2, x), 12))
        assert len(diffs) == 1

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(17)
        for kind in ("f1", "f2", "f2tanh", "f3"):
            inst = generate_instance(kind, 5, 5, 2.0, 18)
            cs = (rng.random((7, 5)) < 0.5).astype(float)
            xs = rng.standard_normal((7, 5))
            batch = evaluate_batch(inst, cs, xs)
            scalar = [evaluate(inst, c, x) for c, x in zip(cs, xs)]
            assert batch == pytest.approx(scalar)

    def test_dimension_mismatch(self):
        inst = generate_instance("f2", 5, 5, 2.0, 19)
        with pytest.raises(ValueError):
            evaluate(inst, np.ones(4), np.zeros(5))


class TestOptimum:
    def test_f2_all_ones(self):
        inst = generate_instance("f2", 5, 5, 4.0, 20)
        c_opt, x_opt, f_opt = optimum(inst)
        assert np.all(c_opt == 1.0)
        assert f_opt == 0.0
        assert x_opt == pytest.approx(phi_star(inst, c_opt))

    def test_f1_known_solution(self):
        inst = generate_instance("f1", 5, 5, 0.0, 21)
        c_opt, x_opt, f_opt = optimum(inst)
        assert np.all(c_opt == 1.0)
        assert x_opt == pytest.approx(inst.b_star)
        assert f_opt == 0.0

    @pytest.mark.parametrize("kind", ["f1", "f2", "f3"])
    def test_optimum_attained_many_instances(self, kind):
        for seed in range(50):
            inst = generate_instance(kind, 5, 5, 2.0, 3000 + seed)
            c_opt, x_opt, f_opt = optimum(inst)
            assert f_opt == 0.0
            assert evaluate(inst, c_opt, x_opt) <= 1e-24

    def test_f3_brute_force_agrees(self):
        inst = generate_instance("f3", 4, 4, 2.0, 22)
        values = []
        for c in all_binary_vectors(4):
            target = phi_star(inst, c)
            masked = np.where(c == 1.0, 0.0, target)
            values.append(float(masked @ masked))
        _, _, f_opt = optimum(inst)
        assert f_opt == pytest.approx(min(values))

    def test_rejects_large_m(self):
        inst = generate_instance("f2", 2, 21, 1.0, 23)
        with pytest.raises(ValueError):
            optimum(inst)


class TestOptimalBitsClosedForm:
    def test_against_brute_force(self):
        rng = np.random.default_rng(24)
        m = 8
        bits = all_binary_vectors(m)
        for trial in range(100):
            inst = generate_instance("f1", m, m, 0.0, 4000 + trial)
            x = 2.0 * rng.standard_normal(m)
            masked = bits * x - inst.b_star
            values = np.einsum("ki,ki->k", masked, masked)
            best = values.min()
            predicted = optimal_bits_for_x(inst, x)
            value_at_predicted = evaluate(inst, predicted, x)
            assert value_at_predicted == pytest.approx(best, abs=1e-12)

    def test_tie_resolves_to_one(self):
        inst = ProblemInstance("f1", 1, 1, 0.0, np.zeros((1, 1)), np.array([0.5]), seed=0)
        assert optimal_bits_for_x(inst, np.array([1.0])) == pytest.approx([1.0])


class TestSerialization:
    def test_round_trip_bitwise(self):
        inst = generate_instance("f2tanh", 5, 4, 8.0, 25)
        clone = from_record(to_record(inst))
        assert clone.kind == inst.kind and clone.seed == inst.seed
        assert clone.alpha == inst.alpha
        assert np.array_equal(clone.v_star, inst.v_star)
        assert np.array_equal(clone.b_star, inst.b_star)


def test_f_c_counts_zero_bits():
    assert f_c(np.array([1.0, 0.0, 0.0, 1.0])) == 2.0
