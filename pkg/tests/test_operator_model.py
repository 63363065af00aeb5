import numpy as np
import pytest

from permflip.exceptions import ResourceLimitError
from permflip.harness import random_permsum
from permflip.operator_model import (
    ErrorSpec,
    PermSum,
    SignedPermTerm,
    column_sums,
    errorspec_from_dict,
    errorspec_to_dict,
    load_permsum,
    materialize,
    permsum_from_dict,
    permsum_to_dict,
    perturb_bitflip,
    perturb_combined,
    perturb_phaseflip,
    sample_realization,
    save_permsum,
    swap_coefficients,
)
from permflip.perm_core import Permutation, apply_x_mask, identity
from permflip.spectral import dominant, eigenvalues
from tests.conftest import dense_permsum_oracle


def _mix_01():
    # A = 0.6 I + 0.4 X on one qubit
    return PermSum(
        1,
        (
            SignedPermTerm(0.6, 0, identity(1)),
            SignedPermTerm(0.4, 0, Permutation(1, [1, 0])),
        ),
    )


def _random_spec(a, rng, pmax=1.0, qmax=1.0):
    k = a.k
    top = 1 << a.n
    return ErrorSpec(
        p=rng.uniform(0, pmax, k),
        b=rng.integers(0, top, k),
        q=rng.uniform(0, qmax, k),
        phi=rng.integers(0, top, k),
    )


class TestTypes:
    def test_permsum_needs_terms(self):
        with pytest.raises(ValueError):
            PermSum(1, ())

    def test_permsum_checks_qubit_consistency(self):
        with pytest.raises(ValueError):
            PermSum(2, (SignedPermTerm(1.0, 0, identity(1)),))

    def test_term_checks_zmask_range(self):
        with pytest.raises(ValueError):
            SignedPermTerm(1.0, 4, identity(1))

    def test_errorspec_probability_range(self):
        with pytest.raises(ValueError):
            ErrorSpec(p=[1.5], b=[0], q=[0.0], phi=[0])
        with pytest.raises(ValueError):
            ErrorSpec(p=[-0.1], b=[0], q=[0.0], phi=[0])

    def test_errorspec_length_mismatch(self):
        with pytest.raises(ValueError):
            ErrorSpec(p=[0.1, 0.2], b=[0], q=[0.0], phi=[0])


class TestMaterialize:
    def test_two_term_expansion(self):
        m = materialize(_mix_01())
        assert np.array_equal(m, np.array([[0.6, 0.4], [0.4, 0.6]], dtype=complex))

    def test_single_identity_term(self):
        a = PermSum(2, (SignedPermTerm(1.0, 0, identity(2)),))
        assert np.array_equal(materialize(a), np.eye(4, dtype=complex))

    def test_z_term(self):
        a = PermSum(1, (SignedPermTerm(1.0, 1, identity(1)),))
        assert np.array_equal(materialize(a), np.diag([1.0, -1.0]).astype(complex))

    def test_dimension_cap(self):
        a = PermSum(2, (SignedPermTerm(1.0, 0, identity(2)),))
        with pytest.raises(ResourceLimitError):
            materialize(a, max_dim=2)

    def test_matches_oracle_on_random_sums(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 4))
            a = random_permsum(n, int(rng.integers(1, 6)), "mixed", rng)
            assert np.abs(materialize(a) - dense_permsum_oracle(a)).max() < 1e-15


class TestPerturbBitflip:
    def test_zero_probabilities_bit_exact(self, rng):
        a = random_permsum(2, 4, "mixed", rng)
        out = perturb_bitflip(a, ErrorSpec.zeros(4))
        assert np.array_equal(materialize(out), materialize(a))
        assert out.k == a.k

    def test_hand_example(self):
        e = ErrorSpec.bit_only([0.5, 0.0], [1, 0])
        m = materialize(perturb_bitflip(_mix_01(), e))
        assert np.allclose(m, [[0.3, 0.7], [0.7, 0.3]], atol=1e-15)

    def test_weight_split_preserves_magnitude(self, rng):
        a = random_permsum(2, 5, "positive", rng)
        p = rng.uniform(0.01, 0.99, 5)
        e = ErrorSpec.bit_only(p, rng.integers(0, 4, 5))
        out = perturb_bitflip(a, e)
        assert out.k == 2 * a.k
        for i, t in enumerate(a.terms):
            group = abs(out.terms[2 * i].alpha) + abs(out.terms[2 * i + 1].alpha)
            assert group == pytest.approx(abs(t.alpha), abs=1e-15)

    def test_certain_flip_keeps_single_term(self):
        e = ErrorSpec.bit_only([1.0, 0.0], [1, 0])
        out = perturb_bitflip(_mix_01(), e)
        assert out.k == 2
        assert out.terms[0].perm == Permutation(1, [1, 0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            perturb_bitflip(_mix_01(), ErrorSpec.zeros(3))

    def test_mask_out_of_range(self):
        with pytest.raises(ValueError):
            perturb_bitflip(_mix_01(), ErrorSpec.bit_only([0.5, 0.5], [2, 0]))


class TestPerturbPhaseflip:
    def test_zero_probabilities_bit_exact(self, rng):
        a = random_permsum(2, 4, "mixed", rng)
        out = perturb_phaseflip(a, ErrorSpec.zeros(4))
        assert np.array_equal(materialize(out), materialize(a))

    def test_hand_example(self):
        a = PermSum(1, (SignedPermTerm(1.0, 0, identity(1)),))
        e = ErrorSpec.phase_only([0.5], [1])
        assert np.array_equal(
            materialize(perturb_phaseflip(a, e)), np.diag([1.0, 0.0]).astype(complex)
        )

    def test_certain_flip_twice_restores_zmask(self):
        a = PermSum(1, (SignedPermTerm(1.0, 1, identity(1)),))
        e = ErrorSpec.phase_only([1.0], [1])
        once = perturb_phaseflip(a, e)
        assert once.k == 1 and once.terms[0].zmask == 0
        twice = perturb_phaseflip(once, e)
        assert twice.terms[0].zmask == 1


class TestPerturbCombined:
    def test_zero_probabilities_bit_exact(self, rng):
        a = random_permsum(2, 4, "mixed", rng)
        out = perturb_combined(a, ErrorSpec.zeros(4))
        assert np.array_equal(materialize(out), materialize(a))

    def test_hand_example_certain_flips(self):
        a = PermSum(1, (SignedPermTerm(1.0, 0, identity(1)),))
        e = ErrorSpec(p=[1.0], b=[1], q=[1.0], phi=[1])
        m = materialize(perturb_combined(a, e))
        assert np.array_equal(m, np.array([[0, 1], [-1, 0]], dtype=complex))

    def test_matches_phase_after_bit_composition(self, rng):
        # one phase mask per original term, reused on both bit-flip children
        for _ in range(10):
            n = int(rng.integers(1, 4))
            k = int(rng.integers(1, 5))
            a = random_permsum(n, k, "mixed", rng)
            e = _random_spec(a, rng)
            e = ErrorSpec(
                p=np.clip(e.p, 0.01, 0.99), b=e.b,
                q=np.clip(e.q, 0.01, 0.99), phi=e.phi,
            )
            combined = materialize(perturb_combined(a, e))
            bit_first = perturb_bitflip(a, ErrorSpec.bit_only(e.p, e.b))
            broadcast = ErrorSpec.phase_only(np.repeat(e.q, 2), np.repeat(e.phi, 2))
            staged = materialize(perturb_phaseflip(bit_first, broadcast))
            assert np.abs(combined - staged).max() < 1e-12

    def test_term_count_bound(self, rng):
        a = random_permsum(2, 6, "mixed", rng)
        e = _random_spec(a, rng)
        e = ErrorSpec(
            p=np.clip(e.p, 0.01, 0.99), b=e.b,
            q=np.clip(e.q, 0.01, 0.99), phi=e.phi,
        )
        assert perturb_combined(a, e).k == 4 * a.k


class TestSampleRealization:
    def test_zero_probabilities_always_original(self, rng):
        a = random_permsum(2, 3, "mixed", rng)
        for _ in range(10):
            out = sample_realization(a, ErrorSpec.zeros(3), rng)
            assert np.array_equal(materialize(out), materialize(a))

    def test_certain_bitflip_always_applied(self, rng):
        a = _mix_01()
        e = ErrorSpec.bit_only([1.0, 1.0], [1, 1])
        for _ in range(10):
            out = sample_realization(a, e, rng)
            assert out.k == a.k
            for orig, got in zip(a.terms, out.terms):
                assert got.perm == apply_x_mask(orig.perm, 1)

    def test_mean_matches_mixture(self, rng):
        a = random_permsum(2, 3, "mixed", rng)
        e = _random_spec(a, rng, pmax=0.7, qmax=0.7)
        target = materialize(perturb_combined(a, e))
        acc = np.zeros_like(target)
        draws = 10_000
        for _ in range(draws):
            acc += materialize(sample_realization(a, e, rng))
        assert np.abs(acc / draws - target).max() < 5e-2


class TestSwapCoefficients:
    def test_zero_mask_noop(self, rng):
        a = random_permsum(2, 4, "mixed", rng)
        assert np.array_equal(materialize(swap_coefficients(a, 0)), materialize(a))

    def test_two_term_swap(self):
        swapped = swap_coefficients(_mix_01(), 1)
        assert np.array_equal(
            materialize(swapped), np.array([[0.4, 0.6], [0.6, 0.4]], dtype=complex)
        )
        # closed form for [[a, b], [b, a]]: eigenvalues a +- b
        lam = dominant(eigenvalues(materialize(swapped)))
        assert lam == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("mask", [0, 1, 3, 7])
    def test_coefficient_multiset_invariant(self, rng, mask):
        a = random_permsum(3, 8, "mixed", rng)
        swapped = swap_coefficients(a, mask)
        assert sorted(t.alpha.real for t in swapped.terms) == pytest.approx(
            sorted(t.alpha.real for t in a.terms)
        )

    def test_requires_power_of_two(self, rng):
        a = random_permsum(2, 3, "mixed", rng)
        with pytest.raises(ValueError):
            swap_coefficients(a, 1)

    def test_mask_range(self, rng):
        a = random_permsum(2, 4, "mixed", rng)
        with pytest.raises(ValueError):
            swap_coefficients(a, 4)


class TestColumnSums:
    def test_positive_no_zmask_constant(self, rng):
        a = random_permsum(3, 6, "positive", rng)
        total = sum(t.alpha for t in a.terms)
        sums = column_sums(a)
        assert np.abs(sums - total).max() < 1e-12

    def test_matches_dense(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 5))
            a = random_permsum(n, int(rng.integers(1, 6)), "mixed", rng)
            dense = materialize(a).sum(axis=0)
            assert np.abs(column_sums(a) - dense).max() < 1e-12

    def test_z_term(self):
        a = PermSum(1, (SignedPermTerm(1.0, 1, identity(1)),))
        assert np.array_equal(column_sums(a), np.array([1.0, -1.0], dtype=complex))

    def test_bitflip_preserves_column_sums(self, rng):
        a = random_permsum(3, 5, "positive", rng)
        e = ErrorSpec.bit_only(rng.uniform(0, 1, 5), rng.integers(0, 8, 5))
        before = column_sums(a)
        after = column_sums(perturb_bitflip(a, e))
        assert np.abs(before - after).max() < 1e-12

    def test_swap_preserves_dominant_for_positive(self, rng):
        a = random_permsum(3, 8, "positive", rng)
        lam_a = dominant(eigenvalues(materialize(a)))
        lam_b = dominant(eigenvalues(materialize(swap_coefficients(a, 5))))
        assert abs(lam_a - lam_b) < 1e-10 * abs(lam_a)


class TestSerialization:
    def test_permsum_round_trip(self, rng):
        a = PermSum(
            2,
            (
                SignedPermTerm(0.25 - 0.5j, 2, Permutation(2, [2, 3, 0, 1])),
                SignedPermTerm(1.0, 0, identity(2)),
            ),
        )
        back = permsum_from_dict(permsum_to_dict(a))
        assert np.array_equal(materialize(back), materialize(a))
        assert [t.zmask for t in back.terms] == [2, 0]

    def test_errorspec_round_trip(self, rng):
        e = ErrorSpec(p=[0.1, 0.9], b=[1, 2], q=[0.0, 1.0], phi=[3, 0])
        back = errorspec_from_dict(errorspec_to_dict(e))
        assert np.array_equal(back.p, e.p)
        assert np.array_equal(back.b, e.b)
        assert np.array_equal(back.q, e.q)
        assert np.array_equal(back.phi, e.phi)

    def test_file_round_trip(self, tmp_path, rng):
        a = random_permsum(3, 4, "mixed", rng)
        path = tmp_path / "a.json"
        save_permsum(a, path)
        assert np.array_equal(materialize(load_permsum(path)), materialize(a))

    def test_malformed_json_raises(self):
        with pytest.raises(ValueError):
            permsum_from_dict({"n": 1})
        with pytest.raises(ValueError):
            errorspec_from_dict({"p": [0.1]})
