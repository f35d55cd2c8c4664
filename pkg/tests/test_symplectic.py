"""Similitude-group membership, singular numbers, and Haar sampling."""

from collections import Counter
from fractions import Fraction

import pytest

from padic_rmt.ensembles import EnsembleSpec, GSpFixedSN, GSpHaar, sample_haar_gl
from padic_rmt.errors import ConstraintViolated
from padic_rmt.padic import (
    PadicMatrix,
    Prime,
    Signature,
    diag_signature,
    matmul,
    smith_singular_numbers,
)
from padic_rmt.processes import run_coupled_trajectory
from padic_rmt.rng import RngStream
from padic_rmt.stats import chi_square_gof
from padic_rmt.symplectic import (
    GSpElement,
    SymplecticForm,
    gsp_corner_weights,
    gsp_singular_numbers,
    is_balanced,
    is_gsp,
    sample_bi_invariant_gsp,
    sample_haar_gsp,
    similitude_valuation,
)


class TestForm:
    def test_gram_antisymmetric_unimodular(self):
        form = SymplecticForm(2)
        g = form.gram()
        n = form.dim
        for i in range(n):
            for j in range(n):
                assert g[i][j] == -g[j][i]
        mat = form.gram_matrix(3, 8)
        assert smith_singular_numbers(mat).parts == (0,) * 4


class TestMembership:
    def test_two_by_two_similitude_is_determinant(self):
        # for 2x2 matrices the pairing identity reduces to the determinant
        rng = RngStream(70, 0)
        for trial in range(25):
            mat = sample_haar_gl(2, 3, 10, rng, ("m", trial))
            sim = is_gsp(mat)
            (a, b), (c, d) = mat.residues
            det = (a * d - b * c) % 3**10
            assert sim is not None and sim.residue == det

    def test_diagonal_example(self):
        d = diag_signature(Signature((2, 1, 1, 0)), 4, 4, 2, 16)
        sim = is_gsp(d)
        assert sim is not None and sim.residue == 4

    def test_random_four_by_four_fails(self):
        rng = RngStream(71, 0)
        for trial in range(40):
            mat = sample_haar_gl(4, 2, 12, rng, ("m", trial))
            assert is_gsp(mat) is None

    def test_balanced(self):
        assert is_balanced(Signature((2, 1, 1, 0)))
        assert not is_balanced(Signature((2, 1, 0, 0)))
        assert not is_balanced(Signature((1, 0, 0)))


class TestSingularNumbers:
    def test_diagonal(self):
        d = diag_signature(Signature((2, 1, 1, 0)), 4, 4, 2, 16)
        assert gsp_singular_numbers(d).parts == (2, 1, 1, 0)

    def test_unbalanced_rejected(self):
        d = diag_signature(Signature((2, 1, 0, 0)), 4, 4, 2, 16)
        with pytest.raises(ConstraintViolated):
            gsp_singular_numbers(d)

    def test_compact_elements_trivial(self):
        rng = RngStream(72, 0)
        for trial in range(20):
            el = sample_haar_gsp(2, 2, 12, rng, ("g", trial))
            assert gsp_singular_numbers(el).parts == (0, 0, 0, 0)


class TestHaarSampler:
    def test_similitude_is_the_drawn_unit(self):
        rng = RngStream(73, 0)
        for trial in range(30):
            el = sample_haar_gsp(1, 5, 6, rng, ("g", trial))
            assert el.similitude.residue % 5 != 0

    def test_pushforward_uniform_on_special_linear_mod_three(self):
        # the symplectic part of the dimension-2 sampler lands uniformly on
        # the 24 unit-determinant matrices mod 3
        rng = RngStream(74, 0)
        counts = Counter()
        trials = 12000
        for i in range(trials):
            el = sample_haar_gsp(1, 3, 4, rng, ("g", i))
            u = el.similitude.residue
            inv_u = pow(u, -1, 3)
            m = el.matrix.residues
            key = (
                m[0][0] % 3,
                m[0][1] * inv_u % 3,
                m[1][0] % 3,
                m[1][1] * inv_u % 3,
            )
            counts[key] += 1
        assert len(counts) == 24
        expected = {key: Fraction(1, 24) for key in counts}
        report = chi_square_gof(counts, expected, alpha=0.01)
        assert report.passed, report

    def test_determinism(self):
        a = sample_haar_gsp(2, 2, 16, RngStream(75, 1), ("g",))
        b = sample_haar_gsp(2, 2, 16, RngStream(75, 1), ("g",))
        assert a.matrix.residues == b.matrix.residues

    def test_extension_coherent(self):
        a = sample_haar_gsp(2, 3, 6, RngStream(76, 0), ("g",))
        b = sample_haar_gsp(2, 3, 12, RngStream(76, 0), ("g",))
        mod = 3**6
        assert tuple(
            tuple(x % mod for x in row) for row in b.matrix.residues
        ) == a.matrix.residues


class TestBiInvariant:
    def test_signature_reproduced(self):
        rng = RngStream(77, 0)
        for trial in range(15):
            el = sample_bi_invariant_gsp(
                Signature((1, 1, 0, 0)), 2, 34, rng, ("b", trial)
            )
            assert gsp_singular_numbers(el).parts == (1, 1, 0, 0)
            assert similitude_valuation(el) == 1

    def test_unbalanced_rejected(self):
        with pytest.raises(ConstraintViolated):
            sample_bi_invariant_gsp(Signature((1, 0, 0, 0)), 2, 34, RngStream(78, 0))

    def test_compact_case(self):
        el = sample_bi_invariant_gsp(Signature((0, 0)), 3, 8, RngStream(79, 0))
        assert gsp_singular_numbers(el).parts == (0, 0)
        assert similitude_valuation(el) == 0


class TestCornerWeights:
    def test_diagonal_example(self):
        d = diag_signature(Signature((2, 1, 1, 0)), 4, 4, 2, 16)
        assert gsp_corner_weights(d) == (4, 2, 1, 0)

    def test_identity(self):
        assert gsp_corner_weights(PadicMatrix.identity(4, 2, 8)) == (0, 0, 0, 0)

    def test_concavity_on_samples(self):
        from padic_rmt.padic import corner as take_corner
        from padic_rmt.padic import delete_row

        rng = RngStream(80, 0)
        for trial in range(10):
            el = sample_bi_invariant_gsp(
                Signature((2, 1, 1, 0)), 2, 36, rng, ("c", trial)
            )
            mat = el.matrix
            w = gsp_corner_weights(el)
            for i in range(1, 3):
                top = take_corner(mat, i)
                w_skip = smith_singular_numbers(delete_row(top, 2)).weight
                assert w[i - 1] - w[i] >= w_skip - w[i + 1]


class TestTrajectories:
    def test_balanced_pairs_along_products(self):
        spec = EnsembleSpec(Prime(2), 4, GSpFixedSN(Signature((1, 1, 0, 0))))
        traj = run_coupled_trajectory(spec, 40, RngStream(81, 0))
        for step in traj.steps:
            assert is_balanced(step.lam), step
            assert sum(step.lam.parts) == sum(step.v)

    def test_haar_steps_are_inert(self):
        spec = EnsembleSpec(Prime(3), 4, GSpHaar(2))
        traj = run_coupled_trajectory(spec, 10, RngStream(82, 0))
        assert traj.steps[-1].lam.parts == (0, 0, 0, 0)
        assert traj.steps[-1].v == (0, 0, 0, 0)

    def test_interpolation_levels_in_dimension_four(self):
        spec = EnsembleSpec(Prime(2), 4, GSpFixedSN(Signature((1, 1, 0, 0))))
        traj = run_coupled_trajectory(
            spec, 20, RngStream(84, 0), with_interpolation=True
        )
        n = 4
        for step in traj.steps:
            assert step.interpolation[0] == step.v
            assert step.interpolation[-1] == step.lam.parts
            for j in range(1, n):
                lo, hi = step.interpolation[j - 1], step.interpolation[j]
                assert hi[n - j - 1] >= lo[n - j - 1]
                for i in range(1, j + 1):
                    assert hi[n - j - 1 + i] <= lo[n - j - 1 + i]

    def test_product_stays_in_group(self):
        spec = EnsembleSpec(Prime(2), 4, GSpFixedSN(Signature((2, 1, 1, 0))))
        src_rng = RngStream(83, 0)
        from padic_rmt.processes import EnsembleSource

        src = EnsembleSource(spec)
        prod = None
        for k in range(1, 6):
            mat = src.matrix(k, src_rng, precision=60)
            prod = mat if prod is None else matmul(prod, mat)
            assert is_gsp(prod) is not None
            assert is_balanced(smith_singular_numbers(prod))
