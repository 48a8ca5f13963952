import math

import numpy as np
import pytest
import scipy.linalg

from terraspec.errors import TerraspecError
from terraspec.numerics import TriState
from terraspec.products import alpha
from terraspec.sequences import cesaro_scaled, constant, power_weight, table
from terraspec.spectrum import (
    GridSpec,
    Label,
    adjoint_eigvector,
    adjoint_point_test,
    classify_point,
    disk_position,
    dist_to_S,
    eigenvector,
    point_spectrum_test,
    pseudospectrum_grid,
    resolvent_section,
    spectrum_grid,
    verify_resolvent,
)
from terraspec.terraced import build_section

CESARO = cesaro_scaled(1.0)
UNIT = constant(1.0)


class TestDiskPosition:
    @pytest.mark.parametrize("lam,expected", [(0.5, "interior"), (1.0, "boundary"), (2.0, "exterior")])
    def test_unit_chi(self, lam, expected):
        assert disk_position(lam, 1.0) == expected

    def test_zero_on_circle(self):
        assert disk_position(0.0, 1.0) == "boundary"

    def test_agrees_with_halfplane_test(self):
        rng = np.random.default_rng(5)
        for chi in (0.5, 1.0, 2.0):
            for _ in range(200):
                lam = complex(rng.uniform(-2, 3), rng.uniform(-2, 2))
                if lam == 0:
                    continue
                pos = disk_position(lam, chi)
                gap = alpha(lam) - 1.0 / chi
                if pos == "interior":
                    assert gap > 0
                elif pos == "exterior":
                    assert gap < 0


class TestDistToS:
    def test_exact_member(self):
        assert dist_to_S(1.0 / 3.0, CESARO) == (0.0, 3)

    def test_accumulation_point(self):
        d, idx = dist_to_S(-1.0, CESARO)
        assert d == 1.0 and idx == 0

    def test_scan_minimum(self):
        d, idx = dist_to_S(0.4, CESARO)
        assert d == pytest.approx(abs(0.4 - 1.0 / 3.0), rel=1e-12)
        assert idx == 3


class TestPointSpectrumTest:
    def test_cesaro_on_plain_c0_is_empty(self):
        for k in range(1, 101):
            lam = CESARO.value(k)
            out = point_spectrum_test(lam, CESARO, UNIT, 1.0)
            assert out.outcome is TriState.NO

    def test_decaying_weight_adds_eigenvalue(self):
        s = cesaro_scaled(1.0)  # s_n = 1/n
        assert point_spectrum_test(1.0, CESARO, s, 1.0).outcome is TriState.YES

    def test_half_is_not_eigenvalue_for_decaying_weight(self):
        s = cesaro_scaled(1.0)
        assert point_spectrum_test(0.5, CESARO, s, 1.0).outcome is TriState.NO

    def test_off_diagonal_is_no(self):
        assert point_spectrum_test(0.42, CESARO, UNIT, 1.0).outcome is TriState.NO

    def test_numeric_path_on_classless_table(self):
        a = table(tuple(1.0 / n for n in range(1, 65)))
        out = point_spectrum_test(0.5, a, UNIT, 1.0)
        assert out.outcome is TriState.NO


class TestEigenvector:
    def test_two_term_recurrence(self):
        x = eigenvector(1.0, table([1.0, 0.5]), 2)
        assert np.allclose(x, [1.0, 1.0], rtol=0, atol=1e-14)

    def test_cesaro_fixes_constant_vector(self):
        x = eigenvector(1.0, CESARO, 4)
        assert np.allclose(x, np.ones(4), rtol=1e-13)

    def test_not_on_diagonal(self):
        with pytest.raises(TerraspecError) as exc:
            eigenvector(0.3, CESARO, 10)
        assert exc.value.code == "not-an-eigencandidate"

    def test_repeated_diagonal_rejected(self):
        with pytest.raises(TerraspecError) as exc:
            eigenvector(1.0, table([1.0, 0.5, 1.0]), 3)
        assert exc.value.code == "repeated-diagonal-unsupported"

    def test_recurrence_residual(self):
        # a_n (x_1 + ... + x_n) = lambda x_n after the start index
        for a, lam, N in [
            (CESARO, 1.0, 1000),
            (CESARO, 0.5, 400),
            (CESARO, 0.2, 300),
            (cesaro_scaled(2.0), 2.0, 500),
        ]:
            x = eigenvector(lam, a, N)
            vals = a.values(N)
            sums = np.cumsum(x)
            m = int(np.flatnonzero(x != 0)[0])
            resid = np.abs(vals * sums - lam * x)[m:] / np.abs(lam * x[m:])
            assert resid.max() <= 1e-10, (lam, resid.max())


class TestAdjointEigvector:
    def test_first_diagonal_point_truncates_immediately(self):
        x = adjoint_eigvector(1.0, CESARO, 6)
        assert x[0] == 1.0
        assert np.all(x[1:] == 0.0)

    def test_second_diagonal_point(self):
        x = adjoint_eigvector(0.5, table([1.0, 0.5, 0.25, 0.125]), 4)
        assert np.array_equal(x.real, [1.0, -1.0, 0.0, 0.0])
        assert np.all(x.imag == 0.0)

    def test_partial_products(self):
        x = adjoint_eigvector(2.0, CESARO, 4)
        assert np.allclose(x.real, [1.0, 0.5, 0.375, 0.3125], rtol=1e-14)

    def test_zero_rejected(self):
        with pytest.raises(TerraspecError) as exc:
            adjoint_eigvector(0.0, CESARO, 5)
        assert exc.value.code == "zero-not-adjoint-eigenvalue"

    def test_recurrence_with_tail_bound(self):
        # sum_{k>=n} a_k x_k = lambda x_n, checked against the decay rate
        # |x_n| ~ n**(-alpha*chi); asserted only when alpha*chi > 1.1
        for lam in (0.4, 0.3 + 0.1j):
            ac = alpha(lam) * 1.0
            assert ac > 1.1
            N = 2000
            x = adjoint_eigvector(lam, CESARO, N)
            vals = CESARO.values(N)
            tails = np.cumsum((vals * x)[::-1])[::-1]
            resid = np.abs(tails[: N // 2] - lam * x[: N // 2])
            ks = np.arange(N // 2, N + 1, dtype=float)
            scale = np.max(np.abs(x[N // 2 - 1 : N]) * ks**ac)
            bound = 3.0 * abs(lam) * scale * (N + 1.0) ** (-ac)
            assert resid.max() <= bound


class TestAdjointPointTest:
    def test_interior_series_converges(self):
        out = adjoint_point_test(0.4, CESARO, UNIT, 1.0)
        assert out.outcome is TriState.YES

    def test_exterior_no(self):
        out = adjoint_point_test(2.0, CESARO, UNIT, 1.0)
        assert out.outcome is TriState.NO

    def test_diagonal_always_yes(self):
        lam = CESARO.value(7)
        assert adjoint_point_test(lam, CESARO, UNIT, 1.0).outcome is TriState.YES

    def test_zero_never(self):
        assert adjoint_point_test(0.0, CESARO, UNIT, 1.0).outcome is TriState.NO

    def test_accumulation_point_unsupported(self):
        with pytest.raises(TerraspecError) as exc:
            adjoint_point_test(1e-14, CESARO, UNIT, 1.0)
        assert exc.value.code == "closure-boundary-unsupported"


class TestResolventSection:
    def test_2x2_against_inversion_oracle(self):
        B = resolvent_section(3.0, table([1.0, 0.5]), 2).entries
        oracle = np.linalg.inv(np.array([[1.0 - 3.0, 0.0], [0.5, 0.5 - 3.0]]))
        assert np.allclose(B, oracle, rtol=1e-14)
        assert np.allclose(B, [[-0.5, 0.0], [-0.1, -0.4]], rtol=1e-14)

    def test_scalar_section(self):
        B = resolvent_section(4.0, table([1.5]), 1).entries
        assert B[0, 0] == 1.0 / (1.5 - 4.0)

    def test_explicit_entry(self):
        B = resolvent_section(2.0, CESARO, 3).entries
        assert B[1, 0] == pytest.approx(-1.0 / 3.0, rel=1e-14)

    def test_lambda_on_diagonal(self):
        with pytest.raises(TerraspecError) as exc:
            resolvent_section(0.25, CESARO, 10)
        assert exc.value.code == "lambda-in-S"

    def test_zero_rejected(self):
        with pytest.raises(TerraspecError) as exc:
            resolvent_section(0.0, CESARO, 5)
        assert exc.value.code == "resolvent-undefined-at-zero"

    def test_nesting_is_exact(self):
        for lam in (2.0, -0.6 + 0.8j):
            big = resolvent_section(lam, CESARO, 300).entries
            for m in (10, 50, 150):
                small = resolvent_section(lam, CESARO, m).entries
                assert np.array_equal(big[:m, :m], small)

    def test_forward_substitution_oracle(self):
        rng = np.random.default_rng(101)
        N = 400
        mask = np.tril(np.ones((N, N), dtype=bool))
        for chi in (1.0, 2.0):
            a = cesaro_scaled(chi)
            vals = a.values(N)
            drawn = 0
            while drawn < 8:
                lam = complex(rng.uniform(-2 * chi, 3 * chi), rng.uniform(-2 * chi, 2 * chi))
                if min(np.min(np.abs(lam - vals)), abs(lam)) < 0.1:
                    continue
                B = resolvent_section(lam, a, N).entries
                M = build_section(a, N).entries - lam * np.eye(N)
                oracle = scipy.linalg.solve_triangular(M, np.eye(N, dtype=complex), lower=True)
                rel = np.max(np.abs(B - oracle)[mask] / np.abs(oracle)[mask])
                assert rel <= 1e-10, (chi, lam, rel)
                drawn += 1

    def test_high_precision_referee_where_substitution_breaks(self):
        # For lambda with |Re(1/lambda)| large the entries span ~15 orders
        # of magnitude and float forward substitution loses all relative
        # accuracy on the tiny ones (cancellation in the running sums).
        # A 60-digit evaluation shows the product formula stays accurate.
        import mpmath as mp

        mp.mp.dps = 60
        lam = complex(-0.155, 0.0456)
        N = 400
        B = resolvent_section(lam, CESARO, N).entries
        M = build_section(CESARO, N).entries - lam * np.eye(N)
        oracle = scipy.linalg.solve_triangular(M, np.eye(N, dtype=complex), lower=True)
        rel = np.abs(B - oracle) / np.maximum(np.abs(oracle), 1e-300)
        np.fill_diagonal(rel, 0.0)
        i, k = np.unravel_index(np.argmax(np.tril(rel)), rel.shape)
        lam_mp = mp.mpc(lam.real, lam.imag)
        prod = mp.mpf(1)
        for j in range(k + 1, i + 2):
            prod *= 1 - mp.mpf(1) / (j * lam_mp)
        exact = complex(-(mp.mpf(1) / (i + 1)) / (lam_mp**2 * prod))
        assert abs(B[i, k] - exact) / abs(exact) <= 1e-12
        assert abs(oracle[i, k] - exact) / abs(exact) > 1e-10


class TestVerifyResolvent:
    def test_exact_2x2(self):
        chk = verify_resolvent(3.0, table([1.0, 0.5]), 2)
        assert chk.max_residual <= 1e-14 and chk.passed

    def test_cesaro_200(self):
        chk = verify_resolvent(2.0, CESARO, 200)
        assert chk.max_residual <= 1e-10 and chk.passed

    def test_diagonal_lambda_raises(self):
        with pytest.raises(TerraspecError):
            verify_resolvent(1.0, CESARO, 10)


class TestClassifyPoint:
    def test_interior_point_is_residual(self):
        pt = classify_point(0.4, CESARO, UNIT, 1.0)
        assert pt.label is Label.RESIDUAL
        assert pt.evidence.a2 is TriState.YES
        assert pt.evidence.alpha == alpha(0.4)

    def test_exterior_is_resolvent(self):
        pt = classify_point(2.0, CESARO, UNIT, 1.0)
        assert pt.label is Label.RESOLVENT
        assert pt.evidence.disk_position == "exterior"

    def test_zero_is_continuous_candidate(self):
        pt = classify_point(0.0, CESARO, UNIT, 1.0)
        assert pt.label is Label.CONTINUOUS_CANDIDATE

    def test_diagonal_point_with_decaying_weight(self):
        pt = classify_point(1.0, CESARO, cesaro_scaled(1.0), 1.0)
        assert pt.label is Label.POINT
        assert pt.evidence.in_S

    def test_point_labels_imply_membership(self):
        rng = np.random.default_rng(3)
        s = cesaro_scaled(1.0)
        for _ in range(100):
            lam = complex(rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 0.5))
            pt = classify_point(lam, CESARO, s, 1.0)
            if pt.label is Label.POINT:
                assert pt.evidence.in_S
                assert pt.evidence.a1 is TriState.YES

    def test_monotone_point_spectrum(self):
        # if a_m is an eigenvalue then every larger diagonal value is too
        s = power_weight(2.0)
        labels = {}
        for m in range(1, 6):
            lam = CESARO.value(m)
            labels[m] = classify_point(lam, CESARO, s, 1.0).label
        assert labels[1] is Label.POINT
        assert labels[2] is Label.POINT
        assert labels[3] is not Label.POINT
        members = [m for m, lab in labels.items() if lab is Label.POINT]
        for m in members:
            assert all(k in members for k in range(1, m))

    def test_non_decreasing_weight_degrades_exterior(self):
        s = table([0.5, 1.0, 0.8, 0.8, 0.8, 0.8, 0.8, 0.8])
        pt = classify_point(2.0, CESARO, s, 1.0, n_max=8)
        assert pt.label is Label.BOUNDARY_UNKNOWN


class TestSpectrumGrid:
    def test_three_by_three(self):
        grid = GridSpec((-0.2, 1.2), (-0.2, 0.2), (3, 3))
        points = spectrum_grid(CESARO, UNIT, 1.0, grid)
        assert len(points) == 9
        for pt in points:
            off_closure = pt.evidence.dist_to_S > 1e-9
            if abs(pt.lam - 0.5) > 0.5 + 1e-12 and off_closure:
                assert pt.label is Label.RESOLVENT

    def test_zero_node_labeled_continuous(self):
        grid = GridSpec((-0.2, 0.2), (-0.2, 0.2), (3, 3))
        points = spectrum_grid(CESARO, UNIT, 1.0, grid)
        zero_pt = [p for p in points if p.lam == 0][0]
        assert zero_pt.label is Label.CONTINUOUS_CANDIDATE

    def test_row_major_order(self):
        grid = GridSpec((-1.0, 1.0), (-0.5, 0.5), (3, 2))
        points = spectrum_grid(CESARO, UNIT, 1.0, grid)
        lams = [p.lam for p in points]
        assert lams[0] == complex(-1.0, -0.5)
        assert lams[1] == complex(0.0, -0.5)
        assert lams[3] == complex(-1.0, 0.5)

    def test_degenerate_grid_rejected(self):
        with pytest.raises(TerraspecError) as exc:
            GridSpec((0.0, 1.0), (0.0, 1.0), (1, 3))
        assert exc.value.code == "grid-degenerate"


def sigma_min_2x2(mat):
    # closed-form smallest singular value of a real 2x2 matrix
    t = float(np.sum(mat * mat))
    d = float(np.linalg.det(mat)) ** 2
    return math.sqrt((t - math.sqrt(t * t - 4.0 * d)) / 2.0)


class TestPseudospectrum:
    def test_singular_at_eigenvalue(self):
        sec = build_section(table([1.0]), 1)
        grid = GridSpec((0.5, 1.0), (0.0, 0.1), (2, 2))
        out = pseudospectrum_grid(sec, grid, [1e-2])
        j = list(grid.re_values()).index(1.0)
        assert out.sigma_min[0, j] == 0.0
        assert out.membership[1e-2][0, j]

    def test_2x2_oracle(self):
        sec = build_section(CESARO, 2)
        grid = GridSpec((3.0, 4.0), (0.0, 1.0), (2, 2))
        out = pseudospectrum_grid(sec, grid, [0.5])
        expected = sigma_min_2x2(np.array([[1.0 - 3.0, 0.0], [0.5, 0.5 - 3.0]]))
        assert out.sigma_min[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_exterior_node_stays_away_from_zero(self):
        sigmas = []
        for n in (32, 64, 128):
            sec = build_section(CESARO, n)
            sigmas.append(scipy.linalg.svdvals(sec.entries - 2.0 * np.eye(n))[-1])
        assert all(s > 0.5 for s in sigmas)
        assert sigmas[1] / sigmas[0] > 0.9 and sigmas[2] / sigmas[1] > 0.9

    def test_cap(self):
        sec = build_section(CESARO, 513)
        grid = GridSpec((2.0, 3.0), (0.0, 1.0), (2, 2))
        with pytest.raises(TerraspecError) as exc:
            pseudospectrum_grid(sec, grid, [0.1])
        assert exc.value.code == "section-too-large"
