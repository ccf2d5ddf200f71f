"""1D midpoint elements: DtN maps, propagators, two-point solves."""
import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfem.pade_grid import make_grid
from cfem.scalar_core import (
    SpectralParameter,
    assemble_1d,
    assemble_stiffness_mass,
    condense_dtn,
    element_dtn,
    element_propagator,
    exact_dtn,
    exact_propagator,
    generalized_spectrum,
    halfspace_fixed_point_check,
    mesh_propagator,
    propagator_magnitude_lemma_check,
    propagator_to_dtn,
    relative_error,
    solve_two_point,
    sqrt_decay,
)

complex_lam = st.builds(
    complex,
    st.floats(min_value=-50, max_value=50),
    st.floats(min_value=-50, max_value=50),
)
complex_length = st.builds(
    complex,
    st.floats(min_value=0.05, max_value=2.0),
    st.floats(min_value=-1.0, max_value=1.0),
)


class TestSqrtDecay:
    def test_branch_values(self):
        assert sqrt_decay(4.0) == pytest.approx(2.0)
        assert sqrt_decay(-4.0) == pytest.approx(2j)
        assert sqrt_decay(2j) == pytest.approx(1 + 1j)

    @given(complex_lam)
    @settings(max_examples=100, deadline=None)
    def test_nonnegative_real_part(self, lam):
        k = sqrt_decay(lam)
        assert k.real >= 0
        assert k * k == pytest.approx(lam, abs=1e-10 * (abs(lam) + 1))

    def test_spectral_parameter_constructors(self):
        p = SpectralParameter.from_omega(3.0)
        assert p.lam == pytest.approx(-9.0)
        assert p.k == pytest.approx(3j)
        q = SpectralParameter.from_lambda(25.0)
        assert q.k == pytest.approx(5.0)


class TestElementDtN:
    def test_hand_computed_entries(self):
        # L=1, lam=4: k_diag = 1/1 + 4/4 = 2, k_off = -1 + 1 = 0
        elem = element_dtn(1.0, 4.0)
        assert elem.k_diag == pytest.approx(2.0)
        assert elem.k_off == pytest.approx(0.0)

    def test_zero_length_rejected(self):
        with pytest.raises(ValueError):
            element_dtn(0.0, 1.0)

    @given(complex_length, complex_lam)
    @settings(max_examples=200, deadline=None)
    def test_fixed_point_identity(self, length, lam):
        elem = element_dtn(length, lam)
        defect = abs(elem.k_diag**2 - elem.k_off**2 - lam)
        assert defect <= 1e-12 * (abs(lam) + 1)

    @given(complex_length, complex_lam)
    @settings(max_examples=100, deadline=None)
    def test_transfer_matrix_reconstruction(self, length, lam):
        elem = element_dtn(length, lam)
        if abs(lam) < 1e-6:
            return  # the (u, v/sqrt(lam)) scaling degenerates at lam = 0
        if abs(1 - sqrt_decay(lam) * length / 2) < 1e-3:
            return  # propagator pole: no DtN form
        rebuilt = propagator_to_dtn(length, lam)
        scale = abs(elem.k_diag) + abs(elem.k_off) + 1
        assert abs(rebuilt.k_diag - elem.k_diag) <= 1e-9 * scale
        assert abs(rebuilt.k_off - elem.k_off) <= 1e-9 * scale

    def test_halfspace_augmentation(self):
        for lam in (1.0, 9.0, -9.0, 4 + 3j):
            residual = halfspace_fixed_point_check(element_dtn(0.4 + 0.1j, lam))
            assert residual <= 1e-11 * (abs(lam) + 1)


class TestPropagators:
    def test_crank_nicolson_value(self):
        # k*L = 1.2 -> (1 + 0.6)/(1 - 0.6) = 4
        assert element_propagator(1.2, 1.0) == pytest.approx(4.0)

    def test_pole_raises(self):
        with pytest.raises(ZeroDivisionError):
            element_propagator(2.0, 1.0)

    def test_mesh_propagator_names_offending_element(self):
        grid = make_grid(1, 2.0)  # single element of length 2, pole at k=1
        with pytest.raises(ZeroDivisionError, match="element 0"):
            mesh_propagator(grid, 1.0)

    def test_matches_exponential_to_pade_order(self):
        # n-element unit mesh approximates e^k with error O(k^(2n+1))
        k = 0.1
        for n in range(1, 5):
            err = abs(mesh_propagator(make_grid(n, 1.0), k) - exact_propagator(k, 1.0))
            assert err < 10 * k ** (2 * n + 1)

    def test_high_accuracy_at_moderate_argument(self):
        got = mesh_propagator(make_grid(12, 1.0), 5.0)
        assert abs(got - cmath.exp(5.0)) / abs(cmath.exp(5.0)) <= 1e-12

    def test_ordering_invariance(self):
        mono = make_grid(10, 1.0)
        inter = make_grid(10, 1.0, "conjugate_interleaved")
        for k in (0.5, 2.0, 3j, 1 + 2j):
            assert mesh_propagator(mono, k) == pytest.approx(
                mesh_propagator(inter, k), rel=1e-12
            )

    def test_magnitude_lemma(self):
        grid = make_grid(7, 1.0)
        rng = np.random.default_rng(2)
        for _ in range(50):
            k = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if abs(k.real) < 0.05:
                continue
            assert propagator_magnitude_lemma_check(grid, k)
        with pytest.raises(ValueError):
            propagator_magnitude_lemma_check(grid, 1j)


class TestCondensedDtN:
    def test_exact_dtn_closed_form(self):
        dtn = exact_dtn(4.0, 1.0)
        assert dtn.k_diag == pytest.approx(2 / np.tanh(2.0))
        assert dtn.k_off == pytest.approx(-2 / np.sinh(2.0))

    def test_exact_dtn_zero_lambda_limit(self):
        dtn = exact_dtn(0.0, 2.0)
        assert dtn.k_diag == pytest.approx(0.5)
        assert dtn.k_off == pytest.approx(-0.5)

    def test_resonance_rejected(self):
        with pytest.raises(ZeroDivisionError):
            exact_dtn(-(np.pi**2), 1.0)

    def test_condensation_converges_to_exact(self):
        for lam in (1.0, 25.0, -25.0, 2 + 1j):
            exact = exact_dtn(lam, 1.0)
            got = condense_dtn(make_grid(10, 1.0), lam)
            scale = abs(exact.k_diag) + abs(exact.k_off)
            assert abs(got.k_diag - exact.k_diag) <= 1e-9 * scale
            assert abs(got.k_off - exact.k_off) <= 1e-9 * scale

    def test_single_element_condensation(self):
        elem = element_dtn(1.0 + 0j, 3.0)
        dtn = condense_dtn(make_grid(1, 1.0), 3.0)
        assert dtn.k_diag == pytest.approx(elem.k_diag)
        assert dtn.k_off == pytest.approx(elem.k_off)

    def test_whole_mesh_fixed_point(self):
        for n in (2, 5, 9, 16):
            for lam in (1.0, -7.0, 3 + 4j):
                dtn = condense_dtn(make_grid(n, 1.0), lam)
                assert dtn.fixed_point_defect(lam) <= 1e-12 * (abs(lam) + 1)

    def test_real_symmetric_for_real_lambda(self):
        # conjugate-paired lengths make the condensed map real for real lam
        for lam in (25.0, -25.0):
            dtn = condense_dtn(make_grid(8, 1.0), lam)
            assert abs(dtn.k_diag.imag) <= 1e-10 * abs(dtn.k_diag)
            assert abs(dtn.k_off.imag) <= 1e-10 * (abs(dtn.k_off) + 1)


class TestAssembly:
    def test_assembled_structure(self):
        grid = make_grid(4, 1.0)
        system = assemble_1d(grid, 2.0)
        assert system.dim == 5
        dense = system.to_dense()
        assert np.allclose(dense, dense.T)
        # interior diagonal entries sum two element contributions
        e0 = element_dtn(grid.lengths[0], 2.0)
        e1 = element_dtn(grid.lengths[1], 2.0)
        assert dense[1, 1] == pytest.approx(e0.k_diag + e1.k_diag)

    def test_stiffness_mass_split_recombines(self):
        grid = make_grid(5, 1.0)
        lam = 3 - 2j
        (kd, ko), (md, mo) = assemble_stiffness_mass(grid)
        system = assemble_1d(grid, lam)
        assert np.allclose(kd + lam * md, system.diag)
        assert np.allclose(ko + lam * mo, system.offdiag)

    def test_block_tridiagonal_view(self):
        grid = make_grid(3, 1.0)
        system = assemble_1d(grid, 1.0)
        assert np.allclose(system.as_block_tridiagonal().to_dense(), system.to_dense())


class TestTwoPointSolve:
    def test_elliptic_exact_solution(self):
        # -u'' + k^2 u = 0, u(L)=0, flux 1 at 0: u(0) = tanh(kL)/k
        k = 10.0
        u0, _, _ = solve_two_point(make_grid(15, 1.0), k**2, 1.0, 0.0)
        exact = np.tanh(k) / k
        assert relative_error(exact, u0) <= 1e-13

    def test_helmholtz_exact_solution(self):
        omega = 4.0
        u0, _, _ = solve_two_point(make_grid(20, 1.0), -(omega**2), 1.0, 0.0)
        exact = np.tan(omega) / omega
        assert relative_error(exact, u0) <= 1e-12

    def test_inhomogeneous_dirichlet(self):
        # lam=0: u(x) = u_L + (L - x) * flux; u(0) = u_L + L
        u0, _, uL = solve_two_point(make_grid(6, 1.0), 0.0, 1.0, 2.5)
        assert uL == 2.5
        assert u0 == pytest.approx(3.5, rel=1e-12)

    def test_relative_error_range(self):
        assert relative_error(0.0, 0.0) == 0.0
        assert relative_error(1.0, -1.0) == 1.0
        assert 0 <= relative_error(1 + 1j, 1.1 + 0.9j) <= 1


class TestGeneralizedSpectrum:
    def test_empty_for_single_element(self):
        assert generalized_spectrum(make_grid(1, 1.0)).size == 0

    def test_real_nonnegative(self):
        for n in (2, 4, 8, 12):
            vals = generalized_spectrum(make_grid(n, 1.0))
            scale = np.abs(vals).max()
            assert np.all(np.abs(vals.imag) <= 1e-8 * scale)
            assert np.all(vals.real >= -1e-8 * scale)
