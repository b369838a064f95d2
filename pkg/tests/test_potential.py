import numpy as np
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from simulation.grid import Grid
from simulation.potential import PotentialSpec, bounded_below_hint, dV_dN, dV_dphi, dV_dphi_norms, eval_V

coefficients = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)


@st.composite
def potential_specs(draw):
    M = draw(st.integers(1, 3))
    Q = draw(st.integers(1, 3))
    alpha = [[draw(coefficients) for _ in range(Q)] for _ in range(M)]
    return PotentialSpec(alpha=alpha, kappa=1.0)


def _sample(seed, shape=(6, 6)):
    rng = np.random.default_rng(seed)
    phi = 0.5 * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    N = 0.5 * rng.standard_normal(shape)
    return phi, N


class TestSpec:
    def test_from_terms_builds_table(self):
        spec = PotentialSpec.from_terms([(1, 1, 0.5), (2, 3, -1.0)], kappa=2.0)
        assert (spec.M, spec.Q) == (2, 3)
        assert spec.alpha[1][2] == -1.0
        assert spec.terms() == [(1, 1, 0.5), (2, 3, -1.0)]

    def test_from_terms_rejects_index_zero(self):
        with pytest.raises(ValueError):
            PotentialSpec.from_terms([(0, 1, 1.0)], kappa=1.0)

    @pytest.mark.parametrize("kappa", [0.0, -1.0, float("inf")])
    def test_kappa_must_be_positive(self, kappa):
        with pytest.raises(ValidationError, match="kappa"):
            PotentialSpec(kappa=kappa)

    def test_ragged_table_rejected(self):
        with pytest.raises(ValidationError):
            PotentialSpec(alpha=[[1.0, 2.0], [1.0]])

    def test_pure_n_requires_flag(self):
        with pytest.raises(ValidationError):
            PotentialSpec(pure_n=[0.0, 1.0])
        assert PotentialSpec(pure_n=[0.0, 1.0], allow_pure_n=True).pure_n == [0.0, 1.0]


class TestEvaluation:
    def test_single_coupling(self):
        spec = PotentialSpec.from_terms([(1, 1, 1.0)], kappa=1.0)
        phi = np.array([1 + 1j, 2.0 + 0j])
        N = np.array([3.0, -0.5])
        np.testing.assert_allclose(eval_V(phi, N, spec), [6.0, -2.0])
        np.testing.assert_allclose(dV_dphi(phi, N, spec), phi * N)
        np.testing.assert_allclose(dV_dN(phi, N, spec), np.abs(phi) ** 2)

    def test_higher_terms(self):
        spec = PotentialSpec.from_terms([(2, 3, 0.5)], kappa=1.0)
        phi, N = np.array([2.0 + 0j]), np.array([1.5])
        np.testing.assert_allclose(eval_V(phi, N, spec), 0.5 * 16 * 1.5**3)
        np.testing.assert_allclose(dV_dphi(phi, N, spec), 0.5 * 2 * 4 * 1.5**3 * phi)
        np.testing.assert_allclose(dV_dN(phi, N, spec), 0.5 * 16 * 3 * 1.5**2)

    def test_pure_n_terms(self):
        spec = PotentialSpec(pure_n=[0.0, 0.25], allow_pure_n=True)
        N = np.array([2.0])
        np.testing.assert_allclose(eval_V(np.zeros(1, complex), N, spec), 1.0)
        np.testing.assert_allclose(dV_dN(np.zeros(1, complex), N, spec), 1.0)

    def test_zero_potential(self):
        spec = PotentialSpec()
        phi, N = _sample(0)
        assert np.all(eval_V(phi, N, spec) == 0.0)
        assert np.all(dV_dphi(phi, N, spec) == 0.0)

    @given(spec=potential_specs(), seed=st.integers(0, 2**32 - 1))
    def test_gradients_match_central_differences(self, spec, seed):
        phi, N = _sample(seed)
        h = 1e-6
        d_re = (eval_V(phi + h, N, spec) - eval_V(phi - h, N, spec)) / (2 * h)
        d_im = (eval_V(phi + 1j * h, N, spec) - eval_V(phi - 1j * h, N, spec)) / (2 * h)
        d_N = (eval_V(phi, N + h, spec) - eval_V(phi, N - h, spec)) / (2 * h)
        scale = 1 + np.abs(d_re) + np.abs(d_im)
        assert np.all(np.abs(dV_dphi(phi, N, spec) - 0.5 * (d_re + 1j * d_im)) <= 1e-5 * scale)
        assert np.all(np.abs(dV_dN(phi, N, spec) - d_N) <= 1e-5 * (1 + np.abs(d_N)))

    @given(spec=potential_specs(), seed=st.integers(0, 2**32 - 1), theta=st.floats(0, 2 * np.pi))
    def test_phase_invariance(self, spec, seed, theta):
        phi, N = _sample(seed)
        rotation = np.exp(1j * theta)
        np.testing.assert_allclose(eval_V(rotation * phi, N, spec), eval_V(phi, N, spec), rtol=1e-10, atol=1e-10)
        np.testing.assert_allclose(
            dV_dphi(rotation * phi, N, spec), rotation * dV_dphi(phi, N, spec), rtol=1e-10, atol=1e-10
        )

    @given(first=potential_specs(), second=potential_specs(), seed=st.integers(0, 2**32 - 1))
    def test_linear_in_coefficients(self, first, second, seed):
        phi, N = _sample(seed)
        combined = PotentialSpec.from_terms(first.terms() + second.terms(), kappa=1.0)
        np.testing.assert_allclose(
            eval_V(phi, N, combined), eval_V(phi, N, first) + eval_V(phi, N, second), rtol=1e-10, atol=1e-10
        )


class TestBoundedBelow:
    @pytest.mark.parametrize("terms,expected", [
        ([(1, 2, 1.0)], True),
        ([(1, 1, 1.0)], False),
        ([(1, 2, -1.0)], False),
        ([(1, 1, 0.3), (2, 2, 0.1)], True),
        # |phi|^2 N^2 - |phi|^4 N falls without bound along N = |phi|^2 / 2
        ([(1, 2, 1.0), (2, 1, -1.0)], False),
        ([(2, 1, -1.0), (2, 2, 1.0), (4, 2, 1.0)], True),
        ([(1, 3, 1.0), (2, 4, 1.0)], False),
    ])
    def test_hint(self, terms, expected):
        assert bounded_below_hint(PotentialSpec.from_terms(terms, kappa=1.0)) is expected

    def test_flagged_cross_term_is_unbounded(self):
        spec = PotentialSpec.from_terms([(1, 2, 1.0), (2, 1, -1.0)], kappa=1.0)
        phi = np.array([10.0, 100.0, 1000.0]).astype(complex)
        values = eval_V(phi, np.abs(phi) ** 2 / 2, spec)
        np.testing.assert_allclose(values, -np.abs(phi) ** 6 / 4)
        assert not bounded_below_hint(spec)

    def test_zero_potential_is_bounded(self):
        assert bounded_below_hint(PotentialSpec())


def test_gradient_norms_vanish_for_zero_scalar():
    grid = Grid(nx=16, ny=16, lx=1.0, ly=1.0)
    spec = PotentialSpec.from_terms([(1, 1, 1.0)], kappa=1.0)
    norms = dV_dphi_norms(grid.zeros(dtype=complex), np.ones(grid.shape), spec, grid)
    assert norms == (0.0, 0.0, 0.0)
