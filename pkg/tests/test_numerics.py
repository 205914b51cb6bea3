import numpy as np
import pytest

from adaptnet import (lyapunov_quadrature_oracle, matrix_exponential,
                      solve_lyapunov_continuous, solve_lyapunov_discrete,
                      spectral_radius)
from adaptnet.errors import AccuracyError, StabilityError


def random_stable(rng, n, skew_scale=0.2):
    """Random matrix whose spectrum lies in the open right half-plane."""
    g = rng.standard_normal((n, n))
    sym = g @ g.T / n + 0.3 * np.eye(n)
    skew = rng.standard_normal((n, n))
    return sym + skew_scale * (skew - skew.T)


def random_psd(rng, n):
    b = rng.standard_normal((n, n))
    return b @ b.T / n


class TestSpectralRadius:
    def test_identity(self):
        assert spectral_radius(np.eye(3)) == pytest.approx(1.0)

    def test_diagonal_takes_magnitude(self):
        assert spectral_radius(np.diag([-3.0, 2.0])) == pytest.approx(3.0)

    def test_rotation_has_unit_radius(self):
        assert spectral_radius([[0.0, 1.0], [-1.0, 0.0]]) == pytest.approx(1.0)


class TestMatrixExponential:
    def test_zero_matrix(self):
        assert np.allclose(matrix_exponential(np.zeros((3, 3))), np.eye(3),
                           atol=1e-15)

    def test_diagonal(self):
        out = matrix_exponential(np.diag([1.0, 2.0]))
        assert np.allclose(out, np.diag([np.e, np.e ** 2]), rtol=1e-14)

    def test_nilpotent_series_terminates(self):
        out = matrix_exponential(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(out, [[1.0, 1.0], [0.0, 1.0]], atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_symmetric_matches_eigendecomposition(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        s = rng.standard_normal((n, n))
        s = s + s.T
        s *= 10.0 / max(np.linalg.norm(s, 2), 1e-12) * rng.random()
        vals, vecs = np.linalg.eigh(s)
        oracle = (vecs * np.exp(vals)) @ vecs.T
        out = matrix_exponential(s)
        rel = np.linalg.norm(out - oracle, "fro") / np.linalg.norm(oracle, "fro")
        assert rel < 1e-13

    @pytest.mark.parametrize("seed", range(5))
    def test_inverse_group_property(self, seed):
        rng = np.random.default_rng(100 + seed)
        a = rng.standard_normal((5, 5))
        prod = matrix_exponential(a) @ matrix_exponential(-a)
        assert np.allclose(prod, np.eye(5), atol=1e-10)


class TestContinuousLyapunov:
    def test_identity_pair(self):
        x = solve_lyapunov_continuous(np.eye(2), np.eye(2))
        assert np.allclose(x, 0.5 * np.eye(2), atol=1e-14)

    def test_diagonal_entries(self):
        x = solve_lyapunov_continuous(np.diag([1.0, 2.0]), np.eye(2))
        assert np.allclose(x, np.diag([0.5, 0.25]), atol=1e-14)

    def test_half_hessian_weighting_gives_quarter_identity(self):
        h = np.diag([2.0, 4.0])
        x = solve_lyapunov_continuous(h, h / 2.0)
        assert np.allclose(x, 0.25 * np.eye(2), atol=1e-12)

    def test_unstable_matrix_rejected_with_extreme(self):
        with pytest.raises(StabilityError) as err:
            solve_lyapunov_continuous(-np.eye(2), np.eye(2))
        assert err.value.extreme == pytest.approx(-1.0)

    def test_marginally_stable_rotation_rejected(self):
        with pytest.raises(StabilityError):
            solve_lyapunov_continuous(np.array([[0.0, 1.0], [-1.0, 0.0]]),
                                      np.eye(2))

    def test_asymmetric_weighting_rejected(self):
        with pytest.raises(ValueError):
            solve_lyapunov_continuous(np.eye(2), np.array([[1.0, 0.5],
                                                           [0.0, 1.0]]))

    @pytest.mark.parametrize("seed", range(10))
    def test_residual_symmetry_and_psd(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        h = random_stable(rng, n)
        sigma = np.eye(n) if seed % 2 else random_psd(rng, n)
        x = solve_lyapunov_continuous(h, sigma)
        assert np.abs(x - x.T).max() < 1e-12
        residual = np.linalg.norm(h.T @ x + x @ h - sigma, "fro")
        assert residual <= 1e-10 * np.linalg.norm(sigma, "fro")
        assert np.linalg.eigvalsh(x).min() >= -1e-12


class TestQuadratureOracle:
    def test_identity_pair(self):
        x = lyapunov_quadrature_oracle(np.eye(2), np.eye(2))
        assert np.allclose(x, 0.5 * np.eye(2), atol=1e-10)

    def test_diagonal_scalar_integrals(self):
        x = lyapunov_quadrature_oracle(np.diag([1.0, 2.0]), np.eye(2))
        assert np.allclose(x, np.diag([0.5, 0.25]), atol=1e-10)

    @pytest.mark.parametrize("seed", [0, 1])
    def test_cross_solver_agreement(self, seed):
        rng = np.random.default_rng(seed)
        h = random_stable(rng, 5)
        sigma = random_psd(rng, 5)
        x_direct = solve_lyapunov_continuous(h, sigma)
        x_quad = lyapunov_quadrature_oracle(h, sigma)
        rel = (np.linalg.norm(x_direct - x_quad, "fro")
               / np.linalg.norm(x_direct, "fro"))
        assert rel < 1e-8

    def test_too_few_steps_rejected(self):
        with pytest.raises(AccuracyError):
            lyapunov_quadrature_oracle(5.0 * np.eye(3), np.eye(3), steps=10)

    def test_odd_step_count_rejected(self):
        with pytest.raises(ValueError):
            lyapunov_quadrature_oracle(np.eye(2), np.eye(2), steps=401)


class TestDiscreteLyapunov:
    def test_zero_transition_returns_q(self):
        q = np.diag([1.0, 2.0])
        assert np.allclose(solve_lyapunov_discrete(np.zeros((2, 2)), q), q,
                           atol=1e-14)

    def test_scalar_geometric_series(self):
        # pi = pi/4 + 1  =>  pi = 4/3
        pi = solve_lyapunov_discrete(np.array([[0.5]]), np.array([[1.0]]))
        assert np.allclose(pi, 4.0 / 3.0, atol=1e-14)

    def test_small_step_matches_closed_form(self):
        mu, h = 1e-3, 2.0
        b = (1.0 - mu * h) * np.eye(2)
        q = mu ** 2 * np.eye(2)
        pi = solve_lyapunov_discrete(b, q)
        exact = mu ** 2 / (1.0 - (1.0 - mu * h) ** 2)
        assert np.allclose(pi, exact * np.eye(2), rtol=1e-12)
        assert exact == pytest.approx(mu / (2 * h), rel=2 * mu)

    def test_unstable_rejected(self):
        with pytest.raises(StabilityError) as err:
            solve_lyapunov_discrete(np.eye(2), np.eye(2))
        assert err.value.extreme >= 1.0

    @pytest.mark.parametrize("seed", range(5))
    def test_residual_on_random_contractions(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        b = rng.standard_normal((n, n))
        b *= 0.9 / max(spectral_radius(b), 1e-12)
        q = random_psd(rng, n)
        pi = solve_lyapunov_discrete(b, q)
        residual = np.linalg.norm(pi - b @ pi @ b.T - q, "fro")
        assert residual <= 1e-10 * np.linalg.norm(q, "fro")
