"""Linear-SDE engine: exact sampling, lagged covariance, finite-time law."""

import math
import warnings

import numpy as np
import pytest

from harmonicq import linalg, ou
from harmonicq.vargamma import VarianceGammaLaw


def isotropic_model(n=2):
    return ou.build_model(-np.eye(n), math.sqrt(2.0) * np.eye(n))


def random_model(rng, n):
    a = rng.standard_normal((n, n))
    a -= (np.max(np.real(np.linalg.eigvals(a))) + 0.6) * np.eye(n)
    b = rng.standard_normal((n, n))
    return ou.build_model(a, b)


class TestBuildModel:
    def test_scalar(self):
        model = ou.build_model([[-1.0]], [[math.sqrt(2.0)]])
        assert model.m_stat[0, 0] == pytest.approx(1.0, rel=1e-12)
        assert model.abscissa == -1.0
        assert model.controllable

    def test_single_oscillator_unit_covariance(self):
        # hand-solved 2x2 Lyapunov: m11 + m12 = 1, m12 = 0, m22 = m11
        a = np.array([[-1.0, -1.0], [1.0, 0.0]])
        b = np.diag([math.sqrt(2.0), 0.0])
        model = ou.build_model(a, b)
        assert np.allclose(model.m_stat, np.eye(2), atol=1e-12)

    def test_rejects_unstable(self):
        with pytest.raises(ValueError, match="not stable"):
            ou.build_model([[0.0]], [[1.0]])

    def test_uncontrollable_warns(self):
        with pytest.warns(RuntimeWarning, match="not controllable"):
            model = ou.build_model(np.diag([-1.0, -2.0]), np.array([[1.0], [0.0]]))
        assert not model.controllable
        assert model.krylov_rank == 1

    def test_lyapunov_certificate(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            model = random_model(rng, int(rng.integers(2, 7)))
            residual = np.max(
                np.abs(model.a @ model.m_stat + model.m_stat @ model.a.T + model.b @ model.b.T)
            )
            assert residual <= 1e-10 * np.max(np.abs(model.b @ model.b.T))
            assert np.min(np.linalg.eigvalsh(model.m_stat)) > 0.0


class TestLagCovariance:
    def test_zero_lag_is_stationary(self):
        model = isotropic_model()
        assert np.allclose(model.lag_cov(0.0).delta, model.m_stat)

    def test_scalar_exponential(self):
        model = ou.build_model([[-1.0]], [[math.sqrt(2.0)]])
        assert model.lag_cov(1.0).delta[0, 0] == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_decay_to_zero(self):
        rng = np.random.default_rng(1)
        model = random_model(rng, 4)
        norms = [
            np.linalg.norm(model.lag_cov(t).delta, 2)
            for t in np.linspace(0.0, 20.0 * model.mixing_time, 9)
        ]
        assert norms[-1] <= 1e-6 * norms[0]
        beyond = [n for t, n in zip(np.linspace(0.0, 20.0, 9), norms) if t >= 3.0]
        assert all(x >= y for x, y in zip(beyond, beyond[1:]))

    def test_rejects_negative_lag(self):
        with pytest.raises(ValueError, match=">= 0"):
            isotropic_model().lag_cov(-0.1)


class TestStationaryPairSampling:
    def test_zero_lag_identical(self):
        model = isotropic_model()
        x0, xt = model.sample_stationary_pair(0.0, np.random.default_rng(0), 100)
        assert np.array_equal(x0, xt)

    def test_scalar_correlation(self):
        model = ou.build_model([[-1.0]], [[math.sqrt(2.0)]])
        x0, xt = model.sample_stationary_pair(1.0, np.random.default_rng(1), 200_000)
        corr = np.corrcoef(x0[:, 0], xt[:, 0])[0, 1]
        assert corr == pytest.approx(math.exp(-1.0), abs=4.0 / math.sqrt(200_000))

    def test_large_lag_decorrelated(self):
        model = isotropic_model()
        x0, xt = model.sample_stationary_pair(25.0, np.random.default_rng(2), 100_000)
        cross = x0.T @ xt / x0.shape[0]
        assert np.max(np.abs(cross)) <= 4.0 / math.sqrt(100_000)

    def test_joint_covariance_matches_analytic(self):
        rng = np.random.default_rng(3)
        model = random_model(rng, 3)
        t = 0.7
        count = 100_000
        x0, xt = model.sample_stationary_pair(t, np.random.default_rng(4), count)
        joint = np.hstack([x0, xt])
        emp = joint.T @ joint / count
        delta = model.lag_cov(t).delta
        expected = np.block([[model.m_stat, delta.T], [delta, model.m_stat]])
        band = 4.0 * np.max(np.abs(expected)) / math.sqrt(count)
        assert np.max(np.abs(emp - expected)) <= band

    def test_requires_controllable(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model = ou.build_model(np.diag([-1.0, -2.0]), np.array([[1.0], [0.0]]))
        with pytest.raises(ValueError, match="controllable"):
            model.sample_stationary_pair(1.0, np.random.default_rng(0), 10)


class TestPathSampling:
    def test_single_point_is_stationary_draw(self):
        model = isotropic_model()
        path = model.sample_path([0.0], np.random.default_rng(0))
        assert path.shape == (1, 2)

    def test_scalar_step_variance(self):
        # M_h = 1 - e^{-2h}; at h = ln 2 the innovation variance is 3/4
        model = ou.build_model([[-1.0]], [[math.sqrt(2.0)]])
        h = math.log(2.0)
        rng = np.random.default_rng(5)
        path = model.sample_path(np.arange(50_001) * h, rng)[:, 0]
        innovations = path[1:] - math.exp(-h) * path[:-1]
        assert np.var(innovations) == pytest.approx(0.75, rel=0.03)

    def test_per_coordinate_variance(self):
        rng = np.random.default_rng(6)
        model = random_model(rng, 2)
        path = model.sample_path(np.arange(200_000) * 0.05, np.random.default_rng(7))
        got = np.var(path, axis=0)
        expected = np.diag(model.m_stat)
        assert np.max(np.abs(got / expected - 1.0)) <= 0.05

    def test_rejects_unsorted_grid(self):
        with pytest.raises(ValueError, match="ascending"):
            isotropic_model().sample_path([0.0, 1.0, 0.5], np.random.default_rng(0))


class TestFiniteTimeLaw:
    def test_limit_is_identity(self):
        model = isotropic_model()
        law = ou.finite_time_qt_law(model, 0.5 * np.eye(2), t=40.0)
        assert np.max(np.abs(law.mtilde - np.eye(4))) <= 1e-15

    def test_zero_lag_block_structure(self):
        model = isotropic_model()
        law = ou.finite_time_qt_law(model, 0.5 * np.eye(2), t=0.0)
        expected = np.zeros((4, 4))
        expected[2:, 2:] = 2.0 * np.eye(2)
        assert np.max(np.abs(law.mtilde - expected)) <= 1e-12

    def test_char_fn_normalization_and_bound(self):
        rng = np.random.default_rng(8)
        model = random_model(rng, 3)
        g = rng.standard_normal((3, 3))
        observable = g @ g.T + 3.0 * np.eye(3)
        law = ou.finite_time_qt_law(model, observable, t=0.4)
        assert law.char_fn(0.0) == pytest.approx(1.0)
        alphas = np.linspace(-8.0, 8.0, 41)
        assert np.max(np.abs(law.char_fn(alphas))) <= 1.0 + 1e-12

    def test_char_fn_converges_to_vg(self):
        model = isotropic_model()
        law_t = ou.finite_time_qt_law(model, 0.5 * np.eye(2), t=25.0)
        vg = VarianceGammaLaw([1.0, 1.0])
        alphas = np.linspace(-10.0, 10.0, 101)
        assert np.max(np.abs(law_t.char_fn(alphas) - vg.char_fn(alphas))) <= 1e-6

    def test_weak_convergence_of_inverted_density(self):
        # Fourier inversion of the finite-time charfn vs the limit density
        model = isotropic_model()
        law_t = ou.finite_time_qt_law(model, 0.5 * np.eye(2), t=8.0)
        vg = VarianceGammaLaw([1.0, 1.0])
        cutoff, points = 400.0, 80_000
        alphas = np.linspace(0.0, cutoff, points + 1)
        values = law_t.char_fn(alphas)
        weights = np.full(alphas.size, alphas[1])
        weights[0] = weights[-1] = 0.5 * alphas[1]
        s_grid = np.linspace(-6.0, 6.0, 61)
        inverted = np.real(
            np.exp(-1j * np.outer(s_grid, alphas)) @ (values * weights)
        ) / math.pi
        assert np.max(np.abs(inverted - vg.density(s_grid))) <= 1e-3

    def test_path_and_pair_increments_agree(self):
        # distributional match between path-based and pair-based increments:
        # one long skeleton with step t, increments taken every third point
        # so their state gap (2t) leaves only ~e^{-3} residual correlation
        model = isotropic_model()
        lmat = 0.5 * np.eye(2)
        t = 1.5
        count = 100_000
        x0, xt = model.sample_stationary_pair(t, np.random.default_rng(9), count)
        q_pair = np.einsum("ij,ij->i", xt @ lmat, xt) - np.einsum(
            "ij,ij->i", x0 @ lmat, x0
        )
        path = model.sample_path(np.arange(3 * count + 1) * t, np.random.default_rng(10))
        starts = path[: 3 * count : 3]
        stops = path[1 : 3 * count + 1 : 3]
        q_path = np.einsum("ij,ij->i", stops @ lmat, stops) - np.einsum(
            "ij,ij->i", starts @ lmat, starts
        )
        a = np.sort(q_pair)
        b = np.sort(q_path)
        pooled = np.concatenate([a, b])
        cdf_a = np.searchsorted(a, pooled, side="right") / a.size
        cdf_b = np.searchsorted(b, pooled, side="right") / b.size
        ks = np.max(np.abs(cdf_a - cdf_b))
        assert ks <= 1.63 * math.sqrt(2.0 / count)
