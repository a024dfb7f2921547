"""Linear algebra kernels: examples, contracts and cross-oracle properties."""

import numpy as np
import pytest

from harmonicq import linalg


def random_stable(rng, n, margin=0.5):
    a = rng.standard_normal((n, n))
    return a - (np.max(np.real(np.linalg.eigvals(a))) + margin) * np.eye(n)


def random_psd(rng, n):
    g = rng.standard_normal((n, n))
    return g @ g.T


class TestSymEigen:
    def test_identity(self):
        w, _ = linalg.sym_eigen(np.eye(3))
        assert np.allclose(w, [1.0, 1.0, 1.0])

    def test_diagonal_sorted(self):
        w, _ = linalg.sym_eigen(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(w, [1.0, 2.0, 3.0])

    def test_two_by_two_characteristic_polynomial(self):
        # det([[2-x, 1], [1, 2-x]]) = x^2 - 4x + 3 -> roots 1, 3
        w, v = linalg.sym_eigen([[2.0, 1.0], [1.0, 2.0]])
        assert np.allclose(w, [1.0, 3.0], atol=1e-12)
        assert np.max(np.abs(v @ v.T - np.eye(2))) <= 1e-10

    def test_rejects_non_symmetric(self):
        with pytest.raises(ValueError, match="not symmetric"):
            linalg.sym_eigen([[0.0, 1.0], [0.0, 0.0]])

    def test_reconstruction_random(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = rng.integers(2, 9)
            m = random_psd(rng, n) - 2.0 * np.eye(n)
            w, v = linalg.sym_eigen(m)
            rebuilt = (v * w) @ v.T
            scale = np.max(np.abs(m))
            assert np.max(np.abs(rebuilt - m)) <= 1e-10 * scale
            assert np.max(np.abs(v @ v.T - np.eye(n))) <= 1e-10


class TestSymSqrt:
    def test_identity(self):
        assert np.allclose(linalg.sym_sqrt(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        assert np.allclose(linalg.sym_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_two_by_two_squares_back(self):
        # candidate [[2,1],[1,2]] squares to [[5,4],[4,5]]
        root = linalg.sym_sqrt([[5.0, 4.0], [4.0, 5.0]])
        assert np.allclose(root, [[2.0, 1.0], [1.0, 2.0]], atol=1e-12)
        assert np.max(np.abs(root @ root - [[5.0, 4.0], [4.0, 5.0]])) <= 1e-10 * 5.0

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError, match="not positive semidefinite"):
            linalg.sym_sqrt(np.diag([1.0, -1.0]))

    def test_clamps_tiny_negative(self):
        m = np.diag([1.0, -1e-14])
        root = linalg.sym_sqrt(m)
        assert root[1, 1] == 0.0

    def test_idempotence_random(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = rng.integers(2, 9)
            m = random_psd(rng, n)
            root = linalg.sym_sqrt(m)
            assert np.max(np.abs(root @ root - m)) <= 1e-9 * np.max(np.abs(m))


class TestExpm:
    def test_zero(self):
        assert np.allclose(linalg.expm(np.zeros((3, 3))), np.eye(3))

    def test_diagonal(self):
        out = linalg.expm(np.diag([1.0, -1.0]))
        assert np.allclose(out, np.diag([np.e, 1.0 / np.e]), rtol=1e-12)

    def test_rotation_closed_form(self):
        out = linalg.expm([[0.0, -1.0], [1.0, 0.0]])
        expected = [[np.cos(1.0), -np.sin(1.0)], [np.sin(1.0), np.cos(1.0)]]
        assert np.allclose(out, expected, atol=1e-14)

    def test_taylor_reference_small_norm(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = 0.1 * rng.standard_normal((4, 4))
            term = np.eye(4)
            total = np.eye(4)
            for k in range(1, 30):
                term = term @ a / k
                total = total + term
            out = linalg.expm(a)
            assert np.max(np.abs(out - total)) <= 1e-10 * np.max(np.abs(total))

    def test_semigroup_property(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            a = random_stable(rng, 5)
            s, t = rng.uniform(0.0, 2.0, size=2)
            whole = linalg.expm(a * (s + t))
            split = linalg.expm(a * s) @ linalg.expm(a * t)
            assert np.linalg.norm(whole - split) <= 1e-8 * np.linalg.norm(whole)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            linalg.expm(np.ones((2, 3)))


class TestSolveLyapunov:
    def test_scalar_decoupling(self):
        m = linalg.solve_lyapunov(-np.eye(2), 2.0 * np.eye(2))
        assert np.allclose(m, np.eye(2), atol=1e-13)

    def test_diagonal_case(self):
        m = linalg.solve_lyapunov(np.diag([-1.0, -2.0]), np.diag([2.0, 4.0]))
        assert np.allclose(m, np.eye(2), atol=1e-13)

    def test_rejects_unstable(self):
        with pytest.raises(ValueError, match="spectral abscissa"):
            linalg.solve_lyapunov(np.diag([-1.0, 0.5]), np.eye(2))

    def test_residual_and_psd_random(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = rng.integers(2, 9)
            a = random_stable(rng, n)
            q = random_psd(rng, n)
            m = linalg.solve_lyapunov(a, q)
            residual = np.max(np.abs(a @ m + m @ a.T + q))
            assert residual <= 1e-10 * np.max(np.abs(q))
            assert np.min(np.linalg.eigvalsh(m)) >= -1e-12 * np.max(np.abs(m))

    def test_matches_covariance_integral(self):
        # quadrature oracle for the integral representation of the solution
        rng = np.random.default_rng(6)
        nodes, weights = np.polynomial.legendre.leggauss(40)
        for _ in range(5):
            n = rng.integers(2, 9)
            a = random_stable(rng, n)
            q = random_psd(rng, n)
            m = linalg.solve_lyapunov(a, q)
            horizon = 50.0 / abs(linalg.spectral_abscissa(a))
            panels = 40
            edges = np.linspace(0.0, horizon, panels + 1)
            quad = np.zeros_like(q)
            for lo, hi in zip(edges[:-1], edges[1:]):
                half = 0.5 * (hi - lo)
                mid = 0.5 * (hi + lo)
                for node, weight in zip(nodes, weights):
                    e = linalg.expm((mid + half * node) * a)
                    quad += half * weight * (e @ q @ e.T)
            assert np.max(np.abs(quad - m)) <= 1e-6 * np.max(np.abs(m))


class TestSpectralAbscissa:
    def test_diagonal(self):
        assert linalg.spectral_abscissa(np.diag([-1.0, -3.0])) == -1.0

    def test_purely_imaginary(self):
        assert abs(linalg.spectral_abscissa([[0.0, -1.0], [1.0, 0.0]])) <= 1e-12

    def test_accuracy_random(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            lams = rng.uniform(-3.0, -0.1, size=6)
            basis = rng.standard_normal((6, 6)) + 3.0 * np.eye(6)
            a = basis @ np.diag(lams) @ np.linalg.inv(basis)
            got = linalg.spectral_abscissa(a)
            assert abs(got - np.max(lams)) <= 1e-8 * abs(np.max(lams))


class TestControllability:
    def test_scalar(self):
        ok, rank = linalg.is_controllable([[0.0]], [[1.0]])
        assert ok and rank == 1

    def test_unreachable_mode(self):
        ok, rank = linalg.is_controllable(np.diag([-1.0, -2.0]), [[1.0], [0.0]])
        assert not ok and rank == 1

    def test_damped_end_chain(self):
        # 3-oscillator chain, noise enters only on the first momentum
        k = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
        a = np.zeros((6, 6))
        a[:3, :3] = -np.diag([1.0, 0.0, 0.0])
        a[:3, 3:] = -k
        a[3:, :3] = np.eye(3)
        b = np.zeros((6, 1))
        b[0, 0] = 1.0
        ok, rank = linalg.is_controllable(a, b)
        # oracle: explicit Krylov matrix rank
        krylov = linalg.controllability_matrix(a, b)
        assert np.linalg.matrix_rank(krylov) == 6
        assert ok and rank == 6
