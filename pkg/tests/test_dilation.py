import math

import numpy as np
import pytest
from scipy.linalg import expm

from nhbraid import dilation, model
from nhbraid.errors import MetricDegenerate


def family(alpha, k1, k2):
    return model.hamiltonian(model.ModelParams(alpha, k1, k2))


def margin_limited_T(H, target=1e-3, Tmax=2.0):
    """Largest grid time with metric margin above target (default M0)."""
    ts = np.linspace(0.0, Tmax, 201)
    good = 0.0
    for t in ts[1:]:
        if dilation.metric_margin(H, float(t), samples=1) < target:
            break
        good = float(t)
    return 0.8 * good if good > 0 else 0.0


def random_points(seed, n):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        a = float(rng.uniform(0.0, 3.2))
        k1, k2 = (float(v) for v in rng.uniform(-1.5, 1.5, 2))
        H = family(a, k1, k2)
        T = margin_limited_T(H)
        if T > 0.02:
            out.append((a, k1, k2, T))
    return out


class TestMetric:
    def test_initial_time(self):
        H = family(1.0, 0.2, 0.3)
        M0 = 1.3 * np.eye(3)
        assert np.abs(dilation.metric_M(H, 0.0, M0) - M0).max() < 1e-14

    def test_hermitian_generator_constant_metric(self):
        H = np.array([[0.5, 1.0, 0.0], [1.0, -0.25, 0.5], [0.0, 0.5, 0.1]],
                     dtype=complex)
        M0 = 1.3 * np.eye(3)
        for t in (0.3, 1.7, 4.0):
            assert np.abs(dilation.metric_M(H, t, M0) - M0).max() < 1e-12

    def test_short_time_expansion(self):
        H = family(3.0, 0.0, 0.0)
        M0 = 1.3 * np.eye(3)
        t = 1e-5
        got = dilation.metric_M(H, t, M0)
        lin = M0 + t * (-1j * H.conj().T @ M0 + 1j * M0 @ H)
        assert np.abs(got - lin).max() < 5e-9  # O(t^2) remainder


class TestBuildDilation:
    def test_hermitian_generator_decouples(self):
        H = np.array([[0.5, 1.0, 0.0], [1.0, -0.25, 0.5], [0.0, 0.5, 0.1]],
                     dtype=complex)
        s = 1.7
        bundle = dilation.build_dilation(H, T=1.0, steps=20, s=s)
        for k in range(len(bundle.time_grid)):
            assert np.abs(bundle.Xi[k] - s * H).max() < 1e-9
            assert np.abs(bundle.Lambda[k] - s * H).max() < 1e-9
            assert np.abs(bundle.eta[k] - math.sqrt(0.3) * np.eye(3)).max() < 1e-9

    def test_default_metric_weight(self):
        H = family(0.5, 0.3, -0.2)
        bundle = dilation.build_dilation(H, T=0.05, steps=10)
        assert np.abs(bundle.M[0] - 1.3 * np.eye(3)).max() < 1e-14
        assert np.abs(bundle.eta[0] - math.sqrt(0.3) * np.eye(3)).max() < 1e-12

    def test_blocks_hermitian_and_eta_consistent(self):
        for (a, k1, k2, T) in random_points(40, 5):
            H = family(a, k1, k2)
            bundle = dilation.build_dilation(H, T=T, steps=100)
            n = len(bundle.time_grid)
            for k in range(0, n, 10):
                Xi, Lam, eta, M = (bundle.Xi[k], bundle.Lambda[k],
                                   bundle.eta[k], bundle.M[k])
                assert np.abs(Xi - Xi.conj().T).max() < 1e-10
                assert np.abs(Lam - Lam.conj().T).max() < 1e-10
                assert np.abs(eta @ eta - (M - np.eye(3))).max() < 1e-8

    def test_eta_rate_matches_finite_difference(self):
        H = family(1.2, 0.4, 0.6)
        M0 = 1.3 * np.eye(3)
        t0, h = 0.02, 1e-4

        def eta_at(t):
            M = dilation.metric_M(H, t, M0)
            w, Q = np.linalg.eigh((M + M.conj().T) / 2 - np.eye(3))
            return (Q * np.sqrt(w)) @ Q.conj().T

        M = dilation.metric_M(H, t0, M0)
        Mdot = -1j * H.conj().T @ M + 1j * M @ H
        _, etadot = dilation._eta_and_rate(M, Mdot)
        fd_h = (eta_at(t0 + h) - eta_at(t0 - h)) / (2 * h)
        fd_h2 = (eta_at(t0 + h / 2) - eta_at(t0 - h / 2)) / h
        err_h = np.abs(fd_h - etadot).max()
        err_h2 = np.abs(fd_h2 - etadot).max()
        assert err_h < 1e-6
        assert err_h2 < 0.3 * err_h  # O(h^2) central differences

    def test_metric_degenerate_raises(self):
        H = family(1.0, 0.2, 0.3)
        with pytest.raises(MetricDegenerate):
            dilation.build_dilation(H, T=2.0, steps=50)
        with pytest.raises(MetricDegenerate):
            dilation.build_dilation(H, T=0.05, M0=0.9 * np.eye(3))

    def test_zero_scale_rejected(self):
        with pytest.raises(ValueError):
            dilation.build_dilation(np.eye(3), T=1.0, s=0.0)


class TestEmbedding:
    def test_reproduces_nh_evolution(self):
        rng = np.random.default_rng(41)
        for (a, k1, k2, T) in random_points(42, 4):
            H = family(a, k1, k2)
            assert dilation.metric_margin(H, T) > 1e-3
            bundle = dilation.build_dilation(H, T=T, steps=50)
            psi0 = rng.normal(size=3) + 1j * rng.normal(size=3)
            residual = dilation.verify_embedding(bundle, H, psi0, T)
            assert residual < 1e-6

    def test_hermitian_generator_roundoff(self):
        H = np.array([[0.5, 1.0, 0.0], [1.0, -0.25, 0.5], [0.0, 0.5, 0.1]],
                     dtype=complex)
        bundle = dilation.build_dilation(H, T=0.5, steps=20)
        residual = dilation.verify_embedding(bundle, H, np.array([1.0, 0, 0]), 0.5)
        assert residual < 1e-9

    def test_eigenvector_stays_parallel(self):
        from nhbraid.spectral import eigensolve
        a, k1, k2 = 0.8, 0.5, -0.4
        H = family(a, k1, k2)
        T = margin_limited_T(H)
        spec = eigensolve(H, want_vectors=True)
        psi0 = spec.eigenvectors[0]
        bundle = dilation.build_dilation(H, T=T, steps=50)
        residual = dilation.verify_embedding(bundle, H, psi0, T)
        assert residual < 1e-6
        # direct check of stationarity under the plain NH evolution
        prop = expm(-1j * H * T) @ psi0
        overlap = abs(np.vdot(prop, psi0)) / (np.linalg.norm(prop))
        assert overlap > 1.0 - 1e-9

    def test_scaled_generator(self):
        (a, k1, k2, T) = random_points(43, 1)[0]
        H = family(a, k1, k2)
        s = 0.25
        bundle = dilation.build_dilation(H, T=T, steps=50, s=s)
        psi0 = np.array([1.0, 1.0, 1.0]) / math.sqrt(3)
        assert dilation.verify_embedding(bundle, H, psi0, T) < 1e-6
