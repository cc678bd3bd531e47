import math

import numpy as np
import pytest

from nhbraid import model, reconstruct, spectral
from nhbraid.errors import RankDeficient

SQ2 = math.sqrt(2.0)

U1 = np.array([[0, -1j, 0], [-1j, 0, 0], [0, 0, 1]], dtype=complex)
U2 = np.array([[1, 0, 0], [0, 1 / SQ2, -1j / SQ2], [0, -1j / SQ2, 1 / SQ2]],
              dtype=complex)
U3 = np.array([[1 / SQ2, -1j / SQ2, 0], [-1j / SQ2, 1 / SQ2, 0], [0, 0, 1]],
              dtype=complex)


def loop_params(alpha, theta, r=1.4):
    return model.loop_point(model.Loop(alpha, r), theta)


def labeled_eigs(p):
    eigs = spectral.eigensolve(model.hamiltonian(p)).eigenvalues
    return eigs[np.lexsort((-eigs.imag, -eigs.real))]


def unitary_route_ratios(p, label):
    """Independent oracle: rotate the eigenstate and take raw populations."""
    spec = spectral.eigensolve(model.hamiltonian(p), want_vectors=True)
    order = np.lexsort((-spec.eigenvalues.imag, -spec.eigenvalues.real))
    psi = spec.eigenvectors[order][label - 1]
    va = U2 @ U1 @ psi
    vb = U3 @ U2 @ U1 @ psi
    return (abs(va[1]) ** 2 / abs(va[0]) ** 2,
            abs(vb[1]) ** 2 / abs(vb[0]) ** 2)


class TestForwardRatios:
    def test_matches_unitary_route(self):
        rng = np.random.default_rng(60)
        checked = 0
        while checked < 40:
            p = loop_params(rng.uniform(0, 3.2), rng.uniform(0, 2 * math.pi))
            ratios = reconstruct.forward_ratios(p)
            for m, label in enumerate(ratios.indices):
                ra, rb = unitary_route_ratios(p, label)
                assert abs(ra - ratios.ratio_a[m]) < 1e-8 * (1 + ra)
                assert abs(rb - ratios.ratio_b[m]) < 1e-8 * (1 + rb)
            checked += 1

    def test_default_picks_best_conditioned(self):
        p = loop_params(0.39, 11 * math.pi / 8)
        ratios = reconstruct.forward_ratios(p)
        c2 = model.poly_coeffs(p).c2
        eigs = labeled_eigs(p)
        mags = sorted((abs(c2 + e) for e in eigs), reverse=True)
        got = sorted((math.sqrt(2 * r) for r in ratios.ratio_a), reverse=True)
        assert np.allclose(got, mags[:2])

    def test_invariant_under_frame_shift(self):
        # the ratios depend on (c2, E) only through z = c2 + E
        p = loop_params(1.1, 0.7)
        c2 = model.poly_coeffs(p).c2
        eigs = labeled_eigs(p)
        d = 0.37 - 0.21j
        for e in eigs:
            a0, b0 = reconstruct._ratio_pair(c2 + e)
            a1, b1 = reconstruct._ratio_pair((c2 - d) + (e + d))
            assert abs(a0 - a1) < 1e-12 * (1 + a0)
            assert abs(b0 - b1) < 1e-12 * (1 + b0)

    def test_validation(self):
        with pytest.raises(ValueError):
            reconstruct.PopulationRatios((1, 1), (0.1, 0.2), (0.3, 0.4))
        with pytest.raises(ValueError):
            reconstruct.PopulationRatios((1, 2), (-0.1, 0.2), (0.3, 0.4))


class TestSolveEigenvalues:
    @pytest.mark.parametrize("theta,paper_triple", [
        (11 * math.pi / 8, (2.3 - 0.9j, 0.5 + 0.2j, -1.2 - 0.6j)),
        (13 * math.pi / 8, (2.4 - 1.0j, 0.2 - 0.6j, -1.0 + 0.3j)),
    ])
    def test_golden_recovery(self, theta, paper_triple):
        p = loop_params(0.39, theta)
        truth = np.sort_complex(labeled_eigs(p))
        got, residual = reconstruct.solve_eigenvalues(
            reconstruct.forward_ratios(p), seed=1)
        got = np.sort_complex(got)
        assert np.abs(got - truth).max() < 1e-6
        assert residual < 1e-8
        # two-digit rounding in the quoted values: 0.05 per component
        diff = got - np.sort_complex(np.array(paper_triple))
        assert max(np.abs(diff.real).max(), np.abs(diff.imag).max()) < 0.05

    def test_round_trip_random_points(self):
        rng = np.random.default_rng(61)
        done = 0
        while done < 25:
            alpha = rng.uniform(0.0, 3.2)
            theta = rng.uniform(0.0, 2 * math.pi)
            p = loop_params(alpha, theta)
            truth = labeled_eigs(p)
            if abs(truth.sum()) < 0.2:
                continue
            got, _ = reconstruct.solve_eigenvalues(
                reconstruct.forward_ratios(p), seed=done)
            assert np.abs(np.sort_complex(got) - np.sort_complex(truth)).max() < 1e-6
            done += 1

    def test_constraint_satisfied_by_recovered(self):
        p = loop_params(2.4, 1.9)
        got, _ = reconstruct.solve_eigenvalues(reconstruct.forward_ratios(p), seed=3)
        s = got.sum()
        pairs = got[0] * got[1] + got[1] * got[2] + got[0] * got[2]
        assert abs(got.prod() - s * (pairs + 2.0)) < 1e-8

    def test_labels_follow_indices(self):
        p = loop_params(0.8, 2.6)
        ratios = reconstruct.forward_ratios(p)
        got, _ = reconstruct.solve_eigenvalues(ratios, seed=5)
        truth = labeled_eigs(p)
        for label in ratios.indices:
            assert abs(got[label - 1] - truth[label - 1]) < 1e-6

    def test_noise_monte_carlo(self):
        # 1% multiplicative ratio noise: 95% of trials within 0.1
        rng = np.random.default_rng(62)
        p = loop_params(0.39, 11 * math.pi / 8)
        truth = np.sort_complex(labeled_eigs(p))
        ratios = reconstruct.forward_ratios(p)
        hits = 0
        trials = 200
        for k in range(trials):
            noisy = reconstruct.PopulationRatios(
                ratios.indices,
                tuple(max(v * (1 + 0.01 * rng.standard_normal()), 0.0)
                      for v in ratios.ratio_a),
                tuple(max(v * (1 + 0.01 * rng.standard_normal()), 0.0)
                      for v in ratios.ratio_b))
            try:
                got, _ = reconstruct.solve_eigenvalues(noisy, seed=100 + k,
                                                       n_starts=24)
            except Exception:
                continue
            if np.abs(np.sort_complex(got) - truth).max() < 0.1:
                hits += 1
        assert hits >= 0.95 * trials


class TestGenericFit:
    def schedule(self):
        # Population fractions see each evolved state projectively (4 real
        # dof per init/time pair), so 24 values must spread over six pairs
        # and two incommensurate times to pin all 16 parameters uniquely.
        s3 = 1 / math.sqrt(3)
        inits = [np.array([1, 0, 0], complex), np.array([0, 1, 0], complex),
                 np.array([1, 1, 1], complex) * s3,
                 np.array([1, 1j, -1], complex) * s3,
                 np.array([1, -1, 1j], complex) * s3,
                 np.array([2, 1, -1], complex) / math.sqrt(6)]
        bx = np.array([[1, SQ2, 1], [SQ2, 0, -SQ2], [1, -SQ2, 1]], complex) / 2
        by = np.array([[1, 1j * SQ2, -1], [SQ2, 0, SQ2], [1, -1j * SQ2, -1]],
                      complex) / 2
        bases = [np.eye(3, dtype=complex), bx, by]
        pairs = [(0, 0.7), (1, 0.7), (2, 0.7), (3, 1.31), (4, 1.31), (5, 1.31)]
        sched = []
        for k, (si, t) in enumerate(pairs):
            for b in (bases[k % 3], bases[(k + 1) % 3]):
                for i in (0, 1):
                    sched.append((inits[si], b, t, i))
        return sched

    def measurements_for(self, H):
        return [reconstruct.MeasurementRecord(s, b, t, i,
                                              reconstruct.predicted_value(
                                                  H, reconstruct.MeasurementRecord(
                                                      s, b, t, i, 0.0)))
                for (s, b, t, i) in self.schedule()]

    def test_round_trip(self):
        rng = np.random.default_rng(70)
        truth = reconstruct.GenericH(tuple(rng.normal(size=16)))
        ms = self.measurements_for(truth.matrix)
        assert len(ms) == 24
        fit, residual = reconstruct.generic_fit(ms, seed=0, n_starts=96)
        assert residual < 1e-10
        assert np.abs(np.array(fit.params) - np.array(truth.params)).max() < 1e-5

    def test_optimality_sanity(self):
        rng = np.random.default_rng(73)
        truth = reconstruct.GenericH(tuple(rng.normal(size=16)))
        ms = self.measurements_for(truth.matrix)
        fit, residual = reconstruct.generic_fit(ms, seed=1, n_starts=96)
        res_truth = np.linalg.norm(
            [reconstruct.predicted_value(truth.matrix, m) - m.value for m in ms])
        assert residual <= res_truth + 1e-10

    def test_rank_deficient_detected(self):
        # a single projective basis at one time cannot pin 16 parameters
        rng = np.random.default_rng(65)
        truth = reconstruct.GenericH(tuple(rng.normal(size=16)))
        basis = np.eye(3, dtype=complex)
        init = np.array([1, 0, 0], complex)
        ms = []
        for t in np.linspace(0.1, 2.0, 8):
            for i in (0, 1):
                m = reconstruct.MeasurementRecord(init, basis, float(t), i, 0.0)
                ms.append(reconstruct.MeasurementRecord(
                    init, basis, float(t), i, reconstruct.predicted_value(truth.matrix, m)))
        with pytest.raises(RankDeficient):
            reconstruct.generic_fit(ms, seed=2, n_starts=8)

    def test_trace_shift_same_band_gaps(self):
        # H and H - d*I have identical eigenvalue differences, hence braids
        rng = np.random.default_rng(66)
        H = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        d = 0.8 - 0.3j
        e1 = np.sort_complex(spectral.eigensolve(H).eigenvalues)
        e2 = np.sort_complex(spectral.eigensolve(H - d * np.eye(3)).eigenvalues)
        gaps1 = np.sort_complex(np.array([e1[0] - e1[1], e1[1] - e1[2], e1[0] - e1[2]]))
        gaps2 = np.sort_complex(np.array([e2[0] - e2[1], e2[1] - e2[2], e2[0] - e2[2]]))
        assert np.abs(gaps1 - gaps2).max() < 1e-9

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(67)
        truth = reconstruct.GenericH(tuple(rng.normal(size=16)))
        basis = np.eye(3, dtype=complex)
        init = np.array([0.4, -0.7j, 0.59], complex)
        m0 = reconstruct.MeasurementRecord(init, basis, 1.1, 0, 0.0)
        m1 = reconstruct.MeasurementRecord(init * np.exp(0.73j), basis, 1.1, 0, 0.0)
        assert abs(reconstruct.predicted_value(truth.matrix, m0)
                   - reconstruct.predicted_value(truth.matrix, m1)) < 1e-12

    def test_traceless_by_construction(self):
        rng = np.random.default_rng(68)
        g = reconstruct.GenericH(tuple(rng.normal(size=16)))
        assert abs(np.trace(g.matrix)) < 1e-15
        back = reconstruct.GenericH.from_matrix(g.matrix + 2.3j * np.eye(3))
        assert np.abs(np.array(back.params) - np.array(g.params)).max() < 1e-12
