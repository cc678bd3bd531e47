import math

import numpy as np
import pytest

from nhbraid import model, spectral
from nhbraid.errors import DegenerateBands, EPOnLoop


def family_matrix(alpha, k1, k2):
    return model.hamiltonian(model.ModelParams(alpha, k1, k2))


class TestCubicRoots:
    def test_residual_bound_over_family(self):
        rng = np.random.default_rng(10)
        for _ in range(10_000):
            p = model.ModelParams(rng.uniform(0, 3.5), rng.uniform(-3, 3),
                                  rng.uniform(-3, 3))
            b, c, d = model.poly_coeffs(p).monic_coefficients()
            roots = spectral.cubic_roots(b, c, d)
            for e in roots:
                val = ((e + b) * e + c) * e + d
                assert abs(val) <= 1e-9 * (1.0 + abs(e) ** 3)

    def test_ordering_deterministic(self):
        roots = spectral.cubic_roots(0.0, -1.0, 0.0)  # roots -1, 0, 1
        assert np.allclose(roots, [-1.0, 0.0, 1.0])


class TestEigensolve:
    def test_triple_root_point(self):
        s = spectral.eigensolve(family_matrix(3.0, 0.0, 0.0))
        assert np.abs(s.eigenvalues).max() == 0.0

    def test_hermitian_matrix_real_spectrum(self):
        H = np.array([[1.0, 2.0 + 1j, 0.5j],
                      [2.0 - 1j, -0.5, 1.0],
                      [-0.5j, 1.0, 0.25]])
        s = spectral.eigensolve(H)
        assert np.abs(s.eigenvalues.imag).max() < 1e-10
        ref = np.sort(np.linalg.eigvalsh(H))
        assert np.abs(np.sort(s.eigenvalues.real) - ref).max() < 1e-9

    def test_golden_triple(self):
        # loop point theta = 11*pi/8 on the r = 1.4 circle, alpha = 0.39
        theta = 11 * math.pi / 8
        H = family_matrix(0.39, 1.4 * math.cos(theta), 1.4 * math.sin(theta))
        eigs = np.sort_complex(spectral.eigensolve(H).eigenvalues)
        want = np.sort_complex(np.array([2.3 - 0.9j, 0.5 + 0.2j, -1.2 - 0.6j]))
        diff = eigs - want  # quoted to two digits: 0.05 per component
        assert max(np.abs(diff.real).max(), np.abs(diff.imag).max()) < 0.05

    def test_eigenvector_residuals(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            H = family_matrix(rng.uniform(0, 3.5), rng.uniform(-3, 3),
                              rng.uniform(-3, 3))
            s = spectral.eigensolve(H, want_vectors=True)
            scale = np.linalg.norm(H, 2)
            for e, v in zip(s.eigenvalues, s.eigenvectors):
                assert abs(np.linalg.norm(v) - 1.0) < 1e-10
                assert np.linalg.norm(H @ v - e * v) <= 1e-8 * scale

    def test_generic_matrix_vectors(self):
        rng = np.random.default_rng(12)
        H = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        s = spectral.eigensolve(H, want_vectors=True)
        for e, v in zip(s.eigenvalues, s.eigenvectors):
            assert np.linalg.norm(H @ v - e * v) <= 1e-8 * np.linalg.norm(H, 2)

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            spectral.eigensolve(np.eye(2))


class TestTrackBands:
    def test_identity_closure_before_transition(self):
        path = spectral.track_bands(model.Loop(0.39, 1.4))
        assert path.closure_permutation() == [1, 2, 3]
        # band 1 has the largest real part at theta = 0
        start = path.bands[:, 0]
        assert start[0].real > start[1].real > start[2].real

    def test_cyclic_closure_after_transition(self):
        path = spectral.track_bands(model.Loop(3.0, 1.4))
        perm = path.closure_permutation()
        assert sorted(perm) == [1, 2, 3] and perm != [1, 2, 3]
        seen, x = set(), 1
        while x not in seen:
            seen.add(x)
            x = perm[x - 1]
        assert len(seen) == 3  # a 3-cycle: back to itself after three loops

    def test_small_loop_constant_bands(self):
        path = spectral.track_bands(model.Loop(0.5, 0.01, center=(2.0, 2.0)))
        assert path.closure_permutation() == [1, 2, 3]
        spread = np.abs(path.bands - path.bands[:, :1]).max()
        assert spread < 0.05

    def test_n_min_independence(self):
        paths = {n: spectral.track_bands(model.Loop(3.0, 1.4), n_min=n)
                 for n in (32, 64, 256)}
        probe = np.linspace(0.1, 2 * math.pi - 0.1, 17)
        ref = np.array([paths[256].values_at(t) for t in probe])
        for n in (32, 64):
            got = np.array([paths[n].values_at(t) for t in probe])
            assert np.abs(got - ref).max() < 1e-6

    def test_ep_on_loop_rejected(self):
        # tiny circle around an exceptional point: |Delta| below the floor
        from nhbraid.eps import refine_ep
        x, y, _ = refine_ep(1.0, (0.46, -1.06))
        with pytest.raises(EPOnLoop):
            spectral.track_bands(model.Loop(1.0, 1e-9, center=(x, y)))


class TestRelativePhases:
    def test_crossing_counts_before_and_after(self):
        path = spectral.track_bands(model.Loop(0.39, 1.4))
        phases = spectral.relative_phases(path)
        # phi_23 crosses pi/2 (mod 2 pi) twice; phi_12 and phi_31 never
        # reach +-pi/2
        def crossings_of(row, level):
            shifted = phases[row] - level
            k = np.round(shifted / (2 * math.pi))
            return int(np.sum(np.abs(np.diff(np.sign(shifted - 2 * math.pi * k))) > 0))

        assert crossings_of(1, math.pi / 2) == 2
        for row in (0, 2):
            g = np.cos(phases[row])
            assert np.sign(g).min() == np.sign(g).max()

        path3 = spectral.track_bands(model.Loop(3.0, 1.4))
        events = spectral.detect_crossings(path3)
        assert len(events) == 4

    def test_antisymmetric_pair_phase(self):
        path = spectral.track_bands(model.Loop(0.39, 1.4))
        z = path.bands[0] - path.bands[1]
        diff = (-np.angle(z)) - (-np.angle(-z))
        assert np.allclose(np.abs(np.angle(np.exp(1j * (diff - math.pi)))), 0.0,
                           atol=1e-12)

    def test_endpoint_values_match_relabeled_start(self):
        for alpha in (0.39, 3.0):
            path = spectral.track_bands(model.Loop(alpha, 1.4))
            phases = spectral.relative_phases(path)
            perm = path.closure_permutation()
            for row, (i, j) in enumerate(spectral.PHASE_PAIRS):
                pi_, pj = perm[i] - 1, perm[j] - 1
                start = -np.angle(path.bands[pi_][0] - path.bands[pj][0])
                end = phases[row][-1]
                assert abs(math.remainder(end - start, 2 * math.pi)) < 1e-6

    def test_degenerate_bands_rejected(self):
        path = spectral.track_bands(model.Loop(0.39, 1.4))
        squeezed = spectral.BandPath(path.loop, path.thetas,
                                     np.vstack([path.bands[0],
                                                path.bands[0] + 1e-12,
                                                path.bands[2]]))
        with pytest.raises(DegenerateBands):
            spectral.relative_phases(squeezed)


class TestDetectCrossings:
    def test_ordered_tau_sequence_after_transition(self):
        path = spectral.track_bands(model.Loop(3.0, 1.4))
        events = spectral.detect_crossings(path)
        assert [(ev.i, ev.j) for ev in events] == [(1, 2), (1, 3), (3, 2), (1, 2)]
        assert all(events[k].theta < events[k + 1].theta for k in range(3))

    def test_crossing_refined_to_tolerance(self):
        path = spectral.track_bands(model.Loop(3.0, 1.4))
        for ev in spectral.detect_crossings(path):
            e = path.values_at(ev.theta)
            assert abs(e[ev.i - 1].real - e[ev.j - 1].real) < 1e-5
            assert e[ev.i - 1].imag < e[ev.j - 1].imag

    def test_no_crossings_on_gapped_loop(self):
        path = spectral.track_bands(model.Loop(0.5, 0.01, center=(2.0, 2.0)))
        assert spectral.detect_crossings(path) == []

    def test_pair_crossing_parity(self):
        # bands fixed by the closure permutation cross an even number of times
        rng = np.random.default_rng(13)
        checked = 0
        for _ in range(12):
            loop = model.Loop(rng.uniform(0.1, 3.2), rng.uniform(0.3, 1.5),
                              center=(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)))
            try:
                path = spectral.track_bands(loop)
            except EPOnLoop:
                continue
            perm = path.closure_permutation()
            events = spectral.detect_crossings(path)
            for i, j in ((1, 2), (1, 3), (2, 3)):
                if perm[i - 1] == i and perm[j - 1] == j:
                    count = sum(1 for ev in events if {ev.i, ev.j} == {i, j})
                    assert count % 2 == 0
                    checked += 1
        assert checked > 0
