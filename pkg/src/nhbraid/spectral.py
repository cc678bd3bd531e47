"""Cubic eigensolver and continuous band tracking along parameter loops.

Bands are labeled 1..3 by descending real part at theta = 0 (ties broken
by descending imaginary part) and continued around the loop by
minimum-cost matching between consecutive samples.  The sample grid is
refined adaptively until every step is small against the local band gap
and every relative-phase step stays below pi/2, which makes the matching
and the phase unwrapping unambiguous.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import model
from .errors import DegenerateBands, EPOnLoop, PhaseStepTooLarge, TangentialCrossing

# Pairs (i, j) of the reported phase series, 0-based: phi_12, phi_23, phi_31.
PHASE_PAIRS = ((0, 1), (1, 2), (2, 0))

_PERMS3 = tuple(permutations(range(3)))
_OMEGA = complex(-0.5, 0.8660254037844386)  # exp(2*pi*i/3)

# Adaptive-refinement guards: max eigenvalue step as a fraction of the local
# gap, and max relative-phase step (strictly below pi/2).
_STEP_GAP_FRACTION = 0.5
_PHASE_STEP_LIMIT = 0.45 * math.pi
_MIN_SEGMENT = 1e-9
_DISC_FLOOR = 1e-6


def cubic_roots(b: complex, c: complex, d: complex) -> np.ndarray:
    """Three roots of x^3 + b x^2 + c x + d, ascending (Re, Im).

    Cardano's closed form followed by up to three Newton polish steps per
    root (a polish step is kept only if it reduces |P|).
    """
    b, c, d = complex(b), complex(c), complex(d)
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    if p == 0.0 and q == 0.0:
        roots = [-shift] * 3
    else:
        half_q = -0.5 * q
        sq = cmath.sqrt(half_q * half_q + (p / 3.0) ** 3)
        u3 = half_q + sq
        if abs(u3) < abs(half_q - sq):
            u3 = half_q - sq
        u = u3 ** (1.0 / 3.0)
        roots = []
        for k in range(3):
            uk = u * _OMEGA ** k
            y = uk - p / (3.0 * uk)
            roots.append(y - shift)

    def poly(x):
        return ((x + b) * x + c) * x + d

    polished = []
    for x in roots:
        fx = poly(x)
        for _ in range(3):
            fp = (3.0 * x + 2.0 * b) * x + c
            if fp == 0.0:
                break
            xn = x - fx / fp
            fn = poly(xn)
            if abs(fn) < abs(fx):
                x, fx = xn, fn
            else:
                break
        polished.append(x)
    arr = np.array(polished, dtype=complex)
    return arr[np.lexsort((arr.imag, arr.real))]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending (Re, Im)) and optional unit right eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def _char_poly(H: np.ndarray) -> tuple[complex, complex, complex]:
    """Monic characteristic-polynomial coefficients (b, c, d) of a 3x3 matrix."""
    tr = H[0, 0] + H[1, 1] + H[2, 2]
    tr2 = np.trace(H @ H)
    det = (H[0, 0] * (H[1, 1] * H[2, 2] - H[1, 2] * H[2, 1])
           - H[0, 1] * (H[1, 0] * H[2, 2] - H[1, 2] * H[2, 0])
           + H[0, 2] * (H[1, 0] * H[2, 1] - H[1, 1] * H[2, 0]))
    return -tr, (tr * tr - tr2) / 2.0, -det


def _family_coeffs(H: np.ndarray) -> tuple[complex, complex] | None:
    """(c1, c2) when H has the family's tridiagonal shape, else None."""
    tol = 1e-12 * max(1.0, float(np.abs(H).max()))
    fixed = (abs(H[0, 1] + 1) <= tol and abs(H[1, 0] + 1) <= tol
             and abs(H[1, 2] + 1) <= tol and abs(H[2, 1] + 1) <= tol
             and abs(H[0, 2]) <= tol and abs(H[2, 0]) <= tol
             and abs(H[0, 0] + H[2, 2]) <= tol)
    if not fixed:
        return None
    return complex(H[0, 0]), complex(-H[1, 1])


def _nullspace_vector(A: np.ndarray) -> np.ndarray:
    """Unit vector minimizing |A v| (smallest right singular vector)."""
    _, _, vh = np.linalg.svd(A)
    return vh[-1].conj()


def eigensolve(H: np.ndarray, want_vectors: bool = False) -> Spectrum:
    """Spectrum of a 3x3 complex matrix via its characteristic cubic.

    Eigenvectors use the family closed form
    (-1 + (c1+E)(c2+E), -(c1+E), 1) when H matches the family shape and the
    form is non-degenerate; otherwise (and as a residual-checked fallback)
    the null space of H - E*I.
    """
    H = np.asarray(H, dtype=complex)
    if H.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {H.shape}")
    fam = _family_coeffs(H)
    if fam is not None:
        # Family coefficients avoid the trace-based round-off that would
        # smear the exact multiple roots at degenerate points.
        b, c, d = model.PolyCoeffs(fam[0], fam[1]).monic_coefficients()
    else:
        b, c, d = _char_poly(H)
    eigs = cubic_roots(b, c, d)
    if not want_vectors:
        return Spectrum(eigs)
    scale = float(np.linalg.norm(H, 2)) + 1.0
    vectors = np.zeros((3, 3), dtype=complex)
    for i, e in enumerate(eigs):
        v = None
        if fam is not None:
            c1, c2 = fam
            cand = np.array([-1.0 + (c1 + e) * (c2 + e), -(c1 + e), 1.0])
            cand = cand / np.linalg.norm(cand)
            if np.linalg.norm(H @ cand - e * cand) <= 1e-8 * scale:
                v = cand
        if v is None:
            v = _nullspace_vector(H - e * np.eye(3))
        vectors[i] = v
    return Spectrum(eigs, vectors)


def _loop_roots(loop: model.Loop, theta: float) -> np.ndarray:
    """Eigenvalues at angle theta on the loop (unordered beyond solver order)."""
    p = model.loop_point(loop, theta)
    b, c, d = model.poly_coeffs(p).monic_coefficients()
    return cubic_roots(b, c, d)


def _best_match(ref: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Reorder vals to minimize total |ref - vals| over the 6 permutations."""
    best, best_cost = None, math.inf
    for perm in _PERMS3:
        cost = (abs(ref[0] - vals[perm[0]]) + abs(ref[1] - vals[perm[1]])
                + abs(ref[2] - vals[perm[2]]))
        if cost < best_cost:
            best, best_cost = perm, cost
    return vals[list(best)]


def _min_gap(e: np.ndarray) -> float:
    return min(abs(e[0] - e[1]), abs(e[0] - e[2]), abs(e[1] - e[2]))


def _principal(x: float) -> float:
    """Wrap to (-pi, pi]."""
    return math.remainder(x, 2.0 * math.pi)


def _phase_steps_ok(ea: np.ndarray, eb: np.ndarray) -> bool:
    for i, j in PHASE_PAIRS:
        da = cmath.phase(ea[i] - ea[j])
        db = cmath.phase(eb[i] - eb[j])
        if abs(_principal(db - da)) > _PHASE_STEP_LIMIT:
            return False
    return True


@dataclass(frozen=True)
class BandPath:
    """Three continuously tracked bands sampled on [0, 2*pi] along a loop.

    bands[i, k] is band i+1 (continuation label) at thetas[k]; thetas[0] = 0
    and thetas[-1] = 2*pi, so the first and last columns hold the same
    spectrum up to the closure permutation.
    """

    loop: model.Loop
    thetas: np.ndarray
    bands: np.ndarray

    def values_at(self, theta: float) -> np.ndarray:
        """Bands at an arbitrary angle, matched from the nearest sample."""
        k = int(np.searchsorted(self.thetas, theta))
        k = min(max(k, 0), len(self.thetas) - 1)
        if k > 0 and abs(self.thetas[k - 1] - theta) < abs(self.thetas[k] - theta):
            k -= 1
        return _best_match(self.bands[:, k], _loop_roots(self.loop, theta))

    def closure_permutation(self) -> list[int]:
        """pi with bands[i][-1] == bands[pi(i)-1][0], as a 1-based image list."""
        start, end = self.bands[:, 0], self.bands[:, -1]
        best, best_cost = None, math.inf
        for perm in _PERMS3:
            cost = sum(abs(end[i] - start[perm[i]]) for i in range(3))
            if cost < best_cost:
                best, best_cost = perm, cost
        resid = max(abs(end[i] - start[best[i]]) for i in range(3))
        if resid > 1e-6:
            raise EPOnLoop(f"loop does not close: multiset residual {resid:.2e}")
        return [best[i] + 1 for i in range(3)]


def track_bands(loop: model.Loop, n_min: int = 64) -> BandPath:
    """Track the three bands once around the loop.

    Raises EPOnLoop when the discriminant magnitude drops below 1e-6 at any
    sample (an exceptional point on or near the loop) or when refinement
    cannot separate the bands.
    """
    if n_min < 4:
        raise ValueError("n_min must be at least 4")
    if loop.samples is not None:
        thetas = list(loop.samples) + [2.0 * math.pi]
        if thetas[0] != 0.0:
            thetas = [0.0] + thetas
    else:
        thetas = list(np.linspace(0.0, 2.0 * math.pi, n_min + 1))

    roots: dict[float, np.ndarray] = {}

    def roots_at(t: float) -> np.ndarray:
        if t not in roots:
            p = model.loop_point(loop, t)
            dmag = abs(model.discriminant_values(p.alpha, p.k1, p.k2))
            if dmag <= _DISC_FLOOR:
                raise EPOnLoop(
                    f"|discriminant| = {dmag:.2e} <= {_DISC_FLOOR} at theta = {t:.6f}")
            roots[t] = _loop_roots(loop, t)
        return roots[t]

    # Refine until each segment is both gap-safe and phase-safe.  The raw
    # solver ordering is fine for these checks; matching happens afterwards.
    i = 0
    while i < len(thetas) - 1:
        ta, tb = thetas[i], thetas[i + 1]
        ea = roots_at(ta)
        eb = _best_match(ea, roots_at(tb))
        step = max(abs(ea[k] - eb[k]) for k in range(3))
        gap = min(_min_gap(ea), _min_gap(eb))
        if step <= _STEP_GAP_FRACTION * gap and _phase_steps_ok(ea, eb):
            i += 1
            continue
        if tb - ta <= _MIN_SEGMENT:
            raise EPOnLoop(
                f"band separation not resolvable near theta = {ta:.6f}")
        thetas.insert(i + 1, 0.5 * (ta + tb))

    n = len(thetas)
    bands = np.zeros((3, n), dtype=complex)
    e0 = roots_at(thetas[0])
    order = np.lexsort((-e0.imag, -e0.real))  # descending Re, then Im
    bands[:, 0] = e0[order]
    for k in range(1, n):
        bands[:, k] = _best_match(bands[:, k - 1], roots_at(thetas[k]))
    return BandPath(loop, np.asarray(thetas), bands)


def relative_phases(path: BandPath) -> np.ndarray:
    """Unwrapped phase series phi_12, phi_23, phi_31 (shape (3, n)).

    phi_ij(theta) = -arg(E_i - E_j), continued from its principal value at
    theta = 0.  Raises DegenerateBands when two bands come within 1e-10.
    """
    out = np.zeros((3, path.bands.shape[1]))
    for row, (i, j) in enumerate(PHASE_PAIRS):
        z = path.bands[i] - path.bands[j]
        mags = np.abs(z)
        if mags.min() < 1e-10:
            raise DegenerateBands(
                f"bands {i + 1} and {j + 1} separated by {mags.min():.2e}")
        raw = -np.angle(z)
        steps = np.angle(np.exp(1j * np.diff(raw)))
        if np.abs(steps).max() >= 0.5 * math.pi:
            raise PhaseStepTooLarge(
                "phase step >= pi/2 survived adaptive refinement")
        out[row] = raw[0] + np.concatenate(([0.0], np.cumsum(steps)))
    return out


@dataclass(frozen=True)
class CrossingEvent:
    """A transversal real-part crossing tau_(i,j): Re E_i = Re E_j, Im E_i < Im E_j.

    i and j are continuation labels (fixed at theta = 0), not instantaneous
    real-part ranks.
    """

    theta: float
    i: int
    j: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.i, self.j)

    def __str__(self):
        return f"tau_{self.i}{self.j}@{self.theta:.6f}"


def detect_crossings(path: BandPath,
                     phases: np.ndarray | None = None) -> list[CrossingEvent]:
    """All real-part crossings along the path, sorted by theta.

    Equivalent to finding every crossing of the unwrapped phi_ij series
    through +pi/2 (mod 2*pi, emitting tau_ij) or -pi/2 (emitting tau_ji);
    implemented directly on Re(E_i - E_j) sign changes, which is the same
    locus.  Each crossing angle is bisected to 1e-6.  Raises
    TangentialCrossing when |d(Re E_i - Re E_j)/d theta| < 1e-8 at a
    detected crossing.
    """
    if phases is None:
        phases = relative_phases(path)  # also enforces separation guards
    events = []
    thetas, bands = path.thetas, path.bands
    for a, b in PHASE_PAIRS:
        g = bands[a].real - bands[b].real
        for k in range(len(thetas) - 1):
            ga, gb = g[k], g[k + 1]
            if ga == 0.0:  # crossing exactly on a sample: classify in place
                ga = -gb
            if not (ga < 0.0 < gb or gb < 0.0 < ga):
                continue
            lo, hi = thetas[k], thetas[k + 1]
            elo = bands[:, k].copy()
            glo = ga
            while hi - lo > 1e-7:
                mid = 0.5 * (lo + hi)
                em = _best_match(elo, _loop_roots(path.loop, mid))
                gm = em[a].real - em[b].real
                if (gm < 0.0) == (glo < 0.0):
                    lo, elo, glo = mid, em, gm
                else:
                    hi = mid
            t_star = 0.5 * (lo + hi)
            e_star = _best_match(elo, _loop_roots(path.loop, t_star))
            h = 1e-5
            ep = _best_match(e_star, _loop_roots(path.loop, t_star + h))
            em = _best_match(e_star, _loop_roots(path.loop, t_star - h))
            slope = ((ep[a].real - ep[b].real) - (em[a].real - em[b].real)) / (2 * h)
            if abs(slope) < 1e-8:
                raise TangentialCrossing(
                    f"non-transversal crossing of bands {a + 1},{b + 1} at "
                    f"theta = {t_star:.6f}; perturb the loop")
            if e_star[a].imag < e_star[b].imag:
                events.append(CrossingEvent(t_star, a + 1, b + 1))
            else:
                events.append(CrossingEvent(t_star, b + 1, a + 1))
    events.sort(key=lambda ev: ev.theta)
    return events
