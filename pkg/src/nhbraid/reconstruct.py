"""Forward model of the population-ratio measurements and its inversion back
to eigenvalues, plus the prior-free 16-parameter fit for arbitrary traceless
3x3 Hamiltonians.

The four measured ratios for a family point depend on each probed
eigenvalue only through z = c2 + E:

    ratio_a = |z|^2 / 2
    ratio_b = |(i + z/sqrt(2)) / (1 + i z/sqrt(2))|^2

Inverting the ratios together with the family's constraint equation
E1 E2 E3 = (sum E)(sum_{i<j} E_i E_j + 2) leaves a finite set of exact
candidate triples (two sign choices per probed eigenvalue times the roots
of a cubic).  The physical triple is the one whose reconstructed
coefficients (c1^2, c2) also lie in the family's image for some real
(alpha, k1, k2); that consistency residual selects it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from . import model, spectral
from .errors import AmbiguousSolution, DegenerateSum, RankDeficient

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PopulationRatios:
    """The four measured ratios for two probed eigenstates.

    indices are 1-based band labels (descending real part at the model
    point); ratio_a[m] and ratio_b[m] belong to eigenstate indices[m].
    """

    indices: tuple[int, int]
    ratio_a: tuple[float, float]
    ratio_b: tuple[float, float]

    def __post_init__(self):
        i1, i2 = self.indices
        if i1 == i2 or not (1 <= i1 <= 3 and 1 <= i2 <= 3):
            raise ValueError(f"bad eigenstate indices {self.indices}")
        for r in (*self.ratio_a, *self.ratio_b):
            if not (math.isfinite(r) and r >= 0.0):
                raise ValueError(f"ratios must be finite and >= 0, got {r}")


def _ratio_pair(z: complex) -> tuple[float, float]:
    ra = 0.5 * abs(z) ** 2
    zz = z / SQRT2
    rb = abs((1j + zz) / (1.0 + 1j * zz)) ** 2
    return ra, rb


def forward_ratios(p: model.ModelParams,
                   which: tuple[int, int] | None = None) -> PopulationRatios:
    """Exact population ratios at a model point.

    which picks the two probed band labels; by default the two eigenvalues
    with the largest |c2 + E| (the best-conditioned ratios).
    """
    c2 = model.poly_coeffs(p).c2
    spec = spectral.eigensolve(model.hamiltonian(p))
    order = np.lexsort((-spec.eigenvalues.imag, -spec.eigenvalues.real))
    eigs = spec.eigenvalues[order]  # label i = position i-1, descending Re
    if which is None:
        mags = [abs(c2 + e) for e in eigs]
        picked = np.argsort(mags)[::-1][:2]
        which = (int(picked[0]) + 1, int(picked[1]) + 1)
    i1, i2 = which
    ra1, rb1 = _ratio_pair(c2 + eigs[i1 - 1])
    ra2, rb2 = _ratio_pair(c2 + eigs[i2 - 1])
    return PopulationRatios((i1, i2), (ra1, ra2), (rb1, rb2))


def family_consistency(eigs) -> float:
    """Distance of a triple's (c1^2, c2) from the family's image.

    From the triple: c2 = -(sum E), c1^2 = -(sum_{i<j} E_i E_j) - 2.  A real
    (alpha, k1, k2) reproducing them must satisfy alpha = 2 +- sqrt(1 - Re c2),
    k1 = -Im(c1^2) / (alpha + 1), and then Re c1^2 = 2 k1^2 - (alpha+1)^2 / 8;
    the returned value is the best remaining mismatch over both alpha
    branches (inf when Re c2 > 1).
    """
    e1, e2, e3 = eigs
    c2 = -(e1 + e2 + e3)
    u = -(e1 * e2 + e2 * e3 + e1 * e3) - 2.0
    if c2.real > 1.0:
        return math.inf
    best = math.inf
    root = math.sqrt(1.0 - c2.real)
    for alpha in (2.0 + root, 2.0 - root):
        ap = 0.25 * (alpha + 1.0)
        if abs(ap) < 1e-12:
            continue
        k1 = -u.imag / (4.0 * ap)
        best = min(best, abs(u.real - (2.0 * k1 * k1 - 2.0 * ap * ap)))
    return best


def _family_seeds(eigs):
    """Approximate (alpha, k1, k2) behind a triple, one per alpha branch."""
    e1, e2, e3 = eigs
    c2 = -(e1 + e2 + e3)
    u = -(e1 * e2 + e2 * e3 + e1 * e3) - 2.0
    k2 = -c2.imag
    root = math.sqrt(max(1.0 - c2.real, 0.0))
    seeds = []
    for alpha in (2.0 + root, 2.0 - root):
        ap = 0.25 * (alpha + 1.0)
        if abs(ap) < 1e-12:
            continue
        seeds.append((alpha, -u.imag / (4.0 * ap), k2))
    return seeds


def _candidate_score(triple: np.ndarray, ratios: PopulationRatios) -> float:
    """How well a candidate triple is explained by an actual family point.

    Fits (alpha, k1, k2) to the measured ratios starting from the triple's
    own family estimate, then adds the mismatch between the candidate and
    that point's exact eigenvalues.  A spurious branch either cannot fit
    the ratios or fits them with eigenvalues far from its own triple, so
    both terms stay O(1) for it while the physical branch scores at the
    noise level.
    """
    i1, i2 = ratios.indices
    data = np.array([ratios.ratio_a[0], ratios.ratio_b[0],
                     ratios.ratio_a[1], ratios.ratio_b[1]])

    def ratio_resid(x):
        p = model.ModelParams(float(x[0]), float(x[1]), float(x[2]))
        c2 = model.poly_coeffs(p).c2
        eigs = spectral.eigensolve(model.hamiltonian(p)).eigenvalues
        eigs = eigs[np.lexsort((-eigs.imag, -eigs.real))]
        ra1, rb1 = _ratio_pair(c2 + eigs[i1 - 1])
        ra2, rb2 = _ratio_pair(c2 + eigs[i2 - 1])
        return np.array([ra1, rb1, ra2, rb2]) - data

    best = math.inf
    for seed in _family_seeds(triple):
        try:
            fit = least_squares(ratio_resid, np.array(seed), method="lm",
                                xtol=1e-14, ftol=1e-14, max_nfev=200)
        except Exception:
            continue
        p = model.ModelParams(float(fit.x[0]), float(fit.x[1]), float(fit.x[2]))
        eigs = np.sort_complex(spectral.eigensolve(model.hamiltonian(p)).eigenvalues)
        mismatch = float(np.abs(eigs - np.sort_complex(triple)).max())
        score = float(np.linalg.norm(ratio_resid(fit.x))) + mismatch
        best = min(best, score)
    return best


def _system_residuals(x: np.ndarray, data: PopulationRatios) -> np.ndarray:
    e_a = x[0] + 1j * x[1]
    e_b = x[2] + 1j * x[3]
    e_c = x[4] + 1j * x[5]
    s = e_a + e_b + e_c
    c2 = -s
    pairs = e_a * e_b + e_b * e_c + e_a * e_c
    cons = e_a * e_b * e_c - s * (pairs + 2.0)
    ra1, rb1 = _ratio_pair(c2 + e_a)
    ra2, rb2 = _ratio_pair(c2 + e_b)
    return np.array([ra1 - data.ratio_a[0], rb1 - data.ratio_b[0],
                     ra2 - data.ratio_a[1], rb2 - data.ratio_b[1],
                     cons.real, cons.imag])


def solve_eigenvalues(ratios: PopulationRatios, seed: int = 0,
                      n_starts: int = 64):
    """Recover the eigenvalue triple from four population ratios.

    Multistart nonlinear least squares on the joint system (four ratio
    equations plus the complex constraint equation).  The square system has
    a finite set of exact solutions (two sign choices per probed eigenvalue
    times a cubic in the trace); the physical one is selected by how well a
    real family point explains both the measured ratios and the candidate
    triple (see _candidate_score).  Returns (eigenvalues, residual) with
    eigenvalues placed at their 1-based labels (the two probed labels from
    ``ratios.indices``, the third at the remaining slot) and residual the
    joint-system norm at the winner.

    Raises DegenerateSum when the winning triple has E1+E2+E3 ~ 0 (the
    c1 reconstruction breaks there) and AmbiguousSolution when two
    distinct triples tie.
    """
    rng = np.random.default_rng(seed)
    scale = max(2.0, math.sqrt(2.0 * max(*ratios.ratio_a, 1e-6)))
    solutions: list[tuple[float, np.ndarray]] = []
    for _ in range(n_starts):
        x0 = rng.normal(size=6) * scale
        try:
            fit = least_squares(_system_residuals, x0, args=(ratios,),
                                method="lm", xtol=1e-15, ftol=1e-15,
                                max_nfev=800)
        except Exception:
            continue
        cost = float(np.linalg.norm(_system_residuals(fit.x, ratios)))
        solutions.append((cost, fit.x))
    if not solutions:
        raise RuntimeError("no least-squares start converged")
    best_cost = min(c for c, _ in solutions)
    keep_cost = max(3.0 * best_cost, 1e-10)

    candidates: list[tuple[float, float, np.ndarray]] = []
    for cost, x in solutions:
        if cost > keep_cost:
            continue
        triple = np.array([x[0] + 1j * x[1], x[2] + 1j * x[3], x[4] + 1j * x[5]])
        if any(np.abs(np.sort_complex(triple) - np.sort_complex(c[2])).max() < 1e-6
               for c in candidates):
            continue
        # coarse prefilter: keep only branches anywhere near the family image
        fam = family_consistency(triple)
        candidates.append((fam, cost, triple))
    candidates.sort(key=lambda c: c[0])
    candidates = candidates[:4]

    scored = sorted(((_candidate_score(triple, ratios), cost, triple)
                     for _, cost, triple in candidates), key=lambda c: c[0])
    score_best, cost_best, winner = scored[0]
    ties = [c for c in scored[1:] if c[0] <= 2.0 * score_best + 1e-10]
    if ties:
        raise AmbiguousSolution(
            "two distinct eigenvalue triples are equally consistent with the "
            "ratios and the model family",
            [winner] + [c[2] for c in ties])
    if abs(winner.sum()) < 1e-6:
        raise DegenerateSum("E1 + E2 + E3 ~ 0 at the solution")

    i1, i2 = ratios.indices
    i3 = 6 - i1 - i2
    out = np.zeros(3, dtype=complex)
    out[i1 - 1], out[i2 - 1], out[i3 - 1] = winner[0], winner[1], winner[2]
    return out, cost_best


# ---------------------------------------------------------------------------
# Prior-free 16-parameter acquisition for arbitrary traceless Hamiltonians.


@dataclass(frozen=True)
class GenericH:
    """A traceless 3x3 complex matrix parameterized by 16 reals.

    Layout: params[0:12] are (Re, Im) of H12, H13, H23, H21, H31, H32;
    params[12:16] are (Re, Im) of H11 and H22, with H33 = -H11 - H22.
    """

    params: tuple[float, ...]

    def __post_init__(self):
        if len(self.params) != 16:
            raise ValueError("GenericH takes exactly 16 real parameters")

    @property
    def matrix(self) -> np.ndarray:
        a = self.params
        H = np.zeros((3, 3), dtype=complex)
        H[0, 1] = a[0] + 1j * a[1]
        H[0, 2] = a[2] + 1j * a[3]
        H[1, 2] = a[4] + 1j * a[5]
        H[1, 0] = a[6] + 1j * a[7]
        H[2, 0] = a[8] + 1j * a[9]
        H[2, 1] = a[10] + 1j * a[11]
        H[0, 0] = a[12] + 1j * a[13]
        H[1, 1] = a[14] + 1j * a[15]
        H[2, 2] = -H[0, 0] - H[1, 1]
        return H

    @classmethod
    def from_matrix(cls, H: np.ndarray) -> "GenericH":
        """Parameters of the traceless part of H."""
        H = np.asarray(H, dtype=complex)
        H = H - np.trace(H) / 3.0 * np.eye(3)
        a = [H[0, 1].real, H[0, 1].imag, H[0, 2].real, H[0, 2].imag,
             H[1, 2].real, H[1, 2].imag, H[1, 0].real, H[1, 0].imag,
             H[2, 0].real, H[2, 0].imag, H[2, 1].real, H[2, 1].imag,
             H[0, 0].real, H[0, 0].imag, H[1, 1].real, H[1, 1].imag]
        return cls(tuple(float(v) for v in a))


@dataclass(frozen=True)
class MeasurementRecord:
    """One normalized population constraint.

    value = P_index / (P_1 + P_2 + P_3) with
    P_i = |<projector_i| exp(-i H t) |initial>|^2; projectors are the rows
    of ``basis`` (an orthonormal measurement basis).
    """

    initial: np.ndarray
    basis: np.ndarray
    time: float
    index: int
    value: float


def predicted_value(H: np.ndarray, m: MeasurementRecord) -> float:
    """Forward model of one measurement for a given Hamiltonian."""
    with np.errstate(over="ignore", invalid="ignore"):
        v = expm(-1j * np.asarray(H, dtype=complex) * m.time) @ np.asarray(m.initial, dtype=complex)
        P = np.abs(np.asarray(m.basis, dtype=complex) @ v) ** 2
        total = float(P.sum())
    if not np.isfinite(total) or total == 0.0:
        return math.nan
    return float(P[m.index] / total)


def generic_fit(measurements: list[MeasurementRecord], seed: int = 0,
                n_starts: int = 32):
    """Fit the 16 traceless-Hamiltonian parameters to population data.

    Multistart Levenberg-Marquardt; returns (GenericH, residual).  Raises
    RankDeficient when the Jacobian at the solution has rank < 16, i.e.
    the measurement set cannot pin all parameters down.
    """
    if len(measurements) < 16:
        raise ValueError(f"need at least 16 constraints, got {len(measurements)}")
    data = np.array([m.value for m in measurements])
    times = sorted({float(m.time) for m in measurements})

    def residuals(a: np.ndarray) -> np.ndarray:
        if np.abs(a).max() > 25.0:  # keep the search out of expm overflow
            return np.full(len(measurements), 1e6)
        H = GenericH(tuple(a)).matrix
        with np.errstate(over="ignore", invalid="ignore"):
            props = {t: expm(-1j * H * t) for t in times}  # shared across records
            pred = np.empty(len(measurements))
            for k, m in enumerate(measurements):
                v = props[float(m.time)] @ np.asarray(m.initial, dtype=complex)
                P = np.abs(np.asarray(m.basis, dtype=complex) @ v) ** 2
                total = P.sum()
                pred[k] = P[m.index] / total if np.isfinite(total) and total > 0 else np.nan
        out = pred - data
        return np.where(np.isfinite(out), out, 1e6)

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_starts):
        a0 = rng.normal(size=16)
        try:
            fit = least_squares(residuals, a0, method="lm", xtol=1e-15,
                                ftol=1e-15, max_nfev=4000)
        except Exception:
            continue
        cost = float(np.linalg.norm(residuals(fit.x)))
        if best is None or cost < best[0]:
            best = (cost, fit.x)
        if cost < 1e-12 * max(1.0, math.sqrt(len(measurements))):
            break  # exact fit; later starts cannot beat it
    if best is None:
        raise RuntimeError("no fit start converged")
    cost, a = best

    jac = np.zeros((len(measurements), 16))
    h = 1e-6
    for col in range(16):
        ap, am = a.copy(), a.copy()
        ap[col] += h
        am[col] -= h
        jac[:, col] = (residuals(ap) - residuals(am)) / (2.0 * h)
    svals = np.linalg.svd(jac, compute_uv=False)
    if svals[-1] < 1e-8 * max(svals[0], 1.0):
        raise RankDeficient(
            f"fit Jacobian rank {int(np.sum(svals > 1e-8 * svals[0]))} < 16")
    return GenericH(tuple(float(v) for v in a)), cost
