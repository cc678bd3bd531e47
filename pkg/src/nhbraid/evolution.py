"""Non-Hermitian time evolution, steady-state eigenstate extraction, and
density-matrix utilities (fidelity, physical-state projection).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateBands

# Renormalize stored states once they grow past this; the shed magnitude
# accumulates in log_rescale so the true state stays recoverable.
_NORM_CAP = 1e100


@dataclass
class StateTrajectory:
    """Sampled solution of i d/dt psi = H psi.

    states[j] * exp(log_rescale[j]) is the true (unnormalized) state;
    rescaling only kicks in when amplitudes would overflow, so
    log_rescale is all zeros for ordinary runs.  norms[j] is the norm of
    states[j] exactly as stored.
    """

    times: np.ndarray
    states: np.ndarray
    norms: np.ndarray
    log_rescale: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.log_rescale is None:
            self.log_rescale = np.zeros(len(self.times))


def evolve_nh(H: np.ndarray, psi0: np.ndarray, T: float,
              steps: int = 200) -> StateTrajectory:
    """Evolve psi0 under a time-independent H with per-step matrix exponentials."""
    psi0 = np.asarray(psi0, dtype=complex)
    if np.linalg.norm(psi0) == 0.0:
        raise ValueError("initial state must be nonzero")
    dt = T / steps
    U = expm(-1j * np.asarray(H, dtype=complex) * dt)
    times = np.linspace(0.0, T, steps + 1)
    states = np.zeros((steps + 1, len(psi0)), dtype=complex)
    logs = np.zeros(steps + 1)
    states[0] = psi0
    psi, log = psi0.copy(), 0.0
    for k in range(1, steps + 1):
        psi = U @ psi
        nrm = np.linalg.norm(psi)
        if nrm > _NORM_CAP:
            psi = psi / nrm
            log += np.log(nrm)
        states[k] = psi
        logs[k] = log
    return StateTrajectory(times, states,
                           np.linalg.norm(states, axis=1), logs)


def _selector_matrix(H: np.ndarray, selector: str,
                     shift: complex | None = None) -> np.ndarray:
    """The generator g(H) for the steady-state filter.

    "H", "-H", "iH", "-iH" pick the eigenstate with the largest Im E,
    smallest Im E, largest Re E, smallest Re E respectively; "+iR"/"-iR"
    are +-i (H - shift I)^-1, targeting the eigenvalue closest to the
    shift.  The resolvent is assembled column-by-column from linear
    solves (no matrix inverse), guarded by its smallest singular value.
    """
    H = np.asarray(H, dtype=complex)
    if selector == "H":
        return H
    if selector == "-H":
        return -H
    if selector == "iH":
        return 1j * H
    if selector == "-iH":
        return -1j * H
    if selector in ("+iR", "-iR"):
        if shift is None:
            raise ValueError("resolvent selector needs a complex shift")
        A = H - shift * np.eye(H.shape[0])
        smin = np.linalg.svd(A, compute_uv=False)[-1]
        if smin <= 1e-8:
            raise DegenerateBands(
                f"shift {shift} too close to the spectrum (s_min = {smin:.2e})")
        sign = 1.0 if selector == "+iR" else -1.0
        return sign * 1j * np.linalg.solve(A, np.eye(H.shape[0], dtype=complex))
    raise ValueError(f"unknown selector {selector!r}")


def steady_eigenstate(H: np.ndarray, selector: str = "H",
                      psi0: np.ndarray | None = None,
                      t_max: float | None = None, tol: float = 1e-8,
                      shift: complex | None = None, seed: int = 0):
    """Extract one eigenstate of H as the steady state of evolution under g(H).

    Evolution under g(H) damps every spectral component against the one
    whose g-eigenvalue has the largest imaginary part, so the normalized
    state converges to that eigenvector.  Convergence is declared when the
    per-step direction change 1 - |<psi_k, psi_k+1>| drops below tol;
    near exceptional points convergence is algebraic and the flag may come
    back False at t_max.

    Returns (eigenvector estimate, eigenvalue estimate, converged flag).
    The eigenvalue estimate is the Rayleigh quotient refined by one Newton
    step on the characteristic polynomial.
    """
    H = np.asarray(H, dtype=complex)
    G = _selector_matrix(H, selector, shift)
    scale = float(np.linalg.norm(G, 2))
    dt = 0.5 / max(scale, 1e-6)
    if t_max is None:
        t_max = 200.0 / max(_imag_gap(G), 1e-2)
        t_max = min(t_max, 2e4 * dt)
    if psi0 is None:
        rng = np.random.default_rng(seed)
        psi0 = rng.normal(size=H.shape[0]) + 1j * rng.normal(size=H.shape[0])
    psi = np.asarray(psi0, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    U = expm(-1j * G * dt)
    converged = False
    t = 0.0
    while t < t_max:
        nxt = U @ psi
        nxt = nxt / np.linalg.norm(nxt)
        drift = 1.0 - abs(np.vdot(psi, nxt))
        psi = nxt
        t += dt
        if drift < tol:
            converged = True
            break

    e = complex(np.vdot(psi, H @ psi) / np.vdot(psi, psi))
    tr = np.trace(H)
    b = -tr
    c = (tr * tr - np.trace(H @ H)) / 2.0
    d = -np.linalg.det(H)
    p = ((e + b) * e + c) * e + d
    dp = (3.0 * e + 2.0 * b) * e + c
    if abs(dp) > 1e-12:
        e = e - p / dp
    return psi, complex(e), converged


def _imag_gap(G: np.ndarray) -> float:
    im = np.sort(np.linalg.eigvals(G).imag)
    return float(im[-1] - im[-2])


def density_matrix(psi: np.ndarray) -> np.ndarray:
    """Normalized pure-state density matrix |psi><psi| / <psi|psi>."""
    psi = np.asarray(psi, dtype=complex)
    n2 = float(np.real(np.vdot(psi, psi)))
    if n2 == 0.0:
        raise ValueError("state must be nonzero")
    return np.outer(psi, psi.conj()) / n2


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    w = np.clip(w, 0.0, None)
    if w.max() > 0.0:
        # Round-off eigenvalues ~eps would blow up to ~sqrt(eps) under the
        # root and contaminate the trace; drop them.
        w[w < 1e-14 * w.max()] = 0.0
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """State fidelity [Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a))]^2, in [0, 1]."""
    sa = _psd_sqrt(np.asarray(rho_a, dtype=complex))
    inner = _psd_sqrt(sa @ np.asarray(rho_b, dtype=complex) @ sa)
    f = float(np.real(np.trace(inner)) ** 2)
    if f < -1e-12 or f > 1.0 + 1e-12:
        raise FloatingPointError(f"fidelity {f} escaped [0, 1]")
    return min(max(f, 0.0), 1.0)


def psd_project(raw: np.ndarray) -> np.ndarray:
    """Frobenius-nearest unit-trace positive-semidefinite matrix.

    Projects the spectrum of the Hermitian input onto the probability
    simplex (sort, shift by the water-filling threshold, clip at zero) and
    rebuilds the matrix in the same eigenbasis.
    """
    raw = np.asarray(raw, dtype=complex)
    if np.abs(raw - raw.conj().T).max() > 1e-8 * max(1.0, np.abs(raw).max()):
        raise ValueError("input must be Hermitian")
    w, v = np.linalg.eigh((raw + raw.conj().T) / 2.0)
    desc = np.sort(w)[::-1]
    csum = np.cumsum(desc) - 1.0
    k = np.nonzero(desc - csum / np.arange(1, len(desc) + 1) > 0)[0][-1]
    tau = csum[k] / (k + 1)
    w_proj = np.clip(w - tau, 0.0, None)
    return (v * w_proj) @ v.conj().T
