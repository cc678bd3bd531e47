"""Embedding of non-Hermitian dynamics into a Hermitian two-register system.

A non-Hermitian H on the three-level system is simulated by the Hermitian
block Hamiltonian

    H_tot(t) = Xi(t) (x) |1><1|  +  Lambda(t) (x) |0><0|

acting on system (x) ancilla, built from a positive-definite metric
M(t) = exp(-i H^dag t) M(0) exp(i H t) and eta(t) = (M(t) - I)^(1/2):

    Lambda_hat = [H + (i deta/dt + eta H) eta] M^-1
    Xi_hat     = i [H eta - eta H - i deta/dt] M^-1
    Xi = Lambda_hat + Xi_hat,   Lambda = Lambda_hat - Xi_hat.

deta/dt is solved from the Sylvester relation (deta)eta + eta(deta) = dM/dt
with dM/dt = -i H^dag M + i M H; both blocks then come out Hermitian.  The
whole construction is applied to s*H, with s a pass-through time-scale
factor.

Prepared in the state psi0 (x) (|-> + eta(0)|+>) and projected back onto
the |-> ancilla component, the dilated system reproduces non-Hermitian
evolution under s*H exactly (up to normalization).  The ancilla vectors
must carry a specific relative phase for the block identities to hold;
with |0>/|1> the computational basis they are

    |-> = (-i|0> - |1>)/sqrt(2),   |+> = (|0> + i|1>)/sqrt(2),

a phase choice of the sigma_y eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import MetricDegenerate

ANCILLA_MINUS = np.array([-1j, -1.0]) / np.sqrt(2.0)
ANCILLA_PLUS = np.array([1.0, 1j]) / np.sqrt(2.0)

_MARGIN_FLOOR = 1e-8


@dataclass
class DilationBundle:
    """Time-sampled Hermitian pair (Xi, Lambda) with its metric data.

    All arrays are sampled on time_grid; matrices are stacked along axis 0.
    """

    time_grid: np.ndarray
    Xi: np.ndarray
    Lambda: np.ndarray
    eta: np.ndarray
    M: np.ndarray
    scale_s: float = 1.0


def metric_M(H: np.ndarray, t: float, M0: np.ndarray) -> np.ndarray:
    """M(t) = exp(-i H^dag t) M(0) exp(i H t)."""
    H = np.asarray(H, dtype=complex)
    return expm(-1j * H.conj().T * t) @ np.asarray(M0, dtype=complex) @ expm(1j * H * t)


def _hermitize(A: np.ndarray) -> np.ndarray:
    return (A + A.conj().T) / 2.0


def _eta_and_rate(M: np.ndarray, Mdot: np.ndarray):
    """eta = (M - I)^(1/2) and deta/dt from the Sylvester relation.

    Diagonalizing A = M - I = Q w Q^dag gives eta = Q sqrt(w) Q^dag and
    (deta)_ij' = (Q^dag Mdot Q)_ij / (sqrt(w_i) + sqrt(w_j)) in that basis.
    """
    w, Q = np.linalg.eigh(_hermitize(M) - np.eye(M.shape[0]))
    if w.min() < _MARGIN_FLOOR:
        raise MetricDegenerate(
            f"min eig(M - I) = {w.min():.3e} < {_MARGIN_FLOOR}; raise M(0) or "
            "shorten the window")
    sq = np.sqrt(w)
    eta = (Q * sq) @ Q.conj().T
    C = Q.conj().T @ Mdot @ Q
    etadot = Q @ (C / (sq[:, None] + sq[None, :])) @ Q.conj().T
    return eta, etadot


def _blocks_at(Hs: np.ndarray, t: float, M0: np.ndarray):
    """(Xi, Lambda, eta, M) at time t for the scaled generator Hs."""
    M = metric_M(Hs, t, M0)
    Mdot = -1j * Hs.conj().T @ M + 1j * M @ Hs
    eta, etadot = _eta_and_rate(M, Mdot)
    Minv = np.linalg.inv(M)
    Lhat = (Hs + (1j * etadot + eta @ Hs) @ eta) @ Minv
    Xhat = 1j * (Hs @ eta - eta @ Hs - 1j * etadot) @ Minv
    # Hermiticity of the two blocks is a consequence of the metric equation
    # of motion, not enforced here; tests measure it.
    return Lhat + Xhat, Lhat - Xhat, eta, M


def build_dilation(H: np.ndarray, T: float, M0: np.ndarray | None = None,
                   steps: int = 200, s: float = 1.0) -> DilationBundle:
    """Sample the dilated pair (Xi, Lambda) for s*H on steps+1 times in [0, T].

    M0 defaults to 1.3 I.  Raises MetricDegenerate as soon as M(t) - I
    loses definiteness anywhere on the grid.
    """
    if s == 0.0:
        raise ValueError("time-scale factor s must be nonzero")
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    M0 = 1.3 * np.eye(n) if M0 is None else np.asarray(M0, dtype=complex)
    w0 = np.linalg.eigvalsh(_hermitize(M0))
    if w0.min() <= 1.0:
        raise MetricDegenerate("M(0) - I must be positive definite")
    Hs = s * H
    times = np.linspace(0.0, T, steps + 1)
    Xi = np.zeros((len(times), n, n), dtype=complex)
    Lam = np.zeros_like(Xi)
    eta = np.zeros_like(Xi)
    M = np.zeros_like(Xi)
    for k, t in enumerate(times):
        Xi[k], Lam[k], eta[k], M[k] = _blocks_at(Hs, float(t), M0)
    return DilationBundle(times, Xi, Lam, eta, M, scale_s=s)


def metric_margin(H: np.ndarray, T: float, M0: np.ndarray | None = None,
                  s: float = 1.0, samples: int = 200) -> float:
    """min over [0, T] of the smallest eigenvalue of M(t) - I."""
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    M0 = 1.3 * np.eye(n) if M0 is None else np.asarray(M0, dtype=complex)
    worst = np.inf
    for t in np.linspace(0.0, T, samples + 1):
        w = np.linalg.eigvalsh(_hermitize(metric_M(s * H, float(t), M0))
                               - np.eye(n))
        worst = min(worst, float(w.min()))
    return worst


def _rk4(f, y0: np.ndarray, times: np.ndarray) -> np.ndarray:
    out = np.zeros((len(times), len(y0)), dtype=complex)
    out[0] = y0
    y = y0.astype(complex)
    for k in range(len(times) - 1):
        t, dt = times[k], times[k + 1] - times[k]
        k1 = f(t, y)
        k2 = f(t + dt / 2.0, y + dt / 2.0 * k1)
        k3 = f(t + dt / 2.0, y + dt / 2.0 * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = y
    return out


def verify_embedding(bundle: DilationBundle, H: np.ndarray, psi0: np.ndarray,
                     T: float, steps: int | None = None,
                     refinements: int = 3) -> float:
    """Max direction mismatch between the dilated evolution and s*H evolution.

    Evolves psi0 (x) (|-> + eta(0)|+>) under H_tot(t) with a fixed-step
    4th-order integrator, projects onto the |-> ancilla component, and
    compares directions against direct evolution under s*H at every grid
    time.  The step count is doubled until the residual stabilizes.
    """
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    Hs = bundle.scale_s * H
    M0 = bundle.M[0]
    eta0 = bundle.eta[0]
    psi0 = np.asarray(psi0, dtype=complex)

    proj_minus = np.kron(np.eye(n), ANCILLA_MINUS.conj()[None, :])

    def h_tot(t: float) -> np.ndarray:
        Xi, Lam, _, _ = _blocks_at(Hs, float(t), M0)
        P1 = np.array([[0.0, 0.0], [0.0, 1.0]])
        P0 = np.array([[1.0, 0.0], [0.0, 0.0]])
        return np.kron(Xi, P1) + np.kron(Lam, P0)

    def rhs(t, y):
        return -1j * (h_tot(t) @ y)

    psi_big0 = np.kron(psi0, ANCILLA_MINUS) + np.kron(eta0 @ psi0, ANCILLA_PLUS)

    def run(nsteps: int) -> float:
        times = np.linspace(0.0, T, nsteps + 1)
        big = _rk4(rhs, psi_big0, times)
        worst = 0.0
        for k, t in enumerate(times):
            proj = proj_minus @ big[k]
            ref = expm(-1j * Hs * float(t)) @ psi0
            denom = np.linalg.norm(proj) * np.linalg.norm(ref)
            worst = max(worst, 1.0 - abs(np.vdot(proj, ref)) / denom)
        return worst

    nsteps = steps if steps is not None else max(128, 16 * int(T * (np.linalg.norm(Hs, 2) + 1.0)))
    resid = run(nsteps)
    for _ in range(refinements):
        finer = run(2 * nsteps)
        if abs(finer - resid) <= 0.1 * max(resid, 1e-12):
            return finer
        nsteps *= 2
        resid = finer
    return resid
