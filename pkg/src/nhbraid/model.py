"""Three-band non-Hermitian model family and its characteristic polynomial.

The family is parameterized by a real control parameter ``alpha`` and a
point ``(k1, k2)`` in a two-dimensional parameter plane:

    H = sqrt(2) * [(i(alpha+1)/4 - k1) Sz - Sx]
        + (i k2 - [1 - (alpha-2)^2]) * diag(0, 1, 0)

with Sx, Sz the standard spin-1 operators.  Written out, H is the
tridiagonal matrix [[c1, -1, 0], [-1, -c2, -1], [0, -1, -c1]] with

    c1 = sqrt(2) * (i(alpha+1)/4 - k1),
    c2 = -i k2 + 1 - (alpha-2)^2,

so its characteristic polynomial is

    P(E) = E^3 + c2 E^2 + (-c1^2 - 2) E - c1^2 c2.

All functions are pure; the ``*_values`` kernels broadcast over numpy
arrays for the bulk callers (winding integrals, Newton sweeps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT2 = math.sqrt(2.0)

SX = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / SQRT2
SY = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / SQRT2
SZ = np.diag(np.array([1, 0, -1], dtype=complex))


@dataclass(frozen=True)
class ModelParams:
    """A point (alpha, k1, k2) of the model family."""

    alpha: float
    k1: float
    k2: float

    def __post_init__(self):
        for name in ("alpha", "k1", "k2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class PolyCoeffs:
    """Characteristic-polynomial coefficients c1, c2 of a family point."""

    c1: complex
    c2: complex

    def monic_coefficients(self) -> tuple[complex, complex, complex]:
        """(b, c, d) of P(E) = E^3 + b E^2 + c E + d.

        c1^2 is evaluated as 2*(c1/sqrt(2))^2: squaring sqrt(2) directly
        leaves a one-ulp artifact that would spoil the exact triple root of
        the degenerate family point.
        """
        z = self.c1 / SQRT2
        u = 2.0 * z * z
        return self.c2, -u - 2.0, -u * self.c2


@dataclass(frozen=True)
class Loop:
    """Counter-clockwise circle of radius r in the (k1, k2) plane at fixed alpha.

    ``samples`` optionally carries an initial theta grid in [0, 2*pi);
    band tracking builds and refines its own grid when it is None.
    """

    alpha: float
    r: float
    center: tuple[float, float] = (0.0, 0.0)
    samples: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ValueError(f"loop radius must be positive, got {self.r!r}")
        if self.samples is not None:
            th = np.asarray(self.samples, dtype=float)
            if th.ndim != 1 or len(th) < 2 or np.any(np.diff(th) <= 0):
                raise ValueError("samples must be strictly increasing")
            if th[0] < 0.0 or th[-1] >= 2.0 * math.pi:
                raise ValueError("samples must lie in [0, 2*pi)")


def loop_point(loop: Loop, theta: float) -> ModelParams:
    """Model point at angle theta on the loop."""
    cx, cy = loop.center
    return ModelParams(loop.alpha,
                       cx + loop.r * math.cos(theta),
                       cy + loop.r * math.sin(theta))


def coeff_values(alpha, k1, k2):
    """(c1, c2) for scalar or array inputs (broadcasting)."""
    alpha = np.asarray(alpha, dtype=float)
    c1 = SQRT2 * (0.25j * (alpha + 1.0) - np.asarray(k1))
    c2 = -1j * np.asarray(k2) + 1.0 - (alpha - 2.0) ** 2
    return c1, c2


def _u_values(alpha, k1, k2):
    """c1^2, computed without squaring sqrt(2) (see monic_coefficients)."""
    z = 0.25j * (np.asarray(alpha, dtype=float) + 1.0) - np.asarray(k1)
    return 2.0 * z * z


def poly_coeffs(p: ModelParams) -> PolyCoeffs:
    """Characteristic-polynomial coefficients at a model point."""
    c1, c2 = coeff_values(p.alpha, p.k1, p.k2)
    return PolyCoeffs(complex(c1), complex(c2))


def hamiltonian(p: ModelParams) -> np.ndarray:
    """The 3x3 family matrix at p; trace equals -c2."""
    coeffs = poly_coeffs(p)
    c1, c2 = coeffs.c1, coeffs.c2
    return np.array([[c1, -1.0, 0.0],
                     [-1.0, -c2, -1.0],
                     [0.0, -1.0, -c1]], dtype=complex)


def discriminant_values(alpha, k1, k2):
    """Discriminant of P(E) for scalar or array inputs.

    Equals prod_{i<j} (E_i - E_j)^2; zero exactly at exceptional points.
    """
    _, c2 = coeff_values(alpha, k1, k2)
    u = _u_values(alpha, k1, k2)
    v = c2
    w = u + 2.0
    return (v * v * w * w + 4.0 * w ** 3 + 4.0 * v ** 4 * u
            - 27.0 * u * u * v * v + 18.0 * v * v * u * w)


def discriminant(p: ModelParams) -> complex:
    """Discriminant of the characteristic polynomial at a model point."""
    return complex(discriminant_values(p.alpha, p.k1, p.k2))


def discriminant_k_gradient(alpha, k1, k2):
    """(d Delta/d k1, d Delta/d k2) for scalar or array inputs.

    The discriminant is polynomial in (c1^2, c2), so the chain rule with
    d(c1^2)/dk1 = -4(i(alpha+1)/4 - k1) and dc2/dk2 = -i is exact.
    """
    alpha = np.asarray(alpha, dtype=float)
    _, c2 = coeff_values(alpha, k1, k2)
    u = _u_values(alpha, k1, k2)
    v = c2
    w = u + 2.0
    dDu = (2.0 * v * v * w + 12.0 * w * w + 4.0 * v ** 4
           - 54.0 * u * v * v + 18.0 * v * v * (2.0 * u + 2.0))
    dDv = (2.0 * v * w * w + 16.0 * v ** 3 * u - 54.0 * u * u * v
           + 36.0 * v * u * w)
    du_dk1 = -4.0 * (0.25j * (alpha + 1.0) - np.asarray(k1))
    return dDu * du_dk1, dDv * (-1j)


def discriminant_alpha_gradient(alpha, k1, k2):
    """d Delta/d alpha for scalar or array inputs (continuation predictor)."""
    alpha = np.asarray(alpha, dtype=float)
    _, c2 = coeff_values(alpha, k1, k2)
    u = _u_values(alpha, k1, k2)
    v = c2
    w = u + 2.0
    dDu = (2.0 * v * v * w + 12.0 * w * w + 4.0 * v ** 4
           - 54.0 * u * v * v + 18.0 * v * v * (2.0 * u + 2.0))
    dDv = (2.0 * v * w * w + 16.0 * v ** 3 * u - 54.0 * u * u * v
           + 36.0 * v * u * w)
    du_da = 1j * (0.25j * (alpha + 1.0) - np.asarray(k1))
    dv_da = -2.0 * (alpha - 2.0)
    return dDu * du_da + dDv * dv_da


def coeffs_from_eigenvalues(e1: complex, e2: complex, e3: complex,
                            params: ModelParams | None = None) -> list[PolyCoeffs]:
    """Candidate (c1, c2) pairs reconstructed from an eigenvalue triple.

    c2 = -(e1+e2+e3) is unambiguous; c1 = sqrt(-e1 e2 e3 / (e1+e2+e3)) has
    two branches, both returned (callers disambiguate by eigen-residual,
    and c1 only ever enters downstream through c1 + E).  When the sum is
    numerically zero the parameterization has a removable singularity and
    the forward coefficients of ``params`` are used instead.
    """
    s = e1 + e2 + e3
    c2 = -s
    if abs(s) < 1e-12:
        if params is None:
            raise ZeroDivisionError(
                "eigenvalue sum is zero and no model point given for fallback")
        return [poly_coeffs(params)]
    c1 = np.sqrt(complex(-e1 * e2 * e3 / s))
    if c1 == 0.0:
        return [PolyCoeffs(0.0, complex(c2))]
    return [PolyCoeffs(complex(c1), complex(c2)),
            PolyCoeffs(complex(-c1), complex(c2))]
