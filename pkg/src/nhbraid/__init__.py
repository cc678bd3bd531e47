"""Spectral topology of a three-band non-Hermitian model family.

Eigenvalue braids along parameter loops, exceptional-point catalogs and
charges, the braid-invariant transition, a Hermitian dilation embedding,
and eigenvalue reconstruction from population measurements.
"""

__version__ = "0.1.0"

from . import errors
from .braid import (BraidWord, Permutation, burau, equivalent, exponent_sum,
                    free_reduce, permutation_of, tau_to_sigma)
from .dilation import (DilationBundle, build_dilation, metric_M,
                       metric_margin, verify_embedding)
from .eps import (EpOrderResult, EpRecord, EpTrajectory, charge, ep_order,
                  find_eps, local_braid, refine_ep, trace_ep_paths,
                  transition_alpha)
from .evolution import (StateTrajectory, density_matrix, evolve_nh, fidelity,
                        psd_project, steady_eigenstate)
from .model import (Loop, ModelParams, PolyCoeffs, coeffs_from_eigenvalues,
                    discriminant, discriminant_values, hamiltonian,
                    loop_point, poly_coeffs)
from .reconstruct import (GenericH, MeasurementRecord, PopulationRatios,
                          family_consistency, forward_ratios, generic_fit,
                          predicted_value, solve_eigenvalues)
from .spectral import (BandPath, CrossingEvent, Spectrum, cubic_roots,
                       detect_crossings, eigensolve, relative_phases,
                       track_bands)

__all__ = [
    "errors", "__version__",
    "BraidWord", "Permutation", "burau", "equivalent", "exponent_sum",
    "free_reduce", "permutation_of", "tau_to_sigma",
    "DilationBundle", "build_dilation", "metric_M", "metric_margin",
    "verify_embedding",
    "EpOrderResult", "EpRecord", "EpTrajectory", "charge", "ep_order",
    "find_eps", "local_braid", "refine_ep", "trace_ep_paths",
    "transition_alpha",
    "StateTrajectory", "density_matrix", "evolve_nh", "fidelity",
    "psd_project", "steady_eigenstate",
    "Loop", "ModelParams", "PolyCoeffs", "coeffs_from_eigenvalues",
    "discriminant", "discriminant_values", "hamiltonian", "loop_point",
    "poly_coeffs",
    "GenericH", "MeasurementRecord", "PopulationRatios",
    "family_consistency", "forward_ratios", "generic_fit",
    "predicted_value", "solve_eigenvalues",
    "BandPath", "CrossingEvent", "Spectrum", "cubic_roots",
    "detect_crossings", "eigensolve", "relative_phases", "track_bands",
]
