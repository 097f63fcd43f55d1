"""Precision bounds for multiparameter estimation with Gaussian bosonic models.

Computes the SLD and RLD Cramer-Rao bounds, the Holevo Cramer-Rao bound (as a
semidefinite program over first/second-moment data), the closed-form Holevo
upper bound and the incompatibility parameter, for arbitrary finite-mode
Gaussian quantum statistical models.
"""

from .bounds import (
    SingularModelError,
    hcrb_upper,
    incompatibility_r,
    rld_crb,
    sld_crb,
)
from .derivatives import (
    InformationBundle,
    LogDerivatives,
    ModelJet,
    information_bundle,
    rld_observables,
    rld_qfim,
    sld_commutator,
    sld_observables,
    sld_qfim,
    uhlmann_matrix,
)
from .models import (
    ParametricModel,
    build_model,
    closed_form_bounds,
    closed_form_commutator,
    closed_form_uhlmann,
    disp_squeeze_single_model,
    disp_squeeze_two_model,
    dump_jet,
    finite_difference_jet,
    load_jet,
    phase_loss_model,
)
from .quadratic import (
    Basis,
    InnerProductKernel,
    QuadraticObservable,
    SingularKernelError,
    build_kernel,
    commutation_superoperator,
    gaussian_moment,
    pairing_zero_mean,
    rld_pairing_general,
    to_central_basis,
    to_standard_basis,
)
from .report import BoundsReport, evaluate_bounds
from .sdp import (
    HcrbSolution,
    SolveOptions,
    SolveStatus,
    build_hcrb_program,
    embed_complex_psd,
    solve_hcrb,
    solve_rld_sdp,
    solve_sld_sdp,
)
from .symplectic import (
    GaussianState,
    SymplecticMap,
    apply_gaussian_map,
    loss_channel,
    regularize,
    symplectic_eigenvalues,
    symplectic_form,
    unvec,
    validate_state,
    vec,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsReport",
    "Basis",
    "GaussianState",
    "HcrbSolution",
    "InformationBundle",
    "InnerProductKernel",
    "LogDerivatives",
    "ModelJet",
    "ParametricModel",
    "QuadraticObservable",
    "SingularKernelError",
    "SingularModelError",
    "SolveOptions",
    "SolveStatus",
    "SymplecticMap",
    "apply_gaussian_map",
    "build_hcrb_program",
    "build_kernel",
    "build_model",
    "closed_form_bounds",
    "closed_form_commutator",
    "closed_form_uhlmann",
    "commutation_superoperator",
    "disp_squeeze_single_model",
    "disp_squeeze_two_model",
    "dump_jet",
    "embed_complex_psd",
    "evaluate_bounds",
    "finite_difference_jet",
    "gaussian_moment",
    "hcrb_upper",
    "incompatibility_r",
    "information_bundle",
    "load_jet",
    "loss_channel",
    "pairing_zero_mean",
    "phase_loss_model",
    "regularize",
    "rld_crb",
    "rld_observables",
    "rld_pairing_general",
    "rld_qfim",
    "sld_commutator",
    "sld_crb",
    "sld_observables",
    "sld_qfim",
    "solve_hcrb",
    "solve_rld_sdp",
    "solve_sld_sdp",
    "symplectic_eigenvalues",
    "symplectic_form",
    "to_central_basis",
    "to_standard_basis",
    "uhlmann_matrix",
    "unvec",
    "validate_state",
    "vec",
]
