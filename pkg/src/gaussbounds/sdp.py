"""Semidefinite programs for the Holevo bound and the SLD/RLD bounds.

All three bounds minimize tr[W V] over a real symmetric matrix V and a
collection of zero-mean quadratic observables, subject to local unbiasedness
and a Schur-complement positivity block built from a factor of the
inner-product kernel:

  SLD bound: real factor of the symmetric kernel, real observables
  Holevo bound: complex factor of the full kernel, real (Hermitian) observables
  RLD bound: complex factor, complex (non-Hermitian) observables

Complex Hermitian blocks are passed to real-cone solvers through the standard
doubling [[Re, -Im], [Im, Re]].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import cvxpy as cp
import numpy as np

from .bounds import validate_weight
from .derivatives import ModelJet, ensure_invertible_jet
from .quadratic import Basis, InnerProductKernel, QuadraticObservable
from .symplectic import unvec

DEFAULT_EPSILON = 1e-6
DEFAULT_SOLVER_TOL = 1e-9


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INACCURATE = "inaccurate"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    SOLVER_ERROR = "solver_error"


class BoundKind(Enum):
    SLD = "sld"
    RLD = "rld"
    HOLEVO = "holevo"


@dataclass(frozen=True)
class SolveOptions:
    epsilon: float = DEFAULT_EPSILON
    extrapolate: bool = False
    verify: bool = False
    solver: str = "CLARABEL"
    solver_tol: float = DEFAULT_SOLVER_TOL
    symmetric_reduction: bool = True
    kernel_tol: float = 1e-12


def embed_complex_psd(h_re, h_im=None):
    """Real embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix.

    H is PSD exactly when the embedding is PSD (the embedding's spectrum is
    that of H, doubled).  Accepts a complex ndarray, a pair of ndarrays, or a
    pair of cvxpy expressions.
    """
    if h_im is None:
        h = np.asarray(h_re)
        h_re, h_im = h.real, h.imag
    if isinstance(h_re, np.ndarray) and isinstance(h_im, np.ndarray):
        return np.block([[h_re, -h_im], [h_im, h_re]])
    return cp.bmat([[h_re, -h_im], [h_im, h_re]])


@dataclass
class ConicProgram:
    """Structured SDP: objective tr[W V], unbiasedness equalities, one PSD block."""

    kind: BoundKind
    p: int
    modes: int
    z: int
    rank: int
    psd_dim: int
    n_equalities: int
    problem: cp.Problem
    v_var: cp.Variable
    x_re: cp.Variable
    x_im: cp.Variable | None
    expander: np.ndarray
    psd_constraint: cp.constraints.constraint.Constraint

    def x_columns(self) -> np.ndarray:
        """Optimal observable stacks (z x p), complex for the RLD program."""
        x = self.expander @ self.x_re.value
        if self.x_im is not None:
            x = x + 1j * (self.expander @ self.x_im.value)
        return x


def _build_program(
    jet: ModelJet,
    kernel: InnerProductKernel,
    w: np.ndarray,
    kind: BoundKind,
    symmetric_reduction: bool = True,
) -> ConicProgram:
    p = jet.p
    z = kernel.z
    w = validate_weight(w, p)
    if kind is BoundKind.SLD:
        factor = kernel.real_factor
    else:
        factor = kernel.factor
    rank = factor.shape[0]
    if rank == 0:
        raise ValueError("inner-product kernel has rank zero")
    expander = kernel.sym_expander if symmetric_reduction else np.eye(z)
    dmat = jet.dmat

    v_var = cp.Variable((p, p), symmetric=True, name="V")
    x_re = cp.Variable((expander.shape[1], p), name="Xre")
    xbar_re = expander @ x_re
    constraints = [xbar_re.T @ dmat == np.eye(p)]
    n_eq = p * p

    if kind is BoundKind.SLD:
        block = factor @ xbar_re
        psd = cp.bmat([[v_var, block.T], [block, np.eye(rank)]]) >> 0
        psd_dim = p + rank
        x_im = None
    else:
        x_im = None
        if kind is BoundKind.RLD:
            x_im = cp.Variable((expander.shape[1], p), name="Xim")
            xbar_im = expander @ x_im
            constraints.append(xbar_im.T @ dmat == np.zeros((p, p)))
            n_eq += p * p
            b_re = np.real(factor) @ xbar_re - np.imag(factor) @ xbar_im
            b_im = np.imag(factor) @ xbar_re + np.real(factor) @ xbar_im
        else:
            b_re = np.real(factor) @ xbar_re
            b_im = np.imag(factor) @ xbar_re
        re_h = cp.bmat([[v_var, b_re.T], [b_re, np.eye(rank)]])
        im_h = cp.bmat(
            [[np.zeros((p, p)), -b_im.T], [b_im, np.zeros((rank, rank))]]
        )
        psd = embed_complex_psd(re_h, im_h) >> 0
        psd_dim = 2 * (p + rank)

    constraints.append(psd)
    problem = cp.Problem(cp.Minimize(cp.trace(w @ v_var)), constraints)
    return ConicProgram(
        kind=kind,
        p=p,
        modes=jet.modes,
        z=z,
        rank=rank,
        psd_dim=psd_dim,
        n_equalities=n_eq,
        problem=problem,
        v_var=v_var,
        x_re=x_re,
        x_im=x_im,
        expander=expander,
        psd_constraint=psd,
    )


def build_hcrb_program(jet, kernel, w, symmetric_reduction=True) -> ConicProgram:
    return _build_program(jet, kernel, w, BoundKind.HOLEVO, symmetric_reduction)


def build_sld_program(jet, kernel, w, symmetric_reduction=True) -> ConicProgram:
    return _build_program(jet, kernel, w, BoundKind.SLD, symmetric_reduction)


def build_rld_program(jet, kernel, w, symmetric_reduction=True) -> ConicProgram:
    return _build_program(jet, kernel, w, BoundKind.RLD, symmetric_reduction)


_STATUS_MAP = {
    cp.OPTIMAL: SolveStatus.OPTIMAL,
    cp.OPTIMAL_INACCURATE: SolveStatus.INACCURATE,
    cp.INFEASIBLE: SolveStatus.INFEASIBLE,
    cp.INFEASIBLE_INACCURATE: SolveStatus.INFEASIBLE,
    cp.UNBOUNDED: SolveStatus.UNBOUNDED,
    cp.UNBOUNDED_INACCURATE: SolveStatus.UNBOUNDED,
}


def solve_conic(program: ConicProgram, solver: str = "CLARABEL", tol: float = DEFAULT_SOLVER_TOL):
    """Run the backend on a structured program.

    Returns (value, primal dict, status, gap).  Any conforming conic solver
    can be substituted via `solver`; the gap is the complementarity residual
    of the PSD block.
    """
    kwargs = {}
    if solver.upper() == "CLARABEL":
        kwargs = dict(tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol)
    elif solver.upper() == "SCS":
        kwargs = dict(eps=tol)
    try:
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message="Solution may be inaccurate")
            program.problem.solve(solver=solver, **kwargs)
    except cp.SolverError:
        return float("nan"), {}, SolveStatus.SOLVER_ERROR, float("nan")
    status = _STATUS_MAP.get(program.problem.status, SolveStatus.SOLVER_ERROR)
    if program.v_var.value is None:
        return float("nan"), {}, status, float("nan")
    primal = {"V": program.v_var.value, "X": program.x_columns()}
    gap = float("nan")
    dual = program.psd_constraint.dual_value
    block = program.psd_constraint.args[0].value
    if dual is not None and block is not None:
        gap = abs(float(np.sum(dual * block)))
    return float(program.problem.value), primal, status, gap


@dataclass(frozen=True)
class HcrbSolution:
    """Optimal value and certificates of one bound SDP.

    `status` is certificate-based: a solver that stops just short of its
    requested tolerance (common for the doubled spectrum of the real
    embedding) is still reported as optimal when the unbiasedness residual,
    the PSD block eigenvalue and the complementarity gap meet the documented
    thresholds; `raw_status` keeps the solver's own verdict.
    """

    value: float
    kind: BoundKind
    status: SolveStatus
    v_opt: np.ndarray | None
    x_opt: np.ndarray | None  # z x p observable stacks (complex for RLD)
    gap: float
    epsilon: float  # regularization actually applied (0 if none)
    solver_tol: float
    error_estimate: float | None = None  # from extrapolation / verification
    unbiasedness_residual: float = float("nan")
    psd_residual: float = float("nan")
    raw_status: SolveStatus | None = None

    def observables(self, jet: ModelJet) -> tuple:
        """Optimal observables as standard-basis quadratic operators."""
        if self.x_opt is None:
            return ()
        d = jet.state.d
        sigma = jet.state.sigma
        n = d.size
        out = []
        for j in range(self.x_opt.shape[1]):
            col = self.x_opt[:, j]
            c2 = unvec(col[n:], n, n)
            c1 = col[:n] - 2.0 * c2 @ d
            c0 = -0.5 * np.trace(c2 @ sigma) - col[:n] @ d + d @ c2 @ d
            out.append(QuadraticObservable(jet.modes, c0, c1, c2, Basis.STANDARD))
        return tuple(out)


def _certificates(program: ConicProgram, primal: dict, dmat: np.ndarray):
    x = primal.get("X")
    if x is None:
        return float("nan"), float("nan")
    unbias = float(np.max(np.abs(x.T @ dmat - np.eye(program.p))))
    block = program.psd_constraint.args[0].value
    psd_min = float(np.linalg.eigvalsh(0.5 * (block + block.T))[0])
    return unbias, psd_min


def _solve_at(jet: ModelJet, w, kind: BoundKind, options: SolveOptions):
    kernel = jet.kernel(options.kernel_tol)
    program = _build_program(jet, kernel, w, kind, options.symmetric_reduction)
    # interior-point backends can fail outright when the requested tolerance
    # sits past the feasibility/gap trade-off; retry slightly looser before
    # reporting a hard failure
    status = SolveStatus.SOLVER_ERROR
    value, primal, gap = float("nan"), {}, float("nan")
    for relax in (1.0, 10.0, 100.0):
        value, primal, status, gap = solve_conic(
            program, options.solver, options.solver_tol * relax
        )
        if status is not SolveStatus.SOLVER_ERROR:
            break
    unbias, psd_min = _certificates(program, primal, jet.dmat)
    return value, primal, status, gap, unbias, psd_min


GAP_CERT_SCALE = 1e-6
UNBIAS_CERT_TOL = 1e-6
PSD_CERT_TOL = -1e-6


def _certify(status: SolveStatus, value: float, gap: float, unbias: float, psd_min: float):
    if status is not SolveStatus.INACCURATE:
        return status
    ok = (
        np.isfinite(gap)
        and gap <= GAP_CERT_SCALE * max(1.0, abs(value))
        and unbias <= UNBIAS_CERT_TOL
        and psd_min >= PSD_CERT_TOL
    )
    return SolveStatus.OPTIMAL if ok else status


def _solve_bound(jet: ModelJet, w, kind: BoundKind, options: SolveOptions) -> HcrbSolution:
    base, eps_used = ensure_invertible_jet(jet, options.epsilon)
    value, primal, raw_status, gap, unbias, psd_min = _solve_at(base, w, kind, options)
    status = _certify(raw_status, value, gap, unbias, psd_min)
    if status in (SolveStatus.INFEASIBLE, SolveStatus.UNBOUNDED):
        # unbiasedness is satisfiable whenever the Fisher matrix is
        # nonsingular, so a solver claiming otherwise is itself at fault
        status = SolveStatus.SOLVER_ERROR
    error = None
    if eps_used and status in (SolveStatus.OPTIMAL, SolveStatus.INACCURATE) and (
        options.extrapolate or options.verify
    ):
        half = jet.regularized(eps_used / 2.0)
        value_half, _, status_half, _, _, _ = _solve_at(half, w, kind, options)
        if status_half in (SolveStatus.OPTIMAL, SolveStatus.INACCURATE):
            error = abs(value_half - value)
            if options.extrapolate:
                value = 2.0 * value_half - value
    return HcrbSolution(
        value=value,
        kind=kind,
        status=status,
        v_opt=primal.get("V"),
        x_opt=primal.get("X"),
        gap=gap,
        epsilon=eps_used,
        solver_tol=options.solver_tol,
        error_estimate=error,
        unbiasedness_residual=unbias,
        psd_residual=psd_min,
        raw_status=raw_status,
    )


def solve_hcrb(jet: ModelJet, w, options: SolveOptions | None = None) -> HcrbSolution:
    """Holevo bound C^H(W) by semidefinite programming."""
    return _solve_bound(jet, w, BoundKind.HOLEVO, options or SolveOptions())


def solve_sld_sdp(jet: ModelJet, w, options: SolveOptions | None = None) -> HcrbSolution:
    """SLD bound as an SDP; equals tr[W (J^S)^-1] up to solver accuracy."""
    return _solve_bound(jet, w, BoundKind.SLD, options or SolveOptions())


def solve_rld_sdp(jet: ModelJet, w, options: SolveOptions | None = None) -> HcrbSolution:
    """RLD bound as an SDP over non-Hermitian observables."""
    return _solve_bound(jet, w, BoundKind.RLD, options or SolveOptions())
