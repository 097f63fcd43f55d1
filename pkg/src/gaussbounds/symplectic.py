"""Canonical Gaussian-state representation and symplectic phase-space algebra.

Conventions (fixed throughout the package):
  quadrature ordering  (x1, p1, ..., xm, pm)
  hbar = 1, vacuum covariance = identity
  coherent amplitude alpha enters the first moments as d = sqrt(2)(Re a, Im a)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9
PAIRING_TOL = 1e-8
RANK_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when vector/matrix shapes are inconsistent with the mode count."""


def symplectic_form(modes: int) -> np.ndarray:
    """Block-diagonal symplectic form: `modes` copies of [[0, 1], [-1, 0]]."""
    if modes < 1:
        raise DimensionError(f"mode count must be >= 1, got {modes}")
    omega1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * modes, 2 * modes))
    for k in range(modes):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = omega1
    return out


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization: vec[[a,b],[c,d]] = (a, c, b, d)."""
    a = np.asarray(a)
    return a.reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if v.size != rows * cols:
        raise DimensionError(f"cannot reshape length-{v.size} vector to {rows}x{cols}")
    return v.reshape(rows, cols, order="F")


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of a covariance matrix, sorted descending.

    Computed as the moduli of the eigenvalues of i*Omega*sigma, which come in
    +/- pairs; the pairing is checked and deduplicated to m values.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise DimensionError(f"covariance matrix must be 2m x 2m, got {sigma.shape}")
    if np.max(np.abs(sigma - sigma.T)) > 1e-10 * max(1.0, np.max(np.abs(sigma))):
        raise ValueError("covariance matrix is not symmetric")
    m = sigma.shape[0] // 2
    omega = symplectic_form(m)
    evals = np.linalg.eigvals(1j * omega @ sigma)
    if np.max(np.abs(evals.imag)) > 1e-8 * max(1.0, np.max(np.abs(evals))):
        raise ArithmeticError(
            f"eigenvalues of i*Omega*sigma have complex residue {np.max(np.abs(evals.imag)):.3e}"
        )
    mods = np.sort(np.abs(evals))[::-1]
    paired = mods.reshape(m, 2)
    mismatch = np.max(np.abs(paired[:, 0] - paired[:, 1]))
    if mismatch > PAIRING_TOL * max(1.0, mods[0]):
        raise ArithmeticError(f"symplectic eigenvalue pairs mismatch by {mismatch:.3e}")
    return paired.mean(axis=1)


@dataclass(frozen=True)
class GaussianState:
    """First moments and covariance matrix of an m-mode Gaussian state.

    `d` has length 2m in (x1, p1, ..., xm, pm) order and `sigma` is the
    2m x 2m covariance matrix normalized so the vacuum has sigma = I.
    """

    d: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.d, dtype=float))
        sigma = np.asarray(self.sigma, dtype=float)
        if d.ndim != 1 or d.size % 2:
            raise DimensionError(f"first-moment vector must have even length, got {d.shape}")
        if sigma.shape != (d.size, d.size):
            raise DimensionError(
                f"covariance shape {sigma.shape} does not match first moments of length {d.size}"
            )
        asym = np.max(np.abs(sigma - sigma.T))
        if asym > SYMMETRY_TOL * max(1.0, np.max(np.abs(sigma))):
            raise ValueError(f"covariance matrix asymmetric by {asym:.3e}")
        sigma = 0.5 * (sigma + sigma.T)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "sigma", sigma)
        d.setflags(write=False)
        sigma.setflags(write=False)

    @property
    def modes(self) -> int:
        return self.d.size // 2

    @property
    def omega(self) -> np.ndarray:
        return symplectic_form(self.modes)

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.sigma)

    @staticmethod
    def vacuum(modes: int) -> "GaussianState":
        return GaussianState(np.zeros(2 * modes), np.eye(2 * modes))


@dataclass(frozen=True)
class SymplecticMap:
    """Affine Gaussian unitary: d -> S d + d_shift, sigma -> S sigma S^T."""

    S: np.ndarray
    d_shift: np.ndarray | None = None

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise DimensionError(f"symplectic matrix must be 2m x 2m, got {S.shape}")
        shift = self.d_shift
        shift = np.zeros(S.shape[0]) if shift is None else np.asarray(shift, dtype=float)
        if shift.shape != (S.shape[0],):
            raise DimensionError("shift length does not match matrix size")
        omega = symplectic_form(S.shape[0] // 2)
        resid = np.linalg.norm(S.T @ omega @ S - omega)
        if resid > 1e-10 * max(1.0, np.linalg.norm(S) ** 2):
            raise ValueError(f"matrix is not symplectic: ||S^T Omega S - Omega|| = {resid:.3e}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "d_shift", shift)


@dataclass(frozen=True)
class StateDiagnostics:
    """Validation report for a GaussianState."""

    valid: bool
    symmetry_residual: float
    min_symplectic_eigenvalue: float
    symplectic_eigenvalues: np.ndarray
    symplectic_rank: int
    pure_modes: np.ndarray  # boolean, one flag per normal mode
    violations: tuple = ()


def validate_state(state: GaussianState, rank_tol: float = RANK_TOL) -> StateDiagnostics:
    """Check physicality of a Gaussian state, reporting instead of raising."""
    sym_resid = float(np.max(np.abs(state.sigma - state.sigma.T)))
    violations = []
    if sym_resid > SYMMETRY_TOL * max(1.0, np.max(np.abs(state.sigma))):
        violations.append(f"covariance asymmetric by {sym_resid:.3e}")
    try:
        nu = symplectic_eigenvalues(state.sigma)
    except (ValueError, ArithmeticError) as err:
        return StateDiagnostics(
            valid=False,
            symmetry_residual=sym_resid,
            min_symplectic_eigenvalue=float("nan"),
            symplectic_eigenvalues=np.array([]),
            symplectic_rank=0,
            pure_modes=np.array([], dtype=bool),
            violations=tuple(violations + [str(err)]),
        )
    nu_min = float(nu.min())
    if nu_min < 1.0 - PHYSICALITY_TOL:
        violations.append(f"uncertainty relation violated: min nu = {nu_min:.12g} < 1")
    pure = nu - 1.0 < rank_tol
    return StateDiagnostics(
        valid=not violations,
        symmetry_residual=sym_resid,
        min_symplectic_eigenvalue=nu_min,
        symplectic_eigenvalues=nu,
        symplectic_rank=int(np.sum(~pure)),
        pure_modes=pure,
        violations=tuple(violations),
    )


def regularize(state: GaussianState, epsilon: float) -> GaussianState:
    """Blend the covariance toward the vacuum: sigma -> (1-eps) sigma + eps I.

    Lifts squeezed/correlated pure normal modes above nu = 1; the identity
    covariance is a fixed point (see `lift_covariance` for a strict lift).
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    if epsilon == 0.0:
        return state
    n = state.d.size
    return GaussianState(state.d, (1.0 - epsilon) * state.sigma + epsilon * np.eye(n))


def apply_gaussian_map(state: GaussianState, gmap: SymplecticMap) -> GaussianState:
    """Apply a Gaussian unitary: d -> S d + shift, sigma -> S sigma S^T."""
    if gmap.S.shape[0] != state.d.size:
        raise DimensionError(
            f"map acts on {gmap.S.shape[0]} quadratures, state has {state.d.size}"
        )
    return GaussianState(gmap.S @ state.d + gmap.d_shift, gmap.S @ state.sigma @ gmap.S.T)


def loss_channel(state: GaussianState, eta: float, mode: int | None = None) -> GaussianState:
    """Pure-loss channel with transmissivity eta on one mode (or all modes).

    On the affected quadratures: d -> sqrt(eta) d, sigma -> eta sigma + (1-eta) I.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    n = state.d.size
    scale = np.ones(n)
    if mode is None:
        idx = np.arange(n)
    else:
        if not 0 <= mode < state.modes:
            raise DimensionError(f"mode index {mode} out of range for {state.modes} modes")
        idx = np.array([2 * mode, 2 * mode + 1])
    scale[idx] = np.sqrt(eta)
    d = scale * state.d
    sigma = np.outer(scale, scale) * state.sigma
    sigma[idx, idx] += 1.0 - eta
    return GaussianState(d, sigma)


def rotation_map(phi: float, modes: int = 1, mode: int = 0) -> SymplecticMap:
    """Phase-space rotation R_phi = [[cos, sin], [-sin, cos]] on one mode."""
    S = np.eye(2 * modes)
    block = np.array([[np.cos(phi), np.sin(phi)], [-np.sin(phi), np.cos(phi)]])
    S[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = block
    return SymplecticMap(S)


def squeeze_map(r: float, modes: int = 1, mode: int = 0) -> SymplecticMap:
    """Single-mode squeezing diag(e^r, e^-r) on one mode."""
    S = np.eye(2 * modes)
    S[2 * mode, 2 * mode] = np.exp(r)
    S[2 * mode + 1, 2 * mode + 1] = np.exp(-r)
    return SymplecticMap(S)
