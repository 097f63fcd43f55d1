"""Logarithmic-derivative observables and information matrices of a model jet.

A jet is the local data of a Gaussian statistical model at one parameter
point: the state (d, sigma) together with the first derivatives of d and
sigma along each parameter.  Everything downstream (Fisher matrices, Uhlmann
curvature, precision bounds) is a function of the jet alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadratic import (
    Basis,
    InnerProductKernel,
    QuadraticObservable,
    build_kernel,
    solve_full,
    solve_re,
)
from .symplectic import DimensionError, GaussianState, regularize, symplectic_eigenvalues, unvec, vec

DSIGMA_SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class ModelJet:
    """State plus per-parameter derivatives of (d, sigma)."""

    state: GaussianState
    dd: tuple  # p real vectors of length 2m
    dsigma: tuple  # p real symmetric 2m x 2m matrices
    names: tuple = ()

    def __post_init__(self):
        n = self.state.d.size
        dd = tuple(np.asarray(v, dtype=float) for v in self.dd)
        dsig = tuple(np.asarray(s, dtype=float) for s in self.dsigma)
        if len(dd) != len(dsig):
            raise DimensionError("dd and dsigma must have one entry per parameter")
        for j, (v, s) in enumerate(zip(dd, dsig)):
            if v.shape != (n,):
                raise DimensionError(f"dd[{j}] has shape {v.shape}, expected ({n},)")
            if s.shape != (n, n):
                raise DimensionError(f"dsigma[{j}] has shape {s.shape}, expected ({n}, {n})")
            asym = np.max(np.abs(s - s.T))
            if asym > DSIGMA_SYMMETRY_TOL * max(1.0, np.max(np.abs(s))):
                raise ValueError(f"dsigma[{j}] asymmetric by {asym:.3e}")
        names = tuple(self.names) if self.names else tuple(f"theta{j}" for j in range(len(dd)))
        if len(names) != len(dd):
            raise DimensionError("parameter name count does not match derivative count")
        object.__setattr__(self, "dd", dd)
        object.__setattr__(self, "dsigma", dsig)
        object.__setattr__(self, "names", names)

    @property
    def p(self) -> int:
        return len(self.dd)

    @property
    def modes(self) -> int:
        return self.state.modes

    @property
    def dmat(self) -> np.ndarray:
        """z x p matrix whose column j stacks (dd_j; vec[dsigma_j] / 2)."""
        cols = [np.concatenate([v, 0.5 * vec(s)]) for v, s in zip(self.dd, self.dsigma)]
        return np.column_stack(cols)

    def kernel(self, tol: float = 1e-12) -> InnerProductKernel:
        return build_kernel(self.state.sigma, tol)

    def regularized(self, epsilon: float, lift: bool = True) -> "ModelJet":
        """Jet of the regularized model family.

        Applies sigma -> (1-eps) sigma + eps I (scaling dsigma accordingly)
        and, when `lift` is set, a further multiplicative inflation by
        (1+eps), which pushes every symplectic eigenvalue strictly above one
        even for vacuum-like modes where the blend alone is a fixed point.
        """
        if epsilon == 0.0:
            return self
        state = regularize(self.state, epsilon)
        dsigma = [(1.0 - epsilon) * s for s in self.dsigma]
        if lift:
            state = GaussianState(state.d, (1.0 + epsilon) * state.sigma)
            dsigma = [(1.0 + epsilon) * s for s in dsigma]
        return ModelJet(state, self.dd, tuple(dsigma), self.names)

    def reparametrized(self, a: np.ndarray) -> "ModelJet":
        """Jet for new parameters theta' = A theta (derivative columns -> D A^-1)."""
        a = np.asarray(a, dtype=float)
        ainv = np.linalg.inv(a)
        dd = [sum(ainv[k, j] * self.dd[k] for k in range(self.p)) for j in range(self.p)]
        dsig = [sum(ainv[k, j] * self.dsigma[k] for k in range(self.p)) for j in range(self.p)]
        return ModelJet(self.state, tuple(dd), tuple(dsig))

    def min_symplectic_eigenvalue(self) -> float:
        return float(symplectic_eigenvalues(self.state.sigma).min())


def ensure_invertible_jet(jet: ModelJet, epsilon: float, gap: float = 1e-9):
    """Regularize a jet only if some normal mode is (near-)pure.

    Returns (jet, epsilon_used); epsilon_used is 0.0 when no action was needed.
    """
    if jet.min_symplectic_eigenvalue() >= 1.0 + gap:
        return jet, 0.0
    return jet.regularized(epsilon), epsilon


@dataclass(frozen=True)
class LogDerivatives:
    """Central-basis stacks (z x p) and standard-basis coefficient sets."""

    central: np.ndarray
    standard: tuple  # p QuadraticObservable in the standard basis


def _standardize(jet: ModelJet, central_cols: np.ndarray) -> tuple:
    """Standard-basis observables from central z-stacks of zero-mean operators."""
    d = jet.state.d
    sigma = jet.state.sigma
    n = d.size
    out = []
    for j in range(central_cols.shape[1]):
        col = central_cols[:, j]
        c1c = col[:n]
        c2 = unvec(col[n:], n, n)
        c1 = c1c - 2.0 * c2 @ d
        c0 = -0.5 * np.trace(c2 @ sigma) - c1c @ d + d @ c2 @ d
        out.append(QuadraticObservable(jet.modes, c0, c1, c2, Basis.STANDARD))
    return tuple(out)


def sld_observables(jet: ModelJet, kernel: InnerProductKernel | None = None) -> LogDerivatives:
    """Symmetric logarithmic derivatives, solving Re(gram) L = D column-wise."""
    kernel = kernel or jet.kernel()
    central = solve_re(kernel, jet.dmat)
    return LogDerivatives(central=central, standard=_standardize(jet, central))


def rld_observables(jet: ModelJet, kernel: InnerProductKernel | None = None) -> LogDerivatives:
    """Right logarithmic derivatives, solving gram L = D column-wise."""
    kernel = kernel or jet.kernel()
    central = solve_full(kernel, jet.dmat.astype(complex))
    return LogDerivatives(central=central, standard=_standardize(jet, central))


def sld_qfim(jet: ModelJet, kernel: InnerProductKernel | None = None) -> np.ndarray:
    """Symmetric-logarithmic-derivative Fisher matrix D^T Re(gram)^-1 D."""
    kernel = kernel or jet.kernel()
    dmat = jet.dmat
    js = dmat.T @ solve_re(kernel, dmat)
    return 0.5 * (js + js.T)


def rld_qfim(jet: ModelJet, kernel: InnerProductKernel | None = None) -> np.ndarray:
    """Right-logarithmic-derivative Fisher matrix D^T gram^-1 D (Hermitian)."""
    kernel = kernel or jet.kernel()
    dmat = jet.dmat.astype(complex)
    jr = dmat.T @ solve_full(kernel, dmat)
    return 0.5 * (jr + jr.conj().T)


def uhlmann_matrix(jet: ModelJet, kernel: InnerProductKernel | None = None) -> np.ndarray:
    """Mean Uhlmann curvature -L^T Im(gram) L with L = Re(gram)^-1 D.

    Antisymmetric; a nonzero entry signals asymptotic incompatibility of the
    corresponding parameter pair.
    """
    kernel = kernel or jet.kernel()
    ell = solve_re(kernel, jet.dmat)
    curv = -ell.T @ kernel.gram.imag @ ell
    return 0.5 * (curv - curv.T)


@dataclass(frozen=True)
class InformationBundle:
    """Fisher matrices, Uhlmann curvature and conditioning diagnostics."""

    js: np.ndarray
    jr: np.ndarray
    uhlmann: np.ndarray
    kernel_condition: float
    kernel_condition_re: float


def information_bundle(jet: ModelJet, kernel: InnerProductKernel | None = None) -> InformationBundle:
    kernel = kernel or jet.kernel()
    return InformationBundle(
        js=sld_qfim(jet, kernel),
        jr=rld_qfim(jet, kernel),
        uhlmann=uhlmann_matrix(jet, kernel),
        kernel_condition=kernel.condition(),
        kernel_condition_re=kernel.condition_re(),
    )


def sld_commutator(
    jet: ModelJet, j: int, k: int, kernel: InnerProductKernel | None = None
) -> QuadraticObservable:
    """Commutator of two SLD operators as a standard-basis quadratic observable.

    Built from the closed form: an identity part 4i dd_j^T s^-1 Omega s^-1 dd_k,
    a part linear in (r - d) and a quadratic part antisymmetrized over the
    SLD quadratic coefficients; all coefficients are purely imaginary
    (i times a Hermitian observable).
    """
    if j == k:
        return QuadraticObservable(jet.modes, 0.0, None, None)
    kernel = kernel or jet.kernel()
    d = jet.state.d
    sigma = jet.state.sigma
    n = d.size
    omega = jet.state.omega
    sld = sld_observables(jet, kernel)
    lj = unvec(sld.central[n:, j], n, n)
    lk = unvec(sld.central[n:, k], n, n)
    sig_inv_dj = np.linalg.solve(sigma, jet.dd[j])
    sig_inv_dk = np.linalg.solve(sigma, jet.dd[k])
    const = 4j * (sig_inv_dj @ omega @ sig_inv_dk)
    lin_row = 4j * (sig_inv_dj @ omega @ lk - sig_inv_dk @ omega @ lj)
    quad = 2j * (lj @ omega @ lk - lk @ omega @ lj)
    # expand the central form around d back to raw operator coefficients
    c2 = quad
    c1 = lin_row - 2.0 * c2 @ d
    c0 = const - lin_row @ d + d @ c2 @ d
    return QuadraticObservable(jet.modes, c0, c1, c2, Basis.STANDARD)


def finite_difference_jet_from_maps(d_of, sigma_of, theta, h=None, names=()) -> ModelJet:
    """Central-difference jet of user-supplied maps theta -> d, theta -> sigma."""
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    steps = np.array(
        [1e-6 * max(1.0, abs(t)) for t in theta] if h is None else [h] * p, dtype=float
    )
    d0 = np.asarray(d_of(theta), dtype=float)
    sig0 = np.asarray(sigma_of(theta), dtype=float)
    dd, dsig = [], []
    for jdx in range(p):
        tp, tm = theta.copy(), theta.copy()
        tp[jdx] += steps[jdx]
        tm[jdx] -= steps[jdx]
        dd.append((np.asarray(d_of(tp), dtype=float) - np.asarray(d_of(tm), dtype=float)) / (2 * steps[jdx]))
        ds = (np.asarray(sigma_of(tp), dtype=float) - np.asarray(sigma_of(tm), dtype=float)) / (2 * steps[jdx])
        dsig.append(0.5 * (ds + ds.T))
    return ModelJet(GaussianState(d0, sig0), tuple(dd), tuple(dsig), tuple(names))
