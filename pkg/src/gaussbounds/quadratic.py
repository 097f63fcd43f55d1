"""Algebra of observables at most quadratic in the canonical operators.

Provides Gaussian expectation values of up to fourth-order operator products,
the expectation of a general product Tr[B^dag rho A] of two quadratic
observables, the finite inner-product kernel on the zero-mean quadratic span,
and the commutation-superoperator solve on that span.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .symplectic import DimensionError, GaussianState, symplectic_form, unvec, vec

KERNEL_RANK_TOL = 1e-12


class Basis(Enum):
    STANDARD = "standard"
    CENTRAL = "central"


class SingularKernelError(ArithmeticError):
    """Inner-product kernel is singular (pure normal modes present).

    The quadratic-block Gram matrix loses rank when any symplectic eigenvalue
    equals one; regularize the state before requesting inverse applications.
    """


@dataclass(frozen=True)
class QuadraticObservable:
    """Operator c0*I + c1^T r + r^T c2 r with complex coefficients.

    `c2` is symmetrized at construction; the antisymmetric remainder is a
    multiple of the identity by the CCR and is folded into `c0`.  In the
    central basis the operator reads c0*I + c1^T (r-d) + (r-d)^T c2 (r-d)
    with c0 pinned to -tr[c2 sigma]/2 by the zero-mean condition.
    """

    modes: int
    c0: complex
    c1: np.ndarray
    c2: np.ndarray
    basis: Basis = Basis.STANDARD

    def __post_init__(self):
        n = 2 * self.modes
        c1 = np.zeros(n, dtype=complex) if self.c1 is None else np.asarray(self.c1, dtype=complex)
        c2 = np.zeros((n, n), dtype=complex) if self.c2 is None else np.asarray(self.c2, dtype=complex)
        if c1.shape != (n,):
            raise DimensionError(f"linear coefficient must have length {n}, got {c1.shape}")
        if c2.shape != (n, n):
            raise DimensionError(f"quadratic coefficient must be {n}x{n}, got {c2.shape}")
        anti = 0.5 * (c2 - c2.T)
        omega = symplectic_form(self.modes)
        # r^T A r = (i/2) tr[A Omega^T] I for antisymmetric A, by the CCR
        c0 = complex(self.c0) + 0.5j * np.trace(anti @ omega.T)
        c2 = 0.5 * (c2 + c2.T)
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)
        c1.setflags(write=False)
        c2.setflags(write=False)

    @staticmethod
    def identity(modes: int) -> "QuadraticObservable":
        return QuadraticObservable(modes, 1.0, None, None)

    @staticmethod
    def quadrature(modes: int, index: int) -> "QuadraticObservable":
        c1 = np.zeros(2 * modes, dtype=complex)
        c1[index] = 1.0
        return QuadraticObservable(modes, 0.0, c1, None)

    def stacked(self) -> np.ndarray:
        """Length z = 2m + 4m^2 coefficient stack (c1; vec[c2])."""
        return np.concatenate([self.c1, vec(self.c2)])

    def dagger(self) -> "QuadraticObservable":
        return QuadraticObservable(
            self.modes, np.conj(self.c0), np.conj(self.c1), np.conj(self.c2), self.basis
        )

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return (
            abs(self.c0.imag) <= tol
            and np.max(np.abs(self.c1.imag)) <= tol
            and np.max(np.abs(self.c2.imag)) <= tol
        )


def _moment_tensors(state: GaussianState, order: int):
    """Expectation tensors M[j1..jn] = Tr[rho r_j1 ... r_jn] up to `order`."""
    d = state.d
    g = 0.5 * (state.sigma + 1j * state.omega)  # Tr[rho (r-d)_j (r-d)_k]
    tensors = [None, d.astype(complex)]
    if order >= 2:
        tensors.append(np.einsum("j,k->jk", d, d) + g)
    if order >= 3:
        m3 = np.einsum("j,k,m->jkm", d, d, d).astype(complex)
        m3 += np.einsum("jk,m->jkm", g, d)
        m3 += np.einsum("km,j->jkm", g, d)
        m3 += np.einsum("jm,k->jkm", g, d)
        tensors.append(m3)
    if order >= 4:
        sig = state.sigma
        om = state.omega
        dd = np.einsum("j,k->jk", d, d)
        m4 = np.einsum("j,k,p,q->jkpq", d, d, d, d).astype(complex)
        for (a, b), (c, e) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((1, 2), (0, 3)),
                               ((0, 3), (1, 2)), ((1, 3), (0, 2)), ((2, 3), (0, 1))):
            # pair (a,b) carries sigma/Omega, the complementary pair carries d d
            perm = np.argsort((a, b, c, e))
            term = 0.5 * np.einsum("ab,ce->abce", sig, dd)
            term = term + 0.5j * np.einsum("ab,ce->abce", om, dd + 0.5 * sig)
            m4 += term.transpose(perm)
        m4 += 0.25 * (
            np.einsum("jq,kp->jkpq", sig, sig)
            + np.einsum("jp,kq->jkpq", sig, sig)
            + np.einsum("jk,pq->jkpq", sig, sig)
        )
        m4 -= 0.25 * (
            np.einsum("jq,kp->jkpq", om, om)
            + np.einsum("jp,kq->jkpq", om, om)
            + np.einsum("jk,pq->jkpq", om, om)
        )
        tensors.append(m4)
    return tensors


def gaussian_moment(state: GaussianState, indices) -> complex:
    """Tr[rho r_{j1} ... r_{jn}] for 1 <= n <= 4, zero-based indices."""
    indices = tuple(int(i) for i in indices)
    if not 1 <= len(indices) <= 4:
        raise ValueError(f"only products of 1..4 canonical operators supported, got {len(indices)}")
    n = state.d.size
    if any(not 0 <= i < n for i in indices):
        raise IndexError(f"operator index out of range [0, {n}) in {indices}")
    tensor = _moment_tensors(state, len(indices))[len(indices)]
    return complex(tensor[indices])


def rld_pairing_general(
    b: QuadraticObservable, a: QuadraticObservable, state: GaussianState
) -> complex:
    """Expectation Tr[B^dag rho A] = Tr[rho A B^dag] for standard-basis observables.

    Valid for arbitrary first moments; reduces term by term to the Gaussian
    moment formulas (the B coefficients act from the left of rho, so their
    operator indices sit last inside the cyclic trace).
    """
    if a.basis is not Basis.STANDARD or b.basis is not Basis.STANDARD:
        raise ValueError("pairing of raw operator products requires standard-basis observables")
    if a.modes != b.modes or a.modes != state.modes:
        raise DimensionError("mode counts of observables and state must agree")
    m1, m2, m3, m4 = _moment_tensors(state, 4)[1:]
    b0c, b1c, b2c = np.conj(b.c0), np.conj(b.c1), np.conj(b.c2)
    out = b0c * a.c0
    out += b0c * np.einsum("l,l->", a.c1, m1)
    out += b0c * np.einsum("jk,jk->", a.c2, m2)
    out += a.c0 * np.einsum("m,m->", b1c, m1)
    out += np.einsum("m,l,lm->", b1c, a.c1, m2)
    out += np.einsum("m,jk,jkm->", b1c, a.c2, m3)
    out += a.c0 * np.einsum("pq,pq->", b2c, m2)
    out += np.einsum("pq,l,lpq->", b2c, a.c1, m3)
    out += np.einsum("pq,jk,jkpq->", b2c, a.c2, m4)
    return complex(out)


def expectation(obs: QuadraticObservable, state: GaussianState) -> complex:
    """Tr[rho A]."""
    if obs.basis is Basis.CENTRAL:
        return complex(obs.c0 + 0.5 * np.trace(obs.c2 @ state.sigma))
    return rld_pairing_general(QuadraticObservable.identity(obs.modes), obs, state)


def to_central_basis(obs: QuadraticObservable, state: GaussianState):
    """Rewrite a standard-basis observable around the state's first moments.

    Returns (central_observable, mean): the central part is the zero-mean
    projection; `mean` is Tr[rho A] so that A = central + mean * I.
    """
    if obs.basis is not Basis.STANDARD:
        raise ValueError("input already in central basis")
    d = state.d
    c2 = obs.c2
    c1 = obs.c1 + 2.0 * c2 @ d
    c0 = -0.5 * np.trace(c2 @ state.sigma)
    mean = obs.c0 + obs.c1 @ d + d @ c2 @ d + 0.5 * np.trace(c2 @ state.sigma)
    central = QuadraticObservable(obs.modes, c0, c1, c2, Basis.CENTRAL)
    return central, complex(mean)


def to_standard_basis(obs: QuadraticObservable, state: GaussianState) -> QuadraticObservable:
    """Expand a central-basis observable back to raw operator coefficients."""
    if obs.basis is not Basis.CENTRAL:
        raise ValueError("input is not in central basis")
    d = state.d
    c2 = obs.c2
    c1 = obs.c1 - 2.0 * c2 @ d
    c0 = obs.c0 - obs.c1 @ d + d @ c2 @ d
    return QuadraticObservable(obs.modes, c0, c1, c2, Basis.STANDARD)


def central_from_stack(modes: int, stacked: np.ndarray, sigma: np.ndarray) -> QuadraticObservable:
    """Central-basis observable from a length-z stack (c1; vec[c2])."""
    n = 2 * modes
    c1 = stacked[:n]
    c2 = unvec(stacked[n:], n, n)
    c0 = -0.5 * np.trace(c2 @ sigma)
    return QuadraticObservable(modes, c0, c1, c2, Basis.CENTRAL)


def _symmetric_expander(modes: int) -> np.ndarray:
    """z x (2m + m(2m+1)) map from symmetric-subspace coordinates to full stacks.

    The first 2m coordinates are the linear coefficients; the remaining
    m(2m+1) fill both (a,b) and (b,a) entries of the vectorized quadratic.
    """
    n = 2 * modes
    z = n + n * n
    cols = n + n * (n + 1) // 2
    P = np.zeros((z, cols))
    P[:n, :n] = np.eye(n)
    col = n
    for a in range(n):
        for b in range(a, n):
            P[n + a + n * b, col] = 1.0
            if a != b:
                P[n + b + n * a, col] = 1.0
            col += 1
    return P


def _factor_psd(mat: np.ndarray, tol: float):
    """Low-rank factor F (r x n) with F^dag F = mat, via Hermitian eigendecomposition."""
    w, u = np.linalg.eigh(mat)
    scale = max(w[-1], 0.0)
    keep = w > tol * max(scale, 1e-300)
    wk = w[keep]
    uk = u[:, keep]
    return (np.sqrt(wk)[:, None] * uk.conj().T), w, u


@dataclass(frozen=True)
class InnerProductKernel:
    """Finite Gram matrices of the operator inner products on zero-mean quadratics.

    `gram` is the complex Hermitian PSD matrix representing Tr[B^dag rho A] on
    length-z stacks; `gram_re` its element-wise real part (the symmetric inner
    product Re Tr[B rho A]).  `factor` is a rank-r matrix with
    factor^dag factor = gram; `real_factor` the analogue for `gram_re`.
    """

    modes: int
    gram: np.ndarray
    gram_re: np.ndarray
    factor: np.ndarray
    real_factor: np.ndarray
    eigenvalues: np.ndarray
    eigenvalues_re: np.ndarray
    eigenvectors: np.ndarray
    eigenvectors_re: np.ndarray
    rank: int
    rank_re: int
    tol: float

    @property
    def z(self) -> int:
        return self.gram.shape[0]

    @property
    def sym_expander(self) -> np.ndarray:
        return _symmetric_expander(self.modes)

    def condition_re(self) -> float:
        w = self.eigenvalues_re
        return float("inf") if w[0] <= 0 else float(w[-1] / w[0])

    def condition(self) -> float:
        w = self.eigenvalues
        return float("inf") if w[0] <= 0 else float(w[-1] / w[0])


def build_kernel(sigma: np.ndarray, tol: float = KERNEL_RANK_TOL) -> InnerProductKernel:
    """Inner-product kernel of the m-mode Gaussian state with covariance `sigma`.

    Block structure: (sigma - i Omega)/2 on the linear span and its Kronecker
    square on the vectorized quadratic span.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0]
    if sigma.ndim != 2 or sigma.shape != (n, n) or n % 2:
        raise DimensionError(f"covariance matrix must be 2m x 2m, got {sigma.shape}")
    m = n // 2
    omega = symplectic_form(m)
    top = sigma - 1j * omega
    z = n + n * n
    gram = np.zeros((z, z), dtype=complex)
    gram[:n, :n] = 0.5 * top
    gram[n:, n:] = 0.5 * np.kron(top, top)
    gram_re = np.zeros((z, z))
    gram_re[:n, :n] = 0.5 * sigma
    gram_re[n:, n:] = 0.5 * (np.kron(sigma, sigma) - np.kron(omega, omega))
    factor, w, u = _factor_psd(gram, tol)
    real_factor, w_re, u_re = _factor_psd(gram_re, tol)
    return InnerProductKernel(
        modes=m,
        gram=gram,
        gram_re=gram_re,
        factor=factor,
        real_factor=real_factor,
        eigenvalues=w,
        eigenvalues_re=w_re,
        eigenvectors=u,
        eigenvectors_re=u_re,
        rank=factor.shape[0],
        rank_re=real_factor.shape[0],
        tol=tol,
    )


def kernel_for_state(state: GaussianState, tol: float = KERNEL_RANK_TOL) -> InnerProductKernel:
    return build_kernel(state.sigma, tol)


def pairing_zero_mean(
    b_stack: np.ndarray, a_stack: np.ndarray, kernel: InnerProductKernel
) -> complex:
    """Tr[B^dag rho A] for zero-mean quadratics given as central-basis stacks."""
    b_stack = np.asarray(b_stack)
    a_stack = np.asarray(a_stack)
    if b_stack.shape != (kernel.z,) or a_stack.shape != (kernel.z,):
        raise DimensionError(f"stacks must have length z = {kernel.z}")
    return complex(np.conj(b_stack) @ kernel.gram @ a_stack)


CONDITION_LIMIT = 1e15


def _solve_spectral(eigenvalues, eigenvectors, rhs: np.ndarray, label: str):
    """Inverse application through the stored eigendecomposition.

    Spectral division keeps the per-eigendirection error at machine precision
    even when the condition number is large (regularized nearly-pure states
    reach ~1/eps^2 on the quadratic block).
    """
    wmin, wmax = eigenvalues[0], eigenvalues[-1]
    if wmin <= 0 or wmax / wmin > CONDITION_LIMIT:
        raise SingularKernelError(
            f"{label} is numerically singular (min eigenvalue {wmin:.3e}, "
            f"condition {wmax / max(wmin, 1e-300):.2e}); the state has "
            "(near-)pure normal modes -- regularize it first"
        )
    coeff = eigenvectors.conj().T @ rhs
    out = eigenvectors @ (coeff / eigenvalues[:, None] if coeff.ndim == 2 else coeff / eigenvalues)
    if np.isrealobj(rhs) and np.isrealobj(eigenvectors):
        return out.real
    return out


def solve_re(kernel: InnerProductKernel, rhs: np.ndarray) -> np.ndarray:
    """Solve gram_re @ x = rhs (symmetric inner-product inverse application)."""
    return _solve_spectral(kernel.eigenvalues_re, kernel.eigenvectors_re, rhs, "Re kernel")


def solve_full(kernel: InnerProductKernel, rhs: np.ndarray) -> np.ndarray:
    """Solve gram @ x = rhs (full inner-product inverse application)."""
    return _solve_spectral(kernel.eigenvalues, kernel.eigenvectors, rhs, "kernel")


def commutation_superoperator(x_stack: np.ndarray, kernel: InnerProductKernel) -> np.ndarray:
    """Image of a Hermitian zero-mean quadratic under the commutation superoperator.

    Solves Re(gram) z = -Im(gram) x on length-z stacks; the solution is the
    quadratic observable Z with {Z, rho} = i [rho, X] (orientation fixed
    against the Fock oracle; the opposite commutator order flips the sign).
    """
    x_stack = np.asarray(x_stack, dtype=float)
    if x_stack.shape != (kernel.z,):
        raise DimensionError(f"stack must have length z = {kernel.z}")
    rhs = -kernel.gram.imag @ x_stack
    return solve_re(kernel, rhs)
