"""Truncated Fock-space oracle for cross-checking the phase-space pipeline.

Everything here works directly with finite density matrices: states are
synthesized by applying truncated displacement/squeezing/rotation unitaries
and loss Kraus maps to thermal diagonals, logarithmic derivatives come from
eigendecompositions, and the Holevo bound is solved as the finite-dimensional
SDP over an explicit operator basis.  Slow but independent; test support
only, not part of the computational hot path.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import cvxpy as cp
import numpy as np
from scipy.linalg import expm

from .bounds import validate_weight

TRACE_DEFICIT_TOL = 1e-8
STATE_PAD = 16
OPERATOR_PAD = 2


class CutoffError(ArithmeticError):
    """Truncation artifacts exceed tolerance; increase the cutoff."""


def ladder(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def quadrature_ops(cutoff: int, modes: int = 1) -> list:
    """Truncated matrices of (x1, p1, ..., xm, pm), built with padding.

    Products of two quadratures from this list are accurate on the retained
    space because each operator is generated at cutoff + pad and cropped.
    """
    dim = cutoff + OPERATOR_PAD
    a = ladder(dim)
    x = (a + a.conj().T) / np.sqrt(2.0)
    p = (a - a.conj().T) / (1j * np.sqrt(2.0))
    if modes == 1:
        return [x[:cutoff, :cutoff], p[:cutoff, :cutoff]]
    if modes == 2:
        eye = np.eye(dim)
        ops = [np.kron(x, eye), np.kron(p, eye), np.kron(eye, x), np.kron(eye, p)]
        # crop each mode to `cutoff` levels
        idx = np.array([i * dim + j for i in range(cutoff) for j in range(cutoff)])
        return [op[np.ix_(idx, idx)] for op in ops]
    raise ValueError("oracle supports one or two modes")


def thermal_diagonal(n: float, dim: int) -> np.ndarray:
    if n <= 0:
        probs = np.zeros(dim)
        probs[0] = 1.0
    else:
        k = np.arange(dim)
        probs = (n / (n + 1.0)) ** k / (n + 1.0)
    return np.diag(probs)


def displacement_unitary(alpha: complex, dim: int) -> np.ndarray:
    a = ladder(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze_unitary(r: float, dim: int) -> np.ndarray:
    a = ladder(dim)
    return expm(0.5 * r * (a.conj().T @ a.conj().T - a @ a))


def rotation_unitary(phi: float, dim: int) -> np.ndarray:
    return np.diag(np.exp(-1j * phi * np.arange(dim)))


def loss_map(rho: np.ndarray, eta: float) -> np.ndarray:
    """Pure-loss channel via its Kraus decomposition on the truncated space.

    Kraus operators K_k = sqrt((1-eta)^k / k!) eta^(n/2) a^k; the sum over k
    stops once a term's trace contribution is negligible.
    """
    dim = rho.shape[0]
    if eta >= 1.0:
        return rho.copy()
    a = ladder(dim)
    eta_half_n = np.diag(np.sqrt(eta) ** np.arange(dim))
    out = np.zeros_like(rho, dtype=complex)
    ak = np.eye(dim)
    log_fact = 0.0
    for k in range(dim):
        if k > 0:
            ak = a @ ak
            log_fact += np.log(k)
        coeff = np.exp(0.5 * (k * np.log(1.0 - eta) - log_fact))
        kraus = coeff * (eta_half_n @ ak)
        term = kraus @ rho @ kraus.conj().T
        out += term
        if k > 2 and abs(np.trace(term)) < 1e-18:
            break
    return out


@dataclass(frozen=True)
class FockState:
    """Truncated density matrix with its construction recipe and diagnostics."""

    cutoff: int
    rho: np.ndarray
    recipe: tuple
    trace_deficit: float


def _apply_ops(rho: np.ndarray, ops) -> np.ndarray:
    dim = rho.shape[0]
    for name, value in ops:
        if name == "thermal":
            rho = thermal_diagonal(float(value), dim)
        elif name == "squeeze":
            u = squeeze_unitary(float(value), dim)
            rho = u @ rho @ u.conj().T
        elif name == "rotate":
            u = rotation_unitary(float(value), dim)
            rho = u @ rho @ u.conj().T
        elif name == "displace":
            u = displacement_unitary(complex(value), dim)
            rho = u @ rho @ u.conj().T
        elif name == "loss":
            rho = loss_map(rho, float(value))
        else:
            raise KeyError(f"unknown recipe step '{name}'")
    return rho


def synthesize_fock(recipe, cutoff: int, deficit_tol: float = TRACE_DEFICIT_TOL) -> FockState:
    """Build a truncated state from an ordered recipe of elementary steps.

    Single mode: a sequence of ("thermal", n), ("squeeze", r), ("rotate", phi),
    ("displace", alpha), ("loss", eta) steps applied in order.  Two modes: a
    pair of such sequences (product state).  States are synthesized with extra
    headroom and cropped; the cropped-out population is the trace deficit.
    """
    recipe = tuple(tuple(step) for step in recipe)
    two_mode = bool(recipe) and not isinstance(recipe[0][0], str)
    dim = cutoff + STATE_PAD
    if two_mode:
        parts = []
        for sub in recipe:
            rho = _apply_ops(thermal_diagonal(0.0, dim), tuple(tuple(s) for s in sub))
            parts.append(rho[:cutoff, :cutoff])
        rho = np.kron(parts[0], parts[1])
    else:
        rho = _apply_ops(thermal_diagonal(0.0, dim), recipe)
        rho = rho[:cutoff, :cutoff]
    rho = 0.5 * (rho + rho.conj().T)
    deficit = abs(1.0 - float(np.trace(rho).real))
    if deficit > deficit_tol:
        raise CutoffError(
            f"trace deficit {deficit:.3e} exceeds {deficit_tol:.0e}: increase cutoff"
        )
    return FockState(cutoff=cutoff, rho=rho, recipe=recipe, trace_deficit=deficit)


def fock_sld(rho: np.ndarray, drho: np.ndarray, tol: float = 1e-12):
    """SLD from the spectral formula L_jk = 2 (drho)_jk / (lam_j + lam_k).

    Returns (L, residual) with residual = ||rho L + L rho - 2 drho||_F.
    """
    vals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    dr = vecs.conj().T @ drho @ vecs
    denom = vals[:, None] + vals[None, :]
    keep = denom > tol * max(vals.max(), 1e-300)
    if not keep.any():
        raise ArithmeticError("all eigenvalue pairs below tolerance; state is numerically zero")
    coeff = np.zeros_like(dr)
    coeff[keep] = 2.0 * dr[keep] / denom[keep]
    sld = vecs @ coeff @ vecs.conj().T
    sld = 0.5 * (sld + sld.conj().T)
    resid = float(np.linalg.norm(rho @ sld + sld @ rho - 2.0 * drho))
    return sld, resid


def fock_rld(rho: np.ndarray, drho: np.ndarray, support_tol: float = 1e-12):
    """RLD as rho^+ drho on the retained support of rho.

    Returns (L, residual) with residual = ||rho L - drho||_F restricted to the
    support; requires thermal occupation (regularized states).
    """
    vals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = vals > support_tol * max(vals.max(), 1e-300)
    if not keep.any():
        raise ArithmeticError("state has no numerical support")
    proj = vecs[:, keep]
    inv_on_support = proj @ np.diag(1.0 / vals[keep]) @ proj.conj().T
    rld = inv_on_support @ drho
    resid = float(np.linalg.norm(proj.conj().T @ (rho @ rld - drho) @ proj))
    return rld, resid


def fock_qfims(rho: np.ndarray, drhos) -> tuple:
    """(J^S, J^R) from the finite-dimensional logarithmic derivatives."""
    p = len(drhos)
    slds = [fock_sld(rho, dr)[0] for dr in drhos]
    rlds = [fock_rld(rho, dr)[0] for dr in drhos]
    js = np.zeros((p, p))
    jr = np.zeros((p, p), dtype=complex)
    for j in range(p):
        for k in range(p):
            js[j, k] = float(np.trace(rho @ (slds[j] @ slds[k] + slds[k] @ slds[j])).real) / 2.0
            jr[j, k] = np.trace(rlds[j].conj().T @ rho @ rlds[k])
    return 0.5 * (js + js.T), 0.5 * (jr + jr.conj().T)


def fock_uhlmann(rho: np.ndarray, drhos) -> np.ndarray:
    """Mean Uhlmann curvature -i/2 Tr[rho [L_j, L_k]] from finite SLDs."""
    p = len(drhos)
    slds = [fock_sld(rho, dr)[0] for dr in drhos]
    out = np.zeros((p, p))
    for j in range(p):
        for k in range(j + 1, p):
            val = -0.5j * np.trace(rho @ (slds[j] @ slds[k] - slds[k] @ slds[j]))
            out[j, k] = float(val.real)
            out[k, j] = -out[j, k]
    return out


def _quadratic_basis(rho: np.ndarray, modes: int, cutoff: int) -> list:
    """Zero-mean operators spanning the (at most) quadratic observables."""
    quads = quadrature_ops(cutoff, modes)
    dim = rho.shape[0]
    basis = []
    for op in quads:
        basis.append(op - np.trace(rho @ op).real * np.eye(dim))
    n = len(quads)
    for a in range(n):
        for b in range(a, n):
            sym = 0.5 * (quads[a] @ quads[b] + quads[b] @ quads[a])
            basis.append(sym - np.trace(rho @ sym).real * np.eye(dim))
    return basis


def _full_hermitian_basis(rho: np.ndarray) -> list:
    """Centered Hermitian matrix basis (for validating the quadratic restriction)."""
    dim = rho.shape[0]
    basis = []
    for i in range(dim):
        mat = np.zeros((dim, dim), dtype=complex)
        mat[i, i] = 1.0
        basis.append(mat)
    for i in range(dim):
        for j in range(i + 1, dim):
            mat = np.zeros((dim, dim), dtype=complex)
            mat[i, j] = mat[j, i] = 1.0 / np.sqrt(2.0)
            basis.append(mat)
            mat = np.zeros((dim, dim), dtype=complex)
            mat[i, j] = -1j / np.sqrt(2.0)
            mat[j, i] = 1j / np.sqrt(2.0)
            basis.append(mat)
    return [b - np.trace(rho @ b).real * np.eye(dim) for b in basis]


def fock_hcrb(
    rho: np.ndarray,
    drhos,
    w,
    modes: int = 1,
    basis: str = "quadratic",
    solver: str = "CLARABEL",
    rank_tol: float = 1e-11,
) -> float:
    """Holevo bound from the finite-dimensional SDP over an operator basis.

    With basis="quadratic" the optimization runs over the span of centered
    linear and symmetrized quadratic combinations of the quadratures (which is
    optimal for Gaussian states); basis="full" uses every Hermitian matrix and
    is only tractable at small cutoffs.  Convergence in the cutoff is the
    caller's responsibility; see `fock_hcrb_converged`.
    """
    w = validate_weight(w, len(drhos))
    cutoff = round(rho.shape[0] ** (1.0 / modes))
    ops = (
        _quadratic_basis(rho, modes, cutoff)
        if basis == "quadratic"
        else _full_hermitian_basis(rho)
    )
    nb = len(ops)
    p = len(drhos)
    op_rho = [op @ rho for op in ops]
    gram = np.zeros((nb, nb), dtype=complex)
    for i in range(nb):
        for l in range(nb):
            gram[i, l] = np.sum(op_rho[i].T * ops[l])
    gram = 0.5 * (gram + gram.conj().T)
    tmat = np.array([[np.trace(op @ dr).real for dr in drhos] for op in ops])
    vals, vecs = np.linalg.eigh(gram)
    keep = vals > rank_tol * max(vals.max(), 1e-300)
    factor = np.sqrt(vals[keep])[:, None] * vecs[:, keep].conj().T
    rank = factor.shape[0]

    v_var = cp.Variable((p, p), symmetric=True)
    c_var = cp.Variable((nb, p))
    b_re = np.real(factor) @ c_var
    b_im = np.imag(factor) @ c_var
    re_h = cp.bmat([[v_var, b_re.T], [b_re, np.eye(rank)]])
    im_h = cp.bmat([[np.zeros((p, p)), -b_im.T], [b_im, np.zeros((rank, rank))]])
    embed = cp.bmat([[re_h, -im_h], [im_h, re_h]])
    constraints = [embed >> 0, c_var.T @ tmat == np.eye(p)]
    problem = cp.Problem(cp.Minimize(cp.trace(w @ v_var)), constraints)
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="Solution may be inaccurate")
        problem.solve(solver=solver)
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise ArithmeticError(f"finite-dimensional SDP failed with status {problem.status}")
    return float(problem.value)


def fock_hcrb_converged(
    rho_of,
    drhos_of,
    w,
    cutoff: int,
    modes: int = 1,
    rel_tol: float = 1e-3,
    **kwargs,
) -> float:
    """Holevo bound with a cutoff-convergence gate.

    Evaluates the finite SDP at `cutoff` and `cutoff - 10` from user-supplied
    builders; raises CutoffError (reporting both values) when they disagree
    beyond rel_tol.
    """
    values = {}
    for n_cut in (cutoff, cutoff - 10):
        values[n_cut] = fock_hcrb(rho_of(n_cut), drhos_of(n_cut), w, modes=modes, **kwargs)
    drift = abs(values[cutoff] - values[cutoff - 10]) / max(abs(values[cutoff]), 1e-300)
    if drift > rel_tol:
        raise CutoffError(
            f"value not converged in the cutoff: {values[cutoff]:.10g} at {cutoff} vs "
            f"{values[cutoff - 10]:.10g} at {cutoff - 10} (rel drift {drift:.2e})"
        )
    return values[cutoff]


def fock_moment(rho: np.ndarray, quads, indices) -> complex:
    """Tr[rho r_{j1} ... r_{jn}] from truncated quadrature matrices."""
    acc = np.eye(rho.shape[0])
    for idx in indices:
        acc = acc @ quads[idx]
    return complex(np.trace(rho @ acc))
