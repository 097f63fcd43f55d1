"""Scalar precision bounds from information matrices.

All bounds are weighted traces of (functions of) the inverse Fisher matrices;
the weight matrix must be real, symmetric and positive definite.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh, solve, svdvals


class SingularModelError(ArithmeticError):
    """Fisher matrix is singular: some parameter direction carries no information."""


def validate_weight(w: np.ndarray, p: int | None = None) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"weight matrix must be square, got {w.shape}")
    if p is not None and w.shape[0] != p:
        raise ValueError(f"weight matrix size {w.shape[0]} does not match parameter count {p}")
    if np.max(np.abs(w - w.T)) > 1e-10 * max(1.0, np.max(np.abs(w))):
        raise ValueError("weight matrix must be symmetric")
    wmin = eigh(w, eigvals_only=True)[0]
    if wmin <= 0:
        raise ValueError(f"weight matrix must be positive definite (min eigenvalue {wmin:.3e})")
    return 0.5 * (w + w.T)


def weight_sqrt(w: np.ndarray) -> np.ndarray:
    vals, vecs = eigh(w)
    return vecs @ (np.sqrt(vals)[:, None] * vecs.T)


def _inverse_of(mat: np.ndarray, label: str) -> np.ndarray:
    herm = 0.5 * (mat + np.conj(mat).T)
    vals = eigh(herm, eigvals_only=True)
    if vals[0] <= 0 or vals[-1] / vals[0] > 1e14:
        _, vecs = eigh(herm)
        null = np.array2string(vecs[:, 0].real, precision=4)
        raise SingularModelError(
            f"{label} is numerically singular (min eigenvalue {vals[0]:.3e}); "
            f"uninformative direction ~ {null}"
        )
    return solve(herm, np.eye(herm.shape[0], dtype=herm.dtype), assume_a="pos")


def trace_norm(mat: np.ndarray) -> float:
    """Sum of singular values."""
    if mat.size == 0:
        return 0.0
    return float(np.sum(svdvals(mat)))


def sld_crb(js: np.ndarray, w: np.ndarray) -> float:
    """tr[W (J^S)^-1]."""
    js = np.asarray(js, dtype=float)
    w = validate_weight(w, js.shape[0])
    return float(np.trace(w @ _inverse_of(js, "SLD Fisher matrix")))


def rld_crb(jr: np.ndarray, w: np.ndarray) -> float:
    """tr[W Re (J^R)^-1] + || sqrt(W) Im (J^R)^-1 sqrt(W) ||_1."""
    jr = np.asarray(jr, dtype=complex)
    w = validate_weight(w, jr.shape[0])
    inv = _inverse_of(jr, "RLD Fisher matrix")
    sw = weight_sqrt(w)
    return float(np.trace(w @ inv.real) + trace_norm(sw @ inv.imag @ sw))


def hcrb_upper(js: np.ndarray, uhlmann: np.ndarray, w: np.ndarray) -> float:
    """Closed-form upper bound C^S + || sqrt(W) J^-1 U J^-1 sqrt(W) ||_1."""
    js = np.asarray(js, dtype=float)
    w = validate_weight(w, js.shape[0])
    inv = _inverse_of(js, "SLD Fisher matrix")
    sw = weight_sqrt(w)
    return float(np.trace(w @ inv) + trace_norm(sw @ inv @ uhlmann @ inv @ sw))


def incompatibility_r(js: np.ndarray, uhlmann: np.ndarray) -> float:
    """Spectral radius of i (J^S)^-1 U, clipped to [0, 1].

    Computed as the largest singular value of the whitened curvature
    J^-1/2 U J^-1/2, which equals the largest eigenvalue modulus of
    i J^-1 U and is bounded by one analytically; numerical excursions
    beyond 1 + 1e-8 indicate a broken input and are rejected.
    """
    js = np.asarray(js, dtype=float)
    if uhlmann.size == 0:
        return 0.0
    vals = eigh(0.5 * (js + js.T), eigvals_only=True)
    if vals[0] <= 0 or vals[-1] / vals[0] > 1e14:
        _inverse_of(js, "SLD Fisher matrix")  # raises with the null direction
    vals, vecs = eigh(0.5 * (js + js.T))
    inv_sqrt = vecs @ ((1.0 / np.sqrt(vals))[:, None] * vecs.T)
    r = float(np.max(svdvals(inv_sqrt @ uhlmann @ inv_sqrt)))
    if r > 1.0 + 1e-8:
        raise ValueError(f"incompatibility parameter {r:.12g} exceeds its analytic bound of 1")
    return min(r, 1.0)


def chain_violations(cs, cr, ch, ch_upper, r, tol_scale: float = 1e-6) -> tuple:
    """Check the bound ordering; returns a tuple of violation messages.

    Expected chain: max(C^S, C^R) <= C^H <= Cbar^H <= (1+R) C^S <= 2 C^S,
    slack tol_scale * C^S on each comparison.
    """
    tol = tol_scale * cs
    out = []
    if ch is not None:
        if max(cs, cr) > ch + tol:
            out.append(f"max(CS, CR) = {max(cs, cr):.12g} exceeds CH = {ch:.12g}")
        if ch > ch_upper + tol:
            out.append(f"CH = {ch:.12g} exceeds CHbar = {ch_upper:.12g}")
    if ch_upper > (1.0 + r) * cs + tol:
        out.append(f"CHbar = {ch_upper:.12g} exceeds (1+R) CS = {(1.0 + r) * cs:.12g}")
    if (1.0 + r) * cs > 2.0 * cs + tol:
        out.append(f"R = {r:.12g} exceeds 1")
    return tuple(out)
