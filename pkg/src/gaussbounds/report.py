"""One-call evaluation of every bound for a model jet, with consistency checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import chain_violations, hcrb_upper, incompatibility_r, rld_crb, sld_crb
from .derivatives import (
    ModelJet,
    ensure_invertible_jet,
    information_bundle,
)
from .sdp import HcrbSolution, SolveOptions, SolveStatus, solve_hcrb

CHAIN_TOL_SCALE = 1e-6


@dataclass(frozen=True)
class BoundsReport:
    """Information matrices and every scalar bound at one parameter point."""

    js: np.ndarray
    jr: np.ndarray
    uhlmann: np.ndarray
    incompatibility: float
    cs: float
    cr: float
    ch_upper: float
    ch: float | None
    solver_status: SolveStatus | None
    epsilon: float
    solution: HcrbSolution | None
    chain_violations: tuple
    optimal_observables: tuple = ()  # standard-basis quadratics attaining C^H

    @property
    def chain_ok(self) -> bool:
        return not self.chain_violations

    def as_dict(self) -> dict:
        return {
            "JS": self.js.tolist(),
            "JR_re": self.jr.real.tolist(),
            "JR_im": self.jr.imag.tolist(),
            "uhlmann": self.uhlmann.tolist(),
            "R": self.incompatibility,
            "CS": self.cs,
            "CR": self.cr,
            "CHbar": self.ch_upper,
            "CH": self.ch,
            "status": self.solver_status.value if self.solver_status else None,
            "epsilon": self.epsilon,
            "chain_ok": self.chain_ok,
            "chain_violations": list(self.chain_violations),
        }


def evaluate_bounds(
    jet: ModelJet,
    w: np.ndarray | None = None,
    options: SolveOptions | None = None,
    with_hcrb: bool = True,
) -> BoundsReport:
    """Compute J^S, J^R, the Uhlmann matrix and all four scalar bounds.

    Closed-form quantities are evaluated on the (regularized, if necessary)
    jet; the Holevo bound is solved as an SDP unless `with_hcrb` is False.
    """
    options = options or SolveOptions()
    w = np.eye(jet.p) if w is None else np.asarray(w, dtype=float)
    base, eps_used = ensure_invertible_jet(jet, options.epsilon)
    kernel = base.kernel(options.kernel_tol)
    info = information_bundle(base, kernel)
    cs = sld_crb(info.js, w)
    cr = rld_crb(info.jr, w)
    upper = hcrb_upper(info.js, info.uhlmann, w)
    rpar = incompatibility_r(info.js, info.uhlmann)
    if eps_used and options.extrapolate:
        # keep the scalar bounds on the same eps -> 0 footing as the SDP value
        half = information_bundle(jet.regularized(eps_used / 2.0))
        cs = 2.0 * sld_crb(half.js, w) - cs
        cr = 2.0 * rld_crb(half.jr, w) - cr
        upper = 2.0 * hcrb_upper(half.js, half.uhlmann, w) - upper
        rpar = min(max(2.0 * incompatibility_r(half.js, half.uhlmann) - rpar, 0.0), 1.0)
    ch = None
    status = None
    solution = None
    observables = ()
    if with_hcrb:
        solution = solve_hcrb(jet, w, options)
        status = solution.status
        if status in (SolveStatus.OPTIMAL, SolveStatus.INACCURATE):
            ch = solution.value
            observables = solution.observables(base)
    violations = chain_violations(cs, cr, ch, upper, rpar, CHAIN_TOL_SCALE)
    return BoundsReport(
        js=info.js,
        jr=info.jr,
        uhlmann=info.uhlmann,
        incompatibility=rpar,
        cs=cs,
        cr=cr,
        ch_upper=upper,
        ch=ch,
        solver_status=status,
        epsilon=eps_used,
        solution=solution,
        chain_violations=violations,
        optimal_observables=observables,
    )
