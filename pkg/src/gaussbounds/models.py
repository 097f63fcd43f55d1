"""Builtin parametric Gaussian models, closed-form reference values, jet files.

Two model families ship with the package: joint phase/loss estimation on a
displaced squeezed input, and joint displacement/squeezing estimation on
single- and two-mode squeezed thermal states.  Each carries analytic jets and
closed-form reference bounds on the parameter ranges where those are known.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .derivatives import ModelJet, finite_difference_jet_from_maps
from .symplectic import GaussianState


class JetFileError(ValueError):
    """Malformed jet file; the message names the offending field."""


@dataclass(frozen=True)
class ParametricModel:
    """Gaussian statistical model: theta -> (d, sigma) with optional analytic jet."""

    name: str
    modes: int
    param_names: tuple
    d_of: callable
    sigma_of: callable
    jet_of: callable | None = None

    @property
    def p(self) -> int:
        return len(self.param_names)

    def state(self, theta) -> GaussianState:
        theta = np.asarray(theta, dtype=float)
        return GaussianState(self.d_of(theta), self.sigma_of(theta))

    def jet(self, theta) -> ModelJet:
        theta = np.asarray(theta, dtype=float)
        if self.jet_of is not None:
            return self.jet_of(theta)
        return self.finite_difference_jet(theta)

    def finite_difference_jet(self, theta, h: float | None = None) -> ModelJet:
        return finite_difference_jet(self, theta, h)


def finite_difference_jet(model: ParametricModel, theta, h: float | None = None) -> ModelJet:
    """Central-difference jet; step defaults to 1e-6 * max(1, |theta_j|) per axis."""
    return finite_difference_jet_from_maps(
        model.d_of, model.sigma_of, theta, h=h, names=model.param_names
    )


def _rotation(phi: float) -> np.ndarray:
    return np.array([[np.cos(phi), np.sin(phi)], [-np.sin(phi), np.cos(phi)]])


def _rotation_derivative(phi: float) -> np.ndarray:
    return np.array([[-np.sin(phi), np.cos(phi)], [-np.cos(phi), -np.sin(phi)]])


def phase_loss_model(alpha_re: float, alpha_im: float, r: float) -> ParametricModel:
    """Phase shift followed by photon loss on a displaced squeezed vacuum input.

    Parameters are theta = (phi, eta); the output moments are
    d = sqrt(eta) R_phi d_in and sigma = eta R_phi sigma_in R_phi^T + (1-eta) I.
    """
    d_in = np.sqrt(2.0) * np.array([alpha_re, alpha_im])
    sigma_in = np.diag([np.exp(2.0 * r), np.exp(-2.0 * r)])

    def d_of(theta):
        phi, eta = theta
        return np.sqrt(eta) * _rotation(phi) @ d_in

    def sigma_of(theta):
        phi, eta = theta
        rot = _rotation(phi)
        return eta * rot @ sigma_in @ rot.T + (1.0 - eta) * np.eye(2)

    def jet_of(theta):
        phi, eta = theta
        if not 0.0 < eta < 1.0:
            raise ValueError(f"jet requires eta in (0, 1); got eta = {eta}")
        rot = _rotation(phi)
        drot = _rotation_derivative(phi)
        d_phi = np.sqrt(eta) * drot @ d_in
        d_eta = rot @ d_in / (2.0 * np.sqrt(eta))
        s_phi = eta * (drot @ sigma_in @ rot.T + rot @ sigma_in @ drot.T)
        s_eta = rot @ sigma_in @ rot.T - np.eye(2)
        return ModelJet(
            GaussianState(d_of(theta), sigma_of(theta)),
            (d_phi, d_eta),
            (s_phi, s_eta),
            ("phi", "eta"),
        )

    return ParametricModel("phase-loss", 1, ("phi", "eta"), d_of, sigma_of, jet_of)


def disp_squeeze_single_model(n: float) -> ParametricModel:
    """Displaced squeezed thermal state, theta = (alpha_re, alpha_im, r)."""
    if n < 0:
        raise ValueError(f"thermal occupation must be non-negative, got {n}")
    t = 2.0 * n + 1.0

    def d_of(theta):
        return np.sqrt(2.0) * np.array([theta[0], theta[1]])

    def sigma_of(theta):
        return t * np.diag([np.exp(2.0 * theta[2]), np.exp(-2.0 * theta[2])])

    def jet_of(theta):
        r = theta[2]
        zero = np.zeros((2, 2))
        ds_r = t * np.diag([2.0 * np.exp(2.0 * r), -2.0 * np.exp(-2.0 * r)])
        return ModelJet(
            GaussianState(d_of(theta), sigma_of(theta)),
            (np.sqrt(2.0) * np.eye(2)[0], np.sqrt(2.0) * np.eye(2)[1], np.zeros(2)),
            (zero, zero, ds_r),
            ("alpha_re", "alpha_im", "r"),
        )

    return ParametricModel(
        "disp-squeeze-1", 1, ("alpha_re", "alpha_im", "r"), d_of, sigma_of, jet_of
    )


def disp_squeeze_two_model(n: float) -> ParametricModel:
    """Two-mode displaced squeezed thermal state after a balanced beam splitter.

    The beam splitter turns the two-mode squeezed thermal state into a product
    of single-mode squeezed thermal states with opposite displacements;
    theta = (alpha_re, alpha_im, r).
    """
    if n < 0:
        raise ValueError(f"thermal occupation must be non-negative, got {n}")
    t = 2.0 * n + 1.0

    def d_of(theta):
        return np.array([theta[0], theta[1], -theta[0], -theta[1]])

    def sigma_of(theta):
        r = theta[2]
        return t * np.diag(
            [np.exp(2.0 * r), np.exp(-2.0 * r), np.exp(-2.0 * r), np.exp(2.0 * r)]
        )

    def jet_of(theta):
        r = theta[2]
        zero = np.zeros((4, 4))
        ds_r = t * np.diag(
            [2.0 * np.exp(2.0 * r), -2.0 * np.exp(-2.0 * r), -2.0 * np.exp(-2.0 * r), 2.0 * np.exp(2.0 * r)]
        )
        return ModelJet(
            GaussianState(d_of(theta), sigma_of(theta)),
            (np.array([1.0, 0, -1.0, 0]), np.array([0, 1.0, 0, -1.0]), np.zeros(4)),
            (zero, zero, ds_r),
            ("alpha_re", "alpha_im", "r"),
        )

    return ParametricModel(
        "disp-squeeze-2", 2, ("alpha_re", "alpha_im", "r"), d_of, sigma_of, jet_of
    )


MODEL_BUILDERS = {
    "phase-loss": (phase_loss_model, ("alpha_re", "alpha_im", "r")),
    "disp-squeeze-1": (disp_squeeze_single_model, ("n",)),
    "disp-squeeze-2": (disp_squeeze_two_model, ("n",)),
}


def build_model(name: str, fixed: dict) -> ParametricModel:
    """Instantiate a builtin model from its name and fixed-parameter dict."""
    if name not in MODEL_BUILDERS:
        raise KeyError(f"unknown model '{name}'; available: {sorted(MODEL_BUILDERS)}")
    builder, required = MODEL_BUILDERS[name]
    missing = [k for k in required if k not in fixed]
    if missing:
        raise ValueError(f"model '{name}' needs fixed parameters {missing}")
    extra = [k for k in fixed if k not in required]
    if extra:
        raise ValueError(f"model '{name}' got unknown fixed parameters {extra}")
    return builder(**{k: float(fixed[k]) for k in required})


# ---------------------------------------------------------------------------
# Closed-form reference values
# ---------------------------------------------------------------------------

class OutOfDomainError(ValueError):
    """Requested quantity has no closed form on the given parameter range."""


def _csch2(r: float) -> float:
    return 1.0 / np.sinh(r) ** 2


def _phase_loss_case(params: dict) -> str:
    alpha2 = params["alpha_re"] ** 2 + params["alpha_im"] ** 2
    if abs(params["r"]) < 1e-14 and alpha2 > 0:
        return "coherent"
    if alpha2 < 1e-28 and abs(params["r"]) > 0:
        return "squeezed"
    raise OutOfDomainError(
        "phase-loss closed forms exist only for coherent (r = 0) or "
        "squeezed-vacuum (alpha = 0) inputs"
    )


def _phase_loss_closed_form(params: dict, which: str) -> float:
    case = _phase_loss_case(params)
    eta = params["eta"]
    if not 0.0 < eta < 1.0:
        raise OutOfDomainError(f"closed forms require eta in (0, 1), got {eta}")
    if case == "coherent":
        alpha2 = params["alpha_re"] ** 2 + params["alpha_im"] ** 2
        cs = (1.0 + 4.0 * eta**2) / (4.0 * eta * alpha2)
        if which == "CS":
            return cs
        # upper bound, RLD bound and Holevo bound coincide at every eta
        return cs + 1.0 / alpha2
    r = params["r"]
    q = 1.0 - 2.0 * eta * (1.0 - eta)
    cs = (
        16.0 * eta**4 * (1.0 - eta) ** 2
        + (1.0 + 2.0 * eta * (eta + 4.0 * eta**2 - 4.0 * eta**3 - 1.0)) * _csch2(r)
        - q**2 / np.cosh(r) ** 2
    ) / (8.0 * eta**2 * q)
    if which == "CS":
        return cs
    if which == "CR":
        return cs + (
            (4.0 * eta * (1.0 + eta - 2.0 * eta**2) - 1.0) * _csch2(r)
            + (1.0 - 2.0 * eta) ** 2 / np.cosh(r) ** 2
        ) / (8.0 * eta**2 * q)
    if which == "CHbar":
        return cs + (1.0 - eta) * _csch2(r) / q
    if which == "CH":
        if abs(eta - 0.5) > 1e-12:
            raise OutOfDomainError(
                "the Holevo bound for squeezed-vacuum input has a closed form "
                "only at eta = 1/2"
            )
        return 2.0 * _csch2(r) + np.tanh(r) ** 2 / 4.0
    raise KeyError(which)


def _disp_squeeze_single_closed_form(params: dict, which: str) -> float:
    n, r = params["n"], params["r"]
    t = 2.0 * n + 1.0
    cs = (t**3 * np.cosh(2.0 * r) + 2.0 * n * (1.0 + n) + 1.0) / (2.0 * t**2)
    if which == "CS":
        return cs
    if which == "CR":
        return cs + n * (n + 1.0) / (2.0 * n * (n + 1.0) + 1.0)
    if which in ("CHbar", "CH"):
        # the Holevo bound coincides numerically with the closed-form upper bound
        return cs + 0.5
    raise KeyError(which)


def _disp_squeeze_two_closed_form(params: dict, which: str) -> float:
    n, r = params["n"], params["r"]
    t = 2.0 * n + 1.0
    cs = (2.0 / np.cosh(2.0 * r) * t**3 + 2.0 * n * (1.0 + n) + 1.0) / (4.0 * t**2)
    if which == "CS":
        return cs
    if which == "CR":
        return n**2 * (n + 1.0) ** 2 / (t**2 * (2.0 * n * (n + 1.0) + 1.0)) + 2.0 * n * (
            n + 1.0
        ) / (t * np.cosh(2.0 * r) - 1.0)
    if which == "CHbar":
        return cs + 1.0 / (np.cosh(4.0 * r) + 1.0)
    if which == "CH":
        raise OutOfDomainError("no closed form for the two-mode Holevo bound")
    raise KeyError(which)


def closed_form_bounds(model_name: str, params: dict, which: str) -> float:
    """Reference bound values (uniform weight) where closed forms are known.

    `which` is one of CS, CR, CHbar, CH; parameter combinations outside the
    stated validity domains raise OutOfDomainError.
    """
    if which not in ("CS", "CR", "CHbar", "CH"):
        raise KeyError(f"unknown bound '{which}'")
    if model_name == "phase-loss":
        return _phase_loss_closed_form(params, which)
    if model_name == "disp-squeeze-1":
        return _disp_squeeze_single_closed_form(params, which)
    if model_name == "disp-squeeze-2":
        return _disp_squeeze_two_closed_form(params, which)
    raise KeyError(f"no closed forms registered for model '{model_name}'")


def closed_form_uhlmann(model_name: str, params: dict) -> np.ndarray:
    """Reference mean Uhlmann curvature matrices."""
    if model_name == "phase-loss":
        case = _phase_loss_case(params)
        if case == "coherent":
            alpha2 = params["alpha_re"] ** 2 + params["alpha_im"] ** 2
            top = 2.0 * alpha2
        else:
            r, eta = params["r"], params["eta"]
            den = 1.0 - eta * (1.0 - eta) + eta * (1.0 - eta) * np.cosh(2.0 * r)
            top = eta * np.sinh(2.0 * r) ** 2 / den**2
        return np.array([[0.0, top], [-top, 0.0]])
    if model_name in ("disp-squeeze-1", "disp-squeeze-2"):
        t = 2.0 * params["n"] + 1.0
        out = np.zeros((3, 3))
        out[0, 1] = 4.0 / t**2
        out[1, 0] = -out[0, 1]
        return out
    raise KeyError(f"no closed-form Uhlmann matrix for model '{model_name}'")


def closed_form_commutator(model_name: str, params: dict, pair: tuple) -> dict:
    """Reference SLD-commutator coefficients {c0, c1, c2} for a parameter pair.

    Coefficients are those of the standard-basis quadratic observable equal to
    the commutator (purely imaginary for Hermitian SLDs).
    """
    if model_name == "phase-loss":
        if tuple(pair) != (0, 1):
            raise KeyError("phase-loss has parameters (phi, eta); pair must be (0, 1)")
        case = _phase_loss_case(params)
        eta, phi = params["eta"], params.get("phi", 0.0)
        if case == "coherent":
            a_re, a_im = params["alpha_re"], params["alpha_im"]
            alpha2 = a_re**2 + a_im**2
            g1 = np.sqrt(2.0) * (1.0 - 2.0 * eta) * (a_re * np.cos(phi) + a_im * np.sin(phi)) / (
                np.sqrt(eta) * (1.0 - eta)
            )
            g2 = np.sqrt(2.0) * (1.0 - 2.0 * eta) * (a_im * np.cos(phi) - a_re * np.sin(phi)) / (
                np.sqrt(eta) * (1.0 - eta)
            )
            return {
                "c0": 4.0j * eta * alpha2 / (1.0 - eta),
                "c1": np.array([2.0j * g1, 2.0j * g2]),
                "c2": np.zeros((2, 2), dtype=complex),
            }
        r = params["r"]
        den = 4.0 * (1.0 - eta) * (1.0 - eta * (1.0 - eta) + eta * (1.0 - eta) * np.cosh(2.0 * r)) ** 2
        u1 = (1.0 - np.exp(-4.0 * r)) * (
            -(eta**2) * np.cos(phi) ** 2
            + (1.0 - eta) ** 2 * np.exp(2.0 * r) * np.cos(2.0 * phi)
            + eta**2 * np.exp(4.0 * r) * np.sin(phi) ** 2
        ) / den
        u2 = (1.0 - np.exp(-4.0 * r)) * (
            eta**2 * np.exp(4.0 * r) * np.cos(phi) ** 2
            - (1.0 - eta) ** 2 * np.exp(2.0 * r) * np.cos(2.0 * phi)
            - eta**2 * np.sin(phi) ** 2
        ) / den
        u3 = (
            (eta**2 * np.cosh(2.0 * r) - (1.0 - eta) ** 2)
            * np.sin(2.0 * phi)
            * np.sinh(2.0 * r)
            / (2.0 * (1.0 - eta) * (1.0 - eta * (1.0 - eta) + eta * (1.0 - eta) * np.cosh(2.0 * r)) ** 2)
        )
        return {
            "c0": 0.0j,
            "c1": np.zeros(2, dtype=complex),
            "c2": 4.0j * np.array([[u1, u3], [u3, u2]]),
        }
    if model_name == "disp-squeeze-1":
        n = params["n"]
        t2 = (2.0 * n + 1.0) ** 2
        den = 2.0 * n * (n + 1.0) + 1.0
        pair = tuple(pair)
        if pair == (0, 1):
            return {"c0": 8.0j / t2, "c1": np.zeros(2, dtype=complex), "c2": np.zeros((2, 2), dtype=complex)}
        if pair == (0, 2):
            return {
                "c0": 8.0j * params["alpha_im"] / den,
                "c1": np.array([0.0, -4.0j * np.sqrt(2.0) / den]),
                "c2": np.zeros((2, 2), dtype=complex),
            }
        if pair == (1, 2):
            return {
                "c0": 8.0j * params["alpha_re"] / den,
                "c1": np.array([-4.0j * np.sqrt(2.0) / den, 0.0]),
                "c2": np.zeros((2, 2), dtype=complex),
            }
        raise KeyError(f"no reference commutator for pair {pair}")
    if model_name == "disp-squeeze-2":
        n = params["n"]
        t2 = (1.0 + 2.0 * n) ** 2
        den = 1.0 + 2.0 * n * (1.0 + n)
        pair = tuple(pair)
        if pair == (0, 1):
            return {"c0": 8.0j / t2, "c1": np.zeros(4, dtype=complex), "c2": np.zeros((4, 4), dtype=complex)}
        if pair == (0, 2):
            return {
                "c0": 0.0j,
                "c1": np.array([0.0, -4.0j / den, 0.0, -4.0j / den]),
                "c2": np.zeros((4, 4), dtype=complex),
            }
        if pair == (1, 2):
            return {
                "c0": 0.0j,
                "c1": np.array([-4.0j / den, 0.0, -4.0j / den, 0.0]),
                "c2": np.zeros((4, 4), dtype=complex),
            }
        raise KeyError(f"no reference commutator for pair {pair}")
    raise KeyError(f"no closed-form commutators for model '{model_name}'")


def phase_loss_commutator_half_loss_squeezed(r: float, phi: float) -> np.ndarray:
    """Quadratic coefficient of [L_phi, L_eta] at eta = 1/2, squeezed-vacuum input."""
    den = (3.0 + np.cosh(2.0 * r)) ** 2
    d1 = 4.0 * (np.sinh(2.0 * r) ** 2 - 4.0 * np.cos(2.0 * phi) * np.cosh(r) * np.sinh(r) ** 3) / den
    d2 = 4.0 * (np.sinh(2.0 * r) ** 2 + 4.0 * np.cos(2.0 * phi) * np.cosh(r) * np.sinh(r) ** 3) / den
    d3 = 16.0 * np.cosh(r) * np.sin(2.0 * phi) * np.sinh(r) ** 3 / den
    return 4.0j * np.array([[d1, d3], [d3, d2]])


# ---------------------------------------------------------------------------
# Jet-file schema
# ---------------------------------------------------------------------------

def jet_to_dict(jet: ModelJet) -> dict:
    return {
        "modes": jet.modes,
        "params": list(jet.names),
        "d": jet.state.d.tolist(),
        "sigma": jet.state.sigma.tolist(),
        "dd": [v.tolist() for v in jet.dd],
        "dsigma": [s.tolist() for s in jet.dsigma],
    }


def _as_array(payload, field: str, shape: tuple) -> np.ndarray:
    try:
        arr = np.asarray(payload, dtype=float)
    except (TypeError, ValueError) as err:
        raise JetFileError(f"field '{field}' is not numeric: {err}") from None
    if arr.shape != shape:
        raise JetFileError(f"field '{field}' has shape {arr.shape}, expected {shape}")
    return arr


def jet_from_dict(data: dict) -> ModelJet:
    if not isinstance(data, dict):
        raise JetFileError("jet file must contain a JSON object")
    for key in ("modes", "params", "d", "sigma", "dd", "dsigma"):
        if key not in data:
            raise JetFileError(f"missing required field '{key}'")
    modes = data["modes"]
    if not isinstance(modes, int) or modes < 1:
        raise JetFileError(f"field 'modes' must be a positive integer, got {modes!r}")
    names = data["params"]
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise JetFileError("field 'params' must be a list of parameter names")
    p = len(names)
    n = 2 * modes
    d = _as_array(data["d"], "d", (n,))
    sigma = _as_array(data["sigma"], "sigma", (n, n))
    if not isinstance(data["dd"], list) or len(data["dd"]) != p:
        raise JetFileError(f"field 'dd' must list {p} derivative vectors")
    if not isinstance(data["dsigma"], list) or len(data["dsigma"]) != p:
        raise JetFileError(f"field 'dsigma' must list {p} derivative matrices")
    dd = tuple(_as_array(v, f"dd[{j}]", (n,)) for j, v in enumerate(data["dd"]))
    dsigma = tuple(_as_array(s, f"dsigma[{j}]", (n, n)) for j, s in enumerate(data["dsigma"]))
    try:
        return ModelJet(GaussianState(d, sigma), dd, dsigma, tuple(names))
    except ValueError as err:
        raise JetFileError(str(err)) from None


def load_jet(path: str) -> ModelJet:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as err:
        raise JetFileError(f"invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}")
    return jet_from_dict(data)


def dump_jet(jet: ModelJet, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(jet_to_dict(jet), fh, indent=2)
        fh.write("\n")
