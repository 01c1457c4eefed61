"""Phase sensing with the weighted graph state: encoding, information bounds
and optimal-measurement searches.

The encoded phase enters through U(theta) = R_x(theta) (x) R_z(theta),
generated by H = (X (x) 1 + 1 (x) Z)/2. Estimator quality for an
observable A is summarized by the single-shot variance (DA)^2 and the
slope of <A> with respect to theta; their ratio (DA)^2 / |d<A>/dtheta|^2
is the phase variance of the method-of-moments estimator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import NonlinearConstraint, differential_evolution, minimize

from .measurement import Observable, general_axis_observable, pauli_observable
from .optics import rotation_gate
from .qmath import I2, X, Z, PureState2Q, as_density, tensor
from .stategen import weighted_graph_state

GENERATOR = (tensor(X, I2) + tensor(I2, Z)) / 2

DERIVATIVE_FLOOR = 1e-9


class DerivativeVanishesError(ArithmeticError):
    """The observable's slope is numerically zero: the estimator variance diverges."""


class SearchError(RuntimeError):
    """An observable search failed to produce a usable optimum."""


@dataclass(frozen=True)
class SensingConfig:
    """Operating point for a sensing run.

    ``theta_star`` is the phase around which the derivative is taken and
    ``h`` the two-point finite-difference shift (radians).
    """

    phi12: float
    theta_star: float = 0.0
    h: float = np.radians(5.0)

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("finite-difference shift h must be > 0")


@dataclass(frozen=True)
class SensingResult:
    expectation: float
    derivative_magnitude: float
    single_shot_variance: float
    estimator_variance: float


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the general-axis observable search.

    The derivative-favoring penalty steers the optimizer along the
    near-degenerate variance floor toward its large-slope end;
    ``variance_tolerance`` bounds how much variance the subsequent
    re-ranking may trade for slope, and ``neighborhood_radius`` (radians)
    sets the sampling cube of the final re-rank.
    """

    penalty_weight: float = 0.02
    de_population: int = 40
    de_generations: int = 300
    refine: bool = True
    neighborhood_radius: float = np.radians(2.0)
    variance_tolerance: float = 1e-4
    neighborhood_samples: int = 400

    def __post_init__(self):
        if self.penalty_weight < 0:
            raise ValueError("penalty_weight must be >= 0")
        if self.de_population < 8:
            raise ValueError("de_population must be >= 8")
        if self.variance_tolerance <= 0:
            raise ValueError("variance_tolerance must be > 0")


def encoding_unitary(theta: float) -> np.ndarray:
    """R_x(theta) on photon 1 together with R_z(theta) on photon 2."""
    return tensor(rotation_gate("x", theta), rotation_gate("z", theta))


def qfi_closed_form(phi12: float) -> float:
    """Quantum Fisher information of the weight-phi12 state under the encoding.

    Equals (11 - 6 cos phi12 - cos^2 phi12)/4; independent of the
    encoded phase.
    """
    c = np.cos(phi12)
    return float((11 - 6 * c - c * c) / 4)


def qfi_numeric(state: PureState2Q) -> float:
    """4 Var(H) of a pure state for the encoding generator H."""
    psi = state.amplitudes if isinstance(state, PureState2Q) else np.asarray(state, dtype=complex)
    hpsi = GENERATOR @ psi
    mean = np.real(np.vdot(psi, hpsi))
    second = np.real(np.vdot(hpsi, hpsi))
    return float(4 * (second - mean ** 2))


def limits() -> tuple[float, float]:
    """(standard quantum limit, Heisenberg limit) for two qubits."""
    return 0.5, 0.25


def _encoded_density(state, theta: float) -> np.ndarray:
    u = encoding_unitary(theta)
    return u @ as_density(state) @ u.conj().T


def _signed_metrics(state, obs: Observable, cfg: SensingConfig,
                    mode: str = "analytic"):
    """(expectation, signed slope, single-shot variance) at theta_star."""
    a = obs.matrix()
    rho = _encoded_density(state, cfg.theta_star)
    exp_val = float(np.real(np.trace(a @ rho)))
    var = float(np.real(np.trace(a @ a @ rho)) - exp_val ** 2)
    if mode == "analytic":
        comm = 1j * (GENERATOR @ a - a @ GENERATOR)
        deriv = float(np.real(np.trace(comm @ rho)))
    elif mode == "finite_difference":
        e_plus = np.real(np.trace(a @ _encoded_density(state, cfg.theta_star + cfg.h)))
        e_minus = np.real(np.trace(a @ _encoded_density(state, cfg.theta_star - cfg.h)))
        deriv = float((e_plus - e_minus) / (2 * cfg.h))
    else:
        raise ValueError(f"unknown derivative mode {mode!r}")
    return exp_val, deriv, var


def sense(state, obs: Observable, cfg: SensingConfig,
          mode: str = "analytic",
          derivative_floor: float = DERIVATIVE_FLOOR) -> SensingResult:
    """Evaluate an observable's phase-estimation figures at the operating point.

    ``mode`` selects the exact slope (commutator with the generator) or
    the symmetric two-point finite difference with shift ``cfg.h``. A
    slope below ``derivative_floor`` raises
    :class:`DerivativeVanishesError` rather than returning an unusable
    number.
    """
    exp_val, deriv, var = _signed_metrics(state, obs, cfg, mode)
    if abs(deriv) < derivative_floor:
        raise DerivativeVanishesError(
            f"|d<A>/dtheta| = {abs(deriv):.3e} below floor {derivative_floor:g}")
    return SensingResult(
        expectation=exp_val,
        derivative_magnitude=abs(deriv),
        single_shot_variance=var,
        estimator_variance=var / deriv ** 2,
    )


_PAULI_ORDER = ("I", "X", "Y", "Z")


def pauli_search(phi12: float, cfg: SensingConfig | None = None,
                 tie_tolerance: float = 1e-6) -> tuple[Observable, SensingResult]:
    """Exhaustive search over the 16 Pauli products for the lowest phase variance.

    Candidates within ``tie_tolerance`` of the minimum variance are
    re-ranked deterministically: largest |slope| first, then positive
    slope, then smaller expectation, then enumeration order
    (I, X, Y, Z per factor).
    """
    cfg = cfg or SensingConfig(phi12=phi12)
    state = weighted_graph_state(phi12)
    entries = []
    for a1, a2 in product(_PAULI_ORDER, repeat=2):
        obs = pauli_observable(a1, a2)
        exp_val, deriv, var = _signed_metrics(state, obs, cfg)
        est = var / deriv ** 2 if abs(deriv) >= DERIVATIVE_FLOOR else np.inf
        entries.append((obs, exp_val, deriv, var, est))
    best_var = min(e[4] for e in entries)
    if not np.isfinite(best_var):
        raise SearchError("every Pauli product has vanishing slope")
    ties = [e for e in entries if e[4] <= best_var + tie_tolerance]
    # keys rounded well below tie_tolerance so float noise cannot reorder
    obs, exp_val, deriv, var, est = min(
        ties, key=lambda e: (-round(abs(e[2]), 9), -round(e[2], 9), round(e[1], 9)))
    return obs, SensingResult(expectation=exp_val,
                              derivative_magnitude=abs(deriv),
                              single_shot_variance=var,
                              estimator_variance=est)


_AXIS_BOUNDS = [(0.0, np.pi), (-np.pi, np.pi), (0.0, np.pi), (-np.pi, np.pi)]


def _axis_metrics_factory(phi12: float, theta_star: float):
    """Fast (expectation, slope, variance) evaluator over axis angles."""
    psi = encoding_unitary(theta_star) @ weighted_graph_state(phi12).amplitudes
    # at theta_star the slope is the commutator expectation in the
    # encoded state: d<A>/dtheta = -2 Im <H psi | A psi>
    hpsi = GENERATOR @ psi
    psi_m = psi.reshape(2, 2)
    hpsi_m = hpsi.reshape(2, 2)

    def axis_matrix(beta, alpha):
        cb, sb = np.cos(beta), np.sin(beta)
        off = sb * np.exp(-1j * alpha)
        return np.array([[cb, off], [np.conj(off), -cb]])

    def metrics(params):
        a1 = axis_matrix(params[0], params[1])
        a2 = axis_matrix(params[2], params[3])
        apsi = a1 @ psi_m @ a2.T
        exp_val = float(np.real(np.sum(psi_m.conj() * apsi)))
        deriv = float(-2 * np.imag(np.sum(hpsi_m.conj() * apsi)))
        return exp_val, deriv, 1.0 - exp_val ** 2

    return metrics


def general_axis_search(phi12: float, cfg: SensingConfig | None = None,
                        sc: SearchConfig | None = None,
                        seed: int = 12345) -> tuple[Observable, SensingResult]:
    """Differential-evolution search over local general-axis products.

    Minimizes the penalized objective (estimator variance plus
    ``penalty_weight / |slope|``) over the four Bloch angles, refines
    with Powell and a slope-maximizing step constrained to the
    ``variance_tolerance`` band, then re-ranks a sampled neighborhood
    (radius ``neighborhood_radius``, ``neighborhood_samples`` points,
    stream seeded with ``seed + 1``) for the largest slope among
    variance-tied points.
    """
    cfg = cfg or SensingConfig(phi12=phi12)
    sc = sc or SearchConfig()
    metrics = _axis_metrics_factory(phi12, cfg.theta_star)

    def est_var(params):
        exp_val, deriv, var = metrics(params)
        return var / max(deriv ** 2, 1e-300)

    def objective(params):
        exp_val, deriv, var = metrics(params)
        slope = max(abs(deriv), 1e-12)
        return var / slope ** 2 + sc.penalty_weight / slope

    res = differential_evolution(
        objective, _AXIS_BOUNDS, seed=seed,
        popsize=max(2, sc.de_population // len(_AXIS_BOUNDS)),
        maxiter=sc.de_generations, strategy="rand1bin", tol=1e-12,
        polish=False)
    x, fun = res.x, res.fun
    if not np.isfinite(fun):
        raise SearchError(f"search diverged; best objective {fun!r}")

    if sc.refine:
        ref = minimize(objective, x, method="Powell", bounds=_AXIS_BOUNDS,
                       options={"xtol": 1e-10, "ftol": 1e-12})
        if ref.fun < fun:
            x, fun = ref.x, ref.fun
        # push the slope as far as the variance tolerance allows
        cap = est_var(x) + sc.variance_tolerance
        slope_ref = minimize(
            lambda p: -abs(metrics(p)[1]), x, method="SLSQP",
            bounds=_AXIS_BOUNDS,
            constraints=[NonlinearConstraint(est_var, -np.inf, cap)],
            options={"maxiter": 200, "ftol": 1e-12})
        if (slope_ref.success and est_var(slope_ref.x) <= cap + 1e-9
                and -slope_ref.fun > abs(metrics(x)[1])):
            x = slope_ref.x
    else:
        cap = est_var(x) + sc.variance_tolerance

    # neighborhood re-rank: largest slope among variance-tied samples
    rng = np.random.default_rng(seed + 1)
    lo = np.array([b[0] for b in _AXIS_BOUNDS])
    hi = np.array([b[1] for b in _AXIS_BOUNDS])
    samples = np.clip(
        x + rng.uniform(-sc.neighborhood_radius, sc.neighborhood_radius,
                        (sc.neighborhood_samples, 4)),
        lo, hi)
    vref = est_var(x)
    threshold = min(vref, cap) + sc.variance_tolerance
    best_x, best_slope = x, abs(metrics(x)[1])
    for candidate in samples:
        exp_val, deriv, var = metrics(candidate)
        if var / max(deriv ** 2, 1e-300) <= threshold and abs(deriv) > best_slope:
            best_x, best_slope = candidate, abs(deriv)

    obs = general_axis_observable(*best_x)
    exp_val, deriv, var = metrics(best_x)
    if abs(deriv) < DERIVATIVE_FLOOR:
        raise SearchError("search converged to a zero-slope observable")
    result = SensingResult(expectation=exp_val,
                           derivative_magnitude=abs(deriv),
                           single_shot_variance=var,
                           estimator_variance=var / deriv ** 2)
    return obs, result
