"""Fidelities, optimal gains, inseparability witnesses and unit conversions.

The closed forms broadcast over numpy arrays so sweeps can evaluate a
whole grid at once. Efficiencies are amplitude efficiencies ``eta``;
the quoted detector figures are ``eta**2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from .modes import DeadModeError, ModeRegister, QuadExpr, VACUUM_VARIANCE

CLASSICAL_LIMIT = 0.5
SIGMA_FLOOR_TOL = 1e-9
DUAN_BOUND = 1.0
TAN_BOUND = 1.0 / 16.0


class ConsistencyError(RuntimeError):
    """Raised when a computed quantity violates a physical bound."""


class NonUnimodalWarning(UserWarning):
    pass


@dataclass
class FidelityReport:
    sigma_x: float
    sigma_p: float
    fidelity: float
    g: float
    g_swap: Optional[float]
    duan_sum: float
    tan_product: float
    fidelity_closed_form: Optional[float] = None
    scenario: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


# -- squeezing units ----------------------------------------------------


def db_to_r(db: float) -> float:
    """Squeezing parameter for a given noise reduction in dB (e^{-2r} = 10^{-dB/10})."""
    if db < 0 or math.isnan(db):
        raise ValueError(f"squeezing in dB must be >= 0, got {db!r}")
    return db * math.log(10.0) / 20.0


def r_to_db(r: float) -> float:
    if r < 0 or math.isnan(r):
        raise ValueError(f"squeezing parameter must be >= 0, got {r!r}")
    return 20.0 * r / math.log(10.0)


@dataclass(frozen=True)
class SqueezeDb:
    db: float

    def __post_init__(self):
        if self.db < 0:
            raise ValueError(f"squeezing in dB must be >= 0, got {self.db!r}")

    @property
    def r(self) -> float:
        return db_to_r(self.db)

    @classmethod
    def from_r(cls, r: float) -> "SqueezeDb":
        return cls(r_to_db(r))


# -- fidelity from the symbolic engine ------------------------------------


def _check_input_coefficient(expr: QuadExpr, g: float, atol: float = 1e-12) -> None:
    coeffs = list(expr.inputs.values())
    if abs(g) > atol and len(coeffs) != 1:
        raise ValueError(
            f"expected exactly one input symbol in the {expr.kind.value}-output, found {len(coeffs)}"
        )
    for c in coeffs:
        if abs(c - g) > atol:
            raise ValueError(
                f"input coefficient {c!r} in the {expr.kind.value}-output does not match gain {g!r}"
            )


def q_variances(reg: ModeRegister, x_tel: QuadExpr, p_tel: QuadExpr) -> Tuple[float, float]:
    """Q-function variances: quadrature variance plus one vacuum unit.

    The input mode's own vacuum noise is part of the expressions already
    (input modes carry a vacuum basis entry), so only the Q-function
    smoothing is added here.
    """
    sx = reg.variance(x_tel) + VACUUM_VARIANCE
    sp = reg.variance(p_tel) + VACUUM_VARIANCE
    return sx, sp


def fidelity_from_sigmas(
    sigma_x: float, sigma_p: float, g: float = 1.0, x_in: float = 0.0, p_in: float = 0.0
) -> float:
    expo = -((1.0 - g) ** 2) * (x_in**2 / (2 * sigma_x) + p_in**2 / (2 * sigma_p))
    return math.exp(expo) / (2.0 * math.sqrt(sigma_x * sigma_p))


def fidelity_from_exprs(
    reg: ModeRegister,
    x_tel: QuadExpr,
    p_tel: QuadExpr,
    g: float = 1.0,
    x_in: float = 0.0,
    p_in: float = 0.0,
) -> float:
    """Coherent-state fidelity of a teleported mode.

    ``x_in`` and ``p_in`` are the coherent amplitude of the input in
    quadrature units; they only matter for ``g != 1``.
    """
    x_tel, p_tel = reg.resolve(x_tel), reg.resolve(p_tel)
    _check_input_coefficient(x_tel, g)
    _check_input_coefficient(p_tel, g)
    sx, sp = q_variances(reg, x_tel, p_tel)
    return fidelity_from_sigmas(sx, sp, g, x_in, p_in)


def check_sigma_floor(sigma_x: float, sigma_p: float) -> None:
    """Unit-gain outputs can never have Q variance below 1/2."""
    for name, s in (("sigma_x", sigma_x), ("sigma_p", sigma_p)):
        if s < 0.5 - SIGMA_FLOOR_TOL:
            raise ConsistencyError(f"{name} = {s!r} is below the unit-gain floor 1/2")


# -- closed forms -----------------------------------------------------------


def fidelity_swap(r1, r2, s1, s2, g_swap, eta_c=1.0, eta_a=1.0):
    """Unit-gain fidelity after swapping and teleporting, in closed form."""
    noise = g_swap**2 * (eta_c**-2.0 - 1.0) + eta_a**-2.0 - 1.0
    qx = (
        1.0
        + (g_swap - 1.0) ** 2 * (np.exp(2 * r1) + np.exp(2 * s1)) / 4.0
        + (g_swap + 1.0) ** 2 * (np.exp(-2 * r2) + np.exp(-2 * s2)) / 4.0
        + noise
    )
    qp = (
        1.0
        + (g_swap - 1.0) ** 2 * (np.exp(2 * r2) + np.exp(2 * s2)) / 4.0
        + (g_swap + 1.0) ** 2 * (np.exp(-2 * r1) + np.exp(-2 * s1)) / 4.0
        + noise
    )
    return 1.0 / np.sqrt(qx * qp)


def fidelity_closed_form(params) -> float:
    """Closed-form unit-gain fidelity for a parameter set (``params.g`` must be 1)."""
    if getattr(params, "g", 1.0) != 1.0:
        raise ValueError("the closed form holds for unit teleportation gain only")
    return float(
        fidelity_swap(
            params.r1, params.r2, params.s1, params.s2, params.g_swap, params.eta_c, params.eta_a
        )
    )


def fidelity_direct(ra, rb, eta_a=1.0):
    """Unit-gain fidelity teleporting through one EPR pair, no swapping."""
    noise = eta_a**-2.0 - 1.0
    return 1.0 / np.sqrt((1.0 + np.exp(-2 * rb) + noise) * (1.0 + np.exp(-2 * ra) + noise))


def optimal_gain(r, s, eta_c=1.0):
    """Optimal swap gain for pairs squeezed (r, r) and (s, s)."""
    return (np.sinh(2 * r) + np.sinh(2 * s)) / (
        np.cosh(2 * r) + np.cosh(2 * s) + 2.0 * eta_c**-2.0 - 2.0
    )


def optimal_fidelity_two_pair(r, s):
    return 1.0 / (1.0 + (np.cosh(2 * (r - s)) + 1.0) / (np.cosh(2 * r) + np.cosh(2 * s)))


def optimal_fidelity_single_squeezers(r, eta_c=1.0, eta_a=1.0):
    """Fidelity with one squeezer per pair and swap gain tanh r."""
    noise = np.tanh(r) ** 2 * (eta_c**-2.0 - 1.0) + eta_a**-2.0 - 1.0
    e = np.exp(2 * r)
    a = 1.0 + 2.0 * e / (e + 1.0) + noise
    b = 1.0 + 2.0 / (e + 1.0) + noise
    return 1.0 / np.sqrt(a * b)


# -- inseparability witnesses ------------------------------------------------


def _live_pair(reg: ModeRegister, a: int, b: int):
    ma, mb = reg.mode(a), reg.mode(b)
    for m in (ma, mb):
        if not m.alive:
            raise DeadModeError(f"mode {m.label!r} was consumed by a measurement")
    return ma, mb


def duan_sum(reg: ModeRegister, a: int, b: int) -> float:
    """Var(x_a - x_b) + Var(p_a + p_b); below 1 witnesses entanglement."""
    ma, mb = _live_pair(reg, a, b)
    return reg.variance(ma.x - mb.x) + reg.variance(ma.p + mb.p)


def tan_product(reg: ModeRegister, a: int, b: int) -> float:
    """Product of the beamsplitter-combined variances; below 1/16 witnesses entanglement."""
    ma, mb = _live_pair(reg, a, b)
    s = 1.0 / math.sqrt(2.0)
    return reg.variance((ma.x - mb.x) * s) * reg.variance((ma.p + mb.p) * s)


# -- 1-D gain optimisation -------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _finite(f: Callable[[float], float], x: float) -> float:
    y = float(f(x))
    if not math.isfinite(y):
        raise ValueError(f"objective is not finite at {x!r}: {y!r}")
    return y


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-10
) -> Tuple[float, float]:
    """Maximise a unimodal ``f`` on [a, b] to an interval narrower than ``tol``.

    On equal probe values the search keeps the central sub-interval, so a
    constant objective returns the bracket midpoint.
    """
    a, b = sorted((float(a), float(b)))
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = _finite(f, c), _finite(f, d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = _finite(f, c)
        elif fc < fd:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = _finite(f, d)
        else:
            a, b = c, d
            c = b - _INV_PHI * (b - a)
            d = a + _INV_PHI * (b - a)
            fc, fd = _finite(f, c), _finite(f, d)
    x = 0.5 * (a + b)
    return x, _finite(f, x)


def optimize_gain_numeric(
    objective: Callable[[float], float],
    bracket: Tuple[float, float] = (0.0, 1.5),
    tol: float = 1e-10,
    scan_points: int = 65,
) -> Tuple[float, float]:
    """Argmax and max of ``objective`` over the bracket.

    A coarse scan guards the unimodality assumption: if any scan point
    beats the golden-section result, a ``NonUnimodalWarning`` is issued
    and the search is redone around the best scan point.
    """
    g, best = golden_section_max(objective, *bracket, tol=tol)
    if scan_points < 3:
        return g, best
    grid = np.linspace(bracket[0], bracket[1], scan_points)
    vals = np.array([_finite(objective, x) for x in grid])
    k = int(np.argmax(vals))
    if vals[k] > best + 1e-12 * max(1.0, abs(best)):
        warnings.warn(
            f"objective is not unimodal on {bracket}; refining around scan maximum {grid[k]!r}",
            NonUnimodalWarning,
            stacklevel=2,
        )
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, scan_points - 1)]
        g, best = golden_section_max(objective, lo, hi, tol=tol)
    return g, best
