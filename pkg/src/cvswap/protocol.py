"""Builders for the swapping network and the teleportation scenarios.

Mode labels follow the usual numbering: 1 is Alice's mode, 2 and 3 are
Claire's, 4 is Bob's. Claire's and Alice's Bell detections both send
their first mode minus the second to the x detector (port ``u``) and the
sum to the p detector (port ``v``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Tuple

import numpy as np

from . import criteria
from .criteria import FidelityReport
from .modes import ModeRegister, QuadExpr, QuadKind

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SwapParams:
    """Squeezing of the two EPR sources, gains and amplitude efficiencies."""

    r1: float
    r2: float
    s1: float
    s2: float
    g_swap: float = 1.0
    g: float = 1.0
    eta_c: float = 1.0
    eta_a: float = 1.0

    def __post_init__(self):
        for name in ("r1", "r2", "s1", "s2", "g_swap", "g"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        for name in ("eta_c", "eta_a"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v!r}")

    @classmethod
    def symmetric(cls, r: float, s: Optional[float] = None, **kw) -> "SwapParams":
        s = r if s is None else s
        return cls(r, r, s, s, **kw)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("r1", "r2", "s1", "s2", "g_swap", "g", "eta_c", "eta_a")}


@dataclass
class Link:
    """Two live modes shared between a sender and a receiver."""

    register: ModeRegister
    alice_mode: int
    bob_mode: int


@dataclass
class SwapOutput(Link):
    claire_outcomes: Tuple[int, int] = (-1, -1)
    params: Optional[SwapParams] = None


@dataclass
class TeleportOutput:
    register: ModeRegister
    x_tel: QuadExpr
    p_tel: QuadExpr
    input_ids: Tuple[int, int]
    input_mode: int
    output_mode: int
    g: float = 1.0


# -- building blocks ---------------------------------------------------------


def make_epr_pair(
    reg: ModeRegister, ra: float, rb: float, labels: Tuple[Optional[str], Optional[str]] = (None, None)
) -> Tuple[int, int]:
    """Two-mode squeezed state from squeezed vacua (+ra, -rb) on a beamsplitter."""
    a = reg.add_vacuum_mode(labels[0])
    b = reg.add_vacuum_mode(labels[1])
    reg.squeeze(a, ra)
    reg.squeeze(b, -rb)
    reg.beamsplitter(a, b)
    return a, b


def bell_measure(
    reg: ModeRegister, a: int, b: int, eta: float = 1.0, ports: Tuple[str, str] = ("u", "v")
) -> Tuple[int, int]:
    """Measure x of (a-b)/sqrt2 and p of (a+b)/sqrt2; returns outcome ids (x_u, p_v)."""
    reg.beamsplitter(a, b)
    # after the beamsplitter a holds the sum port, b the difference port
    xu = reg.homodyne(b, QuadKind.X, eta, label=f"x_{ports[0]}")
    pv = reg.homodyne(a, QuadKind.P, eta, label=f"p_{ports[1]}")
    return xu, pv


def feed_forward(reg: ModeRegister, m: int, outcomes: Tuple[int, int], gain: float) -> None:
    xu, pv = outcomes
    reg.displace(m, QuadKind.X, xu, gain * SQRT2)
    reg.displace(m, QuadKind.P, pv, gain * SQRT2)


# -- protocols ---------------------------------------------------------------


def entanglement_swap(params: SwapParams) -> SwapOutput:
    reg = ModeRegister()
    m1, m2 = make_epr_pair(reg, params.r1, params.r2, ("1", "2"))
    m3, m4 = make_epr_pair(reg, params.s1, params.s2, ("3", "4"))
    outcomes = bell_measure(reg, m2, m3, params.eta_c, ("u", "v"))
    feed_forward(reg, m4, outcomes, params.g_swap)
    return SwapOutput(reg, m1, m4, outcomes, params)


def direct_link(ra: float, rb: float) -> Link:
    """A single EPR pair shared by Alice (mode 1) and Bob (mode 2)."""
    reg = ModeRegister()
    m1, m2 = make_epr_pair(reg, ra, rb, ("1", "2"))
    return Link(reg, m1, m2)


def teleport_coherent(link: Link, g: float = 1.0, eta_a: float = 1.0) -> TeleportOutput:
    """Teleport an unknown coherent state from Alice's to Bob's mode of ``link``."""
    reg = link.register
    m_in = reg.add_input_mode("in")
    ids = reg.input_ids(m_in)
    outcomes = bell_measure(reg, m_in, link.alice_mode, eta_a, ("u'", "v'"))
    feed_forward(reg, link.bob_mode, outcomes, g)
    out = reg.mode(link.bob_mode)
    return TeleportOutput(reg, reg.resolve(out.x), reg.resolve(out.p), ids, m_in, link.bob_mode, g)


def sequential_teleport(params: SwapParams) -> TeleportOutput:
    """Alice teleports to Claire over pair 1-2, Claire relays to Bob over 3-4.

    Both hops use unit gain; at ``g_swap = 1`` the output coincides with
    swapping followed by teleportation.
    """
    reg = ModeRegister()
    m1, m2 = make_epr_pair(reg, params.r1, params.r2, ("1", "2"))
    m3, m4 = make_epr_pair(reg, params.s1, params.s2, ("3", "4"))
    m_in = reg.add_input_mode("in")
    ids = reg.input_ids(m_in)
    feed_forward(reg, m2, bell_measure(reg, m_in, m1, params.eta_a, ("u'", "v'")), 1.0)
    feed_forward(reg, m4, bell_measure(reg, m2, m3, params.eta_c, ("u", "v")), 1.0)
    out = reg.mode(m4)
    return TeleportOutput(reg, reg.resolve(out.x), reg.resolve(out.p), ids, m_in, m4, 1.0)


# -- reports -----------------------------------------------------------------


def _report(link: Link, tel_factory, g: float, g_swap, closed, scenario, params) -> FidelityReport:
    reg = link.register
    duan = criteria.duan_sum(reg, link.alice_mode, link.bob_mode)
    tan = criteria.tan_product(reg, link.alice_mode, link.bob_mode)
    tel = tel_factory(link)
    sx, sp = criteria.q_variances(reg, tel.x_tel, tel.p_tel)
    if g == 1.0:
        criteria.check_sigma_floor(sx, sp)
    fid = criteria.fidelity_from_exprs(reg, tel.x_tel, tel.p_tel, g)
    return FidelityReport(
        sigma_x=sx,
        sigma_p=sp,
        fidelity=fid,
        g=g,
        g_swap=g_swap,
        duan_sum=duan,
        tan_product=tan,
        fidelity_closed_form=closed,
        scenario=scenario,
        params=params,
    )


def evaluate_swap(params: SwapParams, scenario: Optional[str] = None) -> FidelityReport:
    """Swap, witness modes 1 and 4', then teleport a coherent state through them."""
    link = entanglement_swap(params)
    closed = criteria.fidelity_closed_form(params) if params.g == 1.0 else None
    return _report(
        link,
        lambda lk: teleport_coherent(lk, params.g, params.eta_a),
        params.g,
        params.g_swap,
        closed,
        scenario,
        params.as_dict(),
    )


def evaluate_direct(
    ra: float, rb: float, g: float = 1.0, eta_a: float = 1.0, scenario: Optional[str] = None
) -> FidelityReport:
    link = direct_link(ra, rb)
    closed = float(criteria.fidelity_direct(ra, rb, eta_a)) if g == 1.0 else None
    return _report(
        link,
        lambda lk: teleport_coherent(lk, g, eta_a),
        g,
        None,
        closed,
        scenario,
        {"r1": ra, "r2": rb, "g": g, "eta_a": eta_a},
    )


class Scenario(enum.Enum):
    """Curves of the fidelity-versus-squeezing comparison.

    A: direct, two equally squeezed vacua. B: swap, four equal squeezers.
    C: direct, one squeezer. D: swap, one squeezer per pair.
    E: as D with eta^2 = 0.95 detectors.
    """

    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"

    @classmethod
    def parse(cls, tag) -> "Scenario":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).lower())
        except ValueError:
            raise ValueError(f"unknown scenario {tag!r}; expected one of a, b, c, d, e") from None

    @property
    def swaps(self) -> bool:
        return self in (Scenario.B, Scenario.D, Scenario.E)


E_CURVE_ETA = math.sqrt(0.95)
_OVERRIDE_KEYS = {"g_swap", "g", "eta_c", "eta_a"}


def scenario_params(tag, r: float, overrides: Optional[Mapping[str, float]] = None) -> SwapParams:
    """Effective parameters of a scenario at squeezing ``r``.

    Direct scenarios (A, C) use ``r1, r2`` for the single pair; the
    ``s`` fields and swap settings are unused.
    """
    sc = Scenario.parse(tag)
    if r < 0:
        raise ValueError(f"squeezing must be >= 0, got {r!r}")
    overrides = dict(overrides or {})
    unknown = set(overrides) - _OVERRIDE_KEYS
    if unknown:
        raise ValueError(f"unknown override(s): {sorted(unknown)}")
    if sc is Scenario.A:
        p = SwapParams(r, r, 0.0, 0.0, g_swap=0.0)
    elif sc is Scenario.B:
        p = SwapParams(r, r, r, r, g_swap=float(np.tanh(2 * r)))
    elif sc is Scenario.C:
        p = SwapParams(r, 0.0, 0.0, 0.0, g_swap=0.0)
    elif sc is Scenario.D:
        p = SwapParams(r, 0.0, r, 0.0, g_swap=float(np.tanh(r)))
    else:
        p = SwapParams(r, 0.0, r, 0.0, g_swap=float(np.tanh(r)), eta_c=E_CURVE_ETA, eta_a=E_CURVE_ETA)
    return replace(p, **overrides)


def run_scenario(tag, r: float, overrides: Optional[Mapping[str, float]] = None) -> FidelityReport:
    sc = Scenario.parse(tag)
    p = scenario_params(sc, r, overrides)
    if sc.swaps:
        return evaluate_swap(p, scenario=sc.value)
    return evaluate_direct(p.r1, p.r2, p.g, p.eta_a, scenario=sc.value)


def auto_swap_gain(r1: float, r2: float, s1: float, s2: float, eta_c: float = 1.0, eta_a: float = 1.0) -> float:
    """Swap gain picked the way the scenarios pick it.

    One squeezer per pair (r2 = s2 = 0, r1 = s1) gets tanh r, the
    unit-efficiency optimum. Symmetric pairs get the efficiency-aware
    closed form. Anything else is optimised numerically.
    """
    if r2 == 0.0 and s2 == 0.0 and r1 == s1:
        return float(np.tanh(r1))
    if r1 == r2 and s1 == s2:
        return float(criteria.optimal_gain(r1, s1, eta_c))
    g, _ = criteria.optimize_gain_numeric(
        lambda gs: float(criteria.fidelity_swap(r1, r2, s1, s2, gs, eta_c, eta_a))
    )
    return g
