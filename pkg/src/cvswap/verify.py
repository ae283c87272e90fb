"""Reproduction checks run by ``cvswap verify``.

Each check returns one or more :class:`CheckResult` lines. Reference
numbers live in ``REFERENCE`` so a harness can tamper with them and
confirm the named check goes red.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from . import criteria as cr
from .protocol import (
    SwapParams,
    entanglement_swap,
    evaluate_swap,
    run_scenario,
    sequential_teleport,
    teleport_coherent,
)
from .sweep import SweepSpec, sweep_rows

REFERENCE = {
    "F_6dB": 0.5201,
    "F_10dB": 0.5425,
    "eta_sq_quoted": 0.99,
    "F_one_squeezer_limit": 1.0 / math.sqrt(2.0),
    "F_swap_two_squeezers_limit": 1.0 / math.sqrt(3.0),
    "threshold_db": 10.0 * math.log10(2.0),
}

SEED = 20240601
RUNTIME_BUDGET_S = 60.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    expected: float
    tol: float
    note: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        s = f"{tag}  {self.name}: measured={self.measured!r} expected={self.expected!r} tol={self.tol:g}"
        return s + (f"  ({self.note})" if self.note else "")


def _close(name, measured, expected, tol, note="") -> CheckResult:
    return CheckResult(name, bool(abs(measured - expected) <= tol), float(measured), float(expected), tol, note)


def _at_most(name, measured, bound, tol=0.0, note="") -> CheckResult:
    return CheckResult(name, bool(measured <= bound + tol), float(measured), float(bound), tol, note)


def random_tuples(n: int, seed: int = SEED, g_swap_zero: bool = False) -> List[SwapParams]:
    """Parameter suite shared by the oracle and no-assistance checks."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        r1, r2, s1, s2 = rng.uniform(0.0, 2.0, 4)
        gs = 0.0 if g_swap_zero else rng.uniform(0.0, 2.0)
        # a third of the draws keep ideal detectors
        eta_c_sq, eta_a_sq = (1.0, 1.0) if rng.random() < 1 / 3 else rng.uniform(0.8, 1.0, 2)
        out.append(SwapParams(r1, r2, s1, s2, g_swap=gs, eta_c=math.sqrt(eta_c_sq), eta_a=math.sqrt(eta_a_sq)))
    return out


def check_quoted_fidelities() -> List[CheckResult]:
    eta = math.sqrt(REFERENCE["eta_sq_quoted"])
    res = []
    for db, key in ((6.0, "F_6dB"), (10.0, "F_10dB")):
        r = cr.db_to_r(db)
        closed = float(cr.optimal_fidelity_single_squeezers(r, eta, eta))
        engine = evaluate_swap(SwapParams(r, 0.0, r, 0.0, g_swap=math.tanh(r), eta_c=eta, eta_a=eta)).fidelity
        res.append(_close(f"{db:g} dB fidelity (closed form)", closed, REFERENCE[key], 5e-4))
        res.append(_close(f"{db:g} dB fidelity (engine)", engine, REFERENCE[key], 5e-4))
    return res


def check_asymptotes() -> List[CheckResult]:
    res = [
        _close("scenario c at r=10", run_scenario("c", 10.0).fidelity, REFERENCE["F_one_squeezer_limit"], 1e-6),
        _close("scenario d at r=10", run_scenario("d", 10.0).fidelity, REFERENCE["F_swap_two_squeezers_limit"], 1e-6),
    ]
    worst = 0.0
    for db in np.arange(0.0, 10.0 + 1e-9, 0.5):
        r = cr.db_to_r(float(db))
        worst = max(worst, abs(run_scenario("b", r).fidelity - 1.0 / (1.0 + 1.0 / math.cosh(2 * r))))
    res.append(_at_most("scenario b equals (1+1/cosh 2r)^-1 on 0-10 dB grid", worst, 0.0, 1e-12, "max deviation"))
    return res


def check_classical_boundary() -> List[CheckResult]:
    grid = np.linspace(0.0, 3.0, 31)
    dev = max(
        np.max(np.abs(cr.optimal_fidelity_two_pair(grid, 0.0) - 0.5)),
        np.max(np.abs(cr.optimal_fidelity_two_pair(0.0, grid) - 0.5)),
    )
    rng = np.random.default_rng(SEED + 1)
    r, s = rng.uniform(0.01, 2.0, (2, 100))
    margin = float(np.min(cr.optimal_fidelity_two_pair(r, s)) - 0.5)
    return [
        _at_most("optimal fidelity is 1/2 when r=0 or s=0", float(dev), 0.0, 1e-12, "max deviation"),
        CheckResult("optimal fidelity > 1/2 for r,s > 0.01 (100 draws)", margin > 0, margin, 0.0, 0.0, "min F - 1/2"),
    ]


def check_oracle_equivalence(n: int = 1000) -> List[CheckResult]:
    worst = 0.0
    for p in random_tuples(n):
        worst = max(worst, abs(evaluate_swap(p).fidelity - cr.fidelity_closed_form(p)))
    return [_at_most(f"engine vs closed-form fidelity ({n} tuples)", worst, 0.0, 1e-10, "max deviation")]


def check_gain_formulas(n: int = 100) -> List[CheckResult]:
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(n):
        r, s = rng.uniform(0.0, 2.0, 2)
        eta_c = math.sqrt(rng.uniform(0.5, 1.0))
        g_num, _ = cr.optimize_gain_numeric(lambda gs: float(cr.fidelity_swap(r, r, s, s, gs, eta_c, 1.0)))
        worst = max(worst, abs(g_num - float(cr.optimal_gain(r, s, eta_c))))
    r = 0.7
    g_sym, _ = cr.optimize_gain_numeric(lambda gs: float(cr.fidelity_swap(r, r, r, r, gs)))
    g_one, _ = cr.optimize_gain_numeric(lambda gs: float(cr.fidelity_swap(r, 0.0, r, 0.0, gs)))
    return [
        _at_most(f"numeric optimum vs closed-form gain ({n} draws)", worst, 0.0, 1e-6, "max deviation"),
        _close("equal squeezing optimum is tanh 2r (r=0.7)", g_sym, math.tanh(2 * r), 1e-6),
        _close("one squeezer per pair optimum is tanh r (r=0.7)", g_one, math.tanh(r), 1e-6),
    ]


def _expected_bob_x(p: SwapParams) -> dict:
    g = p.g_swap
    k = 1.0 / math.sqrt(2.0)
    return {
        "x0_1": g * k * math.exp(p.r1),
        "x0_2": -g * k * math.exp(-p.r2),
        "x0_3": -(g - 1) * k * math.exp(p.s1),
        "x0_4": -(g + 1) * k * math.exp(-p.s2),
    }


def _expected_bob_p(p: SwapParams) -> dict:
    g = p.g_swap
    k = 1.0 / math.sqrt(2.0)
    return {
        "p0_1": g * k * math.exp(-p.r1),
        "p0_2": -g * k * math.exp(p.r2),
        "p0_3": (g + 1) * k * math.exp(-p.s1),
        "p0_4": (g - 1) * k * math.exp(p.s2),
    }


def _expected_tel(p: SwapParams) -> tuple:
    g = p.g_swap
    k = 1.0 / math.sqrt(2.0)
    x = {
        "x_in": 1.0,
        "x0_in": 1.0,
        "x0_1": (g - 1) * k * math.exp(p.r1),
        "x0_2": -(g + 1) * k * math.exp(-p.r2),
        "x0_3": -(g - 1) * k * math.exp(p.s1),
        "x0_4": -(g + 1) * k * math.exp(-p.s2),
    }
    pp = {
        "p_in": 1.0,
        "p0_in": 1.0,
        "p0_1": (g + 1) * k * math.exp(-p.r1),
        "p0_2": -(g - 1) * k * math.exp(p.r2),
        "p0_3": (g + 1) * k * math.exp(-p.s1),
        "p0_4": (g - 1) * k * math.exp(p.s2),
    }
    # two noise terms per detector pair, each of variance 1/4
    noise_var = 0.25 * 2 * (g**2 * (p.eta_c**-2 - 1) + p.eta_a**-2 - 1)
    return x, pp, noise_var


def _split(coeffs: dict):
    noise = {k: v for k, v in coeffs.items() if "det_" in k}
    rest = {k: v for k, v in coeffs.items() if "det_" not in k}
    return rest, 0.25 * sum(v * v for v in noise.values())


def _max_dev(a: dict, b: dict) -> float:
    return max(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))


def check_symbolic_regression(n: int = 50) -> List[CheckResult]:
    rng = np.random.default_rng(SEED + 3)
    dev5 = dev6 = devn = 0.0
    for _ in range(n):
        r1, r2, s1, s2 = rng.uniform(0.0, 2.0, 4)
        eta_c, eta_a = np.sqrt(rng.uniform(0.8, 1.0, 2))
        ideal = SwapParams(r1, r2, s1, s2, g_swap=rng.uniform(0, 2))
        out = entanglement_swap(ideal)
        reg, bob = out.register, out.register.mode(out.bob_mode)
        dev5 = max(dev5, _max_dev(reg.labelled(bob.x), _expected_bob_x(ideal)))
        dev5 = max(dev5, _max_dev(reg.labelled(bob.p), _expected_bob_p(ideal)))

        noisy = SwapParams(r1, r2, s1, s2, g_swap=ideal.g_swap, eta_c=float(eta_c), eta_a=float(eta_a))
        tel = teleport_coherent(entanglement_swap(noisy), 1.0, noisy.eta_a)
        ex, ep, noise_var = _expected_tel(noisy)
        for expr, want in ((tel.x_tel, ex), (tel.p_tel, ep)):
            rest, nv = _split(tel.register.labelled(expr))
            dev6 = max(dev6, _max_dev(rest, want))
            devn = max(devn, abs(nv - noise_var))
    return [
        _at_most("Bob's swapped mode coefficients", dev5, 0.0, 1e-12, "max deviation"),
        _at_most("teleported mode coefficients", dev6, 0.0, 1e-12, "max deviation"),
        _at_most("detector-noise variance", devn, 0.0, 1e-12, "max deviation"),
    ]


def check_unit_gain_threshold() -> List[CheckResult]:
    worst = 0.0
    for r in np.linspace(0.0, 2.0, 41):
        out = entanglement_swap(SwapParams.symmetric(float(r), g_swap=1.0))
        worst = max(worst, abs(cr.duan_sum(out.register, out.alice_mode, out.bob_mode) - 2 * math.exp(-2 * r)))
    r_star = cr.db_to_r(REFERENCE["threshold_db"])
    res = [_at_most("unit-gain duan sum = 2 e^{-2r}", worst, 0.0, 1e-12, "max deviation")]

    def witnesses(r):
        o = entanglement_swap(SwapParams.symmetric(r, g_swap=1.0))
        return cr.duan_sum(o.register, o.alice_mode, o.bob_mode), cr.tan_product(o.register, o.alice_mode, o.bob_mode)

    d0, t0 = witnesses(r_star)
    lo, hi = witnesses(r_star - 1e-3), witnesses(r_star + 1e-3)
    res.append(_close("duan sum at 10 log10 2 dB", d0, 1.0, 1e-12))
    res.append(_close("tan product at 10 log10 2 dB", t0, 1.0 / 16.0, 1e-12))
    crossing = lo[0] > 1 > hi[0] and lo[1] > 1 / 16 > hi[1]
    res.append(CheckResult("both witnesses cross at the same squeezing", crossing, hi[0], 1.0, 0.0, "duan just above threshold"))
    return res


def check_inseparability_grid() -> List[CheckResult]:
    grid = np.round(np.arange(0.05, 1.5 + 1e-9, 0.05), 10)
    worst_in = 0.0
    for r in grid:
        for s in grid:
            gs = float(cr.optimal_gain(r, s))
            o = entanglement_swap(SwapParams.symmetric(float(r), float(s), g_swap=gs))
            worst_in = max(worst_in, cr.duan_sum(o.register, o.alice_mode, o.bob_mode))
    worst_edge = math.inf
    for r in np.concatenate([[0.0], grid]):
        for r_, s_ in ((float(r), 0.0), (0.0, float(r))):
            gs = float(cr.optimal_gain(r_, s_))
            o = entanglement_swap(SwapParams.symmetric(r_, s_, g_swap=gs))
            worst_edge = min(worst_edge, cr.duan_sum(o.register, o.alice_mode, o.bob_mode))
    return [
        CheckResult("duan sum < 1 for r,s in 0.05..1.5", worst_in < 1.0, worst_in, 1.0, 0.0, "largest value"),
        CheckResult("duan sum >= 1 when r=0 or s=0", worst_edge >= 1.0 - 1e-12, worst_edge, 1.0, 1e-12, "smallest value"),
    ]


def check_no_assistance(n: int = 1000) -> List[CheckResult]:
    worst_engine = worst_closed = 0.0
    for p in random_tuples(n, seed=SEED + 4, g_swap_zero=True):
        worst_engine = max(worst_engine, evaluate_swap(p).fidelity)
        worst_closed = max(worst_closed, cr.fidelity_closed_form(p))
    return [
        _at_most(f"g_swap=0 engine fidelity <= 1/2 ({n} tuples)", worst_engine, 0.5, 1e-12),
        _at_most(f"g_swap=0 closed-form fidelity <= 1/2 ({n} tuples)", worst_closed, 0.5, 1e-12),
    ]


def check_two_stage(n: int = 50) -> List[CheckResult]:
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for i in range(n):
        r1, r2, s1, s2 = rng.uniform(0.0, 2.0, 4)
        eta_c, eta_a = (1.0, 1.0) if i % 2 == 0 else tuple(np.sqrt(rng.uniform(0.8, 1.0, 2)))
        p = SwapParams(r1, r2, s1, s2, g_swap=1.0, eta_c=float(eta_c), eta_a=float(eta_a))
        a = teleport_coherent(entanglement_swap(p), 1.0, p.eta_a)
        b = sequential_teleport(p)
        for ea, eb in ((a.x_tel, b.x_tel), (a.p_tel, b.p_tel)):
            worst = max(worst, _max_dev(a.register.labelled(ea), b.register.labelled(eb)))
    return [_at_most("swap+teleport equals two unit-gain hops", worst, 0.0, 1e-12, "max deviation")]


def check_sweep_ordering() -> List[CheckResult]:
    rows = sweep_rows(SweepSpec())
    f = {(row["scenario"], row["db"]): row["fidelity_engine"] for row in rows}
    dbs = sorted({row["db"] for row in rows})
    tol = 1e-12
    order_ok = all(
        f["a", d] >= f["b", d] - tol and f["c", d] >= f["d", d] - tol and f["d", d] >= f["e", d] - tol
        for d in dbs
    )
    floor_ok = all(f[s, d] >= 0.5 - tol for s in "abcd" for d in dbs)
    strict_ok = all(f[s, d] > 0.5 for s in "abcd" for d in dbs if d > 0)
    e_below = [d for d in dbs if f["e", d] <= 0.5]
    note = f"e-curve <= 1/2 at dB {e_below}" if e_below else "e-curve above 1/2 everywhere"
    return [
        CheckResult("sweep has 105 rows", len(rows) == 105, len(rows), 105, 0.0),
        CheckResult("ordering a>=b, c>=d>=e at every dB", order_ok, float(order_ok), 1.0, tol),
        CheckResult("curves a-d >= 1/2, > 1/2 above 0 dB", floor_ok and strict_ok, float(floor_ok and strict_ok), 1.0, tol, note),
    ]


CHECKS: List[Callable[[], List[CheckResult]]] = [
    check_quoted_fidelities,
    check_asymptotes,
    check_classical_boundary,
    check_oracle_equivalence,
    check_gain_formulas,
    check_symbolic_regression,
    check_unit_gain_threshold,
    check_inseparability_grid,
    check_no_assistance,
    check_two_stage,
    check_sweep_ordering,
]


def run_all(echo: Optional[Callable[[str], None]] = print) -> List[CheckResult]:
    t0 = time.perf_counter()
    results: List[CheckResult] = []
    for check in CHECKS:
        for res in check():
            results.append(res)
            if echo:
                echo(res.line())
    elapsed = time.perf_counter() - t0
    timing = _at_most("verify runtime [s]", elapsed, RUNTIME_BUDGET_S)
    results.append(timing)
    if echo:
        echo(timing.line())
    return results
