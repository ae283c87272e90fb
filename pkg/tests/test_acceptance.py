"""Exit criteria, one test per criterion, at the stated tolerances.

Each test records a PASS/FAIL line that is printed in the terminal
summary under "acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

from cvswap import cli
from cvswap import criteria as cr
from cvswap.protocol import (
    SwapParams,
    entanglement_swap,
    evaluate_swap,
    run_scenario,
    sequential_teleport,
    teleport_coherent,
)
from cvswap.sweep import SweepSpec, sweep_rows

import oracles

ETA99 = math.sqrt(0.99)


def _suite(n, seed, g_swap=None):
    rng = np.random.default_rng(seed)
    for i in range(n):
        r1, r2, s1, s2 = rng.uniform(0, 2, 4)
        gs = rng.uniform(0, 2) if g_swap is None else g_swap
        ec2, ea2 = (1.0, 1.0) if i % 3 == 0 else rng.uniform(0.8, 1.0, 2)
        yield SwapParams(r1, r2, s1, s2, g_swap=gs, eta_c=math.sqrt(ec2), eta_a=math.sqrt(ea2))


@pytest.mark.parametrize("db, quoted", [(6.0, 0.5201), (10.0, 0.5425)])
def test_c01_c02_quoted_fidelities(criterion, db, quoted):
    r = cr.db_to_r(db)
    closed = float(cr.optimal_fidelity_single_squeezers(r, ETA99, ETA99))
    engine = evaluate_swap(SwapParams(r, 0, r, 0, g_swap=math.tanh(r), eta_c=ETA99, eta_a=ETA99)).fidelity
    ok = abs(closed - quoted) <= 5e-4 and abs(engine - quoted) <= 5e-4
    assert criterion(f"{db:g} dB reproduction (closed form, engine={engine:.6f})", ok, closed, quoted, 5e-4)


def test_c03_asymptotes(criterion):
    fc = run_scenario("c", 10.0).fidelity
    fd = run_scenario("d", 10.0).fidelity
    worst_b = 0.0
    for db in np.arange(0, 10.0001, 0.5):
        r = cr.db_to_r(float(db))
        worst_b = max(worst_b, abs(run_scenario("b", r).fidelity - 1 / (1 + 1 / math.cosh(2 * r))))
    ok_c = criterion("scenario c at r=10 -> 1/sqrt2", abs(fc - 1 / math.sqrt(2)) <= 1e-6, fc, 1 / math.sqrt(2), 1e-6)
    ok_d = criterion("scenario d at r=10 -> 1/sqrt3", abs(fd - 1 / math.sqrt(3)) <= 1e-6, fd, 1 / math.sqrt(3), 1e-6)
    ok_b = criterion("scenario b vs (1+1/cosh 2r)^-1, max dev", worst_b <= 1e-12, worst_b, 0.0, 1e-12)
    assert ok_c and ok_d and ok_b


def test_c04_classical_boundary(criterion):
    grid = np.linspace(0, 3, 61)
    edge = max(np.max(np.abs(cr.optimal_fidelity_two_pair(grid, 0.0) - 0.5)),
               np.max(np.abs(cr.optimal_fidelity_two_pair(0.0, grid) - 0.5)))
    rng = np.random.default_rng(4)
    r, s = rng.uniform(0.01, 3.0, (2, 100))
    margin = float(np.min(cr.optimal_fidelity_two_pair(r, s) - 0.5))
    ok1 = criterion("optimal fidelity = 1/2 at r=0 or s=0, max dev", edge <= 1e-12, float(edge), 0.0, 1e-12)
    ok2 = criterion("optimal fidelity > 1/2 for 100 pairs r,s>0.01, min margin", margin > 0, margin, 0.0, 0)
    assert ok1 and ok2


def test_c05_oracle_equivalence(criterion):
    worst = max(abs(evaluate_swap(p).fidelity - cr.fidelity_closed_form(p)) for p in _suite(1000, 5))
    assert criterion("engine vs closed form, 1000 tuples, max dev", worst <= 1e-10, worst, 0.0, 1e-10)


def test_c06_gain_formulas(criterion):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        r, s = rng.uniform(0, 2, 2)
        eta_c = math.sqrt(rng.uniform(0.5, 1.0))
        g, _ = cr.optimize_gain_numeric(lambda x: float(cr.fidelity_swap(r, r, s, s, x, eta_c, 1.0)))
        worst = max(worst, abs(g - float(cr.optimal_gain(r, s, eta_c))))
    r = 0.9
    g2r, _ = cr.optimize_gain_numeric(lambda x: float(cr.fidelity_swap(r, r, r, r, x)))
    gr, _ = cr.optimize_gain_numeric(lambda x: float(cr.fidelity_swap(r, 0, r, 0, x)))
    ok = criterion("golden search vs optimal-gain formula, 100 draws, max dev", worst <= 1e-6, worst, 0.0, 1e-6)
    ok &= criterion("equal squeezing -> tanh 2r", abs(g2r - math.tanh(2 * r)) <= 1e-6, g2r, math.tanh(2 * r), 1e-6)
    ok &= criterion("one squeezer per pair -> tanh r", abs(gr - math.tanh(r)) <= 1e-6, gr, math.tanh(r), 1e-6)
    assert ok


def test_c07_symbolic_regression(criterion):
    rng = np.random.default_rng(7)
    dev_bob = dev_tel = dev_noise = 0.0
    k = 1 / math.sqrt(2)
    for _ in range(100):
        r1, r2, s1, s2 = rng.uniform(0, 2, 4)
        g = rng.uniform(0, 2)
        ec, ea = np.sqrt(rng.uniform(0.8, 1.0, 2))
        out = entanglement_swap(SwapParams(r1, r2, s1, s2, g_swap=g))
        reg = out.register
        _, _, x4, p4 = oracles.swapped_rows(r1, r2, s1, s2, g)
        bob = reg.mode(out.bob_mode)
        lx, lp = reg.labelled(bob.x), reg.labelled(bob.p)
        dev_bob = max(dev_bob, *(abs(lx.get(f"x0_{i + 1}", 0) - x4[i]) for i in range(4)))
        dev_bob = max(dev_bob, *(abs(lp.get(f"p0_{i + 1}", 0) - p4[i]) for i in range(4)))

        p = SwapParams(r1, r2, s1, s2, g_swap=g, eta_c=float(ec), eta_a=float(ea))
        tel = teleport_coherent(entanglement_swap(p), 1.0, p.eta_a)
        want_x = {"x_in": 1, "x0_in": 1,
                  "x0_1": (g - 1) * k * math.exp(r1), "x0_2": -(g + 1) * k * math.exp(-r2),
                  "x0_3": -(g - 1) * k * math.exp(s1), "x0_4": -(g + 1) * k * math.exp(-s2)}
        want_p = {"p_in": 1, "p0_in": 1,
                  "p0_1": (g + 1) * k * math.exp(-r1), "p0_2": -(g - 1) * k * math.exp(r2),
                  "p0_3": (g + 1) * k * math.exp(-s1), "p0_4": (g - 1) * k * math.exp(s2)}
        # printed noise: g sqrt(eta_c^-2-1)(d+e) + sqrt(eta_a^-2-1)(f+g), four vacua of variance 1/4
        want_noise = 0.25 * (2 * g**2 * (ec**-2 - 1) + 2 * (ea**-2 - 1))
        for expr, want in ((tel.x_tel, want_x), (tel.p_tel, want_p)):
            lab = tel.register.labelled(expr)
            noise = {kk: v for kk, v in lab.items() if "det_" in kk}
            rest = {kk: v for kk, v in lab.items() if "det_" not in kk}
            dev_tel = max(dev_tel, *(abs(rest.get(kk, 0) - want.get(kk, 0)) for kk in set(rest) | set(want)))
            dev_noise = max(dev_noise, abs(0.25 * sum(v * v for v in noise.values()) - want_noise))
    ok = criterion("Bob's swapped mode vs transcribed coefficients", dev_bob <= 1e-12, dev_bob, 0.0, 1e-12)
    ok &= criterion("teleported mode vs transcribed coefficients", dev_tel <= 1e-12, dev_tel, 0.0, 1e-12)
    ok &= criterion("detector-noise variance", dev_noise <= 1e-12, dev_noise, 0.0, 1e-12)
    assert ok


def _witnesses(r):
    o = entanglement_swap(SwapParams.symmetric(r, g_swap=1.0))
    return cr.duan_sum(o.register, o.alice_mode, o.bob_mode), cr.tan_product(o.register, o.alice_mode, o.bob_mode)


def test_c08_unit_gain_threshold(criterion):
    worst = max(abs(_witnesses(float(r))[0] - 2 * math.exp(-2 * r)) for r in np.linspace(0, 2, 81))
    r_star = cr.db_to_r(10 * math.log10(2))
    d, t = _witnesses(r_star)
    below, above = _witnesses(r_star - 1e-4), _witnesses(r_star + 1e-4)
    ok = criterion("unit-gain duan sum vs 2e^{-2r}, max dev", worst <= 1e-12, worst, 0.0, 1e-12)
    ok &= criterion("duan sum at 3.0103 dB", abs(d - 1) <= 1e-12, d, 1.0, 1e-12)
    ok &= criterion("tan product at 3.0103 dB", abs(t - 1 / 16) <= 1e-12, t, 1 / 16, 1e-12)
    crossing = below[0] > 1 > above[0] and below[1] > 1 / 16 > above[1]
    ok &= criterion("both witnesses change side across 3.0103 dB", crossing, above[0], 1.0, 0)
    assert ok


def test_c09_inseparable_for_any_squeezing(criterion):
    grid = [round(0.05 * i, 10) for i in range(1, 31)]
    largest = 0.0
    for r in grid:
        for s in grid:
            o = entanglement_swap(SwapParams.symmetric(r, s, g_swap=float(cr.optimal_gain(r, s))))
            largest = max(largest, cr.duan_sum(o.register, o.alice_mode, o.bob_mode))
    smallest = math.inf
    for r in [0.0] + grid:
        for a, b in ((r, 0.0), (0.0, r)):
            o = entanglement_swap(SwapParams.symmetric(a, b, g_swap=float(cr.optimal_gain(a, b))))
            smallest = min(smallest, cr.duan_sum(o.register, o.alice_mode, o.bob_mode))
    ok = criterion("optimal-gain duan sum < 1 on r,s in 0.05..1.5", largest < 1, largest, 1.0, 0)
    ok &= criterion("duan sum >= 1 when r=0 or s=0", smallest >= 1 - 1e-12, smallest, 1.0, 1e-12)
    assert ok


def test_c10_no_assistance(criterion):
    worst = max(evaluate_swap(p).fidelity for p in _suite(1000, 10, g_swap=0.0))
    assert criterion("max fidelity at g_swap=0, 1000 tuples", worst <= 0.5 + 1e-12, worst, 0.5, 1e-12)


def test_c11_two_stage_equivalence(criterion):
    worst = 0.0
    for p in _suite(100, 11, g_swap=1.0):
        a = teleport_coherent(entanglement_swap(p), 1.0, p.eta_a)
        b = sequential_teleport(p)
        for ea, eb in ((a.x_tel, b.x_tel), (a.p_tel, b.p_tel)):
            la, lb = a.register.labelled(ea), b.register.labelled(eb)
            worst = max(worst, *(abs(la.get(k, 0) - lb.get(k, 0)) for k in set(la) | set(lb)))
    assert criterion("swap+teleport vs two unit-gain hops, max dev", worst <= 1e-12, worst, 0.0, 1e-12)


def test_c12_end_to_end(criterion, capsys):
    t0 = time.perf_counter()
    code = cli.main(["verify"])
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    ok = criterion("verify exits 0", code == 0, code, 0, 0)
    ok &= criterion("verify runtime [s]", elapsed < 60, elapsed, 60.0, 0)

    rows = sweep_rows(SweepSpec(scenarios="abcde", db_min=0, db_max=10, db_step=0.5))
    f = {(row["scenario"], row["db"]): row["fidelity_engine"] for row in rows}
    dbs = sorted({row["db"] for row in rows})
    tol = 1e-12
    order = all(f["a", d] >= f["b", d] - tol and f["c", d] >= f["d", d] - tol >= f["e", d] - 2 * tol for d in dbs)
    floor = all(f[s, d] >= 0.5 - tol for s in "abcd" for d in dbs)
    strict = all(f[s, d] > 0.5 for s in "abcd" for d in dbs if d > 0)
    e_low = [d for d in dbs if f["e", d] <= 0.5]
    ok &= criterion("sweep rows", len(rows) == 105, len(rows), 105, 0)
    ok &= criterion("ordering a>=b, c>=d>=e", order, order, True, tol)
    ok &= criterion("curves a-d >= 1/2 and > 1/2 above 0 dB", floor and strict, floor and strict, True, tol)
    # recorded only: detector loss keeps the e-curve at or below 1/2 at low squeezing
    criterion(f"e-curve <= 1/2 at dB {e_low} (recorded)", True, len(e_low), len(e_low), 0)
    assert ok
