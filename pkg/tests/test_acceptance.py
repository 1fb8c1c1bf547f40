"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""
import json
import math
import random
import time
from dataclasses import replace
from fractions import Fraction
from itertools import product

import numpy as np

from conftest import theta_1d_oracle
from tubetheta import cli, scenario
from tubetheta.jordan import DirectSum, HermComplex, RealLine, SpinFactor, SymReal
from tubetheta.lattice import (
    Lattice,
    dual_lattice,
    enumerate_ellipsoid,
    exact_inverse,
    is_integral,
    mat_mul,
    mat_t,
    period_lattice,
)
from tubetheta.representation import natural_representation, normalize_basepoint
from tubetheta.theta import fourier_coefficient, theta_eval
from tubetheta.verify import (
    check_c_lambda,
    check_full_transformation,
    check_jordan_axioms,
    check_jordan_hom,
    check_linear_pair,
    check_partial_transformation,
    check_periodicity_u,
    check_periodicity_z,
    check_quasiperiodicity,
    check_square_completion,
    gaussian_integral_check,
    induced_map,
    integer_pairs,
    scaling_pair,
)

SCENARIOS = [name for name, _ in scenario.list_scenarios()]


def load(name):
    return scenario.load_scenario(scenario.resolve_scenario(name))


def seeded_points(sc, count, seed):
    return scenario.random_points(sc.rep, count, np.random.default_rng([seed, 7]))


def normalized(sc):
    if sc.rep.is_normalized:
        return sc.rep, sc.lattice
    return normalize_basepoint(sc.rep, sc.lattice)


def report(number, title, ok, detail):
    print(f"\ncriterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
    assert ok, detail


def test_criterion_1_classical():
    t0 = time.perf_counter()
    rep, lat = natural_representation(RealLine()), Lattice.standard(1)
    value = theta_eval(rep, lat, [1j], [0.0], 1e-12).value
    oracle = sum(math.exp(-math.pi * k * k) for k in range(-8, 9))
    err = abs(value - oracle)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10):
        z = complex(rng.uniform(-1, 1), rng.uniform(0.5, 3))
        u = complex(rng.uniform(-1, 1), rng.uniform(-0.2, 0.2))
        c = check_full_transformation(rep, lat, [z], [u], tolerance=1e-10)
        worst = max(worst, c.residual if c.passed else math.inf)
        # closed form on both sides, summed directly
        lhs = theta_1d_oracle(-1 / z, u / z, terms=80)
        rhs = (-1j * z) ** 0.5 * np.exp(1j * math.pi * u * u / z) * theta_1d_oracle(z, u)
        worst = max(worst, abs(c.lhs - lhs) / max(1, abs(lhs)), abs(c.rhs - rhs) / max(1, abs(rhs)))
    secs = time.perf_counter() - t0
    ok = abs(value.real - 1.0864348112) <= 1e-9 and err <= 1e-9 and worst <= 1e-10 and secs < 1
    report(1, "classical reproduction", ok,
           f"theta(i,0)={value.real:.12f} |err|={err:.1e}, transformation max residual {worst:.1e}, {secs:.2f}s")


def test_criterion_2_identity_suite():
    t0 = time.perf_counter()
    worst, count, failures = 0.0, 0, []
    for name in SCENARIOS:
        sc = load(name)
        rep, lat = sc.rep, sc.lattice
        rng = np.random.default_rng([sc.seed, 2])
        dual = dual_lattice(lat, rep.rho)
        pl = period_lattice(rep, lat)
        for z, u in seeded_points(sc, 20, sc.seed):
            n = rep.dim_U
            checks = [
                check_periodicity_u(rep, lat, z, u, lat.basis @ rng.integers(-2, 3, n), 1e-9),
                check_quasiperiodicity(rep, lat, z, u, dual.basis @ rng.integers(-1, 2, n), 1e-9),
                check_periodicity_z(rep, lat, z, u, pl.float_basis @ rng.integers(-2, 3, pl.float_basis.shape[1]),
                                    1e-9, pl),
            ]
            for c in checks:
                count += 1
                worst = max(worst, c.residual)
                if not c.passed:
                    failures.append((name, c.tag, c.residual))
    secs = time.perf_counter() - t0
    ok = not failures and secs < 60
    report(2, "identity suite theta1/theta2/theta3", ok,
           f"{count} checks over {len(SCENARIOS)} scenarios, max residual {worst:.1e}, "
           f"{len(failures)} failures, {secs:.1f}s")


def test_criterion_3_linear_substitution():
    worst_s, worst_t, failures, pairs_run = 0.0, 0.0, [], 0
    for name in SCENARIOS:
        sc = load(name)
        rep, lat = sc.rep, sc.lattice
        samples = seeded_points(sc, 2, sc.seed + 3)
        pairs = [(induced_map(rep, Wh)[0], Wh) for Wh in integer_pairs(rep, 5)]
        if len(pairs) < 5:
            failures.append((name, "fewer than 5 integer pairs"))
        pairs += [scaling_pair(rep, t) for t in (2, 3)]
        for j, (W, Wh) in enumerate(pairs):
            pairs_run += 1
            for c in check_linear_pair(rep, lat, W, Wh, samples, seed=j):
                if c.tag == "linearSiegel":
                    worst_s = max(worst_s, c.residual)
                    if c.residual > 1e-12:
                        failures.append((name, c.tag, c.residual))
                elif c.tag == "lineartheta":
                    worst_t = max(worst_t, c.residual)
                    if not c.passed or c.residual > 1e-9:
                        failures.append((name, c.tag, c.residual))
                elif not c.passed:
                    failures.append((name, c.tag, c.residual))
    report(3, "linear substitution", not failures,
           f"{pairs_run} pairs, linearSiegel max {worst_s:.1e}, lineartheta max {worst_t:.1e}, failures {failures[:3]}")


def test_criterion_4_partial_formula():
    worst, failures, lattices = 0.0, [], set()
    for name in SCENARIOS:
        sc = load(name)
        lattices.add(json.dumps(sc.lattice.to_dict(), sort_keys=True))
        for z, u in seeded_points(sc, 5, sc.seed + 4):
            c = check_partial_transformation(sc.rep, sc.lattice, z, u, 1e-8)
            worst = max(worst, c.residual)
            if not c.passed:
                failures.append((name, c.residual))
    names = set(SCENARIOS)
    covered = {"classical_2z", "siegel2_2z", "siegel2_sheared"} <= names
    report(4, "partial transformation formula", not failures and covered,
           f"{len(SCENARIOS)} scenarios incl. 2Z, 2Z^2 and sheared Z^2, max residual {worst:.1e}")


def test_criterion_5_full_formula_constants():
    spreads, products, failures = {}, {}, []
    for name in SCENARIOS:
        sc = load(name)
        rep, lat = normalized(sc)
        samples = seeded_points(replace(sc, rep=rep), 5, sc.seed + 5)
        spread, cov = check_c_lambda(rep, lat, samples, tolerance=1e-8)
        spreads[name] = spread.residual
        products[name] = cov.residual
        if not spread.passed:
            failures.append((name, "spread", spread.residual))
        if not cov.passed:
            failures.append((name, "c*C", cov.residual))
    families = {"Z^n": ["classical", "siegel2", "hermitian", "spin", "directsum"],
                "2Z^n": ["classical_2z", "siegel2_2z"], "sheared Z^2": ["siegel2_sheared"]}
    covered = all(n in products for group in families.values() for n in group)
    report(5, "full formula and constants", not failures and covered,
           f"max spread {max(spreads.values()):.1e}, max |c*C-1| {max(products.values()):.1e}")


KINDS = [RealLine(), SymReal(2), SymReal(3), HermComplex(2), SpinFactor(3), SpinFactor(5),
         DirectSum(RealLine(), SymReal(2))]


def test_criterion_6_jordan_structure():
    worst_hom, worst_ax, failures = 0.0, 0.0, []
    for desc in KINDS:
        rep = natural_representation(desc)
        rng = np.random.default_rng(6)
        samples = list(rng.standard_normal((1000, desc.dim)))
        hom = check_jordan_hom(rep, samples, 1e-11)
        ax = check_jordan_axioms(desc, samples, 1e-12)
        worst_hom = max([worst_hom] + [c.residual for c in hom])
        worst_ax = max([worst_ax] + [c.residual for c in ax])
        if len(hom) < 1900:
            failures.append((str(desc), "too few invertible samples", len(hom)))
        failures += [(str(desc), c.tag, c.residual) for c in hom + ax if not c.passed]
    report(6, "Jordan structure", not failures,
           f"{len(KINDS)} kinds x 1000 samples, hom/inverse max {worst_hom:.1e}, axioms max {worst_ax:.1e}")


def _random_lattice(rng, n):
    while True:
        rows = [[Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
        try:
            return Lattice.from_rows([[str(x) for x in r] for r in rows])
        except Exception:
            continue


def _brute_force(gram, bound):
    n = gram.shape[0]
    r = [int(math.floor(math.sqrt(bound * np.linalg.inv(gram)[i, i]))) for i in range(n)]
    pts = []
    for k in product(*[range(-ri, ri + 1) for ri in r]):
        k = np.array(k)
        if k @ gram @ k <= bound:
            pts.append(tuple(k))
    return set(pts)


def test_criterion_7_lattice_exactness():
    rng = random.Random(7)
    problems = []
    for i in range(100):
        n = 1 + i % 4
        lat = _random_lattice(rng, n)
        dual = dual_lattice(lat)
        if not dual_lattice(dual).same_as(lat) or dual_lattice(dual).canonical_basis() != lat.canonical_basis():
            problems.append(("involution", i))
        pairing = mat_mul(mat_t(dual.exact_basis), lat.exact_basis)
        if not is_integral(pairing) or not is_integral(exact_inverse(pairing)):
            problems.append(("pairing", i))
    rep = natural_representation(SymReal(2))
    pl = period_lattice(rep, Lattice.standard(2))
    expected = Lattice.from_rows([[2, 0, 0], [0, 0, 2], [0, 1, 0]])
    if pl.rank != 3 or Lattice.from_rows(pl.vectors).canonical_basis() != expected.canonical_basis():
        problems.append(("period lattice", pl.to_dict()))
    grams = [np.array([[2.0, 1.0], [1.0, 2.0]]), np.eye(3), np.array([[3.0, 1, 0, 0], [1, 2, 0.5, 0], [0, 0.5, 2, 1], [0, 0, 1, 3]])]
    nrng = np.random.default_rng(7)
    for n in (1, 2, 3, 4):
        A = nrng.standard_normal((n, n)) + 2 * np.eye(n)
        grams.append(np.round(8 * (A.T @ A + np.eye(n))) / 8)  # dyadic entries keep the Gram exact
    checked = 0
    for G in grams:
        lat = Lattice.standard(G.shape[0])
        for bound in (1, 5, 20):
            got = {tuple(k) for k in enumerate_ellipsoid(lat, Q=G, bound=bound).coeffs.astype(int)}
            checked += 1
            if got != _brute_force(G, bound):
                problems.append(("enumeration", G.shape[0], bound))
    report(7, "lattice exactness", not problems,
           f"100 random lattices exact, period lattice exact, {checked} enumerations match brute force; {problems[:3]}")


def test_criterion_8_analysis_identities():
    problems = []
    r1 = natural_representation(RealLine())
    s2 = natural_representation(SymReal(2))
    g = [gaussian_integral_check(r1, [complex(x, y)], [w]) for x, y, w in ((0, 1, 0), (0.3, 2, 5), (-1, 0.7, 0.2 + 0.1j))]
    g2 = [gaussian_integral_check(s2, z, w) for z, w in (
        (1j * np.array([1, 0, 1]), [0, 0]), (np.array([0.2 + 1j, 0.1 + 0.2j, -0.3 + 0.8j]), [0.3, -0.1]))]
    worst_g1 = max(c.residual for c in g)
    worst_g2 = max(c.residual for c in g2)
    if worst_g1 > 1e-8 or worst_g2 > 1e-6:
        problems.append("gaussian")
    rng = np.random.default_rng(8)
    worst_sq = 0.0
    for _ in range(200):
        A = rng.standard_normal((2, 2))
        Y = A @ A.T + 0.05 * np.eye(2)
        c = check_square_completion(s2, [Y[0, 0], Y[0, 1], Y[1, 1]], rng.standard_normal(2), rng.standard_normal(2))
        worst_sq = max(worst_sq, c.residual)
    if worst_sq > 1e-12:
        problems.append("inverseid")
    worst_f = 0.0
    cases = [(r1, Lattice.standard(1), [0.1 + 1j]), (r1, Lattice.standard(1, 2), [0.2 + 0.8j]),
             (s2, Lattice.standard(2), np.array([0.2 + 1j, 0.1 + 0.2j, -0.1 + 0.8j])),
             (s2, Lattice.from_rows([[1, 0], ["1/2", 1]]), np.array([0.1 + 1.2j, 0.3j, 1.0j]))]
    for rep, lat, z in cases:
        D = dual_lattice(lat, rep.rho).basis
        for k in product(range(-3, 4), repeat=rep.dim_U):
            l = D @ np.array(k, float)
            expected = np.exp(1j * math.pi * ((rep.psi(z) @ l) @ rep.rho @ l))
            worst_f = max(worst_f, abs(fourier_coefficient(rep, lat, z, l) - expected))
    if worst_f > 1e-6:
        problems.append("fourier")
    report(8, "analysis identities", not problems,
           f"gaussian dim1 {worst_g1:.1e} dim2 {worst_g2:.1e}, square completion {worst_sq:.1e}, fourier {worst_f:.1e}")


def test_criterion_9_certification(tmp_path):
    worst, failures = 0.0, []
    for name in SCENARIOS:
        sc = load(name)
        for z, u in sc.points:
            for tol in (1e-4, 1e-8, 1e-12):
                a = theta_eval(sc.rep, sc.lattice, z, u, tol).value
                b = theta_eval(sc.rep, sc.lattice, z, u, tol / 100).value
                worst = max(worst, abs(a - b) / tol)
                if abs(a - b) > tol:
                    failures.append((name, tol))
    outs = []
    for run in range(2):
        out = tmp_path / f"report{run}.json"
        code = cli.main(["verify", "--scenario", "siegel2_sheared", "--scenario", "classical_2z",
                         "--seed", "11", "--jobs", str(1 + 2 * run), "--out", str(out)])
        outs.append((code, out.read_bytes()))
    reproducible = outs[0] == outs[1] and outs[0][0] == 0
    report(9, "certification", not failures and reproducible,
           f"max |theta(tol)-theta(tol/100)|/tol = {worst:.2e} over all scenarios, reports identical: {reproducible}")
