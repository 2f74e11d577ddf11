"""Acceptance suite: one test per criterion, run at the stated tolerances.

Each test records its measured margin via ``record_property("measured", ...)``;
the conftest prints one pass/fail line per criterion at the end of the run.
"""

import math
from pathlib import Path

import numpy as np

from cohomolab import analysis as an
from cohomolab import lab
from cohomolab.cochain import codifferential
from cohomolab.complex import PRESET_NAMES, complex_preset, from_file
from cohomolab.presentation import preset
from cohomolab.rep import (
    DeformationSpec,
    Representation,
    character_rep,
    circle_discretization,
    circle_mode_flatten,
    deformation_distance,
    direct_sum,
    random_deformation,
    random_unitary_rep,
    trivial_rep,
)

DATA = Path(__file__).parent / "data"
SIGN = character_rep([0.5, 0.5], preset("Z2"))


def bundled_complexes():
    out = [complex_preset(n) for n in PRESET_NAMES]
    out.append(from_file(DATA / "torus.cx"))
    return out


def presentation_of(X):
    return X.presentation or preset("Z2")


def test_criterion_01_chain_soundness(record_property):
    """d^{n+1} d^n = 0 on every bundled complex x 20 random unitary representations"""
    worst = 0.0
    for X in bundled_complexes():
        P = presentation_of(X)
        for seed in range(20):
            pi = random_unitary_rep(P, 1 + seed % 4, np.random.default_rng(seed))
            for n in range(X.max_degree):
                defect, tol = lab.chain_defect(X, pi, n)
                worst = max(worst, defect / tol)
                assert defect <= tol, (X.name, seed, n, defect)
    record_property("measured", f"max defect/tolerance = {worst:.2e}")


def test_criterion_02_torus_table(record_property):
    """Torus dims (1,2,1) and (0,0,0); Euler audit exact on every run"""
    P = preset("Z2")
    X = complex_preset("Z2")
    assert an.cohomology(X, trivial_rep(2, 1, P)).dims == (1, 2, 1)
    assert an.cohomology(X, SIGN).dims == (0, 0, 0)
    runs = 0
    for Y, pi in lab.fixtures(seeds=20):
        rep = an.cohomology(Y, pi)
        assert rep.euler_audit(), (Y.name, pi.label, rep.dims)
        runs += 1
    record_property("measured", f"Euler audit held on {runs} reports")


def test_criterion_03_kazhdan_closed_forms(record_property):
    """kappa_0 closed forms for characters of Z and circle discretizations"""
    X = complex_preset("Z")
    worst = 0.0
    for th in (math.pi, math.pi / 2, 2 * math.pi / 3):
        pi = Representation((np.array([[np.exp(1j * th)]]),), presentation=preset("Z"))
        err = abs(an.kazhdan_constant(X, pi, 0) - 2 * math.sin(th / 2))
        worst = max(worst, err)
        assert err <= 1e-10
    for N in (4, 8, 16, 64):
        err = abs(an.kazhdan_constant(X, circle_discretization(N), 0) - 2 * math.sin(math.pi / N))
        worst = max(worst, err)
        assert err <= 1e-10
    record_property("measured", f"max error {worst:.1e}")


def _unitary_fixtures():
    out = [(X, pi) for X, pi in lab.fixtures(seeds=20) if pi.is_unitary()]
    Z = complex_preset("Z")
    out += [(Z, Representation(circle_discretization(N).images, f"circle:{N}", preset("Z")))
            for N in (4, 8, 16, 64)]
    for turns in ([1 / 3], [2 / 3]):
        out.append((complex_preset("Z3"), character_rep(turns, preset("Z3"))))
    for turns in ([0.5, 0.0], [0.25, 0.5], [0.0, 0.0]):
        for name in ("Z2", "T2"):
            out.append((complex_preset(name), character_rep(turns, preset("Z2"))))
    return out


def test_criterion_04_laplacian_criterion(record_property):
    """Laplacian invertibility agrees with vanishing on all fixtures"""
    disagreements, checked = [], 0
    for X, pi in _unitary_fixtures():
        dims = an.cohomology(X, pi).dims
        for n in range(X.max_degree + 1):
            checked += 1
            if an.laplacian_criterion(X, pi, n) != (dims[n] == 0):
                disagreements.append((X.name, pi.label, n))
    record_property("measured", f"{len(disagreements)} disagreements in {checked} degrees")
    assert not disagreements


def test_criterion_05_lemma_suite(record_property):
    """Closeness, perturbation, transfer, image/kernel and quotient inequalities on 200 instances"""
    worst = math.inf
    for seed in range(200):
        recs = lab.lemma_case(seed)
        c, p, q = recs["closeness"], recs["perturbation"], recs["quotient"]
        slacks = [c.projection_slack, c.pythagoras_slack, p.perturbation_slack, p.transfer_slack,
                  p.image_slack, p.kernel_slack, q.representative_slack, q.comparison_slack]
        worst = min(worst, *slacks)
        assert min(slacks) >= -1e-9, (seed, slacks)
    record_property("measured", f"min slack {worst:.2e}")


def _legal_deformation_sources():
    """(complex, representation, kind) triples for the Z2 and F2 fixtures."""
    Z2, F2 = complex_preset("Z2"), complex_preset("F2")
    P2, Pf = preset("Z2"), preset("F2")
    rng = np.random.default_rng(77)
    return [
        (Z2, SIGN, "diagonal_perturbation"),
        (Z2, character_rep([0.2, 0.7], P2), "diagonal_perturbation"),
        (Z2, random_unitary_rep(P2, 2, rng), "conjugation"),
        (Z2, trivial_rep(2, 2, P2), "derivation_twist"),
        (F2, random_unitary_rep(Pf, 2, rng), "free_arbitrary"),
        (F2, random_unitary_rep(Pf, 3, rng), "conjugation"),
    ]


def test_criterion_06_drift_domination(record_property):
    """Certified drift bound dominates measured codifferential drift; bound decreases to 0"""
    sources = _legal_deformation_sources()
    violations, worst_ratio, count = 0, 0.0, 0
    for X in {id(s[0]): s[0] for s in sources}.values():
        mine = [s for s in sources if s[0] is X]
        for eps in (0.01, 0.05, 0.1):
            for t in range(100):
                _, pi, kind = mine[t % len(mine)]
                rho = random_deformation(pi, DeformationSpec(kind, eps, t))
                for n in range(X.max_degree):
                    drift = np.linalg.norm(codifferential(X, pi, n).matrix - codifferential(X, rho, n).matrix, 2)
                    bound = an.deformation_bound(X, pi, eps, n)
                    count += 1
                    worst_ratio = max(worst_ratio, drift / bound)
                    violations += drift > bound
    grid = [0.1, 0.05, 0.01, 1e-3, 1e-4, 1e-6, 0.0]
    for X, pi, _ in sources:
        for n in range(X.max_degree):
            vals = [an.deformation_bound(X, pi, e, n) for e in grid]
            assert all(a > b for a, b in zip(vals, vals[1:])) and vals[-1] == 0
    record_property("measured", f"{violations} violations in {count}; max drift/bound {worst_ratio:.3f}")
    assert violations == 0


def test_criterion_07_vanishing_soundness(record_property):
    """200 legal deformations at 0.9 eps* keep H^1 = 0 and respect the kappa drift bound"""
    X = complex_preset("Z2")
    se = an.sufficient_epsilon(X, SIGN, 1)
    assert se.epsilon > 0
    eps = 0.9 * se.epsilon
    c = an.kappa_drift_bound(X, SIGN, 1, eps)
    k0 = an.kazhdan_constant(X, SIGN, 0)
    worst = math.inf
    for t in range(200):
        spec = DeformationSpec("diagonal_perturbation", eps, t, {"modulus": t % 2 == 1})
        rho = random_deformation(SIGN, spec)
        assert an.cohomology(X, rho).dims[1] == 0
        k = an.kazhdan_constant(X, rho, 0)
        worst = min(worst, k - (k0 - c))
        assert k >= k0 - c
    record_property("measured", f"eps* = {se.epsilon:.6g}, min kappa_0 slack {worst:.3g}")


def test_criterion_08_kernel_closeness(record_property):
    """Measured kernel closeness within drift / kappa_n on every comparable sweep cell"""
    configs = [
        ("Z2", "char:1/2,1/2", 1, "diagonal_perturbation"),
        ("Z2", "char:1/2,1/2", 0, "diagonal_perturbation"),
        ("Z2", "char:1/4,1/3", 1, "diagonal_perturbation"),
        ("Z2", "random:2", 0, "conjugation"),
        ("Z2", "random:3", 1, "conjugation"),
        ("F2", "random:2", 0, "free_arbitrary"),
        ("F2", "random:2", 1, "free_arbitrary"),
        ("Z", "circle:16", 0, "circle_mode_flatten"),
        ("Z3", "random:3", 1, "conjugation"),
    ]
    worst, cells = -math.inf, 0
    for name, spec, n, kind in configs:
        X = complex_preset(name)
        # Z3 at seed 5 draws a scalar representation, which conjugation cannot move
        pi = lab.build_rep(spec, X, seed=5 if name != "Z3" else 0)
        for row in lab.sweep_rows(X, pi, n, [0.01, 0.05, 0.1], trials=10, strategy=kind):
            if isinstance(row["seed"], str) or not row["kernels_comparable"]:
                continue
            cells += 1
            worst = max(worst, row["closeness"] - row["closeness_bound"])
            assert row["closeness"] <= row["closeness_bound"] + 1e-8
    record_property("measured", f"{cells} comparable cells, max excess {worst:.2e}")


def test_criterion_09_counterexample(record_property):
    """Mode flattening at 2 sin(pi/N) creates H^0 and eps* stays below it"""
    X = complex_preset("Z")
    gaps = []
    for N in (4, 8, 16, 64):
        c = circle_discretization(N)
        flat = circle_mode_flatten(c, 1)
        d = deformation_distance(c, flat)
        assert abs(d - 2 * math.sin(math.pi / N)) <= 1e-12
        assert an.cohomology(X, c).dims[0] == 0
        assert an.cohomology(X, flat).dims[0] == 1
        eps = an.sufficient_epsilon(X, c, 0).epsilon
        assert eps < 2 * math.sin(math.pi / N)
        gaps.append(2 * math.sin(math.pi / N) - eps)
    record_property("measured", f"min gap to counterexample {min(gaps):.2e}")


def test_criterion_10_direct_sum(record_property):
    """kappa_0 of a direct sum is the minimum over summands"""
    worst = 0.0
    for name in ("Z", "Z2"):
        X = complex_preset(name)
        P = preset(name)
        for seed in range(10):
            rng = np.random.default_rng(500 + seed)
            pi = random_unitary_rep(P, 1 + seed % 3, rng)
            rho = random_unitary_rep(P, 1 + (seed + 1) % 3, rng)
            k = an.kazhdan_constant(X, direct_sum(pi, rho), 0)
            m = min(an.kazhdan_constant(X, pi, 0), an.kazhdan_constant(X, rho, 0))
            err = 0.0 if k == m else abs(k - m)
            worst = max(worst, err)
            assert err <= 1e-8
    record_property("measured", f"max error {worst:.1e} over 20 pairs")


def test_criterion_11_weil(record_property):
    """Z/3 nontrivial character is certified rigid; a rotation of Z is not"""
    cert = an.weil_rigidity_check(preset("Z3"), character_rep([1 / 3], preset("Z3")))
    assert cert.rigid and cert.dim_H1 == 0
    th = math.pi / 5
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    rot = an.weil_rigidity_check(preset("Z"), Representation((R,), presentation=preset("Z")))
    assert not rot.rigid and rot.dim_H1 >= 1
    record_property("measured", f"dim H^1(Ad): Z3 {cert.dim_H1}, Z rotation {rot.dim_H1}")


def test_criterion_12_determinism(tmp_path, record_property):
    """Identical sweep configurations give byte-identical CSV"""
    args = ["sweep", "--preset", "Z2", "--rep", "random:2", "--degree", "1", "--eps", "0,0.01,0.05",
            "--trials", "6", "--seed", "3"]
    outs = []
    for i, jobs in enumerate((1, 1, 2)):
        d = tmp_path / str(i)
        assert lab.main(args + ["--out", str(d), "--jobs", str(jobs)]) == 0
        outs.append((d / "sweep.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]
    record_property("measured", f"3 runs, {len(outs[0])} bytes each, identical")
