"""Command line driver: cohomology reports, deformation sweeps, scaling studies,
the invariant suite and rigidity certificates.

Usage::

    cohomolab cohomology --preset Z2 --rep trivial:1
    cohomolab sweep --preset Z2 --rep char:1/2,1/2 --degree 1 --eps 0.01,0.05 --trials 20
    cohomolab scaling --N 4,8,16,64
    cohomolab verify [--only closeness]
    cohomolab weil --preset Z3 --rep char:1/3
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import analysis as an
from .cochain import codifferential
from .complex import (
    ComplexFormatError,
    DimensionMismatchError,
    EquivariantComplex,
    PRESET_NAMES,
    complex_preset,
    parse_complex,
    presentation_complex,
)
from .presentation import GroupPresentation, PresentationError
from .rep import (
    KINDS,
    DeformationError,
    DeformationSpec,
    RelatorError,
    Representation,
    character_lattice,
    character_rep,
    circle_discretization,
    circle_mode_flatten,
    deformation_distance,
    parse_representation,
    random_deformation,
    random_unitary_rep,
    trivial_rep,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_REP = 0, 1, 2, 3

SWEEP_COLUMNS = ("seed", "epsilon_requested", "epsilon_measured", "drift", "drift_bound",
                 "dimH_before", "dimH_after", "kappa_before", "kappa_after", "closeness",
                 "closeness_bound", "vanishing_preserved", "kernels_comparable")

DEFAULTS = {"preset": None, "complex": None, "rep": "trivial:1", "degree": 0, "eps": "0.01",
            "trials": 10, "seed": 0, "rank_tol": None, "out": None, "jobs": None,
            "strategy": "auto", "N": "4,8,16,64", "only": None}


class ConfigError(ValueError):
    pass


# -- inputs ---------------------------------------------------------------------------

def load_complex(preset: Optional[str], path: Optional[str]) -> EquivariantComplex:
    """A preset name, a complex file (``degrees:`` header) or a presentation file (``gens:``)."""
    if path:
        p = Path(path)
        if not p.is_file():
            raise FileNotFoundError(f"no such file: {p}")
        text = p.read_text()
        if re.search(r"^\s*degrees\s*:", text, re.M):
            return parse_complex(text, name=p.stem)
        return presentation_complex(GroupPresentation.parse(text, name=p.stem))
    name = preset or "Z2"
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return complex_preset(name)


def _number(tok: str) -> float:
    """Float, fraction p/q, or a multiple of pi such as pi/3 or 2*pi/3."""
    tok = tok.strip()
    m = re.fullmatch(r"(?:([-+]?[\d.]+)\*?)?pi(?:/([\d.]+))?", tok)
    if m:
        return float(m[1] or 1) * math.pi / float(m[2] or 1)
    return float(Fraction(tok))


def build_rep(spec: str, X: EquivariantComplex, seed: int = 0) -> Representation:
    """Representation from ``trivial:d``, ``char:t1,t2,..`` (turns), ``circle:N``,
    ``rotation:theta``, ``random:d`` or a representation file."""
    P = X.presentation
    k = X.generator_count
    kind, _, arg = spec.partition(":")
    try:
        if kind == "trivial":
            return trivial_rep(k, int(arg or 1), P)
        if kind == "char":
            turns = [_number(t) for t in arg.split(",")]
            if len(turns) == 1 and k > 1:
                turns = turns * k
            if len(turns) != k:
                raise ConfigError(f"char needs {k} values, got {len(turns)}")
            return character_rep(turns, P, label=spec)
        if kind == "circle":
            if k != 1:
                raise ConfigError("circle:N is a representation of Z (one generator)")
            c = circle_discretization(int(arg))
            return Representation(c.images, c.label, P)
        if kind == "rotation":
            th = _number(arg)
            R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
            return Representation(tuple(R for _ in range(k)), spec, P)
        if kind == "random":
            if P is None:
                Q = GroupPresentation(k, (), X.name)
                return Representation(random_unitary_rep(Q, int(arg or 1), np.random.default_rng(seed)).images,
                                      spec, None)
            rep = random_unitary_rep(P, int(arg or 1), np.random.default_rng(seed))
            return Representation(rep.images, spec, P)
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, (RelatorError, ConfigError)):
            raise
        raise ConfigError(f"bad representation spec {spec!r}: {exc}") from None
    p = Path(spec)
    if not p.is_file():
        raise FileNotFoundError(f"no such representation file or builder: {spec}")
    rep = parse_representation(p.read_text(), P, label=p.stem)
    if rep.generator_count != k:
        raise ConfigError(f"{p} has {rep.generator_count} generators, complex needs {k}")
    return rep


def parse_grid(text: str) -> list[float]:
    grid = [float(_number(t)) for t in str(text).split(",") if t.strip()]
    if not grid:
        raise ConfigError("empty epsilon grid")
    if any(e < 0 for e in grid):
        raise ConfigError("epsilon values must be nonnegative")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("epsilon grid must be strictly increasing")
    return grid


def read_config(path: str) -> dict:
    """key = value lines; ``#`` comments; optional quotes around values."""
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such config file: {p}")
    out = {}
    for lineno, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{p} line {lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{p} line {lineno}: unknown key {key!r}")
        out[key] = value.strip().strip('"').strip("'")
    return out


# -- sweep ------------------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def choose_strategy(pi: Representation, X: EquivariantComplex) -> str:
    if pi.label.startswith("circle:"):
        return "circle_mode_flatten"
    diagonal = all(not np.count_nonzero(a - np.diag(np.diag(a))) for a in pi.images)
    P = X.presentation
    if diagonal and (P is None or 0 in character_lattice(P)[1]):
        return "diagonal_perturbation"
    if X.presentation is not None and not X.presentation.relators:
        return "free_arbitrary"
    return "conjugation"


@dataclass(frozen=True)
class SweepCell:
    X: EquivariantComplex
    pi: Representation
    degree: int
    strategy: str
    epsilon: float
    seed: int
    rank_tol: Optional[float]
    dims_before: tuple[int, ...]
    kappa_before: float


def run_cell(cell: SweepCell) -> dict:
    rho = random_deformation(cell.pi, DeformationSpec(cell.strategy, cell.epsilon, cell.seed),
                             cell.X.presentation)
    n = cell.degree
    after = an.cohomology(cell.X, rho, cell.rank_tol)
    kc = an.kernel_closeness_bound(cell.X, cell.pi, rho, n, cell.rank_tol)
    return {
        "seed": cell.seed,
        "epsilon_requested": cell.epsilon,
        "epsilon_measured": deformation_distance(cell.pi, rho),
        "drift": kc.drift,
        "drift_bound": an.deformation_bound(cell.X, cell.pi, cell.epsilon, n),
        "dimH_before": cell.dims_before[n],
        "dimH_after": after.dims[n],
        "kappa_before": cell.kappa_before,
        "kappa_after": after.kappas[n],
        "closeness": kc.measured,
        "closeness_bound": kc.bound,
        "vanishing_preserved": cell.dims_before[n] == 0 and after.dims[n] == 0,
        "kernels_comparable": kc.comparable,
    }


def sweep_rows(X: EquivariantComplex, pi: Representation, degree: int, grid: Sequence[float],
               trials: int, seed: int = 0, strategy: str = "auto",
               rank_tol: Optional[float] = None, jobs: int = 1) -> list[dict]:
    """One row per (seed, eps) in that order, then per-eps summary rows and a
    sufficient-epsilon row."""
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    if not 0 <= degree <= X.max_degree:
        raise ConfigError(f"degree {degree} outside 0..{X.max_degree}")
    if strategy == "auto":
        strategy = choose_strategy(pi, X)
    if strategy not in KINDS:
        raise ConfigError(f"unknown strategy {strategy!r}; choose from {', '.join(KINDS)}")
    base = an.cohomology(X, pi, rank_tol)
    cells = [SweepCell(X, pi, degree, strategy, eps, s, rank_tol, base.dims, base.kappas[degree])
             for s in range(seed, seed + trials) for eps in grid]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_cell, cells, chunksize=max(1, len(cells) // (4 * jobs))))
    else:
        rows = [run_cell(c) for c in cells]

    for eps in grid:
        sel = [r for r in rows if r["epsilon_requested"] == eps]
        rows.append({"seed": "summary", "epsilon_requested": eps,
                     "vanishing_preserved": sum(r["vanishing_preserved"] for r in sel) / len(sel)})
    try:
        se = an.sufficient_epsilon(X, pi, degree, rank_tol)
        rows.append({"seed": "sufficient_epsilon", "epsilon_requested": se.epsilon,
                     "drift_bound": se.kappa_drift})
    except an.HypothesisError:
        rows.append({"seed": "sufficient_epsilon", "epsilon_requested": None})
    return rows


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str] = SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([r[c] if isinstance(r.get(c), str) else _fmt(r.get(c)) for c in columns])
    return buf.getvalue()


# -- scaling ------------------------------------------------------------------------------

SCALING_COLUMNS = ("N", "kappa0", "closed_form", "sufficient_epsilon", "flatten_distance",
                   "dimH0_base", "dimH0_flattened")


def scaling_rows(Ns: Sequence[int], rank_tol: Optional[float] = None) -> list[dict]:
    X = complex_preset("Z")
    rows = []
    for N in Ns:
        if N < 3:
            raise ConfigError("N must be at least 3")
        c = circle_discretization(N)
        flat = circle_mode_flatten(c, 1)
        rows.append({
            "N": N,
            "kappa0": an.kazhdan_constant(X, c, 0, rank_tol),
            "closed_form": 2 * math.sin(math.pi / N),
            "sufficient_epsilon": an.sufficient_epsilon(X, c, 0, rank_tol).epsilon,
            "flatten_distance": deformation_distance(c, flat),
            "dimH0_base": an.cohomology(X, c, rank_tol).dims[0],
            "dimH0_flattened": an.cohomology(X, flat, rank_tol).dims[0],
        })
    return rows


# -- verify -----------------------------------------------------------------------------

def fixture_representations(X: EquivariantComplex, seeds: int = 4) -> list[Representation]:
    """Trivial, sign-character and random unitary representations (dims 1-4) for a fixture."""
    k = X.generator_count
    P = X.presentation
    reps = [trivial_rep(k, 1, P), trivial_rep(k, 2, P)]
    if P is None or all(sum(r.exponent_sums(k)) % 2 == 0 for r in P.relators):
        reps.append(character_rep([0.5] * k, P))
    if X.name == "Z3":
        reps.append(character_rep([1 / 3], P))
    Q = P or GroupPresentation(k, (), X.name)
    for s in range(seeds):
        rep = random_unitary_rep(Q, 1 + s % 4, np.random.default_rng(1000 + s))
        reps.append(Representation(rep.images, f"unitary:{rep.dim}#{s}", P))
    return reps


def fixtures(seeds: int = 4) -> list[tuple[EquivariantComplex, Representation]]:
    out = []
    for name in PRESET_NAMES:
        X = complex_preset(name)
        out += [(X, r) for r in fixture_representations(X, seeds)]
    return out


def chain_defect(X: EquivariantComplex, pi: Representation, n: int) -> tuple[float, float]:
    """(||d^{n+1} d^n||, 1e-10 (1 + ||d^{n+1}|| ||d^n||))."""
    A = codifferential(X, pi, n).matrix
    B = codifferential(X, pi, n + 1).matrix
    prod = B @ A
    defect = float(np.linalg.norm(prod, 2)) if prod.size else 0.0
    na = float(np.linalg.norm(A, 2)) if A.size else 0.0
    nb = float(np.linalg.norm(B, 2)) if B.size else 0.0
    return defect, 1e-10 * (1 + na * nb)


def random_subspace(rng: np.random.Generator, ambient: int, dim: int) -> an.SubspaceBasis:
    Z = rng.standard_normal((ambient, dim)) + 1j * rng.standard_normal((ambient, dim))
    return an.SubspaceBasis(np.linalg.qr(Z)[0])


def nearby_subspace(rng: np.random.Generator, V: an.SubspaceBasis, scale: float) -> an.SubspaceBasis:
    Z = V.basis + scale * (rng.standard_normal(V.basis.shape) + 1j * rng.standard_normal(V.basis.shape))
    return an.SubspaceBasis(np.linalg.qr(Z)[0])


def _truncate(M: np.ndarray, rank: int) -> np.ndarray:
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    s[rank:] = 0
    return (U * s) @ Vh


def lemma_case(seed: int) -> dict:
    """Run every subspace/operator inequality on one seeded random instance.

    Returns the records; raises LemmaViolation on failure.  Ambient
    dimensions range over 4..12.
    """
    rng = np.random.default_rng(seed)
    m = int(rng.integers(4, 13))
    r = int(rng.integers(2, m + 1))
    k = int(rng.integers(1, m))
    scale = float(10 ** rng.uniform(-3, -0.5))

    V = random_subspace(rng, m, k)
    W = nearby_subspace(rng, V, scale) if rng.random() < 0.7 else random_subspace(rng, m, k)
    out = {"closeness": an.closeness_lemma_checks(V, W)}

    T = rng.standard_normal((r, m)) + 1j * rng.standard_normal((r, m))
    E = rng.standard_normal((r, m)) + 1j * rng.standard_normal((r, m))
    E *= scale / np.linalg.norm(E, 2)
    S = T + E
    if rng.random() < 0.5:
        # equal-rank, rank-deficient pair so kernels and images are nontrivial
        rank = int(rng.integers(1, min(r, m) + 1))
        T, S = _truncate(T, rank), _truncate(S, rank)
    out["perturbation"] = an.bounded_below_perturbation_check(T, S, V, W)

    Vq = random_subspace(rng, m, k)
    Wq = nearby_subspace(rng, Vq, scale)
    A = rng.standard_normal((r, m)) + 1j * rng.standard_normal((r, m))
    Pv = np.eye(m) - Vq.basis @ Vq.basis.conj().T
    Pw = np.eye(m) - Wq.basis @ Wq.basis.conj().T
    out["quotient"] = an.quotient_comparison_check(A @ Pv, (A + E) @ Pw, Vq, Wq)
    return out


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_chain(rank_tol, seeds):
    bad, count = [], 0
    for X, pi in fixtures(seeds):
        for n in range(X.max_degree):
            count += 1
            defect, tol = chain_defect(X, pi, n)
            if defect > tol:
                bad.append(f"{X.name}/{pi.label}/d{n + 1}d{n}={defect:.2e}")
    return CheckResult("chain", not bad, f"{count} compositions" + (f"; failures {bad}" if bad else ""))


def _check_closeness(rank_tol, seeds):
    bad = []
    cases = 10 * seeds
    for s in range(cases):
        try:
            lemma_case(s)
        except an.LemmaViolation as exc:
            bad.append(f"seed {s}: {exc}")
    return CheckResult("closeness", not bad, f"{cases} random instances" + (f"; {bad}" if bad else ""))


def _check_duality(rank_tol, seeds):
    bad, count = [], 0
    for X, pi in fixtures(seeds):
        for n in range(X.max_degree + 1):
            count += 1
            try:
                an.duality_check(X, pi, n, rank_tol)
            except an.LemmaViolation as exc:
                bad.append(f"{X.name}/{pi.label}: {exc}")
    return CheckResult("duality", not bad, f"{count} degrees" + (f"; failures {bad[:3]}" if bad else ""))


def _check_laplacian(rank_tol, seeds):
    bad, count = [], 0
    for X, pi in fixtures(seeds):
        rep = an.cohomology(X, pi, rank_tol)
        for n in range(X.max_degree + 1):
            count += 1
            if an.laplacian_criterion(X, pi, n) != (rep.dims[n] == 0):
                bad.append(f"{X.name}/{pi.label}/n={n}")
    return CheckResult("laplacian", not bad, f"{count} degrees" + (f"; disagreements {bad[:5]}" if bad else ""))


def _check_euler(rank_tol, seeds):
    bad, count = [], 0
    for X, pi in fixtures(seeds):
        count += 1
        rep = an.cohomology(X, pi, rank_tol)
        if not rep.euler_audit():
            bad.append(f"{X.name}/{pi.label} dims {rep.dims}")
    return CheckResult("euler", not bad, f"{count} reports" + (f"; failures {bad}" if bad else ""))


CHECKS: dict[str, Callable] = {
    "chain": _check_chain,
    "closeness": _check_closeness,
    "duality": _check_duality,
    "laplacian": _check_laplacian,
    "euler": _check_euler,
}


def run_checks(only: Optional[Sequence[str]] = None, rank_tol: Optional[float] = None,
               seeds: int = 4) -> list[CheckResult]:
    names = list(only) if only else list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
    return [CHECKS[n](rank_tol, seeds) for n in names]


# -- commands --------------------------------------------------------------------------

def _emit(text: str, out: Optional[str], filename: str) -> None:
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        with open(d / filename, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_cohomology(args) -> int:
    X = load_complex(args.preset, args.complex)
    pi = build_rep(args.rep, X, args.seed)
    report = an.cohomology(X, pi, args.rank_tol)
    print(report.table())
    _emit(report.to_json() + "\n", args.out, "cohomology.json")
    return EXIT_OK


def cmd_sweep(args) -> int:
    X = load_complex(args.preset, args.complex)
    pi = build_rep(args.rep, X, args.seed)
    rows = sweep_rows(X, pi, args.degree, parse_grid(args.eps), args.trials, args.seed,
                      args.strategy, args.rank_tol, args.jobs)
    _emit(rows_to_csv(rows), args.out, "sweep.csv")
    return EXIT_OK


def cmd_scaling(args) -> int:
    Ns = [int(t) for t in str(args.N).split(",") if t.strip()]
    rows = scaling_rows(Ns, args.rank_tol)
    _emit(rows_to_csv(rows, SCALING_COLUMNS), args.out, "scaling.csv")
    bad = [r["N"] for r in rows if abs(r["kappa0"] - r["closed_form"]) > 1e-10]
    if bad:
        print(f"kappa_0 deviates from 2 sin(pi/N) for N in {bad}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    only = [t.strip() for t in args.only.split(",")] if args.only else None
    results = run_checks(only, args.rank_tol)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_FAIL
    return EXIT_OK


def cmd_weil(args) -> int:
    X = load_complex(args.preset, args.complex)
    if X.presentation is None:
        raise ConfigError("weil needs a presentation (preset or presentation file)")
    phi = build_rep(args.rep, X, args.seed)
    cert = an.weil_rigidity_check(X.presentation, phi, args.rank_tol)
    print(f"{'rigid' if cert.rigid else 'not certified'}: dim H^1(Ad) = {cert.dim_H1}")
    _emit(json.dumps(cert.to_dict(), indent=2) + "\n", args.out, "weil.json")
    return EXIT_OK


COMMANDS = {"cohomology": cmd_cohomology, "sweep": cmd_sweep, "scaling": cmd_scaling,
            "verify": cmd_verify, "weil": cmd_weil}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--preset", help=f"built-in complex: {', '.join(PRESET_NAMES)}")
    g.add_argument("--complex", help="complex or presentation file")
    g.add_argument("--rep", help="trivial:d, char:t1,..., circle:N, rotation:theta, random:d or a file")
    g.add_argument("--degree", type=int)
    g.add_argument("--eps", help="comma separated, strictly increasing epsilon grid")
    g.add_argument("--trials", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--rank-tol", type=float, dest="rank_tol")
    g.add_argument("--out", help="output directory (default: standard output)")
    g.add_argument("--jobs", type=int, help="worker processes (default $COHOMOLAB_JOBS or 1)")
    g.add_argument("--strategy", help=f"deformation kind: auto or one of {', '.join(KINDS)}")
    g.add_argument("--N", help="comma separated circle sizes for scaling")
    g.add_argument("--only", help="comma separated subset of verify checks")
    g.add_argument("--config", help="key = value file; command line flags win")

    parser = argparse.ArgumentParser(prog="cohomolab", description=__doc__.split("\n\n")[0].replace("\n", " "))
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=COMMANDS[name].__name__[4:])
    return parser


def resolve(args) -> argparse.Namespace:
    """Merge flags over the config file over defaults."""
    conf = read_config(args.config) if args.config else {}
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, conf.get(key, default))
    env_jobs = os.environ.get("COHOMOLAB_JOBS")
    if args.jobs is None:
        args.jobs = env_jobs or 1
    try:
        for key in ("degree", "trials", "seed", "jobs"):
            setattr(args, key, int(getattr(args, key)))
        if args.rank_tol is not None:
            args.rank_tol = float(args.rank_tol)
    except ValueError as exc:
        raise ConfigError(f"bad numeric option: {exc}") from None
    if args.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args)
        return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, ComplexFormatError, DimensionMismatchError, PresentationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (RelatorError, DeformationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REP
    except an.HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        # remaining value errors come from representation construction
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REP


if __name__ == "__main__":
    sys.exit(main())
