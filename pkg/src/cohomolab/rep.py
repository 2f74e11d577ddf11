"""Finite-dimensional representations of finitely presented groups and their deformations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .presentation import GroupPresentation, GroupRingElement, Word, letter_name

RELATOR_TOL = 1e-9
CONDITION_CAP = 1e12
UNITARY_TOL = 1e-9


class RelatorError(ValueError):
    """A relator does not evaluate to the identity."""


class DeformationError(ValueError):
    pass


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Representation:
    """Invertible matrices assigned to the generators.

    ``presentation`` is optional; when given, the relators are checked on
    construction.
    """

    images: tuple[np.ndarray, ...]
    label: str = ""
    presentation: Optional[GroupPresentation] = None
    relator_tol: float = RELATOR_TOL
    inverses: tuple[np.ndarray, ...] = field(init=False, repr=False)
    condition_numbers: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        images = tuple(_freeze(m) for m in self.images)
        if not images:
            raise ValueError("a representation needs at least one generator image")
        d = images[0].shape[0]
        for m in images:
            if m.shape != (d, d):
                raise ValueError(f"generator images must all be {d}x{d}")
        conds = tuple(float(np.linalg.cond(m)) for m in images)
        for g, c in enumerate(conds):
            if not np.isfinite(c) or c > CONDITION_CAP:
                raise ValueError(f"image of generator {letter_name(g)} is singular (cond {c:.3g})")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "inverses", tuple(_freeze(np.linalg.inv(m)) for m in images))
        object.__setattr__(self, "condition_numbers", conds)
        if self.presentation is not None:
            if self.presentation.generator_count != len(images):
                raise ValueError(f"presentation has {self.presentation.generator_count} generators, "
                                 f"representation has {len(images)}")
            self.check_relators()

    @property
    def dim(self) -> int:
        return self.images[0].shape[0]

    @property
    def generator_count(self) -> int:
        return len(self.images)

    def image(self, gen: int, sign: int = 1) -> np.ndarray:
        return self.images[gen] if sign > 0 else self.inverses[gen]

    def symmetric_images(self) -> list[np.ndarray]:
        return [m for g in range(self.generator_count) for m in (self.images[g], self.inverses[g])]

    def relator_errors(self, presentation: Optional[GroupPresentation] = None) -> list[float]:
        P = presentation or self.presentation
        if P is None:
            return []
        eye = np.eye(self.dim)
        return [float(np.linalg.norm(evaluate(self, r) - eye, 2)) for r in P.relators]

    def check_relators(self, presentation: Optional[GroupPresentation] = None,
                       tol: Optional[float] = None) -> None:
        tol = self.relator_tol if tol is None else tol
        P = presentation or self.presentation
        for r, err in zip(P.relators if P else (), self.relator_errors(P)):
            if err > tol:
                raise RelatorError(f"relator {r} evaluates to distance {err:.3g} from I (tol {tol:g})")

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        eye = np.eye(self.dim)
        return all(np.linalg.norm(m @ m.conj().T - eye, 2) <= tol for m in self.images)

    def with_images(self, images: Sequence[np.ndarray], label: str) -> Representation:
        return Representation(tuple(images), label, self.presentation, self.relator_tol)

    def to_text(self) -> str:
        lines = [f"dim: {self.dim}"]
        for g, m in enumerate(self.images):
            lines.append(f"gen {letter_name(g)}:")
            for row in m:
                lines.append(" ".join(f"{float(z.real):.17g}{float(z.imag):+.17g}j" for z in row))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())


def parse_representation(text: str, presentation: Optional[GroupPresentation] = None,
                         label: str = "") -> Representation:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("dim:"):
        raise ValueError("representation file must start with 'dim: <d>'")
    d = int(lines[0].split(":", 1)[1])
    images = []
    i = 1
    while i < len(lines):
        head = lines[i]
        if not (head.startswith("gen ") and head.endswith(":")):
            raise ValueError(f"expected 'gen <name>:' but found {head!r}")
        rows = lines[i + 1:i + 1 + d]
        if len(rows) != d:
            raise ValueError(f"{head} needs {d} rows")
        mat = [[complex(tok) for tok in row.split()] for row in rows]
        if any(len(r) != d for r in mat):
            raise ValueError(f"{head} rows must have {d} entries")
        images.append(np.array(mat, dtype=complex))
        i += 1 + d
    return Representation(tuple(images), label, presentation)


def read_representation(path, presentation: Optional[GroupPresentation] = None) -> Representation:
    path = Path(path)
    return parse_representation(path.read_text(), presentation, label=path.stem)


def evaluate(rep: Representation, w: Word) -> np.ndarray:
    out = np.eye(rep.dim, dtype=complex)
    for g, s in w:
        out = out @ rep.image(g, s)
    return out


def evaluate_element(rep: Representation, x: GroupRingElement) -> np.ndarray:
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for w, c in x.terms:
        out += c * evaluate(rep, w)
    return out


def deformation_distance(pi: Representation, rho: Representation) -> float:
    """d_S(pi, rho): largest spectral-norm gap over generators and their inverses."""
    if pi.dim != rho.dim or pi.generator_count != rho.generator_count:
        raise ValueError("representations differ in dimension or generator count")
    return max(float(np.linalg.norm(a - b, 2))
               for a, b in zip(pi.symmetric_images(), rho.symmetric_images()))


# -- constructors ------------------------------------------------------------

def trivial_rep(generator_count: int, dim: int = 1,
                presentation: Optional[GroupPresentation] = None) -> Representation:
    return Representation(tuple(np.eye(dim) for _ in range(generator_count)),
                          f"trivial:{dim}", presentation)


def character_rep(turns: Sequence[float], presentation: Optional[GroupPresentation] = None,
                  label: str = "") -> Representation:
    """One-dimensional representation sending generator g to exp(2 pi i turns[g])."""
    images = tuple(np.array([[np.exp(2j * np.pi * t)]]) for t in turns)
    return Representation(images, label or f"char:{','.join(map(str, turns))}", presentation)


def circle_discretization(N: int) -> Representation:
    """diag(w, w^2, ..., w^(N-1)) with w = exp(2 pi i / N): multiplication by z on the
    nonconstant characters of Z/N."""
    if N < 3:
        raise ValueError("circle discretization needs N >= 3")
    k = np.arange(1, N)
    return Representation((np.diag(np.exp(2j * np.pi * k / N)),), f"circle:{N}")


def _flatten_order(eigs: np.ndarray) -> list[int]:
    return sorted(range(len(eigs)), key=lambda i: (round(float(abs(eigs[i] - 1)), 12), i))


def circle_mode_flatten(pi: Representation, m: int) -> Representation:
    """Set the ``m`` diagonal entries nearest to 1 equal to 1."""
    a = pi.images[0]
    if pi.generator_count != 1 or np.count_nonzero(a - np.diag(np.diag(a))):
        raise ValueError("mode flattening needs a single diagonal generator image")
    eigs = np.diag(a).copy()
    if not 0 <= m <= len(eigs):
        raise ValueError(f"mode count {m} outside 0..{len(eigs)}")
    for i in _flatten_order(eigs)[:m]:
        eigs[i] = 1.0
    return pi.with_images((np.diag(eigs),), f"{pi.label}/flat{m}")


def conjugation_deformation(pi: Representation, T: np.ndarray) -> Representation:
    T = np.asarray(T, dtype=complex)
    c = np.linalg.cond(T)
    if not np.isfinite(c) or c > CONDITION_CAP:
        raise ValueError(f"conjugating matrix is singular (cond {c:.3g})")
    Tinv = np.linalg.inv(T)
    return pi.with_images([T @ m @ Tinv for m in pi.images], f"{pi.label}^T")


def direct_sum(pi: Representation, rho: Representation) -> Representation:
    if pi.presentation != rho.presentation or pi.generator_count != rho.generator_count:
        raise ValueError("direct sum needs representations of the same presentation")
    images = []
    for a, b in zip(pi.images, rho.images):
        m = np.zeros((pi.dim + rho.dim,) * 2, dtype=complex)
        m[:pi.dim, :pi.dim] = a
        m[pi.dim:, pi.dim:] = b
        images.append(m)
    return Representation(tuple(images), f"({pi.label}+{rho.label})", pi.presentation)


def adjoint_rep(phi: Representation) -> Representation:
    """Conjugation action M -> phi(g) M phi(g)^-1 on d x d matrices (row-major vec)."""
    images = tuple(np.kron(a, ainv.T) for a, ainv in zip(phi.images, phi.inverses))
    return Representation(images, f"Ad({phi.label})", phi.presentation)


def extend_derivation(pi: Representation, pi2: Representation,
                      D: Sequence[np.ndarray], w: Word) -> np.ndarray:
    """Value on ``w`` of the derivation with D(gh) = pi_g D(h) + D(g) pi2_h."""
    # D(x1..xn) = sum_i pi(x1..x_{i-1}) D(x_i) pi2(x_{i+1}..xn)
    left = np.eye(pi.dim, dtype=complex)
    out = np.zeros((pi.dim, pi2.dim), dtype=complex)
    for g, s in w:
        dx = D[g] if s > 0 else -pi.inverses[g] @ D[g] @ pi2.inverses[g]
        out = out @ pi2.image(g, s) + left @ dx
        left = left @ pi.image(g, s)
    return out


def derivation_twist(pi: Representation, pi2: Representation, D: Sequence[np.ndarray],
                     alpha: float, presentation: Optional[GroupPresentation] = None) -> Representation:
    """Block representation [[pi_g, alpha D_g], [0, pi2_g]] on E + E'."""
    P = presentation or pi.presentation
    D = [np.atleast_2d(np.asarray(x, dtype=complex)) for x in D]
    if len(D) != pi.generator_count or any(x.shape != (pi.dim, pi2.dim) for x in D):
        raise ValueError(f"D needs one {pi.dim}x{pi2.dim} matrix per generator")
    if P is not None:
        for r in P.relators:
            err = float(np.linalg.norm(extend_derivation(pi, pi2, D, r), 2))
            if err > RELATOR_TOL:
                raise RelatorError(f"D is not a derivation: D({r}) has norm {err:.3g}")
    images = []
    n1, n2 = pi.dim, pi2.dim
    for g in range(pi.generator_count):
        m = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        m[:n1, :n1] = pi.images[g]
        m[:n1, n1:] = alpha * D[g]
        m[n1:, n1:] = pi2.images[g]
        images.append(m)
    return Representation(tuple(images), f"twist({pi.label},{pi2.label},{alpha:g})", P)


# -- random generation ---------------------------------------------------------

def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def character_lattice(P: GroupPresentation) -> tuple[np.ndarray, list[int]]:
    """Parametrize characters of the abelianization.

    Returns ``(V, orders)``: every character is exp(2 pi i V phi) where
    phi_i ranges over (1/orders[i]) Z for a positive order and over R when
    the order is 0.
    """
    k = P.generator_count
    if not P.relators:
        return np.eye(k), [0] * k
    R = Matrix(P.exponent_matrix())
    S, _, V = smith_normal_decomp(R, domain=ZZ)
    orders = [abs(int(S[i, i])) if i < min(S.shape) else 0 for i in range(k)]
    return np.array(V.tolist(), dtype=float), orders


def random_character_turns(P: GroupPresentation, rng: np.random.Generator) -> np.ndarray:
    V, orders = character_lattice(P)
    phi = np.array([rng.integers(o) / o if o > 0 else rng.random() for o in orders])
    return np.mod(V @ phi, 1.0)


def random_unitary_rep(P: GroupPresentation, dim: int, rng: np.random.Generator) -> Representation:
    """Random unitary representation of P.

    Free presentations get independent Haar unitaries.  Otherwise the result
    is a sum of random characters of the abelianization in a random unitary
    basis, which covers every unitary representation of an abelian group.
    """
    if not P.relators:
        images = tuple(haar_unitary(dim, rng) for _ in range(P.generator_count))
    else:
        turns = np.array([random_character_turns(P, rng) for _ in range(dim)])  # dim x k
        U = haar_unitary(dim, rng)
        images = tuple(U @ np.diag(np.exp(2j * np.pi * turns[:, g])) @ U.conj().T
                       for g in range(P.generator_count))
    return Representation(images, f"unitary:{dim}", P)


KINDS = ("conjugation", "derivation_twist", "diagonal_perturbation",
         "circle_mode_flatten", "free_arbitrary")


@dataclass(frozen=True)
class DeformationSpec:
    kind: str
    epsilon: float
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown deformation kind {self.kind!r}; choose from {KINDS}")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")


def _land(pi: Representation, family: Callable[[float], Representation],
          eps: float, t0: float, attempts: int = 100) -> Representation:
    """Find t with d_S(pi, family(t)) in [0.99 eps, eps] by doubling then bisection."""
    lo, hi = 0.0, t0
    rho = None
    n = 0
    while n < attempts:
        n += 1
        try:
            rho = family(hi)
        except ValueError:
            raise DeformationError(f"deformation family broke down before reaching distance {eps:g}") from None
        d = deformation_distance(pi, rho)
        if 0.99 * eps <= d <= eps:
            return rho
        if d > eps:
            break
        lo, hi = hi, 2 * hi
    else:
        raise DeformationError(f"could not reach distance {eps:g} in {attempts} attempts")
    while n < attempts:
        n += 1
        mid = 0.5 * (lo + hi)
        rho = family(mid)
        d = deformation_distance(pi, rho)
        if 0.99 * eps <= d <= eps:
            return rho
        if d < 0.99 * eps:
            lo = mid
        else:
            hi = mid
    raise DeformationError(f"rescaling did not land in [{0.99 * eps:g}, {eps:g}] after {attempts} attempts")


def derivation_space(pi1: Representation, pi2: Representation,
                     P: GroupPresentation, tol: float = 1e-10) -> list[list[np.ndarray]]:
    """Basis of derivations D: generators -> Hom(E2, E1) vanishing on all relators."""
    n1, n2, k = pi1.dim, pi2.dim, P.generator_count
    size = n1 * n2 * k
    if not P.relators:
        cols = np.eye(size)
    else:
        L = np.zeros((len(P.relators) * n1 * n2, size), dtype=complex)
        for j in range(size):
            e = np.zeros(size)
            e[j] = 1.0
            D = [e[g * n1 * n2:(g + 1) * n1 * n2].reshape(n1, n2) for g in range(k)]
            L[:, j] = np.concatenate([extend_derivation(pi1, pi2, D, r).ravel() for r in P.relators])
        _, s, vh = np.linalg.svd(L)
        rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0)))
        cols = vh[rank:].conj().T
    return [[cols[g * n1 * n2:(g + 1) * n1 * n2, j].reshape(n1, n2) for g in range(k)]
            for j in range(cols.shape[1])]


def random_deformation(pi: Representation, spec: DeformationSpec,
                       presentation: Optional[GroupPresentation] = None) -> Representation:
    """A legal deformation rho with d_S(pi, rho) in [0.99 eps, eps], deterministic per seed."""
    P = presentation or pi.presentation
    eps = spec.epsilon
    if eps == 0:
        return pi
    rng = np.random.default_rng(spec.seed)
    d, k = pi.dim, pi.generator_count
    label = f"{pi.label}~{spec.kind}:{eps:g}:{spec.seed}"

    if spec.kind == "free_arbitrary":
        if P is None or P.relators:
            raise DeformationError("free_arbitrary needs a relator-free presentation")
        X = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(k)]
        scale = max(np.linalg.norm(x, 2) for x in X)
        X = [x / scale for x in X]
        fam = lambda t: Representation(tuple(a + t * x for a, x in zip(pi.images, X)), label, P)
        return _land(pi, fam, eps, eps)

    if spec.kind == "conjugation":
        X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        X /= np.linalg.norm(X, 2)
        fam = lambda t: Representation(
            tuple((np.eye(d) + t * X) @ a @ np.linalg.inv(np.eye(d) + t * X) for a in pi.images),
            label, P)
        B = max(np.linalg.norm(m, 2) for m in pi.symmetric_images())
        return _land(pi, fam, eps, eps / (2 * B))

    if spec.kind == "diagonal_perturbation":
        diag = [np.diag(a) for a in pi.images]
        if any(np.count_nonzero(a - np.diag(dg)) for a, dg in zip(pi.images, diag)):
            raise DeformationError("diagonal_perturbation needs diagonal generator images")
        if P is not None and P.relators:
            V, orders = character_lattice(P)
            free = V[:, [i for i, o in enumerate(orders) if o == 0]]
        else:
            free = np.eye(k)
        if free.shape[1] == 0:
            raise DeformationError("the presentation admits no continuous diagonal deformations")
        modulus = bool(spec.params.get("modulus", False))
        # per diagonal entry, a direction in the space of exponent-sum-compatible log changes
        phase = free @ rng.standard_normal((free.shape[1], d))
        logmod = free @ rng.standard_normal((free.shape[1], d)) if modulus else np.zeros((k, d))
        norm = np.max(np.abs(phase) + np.abs(logmod))
        phase, logmod = phase / norm, logmod / norm

        def fam(t):
            return Representation(tuple(np.diag(diag[g] * np.exp(t * (logmod[g] + 1j * phase[g])))
                                        for g in range(k)), label, P)
        return _land(pi, fam, eps, eps / max(1.0, max(np.abs(x).max() for x in diag)))

    if spec.kind == "derivation_twist":
        split = int(spec.params.get("split", d // 2))
        if not 0 < split < d:
            raise DeformationError(f"derivation twist needs 0 < split < dim, got split={split}")
        if any(np.linalg.norm(a[split:, :split]) > RELATOR_TOL for a in pi.images):
            raise DeformationError("derivation twist needs block upper triangular images at the split")
        pi1 = Representation(tuple(a[:split, :split] for a in pi.images), "top", P)
        pi2 = Representation(tuple(a[split:, split:] for a in pi.images), "bottom", P)
        basis = derivation_space(pi1, pi2, P) if P is not None else None
        if P is None:
            raise DeformationError("derivation twist needs a presentation")
        if not basis:
            raise DeformationError("no nonzero derivations for this split")
        coef = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        D = [sum(c * b[g] for c, b in zip(coef, basis)) for g in range(k)]
        dmax = max(np.linalg.norm(x, 2) for x in D)
        D = [x / dmax for x in D]

        def fam(t):
            imgs = []
            for g in range(k):
                m = np.array(pi.images[g])
                m[:split, split:] += t * D[g]
                imgs.append(m)
            return Representation(tuple(imgs), label, P)
        return _land(pi, fam, eps, eps)

    if spec.kind == "circle_mode_flatten":
        return _flatten_to_distance(pi, eps, label)

    raise DeformationError(f"unhandled kind {spec.kind}")


def _flatten_to_distance(pi: Representation, eps: float, label: str) -> Representation:
    """Flatten every diagonal mode within eps of 1, then rotate the next mode
    toward 1 so the distance reaches eps exactly."""
    a = pi.images[0]
    if pi.generator_count != 1 or np.count_nonzero(a - np.diag(np.diag(a))):
        raise DeformationError("circle_mode_flatten needs a single diagonal generator image")
    eigs = np.diag(a).copy()
    dist = 0.0
    rest = []
    for i in _flatten_order(eigs):
        gap = abs(eigs[i] - 1)
        if gap <= eps * (1 + 1e-12):
            eigs[i] = 1.0
            dist = max(dist, gap)
        else:
            rest.append(i)
    if dist < 0.99 * eps and rest and eps <= 2:
        i = rest[0]
        if abs(abs(eigs[i]) - 1) > UNITARY_TOL:
            raise DeformationError("partial rotation needs a unit-modulus mode")
        step = 2 * math.asin(eps / 2)
        direction = -1.0 if np.angle(eigs[i]) > 0 else 1.0
        eigs[i] = eigs[i] * np.exp(1j * direction * step)
        dist = eps
    rho = pi.with_images((np.diag(eigs),), label)
    got = deformation_distance(pi, rho)
    if not 0.99 * eps <= got <= eps * (1 + 1e-12):
        raise DeformationError(f"flattening reaches distance {got:g}, outside [{0.99 * eps:g}, {eps:g}]")
    return rho
