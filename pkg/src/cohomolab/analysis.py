"""Cohomology dimensions, higher Kazhdan constants and perturbation certificates.

Everything here works at p = 2, where the codifferentials are plain matrices
and all quantities reduce to singular values:

* ``kappa_n`` is the smallest nonzero singular value of ``d^n`` (``inf`` for
  the zero map),
* closeness of subspaces is the sine of the largest principal angle,
* the certified chain in :func:`sufficient_epsilon` combines the drift bound
  of :func:`deformation_bound` with the kernel, image and quotient
  comparison inequalities checked by :func:`bounded_below_perturbation_check`
  and :func:`quotient_comparison_check`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .cochain import TwistedCodifferential, codifferential, laplacian
from .complex import EquivariantComplex, euler_characteristic, presentation_complex
from .presentation import GroupPresentation
from .rep import Representation, adjoint_rep, deformation_distance

EPS = np.finfo(float).eps
INF = math.inf
NOISE_FLOOR = 1e-12


class LemmaViolation(AssertionError):
    """A perturbation inequality failed; the message names it."""


class HypothesisError(ValueError):
    pass


class NonUnitaryError(ValueError):
    pass


# -- spectral bookkeeping ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Spectrum:
    """SVD of a codifferential split at the rank threshold."""

    singular_values: np.ndarray
    threshold: float
    rank: int
    U: np.ndarray
    Vh: np.ndarray
    columns: int

    @property
    def gap(self) -> float:
        return float(self.singular_values[self.rank - 1]) if self.rank else 0.0

    @property
    def kappa(self) -> float:
        return self.gap if self.rank else INF

    @property
    def nullity(self) -> int:
        return self.columns - self.rank

    def kernel(self) -> np.ndarray:
        return self.Vh[self.rank:].conj().T

    def image(self) -> np.ndarray:
        return self.U[:, :self.rank]

    def bracket(self) -> tuple[Optional[float], Optional[float]]:
        s = self.singular_values
        above = float(s[self.rank - 1]) if self.rank else None
        below = float(s[self.rank]) if self.rank < len(s) else None
        return above, below


def rank_threshold(M: np.ndarray, noise: float = 0.0) -> float:
    """max(shape) times the larger of eps * sigma_max and the entry noise
    estimate of the map (see :func:`codifferential`)."""
    if M.size == 0:
        return 0.0
    smax = float(np.linalg.norm(M, 2))
    return max(M.shape) * max(EPS * smax, noise)


def spectrum(D, rank_tol: Optional[float] = None) -> Spectrum:
    if isinstance(D, TwistedCodifferential):
        M, noise = D.matrix, D.noise
    else:
        M, noise = np.atleast_2d(np.asarray(D, dtype=complex)), 0.0
    rows, cols = M.shape
    if M.size == 0:
        return Spectrum(np.zeros(0), 0.0, 0, np.zeros((rows, 0)), np.eye(cols, dtype=complex), cols)
    U, s, Vh = np.linalg.svd(M, full_matrices=True)
    tau = rank_tol if rank_tol is not None else rank_threshold(M, noise)
    rank = int(np.sum(s > tau))
    return Spectrum(s, float(tau), rank, U, Vh, cols)


# -- cohomology ---------------------------------------------------------------

@dataclass
class DegreeReport:
    degree: int
    dim_cochains: int
    rank: int
    dim_kernel: int
    dim_H: int
    kappa: float
    gap: float
    reduced: bool
    rank_threshold: float
    sigma_above_threshold: Optional[float]
    sigma_below_threshold: Optional[float]
    laplacian_lambda_min: Optional[float] = None


@dataclass
class CohomologyReport:
    complex_name: str
    rep_label: str
    dim_E: int
    euler_characteristic: int
    unitary: bool
    degrees: list[DegreeReport] = field(default_factory=list)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d.dim_H for d in self.degrees)

    @property
    def kappas(self) -> tuple[float, ...]:
        return tuple(d.kappa for d in self.degrees)

    def euler_audit(self) -> bool:
        return sum((-1) ** d.degree * d.dim_H for d in self.degrees) == self.dim_E * self.euler_characteristic

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def table(self) -> str:
        lines = [f"complex {self.complex_name}  rep {self.rep_label}  dim E = {self.dim_E}",
                 f"{'n':>3} {'dim C^n':>8} {'dim H^n':>8} {'kappa_n':>14} {'rank tol':>10}"]
        for d in self.degrees:
            lines.append(f"{d.degree:>3} {d.dim_cochains:>8} {d.dim_H:>8} {d.kappa:>14.8g} {d.rank_threshold:>10.2e}")
        lines.append(f"euler audit: {'ok' if self.euler_audit() else 'FAILED'}")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


def cohomology(X: EquivariantComplex, pi: Representation,
               rank_tol: Optional[float] = None) -> CohomologyReport:
    if X.presentation is not None and pi.presentation is None:
        pi.check_relators(X.presentation)
    unitary = pi.is_unitary()
    specs = [spectrum(codifferential(X, pi, n), rank_tol) for n in range(X.max_degree + 1)]
    report = CohomologyReport(X.name, pi.label, pi.dim, euler_characteristic(X), unitary)
    for n, sp in enumerate(specs):
        prev_rank = specs[n - 1].rank if n else 0
        above, below = sp.bracket()
        lam = None
        if unitary:
            lam = float(np.linalg.eigvalsh(laplacian(X, pi, n))[0])
        report.degrees.append(DegreeReport(
            degree=n, dim_cochains=pi.dim * X.cells[n], rank=sp.rank, dim_kernel=sp.nullity,
            dim_H=sp.nullity - prev_rank, kappa=sp.kappa, gap=sp.gap, reduced=True,
            rank_threshold=sp.threshold, sigma_above_threshold=above,
            sigma_below_threshold=below, laplacian_lambda_min=lam))
    return report


def kazhdan_constant(X: EquivariantComplex, pi: Representation, n: int,
                     rank_tol: Optional[float] = None) -> float:
    """Smallest nonzero singular value of d^n; inf when d^n is the zero map."""
    return spectrum(codifferential(X, pi, n), rank_tol).kappa


# -- subspaces -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    basis: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.basis, dtype=complex))
        if Q.shape[1] and np.linalg.norm(Q.conj().T @ Q - np.eye(Q.shape[1]), 2) > 1e-12:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", Q)

    @classmethod
    def span(cls, vectors: np.ndarray, tol: Optional[float] = None) -> SubspaceBasis:
        A = np.atleast_2d(np.asarray(vectors, dtype=complex))
        if A.shape[1] == 0:
            return cls(np.zeros((A.shape[0], 0), dtype=complex))
        U, s, _ = np.linalg.svd(A, full_matrices=False)
        tol = max(A.shape) * EPS * (s[0] if s.size else 0) if tol is None else tol
        return cls(U[:, :int(np.sum(s > tol))])

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.conj().T @ x)

    def complement(self) -> SubspaceBasis:
        if self.dim == 0:
            return SubspaceBasis(np.eye(self.ambient, dtype=complex))
        U, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return SubspaceBasis(U[:, self.dim:])


def _check_ambient(V: SubspaceBasis, W: SubspaceBasis) -> None:
    if V.ambient != W.ambient:
        raise ValueError(f"ambient dimensions differ: {V.ambient} vs {W.ambient}")


def closeness(V: SubspaceBasis, W: SubspaceBasis) -> float:
    """Smallest eps with every v in V within eps*||v|| of W: ||(I - P_W) Q_V||."""
    _check_ambient(V, W)
    if V.dim == 0:
        return 0.0
    R = V.basis - W.project(V.basis)
    return float(min(1.0, np.linalg.norm(R, 2)))


def min_projection(V: SubspaceBasis, W: SubspaceBasis) -> float:
    """min over unit v in V of ||P_W v||."""
    _check_ambient(V, W)
    if V.dim == 0:
        return 1.0
    if W.dim < V.dim:
        return 0.0
    return float(np.linalg.svd(W.basis.conj().T @ V.basis, compute_uv=False).min())


def _lower_bound(T: np.ndarray, V: SubspaceBasis) -> float:
    """min over unit v in V of ||T v||."""
    if V.dim == 0:
        return INF
    TV = T @ V.basis
    if TV.shape[0] < V.dim:
        return 0.0
    return float(np.linalg.svd(TV, compute_uv=False).min())


def _require(slack: float, tol: float, name: str, detail: str) -> None:
    if slack < -tol:
        raise LemmaViolation(f"{name}: {detail} (slack {slack:.3g})")


@dataclass
class ClosenessRecord:
    epsilon: float
    c: float
    projection_slack: float
    pythagoras_slack: float
    sqrt_one_minus_c_holds: bool


def closeness_lemma_checks(V: SubspaceBasis, W: SubspaceBasis, tol: float = 1e-9) -> ClosenessRecord:
    """eps = closeness(V, W) and c = min ||P_W v|| satisfy c >= 1 - eps and
    eps <= sqrt(1 - c^2) (from ||v - P_W v||^2 = ||v||^2 - ||P_W v||^2)."""
    eps = closeness(V, W)
    c = min_projection(V, W)
    s1 = c - (1 - eps)
    s2 = math.sqrt(max(0.0, 1 - c * c)) * (1 + 1e-10) - eps
    _require(s1, tol, "projection lemma", "||P_W v|| >= (1 - eps)||v|| fails")
    _require(s2, tol, "pythagoras lemma", "V is not sqrt(1 - c^2)-close to W")
    return ClosenessRecord(eps, c, s1, s2, eps <= math.sqrt(max(0.0, 1 - c)) + tol)


@dataclass
class PerturbationRecord:
    lower_bound_T: float
    operator_gap: float
    lower_bound_S: float
    perturbation_slack: float
    transfer_bound: Optional[float]
    transfer_slack: Optional[float]
    image_delta: float
    image_closeness: float
    image_slack: float
    kernel_delta: float
    kernel_closeness: float
    kernel_slack: float


def bounded_below_perturbation_check(T: np.ndarray, S: np.ndarray, V: SubspaceBasis,
                                     W: Optional[SubspaceBasis] = None,
                                     rank_tol: Optional[float] = None,
                                     tol: float = 1e-10) -> PerturbationRecord:
    """Check the operator perturbation inequalities for one pair (T, S).

    * S is bounded below on V by C - eps, C = lower bound of T on V,
      eps = ||T - S||;
    * if W is given and S is bounded below by C_W on W, S is bounded below on
      V by C_W - e - e||S|| with e = closeness(V, W);
    * im S is (eps / sigma_min^+(S))-close to im T;
    * ker T is (eps / sigma_min^+(S))-close to ker S.
    """
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    S = np.atleast_2d(np.asarray(S, dtype=complex))
    if T.shape != S.shape or V.ambient != T.shape[1]:
        raise ValueError("T, S and V must act on the same space")
    C = _lower_bound(T, V)
    eps = float(np.linalg.norm(T - S, 2))
    lower_S = _lower_bound(S, V)
    slack = lower_S - (C - eps) if math.isfinite(C) else INF
    _require(slack, tol, "perturbation lemma", "S is not bounded below by C - eps on V")

    transfer = transfer_slack = None
    if W is not None:
        e = closeness(V, W)
        transfer = _lower_bound(S, W) - e - e * float(np.linalg.norm(S, 2))
        transfer_slack = lower_S - transfer if math.isfinite(transfer) else INF
        _require(transfer_slack, tol, "transfer lemma", "S is not bounded below by C - e - e||S|| on V")

    sS, sT = spectrum(S, rank_tol), spectrum(T, rank_tol)
    delta = eps / sS.gap if sS.rank else (0.0 if eps == 0 else INF)
    img = closeness(SubspaceBasis(sS.image()), SubspaceBasis(sT.image()))
    ker = closeness(SubspaceBasis(sT.kernel()), SubspaceBasis(sS.kernel()))
    img_slack = delta - img
    ker_slack = delta - ker
    _require(img_slack, tol, "image closeness lemma", "im S is not delta-close to im T")
    _require(ker_slack, tol, "kernel closeness lemma", "ker T is not delta-close to ker S")
    return PerturbationRecord(C, eps, lower_S, slack, transfer, transfer_slack,
                              delta, img, img_slack, delta, ker, ker_slack)


@dataclass
class QuotientRecord:
    epsilon: float
    delta: float
    lower_bound_T: float
    lower_bound_S: float
    representative_slack: float
    comparison_slack: float


def quotient_comparison_check(T_lift: np.ndarray, S_lift: np.ndarray, V: SubspaceBasis,
                              W: SubspaceBasis, tol: float = 1e-9) -> QuotientRecord:
    """Compare operators on E/V and E/W given by lifts vanishing on V and W.

    With eps = closeness(V, W) and delta = ||T_lift - S_lift||: minimal
    representatives satisfy ||v'|| >= (1 - 2 eps)||w'||, and if T is bounded
    below by C on E/V then S is bounded below by C(1 - 2 eps) - delta on E/W.
    In a Hilbert space the quotient E/V is the orthogonal complement of V.
    """
    _check_ambient(V, W)
    T = np.atleast_2d(np.asarray(T_lift, dtype=complex))
    S = np.atleast_2d(np.asarray(S_lift, dtype=complex))
    if V.dim and np.linalg.norm(T @ V.basis, 2) > 1e-10 * max(1.0, np.linalg.norm(T, 2)):
        raise ValueError("T_lift does not vanish on V")
    if W.dim and np.linalg.norm(S @ W.basis, 2) > 1e-10 * max(1.0, np.linalg.norm(S, 2)):
        raise ValueError("S_lift does not vanish on W")
    eps = closeness(V, W)
    delta = float(np.linalg.norm(T - S, 2))
    Vp, Wp = V.complement(), W.complement()
    rep_slack = min_projection(Wp, Vp) - (1 - 2 * eps)
    _require(rep_slack, tol, "minimal representative lemma", "||v'|| >= (1 - 2 eps)||w'|| fails")
    C = _lower_bound(T, Vp)
    lower_S = _lower_bound(S, Wp)
    slack = lower_S - (C * (1 - 2 * eps) - delta) if math.isfinite(C) else INF
    _require(slack, tol, "quotient comparison", "S is not bounded below by C(1 - 2 eps) - delta")
    return QuotientRecord(eps, delta, C, lower_S, rep_slack, slack)


# -- deformations -------------------------------------------------------------------

def generator_norm_bound(pi: Representation) -> float:
    return max(float(np.linalg.norm(m, 2)) for m in pi.symmetric_images())


def deformation_bound(X: EquivariantComplex, pi: Representation, eps: float, n: int) -> float:
    """Upper bound on ||d^n_pi - d^n_rho|| valid for every eps-deformation rho.

    Each word w contributes ||pi(w) - rho(w)|| <= len(w) eps B^(len(w)-1) with
    B = max_s ||pi(s)|| + eps (telescoping over the letters); the block bounds
    are combined through the spectral norm of the nonnegative bound matrix.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0 or n == X.max_degree:
        return 0.0
    B = generator_norm_bound(pi) + eps
    bd = X.boundary(n + 1)
    bounds = np.zeros((len(bd), X.cells[n]))
    for i, row in enumerate(bd):
        for j, entry in enumerate(row):
            for w, c in entry.terms:
                L = len(w)
                if L:
                    bounds[i, j] += abs(c) * L * eps * B ** (L - 1)
    return float(np.linalg.norm(bounds, 2))


@dataclass
class KernelCloseness:
    bound: float
    measured: float
    comparable: bool
    drift: float
    kappa: float


def kernel_closeness_bound(X: EquivariantComplex, pi: Representation, rho: Representation, n: int,
                           rank_tol: Optional[float] = None) -> KernelCloseness:
    """ker d^n_rho is (||d^n_pi - d^n_rho|| / kappa_n(pi))-close to ker d^n_pi."""
    Dp, Dr = codifferential(X, pi, n), codifferential(X, rho, n)
    sp, sr = spectrum(Dp, rank_tol), spectrum(Dr, rank_tol)
    kappa = sp.kappa
    if kappa == 0:
        raise ValueError("zero Kazhdan constant: rank threshold classifies a nonzero map as zero")
    drift = float(np.linalg.norm(Dp.matrix - Dr.matrix, 2)) if Dp.matrix.size else 0.0
    bound = 0.0 if math.isinf(kappa) else drift / kappa
    measured = closeness(SubspaceBasis(sr.kernel()), SubspaceBasis(sp.kernel()))
    return KernelCloseness(bound, measured, sp.nullity == sr.nullity, drift, kappa)


@dataclass
class SufficientEpsilon:
    epsilon: float
    case: str
    drift_degree: int
    kappa_drift: float
    margin: float
    diagnostic: str = ""


def _chain_inputs(X, pi, n, rank_tol):
    spec_n = spectrum(codifferential(X, pi, n), rank_tol)
    spec_prev = spectrum(codifferential(X, pi, n - 1), rank_tol) if n >= 1 else None
    dim_H = spec_n.nullity - (spec_prev.rank if spec_prev else 0)
    if spec_prev is None or spec_prev.rank == 0:
        case = "injective"          # d^{n-1} = 0: need d^n_rho injective
    elif spec_n.rank == 0:
        case = "surjective"         # d^n = 0: need d^{n-1}_rho onto C^n
    else:
        case = "general"
    return spec_n, spec_prev, dim_H, case


def certified_margin(X: EquivariantComplex, pi: Representation, n: int, eps: float,
                     rank_tol: Optional[float] = None, _inputs=None) -> tuple[float, float, str]:
    """Guaranteed lower bound for the operator whose injectivity forces H^n(rho) = 0.

    Returns ``(margin, kappa_drift, case)``.  ``margin > 0`` certifies vanishing
    for every eps-deformation.  Cases:

    * ``injective``: d^{n-1}_pi = 0 so d^n_pi is injective with bound kappa_n;
      margin = kappa_n - delta_n.
    * ``surjective`` / ``general``: the adjoint of d^{n-1} is bounded below by
      kappa_{n-1} on C^n / (ker d^n_pi)^perp.  im (d^n_pi)* is
      eta-close to im (d^n_rho)* with eta = delta_n / kappa_n, so by quotient
      comparison margin = kappa_{n-1} (1 - 2 eta) - delta_{n-1}.
    """
    spec_n, spec_prev, _, case = _inputs or _chain_inputs(X, pi, n, rank_tol)
    delta_n = deformation_bound(X, pi, eps, n)
    if case == "injective":
        margin = spec_n.kappa - delta_n
        return margin, delta_n, case
    delta_prev = deformation_bound(X, pi, eps, n - 1)
    eta = 0.0 if math.isinf(spec_n.kappa) else delta_n / spec_n.kappa
    k_prev = spec_prev.kappa
    margin = k_prev * (1 - 2 * eta) - delta_prev
    return margin, 2 * eta * k_prev + delta_prev, case


def kappa_drift_bound(X: EquivariantComplex, pi: Representation, n: int, eps: float,
                      rank_tol: Optional[float] = None) -> float:
    """c(eps) with kappa_{n-1}(rho) >= kappa_{n-1}(pi) - c(eps) (kappa_n in the injective case)."""
    return certified_margin(X, pi, n, eps, rank_tol)[1]


def sufficient_epsilon(X: EquivariantComplex, pi: Representation, n: int,
                       rank_tol: Optional[float] = None, lo: float = 1e-8, hi: float = 10.0,
                       steps: int = 60) -> SufficientEpsilon:
    """Largest eps found by log-scale bisection on [lo, hi] at which the
    certified margin stays positive (above a 1e-12 relative noise floor)."""
    inputs = _chain_inputs(X, pi, n, rank_tol)
    if inputs[2] != 0:
        raise HypothesisError(f"dim H^{n} = {inputs[2]} != 0; nothing to preserve")
    spec_n, spec_prev, _, case = inputs
    drift_degree = n if case == "injective" else n - 1
    # singular values carry relative error ~ machine eps; demand a margin
    # clearly above that noise so a computed kappa a few ulps too large
    # cannot certify past the true value
    ref = spec_n.kappa if case == "injective" else spec_prev.kappa
    floor = NOISE_FLOOR * ref

    def ok(e):
        return certified_margin(X, pi, n, e, rank_tol, inputs)[0] > floor

    if not ok(lo):
        m, c, _ = certified_margin(X, pi, n, lo, rank_tol, inputs)
        return SufficientEpsilon(0.0, case, drift_degree, c, m,
                                 f"certified chain does not close even at eps = {lo:g}")
    if ok(hi):
        a = hi
    else:
        a, b = math.log(lo), math.log(hi)
        for _ in range(steps):
            mid = 0.5 * (a + b)
            if ok(math.exp(mid)):
                a = mid
            else:
                b = mid
        a = math.exp(a)
        if not ok(a):
            a = lo
    m, c, _ = certified_margin(X, pi, n, a, rank_tol, inputs)
    return SufficientEpsilon(a, case, drift_degree, c, m)


@dataclass
class DeformationReport:
    degree: int
    epsilon_requested: float
    epsilon_measured: float
    codifferential_drift: float
    certified_drift_bound: float
    dims_before: tuple[int, ...]
    dims_after: tuple[int, ...]
    kappa_before: float
    kappa_after: float
    kernel_closeness_measured: float
    kernel_closeness_bound: float
    kernels_comparable: bool
    vanishing_preserved: bool
    unitary: bool

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def deformation_report(X: EquivariantComplex, pi: Representation, rho: Representation, n: int,
                       eps_requested: float, rank_tol: Optional[float] = None,
                       before: Optional[CohomologyReport] = None) -> DeformationReport:
    before = before or cohomology(X, pi, rank_tol)
    after = cohomology(X, rho, rank_tol)
    kc = kernel_closeness_bound(X, pi, rho, n, rank_tol)
    return DeformationReport(
        degree=n,
        epsilon_requested=eps_requested,
        epsilon_measured=deformation_distance(pi, rho),
        codifferential_drift=kc.drift,
        certified_drift_bound=deformation_bound(X, pi, eps_requested, n),
        dims_before=before.dims, dims_after=after.dims,
        kappa_before=before.kappas[n], kappa_after=after.kappas[n],
        kernel_closeness_measured=kc.measured, kernel_closeness_bound=kc.bound,
        kernels_comparable=kc.comparable,
        vanishing_preserved=before.dims[n] == 0 and after.dims[n] == 0,
        unitary=pi.is_unitary() and rho.is_unitary())


# -- Laplacian, duality, rigidity -------------------------------------------------

def laplacian_gap_threshold(X: EquivariantComplex, pi: Representation, n: int) -> float:
    scale = codifferential(X, pi, n).scale ** 2
    if n >= 1:
        scale += codifferential(X, pi, n - 1).scale ** 2
    return 1e-9 * scale


def laplacian_criterion(X: EquivariantComplex, pi: Representation, n: int,
                        gap_tol: Optional[float] = None) -> bool:
    """True iff the n-th Laplacian is invertible (smallest eigenvalue above the gap threshold)."""
    if not pi.is_unitary():
        raise NonUnitaryError("the Laplacian criterion is only established for unitary coefficients")
    lam = np.linalg.eigvalsh(laplacian(X, pi, n))
    tau = laplacian_gap_threshold(X, pi, n) if gap_tol is None else gap_tol
    return bool(lam[0] > tau)


@dataclass
class DualityRecord:
    degree: int
    dim_H: int
    lower_bound: float
    bounded_below: bool
    kappa_prev: Optional[float]
    consistent: bool


def duality_check(X: EquivariantComplex, pi: Representation, n: int,
                  rank_tol: Optional[float] = None, tol: float = 1e-8) -> DualityRecord:
    """H^n = 0 iff (d^{n-1})* is bounded below on ker d^n; the bound is then kappa_{n-1}."""
    sn = spectrum(codifferential(X, pi, n), rank_tol)
    K = SubspaceBasis(sn.kernel())
    if n >= 1:
        Dprev = codifferential(X, pi, n - 1)
        sp = spectrum(Dprev, rank_tol)
        prev_rank, kappa_prev, tau = sp.rank, sp.kappa, sp.threshold
        lower = _lower_bound(Dprev.matrix.conj().T, K)
    else:
        prev_rank, kappa_prev, tau = 0, None, 0.0
        lower = INF if K.dim == 0 else 0.0
    dim_H = sn.nullity - prev_rank
    bounded = lower > tau
    consistent = (dim_H == 0) == bounded
    if consistent and n >= 1 and dim_H == 0 and K.dim:
        consistent = abs(lower - kappa_prev) <= tol
    if not consistent:
        raise LemmaViolation(f"duality: dim H^{n} = {dim_H} but adjoint lower bound is {lower:.3g}"
                             f" (kappa_{n - 1} = {kappa_prev})")
    return DualityRecord(n, dim_H, lower, bounded, kappa_prev, consistent)


@dataclass
class WeilCertificate:
    rigid: bool
    dim_H1: int
    kappa_0: float
    kappa_1: float

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def weil_rigidity_check(P: GroupPresentation, phi: Representation,
                        rank_tol: Optional[float] = None) -> WeilCertificate:
    """Certify local rigidity through vanishing of H^1 with adjoint coefficients."""
    phi.check_relators(P)
    X = presentation_complex(P)
    ad = adjoint_rep(phi)
    rep = cohomology(X, ad, rank_tol)
    return WeilCertificate(rep.dims[1] == 0, rep.dims[1], rep.kappas[0], rep.kappas[1])
