"""Twisted codifferentials, Laplacians and mixed cochain norms.

Cochains of degree ``n`` are stored as flat complex vectors of length
``dim E * cells[n]``; the block of cell ``c`` occupies entries
``c*dim E .. (c+1)*dim E``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .complex import EquivariantComplex
from .presentation import Word
from .rep import Representation, evaluate


class NonUnitaryWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class TwistedCodifferential:
    degree: int
    matrix: np.ndarray
    block: int
    scale: float
    complex_name: str = ""
    rep_label: str = ""
    noise: float = 0.0

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def is_zero_map(self) -> bool:
        return self.matrix.size == 0 or not np.any(self.matrix)


def _check_degree(X: EquivariantComplex, n: int) -> None:
    if not 0 <= n <= X.max_degree:
        raise IndexError(f"degree {n} outside 0..{X.max_degree}")


def codifferential(X: EquivariantComplex, pi: Representation, n: int) -> TwistedCodifferential:
    """Matrix of d^n : C^n -> C^{n+1}; block (i, j) evaluates boundary entry (i, j) of degree n+1.

    ``scale`` is the spectral norm of the matrix of block bounds
    sum |c| ||pi(w)||, i.e. the size of the map before any cancellation.
    ``noise`` estimates the absolute error of the computed entries: unit
    roundoff (or the relator defect of pi, if larger) times the same bound
    with each word weighted by 1 + len(w) for the products that form it.
    """
    _check_degree(X, n)
    if pi.generator_count < X.generator_count:
        raise ValueError(f"complex uses {X.generator_count} generators, representation has "
                         f"{pi.generator_count}")
    d = pi.dim
    cols = X.cells[n]
    if n == X.max_degree:
        return TwistedCodifferential(n, np.zeros((0, d * cols), dtype=complex), d, 0.0,
                                     X.name, pi.label)
    bd = X.boundary(n + 1)
    rows = X.cells[n + 1]
    M = np.zeros((d * rows, d * cols), dtype=complex)
    bounds = np.zeros((rows, cols))
    weighted = np.zeros((rows, cols))
    cache: dict[Word, np.ndarray] = {}
    norms: dict[Word, float] = {}
    for i, row in enumerate(bd):
        for j, entry in enumerate(row):
            blk = M[i * d:(i + 1) * d, j * d:(j + 1) * d]
            for w, c in entry.terms:
                if w not in cache:
                    cache[w] = evaluate(pi, w)
                    norms[w] = float(np.linalg.norm(cache[w], 2))
                blk += c * cache[w]
                bounds[i, j] += abs(c) * norms[w]
                weighted[i, j] += abs(c) * (1 + len(w)) * norms[w]
    scale = float(np.linalg.norm(bounds, 2)) if bounds.size else 0.0
    P = X.presentation or pi.presentation
    defect = max(pi.relator_errors(P), default=0.0) if P is not None else 0.0
    unit = max(float(np.finfo(float).eps), defect)
    noise = unit * float(np.linalg.norm(weighted, 2)) if weighted.size else 0.0
    return TwistedCodifferential(n, M, d, scale, X.name, pi.label, noise)


def laplacian(X: EquivariantComplex, pi: Representation, n: int) -> np.ndarray:
    """d^{n-1} (d^{n-1})* + (d^n)* d^n with conjugate-transpose adjoints."""
    _check_degree(X, n)
    if not pi.is_unitary():
        warnings.warn(f"{pi.label or 'representation'} is not unitary; the Laplacian criterion "
                      "is only meaningful for unitary coefficients", NonUnitaryWarning, stacklevel=2)
    D = codifferential(X, pi, n).matrix
    L = D.conj().T @ D
    if n >= 1:
        A = codifferential(X, pi, n - 1).matrix
        L = L + A @ A.conj().T
    return 0.5 * (L + L.conj().T)


def _block_norms(M: np.ndarray, block: int) -> np.ndarray:
    r, c = M.shape
    if r % block or c % block:
        raise ValueError(f"matrix shape {M.shape} is not a multiple of block size {block}")
    out = np.zeros((r // block, c // block))
    for i in range(r // block):
        for j in range(c // block):
            out[i, j] = np.linalg.norm(M[i * block:(i + 1) * block, j * block:(j + 1) * block], 2)
    return out


def operator_norm(M: np.ndarray, p=2, block: int = 1) -> float:
    """Operator norm between mixed l_p-over-cells cochain spaces.

    Exact for p = 2.  For p in {1, inf} returns an upper bound U with
    ||M|| <= U <= (number of blocks) * ||M||, from the column (p = 1) or row
    (p = inf) sums of block spectral norms.
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.size == 0:
        return 0.0
    if p == 2:
        return float(np.linalg.norm(M, 2))
    B = _block_norms(M, block)
    if p == 1:
        return float(B.sum(axis=0).max())
    if p in (np.inf, "inf", float("inf")):
        return float(B.sum(axis=1).max())
    raise ValueError(f"unsupported p={p!r}; use 1, 2 or inf")


def cochain_norm(f: np.ndarray, block: int, p=2) -> float:
    """(sum over cells of ||f(cell)||^p)^(1/p) with Euclidean norms on E."""
    f = np.asarray(f)
    if f.ndim != 1 or f.size % block:
        raise ValueError(f"cochain of length {f.size} does not split into blocks of {block}")
    per_cell = np.linalg.norm(f.reshape(-1, block), axis=1)
    if p in (np.inf, "inf", float("inf")):
        return float(per_cell.max(initial=0.0))
    return float(np.sum(per_cell ** p) ** (1.0 / p))


def apply_simplicial_codifferential(faces: Sequence[Sequence[tuple[int, Word]]],
                                    pi: Representation, f: np.ndarray, cells: int) -> np.ndarray:
    """d f(s) = sum_i (-1)^i pi(carrier_i) f(face_i), straight from face data.

    ``faces[s]`` lists the faces of the s-th simplex of the target degree;
    ``cells`` is the number of orbit cells in the source degree.
    """
    d = pi.dim
    f = np.asarray(f, dtype=complex).reshape(cells, d)
    out = np.zeros((len(faces), d), dtype=complex)
    for s, fs in enumerate(faces):
        for i, (cell, carrier) in enumerate(fs):
            out[s] += (-1) ** i * (evaluate(pi, carrier) @ f[cell])
    return out.ravel()


def write_matrix(M: np.ndarray, path) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    for row in M:
        lines.append(" ".join(f"{float(z.real):.17g} {float(z.imag):.17g}j" for z in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    rows, cols = int(tokens[0]), int(tokens[1])
    vals = tokens[2:]
    if len(vals) != 2 * rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(vals) // 2}")
    data = [float(vals[2 * k]) + 1j * float(vals[2 * k + 1].rstrip("j")) for k in range(rows * cols)]
    return np.array(data, dtype=complex).reshape(rows, cols)
