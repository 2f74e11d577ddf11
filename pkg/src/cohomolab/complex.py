"""Equivariant cell complexes given by a fundamental domain.

A complex stores, for each degree ``k``, the number of orbit cells and a
boundary matrix whose entries are group ring elements.  Entry ``(i, j)`` of
``boundary(k)`` is the coefficient of the ``j``-th ``(k-1)``-cell in the
boundary of the ``i``-th ``k``-cell.  Evaluating the entries under a
representation gives the twisted codifferential ``d^{k-1}``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .presentation import (
    GroupPresentation,
    GroupRingElement,
    PresentationError,
    Word,
    fox_derivative,
    preset,
)

BoundaryMatrix = tuple[tuple[GroupRingElement, ...], ...]


class ComplexFormatError(ValueError):
    """Parse error in a complex file; carries the offending line number."""

    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


class DimensionMismatchError(ValueError):
    pass


def _incidence(matrix: BoundaryMatrix, columns: int) -> int:
    counts = [0] * columns
    for row in matrix:
        for j, entry in enumerate(row):
            counts[j] += len(entry.terms)
    return max(counts, default=0)


@dataclass(frozen=True)
class EquivariantComplex:
    cells: tuple[int, ...]
    boundaries: tuple[BoundaryMatrix, ...]
    generator_count: int
    name: str = ""
    presentation: Optional[GroupPresentation] = None

    def __post_init__(self):
        cells = tuple(int(c) for c in self.cells)
        if not cells or any(c < 1 for c in cells):
            raise DimensionMismatchError("every degree needs at least one orbit cell")
        if len(self.boundaries) != len(cells) - 1:
            raise DimensionMismatchError(
                f"{len(cells)} degrees need {len(cells) - 1} boundary matrices, "
                f"got {len(self.boundaries)}")
        bds = []
        for k, mat in enumerate(self.boundaries, start=1):
            mat = tuple(tuple(row) for row in mat)
            if len(mat) != cells[k] or any(len(row) != cells[k - 1] for row in mat):
                raise DimensionMismatchError(
                    f"boundary {k} must be {cells[k]}x{cells[k - 1]}")
            for row in mat:
                for entry in row:
                    if entry.max_generator() >= self.generator_count:
                        raise DimensionMismatchError(
                            f"boundary {k} uses a generator outside 0..{self.generator_count - 1}")
            bds.append(mat)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "boundaries", tuple(bds))

    @property
    def max_degree(self) -> int:
        return len(self.cells) - 1

    def boundary(self, k: int) -> BoundaryMatrix:
        """Boundary from degree k to degree k-1, for 1 <= k <= max_degree."""
        if not 1 <= k <= self.max_degree:
            raise IndexError(f"no boundary in degree {k}")
        return self.boundaries[k - 1]

    @property
    def incidence_bound(self) -> tuple[int, ...]:
        """M_k per degree k (entry 0 is unused and set to 0)."""
        return (0,) + tuple(_incidence(self.boundary(k), self.cells[k - 1])
                            for k in range(1, self.max_degree + 1))

    def to_text(self) -> str:
        lines = [f"degrees: {self.max_degree}", f"gens: {self.generator_count}"]
        lines += [f"cells {k}: {c}" for k, c in enumerate(self.cells)]
        for k in range(1, self.max_degree + 1):
            for i, row in enumerate(self.boundary(k)):
                for j, entry in enumerate(row):
                    if not entry.is_zero():
                        lines.append(f"boundary {k} {i} {j}: {entry}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_text())


def euler_characteristic(X: EquivariantComplex) -> int:
    return sum((-1) ** k * c for k, c in enumerate(X.cells))


def presentation_complex(P: GroupPresentation) -> EquivariantComplex:
    """One vertex, an edge per generator, a 2-cell per relator."""
    edges = tuple((GroupRingElement(((Word.generator(g), 1), (Word(), -1))),)
                  for g in range(P.generator_count))
    boundaries: list[BoundaryMatrix] = [edges]
    cells = [1, P.generator_count]
    if P.relators:
        boundaries.append(tuple(
            tuple(fox_derivative(r, g) for g in range(P.generator_count))
            for r in P.relators))
        cells.append(len(P.relators))
    return EquivariantComplex(tuple(cells), tuple(boundaries), P.generator_count,
                              name=P.name, presentation=P)


def from_simplices(cells: Sequence[int], simplices: Sequence[Sequence[Sequence[tuple[int, Word]]]],
                   generator_count: int, name: str = "",
                   presentation: Optional[GroupPresentation] = None) -> EquivariantComplex:
    """Build a complex from simplicial face data.

    ``simplices[k-1][s]`` lists the faces of the ``s``-th orbit ``k``-simplex
    in order ``i = 0..k`` as ``(cell, carrier)``: face ``i`` equals
    ``carrier . cell`` where ``cell`` indexes the orbit representatives of
    degree ``k-1``.  Face ``i`` contributes ``(-1)^i carrier`` to the entry.
    """
    boundaries = []
    for k, faces_of in enumerate(simplices, start=1):
        rows = []
        for faces in faces_of:
            if len(faces) != k + 1:
                raise DimensionMismatchError(f"a {k}-simplex has {k + 1} faces, got {len(faces)}")
            row = [[] for _ in range(cells[k - 1])]
            for i, (cell, carrier) in enumerate(faces):
                if not 0 <= cell < cells[k - 1]:
                    raise DimensionMismatchError(f"face cell {cell} out of range in degree {k - 1}")
                row[cell].append((carrier, (-1) ** i))
            rows.append(tuple(GroupRingElement(tuple(t)) for t in row))
        boundaries.append(tuple(rows))
    return EquivariantComplex(tuple(cells), tuple(boundaries), generator_count, name, presentation)


def simplicial_torus_faces() -> list[list[list[tuple[int, Word]]]]:
    """Face data of the Z^2-invariant triangulation of the plane.

    One vertex x; edges a=(x, ax), b=(x, bx), c=(x, abx); triangles
    (x, ax, abx) and (x, bx, abx).
    """
    w = Word.parse
    edges = [
        [(0, w("a")), (0, w("1"))],
        [(0, w("b")), (0, w("1"))],
        [(0, w("ab")), (0, w("1"))],
    ]
    triangles = [
        [(1, w("a")), (2, w("1")), (0, w("1"))],
        [(0, w("b")), (2, w("1")), (1, w("1"))],
    ]
    return [edges, triangles]


def simplicial_torus() -> EquivariantComplex:
    return from_simplices((1, 3, 2), simplicial_torus_faces(), 2, name="T2",
                          presentation=preset("Z2"))


def complex_preset(name: str) -> EquivariantComplex:
    if name == "T2":
        return simplicial_torus()
    return presentation_complex(preset(name))


PRESET_NAMES = ("Z", "F2", "Z2", "Z3", "T2")

_CELLS = re.compile(r"cells\s+(\d+)$")
_BOUNDARY = re.compile(r"boundary\s+(\d+)\s+(\d+)\s+(\d+)$")
_SIMPLEX = re.compile(r"simplex\s+(\d+)\s+(\d+)$")


def parse_complex(text: str, name: str = "") -> EquivariantComplex:
    """Read the text format written by :meth:`EquivariantComplex.to_text`.

    Besides ``boundary k i j: expr`` lines, ``simplex k s: c0@w0 c1@w1 ...``
    lines give the faces of a ``k``-simplex and are converted to boundary
    rows with alternating signs.  Entries never mentioned are zero.
    """
    n_max = gens = None
    cells: dict[int, int] = {}
    entries: dict[tuple[int, int, int], GroupRingElement] = {}
    simplex_rows: dict[tuple[int, int], list[tuple[int, Word]]] = {}
    where: dict[object, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ComplexFormatError("expected 'key: value'", lineno)
        key = " ".join(key.split())
        try:
            if key == "degrees":
                n_max = int(value)
            elif key == "gens":
                gens = int(value)
            elif m := _CELLS.match(key):
                cells[int(m[1])] = int(value)
            elif m := _BOUNDARY.match(key):
                idx = (int(m[1]), int(m[2]), int(m[3]))
                if idx in entries:
                    raise ComplexFormatError(f"duplicate entry boundary {idx}", lineno)
                entries[idx] = GroupRingElement.parse(value)
                where[idx] = lineno
            elif m := _SIMPLEX.match(key):
                faces = []
                for tok in value.split():
                    cell, at, word = tok.partition("@")
                    if not at:
                        raise ComplexFormatError(f"face {tok!r} is not cell@word", lineno)
                    faces.append((int(cell), Word.parse(word)))
                simplex_rows[(int(m[1]), int(m[2]))] = faces
                where[(int(m[1]), int(m[2]))] = lineno
            else:
                raise ComplexFormatError(f"unknown key {key!r}", lineno)
        except (PresentationError, ValueError) as exc:
            if isinstance(exc, ComplexFormatError):
                raise
            raise ComplexFormatError(str(exc), lineno) from None
    if n_max is None:
        raise ComplexFormatError("missing 'degrees:' header")
    missing = [k for k in range(n_max + 1) if k not in cells]
    if missing:
        raise ComplexFormatError(f"missing cell counts for degrees {missing}")
    counts = tuple(cells[k] for k in range(n_max + 1))

    acc: dict[tuple[int, int, int], GroupRingElement] = dict(entries)
    for (k, s), faces in simplex_rows.items():
        if not 1 <= k <= n_max or not 0 <= s < counts[k] or len(faces) != k + 1:
            raise DimensionMismatchError(f"simplex {k} {s} (line {where[(k, s)]}) does not fit the cell counts")
        for i, (cell, carrier) in enumerate(faces):
            idx = (k, s, cell)
            acc[idx] = acc.get(idx, GroupRingElement()) + GroupRingElement.of(carrier, (-1) ** i)

    for (k, i, j), entry in acc.items():
        if not 1 <= k <= n_max or not 0 <= i < counts[k] or not 0 <= j < counts[k - 1]:
            line = where.get((k, i, j))
            raise DimensionMismatchError(
                f"boundary {k} {i} {j}{f' (line {line})' if line else ''} is outside "
                f"the {counts[k] if 0 <= k <= n_max else '?'}x"
                f"{counts[k - 1] if 1 <= k <= n_max else '?'} shape")
    if gens is None:
        gens = max((e.max_generator() for e in acc.values()), default=-1) + 1
        gens = max(gens, 1)
    boundaries = tuple(
        tuple(tuple(acc.get((k, i, j), GroupRingElement()) for j in range(counts[k - 1]))
              for i in range(counts[k]))
        for k in range(1, n_max + 1))
    return EquivariantComplex(counts, boundaries, gens, name=name)


def from_file(path) -> EquivariantComplex:
    path = Path(path)
    return parse_complex(path.read_text(), name=path.stem)
