"""Words in free groups, group presentations and Fox derivatives.

Words are stored as tuples of ``(generator, sign)`` pairs.  The text form
uses lowercase letters for generators and uppercase letters for their
inverses, so ``abAB`` is the commutator of the first two generators.
"""

from __future__ import annotations

import string
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

MAX_RELATOR_LENGTH = 10_000

_LOWER = string.ascii_lowercase


class PresentationError(ValueError):
    """Malformed word, relator or presentation file."""


def letter_name(gen: int, sign: int = 1) -> str:
    if not 0 <= gen < len(_LOWER):
        raise PresentationError(f"generator index {gen} has no letter name")
    c = _LOWER[gen]
    return c if sign > 0 else c.upper()


def free_reduce(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[tuple[int, int]] = []
    for gen, sign in letters:
        if out and out[-1][0] == gen and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((gen, sign))
    return tuple(out)


@dataclass(frozen=True, order=True)
class Word:
    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        letters = tuple((int(g), int(s)) for g, s in self.letters)
        for g, s in letters:
            if g < 0 or s not in (1, -1):
                raise PresentationError(f"bad letter {(g, s)}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> Word:
        """Parse ``abAB`` style text; ``1`` or an empty string is the identity."""
        text = text.strip()
        if text in ("", "1"):
            return cls()
        letters = []
        for ch in text:
            if ch in _LOWER:
                letters.append((_LOWER.index(ch), 1))
            elif ch.lower() in _LOWER:
                letters.append((_LOWER.index(ch.lower()), -1))
            else:
                raise PresentationError(f"unexpected character {ch!r} in word {text!r}")
        return cls(tuple(letters))

    @classmethod
    def generator(cls, gen: int, sign: int = 1) -> Word:
        return cls(((gen, sign),))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(free_reduce(self.letters + other.letters))

    def inverse(self) -> Word:
        return Word(tuple((g, -s) for g, s in reversed(self.letters)))

    def reduced(self) -> Word:
        return Word(free_reduce(self.letters))

    def is_reduced(self) -> bool:
        return free_reduce(self.letters) == self.letters

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def exponent_sums(self, generator_count: int) -> list[int]:
        sums = [0] * generator_count
        for g, s in self.letters:
            sums[g] += s
        return sums

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return "".join(letter_name(g, s) for g, s in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


IDENTITY = Word()


@dataclass(frozen=True)
class GroupRingElement:
    """Integer combination of freely reduced words, kept in canonical order."""

    terms: tuple[tuple[Word, int], ...] = ()

    def __post_init__(self):
        acc: dict[Word, int] = defaultdict(int)
        for w, c in self.terms:
            acc[w.reduced()] += int(c)
        terms = tuple(sorted(((w, c) for w, c in acc.items() if c != 0),
                             key=lambda t: (len(t[0]), t[0].letters)))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, word: Word, coefficient: int = 1) -> GroupRingElement:
        return cls(((word, coefficient),))

    @classmethod
    def parse(cls, text: str) -> GroupRingElement:
        """Parse ``+1*1 + -1*abA`` style expressions."""
        terms = []
        for chunk in text.split("+"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if "*" not in chunk:
                raise PresentationError(f"term {chunk!r} is not of the form c*word")
            coeff, word = chunk.split("*", 1)
            try:
                c = int(coeff.strip())
            except ValueError:
                raise PresentationError(f"bad coefficient in term {chunk!r}") from None
            terms.append((Word.parse(word), c))
        return cls(tuple(terms))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        return GroupRingElement(self.terms + other.terms)

    def __neg__(self) -> GroupRingElement:
        return GroupRingElement(tuple((w, -c) for w, c in self.terms))

    def __sub__(self, other: GroupRingElement) -> GroupRingElement:
        return self + (-other)

    def __mul__(self, other: GroupRingElement) -> GroupRingElement:
        return GroupRingElement(tuple((u * v, a * b)
                                      for u, a in self.terms for v, b in other.terms))

    def left_mul(self, word: Word) -> GroupRingElement:
        return GroupRingElement(tuple((word * w, c) for w, c in self.terms))

    def augmentation(self) -> int:
        return sum(c for _, c in self.terms)

    def max_generator(self) -> int:
        return max((w.max_generator() for w, _ in self.terms), default=-1)

    def __str__(self) -> str:
        if not self.terms:
            return ""
        return " + ".join(f"{c:+d}*{w}" for w, c in self.terms)


ZERO = GroupRingElement()
ONE = GroupRingElement.of(IDENTITY)


def fox_derivative(relator: Word, gen: int) -> GroupRingElement:
    """Fox derivative of ``relator`` with respect to generator ``gen``.

    Uses d(uv) = du + u dv with dg/dg = 1 and d(g^-1)/dg = -g^-1.
    """
    if gen < 0:
        raise PresentationError(f"invalid generator index {gen}")
    terms = []
    prefix = IDENTITY
    for g, s in relator:
        if g == gen:
            if s > 0:
                terms.append((prefix, 1))
            else:
                terms.append((prefix * Word.generator(g, -1), -1))
        prefix = prefix * Word.generator(g, s)
    return GroupRingElement(tuple(terms))


@dataclass(frozen=True)
class GroupPresentation:
    generator_count: int
    relators: tuple[Word, ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.generator_count < 1:
            raise PresentationError("a presentation needs at least one generator")
        rels = tuple(self.relators)
        for r in rels:
            if not r.letters:
                raise PresentationError("relators must be nonempty")
            if not r.is_reduced():
                raise PresentationError(f"relator {r} is not freely reduced")
            if len(r) > MAX_RELATOR_LENGTH:
                raise PresentationError(f"relator longer than {MAX_RELATOR_LENGTH} letters")
            if r.max_generator() >= self.generator_count:
                raise PresentationError(f"relator {r} uses a generator out of range")
        object.__setattr__(self, "relators", rels)

    @property
    def symmetric_generators(self) -> list[Word]:
        """S = {g, g^-1 : g a generator}."""
        return [Word.generator(g, s) for g in range(self.generator_count) for s in (1, -1)]

    def exponent_matrix(self) -> list[list[int]]:
        return [r.exponent_sums(self.generator_count) for r in self.relators]

    @classmethod
    def parse(cls, text: str, name: str = "") -> GroupPresentation:
        gens = None
        rels = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition(":")
            if not sep:
                raise PresentationError(f"line {lineno}: expected 'key: value'")
            key = key.strip()
            try:
                if key == "gens":
                    gens = int(value)
                elif key == "rel":
                    rels.append(Word.parse(value))
                else:
                    raise PresentationError(f"unknown key {key!r}")
            except (PresentationError, ValueError) as exc:
                raise PresentationError(f"line {lineno}: {exc}") from None
        if gens is None:
            raise PresentationError("missing 'gens:' line")
        return cls(gens, tuple(rels), name)

    @classmethod
    def from_file(cls, path) -> GroupPresentation:
        path = Path(path)
        return cls.parse(path.read_text(), name=path.stem)

    def to_text(self) -> str:
        lines = [f"gens: {self.generator_count}"]
        lines += [f"rel: {r}" for r in self.relators]
        return "\n".join(lines) + "\n"


PRESETS = {
    "Z": GroupPresentation(1, (), "Z"),
    "F2": GroupPresentation(2, (), "F2"),
    "Z2": GroupPresentation(2, (Word.parse("abAB"),), "Z2"),
    "Z3": GroupPresentation(1, (Word.parse("aaa"),), "Z3"),
}


def preset(name: str) -> GroupPresentation:
    try:
        return PRESETS[name]
    except KeyError:
        raise PresentationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
