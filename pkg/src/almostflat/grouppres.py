"""Finitely presented groups: parsing and abelianization.

Grammar (whitespace insignificant, ``#`` starts a comment)::

    presentation := '<' genlist '|' relatorlist? '>'
    genlist      := name (',' name)*
    relatorlist  := relation (',' relation)*
    relation     := word ('=' word)?
    word         := factor ('*' factor)*
    factor       := name ('^' int)? | '[' word ',' word ']' | '(' word ')' ('^' int)?

Only H_1 is computed; there is no coset enumeration or Tietze work.

>>> p = parse_presentation("< a, b | [a,b] >")
>>> str(abelian_invariants(p))
'Z^2'
>>> str(abelian_invariants(parse_presentation("< a | a^2 >")))
'Z/2'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    DuplicateGeneratorError,
    PresentationSyntaxError,
    UnknownGeneratorError,
)
from .linalg import IntMatrix, smith_normal_form

__all__ = [
    "Word",
    "Presentation",
    "AbelianInvariants",
    "parse_presentation",
    "relation_matrix",
    "abelian_invariants",
    "first_betti",
]

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Word:
    """Free group word as ``((generator_index, exponent), ...)``.

    Construction normalizes: adjacent syllables on the same generator are
    merged and zero exponents dropped.
    """

    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        out: list[list[int]] = []
        for g, e in self.syllables:
            if e == 0:
                continue
            if out and out[-1][0] == g:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append([g, e])
        object.__setattr__(self, "syllables", tuple((g, e) for g, e in out))

    @classmethod
    def letter(cls, g: int, e: int = 1) -> Word:
        return cls(((g, e),))

    def __mul__(self, other: Word) -> Word:
        return Word(self.syllables + other.syllables)

    def inverse(self) -> Word:
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __pow__(self, k: int) -> Word:
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.syllables * k)

    def exponent_sums(self, ngens: int) -> list[int]:
        sums = [0] * ngens
        for g, e in self.syllables:
            sums[g] += e
        return sums

    def __len__(self):
        return sum(abs(e) for _, e in self.syllables)

    def format(self, names) -> str:
        if not self.syllables:
            return "1"
        return "*".join(names[g] if e == 1 else f"{names[g]}^{e}" for g, e in self.syllables)


def commutator(x: Word, y: Word) -> Word:
    """``[x, y] = x y x^-1 y^-1``"""
    return x * y * x.inverse() * y.inverse()


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        seen = set()
        for name in self.generators:
            if not isinstance(name, str) or not NAME_RE.fullmatch(name):
                raise ValueError(f"invalid generator name {name!r}")
            if name in seen:
                raise DuplicateGeneratorError(name)
            seen.add(name)
        n = len(self.generators)
        for w in self.relators:
            for g, _ in w.syllables:
                if not 0 <= g < n:
                    raise UnknownGeneratorError(f"#{g}")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def __str__(self):
        rels = ", ".join(w.format(self.generators) for w in self.relators)
        return f"< {', '.join(self.generators)} | {rels} >"


@dataclass(frozen=True)
class AbelianInvariants:
    """``Z^free_rank + Z/t1 + ... + Z/tk`` with t1 | t2 | ... | tk."""

    free_rank: int
    torsion: tuple[int, ...] = field(default=())

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion), "text": str(self)}


# parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<int>[+-]?\d+)
  | (?P<punct>[<>|,=*^\[\]()])
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise PresentationSyntaxError(pos, f"unexpected character {text[pos]!r}", text)
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0
        self.index: dict[str, int] = {}

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        found = "end of input" if tok[0] == "eof" else repr(tok[1])
        return PresentationSyntaxError(tok[2], f"{message}, found {found}", self.text)

    def expect(self, value):
        tok = self.peek()
        if tok[0] == "punct" and tok[1] == value:
            return self.next()
        raise self.error(f"expected {value!r}")

    def accept(self, value):
        tok = self.peek()
        if tok[0] == "punct" and tok[1] == value:
            self.i += 1
            return True
        return False

    def presentation(self) -> Presentation:
        self.expect("<")
        gens = [self.name()]
        while self.accept(","):
            gens.append(self.name())
        for g in gens:
            if g in self.index:
                raise DuplicateGeneratorError(g)
            self.index[g] = len(self.index)
        self.expect("|")
        relators = []
        if not self.accept(">"):
            relators.append(self.relation())
            while self.accept(","):
                relators.append(self.relation())
            self.expect(">")
        if self.peek()[0] != "eof":
            raise self.error("trailing input after '>'")
        return Presentation(tuple(gens), tuple(relators))

    def name(self) -> str:
        tok = self.peek()
        if tok[0] != "name":
            raise self.error("expected generator name")
        self.next()
        return tok[1]

    def relation(self) -> Word:
        lhs = self.word()
        if self.accept("="):
            return lhs * self.word().inverse()
        return lhs

    def word(self) -> Word:
        w = self.factor()
        while self.accept("*"):
            w = w * self.factor()
        return w

    def power(self) -> int:
        if not self.accept("^"):
            return 1
        tok = self.peek()
        if tok[0] != "int":
            raise self.error("expected integer exponent")
        self.next()
        return int(tok[1])

    def factor(self) -> Word:
        tok = self.peek()
        if tok[0] == "name":
            self.next()
            if tok[1] not in self.index:
                raise UnknownGeneratorError(tok[1], tok[2])
            return Word.letter(self.index[tok[1]], self.power())
        if self.accept("["):
            x = self.word()
            self.expect(",")
            y = self.word()
            self.expect("]")
            return commutator(x, y)
        if self.accept("("):
            w = self.word()
            self.expect(")")
            return w ** self.power()
        raise self.error("expected generator, '[' or '('")


def parse_presentation(text: str) -> Presentation:
    """Parse ``< gens | relations >``.

    A relation ``w1 = w2`` becomes the relator ``w1 * w2^-1`` and
    ``[x, y]`` expands to ``x y x^-1 y^-1``.

    Raises PresentationSyntaxError, UnknownGeneratorError or
    DuplicateGeneratorError.
    """
    return _Parser(text).presentation()


def relation_matrix(p: Presentation) -> IntMatrix:
    """Exponent-sum matrix; row i, column j is the total power of generator j in relator i."""
    return IntMatrix.from_rows([w.exponent_sums(p.ngens) for w in p.relators], p.ngens)


def abelian_invariants(p: Presentation) -> AbelianInvariants:
    snf = smith_normal_form(relation_matrix(p))
    return AbelianInvariants(
        free_rank=p.ngens - snf.rank,
        torsion=tuple(d for d in snf.d if d > 1),
    )


def first_betti(p: Presentation) -> int:
    return abelian_invariants(p).free_rank
