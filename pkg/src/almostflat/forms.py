"""Symmetric integral bilinear forms.

Parity, unimodularity and an exact signature are enough to recognise the
hyperbolic sums nH among indefinite even unimodular forms. A small
brute-force search (:func:`equivalent_small`) gives an independent check
by producing explicit change-of-basis matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import NotSymmetricError, RankMismatchError
from .linalg import IntMatrix, determinant, smith_normal_form

__all__ = [
    "SymForm",
    "Zero",
    "Hyperbolic",
    "Other",
    "FormClass",
    "hyperbolic",
    "is_even",
    "is_unimodular",
    "characteristic_polynomial",
    "signature",
    "classify",
    "equivalent_small",
    "torus_form_oracle",
    "form_class_from_json",
]

H_MATRIX = ((0, 1), (1, 0))


@dataclass(frozen=True)
class SymForm:
    q: IntMatrix

    def __post_init__(self):
        if not self.q.is_symmetric():
            raise NotSymmetricError(f"form matrix {self.q.shape} is not symmetric")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> SymForm:
        rows = [list(r) for r in rows]
        return cls(IntMatrix.from_rows(rows, len(rows)))

    @property
    def n(self) -> int:
        return self.q.rows

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> int:
        return sum(x * y for x, y in zip(a, self.q.apply(b)))

    def __add__(self, other: SymForm) -> SymForm:
        """Orthogonal sum."""
        return SymForm(IntMatrix.block_diag([self.q, other.q]))

    def __neg__(self) -> SymForm:
        return SymForm(-self.q)

    def change_basis(self, u: IntMatrix) -> SymForm:
        """The form ``u^T q u``."""
        return SymForm(u.transpose() @ self.q @ u)


@dataclass(frozen=True)
class Zero:
    """The rank 0 form (the intersection form of a manifold with b2 = 0)."""

    def to_json(self) -> dict:
        return {"type": "zero", "n": 0}

    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Hyperbolic:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Hyperbolic(n) needs n >= 1; use Zero for the empty form")

    def to_json(self) -> dict:
        return {"type": "hyperbolic", "n": self.n}

    def __str__(self):
        return f"{self.n}H"


@dataclass(frozen=True)
class Other:
    rank: int
    signature: int
    even: bool
    abs_det: int

    @property
    def parity(self) -> str:
        return "even" if self.even else "odd"

    def to_json(self) -> dict:
        return {
            "type": "other",
            "n": None,
            "rank": self.rank,
            "signature": self.signature,
            "parity": self.parity,
            "abs_det": self.abs_det,
        }

    def __str__(self):
        return f"other(rank={self.rank}, signature={self.signature}, {self.parity}, |det|={self.abs_det})"


FormClass = Union[Zero, Hyperbolic, Other]


def form_class_from_json(obj: dict) -> FormClass:
    kind = obj.get("type")
    if kind == "zero":
        return Zero()
    if kind == "hyperbolic":
        n = obj.get("n")
        return Zero() if n == 0 else Hyperbolic(int(n))
    if kind == "other":
        return Other(int(obj["rank"]), int(obj["signature"]),
                     obj["parity"] == "even", int(obj["abs_det"]))
    raise ValueError(f"unknown form type {kind!r}")


def hyperbolic(n: int) -> SymForm:
    """Orthogonal sum of ``n`` copies of ``[[0, 1], [1, 0]]``."""
    if n < 0:
        raise ValueError("multiplicity must be nonnegative")
    return SymForm(IntMatrix.block_diag([IntMatrix.from_rows(H_MATRIX)] * n))


def is_even(f: SymForm) -> bool:
    # a^T Q a = sum q_ii a_i^2 + 2 * (cross terms) = sum q_ii a_i mod 2
    return all(f.q[i, i] % 2 == 0 for i in range(f.n))


def is_unimodular(f: SymForm) -> bool:
    return abs(determinant(f.q)) == 1


def characteristic_polynomial(a: IntMatrix) -> list[int]:
    """Coefficients of det(xI - a), highest degree first (Faddeev-LeVerrier).

    The division by k in each step is exact for integer matrices.
    """
    n = a.rows
    coeffs = [1]
    m = IntMatrix.zeros(n, n)
    identity = IntMatrix.identity(n)
    for k in range(1, n + 1):
        m = a @ m + identity.scale(coeffs[-1])
        am = a @ m
        trace = sum(am[i, i] for i in range(n))
        c, rem = divmod(-trace, k)
        assert rem == 0
        coeffs.append(c)
    return coeffs


def _sign_changes(coeffs: Sequence[int]) -> int:
    signs = [c > 0 for c in coeffs if c]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def signature(f: SymForm) -> int:
    """Positive minus negative eigenvalue count, computed exactly.

    The characteristic polynomial of a symmetric matrix has only real
    roots, so Descartes' rule of signs gives the exact number of positive
    roots; applying it to p(-x) counts the negative ones.
    """
    coeffs = characteristic_polynomial(f.q)
    deg = len(coeffs) - 1
    positive = _sign_changes(coeffs)
    negative = _sign_changes([c * (-1) ** (deg - i) for i, c in enumerate(coeffs)])
    return positive - negative


def classify(f: SymForm) -> FormClass:
    """Zero, Hyperbolic(rank / 2) or Other with invariants.

    Even, unimodular and signature 0 identifies nH: indefinite even
    unimodular forms are determined by rank and signature.
    """
    if f.n == 0:
        return Zero()
    even = is_even(f)
    det = abs(determinant(f.q))
    sig = signature(f)
    if even and det == 1 and sig == 0 and f.n % 2 == 0:
        return Hyperbolic(f.n // 2)
    return Other(f.n, sig, even, det)


def _is_primitive(columns: list[tuple[int, ...]], n: int) -> bool:
    """Whether the columns extend to a basis of Z^n."""
    snf = smith_normal_form(IntMatrix.from_rows(columns, n))
    return snf.rank == len(columns) and all(d == 1 for d in snf.d)


def equivalent_small(f1: SymForm, f2: SymForm, bound: int) -> Optional[IntMatrix]:
    """Search for a unimodular ``u`` with ``u^T q1 u == q2`` and entries in ``[-bound, bound]``.

    Depth-first over the columns of ``u`` in lexicographic order, so the
    returned witness is the lexicographically first one (column by
    column). After k columns the leading k x k block of ``u^T q1 u``
    must already match ``q2``. ``None`` means nothing was found within
    the bound, not that the forms are inequivalent.
    """
    if f1.n != f2.n:
        raise RankMismatchError(f1.n, f2.n)
    n = f1.n
    if n == 0:
        return IntMatrix.identity(0)
    if is_even(f1) != is_even(f2) or abs(determinant(f1.q)) != abs(determinant(f2.q)):
        return None
    q2 = f2.q
    by_norm: dict[int, list[tuple[tuple[int, ...], tuple[int, ...]]]] = {}
    for v in itertools.product(range(-bound, bound + 1), repeat=n):
        qv = f1.q.apply(v)
        norm = sum(x * y for x, y in zip(v, qv))
        by_norm.setdefault(norm, []).append((v, qv))

    chosen: list[tuple[int, ...]] = []
    images: list[tuple[int, ...]] = []

    def search(k):
        if k == n:
            u = IntMatrix.from_rows(chosen, n).transpose()
            return u if abs(determinant(u)) == 1 else None
        for v, qv in by_norm.get(q2[k, k], ()):
            if all(sum(x * y for x, y in zip(qv, w)) == q2[i, k] for i, w in enumerate(chosen)):
                chosen.append(v)
                images.append(qv)
                if _is_primitive(chosen, n):
                    found = search(k + 1)
                    if found is not None:
                        return found
                chosen.pop()
                images.pop()
        return None

    return search(0)


def _perm_sign(seq: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


def torus_form_oracle() -> SymForm:
    """Cup product pairing on H^2(T^4) = Lambda^2(Z^4).

    Basis e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4; the pairing of two
    basis 2-vectors is the sign of the shuffle that puts their indices in
    order, or 0 when they share an index.
    """
    basis = list(itertools.combinations(range(1, 5), 2))
    rows = []
    for i in basis:
        row = []
        for j in basis:
            row.append(0 if set(i) & set(j) else _perm_sign(i + j))
        rows.append(row)
    return SymForm.from_rows(rows)
