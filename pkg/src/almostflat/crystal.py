"""Crystallographic and almost-Bieberbach group descriptors.

For a Bieberbach group with lattice Z^n and finite holonomy G the first
Betti number is the rank of the fixed sublattice (Z^n)^G, where G acts
by conjugation on the lattice. Almost-Bieberbach groups are handled
through an explicit presentation and/or their underlying crystallographic
group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import (
    DescriptorError,
    InconsistentRoutesError,
    MissingDataError,
    NotFiniteError,
    NotUnimodularError,
)
from .grouppres import Presentation, first_betti
from .linalg import IntMatrix, determinant, rank

__all__ = [
    "DEFAULT_MAX_ORDER",
    "CrystalGroup",
    "AlmostBieberbachDescriptor",
    "enumerate_point_group",
    "fixed_sublattice_rank",
    "betti_via_holonomy",
    "underlying_betti",
    "betti_routes",
]

DEFAULT_MAX_ORDER = 10000


@dataclass(frozen=True)
class CrystalGroup:
    """Lattice rank, integral holonomy generators and optional translation parts.

    Translation parts are carried along for the record only; the first
    Betti number depends on the linear holonomy action alone.
    """

    dim: int
    holonomy_gens: tuple[IntMatrix, ...] = ()
    affine_parts: Optional[tuple[tuple[Fraction, ...], ...]] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "holonomy_gens", tuple(self.holonomy_gens))
        if self.dim < 0:
            raise DescriptorError("dim must be nonnegative")
        for i, g in enumerate(self.holonomy_gens):
            if g.shape != (self.dim, self.dim):
                raise DescriptorError(
                    f"holonomy generator {i} has shape {g.shape}, expected {(self.dim, self.dim)}"
                )
            det = determinant(g)
            if abs(det) != 1:
                raise NotUnimodularError(i, det)
        if self.affine_parts is not None:
            parts = tuple(tuple(Fraction(x) for x in v) for v in self.affine_parts)
            if len(parts) != len(self.holonomy_gens):
                raise DescriptorError("affine_parts must align with holonomy_gens")
            if any(len(v) != self.dim for v in parts):
                raise DescriptorError(f"affine parts must have length {self.dim}")
            object.__setattr__(self, "affine_parts", parts)

    @property
    def orientation_preserving(self) -> bool:
        return all(determinant(g) == 1 for g in self.holonomy_gens)


Underlying = Union[CrystalGroup, Presentation]


@dataclass(frozen=True)
class AlmostBieberbachDescriptor:
    """Fundamental group of an almost-flat manifold, E in 0 -> N -> E -> G -> 0.

    ``underlying`` is the crystallographic quotient of E by the isolator of
    [N, N]; for a flat manifold (``nilpotency_class == 1``) that is E itself.
    ``torus`` marks the one case with b1 = 4 that the pipeline accepts.
    """

    label: str
    nilpotency_class: int
    presentation: Optional[Presentation] = None
    underlying: Optional[Underlying] = None
    orientable: bool = True
    spin: bool = True
    torus: bool = False

    def __post_init__(self):
        if self.nilpotency_class not in (1, 2, 3):
            raise DescriptorError(
                f"nilpotency_class must be 1, 2 or 3, got {self.nilpotency_class}"
            )
        if self.presentation is None and self.underlying is None:
            raise MissingDataError(
                f"descriptor {self.label!r} needs a presentation or an underlying group"
            )
        if (self.nilpotency_class == 1 and isinstance(self.underlying, CrystalGroup)
                and self.underlying.dim != 4):
            raise DescriptorError("a flat (class 1) descriptor needs a rank 4 lattice")


def _unimodular_check(g: CrystalGroup):
    for i, h in enumerate(g.holonomy_gens):
        det = determinant(h)
        if abs(det) != 1:
            raise NotUnimodularError(i, det)


def enumerate_point_group(g: CrystalGroup, max_order: int = DEFAULT_MAX_ORDER) -> list[IntMatrix]:
    """All elements of the group generated by the holonomy matrices.

    Breadth-first closure from the identity, multiplying on the left by
    each generator in the given order.
    """
    _unimodular_check(g)
    identity = IntMatrix.identity(g.dim)
    seen = {identity}
    order = [identity]
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for h in g.holonomy_gens:
            y = h @ x
            if y not in seen:
                if len(order) >= max_order:
                    raise NotFiniteError(max_order)
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order


def fixed_sublattice_rank(g: CrystalGroup, max_order: int = DEFAULT_MAX_ORDER) -> int:
    """Rank of ``{z in Z^n : h z = z for every holonomy element h}``.

    Being fixed by the generators is the same as being fixed by the
    group, so only ``h - I`` for the generators is stacked. The closure
    is still enumerated to reject infinite holonomy.
    """
    enumerate_point_group(g, max_order)
    if not g.holonomy_gens:
        return g.dim
    identity = IntMatrix.identity(g.dim)
    stacked = IntMatrix.vstack([h - identity for h in g.holonomy_gens])
    return g.dim - rank(stacked)


def betti_via_holonomy(g: CrystalGroup, max_order: int = DEFAULT_MAX_ORDER) -> int:
    """First Betti number of a Bieberbach group from its holonomy data."""
    return fixed_sublattice_rank(g, max_order)


def betti_routes(d: AlmostBieberbachDescriptor, max_order: int = DEFAULT_MAX_ORDER) -> dict[str, int]:
    """b1 by every route the descriptor supports, in priority order.

    Keys are ``presentation`` (E itself), ``underlying`` (presentation of
    the crystallographic quotient) and ``holonomy`` (its fixed lattice).
    """
    routes = {}
    if d.presentation is not None:
        routes["presentation"] = first_betti(d.presentation)
    if isinstance(d.underlying, Presentation):
        routes["underlying"] = first_betti(d.underlying)
    elif isinstance(d.underlying, CrystalGroup):
        routes["holonomy"] = betti_via_holonomy(d.underlying, max_order)
    return routes


def underlying_betti(d: AlmostBieberbachDescriptor, max_order: int = DEFAULT_MAX_ORDER) -> tuple[int, str]:
    """First Betti number of E and the route that produced it.

    All available routes are computed; any disagreement raises
    InconsistentRoutesError instead of silently preferring one.
    """
    routes = betti_routes(d, max_order)
    if not routes:
        raise MissingDataError(f"descriptor {d.label!r} has no usable b1 route")
    (first_route, b1), *rest = routes.items()
    for _, other in rest:
        if other != b1:
            raise InconsistentRoutesError(b1, other)
    return b1, first_route
