"""From a group descriptor to b1, b2 and the intersection form.

An oriented almost-flat 4-manifold has Euler characteristic 0, so
``2 - 2 b1 + b2 = 0``. Its intersection form is even, and apart from the
torus (b1 = 4, form 3H) the first Betti number lies in 1..3 and the form
is ``(b1 - 1) H``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .crystal import DEFAULT_MAX_ORDER, AlmostBieberbachDescriptor, underlying_betti
from .errors import (
    AlmostFlatError,
    BettiOutOfRangeError,
    NotOrientableError,
    SpinInconsistencyError,
    TorusMismatchError,
)
from .forms import (
    FormClass,
    Hyperbolic,
    Zero,
    classify,
    hyperbolic,
    is_even,
    signature,
    torus_form_oracle,
)

__all__ = ["ManifoldReport", "b2_from_b1", "form_from_b1", "analyze", "euler_characteristic"]


@dataclass(frozen=True)
class ManifoldReport:
    label: str
    b1: int
    b2: int
    chi: int
    parity: str
    form: FormClass
    route: str
    warnings: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "b1": self.b1,
            "b2": self.b2,
            "chi": self.chi,
            "parity": self.parity,
            "form": self.form.to_json(),
            "route": self.route,
            "warnings": list(self.warnings),
        }


def euler_characteristic(b1: int, b2: int) -> int:
    # b0 = b4 = 1 and b3 = b1 by Poincare duality
    return 2 - 2 * b1 + b2


def _check_range(b1):
    if b1 < 1:
        raise BettiOutOfRangeError(b1, f"b1 = {b1}: an almost-flat 4-manifold has b1 >= 1")
    if b1 > 4:
        raise BettiOutOfRangeError(b1, f"b1 = {b1} exceeds 4, the value of the torus")


def b2_from_b1(b1: int) -> int:
    """Second Betti number forced by a vanishing Euler characteristic."""
    _check_range(b1)
    return 2 * b1 - 2


def form_from_b1(b1: int, is_torus: bool = False) -> FormClass:
    """Intersection form class for the given first Betti number.

    Raises BettiOutOfRangeError outside 1..4 and TorusMismatchError when
    b1 = 4 is claimed for anything but the torus (or the torus flag comes
    with another b1).
    """
    _check_range(b1)
    if b1 == 4 and not is_torus:
        raise TorusMismatchError("b1 = 4 occurs only for the torus; descriptor is not marked as torus")
    if is_torus and b1 != 4:
        raise TorusMismatchError(f"descriptor is marked as torus but b1 = {b1}")
    if b1 == 1:
        return Zero()
    if is_torus:
        oracle = classify(torus_form_oracle())
        if oracle != Hyperbolic(3):
            raise AssertionError(f"torus cup product form classified as {oracle}")
        return oracle
    return Hyperbolic(b1 - 1)


def analyze(d: AlmostBieberbachDescriptor, strict_spin: bool = True,
            max_order: int = DEFAULT_MAX_ORDER) -> ManifoldReport:
    """Compute the report for one descriptor.

    A non-spin descriptor must have b1 = 1; otherwise SpinInconsistencyError
    is raised, or with ``strict_spin=False`` a warning is attached instead.
    """
    if not d.orientable:
        raise NotOrientableError(
            f"{d.label!r} is not orientable; the intersection form needs a fundamental class"
        )
    b1, route = underlying_betti(d, max_order)
    warnings = []
    _check_range(b1)
    if not d.spin and b1 != 1:
        if strict_spin:
            raise SpinInconsistencyError(b1)
        warnings.append(str(SpinInconsistencyError(b1)))
    b2 = b2_from_b1(b1)
    form = form_from_b1(b1, d.torus)
    report = ManifoldReport(
        label=d.label,
        b1=b1,
        b2=b2,
        chi=euler_characteristic(b1, b2),
        parity="even",
        form=form,
        route=route,
        warnings=tuple(warnings),
    )
    _verify(report)
    return report


def _verify(report: ManifoldReport):
    """Materialise (b1 - 1) H and check it against the report."""
    q = hyperbolic(report.b1 - 1)
    problems = []
    if report.chi != 0:
        problems.append(f"chi = {report.chi}")
    if q.n != report.b2:
        problems.append(f"form rank {q.n} != b2 {report.b2}")
    if signature(q) != 0 or not is_even(q):
        problems.append("form is not even of signature 0")
    if classify(q) != report.form:
        problems.append(f"form {report.form} does not match {classify(q)}")
    if problems:
        raise AlmostFlatError(f"internal consistency failure for {report.label!r}: {'; '.join(problems)}")
