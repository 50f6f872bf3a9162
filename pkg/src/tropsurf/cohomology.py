"""Integral simplicial homology and cohomology of a Delta-complex.

Chains are taken on the Delta-cells directly (no subdivision); all sign
conventions come from ``DeltaComplex.boundary_matrices``.  Groups are
reported as a free rank plus a divisibility chain of torsion factors,
computed from Smith normal forms of the boundary maps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .delta_complex import DeltaComplex
from .errors import ValidationError
from .exact_linalg import smith_normal_form, transpose


@dataclass(frozen=True)
class HomologyReport:
    degree: int
    free_rank: int
    torsion: tuple[int, ...]  # invariant factors > 1, divisibility chain

    def describe(self) -> str:
        parts = []
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}" if self.free_rank > 1 else "Z")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def _quotient(ambient_dim: int, kernel_of, image_of) -> tuple[int, tuple[int, ...]]:
    """free rank and torsion of ker(kernel_of)/im(image_of) inside Z^ambient."""
    if kernel_of is None:
        ker_dim = ambient_dim
    else:
        cols = len(kernel_of[0]) if kernel_of else 0
        ker_dim = cols - smith_normal_form(kernel_of).rank
    if image_of is None:
        return ker_dim, ()
    snf = smith_normal_form(image_of)
    torsion = tuple(f for f in snf.invariant_factors if f > 1)
    return ker_dim - snf.rank, torsion


def integral_homology(cx: DeltaComplex, degree: int) -> HomologyReport:
    d1, d2 = cx.boundary_matrices()
    v, e, f = len(cx.vertices), len(cx.edges), len(cx.facets)
    if degree == 0:
        free, torsion = _quotient(v, None, d1 if e else None)
    elif degree == 1:
        free, torsion = _quotient(e, d1 if e else None, d2 if f else None)
    elif degree == 2:
        free, torsion = _quotient(f, d2 if f else None, None)
    else:
        raise ValidationError("degree must be 0, 1 or 2")
    return HomologyReport(degree, free, torsion)


def integral_cohomology(cx: DeltaComplex, degree: int) -> HomologyReport:
    d1, d2 = cx.boundary_matrices()
    delta0 = transpose(d1)  # E x V: coboundary on 0-cochains
    delta1 = transpose(d2)  # F x E
    v, e, f = len(cx.vertices), len(cx.edges), len(cx.facets)
    if degree == 0:
        free, torsion = _quotient(v, delta0 if e else None, None)
    elif degree == 1:
        free, torsion = _quotient(e, delta1 if f else None, delta0 if e else None)
    elif degree == 2:
        free, torsion = _quotient(f, None, delta1 if f else None)
    else:
        raise ValidationError("degree must be 0, 1 or 2")
    return HomologyReport(degree, free, torsion)
