"""Second Todd class of a weak tropical surface and the Noether identity.

The class is a formal rational combination of vertices whose coefficient
at v is (1/12)(12 + 5 F_v - 6 E_v - sum of alpha over the link nodes),
where E_v and F_v count the nodes and edges of the vertex link and each
link node contributes its own structure constant (a self-glued edge
contributes both of its values).  The total degree always equals the
Euler characteristic, which is the identity checked by noether_check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .delta_complex import Incidence
from .errors import ValidationError
from .surfaces import WeakTropicalSurface


@dataclass(frozen=True)
class ToddClass:
    coefficients: tuple[tuple[str, Fraction], ...]  # vertex file order

    @property
    def degree(self) -> Fraction:
        return sum((c for _, c in self.coefficients), start=Fraction(0))

    def coefficient(self, vertex: str) -> Fraction:
        for v, c in self.coefficients:
            if v == vertex:
                return c
        raise ValidationError(f"unknown vertex {vertex!r}")


def td2_surface(surface: WeakTropicalSurface) -> ToddClass:
    coeffs = []
    for v in surface.complex.vertices:
        link = surface.complex.vertex_link(v)
        alpha_sum = sum(surface.alpha[inc] for inc in link.nodes)
        numerator = 12 + 5 * link.edge_count - 6 * link.node_count - alpha_sum
        coeffs.append((v, Fraction(numerator, 12)))
    return ToddClass(tuple(coeffs))


def noether_check(surface: WeakTropicalSurface) -> tuple[bool, Fraction, int]:
    """Exact test that deg td2 equals the Euler characteristic."""
    degree = td2_surface(surface).degree
    chi = surface.complex.euler_characteristic()
    return degree == chi, degree, chi


def ks_invariant(surface: WeakTropicalSurface, vertex: str) -> Fraction:
    """Local Gauss-Bonnet invariant 1 - (1/12) * sum(alpha + 1) at a
    manifold point; defined only when the vertex link is a single cycle."""
    link = surface.complex.vertex_link(vertex)
    if not link.is_cycle():
        raise ValidationError(
            f"vertex {vertex!r}: link is not a single cycle, invariant undefined")
    total = sum(surface.alpha[inc] + 1 for inc in link.nodes)
    return 1 - Fraction(total, 12)
