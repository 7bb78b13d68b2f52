"""Closed subgroups H of the stabilizer G_xi of an end, and their modular function.

Three kinds of H are supported: the whole stabilizer of ``xi`` in U(F)+, its
elliptic part (the horospherical subgroup), and the pointwise fixator of a ray
``[base, xi)``.  Only the first contains hyperbolic elements, so only the first
is non-unimodular.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import local_action as la
from .automorphism import (Portrait, PortraitError, ProbeDepthError, busemann_shift,
                           classify, translation_along, TransferError)
from .local_action import LocalGroup
from .tree import BoundaryPoint, Vertex, format_vertex, lcp, step


class UnimodularCase(PortraitError):
    """H has no hyperbolic elements."""


class UnsupportedError(PortraitError):
    pass


class Kind(enum.Enum):
    FULL = "full"
    HOROSPHERICAL = "horospherical"
    RAY = "ray"


@dataclass(frozen=True)
class ParabolicSpec:
    F: LocalGroup = field(compare=False)
    xi: BoundaryPoint
    kind: Kind = Kind.FULL
    base: Vertex = ()

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.RAY and self.xi.word(len(self.base)) != tuple(self.base):
            raise UnsupportedError("ray fixator base must lie on the ray [x0, xi)")

    @property
    def degree(self) -> int:
        return self.F.degree

    @property
    def unimodular(self) -> bool:
        return self.kind is not Kind.FULL

    def describe(self) -> str:
        if self.kind is Kind.RAY:
            return f"ray[{format_vertex(self.base)}]"
        return self.kind.value

    def certify_depth(self, g: Portrait) -> int:
        return g.support_radius + 2 * len(self.xi.period) + len(self.xi.prefix)

    @cached_property
    def full(self) -> "ParabolicSpec":
        return ParabolicSpec(self.F, self.xi, Kind.FULL)


def contains(H: ParabolicSpec, g: Portrait, depth: int | None = None) -> bool:
    if depth is not None and depth < H.certify_depth(g):
        raise ProbeDepthError(f"depth {depth} cannot certify membership; need {H.certify_depth(g)}")
    if not g.in_group(H.F) or not g.is_type_preserving():
        return False
    if g.boundary_image(H.xi) != H.xi:
        return False
    if H.kind is Kind.FULL:
        return True
    if busemann_shift(g, H.xi) != 0:
        return False
    if H.kind is Kind.RAY:
        return g.apply(H.base) == H.base
    return True


@dataclass(frozen=True)
class MinimalHyperbolic:
    gamma: Portrait
    length: int
    base_vertex: Vertex = ()


def minimal_hyperbolic(H: ParabolicSpec) -> MinimalHyperbolic:
    """Translation of length 2 along the ray ``[x0, xi)``."""
    if H.unimodular:
        raise UnimodularCase(f"unimodular case: {H.describe()} has no hyperbolic elements")
    if not H.F.is_transitive():
        raise UnsupportedError("F must be transitive")
    try:
        gamma = translation_along(H.F, H.xi, 2)
    except TransferError as exc:
        raise UnsupportedError(f"no bounded-support translation along {H.xi}: {exc}") from exc
    c = classify(gamma, len(gamma.root_image) + 2)
    assert c.is_hyperbolic and c.translation_length == 2 and c.attracting == H.xi
    return MinimalHyperbolic(gamma, 2, ())


def ray_colors(xi: BoundaryPoint, L: int) -> list[tuple[int, int]]:
    """Pairs (color toward xi, color toward x0) at the vertices xi_L, ..., xi_1."""
    return [(xi.letter(j), xi.letter(j - 1)) for j in range(L, 0, -1)]


def fixator_index_along(F: LocalGroup, xi: BoundaryPoint, L: int) -> int:
    """``[H_{[xi_L, xi)} : H_{[x0, xi)}]`` as a product of stabilizer orbits."""
    index = 1
    for toward, back in ray_colors(xi, L):
        index *= F.stabilizer_orbit_size(toward, back)
    return index


def orbit_oracle(F: LocalGroup, xi: BoundaryPoint, L: int) -> set:
    """Images of x0 under the fixator of ``[xi_L, xi)``, by explicit search.

    States are pairs (image vertex, local permutation there); each element of
    the fixator is realized by a path of compatible local permutations.
    """
    start = xi.word(L)
    frontier = {(start, p) for p in F.elements if p[xi.letter(L) - 1] == xi.letter(L)}
    for j in range(L, 0, -1):
        c = xi.letter(j - 1)
        nxt = set()
        for w, p in frontier:
            w2 = step(w, p[c - 1])
            if j == 1:
                nxt.add((w2, None))
                continue
            for q in F.elements:
                if q[c - 1] == p[c - 1]:
                    nxt.add((w2, q))
        frontier = nxt
    return {w for w, _ in frontier}


def modular_value(H: ParabolicSpec, gamma: MinimalHyperbolic, depth: int | None = None) -> Fraction:
    """``Delta_H(gamma) = 1 / [H_{[gamma x0, xi)} : H_{[x0, xi)}]``."""
    if H.unimodular:
        return Fraction(1)
    if depth is not None and depth < gamma.length + 2:
        raise ProbeDepthError(f"depth {depth} < {gamma.length + 2}")
    return Fraction(1, fixator_index_along(H.F, H.xi, gamma.length))


def shift_class(H: ParabolicSpec, h: Portrait, length: int) -> int:
    """The integer ``m`` with ``h`` in ``gamma^m G_xi^0``."""
    s = busemann_shift(h, H.xi)
    if s % length:
        raise PortraitError(f"Busemann shift {s} is not a multiple of {length}")
    return s // length


def modular_of(H: ParabolicSpec, h: Portrait, gamma: MinimalHyperbolic | None = None) -> Fraction:
    """``Delta_H(h)``, extended from ``gamma`` and the elliptic part as a homomorphism."""
    if H.unimodular:
        return Fraction(1)
    gamma = gamma or minimal_hyperbolic(H)
    return modular_value(H, gamma) ** shift_class(H, h, gamma.length)


def factor_hyperbolic(H: ParabolicSpec, h: Portrait, gamma: MinimalHyperbolic) -> tuple[int, Portrait]:
    """Write ``h = gamma^m h0`` with ``h0`` elliptic in H."""
    m = shift_class(H, h, gamma.length)
    h0 = gamma.gamma.power(-m).compose(h)
    c = classify(h0, len(h0.root_image) + 2)
    if c.is_hyperbolic:
        raise PortraitError("remainder is not elliptic")
    return m, h0
