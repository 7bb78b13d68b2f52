"""Cartan-type decomposition ``g = k1 a k2`` and projections onto a ray."""

from __future__ import annotations

from dataclasses import dataclass

from .automorphism import (Portrait, PortraitError, TransferError, classify, build_hyperbolic,
                           rotation, transfer_vertex, translation_along)
from .local_action import LocalGroup
from .parabolic import UnsupportedError
from .tree import BoundaryPoint, Edge, Vertex, boundary_lcp


class _Infinity:
    """Projection value meaning "the end itself"."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


@dataclass(frozen=True)
class KAKTriple:
    k1: Portrait
    a: Portrait
    k2: Portrait

    def recompose(self) -> Portrait:
        return self.k1.compose(self.a.compose(self.k2))


def kak_decompose(F: LocalGroup, g: Portrait, e: Edge) -> KAKTriple:
    """Decompose ``g`` as ``k1 a k2`` with ``k1, k2`` fixing x0 and ``a`` in A+.

    ``a`` translates the edge ``e`` (at x0) into its own half-tree, with
    ``a(x0)`` at the same distance from x0 as ``g(x0)``.
    """
    if e.parent != ():
        raise PortraitError("e must be an edge at x0")
    failure = F.gate_failure()
    if failure:
        raise UnsupportedError(f"local group rejected: {failure}")
    ident = Portrait.identity(g.degree)
    if not g.root_image:
        return KAKTriple(g, ident, ident)
    k = rotation(g.degree, F.least_mapping({g.root_image[0]: e.color}))
    target = k.apply(g.root_image)
    out = next(c for c in range(1, g.degree + 1) if c != target[-1])
    a = build_hyperbolic(F, e, Edge(target, out))
    return KAKTriple(k.inverse(), a, a.inverse().compose(k).compose(g))


def proj_interval(g: Portrait, xi: BoundaryPoint):
    """Last common vertex of ``[x0, g+)`` and ``[x0, xi)``, or INFINITY."""
    if not g.root_image:
        raise PortraitError("identity-type element is not in A+ in the pointed sense")
    c = classify(g, len(g.root_image) + 2)
    if not c.is_hyperbolic or c.axis_point != ():
        raise PortraitError("element is not a hyperbolic with x0 on its axis")
    if c.attracting.letter(0) != xi.letter(0):
        raise PortraitError("element does not translate into the half-tree toward xi")
    n = boundary_lcp(c.attracting, xi)
    if n is None:
        return INFINITY
    return xi.word(n)


@dataclass(frozen=True)
class DoubleCosetRep:
    gamma: Portrait
    k: Portrait
    k_prime: Portrait

    def recompose(self) -> Portrait:
        return self.k.compose(self.gamma.compose(self.k_prime))


def canonical_double_coset_rep(F: LocalGroup, g: Portrait, xi: BoundaryPoint) -> DoubleCosetRep:
    """A translation along ``[x0, xi)`` in ``KgK``, with ``g = k gamma k'``."""
    D = len(g.root_image)
    if D == 0:
        raise PortraitError("g fixes x0")
    if not F.is_transitive():
        raise UnsupportedError("F must be transitive")
    target = xi.word(D)
    try:
        move = transfer_vertex(F, g.root_image, target)
    except TransferError as exc:
        raise UnsupportedError(
            f"g(x0) is not in the K-orbit of {''.join(map(str, target))}: K is not "
            "transitive on this sphere") from exc
    try:
        gamma = translation_along(F, xi, D)
    except TransferError as exc:
        raise UnsupportedError(str(exc)) from exc
    k_prime = gamma.inverse().compose(move).compose(g)
    assert not k_prime.root_image
    return DoubleCosetRep(gamma, move.inverse(), k_prime)
