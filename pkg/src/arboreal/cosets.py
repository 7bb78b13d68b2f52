"""Finite-depth model of K/(K n H) and the double-coset intersection geometry.

The K-orbit of ``xi`` is written ``Omega``.  A word ``u`` is an Omega-word when
it is the image of a prefix of ``xi`` under some element of K; because local
permutations can be chosen independently at each vertex, this happens exactly
when every consecutive pair of letters of ``u`` lies in the F-orbit of the
matching pair of ``xi``.  Cosets of K n H in K correspond to points of Omega,
and depth-``n`` cylinders to Omega-words of length ``n``.

Solving ``k1 g k2 in H`` is done cell by cell: a cell is a cylinder ``[b]`` on
which ``g`` acts as a single cylinder map, so every point of the cell yields a
solution with the same class ``m``, or none does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .automorphism import (Portrait, PortraitError, busemann_shift, classify,
                           transfer_boundary, transfer_vertex)
from .local_action import LocalGroup
from .parabolic import Kind, MinimalHyperbolic, ParabolicSpec, UnsupportedError, contains
from .tree import BoundaryPoint, Vertex, boundary_lcp, format_vertex, lcp


def omega_next(F: LocalGroup, xi: BoundaryPoint, u: Vertex) -> list[int]:
    """Letters ``c`` such that ``u + (c,)`` is an Omega-word (``u`` assumed one)."""
    n = len(u)
    if n == 0:
        return sorted(F.orbit(xi.letter(0)))
    orbit = F.pair_orbit(xi.letter(n - 1), xi.letter(n))
    return [c for c in range(1, F.degree + 1) if (u[-1], c) in orbit]


def is_omega_word(F: LocalGroup, xi: BoundaryPoint, u: Vertex) -> bool:
    if not u:
        return True
    if u[0] not in F.orbit(xi.letter(0)):
        return False
    return all((u[m - 1], u[m]) in F.pair_orbit(xi.letter(m - 1), xi.letter(m))
               for m in range(1, len(u)))


def in_omega(F: LocalGroup, xi: BoundaryPoint, eta: BoundaryPoint) -> bool:
    """Whether the end ``eta`` lies in the K-orbit of ``xi``."""
    L = len(xi.period) * len(eta.period) // math.gcd(len(xi.period), len(eta.period))
    N = max(len(xi.prefix), len(eta.prefix)) + L + 1
    return is_omega_word(F, xi, eta.word(N))


def omega_words(F: LocalGroup, xi: BoundaryPoint, n: int, start: Vertex = ()) -> Iterator[Vertex]:
    """Omega-words of length ``n`` extending ``start``, in lexicographic order."""
    if len(start) == n:
        yield start
        return
    for c in omega_next(F, xi, start):
        yield from omega_words(F, xi, n, start + (c,))


def fixator_index(F: LocalGroup, v: Vertex) -> int:
    """``[K : K_{[x0, v]}]``, the size of the K-orbit of the vertex ``v``."""
    if not v:
        return 1
    index = len(F.orbit(v[0]))
    for m in range(1, len(v)):
        index *= F.stabilizer_orbit_size(v[m - 1], v[m])
    return index


def omega_count(F: LocalGroup, xi: BoundaryPoint, n: int) -> int:
    return fixator_index(F, xi.word(n))


@dataclass(frozen=True)
class CosetRep:
    rep: Portrait
    label: Vertex

    def __str__(self):
        return format_vertex(self.label)


def enumerate_cosets(H: ParabolicSpec, n: int) -> list[CosetRep]:
    """One element of K per depth-``n`` cylinder of K/(K n H)."""
    if n < 1:
        raise ValueError("depth must be at least 1")
    if not H.F.is_transitive():
        raise UnsupportedError("F must be transitive")
    base = H.xi.word(n)
    return [CosetRep(transfer_vertex(H.F, base, u), u) for u in omega_words(H.F, H.xi, n)]


class CylinderMeasure:
    """The K-invariant probability measure on Omega, seen at a fixed depth."""

    def __init__(self, F: LocalGroup, xi: BoundaryPoint, depth: int):
        self.F = F
        self.xi = xi
        self.depth = depth
        self.count = omega_count(F, xi, depth)

    def weight(self, label: Vertex) -> Fraction:
        if not is_omega_word(self.F, self.xi, label):
            return Fraction(0)
        return Fraction(1, omega_count(self.F, self.xi, len(label)))

    @property
    def weights(self) -> dict:
        w = Fraction(1, self.count)
        return {u: w for u in omega_words(self.F, self.xi, self.depth)}

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def refines_consistently(self) -> bool:
        for u, w in self.weights.items():
            kids = [u + (c,) for c in omega_next(self.F, self.xi, u)]
            if sum((self.weight(k) for k in kids), Fraction(0)) != w:
                return False
        return True


# solving k1 g k2 in H ---------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    """One cell ``f2 k_a H`` of the decomposition of ``g f1 K H  n  f2 K H``."""

    source: Vertex
    label: Vertex
    k_a: Portrait
    k_b: Portrait
    h: Portrait
    shift: int
    m: int
    x_h: Vertex
    weight: Fraction
    case: str | None = None

    @property
    def k1(self) -> Portrait:
        return self.k_a.inverse()


@dataclass
class Decomposition:
    H: ParabolicSpec
    g: Portrait
    depth: int
    length: int
    cells: list = field(default_factory=list)
    excluded: list = field(default_factory=list)

    @property
    def D(self) -> int:
        return len(self.g.root_image)

    def labels(self) -> list:
        return [c.label for c in self.cells]

    def measure(self) -> Fraction:
        return sum((c.weight for c in self.cells), Fraction(0))


def _walk_pops(g: Portrait, b: Vertex) -> bool:
    """Whether the last edge of ``g([x0, b])`` points back toward x0."""
    return len(g.apply(b)) < len(g.apply(b[:-1]))


def stable_cells(F: LocalGroup, xi: BoundaryPoint, g: Portrait, depth: int,
                 min_len: int = 0) -> list[Vertex]:
    """Partition Omega into cylinders of length >= ``depth`` on which ``g`` is a cylinder map.

    A cylinder ``[b]`` is stable once ``b`` is past the support of ``g`` and
    the last step of ``g`` along ``b`` moves away from x0.
    """
    need = max(depth, g.support_radius, min_len, 1)
    out = []
    stack = [()]
    while stack:
        b = stack.pop()
        if len(b) >= need and not _walk_pops(g, b):
            out.append(b)
            continue
        for c in reversed(omega_next(F, xi, b)):
            stack.append(b + (c,))
    return sorted(out)


def _axis_of(g: Portrait, xi: BoundaryPoint):
    """Classification of ``g`` when it translates along an axis through x0 toward ``xi``."""
    D = len(g.root_image)
    if D == 0:
        return None
    c = classify(g, D + 2)
    if not c.is_hyperbolic or c.axis_point != () or c.attracting != xi:
        return None
    return c


def _case(axis, D: int, zeta: BoundaryPoint) -> str | None:
    """Where ``[x0, zeta)`` leaves the axis: toward xi, between, or beyond ``g^-1 x0``."""
    if axis is None:
        return None
    t = boundary_lcp(zeta, axis.repelling)
    if t is None or t >= D:
        return "beyond"
    if t == 0:
        return "toward"
    return "between"


def solve_cells(H: ParabolicSpec, g: Portrait, depth: int, length: int = 2) -> Decomposition:
    """All cells ``k_a`` with ``k_a^-1 g k_b in H`` for some ``k_b`` in K."""
    F, xi = H.F, H.xi
    D = len(g.root_image)
    dec = Decomposition(H, g, depth, length)
    axis = _axis_of(g, xi)
    for b in stable_cells(F, xi, g, depth, len(H.base)):
        k_b = transfer_vertex(F, xi.word(len(b)), b)
        zeta = k_b.boundary_image(xi)
        eta = g.boundary_image(zeta)
        if not in_omega(F, xi, eta):
            dec.excluded.append((b, "image leaves Omega"))
            continue
        k_a = transfer_boundary(F, xi, eta)
        h = k_a.inverse().compose(g).compose(k_b)
        if not contains(H.full, h):
            raise PortraitError(f"solver produced a non-member at cell {format_vertex(b)!r}")
        s = busemann_shift(h, xi)
        if H.unimodular and not contains(H, h):
            dec.excluded.append((b, f"shift {s} outside H" if s else "base moved"))
            continue
        if s % length or (D + s) % 2:
            raise PortraitError(f"shift {s} incompatible with length {length}")
        x_h = xi.word((D + s) // 2)
        dec.cells.append(Cell(b, g.apply(b), k_a, k_b, h, s, s // length, x_h,
                              Fraction(1, omega_count(F, xi, len(g.apply(b)))),
                              _case(axis, D, zeta)))
    dec.cells.sort(key=lambda c: c.label)
    return dec


def coset_decomposition(g: Portrait, f1: Portrait, f2: Portrait, H: ParabolicSpec,
                        depth: int, length: int = 2) -> Decomposition:
    """Cells of ``g f1 K H  n  f2 K H``, solved for ``g' = f2^-1 g f1``."""
    gp = f2.inverse().compose(g).compose(f1)
    return solve_cells(H, gp, depth, length)


def labels_disjoint(labels: list) -> bool:
    """No label is a prefix of another, so the cylinders are pairwise disjoint."""
    ordered = sorted(labels)
    return all(ordered[i + 1][:len(ordered[i])] != ordered[i] for i in range(len(ordered) - 1))


def resolve_counts(dec: Decomposition) -> dict:
    """For each Omega-word at the deepest label length, how many cells contain it."""
    F, xi = dec.H.F, dec.H.xi
    N = max((len(c.label) for c in dec.cells), default=0)
    counts = {}
    for a in omega_words(F, xi, N):
        counts[a] = sum(1 for c in dec.cells if a[:len(c.label)] == c.label)
    return counts


def brute_force_shifts(H: ParabolicSpec, g: Portrait, depth: int) -> dict:
    """Measure of the solution region per Busemann shift, by brute force on words.

    Every Omega-word ``w`` of a length well past the support of ``g`` and past
    ``|g(x0)|`` is pushed through ``g``; when the image is again an Omega-word
    the cylinder ``[g(w)]`` belongs to the solution region with shift
    ``|g(w)| - |w|``.  Nothing from the cell solver is reused.
    """
    F, xi = H.F, H.xi
    D = len(g.root_image)
    N = max(depth, g.support_radius, len(H.base)) + D + len(xi.prefix) + 2 * len(xi.period) + 1
    out: dict = {}
    for w in omega_words(F, xi, N):
        u = g.apply(w)
        if not is_omega_word(F, xi, u):
            continue
        s = len(u) - len(w)
        if H.unimodular:
            if s:
                continue
            j = len(H.base)
            if H.kind is Kind.RAY and g.apply(w[:j]) != u[:j]:
                continue
        out[s] = out.get(s, Fraction(0)) + Fraction(1, omega_count(F, xi, len(u)))
    return out


# solution domains and the unimodular containment -------------------------------------

@dataclass(frozen=True)
class SolutionDomain:
    m: int
    x_h: Vertex
    cells: tuple

    @property
    def domain_reps(self) -> list:
        return [CosetRep(c.k1, c.source) for c in self.cells]


def solution_domains(g: Portrait, H: ParabolicSpec, gamma: MinimalHyperbolic,
                     depth: int) -> list[SolutionDomain]:
    from .decomposition import INFINITY, proj_interval
    D = len(g.root_image)
    if D and proj_interval(g, H.xi) is not INFINITY:
        raise PortraitError("projection precondition: g must translate along [x0, xi)")
    dec = solve_cells(H, g, depth, gamma.length)
    groups: dict = {}
    for c in dec.cells:
        if abs(c.m) * gamma.length > D:
            raise AssertionError(f"class m={c.m} exceeds the bound for dist {D}")
        if c.k_a.apply(c.x_h) != c.x_h:
            raise AssertionError(f"k1 does not fix [x0, x_h] at cell {format_vertex(c.source)!r}")
        groups.setdefault(c.m, []).append(c)
    return [SolutionDomain(m, groups[m][0].x_h, tuple(groups[m])) for m in sorted(groups)]


@dataclass(frozen=True)
class Containment:
    k_g: Portrait | None
    x_g: Vertex
    verified: bool
    empty: bool
    solutions: int


def unimodular_containment(g: Portrait, H: ParabolicSpec, depth: int) -> Containment:
    if not H.unimodular:
        raise UnsupportedError("containment check needs H without hyperbolic elements")
    D = len(g.root_image)
    if D % 2:
        raise PortraitError("dist(x0, g x0) must be even")
    x_g = H.xi.word(D // 2)
    dec = solve_cells(H, g, depth)
    if not dec.cells:
        return Containment(None, x_g, False, True, 0)
    mid = g.root_image[:D // 2]
    k_g = transfer_vertex(H.F, x_g, mid)
    verified = all(c.k_a.apply(x_g) == mid for c in dec.cells)
    return Containment(k_g, x_g, verified, False, len(dec.cells))
