"""Portraits: finite descriptions of tree automorphisms with local action in F.

An automorphism ``g`` of the word-model tree is determined by the image
``g(x0)`` and, at every vertex ``v``, its local permutation ``sigma_v``: the
map that sends the color of an edge at ``v`` to the color of its image edge at
``g(v)``.  Consistency across the edge from ``v`` to its parent forces
``sigma_v(v[-1]) == sigma_parent(v[-1])``, so the free data at ``v != x0`` is
the relative permutation ``tau_v = sigma_parent^-1 o sigma_v``, which fixes
``v[-1]``.

A :class:`Portrait` stores ``g(x0)``, ``sigma_x0`` and the finitely many
non-identity relative permutations.  Everywhere else the relative permutation
is the identity, i.e. a vertex inherits its parent's local permutation.  The
class is closed under composition and inversion.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Iterable

from . import local_action as la
from .local_action import LocalGroup, Perm
from .tree import (BoundaryPoint, Edge, TreeError, Vertex, dist, format_vertex,
                   geodesic, lcp, neighbors, path_colors, step, vertex)


class PortraitError(ValueError):
    pass


class ProbeDepthError(PortraitError):
    """The probe or certificate ball is too small to decide the question."""


class ParityError(PortraitError):
    pass


class TransferError(PortraitError):
    """No bounded-support element of K realizes the requested move."""


def _perm_order(p: Perm) -> int:
    n = 1
    seen = set()
    for start in range(1, len(p) + 1):
        if start in seen:
            continue
        length = 0
        c = start
        while c not in seen:
            seen.add(c)
            c = p[c - 1]
            length += 1
        n = n * length // math.gcd(n, length)
    return n


def _relabel(p: Perm, word: Iterable[int]) -> tuple:
    return tuple(p[c - 1] for c in word)


class Portrait:
    __slots__ = ("degree", "root_image", "root_perm", "relative", "_hash")

    def __init__(self, degree: int, root_image: Vertex, root_perm: Perm,
                 relative: dict | None = None):
        self.degree = degree
        self.root_image = vertex(root_image, degree)
        self.root_perm = la.check_perm(root_perm, degree)
        rel = {}
        for v, tau in (relative or {}).items():
            v = vertex(v, degree)
            tau = la.check_perm(tau, degree)
            if not v:
                raise PortraitError("x0 carries root_perm, not a relative permutation")
            if tau[v[-1] - 1] != v[-1]:
                raise PortraitError(f"relative permutation at {format_vertex(v)!r} "
                                    f"must fix the parent color {v[-1]}")
            if not la.is_identity(tau):
                rel[v] = tau
        self.relative = rel
        self._hash = None

    # constructors -----------------------------------------------------------

    @classmethod
    def identity(cls, d: int) -> "Portrait":
        return cls(d, (), la.identity(d))

    @classmethod
    def constant(cls, d: int, root_image: Vertex, perm: Perm) -> "Portrait":
        """``v -> root_image * perm(v)``: the same local permutation everywhere."""
        return cls(d, root_image, perm)

    @classmethod
    def from_local(cls, d: int, root_image: Vertex, local: dict) -> "Portrait":
        """Build from absolute local permutations at listed vertices.

        Unlisted vertices inherit their parent's permutation.
        """
        local = {vertex(v, d): la.check_perm(p, d) for v, p in local.items()}
        root_perm = local.get((), la.identity(d))
        g = cls(d, root_image, root_perm)
        rel = {}
        for v in sorted(local, key=lambda w: (len(w), w)):
            if not v:
                continue
            parent_sigma = cls(d, root_image, root_perm, rel).local(v[:-1])
            tau = la.mul(la.inv(parent_sigma), local[v])
            if tau[v[-1] - 1] != v[-1]:
                raise PortraitError(f"local permutation at {format_vertex(v)!r} is "
                                    "inconsistent with its parent along the shared edge")
            rel[v] = tau
        g = cls(d, root_image, root_perm, rel)
        return g

    # basic queries ----------------------------------------------------------

    @property
    def support_radius(self) -> int:
        return max((len(v) for v in self.relative), default=0)

    def local(self, v: Vertex) -> Perm:
        sigma = self.root_perm
        for i in range(1, len(v) + 1):
            tau = self.relative.get(v[:i])
            if tau is not None:
                sigma = la.mul(sigma, tau)
        return sigma

    def apply(self, v: Vertex) -> Vertex:
        w = self.root_image
        sigma = self.root_perm
        for i, c in enumerate(v):
            if i:
                tau = self.relative.get(v[:i])
                if tau is not None:
                    sigma = la.mul(sigma, tau)
            w = step(w, sigma[c - 1])
        return w

    def __call__(self, v: Vertex) -> Vertex:
        return self.apply(v)

    def apply_inverse(self, v: Vertex) -> Vertex:
        u: Vertex = ()
        for c in path_colors(self.root_image, v):
            sigma = self.local(u)
            u = step(u, la.inv(sigma)[c - 1])
        return u

    def in_group(self, F: LocalGroup) -> bool:
        """Every local permutation lies in F."""
        return self.root_perm in F and all(t in F for t in self.relative.values())

    def is_type_preserving(self) -> bool:
        return len(self.root_image) % 2 == 0

    def fixes(self, v: Vertex) -> bool:
        return self.apply(v) == v

    # group law ----------------------------------------------------------------

    @classmethod
    def _assemble(cls, d, root_image, local_fn, candidates) -> "Portrait":
        rel = {}
        for v in candidates:
            if not v:
                continue
            tau = la.mul(la.inv(local_fn(v[:-1])), local_fn(v))
            if not la.is_identity(tau):
                rel[v] = tau
        return cls(d, root_image, local_fn(()), rel)

    def compose(self, other: "Portrait") -> "Portrait":
        """``self o other`` (apply ``other`` first)."""
        if other.degree != self.degree:
            raise PortraitError("degree mismatch")
        cand = set(other.relative)
        for w in self.relative:
            u = other.apply_inverse(w)
            cand.add(u)
            cand.update(neighbors(u, self.degree))

        def local_fn(v):
            return la.mul(self.local(other.apply(v)), other.local(v))

        return Portrait._assemble(self.degree, self.apply(other.root_image), local_fn, cand)

    def __mul__(self, other: "Portrait") -> "Portrait":
        return self.compose(other)

    def inverse(self) -> "Portrait":
        cand = set()
        for w in self.relative:
            u = self.apply(w)
            cand.add(u)
            cand.update(neighbors(u, self.degree))

        def local_fn(v):
            return la.inv(self.local(self.apply_inverse(v)))

        return Portrait._assemble(self.degree, self.apply_inverse(()), local_fn, cand)

    def power(self, n: int) -> "Portrait":
        base = self if n >= 0 else self.inverse()
        result = Portrait.identity(self.degree)
        for _ in range(abs(n)):
            result = base.compose(result)
        return result

    def __eq__(self, other) -> bool:
        return (isinstance(other, Portrait) and self.degree == other.degree
                and self.root_image == other.root_image
                and self.root_perm == other.root_perm and self.relative == other.relative)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.degree, self.root_image, self.root_perm,
                               frozenset(self.relative.items())))
        return self._hash

    def __repr__(self) -> str:
        return (f"Portrait(d={self.degree}, root_image={format_vertex(self.root_image)!r}, "
                f"root_perm={la.format_cycles(self.root_perm)}, support={len(self.relative)})")

    def ball_images(self, radius: int):
        """Yield ``(v, g(v))`` for every ``v`` with ``|v| <= radius`` (depth-first)."""
        d = self.degree
        rel = self.relative
        stack = [((), self.root_image, self.root_perm)]
        while stack:
            v, w, sigma = stack.pop()
            yield v, w
            if len(v) == radius:
                continue
            for c in range(d, 0, -1):
                if v and v[-1] == c:
                    continue
                child = v + (c,)
                tau = rel.get(child)
                stack.append((child, step(w, sigma[c - 1]),
                              sigma if tau is None else la.mul(sigma, tau)))

    def agrees_with(self, other: "Portrait", radius: int) -> bool:
        return all(a[1] == b[1] for a, b in zip(self.ball_images(radius), other.ball_images(radius)))

    # boundary action --------------------------------------------------------

    def boundary_image(self, xi: BoundaryPoint) -> BoundaryPoint:
        """The end ``g(xi)``, computed exactly.

        Beyond the support and beyond distance ``|g(x0)|`` the action on the
        ray of ``xi`` is a fixed relabeling of letters.
        """
        lo = max(self.support_radius, len(self.root_image) + 1, len(xi.prefix))
        per = len(xi.period)
        n0 = len(xi.prefix) + per * max(0, -(-(lo - len(xi.prefix)) // per))
        base = xi.word(n0)
        sigma = self.local(base)
        return BoundaryPoint(self.apply(base), _relabel(sigma, xi.period))

    def ray_prefix_image(self, xi: BoundaryPoint, n: int) -> Vertex:
        return self.apply(xi.word(n))

    # serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        entries = [["", la.format_perm(self.root_perm)]]
        for v in sorted(self.relative, key=lambda w: (len(w), w)):
            entries.append([format_vertex(v), la.format_perm(self.local(v))])
        return {"degree": self.degree, "root_image": format_vertex(self.root_image),
                "entries": entries, "radius": self.support_radius}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Portrait":
        d = int(data["degree"])
        local = {}
        for v, p in data.get("entries", []):
            local[vertex(v, d)] = la.parse_perm(p, d) if isinstance(p, str) else la.check_perm(p, d)
        g = cls.from_local(d, vertex(data.get("root_image", ""), d), local)
        radius = data.get("radius")
        if radius is not None and g.support_radius > int(radius):
            raise PortraitError(f"entries reach depth {g.support_radius} beyond declared radius {radius}")
        return g

    @classmethod
    def from_json(cls, text: str) -> "Portrait":
        return cls.from_dict(json.loads(text))


def fixes_boundary_point(g: Portrait, xi: BoundaryPoint, certify_depth: int | None = None) -> bool:
    need = g.support_radius + 2 * len(xi.period) + len(xi.prefix)
    if certify_depth is not None and certify_depth < need:
        raise ProbeDepthError(f"certify_depth {certify_depth} < required {need}")
    return g.boundary_image(xi) == xi


def busemann_shift(g: Portrait, xi: BoundaryPoint) -> int:
    """For ``g`` fixing ``xi``: the ``s`` with ``g(xi_N) = xi_{N+s}`` for large ``N``."""
    if g.boundary_image(xi) != xi:
        raise PortraitError("element does not fix the boundary point")
    per = len(xi.period)
    n = len(xi.prefix) + per * (g.support_radius + len(g.root_image) + 2)
    img = g.apply(xi.word(n))
    s = len(img) - n
    if img != xi.word(len(img)):
        raise PortraitError("ray image has not merged with the ray; increase depth")
    return s


# classification ----------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    kind: str
    translation_length: int
    axis_point: Vertex
    attracting: BoundaryPoint | None = None
    repelling: BoundaryPoint | None = None

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"


def translation_length(g: Portrait) -> int:
    d1 = len(g.root_image)
    d2 = len(g.apply(g.root_image))
    return max(0, d2 - d1)


def _min_displacement_vertex(g: Portrait) -> tuple[int, Vertex]:
    # the displacement-minimizing vertex nearest x0 lies on [x0, g(x0)]
    best = None
    for v in geodesic((), g.root_image):
        disp = dist(v, g.apply(v))
        if best is None or disp < best[0]:
            best = (disp, v)
    return best


def attracting_point(g: Portrait, axis_point: Vertex | None = None) -> BoundaryPoint:
    if axis_point is None:
        _, axis_point = _min_displacement_vertex(g)
    w = axis_point
    floor = max(g.support_radius, len(g.root_image) + 1)
    while len(w) < floor:
        w = g.apply(w)
    gw = g.apply(w)
    if gw[:len(w)] != w or len(gw) <= len(w):
        raise PortraitError("axis does not descend from the base point")
    seg = gw[len(w):]
    sigma = g.local(w)
    period = []
    p = la.identity(g.degree)
    for _ in range(_perm_order(sigma)):
        period.extend(_relabel(p, seg))
        p = la.mul(sigma, p)
    return BoundaryPoint(w, tuple(period))


def classify(g: Portrait, probe_depth: int | None = None) -> Classification:
    D = len(g.root_image)
    if probe_depth is not None and probe_depth < D + 2:
        raise ProbeDepthError(f"insufficient probe depth {probe_depth}; need >= {D + 2}")
    if D % 2:
        raise ParityError("element swaps the bipartition (odd displacement of x0)")
    length, point = _min_displacement_vertex(g)
    if length != translation_length(g):
        raise PortraitError("displacement minimum disagrees with the iterate cross-check")
    if length % 2:
        raise ParityError(f"odd translation length {length}")
    if length == 0:
        return Classification("elliptic", 0, point)
    ginv = g.inverse()
    _, inv_point = _min_displacement_vertex(ginv)
    return Classification("hyperbolic", length, point,
                          attracting_point(g, point), attracting_point(ginv, inv_point))


# constructors for special elements ---------------------------------------------

def build_hyperbolic(F: LocalGroup, e: Edge, e2: Edge) -> Portrait:
    """Hyperbolic element sending the oriented edge ``e`` onto ``e2``.

    ``e2`` must lie ahead of ``e`` on a common geodesic with an odd number of
    edges strictly between them.  The result has the same local permutation
    (the least one in F sending ``e.color`` to ``e2.color``) at every vertex.
    """
    if not F.is_transitive():
        raise PortraitError("F must be transitive to move colors")
    p, q = e.parent, e2.parent
    L = dist(p, q)
    if L == 0 or dist(p, e2.child) != L + 1 or dist(e.child, q) != L - 1:
        raise PortraitError("edges are not coherently oriented along one geodesic")
    if L % 2:
        raise ParityError(f"{L - 1} edges between e and e' (must be odd)")
    f = F.least_mapping({e.color: e2.color})
    root = q
    for c in reversed(_relabel(f, p)):
        root = step(root, c)
    g = Portrait.constant(F.degree, root, f)
    assert g.apply(p) == q and g.apply(e.child) == e2.child
    return g


def rotation(d: int, perm: Perm) -> Portrait:
    """Element of K with constant local permutation ``perm``."""
    return Portrait.constant(d, (), perm)


def transfer_vertex(F: LocalGroup, u: Vertex, w: Vertex) -> Portrait:
    """Least element of K sending ``u`` to ``w``, inheriting beyond depth ``|u|``."""
    if len(u) != len(w):
        raise TransferError("K preserves distance to x0")
    d = F.degree
    if not u:
        return Portrait.identity(d)
    sigma = F.least_mapping({u[0]: w[0]})
    if sigma is None:
        raise TransferError(f"no element of F maps {u[0]} to {w[0]}")
    root_perm = sigma
    rel = {}
    for j in range(1, len(u)):
        f = F.least_mapping({u[j - 1]: w[j - 1], u[j]: w[j]})
        if f is None:
            raise TransferError(f"{format_vertex(w)!r} is not in the K-orbit of {format_vertex(u)!r}")
        rel[u[:j]] = la.mul(la.inv(sigma), f)
        sigma = f
    return Portrait(d, (), root_perm, rel)


def transfer_boundary(F: LocalGroup, xi: BoundaryPoint, eta: BoundaryPoint,
                      root_image: Vertex = ()) -> Portrait:
    """Least bounded-support element sending the end ``xi`` to ``root_image * eta``.

    With the default ``root_image`` the result lies in K.  Local permutations
    are chosen greedily (lexicographically least) until a single permutation
    carries the rest of the ray.
    """
    if root_image and root_image[-1] == eta.letter(0):
        raise TransferError("root image and target ray do not form a geodesic")
    d = F.degree
    L = len(xi.period) * len(eta.period) // math.gcd(len(xi.period), len(eta.period))
    P = max(len(xi.prefix), len(eta.prefix))

    def tail_map(start):
        window = range(start, max(start, P) + L)
        return F.least_mapping_seq([(xi.letter(j), eta.letter(j)) for j in window])

    f = tail_map(0)
    if f is not None:
        return Portrait.constant(d, root_image, f)
    sigma = F.least_mapping({xi.letter(0): eta.letter(0)})
    if sigma is None:
        raise TransferError("first letters lie in different F-orbits")
    root_perm = sigma
    rel = {}
    for j in range(1, P + L + 2):
        f = tail_map(j - 1)
        final = f is not None
        if not final:
            f = F.least_mapping({xi.letter(j - 1): eta.letter(j - 1), xi.letter(j): eta.letter(j)})
            if f is None:
                raise TransferError(f"{eta} is not in the K-orbit of {xi}")
        rel[xi.word(j)] = la.mul(la.inv(sigma), f)
        sigma = f
        if final:
            g = Portrait(d, root_image, root_perm, rel)
            assert g.boundary_image(xi) == BoundaryPoint(root_image + eta.prefix, eta.period)
            return g
    raise TransferError(f"no eventually constant element of K sends {xi} to {eta}")


def shifted(xi: BoundaryPoint, D: int) -> BoundaryPoint:
    """The end read from letter ``D`` of ``xi`` onwards."""
    start = max(D, len(xi.prefix))
    word = tuple(xi.letter(j) for j in range(D, start + len(xi.period)))
    return BoundaryPoint(word[:start - D], word[start - D:])


def translation_along(F: LocalGroup, xi: BoundaryPoint, D: int) -> Portrait:
    """Element fixing ``xi`` and moving x0 to ``xi_D`` (hyperbolic when D > 0)."""
    if D % 2:
        raise ParityError("translation length along a ray must be even")
    return transfer_boundary(F, xi, shifted(xi, D), xi.word(D))


def random_portrait(F: LocalGroup, rng: random.Random, radius: int = 2,
                    max_move: int = 4, in_K: bool = False) -> Portrait:
    """Random element of U(F)+ with relative permutations up to ``radius``."""
    from .tree import sphere
    d = F.degree
    if in_K:
        root = ()
    else:
        n = rng.choice(range(0, max_move + 1, 2))
        root = ()
        while len(root) < n:
            c = rng.randint(1, d)
            if not root or root[-1] != c:
                root = root + (c,)
    stabs = {c: [p for p in F.elements if p[c - 1] == c] for c in range(1, d + 1)}
    rel = {}
    for r in range(1, radius + 1):
        for v in sphere(r, d):
            rel[v] = rng.choice(stabs[v[-1]])
    return Portrait(d, root, rng.choice(F.elements), rel)


def random_K_element(F: LocalGroup, rng: random.Random, radius: int = 2) -> Portrait:
    return random_portrait(F, rng, radius=radius, in_K=True)
