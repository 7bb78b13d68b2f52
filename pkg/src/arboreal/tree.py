"""The legally colored d-regular tree in its word model.

Vertices are reduced words over the colors ``1..d`` (no two equal consecutive
letters); the empty word is the base vertex ``x0``.  Crossing the edge of
color ``c`` at a vertex ``w`` appends ``c`` to ``w``, or pops it when ``w``
already ends in ``c``.  The coloring is therefore built into the data: the
edge between ``w`` and ``w + (c,)`` has color ``c``.

Boundary points are eventually periodic infinite reduced words, stored as a
``(prefix, period)`` pair in canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

Vertex = tuple  # tuple[int, ...]

MIN_DEGREE = 3
MAX_DEGREE = 8


class TreeError(ValueError):
    """Invalid vertex, edge or boundary point."""


def check_degree(d: int) -> int:
    if not isinstance(d, int) or not MIN_DEGREE <= d <= MAX_DEGREE:
        raise TreeError(f"degree must be an integer in [{MIN_DEGREE}, {MAX_DEGREE}], got {d!r}")
    return d


def is_reduced(word: Sequence[int], d: int | None = None) -> bool:
    for i, c in enumerate(word):
        if d is not None and not 1 <= c <= d:
            return False
        if i and word[i - 1] == c:
            return False
    return True


def vertex(word, d: int | None = None) -> Vertex:
    """Coerce ``word`` (str of digits, or iterable of ints) to a vertex."""
    if isinstance(word, str):
        word = tuple(int(ch) for ch in word)
    else:
        word = tuple(int(c) for c in word)
    if not is_reduced(word, d):
        raise TreeError(f"not a reduced color word: {format_vertex(word)!r}")
    return word


def format_vertex(v: Vertex) -> str:
    return "".join(str(c) for c in v)


def step(w: Vertex, c: int) -> Vertex:
    """Cross the color-``c`` edge at ``w``."""
    if w and w[-1] == c:
        return w[:-1]
    return w + (c,)


def lcp(u: Sequence[int], v: Sequence[int]) -> int:
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return n


def dist(u: Vertex, v: Vertex) -> int:
    return len(u) + len(v) - 2 * lcp(u, v)


def path_colors(u: Vertex, v: Vertex) -> list[int]:
    """Edge colors met walking the geodesic from ``u`` to ``v``."""
    k = lcp(u, v)
    return list(reversed(u[k:])) + list(v[k:])


def geodesic(u: Vertex, v: Vertex) -> list[Vertex]:
    out = [u]
    w = u
    for c in path_colors(u, v):
        w = step(w, c)
        out.append(w)
    return out


def neighbors(v: Vertex, d: int) -> list[Vertex]:
    return [step(v, c) for c in range(1, d + 1)]


def sphere(n: int, d: int) -> Iterator[Vertex]:
    """All vertices at distance ``n`` from ``x0`` in lexicographic order."""
    if n == 0:
        yield ()
        return
    for word in product(range(1, d + 1), repeat=n):
        if is_reduced(word):
            yield word


def ball(n: int, d: int) -> Iterator[Vertex]:
    for r in range(n + 1):
        yield from sphere(r, d)


@dataclass(frozen=True)
class Edge:
    """The oriented edge from ``parent`` across color ``color``."""

    parent: Vertex
    color: int

    def __post_init__(self):
        if self.parent and self.parent[-1] == self.color:
            raise TreeError("edge child word parent+color is not reduced")

    @property
    def child(self) -> Vertex:
        return self.parent + (self.color,)


def half_tree_contains(e: Edge, v: Vertex) -> bool:
    """Whether ``v`` lies in the half-tree at ``e.parent`` containing ``e``.

    The half-tree includes ``e.parent`` itself.
    """
    if v == e.parent:
        return True
    cols = path_colors(e.parent, v)
    return cols[0] == e.color


def _primitive_root(word: tuple) -> tuple:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


@dataclass(frozen=True)
class BoundaryPoint:
    """The end ``prefix + period + period + ...`` of the tree.

    Instances are normalized on construction: the period is primitive and the
    prefix is as short as possible, so equal ends compare equal.
    """

    prefix: Vertex
    period: Vertex

    def __post_init__(self):
        prefix = tuple(self.prefix)
        period = tuple(self.period)
        if not period:
            raise TreeError("boundary period must be nonempty")
        if not is_reduced(prefix + period + period[:1]):
            raise TreeError("boundary word is not reduced at a seam")
        if len(period) == 1:
            raise TreeError("a period of length 1 repeats a letter")
        period = _primitive_root(period)
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1:] + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    def letter(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def word(self, n: int) -> Vertex:
        return tuple(self.letter(i) for i in range(n))

    def __str__(self) -> str:
        return f"{format_vertex(self.prefix)}|{format_vertex(self.period)}"

    @classmethod
    def parse(cls, text: str, d: int | None = None) -> "BoundaryPoint":
        if "|" not in text:
            raise TreeError(f"boundary point must look like 'prefix|period', got {text!r}")
        pre, per = text.strip().split("|", 1)
        pre_v = tuple(int(ch) for ch in pre)
        per_v = tuple(int(ch) for ch in per)
        if d is not None and any(not 1 <= c <= d for c in pre_v + per_v):
            raise TreeError(f"color out of range in {text!r}")
        return cls(pre_v, per_v)


def ray_vertex(xi: BoundaryPoint, n: int) -> Vertex:
    """The vertex at distance ``n`` from ``x0`` on the ray ``[x0, xi)``."""
    if n < 0:
        raise TreeError("ray index must be nonnegative")
    return xi.word(n)


def boundary_lcp(a: BoundaryPoint, b: BoundaryPoint) -> int | None:
    """Length of the common prefix of two ends, ``None`` when they coincide."""
    if a == b:
        return None
    bound = max(len(a.prefix), len(b.prefix)) + len(a.period) * len(b.period) + 1
    return lcp(a.word(bound), b.word(bound))


def boundary_from_word(word: Sequence[int], start: int, period: int) -> BoundaryPoint:
    """End whose letters from ``start`` on repeat with the given period."""
    word = tuple(word)
    return BoundaryPoint(word[:start], word[start:start + period])
