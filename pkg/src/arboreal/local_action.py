"""Finite permutation groups F on the colors {1..d}.

A permutation is a tuple ``p`` of length ``d`` with ``p[c - 1]`` the image of
color ``c`` (one-line notation).  Groups are enumerated by closure; with
``d <= 8`` everything below is brute force.
"""

from __future__ import annotations

import re
from collections import deque
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

Perm = tuple  # tuple[int, ...]


class PermError(ValueError):
    pass


def identity(d: int) -> Perm:
    return tuple(range(1, d + 1))


def is_identity(p: Perm) -> bool:
    return all(p[i] == i + 1 for i in range(len(p)))


def mul(p: Perm, q: Perm) -> Perm:
    """Composition ``p o q`` (apply ``q`` first)."""
    return tuple(p[q[i] - 1] for i in range(len(q)))


def inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, img in enumerate(p):
        out[img - 1] = i + 1
    return tuple(out)


def check_perm(p: Sequence[int], d: int) -> Perm:
    p = tuple(int(x) for x in p)
    if len(p) != d or sorted(p) != list(range(1, d + 1)):
        raise PermError(f"not a permutation of 1..{d}: {p}")
    return p


def parse_perm(text: str, d: int) -> Perm:
    """Parse cycle notation ``"(1 2 3)(4 5)"`` / ``"(123)"`` or one-line ``"2 3 1"``."""
    text = text.strip()
    if not text or text == "()":
        return identity(d)
    if text.startswith("("):
        images = list(range(1, d + 1))
        cycles = re.findall(r"\(([^()]*)\)", text)
        if "".join(f"({c})" for c in cycles).replace(" ", "") != text.replace(" ", ""):
            raise PermError(f"malformed cycle notation: {text!r}")
        for cyc in reversed(cycles):
            pts = [int(t) for t in (cyc.split() if " " in cyc.strip() else list(cyc.strip()))]
            if any(not 1 <= x <= d for x in pts) or len(set(pts)) != len(pts):
                raise PermError(f"bad cycle {cyc!r} for degree {d}")
            # rightmost cycle acts first
            step = list(range(1, d + 1))
            for a, b in zip(pts, pts[1:] + pts[:1]):
                step[a - 1] = b
            images = [step[x - 1] for x in images]
        return check_perm(images, d)
    parts = text.split() if " " in text else list(text)
    return check_perm([int(t) for t in parts], d)


def format_perm(p: Perm) -> str:
    return " ".join(str(x) for x in p)


def format_cycles(p: Perm) -> str:
    seen = set()
    out = []
    for start in range(1, len(p) + 1):
        if start in seen or p[start - 1] == start:
            continue
        cyc = [start]
        seen.add(start)
        nxt = p[start - 1]
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = p[nxt - 1]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, int(n ** 0.5) + 1))


class LocalGroup:
    """A permutation group acting on ``{1..degree}``, enumerated by closure."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = ()):
        self.degree = degree
        gens = []
        for g in generators:
            if len(g) != degree:
                raise PermError(f"generator {tuple(g)} does not have degree {degree}")
            gens.append(check_perm(g, degree))
        self.generators = tuple(gens)
        self.elements = self._close(self.generators)
        self._index = frozenset(self.elements)

    def _close(self, gens) -> tuple:
        e = identity(self.degree)
        seen = {e}
        queue = deque([e])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return tuple(sorted(seen))

    @classmethod
    def from_strings(cls, degree: int, generators: Iterable[str]) -> "LocalGroup":
        return cls(degree, [parse_perm(s, degree) for s in generators])

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, p) -> bool:
        return tuple(p) in self._index

    def __repr__(self) -> str:
        gens = ", ".join(format_cycles(g) for g in self.generators)
        return f"LocalGroup(degree={self.degree}, order={len(self)}, generators=[{gens}])"

    def orbit(self, c: int) -> frozenset:
        return frozenset(p[c - 1] for p in self.elements)

    def is_transitive(self) -> bool:
        return len(self.orbit(1)) == self.degree

    def is_2transitive(self) -> bool:
        d = self.degree
        pair_orbit = {(p[0], p[1]) for p in self.elements}
        return self.is_transitive() and len(pair_orbit) == d * (d - 1)

    def is_block(self, block: frozenset) -> bool:
        for p in self.elements:
            img = frozenset(p[c - 1] for c in block)
            if img != block and img & block:
                return False
        return True

    def is_primitive(self) -> bool:
        if not self.is_transitive():
            return False
        d = self.degree
        for size in range(2, d):
            if d % size:
                continue
            for rest in combinations(range(2, d + 1), size - 1):
                if self.is_block(frozenset((1,) + rest)):
                    return False
        return True

    def is_cyclic_of_prime_order(self) -> bool:
        return _is_prime(len(self))

    def gate_failure(self) -> str | None:
        """Name of the first failed hypothesis, or ``None`` when F is admissible."""
        if not self.is_transitive():
            return "not transitive"
        if not self.is_primitive():
            return "not primitive"
        if self.is_cyclic_of_prime_order():
            return "cyclic of prime order"
        return None

    def passes_paper_gate(self) -> bool:
        return self.gate_failure() is None

    def point_stabilizer(self, c: int) -> "LocalGroup":
        stab = [p for p in self.elements if p[c - 1] == c]
        return LocalGroup(self.degree, stab)

    def stabilizer_orbit(self, c: int, c2: int) -> frozenset:
        if c == c2:
            raise PermError("stabilizer_orbit needs distinct colors")
        return frozenset(p[c2 - 1] for p in self.elements if p[c - 1] == c)

    @cached_property
    def _orbit_size_table(self) -> dict:
        d = self.degree
        return {(a, b): len(self.stabilizer_orbit(a, b))
                for a in range(1, d + 1) for b in range(1, d + 1) if a != b}

    def stabilizer_orbit_size(self, c: int, c2: int) -> int:
        return self._orbit_size_table[(c, c2)]

    @cached_property
    def _pair_orbits(self) -> dict:
        d = self.degree
        return {(a, b): frozenset((p[a - 1], p[b - 1]) for p in self.elements)
                for a in range(1, d + 1) for b in range(1, d + 1) if a != b}

    def pair_orbit(self, a: int, b: int) -> frozenset:
        """Orbit of the ordered pair ``(a, b)`` of distinct colors."""
        return self._pair_orbits[(a, b)]

    def mapping(self, constraints: dict) -> list:
        """Elements sending each key color to its value, lexicographic order."""
        return [p for p in self.elements
                if all(p[a - 1] == b for a, b in constraints.items())]

    def least_mapping(self, constraints: dict) -> Perm | None:
        for p in self.elements:
            if all(p[a - 1] == b for a, b in constraints.items()):
                return p
        return None

    def least_mapping_seq(self, pairs) -> Perm | None:
        """Like :meth:`least_mapping` for a list of pairs; conflicting pairs give ``None``."""
        constraints = {}
        for a, b in pairs:
            if constraints.setdefault(a, b) != b:
                return None
        return self.least_mapping(constraints)

    def generated_by_point_stabilizers(self) -> bool:
        gens = [p for c in range(1, self.degree + 1)
                for p in self.elements if p[c - 1] == c]
        return len(self._close(gens)) == len(self)


def symmetric_group(d: int) -> LocalGroup:
    return LocalGroup.from_strings(d, [f"({' '.join(map(str, range(1, d + 1)))})", "(1 2)"])


def dihedral_group(d: int) -> LocalGroup:
    """Symmetries of the d-gon with vertices 1..d in cyclic order."""
    rot = tuple(list(range(2, d + 1)) + [1])
    refl = tuple(((2 - c) % d) or d for c in range(1, d + 1))
    return LocalGroup(d, [rot, refl])
