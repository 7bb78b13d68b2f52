"""Rho-function, bound integrals, the S_n sequence and decay experiments.

All measures and modular values are exact fractions.  Square roots are exact
whenever the radicand is a rational square; otherwise they are enclosed in an
``mpmath`` interval and reported as a ``(lo, hi)`` pair.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv, mp

from .automorphism import Portrait, PortraitError, busemann_shift, transfer_boundary, transfer_vertex
from .cosets import CosetRep, coset_decomposition, fixator_index, in_omega, omega_next
from .parabolic import MinimalHyperbolic, ParabolicSpec, minimal_hyperbolic, modular_value
from .tree import format_vertex

iv.dps = 40
mp.dps = 40


class FactorizationError(PortraitError):
    """The element does not factor as k h with k in K and h in H."""


class RefineError(PortraitError):
    """The quantity is not constant on the cell at this depth."""


def exact_sqrt(q: Fraction) -> Fraction | None:
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _iv_sqrt(q: Fraction):
    return iv.sqrt(iv.mpf(q.numerator) / q.denominator)


# rho-function ---------------------------------------------------------------------------

class RhoFunction:
    """The rho-function normalized to 1 on K.

    For the full stabilizer, ``rho(k h) = Delta_H(h)``; for unimodular H it is
    identically 1.
    """

    def __init__(self, H: ParabolicSpec, gamma: MinimalHyperbolic | None = None):
        self.H = H
        if H.unimodular:
            self.gamma = None
            self.delta = Fraction(1)
        else:
            self.gamma = gamma or minimal_hyperbolic(H)
            self.delta = modular_value(H, self.gamma)

    def factor(self, g: Portrait) -> tuple[Portrait, Portrait]:
        """``g = k h`` with ``k`` in K and ``h`` fixing the end."""
        F, xi = self.H.F, self.H.xi
        eta = g.boundary_image(xi)
        if not in_omega(F, xi, eta):
            raise FactorizationError(f"g(xi) = {eta} is not in the K-orbit of {xi}")
        k = transfer_boundary(F, xi, eta)
        return k, k.inverse().compose(g)

    def __call__(self, g: Portrait) -> Fraction:
        if self.H.unimodular:
            return Fraction(1)
        _, h = self.factor(g)
        return self.delta ** (busemann_shift(h, self.H.xi) // self.gamma.length)


def rho_eval(rho: RhoFunction, g: Portrait, depth: int | None = None) -> Fraction:
    return rho(g)


def radon_nikodym(rho: RhoFunction, g: Portrait, cell: CosetRep, depth: int | None = None) -> Fraction:
    """``rho(g k) / rho(k)`` on the cell of ``k``, checked against one refinement."""
    F, xi = rho.H.F, rho.H.xi
    value = rho(g.compose(cell.rep)) / rho(cell.rep)
    n = len(cell.label)
    for c in omega_next(F, xi, cell.label):
        child = cell.label + (c,)
        k = transfer_vertex(F, xi.word(n + 1), child)
        if rho(g.compose(k)) / rho(k) != value:
            raise RefineError(f"refine: derivative varies inside cell {format_vertex(cell.label)!r}")
    return value


# bound integral -------------------------------------------------------------------------

@dataclass
class BoundResult:
    lo: float
    hi: float
    exact: Fraction | None
    cells: list = field(default_factory=list)
    depth: int = 0
    fixator_bound: Fraction | None = None

    @property
    def value(self) -> float:
        return float(self.exact) if self.exact is not None else (self.lo + self.hi) / 2


def bound_integral(t: Portrait, f1: Portrait, f2: Portrait, rho: RhoFunction,
                   depth: int) -> BoundResult:
    """Sum over cells of ``g f1 K H n f2 K H`` of the square-rooted rho-ratio times the cell measure.

    Each cell contributes ``mu(cell) * sqrt(rho(f2 k_a) rho(f1 k_b) / Delta_H(h))``.
    ``fixator_bound`` is the class-wise majorant
    ``sum_m Delta^{-m/2} / [K : K_{[x0, x_h]}]``, available when f1, f2 lie in K.
    """
    H = rho.H
    length = rho.gamma.length if rho.gamma else 2
    dec = coset_decomposition(t, f1, f2, H, depth, length)
    total_iv = iv.mpf(0)
    exact = Fraction(0)
    exact_ok = True
    classes = {}
    for cell in dec.cells:
        delta_h = rho.delta ** cell.m
        radicand = rho(f2.compose(cell.k_a)) * rho(f1.compose(cell.k_b)) / delta_h
        root = exact_sqrt(radicand)
        if root is None:
            exact_ok = False
            total_iv += iv.mpf(cell.weight.numerator) / cell.weight.denominator * _iv_sqrt(radicand)
        else:
            contrib = cell.weight * root
            exact += contrib
            total_iv += iv.mpf(contrib.numerator) / contrib.denominator
        classes.setdefault(cell.m, cell.x_h)
    fixator_bound = None
    if not f1.root_image and not f2.root_image:
        fb = Fraction(0)
        for m, x_h in classes.items():
            root = exact_sqrt(rho.delta ** (-m))
            if root is None:
                fb = None
                break
            fb += root / fixator_index(H.F, x_h)
        fixator_bound = fb
    if exact_ok:
        return BoundResult(float(exact), float(exact), exact, dec.cells, depth, fixator_bound)
    return BoundResult(float(total_iv.a), float(total_iv.b), None, dec.cells, depth, fixator_bound)


# the S_n sequence --------------------------------------------------------------------------

def sn_sequence(d: int, p: int, t: Fraction, M: int):
    """The three-sum sequence controlling the bound integral, at ``M = 2pm + 2r``.

    Returns a Fraction when ``sqrt(t)`` is rational, else an ``mpmath`` value.
    """
    t = Fraction(t)
    if p < 1:
        raise ValueError("p must be a positive integer")
    if M < 0 or M % 2:
        raise ValueError(f"M must be a nonnegative even integer, got {M}")
    if not (Fraction(1, (d - 1) ** (2 * p)) <= t < 1):
        raise ValueError(f"t = {t} outside [1/(d-1)^(2p), 1)")
    m, rem = divmod(M, 2 * p)
    r = rem // 2
    root = exact_sqrt(t)
    if root is None:
        s = mp.sqrt(mp.mpf(t.numerator) / t.denominator)
        one = mp.mpf(1)
    else:
        s = root
        one = Fraction(1)

    def inv_sphere(e):
        # 1 / (d (d-1)^e), the measure of a cylinder of length e + 1
        if root is not None:
            return 1 / (d * Fraction(d - 1) ** e)
        return 1 / (d * mp.mpf(d - 1) ** e)

    total = one * 0
    for k in range(m // 2 + 1):
        coef = one if r == 0 and k == 0 else inv_sphere(r + 2 * p * k - 1)
        total += coef * s ** (m - 2 * k)
    total += inv_sphere(M // 2 - 1)
    for j in range(1, m + 1):
        total += inv_sphere((M + 2 * p * j) // 2 - 1) / s ** j
    return total


# decay experiments ------------------------------------------------------------------------

def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ARBOREAL_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class DecayConfig:
    H: ParabolicSpec
    n_max: int = 8
    depth: int = 1
    f1: Portrait | None = None
    f2: Portrait | None = None
    threshold: float = 1e-2
    n_min: int = 1


@dataclass
class DecayRow:
    n: int
    tn_dist: int
    bound: BoundResult
    sn: object
    fixator_term: Fraction | None


@dataclass
class DecayReport:
    config: DecayConfig
    rows: list
    C: float
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def column(self, name: str) -> list:
        if name == "bound":
            return [r.bound.hi for r in self.rows]
        if name == "fixator_term":
            return [r.fixator_term for r in self.rows]
        return [getattr(r, name) for r in self.rows]

    def to_csv(self, version: str) -> str:
        H = self.config.H
        buf = io.StringIO()
        buf.write(f"# d={H.degree} |F|={len(H.F)} H={H.describe()} xi={H.xi} version={version}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "tn_dist", "bound_integral_lo", "bound_integral_hi", "sn", "fixator_term", "C"])
        for r in self.rows:
            w.writerow([r.n, r.tn_dist, repr(r.bound.lo), repr(r.bound.hi), _fmt(r.sn),
                        "" if r.fixator_term is None else str(r.fixator_term), repr(self.C)])
        return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return repr(float(x))
    return mp.nstr(x, 17)


def decreasing_from(values: list) -> int | None:
    """First index from which ``values`` strictly decreases (or sits at zero)."""
    if len(values) < 2:
        return None
    i = len(values) - 1
    while i > 0 and (values[i] < values[i - 1] or values[i] == values[i - 1] == 0):
        i -= 1
    return i if i < len(values) - 1 else None


def decay_experiment(config: DecayConfig) -> DecayReport:
    H = config.H
    F, xi = H.F, H.xi
    d = F.degree
    ident = Portrait.identity(d)
    f1 = config.f1 or ident
    f2 = config.f2 or ident
    gamma = minimal_hyperbolic(H.full)
    delta = modular_value(H.full, gamma)
    rho = RhoFunction(H, None if H.unimodular else gamma)
    p = gamma.length // 2

    def row(n: int) -> DecayRow:
        t_n = gamma.gamma.power(n)
        M = len(t_n.apply(f1.root_image))
        bound = bound_integral(t_n, f1, f2, rho, config.depth)
        sn = sn_sequence(d, p, delta, M)
        fix = None
        if H.unimodular:
            fix = Fraction(1, fixator_index(F, xi.word(M // 2)))
        return DecayRow(n, M, bound, sn, fix)

    ns = list(range(config.n_min, config.n_max + 1))
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(row, ns))

    C = max(r.bound.hi / float(r.sn) for r in rows)
    bounds = [r.bound.hi for r in rows]
    checks = {
        "nonnegative": all(r.bound.lo >= 0 for r in rows),
        "bounded_by_C_sn": all(r.bound.hi <= C * float(r.sn) * (1 + 1e-12) for r in rows) and math.isfinite(C),
        "eventually_decreasing": decreasing_from(bounds) is not None,
        "below_threshold": bounds[-1] < config.threshold * bounds[0] if bounds[0] > 0 else bounds[-1] == 0,
    }
    if not (f1.root_image or f2.root_image):
        checks["fixator_bound"] = all(r.bound.exact is None or r.bound.fixator_bound is None
                                      or r.bound.exact <= r.bound.fixator_bound for r in rows)
    if H.unimodular:
        terms = [r.fixator_term for r in rows]
        checks["fixator_strictly_decreasing"] = all(a > b for a, b in zip(terms, terms[1:]))
        checks["fixator_ratio"] = terms[-1] < Fraction(config.threshold).limit_denominator(10 ** 9) * terms[0]
        checks["containment"] = all(r.bound.exact is None or r.bound.exact <= r.fixator_term for r in rows)
    return DecayReport(config, rows, C, checks)
