"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line with its runtime.  Run directly with
``python tests/test_acceptance.py`` or through pytest with ``-s`` to see the
lines inline; they are also written when output is captured.
"""

import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from arboreal.automorphism import classify, random_portrait, translation_along
from arboreal.cosets import (brute_force_shifts, labels_disjoint, resolve_counts, solution_domains,
                             solve_cells)
from arboreal.decomposition import kak_decompose
from arboreal.local_action import dihedral_group, symmetric_group
from arboreal.numerics import DecayConfig, decay_experiment, decreasing_from, sn_sequence
from arboreal.parabolic import (Kind, ParabolicSpec, minimal_hyperbolic, modular_value,
                                orbit_oracle)
from arboreal.tree import BoundaryPoint, Edge, dist

ROOT = Path(__file__).resolve().parent.parent
XI = BoundaryPoint((), (1, 2))
CONFIGS = [(symmetric_group(3), 4), (dihedral_group(5), 3)]


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, start, limit, detail=""):
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < limit
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({elapsed:.2f}s, limit {limit}s)"
        if detail:
            line += f" {detail}"
        with capsys.disabled():
            print(line)
        assert ok, line
    return emit


def test_criterion_1_even_translation_lengths(report):
    start = time.perf_counter()
    rng = random.Random(1)
    bad, hyperbolic = 0, 0
    for F, _ in CONFIGS:
        for _ in range(500):
            g = random_portrait(F, rng, radius=rng.randint(0, 3))
            c = classify(g, len(g.root_image) + 2)
            if c.is_hyperbolic:
                hyperbolic += 1
                bad += c.translation_length % 2
    report(1, "hyperbolic translation lengths are even", bad == 0, start, 10,
           f"[1000 portraits, {hyperbolic} hyperbolic, {bad} odd]")


def test_criterion_2_kak_roundtrip(report):
    start = time.perf_counter()
    rng = random.Random(2)
    failures = 0
    for F, _ in CONFIGS:
        for _ in range(250):
            g = random_portrait(F, rng, radius=rng.randint(0, 3))
            t = kak_decompose(F, g, Edge((), 1))
            ok = (t.recompose().agrees_with(g, len(g.root_image) + 3)
                  and dist((), t.a.apply(())) == dist((), g.apply(()))
                  and t.k1.fixes(()) and t.k2.fixes(()))
            failures += not ok
    report(2, "KA+K recomposition matches the input", failures == 0, start, 30,
           f"[500 portraits, {failures} failures]")


def test_criterion_3_modular_bounds(report):
    start = time.perf_counter()
    ok = True
    values = []
    for F, _ in CONFIGS:
        H = ParabolicSpec(F, XI)
        gamma = minimal_hyperbolic(H)
        delta = modular_value(H, gamma)
        values.append(delta)
        ok &= Fraction(1, (F.degree - 1) ** gamma.length) <= delta < 1
        if F.degree == 3:
            ok &= delta == Fraction(1, 4) == Fraction(1, len(orbit_oracle(F, XI, gamma.length)))
    report(3, "modular value bounds", ok, start, 5, f"[Delta = {', '.join(map(str, values))}]")


def _decompositions():
    for F, depth in CONFIGS:
        H = ParabolicSpec(F, XI)
        gamma = minimal_hyperbolic(H)
        for n in range(4):
            yield F, depth, H, gamma, gamma.gamma.power(n)


def test_criterion_4_solution_exhaustion(report):
    start = time.perf_counter()
    failures = []
    for F, depth, H, gamma, g in _decompositions():
        D = len(g.root_image)
        brute = brute_force_shifts(H, g, depth)
        if any(abs(s) > D for s in brute):
            failures.append((F.degree, D, "shift bound"))
        per_shift = {}
        for dom in solution_domains(g, H, gamma, depth):
            s = dom.m * gamma.length
            if dist((), dom.x_h) != (D + s) // 2:
                failures.append((F.degree, D, "x_h"))
            for c in dom.cells:
                if not all(c.k_a.fixes(XI.word(j)) for j in range(len(dom.x_h) + 1)):
                    failures.append((F.degree, D, "k1 path"))
                per_shift[s] = per_shift.get(s, Fraction(0)) + c.weight
        if per_shift != brute:
            failures.append((F.degree, D, "measure per class"))
    report(4, "every solution obeys the class bound and fixes [x0, x_h]", not failures, start, 300,
           f"[{len(failures)} exceptions]")


def test_criterion_5_cell_structure(report):
    start = time.perf_counter()
    failures = 0
    for F, depth, H, gamma, g in _decompositions():
        dec = solve_cells(H, g, depth)
        labels = dec.labels()
        failures += len(set(labels)) != len(labels) or not labels_disjoint(labels)
        failures += not set(resolve_counts(dec).values()) <= {0, 1}
        again = solve_cells(H, g, depth)
        failures += [(c.label, c.k_a, c.h) for c in dec.cells] != [(c.label, c.k_a, c.h) for c in again.cells]
    report(5, "cell labels distinct and solutions unique per cell", failures == 0, start, 300,
           f"[{failures} exceptions]")


def test_criterion_6_sn_sequence(report):
    start = time.perf_counter()
    values = [sn_sequence(3, 1, Fraction(1, 4), M) for M in range(0, 101, 2)]
    M0 = decreasing_from(values)
    ok = all(isinstance(v, Fraction) and v > 0 for v in values) and M0 is not None
    ok &= values[-1] < Fraction(1, 1000)
    report(6, "S_n positive, eventually decreasing, S(100) < 1e-3", ok, start, 1,
           f"[M0 = {2 * M0 if M0 is not None else None}, S(100) = {float(values[-1]):.3e}]")


def test_criterion_7_unimodular_decay(report):
    start = time.perf_counter()
    H = ParabolicSpec(symmetric_group(3), XI, Kind.HOROSPHERICAL)
    rep = decay_experiment(DecayConfig(H, n_max=10))
    terms = rep.column("fixator_term")
    ok = rep.checks["fixator_strictly_decreasing"] and rep.checks["fixator_ratio"]
    ok &= all(a > b for a, b in zip(terms, terms[1:])) and terms[-1] < terms[0] / 100
    report(7, "fixator-cell measures decrease below 1e-2 of the first", ok, start, 60,
           f"[final/initial = {float(terms[-1] / terms[0]):.3e}]")


def test_criterion_8_general_decay(report):
    start = time.perf_counter()
    H = ParabolicSpec(dihedral_group(5), XI)
    rep = decay_experiment(DecayConfig(H, n_max=8))
    bounds = rep.column("bound")
    ok = rep.checks["eventually_decreasing"] and rep.checks["below_threshold"]
    ok &= rep.checks["bounded_by_C_sn"] and bounds[-1] < bounds[0] / 100
    report(8, "bound integral decays and stays below C * S_n", ok, start, 600,
           f"[C = {rep.C:.4f}, final/initial = {bounds[-1] / bounds[0]:.3e}]")


def test_criterion_9_determinism(report, tmp_path):
    start = time.perf_counter()
    same = True
    for name in ("d5_full.toml", "s3_horospherical.toml"):
        outs = []
        for i in range(2):
            out = tmp_path / f"{name}.{i}.csv"
            subprocess.run([sys.executable, "-m", "arboreal.cli", "decay", "--config",
                            str(ROOT / "configs" / name), "--out", str(out)],
                           check=True, capture_output=True)
            outs.append(out.read_bytes())
        same &= outs[0] == outs[1]
    report(9, "repeated runs give byte-identical CSVs", same, start, 120)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
