"""Command line interface: ``arboreal <subcommand> ...``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on a bad
configuration or an unmet precondition.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .automorphism import Portrait, PortraitError, classify
from .config import ConfigError, ExperimentConfig, dump_portrait, load, load_portrait, parse_number
from .cosets import solve_cells
from .decomposition import canonical_double_coset_rep, kak_decompose
from .local_action import LocalGroup, PermError
from .numerics import DecayConfig, decay_experiment, decreasing_from, sn_sequence
from .parabolic import (ParabolicSpec, UnsupportedError, fixator_index_along, minimal_hyperbolic,
                        modular_value, orbit_oracle)
from .tree import BoundaryPoint, Edge, TreeError, format_vertex

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class PreconditionError(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _comment(cfg: ExperimentConfig) -> str:
    H = cfg.H
    kind = H.describe() if H else "-"
    xi = str(H.xi) if H else "-"
    return f"# d={cfg.d} |F|={len(cfg.F)} H={kind} xi={xi} version={__version__}\n"


def _gate(F: LocalGroup):
    failure = F.gate_failure()
    if failure:
        raise PreconditionError(failure)


def _need_H(cfg: ExperimentConfig) -> ParabolicSpec:
    if cfg.H is None:
        raise ConfigError("config has no [parabolic] section")
    return cfg.H


def cmd_gate(args) -> int:
    if args.config:
        F = load(args.config).F
    else:
        if args.d is None or not args.generators:
            raise ConfigError("gate needs --config or --d with --generators")
        F = LocalGroup.from_strings(args.d, args.generators)
    _gate(F)
    print(f"pass: |F|={len(F)} transitive primitive "
          f"{'2-transitive' if F.is_2transitive() else 'not 2-transitive'}")
    return EXIT_OK


def cmd_classify(args) -> int:
    g = load_portrait(args.g)
    probe = args.probe_depth if args.probe_depth is not None else len(g.root_image) + 2
    c = classify(g, probe)
    out = {"kind": c.kind, "translation_length": c.translation_length,
           "axis_point": format_vertex(c.axis_point)}
    if c.is_hyperbolic:
        out["attracting"] = str(c.attracting)
        out["repelling"] = str(c.repelling)
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def cmd_decompose(args) -> int:
    cfg = load(args.config)
    _gate(cfg.F)
    g = load_portrait(args.g)
    e = Edge((), args.edge)
    triple = kak_decompose(cfg.F, g, e)
    radius = len(g.root_image) + 3
    ok = triple.recompose().agrees_with(g, radius)
    out = {"k1": triple.k1.to_dict(), "a": triple.a.to_dict(), "k2": triple.k2.to_dict(),
           "certification_radius": radius, "roundtrip": ok}
    xi = BoundaryPoint.parse(args.xi, cfg.d) if args.xi else (cfg.H.xi if cfg.H else None)
    if xi is not None and g.root_image:
        try:
            rep = canonical_double_coset_rep(cfg.F, g, xi)
            out["double_coset_rep"] = rep.gamma.to_dict()
            ok = ok and rep.recompose().agrees_with(g, radius)
        except UnsupportedError as exc:
            out["double_coset_rep"] = f"unsupported: {exc}"
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_modular(args) -> int:
    cfg = load(args.config)
    _gate(cfg.F)
    H = _need_H(cfg).full
    gamma = minimal_hyperbolic(H)
    delta = modular_value(H, gamma)
    oracle = len(orbit_oracle(H.F, H.xi, gamma.length))
    lower = Fraction(1, (cfg.d - 1) ** gamma.length)
    ok = lower <= delta < 1 and Fraction(1, oracle) == delta
    print(f"gamma_length={gamma.length} index={fixator_index_along(H.F, H.xi, gamma.length)} "
          f"oracle_index={oracle} delta={delta} lower_bound={lower} ok={ok}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cosets(args) -> int:
    cfg = load(args.config)
    _gate(cfg.F)
    H = _need_H(cfg)
    g = load_portrait(args.g)
    depth = args.depth if args.depth is not None else cfg.depth
    dec = solve_cells(H, g, depth)
    sizes = {}
    for c in dec.cells:
        sizes[c.m] = sizes.get(c.m, 0) + 1
    buf = io.StringIO()
    buf.write(_comment(cfg))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label_i", "m_class", "x_h", "domain_size"])
    for c in dec.cells:
        w.writerow([format_vertex(c.label), c.m, format_vertex(c.x_h), sizes[c.m]])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_sn(args) -> int:
    t = parse_number(args.t)
    values = []
    buf = io.StringIO()
    buf.write(f"# d={args.d} p={args.p} t={t} version={__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["M", "sn"])
    for M in range(0, args.Mmax + 1, 2):
        s = sn_sequence(args.d, args.p, t, M)
        values.append(s)
        w.writerow([M, repr(float(s))])
    _emit(buf.getvalue(), args.out)
    ok = all(v > 0 for v in values) and decreasing_from(values) is not None
    return EXIT_OK if ok else EXIT_FAIL


def cmd_decay(args) -> int:
    cfg = load(args.config)
    _gate(cfg.F)
    H = _need_H(cfg)
    report = decay_experiment(DecayConfig(H, cfg.n_max, cfg.depth, cfg.f1, cfg.f2,
                                          float(cfg.threshold), cfg.n_min))
    text = report.to_csv(__version__)
    out = args.out or cfg.output
    _emit(text, out)
    for name, ok in report.checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arboreal", description="Experiments with universal groups on regular trees.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gate", help="check the local group hypotheses")
    s.add_argument("--config")
    s.add_argument("--d", type=int)
    s.add_argument("--generators", nargs="*")
    s.set_defaults(func=cmd_gate)

    s = sub.add_parser("classify", help="classify a portrait")
    s.add_argument("--g", required=True)
    s.add_argument("--probe-depth", type=int)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("decompose", help="KA+K decomposition of a portrait")
    s.add_argument("--config", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--xi")
    s.add_argument("--edge", type=int, default=1)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("modular", help="modular function on the minimal hyperbolic element")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_modular)

    s = sub.add_parser("cosets", help="cells of g K H n K H as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--depth", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_cosets)

    s = sub.add_parser("sn", help="tabulate the S_n sequence")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--p", type=int, default=1)
    s.add_argument("--t", required=True)
    s.add_argument("--Mmax", type=int, default=100)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sn)

    s = sub.add_parser("decay", help="decay experiment")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_decay)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, PortraitError, TreeError, PermError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
