"""``sunrot`` command line: validate, partition, covgraph, rotset, periodic, orbit.

Exit status: 0 success, 1 validation failure (or a request the map cannot
satisfy), 2 internal consistency error, 3 I/O or schema error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core_space import GeometryError, as_fraction, format_rational
from .cover_graph import build_graph, compute_I_and_J
from .oracle import simulate
from .partition import build_partition
from .periodic_finder import PeriodicSearchError, periodic_from_jtail, periodic_from_loop, verify_witness
from .pl_map import MapSpecError, PLMap, load_map, point_from_json, point_to_json
from .rotation_set import LoopSpec, assemble, synthesize_loop

SCHEMA = "sunrot/1"
COMMANDS = ("validate", "partition", "covgraph", "rotset", "periodic", "orbit")


class StageError(Exception):
    def __init__(self, code: int, stage: str, message: str):
        super().__init__(message)
        self.code = code
        self.stage = stage


@dataclass(frozen=True)
class RunConfig:
    path: str
    command: str
    h_max: int = 512
    tol: Fraction = Fraction(1, 10 ** 9)
    fmt: str = "human"
    dot: Optional[str] = None
    rho: Optional[Fraction] = None
    x: Optional[str] = None
    steps: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.h_max < 1:
            raise ValueError("h_max must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


def _approx(q: Fraction) -> str:
    return f"{format_rational(q)} (~{float(q):.6f})"


def _emit(cfg: RunConfig, doc: dict, human: str) -> str:
    if cfg.fmt == "json":
        return json.dumps({"schema": SCHEMA, **doc}, indent=2) + "\n"
    return human.rstrip("\n") + "\n"


def _load(cfg: RunConfig) -> PLMap:
    try:
        return load_map(cfg.path)
    except OSError as exc:
        raise StageError(3, "load", f"cannot read {cfg.path}: {exc.strerror or exc}") from None
    except (MapSpecError, GeometryError) as exc:
        raise StageError(3, "load", str(exc)) from None


def _validated(cfg: RunConfig) -> PLMap:
    fmap = _load(cfg)
    rep = fmap.validate()
    if not rep.ok:
        first = rep.first()
        raise StageError(1, "validate", f"{first['check']}: {first['message']}")
    return fmap


def _pipeline(cfg: RunConfig):
    fmap = _validated(cfg)
    try:
        part = build_partition(fmap)
    except AssertionError as exc:
        raise StageError(2, "partition", str(exc)) from None
    return fmap, part


def cmd_validate(cfg: RunConfig) -> str:
    fmap = _load(cfg)
    rep = fmap.validate()
    doc = {"stage": "validate", "ok": rep.ok, "problems": rep.problems, "warnings": rep.warnings}
    lines = ["valid" if rep.ok else "INVALID"]
    lines += [f"  problem [{p['check']}]: {p['message']}" for p in rep.problems]
    lines += [f"  warning: {w}" for w in rep.warnings]
    out = _emit(cfg, doc, "\n".join(lines))
    if not rep.ok:
        sys.stdout.write(out)
        first = rep.first()
        raise StageError(1, "validate", f"{first['check']}: {first['message']}")
    return out


def cmd_partition(cfg: RunConfig) -> str:
    _, part = _pipeline(cfg)
    doc = {"stage": "partition", "cells": part.to_json(), "digest": part.digest()}
    lines = [f"{len(part)} cell(s), digest {part.digest()}"]
    for c in part:
        lines.append(f"  {c.name}: [{_approx(c.a)}, {_approx(c.b)}] -> X{c.ell} + {c.p}")
    return _emit(cfg, doc, "\n".join(lines))


def _graph(cfg: RunConfig):
    fmap, part = _pipeline(cfg)
    try:
        g = build_graph(part, fmap, cfg.h_max)
    except AssertionError as exc:
        raise StageError(2, "covgraph", str(exc)) from None
    return fmap, part, g


def cmd_covgraph(cfg: RunConfig) -> str:
    _, part, g = _graph(cfg)
    if cfg.dot:
        try:
            with open(cfg.dot, "w", encoding="utf-8") as fh:
                fh.write(g.to_dot())
        except OSError as exc:
            raise StageError(3, "covgraph", f"cannot write {cfg.dot}: {exc.strerror or exc}") from None
    doc = {"stage": "covgraph", **g.to_json(), "partition_digest": part.digest(),
           "digest": g.digest()}
    lines = [f"{len(g.vertices)} vertices, {len(g.arrows)} arrows, rigor {g.rigor}, "
             f"digest {g.digest()}"]
    for cid, st in sorted(g.towers.items()):
        lines.append(f"  tower over {part[cid].name}: {st.kind} (height {st.height})")
    return _emit(cfg, doc, "\n".join(lines))


def _report(cfg: RunConfig):
    fmap, part, g = _graph(cfg)
    try:
        rep = assemble(fmap, part, g, cfg.tol)
    except (AssertionError, PeriodicSearchError) as exc:
        raise StageError(2, "rotset", str(exc)) from None
    return fmap, part, g, rep


def cmd_rotset(cfg: RunConfig) -> str:
    _, part, _, rep = _report(cfg)
    doc = {"stage": "rotset", **rep.to_json()}
    r = rep.rot_R
    lines = [f"Rot(F), rigor {rep.rigor}:"]
    for a, b in rep.pieces:
        lines.append(f"  {{{_approx(a)}}}" if a == b else f"  [{_approx(a)}, {_approx(b)}]")
    lines.append(f"Rot_R = [{_approx(r.lo)}, {_approx(r.hi)}] ({r.rigor})")
    if not r.exact:
        lines.append(f"  enclosure width {float(r.width):.3g} (requested tol {float(cfg.tol):.3g})")
    for c in rep.components:
        lines.append(f"component {c.id}: [{_approx(c.lo)}, {_approx(c.hi)}] ({c.rigor})")
    for v in rep.isolated:
        cyc = " ".join(part[k].name for k in v.cycle)
        lines.append(f"isolated {_approx(v.rho)} [{v.kind}] label cycle {cyc}")
    for u in rep.undetermined:
        lines.append(f"undetermined tower over {part[u.basis].name} (capped at {u.status.height})")
    if rep.exceptional:
        lines.append("exceptional candidates: " + ", ".join(format_rational(x) for x in rep.exceptional))
    return _emit(cfg, doc, "\n".join(lines))


def cmd_periodic(cfg: RunConfig) -> str:
    if cfg.rho is None:
        raise StageError(3, "periodic", "--rho is required")
    fmap, part, g, rep = _report(cfg)
    r = cfg.rho
    try:
        witness = None
        for ci in rep.components:
            if ci.lo <= r <= ci.hi:
                witness = periodic_from_loop(fmap, g, synthesize_loop(g, ci, r))
                break
        if witness is None:
            for ip in compute_I_and_J(g):
                if ip.rho != r or ip.classification == "undetermined":
                    continue
                if ip.status.kind == "lasso":
                    loop = LoopSpec.from_keys(g, ip.tail_keys + ip.tail_keys[:1])
                    witness = periodic_from_loop(fmap, g, loop)
                else:
                    witness = periodic_from_jtail(fmap, part, ip)
                break
    except PeriodicSearchError as exc:
        raise StageError(2, "periodic", str(exc)) from None
    if witness is None:
        raise StageError(1, "periodic",
                         f"no component or J-tail of the branch part has rotation number {format_rational(r)}")
    check = verify_witness(fmap, witness)
    if not check.ok:
        raise StageError(2, "periodic", f"witness failed verification, residual {check.residual}")
    doc = {"stage": "periodic", **witness.to_json(), "residual": format_rational(check.residual)}
    human = (f"periodic point {witness.point!r}: F^{witness.q}(x) = x + {witness.p}, "
             f"rho = {_approx(witness.rho)}, residual {format_rational(check.residual)}")
    return _emit(cfg, doc, human)


def parse_point(text: str, fmap: PLMap):
    """``{"R": "1/3"}``/``{"B": [0, "1/3", 0]}`` JSON, or ``R:1/3`` / ``B:0,1/3,0``."""
    text = text.strip()
    if text.startswith("{"):
        return point_from_json(json.loads(text), fmap.shape)
    kind, _, rest = text.partition(":")
    if kind == "R":
        return point_from_json({"R": rest}, fmap.shape)
    if kind == "B":
        i, t, m = rest.split(",")
        return point_from_json({"B": [int(i), t, int(m)]}, fmap.shape)
    raise MapSpecError(f"cannot parse point {text!r}")


def cmd_orbit(cfg: RunConfig) -> str:
    fmap, part = _pipeline(cfg)
    if cfg.x is None:
        rng = random.Random(cfg.seed)
        if len(part):
            c = part[rng.randrange(len(part))]
            x = fmap.shape.branch_point(c.branch, c.a + (c.b - c.a) * Fraction(rng.randrange(1, 1000), 1000), 0)
        else:
            x = point_from_json({"R": str(Fraction(rng.randrange(1000), 1000))}, fmap.shape)
    else:
        try:
            x = parse_point(cfg.x, fmap)
        except (MapSpecError, ValueError, json.JSONDecodeError) as exc:
            raise StageError(3, "orbit", f"bad --x: {exc}") from None
    rec = simulate(fmap, part, x, cfg.steps)
    rho = rec.rho[-1] if rec.rho else Fraction(0)
    doc = {"stage": "orbit", "start": point_to_json(rec.start),
           "points": [point_to_json(p) for p in rec.points],
           "itinerary": list(rec.itinerary),
           "displacements": [format_rational(d) for d in rec.displacements],
           "rho": format_rational(rho), "entered_T_R": rec.entered_TR}
    names = [part[s].name if isinstance(s, int) else s for s in rec.itinerary]
    human = (f"orbit of {rec.start!r} over {rec.steps} steps\n"
             f"  itinerary: {' '.join(names)}\n"
             f"  endpoint: {rec.points[-1]!r}\n"
             f"  mean displacement: {_approx(rho)}")
    return _emit(cfg, doc, human)


HANDLERS = {
    "validate": cmd_validate,
    "partition": cmd_partition,
    "covgraph": cmd_covgraph,
    "rotset": cmd_rotset,
    "periodic": cmd_periodic,
    "orbit": cmd_orbit,
}


def run(cfg: RunConfig) -> int:
    try:
        sys.stdout.write(HANDLERS[cfg.command](cfg))
    except StageError as exc:
        print(f"sunrot {cfg.command}: [{exc.stage}] {exc}", file=sys.stderr)
        return exc.code
    return 0


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (GeometryError, ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _tol(text: str) -> Fraction:
    try:
        return _rational(text)
    except argparse.ArgumentTypeError:
        try:
            return Fraction(text)  # accept 1e-9 style for the tolerance only
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share the schema-error status; 2 is reserved
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sunrot", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("input", help="map description (JSON)")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--h-max", type=int, default=512, help="tower height cap (default 512)")
        sp.add_argument("--tol", type=_tol, default=Fraction(1, 10 ** 9),
                        help="enclosure tolerance for Rot_R (default 1e-9)")
        sp.add_argument("--seed", type=int, default=0)
        if name == "covgraph":
            sp.add_argument("--dot", metavar="FILE", help="also write the graph in DOT format")
        if name == "periodic":
            sp.add_argument("--rho", type=_rational, required=True, metavar="P/Q")
        if name == "orbit":
            sp.add_argument("--x", metavar="POINT", help='e.g. "R:1/3" or "B:0,1/3,0"')
            sp.add_argument("--steps", type=int, default=20)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            path=args.input, command=args.command, h_max=args.h_max, tol=args.tol,
            fmt="json" if args.json else "human", dot=getattr(args, "dot", None),
            rho=getattr(args, "rho", None), x=getattr(args, "x", None),
            steps=getattr(args, "steps", 20), seed=args.seed)
    except ValueError as exc:
        print(f"sunrot: {exc}", file=sys.stderr)
        return 3
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
