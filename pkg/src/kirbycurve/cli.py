"""Command line interface: ``kirbycurve {analyze,kirby,pi1,check}``."""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .braid import braids_equal, exponent_sum, full_twist
from .curve import (
    BivariatePolynomial,
    format_polynomial,
    is_transverse_at_infinity,
    make_generic,
    parse_polynomial,
)
from .diagram import build_diagram, dumps, emit_json, emit_svg, emit_tikz, verify
from .errors import KirbyCurveError
from .monodromy import MonodromyData, assemble, monodromy_at_infinity
from .topology import (
    abelianization,
    component_count,
    curve_euler_characteristic,
    euler_characteristic,
    handle_decomposition,
    pi1_presentation,
)
from .tracking import TrackConfig

log = logging.getLogger("kirbycurve")

REPORT_SCHEMA = "report/1"
EMIT_CHOICES = ("json", "svg", "tikz")
RUN_KEYS = {"seed": int, "tol": float, "shear.cap": int, "workers": int}


@dataclass(frozen=True)
class RunConfig:
    curve: str
    track: TrackConfig = field(default_factory=TrackConfig)
    tol: float = 1e-10
    shear_cap: int = 20
    allow_shear: bool = True
    seed: int = 0
    emit: tuple[str, ...] = ("json",)
    workers: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def provenance(self) -> dict:
        """Everything that influences the numbers (not where they are written)."""
        return {
            "curve": self.curve,
            "track": self.track.as_mapping(),
            "tol": self.tol,
            "shear.cap": self.shear_cap,
            "allow_shear": self.allow_shear,
            "seed": self.seed,
        }

    def hash(self) -> str:
        text = json.dumps(self.provenance(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[run]\n" + Path(path).read_text())
    return dict(parser["run"])


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    run = {k: values.pop(k) for k in list(values) if k in RUN_KEYS}
    track = TrackConfig.from_mapping(values)
    if args.curve_file:
        curve = Path(args.curve_file).read_text().strip()
    else:
        curve = args.curve
    seed = args.seed if args.seed is not None else int(run.get("seed", 0))
    tol = args.tol if args.tol is not None else float(run.get("tol", 1e-10))
    emit = tuple(e.strip() for e in args.emit.split(",") if e.strip()) if args.emit else ("json",)
    for e in emit:
        if e not in EMIT_CHOICES:
            raise ValueError(f"unknown --emit format {e!r} (choose from {', '.join(EMIT_CHOICES)})")
    return RunConfig(
        curve=curve,
        track=track,
        tol=tol,
        shear_cap=int(run.get("shear.cap", 20)),
        allow_shear=not args.no_shear,
        seed=seed,
        emit=emit,
        workers=int(run.get("workers", 1)),
    )


# --------------------------------------------------------------------------
# pipeline


@dataclass
class Analysis:
    cfg: RunConfig
    f: BivariatePolynomial
    g: BivariatePolynomial
    shear: Fraction
    genericity: dict
    md: MonodromyData

    def __post_init__(self):
        self.handles = handle_decomposition(self.md)
        self.presentation = pi1_presentation(self.md)
        self.diagram = build_diagram(
            self.md,
            meta={"curve": format_polynomial(self.f), "seed": self.cfg.seed, "cfg-hash": self.cfg.hash()},
            check_trivial=False,
        )


def analyze(cfg: RunConfig) -> Analysis:
    f = parse_polynomial(cfg.curve)
    g, t, report, X = make_generic(f, cap=cfg.shear_cap, tol=cfg.tol, cfg=cfg.track,
                                   allow_shear=cfg.allow_shear)
    log.info("projection generic after shear t=%s; %d critical values", t, X.N)
    md = assemble(g, X, cfg.track, seed=cfg.seed, workers=cfg.workers)
    log.info("monodromy assembled: n=%d, phase=%.6f", md.n, md.phase)
    return Analysis(cfg, f, g, t, report.as_dict(), md)


def _words(md: MonodromyData) -> list[tuple[tuple[int, ...], ...]]:
    return [(c.local.word, c.transport.word, c.global_.word, c.gather.word, c.core.word) for c in md.critical]


def run_checks(a: Analysis, refinement: bool = False) -> dict[str, dict]:
    """Invariant suite; each entry has ``status`` in {pass, fail, n/a} and a detail."""
    checks: dict[str, dict] = {}

    def record(name, ok, detail="", applicable=True):
        status = "n/a" if not applicable else ("pass" if ok else "fail")
        checks[name] = {"status": status, "detail": detail}

    md, hd, pres, kd = a.md, a.handles, a.presentation, a.diagram
    try:
        verify(kd)
        record("diagram_identity", True, "block cycle is the trivial braid")
    except KirbyCurveError as exc:
        record("diagram_identity", False, str(exc))
    local_writhe = sum(exponent_sum(c.core) for c in md.critical)
    record("writhe", kd.writhe() == local_writhe, f"{kd.writhe()} vs {local_writhe}")
    chi_handles = euler_characteristic(hd)
    chi_curve = curve_euler_characteristic(a.g, md.X)
    record("euler_characteristic", chi_handles == 1 - chi_curve,
           f"handles {chi_handles}, 1-chi(C) {1 - chi_curve}")
    rank, torsion = abelianization(pres)
    comps = component_count(md)
    record("h1_components", rank == comps and not torsion, f"H1 rank {rank}, torsion {list(torsion)}, components {comps}")
    record("relator_count", len(pres.relators) == len(hd.two_handles),
           f"{len(pres.relators)} relators, {len(hd.two_handles)} 2-handles")
    record("framings_zero", all(fr == 0 for fr in hd.framings), f"{len(hd.framings)} framings")
    product = monodromy_at_infinity(md)
    record("infinity_loop", braids_equal(product, md.infinity_loop),
           "product of global monodromies equals the large circle")
    transverse = is_transverse_at_infinity(a.g)
    record("full_twist_at_infinity", transverse and braids_equal(product, full_twist(md.n)),
           "curve transverse at infinity" if transverse else "curve tangent to the line at infinity",
           applicable=transverse)
    if refinement:
        fine = assemble(a.g, md.X, a.cfg.track.refined(8), seed=a.cfg.seed, workers=a.cfg.workers)
        same = _words(fine) == _words(md) and fine.infinity_loop.word == md.infinity_loop.word
        record("refinement_stability", same, "braid words with steps / 8")
    return checks


def build_report(a: Analysis, checks: dict) -> dict:
    rank, torsion = abelianization(a.presentation)
    return {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "cfg_hash": a.cfg.hash(),
        "config": a.cfg.provenance(),
        "curve": {
            "input": format_polynomial(a.f),
            "shear": str(a.shear),
            "analyzed": format_polynomial(a.g),
            "n": a.md.n,
            "degree": a.f.degree,
        },
        "genericity": a.genericity,
        "monodromy": a.md.as_dict(),
        "handles": a.handles.as_dict(),
        "euler_characteristic": euler_characteristic(a.handles),
        "pi1": a.presentation.as_dict(),
        "h1": {"rank": rank, "torsion": list(torsion)},
        "components": component_count(a.md),
        "diagram": emit_json(a.diagram),
        "checks": checks,
        "passed": all(c["status"] != "fail" for c in checks.values()),
    }


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_diagram_files(a: Analysis, out: Path) -> list[Path]:
    written = []
    if "json" in a.cfg.emit:
        written.append(out / "kirby.json")
        written[-1].write_text(dumps(a.diagram))
    if "svg" in a.cfg.emit:
        written.append(out / "kirby.svg")
        written[-1].write_text(emit_svg(a.diagram))
    if "tikz" in a.cfg.emit:
        written.append(out / "kirby.tex")
        written[-1].write_text(emit_tikz(a.diagram))
    return written


# --------------------------------------------------------------------------
# commands


def cmd_analyze(cfg: RunConfig, out: Path) -> int:
    a = analyze(cfg)
    checks = run_checks(a)
    report = build_report(a, checks)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(_dump(report))
    write_diagram_files(a, out)
    h = a.handles.counts
    print(f"curve {report['curve']['input']}  n={a.md.n}  N={a.md.N}  handles {h}  "
          f"chi={report['euler_characteristic']}  H1=Z^{report['h1']['rank']}")
    _print_checks(checks)
    return 0 if report["passed"] else 1


def cmd_kirby(cfg: RunConfig, out: Path) -> int:
    a = analyze(cfg)
    out.mkdir(parents=True, exist_ok=True)
    for path in write_diagram_files(a, out):
        print(path)
    return 0


def cmd_pi1(cfg: RunConfig, out: Path) -> int:
    a = analyze(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "pi1.json").write_text(_dump(a.presentation.as_dict()))
    print(a.presentation)
    return 0


def cmd_check(cfg: RunConfig, out: Path) -> int:
    try:
        a = analyze(cfg)
    except KirbyCurveError as exc:
        _print_checks({exc.stage: {"status": "fail", "detail": str(exc)}})
        return 1
    checks = run_checks(a, refinement=True)
    _print_checks(checks)
    return 0 if all(c["status"] != "fail" for c in checks.values()) else 1


def _print_checks(checks: dict) -> None:
    width = max((len(k) for k in checks), default=0)
    for name, c in checks.items():
        print(f"  {name:<{width}}  {c['status'].upper():<4}  {c['detail']}")


COMMANDS = {"analyze": cmd_analyze, "kirby": cmd_kirby, "pi1": cmd_pi1, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kirbycurve", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--curve", help='polynomial in x, y, e.g. "x^2 - y^3"')
        src.add_argument("--curve-file", help="file holding the polynomial")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--emit", default=None, help="comma list of json,svg,tikz (default: json)")
        p.add_argument("--tol", type=float, default=None, help="critical value tolerance")
        p.add_argument("--seed", type=int, default=None, help="phase candidate seed")
        p.add_argument("--no-shear", action="store_true", help="fail instead of shearing")
        p.add_argument("--config", help="flat key=value configuration file")
        p.add_argument("--verbose", "-v", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except (ValueError, KeyError, OSError) as exc:
        parser.error(str(exc))
    try:
        return COMMANDS[args.command](cfg, Path(args.out))
    except KirbyCurveError as exc:
        print(f"error [{exc.stage}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
