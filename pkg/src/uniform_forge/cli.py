"""Command-line entry point: `uniform-forge <command> ...`.

Exit codes: 0 success, 2 mathematical negative (certificate gap, missing
dual point), 3 budget exhausted, 4 configuration error."""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import checker
from .engine import (
    SCHEMA,
    ConstructionSpec,
    construct,
    dominate,
    enclosure_x_box,
    realize_sumset,
    system_windows,
    trace_from_json,
)
from .errors import (
    ConfigError,
    GapFound,
    InexactRoot,
    NotAligned,
    NotFound,
    ResonantInput,
    ShrinkStalled,
    SuccessorNotFound,
    WindowTooSmall,
)
from .exactnum import Box, MinOf, fmt_rational, parse_approx, parse_box, parse_rational
from .exponents import cf_badly_approx, exponent_profile, golden_enclosure, jarnik_diagnostic
from .families import ManifoldFamily, MatrixFamily, parse_avoidance, parse_family
from .systems import Column, DegreeK, OrderG, Standard, TranslatedPair, parse_system
from .transfer import admissible, dual_pipeline, find_dual_point, transfer_params
from .verifier import check_certificate, dirichlet_audit, produce_certificate, psi_csv

log = logging.getLogger("uniform_forge")

EXIT_OK, EXIT_NEGATIVE, EXIT_BUDGET, EXIT_CONFIG = 0, 2, 3, 4
PRECISION_ENV = "UNIFORM_FORGE_PRECISION"
COMMANDS = ("construct", "verify", "psi", "exponents", "transfer", "sumset", "dominate", "dirichlet-audit")


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    precision: int = 64
    rng_seed: int = 0


# ---------------------------------------------------------------------------
# parsing helpers


def _point(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"--point: {exc}") from exc


def _box(args) -> Box:
    if getattr(args, "box", None):
        return parse_box(args.box)
    if getattr(args, "point", None):
        center = _point(args.point)
        if args.radius:
            r = parse_rational(args.radius)
            return Box(center, (r,) * len(center))
        return Box.point(center)
    raise ConfigError("give --point (optionally with --radius) or --box")


def _family_for(descriptor: str | None, systems) -> object:
    if descriptor and descriptor != "matrix":
        return parse_family(descriptor)
    first = systems[0][0]
    if isinstance(first, Column):
        return MatrixFamily(first.m, 1)
    if isinstance(first, (DegreeK, OrderG, TranslatedPair)):
        return MatrixFamily(1, first.n)
    return MatrixFamily(first.m, first.n)


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dumps(data: dict) -> str:
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def _certificates_for_trace(trace) -> list[dict]:
    x_box = enclosure_x_box(trace)
    out = []
    for (system, f), window in zip(trace.spec.systems, system_windows(trace)):
        if window is None:
            continue
        cert = produce_certificate(x_box, system, f, *window)
        report = check_certificate(cert)
        data = cert.to_json()
        data["recheck"] = {"ok": report.ok, "failures": report.failures}
        out.append(data)
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_construct(args) -> int:
    if len(args.sys) != len(args.f):
        raise ConfigError("give one --f per --sys")
    systems = [(parse_system(s), parse_approx(f)) for s, f in zip(args.sys, args.f)]
    family = _family_for(args.family, systems)
    window = parse_box(args.window) if args.window else (
        family.graph.window if isinstance(family, ManifoldFamily) else None)
    if window is None:
        raise ConfigError("--window is required for this family")
    avoid = parse_avoidance(args.avoid or ["avoid:canonical"], family.x_dim)
    spec = ConstructionSpec(family, systems, avoid, window, args.steps, parse_rational(args.shrink),
                            args.precision, args.seed)
    trace = construct(spec)
    report = checker.check_trace(trace.to_json())
    if not report:
        log.error("constructed trace failed the independent check: %s", report.first_failure)
        return EXIT_NEGATIVE
    _write(args.out, trace.dumps() + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.certificate:
        data = json.loads(Path(args.certificate).read_text())
        report = check_certificate(data)
        _write(args.out, _dumps({"schema": SCHEMA, "kind": "certificate-check", "ok": report.ok,
                                 "failures": report.failures}))
        return EXIT_OK if report else EXIT_NEGATIVE
    if not args.trace:
        raise ConfigError("verify needs --trace or --certificate")
    data = json.loads(Path(args.trace).read_text())
    report = checker.check_trace(data)
    if not report:
        _write(args.out, _dumps({"schema": SCHEMA, "kind": "trace-check", "ok": False,
                                 "failures": report.failures}))
        return EXIT_NEGATIVE
    trace = trace_from_json(data)
    certs = _certificates_for_trace(trace)
    ok = all(c["recheck"]["ok"] for c in certs)
    _write(args.out, _dumps({"schema": SCHEMA, "kind": "verification", "trace_ok": True,
                             "certificates": certs, "ok": ok}))
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_psi(args) -> int:
    system = parse_system(args.sys)
    _write(args.out, psi_csv(system, _box(args), args.T))
    return EXIT_OK


def cmd_exponents(args) -> int:
    if args.jarnik:
        if args.jarnik == "golden":
            hat = golden_enclosure(args.bits)
        else:
            hat = _point(args.jarnik)
            if len(hat) != 2:
                raise ConfigError("--jarnik takes 'golden' or LO,HI")
        omega = _point(args.omega) if args.omega else None
        _write(args.out, _dumps(jarnik_diagnostic(hat, omega).to_json()))
        return EXIT_OK
    if args.cf:
        bounds = golden_enclosure(args.bits) if args.cf == "golden" else _point(args.cf)
        alpha = bounds if len(bounds) == 2 else bounds[0]
        report = cf_badly_approx(alpha, args.depth)
        _write(args.out, _dumps({"schema": SCHEMA, "kind": "continued-fraction", "digits": list(report.digits),
                                 "complete": report.complete, "max_digit": report.max_digit}))
        return EXIT_OK
    if not args.sys:
        raise ConfigError("exponents needs --sys with --point/--box, or --jarnik, or --cf")
    profile = exponent_profile(parse_system(args.sys), _box(args), parse_rational(args.T))
    _write(args.out, profile.to_csv() if args.csv else _dumps(profile.to_json()))
    return EXIT_OK


def cmd_transfer(args) -> int:
    if args.action in ("params", "dual"):
        params = transfer_params(args.n, args.g, parse_rational(args.t), parse_rational(args.eta))
        result = {"schema": SCHEMA, "kind": "transfer-params", "params": params.to_json(),
                  "ratio_identity": params.ratio_identity(), "volume_identity": params.volume_identity()}
        if args.action == "dual":
            if not args.point:
                raise ConfigError("transfer dual needs --point")
            result["kind"] = "dual-point"
            result["z"] = list(find_dual_point(_point(args.point), params))
        _write(args.out, _dumps(result))
        return EXIT_OK
    family = parse_family(args.manifold)
    if not isinstance(family, ManifoldFamily):
        raise ConfigError("transfer pipeline needs a manifold family descriptor")
    f = parse_approx(args.f)
    verdict = admissible(f, family.graph.n, family.graph.d)
    if verdict.verdict is not True:
        raise ConfigError(f"{f.describe()} is not admissible: {verdict.detail}")
    result = dual_pipeline(family.graph, f, args.steps)
    prefix = args.out_prefix or "pipeline"
    Path(f"{prefix}.trace.json").write_text(result.trace.dumps() + "\n")
    Path(f"{prefix}.certificate.json").write_text(_dumps(result.certificate.to_json()))
    _write(None, json.dumps(result.summary(), sort_keys=True))
    return EXIT_OK


def cmd_sumset(args) -> int:
    shift = _point(args.z)
    f = parse_approx(args.f1)
    if args.f2:
        f = MinOf(f, parse_approx(args.f2))
    window = parse_box(args.window) if args.window else None
    result = realize_sumset(shift, f, args.steps, window)
    prefix = args.out_prefix or "sumset"
    Path(f"{prefix}.trace.json").write_text(result.trace.dumps() + "\n")
    for name, cert in zip(("x", "x_plus_z"), result.certificates):
        Path(f"{prefix}.{name}.certificate.json").write_text(_dumps(cert.to_json()))
    _write(None, json.dumps({"thresholds": result.trace.thresholds, "certificates": "pass"}))
    return EXIT_OK


def cmd_dominate(args) -> int:
    system = parse_system(args.sys)
    if not isinstance(system, Standard):
        raise ConfigError("dominate works with std systems")
    result = dominate(_box(args), system, parse_rational(args.T), max_steps=args.max_steps)
    payload = {"schema": SCHEMA, "kind": "domination", "table": result.table.describe(),
               "trace": result.trace.to_json(), "certificate": result.certificate.to_json()}
    _write(args.out, _dumps(payload))
    return EXIT_OK


def cmd_dirichlet_audit(args) -> int:
    rng = random.Random(args.seed)
    if args.point:
        points = [_point(p) for p in args.point]
    else:
        dim = args.m * args.n
        points = [tuple(Fraction(rng.randint(0, args.denominator), rng.randint(1, args.denominator))
                        for _ in range(dim)) for _ in range(args.points)]
    report = dirichlet_audit(points, args.m, args.n, args.t_max)
    payload = {"schema": SCHEMA, "kind": "dirichlet-audit", "checked": report.checked, "ok": report.ok,
               "violations": [{"point": [fmt_rational(v) for v in p], "t": t, "psi": fmt_rational(v)}
                              for p, t, v in report.violations]}
    _write(args.out, _dumps(payload))
    return EXIT_OK if report.ok else EXIT_NEGATIVE


HANDLERS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "psi": cmd_psi,
    "exponents": cmd_exponents,
    "transfer": cmd_transfer,
    "sumset": cmd_sumset,
    "dominate": cmd_dominate,
    "dirichlet-audit": cmd_dirichlet_audit,
}


def build_parser() -> argparse.ArgumentParser:
    default_precision = int(os.environ.get(PRECISION_ENV, "64"))
    parser = argparse.ArgumentParser(prog="uniform-forge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def point_args(p):
        p.add_argument("--point", help="comma-separated rationals")
        p.add_argument("--radius", help="box radius around --point")
        p.add_argument("--box", help="box descriptor such as [0,1]^2")

    p = sub.add_parser("construct", help="run the nested-box constructor")
    p.add_argument("--sys", action="append", required=True)
    p.add_argument("--f", action="append", required=True)
    p.add_argument("--family")
    p.add_argument("--avoid", action="append")
    p.add_argument("--window")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--shrink", default="1/2")
    p.add_argument("--precision", type=int, default=default_precision)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="check a trace and certify its enclosure, or re-check a certificate")
    p.add_argument("--trace")
    p.add_argument("--certificate")
    p.add_argument("--out")

    p = sub.add_parser("psi", help="CSV table of psi_sup(t) for t = 1..T")
    p.add_argument("--sys", required=True)
    point_args(p)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("exponents", help="exponent windows and diagnostics")
    p.add_argument("--sys")
    point_args(p)
    p.add_argument("--T", default="100")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--jarnik", help="'golden' or LO,HI enclosure of the uniform exponent")
    p.add_argument("--omega", help="LO,HI enclosure of the ordinary exponent")
    p.add_argument("--cf", help="'golden', a rational, or LO,HI")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--bits", type=int, default=default_precision)
    p.add_argument("--out")

    p = sub.add_parser("transfer", help="row-to-column transference")
    p.add_argument("action", choices=["params", "dual", "pipeline"])
    p.add_argument("--n", type=int)
    p.add_argument("--g", type=int)
    p.add_argument("--t")
    p.add_argument("--eta")
    p.add_argument("--point")
    p.add_argument("--manifold")
    p.add_argument("--f")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--out")
    p.add_argument("--out-prefix")

    p = sub.add_parser("sumset", help="x and x + z both uniform")
    p.add_argument("--z", required=True)
    p.add_argument("--f1", required=True)
    p.add_argument("--f2")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--window")
    p.add_argument("--out-prefix")

    p = sub.add_parser("dominate", help="construct a point beating a given psi table")
    p.add_argument("--sys", default="std:1,1")
    point_args(p)
    p.add_argument("--T", required=True)
    p.add_argument("--max-steps", type=int, default=40)
    p.add_argument("--out")

    p = sub.add_parser("dirichlet-audit", help="psi_sup(t) <= t^(-n/m) on rational points")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t-max", type=int, default=40)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--denominator", type=int, default=50)
    p.add_argument("--point", action="append")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return parser


def _validate(args) -> None:
    if args.command == "transfer" and args.action in ("params", "dual"):
        missing = [name for name in ("n", "g", "t", "eta") if getattr(args, name) is None]
        if missing:
            raise ConfigError("transfer " + args.action + " needs " + ", ".join("--" + m for m in missing))
    if args.command == "transfer" and args.action == "pipeline" and not (args.manifold and args.f):
        raise ConfigError("transfer pipeline needs --manifold and --f")
    if getattr(args, "steps", 1) is not None and getattr(args, "steps", 1) < 1:
        raise ConfigError("--steps must be positive")


def run(config: RunConfig | list[str]) -> int:
    argv = config if isinstance(config, list) else [config.command] + config.options.get("argv", [])
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _validate(args)
        return HANDLERS[args.command](args)
    except (GapFound, NotFound, ResonantInput) as exc:
        payload = {"schema": SCHEMA, "kind": "negative", "error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, GapFound):
            t = exc.t
            payload["t"] = fmt_rational(t) if isinstance(t, (Fraction, int)) else str(t)
        if isinstance(exc, NotFound):
            payload["instance"] = exc.instance
        sys.stdout.write(_dumps(payload))
        return EXIT_NEGATIVE
    except (ShrinkStalled, SuccessorNotFound) as exc:
        log.error("budget exhausted: %s", exc)
        return EXIT_BUDGET
    except (ConfigError, NotAligned, WindowTooSmall, InexactRoot, ValueError, KeyError, OSError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG


def main(argv: list[str] | None = None) -> int:
    return run(list(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    raise SystemExit(main())
