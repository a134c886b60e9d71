"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 a required
convergence did not happen.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import BesovKitError, UsageError
from .function_model import Domain, parse_function_spec
from .quadrature import QuadratureConfig
from .report import SCHEMA_VERSION, _canonical, emit_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DIVERGENT = 0, 1, 2, 3
HELP_WIDTH = 96
VERBS = ("norm", "schwarzian", "variational", "transport", "beltrami", "verify")


def _fmt(prog):
    return argparse.HelpFormatter(prog, width=HELP_WIDTH, max_help_position=34)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _add_numeric(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=_positive, default=1e-8, metavar="T",
                   help="relative quadrature tolerance, T > 0 (default 1e-8)")
    p.add_argument("--depth", type=int, default=10, metavar="D",
                   help="Carleson lattice depth, integer >= 1 (default 10)")
    p.add_argument("--eps-min", type=_positive, default=2.0 ** -16, metavar="E",
                   help="innermost shell width, 0 < E < 1/8 (default 2^-16)")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format {json,csv}")
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="besovkit", formatter_class=_fmt,
                     description="Weighted seminorms, Schwarzian operators and Beltrami diagnostics.")
    sub = parser.add_subparsers(dest="verb", metavar="VERB", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("norm", formatter_class=_fmt, help="evaluate a seminorm ladder")
    p.add_argument("--function", required=True, metavar="SPEC", help="gallery function, name:key=val,...")
    p.add_argument("--kind", required=True, metavar="KIND",
                   help="besov, besov_sharp, bloch, bloch_sharp, a, a_infty, bmoa, hardy_h11, bhat, decay;"
                        " parameters as kind:p=2 or via --p/--gamma")
    p.add_argument("--domain", choices=[d.value for d in Domain], help="domain {disk,ext-disk,hplus,hminus}")
    p.add_argument("--p", type=float, metavar="P", help="exponent, P >= 1")
    p.add_argument("--gamma", type=float, metavar="G", help="decay order, 0 < G <= 1")
    p.add_argument("--require-convergent", action="store_true", help="exit 3 when the ladder diverges")
    _add_numeric(p)
    _add_output(p)

    p = sub.add_parser("schwarzian", formatter_class=_fmt, help="evaluate N, S or J on a polar grid (CSV)")
    p.add_argument("--function", required=True, metavar="SPEC", help="gallery function on the disk")
    p.add_argument("--op", choices=("N", "S", "J"), required=True, help="operator {N,S,J}")
    p.add_argument("--radii", type=int, default=5, metavar="R", help="number of radii, R >= 1 (default 5)")
    p.add_argument("--angles", type=int, default=8, metavar="A", help="number of angles, A >= 1 (default 8)")
    p.add_argument("--rmax", type=float, default=0.9, metavar="RM", help="largest radius, 0 < RM < 1")
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    p = sub.add_parser("variational", formatter_class=_fmt, help="kernel integrals of a box coefficient")
    p.add_argument("--nu", required=True, metavar="SPEC", help="coefficient, box:c=..,x0=..,x1=..,y0=..,y1=..")
    p.add_argument("--z", required=True, action="append", metavar="Z",
                   help="evaluation point in the lower half-plane, complex literal like 0.5-1j; repeatable")
    p.add_argument("--op", choices=("pre", "schwarzian", "both"), default="both", help="kernel {pre,schwarzian,both}")
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    p = sub.add_parser("transport", formatter_class=_fmt, help="Cayley transport report")
    p.add_argument("--function", required=True, metavar="SPEC", help="gallery function on a half-plane")
    p.add_argument("--p", type=float, default=1.0, metavar="P", help="exponent, P >= 1 (default 1)")
    _add_numeric(p)
    _add_output(p)

    p = sub.add_parser("beltrami", formatter_class=_fmt, help="Beltrami coefficient diagnostics")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--mu", metavar="SPEC", help="coefficient: box:..., gamma:gamma=.., annulus:c=.., zero")
    src.add_argument("--section", metavar="SPEC", help="lower half-plane function for the Bloch section")
    p.add_argument("--p", type=float, default=2.0, metavar="P", help="exponent, P >= 1 (default 2)")
    p.add_argument("--gamma", type=float, metavar="G", help="decay order for the decay check, 0 < G <= 1")
    p.add_argument("--no-modulus", action="store_true", help="section without the absolute value")
    _add_numeric(p)
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")

    p = sub.add_parser("verify", formatter_class=_fmt, help="run a verification suite")
    p.add_argument("--suite", required=True, metavar="ID",
                   help="norm-inequalities, cayley-transport, schwarzian-identities, counterexamples,"
                        " variational-bounds, beltrami-inclusions, or all")
    p.add_argument("--workers", type=int, default=1, metavar="W", help="thread count, W >= 1 (default 1)")
    _add_numeric(p)
    _add_output(p)
    return parser


@dataclass
class Command:
    verb: str
    args: argparse.Namespace


def parse(argv: Sequence[str]) -> Command:
    """Validate ``argv``; raises UsageError naming the offending flag or value."""
    argv = list(argv)
    # points like -1j would otherwise be read as option flags
    for i in range(len(argv) - 2, -1, -1):
        if argv[i] == "--z" and argv[i + 1].startswith("-"):
            argv[i:i + 2] = [f"--z={argv[i + 1]}"]
    ns = build_parser().parse_args(argv)
    if getattr(ns, "p", None) is not None and ns.p < 1:
        raise UsageError(f"--p must be at least 1, got {ns.p:g}")
    if getattr(ns, "gamma", None) is not None and not 0 < ns.gamma <= 1:
        raise UsageError(f"--gamma must lie in (0, 1], got {ns.gamma:g}")
    if hasattr(ns, "eps_min") and not ns.eps_min < 0.125:
        raise UsageError("--eps-min must be below 1/8")
    if hasattr(ns, "depth") and ns.depth < 1:
        raise UsageError("--depth must be at least 1")
    if ns.verb == "norm":
        ns.kind_obj = _parse_kind(ns.kind, ns.p, ns.gamma, ns.depth)
    if ns.verb == "verify":
        from .suites import SUITES
        if ns.suite != "all" and ns.suite not in SUITES:
            raise UsageError(f"--suite: unknown suite {ns.suite!r}")
        if ns.workers < 1:
            raise UsageError("--workers must be at least 1")
    if ns.verb == "schwarzian" and (ns.radii < 1 or ns.angles < 1 or not 0 < ns.rmax < 1):
        raise UsageError("--radii and --angles must be positive and --rmax in (0, 1)")
    return Command(ns.verb, ns)


def _parse_kind(text: str, p: Optional[float], gamma: Optional[float], depth: int):
    from .seminorms import SeminormKind
    extra = []
    if p is not None and "p=" not in text:
        extra.append(f"p={p!r}")
    if gamma is not None and "gamma=" not in text:
        extra.append(f"gamma={gamma!r}")
    if extra:
        text = text + ("," if ":" in text else ":") + ",".join(extra)
    try:
        kind = SeminormKind.parse(text)
    except (BesovKitError, ValueError, KeyError) as e:
        raise UsageError(f"--kind {text!r}: {e}") from None
    if kind.kind == "bmoa" and "depth=" not in text:
        kind = SeminormKind("bmoa", depth=depth)
    return kind


def _config(ns) -> QuadratureConfig:
    return QuadratureConfig.from_eps_min(ns.eps_min, tol_rel=ns.tol, depth=ns.depth)


def _function(spec: str, domain: Optional[str] = None):
    try:
        f = parse_function_spec(spec)
        if domain is not None and f.domain.value != domain:
            if "domain=" not in spec:
                f2 = parse_function_spec(spec + ("," if ":" in spec else ":") + f"domain={domain}")
                if f2.domain.value == domain:
                    return f2
            raise UsageError(f"--domain {domain}: {f.label} lives on {f.domain.value}")
        return f
    except UsageError:
        raise
    except (BesovKitError, ValueError, KeyError) as e:
        raise UsageError(f"--function {spec!r}: {e}") from None


def _record(verb: str, **payload) -> str:
    data = {"schema": SCHEMA_VERSION, "verb": verb}
    data.update(payload)
    return json.dumps(_canonical(data), sort_keys=True)


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verbs


def _run_norm(ns) -> int:
    from .seminorms import seminorm
    f = _function(ns.function, ns.domain)
    cfg = _config(ns)
    v = seminorm(f, ns.kind_obj, cfg)
    if ns.format == "csv":
        rows = ["schema,function,kind,eps,value"] + [f"{SCHEMA_VERSION},{f.label},{ns.kind},{e!r},{x!r}"
                                                     for e, x in v.ladder]
        _write("\n".join(rows) + "\n", ns.out)
    else:
        _write(_record("norm", function=f.label, domain=f.domain.value, kind=ns.kind_obj.label, config=cfg.snapshot(),
                       **v.to_dict()) + "\n", ns.out)
    return EXIT_DIVERGENT if (ns.require_convergent and v.divergent) else EXIT_OK


def _run_schwarzian(ns) -> int:
    from .schwarzian import canonical_J, pre_schwarzian, schwarzian
    f = _function(ns.function)
    if f.domain is not Domain.UnitDisk:
        raise UsageError("--function: the schwarzian verb takes a disk function")
    op = {"N": pre_schwarzian, "S": schwarzian, "J": canonical_J}[ns.op]
    r = np.linspace(ns.rmax / ns.radii, ns.rmax, ns.radii)
    th = 2 * math.pi * np.arange(ns.angles) / ns.angles
    z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    vals = op(f).function(z)
    rows = ["schema,function,op,x,y,re,im"]
    for a, b in zip(z.tolist(), vals.tolist()):
        rows.append(f"{SCHEMA_VERSION},{f.label},{ns.op},{a.real!r},{a.imag!r},{b.real!r},{b.imag!r}")
    _write("\n".join(rows) + "\n", ns.out)
    return EXIT_OK


def _run_variational(ns) -> int:
    from .beltrami import parse_mu_spec
    from .schwarzian import d0_pre_schwarzian, d0_schwarzian
    try:
        mu = parse_mu_spec(ns.nu)
        zs = [complex(t.replace(" ", "")) for t in ns.z]
    except (BesovKitError, ValueError) as e:
        raise UsageError(f"--nu/--z: {e}") from None
    lines = []
    for z in zs:
        rec = {"nu": mu.label, "z": z}
        if ns.op in ("pre", "both"):
            rec["d0_pre_schwarzian"] = complex(d0_pre_schwarzian(mu, z))
        if ns.op in ("schwarzian", "both"):
            rec["d0_schwarzian"] = complex(d0_schwarzian(mu, z))
        lines.append(_record("variational", **rec))
    _write("\n".join(lines) + "\n", ns.out)
    return EXIT_OK


def _run_transport(ns) -> int:
    from .cayley import transport_report
    f = _function(ns.function)
    if not f.domain.is_halfplane:
        raise UsageError("--function: transport starts from a half-plane function")
    rep = transport_report(f, ns.p, _config(ns)).sorted()
    _write(emit_report(rep, ns.format).decode(), ns.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _run_beltrami(ns) -> int:
    from .beltrami import aw_section, decay_check, membership, parse_mu_spec, section_sup
    from .seminorms import Bloch, seminorm
    cfg = _config(ns)
    if ns.section:
        phi = _function(ns.section)
        b = seminorm(phi, Bloch, cfg)
        mu = aw_section(phi, cfg, modulus=not ns.no_modulus, bloch_value=b)
        s = section_sup(mu, cfg)
        _write(_record("beltrami", section=phi.label, modulus=not ns.no_modulus, bloch=b.estimate,
                       sup_mu=s.estimate, witness=s.witness) + "\n", ns.out)
        return EXIT_OK
    try:
        mu = parse_mu_spec(ns.mu)
    except (BesovKitError, ValueError) as e:
        raise UsageError(f"--mu: {e}") from None
    v = membership(mu, ns.p, cfg)
    payload = {"mu": mu.label, "p": ns.p, **v.to_dict()}
    if ns.gamma is not None:
        d = decay_check(mu, ns.gamma, cfg)
        payload["decay"] = {"gamma": ns.gamma, **d.to_dict()}
    _write(_record("beltrami", **payload) + "\n", ns.out)
    return EXIT_OK


def _run_verify(ns) -> int:
    from .suites import SUITES, run_suite
    cfg = _config(ns)
    ids = SUITES if ns.suite == "all" else (ns.suite,)
    blobs, ok = [], True
    for sid in ids:
        rep = run_suite(sid, cfg, ns.workers)
        ok = ok and rep.passed
        blobs.append(emit_report(rep, ns.format).decode())
    _write("".join(blobs), ns.out)
    return EXIT_OK if ok else EXIT_FAIL


_RUN = {"norm": _run_norm, "schwarzian": _run_schwarzian, "variational": _run_variational,
        "transport": _run_transport, "beltrami": _run_beltrami, "verify": _run_verify}


def execute(cmd: Command) -> int:
    return _RUN[cmd.verb](cmd.args)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help") for a in argv):
        try:
            build_parser().parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)
    try:
        return execute(parse(argv))
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BesovKitError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


def help_text() -> str:
    """Top-level help followed by the help of every verb; the golden-file test pins it."""
    parser = build_parser()
    parts = [parser.format_help()]
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for verb in VERBS:
        parts.append(sub.choices[verb].format_help())
    return "\n".join(parts)


if __name__ == "__main__":
    sys.exit(main())
