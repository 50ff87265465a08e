"""Command-line front end.

Exit codes: 0 success, 2 point outside the region, 3 failed precondition,
4 undecidable from exact data, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .doublecover import (GlobalStability, PartitionData, build_stability, check_U_bar,
                          classify_in_U, hn_global, parse_object, reduce_line_bundle, theta_map,
                          LineBundle)
from .errors import GlustabError
from .glue import (ExtPattern, StabilitySummary, check_gluing_condition_b, check_hearts_orthogonal,
                   find_gluing_parameter, simple)
from .klattice import CentralCharge, Gauss, Geometry, qstr
from .local_stab import OBJECTS, PLUS, STABLE, UNSTABLE, LocalStability, chamber
from .slicing import fmt_phase

EX_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise UsageError(message)


def _default(o):
    if isinstance(o, Fraction):
        return qstr(o)
    if isinstance(o, Gauss):
        return o.to_json()
    if hasattr(o, "to_json"):
        return o.to_json()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, default=_default, sort_keys=True, indent=2)


def _emit(obj, out):
    out.write(dumps(obj) + "\n")


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _stability_json(sigma: GlobalStability) -> dict:
    out = sigma.to_json()
    objs = []
    for o in sigma.stable_objects():
        o = dict(o)
        o["phase"] = None if o["phase"] is None else fmt_phase(o["phase"])
        objs.append(o)
    out["stable_objects"] = objs
    out["heart"] = sigma.heart_descriptor()
    return out


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_classify(args, out):
    Z = CentralCharge.from_json(_load(args.charge))
    geom = Geometry(Z.n, args.genus)
    report = check_U_bar(Z, geom)
    sigma = classify_in_U(Z, geom)
    data = _stability_json(sigma)
    data["ubar"] = report.to_json()
    _emit(data, out)


def cmd_build(args, out):
    Z = CentralCharge.from_json(_load(args.charge))
    geom = Geometry(Z.n, args.genus)
    part = PartitionData.parse(args.partition, Z.n)
    _emit(_stability_json(build_stability(Z, part, geom)), out)


def cmd_hn(args, out):
    sigma = GlobalStability.from_json(_load(args.stability))
    obj = parse_object(args.object)
    if len(obj.terms) == 1 and isinstance(obj.terms[0].gen, LineBundle):
        _emit({"certificate": reduce_line_bundle(obj.terms[0].gen, sigma).to_json()}, out)
        return
    _emit(hn_global(obj, sigma).to_json(), out)


def cmd_theta(args, out):
    data = _load(args.stability)
    sigma = GlobalStability.from_json(data)
    _emit(theta_map(sigma).to_json(), out)


def status_code(st) -> str:
    return {STABLE: "S", UNSTABLE: "U"}.get(st, "s")


def chamber_grid(size, re_range=(-2.0, 1.0), im_range=(-2.0, 2.0)):
    """Cell centres of the PLUS chart box with the status code of each small object."""
    rows = []
    (r0, r1), (i0, i1) = re_range, im_range
    for a in range(size):
        im = i0 + (a + 0.5) * (i1 - i0) / size
        for b in range(size):
            re_ = r0 + (b + 0.5) * (r1 - r0) / size
            if im == 0 and re_ >= 0:
                im = 1e-12
            rep = chamber(LocalStability(0, PLUS, complex(re_, im)))
            rows.append((re_, im, tuple(status_code(rep.status(o)) for o in OBJECTS), rep))
    return rows


_COLORS = {(True, False): "#4a90d9", (False, True): "#d9534f", (True, True): "#f0ad4e"}


def chamber_svg(rows, size, cell=12) -> str:
    w = h = size * cell
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">']
    for k, (_, _, codes, rep) in enumerate(rows):
        a, b = divmod(k, size)
        color = _COLORS.get((rep.W_plus, rep.W_minus), "#999999")
        opacity = 1.0 if rep.U_minus else 0.55
        y = (size - 1 - a) * cell
        parts.append(f'<rect x="{b * cell}" y="{y}" width="{cell}" height="{cell}" '
                     f'fill="{color}" fill-opacity="{opacity}"><title>{"".join(codes)}</title></rect>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_chambers(args, out):
    if not args.local:
        raise UsageError("only the local chamber diagram (--local) is available")
    if args.grid < 1:
        raise UsageError("--grid must be positive")
    rows = chamber_grid(args.grid)
    lines = ["re,im," + ",".join(OBJECTS)]
    for re_, im, codes, _ in rows:
        lines.append(f"{re_!r},{im!r}," + ",".join(codes))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(chamber_svg(rows, args.grid))


def _summary(data):
    if data is None:
        return None
    simples = [simple(s["label"], Gauss.from_json(s["charge"])) for s in data["simples"]]
    return StabilitySummary(tuple(simples), bool(data.get("finite_length", True)))


def cmd_glue_check(args, out):
    data = _load(args.pattern)
    p = ExtPattern.from_json(data)
    res = {"orthogonal": check_hearts_orthogonal(p)}
    s1, s2 = _summary(data.get("s1")), _summary(data.get("s2"))
    if s2 is not None:
        res["condition_b"] = check_gluing_condition_b(p, s2)
    if s1 is not None and s2 is not None and res["orthogonal"]:
        choice = find_gluing_parameter(s1, s2, p)
        res["parameter"] = {"a": None if choice.a is None else fmt_phase(choice.a), "case": choice.case,
                            "witness": None if choice.witness is None else list(choice.witness)}
    _emit(res, out)


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="glustab", description="Glued stability conditions on double covers of curves.")
    p.add_argument("--seed", type=int, default=None, help="seed for sampling diagnostics")
    p.add_argument("--tol", type=float, default=1e-10, help="tolerance for analytic checks")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("classify", help="normal form of a charge in U-bar")
    c.add_argument("--charge", required=True)
    c.add_argument("--genus", type=int, default=0)
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("build", help="stability from a normalized charge and a partition")
    c.add_argument("--charge", required=True)
    c.add_argument("--partition", required=True)
    c.add_argument("--genus", type=int, default=0)
    c.set_defaults(func=cmd_build)

    c = sub.add_parser("hn", help="HN factors of a torsion object, or a line-bundle certificate")
    c.add_argument("--object", required=True)
    c.add_argument("--stability", required=True)
    c.set_defaults(func=cmd_hn)

    c = sub.add_parser("theta", help="determinant coordinates of a stability")
    c.add_argument("--stability", required=True)
    c.set_defaults(func=cmd_theta)

    c = sub.add_parser("chambers", help="chamber diagram of the local stability space")
    c.add_argument("--local", action="store_true")
    c.add_argument("--grid", type=int, default=200)
    c.add_argument("--out", default=None, help="CSV path (default stdout)")
    c.add_argument("--svg", default=None, help="also write an SVG diagram")
    c.set_defaults(func=cmd_chambers)

    c = sub.add_parser("glue-check", help="gluing conditions for an Ext pattern")
    c.add_argument("--pattern", required=True)
    c.set_defaults(func=cmd_glue_check)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed is not None:
            random.seed(args.seed)
        args.func(args, out)
    except UsageError:
        return EX_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except GlustabError as e:
        print(f"glustab: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"glustab: {e}", file=sys.stderr)
        return 3
    return 0


def main() -> int:
    return run(sys.argv[1:])
