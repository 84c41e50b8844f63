"""Command line front end.

Examples::

    hnstrat enumerate --group gl:2 --mu 1,0
    hnstrat dims --group gl:7 --mu 1,1,1,1,0,0,0 --nu 1,3/5,3/5,3/5,3/5,3/5,0
    hnstrat wa --b 5/7,5/7 --mu 1,1,1,1,0,0,0,0,0,0,0,0,0,0 --nu 3/2,3/2,3/2,3/2,4/5,...

Vectors are comma separated, rationals are written ``p/q`` and ``x^k``
repeats an entry ``k`` times.  Exit status is 0 on success, 2 for usage
errors, 3 when the input violates a mathematical precondition and 1 when
``--oracle`` finds a disagreement.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import oracles
from .hnengine import ModificationInstance, modification_hn
from .kottwitz import (
    GroupDatum,
    IsocrystalBlocks,
    NewtonPoint,
    enumerate_B,
    enumerate_B_mu_b,
)
from .rootdata import sort_desc
from .strata import (
    Contained,
    HNType,
    dim_hn_bound,
    dim_newton,
    dims_equal_classification,
    dor_nonempty,
    fully_hnd,
    hodge_newton_project,
    is_in_B_HN,
    is_minuscule,
    levi_allowed,
    smallest_hnd_levi,
    stratum_report,
    theta_set,
    wa_containment,
)

CONFIG_SECTION = "hnstrat"
SIGN_NOTE = (
    "Sign convention: a point of type mu has degree -sum(mu), so a modification of b of type mu has "
    "degree deg(b) + sum(mu); Newton points nu lie in B(G, mu) with sum(nu) = sum(mu)."
)
RHO_NOTE = (
    "dim_hn_bound pairs with rho; the variant pairing with 2 rho is reported for comparison "
    "and exceeds the Newton stratum dimension in general."
)


class UsageError(Exception):
    pass


class OracleMismatch(Exception):
    pass


# -- parsing -------------------------------------------------------------------


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_vector(text: str) -> list[Fraction]:
    out: list[Fraction] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise UsageError(f"empty entry in {text!r}")
        base, _, reps = item.partition("^")
        count = 1
        if reps:
            if not reps.isdigit() or int(reps) < 1:
                raise UsageError(f"bad repetition count in {item!r}")
            count = int(reps)
        out.extend([parse_rational(base)] * count)
    return out


def parse_cocharacter(text: str) -> tuple[int, ...]:
    v = parse_vector(text)
    if any(x.denominator != 1 for x in v):
        raise UsageError(f"mu must be integral: {text!r}")
    return tuple(int(x) for x in v)


def parse_group(text: str) -> int:
    kind, _, n = text.partition(":")
    if kind.lower() != "gl" or not n.isdigit() or int(n) < 1:
        raise UsageError(f"group must look like gl:N, got {text!r}")
    return int(n)


def parse_blocks(text: str) -> IsocrystalBlocks:
    blocks = []
    for item in text.split(","):
        d, slash, h = item.strip().partition("/")
        try:
            blocks.append((int(d), int(h) if slash else 1))
        except ValueError:
            raise UsageError(f"isocrystal block must be d/h, got {item!r}") from None
    try:
        return IsocrystalBlocks(tuple(blocks))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_instance(text: str) -> ModificationInstance:
    blocks = []
    for item in text.split(","):
        slope, _, a = item.strip().partition(":")
        d, slash, h = slope.partition("/")
        try:
            blocks.append((int(d), int(h) if slash else 1, int(a or 0)))
        except ValueError:
            raise UsageError(f"instance block must be d/h:a, got {item!r}") from None
    try:
        return ModificationInstance(tuple(blocks))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- rendering ------------------------------------------------------------------


def rat(x: Fraction | int) -> str:
    return str(Fraction(x))


def vec(v: Sequence) -> list[str]:
    return [rat(x) for x in v]


def type_json(t: HNType) -> dict[str, Any]:
    return {"levi": list(t.levi), "lam": list(t.lam), "neg_lam": list(t.neg_lam), "display": str(t)}


def flat(value: Any) -> str:
    """Single-cell rendering for CSV and Markdown."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, dict):
        return value.get("display") or "{" + ";".join(f"{k}={flat(v)}" for k, v in value.items()) + "}"
    if isinstance(value, list):
        if all(not isinstance(v, (list, dict)) for v in value):
            return "(" + ",".join(flat(v) for v in value) + ")"
        sep = " " if all(isinstance(v, list) for v in value) else "; "
        return sep.join(flat(v) for v in value)
    return str(value)


def render(doc: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    rows = doc.get("rows")
    if rows is None:
        rows = [{"key": k, "value": flat(v)} for k, v in doc.items()]
    else:
        rows = [{k: flat(v) for k, v in r.items()} for r in rows]
    header = list(rows[0]) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in rows:
        lines.append("| " + " | ".join(r[h].replace("|", "\\|") for h in header) + " |")
    return "\n".join(lines) + "\n"


# -- commands -------------------------------------------------------------------


def _group(args: argparse.Namespace) -> GroupDatum:
    if args.group is None:
        raise UsageError("--group is required")
    return GroupDatum(parse_group(args.group), int(args.twist or 0))


def _mu(args: argparse.Namespace, G: GroupDatum) -> tuple[int, ...]:
    if args.mu is None:
        raise UsageError("--mu is required")
    mu = parse_cocharacter(args.mu)
    if len(mu) != G.n:
        raise UsageError(f"mu has {len(mu)} entries but the group has rank {G.n}")
    return mu


def _nu(args: argparse.Namespace, n: int) -> NewtonPoint:
    if args.nu is None:
        raise UsageError("--nu is required")
    v = parse_vector(args.nu)
    if len(v) != n:
        raise UsageError(f"nu has {len(v)} entries, expected {n}")
    return NewtonPoint(sort_desc(v))


def _header(command: str, G: GroupDatum, mu: Sequence[int]) -> dict[str, Any]:
    return {
        "command": command,
        "group": {"n": G.n, "twist": G.twist_degree},
        "mu": list(mu),
        "mu_dom": list(sort_desc(mu)),
    }


def report_row(G: GroupDatum, mu: tuple[int, ...], nu: NewtonPoint, strict: bool) -> dict[str, Any]:
    r = stratum_report(G, mu, nu)
    row = {
        "nu": vec(r.nu.slopes),
        "in_B": r.in_B,
        "in_B_HN": r.in_B_HN,
        "theta": [type_json(t) for t in r.theta],
        "hnd_levi": list(r.hnd_levi) if isinstance(r.hnd_levi, tuple) else r.hnd_levi,
        "dim_newton": None if r.dim_newton is None else rat(r.dim_newton),
        "dim_hn_bound": None if r.dim_hn_bound is None else rat(r.dim_hn_bound),
        "dims_equal": r.dims_equal,
        "dor_nonempty": r.dor_nonempty,
    }
    if strict:
        row["dim_hn_bound_2rho"] = rat(dim_hn_bound(mu, nu, G, scale=2)) if r.dim_hn_bound is not None else None
    return row


def _report_job(job: tuple) -> dict[str, Any]:
    return report_row(*job)


def _oracle_row(G: GroupDatum, mu: tuple[int, ...], nu: NewtonPoint) -> None:
    allowed = levi_allowed(G, nu.centralizer())
    want = oracles.theta(mu, nu.slopes, allowed)
    _agree("theta", {(t.levi, t.neg_lam) for t in theta_set(G, mu, nu)}, want, nu)
    dor = oracles.theta(mu, nu.slopes, allowed, exact=True)
    _agree("dor", dor_nonempty(G, mu, nu).value, bool(dor), nu)
    _agree("hnd_levi", smallest_hnd_levi(mu, nu), oracles.smallest_hnd_levi(mu, nu.slopes), nu)
    if is_minuscule(mu):
        _agree("dim_newton", dim_newton(mu, nu), oracles.dim_newton(mu, nu.slopes), nu)
        if want:
            _agree("dim_hn_bound", dim_hn_bound(mu, nu, G), oracles.dim_hn_bound(mu, nu.slopes, allowed), nu)


def _agree(what: str, got: Any, want: Any, context: Any = "") -> None:
    if got != want:
        raise OracleMismatch(f"{what} disagrees with the brute-force oracle at {context}: {got!r} != {want!r}")


def cmd_enumerate(args: argparse.Namespace) -> dict[str, Any]:
    G = _group(args)
    mu = _mu(args, G)
    classes = enumerate_B(G, mu)
    if args.oracle:
        _agree("enumerate_B", {nu.slopes for nu in classes}, oracles.kottwitz_set(mu), "B(G, mu)")
        for nu in classes:
            _oracle_row(G, mu, nu)
    jobs = [(G, mu, nu, args.strict_paper) for nu in classes]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_report_job, jobs))
    else:
        rows = [_report_job(j) for j in jobs]
    doc = _header("enumerate", G, mu)
    doc["rows"] = rows
    return doc


def _single(args: argparse.Namespace, command: str) -> tuple[GroupDatum, tuple[int, ...], NewtonPoint, dict]:
    G = _group(args)
    mu = _mu(args, G)
    nu = _nu(args, G.n)
    doc = _header(command, G, mu)
    doc["nu"] = vec(nu.slopes)
    return G, mu, nu, doc


def cmd_theta(args: argparse.Namespace) -> dict[str, Any]:
    G, mu, nu, doc = _single(args, "theta")
    types = theta_set(G, mu, nu)
    if args.oracle:
        _oracle_row(G, mu, nu)
    doc["levi_allowed"] = levi_allowed(G, nu.centralizer())
    doc["theta"] = [type_json(t) for t in types]
    return doc


def cmd_dims(args: argparse.Namespace) -> dict[str, Any]:
    G, mu, nu, doc = _single(args, "dims")
    newton = dim_newton(mu, nu)
    bound = dim_hn_bound(mu, nu, G)
    equal = dims_equal_classification(mu, nu, G)
    if args.oracle:
        _oracle_row(G, mu, nu)
        _agree("classification", equal, newton == bound, nu)
    doc.update({"dim_newton": rat(newton), "dim_hn_bound": rat(bound), "dims_equal": equal})
    if args.strict_paper:
        doc["dim_hn_bound_2rho"] = rat(dim_hn_bound(mu, nu, G, scale=2))
        doc["note"] = RHO_NOTE
    return doc


def cmd_hnd(args: argparse.Namespace) -> dict[str, Any]:
    G, mu, nu, doc = _single(args, "hnd")
    levi = smallest_hnd_levi(mu, nu)
    if args.oracle:
        _oracle_row(G, mu, nu)
    doc["smallest_levi"] = list(levi)
    doc["decomposable"] = len(levi) > 1
    return doc


def cmd_dor(args: argparse.Namespace) -> dict[str, Any]:
    G, mu, nu, doc = _single(args, "dor")
    d = dor_nonempty(G, mu, nu)
    h = is_in_B_HN(G, mu, nu)
    if args.oracle:
        _oracle_row(G, mu, nu)
    doc["dor_nonempty"] = d.value
    doc["dor_witness"] = type_json(d.witness) if d else None
    doc["in_B_HN"] = h.value
    doc["hn_witness"] = type_json(h.witness) if h else None
    return doc


def cmd_report(args: argparse.Namespace) -> dict[str, Any]:
    G, mu, nu, doc = _single(args, "report")
    if args.oracle:
        _oracle_row(G, mu, nu)
    doc.update(report_row(G, mu, nu, args.strict_paper))
    return doc


def cmd_fully_hnd(args: argparse.Namespace) -> dict[str, Any]:
    G = _group(args)
    mu = _mu(args, G)
    d = fully_hnd(G, mu)
    if args.oracle:
        for nu in enumerate_B(G, mu):
            _agree("hnd_levi", smallest_hnd_levi(mu, nu), oracles.smallest_hnd_levi(mu, nu.slopes), nu)
    doc = _header("fully-hnd", G, mu)
    doc["fully_hnd"] = d.value
    doc["witness"] = None if d else vec(d.witness.slopes)
    return doc


def cmd_hn_polygon(args: argparse.Namespace) -> dict[str, Any]:
    if args.blocks is None:
        raise UsageError("--blocks is required")
    inst = parse_instance(args.blocks)
    poly = modification_hn(inst)
    if args.oracle:
        _agree("modification_hn", poly, oracles.subset_hn(inst), "instance")
    doc: dict[str, Any] = {"command": "hn-polygon", "blocks": [list(b) for b in inst.blocks]}
    doc["slopes"] = vec(poly.slopes())
    if args.levi:
        G = _group(args) if args.group else None
        levi = parse_cocharacter(args.levi)
        split = hodge_newton_project(inst, levi, G)
        doc["levi"] = list(split.levi)
        doc["parts"] = [vec(p.slopes()) for p in split.part_polygons]
    doc["rows"] = [{"rank": x, "deg": rat(y)} for x, y in poly.vertices]
    return doc


def cmd_wa(args: argparse.Namespace) -> dict[str, Any]:
    if args.b is None:
        raise UsageError("--b is required")
    b = parse_blocks(args.b)
    G = b.group()
    if args.group is not None and parse_group(args.group) != G.n:
        raise UsageError(f"--group has rank {parse_group(args.group)} but b has rank {G.n}")
    mu = _mu(args, G)
    nu = _nu(args, G.n)
    if not b.is_basic():
        raise ValueError(f"isocrystal {list(b.blocks)} is not basic")
    if args.oracle:
        got = {x.slopes for x in enumerate_B_mu_b(G, mu, b)}
        bound = [x + m for x, m in zip(b.newton_point().slopes, sort_desc(mu))]
        _agree("enumerate_B_mu_b", got, oracles.kottwitz_set(mu, bound, b.degree + sum(mu)), "B(G, mu, b)")
    result = wa_containment(b, mu, nu)
    doc = _header("wa", G, mu)
    doc["b"] = [f"{d}/{h}" for d, h in b.blocks]
    doc["nu"] = vec(nu.slopes)
    doc["verdict"] = "contained" if isinstance(result, Contained) else "inconclusive"
    doc["killed"] = [
        {"levi": list(k.levi), "mu_blocks": [list(m) for m in k.mu_blocks], "rules": list(k.rules)}
        for k in result.killed
    ]
    if not isinstance(result, Contained):
        doc["survivors"] = [
            {
                "levi": list(s.levi),
                "mu_blocks": [list(m) for m in s.mu_blocks],
                "reduction": vec(s.reduction),
                "etas": [vec(e.slopes) for e in s.etas],
            }
            for s in result.survivors
        ]
    return doc


COMMANDS: dict[str, tuple[Callable[[argparse.Namespace], dict], str]] = {
    "enumerate": (cmd_enumerate, "list B(G, mu) with a stratum report per class"),
    "theta": (cmd_theta, "HN types of the stratum with HN vector nu"),
    "dims": (cmd_dims, "dimensions of the Newton stratum and of the HN stratum"),
    "hnd": (cmd_hnd, "smallest Levi for which nu is Hodge-Newton decomposable"),
    "fully-hnd": (cmd_fully_hnd, "whether every non-basic class is Hodge-Newton decomposable"),
    "dor": (cmd_dor, "non-emptiness of the stratum in the flag variety versus the Grassmannian"),
    "hn-polygon": (cmd_hn_polygon, "HN polygon of a block-scalar modification"),
    "wa": (cmd_wa, "try to show a Newton stratum of an inner form lies in the semistable locus"),
    "report": (cmd_report, "full stratum report for one class"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [hnstrat] section; command line flags win")
    common.add_argument("--group", help="gl:N")
    common.add_argument("--twist", help="degree of the basic class defining the inner form (default 0)")
    common.add_argument("--mu", help="cocharacter, comma separated, any order")
    common.add_argument("--nu", help="Newton point, comma separated rationals p/q")
    common.add_argument("--b", help="basic isocrystal as blocks d/h, comma separated")
    common.add_argument("--blocks", help="modification instance as blocks d/h:a, comma separated")
    common.add_argument("--levi", help="composition, comma separated")
    common.add_argument("--format", choices=["json", "csv", "markdown"], help="output format (default json)")
    common.add_argument("--strict-paper", action="store_const", const=True, help="also report the 2 rho variant of the HN bound")
    common.add_argument("--oracle", action="store_const", const=True, help="cross-check against brute force and fail on mismatch")
    common.add_argument("--jobs", help="worker processes for row sweeps (default 1)")
    parser = argparse.ArgumentParser(
        prog="hnstrat",
        description="Invariants of Newton and HN strata for GL_n and its inner forms.",
        epilog=SIGN_NOTE,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text, description=text, epilog=SIGN_NOTE)
    return parser


OPTION_KEYS = ("group", "twist", "mu", "nu", "b", "blocks", "levi", "format", "strict_paper", "oracle", "jobs")


def merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill options missing on the command line from the config file, then defaults."""
    if args.config:
        cfg = configparser.ConfigParser()
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
        if cfg.has_section(CONFIG_SECTION):
            section = cfg[CONFIG_SECTION]
            for key in OPTION_KEYS:
                for spelled in (key, key.replace("_", "-")):
                    if getattr(args, key) is None and spelled in section:
                        value: Any = section[spelled]
                        if key in ("strict_paper", "oracle"):
                            value = section.getboolean(spelled)
                        setattr(args, key, value)
    args.format = args.format or "json"
    if args.format not in ("json", "csv", "markdown"):
        raise UsageError(f"unknown format {args.format!r}")
    args.strict_paper = bool(args.strict_paper)
    args.oracle = bool(args.oracle)
    try:
        args.jobs = int(args.jobs or 1)
        int(args.twist or 0)
    except ValueError:
        raise UsageError("--jobs and --twist take integers") from None
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    return args


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = merge_config(args)
        doc = COMMANDS[args.command][0](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hnstrat: error: {exc}", file=sys.stderr)
        return 2
    except OracleMismatch as exc:
        print(f"hnstrat: oracle mismatch: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"hnstrat: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(render(doc, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
