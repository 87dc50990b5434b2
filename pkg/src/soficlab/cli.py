"""Batch command-line interface.

One command per invocation; every command writes a single JSON report that
echoes its full configuration (seed and budgets included) so identical
configurations produce byte-identical reports.  Exact rationals appear as
"p/q" strings; the only floats are display-only square-root distances.

Exit codes: 0 ok, 2 parse error, 3 precondition violation, 4 budget
exhaustion.
"""

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

from . import align, commutant, convex, groups, rounding
from .errors import BudgetError, ParseError, PreconditionError
from .util import format_fraction, parse_fraction
from .words import word_tokens


def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc


def _unwrap(data):
    if isinstance(data, dict) and "result" in data and isinstance(
            data["result"], dict):
        return data["result"]
    return data


def load_approx(path):
    return groups.approx_from_dict(_unwrap(_read_json(path)))


def load_table(path):
    return groups.table_from_dict(_unwrap(_read_json(path)))


def _parse_points(text):
    if text.strip() == "":
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"invalid point list {text!r}") from exc


def _parse_weights(text):
    return [parse_fraction(part) for part in text.split(",")]


def write_report(report, output):
    payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if output is None:
        sys.stdout.write(payload)
        return
    directory = os.path.dirname(os.path.abspath(output))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp_path, output)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _config_echo(args, fields):
    config = {"command": args.command}
    for name in fields:
        config[name] = getattr(args, name.replace("-", "_"))
    return config


# ---------------------------------------------------------------------------
# Command implementations


def cmd_build(args):
    if args.kind in ("regular", "coset") and args.input is None:
        raise ParseError(f"build --kind {args.kind} needs --input "
                         "(a Cayley table)")
    if args.kind == "shift":
        if args.n is None:
            raise ParseError("build --kind shift needs --n")
        result = groups.approx_to_dict(groups.cyclic_shift_approx(args.n))
    elif args.kind == "regular":
        table = load_table(args.input)
        result = groups.approx_to_dict(
            groups.regular_action(table, args.side))
    elif args.kind == "coset":
        table = load_table(args.input)
        subgroup = _parse_points(args.subgroup)
        result = groups.approx_to_dict(groups.coset_action(table, subgroup))
    else:  # table
        if args.family is None:
            raise ParseError("build --kind table needs --family")
        if args.family == "cyclic":
            if args.n is None:
                raise ParseError("build --family cyclic needs --n")
            table = groups.cyclic_table(args.n)
        elif args.family == "dihedral":
            if args.n is None:
                raise ParseError("build --family dihedral needs --n "
                                 "(rotation order)")
            table = groups.dihedral_table(args.n)
        elif args.family == "klein":
            table = groups.klein_table()
        elif args.family == "quaternion":
            table = groups.quaternion_table()
        else:
            raise ParseError(f"unknown table family {args.family!r}")
        result = groups.table_to_dict(table)
    return {
        "config": _config_echo(
            args, ["kind", "n", "side", "subgroup", "family", "input"]),
        "result": result,
    }


def cmd_profile(args):
    theta = load_approx(args.input)
    profile = groups.trace_profile(theta, args.max_words)
    defect = None
    if theta.relators is not None:
        defect = format_fraction(groups.relator_defect(theta))
    return {
        "config": _config_echo(args, ["input", "max_words"]),
        "dimension": theta.dimension,
        "relator_defect": defect,
        "soficity_score": format_fraction(profile.score),
        "profile": [
            {"word": word_tokens(w, theta.generators),
             "fixed_fraction": format_fraction(v)}
            for w, v in profile.entries],
    }


def cmd_combine(args):
    approxes = [load_approx(path) for path in args.input]
    weights = _parse_weights(args.weights)
    if len(weights) != len(approxes):
        raise ParseError("one weight per input approximation required")
    combined, plan = convex.convex_combine(
        list(zip(weights, approxes)), args.cap)
    return {
        "config": _config_echo(args, ["input", "weights", "cap"]),
        "plan": plan.to_dict(),
        "result": groups.approx_to_dict(combined),
    }


def cmd_amplify(args):
    theta = load_approx(args.input)
    return {
        "config": _config_echo(args, ["input", "factor"]),
        "result": groups.approx_to_dict(convex.amplify(theta, args.factor)),
    }


def cmd_tensor_power(args):
    theta = load_approx(args.input)
    result = convex.tensor_power(theta, args.power, args.size_cap)
    return {
        "config": _config_echo(args, ["input", "power", "size_cap"]),
        "result": groups.approx_to_dict(result),
    }


def cmd_cut(args):
    theta = load_approx(args.input)
    points = _parse_points(args.points)
    return {
        "config": _config_echo(args, ["input", "points"]),
        "result": groups.approx_to_dict(convex.cut(theta, points)),
    }


def cmd_orbits(args):
    theta = load_approx(args.input)
    return {
        "config": _config_echo(args, ["input"]),
        "orbits": [list(o) for o in convex.orbits(theta)],
    }


def cmd_round(args):
    data = _read_json(args.input)
    pm = rounding.PointMap(tuple(data))
    w, disagreements = rounding.round_to_permutation(pm)
    return {
        "config": _config_echo(args, ["input"]),
        "permutation": list(w.img),
        "disagreements": disagreements,
        "deficit": rounding.deficit(pm),
        "lemma_value": format_fraction(
            Fraction(2 * disagreements, pm.n)),
    }


def _load_family(data):
    try:
        return rounding.SubsetFamily(
            int(data["n"]), tuple(tuple(s) for s in data["subsets"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed subset family: {exc}") from exc


def cmd_majority(args):
    fam = _load_family(_read_json(args.input))
    majority = rounding.majority_set(fam)
    witness, value = rounding.witness_permutation(
        fam, seed=args.seed, budget=args.witness_budget)
    return {
        "config": _config_echo(args, ["input", "seed", "witness_budget"]),
        "majority": sorted(majority),
        "cost": rounding.family_cost(fam, majority),
        "witness_permutation": list(witness.img),
        "witness_value": value,
        "averaging_bound": format_fraction(rounding.averaging_bound(fam)),
    }


def cmd_blockify(args):
    data = _read_json(args.input)
    try:
        n, r = int(data["n"]), int(data["r"])
        subset = tuple(data["subset"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed blockify input: {exc}") from exc
    result = rounding.blockify(subset, n, r)
    return {
        "config": _config_echo(args, ["input"]),
        "slices": [sorted(s) for s in result.slices],
        "majority": sorted(result.majority),
        "block_set": sorted(result.block_set),
        "sym_diff": result.sym_diff,
    }


def cmd_distance(args):
    theta = load_approx(args.input[0])
    phi = load_approx(args.input[1])
    theta, phi = align.equalize_dimensions(theta, phi)
    ws = align.WeightScheme(args.max_words)
    if args.mode == "exact":
        alignment = align.conj_distance_exact(
            theta, phi, ws, cap=args.exact_cap)
    else:
        alignment = align.conj_distance_anneal(
            theta, phi, ws, seed=args.seed,
            restarts=args.restarts, steps=args.anneal_steps)
    report = {
        "config": _config_echo(
            args, ["input", "mode", "max_words", "exact_cap",
                   "anneal_steps", "restarts", "seed"]),
        "common_dimension": theta.dimension,
    }
    report.update(alignment.to_dict())
    return report


def cmd_axioms(args):
    approxes = [load_approx(path) for path in args.input]
    weights = _parse_weights(args.weights)
    alt = _parse_weights(args.alt_weights) if args.alt_weights else None
    checks = align.axiom_suite(
        approxes, weights, alt_weights=alt,
        ws=align.WeightScheme(args.max_words),
        c_bound=parse_fraction(args.c_bound), seed=args.seed)
    return {
        "config": _config_echo(
            args, ["input", "weights", "alt_weights", "max_words",
                   "c_bound", "seed"]),
        "checks": [check.to_dict() for check in checks],
        "all_passed": all(check.passed for check in checks),
    }


def cmd_centralizer(args):
    theta = load_approx(args.input)
    desc = commutant.centralizer_exact(theta, cap=args.enum_cap)
    report = {
        "config": _config_echo(args, ["input", "enum_cap"]),
    }
    report.update(desc.to_dict())
    report["elements"] = [list(p.img) for p in desc.elements()]
    return report


def cmd_certificate(args):
    theta = load_approx(args.input)
    cert = commutant.ergodicity_certificate(theta, cap=args.enum_cap)
    report = {
        "config": _config_echo(args, ["input", "enum_cap"]),
        "verified": commutant.verify_certificate(
            theta, cert, enum_cap=args.enum_cap),
    }
    report.update(cert.to_dict())
    return report


def cmd_mixing(args):
    theta = load_approx(args.input)
    result = commutant.mixing_statistic(
        theta, _parse_points(args.y), _parse_points(args.z),
        cap=args.enum_cap)
    report = {
        "config": _config_echo(args, ["input", "y", "z", "enum_cap"]),
    }
    report.update(result.to_dict())
    return report


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="soficlab",
        description="Finite-stage workbench for sofic approximations")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        p.add_argument("--output", default=None,
                       help="report path (default: stdout)")
        return p

    p = add("build", cmd_build, help="construct an approximation or table")
    p.add_argument("--kind", required=True,
                   choices=["shift", "regular", "coset", "table"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--side", default="left", choices=["left", "right"])
    p.add_argument("--subgroup", default="",
                   help="comma-separated element indices")
    p.add_argument("--family", default=None,
                   choices=["cyclic", "dihedral", "klein", "quaternion"])
    p.add_argument("--input", default=None, help="Cayley table JSON")

    p = add("profile", cmd_profile, help="trace profile and relator defect")
    p.add_argument("--input", required=True)
    p.add_argument("--max-words", type=int, default=3)

    p = add("combine", cmd_combine, help="weighted convex combination")
    p.add_argument("--input", required=True, nargs="+")
    p.add_argument("--weights", required=True,
                   help='comma-separated rationals, e.g. "1/3,2/3"')
    p.add_argument("--cap", type=int, required=True,
                   help="total dimension bound")

    p = add("amplify", cmd_amplify, help="tensor with an identity block")
    p.add_argument("--input", required=True)
    p.add_argument("--factor", type=int, required=True)

    p = add("tensor-power", cmd_tensor_power, help="iterated tensor power")
    p.add_argument("--input", required=True)
    p.add_argument("--power", type=int, required=True)
    p.add_argument("--size-cap", type=int, default=convex.DEFAULT_SIZE_CAP)

    p = add("cut", cmd_cut, help="restrict to an invariant set")
    p.add_argument("--input", required=True)
    p.add_argument("--points", required=True,
                   help="comma-separated point list")

    p = add("orbits", cmd_orbits, help="orbit partition of the images")
    p.add_argument("--input", required=True)

    p = add("round", cmd_round, help="round a point map to a permutation")
    p.add_argument("--input", required=True,
                   help="JSON array (one-line point map)")

    p = add("majority", cmd_majority, help="majority set of a subset family")
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--witness-budget", type=int, default=2000)

    p = add("blockify", cmd_blockify,
            help="round a subset to full copy fibers")
    p.add_argument("--input", required=True,
                   help='JSON {"n":..,"r":..,"subset":[..]}')

    p = add("distance", cmd_distance, help="conjugacy alignment search")
    p.add_argument("--input", required=True, nargs=2)
    p.add_argument("--mode", default="exact", choices=["exact", "anneal"])
    p.add_argument("--max-words", type=int, default=3)
    p.add_argument("--exact-cap", type=int, default=align.EXACT_SEARCH_CAP)
    p.add_argument("--anneal-steps", type=int, default=align.ANNEAL_STEPS)
    p.add_argument("--restarts", type=int, default=align.ANNEAL_RESTARTS)
    p.add_argument("--seed", type=int, default=0)

    p = add("axioms", cmd_axioms, help="convex axiom certificate suite")
    p.add_argument("--input", required=True, nargs="+")
    p.add_argument("--weights", required=True)
    p.add_argument("--alt-weights", default=None)
    p.add_argument("--max-words", type=int, default=3)
    p.add_argument("--c-bound", default="2")
    p.add_argument("--seed", type=int, default=0)

    p = add("centralizer", cmd_centralizer, help="exact centralizer")
    p.add_argument("--input", required=True)
    p.add_argument("--enum-cap", type=int, default=200)

    p = add("certificate", cmd_certificate,
            help="finite-stage transitivity certificate")
    p.add_argument("--input", required=True)
    p.add_argument("--enum-cap", type=int, default=200)

    p = add("mixing", cmd_mixing, help="mixing statistic of two subsets")
    p.add_argument("--input", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--enum-cap", type=int, default=200)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
        write_report(report, args.output)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 3
    except BudgetError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
