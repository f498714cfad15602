"""Command line front end.

Three subcommands, all reading a JSON problem file:

  invariant  compute the count by one or both methods
  diagrams   list the floor diagrams (optionally as Graphviz files)
  verify     cross-check the two methods and the degeneration identity

Exit codes: 0 success, 1 internal error or method mismatch, 2 bad input,
3 truncation bounds too small.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from pathlib import Path

from . import feynman, floors, fock
from .core import DiscreteData, validate
from .fock import Bounds, BoundsError
from .formal import VertexOracle, load_table


def load_problem(path) -> DiscreteData:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ProblemError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ProblemError(f"{path}: expected a JSON object")
    known = {
        "twist", "base_degree", "genus",
        "fixed_tangencies", "moving_tangencies", "psi_powers",
    }
    extra = set(raw) - known
    if extra:
        raise ProblemError(f"{path}: unknown fields {sorted(extra)}")

    def whole(key):
        v = raw.get(key, 0)
        if not isinstance(v, int) or isinstance(v, bool):
            raise ProblemError(f"{path}: {key} must be an integer")
        return v

    def row(key):
        v = raw.get(key)
        if v is None:
            return ()
        if not isinstance(v, list) or any(
            not isinstance(x, int) or isinstance(x, bool) for x in v
        ):
            raise ProblemError(f"{path}: {key} must be a list of integers")
        return tuple(v)

    return DiscreteData(
        twist=whole("twist"),
        base_degree=whole("base_degree"),
        genus=whole("genus"),
        fixed_tangencies=row("fixed_tangencies"),
        moving_tangencies=row("moving_tangencies"),
        psi_powers=row("psi_powers"),
    )


class ProblemError(Exception):
    pass


def make_oracle(choice):
    if choice == "formal":
        return VertexOracle("formal")
    if choice == "builtin":
        return VertexOracle("builtin")
    if choice.startswith("table:"):
        path = choice[len("table:"):]
        try:
            return VertexOracle("table", table=load_table(path))
        except (OSError, ValueError) as exc:
            raise ProblemError(f"bad oracle table: {exc}")
    raise ProblemError(
        f"oracle must be formal, builtin or table:<path>, got {choice!r}"
    )


def make_bounds(args, data):
    given = (args.t_max, args.u_max, args.w_max)
    if all(v is None for v in given):
        return None
    fill = fock.default_bounds(data)
    return Bounds(
        t_max=fill.t_max if args.t_max is None else args.t_max,
        u_max=fill.u_max if args.u_max is None else args.u_max,
        w_max=fill.w_max if args.w_max is None else args.w_max,
    )


def emit_value(value, label, fmt):
    if fmt == "human":
        print(f"{label} = {value.render()}")
        return
    print(f"invariant {label}")
    for mono in sorted(value.terms):
        coeff = value.terms[mono]
        body = "*".join(s.render() for s in mono) if mono else "1"
        print(f"term {coeff} {body}")


def cmd_invariant(args):
    data = load_problem(args.problem)
    errs = validate(data, connected=args.connected)
    if errs:
        raise ProblemError("; ".join(errs))
    oracle = make_oracle(args.oracle)
    bounds = make_bounds(args, data)
    results = {}
    if args.method in ("floors", "both"):
        results["floors"] = floors.invariant(
            data, oracle, connected=args.connected
        )
    if args.method in ("fock", "both"):
        if args.connected:
            results["fock"] = feynman.connected_invariant(
                data, oracle, bounds=bounds, unsafe=args.unsafe_bounds
            )
        elif args.unsafe_bounds and bounds is not None:
            results["fock"] = fock.unsafe_matrix_element(
                data, oracle, bounds
            ) * _prefactor(data)
        else:
            results["fock"] = fock.invariant(data, oracle, bounds=bounds)
    mode = "connected" if args.connected else "disconnected"
    for method, value in results.items():
        emit_value(value, f"{method} {mode} {args.oracle}", args.format)
    if len(results) == 2:
        diff = results["floors"] - results["fock"]
        if not diff.is_zero():
            print("METHODS DISAGREE; difference:", file=sys.stderr)
            print("  " + diff.render(), file=sys.stderr)
            return 1
        print("methods agree")
    return 0


def _prefactor(data):
    from fractions import Fraction

    from .formal import aut_order
    pre = Fraction(
        aut_order(data.moving_tangencies) * aut_order(data.fixed_tangencies), 1
    )
    for p in list(data.moving_tangencies) + list(data.fixed_tangencies):
        pre /= abs(p)
    return pre


def cmd_diagrams(args):
    data = load_problem(args.problem)
    errs = validate(data, connected=args.connected)
    if errs:
        raise ProblemError("; ".join(errs))
    oracle = make_oracle(args.oracle)
    found = floors.enumerate_diagrams(data, connected=args.connected)
    if args.dot:
        outdir = Path(args.dot)
        outdir.mkdir(parents=True, exist_ok=True)
    for i, diagram in enumerate(found):
        mult = floors.multiplicity(diagram, oracle)
        if args.format == "records":
            sys.stdout.write(floors.diagram_records(diagram))
            print(f"multiplicity {mult.render()}")
            print()
        else:
            print(
                f"diagram {i}: edges={len(diagram.edges)} "
                f"ends={len(diagram.ends)} "
                f"strands={len(diagram.passthroughs)} "
                f"mult={mult.render()}"
            )
        if args.dot:
            path = Path(args.dot) / f"diagram_{i:04d}.dot"
            path.write_text(floors.to_dot(diagram, name=f"d{i}"))
    print(f"total {len(found)} diagrams")
    return 0


def cmd_verify(args):
    data = load_problem(args.problem)
    errs = validate(data, connected=False)
    if errs:
        raise ProblemError("; ".join(errs))
    oracle = make_oracle(args.oracle)
    bounds = make_bounds(args, data)
    failures = 0

    fl = floors.invariant(data, oracle, connected=False)
    fk = fock.invariant(data, oracle, bounds=bounds)
    if (fl - fk).is_zero():
        print("PASS methods agree (disconnected)")
    else:
        failures += 1
        print("FAIL methods disagree (disconnected)")
        print("  floors:", fl.render())
        print("  fock:  ", fk.render())

    splits = (
        [args.split] if args.split is not None
        else range(data.points + 1)
    )
    for split in splits:
        _, _, diff = floors.degeneration_check(data, split, oracle)
        tag = f"degeneration split {split}|{data.points - split}"
        if diff.is_zero():
            print(f"PASS {tag}")
        else:
            failures += 1
            print(f"FAIL {tag}")
            print("  difference:", diff.render())
    return 1 if failures else 0


def main(argv=None) -> int:
    top = argparse.ArgumentParser(
        prog="hirzebruch",
        description="Exact curve counts on Hirzebruch surfaces, two ways.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("problem", help="JSON problem file")
        p.add_argument(
            "--oracle", default="builtin",
            help="formal, builtin, or table:<path> (default builtin)",
        )

    def modeflags(p):
        grp = p.add_mutually_exclusive_group()
        grp.add_argument(
            "--connected", dest="connected", action="store_true",
            default=True,
        )
        grp.add_argument(
            "--disconnected", dest="connected", action="store_false",
        )

    p = sub.add_parser("invariant", help="compute the count")
    common(p)
    modeflags(p)
    p.add_argument(
        "--method", choices=("floors", "fock", "both"), default="both"
    )
    p.add_argument("--format", choices=("human", "records"), default="human")
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--u-max", type=int, default=None)
    p.add_argument("--w-max", type=int, default=None)
    p.add_argument(
        "--unsafe-bounds", action="store_true",
        help="accept truncation bounds that cannot be proven sufficient",
    )
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("diagrams", help="list floor diagrams")
    common(p)
    modeflags(p)
    p.add_argument("--format", choices=("human", "records"), default="human")
    p.add_argument("--dot", metavar="DIR", help="write Graphviz files here")
    p.set_defaults(func=cmd_diagrams)

    p = sub.add_parser("verify", help="cross-check methods and degeneration")
    common(p)
    p.add_argument(
        "--split", type=int, default=None,
        help="check one degeneration split (default: all)",
    )
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--u-max", type=int, default=None)
    p.add_argument("--w-max", type=int, default=None)
    p.add_argument("--unsafe-bounds", action="store_true")
    p.set_defaults(func=cmd_verify)

    args = top.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemError, floors.InvalidDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BoundsError as exc:
        print(f"bounds error: {exc}", file=sys.stderr)
        return 3
    except BrokenPipeError:
        # Downstream pager/head closed early; not our error.
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except Exception:
        print("internal error:", file=sys.stderr)
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
