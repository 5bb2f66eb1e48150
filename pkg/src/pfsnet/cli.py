"""Command-line front end.

Exit codes: 0 = decided positive as queried, 1 = decided negative,
2 = budget or cap exhausted (explicitly not a negative answer), 3 = input
error.  Every command except export-dot emits a JSON object on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import families, gadgets, indexcoding, tiling
from .model import (
    FormatError,
    InvalidNetwork,
    canonicalize,
    deserialize,
    scheme_to_json_dict,
    serialize,
    to_dot,
    validate,
)
from .solver import BudgetExhausted, SolveOptions, Status, solve_at_k, solve_up_to

OK, NEGATIVE, EXHAUSTED, BAD_INPUT = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_net(path: str):
    return deserialize(_read(path))


def _solve_options(args) -> SolveOptions:
    return SolveOptions(
        symmetry_breaking=not args.no_symmetry,
        node_budget=args.budget,
        deterministic=args.deterministic,
        jobs=args.jobs,
    )


def _add_solver_flags(p) -> None:
    p.add_argument("--budget", type=int, default=None, help="search-node cap")
    p.add_argument("--no-symmetry", action="store_true", help="disable symmetry breaking")
    p.add_argument("--deterministic", action="store_true", help="byte-identical output across runs and worker counts")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for the table search")


def _build_parser() -> _Parser:
    p = _Parser(prog="pfsnet", description="exact tools for partially fixed-size network coding")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="structural validation of a network file")
    sp.add_argument("net")

    sp = sub.add_parser("solve", help="decide solvability at a fixed default size k")
    sp.add_argument("net")
    sp.add_argument("--k", type=int, required=True)
    _add_solver_flags(sp)

    sp = sub.add_parser("sweep", help="try k = 1..k-max (a semi-decision: absence proves nothing beyond k-max)")
    sp.add_argument("net")
    sp.add_argument("--k-max", type=int, required=True, dest="k_max")
    _add_solver_flags(sp)

    sp = sub.add_parser("gadget-build", help="emit a standalone network for a named gadget")
    sp.add_argument("name", choices=sorted(gadgets.catalog()))
    sp.add_argument("--b", type=int, default=None, help="buffer/select arity")
    sp.add_argument("--n", type=int, default=None, help="switch count for set checkers")
    sp.add_argument("--theta", default=None, help="JSON file with allowed state patterns")
    sp.add_argument("--w", type=int, default=None, help="condition alphabet: emit the conditional variant")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("verify-checker", help="accepted candidate set plus double-oracle agreement")
    sp.add_argument("name", choices=sorted(gadgets.catalog()))
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--family", default=None, help="JSON candidate family (default: the full canonical family)")
    sp.add_argument("--b", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--theta", default=None)
    sp.add_argument("--w", type=int, default=None)

    sp = sub.add_parser("reduce", help="compile a torus-coloring condition program into a network")
    sp.add_argument("program")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("torus", help="exhaustive torus-coloring search at a concrete size")
    sp.add_argument("program")
    sp.add_argument("--width", type=int, required=True)
    sp.add_argument("--height", type=int, required=True)
    sp.add_argument("--cap", type=int, default=64, help="max cells searched exhaustively")

    sp = sub.add_parser("index", help="decide an index-coding instance at a fixed k")
    sp.add_argument("instance")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--cap", type=int, default=4096, help="max message tuples")

    sp = sub.add_parser("export-dot", help="graphviz text for a network file")
    sp.add_argument("net")
    return p


# ---------------------------------------------------------------------------
# per-command drivers


def _cmd_validate(args) -> int:
    rep = validate(_load_net(args.net))
    _emit({"command": "validate", "ok": rep.ok, "violations": [list(v) for v in rep.violations]})
    return OK if rep.ok else NEGATIVE


def _cmd_solve(args) -> int:
    net = _load_net(args.net)
    outcome = solve_at_k(net, args.k, _solve_options(args))
    doc = {
        "command": "solve",
        "k": args.k,
        "status": outcome.status.value,
        "witness": scheme_to_json_dict(outcome.scheme) if outcome.scheme else None,
    }
    if not args.deterministic:
        # workers split the search, so the trial count varies with job count
        doc["searched"] = outcome.searched
    _emit(doc)
    return {Status.SOLVABLE: OK, Status.UNSOLVABLE_AT_K: NEGATIVE, Status.BUDGET_EXHAUSTED: EXHAUSTED}[outcome.status]


def _cmd_sweep(args) -> int:
    net = _load_net(args.net)
    note = (
        "absence of a solution up to k-max does not prove unsolvability; "
        "the sweep is a semi-decision"
    )
    try:
        found = solve_up_to(net, args.k_max, _solve_options(args))
    except BudgetExhausted as exc:
        _emit({"command": "sweep", "k_max": args.k_max, "status": "budget-exhausted", "k": exc.k, "note": note})
        return EXHAUSTED
    if found is None:
        _emit({"command": "sweep", "k_max": args.k_max, "found": None, "note": note})
        return NEGATIVE
    k, scheme = found
    _emit({"command": "sweep", "k_max": args.k_max, "found": {"k": k, "witness": scheme_to_json_dict(scheme)}, "note": note})
    return OK


def _load_theta(args, n: int):
    if args.theta is None:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    doc = json.loads(_read(args.theta))
    return [tuple(row) for row in doc]


def _make_gadget(args):
    name = args.name
    if name == "bstate":
        if args.b is None:
            raise _UsageError("bstate needs --b")
        g = gadgets.bstate_checker(args.b)
    elif name == "virtual-or":
        if args.b is None:
            raise _UsageError("virtual-or needs --b")
        g = gadgets.virtual_or_checker(args.b)
    elif name == "set":
        if args.n is None:
            raise _UsageError("set needs --n")
        g = gadgets.set_checker(args.n, _load_theta(args, args.n))
    else:
        g = gadgets.catalog()[name]()
    if args.w is not None:
        g = gadgets.conditionalize(g, args.w)
    return g


def _cmd_gadget_build(args) -> int:
    g = _make_gadget(args)
    messages = {}
    bindings = {}
    for p in g.ports:
        if p.kind is gadgets.PortKind.SIGNAL_OUT:
            continue
        size = p.size
        if size is None:
            if args.b is None:
                raise _UsageError(f"port {p.name} needs --b to fix its alphabet")
            size = args.b
        messages[p.name] = size
        bindings[p.name] = (p.name,)
    comp = gadgets.compose([("g", g, bindings)], messages)
    net = canonicalize(comp.net)
    _write(args.output, serialize(net))
    if args.output not in (None, "-"):
        _emit({
            "command": "gadget-build", "name": g.name, "output": args.output,
            "nodes": len(net.nodes), "edges": len(net.edges),
            "ports": [{"name": p.name, "kind": p.kind.value} for p in g.ports],
        })
    return OK


def _default_family(args, k: int):
    name = args.name
    if name in ("xor", "xor-gate"):
        return families.cond_xor_family() if args.w else families.xor_family()
    if name in ("tristate", "tristate-gate"):
        return families.tristate_family()
    if name == "bstate":
        return families.bstate_family(args.b)
    if name == "switch":
        return families.switch_family()
    if name == "cycles":
        return families.cycles_family(k)
    if name == "set":
        return families.set_family(args.n)
    if name in ("virtual-eq", "virtual-or"):
        import itertools as it

        b = args.b or 2
        return [{"Z0": families.conditional_switch_z0(t)} for t in it.product((0, 1), repeat=b)]
    raise _UsageError(f"no default candidate family for {name}")


def _cmd_verify_checker(args) -> int:
    g = _make_gadget(args)
    if args.family:
        family = families.family_from_json(_read(args.family))
    else:
        family = _default_family(args, args.k)
    sizes = {}
    if args.name == "virtual-eq":
        sizes["W"] = args.b or 2
    net_acc = gadgets.accepted_set(g, family, args.k, sizes=sizes)
    ent_acc = gadgets.entropy_accepted_set(g, family, args.k, sizes=sizes)

    def key(entry):
        return tuple(sorted((name, tuple(sorted(cf.table.items()))) for name, cf in entry.items()))

    net_keys = [key(e) for e in net_acc]
    agreement = net_keys == [key(e) for e in ent_acc]
    norm = gadgets._normalize_family(g, family)
    accepted_idx = [i for i, e in enumerate(norm) if key(e) in set(net_keys)]
    _emit({
        "command": "verify-checker",
        "name": g.name,
        "k": args.k,
        "family_size": len(family),
        "accepted": len(net_acc),
        "accepted_indices": accepted_idx,
        "accepted_candidates": [
            {name: families.candidate_to_json(cf) for name, cf in sorted(e.items())}
            for e in net_acc
        ],
        "double_oracle_agreement": agreement,
    })
    return OK if agreement else NEGATIVE


def _cmd_reduce(args) -> int:
    program = tiling.program_from_json(_read(args.program))
    net = tiling.reduce(program)
    _write(args.output, serialize(net))
    if args.output not in (None, "-"):
        switches = {v.split("/")[0] for v in net.nodes if v.startswith("sw")}
        _emit({
            "command": "reduce", "colors": program.n_colors,
            "switches": len(switches), "nodes": len(net.nodes), "edges": len(net.edges),
            "output": args.output,
        })
    return OK


def _cmd_torus(args) -> int:
    program = tiling.program_from_json(_read(args.program))
    try:
        witness = tiling.torus_bruteforce(program, args.width, args.height, cap=args.cap)
    except tiling.CapExceeded as exc:
        _emit({"command": "torus", "status": "cap-exceeded", "detail": str(exc)})
        return EXHAUSTED
    doc = {
        "command": "torus",
        "width": args.width,
        "height": args.height,
        "satisfiable_at_size": witness is not None,
        "witness": [list(r) for r in witness.grid] if witness else None,
    }
    _emit(doc)
    return OK if witness is not None else NEGATIVE


def _cmd_index(args) -> int:
    inst = indexcoding.instance_from_json(_read(args.instance))
    try:
        ok, f = indexcoding.solvable_at_k(inst, args.k, cap=args.cap)
    except indexcoding.CapExceeded as exc:
        _emit({"command": "index", "status": "cap-exceeded", "detail": str(exc)})
        return EXHAUSTED
    doc = {
        "command": "index",
        "k": args.k,
        "bound": inst.output_bound(args.k),
        "solvable": ok,
        "witness": None
        if f is None
        else {"keys": [list(v) for v in sorted(f)], "values": [f[v] for v in sorted(f)]},
    }
    _emit(doc)
    return OK if ok else NEGATIVE


def _cmd_export_dot(args) -> int:
    sys.stdout.write(to_dot(_load_net(args.net)))
    return OK


_DRIVERS = {
    "validate": _cmd_validate,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "gadget-build": _cmd_gadget_build,
    "verify-checker": _cmd_verify_checker,
    "reduce": _cmd_reduce,
    "torus": _cmd_torus,
    "index": _cmd_index,
    "export-dot": _cmd_export_dot,
}


def run(argv=None) -> int:
    """Parse arguments, dispatch, and return the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _DRIVERS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except (FormatError, InvalidNetwork, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
