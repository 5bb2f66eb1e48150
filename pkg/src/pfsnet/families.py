"""Candidate families for acceptance testing of checkers and gates."""

from __future__ import annotations

import itertools
import json
from typing import Mapping, Optional, Sequence

from .gadgets import CandidateFunction
from .model import DEFAULT, fixed


def all_functions(
    output: str,
    inputs: Sequence[tuple],
    size: int,
    input_specs: Optional[Sequence] = None,
) -> list:
    """Every table over the given input alphabets into [0..size)."""
    labels = [name for name, _ in inputs]
    domains = [range(s) for _, s in inputs]
    keys = list(itertools.product(*domains))
    specs = input_specs if input_specs is not None else [fixed(s) for _, s in inputs]
    out = []
    for values in itertools.product(range(size), repeat=len(keys)):
        out.append(
            CandidateFunction(
                output=output,
                inputs=tuple(labels),
                table=dict(zip(keys, values)),
                size=size,
                input_sizes=tuple(specs),
            )
        )
    return out


def xor_family() -> list:
    """All 16 binary functions of (M1, M2), candidates for the parity slot."""
    return all_functions("Y", [("M1", 2), ("M2", 2)], 2)


def cond_xor_family() -> list:
    """All 256 binary functions of (M1, M2, W) with a binary condition W."""
    return all_functions("Y", [("M1", 2), ("M2", 2), ("W", 2)], 2)


def tristate_family() -> list:
    """All 81 functions of two bits into {0,1,2}."""
    return all_functions("Z", [("X", 2), ("Y", 2)], 3)


def bstate_family(b: int) -> list:
    """All functions (X, Y) -> [0..b] with X binary and Y of size b."""
    return all_functions("Z", [("X", 2), ("Y", b)], b + 1)


def switch_family() -> list:
    """All 256 output pairs (Z0, Z1), each a binary function of (M0, M1)."""
    z0s = all_functions("Z0", [("M0", 2), ("M1", 2)], 2)
    z1s = all_functions("Z1", [("M0", 2), ("M1", 2)], 2)
    return [{"Z0": a, "Z1": b} for a in z0s for b in z1s]


def cycles_family(k: int) -> list:
    """All functions (X1, U) -> [0..k) with X1 of size k and U binary."""
    return all_functions(
        "X2", [("X1", k), ("U", 2)], k, input_specs=[DEFAULT, fixed(2)]
    )


def switch_pair(theta: int, eta0: int = 0, eta1: int = 0) -> dict:
    """The output pair realized by a switch in state theta with output flips
    (eta0, eta1): Z0 = M_theta ^ eta0, Z1 = M_(1-theta) ^ eta1."""
    t0 = {(m0, m1): (m1 if theta else m0) ^ eta0 for m0 in (0, 1) for m1 in (0, 1)}
    t1 = {(m0, m1): (m0 if theta else m1) ^ eta1 for m0 in (0, 1) for m1 in (0, 1)}
    return {
        "Z0": CandidateFunction("Z0", ("M0", "M1"), t0, 2),
        "Z1": CandidateFunction("Z1", ("M0", "M1"), t1, 2),
    }


def conditional_switch_z0(theta_by_w: Sequence[int], eta_by_w: Optional[Sequence[int]] = None,
                          w_label: str = "W") -> CandidateFunction:
    """The Z0 output of a conditional switch whose state depends on the select
    value w: Z0 = M_(theta_w) ^ eta_w."""
    b = len(theta_by_w)
    etas = list(eta_by_w) if eta_by_w is not None else [0] * b
    table = {}
    for m0, m1, w in itertools.product((0, 1), (0, 1), range(b)):
        table[(m0, m1, w)] = (m1 if theta_by_w[w] else m0) ^ etas[w]
    return CandidateFunction(
        "Z0", ("M0", "M1", w_label), table, 2, input_sizes=(fixed(2), fixed(2), fixed(b))
    )


def conditional_switch_z0_grid(theta: Mapping, b1: int, b2: int,
                               eta: Optional[Mapping] = None) -> CandidateFunction:
    """Z0 of a conditional switch addressed by a two-part select (W1, W2):
    Z0 = M_(theta[w1, w2]) ^ eta[w1, w2]."""
    table = {}
    for m0, m1, w1, w2 in itertools.product((0, 1), (0, 1), range(b1), range(b2)):
        t = theta[(w1, w2)]
        e = eta[(w1, w2)] if eta else 0
        table[(m0, m1, w1, w2)] = (m1 if t else m0) ^ e
    return CandidateFunction(
        "Z0",
        ("M0", "M1", "W1", "W2"),
        table,
        2,
        input_sizes=(fixed(2), fixed(2), fixed(b1), fixed(b2)),
    )


def set_entry(theta: Sequence[int]) -> dict:
    """Candidate tables for all 2n outputs of a physical array of n switches
    in states theta (no output flips)."""
    entry = {}
    for i, t in enumerate(theta, start=1):
        pair = switch_pair(t)
        entry[f"Z{i}_0"] = CandidateFunction(f"Z{i}_0", ("M0", "M1"), pair["Z0"].table, 2,
                                             input_sizes=(fixed(2), fixed(2)))
        entry[f"Z{i}_1"] = CandidateFunction(f"Z{i}_1", ("M0", "M1"), pair["Z1"].table, 2,
                                             input_sizes=(fixed(2), fixed(2)))
    return entry


def set_family(n: int) -> list:
    return [set_entry(theta) for theta in itertools.product((0, 1), repeat=n)]


def rename_inputs(cf: CandidateFunction, mapping: Mapping[str, str]) -> CandidateFunction:
    """Same function with its input labels renamed (for compositions whose
    message labels differ from the acceptance-test port names)."""
    return CandidateFunction(
        output=cf.output,
        inputs=tuple(mapping.get(lb, lb) for lb in cf.inputs),
        table=cf.table,
        size=cf.size,
        input_sizes=cf.input_sizes,
    )


# --- json interchange --------------------------------------------------------


def candidate_to_json(cf: CandidateFunction) -> dict:
    keys = sorted(cf.table)
    return {
        "output": cf.output,
        "inputs": [
            {"name": lb, "size": None if sz is None else sz.value}
            for lb, sz in zip(cf.inputs, cf.input_sizes)
        ],
        "size": cf.size,
        "keys": [list(k) for k in keys],
        "values": [cf.table[k] for k in keys],
    }


def candidate_from_json(doc: Mapping) -> CandidateFunction:
    inputs = [(d["name"], d["size"]) for d in doc["inputs"]]
    table = {tuple(k): v for k, v in zip(doc["keys"], doc["values"])}
    return CandidateFunction(
        output=doc["output"],
        inputs=tuple(name for name, _ in inputs),
        table=table,
        size=doc["size"],
        input_sizes=tuple(DEFAULT if s is None else fixed(s) for _, s in inputs),
    )


def family_to_json(family: Sequence) -> str:
    out = []
    for entry in family:
        if isinstance(entry, CandidateFunction):
            out.append(candidate_to_json(entry))
        else:
            out.append({name: candidate_to_json(cf) for name, cf in sorted(entry.items())})
    return json.dumps(out, indent=2, sort_keys=True) + "\n"


def family_from_json(text: str) -> list:
    doc = json.loads(text)
    out = []
    for item in doc:
        if "output" in item and "size" in item:
            out.append(candidate_from_json(item))
        else:
            out.append({name: candidate_from_json(sub) for name, sub in item.items()})
    return out
