#!/usr/bin/env python3
"""Export the gadget catalog: one JSON description (ports, declared
conditions, fragment) and one DOT rendering of each fragment."""

import argparse
import json
import pathlib

from pfsnet import gadgets
from pfsnet.model import to_dot


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="catalog", help="output directory")
    args = ap.parse_args()
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    instances = {
        "xor_checker": gadgets.xor_checker(),
        "xor_gate": gadgets.xor_gate(),
        "tristate_checker": gadgets.tristate_checker(),
        "tristate_gate": gadgets.tristate_gate(),
        "bstate2_checker": gadgets.bstate_checker(2),
        "bstate3_checker": gadgets.bstate_checker(3),
        "switch_gate": gadgets.switch_gate(),
        "cond_switch_gate_w2": gadgets.cond_switch_gate(2),
        "set2_checker_onehot": gadgets.set_checker(2, [(1, 0), (0, 1)]),
        "cycles_gate": gadgets.cycles_gate(),
        "virtual_equality_checker": gadgets.virtual_equality_checker(),
        "cond_virtual_equality_2_2": gadgets.cond_virtual_equality_checker(2, 2),
        "virtual_or2_checker": gadgets.virtual_or_checker(2),
        "cond_virtual_or_2_2": gadgets.cond_virtual_or_checker(2, 2),
    }
    for name, g in instances.items():
        doc = gadgets.gadget_to_json(g)
        (outdir / f"{name}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        (outdir / f"{name}.dot").write_text(to_dot(g.fragment_network()))
    print(f"wrote {2 * len(instances)} files to {outdir}/")


if __name__ == "__main__":
    main()
