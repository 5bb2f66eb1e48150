#!/usr/bin/env python3
"""Run the double-oracle acceptance check for every checker and gate at its
smallest parameters and print one line per construction.

Both oracles must agree candidate by candidate: solvability of the embedding
network, and direct enumeration of the declared information conditions.
"""

import itertools
import time

from pfsnet import families as F
from pfsnet import gadgets as G


def theta_family(b):
    return [{"Z0": F.conditional_switch_z0(t)} for t in itertools.product((0, 1), repeat=b)]


def grid_family(b1, b2):
    grids = [dict(zip(itertools.product(range(b1), range(b2)), bits))
             for bits in itertools.product((0, 1), repeat=b1 * b2)]
    return [{"Z0": F.conditional_switch_z0_grid(g, b1, b2)} for g in grids]


CASES = [
    ("xor checker", G.xor_checker(), F.xor_family(), 2, {}),
    ("xor gate", G.xor_gate(), F.xor_family(), 2, {}),
    ("conditional xor (w=2)", G.cond_xor_checker(2), F.cond_xor_family(), 1, {}),
    ("tristate checker", G.tristate_checker(), F.tristate_family(), 1, {}),
    ("tristate gate", G.tristate_gate(), F.tristate_family(), 1, {}),
    ("bstate b=2", G.bstate_checker(2), F.bstate_family(2), 1, {}),
    ("bstate b=3", G.bstate_checker(3), F.bstate_family(3), 1, {}),
    ("switch gate", G.switch_gate(), F.switch_family(), 1, {}),
    ("cycles k=2", G.cycles_gate(), F.cycles_family(2), 2, {}),
    ("cycles k=3", G.cycles_gate(), F.cycles_family(3), 3, {}),
    ("set checker n=2 {01,10}", G.set_checker(2, [(0, 1), (1, 0)]), F.set_family(2), 1, {}),
    ("virtual equality b=2", G.virtual_equality_checker(), theta_family(2), 1, {"W": 2}),
    ("virtual equality b=3", G.virtual_equality_checker(), theta_family(3), 1, {"W": 3}),
    ("virtual or b=2", G.virtual_or_checker(2), theta_family(2), 1, {}),
    ("virtual or b=3", G.virtual_or_checker(3), theta_family(3), 1, {}),
    ("cond virtual equality (2,2)", G.cond_virtual_equality_checker(2, 2), grid_family(2, 2), 1, {}),
    ("cond virtual or (2,2)", G.cond_virtual_or_checker(2, 2), grid_family(2, 2), 1, {}),
]


def main():
    print(f"{'construction':<30} {'family':>6} {'accepted':>8} {'agree':>6} {'secs':>7}")
    all_ok = True
    for name, gadget, family, k, sizes in CASES:
        t0 = time.time()
        net_acc = G.accepted_set(gadget, family, k, sizes=sizes)
        ent_acc = G.entropy_accepted_set(gadget, family, k, sizes=sizes)

        def key(entry):
            return tuple(sorted((n, tuple(sorted(cf.table.items()))) for n, cf in entry.items()))

        agree = [key(e) for e in net_acc] == [key(e) for e in ent_acc]
        all_ok = all_ok and agree
        print(f"{name:<30} {len(family):>6} {len(net_acc):>8} {str(agree):>6} {time.time() - t0:>7.2f}")
    print("all oracles agree" if all_ok else "DISAGREEMENT FOUND")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
