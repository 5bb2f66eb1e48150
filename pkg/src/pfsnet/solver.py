"""Exact solvability of a network at a given default size k.

The search assigns one encoding table per non-broadcast, non-pinned edge, in
topological order of the tail node (ties by edge id), pruning as soon as a
demand node's inputs are all determined but fail to separate the demanded
messages.  Decoding tables are never searched: a demand is satisfiable exactly
when the separation holds, and the table is then read off the evaluation.

``naive_solve_at_k`` is a deliberately independent oracle that enumerates all
table combinations with no pruning and no symmetry breaking.
"""

from __future__ import annotations

import itertools
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Sequence

from .model import (
    CodingScheme,
    Network,
    ValidationReport,
    resolve_size,
    topo_order,
    validate,
)


class BudgetExhausted(Exception):
    """Search hit its node budget; explicitly not a negative answer."""

    def __init__(self, k: Optional[int] = None):
        super().__init__(f"search budget exhausted{f' at k={k}' if k else ''}")
        self.k = k


class Status(Enum):
    SOLVABLE = "solvable"
    UNSOLVABLE_AT_K = "unsolvable-at-k"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class SolveOptions:
    """pins maps edge id to a fixed row-major encoding table (not searched).
    With deterministic=True the returned witness equals the single-worker,
    lexicographically first one regardless of ``jobs``."""

    pins: Mapping[str, Sequence[int]] = field(default_factory=dict)
    symmetry_breaking: bool = True
    node_budget: Optional[int] = None
    deterministic: bool = True
    jobs: int = 1


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    scheme: Optional[CodingScheme] = None
    searched: int = 0

    @property
    def solvable(self) -> bool:
        return self.status is Status.SOLVABLE


def edge_eval_order(net: Network) -> list:
    """Edges in evaluation order: topological position of tail, then edge id."""
    pos = {v: i for i, v in enumerate(topo_order(net))}
    return sorted(net.edges, key=lambda e: (pos[e.tail], e.id))


def iter_tables(domain: int, size: int, canonical: bool) -> Iterator[tuple]:
    """All functions [domain] -> [size] as row-major tuples, lexicographic.

    With canonical=True, only relabelling representatives are produced: the
    distinct output values first occur in increasing order.
    """
    if not canonical or size == 1 or domain == 0:
        yield from itertools.product(range(size), repeat=domain)
        return
    table = [0] * domain

    def rec(i: int, used: int) -> Iterator[tuple]:
        if i == domain:
            yield tuple(table)
            return
        for v in range(min(used, size - 1) + 1):
            table[i] = v
            yield from rec(i + 1, max(used, v + 1))

    yield from rec(0, 0)


# ---------------------------------------------------------------------------
# straightforward (oracle-grade) evaluation


def _node_index(sizes: Sequence[int], values: Sequence[int]) -> int:
    idx = 0
    for s, v in zip(sizes, values):
        idx = idx * s + v
    return idx


def simulate(net: Network, scheme: CodingScheme) -> Iterator[tuple]:
    """Yield (message_tuple, {edge_id: signal}) for every message tuple."""
    k = scheme.k
    msg_sizes = [resolve_size(m, k) for m in net.messages]
    order = edge_eval_order(net)
    for msg in itertools.product(*(range(s) for s in msg_sizes)):
        signals: dict = {}
        for e in order:
            u = e.tail
            if u in net.broadcast:
                signals[e.id] = signals[net.in_edges(u)[0].id]
            else:
                srcs = sorted(net.source_set(u))
                sizes = [msg_sizes[i - 1] for i in srcs] + [
                    resolve_size(f.size, k) for f in net.in_edges(u)
                ]
                vals = [msg[i - 1] for i in srcs] + [signals[f.id] for f in net.in_edges(u)]
                signals[e.id] = scheme.encodings[e.id][_node_index(sizes, vals)]
        yield msg, signals


def _decode_domain(net: Network, k: int, v: str) -> tuple:
    msg_sizes = [resolve_size(m, k) for m in net.messages]
    return tuple(msg_sizes[i - 1] for i in sorted(net.source_set(v))) + tuple(
        resolve_size(e.size, k) for e in net.in_edges(v)
    )


def derive_decodings(net: Network, k: int, encodings: Mapping[str, Sequence[int]]) -> CodingScheme:
    """Build total decoding tables from the evaluation of the encodings.

    Table entries never exercised by any message tuple are zero-filled.  If
    the encodings do not actually separate some demand, the resulting scheme
    simply fails verify_scheme.
    """
    enc = {e: tuple(t) for e, t in encodings.items()}
    partial = CodingScheme(k=k, encodings=enc, decodings={})
    tables: dict = {}
    for v, want in net.demands.items():
        dom = _decode_domain(net, k, v)
        n = 1
        for s in dom:
            n *= s
        tables[v] = [[0] * len(want) for _ in range(n)]
    for msg, signals in simulate(net, partial):
        for v, want in net.demands.items():
            srcs = sorted(net.source_set(v))
            vals = [msg[i - 1] for i in srcs] + [signals[e.id] for e in net.in_edges(v)]
            idx = _node_index(_decode_domain(net, k, v), vals)
            tables[v][idx] = [msg[i - 1] for i in sorted(want)]
    return CodingScheme(k=k, encodings=enc, decodings={v: tuple(tuple(r) for r in t) for v, t in tables.items()})


def verify_scheme(net: Network, scheme: CodingScheme) -> ValidationReport:
    """Exhaustively evaluate all message tuples and report every violation."""
    bad: list = []
    rep = validate(net)
    if not rep.ok:
        return rep
    k = scheme.k
    if k < 1:
        return ValidationReport(False, (("k-positive", str(k)),))
    forced = {e.id for e in net.edges if e.tail in net.broadcast}
    for v in sorted(net.broadcast):
        if not net.in_edges(v):
            continue
        ins = resolve_size(net.in_edges(v)[0].size, k)
        for e in net.out_edges(v):
            if resolve_size(e.size, k) < ins:
                bad.append(("broadcast-capacity", e.id))
    for e in net.edges:
        if e.id in forced:
            if e.id in scheme.encodings:
                bad.append(("broadcast-table", e.id))
            continue
        table = scheme.encodings.get(e.id)
        if table is None:
            bad.append(("missing-encoding", e.id))
            continue
        u = e.tail
        dom = 1
        for i in sorted(net.source_set(u)):
            dom *= resolve_size(net.messages[i - 1], k)
        for f in net.in_edges(u):
            dom *= resolve_size(f.size, k)
        if len(table) != dom:
            bad.append(("encoding-domain", e.id))
            continue
        size = resolve_size(e.size, k)
        if any(not 0 <= x < size for x in table):
            bad.append(("encoding-range", e.id))
    for v, want in net.demands.items():
        table = scheme.decodings.get(v)
        if table is None:
            bad.append(("missing-decoding", v))
            continue
        dom = 1
        for s in _decode_domain(net, k, v):
            dom *= s
        if len(table) != dom:
            bad.append(("decoding-domain", v))
            continue
        for row in table:
            if len(row) != len(want):
                bad.append(("decoding-width", v))
                break
            for i, x in zip(sorted(want), row):
                if not 0 <= x < resolve_size(net.messages[i - 1], k):
                    bad.append(("decoding-range", v))
                    break
    if bad:
        return ValidationReport(False, tuple(bad))
    failed = set()
    for msg, signals in simulate(net, scheme):
        for v, want in net.demands.items():
            if v in failed:
                continue
            srcs = sorted(net.source_set(v))
            vals = [msg[i - 1] for i in srcs] + [signals[e.id] for e in net.in_edges(v)]
            idx = _node_index(_decode_domain(net, k, v), vals)
            got = scheme.decodings[v][idx]
            actual = tuple(msg[i - 1] for i in sorted(want))
            if tuple(got) != actual:
                failed.add(v)
    for v in sorted(failed):
        bad.append(("decode", v))
    return ValidationReport(not bad, tuple(bad))


# ---------------------------------------------------------------------------
# the search engine


class _BudgetHit(Exception):
    pass


class _Search:
    def __init__(self, net: Network, k: int, opts: SolveOptions, level0: Optional[tuple] = None):
        rep = validate(net)
        if not rep.ok:
            raise ValueError(f"invalid network: {rep.violations}")
        if net.unlimited:
            raise ValueError("network has unlimited edge annotations; canonicalize first")
        if k < 1:
            raise ValueError("k must be >= 1")
        self.net = net
        self.k = k
        self.opts = opts
        self.level0 = level0
        self.msg_sizes = [resolve_size(m, k) for m in net.messages]
        self.tuples = list(itertools.product(*(range(s) for s in self.msg_sizes)))
        self.T = len(self.tuples)
        self.order = edge_eval_order(net)
        self.eidx = {e.id: i for i, e in enumerate(self.order)}
        self.sizes = [resolve_size(e.size, k) for e in self.order]
        self.infeasible = False
        for v in net.broadcast:
            if net.in_edges(v):
                ins = resolve_size(net.in_edges(v)[0].size, k)
                if any(resolve_size(e.size, k) < ins for e in net.out_edges(v)):
                    self.infeasible = True  # forced relay cannot fit at this k
        self.forced = [e.tail in net.broadcast for e in self.order]
        pins = dict(opts.pins)
        for eid, table in pins.items():
            if eid not in self.eidx:
                raise ValueError(f"pin for unknown edge {eid!r}")
            if self.forced[self.eidx[eid]]:
                raise ValueError(f"cannot pin broadcast out-edge {eid!r}")
        self.pinned = {eid: tuple(t) for eid, t in pins.items()}
        # per-edge domain structure
        self.msg_cols: list = []
        self.in_slots: list = []
        self.radices: list = []
        for e in self.order:
            u = e.tail
            srcs = sorted(net.source_set(u))
            ins = net.in_edges(u)
            self.msg_cols.append([i - 1 for i in srcs])
            self.in_slots.append([self.eidx[f.id] for f in ins])
            self.radices.append(
                [self.msg_sizes[i - 1] for i in srcs]
                + [resolve_size(f.size, k) for f in ins]
            )
        for eid, table in self.pinned.items():
            j = self.eidx[eid]
            dom = 1
            for r in self.radices[j]:
                dom *= r
            if len(table) != dom:
                raise ValueError(f"pin for {eid!r} has length {len(table)}, expected {dom}")
            if any(not 0 <= x < self.sizes[j] for x in table):
                raise ValueError(f"pin for {eid!r} out of range")
        # static (message-only) part of each edge's domain index
        self.static_dom: list = []
        self.domain_size: list = []
        for j, e in enumerate(self.order):
            dom = 1
            for r in self.radices[j]:
                dom *= r
            self.domain_size.append(dom)
            cols = self.msg_cols[j]
            msg_radices = self.radices[j][: len(cols)]
            in_radices = self.radices[j][len(cols):]
            w = 1
            for r in in_radices:
                w *= r
            stat = []
            for t in self.tuples:
                stat.append(_node_index(msg_radices, [t[c] for c in cols]) * w)
            self.static_dom.append(stat)
            weights = []
            acc = 1
            for r in reversed(in_radices):
                weights.append(acc)
                acc *= r
            weights.reverse()
            self.in_slots[j] = list(zip(self.in_slots[j], weights))
        # search levels and the propagation plan between them
        self.search_levels: list = []  # indices into self.order
        plan: list = [[]]
        for j, e in enumerate(self.order):
            if self.forced[j] or e.id in self.pinned:
                plan[-1].append(j)
            else:
                self.search_levels.append(j)
                plan.append([])
        self.prelude = plan[0]
        self.plan = plan[1:]
        # demand checks: level after which each demand node is fully determined
        level_of = {}
        for i, j in enumerate(self.search_levels):
            level_of[j] = i
            for jj in self.plan[i]:
                level_of[jj] = i
        for jj in self.prelude:
            level_of[jj] = -1
        self.demand_nodes = sorted(net.demands)
        self.davail: dict = {}
        self.dstat: dict = {}
        self.dproj: dict = {}
        self.checks_at: dict = {}
        for v in self.demand_nodes:
            slots = [self.eidx[e.id] for e in net.in_edges(v)]
            self.davail[v] = slots
            srcs = sorted(net.source_set(v))
            want = sorted(net.demands[v])
            self.dstat[v] = [tuple(t[i - 1] for i in srcs) for t in self.tuples]
            self.dproj[v] = [tuple(t[i - 1] for i in want) for t in self.tuples]
            lvl = max((level_of[s] for s in slots), default=-1)
            self.checks_at.setdefault(lvl, []).append(v)
        self.last_check_level = max(self.checks_at, default=-1)
        # symmetry-breaking eligibility: every consumer of the edge's value,
        # following forced relays, must be free to relabel (no pinned out-edge)
        self.sym: list = []
        for i in self.search_levels:
            ok = opts.symmetry_breaking
            if ok:
                stack = [self.order[i].head]
                seen = set()
                while stack and ok:
                    u = stack.pop()
                    if u in seen:
                        continue
                    seen.add(u)
                    for f in net.out_edges(u):
                        if f.id in self.pinned:
                            ok = False
                            break
                        if u in net.broadcast:
                            stack.append(f.head)
            self.sym.append(ok)
        self.vec: list = [None] * len(self.order)
        self.searched = 0
        self.level0_tried = 0  # position within this worker's level-0 slice

    # -- evaluation ---------------------------------------------------------

    def _dom_vector(self, j: int) -> list:
        out = list(self.static_dom[j])
        for slot, weight in self.in_slots[j]:
            vecj = self.vec[slot]
            for ti in range(self.T):
                out[ti] += vecj[ti] * weight
        return out

    def _compute(self, j: int) -> None:
        if self.forced[j]:
            src = self.in_slots[j][0][0]
            self.vec[j] = self.vec[src]
        else:
            table = self.pinned[self.order[j].id]
            dom = self._dom_vector(j)
            self.vec[j] = [table[d] for d in dom]

    def _check(self, v: str) -> bool:
        stat = self.dstat[v]
        proj = self.dproj[v]
        vecs = [self.vec[s] for s in self.davail[v]]
        seen: dict = {}
        if vecs:
            for ti, dyn in enumerate(zip(*vecs)):
                key = stat[ti] + dyn
                val = proj[ti]
                if seen.setdefault(key, val) != val:
                    return False
        else:
            for ti in range(self.T):
                if seen.setdefault(stat[ti], proj[ti]) != proj[ti]:
                    return False
        return True

    def _zero_fill(self, level: int, assignment: list) -> None:
        for i in range(level, len(self.search_levels)):
            j = self.search_levels[i]
            assignment.append((0,) * self.domain_size[j])
            self.vec[j] = [0] * self.T
            for jj in self.plan[i]:
                self._compute(jj)

    def assignments(self, first_only: bool) -> Iterator[list]:
        """Depth-first over table assignments; yields complete assignments
        (one table per search level) satisfying every demand."""
        if self.infeasible:
            return
        for jj in self.prelude:
            self._compute(jj)
        if not all(self._check(v) for v in self.checks_at.get(-1, [])):
            return
        yield from self._dfs(0, [], first_only)

    def _dfs(self, level: int, assignment: list, first_only: bool) -> Iterator[list]:
        if first_only and level > self.last_check_level:
            full = list(assignment)
            self._zero_fill(level, full)
            self.searched += len(full) - len(assignment)
            yield full
            return
        if level == len(self.search_levels):
            yield list(assignment)
            return
        j = self.search_levels[level]
        dvec = self._dom_vector(j)
        it = iter_tables(self.domain_size[j], self.sizes[j], self.sym[level])
        if level == 0 and self.level0 is not None:
            it = itertools.islice(it, self.level0[0], None, self.level0[1])
        budget = self.opts.node_budget
        for table in it:
            if level == 0:
                self.level0_tried += 1
            self.searched += 1
            if budget is not None and self.searched > budget:
                raise _BudgetHit()
            self.vec[j] = [table[d] for d in dvec]
            for jj in self.plan[level]:
                self._compute(jj)
            if all(self._check(v) for v in self.checks_at.get(level, [])):
                assignment.append(table)
                yield from self._dfs(level + 1, assignment, first_only)
                assignment.pop()

    def scheme_from_assignment(self, assignment: Sequence[tuple]) -> CodingScheme:
        enc = dict(self.pinned)
        for lvl, table in enumerate(assignment):
            enc[self.order[self.search_levels[lvl]].id] = tuple(table)
        return derive_decodings(self.net, self.k, enc)


def _solve_partition(payload) -> tuple:
    net, k, opts, start, step = payload
    search = _Search(net, k, opts, level0=(start, step))
    try:
        for assignment in search.assignments(first_only=True):
            # global position of the witness's level-0 table in the unsliced
            # iteration order; the overall lexicographic first witness is the
            # one minimizing this across workers
            pos = start + (search.level0_tried - 1) * step
            return ("found", pos, assignment, search.searched)
        return ("none", None, None, search.searched)
    except _BudgetHit:
        return ("budget", None, None, search.searched)


def solve_at_k(net: Network, k: int, opts: Optional[SolveOptions] = None) -> SolveOutcome:
    """Decide solvability at a fixed default size k.

    SOLVABLE outcomes carry a witness that has already passed verify_scheme;
    UNSOLVABLE_AT_K means the complete search found nothing at this k (it says
    nothing about other k).
    """
    opts = opts or SolveOptions()
    search = _Search(net, k, opts)
    if opts.jobs > 1 and search.search_levels:
        return _solve_parallel(net, k, opts, search)
    try:
        for assignment in search.assignments(first_only=True):
            scheme = search.scheme_from_assignment(assignment)
            rep = verify_scheme(net, scheme)
            if not rep.ok:
                raise AssertionError(f"internal error: witness failed verification: {rep.violations}")
            return SolveOutcome(Status.SOLVABLE, scheme, search.searched)
        return SolveOutcome(Status.UNSOLVABLE_AT_K, None, search.searched)
    except _BudgetHit:
        return SolveOutcome(Status.BUDGET_EXHAUSTED, None, search.searched)


def _solve_parallel(net: Network, k: int, opts: SolveOptions, probe: _Search) -> SolveOutcome:
    jobs = opts.jobs
    payloads = [(net, k, opts, w, jobs) for w in range(jobs)]
    results: list = [None] * jobs
    searched = 0
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = {pool.submit(_solve_partition, p): i for i, p in enumerate(payloads)}
        if opts.deterministic:
            for fut, i in futures.items():
                results[i] = fut.result()
        else:
            pending = set(futures)
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    results[futures[fut]] = fut.result()
                if any(r and r[0] == "found" for r in results):
                    for fut in pending:
                        fut.cancel()
                    pending = set()
    found = [(r[1], r) for r in results if r and r[0] == "found"]
    searched = sum(r[3] for r in results if r)
    if found:
        _, r = min(found)  # smallest level-0 position = lexicographic first
        scheme = probe.scheme_from_assignment(r[2])
        rep = verify_scheme(net, scheme)
        if not rep.ok:
            raise AssertionError(f"internal error: witness failed verification: {rep.violations}")
        return SolveOutcome(Status.SOLVABLE, scheme, searched)
    if any(r and r[0] == "budget" for r in results):
        return SolveOutcome(Status.BUDGET_EXHAUSTED, None, searched)
    return SolveOutcome(Status.UNSOLVABLE_AT_K, None, searched)


def solve_up_to(net: Network, k_max: int, opts: Optional[SolveOptions] = None) -> Optional[tuple]:
    """Least k <= k_max admitting a scheme, with witness; None if none do.

    Absence of a solution up to k_max is not unsolvability: the sweep is a
    semi-decision.  Networks with no default-size message or edge do not
    depend on k, so only k=1 is tried.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    k_dependent = any(m.is_default for m in net.messages) or any(
        e.size.is_default for e in net.edges
    )
    for k in range(1, (k_max if k_dependent else 1) + 1):
        outcome = solve_at_k(net, k, opts)
        if outcome.status is Status.SOLVABLE:
            return k, outcome.scheme
        if outcome.status is Status.BUDGET_EXHAUSTED:
            raise BudgetExhausted(k)
    return None


def enumerate_solutions(
    net: Network,
    k: int,
    limit: Optional[int] = None,
    opts: Optional[SolveOptions] = None,
) -> list:
    """Up to ``limit`` distinct schemes in deterministic (lexicographic) order.

    By default symmetry breaking is off so that, with limit=None, every scheme
    is produced; pass opts to restrict to relabelling representatives.
    """
    opts = opts or SolveOptions(symmetry_breaking=False)
    search = _Search(net, k, opts)
    out = []
    try:
        for assignment in search.assignments(first_only=False):
            out.append(search.scheme_from_assignment(assignment))
            if limit is not None and len(out) >= limit:
                break
    except _BudgetHit:
        raise BudgetExhausted(k)
    return out


# ---------------------------------------------------------------------------
# the naive enumeration oracle


def naive_solve_at_k(net: Network, k: int, pins: Optional[Mapping[str, Sequence[int]]] = None) -> bool:
    """Oracle mode: enumerate every combination of encoding tables outright
    and test the decoding constraint directly.  No pruning, no symmetry
    breaking, no shared search machinery."""
    rep = validate(net)
    if not rep.ok:
        raise ValueError(f"invalid network: {rep.violations}")
    pins = dict(pins or {})
    msg_sizes = [resolve_size(m, k) for m in net.messages]
    pos = {v: i for i, v in enumerate(topo_order(net))}
    order = sorted(net.edges, key=lambda e: (pos[e.tail], e.id))
    for v in net.broadcast:
        if net.in_edges(v):
            ins = resolve_size(net.in_edges(v)[0].size, k)
            if any(resolve_size(e.size, k) < ins for e in net.out_edges(v)):
                return False
    free = []
    spaces = []
    for e in order:
        if e.tail in net.broadcast or e.id in pins:
            continue
        dom = 1
        for i in sorted(net.source_set(e.tail)):
            dom *= msg_sizes[i - 1]
        for f in net.in_edges(e.tail):
            dom *= resolve_size(f.size, k)
        free.append(e.id)
        spaces.append([tuple(t) for t in itertools.product(range(resolve_size(e.size, k)), repeat=dom)])
    tuples = list(itertools.product(*(range(s) for s in msg_sizes)))
    for combo in itertools.product(*spaces):
        tables = dict(pins)
        tables.update(zip(free, combo))
        maps: dict = {v: {} for v in net.demands}
        ok = True
        for msg in tuples:
            signals: dict = {}
            for e in order:
                u = e.tail
                if u in net.broadcast:
                    signals[e.id] = signals[net.in_edges(u)[0].id]
                    continue
                idx = 0
                for i in sorted(net.source_set(u)):
                    idx = idx * msg_sizes[i - 1] + msg[i - 1]
                for f in net.in_edges(u):
                    idx = idx * resolve_size(f.size, k) + signals[f.id]
                signals[e.id] = tables[e.id][idx]
            for v, want in net.demands.items():
                key = tuple(msg[i - 1] for i in sorted(net.source_set(v)))
                key += tuple(signals[e.id] for e in net.in_edges(v))
                val = tuple(msg[i - 1] for i in sorted(want))
                if maps[v].setdefault(key, val) != val:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False
