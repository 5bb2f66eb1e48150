"""Index coding with partially fixed message sizes, decided exactly at a given
default size k via confusion-graph coloring.

A server broadcasts one symbol X = f(M1..Ml) with |X| <= a * k^b; client j
knows M_{A_j} and must decode M_{B_j} from (X, M_{A_j}).  Two message tuples
*confuse* some client when they agree on the client's side information but
disagree on its demand; valid encodings are exactly the proper colorings of
the confusion graph with at most a * k^b colors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Mapping, Optional

from .model import DEFAULT, FormatError, fixed, resolve_size


class CapExceeded(Exception):
    """The resolved tuple space exceeds the configured cap."""


@dataclass(frozen=True)
class Client:
    has: frozenset
    wants: frozenset

    def __post_init__(self):
        object.__setattr__(self, "has", frozenset(self.has))
        # a client never needs to demand a message it holds
        object.__setattr__(self, "wants", frozenset(self.wants) - self.has)


@dataclass(frozen=True)
class IndexInstance:
    messages: tuple
    a: int
    b: int
    clients: tuple

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(self.messages))
        object.__setattr__(self, "clients", tuple(self.clients))
        if self.a < 1 or self.b < 0:
            raise ValueError("output bound needs a >= 1 and b >= 0")
        l = len(self.messages)
        for c in self.clients:
            for i in c.has | c.wants:
                if not 1 <= i <= l:
                    raise ValueError(f"message index {i} out of range [1..{l}]")

    def output_bound(self, k: int) -> int:
        return self.a * k**self.b


@dataclass(frozen=True)
class ConfusionGraph:
    vertices: tuple  # message tuples
    adjacency: tuple  # index-based neighbor frozensets

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2


def confusion_graph(inst: IndexInstance, k: int, cap: int = 4096) -> ConfusionGraph:
    """Graph on message tuples with an edge wherever some client would confuse
    the two tuples: same side information, different demand."""
    sizes = [resolve_size(m, k) for m in inst.messages]
    total = 1
    for s in sizes:
        total *= s
    if total > cap:
        raise CapExceeded(f"{total} message tuples exceed cap of {cap}")
    vertices = list(itertools.product(*(range(s) for s in sizes)))
    index = {v: i for i, v in enumerate(vertices)}
    adj: list = [set() for _ in vertices]
    clients = [
        (sorted(c.has), sorted(c.wants)) for c in inst.clients if c.wants
    ]
    for has, wants in clients:
        groups: dict = {}
        for v in vertices:
            groups.setdefault(tuple(v[i - 1] for i in has), []).append(v)
        for group in groups.values():
            for va, vb in itertools.combinations(group, 2):
                if any(va[i - 1] != vb[i - 1] for i in wants):
                    ia, ib = index[va], index[vb]
                    adj[ia].add(ib)
                    adj[ib].add(ia)
    return ConfusionGraph(tuple(vertices), tuple(frozenset(s) for s in adj))


def chromatic_leq(graph: ConfusionGraph, m: int) -> Optional[dict]:
    """Exact decision chi(G) <= m by backtracking; returns a proper coloring
    (vertex tuple -> color < m) when one exists, else None.

    Vertices are tried by descending degree; a greedy clique is pre-colored
    and new colors are introduced in increasing order, both of which only
    break color symmetries.
    """
    if m < 0:
        raise ValueError("color budget must be >= 0")
    n = graph.n
    if n == 0:
        return {}
    order = sorted(range(n), key=lambda i: (-len(graph.adjacency[i]), i))
    clique = []
    for i in order:
        if all(j in graph.adjacency[i] for j in clique):
            clique.append(i)
    if len(clique) > m:
        return None
    color = [-1] * n
    for c, i in enumerate(clique):
        color[i] = c
    rest = [i for i in order if i not in set(clique)]
    pos_used = len(clique)

    def dfs(idx: int, used: int) -> bool:
        if idx == len(rest):
            return True
        i = rest[idx]
        taken = {color[j] for j in graph.adjacency[i] if color[j] >= 0}
        top = min(used + 1, m)
        for c in range(top):
            if c in taken:
                continue
            color[i] = c
            if dfs(idx + 1, max(used, c + 1)):
                return True
        color[i] = -1
        return False

    if not dfs(0, pos_used):
        return None
    return {v: color[i] for i, v in enumerate(graph.vertices)}


def solvable_at_k(inst: IndexInstance, k: int, cap: int = 4096) -> tuple:
    """Exact decision at default size k; returns (solvable, f) where f maps
    each message tuple to an output symbol and has been verified by direct
    simulation of every client."""
    graph = confusion_graph(inst, k, cap=cap)
    coloring = chromatic_leq(graph, inst.output_bound(k))
    if coloring is None:
        return False, None
    f = dict(coloring)
    for c in inst.clients:
        seen: dict = {}
        for v in graph.vertices:
            key = (f[v],) + tuple(v[i - 1] for i in sorted(c.has))
            val = tuple(v[i - 1] for i in sorted(c.wants))
            if seen.setdefault(key, val) != val:
                raise AssertionError("internal error: coloring does not decode")
    return True, f


def brute_force_solvable(inst: IndexInstance, k: int) -> bool:
    """Independent oracle: enumerate every encoding table f outright."""
    sizes = [resolve_size(m, k) for m in inst.messages]
    vertices = list(itertools.product(*(range(s) for s in sizes)))
    m = inst.output_bound(k)
    clients = [(sorted(c.has), sorted(c.wants)) for c in inst.clients if c.wants]
    for values in itertools.product(range(m), repeat=len(vertices)):
        f = dict(zip(vertices, values))
        ok = True
        for has, wants in clients:
            seen: dict = {}
            for v in vertices:
                key = (f[v],) + tuple(v[i - 1] for i in has)
                val = tuple(v[i - 1] for i in wants)
                if seen.setdefault(key, val) != val:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# json format


def instance_to_json(inst: IndexInstance) -> str:
    return json.dumps(
        {
            "messages": [m.value for m in inst.messages],
            "a": inst.a,
            "b": inst.b,
            "clients": [
                {"has": sorted(c.has), "wants": sorted(c.wants)} for c in inst.clients
            ],
        },
        indent=2,
        sort_keys=True,
    ) + "\n"


def instance_from_json(text: str) -> IndexInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, col {exc.colno}: {exc.msg}") from exc
    for key in ("messages", "a", "b", "clients"):
        if key not in doc:
            raise FormatError(f"instance: missing field {key!r}")
    messages = []
    for i, m in enumerate(doc["messages"]):
        if m is None:
            messages.append(DEFAULT)
        elif isinstance(m, int) and not isinstance(m, bool) and m >= 1:
            messages.append(fixed(m))
        else:
            raise FormatError(f"messages[{i}]: size must be >=1 or null(default)")
    clients = []
    for i, c in enumerate(doc["clients"]):
        if not isinstance(c, dict) or "has" not in c or "wants" not in c:
            raise FormatError(f"clients[{i}]: expected object with 'has' and 'wants'")
        clients.append(Client(frozenset(c["has"]), frozenset(c["wants"])))
    try:
        return IndexInstance(tuple(messages), doc["a"], doc["b"], tuple(clients))
    except (ValueError, TypeError) as exc:
        raise FormatError(str(exc)) from exc
