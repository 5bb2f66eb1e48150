"""Network model: directed acyclic multigraphs whose messages and edges carry
either a fixed alphabet size or the shared default size k.

A node may hold source messages (``sources``), demand messages (``demands``),
and may be flagged *broadcast*: a broadcast node has exactly one in-edge and
forwards its input verbatim on every out-edge, so its out-edges carry no
encoding tables of their own.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional


class FormatError(ValueError):
    """A serialized document could not be parsed into a model object."""


class InvalidNetwork(ValueError):
    """An operation was applied to a network that fails validation."""


# ---------------------------------------------------------------------------
# size specs


@dataclass(frozen=True)
class SizeSpec:
    """Alphabet size: a fixed integer, or None meaning the default size k."""

    value: Optional[int] = None

    def __post_init__(self) -> None:
        if self.value is not None and self.value < 1:
            raise ValueError(f"fixed size must be >= 1, got {self.value}")

    @property
    def is_default(self) -> bool:
        return self.value is None

    def resolve(self, k: int) -> int:
        return k if self.value is None else self.value

    def __repr__(self) -> str:
        return "k" if self.value is None else str(self.value)


DEFAULT = SizeSpec(None)


def fixed(n: int) -> SizeSpec:
    return SizeSpec(n)


def resolve_size(spec: SizeSpec, k: int) -> int:
    """Resolve a size spec at default size k (fixed sizes ignore k)."""
    if k < 1:
        raise ValueError(f"default size k must be >= 1, got {k}")
    return spec.resolve(k)


def size_from_json(raw: object, where: str) -> SizeSpec:
    if raw is None:
        return DEFAULT
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise FormatError(f"{where}: size must be int or null, got {raw!r}")
    if raw < 1:
        raise FormatError(f"{where}: size must be >=1 or null(default), got {raw}")
    return SizeSpec(raw)


# ---------------------------------------------------------------------------
# networks


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    size: SizeSpec


def _freeze_index_map(raw: Mapping[str, Iterable[int]]) -> dict:
    out = {}
    for node, idxs in raw.items():
        s = frozenset(int(i) for i in idxs)
        if s:
            out[node] = s
    return out


@dataclass(frozen=True)
class Network:
    """Immutable network.  Messages are 1-indexed; ``sources[v]``/``demands[v]``
    are sets of message indices.  Parallel edges are allowed (canonicalize
    removes them).  ``unlimited`` is a constructor-level annotation naming
    edges whose size is "large enough for anything"; canonicalize materializes
    them into sized bundles.
    """

    nodes: tuple
    edges: tuple
    messages: tuple
    sources: Mapping[str, frozenset]
    demands: Mapping[str, frozenset]
    broadcast: frozenset = frozenset()
    unlimited: frozenset = frozenset()

    _in: dict = field(init=False, repr=False, compare=False)
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "messages", tuple(self.messages))
        object.__setattr__(self, "sources", _freeze_index_map(self.sources))
        object.__setattr__(self, "demands", _freeze_index_map(self.demands))
        object.__setattr__(self, "broadcast", frozenset(self.broadcast))
        object.__setattr__(self, "unlimited", frozenset(self.unlimited))
        inn: dict = {v: [] for v in self.nodes}
        out: dict = {v: [] for v in self.nodes}
        for e in self.edges:
            if e.head in inn:
                inn[e.head].append(e)
            if e.tail in out:
                out[e.tail].append(e)
        for v in self.nodes:
            inn[v].sort(key=lambda e: e.id)
            out[v].sort(key=lambda e: e.id)
        object.__setattr__(self, "_in", inn)
        object.__setattr__(self, "_out", out)

    # -- structure queries -------------------------------------------------

    def in_edges(self, v: str) -> list:
        return self._in[v]

    def out_edges(self, v: str) -> list:
        return self._out[v]

    def source_set(self, v: str) -> frozenset:
        return self.sources.get(v, frozenset())

    def demand_set(self, v: str) -> frozenset:
        return self.demands.get(v, frozenset())

    def edge_by_id(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)

    @property
    def n_messages(self) -> int:
        return len(self.messages)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def __bool__(self) -> bool:
        return self.ok


def _make_report(violations: list) -> ValidationReport:
    return ValidationReport(ok=not violations, violations=tuple(violations))


def validate(net: Network) -> ValidationReport:
    """Check structural invariants; returns a report instead of raising."""
    bad: list = []
    nodeset = set(net.nodes)
    if len(nodeset) != len(net.nodes):
        bad.append(("node-id-duplicate", ""))
    ids = [e.id for e in net.edges]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        bad.append(("edge-id-duplicate", ",".join(dup)))
    for e in net.edges:
        if e.tail not in nodeset or e.head not in nodeset:
            bad.append(("endpoint", e.id))
        if e.tail == e.head:
            bad.append(("cycle", e.id))
    l = net.n_messages
    for label, mapping in (("sources", net.sources), ("demands", net.demands)):
        for v, idxs in mapping.items():
            if v not in nodeset:
                bad.append((f"{label}-node", v))
            for i in idxs:
                if not 1 <= i <= l:
                    bad.append(("message-index", f"{label}[{v}]={i}"))
    for eid in net.unlimited:
        if eid not in set(ids):
            bad.append(("unlimited-unknown", eid))
    # acyclicity via Kahn on the (possibly multi-) graph
    if not any(rule == "endpoint" or rule == "cycle" for rule, _ in bad):
        indeg = {v: 0 for v in net.nodes}
        for e in net.edges:
            indeg[e.head] += 1
        queue = [v for v in net.nodes if indeg[v] == 0]
        seen = 0
        while queue:
            v = queue.pop()
            seen += 1
            for e in net.out_edges(v):
                indeg[e.head] -= 1
                if indeg[e.head] == 0:
                    queue.append(e.head)
        if seen != len(net.nodes):
            bad.append(("cycle", ",".join(sorted(v for v in net.nodes if indeg[v] > 0))))
    for v in sorted(net.broadcast):
        if v not in nodeset:
            bad.append(("broadcast-node", v))
            continue
        if len(net.in_edges(v)) != 1 or net.source_set(v) or net.demand_set(v):
            bad.append(("broadcast-shape", v))
        else:
            ein = net.in_edges(v)[0].size
            for e in net.out_edges(v):
                if not ein.is_default and not e.size.is_default and e.size.value < ein.value:
                    bad.append(("broadcast-capacity", e.id))
    for v, want in net.demands.items():
        if v in nodeset and want and not net.in_edges(v) and not want <= net.source_set(v):
            bad.append(("demand-unfed", v))
    return _make_report(bad)


def topo_order(net: Network) -> tuple:
    """Deterministic topological order (ties broken by node id)."""
    import heapq

    indeg = {v: 0 for v in net.nodes}
    for e in net.edges:
        if e.head not in indeg or e.tail not in indeg:
            raise InvalidNetwork(f"endpoint not declared: {e.id}")
        indeg[e.head] += 1
    heap = [v for v in net.nodes if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for e in net.out_edges(v):
            indeg[e.head] -= 1
            if indeg[e.head] == 0:
                heapq.heappush(heap, e.head)
    if len(order) != len(net.nodes):
        raise InvalidNetwork("cycle in edge relation")
    return tuple(order)


# ---------------------------------------------------------------------------
# canonicalize: materialize unlimited edges, then split parallel edges


def _bundle_specs(net: Network) -> list:
    """Sized bundle standing in for one unlimited edge: one fixed edge holding
    the product of all fixed message sizes, plus one default edge per
    default-size message."""
    prod = 1
    defaults = 0
    for m in net.messages:
        if m.is_default:
            defaults += 1
        else:
            prod *= m.value
    return [SizeSpec(prod)] + [DEFAULT] * defaults


def canonicalize(net: Network) -> Network:
    """Return an equivalent simple network: unlimited edges become sized
    bundles routed through relay nodes, and parallel edges are split with one
    relay each.  Solvability at every k is preserved."""
    rep = validate(net)
    if not rep.ok:
        raise InvalidNetwork(f"cannot canonicalize invalid network: {rep.violations}")
    nodes = list(net.nodes)
    broadcast = set(net.broadcast)
    sources = {v: set(s) for v, s in net.sources.items()}
    demands = {v: set(s) for v, s in net.demands.items()}
    edges: list = []
    bundle = _bundle_specs(net)
    for e in net.edges:
        if e.id not in net.unlimited:
            edges.append(e)
            continue
        tail = e.tail
        if e.tail in broadcast:
            # a broadcast node must forward its input verbatim, so give it a
            # single out-edge of matching spec and split behind a hub node
            ein = net.in_edges(e.tail)[0].size
            hub = f"{e.id}~hub"
            nodes.append(hub)
            edges.append(Edge(f"{e.id}~h", e.tail, hub, ein))
            tail = hub
        for i, spec in enumerate(bundle):
            relay = f"{e.id}~b{i}"
            nodes.append(relay)
            broadcast.add(relay)
            edges.append(Edge(f"{e.id}~b{i}i", tail, relay, spec))
            edges.append(Edge(f"{e.id}~b{i}o", relay, e.head, spec))
    groups: dict = {}
    for e in edges:
        groups.setdefault((e.tail, e.head), []).append(e)
    final: list = []
    for e in edges:
        if len(groups[(e.tail, e.head)]) == 1:
            final.append(e)
            continue
        relay = f"{e.id}~relay"
        nodes.append(relay)
        broadcast.add(relay)
        final.append(Edge(f"{e.id}~in", e.tail, relay, e.size))
        final.append(Edge(f"{e.id}~out", relay, e.head, e.size))
    return Network(
        nodes=tuple(nodes),
        edges=tuple(final),
        messages=net.messages,
        sources=sources,
        demands=demands,
        broadcast=frozenset(broadcast),
        unlimited=frozenset(),
    )


# ---------------------------------------------------------------------------
# serialization (json) and graphviz export


def to_json_dict(net: Network) -> dict:
    if net.unlimited:
        raise ValueError("cannot serialize a network with unlimited edge annotations; canonicalize first")
    return {
        "version": 1,
        "nodes": [{"id": v, "broadcast": v in net.broadcast} for v in sorted(net.nodes)],
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head, "size": e.size.value}
            for e in sorted(net.edges, key=lambda e: e.id)
        ],
        "messages": [m.value for m in net.messages],
        "sources": {v: sorted(net.sources[v]) for v in sorted(net.sources)},
        "demands": {v: sorted(net.demands[v]) for v in sorted(net.demands)},
    }


def serialize(net: Network) -> str:
    """Canonical JSON text; stable byte-for-byte for a given network."""
    rep = validate(net)
    if not rep.ok:
        raise InvalidNetwork(f"cannot serialize invalid network: {rep.violations}")
    return json.dumps(to_json_dict(net), indent=2, sort_keys=True) + "\n"


def _require(doc: Mapping, key: str, where: str = "document") -> object:
    if key not in doc:
        raise FormatError(f"{where}: missing field {key!r}")
    return doc[key]


def deserialize(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, col {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise FormatError("document: expected a JSON object")
    version = _require(doc, "version")
    if version != 1:
        raise FormatError(f"version: unsupported {version!r}")
    raw_nodes = _require(doc, "nodes")
    nodes, broadcast = [], set()
    for i, nd in enumerate(raw_nodes):
        where = f"nodes[{i}]"
        if not isinstance(nd, dict):
            raise FormatError(f"{where}: expected an object")
        nid = _require(nd, "id", where)
        if not isinstance(nid, str):
            raise FormatError(f"{where}.id: expected string")
        nodes.append(nid)
        if _require(nd, "broadcast", where):
            broadcast.add(nid)
    edges = []
    for i, ed in enumerate(_require(doc, "edges")):
        where = f"edges[{i}]"
        if not isinstance(ed, dict):
            raise FormatError(f"{where}: expected an object")
        edges.append(
            Edge(
                id=str(_require(ed, "id", where)),
                tail=str(_require(ed, "tail", where)),
                head=str(_require(ed, "head", where)),
                size=size_from_json(_require(ed, "size", where), where),
            )
        )
    messages = [size_from_json(m, f"messages[{i}]") for i, m in enumerate(_require(doc, "messages"))]
    def load_map(key: str) -> dict:
        raw = _require(doc, key)
        if not isinstance(raw, dict):
            raise FormatError(f"{key}: expected an object")
        out = {}
        for v, idxs in raw.items():
            if not isinstance(idxs, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in idxs):
                raise FormatError(f"{key}[{v}]: expected a list of ints")
            out[v] = idxs
        return out
    return Network(
        nodes=tuple(nodes),
        edges=tuple(edges),
        messages=tuple(messages),
        sources=load_map("sources"),
        demands=load_map("demands"),
        broadcast=frozenset(broadcast),
    )


def to_dot(net: Network) -> str:
    """Graphviz text: edge labels show sizes ("k" for default), broadcast
    nodes rendered filled.  Output is deterministic."""
    rep = validate(net)
    if not rep.ok:
        raise InvalidNetwork(f"cannot export invalid network: {rep.violations}")
    lines = ["digraph net {"]
    for v in sorted(net.nodes):
        attrs = []
        if v in net.broadcast:
            attrs.append("style=filled")
            attrs.append("fillcolor=black")
            attrs.append("shape=point")
        src = net.source_set(v)
        dem = net.demand_set(v)
        label = v
        if src:
            label += "\\nA=" + ",".join(str(i) for i in sorted(src))
        if dem:
            label += "\\nB=" + ",".join(str(i) for i in sorted(dem))
        if label != v:
            attrs.append(f'label="{label}"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f'  "{v}"{suffix};')
    for e in sorted(net.edges, key=lambda e: e.id):
        size = "k" if e.size.is_default else str(e.size.value)
        if e.id in net.unlimited:
            size = "unlimited"
        lines.append(f'  "{e.tail}" -> "{e.head}" [label="{size}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# coding schemes


@dataclass(frozen=True)
class CodingScheme:
    """A default size k plus one encoding table per non-broadcast edge and one
    decoding table per demand node.

    Table domains are row-major over (source messages ascending, in-edges by
    edge id), with the last coordinate varying fastest.  Broadcast out-edges
    carry no table: they forward their node's input verbatim.
    """

    k: int
    encodings: Mapping[str, tuple]
    decodings: Mapping[str, tuple]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "encodings", {e: tuple(t) for e, t in self.encodings.items()}
        )
        object.__setattr__(
            self,
            "decodings",
            {v: tuple(tuple(row) for row in t) for v, t in self.decodings.items()},
        )


def scheme_to_json_dict(scheme: CodingScheme) -> dict:
    return {
        "k": scheme.k,
        "encodings": {e: list(t) for e, t in sorted(scheme.encodings.items())},
        "decodings": {v: [list(r) for r in t] for v, t in sorted(scheme.decodings.items())},
    }


def scheme_from_json_dict(doc: Mapping) -> CodingScheme:
    k = _require(doc, "k", "scheme")
    if not isinstance(k, int) or k < 1:
        raise FormatError("scheme.k: expected positive int")
    enc = _require(doc, "encodings", "scheme")
    dec = _require(doc, "decodings", "scheme")
    return CodingScheme(
        k=k,
        encodings={e: tuple(t) for e, t in enc.items()},
        decodings={v: tuple(tuple(r) for r in t) for v, t in dec.items()},
    )
