"""Checker and gate constructions, composition, and acceptance testing.

A *checker* is a network fragment with typed input ports and no outputs; it is
solvable exactly when the joint distribution of its inputs satisfies a
declared list of information conditions (up to relabelling of each input).  A
*gate* additionally produces output signals that any solution must force to
satisfy the conditions.

Fragments are synthesized from the condition lists by two rules: a condition
"targets are determined by S" becomes a demand node receiving S, and an
existential internal signal becomes a sized edge out of a node receiving its
inputs.  Every constructed gadget therefore has two independent acceptance
oracles: solvability of the composed network (``accepted_set``) and direct
enumeration over the declared conditions (``entropy_accepted_set``); the two
must agree candidate by candidate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import entropy
from .model import DEFAULT, Edge, Network, SizeSpec, fixed, resolve_size
from .solver import SolveOptions, solve_at_k


class ComposeError(ValueError):
    pass


class PortKind(Enum):
    MESSAGE_IN = "message-in"
    SIGNAL_IN = "signal-in"
    SIGNAL_OUT = "signal-out"
    CONDITION_IN = "condition-in"


@dataclass(frozen=True)
class Port:
    name: str
    kind: PortKind
    size: Optional[SizeSpec]  # None: any message tuple may bind


@dataclass(frozen=True)
class DerivedVar:
    """A variable defined by an explicit table over other variables (used to
    state conditions like "determined given Z0 and the parity of M0,M1")."""

    name: str
    inputs: tuple
    size: int
    table: Mapping[tuple, int]


@dataclass(frozen=True)
class ExistentialVar:
    """An internal signal the acceptance test may choose freely: any function
    of ``inputs`` into [0..size)."""

    name: str
    inputs: tuple
    size: int


@dataclass(frozen=True)
class ConditionSpec:
    conditions: tuple
    existentials: tuple = ()
    derived: tuple = ()
    slice_on: tuple = ()  # check all conditions on every slice of these ports
    size_bounds: tuple = ()  # (var name, SizeSpec) support-size bounds


@dataclass(frozen=True)
class Gadget:
    name: str
    ports: tuple
    nodes: tuple  # (node id, broadcast flag)
    edges: tuple  # Edge with fragment-local ids
    node_ports: Mapping[str, tuple]  # node -> message-like port names fed into A
    demand_ports: Mapping[str, tuple]  # node -> demanded message port names
    sig_in: Mapping[str, str]  # SIGNAL_IN port -> distributor node
    sig_out: Mapping[str, tuple]  # SIGNAL_OUT port -> (edge id, distributor node)
    cond_targets: tuple  # nodes that receive condition signals when bound
    spec: ConditionSpec
    condition_wiring: tuple = ()  # ports wired to every cond_target when bound

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(f"{self.name}: no port {name!r}")

    @property
    def is_checker(self) -> bool:
        return all(p.kind is not PortKind.SIGNAL_OUT for p in self.ports)

    def message_ports(self) -> list:
        return [p for p in self.ports if p.kind is PortKind.MESSAGE_IN]

    def fragment_network(self) -> Network:
        """The fragment as a standalone network with one placeholder message
        per message port (unbound signal inputs appear as floating nodes)."""
        mports = self.message_ports()
        index = {p.name: i for i, p in enumerate(mports, start=1)}
        messages = tuple((p.size or DEFAULT) for p in mports)
        sources = {
            v: {index[name] for name in names if name in index}
            for v, names in self.node_ports.items()
        }
        demands = {
            v: {index[name] for name in names} for v, names in self.demand_ports.items()
        }
        broadcast = {v for v, bc in self.nodes if bc}
        return Network(
            nodes=tuple(v for v, _ in self.nodes),
            edges=self.edges,
            messages=messages,
            sources=sources,
            demands=demands,
            broadcast=frozenset(broadcast),
        )


# ---------------------------------------------------------------------------
# fragment builder


@dataclass(frozen=True)
class _Sig:
    edge: str
    dist: str
    size: SizeSpec


class _Builder:
    def __init__(self, name: str):
        self.name = name
        self.ports: list = []
        self.nodes: list = []  # (id, broadcast)
        self.edges: list = []
        self.node_ports: dict = {}
        self.demand_ports: dict = {}
        self.sig_in: dict = {}
        self.sig_out: dict = {}
        self.cond_targets: list = []
        self._n = 0

    def _tag(self) -> str:
        tag = f"{self._n:02d}"
        self._n += 1
        return tag

    def message_in(self, name: str, size) -> str:
        spec = None if size is None else (size if isinstance(size, SizeSpec) else fixed(size))
        self.ports.append(Port(name, PortKind.MESSAGE_IN, spec))
        return name

    def signal_in(self, name: str, size) -> _Sig:
        spec = size if isinstance(size, SizeSpec) else fixed(size)
        self.ports.append(Port(name, PortKind.SIGNAL_IN, spec))
        dist = f"{name}.bc"
        self.nodes.append((dist, False))  # becomes a broadcast relay once fed
        self.sig_in[name] = dist
        return _Sig("", dist, spec)

    def _producer(self, label: str, inputs: Sequence, size, out_port: Optional[str]) -> _Sig:
        spec = size if isinstance(size, SizeSpec) else fixed(size)
        tag = self._tag()
        node = f"{tag}.{label}"
        dist = f"{node}.bc"
        eid = f"{tag}.{label}.e"
        self.nodes.append((node, False))
        self.nodes.append((dist, True))
        self.cond_targets.append(node)
        self.edges.append(Edge(eid, node, dist, spec))
        self._feed(node, inputs)
        sig = _Sig(eid, dist, spec)
        if out_port is not None:
            self.ports.append(Port(out_port, PortKind.SIGNAL_OUT, spec))
            self.sig_out[out_port] = (eid, dist)
        return sig

    def internal(self, label: str, inputs: Sequence, size) -> _Sig:
        return self._producer(label, inputs, size, None)

    def output(self, port: str, inputs: Sequence, size) -> _Sig:
        return self._producer(port, inputs, size, port)

    def demand(self, label: str, targets: Sequence[str], given: Sequence) -> None:
        tag = self._tag()
        node = f"{tag}.{label}"
        self.nodes.append((node, False))
        self.cond_targets.append(node)
        self.demand_ports[node] = tuple(targets)
        self._feed(node, given)

    def _feed(self, node: str, inputs: Sequence) -> None:
        for x in inputs:
            if isinstance(x, _Sig):
                eid = f"{self._tag()}.{x.dist}>{node}"
                self.edges.append(Edge(eid, x.dist, node, x.size))
            else:
                self.node_ports.setdefault(node, [])
                if x not in self.node_ports[node]:
                    self.node_ports[node].append(x)

    def build(self, spec: ConditionSpec, condition_wiring: Sequence[str] = ()) -> Gadget:
        return Gadget(
            name=self.name,
            ports=tuple(self.ports),
            nodes=tuple(self.nodes),
            edges=tuple(self.edges),
            node_ports={v: tuple(names) for v, names in self.node_ports.items()},
            demand_ports=dict(self.demand_ports),
            sig_in=dict(self.sig_in),
            sig_out=dict(self.sig_out),
            cond_targets=tuple(self.cond_targets),
            spec=spec,
            condition_wiring=tuple(condition_wiring),
        )


def _parity_table() -> dict:
    return {(a, b): a ^ b for a in (0, 1) for b in (0, 1)}


# ---------------------------------------------------------------------------
# constructors


def xor_checker() -> Gadget:
    """Inputs M1, M2 (binary messages) and a binary signal Y; accepts exactly
    when Y is the parity of M1, M2 up to relabelling."""
    b = _Builder("xor_checker")
    b.message_in("M1", 2)
    b.message_in("M2", 2)
    y = b.signal_in("Y", 2)
    b.demand("d1", ["M1"], [y, "M2"])
    b.demand("d2", ["M2"], [y, "M1"])
    return b.build(
        ConditionSpec(
            conditions=(
                entropy.Determined(("M1",), ("Y", "M2")),
                entropy.Determined(("M2",), ("Y", "M1")),
            )
        )
    )


def xor_gate() -> Gadget:
    """Produces a binary output forced to be the parity of its two binary
    message inputs, up to relabelling (the butterfly network)."""
    b = _Builder("xor_gate")
    b.message_in("M1", 2)
    b.message_in("M2", 2)
    y = b.output("Y", ["M1", "M2"], 2)
    b.demand("d1", ["M1"], [y, "M2"])
    b.demand("d2", ["M2"], [y, "M1"])
    return b.build(
        ConditionSpec(
            conditions=(
                entropy.Determined(("M1",), ("Y", "M2")),
                entropy.Determined(("M2",), ("Y", "M1")),
            )
        )
    )


def tristate_checker() -> Gadget:
    """Binary messages X, Y and a 3-valued signal Z; accepts exactly the
    tristate-buffer behaviours: Z pins one Y-branch to a constant and passes X
    through on the other, up to relabelling."""
    b = _Builder("tristate_checker")
    b.message_in("X", 2)
    b.message_in("Y", 2)
    z = b.signal_in("Z", 3)
    zt = b.internal("Zt", ["X", "Y"], 3)
    b.demand("dy1", ["Y"], [z])
    b.demand("dy2", ["Y"], [zt])
    b.demand("dx", ["X"], [z, zt])
    return b.build(
        ConditionSpec(
            conditions=(
                entropy.Determined(("Y",), ("Z",)),
                entropy.Determined(("Y",), ("Zt",)),
                entropy.Determined(("X",), ("Z", "Zt")),
            ),
            existentials=(ExistentialVar("Zt", ("X", "Y"), 3),),
        )
    )


def tristate_gate() -> Gadget:
    b = _Builder("tristate_gate")
    b.message_in("X", 2)
    b.message_in("Y", 2)
    z = b.output("Z", ["X", "Y"], 3)
    zt = b.internal("Zt", ["X", "Y"], 3)
    b.demand("dy1", ["Y"], [z])
    b.demand("dy2", ["Y"], [zt])
    b.demand("dx", ["X"], [z, zt])
    return b.build(
        ConditionSpec(
            conditions=(
                entropy.Determined(("Y",), ("Z",)),
                entropy.Determined(("Y",), ("Zt",)),
                entropy.Determined(("X",), ("Z", "Zt")),
            ),
            existentials=(ExistentialVar("Zt", ("X", "Y"), 3),),
        )
    )


def bstate_checker(b: int) -> Gadget:
    """Buffer with b+1 states: message X binary, message Y of size b, signal Z
    of size b+1.  Z and b-1 internal signals must each determine Y, and
    jointly determine X."""
    if b < 2:
        raise ValueError(f"bstate arity must be >= 2, got {b}")
    bd = _Builder(f"bstate{b}_checker")
    bd.message_in("X", 2)
    bd.message_in("Y", b)
    z = bd.signal_in("Z", b + 1)
    internals = [bd.internal(f"Z{i}", ["X", "Y"], b + 1) for i in range(2, b + 1)]
    bd.demand("dy1", ["Y"], [z])
    for i, sig in enumerate(internals, start=2):
        bd.demand(f"dy{i}", ["Y"], [sig])
    bd.demand("dx", ["X"], [z] + internals)
    names = tuple(f"Z{i}" for i in range(2, b + 1))
    return bd.build(
        ConditionSpec(
            conditions=(
                entropy.Determined(("Y",), ("Z",)),
                *(entropy.Determined(("Y",), (n,)) for n in names),
                entropy.Determined(("X",), ("Z",) + names),
            ),
            existentials=tuple(ExistentialVar(n, ("X", "Y"), b + 1) for n in names),
        )
    )


def switch_gate() -> Gadget:
    """Two binary message inputs and two binary outputs that any solution
    forces to be the two inputs in one of the two orders (a crossbar switch),
    up to flipping either output."""
    b = _Builder("switch_gate")
    b.message_in("M0", 2)
    b.message_in("M1", 2)
    y = b.internal("XY", ["M0", "M1"], 2)
    b.demand("xd1", ["M0"], [y, "M1"])
    b.demand("xd2", ["M1"], [y, "M0"])
    z0 = b.output("Z0", ["M0", "M1"], 2)
    z1 = b.output("Z1", ["M0", "M1"], 2)
    b.demand("dzz", ["M0", "M1"], [z0, z1])
    b.demand("dz0", ["M0", "M1"], [z0, y])
    b.demand("dz1", ["M0", "M1"], [z1, y])
    return b.build(
        ConditionSpec(
            conditions=(
                entropy.Determined(("M0", "M1"), ("Z0", "Z1")),
                entropy.Determined(("M0", "M1"), ("Z0", "XOR")),
                entropy.Determined(("M0", "M1"), ("Z1", "XOR")),
            ),
            derived=(DerivedVar("XOR", ("M0", "M1"), 2, _parity_table()),),
        )
    )


def set_checker(n: int, theta: Iterable[tuple]) -> Gadget:
    """Checker over the outputs of n switches sharing inputs (M0, M1): for
    every bit pattern outside ``theta`` it demands M1 from the corresponding
    output picks, which is impossible exactly when the switch states form that
    pattern.  Accepted state vectors are exactly ``theta``."""
    allowed = {tuple(int(x) for x in t) for t in theta}
    if not allowed:
        raise ValueError("theta must be nonempty: an empty set checker is unsatisfiable by construction")
    if any(len(t) != n or any(x not in (0, 1) for x in t) for t in allowed):
        raise ValueError("theta patterns must be n-bit vectors")
    b = _Builder(f"set{n}_checker")
    b.message_in("M1", 2)
    sigs = {}
    for i in range(1, n + 1):
        for a in (0, 1):
            sigs[(i, a)] = b.signal_in(f"Z{i}_{a}", 2)
    conditions = []
    for pattern in sorted(set(itertools.product((0, 1), repeat=n)) - allowed):
        label = "ex" + "".join(str(x) for x in pattern)
        picks = [sigs[(i, pattern[i - 1])] for i in range(1, n + 1)]
        b.demand(label, ["M1"], picks)
        conditions.append(
            entropy.Determined(("M1",), tuple(f"Z{i}_{pattern[i - 1]}" for i in range(1, n + 1)))
        )
    return b.build(ConditionSpec(conditions=tuple(conditions)))


def cycles_gate() -> Gadget:
    """From a default-size message X1 and a binary message U, outputs a
    default-size signal X2 forced to be pi_U(X1) for two permutations that
    disagree at every point (so the support graph is a union of cycles)."""
    b = _Builder("cycles_gate")
    b.message_in("X1", DEFAULT)
    b.message_in("U", 2)
    x2 = b.output("X2", ["X1", "U"], DEFAULT)
    b.demand("du", ["U"], [x2, "X1"])
    b.demand("dx1", ["X1"], [x2, "U"])
    return b.build(
        ConditionSpec(
            conditions=(
                entropy.Determined(("U",), ("X1", "X2")),
                entropy.Determined(("X1",), ("X2", "U")),
                entropy.Determined(("X2",), ("X1", "U")),
            ),
            size_bounds=(("X2", DEFAULT),),
        )
    )


def _virtual_equality(select_size) -> Gadget:
    b = _Builder("virtual_equality_checker")
    b.message_in("M0", 2)
    b.message_in("M1", 2)
    b.message_in("W", select_size)
    z0 = b.signal_in("Z0", 2)
    y = b.internal("XY", ["M0", "M1"], 2)
    b.demand("xd1", ["M0"], [y, "M1"])
    b.demand("xd2", ["M1"], [y, "M0"])
    g = b.internal("G", [z0, "W"], 2)
    b.demand("deq", ["M0", "M1"], [g, y])
    return b.build(
        ConditionSpec(
            conditions=(entropy.Determined(("M0", "M1"), ("G", "XOR")),),
            existentials=(ExistentialVar("G", ("Z0", "W"), 2),),
            derived=(DerivedVar("XOR", ("M0", "M1"), 2, _parity_table()),),
        )
    )


def virtual_equality_checker() -> Gadget:
    """Attached to a conditional switch output Z0 with select signal W, accepts
    exactly the state families that are constant in W (theta_1 = ... = theta_b)."""
    return _virtual_equality(None)


def cond_virtual_equality_checker(b1: int, b2: int) -> Gadget:
    """Select signal (W1, W2); accepts exactly when, for every value of W1,
    the states theta_{w1, 1..b2} are constant."""
    if b1 < 1 or b2 < 1:
        raise ValueError("select alphabet sizes must be >= 1")
    b = _Builder("cond_virtual_equality_checker")
    b.message_in("M0", 2)
    b.message_in("M1", 2)
    b.message_in("W1", b1)
    b.message_in("W2", b2)
    z0 = b.signal_in("Z0", 2)
    y = b.internal("XY", ["M0", "M1"], 2)
    b.demand("xd1", ["M0"], [y, "M1"])
    b.demand("xd2", ["M1"], [y, "M0"])
    g = b.internal("G", [z0, "W1", "W2"], 2)
    b.demand("deq", ["M0", "M1"], [g, y])
    return b.build(
        ConditionSpec(
            conditions=(entropy.Determined(("M0", "M1"), ("G", "XOR")),),
            existentials=(ExistentialVar("G", ("Z0", "W1", "W2"), 2),),
            derived=(DerivedVar("XOR", ("M0", "M1"), 2, _parity_table()),),
            slice_on=("W1",),
        ),
        condition_wiring=("W1",),
    )


def _virtual_or(arity: int, select_ports: Sequence[tuple], slice_ports: Sequence[str]) -> Gadget:
    if arity < 2:
        raise ValueError(f"or arity must be >= 2, got {arity}")
    b = _Builder(f"virtual_or{arity}_checker")
    b.message_in("M1", 2)
    select = []
    for name, size in select_ports:
        b.message_in(name, size)
        select.append(name)
    z0 = b.signal_in("Z0", 2)
    g = b.internal("G", [z0] + select, arity + 1)
    internals = [b.internal(f"Z{i}", ["M1"] + select, arity + 1) for i in range(2, arity + 1)]
    b.demand("dw1", select, [g])
    for i, sig in enumerate(internals, start=2):
        b.demand(f"dw{i}", select, [sig])
    b.demand("dm1", ["M1"], [g] + internals)
    names = tuple(f"Z{i}" for i in range(2, arity + 1))
    sel = tuple(select)
    return b.build(
        ConditionSpec(
            conditions=(
                entropy.Determined(sel, ("G",)),
                *(entropy.Determined(sel, (nm,)) for nm in names),
                entropy.Determined(("M1",), ("G",) + names),
            ),
            existentials=(
                ExistentialVar("G", ("Z0",) + sel, arity + 1),
                *(ExistentialVar(nm, ("M1",) + sel, arity + 1) for nm in names),
            ),
            slice_on=tuple(slice_ports),
        ),
        condition_wiring=tuple(slice_ports),
    )


def virtual_or_checker(b: int) -> Gadget:
    """Attached to a conditional switch output Z0 with message select W of size
    b, accepts exactly when (theta_1, ..., theta_b) is not all-zero.  The
    select must bind to messages: its values are demanded by the buffer
    construction."""
    return _virtual_or(b, [("W", b)], [])


def cond_virtual_or_checker(b1: int, b2: int) -> Gadget:
    """Select signal (W1, W2), conditioned on W1: accepts exactly when for
    every value of W1 the row theta_{w1, 1..b2} is not all-zero.  Uses the
    (b2+1)-state buffer."""
    if b1 < 1:
        raise ValueError("condition alphabet must be >= 1")
    return replace(
        _virtual_or(b2, [("W1", b1), ("W2", b2)], ["W1"]),
        name="cond_virtual_or_checker",
    )


def conditionalize(gadget: Gadget, w_alphabet: Optional[int], port: str = "W") -> Gadget:
    """Conditional version of a gadget: a condition signal W is delivered to
    every non-broadcast node, and the declared conditions must hold on every
    slice W = w.  With w_alphabet None the port binds to any message tuple;
    with w_alphabet 1 the gadget is equivalent to the original."""
    if any(p.name == port for p in gadget.ports):
        raise ComposeError(f"{gadget.name}: port {port!r} already exists")
    size = None if w_alphabet is None else fixed(w_alphabet)
    spec = gadget.spec
    new_spec = ConditionSpec(
        conditions=spec.conditions,
        existentials=tuple(
            ExistentialVar(e.name, e.inputs + (port,), e.size) for e in spec.existentials
        ),
        derived=spec.derived,
        slice_on=spec.slice_on + (port,),
        size_bounds=spec.size_bounds,
    )
    return replace(
        gadget,
        name=f"cond_{gadget.name}",
        ports=gadget.ports + (Port(port, PortKind.CONDITION_IN, size),),
        spec=new_spec,
        condition_wiring=gadget.condition_wiring + (port,),
    )


def cond_switch_gate(w_alphabet: int) -> Gadget:
    return conditionalize(switch_gate(), w_alphabet)


def cond_set_checker(n: int, theta: Iterable[tuple], w_alphabet: int) -> Gadget:
    return conditionalize(set_checker(n, theta), w_alphabet)


def cond_xor_checker(w_alphabet: int) -> Gadget:
    return conditionalize(xor_checker(), w_alphabet)


# ---------------------------------------------------------------------------
# composition


@dataclass(frozen=True)
class Out:
    """Reference to a SIGNAL_OUT port of another part in a composition."""

    part: str
    port: str


@dataclass(frozen=True)
class CandidateFunction:
    """A concrete function to test against a checker or to pin a gate output:
    a total table over the named message inputs."""

    output: str
    inputs: tuple  # message labels, table key order
    table: Mapping[tuple, int]
    size: int
    input_sizes: tuple = ()  # SizeSpecs for labels not already messages

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "table", dict(self.table))
        object.__setattr__(
            self,
            "input_sizes",
            tuple(s if isinstance(s, SizeSpec) else fixed(s) for s in self.input_sizes)
            or tuple(None for _ in self.inputs),
        )


Binding = Union[str, tuple, Out, CandidateFunction]


@dataclass(frozen=True)
class Composition:
    net: Network
    pins: Mapping[str, tuple]
    message_index: Mapping[str, int]
    out_edges: Mapping[tuple, str]  # (part, port) -> edge id in net

    def pin_options(self, **kwargs) -> SolveOptions:
        return SolveOptions(pins=dict(self.pins), **kwargs)


def _as_label_tuple(binding: Binding) -> Optional[tuple]:
    if isinstance(binding, str):
        return (binding,)
    if isinstance(binding, tuple) and all(isinstance(x, str) for x in binding):
        return binding
    return None


class _Composer:
    def __init__(self, messages: Mapping[str, object], k: Optional[int]):
        self.k = k
        self.labels: list = []
        self.specs: dict = {}
        for label, size in messages.items():
            self._add_message(label, size)
        self.nodes: list = []
        self.broadcast: set = set()
        self.edges: list = []
        self.sources: dict = {}
        self.demands: dict = {}
        self.pins: dict = {}
        self.out_edges: dict = {}
        self.sig_out_specs: dict = {}

    def _add_message(self, label: str, size) -> None:
        spec = size if isinstance(size, SizeSpec) else (DEFAULT if size is None else fixed(size))
        if label in self.specs:
            if self.specs[label] != spec:
                raise ComposeError(f"message {label!r} bound with conflicting sizes")
            return
        self.labels.append(label)
        self.specs[label] = spec

    def index(self, label: str) -> int:
        return self.labels.index(label) + 1

    def _check_message_port(self, part: str, port: Port, labels: tuple) -> None:
        if not labels:
            raise ComposeError(f"{part}.{port.name}: empty message binding")
        for lb in labels:
            if lb not in self.specs:
                raise ComposeError(f"{part}.{port.name}: unknown message {lb!r}")
        if port.size is None:
            return
        specs = [self.specs[lb] for lb in labels]
        if port.size.is_default:
            if len(labels) != 1 or not specs[0].is_default:
                raise ComposeError(f"{part}.{port.name}: expects one default-size message")
            return
        if any(s.is_default for s in specs):
            raise ComposeError(f"{part}.{port.name}: fixed-size port bound to default-size message")
        prod = 1
        for s in specs:
            prod *= s.value
        if prod != port.size.value:
            raise ComposeError(
                f"{part}.{port.name}: bound alphabet {prod} != port size {port.size.value}"
            )

    def _candidate_pin(self, part: str, cf: CandidateFunction, spec: SizeSpec, domain_labels: Sequence[str]) -> tuple:
        """Row-major table over domain_labels sorted by message index."""
        if set(cf.inputs) != set(domain_labels):
            raise ComposeError(
                f"{part}: candidate inputs {sorted(cf.inputs)} != required domain {sorted(domain_labels)}"
            )
        if self.k is None:
            size = spec.value
            in_sizes = {lb: self.specs[lb].value for lb in domain_labels}
            if size is None or None in in_sizes.values():
                raise ComposeError(f"{part}: candidate over default-size alphabet needs k")
        else:
            size = resolve_size(spec, self.k)
            in_sizes = {lb: resolve_size(self.specs[lb], self.k) for lb in domain_labels}
        if cf.size != size:
            raise ComposeError(f"{part}: candidate size {cf.size} != port size {size}")
        order = sorted(domain_labels, key=self.index)
        rows = []
        for combo in itertools.product(*(range(in_sizes[lb]) for lb in order)):
            key = tuple(combo[order.index(lb)] for lb in cf.inputs)
            try:
                val = cf.table[key]
            except KeyError:
                raise ComposeError(f"{part}: candidate table missing entry {key}")
            if not 0 <= val < size:
                raise ComposeError(f"{part}: candidate value {val} out of range [0,{size})")
            rows.append(val)
        return tuple(rows)

    def add_part(self, part: str, g: Gadget, bindings: Mapping[str, Binding]) -> None:
        known = {p.name for p in g.ports}
        for name in bindings:
            if name not in known:
                raise ComposeError(f"{part}: no port {name!r} on {g.name}")
        # candidate fresh inputs first so message indices exist
        for p in g.ports:
            cf = bindings.get(p.name)
            if isinstance(cf, CandidateFunction):
                for lb, sz in zip(cf.inputs, cf.input_sizes):
                    if lb not in self.specs:
                        if sz is None:
                            raise ComposeError(f"{part}.{p.name}: candidate input {lb!r} has no size")
                        self._add_message(lb, sz)
        prefix = f"{part}/"
        inject: dict = {}
        feeds: list = []
        for p in g.ports:
            binding = bindings.get(p.name)
            labels = _as_label_tuple(binding) if binding is not None else None
            if p.kind is PortKind.MESSAGE_IN:
                if labels is None:
                    raise ComposeError(f"{part}.{p.name}: message port must bind to message labels")
                self._check_message_port(part, p, labels)
                inject[p.name] = labels
            elif p.kind is PortKind.SIGNAL_IN:
                dist = g.sig_in[p.name]
                if labels is not None:
                    self._check_message_port(part, replace(p, size=None), labels)
                    feeds.append((p, dist, labels, None))
                elif isinstance(binding, Out):
                    feeds.append((p, dist, binding, None))
                elif isinstance(binding, CandidateFunction):
                    feeds.append((p, dist, None, binding))
                else:
                    raise ComposeError(f"{part}.{p.name}: signal port must bind to a signal, candidate, or messages")
            elif p.kind is PortKind.SIGNAL_OUT:
                if binding is not None and not isinstance(binding, CandidateFunction):
                    raise ComposeError(f"{part}.{p.name}: outputs may only be pinned with a candidate")
            elif p.kind is PortKind.CONDITION_IN:
                if binding is None:
                    zero = f"{part}.{p.name}.zero"
                    self._add_message(zero, fixed(1))
                    inject[p.name] = (zero,)
                else:
                    comps = binding if isinstance(binding, tuple) else (binding,)
                    for comp in comps:
                        if isinstance(comp, str) and comp not in self.specs:
                            raise ComposeError(f"{part}.{p.name}: unknown message {comp!r}")
                    inject[p.name] = comps  # labels and Out refs, resolved below
        # instantiate fragment nodes/edges
        for v, bc in g.nodes:
            self.nodes.append(prefix + v)
            if bc:
                self.broadcast.add(prefix + v)
        for e in g.edges:
            self.edges.append(Edge(prefix + e.id, prefix + e.tail, prefix + e.head, e.size))
        for v, names in g.node_ports.items():
            for name in names:
                port = g.port(name)
                labels = inject.get(name)
                if labels is None:
                    raise ComposeError(f"{part}.{name}: unbound message port")
                self.sources.setdefault(prefix + v, set()).update(self.index(lb) for lb in labels)
        for v, targets in g.demand_ports.items():
            want = set()
            for name in targets:
                for lb in inject[name]:
                    want.add(self.index(lb))
            self.demands.setdefault(prefix + v, set()).update(want)
        # feed bound signal inputs
        for p, dist, ref, cf in feeds:
            head = prefix + dist
            self.broadcast.add(head)
            if isinstance(ref, Out):
                spec = self.sig_out_specs.get((ref.part, ref.port))
                if spec is None:
                    raise ComposeError(f"{part}.{p.name}: unknown output {ref.part}.{ref.port}")
                if p.size is not None and spec != p.size:
                    raise ComposeError(
                        f"{part}.{p.name}: size {p.size} != bound signal size {spec}"
                    )
                src_edge = self.out_edges[(ref.part, ref.port)]
                src_dist = self._dist_of(src_edge)
                self.edges.append(Edge(f"{part}/{p.name}.feed", src_dist, head, spec))
            elif ref is not None:  # message labels routed through a source node
                node = f"{part}/{p.name}.src"
                self.nodes.append(node)
                self.sources[node] = {self.index(lb) for lb in ref}
                self.edges.append(Edge(f"{part}/{p.name}.src.e", node, head, p.size))
            else:
                node = f"{part}/{p.name}.cand"
                self.nodes.append(node)
                self.sources[node] = {self.index(lb) for lb in cf.inputs}
                eid = f"{part}/{p.name}.cand.e"
                self.edges.append(Edge(eid, node, head, p.size))
                self.pins[eid] = self._candidate_pin(part, cf, p.size, cf.inputs)
        # register outputs, pin them if asked
        for name, (eid, dist) in g.sig_out.items():
            edge = next(e for e in g.edges if e.id == eid)
            self.out_edges[(part, name)] = prefix + eid
            self.sig_out_specs[(part, name)] = edge.size
            cf = bindings.get(name)
            if isinstance(cf, CandidateFunction):
                producer = edge.tail
                if any(e.head == producer for e in g.edges):
                    raise ComposeError(f"{part}.{name}: cannot pin an output fed by signals")
                domain = []
                for pn in g.node_ports.get(producer, ()):
                    domain.extend(inject[pn])
                for wp in g.condition_wiring:
                    for comp in inject.get(wp, ()):
                        if not isinstance(comp, str):
                            raise ComposeError(
                                f"{part}.{name}: cannot pin an output conditioned on signals"
                            )
                        if comp not in domain:
                            domain.append(comp)
                self.pins[prefix + eid] = self._candidate_pin(part, cf, edge.size, domain)
        # condition wiring: deliver to every producer/demand node of the part
        for wp in g.condition_wiring:
            comps = inject.get(wp)
            if comps is None:
                comps = bindings.get(wp)
                comps = comps if isinstance(comps, tuple) else (comps,)
            for v in g.cond_targets:
                node = prefix + v
                for i, comp in enumerate(comps):
                    if isinstance(comp, str):
                        self.sources.setdefault(node, set()).add(self.index(comp))
                    elif isinstance(comp, Out):
                        spec = self.sig_out_specs.get((comp.part, comp.port))
                        if spec is None:
                            raise ComposeError(f"{part}.{wp}: unknown output {comp.part}.{comp.port}")
                        src_dist = self._dist_of(self.out_edges[(comp.part, comp.port)])
                        self.edges.append(
                            Edge(f"{part}/{wp}{i}>{v}", src_dist, node, spec)
                        )
                    else:
                        raise ComposeError(f"{part}.{wp}: condition components must be messages or outputs")

    def _dist_of(self, edge_id: str) -> str:
        for e in self.edges:
            if e.id == edge_id:
                return e.head
        raise ComposeError(f"no edge {edge_id!r}")

    def build(self) -> Composition:
        net = Network(
            nodes=tuple(self.nodes),
            edges=tuple(self.edges),
            messages=tuple(self.specs[lb] for lb in self.labels),
            sources=self.sources,
            demands=self.demands,
            broadcast=frozenset(self.broadcast),
        )
        return Composition(
            net=net,
            pins=dict(self.pins),
            message_index={lb: i + 1 for i, lb in enumerate(self.labels)},
            out_edges=dict(self.out_edges),
        )


def compose(
    parts: Sequence[tuple],
    messages: Mapping[str, object],
    k: Optional[int] = None,
) -> Composition:
    """Wire gadgets into a single network.

    ``parts`` is a sequence of (instance name, gadget, bindings); bindings map
    port names to message labels (or tuples of labels), ``Out`` references to
    other parts' outputs, or ``CandidateFunction`` pins.  ``messages`` declares
    the shared messages (label -> size, None for default-size).  ``k`` is only
    needed to materialize candidate tables over default-size alphabets.
    """
    comp = _Composer(messages, k)
    seen = set()
    for name, gadget, bindings in parts:
        if name in seen:
            raise ComposeError(f"duplicate part name {name!r}")
        seen.add(name)
        comp.add_part(name, gadget, bindings)
    return comp.build()


# ---------------------------------------------------------------------------
# acceptance oracles


def _normalize_family(gadget: Gadget, family: Sequence) -> list:
    pinned_ports = [
        p.name
        for p in gadget.ports
        if p.kind in (PortKind.SIGNAL_IN, PortKind.SIGNAL_OUT)
    ]
    out = []
    for entry in family:
        if isinstance(entry, CandidateFunction):
            entry = {entry.output: entry}
        missing = [p for p in pinned_ports if p not in entry]
        if missing:
            raise ValueError(f"candidate entry missing tables for ports {missing}")
        out.append(dict(entry))
    return out


def _port_size(gadget: Gadget, p: Port, sizes: Mapping) -> SizeSpec:
    if p.name in sizes:
        s = sizes[p.name]
        return s if isinstance(s, SizeSpec) else fixed(s)
    if p.size is None:
        raise ValueError(f"{gadget.name}.{p.name}: port has no size; pass sizes={{...}}")
    return p.size


def _embedding(gadget: Gadget, entry: Mapping[str, CandidateFunction], k: int,
               sizes: Mapping) -> Composition:
    messages: dict = {}
    bindings: dict = {}
    for p in gadget.ports:
        if p.kind is PortKind.MESSAGE_IN or p.kind is PortKind.CONDITION_IN:
            messages[p.name] = _port_size(gadget, p, sizes)
            bindings[p.name] = (p.name,)
    for name, cf in entry.items():
        bindings[name] = cf
    return compose([("g", gadget, bindings)], messages, k=k)


def accepted_set(
    gadget: Gadget,
    family: Sequence,
    k: int,
    opts: Optional[SolveOptions] = None,
    sizes: Optional[Mapping] = None,
) -> list:
    """Candidates accepted by the network oracle: each candidate is pinned
    into an embedding network (checker internals left free) and kept iff the
    network is solvable at k.  ``sizes`` instantiates unsized ports."""
    entries = _normalize_family(gadget, family)
    accepted = []
    sizes = sizes or {}
    for entry in entries:
        comp = _embedding(gadget, entry, k, sizes)
        options = SolveOptions(
            pins=dict(comp.pins),
            symmetry_breaking=True if opts is None else opts.symmetry_breaking,
            node_budget=None if opts is None else opts.node_budget,
        )
        if solve_at_k(comp.net, k, options).solvable:
            accepted.append(entry)
    return accepted


def _cond_vars(cond) -> set:
    if isinstance(cond, entropy.Determined):
        return set(cond.targets) | set(cond.given)
    if isinstance(cond, entropy.Independent):
        return set(cond.left) | set(cond.right)
    if isinstance(cond, (entropy.Uniform, entropy.SupportAtMost)):
        return set(cond.over)
    if isinstance(cond, entropy.Conditional):
        return _cond_vars(cond.inner) | set(cond.given)
    raise TypeError(cond)


def entropy_accepted_set(gadget: Gadget, family: Sequence, k: int,
                         sizes: Optional[Mapping] = None) -> list:
    """Candidates accepted by the declared information conditions: the joint
    support of messages and candidate outputs is built exactly, existential
    internal signals are enumerated outright, and each condition is checked on
    every slice of the condition ports."""
    entries = _normalize_family(gadget, family)
    spec = gadget.spec
    accepted = []
    cache: dict = {}
    sizes = sizes or {}
    for entry in entries:
        variables: list = []
        for p in gadget.ports:
            if p.kind in (PortKind.MESSAGE_IN, PortKind.CONDITION_IN):
                variables.append((p.name, resolve_size(_port_size(gadget, p, sizes), k)))
        extra_seen = {name for name, _ in variables}
        for cf in entry.values():
            for lb, sz in zip(cf.inputs, cf.input_sizes):
                if lb not in extra_seen:
                    if sz is None:
                        raise ValueError(f"candidate input {lb!r} has no size")
                    variables.append((lb, resolve_size(sz, k)))
                    extra_seen.add(lb)
        names = [n for n, _ in variables]
        rows = [list(t) for t in itertools.product(*(range(s) for _, s in variables))]
        for port_name, cf in sorted(entry.items()):
            p = gadget.port(port_name)
            size = resolve_size(p.size, k)
            if cf.size != size:
                raise ValueError(f"candidate for {port_name} has size {cf.size}, port has {size}")
            cols = [names.index(lb) for lb in cf.inputs]
            ok = True
            for row in rows:
                val = cf.table[tuple(row[c] for c in cols)]
                if not 0 <= val < size:
                    ok = False
                    break
                row.append(val)
            if not ok:
                break
            names.append(port_name)
            variables.append((port_name, size))
        else:
            for dv in spec.derived:
                cols = [names.index(lb) for lb in dv.inputs]
                for row in rows:
                    row.append(dv.table[tuple(row[c] for c in cols)])
                names.append(dv.name)
                variables.append((dv.name, dv.size))
            if _conditions_hold(spec, variables, rows, k, cache):
                accepted.append(entry)
            continue
        # candidate out of range: reject
    return accepted


def _projection_safe(cond) -> bool:
    # Determined and SupportAtMost depend only on the projected support SET,
    # so they can be checked on independently filtered columns; count-based
    # conditions must wait for the full joint support.
    if isinstance(cond, entropy.Conditional):
        return _projection_safe(cond.inner)
    return isinstance(cond, (entropy.Determined, entropy.SupportAtMost))


def _filter_existential(ex: ExistentialVar, conds: list, sliced, variables: list,
                        rows: list, cache: dict) -> list:
    """All tables for one existential that satisfy the conditions involving
    only that existential, as value rows aligned with ``rows``."""
    names = [n for n, _ in variables]
    in_cols = [names.index(lb) for lb in ex.inputs]
    ref = sorted({v for c in conds for v in _cond_vars(sliced(c))} - {ex.name})
    ref_cols = [names.index(v) for v in ref]
    keys = [tuple(r[c] for c in in_cols) for r in rows]
    refs = [tuple(r[c] for c in ref_cols) for r in rows]
    cache_key = (ex.size, ex.inputs, tuple(conds), tuple(zip(keys, refs)))
    hit = cache.get(cache_key)
    if hit is not None:
        return hit
    domain = sorted(set(keys))
    mini_vars = tuple((v, dict(variables)[v]) for v in ref) + ((ex.name, ex.size),)
    survivors = []
    for values in itertools.product(range(ex.size), repeat=len(domain)):
        lut = dict(zip(domain, values))
        col = [lut[key] for key in keys]
        mini_rows = frozenset(rv + (cv,) for rv, cv in zip(refs, col))
        dist = entropy.UniformSupport(mini_vars, mini_rows)
        if all(entropy.check(dist, sliced(c)) for c in conds):
            survivors.append(col)
    cache[cache_key] = survivors
    return survivors


def _conditions_hold(spec: ConditionSpec, variables: list, rows: list, k: int,
                     cache: Optional[dict] = None) -> bool:
    cache = cache if cache is not None else {}
    names = [n for n, _ in variables]

    def sliced(cond):
        return entropy.Conditional(cond, spec.slice_on) if spec.slice_on else cond

    def check_now(vars_now, rows_now, conds):
        dist = entropy.UniformSupport(tuple(vars_now), frozenset(tuple(r) for r in rows_now))
        return all(entropy.check(dist, sliced(c)) for c in conds)

    for var, bound_spec in spec.size_bounds:
        cond = entropy.SupportAtMost((var,), resolve_size(bound_spec, k))
        dist = entropy.UniformSupport(tuple(variables), frozenset(tuple(r) for r in rows))
        if not entropy.check(dist, cond):
            return False
    available = set(names) | set(spec.slice_on)
    pending = list(spec.conditions)
    ready = [c for c in pending if _cond_vars(c) <= available]
    pending = [c for c in pending if not _cond_vars(c) <= available]
    if not check_now(variables, rows, ready):
        return False
    if not spec.existentials:
        return not pending
    # partition: conditions touching exactly one existential (and projection
    # safe) filter that existential's tables independently; the rest join
    unary: dict = {e.name: [] for e in spec.existentials}
    joint: list = []
    exnames = set(unary)
    for c in pending:
        touched = _cond_vars(c) & exnames
        if len(touched) == 1 and _projection_safe(c):
            unary[touched.pop()].append(c)
        else:
            joint.append(c)
    choices = [
        _filter_existential(ex, unary[ex.name], sliced, variables, rows, cache)
        for ex in spec.existentials
    ]
    if any(not ch for ch in choices):
        return False
    vars_full = list(variables) + [(e.name, e.size) for e in spec.existentials]
    if not joint:
        return True
    for combo in itertools.product(*choices):
        rows_full = [list(r) + [col[i] for col in combo] for i, r in enumerate(rows)]
        if check_now(vars_full, rows_full, joint):
            return True
    return False


# ---------------------------------------------------------------------------
# catalog export


def catalog() -> dict:
    """Constructors addressable by name (CLI and scripts)."""
    return {
        "xor": xor_checker,
        "xor-gate": xor_gate,
        "tristate": tristate_checker,
        "tristate-gate": tristate_gate,
        "bstate": bstate_checker,
        "switch": switch_gate,
        "cycles": cycles_gate,
        "set": set_checker,
        "virtual-eq": virtual_equality_checker,
        "virtual-or": virtual_or_checker,
    }


def _condition_to_json(cond) -> dict:
    if isinstance(cond, entropy.Determined):
        return {"kind": "determined", "targets": list(cond.targets), "given": list(cond.given)}
    if isinstance(cond, entropy.Independent):
        return {"kind": "independent", "left": list(cond.left), "right": list(cond.right)}
    if isinstance(cond, entropy.Uniform):
        return {"kind": "uniform", "over": list(cond.over)}
    if isinstance(cond, entropy.SupportAtMost):
        return {"kind": "support-at-most", "over": list(cond.over), "bound": cond.bound}
    if isinstance(cond, entropy.Conditional):
        return {"kind": "conditional", "inner": _condition_to_json(cond.inner), "given": list(cond.given)}
    raise TypeError(cond)


def gadget_to_json(gadget: Gadget) -> dict:
    from .model import to_json_dict

    spec = gadget.spec
    return {
        "name": gadget.name,
        "ports": [
            {"name": p.name, "kind": p.kind.value, "size": None if p.size is None else p.size.value}
            for p in gadget.ports
        ],
        "conditions": [_condition_to_json(c) for c in spec.conditions],
        "existentials": [
            {"name": e.name, "inputs": list(e.inputs), "size": e.size} for e in spec.existentials
        ],
        "conditioned_on": list(spec.slice_on),
        "fragment": to_json_dict(gadget.fragment_network()),
    }
