"""Exact verification of information conditions on distributions that are
uniform over a finite support.

Every joint distribution arising here is the image of independent uniform
messages under deterministic maps, hence uniform over its support; this lets
all checks run on integer counts with no floating point and no tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union


@dataclass(frozen=True)
class UniformSupport:
    """Uniform distribution over ``support``; ``variables`` gives the name and
    alphabet size of each tuple coordinate."""

    variables: tuple
    support: frozenset

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple((str(n), int(s)) for n, s in self.variables))
        object.__setattr__(self, "support", frozenset(tuple(t) for t in self.support))
        if not self.support:
            raise ValueError("support must be nonempty")
        width = len(self.variables)
        for t in self.support:
            if len(t) != width:
                raise ValueError(f"tuple width {len(t)} != {width} variables")
            for x, (name, size) in zip(t, self.variables):
                if not 0 <= x < size:
                    raise ValueError(f"value {x} out of range for {name} (size {size})")

    def index_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.variables):
            if n == name:
                return i
        raise KeyError(f"unknown variable {name!r}")

    def columns(self, names: Iterable[str]) -> tuple:
        return tuple(self.index_of(n) for n in names)

    def project(self, names: Iterable[str]) -> frozenset:
        cols = self.columns(names)
        return frozenset(tuple(t[c] for c in cols) for t in self.support)


# --- conditions -------------------------------------------------------------


@dataclass(frozen=True)
class Determined:
    """H(targets | given) = 0: no two support points agree on ``given`` but
    differ on ``targets``."""

    targets: tuple
    given: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "given", tuple(self.given))


@dataclass(frozen=True)
class Independent:
    left: tuple
    right: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))


@dataclass(frozen=True)
class Uniform:
    over: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "over", tuple(self.over))


@dataclass(frozen=True)
class SupportAtMost:
    over: tuple
    bound: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "over", tuple(self.over))


@dataclass(frozen=True)
class Conditional:
    """Inner condition must hold on every slice of the named variables."""

    inner: "InfoCondition"
    given: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "given", tuple(self.given))


InfoCondition = Union[Determined, Independent, Uniform, SupportAtMost, Conditional]


def _counts(dist: UniformSupport, cols: tuple) -> dict:
    out: dict = {}
    for t in dist.support:
        key = tuple(t[c] for c in cols)
        out[key] = out.get(key, 0) + 1
    return out


def check(dist: UniformSupport, cond: InfoCondition) -> bool:
    """Exact decision of an information condition on a uniform support."""
    if isinstance(cond, Determined):
        gcols = dist.columns(cond.given)
        tcols = dist.columns(cond.targets)
        seen: dict = {}
        for t in dist.support:
            key = tuple(t[c] for c in gcols)
            val = tuple(t[c] for c in tcols)
            if seen.setdefault(key, val) != val:
                return False
        return True
    if isinstance(cond, Independent):
        lcols = dist.columns(cond.left)
        rcols = dist.columns(cond.right)
        joint = _counts(dist, lcols + rcols)
        lc = _counts(dist, lcols)
        rc = _counts(dist, rcols)
        total = len(dist.support)
        for a, ca in lc.items():
            for b, cb in rc.items():
                if joint.get(a + b, 0) * total != ca * cb:
                    return False
        return True
    if isinstance(cond, Uniform):
        counts = _counts(dist, dist.columns(cond.over))
        return len(set(counts.values())) <= 1
    if isinstance(cond, SupportAtMost):
        return len(dist.project(cond.over)) <= cond.bound
    if isinstance(cond, Conditional):
        cols = dist.columns(cond.given)
        slices: dict = {}
        for t in dist.support:
            slices.setdefault(tuple(t[c] for c in cols), []).append(t)
        return all(
            check(UniformSupport(dist.variables, frozenset(part)), cond.inner)
            for part in slices.values()
        )
    raise TypeError(f"unknown condition {cond!r}")


def entropy_display(dist: UniformSupport, over: Iterable[str]) -> float:
    """Shannon entropy in bits of the marginal on ``over``.

    Display only: decisions in this package never compare entropies, they use
    the exact checks above.
    """
    counts = _counts(dist, dist.columns(over))
    total = sum(counts.values())
    return -sum((c / total) * math.log2(c / total) for c in counts.values())


# --- supports induced by coding schemes -------------------------------------


def support_of_scheme(net, scheme) -> UniformSupport:
    """Joint support of (messages, edge signals) under a coding scheme.

    Variables are all messages (``M1``..``Ml``) followed by all edge signals
    named by edge id, in evaluation order.  The support has one point per
    message tuple.
    """
    from . import solver

    sizes = [m.resolve(scheme.k) for m in net.messages]
    order = solver.edge_eval_order(net)
    variables = [(f"M{i}", s) for i, s in enumerate(sizes, start=1)]
    variables += [(e.id, e.size.resolve(scheme.k)) for e in order]
    points = []
    for msg, signals in solver.simulate(net, scheme):
        points.append(tuple(msg) + tuple(signals[e.id] for e in order))
    dist = UniformSupport(tuple(variables), frozenset(points))
    expect = 1
    for s in sizes:
        expect *= s
    if len(dist.support) != expect:
        raise ValueError("scheme evaluation collapsed distinct message tuples")
    return dist
