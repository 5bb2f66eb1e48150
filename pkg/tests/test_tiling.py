import pytest

from pfsnet import tiling as T
from pfsnet.model import canonicalize, validate
from pfsnet.solver import SolveOptions, Status, solve_at_k


def fig_coloring():
    rows = [(1, 2, 1, 2), (3, 3, 3, 3), (1, 2, 1, 2), (3, 3, 3, 3)]
    return T.TorusColoring(4, 4, rows)


def fig_program():
    return T.ConditionProgram(3, (
        T.EdgeEq("h", frozenset({3})),
        T.EdgeOr("h", frozenset({1, 3})),
        T.EdgeOr("v", frozenset({3})),
        T.FaceOr("11", frozenset({1})),
        T.FaceOr("22", frozenset({2})),
    ))


def test_phi():
    assert len(T.phi(1, 3)) == 6
    assert T.phi(1, 2) == (1, 0)
    assert T.phi(2, 2) == (0, 1)
    assert len({T.phi(c, 3) for c in (1, 2, 3)}) == 3  # injective
    subsets = T.color_subsets(3)
    assert subsets == [frozenset(s) for s in
                       [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]]
    with pytest.raises(ValueError):
        T.phi(4, 3)


def test_program_validation():
    with pytest.raises(ValueError):
        T.ConditionProgram(1, ())
    with pytest.raises(ValueError):
        T.ConditionProgram(2, (T.EdgeEq("h", frozenset()),))
    with pytest.raises(ValueError):
        T.ConditionProgram(2, (T.EdgeEq("h", frozenset({1, 2})),))
    with pytest.raises(ValueError):
        T.ConditionProgram(2, (T.EdgeEq("x", frozenset({1})),))


def test_reduce_structure():
    for n_colors in (2, 3):
        net = T.reduce(T.ConditionProgram(n_colors, ()))
        assert validate(net).ok
        switches = {v.split("/")[0] for v in net.nodes if v.startswith("sw")}
        assert len(switches) == 2 ** n_colors - 2
        # messages: M0, M1, U, V fixed binary; X1, Y1 default
        assert [m.value for m in net.messages] == [2, 2, 2, 2, None, None]
        assert canonicalize(net) == net  # already simple


def test_reduce_uses_only_expected_edge_sizes():
    prog = T.ConditionProgram(3, (
        T.EdgeEq("h", frozenset({1})),
        T.EdgeOr("v", frozenset({2, 3})),
        T.FaceOr("11", frozenset({2})),
        T.FaceOr("22", frozenset({1, 2})),
    ))
    net = T.reduce(prog)
    assert validate(net).ok
    fixed_sizes = {e.size.value for e in net.edges if e.size.value is not None}
    assert fixed_sizes == {2, 3, 5}
    assert any(e.size.is_default for e in net.edges)


def test_reduce_condition_parts():
    prog = T.ConditionProgram(3, (T.FaceOr("22", frozenset({1, 2})),))
    net = T.reduce(prog)
    # one 4-ary or checker conditioned on the cycle outputs: size-5 edges exist
    assert {e.size.value for e in net.edges if e.size.value is not None} >= {5}
    parts = {v.split("/")[0] for v in net.nodes if v.startswith("c00")}
    assert parts == {"c00"}
    # edge conditions expand into two checkers (the two shared-coordinate kinds)
    prog2 = T.ConditionProgram(2, (T.EdgeEq("h", frozenset({1})),))
    net2 = T.reduce(prog2)
    parts2 = {v.split("/")[0] for v in net2.nodes if v.startswith("c00")}
    assert parts2 == {"c00a", "c00b"}


def test_reduce_growth_is_structural():
    base = T.reduce(T.ConditionProgram(2, ()))
    one = T.reduce(T.ConditionProgram(2, (T.EdgeEq("h", frozenset({1})),)))
    two = T.reduce(T.ConditionProgram(2, (T.EdgeEq("h", frozenset({1})),
                                          T.EdgeEq("v", frozenset({2})))))
    d1 = (len(one.nodes) - len(base.nodes), len(one.edges) - len(base.edges))
    d2 = (len(two.nodes) - len(one.nodes), len(two.edges) - len(one.edges))
    assert d1 == d2  # each edge-equality condition adds the same increment


def test_torus_bruteforce_empty_program():
    w = T.torus_bruteforce(T.ConditionProgram(2, ()), 4, 4)
    assert w is not None
    assert all(c == 1 for row in w.grid for c in row)


def test_torus_bruteforce_contradiction():
    prog = T.ConditionProgram(2, (
        T.EdgeEq("h", frozenset({1})),
        T.EdgeOr("h", frozenset({1})),
        T.EdgeOr("v", frozenset({2})),
    ))
    assert T.torus_bruteforce(prog, 2, 2) is None
    assert T.torus_bruteforce(prog, 4, 4) is None


def test_torus_bruteforce_agrees_with_validator():
    progs = [
        fig_program(),
        T.ConditionProgram(2, (T.EdgeOr("h", frozenset({1})),)),
        T.ConditionProgram(3, (T.FaceOr("11", frozenset({2})),
                               T.EdgeEq("v", frozenset({1, 2})))),
    ]
    for prog in progs:
        w = T.torus_bruteforce(prog, 4, 4)
        if w is not None:
            assert T.validate_coloring(prog, w).ok


def test_torus_cap():
    with pytest.raises(T.CapExceeded):
        T.torus_bruteforce(T.ConditionProgram(2, ()), 10, 10, cap=64)
    with pytest.raises(ValueError):
        T.torus_bruteforce(T.ConditionProgram(2, ()), 3, 4)


def test_fig_coloring_validates():
    assert T.validate_coloring(fig_program(), fig_coloring()).ok
    # every horizontal edge of the checkerboard violates the membership equality
    board = T.TorusColoring(4, 4, [tuple(1 + ((x + y) % 2) for x in range(4)) for y in range(4)])
    rep = T.validate_coloring(T.ConditionProgram(2, (T.EdgeEq("h", frozenset({1})),)), board)
    assert not rep.ok and len(rep.violations) == 16
    for rule, where in rep.violations:
        assert rule == "eq" and "(" in where


def test_all_same_color_satisfies_every_equality():
    mono = T.TorusColoring(4, 4, [(2, 2, 2, 2)] * 4)
    for orient in ("h", "v"):
        prog = T.ConditionProgram(3, (T.EdgeEq(orient, frozenset({1})),))
        assert T.validate_coloring(prog, mono).ok


def test_program_json_round_trip():
    prog = fig_program()
    text = T.program_to_json(prog)
    assert T.program_from_json(text) == prog
    with pytest.raises(Exception):
        T.program_from_json("{")
    with pytest.raises(Exception):
        T.program_from_json('{"colors": 2, "conditions": [{"type": "nope", "set": [1]}]}')


def test_coloring_json_round_trip():
    col = fig_coloring()
    assert T.coloring_from_json(T.coloring_to_json(col)) == col


def test_reduced_net_best_effort_sweep_is_nongating():
    # Solving a reduced network outright is exponential and out of desk-scale
    # reach; assert only the honest outcome contract of a budgeted attempt:
    # it never claims a decision it did not complete.
    net = T.reduce(T.ConditionProgram(2, ()))
    out = solve_at_k(net, 1, SolveOptions(node_budget=2000))
    assert out.status in (Status.BUDGET_EXHAUSTED, Status.UNSOLVABLE_AT_K,
                          Status.SOLVABLE)
    if out.status is Status.SOLVABLE:
        from pfsnet.solver import verify_scheme

        assert verify_scheme(net, out.scheme).ok
