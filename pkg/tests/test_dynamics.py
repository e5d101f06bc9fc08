"""Transition systems, both transfer operators, orbit sums, JSON I/O."""

import math
import random

import pytest

from troptherm.cli import _gen_system
from troptherm.dynamics import (
    PathRecord,
    SystemValidationError,
    TransitionSystem,
    adjoint_apply,
    birkhoff_sum,
    bousch_apply,
    discretize_doubling,
    from_map,
    from_sft,
    system_from_json,
    system_to_json,
)
from troptherm.tropical_core import NEG_INF, TropValue, TropVector, as_trop, t_add, t_mul
from troptherm.tropical_measures import Density


def tv(*xs):
    return TropVector([as_trop(x) for x in xs])


def _rand_vector(rng, n):
    return TropVector(
        [NEG_INF if rng.random() < 0.1 else as_trop(rng.uniform(-5, 5)) for _ in range(n)]
    )


def test_constructor_fixa(fixa):
    assert fixa.n == 2
    assert len(fixa.arcs) == 4
    assert fixa.arc_weight(0, 1) == -1.0
    assert fixa.arc_weight(1, 1) == -3.0
    assert not fixa.deterministic
    assert fixa.surjective_like


def test_constructor_flags_and_errors():
    ident = from_sft([[1, 0], [0, 1]], [[2.0, 0.0], [0.0, 5.0]])
    assert ident.deterministic
    with pytest.raises(SystemValidationError):
        from_sft([[0, 0], [1, 1]], [[0.0] * 2] * 2)  # zero row
    with pytest.raises(SystemValidationError):
        from_sft([[1, 0], [1, 0]], [[0.0] * 2] * 2)  # zero column
    with pytest.raises(SystemValidationError):
        TransitionSystem(2, [(0, 1, 1.0), (0, 1, 2.0)])  # duplicate arc
    with pytest.raises(SystemValidationError):
        TransitionSystem(2, [(0, 2, 1.0)])
    with pytest.raises(SystemValidationError):
        TransitionSystem(1, [(0, 0, math.inf)])
    with pytest.raises(SystemValidationError):
        TransitionSystem(0, [])


def test_from_map_flags(fixc):
    assert fixc.deterministic
    assert fixc.surjective_like
    assert fixc.image(0) == 1 and fixc.image(2) == 0
    squash = from_map([0, 0], [1.0, 1.0])
    assert squash.deterministic
    assert not squash.surjective_like
    ident = from_map([0, 1], [0.5, -0.5])
    assert all(s == t for s, t, _ in ident.arcs)


def test_discretize_doubling_order2(fixb):
    assert fixb.n == 4
    assert fixb.labels == ("00", "01", "10", "11")
    # sample points 0, 1/4, 1/2, 3/4 of cos(2 pi t)
    assert abs(fixb.arc_weight(0, 0) - 1.0) <= 1e-12
    assert abs(fixb.arc_weight(1, 2)) <= 1e-12
    assert abs(fixb.arc_weight(2, 0) + 1.0) <= 1e-12
    assert abs(fixb.arc_weight(3, 2)) <= 1e-12
    # shift structure: word s goes to (2s mod 4) and (2s mod 4)+1
    assert sorted(t for t, _ in fixb.successors(1)) == [2, 3]
    assert fixb.max_in_degree() == 2


def test_discretize_doubling_edge_orders():
    flat = discretize_doubling(1, lambda t: 3.25)
    assert flat.n == 2 and len(flat.arcs) == 4
    assert all(w == 3.25 for _, _, w in flat.arcs)
    cube = discretize_doubling(3, lambda t: t)
    assert cube.n == 8 and len(cube.arcs) == 16
    with pytest.raises(SystemValidationError):
        discretize_doubling(0, lambda t: 0.0)


def test_bousch_examples(fixa, fixc):
    assert bousch_apply(fixa, tv(0, -1)) == tv(0, -1)
    bottom = TropVector([NEG_INF, NEG_INF])
    assert bousch_apply(fixa, bottom) == bottom
    # weights normalized by Q=2: (-1, 0, 1) on the 3-cycle
    norm = from_map([1, 2, 0], [-1.0, 0.0, 1.0])
    assert bousch_apply(norm, tv(0, -1, -1)) == tv(0, -1, -1)
    with pytest.raises(ValueError):
        bousch_apply(fixa, tv(0.0))


def test_adjoint_examples(fixa):
    assert adjoint_apply(fixa, Density(tv(0, -1))).values == tv(0, -1)
    norm = from_map([1, 2, 0], [-1.0, 0.0, 1.0])
    assert adjoint_apply(norm, Density(tv(0, 1, 1))).values == tv(0, 1, 1)
    bottom = Density(TropVector([NEG_INF, NEG_INF]))
    assert adjoint_apply(fixa, bottom).values == bottom.values


def test_adjoint_fixes_top(fixa):
    top = Density.top(2)
    assert adjoint_apply(fixa, top).is_top


def test_birkhoff_sum(fixa, fixc):
    assert birkhoff_sum(fixc, PathRecord([0, 1, 2])) == 3.0
    assert birkhoff_sum(fixc, PathRecord([2])) == 0.0
    assert birkhoff_sum(fixa, PathRecord([0, 1, 0])) == -2.0
    with pytest.raises(ValueError):
        birkhoff_sum(fixc, PathRecord([0, 2]))


def test_json_round_trip(fixb):
    data = system_to_json(fixb)
    again = system_from_json(data)
    assert again == fixb
    with pytest.raises(SystemValidationError):
        system_from_json({"n": 2})
    with pytest.raises(SystemValidationError):
        system_from_json({"n": 2, "arcs": [[0, 1, 1.0]], "extra": 1})
    with pytest.raises(SystemValidationError):
        system_from_json({"n": 2, "arcs": [[0, 1.5, 0.0]]})
    with pytest.raises(SystemValidationError):
        system_from_json([1, 2])


def test_operator_tropical_linearity():
    rng = random.Random(101)
    for seed in range(40):
        sys = _gen_system(rng.randrange(10**6), None, False)
        u = _rand_vector(rng, sys.n)
        v = _rand_vector(rng, sys.n)
        a = as_trop(rng.uniform(-3, 3))
        b = as_trop(rng.uniform(-3, 3))
        combo = TropVector(
            [t_add(t_mul(a, x), t_mul(b, y)) for x, y in zip(u, v)]
        )
        lhs = bousch_apply(sys, combo)
        lu = bousch_apply(sys, u)
        lv = bousch_apply(sys, v)
        rhs = TropVector(
            [t_add(t_mul(a, x), t_mul(b, y)) for x, y in zip(lu, lv)]
        )
        for x, y in zip(lhs, rhs):
            if x.is_finite and y.is_finite:
                assert abs(x.finite - y.finite) <= 1e-12
            else:
                assert x == y


def test_operator_nonexpansive_and_monotone():
    rng = random.Random(202)
    for _ in range(40):
        sys = _gen_system(rng.randrange(10**6), None, False)
        u = TropVector([as_trop(rng.uniform(-5, 5)) for _ in range(sys.n)])
        v = TropVector([as_trop(rng.uniform(-5, 5)) for _ in range(sys.n)])
        gap = max(abs(x.finite - y.finite) for x, y in zip(u, v))
        lu = bousch_apply(sys, u)
        lv = bousch_apply(sys, v)
        assert all(x.is_finite for x in lu)  # gen systems are strongly connected
        assert max(abs(x.finite - y.finite) for x, y in zip(lu, lv)) <= gap + 1e-12
        dominated = TropVector([as_trop(x.finite - rng.uniform(0, 2)) for x in u])
        ld = bousch_apply(sys, dominated)
        assert all(x.finite <= y.finite + 1e-12 for x, y in zip(ld, lu))


def test_adjoint_duality():
    # sup_y (L u)(y) + b(y)  ==  sup_x u(x) + (L* b)(x)
    rng = random.Random(303)
    for _ in range(40):
        sys = _gen_system(rng.randrange(10**6), None, False)
        u = _rand_vector(rng, sys.n)
        b = Density(_rand_vector(rng, sys.n))
        lu = bousch_apply(sys, u)
        lb = adjoint_apply(sys, b)
        lhs = NEG_INF
        for x, w in zip(lu, b.values):
            lhs = t_add(lhs, t_mul(x, w))
        rhs = NEG_INF
        for x, w in zip(u, lb.values):
            rhs = t_add(rhs, t_mul(x, w))
        if lhs.is_finite and rhs.is_finite:
            assert abs(lhs.finite - rhs.finite) <= 1e-12
        else:
            assert lhs == rhs
