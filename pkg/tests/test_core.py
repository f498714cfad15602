import pytest

from hirzebruch.core import (
    DiscreteData,
    dual_polygon,
    expansion_factor,
    fan_is_balanced,
    newton_fan,
    validate,
)

GOOD = DiscreteData(
    twist=1, base_degree=3, genus=0,
    fixed_tangencies=(-2, 1), moving_tangencies=(-2, -1, 1),
    psi_powers=(0, 1, 3, 0),
)


def test_valid_instance():
    assert validate(GOOD) == []
    assert GOOD.points == 4
    assert GOOD.fiber_degree == 2
    assert GOOD.side("fixed", -1) == (2,)
    assert GOOD.side("fixed", +1) == (1,)
    assert GOOD.side("moving", -1) == (1, 2)
    assert GOOD.side("moving", +1) == (1,)


@pytest.mark.parametrize(
    "change, fragment",
    [
        (dict(twist=-1), "twist"),
        (dict(base_degree=-2), "base_degree"),
        (dict(fixed_tangencies=(0, 1), moving_tangencies=(-1, -2, -1)),
         "nonzero"),
        (dict(fixed_tangencies=(1, -2)), "sorted"),
        (dict(psi_powers=(0, -1, 3, 2)), "psi_powers"),
        (dict(moving_tangencies=(-2, -1, 2)), "unbalanced"),
        (dict(psi_powers=(0, 0, 0)), "dimension"),
        (dict(genus=-1), "genus"),
        (dict(psi_powers=()), "point condition"),
    ],
)
def test_validate_flags_each_violation(change, fragment):
    from dataclasses import replace
    bad = replace(GOOD, **change)
    errs = validate(bad, connected=True)
    assert errs, f"expected a violation for {change}"
    assert any(fragment in e for e in errs)


def test_disconnected_relaxations():
    # negative genus and zero points are fine for disconnected factors
    d = DiscreteData(twist=0, base_degree=0, genus=0,
                     fixed_tangencies=(-2,), moving_tangencies=(2,))
    assert validate(d, connected=True) != []
    assert validate(d, connected=False) == []
    d = DiscreteData(twist=0, base_degree=1, genus=-1,
                     moving_tangencies=(-1, 1), psi_powers=(0, 0))
    assert validate(d, connected=False) == []


def test_newton_fan_shape():
    fan = dict(newton_fan(GOOD))
    assert fan[(0, -1)] == 3        # one per unit of base degree
    assert fan[(1, 1)] == 3         # slanted by the twist
    assert fan[(-2, 0)] == 2        # both weight-2 left parts merge
    assert fan[(-1, 0)] == 1
    assert fan[(1, 0)] == 2
    assert fan_is_balanced(newton_fan(GOOD))


def test_expansion_factor():
    assert expansion_factor((0, -1)) == 1
    assert expansion_factor((-2, 0)) == 2
    assert expansion_factor((4, 6)) == 2


@pytest.mark.parametrize(
    "data",
    [
        GOOD,
        DiscreteData(twist=0, base_degree=2, genus=1,
                     fixed_tangencies=(-1, -1, 1, 1), psi_powers=(0, 2)),
        DiscreteData(twist=2, base_degree=1, genus=0,
                     moving_tangencies=(-1, -1, -1, 1), psi_powers=(0,) * 5),
    ],
)
def test_fan_always_balances(data):
    assert validate(data, connected=True) == []
    assert fan_is_balanced(newton_fan(data))


def test_dual_polygon_closes_and_has_area():
    verts, degenerate = dual_polygon(GOOD)
    assert not degenerate
    assert len(verts) >= 3
    # shoelace: twice the (positive, counterclockwise) area
    twice = sum(
        verts[i][0] * verts[(i + 1) % len(verts)][1]
        - verts[(i + 1) % len(verts)][0] * verts[i][1]
        for i in range(len(verts))
    )
    assert twice > 0


def test_dual_polygon_degenerate_for_fiber_class():
    d = DiscreteData(twist=0, base_degree=0, genus=0,
                     moving_tangencies=(-3, 3), psi_powers=(0,))
    verts, degenerate = dual_polygon(d)
    assert degenerate
    assert all(v[0] == 0 for v in verts)  # a vertical segment
