import random
from fractions import Fraction

import pytest

from hirzebruch import feynman, floors, fock
from hirzebruch.core import DiscreteData
from hirzebruch.floors import Edge, End, FloorDiagram
from hirzebruch.fock import Generator, MTerm, vacuum_expectation
from hirzebruch.formal import VertexOracle

BUILTIN = VertexOracle("builtin")
FORMAL = VertexOracle("formal")


def _random_block_word(rng):
    """A normally ordered word: creators first, then annihilators."""
    def block(sign):
        return [
            Generator(rng.choice(("fixed", "moving")), sign * rng.randint(1, 3))
            for _ in range(rng.randint(0, 3))
        ]
    return tuple(block(-1) + block(+1))


def test_wick_sum_matches_vacuum_expectation():
    rng = random.Random(20260825)
    for _ in range(300):
        words = [_random_block_word(rng) for _ in range(rng.randint(1, 4))]
        germs = []
        for i, w in enumerate(words):
            germs.append(tuple(
                feynman.Germ(word=i, slot=j, family=g.family,
                             step=g.step, label=None)
                for j, g in enumerate(w)
            ))
        flat = [g for w in words for g in w]
        assert feynman.wick_sum(germs) == vacuum_expectation(flat)


# ---------------------------------------------------------------------------
# the four-point regression instance


PATH4 = DiscreteData(
    twist=1, base_degree=3, genus=0,
    fixed_tangencies=(-2, 1), moving_tangencies=(-2, -1, 1),
    psi_powers=(0, 1, 3, 0),
)

TERMS4 = (
    MTerm(fixed_neg=(), fixed_pos=(), moving_neg=(2,), moving_pos=(2,),
          genus=0, psi=0),
    MTerm(fixed_neg=(2,), fixed_pos=(2,), moving_neg=(1,), moving_pos=(),
          genus=0, psi=1),
    MTerm(fixed_neg=(2,), fixed_pos=(1, 1), moving_neg=(2,), moving_pos=(),
          genus=0, psi=3),
    MTerm(fixed_neg=(), fixed_pos=(), moving_neg=(1,), moving_pos=(1,),
          genus=0, psi=0),
)


def test_fragment_completions_and_weight():
    words = feynman.fragment(PATH4, TERMS4)
    assert len(words) == 6  # two boundary words + four vertex words
    found = list(feynman.completions(words))
    assert len(found) == 4
    assert feynman.wick_sum(words) == 64


def test_completions_map_to_two_diagrams_twice_each():
    words = feynman.fragment(PATH4, TERMS4)
    diagrams = [
        feynman.to_floor_diagram(PATH4, TERMS4, c)
        for c in feynman.completions(words)
    ]
    path = FloorDiagram(
        psi_powers=(0, 1, 3, 0), sizes=(0, 1, 2, 0), genera=(0, 0, 0, 0),
        edges=(Edge(0, 1, 2, "lo"), Edge(1, 2, 2, "hi"), Edge(2, 3, 1, "hi")),
        ends=(End(0, "moving", 0, -2), End(1, "moving", 1, -1),
              End(2, "fixed", 0, -2), End(2, "fixed", 1, 1),
              End(3, "moving", 2, 1)),
    )
    star = FloorDiagram(
        psi_powers=(0, 1, 3, 0), sizes=(0, 1, 2, 0), genera=(0, 0, 0, 0),
        edges=(Edge(0, 2, 2, "lo"), Edge(1, 2, 2, "hi"), Edge(2, 3, 1, "hi")),
        ends=(End(0, "moving", 0, -2), End(1, "fixed", 0, -2),
              End(1, "moving", 1, -1), End(2, "fixed", 1, 1),
              End(3, "moving", 2, 1)),
    )
    assert sorted(diagrams.count(d) for d in {path, star}) == [2, 2]
    for d in diagrams:
        assert floors.is_valid(d, PATH4, connected=True) == []


def test_glue_pairs_cross_family_and_point_left():
    words = feynman.fragment(PATH4, TERMS4)
    for completion in feynman.completions(words):
        for annihilator, creator in completion:
            assert annihilator.word < creator.word
            assert annihilator.family != creator.family
            assert annihilator.step == -creator.step
            assert annihilator.step > 0


# ---------------------------------------------------------------------------
# route equality


CASES = [
    DiscreteData(twist=0, base_degree=1, genus=0,
                 moving_tangencies=(-1, 1), psi_powers=(0, 0, 0)),
    DiscreteData(twist=1, base_degree=1, genus=0,
                 fixed_tangencies=(-1,), psi_powers=(0,)),
    DiscreteData(twist=1, base_degree=2, genus=1,
                 fixed_tangencies=(-2,), moving_tangencies=(-1, 1),
                 psi_powers=(0, 1, 2)),
    DiscreteData(twist=0, base_degree=1, genus=0,
                 fixed_tangencies=(-2,), moving_tangencies=(-1, 1, 2),
                 psi_powers=(0, 0, 0, 0)),
]


@pytest.mark.parametrize("data", CASES)
def test_unfiltered_expansion_is_the_disconnected_count(data):
    got = feynman.completion_sum(data, FORMAL)
    want = floors.invariant(data, FORMAL, connected=False)
    assert (got - want).is_zero()


@pytest.mark.parametrize("data", CASES)
def test_connected_filter_matches_diagram_route(data):
    got = feynman.connected_invariant(data, FORMAL)
    want = floors.invariant(data, FORMAL, connected=True)
    assert (got - want).is_zero()


def test_connected_invariant_for_seven_points():
    data = DiscreteData(twist=0, base_degree=2, genus=0,
                        moving_tangencies=(-1, -1, 1, 1),
                        psi_powers=(0,) * 7)
    assert feynman.connected_invariant(data, BUILTIN).as_rational() == 48


def test_fragment_dot_smoke():
    words = feynman.fragment(PATH4, TERMS4)
    completion = next(iter(feynman.completions(words)))
    dot = feynman.fragment_dot(PATH4, TERMS4, completion)
    assert dot.startswith("graph fragment {")
    assert "style=dashed" in dot
    assert dot.count("shape=box") >= len(TERMS4)
