"""Operator route to the counts: two boson families and transfer operators.

The algebra has two commuting Heisenberg families, indexed by nonzero
integer steps.  Generators of the same family commute; across families

    [G(fixed, n), G(moving, m)] = n  when n + m = 0,  else 0.

Negative steps create, positive steps annihilate the vacuum.  A basis
vector of the Fock space is a pair of partitions (fixed-family creation
weights, moving-family creation weights).

For each psi power there is a transfer operator: a sum of normally ordered
words graded by t (size) and u (genus direction).  A word with vertex genus
h and d negative generators sits in degree u = h - 1 + d; the empty word
(degree u = -1) appears for psi power 0.  The count equals a single graded
matrix element of the product of transfer operators between the tangency
boundary vectors, rescaled by the tangency symmetry factor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import DiscreteData, validate
from .formal import FormalValue, VertexSymbol, aut_order


class BoundsError(ValueError):
    """User truncation bounds too small for a provably complete answer."""


@dataclass(frozen=True, order=True)
class Generator:
    family: str  # "fixed" or "moving"
    step: int    # nonzero; negative steps create

    def __post_init__(self):
        if self.family not in ("fixed", "moving"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.step == 0:
            raise ValueError("step 0 is not a generator")


def commutator(x: Generator, y: Generator) -> int:
    """The scalar [x, y]; nonzero only across families at opposite steps."""
    if x.family != y.family and x.step + y.step == 0:
        return x.step
    return 0


def normal_order(word):
    """Rewrite a product of generators as a combination of normally ordered
    words (creators left of annihilators, each block sorted).

    Returns dict mapping canonical word tuples to Fraction coefficients.
    """
    word = tuple(word)
    return {w: Fraction(c) for w, c in _normal_order(word).items() if c}


@lru_cache(maxsize=None)
def _normal_order(word):
    for i in range(len(word) - 1):
        x, y = word[i], word[i + 1]
        if x.step > 0 and y.step < 0:
            swapped = word[:i] + (y, x) + word[i + 2:]
            out = dict(_normal_order(swapped))
            c = commutator(x, y)
            if c:
                dropped = word[:i] + word[i + 2:]
                for w, q in _normal_order(dropped).items():
                    out[w] = out.get(w, 0) + c * q
            return out
    # already normally ordered: canonicalize each block
    neg = tuple(sorted(g for g in word if g.step < 0))
    pos = tuple(sorted(g for g in word if g.step > 0))
    return {neg + pos: 1}


def vacuum_expectation(word) -> Fraction:
    """<vac| word |vac>: the scalar part of the normal ordering."""
    return normal_order(word).get((), Fraction(0))


def state_inner_product(bra, ket) -> Fraction:
    """Pairing of two normalized basis vectors.

    A basis vector is a pair (fixed-weights, moving-weights) of partitions;
    it is the corresponding creation word divided by both partition
    symmetry orders.  The pairing swaps families: the fixed slot of the bra
    meets the moving slot of the ket.
    """
    bf, bm = tuple(sorted(bra[0])), tuple(sorted(bra[1]))
    kf, km = tuple(sorted(ket[0])), tuple(sorted(ket[1]))
    if bf != km or bm != kf:
        return Fraction(0)
    return Fraction(_prod(bf) * _prod(bm), aut_order(bf) * aut_order(bm))


def state_inner_product_slow(bra, ket) -> Fraction:
    """Same pairing computed from the algebra; cross-check for tests."""
    word = (
        [Generator("fixed", d) for d in sorted(bra[0])]
        + [Generator("moving", d) for d in sorted(bra[1])]
        + [Generator("fixed", -d) for d in sorted(ket[0])]
        + [Generator("moving", -d) for d in sorted(ket[1])]
    )
    norm = (
        aut_order(bra[0]) * aut_order(bra[1])
        * aut_order(ket[0]) * aut_order(ket[1])
    )
    return vacuum_expectation(word) / norm


def _prod(it):
    out = 1
    for x in it:
        out *= x
    return out


# --------------------------------------------------------------------------
# transfer operators


@dataclass(frozen=True)
class Bounds:
    """Truncation box for transfer-operator words.

    t_max   largest size exponent kept,
    u_max   largest genus-direction exponent kept,
    w_max   largest total creation (and annihilation) weight per word,
            which also caps every single step.
    """

    t_max: int
    u_max: int
    w_max: int

    def covers(self, other: "Bounds") -> bool:
        return (
            self.t_max >= other.t_max
            and self.u_max >= other.u_max
            and self.w_max >= other.w_max
        )


@dataclass(frozen=True)
class MTerm:
    """One graded word of a transfer operator.

    The word is stored as four sorted magnitude tuples.  Its coefficient is
    the value of the matching vertex symbol divided by the symmetry order
    of each signed index multiset.
    """

    fixed_neg: tuple
    fixed_pos: tuple
    moving_neg: tuple
    moving_pos: tuple
    genus: int
    psi: int

    @property
    def neg_count(self):
        return len(self.fixed_neg) + len(self.moving_neg)

    @property
    def symbol(self) -> VertexSymbol:
        return VertexSymbol(
            genus=self.genus, psi=self.psi,
            fixed_left=self.fixed_neg, fixed_right=self.fixed_pos,
            moving_left=self.moving_neg, moving_right=self.moving_pos,
        )

    @property
    def size(self):
        return self.symbol.size

    @property
    def t(self):
        return self.size

    @property
    def u(self):
        return self.genus - 1 + self.neg_count

    def coefficient(self, oracle) -> FormalValue:
        denom = (
            aut_order(self.fixed_neg) * aut_order(self.fixed_pos)
            * aut_order(self.moving_neg) * aut_order(self.moving_pos)
        )
        return oracle.evaluate(self.symbol) / denom

    def as_word(self):
        """The generator tuple, normally ordered."""
        return tuple(
            [Generator("moving", -d) for d in sorted(self.moving_neg, reverse=True)]
            + [Generator("fixed", -d) for d in sorted(self.fixed_neg, reverse=True)]
        ) + tuple(
            [Generator("fixed", d) for d in sorted(self.fixed_pos)]
            + [Generator("moving", d) for d in sorted(self.moving_pos)]
        )


def _partitions(total, max_part):
    if total == 0:
        yield ()
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - first, first):
            yield (first,) + rest


def _multisets_of_len(length, max_sum, max_part=None):
    """Descending tuples of `length` positive ints with sum <= max_sum."""
    if max_part is None:
        max_part = max_sum
    if length == 0:
        yield ()
        return
    top = min(max_part, max_sum - (length - 1))
    for first in range(top, 0, -1):
        for rest in _multisets_of_len(length - 1, max_sum - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def build_M(psi, twist, bounds: Bounds):
    """All words of the transfer operator for one psi power within bounds.

    Returns a tuple of MTerm.  Grading and shape constraints:
    size s >= 0, genus h >= 0, moving-count = psi + 2 - 2s - h,
    total step sum = -twist * s.
    """
    terms = []
    for s in range(min(bounds.t_max, (psi + 2) // 2) + 1):
        for h in range(min(psi + 2 - 2 * s, bounds.u_max + 1) + 1):
            nb = psi + 2 - 2 * s - h
            if nb < 0:
                continue
            for bneg_len in range(nb + 1):
                bpos_len = nb - bneg_len
                aneg_budget = bounds.u_max + 1 - h - bneg_len
                if aneg_budget < 0:
                    continue
                for bneg in _multisets_of_len(bneg_len, bounds.w_max):
                    for alen in range(aneg_budget + 1):
                        for aneg in _multisets_of_len(
                            alen, bounds.w_max - sum(bneg)
                        ):
                            for bpos in _multisets_of_len(
                                bpos_len, bounds.w_max
                            ):
                                apos_sum = (
                                    sum(bneg) + sum(aneg) - sum(bpos)
                                    - twist * s
                                )
                                if apos_sum < 0:
                                    continue
                                if sum(bpos) + apos_sum > bounds.w_max:
                                    continue
                                for apos in _partitions(
                                    apos_sum, bounds.w_max
                                ):
                                    terms.append(MTerm(
                                        fixed_neg=tuple(sorted(aneg)),
                                        fixed_pos=tuple(sorted(apos)),
                                        moving_neg=tuple(sorted(bneg)),
                                        moving_pos=tuple(sorted(bpos)),
                                        genus=h, psi=psi,
                                    ))
    return tuple(terms)


def default_bounds(data: DiscreteData) -> Bounds:
    """Provably sufficient truncation for `data`.

    Sizes sum to base_degree, so t <= base_degree.  Every factor
    contributes u >= -1, so each stays <= h + (points - 1).  The weight
    flowing through any cut is at most fiber_degree + twist * base_degree.
    """
    h = (
        data.genus
        + len(data.side("fixed", -1)) + len(data.side("moving", -1))
        - 1
    )
    return Bounds(
        t_max=data.base_degree,
        u_max=max(h + data.points - 1, 0),
        w_max=data.fiber_degree + data.twist * data.base_degree,
    )


def u_target(data: DiscreteData) -> int:
    """Genus-direction exponent extracted for `data` (may be -1)."""
    return (
        data.genus
        + len(data.side("fixed", -1)) + len(data.side("moving", -1))
        - 1
    )


def matrix_element(data: DiscreteData, oracle, bounds=None) -> FormalValue:
    """Graded matrix element of the transfer-operator product.

    Applies the factors right to left to states keyed
    (t, u, fixed-partition, moving-partition), then closes against the
    left boundary vector.  The boundary dictionary: the fixed slot of the
    ket carries the positive moving tangencies, its moving slot the
    positive fixed ones; closure demands the mirrored multisets of the
    negative tangencies.
    """
    errs = validate(data, connected=False)
    if errs:
        raise ValueError("; ".join(errs))
    need = default_bounds(data)
    if bounds is None:
        bounds = need
    elif not bounds.covers(need):
        raise BoundsError(
            f"bounds {bounds} cannot be proven sufficient; need {need}"
        )
    return _matrix_element(data, oracle, bounds)


def unsafe_matrix_element(data, oracle, bounds) -> FormalValue:
    """matrix_element without the sufficiency guard (explicitly unsafe)."""
    errs = validate(data, connected=False)
    if errs:
        raise ValueError("; ".join(errs))
    return _matrix_element(data, oracle, bounds)


def _matrix_element(data, oracle, bounds):
    n = data.points
    a_goal = data.base_degree
    h_goal = u_target(data)
    close_fixed = data.side("fixed", -1)
    close_moving = data.side("moving", -1)
    start_fixed = data.side("moving", +1)
    start_moving = data.side("fixed", +1)

    start_coeff = FormalValue.rational(
        Fraction(1, aut_order(start_fixed) * aut_order(start_moving))
    )
    states = {(0, 0, start_fixed, start_moving): start_coeff}
    prepared = {}
    for i in range(n - 1, -1, -1):
        psi = data.psi_powers[i]
        if psi not in prepared:
            rows = []
            for term in build_M(psi, data.twist, bounds):
                coeff = term.coefficient(oracle)
                if coeff.is_zero():
                    continue
                rows.append((
                    term.t, term.u, term.fixed_neg, term.fixed_pos,
                    term.moving_neg, term.moving_pos, coeff,
                ))
            prepared[psi] = rows
        new = {}
        for (t, u, fx, mv), acc in states.items():
            for dt, du, fneg, fpos, mneg, mpos, coeff in prepared[psi]:
                nt = t + dt
                if nt > a_goal:
                    continue
                nu = u + du
                # factors still to come can each lower u by at most 1
                if nu > h_goal + i:
                    continue
                hit = _absorb(fx, mpos)
                if hit is None:
                    continue
                fx2, f1 = hit
                hit = _absorb(mv, fpos)
                if hit is None:
                    continue
                mv2, f2 = hit
                fx3 = tuple(sorted(fx2 + fneg))
                mv3 = tuple(sorted(mv2 + mneg))
                if sum(fx3) + sum(mv3) > bounds.w_max:
                    continue
                add = acc * coeff * (f1 * f2)
                key = (nt, nu, fx3, mv3)
                cur = new.get(key)
                new[key] = add if cur is None else cur + add
        states = {k: v for k, v in new.items() if not v.is_zero()}
        if not states:
            break

    total = FormalValue.zero()
    closing = FormalValue.rational(_prod(close_fixed) * _prod(close_moving))
    for (t, u, fx, mv), acc in states.items():
        if t == a_goal and u == h_goal and fx == close_fixed \
                and mv == close_moving:
            total = total + acc * closing
    return total


def _absorb(partition, weights):
    """Annihilate `weights` out of `partition`; (rest, factor) or None.

    Each annihilated step d contributes d times the number of copies still
    present, taken one after the other.
    """
    rest = list(partition)
    factor = 1
    for d in weights:
        count = rest.count(d)
        if not count:
            return None
        factor *= d * count
        rest.remove(d)
    return tuple(sorted(rest)), factor


def invariant(data: DiscreteData, oracle, bounds=None) -> FormalValue:
    """The disconnected count via the operator route.

    Equals the tangency symmetry order divided by the tangency weight
    product, times the graded matrix element.
    """
    pre = Fraction(
        aut_order(data.moving_tangencies) * aut_order(data.fixed_tangencies),
        _prod(abs(p) for p in data.moving_tangencies)
        * _prod(abs(p) for p in data.fixed_tangencies),
    )
    return matrix_element(data, oracle, bounds) * pre
