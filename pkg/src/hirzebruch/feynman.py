"""Pairing expansion of the operator route, germ by germ.

A product of normally ordered words has a combinatorial expectation value:
sum over all ways to glue every annihilating germ (positive step) to a
creating germ (negative step) of the opposite family, equal weight, in a
strictly later word.  Each glued pair contributes its weight; a completion
is a gluing that uses every germ.

Sandwiching the transfer-operator words between the two boundary words
turns each completion into a floor diagram: vertex-to-vertex pairs become
compact edges, boundary-to-vertex pairs become ends, boundary-to-boundary
pairs become pass-through strands.  Filtering completions by connectivity
of that diagram yields the connected count, which the plain matrix element
cannot see.
"""

from __future__ import annotations

from collections import namedtuple
from fractions import Fraction

from .core import DiscreteData, validate
from .floors import Edge, End, FloorDiagram, Passthrough
from .formal import FormalValue, aut_order
from .fock import (
    Bounds, BoundsError, MTerm, build_M, default_bounds, u_target,
)

Germ = namedtuple("Germ", "word slot family step label")
# word  index of the word inside the fragment (0 = left boundary)
# slot  position inside that word (distinguishes equal generators)
# label part identity for boundary germs, None for vertex germs


def mterm_germs(term: MTerm, word_index: int):
    """Germs of one transfer-operator word, creations first."""
    out = []
    slot = 0
    for d in term.moving_neg:
        out.append(Germ(word_index, slot, "moving", -d, None))
        slot += 1
    for d in term.fixed_neg:
        out.append(Germ(word_index, slot, "fixed", -d, None))
        slot += 1
    for d in term.fixed_pos:
        out.append(Germ(word_index, slot, "fixed", d, None))
        slot += 1
    for d in term.moving_pos:
        out.append(Germ(word_index, slot, "moving", d, None))
        slot += 1
    return out


def boundary_germs(data: DiscreteData, word_index_left, word_index_right):
    """Germs of the two boundary words.

    The left word annihilates with the magnitudes of the negative tangency
    parts (moving parts in the fixed family and vice versa); the right word
    creates with the positive parts, families swapped the same way.
    """
    left = []
    slot = 0
    for family, parts in (
        ("moving", data.moving_tangencies), ("fixed", data.fixed_tangencies)
    ):
        other = "fixed" if family == "moving" else "moving"
        for i, p in enumerate(parts):
            if p < 0:
                left.append(
                    Germ(word_index_left, slot, other, -p, (family, i))
                )
                slot += 1
    right = []
    slot = 0
    for family, parts in (
        ("moving", data.moving_tangencies), ("fixed", data.fixed_tangencies)
    ):
        other = "fixed" if family == "moving" else "moving"
        for i, p in enumerate(parts):
            if p > 0:
                right.append(
                    Germ(word_index_right, slot, other, -p, (family, i))
                )
                slot += 1
    return left, right


def fragment(data: DiscreteData, terms):
    """The germ words of boundary + vertex words, ready for gluing.

    `terms` is one MTerm per point condition, left to right.  Word 0 is the
    left boundary, words 1..n the vertices, word n+1 the right boundary.
    """
    n = data.points
    if len(terms) != n:
        raise ValueError(f"need {n} words, got {len(terms)}")
    for i, t in enumerate(terms):
        if t.psi != data.psi_powers[i]:
            raise ValueError(
                f"word {i} has psi {t.psi}, data wants {data.psi_powers[i]}"
            )
    left, right = boundary_germs(data, 0, n + 1)
    return [left] + [
        mterm_germs(t, i + 1) for i, t in enumerate(terms)
    ] + [right]


def completions(words):
    """All perfect gluings of a fragment's germs.

    Yields tuples of (annihilating germ, creating germ) pairs.  A pair must
    join opposite families at opposite steps, the creator strictly later.
    """
    germs = [g for w in words for g in w]
    poss = [g for g in germs if g.step > 0]
    negs = [g for g in germs if g.step < 0]
    if len(poss) != len(negs):
        return

    def rec(k, used, acc):
        if k == len(poss):
            yield tuple(acc)
            return
        p = poss[k]
        for j, q in enumerate(negs):
            if j in used:
                continue
            if q.word <= p.word:
                continue
            if q.family == p.family or q.step != -p.step:
                continue
            used.add(j)
            acc.append((p, q))
            yield from rec(k + 1, used, acc)
            acc.pop()
            used.remove(j)

    yield from rec(0, set(), [])


def wick_sum(words) -> Fraction:
    """Sum over completions of the product of glued weights.

    Equals the vacuum expectation of the concatenated words whenever each
    word is internally normally ordered.
    """
    total = Fraction(0)
    for comp in completions(words):
        w = 1
        for p, _ in comp:
            w *= p.step
        total += w
    return total


def to_floor_diagram(data: DiscreteData, terms, completion) -> FloorDiagram:
    """Read one completion as a floor diagram (vertex v = word v+1)."""
    n = data.points
    edges = []
    ends = []
    strands = []
    for p, q in completion:
        w = p.step
        p_vertex = 1 <= p.word <= n
        q_vertex = 1 <= q.word <= n
        if p_vertex and q_vertex:
            thick = "lo" if p.family == "moving" else "hi"
            edges.append(Edge(p.word - 1, q.word - 1, w, thick))
        elif p_vertex and not q_vertex:
            family, index = q.label
            ends.append(End(p.word - 1, family, index, w))
        elif q_vertex and not p_vertex:
            family, index = p.label
            ends.append(End(q.word - 1, family, index, -w))
        else:
            nf, ni = p.label
            pf, pi = q.label
            strands.append(Passthrough(nf, ni, pf, pi, w))
    return FloorDiagram(
        psi_powers=data.psi_powers,
        sizes=tuple(t.size for t in terms),
        genera=tuple(t.genus for t in terms),
        edges=tuple(edges), ends=tuple(ends), passthroughs=tuple(strands),
    )


def contributing_words(data: DiscreteData, oracle, bounds: Bounds):
    """Word tuples whose completion sum can contribute to the count.

    Walks the factors right to left, keeping the deterministic multiset of
    unglued creations; yields (terms, coefficient product) for every tuple
    that closes on the left boundary with the right grading.
    """
    n = data.points
    a_goal = data.base_degree
    h_goal = u_target(data)
    close = (data.side("fixed", -1), data.side("moving", -1))
    start = (data.side("moving", +1), data.side("fixed", +1))
    menus = {}
    for psi in set(data.psi_powers):
        rows = []
        for term in build_M(psi, data.twist, bounds):
            coeff = term.coefficient(oracle)
            if not coeff.is_zero():
                rows.append((term, coeff))
        menus[psi] = rows

    out = []

    def rec(i, t, u, fx, mv, path, acc):
        if i < 0:
            if t == a_goal and u == h_goal and (fx, mv) == close:
                out.append((tuple(reversed(path)), acc))
            return
        for term, coeff in menus[data.psi_powers[i]]:
            nt = t + term.t
            if nt > a_goal:
                continue
            nu = u + term.u
            if nu > h_goal + i:
                continue
            fx2 = _remove(fx, term.moving_pos)
            if fx2 is None:
                continue
            mv2 = _remove(mv, term.fixed_pos)
            if mv2 is None:
                continue
            fx3 = tuple(sorted(fx2 + term.fixed_neg))
            mv3 = tuple(sorted(mv2 + term.moving_neg))
            if sum(fx3) + sum(mv3) > bounds.w_max:
                continue
            path.append(term)
            rec(i - 1, nt, nu, fx3, mv3, path, acc * coeff)
            path.pop()

    rec(n - 1, 0, 0, start[0], start[1], [], FormalValue.rational(1))
    return out


def connected_invariant(data: DiscreteData, oracle, bounds=None,
                        unsafe=False) -> FormalValue:
    """The connected count through the pairing expansion.

    Every completion of every contributing word tuple is mapped to a floor
    diagram; only connected diagrams are kept.  Without the filter the same
    sum reproduces the disconnected matrix-element count.
    """
    errs = validate(data, connected=True)
    if errs:
        raise ValueError("; ".join(errs))
    return _filtered_sum(data, oracle, bounds, unsafe,
                         lambda d: d.is_connected())


def completion_sum(data: DiscreteData, oracle, bounds=None,
                   unsafe=False) -> FormalValue:
    """Unfiltered pairing expansion: must equal the disconnected count."""
    errs = validate(data, connected=False)
    if errs:
        raise ValueError("; ".join(errs))
    return _filtered_sum(data, oracle, bounds, unsafe, lambda d: True)


def _filtered_sum(data, oracle, bounds, unsafe, keep):
    need = default_bounds(data)
    if bounds is None:
        bounds = need
    elif not bounds.covers(need) and not unsafe:
        raise BoundsError(
            f"bounds {bounds} cannot be proven sufficient; need {need}"
        )
    # The boundary-word symmetry orders cancel against the count prefactor
    # (a signed multiset factors over its two signs), leaving one over the
    # product of all tangency weights.
    weight_norm = Fraction(1)
    for p in list(data.moving_tangencies) + list(data.fixed_tangencies):
        weight_norm /= abs(p)

    total = FormalValue.zero()
    for terms, coeff in contributing_words(data, oracle, bounds):
        words = fragment(data, terms)
        for comp in completions(words):
            diagram = to_floor_diagram(data, terms, comp)
            if not keep(diagram):
                continue
            w = 1
            for p, _ in comp:
                w *= p.step
            total = total + coeff * (weight_norm * w)
    return total


def _remove(partition, weights):
    """Multiset difference, None when some weight is missing."""
    rest = list(partition)
    for d in weights:
        if d not in rest:
            return None
        rest.remove(d)
    return tuple(rest)


def fragment_dot(data: DiscreteData, terms, completion, name="fragment"):
    """Graphviz form of one completion: words as boxes, glue edges dashed."""
    n = data.points
    out = []
    w = out.append
    w("graph %s {" % name)
    w("  rankdir=LR;")
    w('  w0 [shape=box, label="in"];')
    for i, t in enumerate(terms):
        w(
            '  w%d [shape=box, label="p=%d, s=%d, g=%d"];'
            % (i + 1, t.psi, t.size, t.genus)
        )
    w('  w%d [shape=box, label="out"];' % (n + 1))
    for p, q in completion:
        w(
            '  w%d -- w%d [style=dashed, label="%d"];'
            % (p.word, q.word, p.step)
        )
    w("}")
    return "\n".join(out) + "\n"
