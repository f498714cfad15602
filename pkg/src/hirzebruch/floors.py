"""Floor diagrams: the decorated graphs whose weighted count is the invariant.

A floor diagram for given discrete data places one vertex per point
condition, linearly ordered left to right.  Vertices carry a size (how much
of the base class the floor uses) and a genus; compact edges join two
vertices, ends realize the tangency conditions, and (in disconnected counts
only) pass-through strands pair one left and one right tangency part without
meeting any vertex.  Every compact edge has exactly one thickened half; an
end is thickened exactly when it realizes a moving tangency.

The local rules at a vertex v with psi power p, size s, genus h:

* number of thickened halves at v  =  p + 2 - 2s - h,
* signed weight sum of halves at v (left-pointing negative)  =  -twist * s.

Globally the sizes sum to base_degree, every tangency part is realized by
exactly one end (or strand), and

    #edges - #vertices + 1 + sum(vertex genera) - #strands  =  genus.

The weight of a diagram is the product of its compact edge weights times
the value of each vertex symbol, divided by the weight of each pass-through
strand and by the order of its parallel-edge symmetry group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import DiscreteData, validate
from .formal import FormalValue, VertexSymbol, aut_order


class InvalidDataError(ValueError):
    """Raised when discrete data fails validation."""


@dataclass(frozen=True, order=True)
class Edge:
    """Compact edge between vertices lo < hi; thick_end is 'lo' or 'hi'."""

    lo: int
    hi: int
    weight: int
    thick_end: str


@dataclass(frozen=True, order=True)
class End:
    """An end realizing tangency part `index` of the given family at `vertex`.

    part is the signed entry of the data (negative = pointing left).
    """

    vertex: int
    family: str
    index: int
    part: int

    @property
    def weight(self):
        return abs(self.part)

    @property
    def side(self):
        return "L" if self.part < 0 else "R"

    @property
    def thick(self):
        return self.family == "moving"


@dataclass(frozen=True, order=True)
class Passthrough:
    """Vertex-free strand joining a negative part to an equal positive part."""

    neg_family: str
    neg_index: int
    pos_family: str
    pos_index: int
    weight: int


@dataclass(frozen=True)
class FloorDiagram:
    psi_powers: tuple
    sizes: tuple
    genera: tuple
    edges: tuple
    ends: tuple
    passthroughs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))
        object.__setattr__(self, "ends", tuple(sorted(self.ends)))
        object.__setattr__(self, "passthroughs", tuple(sorted(self.passthroughs)))

    @property
    def points(self):
        return len(self.psi_powers)

    def graph_genus(self):
        return (
            len(self.edges) - self.points + 1
            + sum(self.genera) - len(self.passthroughs)
        )

    def is_connected(self):
        """Vertex graph connected, no strands (and at least one vertex)."""
        n = self.points
        if n == 0 or self.passthroughs:
            return False
        seen = {0}
        frontier = [0]
        adj = {i: set() for i in range(n)}
        for e in self.edges:
            adj[e.lo].add(e.hi)
            adj[e.hi].add(e.lo)
        while frontier:
            v = frontier.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == n

    def vertex_symbol(self, v) -> VertexSymbol:
        """The local tangency profile of vertex v as a formal symbol."""
        fl, fr, ml, mr = [], [], [], []
        for e in self.edges:
            if e.hi == v:
                (ml if e.thick_end == "hi" else fl).append(e.weight)
            if e.lo == v:
                (mr if e.thick_end == "lo" else fr).append(e.weight)
        for end in self.ends:
            if end.vertex != v:
                continue
            bucket = {
                ("moving", "L"): ml, ("moving", "R"): mr,
                ("fixed", "L"): fl, ("fixed", "R"): fr,
            }[(end.family, end.side)]
            bucket.append(end.weight)
        return VertexSymbol(
            genus=self.genera[v], psi=self.psi_powers[v],
            fixed_left=tuple(fl), fixed_right=tuple(fr),
            moving_left=tuple(ml), moving_right=tuple(mr),
        )

    def automorphism_order(self) -> int:
        """Order of the symmetry group: parallel identical edges may swap."""
        return aut_order(self.edges)


def is_valid(diagram: FloorDiagram, data: DiscreteData, connected=True) -> list:
    """All rule violations of `diagram` against `data`; empty means valid."""
    errs = []
    n = diagram.points
    if diagram.psi_powers != data.psi_powers:
        errs.append("psi powers disagree with data")
    if len(diagram.sizes) != n or len(diagram.genera) != n:
        errs.append("sizes/genera length mismatch")
        return errs
    if any(s < 0 for s in diagram.sizes) or any(g < 0 for g in diagram.genera):
        errs.append("sizes and vertex genera must be >= 0")
    if sum(diagram.sizes) != data.base_degree:
        errs.append(
            f"sizes sum to {sum(diagram.sizes)}, expected {data.base_degree}"
        )

    for e in diagram.edges:
        if not (0 <= e.lo < e.hi < n):
            errs.append(f"edge {e} out of order or out of range (loops forbidden)")
        if e.weight < 1:
            errs.append(f"edge {e} needs weight >= 1")
        if e.thick_end not in ("lo", "hi"):
            errs.append(f"edge {e} thick_end must be 'lo' or 'hi'")

    # every tangency part realized exactly once
    used = {}
    for end in diagram.ends:
        if not (0 <= end.vertex < n):
            errs.append(f"end {end} attached out of range")
        used.setdefault((end.family, end.index), []).append(end)
    for pt in diagram.passthroughs:
        used.setdefault((pt.neg_family, pt.neg_index), []).append(pt)
        used.setdefault((pt.pos_family, pt.pos_index), []).append(pt)
    for family, parts in (
        ("fixed", data.fixed_tangencies), ("moving", data.moving_tangencies)
    ):
        for i, part in enumerate(parts):
            hits = used.pop((family, i), [])
            if len(hits) != 1:
                errs.append(
                    f"{family}[{i}] realized {len(hits)} times, expected once"
                )
                continue
            hit = hits[0]
            if isinstance(hit, End) and hit.part != part:
                errs.append(f"end {hit} does not carry part value {part}")
    if used:
        errs.append(f"labels not in data: {sorted(used)}")

    for pt in diagram.passthroughs:
        if connected:
            errs.append("pass-through strands are disconnected-only")
        combos = {("fixed", "moving"), ("moving", "fixed")}
        if (pt.neg_family, pt.pos_family) not in combos:
            errs.append(f"strand {pt} must pair a fixed with a moving part")
        neg = _part_of(data, pt.neg_family, pt.neg_index)
        pos = _part_of(data, pt.pos_family, pt.pos_index)
        if neg is None or pos is None:
            continue
        if not (neg < 0 < pos and -neg == pos == pt.weight):
            errs.append(f"strand {pt} must join equal-weight opposite parts")

    if errs:
        return errs

    for v in range(n):
        try:
            sym = diagram.vertex_symbol(v)
        except ValueError as exc:
            errs.append(f"vertex {v}: {exc}")
            continue
        if sym.size != diagram.sizes[v]:
            errs.append(
                f"vertex {v}: thick-flag count gives size {sym.size}, "
                f"decorated size is {diagram.sizes[v]}"
            )
        if sym.flux != -data.twist * diagram.sizes[v]:
            errs.append(
                f"vertex {v}: signed weight sum {sym.flux} != "
                f"{-data.twist * diagram.sizes[v]}"
            )

    if diagram.graph_genus() != data.genus:
        errs.append(
            f"diagram genus {diagram.graph_genus()} != data genus {data.genus}"
        )
    if connected and not diagram.is_connected():
        errs.append("diagram not connected")
    return errs


def _part_of(data, family, index):
    parts = (
        data.fixed_tangencies if family == "fixed" else data.moving_tangencies
    )
    if 0 <= index < len(parts):
        return parts[index]
    return None


def multiplicity(diagram: FloorDiagram, oracle) -> FormalValue:
    """Weight of one diagram: edge weights times vertex values, divided by
    strand weights and the parallel-edge symmetry order."""
    out = FormalValue.rational(
        Fraction(
            _prod(e.weight for e in diagram.edges),
            _prod(pt.weight for pt in diagram.passthroughs)
            * diagram.automorphism_order(),
        )
    )
    for v in range(diagram.points):
        out = out * oracle.evaluate(diagram.vertex_symbol(v))
    return out


def _prod(it):
    out = 1
    for x in it:
        out *= x
    return out


# --------------------------------------------------------------------------
# enumeration


def weak_compositions(total, parts):
    """All tuples of `parts` nonneg ints summing to total."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def partitions(total, max_part=None):
    """Multisets of positive ints summing to total, as descending tuples."""
    if max_part is None:
        max_part = total
    if total == 0:
        yield ()
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in partitions(total - first, first):
            yield (first,) + rest


def _subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _strand_matchings(negs, poss, allow):
    """Partial matchings of tangency parts into pass-through strands.

    Yields (strands, leftover_negs, leftover_poss).  A pair is allowed when
    it joins a fixed with a moving part of equal magnitude.
    """
    if not allow or not negs:
        yield (), tuple(negs), tuple(poss)
        return
    fam0, idx0, mag0 = negs[0]
    rest = negs[1:]
    # leave the first negative part as an ordinary end
    for strands, ln, lp in _strand_matchings(rest, poss, allow):
        yield strands, (negs[0],) + ln, lp
    # or pair it with each compatible positive part
    for j, (famp, idxp, magp) in enumerate(poss):
        if famp != fam0 and magp == mag0:
            pt = Passthrough(fam0, idx0, famp, idxp, mag0)
            rem_pos = poss[:j] + poss[j + 1:]
            for strands, ln, lp in _strand_matchings(rest, rem_pos, allow):
                yield (pt,) + strands, ln, lp


def enumerate_diagrams(data: DiscreteData, connected=True):
    """Every valid floor diagram for `data`, each exactly once."""
    errs = validate(data, connected=connected)
    if errs:
        raise InvalidDataError("; ".join(errs))
    n = data.points
    negs = []
    poss = []
    for family in ("fixed", "moving"):
        parts = getattr(data, family + "_tangencies")
        for i, p in enumerate(parts):
            (negs if p < 0 else poss).append((family, i, abs(p)))

    out = []
    for strands, rem_negs, rem_poss in _strand_matchings(
        tuple(negs), tuple(poss), allow=not connected
    ):
        nstr = len(strands)
        if n == 0:
            # no vertices: everything must be carried by strands
            if not rem_negs and not rem_poss and data.genus == 1 - nstr:
                out.append(FloorDiagram((), (), (), (), (), strands))
            continue
        budget = data.genus - 1 + n + nstr
        if connected:
            budget = min(budget, data.genus)
        if budget < 0:
            continue
        for sizes in weak_compositions(data.base_degree, n):
            if any(
                data.psi_powers[v] + 2 - 2 * sizes[v] < 0 for v in range(n)
            ):
                continue
            out.extend(
                _sweep(data, sizes, budget, rem_negs, rem_poss, strands)
            )
    if connected:
        out = [d for d in out if d.is_connected()]
    return out


def _sweep(data, sizes, genus_budget, negs, poss, strands):
    """Left-to-right search over vertex genus, attachments, edge consumption
    and edge emission.  Open flags are keyed (source, weight,
    thick_at_consumer).  The final edge count must reach

        data.genus - 1 + points - sum(genera) + #strands,

    so along the way the edge count plus open-flag count may never exceed
    that target computed with all future vertex genera zero.
    """
    n = data.points
    twist = data.twist
    base_edges = data.genus - 1 + n + len(strands)
    found = []

    def rec(i, rem_negs, rem_poss, open_flags, edges, ends, genera):
        if i == n:
            if not rem_negs and not rem_poss and not open_flags \
                    and len(edges) == base_edges - sum(genera):
                found.append(
                    FloorDiagram(data.psi_powers, sizes, genera,
                                 tuple(edges), tuple(ends), strands)
                )
            return
        last = i == n - 1
        groups = sorted(open_flags)
        gmax = min(
            data.psi_powers[i] + 2 - 2 * sizes[i],
            genus_budget - sum(genera),
        )
        for gv in range(gmax + 1):
            new_genera = genera + (gv,)
            thick_budget = data.psi_powers[i] + 2 - 2 * sizes[i] - gv
            # largest edge count any completion of this branch may reach
            cap = base_edges - sum(new_genera)
            for ns in ([rem_negs] if last else _subsets(rem_negs)):
                for ps in ([rem_poss] if last else _subsets(rem_poss)):
                    ends_here = [
                        End(i, fam, idx, -mag) for fam, idx, mag in ns
                    ] + [
                        End(i, fam, idx, mag) for fam, idx, mag in ps
                    ]
                    thick_ends = sum(1 for e in ends_here if e.thick)
                    takes_options = [
                        [open_flags[g]] if last else range(open_flags[g] + 1)
                        for g in groups
                    ]
                    for takes in itertools.product(*takes_options):
                        thick_cons = sum(
                            t for t, (_, _, cth) in zip(takes, groups) if cth
                        )
                        thick_emit = thick_budget - thick_ends - thick_cons
                        if thick_emit < 0:
                            continue
                        consumed_w = sum(
                            t * w for t, (_, w, _) in zip(takes, groups)
                        )
                        emit_total = (
                            consumed_w
                            + sum(m for _, _, m in ns)
                            - sum(m for _, _, m in ps)
                            - twist * sizes[i]
                        )
                        if emit_total < 0:
                            continue
                        new_edges = list(edges)
                        for t, (src, w, cth) in zip(takes, groups):
                            for _ in range(t):
                                new_edges.append(
                                    Edge(src, i, w, "hi" if cth else "lo")
                                )
                        remaining = dict(open_flags)
                        for t, g in zip(takes, groups):
                            if t == remaining[g]:
                                del remaining[g]
                            else:
                                remaining[g] -= t
                        new_ends = ends + ends_here
                        nns = tuple(x for x in rem_negs if x not in ns)
                        nps = tuple(x for x in rem_poss if x not in ps)
                        if last or emit_total == 0:
                            if emit_total or thick_emit:
                                continue
                            if len(new_edges) + sum(remaining.values()) > cap:
                                continue
                            rec(i + 1, nns, nps, remaining,
                                new_edges, new_ends, new_genera)
                            continue
                        room = (
                            cap - len(new_edges) - sum(remaining.values())
                        )
                        if room <= 0:
                            continue
                        for weights in partitions(emit_total):
                            if len(weights) > room or len(weights) < 1:
                                continue
                            if thick_emit > len(weights):
                                continue
                            for flags in _thick_assignments(weights, thick_emit):
                                nxt = dict(remaining)
                                for w, src_thick in flags:
                                    key = (i, w, not src_thick)
                                    nxt[key] = nxt.get(key, 0) + 1
                                rec(i + 1, nns, nps, nxt,
                                    new_edges, new_ends, new_genera)
        return

    rec(0, tuple(negs), tuple(poss), {}, [], [], ())
    return found


def _thick_assignments(weights, thick_total):
    """Ways to mark `thick_total` of the weight multiset source-thick.

    Identical weights are interchangeable, so only counts per weight value
    matter.  Yields tuples of (weight, source_thick).
    """
    values = sorted(set(weights))
    counts = [weights.count(v) for v in values]

    def rec(j, left):
        if j == len(values):
            if left == 0:
                yield ()
            return
        for take in range(min(counts[j], left) + 1):
            for rest in rec(j + 1, left - take):
                yield tuple(
                    (values[j], pos < take) for pos in range(counts[j])
                ) + rest

    yield from rec(0, thick_total)


def invariant(data: DiscreteData, oracle, connected=True) -> FormalValue:
    """The count: sum of multiplicities over all floor diagrams."""
    total = FormalValue.zero()
    for d in enumerate_diagrams(data, connected=connected):
        total = total + multiplicity(d, oracle)
    return total


# --------------------------------------------------------------------------
# degeneration cross-check


def degeneration_check(data: DiscreteData, split, oracle):
    """Split the point conditions after position `split` and re-assemble the
    (disconnected) count from pairs of smaller counts glued along a new
    tangency profile.  Returns (direct, reassembled, difference).
    """
    n = data.points
    if not (0 <= split <= n):
        raise InvalidDataError(f"split must lie in 0..{n}")
    direct = invariant(data, oracle, connected=False)

    neg_fixed = data.side("fixed", -1)
    pos_fixed = data.side("fixed", +1)
    neg_moving = data.side("moving", -1)
    pos_moving = data.side("moving", +1)

    total = FormalValue.zero()
    for left_base in range(data.base_degree + 1):
        right_base = data.base_degree - left_base
        glue_weight = data.fiber_degree + data.twist * right_base
        for to_fixed_sum in range(glue_weight + 1):
            for lam in partitions(to_fixed_sum):
                for eta in partitions(glue_weight - to_fixed_sum):
                    # lam joins the left fixed profile, eta the left moving one
                    lf = tuple(sorted([-m for m in neg_fixed] + list(lam)))
                    lm = tuple(sorted([-m for m in neg_moving] + list(eta)))
                    rf = tuple(sorted([-m for m in eta] + list(pos_fixed)))
                    rm = tuple(sorted([-m for m in lam] + list(pos_moving)))
                    lpsi = data.psi_powers[:split]
                    rpsi = data.psi_powers[split:]
                    lgen = (
                        split + sum(lpsi) + 1 - len(lm) - 2 * left_base
                    )
                    rgen = (
                        (n - split) + sum(rpsi) + 1 - len(rm) - 2 * right_base
                    )
                    left = DiscreteData(
                        twist=data.twist, base_degree=left_base, genus=lgen,
                        fixed_tangencies=lf, moving_tangencies=lm,
                        psi_powers=lpsi,
                    )
                    right = DiscreteData(
                        twist=data.twist, base_degree=right_base, genus=rgen,
                        fixed_tangencies=rf, moving_tangencies=rm,
                        psi_powers=rpsi,
                    )
                    lv = invariant(left, oracle, connected=False)
                    if lv.is_zero():
                        continue
                    rv = invariant(right, oracle, connected=False)
                    if rv.is_zero():
                        continue
                    scale = Fraction(
                        _prod(lam) * _prod(eta),
                        aut_order(lam) * aut_order(eta),
                    )
                    total = total + lv * rv * scale
    return direct, total, direct - total


# --------------------------------------------------------------------------
# serialization


def diagram_records(diagram: FloorDiagram) -> str:
    """Line-oriented text form; see parse_records for the grammar."""
    lines = [
        f"floor-diagram points={diagram.points} genus={diagram.graph_genus()}"
    ]
    for v in range(diagram.points):
        lines.append(
            f"vertex {v} psi={diagram.psi_powers[v]} "
            f"size={diagram.sizes[v]} genus={diagram.genera[v]}"
        )
    for e in diagram.edges:
        side = "L" if e.thick_end == "lo" else "R"
        lines.append(f"edge {e.lo} {e.hi} {e.weight} thick={side}")
    for end in diagram.ends:
        kind = "thick" if end.thick else "plain"
        lines.append(
            f"end {end.vertex} {end.side} {end.weight} {kind} "
            f"{end.family}[{end.index}]"
        )
    for pt in diagram.passthroughs:
        lines.append(
            f"passthrough {pt.neg_family}[{pt.neg_index}] "
            f"{pt.pos_family}[{pt.pos_index}] {pt.weight}"
        )
    return "\n".join(lines) + "\n"


def parse_records(text) -> FloorDiagram:
    """Inverse of diagram_records.

    Grammar (one record per line):
      floor-diagram points=N genus=G
      vertex V psi=P size=S genus=H
      edge U V W thick=L|R          (L = thick half at the lower vertex)
      end V L|R W thick|plain FAMILY[INDEX]
      passthrough FAMILY[INDEX] FAMILY[INDEX] W
    """
    psi = {}
    sizes = {}
    genera = {}
    edges = []
    ends = []
    strands = []
    declared_genus = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "floor-diagram":
                kv = dict(t.split("=") for t in tok[1:])
                declared_genus = int(kv["genus"])
            elif tok[0] == "vertex":
                v = int(tok[1])
                kv = dict(t.split("=") for t in tok[2:])
                psi[v] = int(kv["psi"])
                sizes[v] = int(kv["size"])
                genera[v] = int(kv["genus"])
            elif tok[0] == "edge":
                lo, hi, w = int(tok[1]), int(tok[2]), int(tok[3])
                side = tok[4].split("=")[1]
                edges.append(
                    Edge(lo, hi, w, "lo" if side == "L" else "hi")
                )
            elif tok[0] == "end":
                v, side, w = int(tok[1]), tok[2], int(tok[3])
                family, index = _parse_label(tok[5])
                part = -w if side == "L" else w
                ends.append(End(v, family, index, part))
            elif tok[0] == "passthrough":
                nf, ni = _parse_label(tok[1])
                pf, pi = _parse_label(tok[2])
                strands.append(Passthrough(nf, ni, pf, pi, int(tok[3])))
            else:
                raise ValueError(f"unknown record {tok[0]!r}")
        except (IndexError, KeyError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    n = len(psi)
    if sorted(psi) != list(range(n)):
        raise ValueError("vertex records must cover 0..points-1")
    diagram = FloorDiagram(
        tuple(psi[v] for v in range(n)),
        tuple(sizes[v] for v in range(n)),
        tuple(genera[v] for v in range(n)),
        tuple(edges), tuple(ends), tuple(strands),
    )
    if declared_genus is not None and diagram.graph_genus() != declared_genus:
        raise ValueError(
            f"declared genus {declared_genus} != computed {diagram.graph_genus()}"
        )
    return diagram


def _parse_label(text):
    family, _, rest = text.partition("[")
    if family not in ("fixed", "moving") or not rest.endswith("]"):
        raise ValueError(f"bad part label {text!r}")
    return family, int(rest[:-1])


def to_dot(diagram: FloorDiagram, name="floor") -> str:
    """Graphviz form: vertices left to right, thick halves drawn bold.

    Compact edges carry their weight as label and a filled dot on the thick
    half; ends become point-shaped leaves, bold when moving.  Pass-through
    strands are drawn vertex-free between their two leaves.
    """
    out = []
    w = out.append
    w("graph %s {" % name)
    w("  rankdir=LR;")
    w("  node [shape=circle];")
    for v in range(diagram.points):
        w(
            '  v%d [label="p=%d, s=%d, g=%d"];'
            % (v, diagram.psi_powers[v], diagram.sizes[v], diagram.genera[v])
        )
    for i, e in enumerate(diagram.edges):
        dot_at = "tail" if e.thick_end == "lo" else "head"
        w(
            '  v%d -- v%d [label="%d", penwidth=2, %slabel="X"];'
            % (e.lo, e.hi, e.weight, dot_at)
        )
    for i, end in enumerate(diagram.ends):
        leaf = "t%d" % i
        w('  %s [shape=point, label=""];' % leaf)
        pen = 3 if end.thick else 1
        pair = (
            (leaf, "v%d" % end.vertex) if end.side == "L"
            else ("v%d" % end.vertex, leaf)
        )
        w(
            '  %s -- %s [label="%s[%d] w=%d", penwidth=%d];'
            % (pair + (end.family, end.index, end.weight, pen))
        )
    for i, pt in enumerate(diagram.passthroughs):
        a, b = "pa%d" % i, "pb%d" % i
        w('  %s [shape=point, label=""]; %s [shape=point, label=""];' % (a, b))
        w(
            '  %s -- %s [label="%s[%d]>%s[%d] w=%d", penwidth=2];'
            % (a, b, pt.neg_family, pt.neg_index,
               pt.pos_family, pt.pos_index, pt.weight)
        )
    w("}")
    return "\n".join(out) + "\n"
