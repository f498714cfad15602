"""Discrete data for a stationary descendant count on a Hirzebruch surface.

A problem instance fixes the surface F_twist, a curve class (base_degree
copies of the base section plus fiber_degree fibers, the latter determined
by the tangency profile), the genus, tangency conditions along the two
horizontal boundary sections, and one psi power per point condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


@dataclass(frozen=True)
class DiscreteData:
    """Input data of one count.

    twist            Hirzebruch surface index (F_twist), >= 0
    base_degree      coefficient of the base section class, >= 0
    genus            arithmetic genus (may be negative for disconnected counts)
    fixed_tangencies sorted nonzero ints: boundary tangency at prescribed
                     points, sign = which section (negative left, positive right)
    moving_tangencies sorted nonzero ints: tangency at unconstrained points
    psi_powers       one entry per point condition, in the order the points
                     are stacked; entry j is the psi power at point j
    """

    twist: int
    base_degree: int
    genus: int
    fixed_tangencies: tuple = ()
    moving_tangencies: tuple = ()
    psi_powers: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "fixed_tangencies", tuple(self.fixed_tangencies))
        object.__setattr__(self, "moving_tangencies", tuple(self.moving_tangencies))
        object.__setattr__(self, "psi_powers", tuple(self.psi_powers))

    @property
    def points(self) -> int:
        return len(self.psi_powers)

    @property
    def fiber_degree(self) -> int:
        """Number of fibers in the class: total positive tangency weight."""
        return sum(p for p in self.fixed_tangencies if p > 0) + sum(
            p for p in self.moving_tangencies if p > 0
        )

    def side(self, family, sign):
        """Magnitudes of one family on one side, sorted ascending.

        family in {"fixed", "moving"}, sign in {-1, +1}.
        """
        src = self.fixed_tangencies if family == "fixed" else self.moving_tangencies
        return tuple(sorted(abs(p) for p in src if (p < 0) == (sign < 0)))


def validate(data: DiscreteData, connected=True) -> list:
    """All violations of the defining constraints; empty list means valid.

    Connected counts need at least one point condition and nonnegative genus;
    disconnected ones (which arise as factors of a degeneration) may have
    neither.
    """
    errs = []
    if data.twist < 0:
        errs.append("twist must be >= 0")
    if data.base_degree < 0:
        errs.append("base_degree must be >= 0")
    for name in ("fixed_tangencies", "moving_tangencies"):
        t = getattr(data, name)
        if any(not isinstance(p, int) or p == 0 for p in t):
            errs.append(f"{name} entries must be nonzero integers")
        elif tuple(sorted(t)) != t:
            errs.append(f"{name} must be sorted ascending")
    if any(not isinstance(p, int) or p < 0 for p in data.psi_powers):
        errs.append("psi_powers entries must be integers >= 0")
    if connected:
        if data.points < 1:
            errs.append("connected count needs at least one point condition")
        if data.genus < 0:
            errs.append("connected count needs genus >= 0")
    if errs:
        return errs

    balance = (
        sum(data.fixed_tangencies)
        + sum(data.moving_tangencies)
        + data.twist * data.base_degree
    )
    if balance != 0:
        errs.append(
            f"tangency weights unbalanced: sum(fixed) + sum(moving) "
            f"+ twist*base_degree = {balance}, expected 0"
        )
    lhs = len(data.moving_tangencies) + 2 * data.base_degree + data.genus - 1
    rhs = data.points + sum(data.psi_powers)
    if lhs != rhs:
        errs.append(
            f"dimension count off: moving-count + 2*base_degree + genus - 1 "
            f"= {lhs} but points + sum(psi) = {rhs}"
        )
    return errs


def newton_fan(data: DiscreteData):
    """The balanced fan of the data, as a sorted tuple of ((x, y), mult).

    One downward fiber vector and one up-slanted vector per unit of
    base_degree, plus one horizontal vector per tangency part (signed by
    its side).  Vectors are not divided by their own gcd; the expansion
    factor of an entry is expansion_factor(vector).
    """
    counts = {}

    def add(vec):
        counts[vec] = counts.get(vec, 0) + 1

    for _ in range(data.base_degree):
        add((0, -1))
        add((data.twist, 1))
    for p in list(data.fixed_tangencies) + list(data.moving_tangencies):
        add((p, 0))
    return tuple(sorted(counts.items()))


def expansion_factor(vec) -> int:
    """gcd of the coordinates: the lattice length the vector is stretched by."""
    x, y = vec
    return gcd(abs(x), abs(y))


def fan_is_balanced(fan) -> bool:
    sx = sum(v[0] * m for v, m in fan)
    sy = sum(v[1] * m for v, m in fan)
    return sx == 0 and sy == 0


def dual_polygon(data: DiscreteData):
    """Lattice polygon dual to the fan: (vertices, degenerate flag).

    Each fan vector (x, y) contributes the edge vector (-y, x); edges are
    laid head to tail in counterclockwise angular order starting from (0, 0).
    When every fan vector is parallel to the rest the "polygon" collapses to
    a segment and the degenerate flag is set.
    """
    edges = []
    for (x, y), mult in newton_fan(data):
        edges.append((-y * mult, x * mult))
    if not edges:
        return ((0, 0),), True

    import math

    edges.sort(key=lambda e: math.atan2(e[1], e[0]))
    verts = [(0, 0)]
    for ex, ey in edges:
        px, py = verts[-1]
        verts.append((px + ex, py + ey))
    if verts[-1] != (0, 0):
        raise AssertionError("dual polygon does not close; fan unbalanced?")
    verts.pop()

    cross = set()
    first = edges[0]
    for e in edges[1:]:
        cross.add(first[0] * e[1] - first[1] * e[0])
    degenerate = cross <= {0}
    # drop repeated collinear corners for a clean vertex list
    cleaned = []
    m = len(verts)
    for i, v in enumerate(verts):
        ax, ay = verts[i - 1]
        bx, by = verts[(i + 1) % m]
        if (v[0] - ax) * (by - v[1]) - (v[1] - ay) * (bx - v[0]) != 0 or degenerate:
            cleaned.append(v)
    return tuple(cleaned if cleaned else verts), degenerate
