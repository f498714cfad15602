"""Exact scalars for curve counts: rationals and formal vertex symbols.

Every quantity the package computes is either a plain rational number or a
rational linear combination of products of "vertex symbols".  A vertex symbol
records the local shape of one floor of a curve: its genus, the power of the
point condition carried by the floor (psi power), and the tangency profile
along the two boundary sections, split into left/right (incoming/outgoing)
and fixed/moving families.

Values of symbols are supplied by an oracle.  Three oracles are provided:

* FORMAL   -- every symbol stays formal (a monomial of its own),
* BUILTIN  -- the psi=0 symbols are evaluated (the two weight-one shapes and
              the vanishing of everything else), psi>0 symbols stay formal,
* TABLE    -- user-supplied values from a file, falling back on BUILTIN.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def aut_order(parts) -> int:
    """Order of the symmetry group of a multiset: prod of multiplicity factorials."""
    out = 1
    run = 1
    prev = None
    for p in sorted(parts):
        if p == prev:
            run += 1
            out *= run
        else:
            run = 1
            prev = p
    return out


def _sorted_pos(parts, field):
    t = tuple(sorted(parts))
    if any((not isinstance(p, int)) or p <= 0 for p in t):
        raise ValueError(f"{field} must be positive integers, got {parts!r}")
    return t


@dataclass(frozen=True, order=True)
class VertexSymbol:
    """Local invariant of a single floor.

    Tangency magnitudes are stored as sorted tuples of positive integers.
    ``fixed_*`` entries are the non-thick flags (tangency at a prescribed
    boundary point), ``moving_*`` the thick ones (unconstrained tangency);
    ``left``/``right`` is the side the flag points to.
    """

    genus: int
    psi: int
    fixed_left: tuple = ()
    fixed_right: tuple = ()
    moving_left: tuple = ()
    moving_right: tuple = ()

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("vertex genus must be >= 0")
        if self.psi < 0:
            raise ValueError("psi power must be >= 0")
        for f in ("fixed_left", "fixed_right", "moving_left", "moving_right"):
            object.__setattr__(self, f, _sorted_pos(getattr(self, f), f))
        if (self.psi + 2 - self.genus - self.moving_count) % 2:
            raise ValueError(f"no integer size for {self}")
        if self.size < 0:
            raise ValueError(f"negative size for {self}")

    @property
    def moving_count(self) -> int:
        return len(self.moving_left) + len(self.moving_right)

    @property
    def size(self) -> int:
        # thick-flag count = psi + 2 - 2*size - genus, solved for size
        return (self.psi + 2 - self.genus - self.moving_count) // 2

    @property
    def flux(self) -> int:
        """Signed weight sum over all flags (left counts negative)."""
        return (
            sum(self.fixed_right) + sum(self.moving_right)
            - sum(self.fixed_left) - sum(self.moving_left)
        )

    def render(self) -> str:
        def grp(t):
            return ",".join(str(x) for x in t)
        return (
            f"<g={self.genus} p={self.psi}"
            f"|fL={grp(self.fixed_left)} mL={grp(self.moving_left)}"
            f"|fR={grp(self.fixed_right)} mR={grp(self.moving_right)}>"
        )

    def __str__(self):
        return self.render()


class FormalValue:
    """A rational linear combination of products of vertex symbols.

    Monomials are sorted tuples of VertexSymbol.  The empty monomial is the
    rational unit, so plain numbers embed as FormalValue.rational(q).
    Supports +, -, *, scalar division, and equality.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c:
                    self.terms[tuple(sorted(mono))] = c

    @classmethod
    def rational(cls, q) -> "FormalValue":
        return cls({(): Fraction(q)})

    @classmethod
    def symbol(cls, sym: VertexSymbol) -> "FormalValue":
        return cls({(sym,): Fraction(1)})

    @classmethod
    def zero(cls) -> "FormalValue":
        return cls()

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(m == () for m in self.terms)

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"not a plain rational: {self}")
        return self.terms.get((), Fraction(0))

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            elif m in out:
                del out[m]
        v = FormalValue.__new__(FormalValue)
        v.terms = out
        return v

    __radd__ = __add__

    def __neg__(self):
        v = FormalValue.__new__(FormalValue)
        v.terms = {m: -c for m, c in self.terms.items()}
        return v

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                s = out.get(m, Fraction(0)) + c1 * c2
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        v = FormalValue.__new__(FormalValue)
        v.terms = out
        return v

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FormalValue):
            other = other.as_rational()
        q = Fraction(other)
        v = FormalValue.__new__(FormalValue)
        v.terms = {m: c / q for m, c in self.terms.items()}
        return v

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def coefficient(self, monomial) -> Fraction:
        return self.terms.get(tuple(sorted(monomial)), Fraction(0))

    def substitute(self, oracle) -> "FormalValue":
        """Re-evaluate every symbol through `oracle` and recombine."""
        total = FormalValue.zero()
        for mono, coeff in self.terms.items():
            part = FormalValue.rational(coeff)
            for sym in mono:
                part = part * oracle.evaluate(sym)
            total = total + part
        return total

    def render(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            body = "*".join(s.render() for s in mono)
            if mono == ():
                bits.append(str(c))
            elif c == 1:
                bits.append(body)
            else:
                bits.append(f"{c}*{body}")
        return " + ".join(bits)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"FormalValue({self.render()})"


def _coerce(x) -> FormalValue:
    if isinstance(x, FormalValue):
        return x
    if isinstance(x, (int, Fraction)):
        return FormalValue.rational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to FormalValue")


# --------------------------------------------------------------------------
# oracles


def _builtin_value(sym: VertexSymbol):
    """Closed-form value for psi=0 symbols, None when the symbol stays formal.

    The only nonzero psi=0 shapes are the weight-balanced vertical strand
    (genus 0, one moving tangency of equal weight on each side) and the
    size-one floor with no moving tangency (genus 0); both count 1.  Every
    other psi=0 symbol vanishes.
    """
    if sym.psi != 0:
        return None
    if (
        sym.genus == 0
        and not sym.fixed_left and not sym.fixed_right
        and len(sym.moving_left) == 1
        and sym.moving_left == sym.moving_right
    ):
        return FormalValue.rational(1)
    if sym.genus == 0 and sym.size == 1 and sym.moving_count == 0:
        return FormalValue.rational(1)
    return FormalValue.zero()


class VertexOracle:
    """Maps vertex symbols to values.

    mode "formal": every symbol evaluates to itself.
    mode "builtin": psi=0 symbols get their closed-form value, others formal.
    mode "table": values looked up in a user table, BUILTIN as fallback.
    """

    def __init__(self, mode="builtin", table=None):
        if mode not in ("formal", "builtin", "table"):
            raise ValueError(f"unknown oracle mode {mode!r}")
        if mode == "table" and table is None:
            raise ValueError("table mode needs a table")
        self.mode = mode
        self.table = dict(table) if table else {}

    def evaluate(self, sym: VertexSymbol) -> FormalValue:
        if self.mode == "formal":
            return FormalValue.symbol(sym)
        if self.mode == "table" and sym in self.table:
            return FormalValue.rational(self.table[sym])
        v = _builtin_value(sym)
        if v is None:
            return FormalValue.symbol(sym)
        return v


def load_table(path) -> dict:
    """Parse a symbol-value table.

    One record per line: whitespace-separated ``key=value`` fields
    ``g`` ``p`` ``fL`` ``mL`` ``fR`` ``mR`` ``value``, where the four
    tangency fields are comma-separated positive magnitudes (empty for none)
    and ``value`` is an integer or ``p/q``.  Blank lines and ``#`` comments
    are skipped.
    """
    table = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = {}
            for tok in line.split():
                if "=" not in tok:
                    raise ValueError(f"{path}:{lineno}: bad token {tok!r}")
                key, _, val = tok.partition("=")
                fields[key] = val
            try:
                sym = VertexSymbol(
                    genus=int(fields["g"]),
                    psi=int(fields["p"]),
                    fixed_left=_parse_parts(fields.get("fL", "")),
                    moving_left=_parse_parts(fields.get("mL", "")),
                    fixed_right=_parse_parts(fields.get("fR", "")),
                    moving_right=_parse_parts(fields.get("mR", "")),
                )
                table[sym] = Fraction(fields["value"])
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return table


def _parse_parts(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(int(x) for x in text.split(","))
