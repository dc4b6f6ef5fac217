"""Exact scalars, Laurent polynomials and Novikov field elements.

Everything here is exact: coefficients are ``fractions.Fraction`` or
elements of a prime field, group elements are integer multiples of the
generator λ₀, and Novikov elements are quotients of Laurent polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Iterator, Sequence


# ---------------------------------------------------------------------------
# extended rationals


@total_ordering
class Infinity:
    """Signed infinity that compares correctly against Fractions and ints."""

    __slots__ = ("sign",)

    def __init__(self, sign: int = 1):
        self.sign = 1 if sign > 0 else -1

    def __neg__(self):
        return NEG_INF if self.sign > 0 else INF

    def __eq__(self, other):
        return isinstance(other, Infinity) and other.sign == self.sign

    def __lt__(self, other):
        if isinstance(other, Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __gt__(self, other):
        if isinstance(other, Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __le__(self, other):
        return self == other or self < other

    def __ge__(self, other):
        return self == other or self > other

    def __add__(self, other):
        if isinstance(other, Infinity) and other.sign != self.sign:
            raise ArithmeticError("inf - inf")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return -self

    def __hash__(self):
        return hash(("inf", self.sign))

    def __repr__(self):
        return "inf" if self.sign > 0 else "-inf"


INF = Infinity(1)
NEG_INF = Infinity(-1)


def is_infinite(x) -> bool:
    return isinstance(x, Infinity)


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions and strings such as "3/7" or "-2"."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# coefficient fields


class GF:
    """Element of the prime field F_p."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _other(self, o):
        if isinstance(o, GF):
            return o.v
        if isinstance(o, int):
            return o
        if isinstance(o, Fraction):
            return o.numerator * pow(o.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, o):
        w = self._other(o)
        return NotImplemented if w is NotImplemented else GF(self.v + w, self.p)

    __radd__ = __add__

    def __sub__(self, o):
        w = self._other(o)
        return NotImplemented if w is NotImplemented else GF(self.v - w, self.p)

    def __rsub__(self, o):
        w = self._other(o)
        return NotImplemented if w is NotImplemented else GF(w - self.v, self.p)

    def __mul__(self, o):
        w = self._other(o)
        return NotImplemented if w is NotImplemented else GF(self.v * w, self.p)

    __rmul__ = __mul__

    def __truediv__(self, o):
        w = self._other(o)
        if w is NotImplemented:
            return NotImplemented
        if w % self.p == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return GF(self.v * pow(w, -1, self.p), self.p)

    def __rtruediv__(self, o):
        w = self._other(o)
        if w is NotImplemented:
            return NotImplemented
        return GF(w, self.p) / self

    def __neg__(self):
        return GF(-self.v, self.p)

    def __pow__(self, n: int):
        if n < 0:
            if not self.v:
                raise ZeroDivisionError("zero has no inverse")
            return GF(pow(self.v, -n * (self.p - 2), self.p), self.p)
        return GF(pow(self.v, n, self.p), self.p)

    def __bool__(self):
        return self.v != 0

    def __eq__(self, o):
        w = self._other(o)
        if w is NotImplemented:
            return False
        return (self.v - w) % self.p == 0

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"{self.v}"


@dataclass(frozen=True)
class Field:
    """The coefficient field κ: rationals (p = 0) or F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def parse(cls, spec) -> "Field":
        if isinstance(spec, Field):
            return spec
        if spec in (None, 0, "Q", "QQ", "rationals", "q"):
            return cls(0)
        if isinstance(spec, int):
            return cls(spec)
        s = str(spec).strip().upper()
        for prefix in ("GF", "F_", "F", "Z/"):
            if s.startswith(prefix) and s[len(prefix):].isdigit():
                return cls(int(s[len(prefix):]))
        if s.isdigit():
            return cls(int(s))
        raise ValueError(f"unknown field {spec!r}")

    @property
    def kind(self) -> str:
        return "prime-field" if self.p else "rationals"

    def __call__(self, x):
        if self.p:
            if isinstance(x, GF):
                return x
            if isinstance(x, str):
                x = Fraction(x)
            if isinstance(x, Fraction):
                return GF(x.numerator * pow(x.denominator, -1, self.p), self.p)
            return GF(int(x), self.p)
        if isinstance(x, GF):
            raise TypeError("prime field element used over the rationals")
        return to_fraction(x)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def random(self, rng, nonzero: bool = False, bound: int = 5):
        """A small random scalar; ``rng`` is a ``random.Random``."""
        while True:
            if self.p:
                x = self(rng.randrange(self.p))
            else:
                x = Fraction(rng.randint(-bound, bound), rng.randint(1, 3))
            if x or not nonzero:
                return x

    def to_json(self, x):
        if self.p:
            return x.v
        return fraction_str(x)

    def __str__(self):
        return f"GF({self.p})" if self.p else "QQ"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, int(math.isqrt(n)) + 1))


# ---------------------------------------------------------------------------
# translation group


@dataclass(frozen=True)
class TranslationGroup:
    """Γ = {0} (rank 0) or λ₀ℤ (rank 1); elements stored as integers m ↔ mλ₀."""

    lambda0: Fraction | None = None

    def __post_init__(self):
        if self.lambda0 is not None:
            object.__setattr__(self, "lambda0", to_fraction(self.lambda0))
            if self.lambda0 <= 0:
                raise ValueError("λ₀ must be positive")

    @property
    def rank(self) -> int:
        return 0 if self.lambda0 is None else 1

    def value(self, m: int) -> Fraction:
        if self.lambda0 is None:
            if m:
                raise ValueError("the trivial group has only 0")
            return Fraction(0)
        return m * self.lambda0

    def normalize(self, a: Fraction) -> Fraction:
        """Representative of a + Γ in [0, λ₀) (identity for Γ = {0})."""
        if self.lambda0 is None:
            return Fraction(a)
        return Fraction(a) - self.lambda0 * math.floor(Fraction(a) / self.lambda0)

    def shift_to(self, a: Fraction) -> int:
        """The m with a - mλ₀ in [0, λ₀)."""
        if self.lambda0 is None:
            return 0
        return math.floor(Fraction(a) / self.lambda0)

    def count_in(self, lo, hi, lo_closed: bool = True, hi_closed: bool = True) -> int:
        """Number of g ∈ Γ in the interval with the given endpoints."""
        if hi < lo:
            return 0
        if self.lambda0 is None:
            ok_lo = 0 >= lo if lo_closed else 0 > lo
            ok_hi = 0 <= hi if hi_closed else 0 < hi
            return int(ok_lo and ok_hi)
        lo_m = Fraction(lo) / self.lambda0
        hi_m = Fraction(hi) / self.lambda0
        first = math.ceil(lo_m) if lo_closed else math.floor(lo_m) + 1
        last = math.floor(hi_m) if hi_closed else math.ceil(hi_m) - 1
        return max(0, last - first + 1)

    def lattice_points(self, lo, hi) -> range:
        """Multipliers m with mλ₀ in the closed interval [lo, hi]."""
        if self.lambda0 is None:
            return range(0, 1) if lo <= 0 <= hi else range(0)
        return range(math.ceil(Fraction(lo) / self.lambda0), math.floor(Fraction(hi) / self.lambda0) + 1)

    def to_json(self):
        return {"lambda0": None if self.lambda0 is None else fraction_str(self.lambda0)}


# ---------------------------------------------------------------------------
# Laurent polynomials: the group ring Λ = κ[Γ] for rank-1 Γ


class LaurentPoly:
    """Finite sum Σ c_m T^m with integer exponents (T^m stands for T^{mλ₀})."""

    __slots__ = ("field", "low", "c")

    def __init__(self, field: Field, low: int, coeffs: Sequence):
        lo, hi = 0, len(coeffs)
        while lo < hi and not coeffs[lo]:
            lo += 1
        while hi > lo and not coeffs[hi - 1]:
            hi -= 1
        self.field = field
        self.c = tuple(coeffs[lo:hi])
        self.low = low + lo if self.c else 0

    @classmethod
    def from_dict(cls, field: Field, terms: dict) -> "LaurentPoly":
        terms = {int(m): field(v) for m, v in terms.items() if field(v)}
        if not terms:
            return cls(field, 0, ())
        lo, hi = min(terms), max(terms)
        zero = field.zero
        return cls(field, lo, [terms.get(m, zero) for m in range(lo, hi + 1)])

    @classmethod
    def monomial(cls, field: Field, coeff, m: int = 0) -> "LaurentPoly":
        return cls(field, m, (field(coeff),))

    @property
    def high(self) -> int:
        return self.low + len(self.c) - 1

    def __bool__(self):
        return bool(self.c)

    def terms(self) -> Iterator[tuple[int, object]]:
        for i, a in enumerate(self.c):
            if a:
                yield self.low + i, a

    def to_dict(self) -> dict:
        return dict(self.terms())

    def coeff(self, m: int):
        i = m - self.low
        if 0 <= i < len(self.c):
            return self.c[i]
        return self.field.zero

    def span(self) -> int:
        return self.high - self.low if self.c else 0

    def is_monomial(self) -> bool:
        return len(self.c) == 1

    def _coerce(self, o) -> "LaurentPoly":
        if isinstance(o, LaurentPoly):
            return o
        return LaurentPoly(self.field, 0, (self.field(o),))

    def __add__(self, o):
        if isinstance(o, NovikovElem):
            return NotImplemented
        o = self._coerce(o)
        if not o.c:
            return self
        if not self.c:
            return o
        lo = min(self.low, o.low)
        hi = max(self.high, o.high)
        zero = self.field.zero
        out = [zero] * (hi - lo + 1)
        for i, a in enumerate(self.c):
            out[self.low - lo + i] = a
        for i, a in enumerate(o.c):
            j = o.low - lo + i
            out[j] = out[j] + a
        return LaurentPoly(self.field, lo, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.field, self.low, [-a for a in self.c])

    def __sub__(self, o):
        if isinstance(o, NovikovElem):
            return NotImplemented
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        if isinstance(o, NovikovElem):
            return NotImplemented
        if not isinstance(o, LaurentPoly):
            s = self.field(o)
            return LaurentPoly(self.field, self.low, [a * s for a in self.c])
        if not self.c or not o.c:
            return LaurentPoly(self.field, 0, ())
        if len(o.c) == 1:
            s = o.c[0]
            return LaurentPoly(self.field, self.low + o.low, [a * s for a in self.c])
        if len(self.c) == 1:
            s = self.c[0]
            return LaurentPoly(self.field, self.low + o.low, [s * b for b in o.c])
        zero = self.field.zero
        out = [zero] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(o.c):
                if b:
                    out[i + j] = out[i + j] + a * b
        return LaurentPoly(self.field, self.low + o.low, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ValueError("only monomials are invertible in Λ")
            return LaurentPoly(self.field, -self.low * (-n), (self.field.one / self.c[0] ** (-n),))
        out = LaurentPoly.monomial(self.field, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, m: int) -> "LaurentPoly":
        return LaurentPoly(self.field, self.low + m, self.c) if self.c else self

    def scale(self, s) -> "LaurentPoly":
        return self * self.field(s)

    def conj(self) -> "LaurentPoly":
        if not self.c:
            return self
        return LaurentPoly(self.field, -self.high, self.c[::-1])

    def __eq__(self, o):
        if isinstance(o, NovikovElem):
            return o == self
        if not isinstance(o, LaurentPoly):
            try:
                o = self._coerce(o)
            except TypeError:
                return False
        return self.low == o.low and self.c == o.c

    def __hash__(self):
        return hash((self.low, self.c))

    def __repr__(self):
        return poly_str(self)

    # Euclidean structure on κ[T, T⁻¹]: norm = span, units = monomials.

    def divmod(self, o: "LaurentPoly") -> tuple["LaurentPoly", "LaurentPoly"]:
        """Return (q, r) with self = q·o + r and span(r) < span(o) (or r = 0)."""
        if not o.c:
            raise ZeroDivisionError("division by zero in Λ")
        if not self.c:
            return self, self
        field = self.field
        a = list(self.c)  # polynomial in T with constant term self.c[0]
        b = o.c
        db = len(b) - 1
        inv_lead = field.one / b[-1]
        quot = [field.zero] * max(len(a) - db, 1)
        for i in range(len(a) - 1, db - 1, -1):
            coef = a[i]
            if not coef:
                continue
            f = coef * inv_lead
            quot[i - db] = f
            for j in range(db + 1):
                a[i - db + j] = a[i - db + j] - f * b[j]
        q = LaurentPoly(field, self.low - o.low, quot)
        r = LaurentPoly(field, self.low, a[:db] if db else [])
        return q, r

    def exact_div(self, o: "LaurentPoly") -> "LaurentPoly | None":
        q, r = self.divmod(o)
        return None if r else q

    def monic_normal(self) -> "LaurentPoly":
        """Associate with lowest exponent 0 and leading coefficient 1."""
        if not self.c:
            return self
        inv = self.field.one / self.c[-1]
        return LaurentPoly(self.field, 0, [a * inv for a in self.c])


def poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    while b:
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic_normal() if a else a


def poly_str(p: LaurentPoly, var: str = "T") -> str:
    if not p.c:
        return "0"
    parts = []
    for m, a in p.terms():
        s = str(a)
        if m == 0:
            parts.append(s)
        else:
            mono = var if m == 1 else f"{var}^{m}"
            parts.append(mono if s == "1" else f"-{mono}" if s == "-1" else f"{s}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Novikov fields


UP = "up"
DOWN = "down"


class NovikovField:
    """Λ↑ (orientation "up") or Λ↓ ("down") over κ with translation group Γ.

    For Γ = {0} both fields are κ itself and elements are plain field
    scalars; for rank-1 Γ elements are :class:`NovikovElem` quotients.
    """

    __slots__ = ("field", "gamma", "orientation", "_zero", "_one")

    def __init__(self, field: Field, gamma: TranslationGroup, orientation: str = UP):
        if orientation not in (UP, DOWN):
            raise ValueError(orientation)
        self.field = field
        self.gamma = gamma
        self.orientation = orientation
        if gamma.rank == 0:
            self._zero, self._one = field.zero, field.one
        else:
            z = LaurentPoly(field, 0, ())
            o = LaurentPoly.monomial(field, 1)
            self._zero = NovikovElem(self, z, o, _normalized=True)
            self._one = NovikovElem(self, o, o, _normalized=True)

    def __eq__(self, o):
        return (
            isinstance(o, NovikovField)
            and self.field == o.field
            and self.gamma == o.gamma
            and self.orientation == o.orientation
        )

    def __hash__(self):
        return hash((self.field, self.gamma, self.orientation))

    def __repr__(self):
        return f"NovikovField({self.field}, λ₀={self.gamma.lambda0}, {self.orientation})"

    @property
    def up(self) -> bool:
        return self.orientation == UP

    @property
    def rank(self) -> int:
        return self.gamma.rank

    @property
    def opposite(self) -> "NovikovField":
        return NovikovField(self.field, self.gamma, DOWN if self.up else UP)

    def zero(self):
        return self._zero

    def one(self):
        return self._one

    def __call__(self, x):
        """Embed a scalar, a Laurent polynomial or an element of this field."""
        if self.gamma.rank == 0:
            if isinstance(x, LaurentPoly):
                if x and (x.low != 0 or len(x.c) != 1):
                    raise ValueError("nonzero exponent with trivial Γ")
                return x.c[0] if x else self.field.zero
            return self.field(x)
        if isinstance(x, NovikovElem):
            if x.dom == self:
                return x
            return NovikovElem(self, x.num, x.den, _normalized=True)
        if isinstance(x, LaurentPoly):
            return NovikovElem(self, x, LaurentPoly.monomial(self.field, 1), _normalized=True)
        return NovikovElem(self, LaurentPoly.monomial(self.field, x), LaurentPoly.monomial(self.field, 1), _normalized=True)

    def monomial(self, coeff, m: int = 0):
        if self.gamma.rank == 0:
            if m:
                raise ValueError("nonzero exponent with trivial Γ")
            return self.field(coeff)
        return self(LaurentPoly.monomial(self.field, coeff, m))

    def fraction(self, num: LaurentPoly, den: LaurentPoly):
        if self.gamma.rank == 0:
            return self(num) / self(den)
        return NovikovElem(self, num, den)

    # valuations -----------------------------------------------------------

    def nu_exp(self, x):
        """Valuation as an integer multiplier of λ₀ (None for zero)."""
        if self.gamma.rank == 0:
            return 0 if x else None
        return x.nu_exp()

    def nu(self, x):
        if not x:
            return INF if self.up else NEG_INF
        if self.gamma.rank == 0:
            return Fraction(0)
        return x.nu_exp() * self.gamma.lambda0

    def lead(self, x):
        """Coefficient of the leading term (lowest exponent up, highest down)."""
        if self.gamma.rank == 0:
            return x
        return x.lead()

    def conj(self, x):
        if self.gamma.rank == 0:
            return x
        return x.conj()

    def in_lambda(self, x) -> LaurentPoly | None:
        """Return x as a Laurent polynomial if it lies in Λ, else None."""
        if self.gamma.rank == 0:
            return LaurentPoly.monomial(self.field, x) if x else LaurentPoly(self.field, 0, ())
        return x.as_poly()

    def truncate_hat(self, x, bound):
        if self.gamma.rank:
            return truncate_hat(x, bound)
        # scalars have valuation 0, so they survive exactly when 0 is on the kept side
        keep = 0 <= bound if self.up else 0 >= bound
        return x if keep else self.field.zero


class NovikovElem:
    """An element p/q of Λ↑ or Λ↓ with Laurent polynomials p, q.

    The pair is kept reduced (gcd 1) with q normalized to lowest exponent 0
    and leading coefficient 1, so equal elements have equal representations.
    """

    __slots__ = ("dom", "num", "den")

    def __init__(self, dom: NovikovField, num: LaurentPoly, den: LaurentPoly, _normalized: bool = False):
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.dom = dom
        if _normalized:
            self.num, self.den = num, den
            return
        if not num:
            self.num = num
            self.den = LaurentPoly.monomial(num.field, 1)
            return
        if den.is_monomial():
            inv = num.field.one / den.c[0]
            self.num = LaurentPoly(num.field, num.low - den.low, [a * inv for a in num.c])
            self.den = LaurentPoly.monomial(num.field, 1)
            return
        g = poly_gcd(num, den)
        if g.span():
            num, _ = num.divmod(g)
            den, _ = den.divmod(g)
        inv = num.field.one / den.c[-1]
        self.num = LaurentPoly(num.field, num.low - den.low, [a * inv for a in num.c])
        self.den = LaurentPoly(num.field, 0, [a * inv for a in den.c])

    def _lift(self, o):
        if isinstance(o, NovikovElem):
            if o.dom.orientation != self.dom.orientation:
                raise TypeError("mixing up and down Novikov elements")
            return o
        if isinstance(o, LaurentPoly):
            return NovikovElem(self.dom, o, LaurentPoly.monomial(o.field, 1), _normalized=True)
        return self.dom(o)

    def __add__(self, o):
        o = self._lift(o)
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return NovikovElem(self.dom, self.num + o.num, self.den)
        return NovikovElem(self.dom, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return NovikovElem(self.dom, -self.num, self.den, _normalized=True)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        if not self.num or not o.num:
            return self.dom.zero()
        return NovikovElem(self.dom, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        if not o.num:
            raise ZeroDivisionError("division by zero Novikov element")
        return NovikovElem(self.dom, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def inverse(self):
        return self.dom.one() / self

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, o):
        try:
            o = self._lift(o)
        except TypeError:
            return False
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den, self.dom.orientation))

    def __repr__(self):
        if self.den.is_monomial() and self.den.low == 0 and self.den.c[0] == 1:
            return f"{poly_str(self.num)} [{self.dom.orientation}]"
        return f"({poly_str(self.num)})/({poly_str(self.den)}) [{self.dom.orientation}]"

    @property
    def up(self) -> bool:
        return self.dom.orientation == UP

    def nu_exp(self):
        if not self.num:
            return None
        if self.up:
            return self.num.low - self.den.low
        return self.num.high - self.den.high

    def valuation(self):
        return self.dom.nu(self)

    def lead(self):
        if self.up:
            return self.num.c[0] / self.den.c[0]
        return self.num.c[-1] / self.den.c[-1]

    def conj(self) -> "NovikovElem":
        return NovikovElem(self.dom.opposite, self.num.conj(), self.den.conj())

    def as_poly(self) -> LaurentPoly | None:
        """Return the element as a member of Λ if the denominator divides."""
        if self.den.is_monomial():
            return self.num.shift(-self.den.low) * (self.num.field.one / self.den.c[0])
        return None


def valuation(x, dom: NovikovField | None = None):
    """ν↑ or ν↓ of a Novikov element (or of a scalar when ``dom`` has Γ = {0})."""
    if isinstance(x, NovikovElem):
        return x.valuation()
    if isinstance(x, LaurentPoly):
        raise TypeError("a group-ring element needs an orientation; embed it first")
    if dom is None:
        raise TypeError("scalar valuation needs a NovikovField")
    return dom.nu(x)


def conjugate(x):
    """Exponent negation; flips the orientation of a Novikov element."""
    if isinstance(x, (LaurentPoly, NovikovElem)):
        return x.conj()
    return x


def _up_series(x: NovikovElem, hi_exp: int) -> dict[int, object]:
    """Coefficients of the increasing expansion of x up to exponent hi_exp."""
    num, den = x.num, x.den
    field = num.field
    start = num.low - den.low
    out: dict[int, object] = {}
    if not num or hi_exp < start:
        return out
    n_terms = hi_exp - start + 1
    inv0 = field.one / den.c[0]
    d = den.c
    s: list = []
    for n in range(n_terms):
        acc = num.c[n] if n < len(num.c) else field.zero
        for i in range(1, min(n, len(d) - 1) + 1):
            if d[i] and s[n - i]:
                acc = acc - d[i] * s[n - i]
        s.append(acc * inv0)
    for n, a in enumerate(s):
        if a:
            out[start + n] = a
    return out


def series_window(x, lo: int, hi: int) -> LaurentPoly:
    """Terms of the canonical expansion of x with exponents in [lo, hi].

    Exponents are integer multipliers of λ₀. Up elements expand in
    increasing powers of T, down elements in decreasing powers.
    """
    if lo > hi:
        raise ValueError("empty window")
    if not isinstance(x, NovikovElem):
        raise TypeError("series_window expects a rank-1 Novikov element")
    field = x.num.field
    if x.up:
        coeffs = _up_series(x, hi)
    else:
        coeffs = {-m: a for m, a in _up_series(x.conj(), -lo).items()}
    return LaurentPoly.from_dict(field, {m: a for m, a in coeffs.items() if lo <= m <= hi})


def truncate_hat(x: NovikovElem, bound) -> LaurentPoly:
    """Finite part of x beyond ``bound`` (a real value, compared with mλ₀).

    Down: the terms with exponent value ≥ bound. Up: terms with value ≤ bound.
    The discarded tail has valuation strictly beyond the bound.
    """
    field = x.num.field
    if not x:
        return LaurentPoly(field, 0, ())
    lam = x.dom.gamma.lambda0
    bound = Fraction(bound)
    top = x.nu_exp()
    if x.up:
        hi = math.floor(bound / lam)
        if hi < top:
            return LaurentPoly(field, 0, ())
        return series_window(x, top, hi)
    lo = math.ceil(bound / lam)
    if lo > top:
        return LaurentPoly(field, 0, ())
    return series_window(x, lo, top)


# ---------------------------------------------------------------------------
# the group ring Λ as a Euclidean domain


class GroupRing:
    """Λ = κ[Γ]: κ itself for Γ = {0}, Laurent polynomials for rank 1."""

    def __init__(self, field: Field, gamma: TranslationGroup):
        self.field = field
        self.gamma = gamma

    def __eq__(self, o):
        return isinstance(o, GroupRing) and self.field == o.field and self.gamma == o.gamma

    def __hash__(self):
        return hash((self.field, self.gamma))

    @property
    def rank(self) -> int:
        return self.gamma.rank

    def zero(self):
        return LaurentPoly(self.field, 0, ()) if self.rank else self.field.zero

    def one(self):
        return LaurentPoly.monomial(self.field, 1) if self.rank else self.field.one

    def monomial(self, coeff, m: int = 0):
        if self.rank:
            return LaurentPoly.monomial(self.field, coeff, m)
        if m:
            raise ValueError("nonzero exponent with trivial Γ")
        return self.field(coeff)

    def __call__(self, x):
        if self.rank:
            if isinstance(x, LaurentPoly):
                return x
            if isinstance(x, dict):
                return LaurentPoly.from_dict(self.field, x)
            return LaurentPoly.monomial(self.field, x)
        if isinstance(x, dict):
            bad = [m for m, v in x.items() if int(m) != 0 and self.field(v)]
            if bad:
                raise ValueError("nonzero exponent with trivial Γ")
            return self.field(x.get(0, x.get("0", 0)))
        if isinstance(x, LaurentPoly):
            return x.coeff(0)
        return self.field(x)

    def norm(self, x) -> int:
        return x.span() if self.rank else 0

    def divmod(self, a, b):
        if self.rank:
            return a.divmod(b)
        return a / b, self.field.zero

    def is_unit(self, x) -> bool:
        if self.rank:
            return x.is_monomial()
        return bool(x)

    def unit_inverse(self, x):
        if self.rank:
            return x ** -1
        return self.field.one / x

    def normal_associate(self, x):
        """(canonical associate, unit u) with x = u · associate."""
        if not x:
            return x, self.one()
        if self.rank:
            lead = x.c[-1]
            u = LaurentPoly.monomial(self.field, lead, x.low)
            return x.monic_normal(), u
        return self.field.one, x

    def quotient_dim(self, a) -> int:
        """dim_κ Λ/(a) for nonzero a."""
        return a.span() if self.rank else 0

    def conj(self, x):
        return x.conj() if self.rank else x

    def to_json(self, x):
        if self.rank:
            return {str(m): self.field.to_json(v) for m, v in x.terms()}
        return {"0": self.field.to_json(x)} if x else {}

    def from_json(self, d):
        if isinstance(d, dict):
            return self({int(m): self.field(v) for m, v in d.items()})
        return self(self.field(d))

    def novikov(self, orientation: str = UP) -> NovikovField:
        return NovikovField(self.field, self.gamma, orientation)


# ---------------------------------------------------------------------------
# dense matrices over any of the above (lists of rows)


def zeros(rows: int, cols: int, zero) -> list[list]:
    return [[zero] * cols for _ in range(rows)]


def identity(n: int, zero, one) -> list[list]:
    m = zeros(n, n, zero)
    for i in range(n):
        m[i][i] = one
    return m


def mat_mul(a: list[list], b: list[list], zero) -> list[list]:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [zero] * cols
        for k in range(inner):
            x = row[k]
            if not x:
                continue
            bk = b[k]
            for j in range(cols):
                y = bk[j]
                if y:
                    acc[j] = acc[j] + x * y
        out.append(acc)
    return out


def mat_vec(a: list[list], v: Sequence, zero) -> list:
    out = []
    for row in a:
        acc = zero
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def transpose(a: list[list]) -> list[list]:
    return [list(col) for col in zip(*a)] if a else []


def mat_map(f, a: list[list]) -> list[list]:
    return [[f(x) for x in row] for row in a]


def row_reduce(a: list[list], zero, one):
    """Reduced row echelon form; returns (rref, pivot_columns)."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = one / m[r][c]
        m[r] = [x * inv if x else x for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y if y else x for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: list[list], zero, one) -> int:
    return len(row_reduce(a, zero, one)[1]) if a and a[0] else 0


def solve(a: list[list], b: list[list], zero, one) -> list[list]:
    """Solve a·x = b for square invertible a (b given as a matrix of columns)."""
    n = len(a)
    aug = [list(a[i]) + list(b[i]) for i in range(n)]
    red, piv = row_reduce(aug, zero, one)
    if piv[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in red[:n]]


def inverse(a: list[list], zero, one) -> list[list]:
    return solve(a, identity(len(a), zero, one), zero, one)


def det(a: list[list], zero, one):
    n = len(a)
    m = [list(r) for r in a]
    d = one
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return zero
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        p = m[c][c]
        d = d * p
        inv = one / p
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [x - f * y if y else x for x, y in zip(m[i], m[c])]
    return d


def det_ring(a: list[list], zero, one):
    """Determinant over a commutative ring by cofactor expansion (small n)."""
    n = len(a)
    if n == 0:
        return one
    if n == 1:
        return a[0][0]
    total = zero
    for j in range(n):
        if not a[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det_ring(minor, zero, one)
        total = total + term if j % 2 == 0 else total - term
    return total


def random_laurent(rng, field: Field, lo: int, hi: int, density: float = 0.6) -> LaurentPoly:
    terms = {}
    for m in range(lo, hi + 1):
        if rng.random() < density:
            terms[m] = field.random(rng, nonzero=True)
    return LaurentPoly.from_dict(field, terms)


def parse_poly(field: Field, terms: dict | Iterable) -> LaurentPoly:
    """Build a Laurent polynomial from an exponent → coefficient map."""
    if isinstance(terms, dict):
        return LaurentPoly.from_dict(field, {int(k): field(v) for k, v in terms.items()})
    return LaurentPoly.from_dict(field, {int(k): field(v) for k, v in terms})
