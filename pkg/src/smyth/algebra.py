"""Exact arithmetic over F_q[t] and F_q(t), plus integer factoring utilities.

Polynomials are held as dense coefficient tuples in ascending degree with no
trailing zeros, so each residue class has exactly one representation and
values are hashable. The zero polynomial has degree ``-inf`` (a float
sentinel), which keeps degree comparisons total without overloading -1.

The text form of a polynomial is ``c*t^k`` terms joined by ``+`` in
descending powers, e.g. ``t^2+t+1`` or ``2*t^3+1``; the zero polynomial
prints as ``0``. The parser is liberal: it also accepts ascending order,
redundant unit coefficients (``1*t^2``), spaces, and ``-`` signs.
"""
from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceededError, NonUnitError, ParseError

NEG_INF = float("-inf")

DEFAULT_FACTOR_BOUND = 1 << 64

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality test, deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True, slots=True)
class FieldParams:
    """A prime field F_q, the coefficient field for everything here."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 2:
            raise ValueError(f"q must be an integer >= 2, got {self.q!r}")
        if self.q >= 1 << 63:
            raise ValueError("q must fit in a machine word")
        if not is_probable_prime(self.q):
            raise ValueError(f"q must be prime, got {self.q}")

    @property
    def zero(self) -> "Poly":
        return Poly(self, ())

    @property
    def one(self) -> "Poly":
        return Poly(self, (1,))

    @property
    def t(self) -> "Poly":
        return Poly(self, (0, 1))

    def constant(self, c: int) -> "Poly":
        c %= self.q
        return Poly(self, (c,) if c else ())

    def poly(self, spec) -> "Poly":
        """Build a polynomial from text, an int constant, or ascending coefficients."""
        if isinstance(spec, Poly):
            if spec.field != self:
                raise ValueError("polynomial belongs to a different field")
            return spec
        if isinstance(spec, str):
            return parse_poly(self, spec)
        if isinstance(spec, int):
            return self.constant(spec)
        return Poly(self, _trim(int(c) % self.q for c in spec))

    def monomial(self, degree: int, coeff: int = 1) -> "Poly":
        coeff %= self.q
        if coeff == 0:
            return self.zero
        return Poly(self, (0,) * degree + (coeff,))


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True, slots=True)
class Poly:
    """Element of F_q[t]. Immutable, hashable, exact.

    Do not call the constructor with unreduced data; go through
    ``FieldParams.poly`` instead.
    """

    field: FieldParams
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int | float:
        """Degree, with -inf for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_one(self) -> bool:
        return self.coeffs == (1,)

    @property
    def is_unit(self) -> bool:
        return len(self.coeffs) == 1

    @property
    def lc(self) -> int:
        """Leading coefficient (of the zero polynomial: 0)."""
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def sort_key(self) -> tuple:
        """Deterministic total order key: degree first, then coefficients."""
        return (len(self.coeffs), self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            if other.field != self.field:
                raise ValueError("mixed coefficient fields")
            return other
        if isinstance(other, int):
            return self.field.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        q = self.field.q
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % q
        return Poly(self.field, _trim(out))

    __radd__ = __add__

    def __neg__(self):
        q = self.field.q
        return Poly(self.field, tuple((-c) % q for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(self.field, ())
        q = self.field.q
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] = (out[i + j] + ca * cb) % q
        return Poly(self.field, _trim(out))

    __rmul__ = __mul__

    def __pow__(self, exp: int):
        if not isinstance(exp, int) or exp < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.field.one
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        q = self.field.q
        rem = list(self.coeffs)
        db = len(other.coeffs) - 1
        inv_lc = pow(other.coeffs[-1], -1, q)
        quot = [0] * max(len(rem) - db, 0)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c:
                factor = c * inv_lc % q
                quot[i - db] = factor
                for j, cb in enumerate(other.coeffs):
                    rem[i - db + j] = (rem[i - db + j] - factor * cb) % q
        return Poly(self.field, _trim(quot)), Poly(self.field, _trim(rem))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero or self.lc == 1:
            return self
        inv = pow(self.lc, -1, self.field.q)
        return Poly(self.field, tuple(c * inv % self.field.q for c in self.coeffs))

    def evaluate(self, x: int) -> int:
        q = self.field.q
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % q
        return acc

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r}, q={self.field.q})"


def format_poly(p: Poly) -> str:
    """Canonical text: descending powers joined by +, zero prints as 0."""
    if p.is_zero:
        return "0"
    parts = []
    for k in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        if k == 0:
            parts.append(str(c))
        elif k == 1:
            parts.append("t" if c == 1 else f"{c}*t")
        else:
            parts.append(f"t^{k}" if c == 1 else f"{c}*t^{k}")
    return "+".join(parts)


_TERM_RE = re.compile(r"^(?:(\d+)\*?)?(t(?:\^(\d+))?)?$")


def parse_poly(field: FieldParams, text: str) -> Poly:
    """Parse polynomial text in any term order, e.g. '1+t+1*t^2'."""
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty polynomial text")
    tokens = re.findall(r"[+-]?[^+-]+", s)
    if "".join(tokens) != s:
        raise ParseError(f"malformed polynomial text: {text!r}")
    coeffs: dict[int, int] = {}
    for tok in tokens:
        sign = 1
        body = tok
        if body[0] in "+-":
            sign = -1 if body[0] == "-" else 1
            body = body[1:]
        m = _TERM_RE.match(body)
        if not m or not body:
            raise ParseError(f"bad term {tok!r} in {text!r}")
        cstr, tpart, estr = m.group(1), m.group(2), m.group(3)
        if cstr is None and tpart is None:
            raise ParseError(f"bad term {tok!r} in {text!r}")
        c = int(cstr) if cstr is not None else 1
        k = 0 if tpart is None else (int(estr) if estr is not None else 1)
        coeffs[k] = (coeffs.get(k, 0) + sign * c) % field.q
    if not coeffs:
        return field.zero
    out = [0] * (max(coeffs) + 1)
    for k, c in coeffs.items():
        out[k] = c
    return Poly(field, _trim(out))


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder with deg r < deg b."""
    return divmod(a, b)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; an error for (0, 0)."""
    if a.is_zero and b.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def poly_ext_gcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Monic g plus Bezout cofactors (g, u, v) with u*a + v*b = g."""
    if a.is_zero and b.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    field = a.field
    r0, r1 = a, b
    s0, s1 = field.one, field.zero
    t0, t1 = field.zero, field.one
    while not r1.is_zero:
        quo, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
        t0, t1 = t1, t0 - quo * t1
    inv = pow(r0.lc, -1, field.q)
    c = field.constant(inv)
    return r0 * c, s0 * c, t0 * c


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero or b.is_zero:
        return a.field.zero
    return ((a * b) // poly_gcd(a, b)).monic()


def many_gcd(polys: Sequence[Poly]) -> Poly:
    """Monic gcd of a nonempty sequence."""
    acc = polys[0]
    for p in polys[1:]:
        if acc.is_unit and not acc.is_zero:
            break
        if p.is_zero and acc.is_zero:
            continue
        if acc.is_zero:
            acc = p
        elif not p.is_zero:
            acc = poly_gcd(acc, p)
    if acc.is_zero:
        raise ValueError("gcd of all-zero sequence is undefined")
    return acc.monic()


@dataclass(frozen=True, slots=True)
class ModElement:
    """Residue in F_q[t]/(modulus) with a monic nonconstant modulus."""

    residue: Poly
    modulus: Poly

    @classmethod
    def make(cls, residue: Poly, modulus: Poly) -> "ModElement":
        if modulus.degree < 1:
            raise ValueError("modulus must be nonconstant")
        if modulus.lc != 1:
            raise ValueError("modulus must be monic")
        return cls(residue % modulus, modulus)

    @property
    def is_zero(self) -> bool:
        return self.residue.is_zero

    @property
    def is_one(self) -> bool:
        return self.residue.is_one

    def __mul__(self, other: "ModElement") -> "ModElement":
        if self.modulus != other.modulus:
            raise ValueError("mixed moduli")
        return ModElement(self.residue * other.residue % self.modulus, self.modulus)

    def __pow__(self, exp: int) -> "ModElement":
        if exp < 0:
            return mod_inverse(self) ** (-exp)
        result = ModElement(self.modulus.field.one % self.modulus, self.modulus)
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result


def mod_inverse(u: ModElement) -> ModElement:
    """Inverse modulo the modulus; NonUnitError carries the gcd witness."""
    g, s, _ = poly_ext_gcd(u.residue, u.modulus)
    if g.degree != 0:
        raise NonUnitError(
            f"{u.residue} is not invertible modulo {u.modulus}: gcd is {g}",
            witness=g,
        )
    return ModElement(s % u.modulus, u.modulus)


def element_order(u: ModElement) -> int:
    """Multiplicative order modulo an irreducible modulus."""
    if u.is_zero:
        raise NonUnitError("zero has no multiplicative order", witness=u.modulus)
    if not is_irreducible(u.modulus):
        raise ValueError("element_order requires an irreducible modulus")
    q = u.modulus.field.q
    d = int(u.modulus.degree)
    group = q**d - 1
    if group == 1:
        return 1
    order = group
    for p in integer_factor(group):
        while order % p == 0 and (u ** (order // p)).is_one:
            order //= p
    return order


def _powmod(base: Poly, exp: int, modulus: Poly) -> Poly:
    result = base.field.one % modulus
    base = base % modulus
    while exp:
        if exp & 1:
            result = result * base % modulus
        base = base * base % modulus
        exp >>= 1
    return result


def is_irreducible(f: Poly) -> bool:
    """Rabin's test: x^(q^d) = x mod f, and gcd(x^(q^(d/l)) - x, f) = 1."""
    if f.degree < 1:
        raise ValueError("irreducibility is only defined for nonconstant polynomials")
    f = f.monic()
    d = int(f.degree)
    if d == 1:
        return True
    field = f.field
    x = field.t % f
    frob = [x]
    cur = x
    for _ in range(d):
        cur = _powmod(cur, field.q, f)
        frob.append(cur)
    if frob[d] != x:
        return False
    for ell in integer_factor(d):
        g = poly_gcd(frob[d // ell] - x, f)
        if g.degree != 0:
            return False
    return True


def monic_polys(field: FieldParams, degree: int) -> Iterator[Poly]:
    """All monic polynomials of the given degree, in base-q counting order."""
    q = field.q
    for k in range(q**degree):
        digits = []
        v = k
        for _ in range(degree):
            digits.append(v % q)
            v //= q
        yield Poly(field, tuple(digits) + (1,))


def monic_irreducibles(field: FieldParams, degree: int) -> Iterator[Poly]:
    for f in monic_polys(field, degree):
        if is_irreducible(f):
            yield f


def random_irreducible(q: int, degree: int, seed) -> Poly:
    """Uniformly sampled monic irreducible, deterministic for a fixed seed."""
    field = FieldParams(q)
    rng = random.Random(f"irr:{q}:{degree}:{seed}")
    return _random_irreducible(field, degree, rng)


def _random_irreducible(field: FieldParams, degree: int, rng: random.Random) -> Poly:
    if degree < 1:
        raise ValueError("degree must be at least 1")
    while True:
        coeffs = tuple(rng.randrange(field.q) for _ in range(degree)) + (1,)
        f = Poly(field, coeffs)
        if is_irreducible(f):
            return f


@dataclass(frozen=True, slots=True)
class RatFunc:
    """Reduced fraction of polynomials with a monic denominator."""

    num: Poly
    den: Poly

    @classmethod
    def make(cls, num: Poly, den: Poly) -> "RatFunc":
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if num.is_zero:
            return cls(num, num.field.one)
        g = poly_gcd(num, den)
        num, den = num // g, den // g
        inv = pow(den.lc, -1, den.field.q)
        c = den.field.constant(inv)
        return cls(num * c, den * c)

    @classmethod
    def of(cls, p) -> "RatFunc":
        if isinstance(p, RatFunc):
            return p
        return cls(p, p.field.one) if not p.is_zero else cls(p, p.field.one)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self) -> bool:
        return not self.num.is_zero

    def __add__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc.make(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc.make(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc.make(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc.make(self.num * other.den, self.den * other.num)

    def __str__(self) -> str:
        if self.den.is_one:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"


def _as_ratfunc_matrix(matrix: Sequence[Sequence]) -> list[list[RatFunc]]:
    rows = [[RatFunc.of(e) if not isinstance(e, RatFunc) else e for e in row] for row in matrix]
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise ValueError("matrix must be square")
    return rows


def ff_kernel(matrix: Sequence[Sequence]) -> list[RatFunc] | None:
    """One nonzero kernel vector of a square matrix over F_q(t), or None.

    Entries may be Poly or RatFunc. Deterministic: reduced row echelon form
    with the first free column set to 1.
    """
    rows = _as_ratfunc_matrix(matrix)
    m = len(rows)
    if m == 0:
        raise ValueError("matrix must be nonempty")
    field = rows[0][0].num.field
    one = RatFunc.of(field.one)
    zero = RatFunc.of(field.zero)
    pivots: list[int] = []
    r = 0
    for col in range(m):
        pivot_row = None
        for i in range(r, m):
            if rows[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = one / rows[r][col]
        rows[r] = [e * inv for e in rows[r]]
        for i in range(m):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    if r == m:
        return None
    free = next(c for c in range(m) if c not in pivots)
    v = [zero] * m
    v[free] = one
    for prow, pcol in enumerate(pivots):
        v[pcol] = -rows[prow][free]
    return v


def rf_det(matrix: Sequence[Sequence]) -> RatFunc:
    """Determinant over F_q(t) by Gaussian elimination."""
    rows = _as_ratfunc_matrix(matrix)
    m = len(rows)
    field = rows[0][0].num.field
    det = RatFunc.of(field.one)
    for col in range(m):
        pivot_row = None
        for i in range(col, m):
            if rows[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            return RatFunc.of(field.zero)
        if pivot_row != col:
            rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
            det = -det
        p = rows[col][col]
        det = det * p
        for i in range(col + 1, m):
            if rows[i][col]:
                f = rows[i][col] / p
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    return det


def _floyd_split(n: int) -> int:
    # Floyd cycle factor finder with deterministic parameter sweep.
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def integer_factor(m: int, bound: int = DEFAULT_FACTOR_BOUND) -> dict[int, int]:
    """Prime factorization as {prime: exponent}; refuses inputs above bound."""
    if m < 1:
        raise ValueError("integer_factor requires a positive integer")
    if m > bound:
        raise BudgetExceededError(
            f"{m} exceeds the factoring bound {bound}", required=m
        )
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_probable_prime(v):
            factors[v] = factors.get(v, 0) + 1
            continue
        d = _floyd_split(v)
        stack.append(d)
        stack.append(v // d)
    return dict(sorted(factors.items()))


def euler_phi(n: int) -> int:
    phi = 1
    for p, e in integer_factor(n).items():
        phi *= (p - 1) * p ** (e - 1)
    return phi


def multiplicative_order_int(a: int, modulus: int) -> int:
    """Order of a in (Z/modulus)*; NonUnitError when gcd(a, modulus) > 1."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    a %= modulus
    g = math.gcd(a, modulus)
    if g != 1:
        raise NonUnitError(f"{a} is not a unit modulo {modulus}", witness=g)
    group = euler_phi(modulus)
    order = group
    for p in integer_factor(group):
        while order % p == 0 and pow(a, order // p, modulus) == 1:
            order //= p
    return order


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit by a byte sieve."""
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, flag in enumerate(sieve) if flag]


def largest_prime_at_most(x: int) -> int:
    """Largest prime <= x; x must be at least 2."""
    if x < 2:
        raise ValueError("no prime at or below " + str(x))
    for n in range(x, 1, -1):
        if is_probable_prime(n):
            return n
    raise AssertionError("unreachable")
