"""The Smyth-tuple engine over F_q(t).

A coefficient tuple (a_1, ..., a_n) of nonzero polynomials is tested against
two absolute value criteria: at the place at infinity the maximum degree must
be attained by at least two coordinates, and at the finite places every
complementary gcd g_i = gcd_{j != i}(a_j) must be a unit. Tuples passing both
admit balanced multisets of solutions to sum(a_i x_i) = 0, which convert to
permutation certificates: permutations X_1, ..., X_n with X_n = I and an
explicit nonzero kernel vector v of sum(a_i X_i).

Conventions used throughout:

* V_N is the set of polynomials of degree < N, enumerated in base-q counting
  order (element k has the base-q digits of k as ascending coefficients).
* A solution tuple is a plain tuple of ring elements. The multiset machinery
  is generic: it only needs +, *, truth testing, and hashability, so the same
  code validates balanced multisets over F_q[t], Z, and the number-field
  rings layered on top.
* A permutation p_i is stored as the tuple of 0-based images with the
  defining property (X_i v)[k] = v[p_i[k]]; the certificate contract is
  sum_i a_i * v[p_i[k]] = 0 for every row k, with p_n the identity.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import FieldParams, Poly, many_gcd, poly_lcm, ff_kernel, rf_det
from .errors import (
    BudgetExceededError,
    NotSmythTupleError,
    NoRelationError,
    RelationViolationError,
    TupleArityError,
)

DEFAULT_BUDGET = 1 << 24

DET_CHECK_BOUND = 12


def poly_from_index(field: FieldParams, k: int) -> Poly:
    """The k-th polynomial in base-q counting order."""
    digits = []
    while k:
        digits.append(k % field.q)
        k //= field.q
    return Poly(field, tuple(digits))


def vn_elements(field: FieldParams, N: int) -> list[Poly]:
    """V_N, all q^N polynomials of degree < N, in canonical order."""
    return [poly_from_index(field, k) for k in range(field.q**N)]


def vn_index(p: Poly) -> int:
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * p.field.q + c
    return acc


@dataclass(frozen=True, slots=True)
class CoeffTuple:
    """A coprime tuple of n >= 3 nonzero polynomials over a common field."""

    field: FieldParams
    coeffs: tuple[Poly, ...]

    @classmethod
    def make(cls, field: FieldParams, coeffs) -> "CoeffTuple":
        polys = tuple(field.poly(c) for c in coeffs)
        if len(polys) == 2:
            raise TupleArityError(
                "pairs are out of scope: a pair is degenerate and is decided "
                "by a_1 = unit * a_2, not by the criteria"
            )
        if len(polys) < 3:
            raise TupleArityError("need at least 3 coefficients")
        for i, p in enumerate(polys):
            if p.is_zero:
                raise ValueError(f"coefficient {i + 1} is zero")
        g = many_gcd(polys)
        if not g.is_one:
            polys = tuple(p // g for p in polys)
        return cls(field, polys)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def height(self) -> int:
        """Max degree across the coefficients."""
        return int(max(p.degree for p in self.coeffs))

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.coeffs) + ")"


@dataclass(frozen=True, slots=True)
class CriteriaReport:
    """Outcome of the absolute value criteria.

    witness_index is the offending coordinate (0-based) when a check fails:
    for the infinite place, the unique coordinate of maximal degree; for the
    finite places, the coordinate whose complementary gcd is the nonunit
    witness_divisor.
    """

    passes: bool
    infinite_place_ok: bool
    finite_places_ok: bool
    witness_index: Optional[int] = None
    witness_divisor: Optional[Poly] = None


def check_criteria(a: CoeffTuple) -> CriteriaReport:
    """Decide the Smyth-tuple criteria place by place."""
    degrees = [p.degree for p in a.coeffs]
    dmax = max(degrees)
    attained = [i for i, d in enumerate(degrees) if d == dmax]
    inf_ok = len(attained) >= 2

    fin_ok = True
    w_index = None
    w_div = None
    for i in range(a.n):
        others = [a.coeffs[j] for j in range(a.n) if j != i]
        g = many_gcd(others)
        if not g.is_one:
            fin_ok = False
            w_index = i
            w_div = g
            break
    if not inf_ok:
        return CriteriaReport(False, False, fin_ok, attained[0], w_div)
    if not fin_ok:
        return CriteriaReport(False, True, False, w_index, w_div)
    return CriteriaReport(True, True, True)


def _padded(p: Poly, length: int) -> tuple[int, ...]:
    return p.coeffs + (0,) * (length - len(p.coeffs))


def _solution_pool(a: CoeffTuple, N: int, budget: int) -> list[tuple[Poly, ...]]:
    # Enumerates V_N^{n-1} freely; the last coordinate is read off a lookup
    # table keyed by -(a_n x_n), which settles divisibility and the degree
    # bound in one dict probe.
    field = a.field
    q = field.q
    n = a.n
    candidates = q ** (N * (n - 1))
    if candidates > budget:
        raise BudgetExceededError(
            f"enumeration needs {candidates} candidates, budget is {budget}",
            required=candidates,
        )
    vn = vn_elements(field, N)
    length = N + max(a.height, 0)
    prods = [[_padded(a.coeffs[i] * x, length) for x in vn] for i in range(n - 1)]
    lookup = {_padded(-(a.coeffs[n - 1] * x), length): x for x in vn}
    sols: list[tuple[Poly, ...]] = []
    zero_acc = (0,) * length

    def descend(i: int, acc: tuple[int, ...], chosen: tuple[Poly, ...]):
        row = prods[i]
        if i == n - 2:
            for j, x in enumerate(vn):
                p = row[j]
                key = tuple((u + v) % q for u, v in zip(acc, p))
                xn = lookup.get(key)
                if xn is not None:
                    sols.append(chosen + (x, xn))
            return
        for j, x in enumerate(vn):
            p = row[j]
            descend(i + 1, tuple((u + v) % q for u, v in zip(acc, p)), chosen + (x,))

    descend(0, zero_acc, ())
    return sols


def enumerate_solutions(a: CoeffTuple, N: int, budget: int = DEFAULT_BUDGET) -> list[tuple[Poly, ...]]:
    """The set T_N of solutions to sum(a_i x_i) = 0 within V_N^n.

    Returned in lexicographic order of the free coordinates. When the
    criteria pass, |T_N| = q^(N(n-1)-d) with d the height.
    """
    if N < 1 or N < a.height:
        raise ValueError(f"N must be >= the height {a.height} and >= 1, got {N}")
    return _solution_pool(a, N, budget)


def fiber_count(a: CoeffTuple, N: int, j: int, x: Poly, budget: int = DEFAULT_BUDGET) -> int:
    """Number of solutions in T_N whose j-th coordinate (1-based) equals x.

    Independent of j and x when the criteria pass, where it equals
    q^(N(n-2)-d).
    """
    field = a.field
    q = field.q
    n = a.n
    if not 1 <= j <= n:
        raise ValueError(f"coordinate j must be in 1..{n}, got {j}")
    if N < 1 or N < a.height:
        raise ValueError(f"N must be >= the height {a.height} and >= 1, got {N}")
    if x.degree >= N:
        raise ValueError(f"{x} is outside V_{N}")
    candidates = q ** (N * (n - 2))
    if candidates > budget:
        raise BudgetExceededError(
            f"fiber count needs {candidates} candidates, budget is {budget}",
            required=candidates,
        )
    jj = j - 1
    pivot = n - 1 if jj != n - 1 else n - 2
    free = [i for i in range(n) if i not in (jj, pivot)]
    vn = vn_elements(field, N)
    length = N + max(a.height, 0)
    base = _padded(a.coeffs[jj] * x, length)
    prods = [[_padded(a.coeffs[i] * y, length) for y in vn] for i in free]
    lookup = {_padded(-(a.coeffs[pivot] * y), length): None for y in vn}

    count = 0
    last = len(free) - 1

    def descend(i: int, acc: tuple[int, ...]):
        nonlocal count
        row = prods[i]
        if i == last:
            for p in row:
                key = tuple((u + v) % q for u, v in zip(acc, p))
                if key in lookup:
                    count += 1
            return
        for p in row:
            descend(i + 1, tuple((u + v) % q for u, v in zip(acc, p)))

    if free:
        descend(0, base)
    else:
        count = 1 if base in lookup else 0
    return count


def sort_key_of(value):
    """Deterministic ordering key for solution entries of any ring."""
    key = getattr(value, "sort_key", None)
    return key if key is not None else value


def member_sort_key(member: Sequence) -> tuple:
    return tuple(sort_key_of(v) for v in member)


def relation_holds(coeffs: Sequence, member: Sequence) -> bool:
    """Whether sum(c_i * x_i) is zero, over any exact ring."""
    s = 0
    for c, x in zip(coeffs, member):
        s = s + c * x
    return not s


def _coordinate_counters(members: Sequence[Sequence], n: int) -> list[Counter]:
    return [Counter(m[i] for m in members) for i in range(n)]


def is_balanced(coeffs: Sequence, members: Sequence[Sequence]) -> bool:
    """True iff every coordinate carries the same value multiset.

    Every member must satisfy the linear relation; a violator raises
    RelationViolationError naming it.
    """
    n = len(coeffs)
    for m in members:
        if len(m) != n:
            raise RelationViolationError(f"member {m} has arity {len(m)}, expected {n}", member=m)
        if not relation_holds(coeffs, m):
            raise RelationViolationError(
                f"member {tuple(str(v) for v in m)} violates the linear relation", member=m
            )
    counters = _coordinate_counters(members, n)
    return all(c == counters[0] for c in counters[1:])


@dataclass(frozen=True)
class BalancedMultiset:
    """A nonempty multiset of nonzero solution tuples, balanced by coordinate.

    members is stored sorted by entry sort keys, with multiplicity, so two
    equal multisets compare equal structurally.
    """

    coeffs: tuple
    members: tuple

    @classmethod
    def make(cls, coeffs, members, validate: bool = True) -> "BalancedMultiset":
        coeffs = tuple(coeffs)
        ordered = sorted((tuple(m) for m in members), key=member_sort_key)
        if not ordered:
            raise ValueError("balanced multiset must be nonempty")
        for m in ordered:
            if not any(bool(v) for v in m):
                raise ValueError("balanced multiset must not contain the zero tuple")
        if validate and not is_balanced(coeffs, ordered):
            raise ValueError("coordinate value multisets differ: not balanced")
        return cls(coeffs, tuple(ordered))

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def coordinate_counter(self, i: int) -> Counter:
        return Counter(m[i] for m in self.members)


def balanced_multiset(a: CoeffTuple, N: int, budget: int = DEFAULT_BUDGET) -> BalancedMultiset:
    """T_N with the zero tuple removed, verified balanced.

    Refuses tuples failing the criteria: a tuple admitting any balanced
    multiset necessarily satisfies both absolute value criteria, so the
    enumeration would be wasted work.
    """
    report = check_criteria(a)
    if not report.passes:
        raise NotSmythTupleError(
            f"{a} fails the absolute value criteria "
            f"(infinite place ok: {report.infinite_place_ok}, "
            f"finite places ok: {report.finite_places_ok}); "
            "no balanced multiset exists for such a tuple"
        )
    pool = enumerate_solutions(a, N, budget)
    members = [m for m in pool if any(bool(v) for v in m)]
    return BalancedMultiset.make(a.coeffs, members, validate=True)


def is_one_factor(b: BalancedMultiset) -> bool:
    """True iff the first-coordinate values are pairwise distinct."""
    firsts = [m[0] for m in b.members]
    return len(set(firsts)) == len(firsts)


@dataclass(frozen=True)
class PermutationCertificate:
    """Permutations X_1..X_n (X_n = I) with kernel vector v of sum(a_i X_i).

    perms[i][k] is the 0-based row of the last coordinate matched to row k in
    coordinate i; the verification contract is sum_i a_i v[perms[i][k]] = 0
    for every k.
    """

    m: int
    perms: tuple[tuple[int, ...], ...]
    kernel: tuple


def certificate_from_balanced(a: CoeffTuple, b: BalancedMultiset) -> PermutationCertificate:
    """Convert a balanced multiset to a permutation certificate.

    Within each group of rows sharing a value, matching is in ascending row
    order, which makes the construction canonical and forces X_n = identity.
    """
    rows = b.members
    m = len(rows)
    n = b.n
    last_slots: dict = {}
    for k, row in enumerate(rows):
        last_slots.setdefault(row[n - 1], []).append(k)
    perms = []
    for i in range(n):
        avail = {v: deque(idxs) for v, idxs in last_slots.items()}
        p = []
        for k in range(m):
            p.append(avail[rows[k][i]].popleft())
        perms.append(tuple(p))
    kernel = tuple(rows[k][n - 1] for k in range(m))
    return PermutationCertificate(m=m, perms=tuple(perms), kernel=kernel)


def _validate_perms(perms: Sequence[Sequence[int]], m: int):
    for i, p in enumerate(perms):
        if len(p) != m or sorted(p) != list(range(m)):
            raise ValueError(f"malformed permutation at position {i + 1}: {tuple(p)}")


def combination_matrix(a: CoeffTuple, perms: Sequence[Sequence[int]]) -> list[list[Poly]]:
    """The matrix sum_i a_i X_i, with X_i the permutation matrix of perms[i]."""
    m = len(perms[0])
    zero = a.field.zero
    rows = [[zero] * m for _ in range(m)]
    for i, p in enumerate(perms):
        c = a.coeffs[i]
        for k in range(m):
            rows[k][p[k]] = rows[k][p[k]] + c
    return rows


def verify_certificate(a: CoeffTuple, cert: PermutationCertificate, det_bound: int = DET_CHECK_BOUND) -> bool:
    """Recheck a certificate from scratch.

    Row sums are verified exactly; for small m the determinant of
    sum(a_i X_i) is recomputed by exact elimination as well.
    """
    if len(cert.perms) != a.n:
        raise ValueError(f"certificate has {len(cert.perms)} permutations, tuple has arity {a.n}")
    m = cert.m
    if len(cert.kernel) != m:
        raise ValueError("kernel vector length differs from certificate dimension")
    _validate_perms(cert.perms, m)
    if cert.perms[-1] != tuple(range(m)):
        return False
    if not any(bool(v) for v in cert.kernel):
        return False
    v = cert.kernel
    for k in range(m):
        s = 0
        for i in range(a.n):
            s = s + a.coeffs[i] * v[cert.perms[i][k]]
        if s:
            return False
    if m <= det_bound:
        if not rf_det(combination_matrix(a, cert.perms)).is_zero:
            return False
    return True


def balanced_from_certificate(a: CoeffTuple, perms: Sequence[Sequence[int]]) -> BalancedMultiset:
    """Rebuild a balanced multiset from permutations alone.

    Finds a nonzero kernel vector of sum(a_i X_i) by exact elimination,
    clears denominators, reads off rows v_i = X_i v, and drops all-zero
    rows. Raises NoRelationError when the matrix is nonsingular.
    """
    if len(perms) != a.n:
        raise ValueError(f"got {len(perms)} permutations for arity {a.n}")
    m = len(perms[0])
    _validate_perms(perms, m)
    matrix = combination_matrix(a, perms)
    kv = ff_kernel(matrix)
    if kv is None:
        raise NoRelationError(
            "sum(a_i X_i) is nonsingular: these permutations witness no relation"
        )
    common = kv[0].den
    for e in kv[1:]:
        common = poly_lcm(common, e.den)
    cleared = [kv[k].num * (common // kv[k].den) for k in range(m)]
    nonzero = [w for w in cleared if not w.is_zero]
    g = many_gcd(nonzero)
    if not g.is_one:
        cleared = [w // g for w in cleared]
    members = []
    for k in range(m):
        row = tuple(cleared[p[k]] for p in perms)
        if any(bool(x) for x in row):
            members.append(row)
    return BalancedMultiset.make(a.coeffs, members, validate=True)
