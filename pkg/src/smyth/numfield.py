"""Number-field layer: strong criteria, root-of-unity relations and twists,
equality-case extraction, and the lattice-rounding certificate pipeline.

Scope is quadratic fields. Rank at most 2 keeps every geometric step exact:
the covering radius comes from the circumradius formula on a Lagrange-reduced
superbase, closest points are found by exhaustive comparison of rational
squared distances, and eigenvalue claims are settled by fraction-free
elimination. Nothing in a pass/fail path rounds.

The pipeline for tuples (1, ..., 1, -alpha):

    lattice_rounding_step -> perron_bridge -> birkhoff_decompose
        -> verify_numfield_certificate

builds a nonnegative integer matrix with row sums n-1 and exact eigenvalue
alpha, rebalances it to equal column sums, splits it into n-1 permutation
matrices, and certifies det(sum P_i - alpha*I) = 0.
"""
from __future__ import annotations

import itertools
import math
from cmath import exp as cexp, pi as cpi, sqrt as csqrt
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath

from .algebra import euler_phi
from .core import (
    DEFAULT_BUDGET,
    BalancedMultiset,
    certificate_from_balanced,
)
from .errors import (
    BridgeError,
    BudgetExceededError,
    EqualityHypothesisError,
    PrecisionError,
    TupleArityError,
)
from .quadratic import CycInt, QuadField, QuadInt, SqrtSum, quadint_abs

IntMatrix = tuple[tuple[int, ...], ...]

Entry = Union[int, QuadInt]

MAX_ROU_ORDER = 360
MAX_TWIST_ORDER = 24
_PRECISION_CEILING_BITS = 1 << 14


def _as_quadint(K: QuadField, value: Entry) -> QuadInt:
    if isinstance(value, QuadInt):
        if value.field != K:
            raise ValueError("entry from a different quadratic field")
        return value
    return K.element(int(value))


def _abs_entry(value: Entry, place: int) -> SqrtSum:
    if isinstance(value, QuadInt):
        return quadint_abs(value, place)
    return SqrtSum.rational(abs(int(value)))


# ---------------------------------------------------------------------------
# strong absolute value criteria


@dataclass(frozen=True)
class StrongCriteriaReport:
    """Strict archimedean triangle condition plus the nonarchimedean check.

    equalities and violations list (index, place) pairs, 0-based, where
    |a_i| respectively equals or exceeds the sum of the other absolute
    values. nonarch_status is "pass", "fail", or "unsupported".
    """

    archimedean_ok: bool
    equalities: tuple
    violations: tuple
    nonarch_status: str

    @property
    def passes(self) -> bool:
        return self.archimedean_ok and self.nonarch_status == "pass"


def _rational_finite_places_ok(entries: Sequence[int]) -> bool:
    g = 0
    for v in entries:
        g = math.gcd(g, v)
    scaled = [v // g for v in entries]
    for i in range(len(scaled)):
        comp = 0
        for j, v in enumerate(scaled):
            if j != i:
                comp = math.gcd(comp, v)
        if comp != 1:
            return False
    return True


def strong_criteria_check(K: QuadField, a: Sequence[Entry]) -> StrongCriteriaReport:
    """Decide the strict triangle inequality at every archimedean place.

    Comparisons run in exact sqrt-sum arithmetic; an equality is reported
    separately from a violation because the equality case feeds
    unimodular_extract rather than an outright rejection.

    The nonarchimedean condition (each |a_i| at most the max of the others,
    at every finite place) is decided exactly for rational tuples and for
    tuples with at least two rational unit coordinates; anything else is
    reported as "unsupported" rather than silently passed.
    """
    values = tuple(_as_quadint(K, v) for v in a)
    if len(values) < 3:
        raise TupleArityError("need at least three coordinates")
    if not all(values):
        raise ValueError("coordinates must be nonzero")
    equalities = []
    violations = []
    for place in range(K.places):
        absv = [quadint_abs(v, place) for v in values]
        total = SqrtSum.zero()
        for s in absv:
            total = total + s
        for i, s in enumerate(absv):
            rest = total - s
            c = s.compare(rest)
            if c == 0:
                equalities.append((i, place))
            elif c > 0:
                violations.append((i, place))
    if all(v.is_rational for v in values):
        status = "pass" if _rational_finite_places_ok([v.x for v in values]) else "fail"
    elif sum(1 for v in values if v.is_rational and abs(v.x) == 1) >= 2:
        # two unit coordinates pin every finite max at 1, and integral
        # entries never exceed 1 at a finite place
        status = "pass"
    else:
        status = "unsupported"
    return StrongCriteriaReport(
        archimedean_ok=not equalities and not violations,
        equalities=tuple(equalities),
        violations=tuple(violations),
        nonarch_status=status,
    )


# ---------------------------------------------------------------------------
# root-of-unity relations


@dataclass(frozen=True)
class RouRelation:
    """Verified vanishing sum a_1*z^e_1 + ... + a_n*z^e_n = 0, z = zeta_M."""

    common_order: int
    exponents: tuple[int, ...]
    orders: tuple[int, ...]


def _embedding_complex(value: Entry) -> complex:
    if isinstance(value, int):
        return complex(value)
    field = value.field
    om = (1 + csqrt(field.m)) / 2 if field.half else csqrt(field.m)
    return value.x + value.y * om


def _conjugate_bound(value: Entry) -> int:
    if isinstance(value, int):
        return abs(value)
    field = value.field
    w_bound = abs(field.omega_trace) + math.isqrt(abs(field.m)) + 1
    return abs(value.x) + abs(value.y) * w_bound


def _interval_embeddings(values: Sequence[Entry], M: int, exps: Sequence[int]):
    iv = mpmath.iv
    two_pi = 2 * iv.pi
    re = iv.mpf(0)
    im = iv.mpf(0)
    for value, e in zip(values, exps):
        if isinstance(value, int):
            vr, vi = iv.mpf(value), iv.mpf(0)
        else:
            field = value.field
            if field.m > 0:
                root = iv.sqrt(field.m)
                om_re = (field.omega_trace + root) / 2 if field.half else root
                om_im = iv.mpf(0)
            else:
                root = iv.sqrt(-field.m)
                om_re = iv.mpf(field.omega_trace) / 2
                om_im = root / 2 if field.half else root
            vr = value.x + value.y * om_re
            vi = value.y * om_im
        ang = two_pi * e / M
        zr, zi = iv.cos(ang), iv.sin(ang)
        re += vr * zr - vi * zi
        im += vr * zi + vi * zr
    return re, im


def _rigorous_rou_zero(values: Sequence[Entry], M: int, exps: Sequence[int]) -> bool:
    """Exact zero test for a root-of-unity combination.

    The sum is an algebraic integer of degree at most 2*phi(M); if nonzero,
    its modulus is at least 1/B^(D-1) where B bounds every conjugate. The
    interval either clears that separation bound or excludes zero.
    """
    B = max(2, sum(_conjugate_bound(v) for v in values))
    D = 2 * euler_phi(M)
    sep_sq = Fraction(1, B ** (2 * max(D - 1, 1)))
    prec = 64
    while prec <= _PRECISION_CEILING_BITS:
        old = mpmath.iv.prec
        try:
            mpmath.iv.prec = prec
            re, im = _interval_embeddings(values, M, exps)
            mag_sq = re * re + im * im
            lo = mpmath.mpf(mag_sq.a)
            hi = mpmath.mpf(mag_sq.b)
        finally:
            mpmath.iv.prec = old
        if lo > 0:
            return False
        if hi < mpmath.mpf(sep_sq.numerator) / sep_sq.denominator:
            return True
        prec *= 2
    raise PrecisionError(
        f"zero test for order-{M} relation undecided at {_PRECISION_CEILING_BITS} bits")


def rou_relation_search(a: Sequence[Entry], max_order: int = MAX_ROU_ORDER,
                        budget: int = DEFAULT_BUDGET) -> Optional[RouRelation]:
    """First vanishing root-of-unity combination, or None.

    Common orders are scanned in increasing order; within an order the
    exponent tuple (e_1 = 0 fixed) is lexicographically first. Floating
    prefilters only propose candidates: every accepted relation passes the
    rigorous interval test, and near-misses are rejected by it too.
    """
    values = tuple(a)
    if len(values) < 2:
        raise TupleArityError("need at least two coordinates")
    if not all(bool(v) if isinstance(v, QuadInt) else v != 0 for v in values):
        raise ValueError("coordinates must be nonzero")
    n = len(values)
    cost = sum(M ** max(n - 2, 1) for M in range(1, max_order + 1))
    if cost > budget:
        raise BudgetExceededError(
            f"relation scan needs about {cost} probes, budget {budget}",
            required=cost)
    embeds = [_embedding_complex(v) for v in values]
    quantum = 2.0 ** -20
    for M in range(1, max_order + 1):
        roots = [cexp(2j * cpi * k / M) for k in range(M)]
        # last coordinate resolved by hash lookup on a quantized grid
        table: dict = {}
        for e in range(M):
            z = embeds[-1] * roots[e]
            key = (round(z.real / quantum), round(z.imag / quantum))
            table.setdefault(key, []).append(e)
        for mid in itertools.product(range(M), repeat=n - 2):
            partial = embeds[0]
            for v, e in zip(embeds[1:-1], mid):
                partial += v * roots[e]
            target = -partial
            kx = round(target.real / quantum)
            ky = round(target.imag / quantum)
            hits = []
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    hits.extend(table.get((kx + dx, ky + dy), ()))
            for e_last in sorted(hits):
                exps = (0,) + tuple(mid) + (e_last,)
                if _rigorous_rou_zero(values, M, exps):
                    orders = tuple(M // math.gcd(M, e) for e in exps)
                    return RouRelation(common_order=M, exponents=exps, orders=orders)
    return None


# ---------------------------------------------------------------------------
# root-of-unity twisting


def rou_twist(b: BalancedMultiset, j: int, m: int) -> BalancedMultiset:
    """Twist coordinate j (1-based) of a rational balanced multiset by zeta_m.

    Each member x spawns m members: coordinate j carries zeta^(k-1) x_j and
    every other coordinate zeta^k x_i, k = 0..m-1, so the relation for the
    twisted coefficients (a_1, ..., zeta*a_j, ..., a_n) is zeta^k times the
    original one. The result is re-verified, not assumed.
    """
    if not 1 <= m <= MAX_TWIST_ORDER:
        raise ValueError(f"twist order must be in [1, {MAX_TWIST_ORDER}]")
    if not 1 <= j <= b.n:
        raise ValueError(f"coordinate must be in [1, {b.n}]")
    flat = list(b.coeffs) + [v for row in b.members for v in row]
    if not all(isinstance(v, int) for v in flat):
        raise ValueError("twisting requires rational integer entries")
    if m == 1:
        return b
    omega = CycInt.zeta(m, 1)
    coeffs = tuple(
        omega * c if i == j - 1 else CycInt.rational(m, c)
        for i, c in enumerate(b.coeffs)
    )
    members = []
    for row in b.members:
        for k in range(m):
            members.append(tuple(
                CycInt.zeta(m, (k - 1) % m if i == j - 1 else k) * v
                for i, v in enumerate(row)
            ))
    return BalancedMultiset.make(coeffs, members, validate=True)


# ---------------------------------------------------------------------------
# equality-case extraction


@dataclass(frozen=True)
class UnimodularExtract:
    """Sub-multiset of members whose coordinates all attain the maximum.

    normalized means every entry was divided exactly by an element of
    maximal absolute value; otherwise scale carries that element as a
    witness and the members are returned unscaled.
    """

    multiset: BalancedMultiset
    scale: Optional[Entry]
    normalized: bool


def unimodular_extract(a: Sequence[Entry], b: BalancedMultiset,
                       place: int = 0) -> UnimodularExtract:
    """Keep the members whose coordinates all have maximal absolute value.

    Requires the archimedean equality |a_i| = sum of the others for some i
    at the chosen place; under it the extracted sub-multiset is balanced,
    which is verified rather than trusted.
    """
    coeffs = tuple(a)
    absa = [_abs_entry(c, place) for c in coeffs]
    total = SqrtSum.zero()
    for s in absa:
        total = total + s
    if not any(s.compare(total - s) == 0 for s in absa):
        raise EqualityHypothesisError(
            "no coordinate's absolute value equals the sum of the others "
            f"at place {place}")
    best: Optional[SqrtSum] = None
    for row in b.members:
        for v in row:
            s = _abs_entry(v, place)
            if best is None or s.compare(best) > 0:
                best = s
    assert best is not None
    sub = [row for row in b.members
           if all(_abs_entry(v, place).compare(best) == 0 for v in row)]
    if not sub:
        raise ValueError("no member attains the maximum in every coordinate")
    divisor = sub[0][0]
    if isinstance(divisor, int):
        d = abs(divisor)
        members = [tuple(v // d for v in row) for row in sub]
        return UnimodularExtract(
            multiset=BalancedMultiset.make(coeffs, members, validate=True),
            scale=None,
            normalized=True,
        )
    divided = []
    for row in sub:
        out = []
        for v in row:
            q = v.exact_div(divisor)
            if q is None:
                return UnimodularExtract(
                    multiset=BalancedMultiset.make(coeffs, sub, validate=True),
                    scale=divisor,
                    normalized=False,
                )
            out.append(q)
        divided.append(tuple(out))
    return UnimodularExtract(
        multiset=BalancedMultiset.make(coeffs, divided, validate=True),
        scale=None,
        normalized=True,
    )


# ---------------------------------------------------------------------------
# lattice rounding


def frac_sqrt_upper(f: Fraction, bits: int = 64) -> Fraction:
    """A rational upper bound on sqrt(f), tight to about 2^-bits."""
    if f < 0:
        raise ValueError("radicand must be nonnegative")
    p, q = f.numerator, f.denominator
    scale = 1 << bits
    return Fraction(math.isqrt(p * q * scale * scale) + 1, q * scale)


def _nearest_int(f: Fraction) -> int:
    return math.floor(f + Fraction(1, 2))


def _inner(u: QuadInt, v: QuadInt) -> Fraction:
    return (Fraction((u + v).abs_squared()) - u.abs_squared() - v.abs_squared()) / 2


def _lagrange_reduce(u1: QuadInt, u2: QuadInt) -> tuple[QuadInt, QuadInt]:
    if u2.abs_squared() < u1.abs_squared():
        u1, u2 = u2, u1
    while True:
        r = _nearest_int(_inner(u1, u2) / u1.abs_squared())
        u2 = u2 - r * u1
        if u2.abs_squared() < u1.abs_squared():
            u1, u2 = u2, u1
        else:
            break
    if _inner(u1, u2) > 0:
        u2 = -u2
    return u1, u2


def covering_radius_squared(K: QuadField, alpha: QuadInt) -> Fraction:
    """Exact squared covering radius of Z[alpha] under the ambient form.

    Rank 1 (rational alpha) is half the generator; rank 2 reduces the basis
    (1, alpha) and takes the circumradius of the obtuse-superbase triangle,
    which is where a Voronoi cell is farthest from the lattice.
    """
    one = K.one
    if alpha.is_rational:
        return Fraction(one.abs_squared(), 4)
    u1, u2 = _lagrange_reduce(one, alpha)
    A = Fraction(u1.abs_squared())
    B = Fraction(u2.abs_squared())
    C = Fraction((u1 + u2).abs_squared())
    denom = 2 * (A * B + B * C + C * A) - A * A - B * B - C * C
    return A * B * C / denom


def _alpha_abs_upper(alpha: QuadInt) -> Fraction:
    if alpha.is_rational:
        return Fraction(abs(alpha.x))
    K = alpha.field
    if not K.is_real:
        return frac_sqrt_upper(Fraction(alpha.norm()))
    u, v = alpha.embedding_coords(0)
    return abs(u) + abs(v) * frac_sqrt_upper(Fraction(K.m))


def _ball_points(K: QuadField, alpha: QuadInt, r_squared: Fraction) -> list[QuadInt]:
    """All points of Z[alpha] with ambient form at most r_squared, sorted."""
    one = K.one
    q1 = Fraction(one.abs_squared())
    if alpha.is_rational:
        kmax = math.isqrt(math.floor(r_squared / q1))
        pts = [K.element(k) for k in range(-kmax, kmax + 1)]
    else:
        g01 = _inner(one, alpha)
        g11 = Fraction(alpha.abs_squared())
        det = q1 * g11 - g01 * g01
        smax = math.isqrt(math.floor(r_squared * q1 / det))
        pts = []
        for s in range(-smax, smax + 1):
            disc = r_squared * q1 - det * s * s
            up = frac_sqrt_upper(disc)
            p_lo = math.ceil((-g01 * s - up) / q1)
            p_hi = math.floor((-g01 * s + up) / q1)
            for p in range(p_lo, p_hi + 1):
                z = K.element(p + s * alpha.x, s * alpha.y)
                if z.abs_squared() <= r_squared:
                    pts.append(z)
    pts.sort(key=lambda z: (z.abs_squared(), z.sort_key))
    return pts


@dataclass(frozen=True)
class LatticeStep:
    """Rounding matrix C with C.z = alpha*z over the ball points z."""

    matrix: IntMatrix
    points: tuple[QuadInt, ...]
    radius_squared: Fraction
    covering_radius_squared: Fraction
    n: int


def lattice_rounding_step(K: QuadField, alpha: Entry, n: int,
                          radius_factor: int = 0) -> LatticeStep:
    """Round alpha*z/(n-1) to the lattice for every z in an exact-radius ball.

    The radius R is the smallest power of two with
    upper(|alpha|)/(n-1)*R + (n-2)*upper(M) < R, which guarantees both the
    rounded point z_1 and the remainder z_2 = alpha*z - (n-2)*z_1 stay in
    the ball. radius_factor doubles R that many extra times for retries.
    Rows are built as (n-2) units on z_1 plus one on z_2 and the identity
    C.z = alpha*z is asserted entry by entry.
    """
    alpha = _as_quadint(K, alpha)
    if not alpha:
        raise ValueError("alpha must be nonzero")
    if n < 3:
        raise ValueError("need n >= 3")
    if radius_factor < 0:
        raise ValueError("radius_factor must be nonnegative")
    bound = SqrtSum.rational(n - 1)
    for place in range(K.places):
        if quadint_abs(alpha, place).compare(bound) >= 0:
            raise ValueError(
                f"|alpha| at place {place} is not strictly below n-1 = {n - 1}")
    m_squared = covering_radius_squared(K, alpha)
    m_upper = frac_sqrt_upper(m_squared)
    c_upper = _alpha_abs_upper(alpha)
    if c_upper >= n - 1:
        raise PrecisionError("upper bound for |alpha| touched n-1; widen bits")
    r_bound = (n - 2) * m_upper * (n - 1) / ((n - 1) - c_upper)
    k = 0
    while Fraction(2) ** k <= r_bound:
        k += 1
    while k > 0 and Fraction(2) ** (k - 1) > r_bound:
        k -= 1
    k += radius_factor
    radius = Fraction(2) ** k
    r_squared = radius * radius
    points = _ball_points(K, alpha, r_squared)
    index = {z: i for i, z in enumerate(points)}
    size = len(points)
    rows = []
    for z in points:
        w = alpha * z
        tx = Fraction(w.x, n - 1)
        ty = Fraction(w.y, n - 1)
        best = None
        for cand in points:
            dist = K.ambient_q(tx - cand.x, ty - cand.y)
            key = (dist, cand.sort_key)
            if best is None or key < best[0]:
                best = (key, cand)
        z1 = best[1]
        z2 = w - (n - 2) * z1
        j2 = index.get(z2)
        if j2 is None:
            raise AssertionError("remainder point escaped the ball")
        row = [0] * size
        row[index[z1]] += n - 2
        row[j2] += 1
        rows.append(tuple(row))
    matrix = tuple(rows)
    for i, z in enumerate(points):
        acc = K.zero
        for j, c in enumerate(matrix[i]):
            if c:
                acc = acc + c * points[j]
        if acc != alpha * z:
            raise AssertionError("rounding row fails C.z = alpha*z")
    return LatticeStep(
        matrix=matrix,
        points=tuple(points),
        radius_squared=r_squared,
        covering_radius_squared=m_squared,
        n=n,
    )


# ---------------------------------------------------------------------------
# doubly regular rebalancing


@dataclass(frozen=True)
class BridgeResult:
    matrix: IntMatrix
    eigenvector: tuple[QuadInt, ...]
    strategy: str


def matrix_fixes(matrix: Sequence[Sequence[int]], vec: Sequence[QuadInt],
                  alpha: QuadInt) -> bool:
    for i, row in enumerate(matrix):
        acc = alpha.field.zero
        for j, c in enumerate(row):
            if c:
                acc = acc + c * vec[j]
        if acc != alpha * vec[i]:
            return False
    return True


def _sccs(nodes: set, succ: dict) -> list[set]:
    index: dict = {}
    low: dict = {}
    onstack: set = set()
    stack: list = []
    out: list[set] = []
    counter = itertools.count()
    for root in sorted(nodes):
        if root in index:
            continue
        index[root] = low[root] = next(counter)
        stack.append(root)
        onstack.add(root)
        work = [(root, iter(succ[root]))]
        while work:
            node, it = work[-1]
            advanced = False
            for child in it:
                if child not in index:
                    index[child] = low[child] = next(counter)
                    stack.append(child)
                    onstack.add(child)
                    work.append((child, iter(succ[child])))
                    advanced = True
                    break
                if child in onstack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                out.append(comp)
    return out


def _fraction_kernel(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    mat = [row[:] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, m) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = Fraction(1) / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    pivot_of = {c: i for i, c in enumerate(pivots)}
    basis = []
    for free in range(ncols):
        if free in pivot_of:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for c, i in pivot_of.items():
            v[c] = -mat[i][free]
        basis.append(v)
    return basis


def perron_bridge(C: Sequence[Sequence[int]], alpha: Entry,
                  z: Sequence[QuadInt]) -> BridgeResult:
    """Rebalance a row-regular rounding matrix to equal column sums.

    If C is already doubly regular it is returned as found. Otherwise the
    nonzero ball points are restricted to the smallest norm shell admitting
    a nonempty subset closed under the decomposition alpha*p = (n-2)*p_1 +
    p_2, a sink strongly connected component of the chosen decompositions
    is isolated, and its positive left eigenvector (eigenvalue n-1,
    guaranteed by irreducibility) sets member multiplicities. Routing those
    members through slots and reading the columns back produces a doubly
    regular matrix; the eigen identity is verified before returning, and
    failure raises BridgeError carrying C.
    """
    points = tuple(z)
    if not points:
        raise BridgeError("empty point list", matrix=tuple(map(tuple, C)))
    field = points[0].field
    alpha = _as_quadint(field, alpha)
    matrix = tuple(tuple(row) for row in C)
    size = len(matrix)
    if size != len(points) or any(len(row) != size for row in matrix):
        raise ValueError("matrix shape must match the point list")
    row_sums = {sum(row) for row in matrix}
    if len(row_sums) != 1:
        raise ValueError("rows must share a common sum")
    n = row_sums.pop() + 1
    if n < 3:
        raise ValueError("row sums must be at least 2")
    if all(sum(matrix[i][j] for i in range(size)) == n - 1 for j in range(size)):
        if not matrix_fixes(matrix, points, alpha):
            raise BridgeError("doubly regular input fails the eigen identity",
                              matrix=matrix)
        return BridgeResult(matrix=matrix, eigenvector=points, strategy="as-given")
    index = {p: i for i, p in enumerate(points)}

    def find_decomp(i: int, allowed: set) -> Optional[tuple[int, int]]:
        w = alpha * points[i]
        for j1 in sorted(allowed):
            z2 = w - (n - 2) * points[j1]
            j2 = index.get(z2)
            if j2 is not None and j2 in allowed:
                return (j1, j2)
        return None

    def fixpoint(candidates: set) -> set:
        live = set(candidates)
        while True:
            keep = {i for i in live if find_decomp(i, live) is not None}
            if keep == live:
                return live
            live = keep

    nonzero = [i for i, p in enumerate(points) if p]
    shells = sorted({points[i].abs_squared() for i in nonzero})
    live: set = set()
    for bound in shells:
        live = fixpoint({i for i in nonzero if points[i].abs_squared() <= bound})
        if live:
            break
    if not live:
        raise BridgeError("no nonzero subset closed under the decomposition",
                          matrix=matrix)
    decomp = {i: find_decomp(i, live) for i in live}
    succ = {i: sorted(set(decomp[i])) for i in live}
    components = _sccs(live, succ)
    sinks = [comp for comp in components
             if all(child in comp for node in comp for child in succ[node])]
    if not sinks:
        raise BridgeError("no sink component", matrix=matrix)
    final = min(sinks, key=min)
    order = sorted(final)
    pos = {i: k for k, i in enumerate(order)}
    sub = [[0] * len(order) for _ in order]
    for i in order:
        j1, j2 = decomp[i]
        sub[pos[i]][pos[j1]] += n - 2
        sub[pos[i]][pos[j2]] += 1
    eig = [[Fraction(sub[c][r]) - (n - 1 if r == c else 0)
            for c in range(len(order))] for r in range(len(order))]
    basis = _fraction_kernel(eig)
    if len(basis) != 1:
        raise BridgeError(
            f"left eigenspace has dimension {len(basis)}, expected 1",
            matrix=matrix)
    vec = basis[0]
    if all(x <= 0 for x in vec):
        vec = [-x for x in vec]
    if not all(x > 0 for x in vec):
        raise BridgeError("left eigenvector is not positive", matrix=matrix)
    denom_lcm = 1
    for x in vec:
        denom_lcm = denom_lcm * x.denominator // math.gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    mult = {i: ints[pos[i]] // g for i in order}

    member_source = []
    for i in order:
        member_source.extend([i] * mult[i])
    slots = []
    slot_base = {}
    for w in order:
        slot_base[w] = len(slots)
        slots.extend([w] * mult[w])
    total = len(slots)
    if total > 4096:
        raise BridgeError(
            f"rebalanced dimension {total} is too large to materialize",
            matrix=matrix)
    fill = {w: 0 for w in order}
    bip = [[0] * total for _ in range(total)]
    for r, i in enumerate(member_source):
        j1, j2 = decomp[i]
        for w in [j1] * (n - 2) + [j2]:
            col = slot_base[w] + fill[w] // (n - 1)
            fill[w] += 1
            bip[r][col] += 1
    if any(fill[w] != (n - 1) * mult[w] for w in order):
        raise BridgeError("slot routing does not balance", matrix=matrix)
    matchings = birkhoff_decompose(tuple(map(tuple, bip)))
    one = field.one
    coeffs = tuple([one] * (n - 1) + [-alpha])
    members = []
    for r, i in enumerate(member_source):
        coords = tuple(points[slots[mt[r]]] for mt in matchings)
        members.append(coords + (points[i],))
    balanced = BalancedMultiset.make(coeffs, members, validate=True)
    cert = certificate_from_balanced(balanced.coeffs, balanced)
    dim = cert.m
    D = [[0] * dim for _ in range(dim)]
    for p in cert.perms[:-1]:
        for k in range(dim):
            D[k][p[k]] += 1
    D = tuple(map(tuple, D))
    vec_out = cert.kernel
    if any(sum(row) != n - 1 for row in D):
        raise BridgeError("rebalanced rows do not sum to n-1", matrix=matrix)
    if any(sum(D[i][j] for i in range(dim)) != n - 1 for j in range(dim)):
        raise BridgeError("rebalanced columns do not sum to n-1", matrix=matrix)
    if not matrix_fixes(D, vec_out, alpha):
        raise BridgeError("rebalanced matrix fails the eigen identity",
                          matrix=matrix)
    return BridgeResult(matrix=D, eigenvector=tuple(vec_out), strategy="sink-class")


def birkhoff_decompose(D: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Split a doubly regular nonnegative integer matrix into permutations.

    Repeatedly extracts a perfect matching on the positive entries (it exists
    at every stage by Hall's condition for regular bipartite multigraphs) and
    subtracts it. Rows and candidate columns are scanned in ascending order,
    so the output is deterministic.
    """
    size = len(D)
    work = [list(row) for row in D]
    if any(len(row) != size for row in work):
        raise ValueError("matrix must be square")
    if any(any(v < 0 or not isinstance(v, int) for v in row) for row in work):
        raise ValueError("entries must be nonnegative integers")
    sums = {sum(row) for row in work}
    sums |= {sum(work[i][j] for i in range(size)) for j in range(size)}
    if len(sums) != 1:
        raise ValueError("row and column sums must all be equal")
    s = sums.pop()
    perms = []
    for _ in range(s):
        match_col = [-1] * size

        def assign(r: int, visited: set) -> bool:
            for c in range(size):
                if work[r][c] > 0 and c not in visited:
                    visited.add(c)
                    if match_col[c] == -1 or assign(match_col[c], visited):
                        match_col[c] = r
                        return True
            return False

        for r in range(size):
            if not assign(r, set()):
                raise ValueError("no perfect matching on positive entries")
        perm = [0] * size
        for c, r in enumerate(match_col):
            perm[r] = c
        for r, c in enumerate(perm):
            work[r][c] -= 1
        perms.append(tuple(perm))
    return perms


# ---------------------------------------------------------------------------
# certificate verification


def _exact_div_entry(a: Entry, b: Entry) -> Entry:
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact integer division in elimination")
        return q
    q = a.exact_div(b)
    if q is None:
        raise ArithmeticError("inexact ring division in elimination")
    return q


def _det_is_zero(matrix: list[list[Entry]]) -> bool:
    size = len(matrix)
    mat = [row[:] for row in matrix]
    prev: Entry = 1
    for k in range(size - 1):
        if not mat[k][k]:
            swap = next((i for i in range(k + 1, size) if mat[i][k]), None)
            if swap is None:
                return True
            mat[k], mat[swap] = mat[swap], mat[k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]
                mat[i][j] = num if prev == 1 else _exact_div_entry(num, prev)
        prev = mat[k][k]
    return not mat[size - 1][size - 1]


def verify_numfield_certificate(alpha: Entry, n: int,
                                perms: Sequence[Sequence[int]]) -> bool:
    """Check det(sum of permutation matrices - alpha*I) = 0 exactly."""
    perms = [tuple(p) for p in perms]
    if len(perms) != n - 1:
        raise ValueError(f"expected {n - 1} permutations, got {len(perms)}")
    size = len(perms[0])
    for p in perms:
        if len(p) != size or sorted(p) != list(range(size)):
            raise ValueError("malformed permutation")
    S = [[0] * size for _ in range(size)]
    for p in perms:
        for k, image in enumerate(p):
            S[k][image] += 1
    if isinstance(alpha, QuadInt):
        K = alpha.field
        mat = [[K.element(S[i][j]) - (alpha if i == j else K.zero)
                for j in range(size)] for i in range(size)]
    else:
        mat = [[S[i][j] - (alpha if i == j else 0)
                for j in range(size)] for i in range(size)]
    return _det_is_zero(mat)


# ---------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class NumfieldCertificate:
    """Verified doubly regular matrix with eigenvalue alpha, plus its split."""

    field: QuadField
    alpha: QuadInt
    n: int
    matrix: IntMatrix
    perms: tuple[tuple[int, ...], ...]
    eigenvector: tuple[QuadInt, ...]
    radius_squared: Fraction
    covering_radius_squared: Fraction
    strategy: str


def numfield_pipeline(K: QuadField, alpha: Entry, n: int = 3,
                      attempts: int = 4) -> NumfieldCertificate:
    """Full chain from lattice rounding to a verified permutation certificate.

    Retries with a doubled ball radius when the bridge cannot rebalance; the
    final BridgeError propagates with the last rounding matrix attached.
    """
    alpha = _as_quadint(K, alpha)
    last_error: Optional[BridgeError] = None
    for attempt in range(max(attempts, 1)):
        step = lattice_rounding_step(K, alpha, n, radius_factor=attempt)
        try:
            bridge = perron_bridge(step.matrix, alpha, step.points)
        except BridgeError as err:
            last_error = err
            continue
        perms = birkhoff_decompose(bridge.matrix)
        if not verify_numfield_certificate(alpha, n, perms):
            last_error = BridgeError("decomposed certificate failed verification",
                                     matrix=bridge.matrix)
            continue
        return NumfieldCertificate(
            field=K,
            alpha=alpha,
            n=n,
            matrix=bridge.matrix,
            perms=tuple(tuple(p) for p in perms),
            eigenvector=bridge.eigenvector,
            radius_squared=step.radius_squared,
            covering_radius_squared=step.covering_radius_squared,
            strategy=bridge.strategy,
        )
    assert last_error is not None
    raise last_error
