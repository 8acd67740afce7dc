"""Number field pipeline tests: criteria, relations, lattices, certificates."""
from fractions import Fraction

import pytest

from smyth.core import BalancedMultiset
from smyth.errors import (
    BridgeError,
    EqualityHypothesisError,
    TupleArityError,
)
from smyth.numfield import (
    birkhoff_decompose,
    covering_radius_squared,
    frac_sqrt_upper,
    lattice_rounding_step,
    matrix_fixes,
    numfield_pipeline,
    perron_bridge,
    rou_relation_search,
    rou_twist,
    strong_criteria_check,
    unimodular_extract,
    verify_numfield_certificate,
)
from smyth.quadratic import QuadField

GAUSS = QuadField(-1)
M7 = QuadField(-7)
M15 = QuadField(-15)
M2 = QuadField(-2)
REAL2 = QuadField(2)


class TestStrongCriteria:
    def test_integer_triple_passes(self):
        rep = strong_criteria_check(M7, [3, 4, -5])
        assert rep.archimedean_ok
        assert rep.nonarch_status == "pass"
        assert rep.passes

    def test_shared_factor_fails_nonarch(self):
        # removing the 3 leaves (2, -4) with gcd 2
        rep = strong_criteria_check(M7, [2, 3, -4])
        assert rep.archimedean_ok
        assert rep.nonarch_status == "fail"
        assert not rep.passes

    def test_arity_guard(self):
        with pytest.raises(TupleArityError):
            strong_criteria_check(M7, [1, 2])

    def test_violation_detected(self):
        rep = strong_criteria_check(M7, [1, 1, 5])
        assert not rep.archimedean_ok
        assert (2, 0) in rep.violations
        assert not rep.passes

    def test_equality_detected(self):
        # |omega| = 2 in the sqrt(-15) ring while the others sum to 2
        rep = strong_criteria_check(M15, [1, 1, M15.omega])
        assert (2, 0) in rep.equalities
        assert not rep.passes

    def test_unit_coordinate_fallback(self):
        # two rational unit coordinates support the finite-place argument
        rep = strong_criteria_check(M7, [1, -1, M7.element(1, 1)])
        assert rep.nonarch_status in ("pass", "unsupported")

    def test_real_field_places(self):
        rep = strong_criteria_check(REAL2, [1, 1, 1])
        assert rep.archimedean_ok
        assert rep.passes


class TestRouRelationSearch:
    def test_rational_signs_are_order_one_or_two(self):
        rel = rou_relation_search([GAUSS.element(2), GAUSS.element(3), GAUSS.element(-5)])
        assert rel is not None
        assert rel.common_order in (1, 2)
        assert 2 + 3 - 5 == 0

    def test_cube_roots_for_ones(self):
        rel = rou_relation_search([GAUSS.one, GAUSS.one, GAUSS.one])
        assert rel is not None
        assert rel.common_order == 3
        assert rel.exponents == (0, 1, 2)
        assert sorted(rel.orders) == [1, 3, 3]

    def test_negative_control_sqrt_minus_15(self):
        rel = rou_relation_search([M15.one, M15.one, M15.omega], max_order=60)
        assert rel is None

    def test_exponent_normalization(self):
        rel = rou_relation_search([GAUSS.one, GAUSS.one, GAUSS.one])
        assert rel.exponents[0] == 0


class TestRouTwist:
    def _base(self):
        return BalancedMultiset.make((1, 1, -2), [(1, 1, 1), (2, 2, 2)], validate=True)

    def test_order_one_is_identity(self):
        b = self._base()
        assert rou_twist(b, 1, 1) is b

    @pytest.mark.parametrize("m", [2, 3, 4, 6])
    def test_twist_balances(self, m):
        b = self._base()
        tw = rou_twist(b, 1, m)
        assert tw.size == b.size * m
        # re-validation happened inside make; spot-check one relation
        c = tw.coeffs
        v = tw.members[0]
        assert not (c[0] * v[0] + c[1] * v[1] + c[2] * v[2])

    def test_twist_other_coordinate(self):
        tw = rou_twist(self._base(), 3, 2)
        assert tw.size == 4

    def test_rejects_bad_coordinate(self):
        with pytest.raises(ValueError):
            rou_twist(self._base(), 4, 2)

    def test_rejects_large_order(self):
        with pytest.raises(ValueError):
            rou_twist(self._base(), 1, 25)

    def test_rejects_non_integer_multiset(self):
        b = BalancedMultiset.make(
            (GAUSS.one, GAUSS.one, GAUSS.element(-2)),
            [(GAUSS.one, GAUSS.one, GAUSS.one)],
            validate=True,
        )
        with pytest.raises(ValueError):
            rou_twist(b, 1, 2)


class TestUnimodularExtract:
    def test_requires_equality(self):
        b = BalancedMultiset.make((1, 1, -2), [(1, 1, 1)], validate=True)
        with pytest.raises(EqualityHypothesisError):
            unimodular_extract((1, 1, -3), b)

    def test_extracts_max_rows(self):
        # |-2| = |1| + |1| holds; only (2,2,2) attains the max modulus in
        # every coordinate, and dividing by 2 normalizes it to units
        b = BalancedMultiset.make(
            (1, 1, -2), [(2, 2, 2), (1, 1, 1), (1, 1, 1)], validate=True
        )
        res = unimodular_extract((1, 1, -2), b)
        assert res.normalized
        members = res.multiset.members
        assert all(abs(v) == 1 for row in members for v in row)

    def test_unit_rows_pass_through(self):
        b = BalancedMultiset.make(
            (1, 1, -2), [(1, 1, 1), (-1, -1, -1)], validate=True
        )
        res = unimodular_extract((1, 1, -2), b)
        assert res.normalized
        assert res.multiset.size == 2


class TestFracSqrtUpper:
    def test_upper_bound_tightness(self):
        for f in (Fraction(2), Fraction(3, 4), Fraction(17, 5)):
            ub = frac_sqrt_upper(f)
            assert ub * ub >= f
            # within 2^-60 relative slack
            assert (ub - Fraction(1, 1 << 60)) ** 2 <= f or ub <= Fraction(1, 1 << 59)

    def test_exact_squares(self):
        assert frac_sqrt_upper(Fraction(4)) ** 2 >= 4
        assert 0 <= frac_sqrt_upper(Fraction(0)) <= Fraction(1, 1 << 60)


class TestCoveringRadius:
    def test_frozen_oracles(self):
        assert covering_radius_squared(M7, M7.omega) == Fraction(4, 7)
        assert covering_radius_squared(M2, M2.omega) == Fraction(3, 4)
        assert covering_radius_squared(GAUSS, GAUSS.omega) == Fraction(1, 2)
        assert covering_radius_squared(REAL2, REAL2.omega) == Fraction(3, 2)

    def test_rational_alpha_rank_one(self):
        assert covering_radius_squared(M7, M7.element(2)) == Fraction(1, 4)


class TestLatticeRoundingStep:
    def test_sqrt_minus_7(self):
        step = lattice_rounding_step(M7, M7.omega, 3)
        assert step.radius_squared == Fraction(16)
        assert len(step.points) == 43
        assert len(step.matrix) == 43
        assert all(sum(row) == 2 for row in step.matrix)

    def test_strictness_guard(self):
        # |omega| = 2 = n - 1 in the sqrt(-15) ring: not strictly inside
        with pytest.raises(ValueError):
            lattice_rounding_step(M15, M15.omega, 3)

    def test_matrix_acts_on_points(self):
        step = lattice_rounding_step(GAUSS, GAUSS.omega, 3)
        alpha = GAUSS.omega
        for i, row in enumerate(step.matrix):
            acc = GAUSS.zero
            for j, e in enumerate(row):
                acc = acc + e * step.points[j]
            assert acc == alpha * step.points[i]


class TestPerronBridge:
    def test_as_given_when_doubly_regular(self):
        # alpha = 2 fixes the all-ones vector of [[1,1],[1,1]]
        pts = (GAUSS.one, GAUSS.one)
        C = [[1, 1], [1, 1]]
        res = perron_bridge(C, GAUSS.element(2), pts)
        assert res.strategy == "as-given"
        assert res.matrix == ((1, 1), (1, 1))

    def test_impossible_rebalance_raises(self):
        # only 0 and 1 among the points: alpha*1 = 1 has no two-part
        # decomposition with both parts nonzero points
        pts = (GAUSS.zero, GAUSS.one)
        C = [[2, 0], [1, 1]]
        with pytest.raises(BridgeError) as exc:
            perron_bridge(C, GAUSS.one, pts)
        assert exc.value.matrix == ((2, 0), (1, 1))

    def test_bad_row_sums_rejected(self):
        pts = (GAUSS.one, GAUSS.omega)
        with pytest.raises(ValueError):
            perron_bridge([[1, 0], [1, 1]], GAUSS.one, pts)

    def test_rebalance_from_lattice_step(self):
        step = lattice_rounding_step(M7, M7.omega, 3)
        res = perron_bridge(step.matrix, M7.omega, step.points)
        assert res.strategy == "sink-class"
        size = len(res.matrix)
        assert all(sum(row) == 2 for row in res.matrix)
        assert all(sum(res.matrix[i][j] for i in range(size)) == 2 for j in range(size))
        assert matrix_fixes(res.matrix, res.eigenvector, M7.omega)


class TestBirkhoff:
    def test_decomposes_doubly_regular(self):
        D = ((1, 1, 0), (0, 1, 1), (1, 0, 1))
        perms = birkhoff_decompose(D)
        assert len(perms) == 2
        total = [[0] * 3 for _ in range(3)]
        for p in perms:
            for r, c in enumerate(p):
                total[r][c] += 1
        assert tuple(map(tuple, total)) == D

    def test_multiplicity_entries(self):
        D = ((2, 0), (0, 2))
        perms = birkhoff_decompose(D)
        assert perms == [(0, 1), (0, 1)]

    def test_rejects_unbalanced(self):
        with pytest.raises(ValueError):
            birkhoff_decompose(((1, 0), (1, 1)))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            birkhoff_decompose(((2, -1), (-1, 2)))


class TestVerifyNumfieldCertificate:
    def test_integer_eigenvalue_two(self):
        # two identity permutations sum to 2I, and 2 is an eigenvalue
        assert verify_numfield_certificate(2, 3, ((0, 1), (0, 1)))

    def test_rejects_non_eigenvalue(self):
        assert not verify_numfield_certificate(3, 3, ((0, 1), (1, 0)))

    def test_quadratic_alpha(self):
        # column sums are 2, and alpha = 2 is rational inside the ring
        assert verify_numfield_certificate(GAUSS.element(2), 3, ((0, 1), (0, 1)))

    def test_perm_count_guard(self):
        with pytest.raises(ValueError):
            verify_numfield_certificate(2, 4, ((0, 1), (0, 1)))


class TestPipeline:
    def test_sqrt_minus_7_end_to_end(self):
        cert = numfield_pipeline(M7, M7.omega, n=3)
        assert cert.n == 3
        assert cert.covering_radius_squared == Fraction(4, 7)
        assert verify_numfield_certificate(cert.alpha, cert.n, cert.perms)
        size = len(cert.matrix)
        assert all(sum(row) == 2 for row in cert.matrix)
        assert all(sum(cert.matrix[i][j] for i in range(size)) == 2 for j in range(size))

    def test_gauss_unit(self):
        cert = numfield_pipeline(GAUSS, GAUSS.omega, n=3)
        assert verify_numfield_certificate(cert.alpha, cert.n, cert.perms)

    def test_negative_control_raises(self):
        with pytest.raises(ValueError):
            numfield_pipeline(M15, M15.omega, n=3)
