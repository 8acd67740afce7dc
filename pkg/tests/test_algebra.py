"""Polynomial and integer arithmetic tests."""
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smyth.algebra import (
    FieldParams,
    ModElement,
    Poly,
    RatFunc,
    element_order,
    euler_phi,
    ff_kernel,
    format_poly,
    integer_factor,
    is_irreducible,
    is_probable_prime,
    mod_inverse,
    monic_irreducibles,
    monic_polys,
    multiplicative_order_int,
    parse_poly,
    poly_ext_gcd,
    poly_gcd,
    poly_lcm,
    random_irreducible,
    rf_det,
)
from smyth.errors import NonUnitError, ParseError

F2 = FieldParams(2)
F3 = FieldParams(3)
F5 = FieldParams(5)


def P(field, text):
    return parse_poly(field, text)


class TestFieldParams:
    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            FieldParams(4)
        with pytest.raises(ValueError):
            FieldParams(1)

    def test_accepts_primes(self):
        for q in (2, 3, 5, 7, 11, 101):
            assert FieldParams(q).q == q


class TestPolyBasics:
    def test_degree_and_units(self):
        assert P(F2, "0").is_zero
        assert P(F2, "1").is_unit
        assert P(F3, "2").is_unit
        assert not P(F2, "t").is_unit
        assert P(F2, "t^3+t").degree == 3

    def test_str_round_trip(self):
        for text in ("0", "1", "t", "t+1", "t^2+t+1", "t^5+t^3+1"):
            p = P(F2, text)
            assert str(parse_poly(F2, str(p))) == str(p)

    def test_parse_normalizes_coefficients(self):
        assert P(F3, "4*t") == P(F3, "t")
        assert P(F3, "2*t+5") == P(F3, "2*t+2")

    def test_parse_rejects_garbage(self):
        for bad in ("", "t^", "x+1", "t**2", "1++1"):
            with pytest.raises(ParseError):
                parse_poly(F2, bad)

    def test_arithmetic_identities(self):
        p = P(F5, "t^2+3*t+1")
        r = P(F5, "2*t+4")
        assert p + r - r == p
        assert p * F5.one == p
        assert (p * r) % r == F5.zero

    def test_evaluate(self):
        p = P(F5, "t^2+1")
        assert p.evaluate(2) == (4 + 1) % 5


class TestDivmod:
    def test_known_quotient(self):
        a = P(F2, "t^3+t+1")
        b = P(F2, "t+1")
        quo, rem = divmod(a, b)
        assert quo * b + rem == a
        assert rem.degree < b.degree

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            divmod(P(F2, "t"), F2.zero)

    @given(st.integers(0, 3 ** 5 - 1), st.integers(1, 3 ** 3 - 1))
    @settings(max_examples=60, deadline=None)
    def test_reconstruction_property(self, ac, bc):
        a = F3.poly([(ac // 3 ** i) % 3 for i in range(5)])
        b = F3.poly([(bc // 3 ** i) % 3 for i in range(3)])
        quo, rem = divmod(a, b)
        assert quo * b + rem == a
        assert rem.is_zero or rem.degree < b.degree


class TestGcd:
    def test_gcd_is_monic_divisor(self):
        a = P(F2, "t^2+1")  # (t+1)^2 over F_2
        b = P(F2, "t^2+t")  # t(t+1)
        g = poly_gcd(a, b)
        assert g == P(F2, "t+1")
        assert (a % g).is_zero and (b % g).is_zero

    def test_ext_gcd_bezout(self):
        a = P(F5, "t^3+2*t+1")
        b = P(F5, "t^2+4")
        g, x, y = poly_ext_gcd(a, b)
        assert x * a + y * b == g

    def test_lcm_product_relation(self):
        a = P(F3, "t^2+1")
        b = P(F3, "t+2")
        g = poly_gcd(a, b)
        l = poly_lcm(a, b)
        assert (l * g).monic() == (a * b).monic()

    @given(st.integers(1, 2 ** 4 - 1), st.integers(1, 2 ** 4 - 1))
    @settings(max_examples=60, deadline=None)
    def test_gcd_divides_both(self, ac, bc):
        a = F2.poly([(ac >> i) & 1 for i in range(4)])
        b = F2.poly([(bc >> i) & 1 for i in range(4)])
        g = poly_gcd(a, b)
        assert (a % g).is_zero
        assert (b % g).is_zero
        assert g.lc == 1


class TestIrreducibility:
    def test_known_irreducibles(self):
        assert is_irreducible(P(F2, "t^2+t+1"))
        assert is_irreducible(P(F2, "t^3+t+1"))
        assert is_irreducible(P(F3, "t^2+1"))

    def test_known_reducibles(self):
        assert not is_irreducible(P(F2, "t^2+1"))
        assert not is_irreducible(P(F2, "t^2"))
        assert not is_irreducible(P(F3, "t^2+2"))

    @pytest.mark.parametrize("q,D", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2)])
    def test_count_formula(self, q, D):
        # number of monic irreducibles of degree D is (1/D) sum mu(e) q^(D/e)
        field = FieldParams(q)
        count = sum(1 for _ in monic_irreducibles(field, D))

        def mu(n):
            fac = integer_factor(n)
            if any(e > 1 for e in fac.values()):
                return 0
            return -1 if len(fac) % 2 else 1

        expected = sum(mu(e) * q ** (D // e) for e in range(1, D + 1) if D % e == 0) // D
        assert count == expected

    def test_monic_polys_count(self):
        assert sum(1 for _ in monic_polys(F3, 2)) == 9

    def test_random_irreducible_deterministic(self):
        p1 = random_irreducible(5, 3, seed=11)
        p2 = random_irreducible(5, 3, seed=11)
        assert p1 == p2
        assert is_irreducible(p1)
        assert p1.degree == 3


class TestModularArithmetic:
    def test_inverse(self):
        c = P(F2, "t^2+t+1")
        u = ModElement.make(P(F2, "t"), c)
        v = mod_inverse(u)
        assert (u * v).is_one

    def test_inverse_of_nonunit_fails(self):
        c = P(F2, "t^2+t+1")
        with pytest.raises(NonUnitError):
            mod_inverse(ModElement.make(F2.zero, c))

    def test_element_order_divides_group_order(self):
        c = P(F3, "t^2+1")
        group = 3 ** 2 - 1
        rng = random.Random(5)
        for _ in range(10):
            r = F3.poly([rng.randrange(3), rng.randrange(3)])
            if r.is_zero:
                continue
            assert group % element_order(ModElement.make(r, c)) == 0

    def test_order_oracle(self):
        # t generates F_4* = Z/3 via t^2 = t + 1, t^3 = 1
        c = P(F2, "t^2+t+1")
        assert element_order(ModElement.make(P(F2, "t"), c)) == 3

    def test_multiplicative_order_int(self):
        assert multiplicative_order_int(2, 7) == 3
        assert multiplicative_order_int(3, 7) == 6
        assert multiplicative_order_int(-12 * pow(13, -1, 19) % 19, 19) == 18


class TestKernelAndDet:
    def test_planted_kernel(self):
        # rows are chosen so (1, t, 0) is in the kernel
        one, t = F2.one, F2.t
        m = [
            [t, one, F2.zero],
            [t * t, t, one],
            [F2.zero, F2.zero, one],
        ]
        kv = ff_kernel(m)
        assert kv is not None
        for row in m:
            acc = RatFunc.of(F2.zero)
            for entry, x in zip(row, kv):
                acc = acc + RatFunc.of(entry) * x
            assert acc.is_zero

    def test_nonsingular_returns_none(self):
        m = [[F2.one, F2.zero], [F2.zero, F2.one]]
        assert ff_kernel(m) is None

    def test_det_of_identity(self):
        m = [[F3.one, F3.zero], [F3.zero, F3.one]]
        assert not rf_det(m).is_zero

    def test_det_of_singular(self):
        t = F3.t
        m = [[t, t], [t, t]]
        assert rf_det(m).is_zero

    @given(st.integers(0, 2 ** 9 - 1))
    @settings(max_examples=40, deadline=None)
    def test_planted_kernel_random(self, bits):
        # third row = sum of the first two, so the matrix is singular
        entries = [F2.poly([(bits >> (3 * i + j)) & 1 for j in range(3)]) for i in range(3)]
        r1 = entries[:3]
        r2 = [e * F2.t for e in entries]
        r3 = [x + y for x, y in zip(r1, r2)]
        kv = ff_kernel([r1, r2, r3])
        assert kv is not None


class TestIntegerHelpers:
    def test_probable_prime(self):
        assert is_probable_prime(2)
        assert is_probable_prime(97)
        assert is_probable_prime(2 ** 31 - 1)
        assert not is_probable_prime(1)
        assert not is_probable_prime(561)  # Carmichael

    def test_factor(self):
        assert integer_factor(360) == {2: 3, 3: 2, 5: 1}
        assert integer_factor(97) == {97: 1}

    def test_euler_phi(self):
        assert euler_phi(1) == 1
        assert euler_phi(12) == 4
        assert euler_phi(97) == 96

    @given(st.integers(2, 5000))
    @settings(max_examples=50, deadline=None)
    def test_factor_reconstructs(self, n):
        fac = integer_factor(n)
        prod = 1
        for p, e in fac.items():
            assert is_probable_prime(p)
            prod *= p ** e
        assert prod == n
