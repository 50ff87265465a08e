from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from glustab.errors import FreeSymbolDependence, InvalidCharge, PreconditionError
from glustab.klattice import (CentralCharge, FrameAction, Gauss, Geometry, KClass,
                              RotatedCharge, Twist, apply_twist_word, coset_classes, det2,
                              quarter_unit, rotate_charge, standard_charge, torsion_counts,
                              twist_by_divisor, twist_charge, zeta_shift_class)

from conftest import gaussians

I = Gauss(0, 1)


def charges(n_max=4):
    return st.integers(1, n_max).flatmap(
        lambda n: st.lists(gaussians(), min_size=n + 2, max_size=n + 2).map(CentralCharge))


# ---------------------------------------------------------------- evaluation

def test_length_two_torsion_has_fiber_charge():
    Z = CentralCharge.from_parts(I, -1, [Gauss(-1, -1)])
    assert Z.eval(KClass.torsion(1, 1, 2)) == Gauss(-1)
    assert KClass.torsion(1, 1, 2) == KClass.fiber(1)


def test_pullback_rank_and_degree():
    Z = CentralCharge.from_parts(I, -1, [Fraction(-1, 2)])
    assert Z.eval(KClass.pullback(1, 1, 2)) == Gauss(-2, 1)


def test_zero_class():
    assert standard_charge(3).eval(KClass.zero(3)) == Gauss(0)


@given(charges(), st.data())
def test_evaluation_is_linear(Z, data):
    n = Z.n
    coords = st.lists(st.integers(-5, 5), min_size=n + 2, max_size=n + 2)
    a = KClass(tuple(data.draw(coords)))
    b = KClass(tuple(data.draw(coords)))
    k = data.draw(st.integers(-3, 3))
    assert Z.eval(a + b * k) == Z.eval(a) + Z.eval(b) * k


def test_class_length_mismatch():
    with pytest.raises(PreconditionError):
        standard_charge(2).eval(KClass.zero(3))


@given(st.integers(1, 9), st.integers(0, 3))
def test_torsion_counts_by_alternation(m, t):
    # subquotients alternate O_p / zeta O_p starting from the top character
    tops = [(t + m - 1 - j) % 2 for j in range(m)]
    assert torsion_counts(m, t) == (tops.count(0), tops.count(1))


# ---------------------------------------------------------------- twists

def _tensor_point(n, i, c: KClass) -> KClass:
    """Class of E (x) O(p_i) computed generator by generator."""
    x, y, *pts = c.coords
    out = KClass.zero(n)
    out = out + x * KClass.line_bundle(n, 0, (i,))
    out = out + y * KClass.fiber(n)
    for j, k in enumerate(pts, start=1):
        out = out + k * (KClass.zeta_point(n, j) if j == i else KClass.point(n, j))
    return out


def test_twist_by_point_example():
    Z = CentralCharge.from_parts(I, -1, [Gauss(-1, -1)])
    assert twist_charge(Z, Twist("O", 1)).point(1) == I


def test_double_twist_telescopes():
    Z = CentralCharge.from_parts(I, -1, [Gauss(-1, -1)])
    Z2 = twist_charge(twist_charge(Z, Twist("O", 1)), Twist("O", 1))
    assert Z2.point(1) == Z.point(1)
    assert Z2.OX == Z.OX + Z.zeta_point(1) + Z.point(1)
    assert Z2.OX == Z.OX + Z.fiber


def test_empty_twist_word():
    Z = standard_charge(2)
    assert apply_twist_word(Z, []) == Z


@given(charges(3), st.data())
def test_twist_matches_tensor_on_classes(Z, data):
    i = data.draw(st.integers(1, Z.n))
    Zt = twist_charge(Z, Twist("O", i))
    for k in range(Z.n + 2):
        e = [0] * (Z.n + 2)
        e[k] = 1
        c = KClass(tuple(e))
        assert Zt.eval(c) == Z.eval(_tensor_point(Z.n, i, c))


@given(charges(3), st.data())
def test_negative_twist_inverts(Z, data):
    i = data.draw(st.integers(1, Z.n))
    p = data.draw(st.integers(1, 3))
    assert twist_charge(twist_charge(Z, Twist("O", i, p)), Twist("O", i, -p)) == Z


@given(charges(3), st.integers(-3, 3))
def test_pullback_twist(Z, d):
    assert twist_charge(Z, Twist("pullback", 0, d)).OX == Z.OX + Z.fiber * d


def test_zeta_twist_needs_d():
    Z = standard_charge(2)
    with pytest.raises(FreeSymbolDependence):
        twist_charge(Z, Twist("zeta"))
    Zz = twist_charge(Z, Twist("zeta"), d=0)
    assert Zz.point(1) == Z.zeta_point(1)
    assert twist_charge(Z, Twist("zeta", power=2)) == Z


def test_divisor_twist_composes():
    Z = CentralCharge.from_parts(Gauss(1, 3), -1, [Gauss(-1, -1), Gauss(Fraction(1, 3), 2)])
    word = [Twist("O", 1, 2), Twist("O", 2, -1), Twist("pullback", 0, 1)]
    assert twist_by_divisor(Z, [2, -1], 1) == apply_twist_word(Z, word)


# ---------------------------------------------------------------- rotations

def test_half_turn():
    assert rotate_charge(standard_charge(1), 1).fiber == Gauss(1)


def test_zero_rotation():
    Z = standard_charge(2)
    assert rotate_charge(Z, 0) == Z


def test_quarter_turn():
    assert rotate_charge(standard_charge(1), Fraction(1, 2)).OX == Gauss(1)


def test_quarter_units_cycle():
    assert [quarter_unit(k) for k in range(4)] == [Gauss(1), Gauss(0, -1), Gauss(-1), I]


def test_symbolic_rotation_signs():
    R = rotate_charge(standard_charge(1), Fraction(1, 3))
    assert isinstance(R, RotatedCharge)
    # i rotated clockwise by 60 degrees
    assert R.sign_im(KClass.O_X(1)) == 1
    assert R.sign_re(KClass.O_X(1)) == 1
    assert R.sign_im(KClass.fiber(1)) == 1
    again = rotate_charge(R, Fraction(1, 6))
    assert again == standard_charge(1).scale(Gauss(0, -1))


# ---------------------------------------------------------------- det2

def test_det2_examples():
    assert det2(I, Gauss(-1)) == 1
    assert det2(Gauss(1), I) == 1


@given(gaussians())
def test_det2_antisymmetric(z):
    assert det2(z, z) == 0


@given(gaussians(), gaussians(), st.integers(0, 3))
def test_det2_rotation_invariant(a, b, k):
    u = quarter_unit(k)
    assert det2(a * u, b * u) == det2(a, b)


# ---------------------------------------------------------------- cosets

def test_trivial_coset():
    c = coset_classes(Geometry(1))[0]
    assert (c.S, c.eps, c.base) == ((), 0, KClass.O_X(1))


def test_point_coset():
    c = [c for c in coset_classes(Geometry(1)) if c.S == (1,) and c.eps == 0][0]
    assert c.base == KClass.O_X(1) + KClass.fiber(1) - KClass.point(1, 1)


def test_zeta_coset_carries_symbol():
    c = [c for c in coset_classes(Geometry(1)) if c.S == () and c.eps == 1][0]
    assert c.base == KClass.O_X(1) - KClass.point(1, 1)
    assert c.d_coeff == 1
    with pytest.raises(FreeSymbolDependence):
        standard_charge(1).eval(c)
    assert zeta_shift_class(1).base == -KClass.point(1, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_coset_count(n):
    classes = coset_classes(Geometry(n))
    assert len(classes) == 2 ** (n + 1)
    assert len({(c.S, c.eps) for c in classes}) == 2 ** (n + 1)


def test_zeta_coset_readable_with_zero_fiber():
    Z = CentralCharge.from_parts(I, 0, [Gauss(-1)])
    c = [c for c in coset_classes(Geometry(1)) if c.eps == 1][0]
    assert Z.eval(c) == Gauss(1, 1)


# ---------------------------------------------------------------- serialization and frames

@given(charges())
def test_charge_json_round_trip(Z):
    assert CentralCharge.from_json(Z.to_json()) == Z


def test_charge_json_n_mismatch():
    data = standard_charge(2).to_json()
    data["n"] = 3
    with pytest.raises(InvalidCharge):
        CentralCharge.from_json(data)


def test_frame_json_round_trip():
    f = FrameAction(Gauss(0, 1), Fraction(-1, 2), (1, 0), 2)
    assert FrameAction.from_json(f.to_json()) == f


def test_frame_apply():
    Z = standard_charge(1)
    f = FrameAction(Gauss(-1), 1, (1,))
    assert f.apply(Z) == twist_charge(Z.scale(-1), Twist("O", 1))
    assert f.parity(1) == 1


def test_geometry_validation():
    with pytest.raises(PreconditionError):
        Geometry(0)
    assert Geometry(2).labels == ("p1", "p2")
