import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from glustab.errors import BranchCut, InvalidStability, NotInRegion, UnsupportedHeart
from glustab.klattice import Gauss
from glustab.local_stab import (MINUS, PLUS, SEMISTABLE, STABLE, UNSTABLE, WALL, LocalObject,
                                LocalStability, act_C, act_exact, chamber, chart_transition, delta,
                                f_of, hn_local, oracle_chamber, uniformize, uniformize_derivative,
                                uniformize_inverse, uniformize_mp, zeta_swap)

from conftest import in_h_prime_gaussians

I = Gauss(0, 1)


def statuses(rep):
    return tuple(st for st, _ in rep.entries)


# ---------------------------------------------------------------- chambers on the slice

def test_plus_chart_small_twist():
    rep = chamber(LocalStability(0, PLUS, complex(-0.3, 0.25)))
    assert rep.status("O_p") == STABLE and rep.status("zeta*O_p") == STABLE
    assert rep.semistable("O_2p") and rep.phase("O_2p") == 0
    assert rep.status("zeta*O_2p") == UNSTABLE
    assert math.isclose(rep.phase("O_p"), 0.25)


def test_plus_chart_large_twist():
    rep = chamber(LocalStability(0, PLUS, complex(0.1, 1.5)))
    assert statuses(rep) == (STABLE, UNSTABLE, STABLE, UNSTABLE)


def test_wall_on_slice():
    rep = chamber(LocalStability(0, WALL, complex(-0.4, 0)))
    assert statuses(rep) == (STABLE, STABLE, SEMISTABLE, SEMISTABLE)
    assert all(ph == 0 for _, ph in rep.entries)


def test_minus_chart_mirrors_plus():
    p = chamber(LocalStability(0.2j, PLUS, complex(-0.1, -0.6)))
    m = chamber(LocalStability(0.2j, MINUS, complex(-0.1, -0.6)))
    assert m.entries == p.swapped().entries


def test_branch_cut_rejected():
    with pytest.raises(BranchCut):
        LocalStability(0, PLUS, complex(0.3, 0))
    with pytest.raises(InvalidStability):
        LocalStability(0, "SIDEWAYS", complex(0.3, 1))


def test_oracle_collinear():
    rep = oracle_chamber(-1, -1)
    assert statuses(rep) == (STABLE, STABLE, SEMISTABLE, SEMISTABLE)
    assert all(ph == 1 for _, ph in rep.entries)


def test_oracle_quadrant_pair():
    rep = oracle_chamber(-1, I)
    assert statuses(rep) == (STABLE, STABLE, STABLE, UNSTABLE)
    assert rep.phase("O_2p") == Fraction(3, 4)
    assert rep.phase("zeta*O_p") == Fraction(1, 2)
    mirror = oracle_chamber(I, -1)
    assert statuses(mirror) == (STABLE, STABLE, UNSTABLE, STABLE)
    assert mirror.phase("zeta*O_2p") == Fraction(3, 4)


@given(in_h_prime_gaussians(), in_h_prime_gaussians())
def test_chamber_matches_oracle(u, w):
    assume(not (u + w).is_zero())
    assert chamber(LocalStability.from_charges(u, w)).entries == oracle_chamber(u, w).entries


@given(in_h_prime_gaussians(), st.integers(1, 5))
def test_chamber_matches_oracle_on_walls(u, k):
    # collinear charges: w a positive multiple of u
    w = u * k
    assert chamber(LocalStability.from_charges(u, w)).entries == oracle_chamber(u, w).entries


@given(in_h_prime_gaussians(), in_h_prime_gaussians(), st.sampled_from([I, Gauss(-1), Gauss(2, 1), Gauss(-1, -1)]))
def test_chamber_statuses_invariant_under_multiplication(u, w, m):
    assume(not (u + w).is_zero())
    sigma = LocalStability.from_charges(u, w)
    moved = act_exact(sigma, m, float(mpmath.arg(complex(m))) / math.pi)
    assert statuses(chamber(moved)) == statuses(chamber(sigma))


@given(in_h_prime_gaussians(), in_h_prime_gaussians())
def test_zeta_swap_swaps_report(u, w):
    assume(not (u + w).is_zero())
    sigma = LocalStability.from_charges(u, w)
    assert chamber(zeta_swap(sigma)).entries == chamber(sigma).swapped().entries


@given(in_h_prime_gaussians(), in_h_prime_gaussians())
def test_json_round_trip(u, w):
    assume(not (u + w).is_zero())
    sigma = LocalStability.from_charges(u, w)
    assert LocalStability.from_json(sigma.to_json()).canonical_key() == sigma.canonical_key()


# ---------------------------------------------------------------- group action

def test_f_on_slice():
    sigma = LocalStability(0, PLUS, complex(-0.2, 0.3))
    assert f_of(sigma) == 0
    moved = act_C(sigma, 1j)
    assert f_of(moved) == 1j
    u, w = moved.charges()
    assert cmath.isclose(u + w, -1, abs_tol=1e-15)


def test_pure_rescale():
    sigma = act_C(LocalStability(0, PLUS, complex(-0.2, 0.3)), math.log(2) / math.pi)
    u, w = sigma.charges()
    assert cmath.isclose(u + w, 2, rel_tol=1e-14)


def test_action_identity_and_group_law():
    sigma = LocalStability(0, PLUS, complex(-0.2, 0.3))
    assert act_C(sigma, 0) == sigma
    back = act_C(act_C(sigma, 1j), -1j)
    assert back.f == sigma.f and back.coord == sigma.coord


def test_action_moves_phase_lift():
    sigma = act_C(LocalStability(0, WALL, complex(-0.5, 0)), 1j)
    rep = chamber(sigma)
    assert rep.phase("O_2p") == 1
    u, w = sigma.charges()
    assert cmath.isclose(u + w, -1, abs_tol=1e-15)


def test_exact_f_consistency():
    sigma = LocalStability.from_charges(I, -1)
    assert cmath.isclose(cmath.exp(math.pi * f_of(sigma)), complex(-1, 1))


# ---------------------------------------------------------------- charts and delta

def test_chart_transition_near_wall():
    sigma = LocalStability(0, PLUS, complex(-0.7, 1e-9))
    other = chart_transition(sigma)
    assert other.chart == MINUS and other.coord.imag < 0
    u, w = other.slice_values()
    u0, w0 = sigma.slice_values()
    assert cmath.isclose(u, u0, abs_tol=1e-12) and cmath.isclose(w, w0, abs_tol=1e-12)


def test_chart_transition_region():
    with pytest.raises(NotInRegion):
        chart_transition(LocalStability(0, PLUS, complex(-0.2, 1.0)))
    with pytest.raises(NotInRegion):
        chart_transition(LocalStability(0, PLUS, complex(-0.2, -1.3)))


@given(st.floats(-2, 0.8), st.floats(-0.95, 0.95).filter(lambda t: abs(t) > 1e-3))
def test_chart_transition_is_involution(x, t):
    sigma = LocalStability(0, PLUS, complex(x, t))
    back = chart_transition(chart_transition(sigma))
    assert back.chart == PLUS
    assert cmath.isclose(back.coord, sigma.coord, abs_tol=1e-9)


@given(in_h_prime_gaussians(), in_h_prime_gaussians())
def test_exact_chart_transition_preserves_point(u, w):
    assume(not (u + w).is_zero())
    sigma = LocalStability.from_charges(u, w)
    rep = chamber(sigma)
    assume(sigma.chart != WALL and rep.U_plus and rep.U_minus)
    other = chart_transition(sigma)
    assert other.canonical_key() == sigma.canonical_key()
    assert chamber(other).entries == rep.entries


def test_delta_vanishes_on_w_plus():
    sigma = LocalStability.from_charges(-1, I)
    assert chamber(sigma).W_plus and delta(sigma) == 0


def test_delta_on_w_minus_side():
    sigma = LocalStability.from_charges(I, -1)
    assert delta(sigma) == -1  # det2(-1, -1 + i)
    normalized = LocalStability.from_exact(Gauss(Fraction(-1, 2), Fraction(-1, 2)), Gauss(Fraction(-1, 2), Fraction(1, 2)),
                                           1, PLUS, Fraction(-3, 4))
    assert chamber(normalized).W_minus
    assert delta(normalized) == Fraction(1, 2)  # Im Z(zeta O_p) when Z(O_2p) = -1


def test_delta_limit_at_wall():
    for h in (1e-6, 1e-8):
        assert abs(delta(LocalStability(0, PLUS, complex(-0.5, -h)))) < 4 * h


# ---------------------------------------------------------------- local HN

def test_simple_object_single_factor():
    sigma = LocalStability.from_charges(Gauss(-1, 1), Gauss(1, 2))
    res = hn_local(LocalObject.single(1), sigma)
    assert len(res.factors) == 1


def test_triple_point_rotated_frame():
    sigma = LocalStability.from_charges(I, -1)
    res = hn_local(LocalObject.single(3), sigma)
    assert [(f.label, f.phase) for f in res.factors] == [("zeta*O_2p", Fraction(3, 4)), ("O_p", Fraction(1, 2))]


def test_shift_equivariance():
    sigma = LocalStability.from_charges(-1, I)
    base = hn_local(LocalObject.single(2, 1), sigma)
    shifted = hn_local(LocalObject.single(2, 1, shift=5), sigma)
    assert [f.phase for f in shifted.factors] == [f.phase + 5 for f in base.factors]


def test_rotated_heart_after_action():
    sigma = act_exact(LocalStability.from_charges(I, -1), I, Fraction(1, 2))
    res = hn_local(LocalObject.single(3), sigma)
    assert [f.phase for f in res.factors] == [Fraction(5, 4), 1]


def test_unsupported_heart():
    sigma = LocalStability(0, PLUS, complex(0.1, 1.5))
    with pytest.raises(UnsupportedHeart):
        hn_local(LocalObject.single(2), sigma)


# ---------------------------------------------------------------- uniformization

def _oracle(z):
    """1/2 + (1/sqrt(pi)) * integral_0^z exp(-t^2) dt: Maclaurin series near 0, quadrature beyond."""
    with mpmath.workdps(50):
        z = mpmath.mpc(z)
        if abs(z) <= 4:
            total, term, k = mpmath.mpc(0), z, 0
            while True:
                total += term / (2 * k + 1)
                if abs(term) < mpmath.mpf(10) ** -45 and k > 2:
                    break
                k += 1
                term = -term * z * z / k
        else:
            total = mpmath.quad(lambda s: mpmath.exp(-(z * s) ** 2) * z, [0, 0.5, 1])
        return complex(mpmath.mpf(1) / 2 + total / mpmath.sqrt(mpmath.pi))


def test_uniformize_center():
    assert uniformize(0) == 0.5
    assert uniformize_mp(0) == mpmath.mpf(1) / 2


def test_uniformize_at_one():
    assert math.isclose(uniformize(1).real, 0.921350396, abs_tol=1e-9)
    assert math.isclose(uniformize(1).real, (1 + math.erf(1)) / 2, abs_tol=1e-15)


@given(st.complex_numbers(max_magnitude=6, allow_nan=False, allow_infinity=False))
def test_uniformize_matches_integral(z):
    ref = _oracle(z)
    assert cmath.isclose(uniformize(z), ref, rel_tol=1e-13, abs_tol=1e-14)


@given(st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False))
def test_uniformize_symmetry(z):
    with mpmath.workdps(40):
        assert abs(uniformize_mp(z) + uniformize_mp(-z) - 1) < mpmath.mpf(10) ** -30


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_uniformize_derivative_matches_difference(z):
    h = mpmath.mpf(10) ** -12
    with mpmath.workdps(40):
        fd = (uniformize_mp(z + h) - uniformize_mp(z - h)) / (2 * h)
        assert abs(complex(fd) - uniformize_derivative(z)) <= 1e-8 * max(1, abs(fd))


@given(st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False))
def test_uniformize_inverse(z):
    target = uniformize(z)
    assert cmath.isclose(uniformize(uniformize_inverse(target, z + 0.05)), target, abs_tol=1e-11)


def test_slice_values_sum_to_one():
    sigma = LocalStability(0, PLUS, complex(-0.3, 0.6))
    u, w = sigma.slice_values()
    assert cmath.isclose(u + w, 1)
