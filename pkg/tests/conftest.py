from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from glustab.klattice import Gauss, Geometry, coset_classes, det2

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def rationals(bound=4, max_den=6):
    return st.builds(lambda p, q: Fraction(p, q),
                     st.integers(-bound * max_den, bound * max_den), st.integers(1, max_den))


def gaussians(bound=4, max_den=6):
    return st.builds(Gauss, rationals(bound, max_den), rationals(bound, max_den))


def in_h_prime_gaussians(bound=4, max_den=6):
    """Gaussian rationals in the open upper half-plane or on the negative real axis."""
    upper = st.builds(Gauss, rationals(bound, max_den),
                      st.builds(lambda p, q: Fraction(p, q), st.integers(1, bound * max_den),
                                st.integers(1, max_den)))
    negative = st.builds(lambda p, q: Gauss(Fraction(-p, q)), st.integers(1, bound * max_den),
                         st.integers(1, max_den))
    return st.one_of(upper, negative)


def _ubar_from(parts):
    """Normalized data (fiber -1) with Im Z(O_X) large enough, then multiplied by m."""
    x, slack, points, m = parts
    y = slack + sum((u.im for u in points if u.im > 0), Fraction(0))
    vals = [Gauss(x, y), Gauss(-1)] + points
    return [z * m for z in vals]


def _valid_point(u):
    # neither Z(O_p) nor Z(zeta O_p) = -1 - Z(O_p) on the non-negative reals
    return not (u.im == 0 and (u.re >= 0 or u.re <= -1))


def ubar_charges(n_max=4):
    """Charge values (O_X, fiber, points...) lying in U-bar, built rather than filtered."""
    nonzero = gaussians(3, 4).filter(lambda z: not z.is_zero())
    slack = st.builds(lambda p, q: Fraction(p, q), st.integers(1, 12), st.integers(1, 4))
    return st.integers(1, n_max).flatmap(
        lambda n: st.tuples(rationals(3, 4), slack,
                            st.lists(gaussians(3, 4).filter(_valid_point), min_size=n, max_size=n),
                            nonzero).map(_ubar_from))


def random_ubar(rng, n):
    """Plain-random counterpart of :func:`ubar_charges` for the timed acceptance runs."""
    def q(bound=3, den=4):
        return Fraction(rng.randint(-bound * den, bound * den), rng.randint(1, den))
    points = []
    while len(points) < n:
        u = Gauss(q(), q())
        if _valid_point(u):
            points.append(u)
    m = Gauss(0)
    while m.is_zero():
        m = Gauss(q(), q())
    return _ubar_from((q(), Fraction(rng.randint(1, 12), rng.randint(1, 4)), points, m))


def ubar_oracle(Z):
    """Brute force over every coset representative and every point.

    Returns (in U-bar, violated condition, minimum of det2(Z(L), v) over the cosets).
    """
    v = Z.fiber
    for i in range(1, Z.n + 1):
        for z in (Z.point(i), Z.zeta_point(i)):
            if det2(z, v) == 0 and (z.re * v.re + z.im * v.im) <= 0:
                return False, 2, None
    # the symbolic d * v term drops out of det2(., v)
    worst = min(det2(Z.eval(c.base), v) for c in coset_classes(Geometry(Z.n)))
    return worst > 0, None if worst > 0 else 1, worst


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES
