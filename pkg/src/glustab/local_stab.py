"""Stability conditions on the category of objects supported at one ramification point.

The numerical K-group is Z^2 with basis ([O_p], [zeta O_p]); a charge is the pair
``(u, w) = (Z(O_p), Z(zeta O_p))`` and ``s = u + w`` is the charge of both length-2
sheaves.  A point of the space is stored as ``f`` (with ``exp(pi f) = s``), a chart
label and a chart coordinate on the slice ``f = 0``.  When the charges are Gaussian
rationals they ride along in :class:`ExactLocal` and every decision is made exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import mpmath

from .errors import BranchCut, InvalidStability, InvalidStabilityFunction, NotInRegion, UnsupportedHeart
from .klattice import Gauss, det2, dot2
from .slicing import (HNResult, fmt_phase, hn_direct_sum, hn_polygon, in_h_prime, is_stable,
                      lift_near, parse_phase, phase, torsion_chain)

PLUS, MINUS, WALL = "PLUS", "MINUS", "WALL"
CHARTS = (PLUS, MINUS, WALL)

STABLE = "stable"
SEMISTABLE = "strictly-semistable"
UNSTABLE = "unstable"

OBJECTS = ("O_p", "zeta*O_p", "O_2p", "zeta*O_2p")

_SWAP = {PLUS: MINUS, MINUS: PLUS, WALL: WALL}


def _fl(x):
    return float(x)


@dataclass(frozen=True)
class ExactLocal:
    """Exact charges plus the lifts that pin down the slicing.

    ``f_lift`` is the phase of whichever length-2 sheaf is semistable, ``chart_lift``
    the phase of the chart object (O_p on PLUS, zeta O_p on MINUS, both on WALL).
    """

    u: Gauss
    w: Gauss
    f_lift: object
    chart_lift: object

    @property
    def s(self) -> Gauss:
        return self.u + self.w


@dataclass(frozen=True)
class LocalStability:
    f: complex
    chart: str
    coord: complex
    exact: Optional[ExactLocal] = None

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise InvalidStability(f"unknown chart {self.chart!r}")
        object.__setattr__(self, "f", complex(self.f))
        object.__setattr__(self, "coord", complex(self.coord))
        c = self.coord
        if self.exact is None and self.chart != WALL and c.imag == 0:
            if c.real >= 0:
                raise BranchCut("chart coordinate lies on the non-negative real axis")
            object.__setattr__(self, "chart", WALL)
        if self.chart == WALL and self.exact is None:
            if c.imag != 0 or c.real >= 0:
                raise InvalidStability("wall coordinate must be a negative real number")

    # ---------------------------------------------------------------- builders
    @classmethod
    def from_exact(cls, u, w, f_lift, chart, chart_lift=None) -> "LocalStability":
        u, w = Gauss.coerce(u), Gauss.coerce(w)
        s = u + w
        if u.is_zero() or w.is_zero() or s.is_zero():
            raise InvalidStability("charges of O_p, zeta O_p and O_2p must be nonzero")
        f_lift = lift_near(s, f_lift)
        if chart == WALL:
            if det2(u, w) != 0 or dot2(u, w) <= 0:
                raise InvalidStability("on the wall O_p and zeta O_p have the same phase")
            chart_lift = lift_near(u, f_lift)
            coord = complex(math.log(abs(u) / abs(s)) / math.pi, 0.0)
            f = complex(math.log(abs(s)) / math.pi, _fl(f_lift))
            return cls(f, WALL, coord, ExactLocal(u, w, f_lift, chart_lift))
        if chart not in (PLUS, MINUS):
            raise InvalidStability(f"unknown chart {chart!r}")
        x = u if chart == PLUS else w
        if chart_lift is None:
            raise InvalidStability("a chart lift is required off the wall")
        chart_lift = lift_near(x, chart_lift)
        t = chart_lift - f_lift
        if _locate(s, x, _fl(t)) == "0":
            if abs(x) >= abs(s):
                raise BranchCut("chart coordinate lies on the non-negative real axis")
            return cls.from_exact(u, w, f_lift, WALL)
        coord = complex(math.log(abs(x) / abs(s)) / math.pi, _fl(t))
        f = complex(math.log(abs(s)) / math.pi, _fl(f_lift))
        return cls(f, chart, coord, ExactLocal(u, w, f_lift, chart_lift))

    @classmethod
    def from_charges(cls, u, w) -> "LocalStability":
        """The stability with the standard heart (torsion sheaves) and charges (u, w)."""
        u, w = Gauss.coerce(u), Gauss.coerce(w)
        if not (in_h_prime(u) and in_h_prime(w)):
            raise InvalidStabilityFunction("standard heart needs u and w in the upper half-plane or R_<0")
        s = u + w
        if det2(u, w) == 0:
            return cls.from_exact(u, w, phase(s), WALL)
        return cls.from_exact(u, w, phase(s), PLUS, phase(u))

    # ---------------------------------------------------------------- accessors
    def t(self) -> float:
        return 0.0 if self.chart == WALL else self.coord.imag

    def slice_values(self):
        """(Z(O_p), Z(zeta O_p)) for the representative with f = 0."""
        e = cmath.exp(math.pi * self.coord)
        if self.chart == MINUS:
            return 1 - e, e
        return e, 1 - e

    def charges(self):
        """(Z(O_p), Z(zeta O_p)); exact Gaussians when available."""
        if self.exact is not None:
            return self.exact.u, self.exact.w
        scale = cmath.exp(math.pi * self.f)
        a, b = self.slice_values()
        return scale * a, scale * b

    def exact_or_float_charges(self):
        u, w = self.charges()
        return Gauss.coerce(complex(u)) if not isinstance(u, Gauss) else u, \
            Gauss.coerce(complex(w)) if not isinstance(w, Gauss) else w

    def canonical_key(self):
        """Chart-independent identity: charges, f-lift and lifts of the stable simple objects."""
        rep = chamber(self)
        u, w = self.charges()
        fl = self.exact.f_lift if self.exact is not None else self.f.imag
        return (u, w, fl,
                rep.phase("O_p") if rep.status("O_p") == STABLE else None,
                rep.phase("zeta*O_p") if rep.status("zeta*O_p") == STABLE else None)

    def to_json(self) -> dict:
        out = {"f": [repr(self.f.real), repr(self.f.imag)], "chart": self.chart,
               "coord": [repr(self.coord.real), repr(self.coord.imag)]}
        if self.exact is not None:
            e = self.exact
            out["exact"] = {"u": e.u.to_json(), "w": e.w.to_json(),
                            "f_lift": fmt_phase(e.f_lift), "chart_lift": fmt_phase(e.chart_lift)}
        return out

    @classmethod
    def from_json(cls, data) -> "LocalStability":
        if "exact" in data:
            e = data["exact"]
            return cls.from_exact(Gauss.from_json(e["u"]), Gauss.from_json(e["w"]),
                                  parse_phase(e["f_lift"]), data["chart"], parse_phase(e["chart_lift"]))
        f = complex(float(data["f"][0]), float(data["f"][1]))
        c = complex(float(data["coord"][0]), float(data["coord"][1]))
        return cls(f, data["chart"], c)


# --------------------------------------------------------------------------
# chamber structure
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChamberReport:
    entries: tuple  # ((status, phase) for each name in OBJECTS)

    def status(self, name) -> str:
        return self.entries[OBJECTS.index(name)][0]

    def phase(self, name):
        return self.entries[OBJECTS.index(name)][1]

    def semistable(self, name) -> bool:
        return self.status(name) != UNSTABLE

    @property
    def U_plus(self):
        return self.status("O_p") == STABLE

    @property
    def U_minus(self):
        return self.status("zeta*O_p") == STABLE

    @property
    def W_plus(self):
        return self.semistable("O_2p")

    @property
    def W_minus(self):
        return self.semistable("zeta*O_2p")

    def shifted(self, k) -> "ChamberReport":
        return ChamberReport(tuple((st, None if ph is None else ph + k) for st, ph in self.entries))

    def swapped(self) -> "ChamberReport":
        e = self.entries
        return ChamberReport((e[1], e[0], e[3], e[2]))

    def to_json(self) -> dict:
        out = {}
        for name, (st, ph) in zip(OBJECTS, self.entries):
            out[name] = {"status": st, "phase": None if ph is None else fmt_phase(ph)}
        out["regions"] = {"U+": self.U_plus, "U-": self.U_minus, "W+": self.W_plus, "W-": self.W_minus}
        return out


def _locate(s, x, t_approx):
    """Where t = lift(x) - lift(s) sits relative to 0 and +-1, decided exactly.

    The sign of det2(s, x) fixes t modulo 2 up to an open unit interval or an
    integer; the float approximation only picks the integer part.
    """
    d = det2(s, x)
    if d > 0:
        lo = 2 * round((t_approx - 0.5) / 2)
        return _tag_interval(lo)
    if d < 0:
        lo = 2 * round((t_approx + 0.5) / 2) - 1
        return _tag_interval(lo)
    if dot2(s, x) > 0:
        return _tag_int(2 * round(t_approx / 2))
    return _tag_int(2 * round((t_approx - 1) / 2) + 1)


def _tag_interval(lo):
    if lo == 0:
        return "(0,1)"
    if lo == -1:
        return "(-1,0)"
    return ">1" if lo >= 1 else "<-1"


def _tag_int(t):
    if t == 0:
        return "0"
    if t == 1:
        return "1"
    if t == -1:
        return "-1"
    return ">1" if t > 1 else "<-1"


def _tag_float(t):
    if t == 0:
        return "0"
    if 0 < t < 1:
        return "(0,1)"
    if -1 < t < 0:
        return "(-1,0)"
    if t == 1:
        return "1"
    if t == -1:
        return "-1"
    return ">1" if t > 1 else "<-1"


def chamber(sigma: LocalStability) -> ChamberReport:
    """Statuses and phases of O_p, zeta O_p, O_2p and zeta O_2p.

    On the PLUS chart with t = Im coord (the phase of O_p minus that of the
    semistable length-2 sheaf): O_p is stable; zeta O_p is stable for |t| < 1,
    strictly semistable at |t| = 1 and unstable beyond; O_2p is stable for t > 0,
    zeta O_2p for t < 0, and t = 0 is the wall where all four share one phase.
    The MINUS chart is the mirror image.
    """
    ex = sigma.exact
    chart = sigma.chart
    if chart == WALL:
        tag = "0"
    elif ex is not None:
        x = ex.u if chart == PLUS else ex.w
        tag = _locate(ex.s, x, _fl(ex.chart_lift) - _fl(ex.f_lift))
    else:
        tag = _tag_float(sigma.t())

    if ex is not None:
        F = ex.f_lift
        main_lift = ex.chart_lift
        other = ex.w if chart != MINUS else ex.u

        def other_lift(approx):
            return lift_near(other, approx)
    else:
        F = sigma.f.imag
        t = sigma.t()
        main_lift = F + t
        e = cmath.exp(math.pi * sigma.coord)
        off = 0.0 if chart == WALL else cmath.phase(1 - e) / math.pi

        def other_lift(approx, _off=off):
            return F + _off

    if tag == "0":
        entries = ((STABLE, main_lift), (STABLE, other_lift(_fl(F))),
                   (SEMISTABLE, F), (SEMISTABLE, F))
        if ex is not None:
            entries = ((STABLE, lift_near(ex.u, _fl(F))), (STABLE, lift_near(ex.w, _fl(F))),
                       (SEMISTABLE, lift_near(ex.s, _fl(F))), (SEMISTABLE, lift_near(ex.s, _fl(F))))
        return ChamberReport(entries)

    if tag == "(0,1)":
        partner = (STABLE, other_lift(_fl(F) - 0.5))
    elif tag == "(-1,0)":
        partner = (STABLE, other_lift(_fl(F) + 0.5))
    elif tag in ("1", "-1"):
        partner = (SEMISTABLE, other_lift(_fl(F)))
    else:
        partner = (UNSTABLE, None)
    up = tag in ("(0,1)", "1", ">1")
    big = (STABLE, F)
    # "same" length-2 sheaf has the chart object as its quotient
    same, opposite = (big, (UNSTABLE, None)) if up else ((UNSTABLE, None), big)
    entries = ((STABLE, main_lift), partner, same, opposite)
    rep = ChamberReport(entries)
    return rep.swapped() if chart == MINUS else rep


def oracle_chamber(u, w) -> ChamberReport:
    """Brute-force statuses on the standard heart via the polygon algorithm."""
    u, w = Gauss.coerce(u), Gauss.coerce(w)
    if not (in_h_prime(u) and in_h_prime(w)):
        raise InvalidStabilityFunction("u and w must lie in the upper half-plane or R_<0")
    entries = []
    for m, tw in ((1, 0), (1, 1), (2, 0), (2, 1)):
        obj = torsion_chain(m, tw)
        Z = _local_eval(u, w)
        res = hn_polygon(obj, Z)
        if len(res.factors) > 1:
            entries.append((UNSTABLE, None))
        else:
            st = STABLE if is_stable(obj, Z) else SEMISTABLE
            entries.append((st, res.factors[0].phase))
    return ChamberReport(tuple(entries))


def _local_eval(u, w):
    return lambda c: u * c[0] + w * c[1]


# --------------------------------------------------------------------------
# group action, charts, delta
# --------------------------------------------------------------------------


def f_of(sigma: LocalStability, rtol=1e-12) -> complex:
    if sigma.exact is not None:
        s = complex(sigma.exact.s)
        e = cmath.exp(math.pi * sigma.f)
        if abs(e - s) > rtol * max(abs(s), 1e-300):
            raise InvalidStability("exp(pi f) disagrees with Z(O_p) + Z(zeta O_p)")
    return sigma.f


def act_C(sigma: LocalStability, c) -> LocalStability:
    """f -> f + c: charges scale by exp(pi c) and lifts move by Im c."""
    c = complex(c)
    if c == 0:
        return sigma
    return LocalStability(sigma.f + c, sigma.chart, sigma.coord)


def act_exact(sigma: LocalStability, multiplier, shift) -> LocalStability:
    """Exact form of the action: multiply charges by a Gaussian and move lifts by ``shift``.

    ``shift`` must agree with the argument of ``multiplier`` modulo 2; it is only
    used to choose lifts, which are then recomputed from the exact charges.
    """
    if sigma.exact is None:
        m = complex(Gauss.coerce(multiplier))
        c = complex(math.log(abs(m)) / math.pi, _fl(shift))
        return act_C(sigma, c)
    m = Gauss.coerce(multiplier)
    e = sigma.exact
    u, w = e.u * m, e.w * m
    f_lift = lift_near(u + w, _fl(e.f_lift) + _fl(shift))
    if sigma.chart == WALL:
        return LocalStability.from_exact(u, w, f_lift, WALL)
    x = u if sigma.chart == PLUS else w
    return LocalStability.from_exact(u, w, f_lift, sigma.chart, lift_near(x, _fl(e.chart_lift) + _fl(shift)))


def zeta_swap(sigma: LocalStability) -> LocalStability:
    """Relabel O_p <-> zeta O_p (the effect of tensoring with O(p))."""
    if sigma.exact is not None:
        e = sigma.exact
        if sigma.chart == WALL:
            return LocalStability.from_exact(e.w, e.u, e.f_lift, WALL)
        return LocalStability.from_exact(e.w, e.u, e.f_lift, _SWAP[sigma.chart], e.chart_lift)
    if sigma.chart == WALL:
        e = math.exp(math.pi * sigma.coord.real)
        return LocalStability(sigma.f, WALL, complex(math.log(1 - e) / math.pi, 0.0))
    return LocalStability(sigma.f, _SWAP[sigma.chart], sigma.coord)


def chart_transition(sigma: LocalStability) -> LocalStability:
    """Re-express a point of U+ n U- in the other chart: w' = Log(1 - exp(pi w))/pi."""
    if sigma.chart == WALL:
        return sigma
    t = sigma.t()
    if not abs(t) < 1:
        raise NotInRegion("chart transition needs |Im coord| < 1", witness=sigma.coord)
    other = _SWAP[sigma.chart]
    if sigma.exact is not None:
        e = sigma.exact
        y = e.w if sigma.chart == PLUS else e.u
        lift = lift_near(y, _fl(e.f_lift) + (-0.5 if t > 0 else 0.5))
        return LocalStability.from_exact(e.u, e.w, e.f_lift, other, lift)
    new = cmath.log(1 - cmath.exp(math.pi * sigma.coord)) / math.pi
    return LocalStability(sigma.f, other, new)


def delta(sigma: LocalStability):
    """det2(Z(zeta O_p), Z(O_2p)) when zeta O_2p is semistable, else 0."""
    rep = chamber(sigma)
    if not rep.W_minus:
        return 0
    u, w = sigma.charges()
    return det2(w, u + w)


# --------------------------------------------------------------------------
# HN filtrations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalTerm:
    m: int
    twist: int = 0
    shift: int = 0
    mult: int = 1

    def __post_init__(self):
        if self.m < 1 or self.mult < 1:
            raise InvalidStability("torsion length and multiplicity must be positive")
        object.__setattr__(self, "twist", self.twist % 2)


@dataclass(frozen=True)
class LocalObject:
    terms: tuple

    @classmethod
    def single(cls, m, twist=0, shift=0, mult=1) -> "LocalObject":
        return cls((LocalTerm(m, twist, shift, mult),))


def hn_local(obj: LocalObject, sigma: LocalStability, point="") -> HNResult:
    """HN factors of a local object, for stabilities whose heart is a rotated standard heart.

    Such a heart exists exactly when O_p and zeta O_p are both stable with lifts
    less than 1 apart; the charges are rotated so the higher one sits at phase 1.
    """
    rep = chamber(sigma)
    lu, lw = rep.phase("O_p"), rep.phase("zeta*O_p")
    if not (rep.U_plus and rep.U_minus) or not abs(_fl(lu) - _fl(lw)) < 1:
        raise UnsupportedHeart("heart is not a rotation of the standard heart")
    u, w = sigma.exact_or_float_charges()
    if _fl(lu) >= _fl(lw):
        top, top_lift = u, lu
    else:
        top, top_lift = w, lw
    base = _fl(top_lift) - 1
    kappa = -top.conj()
    ru, rw = u * kappa, w * kappa
    results = []
    for term in obj.terms:
        chain = torsion_chain(term.m, term.twist, point=point)
        res = hn_polygon(chain, _local_eval(ru, rw))
        facs = []
        for fac in res.factors:
            orig = fac.charge * (1 / kappa)
            facs.append(type(fac)(fac.label, fac.cls, lift_near(orig, _fl(fac.phase) + base), orig))
        one = HNResult(tuple(facs)).shifted(term.shift)
        results.extend([one] * term.mult)
    return hn_direct_sum(results)


# --------------------------------------------------------------------------
# uniformization of the slice f = 0
# --------------------------------------------------------------------------

def uniformize_mp(z, dps=40):
    """F(z) = 1/2 + (1/sqrt(pi)) * integral_0^z exp(-t^2) dt = (1 + erf z) / 2 at ``dps`` digits."""
    with mpmath.workdps(dps + 5):
        out = (1 + mpmath.erf(mpmath.mpc(z))) / 2
    return +out


def uniformize(z) -> complex:
    return complex(uniformize_mp(z, dps=20))


def uniformize_derivative(z) -> complex:
    return complex(mpmath.exp(-mpmath.mpc(z) ** 2) / mpmath.sqrt(mpmath.pi))


def uniformize_inverse(target, seed, tol=1e-13, max_iter=100) -> complex:
    """Solve F(z) = target by damped Newton iteration from ``seed``."""
    target = complex(target)
    z = complex(seed)
    r = uniformize(z) - target
    for _ in range(max_iter):
        if abs(r) <= tol * max(1.0, abs(target)):
            return z
        d = uniformize_derivative(z)
        if d == 0:
            break
        step = r / d
        lam = 1.0
        while lam > 1e-6:
            cand = z - lam * step
            rc = uniformize(cand) - target
            if abs(rc) < abs(r):
                z, r = cand, rc
                break
            lam /= 2
        else:
            break
    if abs(r) <= tol * max(1.0, abs(target)) * 1e3:
        return z
    raise NotInRegion("Newton iteration did not converge from the given seed", witness=z)
