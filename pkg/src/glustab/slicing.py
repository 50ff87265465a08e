"""Phases, Harder-Narasimhan filtrations of chain objects, and norm diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, reduce
from typing import Callable, Optional, Sequence

from .errors import (DegeneratePhase, InvalidCharge, InvalidStabilityFunction,
                     HypothesisViolation, PreconditionError, SectorViolation)
from .klattice import (CentralCharge, Gauss, Geometry, KClass, RotatedCharge, det2, dot2,
                       qnum, qstr, sign, torsion_counts)

Q14 = Fraction(1, 4)


def phase(z):
    """arg(z)/pi in (-1, 1]; exact Fraction on the axes and diagonals, float otherwise."""
    if isinstance(z, Gauss):
        re, im = z.re, z.im
    else:
        z = complex(z)
        re, im = z.real, z.imag
    if re == 0 and im == 0:
        raise DegeneratePhase("phase of zero is undefined")
    if im == 0:
        return Fraction(0) if re > 0 else Fraction(1)
    if re == 0:
        return Fraction(1, 2) if im > 0 else Fraction(-1, 2)
    if abs(re) == abs(im):
        if im > 0:
            return Q14 if re > 0 else 3 * Q14
        return -Q14 if re > 0 else -3 * Q14
    return math.atan2(float(im), float(re)) / math.pi


def in_h_prime(z) -> bool:
    """Open upper half-plane together with the negative real axis."""
    if isinstance(z, Gauss):
        return z.im > 0 or (z.im == 0 and z.re < 0)
    z = complex(z)
    return z.imag > 0 or (z.imag == 0 and z.real < 0)


def heart_phase(z):
    """Phase in (0, 1] of a charge that must lie in h'."""
    if not in_h_prime(z):
        raise InvalidStabilityFunction(f"charge {z!r} is not in the upper half-plane or R_<0")
    return phase(z)


def lift_near(z, approx):
    """The lift of phase(z) (mod 2) closest to ``approx``."""
    p = phase(z)
    k = round((float(approx) - float(p)) / 2)
    return p + 2 * k


def fmt_phase(x):
    if isinstance(x, (int, Fraction)):
        return qstr(x)
    return float(x)


def parse_phase(x):
    return qnum(x) if isinstance(x, str) else x


def compare_lifts(l1, z1, l2, z2) -> int:
    """Exact comparison of two phase lifts whose charges are known."""
    if isinstance(l1, (int, Fraction)) and isinstance(l2, (int, Fraction)):
        return sign(l1 - l2)
    d = float(l1) - float(l2)
    if abs(d) >= 0.5 or z1 is None or z2 is None:
        return sign(d)
    s = det2(z2, z1)
    if s != 0:
        return sign(s)
    if dot2(z1, z2) > 0:
        return 0
    return sign(d)


# --------------------------------------------------------------------------
# chain objects and HN results
# --------------------------------------------------------------------------


def _csub(a, b):
    if b is None:
        return a
    if isinstance(a, KClass):
        return a - b
    return tuple(x - y for x, y in zip(a, b))


def _cadd(a, b):
    if isinstance(a, KClass):
        return a + b
    return tuple(x + y for x, y in zip(a, b))


def _coords(c):
    return list(c.coords) if isinstance(c, KClass) else [int(x) for x in c]


@dataclass(frozen=True)
class ChainObject:
    """Object whose subobjects form one chain; ``classes`` lists them smallest first."""

    classes: tuple
    labels: tuple
    namer: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.classes:
            raise PreconditionError("empty chain")
        if len(self.labels) != len(self.classes):
            raise PreconditionError("one label per subquotient")

    @property
    def length(self):
        return len(self.classes)

    def segment_class(self, j, k):
        return _csub(self.classes[k - 1], self.classes[j - 1] if j > 0 else None)

    def segment_label(self, j, k):
        if self.namer is not None:
            return self.namer(j, k)
        if k - j == 1:
            return self.labels[j]
        return "ext(" + ",".join(self.labels[j:k]) + ")"


def torsion_label(m, twist, point=""):
    body = "O_p" if m == 1 else f"O_{m}p"
    return ("zeta*" if twist % 2 else "") + body + str(point)


def torsion_chain(m, twist=0, embed=None, point=""):
    """Chain of zeta^twist O_{mp}; subquotient j (from the bottom) is zeta^(twist+m-1-j) O_p.

    ``embed(a, b)`` turns a count of O_p and zeta O_p into a class; by default the
    local basis ([O_p], [zeta O_p]) is used.
    """
    if embed is None:
        embed = lambda a, b: (a, b)
    classes = []
    labels = []
    for k in range(1, m + 1):
        t_sub = (twist + m - k) % 2
        classes.append(embed(*torsion_counts(k, t_sub)))
        labels.append(torsion_label(1, twist + m - k, point))

    def namer(j, k, _t=twist, _m=m):
        return torsion_label(k - j, _t + _m - k, point)

    return ChainObject(tuple(classes), tuple(labels), namer)


@dataclass(frozen=True)
class Factor:
    label: str
    cls: object
    phase: object
    charge: Optional[Gauss] = None

    def shifted(self, k):
        ch = None if self.charge is None else (self.charge if k % 2 == 0 else -self.charge)
        c = self.cls if k % 2 == 0 else _neg(self.cls)
        return Factor(self.label + (f"[{k}]" if k else ""), c, self.phase + k, ch)


def _neg(c):
    return -c if isinstance(c, KClass) else tuple(-x for x in c)


def _factor_cmp(a: Factor, b: Factor) -> int:
    return compare_lifts(a.phase, a.charge, b.phase, b.charge)


@dataclass(frozen=True)
class HNResult:
    factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def phases(self):
        return [f.phase for f in self.factors]

    def total_class(self):
        if not self.factors:
            return None
        return reduce(_cadd, (f.cls for f in self.factors))

    def is_semistable(self) -> bool:
        return len(self.factors) == 1

    def shifted(self, k) -> "HNResult":
        return HNResult(tuple(f.shifted(k) for f in self.factors))

    def strictly_decreasing(self) -> bool:
        return all(_factor_cmp(a, b) > 0 for a, b in zip(self.factors, self.factors[1:]))

    def to_json(self) -> dict:
        return {"factors": [
            {"label": f.label, "class": _coords(f.cls), "phase": fmt_phase(f.phase)}
            for f in self.factors]}

    @classmethod
    def from_json(cls, data) -> "HNResult":
        out = []
        for f in data["factors"]:
            c = f["class"]
            c = KClass(tuple(c)) if len(c) >= 3 else tuple(c)
            out.append(Factor(f["label"], c, parse_phase(f["phase"])))
        return cls(tuple(out))

    def signature(self):
        """Labels, classes and phases; the comparison key used by tests and the CLI."""
        return [(f.label, tuple(_coords(f.cls)), f.phase) for f in self.factors]


def _evaluator(Z):
    if isinstance(Z, RotatedCharge):
        raise PreconditionError("evaluate HN on an explicit charge; rotate by quarter turns or frame first")
    if hasattr(Z, "eval"):
        return Z.eval
    if callable(Z):
        return lambda c: Gauss.coerce(Z(c))
    raise PreconditionError(f"cannot evaluate charge {Z!r}")


def _path(obj: ChainObject, Z):
    ev = _evaluator(Z)
    pts = [Gauss(0)] + [ev(c) for c in obj.classes]
    for k in range(obj.length):
        inc = pts[k + 1] - pts[k]
        if not in_h_prime(inc):
            raise InvalidStabilityFunction(
                f"subquotient {obj.labels[k]} has charge {inc!r} outside h'")
    return pts


def _factor(obj, pts, j, k):
    ch = pts[k] - pts[j]
    return Factor(obj.segment_label(j, k), obj.segment_class(j, k), phase(ch), ch)


def hn_polygon(obj: ChainObject, Z) -> HNResult:
    """HN filtration via the upper hull of the charge path.

    From each vertex the next one is the chain member whose relative charge has the
    largest phase, ties going to the longest segment.
    """
    pts = _path(obj, Z)
    m = obj.length
    out = []
    j = 0
    while j < m:
        best = j + 1
        bv = pts[best] - pts[j]
        for k in range(j + 2, m + 1):
            d = pts[k] - pts[j]
            if det2(bv, d) >= 0:
                best, bv = k, d
        out.append(_factor(obj, pts, j, best))
        j = best
    return HNResult(tuple(out))


def hn_exhaustive(obj: ChainObject, Z) -> HNResult:
    """Reference HN by search over every way of cutting the chain.

    Keeps cuttings whose pieces are semistable with strictly decreasing phases and
    insists there is exactly one.
    """
    pts = _path(obj, Z)
    m = obj.length

    def semistable(j, k):
        d = pts[k] - pts[j]
        return all(det2(d, pts[l] - pts[j]) <= 0 for l in range(j + 1, k))

    found = []

    def search(j, prev, acc):
        if j == m:
            found.append(tuple(acc))
            return
        for k in range(j + 1, m + 1):
            d = pts[k] - pts[j]
            if prev is not None and det2(d, prev) <= 0:
                continue
            if semistable(j, k):
                acc.append((j, k))
                search(k, d, acc)
                acc.pop()

    search(0, None, [])
    if len(found) != 1:
        raise AssertionError(f"expected a unique HN filtration, found {len(found)}")
    return HNResult(tuple(_factor(obj, pts, j, k) for j, k in found[0]))


def is_stable(obj: ChainObject, Z) -> bool:
    """Semistable with no proper chain subobject of the same phase."""
    pts = _path(obj, Z)
    total = pts[-1]
    for l in range(1, obj.length):
        if det2(total, pts[l]) >= 0:
            return False
    return True


def hn_direct_sum(results: Sequence[HNResult]) -> HNResult:
    facs = [f for r in results for f in r.factors]
    if not facs:
        return HNResult(())
    facs.sort(key=cmp_to_key(_factor_cmp), reverse=True)
    merged, parts = [facs[0]], [[facs[0].label]]
    for f in facs[1:]:
        g = merged[-1]
        if _factor_cmp(f, g) == 0:
            ch = None if f.charge is None or g.charge is None else g.charge + f.charge
            parts[-1].append(f.label)
            merged[-1] = Factor(_sum_label(parts[-1]), _cadd(g.cls, f.cls), g.phase, ch)
        else:
            merged.append(f)
            parts.append([f.label])
    return HNResult(tuple(merged))


def _sum_label(labels):
    counts = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    return "+".join(lab if k == 1 else f"{k}*{lab}" for lab, k in counts.items())


# --------------------------------------------------------------------------
# moduli and norms
# --------------------------------------------------------------------------


class Modulus:
    """Exact modulus of a Gaussian rational, stored as its square."""

    __slots__ = ("sq",)

    def __init__(self, sq):
        sq = qnum(sq)
        if sq < 0:
            raise ValueError("negative square")
        self.sq = sq

    @classmethod
    def of(cls, z: Gauss) -> "Modulus":
        return cls(z.norm2())

    def __float__(self):
        return math.sqrt(float(self.sq))

    def _other_sq(self, o):
        if isinstance(o, Modulus):
            return o.sq
        o = qnum(o)
        return None if o < 0 else o * o

    def __eq__(self, o):
        s = self._other_sq(o)
        return s is not None and self.sq == s

    def __hash__(self):
        return hash(self.sq)

    def __lt__(self, o):
        s = self._other_sq(o)
        return False if s is None else self.sq < s

    def __le__(self, o):
        s = self._other_sq(o)
        return False if s is None else self.sq <= s

    def __gt__(self, o):
        s = self._other_sq(o)
        return True if s is None else self.sq > s

    def __ge__(self, o):
        s = self._other_sq(o)
        return True if s is None else self.sq >= s

    def __mul__(self, lam):
        lam = qnum(lam)
        if lam < 0:
            raise ValueError("moduli scale by non-negative factors")
        return Modulus(self.sq * lam * lam)

    __rmul__ = __mul__

    def exact(self):
        """The modulus as a rational when it is one, else None."""
        f = Fraction(self.sq)
        rn, rd = math.isqrt(f.numerator), math.isqrt(f.denominator)
        if rn * rn == f.numerator and rd * rd == f.denominator:
            return qnum(Fraction(rn, rd))
        return None

    def __repr__(self):
        e = self.exact()
        return f"Modulus({qstr(e)})" if e is not None else f"Modulus(sqrt({qstr(self.sq)}))"


def _family_classes(family):
    return [c[0] if isinstance(c, tuple) and len(c) == 2 and not isinstance(c[0], int) else c
            for c in family]


@dataclass(frozen=True)
class MinModulusReport:
    minimum: Modulus
    argmin: object
    discrete_image: bool
    lattice_gap: Fraction

    @property
    def reasonable(self) -> bool:
        return self.discrete_image or self.minimum > 0


def min_charge_modulus(family, Z: CentralCharge) -> MinModulusReport:
    """Smallest |Z| over a finite semistable family.

    Gaussian rational values span a lattice in (1/D)Z[i], where D is the common
    denominator; every nonzero value then has modulus at least 1/D.
    """
    classes = _family_classes(family)
    if not classes:
        raise PreconditionError("family must be nonempty")
    best = None
    for c in classes:
        z = Z.eval(c)
        if z.is_zero():
            raise InvalidCharge(f"class {c} has zero charge")
        m = Modulus.of(z)
        if best is None or m < best[0]:
            best = (m, c)
    D = 1
    for z in Z.values:
        D = math.lcm(D, Fraction(z.re).denominator, Fraction(z.im).denominator)
    return MinModulusReport(best[0], best[1], True, Fraction(1, D))


@dataclass(frozen=True)
class SectorReport:
    ok: bool
    cos_factor: float
    min_modulus: float
    lower_bound: float
    total_modulus: float
    total_bound: float


def sector_bound_check(family, Z, t, eta) -> SectorReport:
    """|Z(E)| >= cos(pi eta/2) * c for objects with HN factors in the sector (t, t+eta)."""
    eta = Fraction(eta)
    t = Fraction(t)
    if not (0 < eta < 1):
        raise PreconditionError("sector width must lie in (0, 1)")
    cf = math.cos(math.pi * float(eta) / 2)
    if not family:
        return SectorReport(True, cf, math.inf, math.inf, 0.0, 0.0)
    charges = []
    for cls_, lift in family:
        if not (t < lift < t + eta):
            raise SectorViolation(f"phase {lift} outside ({t}, {t + eta})")
        charges.append(complex(Z.eval(cls_)))
    mods = [abs(z) for z in charges]
    c = min(mods)
    lb = cf * c
    total = abs(sum(charges))
    total_bound = cf * sum(mods)
    slack = 1e-12
    ok = all(m >= lb * (1 - slack) for m in mods) and total >= total_bound * (1 - slack) and total >= lb * (1 - slack)
    return SectorReport(ok, cf, c, lb, total, total_bound)


def endosimple_torsion(n: int) -> list:
    """Classes of the endosimple torsion sheaves: fibers, O_p and zeta O_p."""
    out = [("fiber", KClass.fiber(n))]
    for i in range(1, n + 1):
        out.append((f"O_p{i}", KClass.point(n, i)))
        out.append((f"zeta*O_p{i}", KClass.zeta_point(n, i)))
    return out


def charge_norm(Z: CentralCharge, geom: Geometry = None) -> Modulus:
    n = Z.n if geom is None else geom.n
    vals = [Z.OX] + [Z.eval(c) for _, c in endosimple_torsion(n)]
    return max((Modulus.of(z) for z in vals), key=lambda m: Fraction(m.sq))


@dataclass(frozen=True)
class NumLemReport:
    r1: float
    r2: float
    r: float
    norm_Zp: float
    max_ratio: float
    violations: tuple

    @property
    def ok(self):
        return not self.violations


def num_lem_constants(Z: CentralCharge, geom: Geometry = None):
    n = Z.n if geom is None else geom.n
    if not Z.OX.im > 0:
        raise HypothesisViolation("need Im Z(O_X) > 0", 1)
    v = Z.fiber
    if not (v.im == 0 and v.re < 0):
        raise HypothesisViolation("need Z(fiber) real negative", 1)
    for i in range(1, n + 1):
        u = Z.point(i)
        if u.is_zero() or u.im > 0:
            raise HypothesisViolation(f"need Z(O_p{i}) nonzero with Im <= 0", 2)
    mods = [abs(Z.eval(c)) for _, c in endosimple_torsion(n)]
    r1 = max(1 / m for m in mods)
    imx = float(Z.OX.im)
    nz = float(charge_norm(Z, geom))
    r2 = (n + 1) / imx + (1 / abs(v)) * (1 + (n + 1) * nz / imx)
    return r1, r2, max(r1, r2)


def num_lem_bound(Z: CentralCharge, Zp: CentralCharge, geom: Geometry = None, samples=None,
                  r=None) -> NumLemReport:
    """Check |Z'(E)| <= r ||Z'|| |Z(E)| on sampled classes.

    ``r`` defaults to max(r1, r2) computed from Z.  Charges are evaluated in floating
    point and comparisons allow a relative slack of 1e-12, since the constants
    involve square roots anyway.
    """
    r1, r2, rr = num_lem_constants(Z, geom)
    if r is None:
        r = rr
    n = Z.n
    if samples is None:
        samples = [c for _, c in endosimple_torsion(n)]
    nzp = float(charge_norm(Zp))
    zs = [complex(float(z.re), float(z.im)) for z in Z.values]
    zps = [complex(float(z.re), float(z.im)) for z in Zp.values]
    worst = 0.0
    bad = []
    for c in samples:
        coords = c.coords if isinstance(c, KClass) else tuple(c)
        a = abs(sum(k * z for k, z in zip(coords, zps) if k))
        b = abs(sum(k * z for k, z in zip(coords, zs) if k))
        if b == 0:
            bad.append(c)
            continue
        ratio = a / b
        worst = max(worst, ratio / nzp if nzp else (math.inf if a else 0.0))
        if a > r * nzp * b * (1 + 1e-12):
            bad.append(c)
    return NumLemReport(r1, r2, r, nzp, worst, tuple(bad))


@dataclass(frozen=True)
class ClosenessReport:
    charge_ok: bool
    window_ok: bool
    max_ratio: float
    threshold: float
    slicing_distance_sample: float

    @property
    def ok(self):
        return self.charge_ok and self.window_ok

    def __bool__(self):
        return self.ok


def closeness_check(Z1, Z2, eps, semistable_classes=(), heart2_windows=()) -> ClosenessReport:
    """Finite-sample proxy for two stabilities being within distance eps.

    ``heart2_windows`` holds, for generators of the second heart, the (lo, hi) range
    of their phases with respect to the first stability.
    """
    eps = Fraction(eps)
    if not (0 < eps < Q14):
        raise PreconditionError("need 0 < eps < 1/4")
    thr = math.sin(math.pi * float(eps))
    worst = 0.0
    charge_ok = True
    for c in semistable_classes:
        z1 = Z1.eval(c)
        z2 = Z2.eval(c)
        if z1.is_zero():
            raise InvalidCharge(f"class {c} has zero charge under the first stability")
        ratio = abs(z2 - z1) / abs(z1)
        worst = max(worst, ratio)
        if not ratio < thr:
            charge_ok = False
    window_ok = True
    dist = 0.0
    for lo, hi in heart2_windows:
        if not (lo > -1 + eps and hi <= 2 - eps):
            window_ok = False
        dist = max(dist, float(0 - lo), float(hi - 1), 0.0)
    return ClosenessReport(charge_ok, window_ok, worst, thr, dist)
