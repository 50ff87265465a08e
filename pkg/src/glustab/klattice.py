"""Exact numerical Grothendieck lattice of an equivariant double cover of curves.

Classes live in the ordered basis ``([O_X], v, [O_p1], ..., [O_pn])`` where ``v`` is
the class of a generic fiber.  Central charges store one Gaussian rational per
basis element, so every sign test downstream is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

from mpmath import iv

from .errors import AmbiguousSign, FreeSymbolDependence, InvalidCharge, PreconditionError

Rational = Union[int, Fraction]


def qnum(x) -> Rational:
    """Coerce to an exact rational, keeping plain ints when possible (they are much faster)."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return qnum(Fraction(x))
    if isinstance(x, str):
        return qnum(Fraction(x.strip()))
    return qnum(Fraction(x))


def qstr(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Gauss:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, complex):
            re, im = re.real, re.imag
        self.re = qnum(re)
        self.im = qnum(im)

    @classmethod
    def coerce(cls, z) -> "Gauss":
        if isinstance(z, Gauss):
            return z
        if isinstance(z, (tuple, list)):
            return cls(z[0], z[1])
        return cls(z)

    def __add__(self, o):
        o = Gauss.coerce(o)
        return Gauss(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = Gauss.coerce(o)
        return Gauss(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return Gauss.coerce(o) - self

    def __neg__(self):
        return Gauss(-self.re, -self.im)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return Gauss(self.re * o, self.im * o)
        o = Gauss.coerce(o)
        return Gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = Gauss.coerce(o)
        n = o.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conj()
        return Gauss(Fraction(num.re) / n, Fraction(num.im) / n)

    def __rtruediv__(self, o):
        return Gauss.coerce(o) / self

    def conj(self) -> "Gauss":
        return Gauss(self.re, -self.im)

    def norm2(self) -> Rational:
        return qnum(self.re * self.re + self.im * self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, o):
        try:
            o = Gauss.coerce(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def __repr__(self):
        return f"Gauss({qstr(self.re)}, {qstr(self.im)})"

    def to_json(self):
        return [qstr(self.re), qstr(self.im)]

    @classmethod
    def from_json(cls, pair):
        return cls(qnum(pair[0]), qnum(pair[1]))


def det2(a, b):
    """Re(a)Im(b) - Im(a)Re(b); exact for Gaussian rationals."""
    if isinstance(a, Gauss) and isinstance(b, Gauss):
        return qnum(a.re * b.im - a.im * b.re)
    a, b = complex(a), complex(b)
    return a.real * b.imag - a.imag * b.real


def dot2(a, b):
    if isinstance(a, Gauss) and isinstance(b, Gauss):
        return qnum(a.re * b.re + a.im * b.im)
    a, b = complex(a), complex(b)
    return a.real * b.real + a.imag * b.imag


def sign(x) -> int:
    return (x > 0) - (x < 0)


# --------------------------------------------------------------------------
# geometry and classes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Geometry:
    n: int
    genusY: int = 0
    labels: tuple = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise PreconditionError("need at least one ramification point")
        if self.genusY < 0:
            raise PreconditionError("genus must be non-negative")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"p{i}" for i in range(1, self.n + 1)))
        elif len(self.labels) != self.n:
            raise PreconditionError("one label per ramification point")


@dataclass(frozen=True)
class KClass:
    """Integer vector in the basis ([O_X], v, [O_p1..pn])."""

    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if len(self.coords) < 3:
            raise PreconditionError("a class needs at least n+2 = 3 coordinates")

    @property
    def n(self) -> int:
        return len(self.coords) - 2

    def __add__(self, o: "KClass") -> "KClass":
        self._same(o)
        return KClass(tuple(a + b for a, b in zip(self.coords, o.coords)))

    def __sub__(self, o: "KClass") -> "KClass":
        self._same(o)
        return KClass(tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __neg__(self):
        return KClass(tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> "KClass":
        return KClass(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def _same(self, o):
        if len(o.coords) != len(self.coords):
            raise PreconditionError("classes from different geometries")

    def is_zero(self) -> bool:
        return not any(self.coords)

    # constructors, indices of points are 1-based
    @classmethod
    def zero(cls, n):
        return cls((0,) * (n + 2))

    @classmethod
    def O_X(cls, n):
        return cls((1, 0) + (0,) * n)

    @classmethod
    def fiber(cls, n):
        return cls((0, 1) + (0,) * n)

    @classmethod
    def point(cls, n, i):
        _check_index(n, i)
        c = [0] * (n + 2)
        c[i + 1] = 1
        return cls(tuple(c))

    @classmethod
    def zeta_point(cls, n, i):
        return cls.fiber(n) - cls.point(n, i)

    @classmethod
    def torsion(cls, n, i, m, twist=0):
        """Class of zeta^twist (x) O_{m p_i}."""
        a, b = torsion_counts(m, twist)
        return a * cls.point(n, i) + b * cls.zeta_point(n, i)

    @classmethod
    def pullback(cls, n, rank, degree):
        return rank * cls.O_X(n) + degree * cls.fiber(n)

    @classmethod
    def line_bundle(cls, n, degree, S=()):
        """O_X(sum_{i in S} p_i) tensored with the pullback of a degree-d bundle."""
        c = cls.O_X(n) + degree * cls.fiber(n)
        for i in S:
            c = c + cls.zeta_point(n, i)
        return c


def _check_index(n, i):
    if not (1 <= i <= n):
        raise PreconditionError(f"point index {i} outside 1..{n}")


def torsion_counts(m: int, twist: int) -> tuple:
    """(number of O_p, number of zeta O_p) among the composition factors of zeta^t O_{mp}."""
    if m < 1:
        raise PreconditionError("torsion length must be positive")
    top = (twist % 2 == 0)
    n_top = (m + 1) // 2
    n_other = m // 2
    return (n_top, n_other) if top else (n_other, n_top)


@dataclass(frozen=True)
class CosetClass:
    """Coset representative carrying a symbolic multiple ``d_coeff * d * v``.

    ``d`` is the undetermined fiber coefficient of [zeta O_X] - [O_X].
    """

    S: tuple
    eps: int
    base: KClass
    d_coeff: int = 0

    def label(self) -> str:
        body = "O_X(" + "+".join(f"p{i}" for i in self.S) + ")" if self.S else "O_X"
        return ("zeta*" if self.eps else "") + body


def coset_classes(geom: Geometry) -> list:
    """Classes of O(sum_S p_i) and zeta (x) O(sum_S p_i) for every S.

    These represent the 2^(n+1) cosets of pulled-back line bundles.
    """
    n = geom.n
    out = []
    for eps in (0, 1):
        for k in range(n + 1):
            for S in combinations(range(1, n + 1), k):
                if eps == 0:
                    base = KClass.line_bundle(n, 0, S)
                else:
                    # zeta O_X has class [O_X] - sum [O_p] + d v; twisting by O(p_i)
                    # adds the fiber at p_i, which is O_{p_i} for this character
                    base = KClass.O_X(n)
                    for i in range(1, n + 1):
                        if i not in S:
                            base = base - KClass.point(n, i)
                out.append(CosetClass(S, eps, base, eps))
    return out


def zeta_shift_class(n) -> CosetClass:
    """[zeta O_X] - [O_X] with its symbolic fiber coefficient."""
    base = KClass.zero(n)
    for i in range(1, n + 1):
        base = base - KClass.point(n, i)
    return CosetClass((), 1, base, 1)


# --------------------------------------------------------------------------
# central charges
# --------------------------------------------------------------------------


class CentralCharge:
    """Linear functional on the lattice, one Gaussian rational per basis vector."""

    __slots__ = ("values",)

    def __init__(self, values: Sequence):
        vals = tuple(Gauss.coerce(v) for v in values)
        if len(vals) < 3:
            raise InvalidCharge("need values for O_X, the fiber and at least one point")
        self.values = vals

    @classmethod
    def from_parts(cls, OX, fiber, points: Iterable):
        return cls([OX, fiber, *points])

    @property
    def n(self) -> int:
        return len(self.values) - 2

    @property
    def OX(self) -> Gauss:
        return self.values[0]

    @property
    def fiber(self) -> Gauss:
        """v_Z, the charge of a generic fiber."""
        return self.values[1]

    def point(self, i) -> Gauss:
        _check_index(self.n, i)
        return self.values[i + 1]

    def zeta_point(self, i) -> Gauss:
        return self.fiber - self.point(i)

    def eval(self, c) -> Gauss:
        if isinstance(c, CosetClass):
            if c.d_coeff and not self.fiber.is_zero():
                raise FreeSymbolDependence(
                    f"charge of {c.label()} depends on the free fiber coefficient of the zeta twist")
            c = c.base
        coords = c.coords if isinstance(c, KClass) else tuple(c)
        if len(coords) != len(self.values):
            raise PreconditionError("class and charge have different rank")
        re = 0
        im = 0
        for k, z in zip(coords, self.values):
            if k:
                re += k * z.re
                im += k * z.im
        return Gauss(re, im)

    __call__ = eval

    def scale(self, mult) -> "CentralCharge":
        mult = Gauss.coerce(mult)
        return CentralCharge([z * mult for z in self.values])

    def replace(self, index, value) -> "CentralCharge":
        vals = list(self.values)
        vals[index] = Gauss.coerce(value)
        return CentralCharge(vals)

    def __eq__(self, o):
        return isinstance(o, CentralCharge) and self.values == o.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"CentralCharge(OX={self.OX!r}, fiber={self.fiber!r}, points={list(self.values[2:])!r})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "Z": {
                "OX": self.OX.to_json(),
                "fiber": self.fiber.to_json(),
                "Op": [z.to_json() for z in self.values[2:]],
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "CentralCharge":
        z = data["Z"]
        pts = [Gauss.from_json(p) for p in z["Op"]]
        if "n" in data and int(data["n"]) != len(pts):
            raise InvalidCharge("'n' disagrees with the number of point charges")
        return cls.from_parts(Gauss.from_json(z["OX"]), Gauss.from_json(z["fiber"]), pts)


def eval_charge(Z: CentralCharge, c) -> Gauss:
    return Z.eval(c)


def standard_charge(n: int, point=Fraction(-1, 2)) -> CentralCharge:
    """Z(O_X)=i, Z(v)=-1 and the same real point charge everywhere."""
    return CentralCharge.from_parts(Gauss(0, 1), Gauss(-1), [Gauss(point)] * n)


# --------------------------------------------------------------------------
# twists
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Twist:
    """Generator of the twist group.

    kind is ``"O"`` (tensor with O(p_index)), ``"pullback"`` (pulled-back degree-1
    bundle) or ``"zeta"``.  ``power`` may be negative.
    """

    kind: str
    index: int = 0
    power: int = 1

    def __post_init__(self):
        if self.kind not in ("O", "pullback", "zeta"):
            raise PreconditionError(f"unknown twist generator {self.kind!r}")


def twist_charge(Z: CentralCharge, g: Twist, d=None) -> CentralCharge:
    """The charge E -> Z(E (x) g).

    For the zeta twist the new value on O_X involves the free coefficient ``d``; pass
    it explicitly or the call raises.
    """
    if not isinstance(g, Twist):
        raise PreconditionError(f"unknown twist generator {g!r}")
    v = Z.fiber
    if g.kind == "pullback":
        return Z.replace(0, Z.OX + v * g.power)
    if g.kind == "O":
        _check_index(Z.n, g.index)
        out = Z
        p = g.power
        while p > 0:
            out = _twist_point(out, g.index)
            p -= 1
        while p < 0:
            # O(-p) = O(p) (x) pi^* O(-q)
            out = _twist_point(out, g.index)
            out = out.replace(0, out.OX - v)
            p += 1
        return out
    # zeta
    if g.power % 2 == 0:
        return Z
    if d is None and not v.is_zero():
        raise FreeSymbolDependence("twisting by zeta moves Z(O_X) by an amount involving d")
    shift = -sum((Z.point(i) for i in range(1, Z.n + 1)), Gauss(0))
    if d is not None:
        shift = shift + v * qnum(d)
    vals = [Z.OX + shift, v] + [Z.zeta_point(i) for i in range(1, Z.n + 1)]
    return CentralCharge(vals)


def _twist_point(Z, i):
    zeta_val = Z.zeta_point(i)
    vals = list(Z.values)
    vals[0] = Z.OX + zeta_val
    vals[i + 1] = zeta_val
    return CentralCharge(vals)


def apply_twist_word(Z: CentralCharge, word: Iterable, d=None) -> CentralCharge:
    for g in word:
        Z = twist_charge(Z, g, d)
    return Z


def twist_by_divisor(Z: CentralCharge, divisor: Sequence[int], pullback: int = 0) -> CentralCharge:
    """Twist by O(sum c_i p_i) (x) pi^*(degree ``pullback``)."""
    for i, c in enumerate(divisor, start=1):
        if c:
            Z = twist_charge(Z, Twist("O", i, c))
    if pullback:
        Z = twist_charge(Z, Twist("pullback", 0, pullback))
    return Z


# --------------------------------------------------------------------------
# rotations
# --------------------------------------------------------------------------

_QUARTER = {0: Gauss(1), 1: Gauss(0, -1), 2: Gauss(-1), 3: Gauss(0, 1)}


def quarter_unit(k: int) -> Gauss:
    """exp(-i pi k/2)."""
    return _QUARTER[k % 4]


class RotatedCharge:
    """A charge composed with the rotation by -pi*angle, kept symbolic."""

    __slots__ = ("base", "angle")

    def __init__(self, base: CentralCharge, angle):
        self.base = base
        self.angle = Fraction(angle)

    @property
    def n(self):
        return self.base.n

    def approx(self, c) -> complex:
        z = complex(self.base.eval(c))
        a = float(self.angle)
        return z * complex(math.cos(math.pi * a), -math.sin(math.pi * a))

    def interval(self, c):
        z = self.base.eval(c)
        iv.dps = 40
        ang = iv.pi * iv.mpf(self.angle.numerator) / self.angle.denominator
        cs, sn = iv.cos(ang), iv.sin(ang)
        re_z = iv.mpf(Fraction(z.re).numerator) / Fraction(z.re).denominator
        im_z = iv.mpf(Fraction(z.im).numerator) / Fraction(z.im).denominator
        return re_z * cs + im_z * sn, im_z * cs - re_z * sn

    def _sign(self, x) -> int:
        if x.a > 0:
            return 1
        if x.b < 0:
            return -1
        if x.a == 0 and x.b == 0:
            return 0
        raise AmbiguousSign("interval straddles zero under a symbolic rotation")

    def sign_im(self, c) -> int:
        z = self.base.eval(c)
        if z.is_zero():
            return 0
        return self._sign(self.interval(c)[1])

    def sign_re(self, c) -> int:
        z = self.base.eval(c)
        if z.is_zero():
            return 0
        return self._sign(self.interval(c)[0])

    def det_sign(self, c1, c2) -> int:
        # rotations preserve det2, so this is exact
        return sign(det2(self.base.eval(c1), self.base.eval(c2)))

    def __eq__(self, o):
        return isinstance(o, RotatedCharge) and (self.base, self.angle % 2) == (o.base, o.angle % 2)

    def __repr__(self):
        return f"RotatedCharge({self.base!r}, angle={self.angle})"


def rotate_charge(Z, a):
    """Compose with the rotation through -pi*a.

    Multiples of 1/2 act exactly; other rationals give a :class:`RotatedCharge`.
    """
    a = Fraction(a)
    if isinstance(Z, RotatedCharge):
        a = a + Z.angle
        Z = Z.base
    if (2 * a).denominator == 1:
        return Z.scale(quarter_unit(int(2 * a)))
    return RotatedCharge(Z, a)


# --------------------------------------------------------------------------
# frames
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameAction:
    """Normalizing frame: multiply by ``multiplier`` then twist by O(sum c_i p_i).

    ``rotation`` is the phase shift a with multiplier proportional to exp(-i pi a),
    so phase lifts in the normalized frame equal caller lifts minus ``rotation``.
    The scale is ``|multiplier|``.
    """

    multiplier: Gauss = Gauss(1)
    rotation: object = 0
    divisor: tuple = ()
    pullback: int = 0

    def apply(self, Z: CentralCharge) -> CentralCharge:
        Zm = Z.scale(self.multiplier)
        return twist_by_divisor(Zm, self.divisor or (0,) * Z.n, self.pullback)

    def parity(self, i) -> int:
        if not self.divisor:
            return 0
        return self.divisor[i - 1] % 2

    def to_json(self) -> dict:
        rot = self.rotation
        return {
            "multiplier": self.multiplier.to_json(),
            "rotation": qstr(rot) if isinstance(rot, (int, Fraction)) else float(rot),
            "divisor": list(self.divisor),
            "pullback": self.pullback,
        }

    @classmethod
    def from_json(cls, data):
        rot = data.get("rotation", 0)
        rot = qnum(rot) if isinstance(rot, str) else rot
        return cls(Gauss.from_json(data["multiplier"]), rot, tuple(data.get("divisor", ())),
                   int(data.get("pullback", 0)))
