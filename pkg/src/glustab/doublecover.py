"""Stability conditions on equivariant sheaves of a ramified double cover X -> Y.

A global stability is stored in the caller's frame together with an explicit
:class:`~glustab.klattice.FrameAction` taking its charge to a normalized one with
Z(fiber) < 0 real.  In the normalized frame the stability is described by a
partition of the ramification points into I0, I+ and I- plus shifts n_i, and its
restriction to each point is a :class:`~glustab.local_stab.LocalStability`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (HypothesisViolation, InvalidCharge, InvalidStability, NotInRegion,
                     PreconditionError, PreconditionGenus, UnsupportedObject)
from .glue import Decomposition
from .klattice import (CentralCharge, CosetClass, FrameAction, Gauss, Geometry, KClass,
                       det2, dot2, qstr, twist_by_divisor)
from .local_stab import (MINUS, PLUS, STABLE, WALL, LocalObject, LocalStability,
                         act_exact, chamber, delta, hn_local, zeta_swap)
from .slicing import Factor, HNResult, fmt_phase, hn_direct_sum, in_h_prime, lift_near, phase


# --------------------------------------------------------------------------
# partitions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionData:
    n: int
    I0: frozenset
    Iplus: frozenset
    Iminus: frozenset
    n_i: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("I0", "Iplus", "Iminus"):
            object.__setattr__(self, name, frozenset(int(i) for i in getattr(self, name)))
        blocks = (self.I0, self.Iplus, self.Iminus)
        union = set().union(*blocks)
        if sum(len(b) for b in blocks) != len(union) or union != set(range(1, self.n + 1)):
            raise PreconditionError("I0, I+ and I- must partition the point indices")
        shifts = {int(k): int(v) for k, v in dict(self.n_i).items() if int(k) not in self.I0}
        for i in self.Iplus | self.Iminus:
            shifts.setdefault(i, 1)
            if shifts[i] < 1:
                raise PreconditionError("shifts n_i must be positive")
        object.__setattr__(self, "n_i", dict(sorted(shifts.items())))

    def __hash__(self):
        return hash((self.n, self.I0, self.Iplus, self.Iminus, tuple(self.n_i.items())))

    def block(self, i) -> str:
        if i in self.I0:
            return "0"
        return "+" if i in self.Iplus else "-"

    @classmethod
    def parse(cls, text: str, n: int) -> "PartitionData":
        """Grammar ``0:<ids>,+:<ids>,-:<ids>``; ids are space separated, ``i^k`` sets n_i = k.

        Block-name tokens such as ``I0`` are ignored and unlisted indices go to I0.
        """
        blocks = {"0": set(), "+": set(), "-": set()}
        shifts = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" not in part:
                raise PreconditionError(f"partition block {part!r} lacks a ':'")
            key, ids = part.split(":", 1)
            key = key.strip()
            if key not in blocks:
                raise PreconditionError(f"unknown partition block {key!r}")
            for tok in ids.split():
                if re.fullmatch(r"I[0+-]?", tok):
                    continue
                m = re.fullmatch(r"(\d+)(?:\^(\d+))?", tok)
                if not m:
                    raise PreconditionError(f"bad point index {tok!r}")
                i = int(m.group(1))
                blocks[key].add(i)
                if m.group(2):
                    shifts[i] = int(m.group(2))
        listed = blocks["0"] | blocks["+"] | blocks["-"]
        blocks["0"] |= set(range(1, n + 1)) - listed
        return cls(n, frozenset(blocks["0"]), frozenset(blocks["+"]), frozenset(blocks["-"]), shifts)

    def to_json(self) -> dict:
        return {"I0": sorted(self.I0), "I+": sorted(self.Iplus), "I-": sorted(self.Iminus),
                "n_i": {str(k): v for k, v in self.n_i.items()}}

    @classmethod
    def from_json(cls, data, n) -> "PartitionData":
        return cls(n, frozenset(data["I0"]), frozenset(data["I+"]), frozenset(data["I-"]),
                   {int(k): int(v) for k, v in data.get("n_i", {}).items()})


# --------------------------------------------------------------------------
# the region U-bar
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UReport:
    ok: bool
    condition: Optional[int] = None
    witness: Optional[str] = None
    value: Optional[object] = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "condition": self.condition, "witness": self.witness,
                "value": None if self.value is None else qstr(self.value)}


def _on_ray(z: Gauss, v: Gauss) -> bool:
    """z in R_{<=0} * v."""
    return det2(z, v) == 0 and dot2(z, v) <= 0


def check_U_bar(Z: CentralCharge, geom: Geometry = None) -> UReport:
    """det2(Z(L), v_Z) > 0 on every coset representative and no point charge on R_{<=0} v_Z.

    det2(., v_Z) is additive, so the minimum over the coset classes is attained by
    adding exactly the terms det2(Z(zeta O_p_i), v_Z) that are negative; the
    representative achieving it is the witness.  Twisting by zeta only moves the
    class by the points and a multiple of v, which det2(., v_Z) ignores, and gives
    the same minimum.
    """
    n = Z.n if geom is None else geom.n
    if geom is not None and geom.n != Z.n:
        raise InvalidCharge("charge and geometry disagree on the number of points")
    v = Z.fiber
    if v.is_zero():
        raise InvalidCharge("the fiber charge must be nonzero")
    for i in range(1, n + 1):
        if _on_ray(Z.point(i), v):
            return UReport(False, 2, f"O_p{i}")
        if _on_ray(Z.zeta_point(i), v):
            return UReport(False, 2, f"zeta*O_p{i}")
    base = det2(Z.OX, v)
    if base <= 0:
        return UReport(False, 1, "O_X", base)
    S = tuple(i for i in range(1, n + 1) if det2(Z.zeta_point(i), v) < 0)
    value = base + sum(det2(Z.zeta_point(i), v) for i in S)
    if value <= 0:
        return UReport(False, 1, CosetClass(S, 0, KClass.line_bundle(n, 0, S)).label(), value)
    return UReport(True, value=value)


# --------------------------------------------------------------------------
# global stabilities
# --------------------------------------------------------------------------


def _check_hypotheses(Z: CentralCharge, part: PartitionData):
    if not Z.OX.im > 0:
        raise HypothesisViolation("need Im Z(O_X) > 0", condition=1)
    v = Z.fiber
    if not (v.im == 0 and v.re < 0):
        raise HypothesisViolation("need Z(fiber) to be a negative real number", condition=1)
    for i in range(1, Z.n + 1):
        u, w = Z.point(i), Z.zeta_point(i)
        if i in part.Iplus:
            if not in_h_prime(u * (-1) ** part.n_i[i]):
                raise HypothesisViolation(f"Z(O_p{i}[-{part.n_i[i]}]) is not in h'", condition=2)
        elif i in part.Iminus:
            if not in_h_prime(w * (-1) ** part.n_i[i]):
                raise HypothesisViolation(f"Z(zeta*O_p{i}[{part.n_i[i]}]) is not in h'", condition=2)
        else:
            for z, lab in ((u, "O_p"), (w, "zeta*O_p")):
                if not (z.im == 0 and z.re < 0):
                    raise HypothesisViolation(f"Z({lab}{i}) must be negative real for i in I0", condition=3)


def _normalized_local(Z: CentralCharge, part: PartitionData, i: int) -> LocalStability:
    u, w = Z.point(i), Z.zeta_point(i)
    if i in part.I0:
        return LocalStability.from_exact(u, w, 1, WALL)
    k = part.n_i[i]
    if i in part.Iplus:
        return LocalStability.from_exact(u, w, 1, PLUS, phase(u * (-1) ** k) + k)
    return LocalStability.from_exact(u, w, 1, MINUS, phase(w * (-1) ** k) - k)


@dataclass(frozen=True)
class GlobalStability:
    charge: CentralCharge          # caller frame
    frame: FrameAction
    normalized: CentralCharge
    partition: PartitionData
    geometry: Geometry
    locals_normalized: tuple

    @property
    def n(self):
        return self.geometry.n

    @property
    def rotation(self):
        return self.frame.rotation

    def fiber_lift(self):
        """Phase of the fibers (semistable of phase 1 in the normalized frame)."""
        return lift_near(self.charge.fiber, 1 + float(self.frame.rotation))

    def local(self, i) -> LocalStability:
        """Restriction to the point p_i, in the caller frame."""
        loc = self.locals_normalized[i - 1]
        if self.frame.parity(i):
            loc = zeta_swap(loc)
        return act_exact(loc, 1 / self.frame.multiplier, self.frame.rotation)

    def chamber(self, i):
        return chamber(self.local(i))

    def stable_objects(self) -> list:
        """Status of the fibers and of the four small sheaves at every ramification point."""
        out = [{"object": "fiber", "status": STABLE, "phase": self.fiber_lift(),
                "note": "generic fibers stable; fibers over I0 points strictly semistable"}]
        for i in range(1, self.n + 1):
            rep = self.chamber(i)
            for name, (st, ph) in zip(("O_p", "zeta*O_p", "O_2p", "zeta*O_2p"), rep.entries):
                out.append({"object": f"{name}{i}", "status": st, "phase": ph})
        return out

    def heart_descriptor(self) -> dict:
        p = self.partition
        return {
            "pullback_block": "O_X(sum over I(+)) (x) pi^*Coh(Y)",
            "torsion_generators": (
                [f"O_p{i}[-{p.n_i[i]}]" for i in sorted(p.Iplus)]
                + [f"zeta*O_p{i}[{p.n_i[i]}]" for i in sorted(p.Iminus)]
                + [f"O_p{i}" for i in sorted(p.I0)] + [f"zeta*O_p{i}" for i in sorted(p.I0)]),
        }

    def to_json(self) -> dict:
        return {"n": self.n, "genusY": self.geometry.genusY, "charge": self.charge.to_json(),
                "frame": self.frame.to_json(), "partition": self.partition.to_json(),
                "normalized": self.normalized.to_json()}

    @classmethod
    def from_json(cls, data) -> "GlobalStability":
        n = int(data["n"])
        geom = Geometry(n, int(data.get("genusY", 0)))
        frame = FrameAction.from_json(data["frame"])
        caller = CentralCharge.from_json(data["charge"])
        part = PartitionData.from_json(data["partition"], n)
        out = build_stability(frame.apply(caller), part, geom, frame)
        if out.charge != caller:
            raise InvalidStability("frame does not map the stored charge to its normalized form")
        return out


def build_stability(Z: CentralCharge, partition: PartitionData, geom: Geometry,
                    frame: FrameAction = None) -> GlobalStability:
    """The glued stability with normalized charge ``Z`` and heart given by ``partition``.

    ``frame`` (default: identity) records how ``Z`` was obtained from the caller's
    charge; the caller charge is recovered by inverting it.
    """
    if Z.n != geom.n or partition.n != geom.n:
        raise PreconditionError("charge, partition and geometry disagree on n")
    _check_hypotheses(Z, partition)
    frame = frame or FrameAction(Gauss(1), 0, (0,) * geom.n)
    if not frame.divisor:
        frame = FrameAction(frame.multiplier, frame.rotation, (0,) * geom.n, frame.pullback)
    caller = twist_by_divisor(Z, [-c for c in frame.divisor], -frame.pullback).scale(1 / frame.multiplier)
    locs = tuple(_normalized_local(Z, partition, i) for i in range(1, geom.n + 1))
    return GlobalStability(caller, frame, Z, partition, geom, locs)


def classify_in_U(Z: CentralCharge, geom: Geometry = None) -> GlobalStability:
    """Normal form of a charge in U-bar: I- empty and every n_i = 1.

    The charge is multiplied by -1/Z(fiber) and twisted by O(sum of p_i with
    Im Z(O_p_i) > 0 after that scaling); I+ collects the points whose charge then has
    negative imaginary part.
    """
    geom = geom or Geometry(Z.n)
    rep = check_U_bar(Z, geom)
    if not rep:
        raise NotInRegion(f"charge violates condition ({rep.condition}) at {rep.witness}", witness=rep)
    mu = Gauss(-1) / Z.fiber
    Z0 = Z.scale(mu)
    divisor = tuple(1 if Z0.point(i).im > 0 else 0 for i in range(1, Z.n + 1))
    Zn = twist_by_divisor(Z0, divisor)
    Iplus = frozenset(i for i in range(1, Z.n + 1) if Zn.point(i).im < 0)
    I0 = frozenset(range(1, Z.n + 1)) - Iplus
    for i in I0:
        if not (Zn.point(i).re < 0 and Zn.zeta_point(i).re < 0):
            raise NotInRegion(f"point {i} sits on the ray excluded from U-bar", witness=i)
    part = PartitionData(Z.n, I0, Iplus, frozenset(), {i: 1 for i in Iplus})
    a = phase(Z.fiber) - 1
    return build_stability(Zn, part, geom, FrameAction(mu, a, divisor))


# --------------------------------------------------------------------------
# frame operations on stabilities
# --------------------------------------------------------------------------


def rotate_stability(sigma: GlobalStability, multiplier, shift) -> GlobalStability:
    """Multiply the charge by ``multiplier`` and lower every lift by ``shift``.

    ``shift`` must agree with -arg(multiplier)/pi modulo 2; a positive rational
    multiplier with shift 0 is a rescaling.
    """
    m = Gauss.coerce(multiplier)
    if m.is_zero():
        raise InvalidCharge("multiplier must be nonzero")
    ph = phase(m)
    if abs(((float(ph) + float(shift)) + 1) % 2 - 1) > 1e-9:
        raise PreconditionError("shift does not match the argument of the multiplier")
    f = sigma.frame
    frame = FrameAction(f.multiplier / m, f.rotation - shift, f.divisor, f.pullback)
    out = build_stability(sigma.normalized, sigma.partition, sigma.geometry, frame)
    return out


def twist_stability(sigma: GlobalStability, i: int, power: int = 1) -> GlobalStability:
    """Pull back along tensoring with O(power * p_i): the new charge is E -> Z(E (x) O(power p_i))."""
    f = sigma.frame
    div = list(f.divisor)
    div[i - 1] -= power
    frame = FrameAction(f.multiplier, f.rotation, tuple(div), f.pullback)
    out = build_stability(sigma.normalized, sigma.partition, sigma.geometry, frame)
    return out


# --------------------------------------------------------------------------
# global objects and HN filtrations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Fiber:
    def label(self):
        return "fiber"


@dataclass(frozen=True)
class Torsion:
    i: int
    m: int
    twist: int = 0

    def __post_init__(self):
        if self.m < 1 or self.i < 1:
            raise PreconditionError("torsion needs a point index and a positive length")
        object.__setattr__(self, "twist", self.twist % 2)

    def label(self):
        return ("zeta*" if self.twist else "") + ("O_p" if self.m == 1 else f"O_{self.m}p") + str(self.i)


@dataclass(frozen=True)
class LineBundle:
    d: int
    S: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(sorted(set(int(i) for i in self.S))))

    def label(self):
        body = "O_X(" + "+".join(f"p{i}" for i in self.S) + ")" if self.S else "O_X"
        return body + (f"(x)pi*O({self.d})" if self.d else "")

    def kclass(self, n) -> KClass:
        return KClass.line_bundle(n, self.d, self.S)


@dataclass(frozen=True)
class GlobalTerm:
    gen: object
    shift: int = 0
    mult: int = 1


@dataclass(frozen=True)
class GlobalObject:
    terms: tuple

    @classmethod
    def of(cls, gen, shift=0, mult=1) -> "GlobalObject":
        return cls((GlobalTerm(gen, shift, mult),))

    def kclass(self, n) -> KClass:
        total = KClass.zero(n)
        for t in self.terms:
            g = t.gen
            if isinstance(g, Fiber):
                c = KClass.fiber(n)
            elif isinstance(g, Torsion):
                c = KClass.torsion(n, g.i, g.m, g.twist)
            else:
                c = g.kclass(n)
            total = total + c * (t.mult * (-1) ** t.shift)
        return total


_TERM = re.compile(r"^\s*(?:(\d+)\s*\*)?\s*(Fiber|Torsion|LineBundle)\s*(?:\((.*)\))?\s*(?:\[\s*(-?\d+)\s*\])?\s*$")


def _split_terms(text):
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        if ch == "+" and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [t for t in out if t.strip()]


def _twist_token(tok):
    tok = tok.strip().lower()
    if tok in ("0", "", "none", "1_"):
        return 0
    if tok in ("1", "zeta", "z"):
        return 1
    raise PreconditionError(f"bad twist {tok!r}")


def parse_object(text: str) -> GlobalObject:
    """Parse ``k*Gen[shift]`` terms joined by ``+``.

    Gen is ``Fiber``, ``Torsion(i,m,twist)`` with twist 0/1/zeta, or
    ``LineBundle(d,{i j ...})``.
    """
    terms = []
    for raw in _split_terms(text):
        m = _TERM.match(raw)
        if not m:
            raise PreconditionError(f"cannot parse object term {raw!r}")
        mult = int(m.group(1) or 1)
        kind, args, shift = m.group(2), m.group(3) or "", int(m.group(4) or 0)
        if kind == "Fiber":
            gen = Fiber()
        elif kind == "Torsion":
            parts = [p.strip() for p in args.split(",")]
            if len(parts) not in (2, 3):
                raise PreconditionError("Torsion takes (i, m[, twist])")
            gen = Torsion(int(parts[0]), int(parts[1]), _twist_token(parts[2]) if len(parts) == 3 else 0)
        else:
            head, _, rest = args.partition(",")
            S = [int(x) for x in re.findall(r"\d+", rest)]
            gen = LineBundle(int(head.strip()), tuple(S))
        terms.append(GlobalTerm(gen, shift, mult))
    if not terms:
        raise PreconditionError("empty object")
    return GlobalObject(tuple(terms))


def _to_global(n, i, cls):
    a, b = cls
    return KClass.point(n, i) * a + KClass.zeta_point(n, i) * b


def hn_global(obj: GlobalObject, sigma: GlobalStability) -> HNResult:
    """HN factors of a torsion object: each point contributes its local filtration."""
    n = sigma.n
    results = []
    for t in obj.terms:
        g = t.gen
        if isinstance(g, LineBundle):
            raise UnsupportedObject("line bundles are handled by reduce_line_bundle")
        if isinstance(g, Fiber):
            fac = Factor("fiber", KClass.fiber(n), sigma.fiber_lift(), sigma.charge.fiber)
            one = HNResult((fac,)).shifted(t.shift)
            results.extend([one] * t.mult)
            continue
        loc = sigma.local(g.i)
        res = hn_local(LocalObject.single(g.m, g.twist, t.shift, t.mult), loc, point=str(g.i))
        facs = tuple(Factor(f.label, _to_global(n, g.i, f.cls), f.phase, f.charge) for f in res.factors)
        results.append(HNResult(facs))
    return hn_direct_sum(results)


# --------------------------------------------------------------------------
# line bundles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LineBundleCertificate:
    """L (x) O(frame divisor) as an extension inside the normalized heart.

    ``pullback_degree`` is the degree of the pulled-back part; ``subs`` are the
    points i whose O_p_i[-1] are subobjects; ``quotients`` the points whose zeta O_p_i
    are quotients.  Phase bounds are in the caller frame.
    """

    pullback_degree: int
    subs: tuple
    quotients: tuple
    lower: object
    upper: object
    upper_closed: bool
    normalized_object: LineBundle

    def pieces(self) -> list:
        return ([f"pi*O({self.pullback_degree})"] + [f"O_p{i}[-1]" for i in self.subs]
                + [f"zeta*O_p{i}" for i in self.quotients])

    def piece_classes(self, n) -> list:
        return ([KClass.pullback(n, 1, self.pullback_degree)] + [-KClass.point(n, i) for i in self.subs]
                + [KClass.zeta_point(n, i) for i in self.quotients])

    def to_json(self) -> dict:
        return {"pieces": self.pieces(), "pullback_degree": self.pullback_degree,
                "subs": list(self.subs), "quotients": list(self.quotients),
                "phase_bounds": {"lower": fmt_phase(self.lower), "upper": fmt_phase(self.upper),
                                 "lower_closed": False, "upper_closed": self.upper_closed},
                "normalized_object": self.normalized_object.label()}


def reduce_line_bundle(L: LineBundle, sigma: GlobalStability) -> LineBundleCertificate:
    """Two-step certificate placing a line bundle in the glued heart, with phase bounds.

    In the normalized frame L = O(sum_S p_i) (x) pi^*O(d) is an extension of
    pi^*O(d + |S n I+|) by the O_p_i[-1], i in S n I+, followed by the quotients
    zeta O_p_i, i in S n I0.  Pulled-back bundles have phases in (0, 1), so the
    bounds come from the pieces.
    """
    part = sigma.partition
    if part.Iminus or any(k != 1 for k in part.n_i.values()):
        raise PreconditionError("line-bundle reduction needs I- empty and all n_i = 1")
    if isinstance(L, GlobalObject):
        if len(L.terms) != 1 or not isinstance(L.terms[0].gen, LineBundle):
            raise UnsupportedObject("expected a single line bundle")
        L = L.terms[0].gen
    n = sigma.n
    d = L.d
    S = []
    for i in range(1, n + 1):
        e = (1 if i in L.S else 0) + sigma.frame.divisor[i - 1]
        d += e // 2
        if e % 2:
            S.append(i)
    Ln = LineBundle(d, tuple(S))
    subs = tuple(i for i in S if i in part.Iplus)
    quots = tuple(i for i in S if i in part.I0)
    # pulled-back bundles and the O_p[-1] pieces have phase < 1; zeta O_p on I0 has phase 1
    upper, closed = 1, bool(quots)
    a = sigma.frame.rotation
    cert = LineBundleCertificate(d + len(subs), subs, quots, 0 + a, upper + a, closed, Ln)
    total = sum(cert.piece_classes(n), KClass.zero(n))
    if total != Ln.kclass(n):
        raise InvalidStability("certificate classes do not add up")  # pragma: no cover
    return cert


# --------------------------------------------------------------------------
# the determinant coordinates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaPoint:
    locals: tuple
    z: Gauss

    def lhs(self):
        """det2(z, exp(pi f)) + sum of delta_i."""
        u, w = self.locals[0].charges()
        s = u + w
        return det2(self.z, s) + sum(delta(loc) for loc in self.locals)

    def in_theta0(self) -> bool:
        return self.lhs() > 0

    def key(self):
        return (self.z, tuple(loc.canonical_key() for loc in self.locals))

    def to_json(self) -> dict:
        val = self.lhs()
        return {"z": self.z.to_json(), "locals": [loc.to_json() for loc in self.locals],
                "lhs": qstr(val) if isinstance(val, (int, Fraction)) else float(val),
                "in_theta0": self.in_theta0()}

    @classmethod
    def from_json(cls, data) -> "ThetaPoint":
        return cls(tuple(LocalStability.from_json(x) for x in data["locals"]), Gauss.from_json(data["z"]))


def _common_f(locs):
    keys = set()
    for loc in locs:
        if loc.exact is None:
            raise PreconditionError("theta coordinates need exact local charges")
        keys.add((loc.exact.s, loc.exact.f_lift))
    if len(keys) != 1:
        raise InvalidStability("local stabilities disagree on f")
    return next(iter(keys))


def theta_map(sigma: GlobalStability, geom: Geometry = None) -> ThetaPoint:
    geom = geom or sigma.geometry
    if geom.genusY < 1:
        raise PreconditionGenus("restriction to the points needs a base curve of genus >= 1")
    locs = tuple(sigma.local(i) for i in range(1, sigma.n + 1))
    _common_f(locs)
    t = ThetaPoint(locs, sigma.charge.OX)
    if not t.in_theta0():
        raise InvalidStability("determinant inequality fails for a constructed stability")  # pragma: no cover
    return t


def build_from_theta(t: ThetaPoint, geom: Geometry) -> GlobalStability:
    """Inverse of :func:`theta_map` on Theta0.

    Scale so the fibers have charge -1 and phase 1, twist by O(p_i) wherever the
    restriction is on the zeta O_2p side of the wall, read off the partition from
    the chart lifts, and build.
    """
    if geom.genusY < 1:
        raise PreconditionGenus("restriction to the points needs a base curve of genus >= 1")
    if len(t.locals) != geom.n:
        raise PreconditionError("one local stability per ramification point")
    s, F = _common_f(t.locals)
    if not t.lhs() > 0:
        raise NotInRegion("the determinant inequality fails", witness=t.lhs())
    n = geom.n
    Z = CentralCharge.from_parts(t.z, s, [loc.exact.u for loc in t.locals])
    mu = Gauss(-1) / s
    a = F - 1
    divisor = []
    normalized_locals = []
    for loc in t.locals:
        ln = act_exact(loc, mu, -a)
        rep = chamber(ln)
        if rep.W_minus and not rep.W_plus:
            ln = zeta_swap(ln)
            divisor.append(1)
        else:
            divisor.append(0)
        normalized_locals.append(ln)
    I0, Ip, Im, shifts = set(), set(), set(), {}
    for i, ln in enumerate(normalized_locals, start=1):
        rep = chamber(ln)
        if ln.chart == WALL:
            I0.add(i)
        elif rep.U_plus:
            lu = rep.phase("O_p")
            Ip.add(i)
            shifts[i] = math.ceil(lu - 1)
        else:
            lw = ln.exact.chart_lift
            Im.add(i)
            shifts[i] = math.floor(-lw) + 1
    Zn = twist_by_divisor(Z.scale(mu), divisor)
    if not Zn.OX.im > 0:
        raise NotInRegion("normalized Im Z(O_X) is not positive", witness=Zn.OX)  # pragma: no cover
    part = PartitionData(n, frozenset(I0), frozenset(Ip), frozenset(Im), shifts)
    return build_stability(Zn, part, geom, FrameAction(mu, a, tuple(divisor)))


# --------------------------------------------------------------------------
# semiorthogonal decompositions of the cover
# --------------------------------------------------------------------------


def cover_decomposition(n: int, side: str = "I") -> Decomposition:
    """K-theoretic splitting for the two canonical decompositions.

    Side ``I``: pullbacks from Y first, then the skyscrapers O_p_i.  Side ``J``: the
    sheaves zeta O_p_i first, then pullbacks.
    """
    pull = [KClass.O_X(n), KClass.fiber(n)]
    pull_labels = ["O_X", "fiber"]
    if side == "I":
        pts = [KClass.point(n, i) for i in range(1, n + 1)]
        return Decomposition(pull, pts, pull_labels, [f"O_p{i}" for i in range(1, n + 1)])
    if side == "J":
        pts = [KClass.zeta_point(n, i) for i in range(1, n + 1)]
        return Decomposition(pts, pull, [f"zeta*O_p{i}" for i in range(1, n + 1)], pull_labels)
    raise PreconditionError("side must be 'I' or 'J'")
