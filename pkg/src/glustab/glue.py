"""Gluing stability data across a semiorthogonal decomposition D = <D1, D2>.

Hom-degree data is an input: an :class:`ExtPattern` records for each pair of
generators (g1 in the first heart, g2 in the second) the degrees k with
Hom^k(g1, g2) != 0.  Homs from the second factor to the first vanish by
semiorthogonality and are never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (DegeneratePhase, HypothesisViolation, InvalidDecomposition,
                     InvalidStabilityFunction, NotExtExceptional, NotOrthogonal, PreconditionError,
                     PreconditionGenus, Undecidable)
from .klattice import CentralCharge, Gauss, KClass, RotatedCharge, det2, qnum, rotate_charge, sign
from .slicing import ChainObject, HNResult, heart_phase, hn_polygon, in_h_prime, phase


# --------------------------------------------------------------------------
# Ext patterns
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtPattern:
    G1: tuple
    G2: tuple
    homs: tuple = ()  # ((i, j, frozenset(degrees)), ...)

    def __post_init__(self):
        object.__setattr__(self, "G1", tuple(self.G1))
        object.__setattr__(self, "G2", tuple(self.G2))
        items = self.homs.items() if isinstance(self.homs, dict) else \
            (((i, j), d) for i, j, d in self.homs)
        merged = {}
        for (i, j), degs in items:
            if not (0 <= i < len(self.G1) and 0 <= j < len(self.G2)):
                raise PreconditionError(f"hom entry ({i}, {j}) refers to a missing generator")
            merged.setdefault((i, j), set()).update(int(k) for k in degs)
        object.__setattr__(self, "homs", tuple(sorted((i, j, frozenset(d)) for (i, j), d in merged.items() if d)))

    def degrees(self, i, j) -> frozenset:
        for a, b, d in self.homs:
            if (a, b) == (i, j):
                return d
        return frozenset()

    def to_json(self) -> dict:
        return {"G1": list(self.G1), "G2": list(self.G2),
                "homs": [{"from": i, "to": j, "degrees": sorted(d)} for i, j, d in self.homs]}

    @classmethod
    def from_json(cls, data) -> "ExtPattern":
        for h in data.get("reverse", []):
            if h.get("degrees"):
                raise PreconditionError("homs from the second factor to the first must vanish")
        homs = {(int(h["from"]), int(h["to"])): h["degrees"] for h in data.get("homs", [])}
        return cls(tuple(data["G1"]), tuple(data["G2"]), homs)


def check_hearts_orthogonal(p: ExtPattern) -> bool:
    """No hom of degree <= 0 from the first heart to the second."""
    return all(k > 0 for _, _, d in p.homs for k in d)


def _first_low_hom(p: ExtPattern):
    for i, j, d in p.homs:
        low = [k for k in d if k <= 0]
        if low:
            return (p.G1[i], p.G2[j], min(low))
    return None


# --------------------------------------------------------------------------
# stability summaries and the gluing parameter
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SimpleData:
    label: str
    charge: Gauss
    phase: object


def simple(label, charge, lift=None) -> SimpleData:
    charge = Gauss.coerce(charge)
    ph = heart_phase(charge) if lift is None else lift
    return SimpleData(label, charge, ph)


@dataclass(frozen=True)
class StabilitySummary:
    """Finite data on one factor: simple objects of its heart with phases in (0, 1]."""

    simples: tuple
    finite_length: bool = True
    empty_below: Optional[object] = None   # some phi with P(0, phi] = 0
    empty_above: Optional[object] = None   # some phi with P(phi, 1] = 0

    def __post_init__(self):
        object.__setattr__(self, "simples", tuple(self.simples))
        for s in self.simples:
            if not (0 < s.phase <= 1):
                raise PreconditionError(f"simple {s.label} has phase {s.phase} outside (0, 1]")
        if self.finite_length and self.simples:
            if self.empty_below is not None and self.empty_below > self.min_phase():
                raise PreconditionError("emptiness window contradicts a simple phase")
            if self.empty_above is not None and self.empty_above < self.max_phase():
                raise PreconditionError("emptiness window contradicts a simple phase")

    def min_phase(self):
        return min(s.phase for s in self.simples)

    def max_phase(self):
        return max(s.phase for s in self.simples)

    def has_phase_one(self) -> bool:
        return any(s.phase == 1 for s in self.simples)

    def by_label(self, label) -> Optional[SimpleData]:
        for s in self.simples:
            if s.label == label:
                return s
        return None


@dataclass(frozen=True)
class GluingChoice:
    a: Optional[object]
    case: Optional[str]
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.a is not None


def recheck_parameter(a, s1: StabilitySummary, s2: StabilitySummary, p: ExtPattern):
    """Look for a nonzero Hom^{<=0} between the slices (a, a+1] of the two factors.

    Each simple S of phase psi contributes S itself when psi > a and S[1]
    otherwise; Hom^k(S1[e1], S2[e2]) = Hom^{k+e2-e1}(S1, S2).  Returns the first
    offending (source, target, degree) or None.
    """
    for x in s1.simples:
        if x.label not in p.G1:
            continue
        i = p.G1.index(x.label)
        e1 = 0 if x.phase > a else 1
        for y in s2.simples:
            if y.label not in p.G2:
                continue
            j = p.G2.index(y.label)
            e2 = 0 if y.phase > a else 1
            for d in sorted(p.degrees(i, j)):
                if d <= e2 - e1:
                    return (x.label + ("[1]" if e1 else ""), y.label + ("[1]" if e2 else ""), d - (e2 - e1))
    return None


def find_gluing_parameter(s1: StabilitySummary, s2: StabilitySummary, p: ExtPattern) -> GluingChoice:
    """A parameter a in (0, 1) for which the rotated slices are Hom^{<=0}-orthogonal.

    Tried in order: a = phi when P2(0, phi] is known to be small (phi the smallest
    simple phase of the second factor, with phi/2 as fallback), a = (phi + 1)/2 when
    the first factor has no phase-1 objects (phi its largest simple phase), and
    finally midpoints between consecutive simple phases.  Every candidate is
    re-checked by enumeration.
    """
    low = _first_low_hom(p)
    if low is not None:
        raise NotOrthogonal(f"Hom^{low[2]}({low[0]}, {low[1]}) is nonzero")
    candidates = []
    if s2.simples and (s2.finite_length or s2.empty_below is not None):
        phi = s2.empty_below if s2.empty_below is not None else s2.min_phase()
        if phi < 1:
            candidates.append((phi, "case1"))
        candidates.append((phi / 2, "case1"))
    if s1.simples and (s1.finite_length or s1.empty_above is not None) and not s1.has_phase_one():
        phi = s1.empty_above if s1.empty_above is not None else s1.max_phase()
        candidates.append(((phi + 1) / 2, "case2"))
    pts = sorted({Fraction(0), Fraction(1)} | {_q(x.phase) for x in s1.simples + s2.simples})
    for lo, hi in zip(pts, pts[1:]):
        if lo < hi:
            candidates.append(((lo + hi) / 2, "search"))
    witness = None
    for a, case in candidates:
        if not (0 < a < 1):
            continue
        bad = recheck_parameter(a, s1, s2, p)
        if bad is None:
            return GluingChoice(qnum(a) if isinstance(a, (int, Fraction)) else a, case)
        witness = witness or bad
    return GluingChoice(None, None, witness)


def _q(x):
    return Fraction(x) if isinstance(x, (int, Fraction)) else Fraction(x).limit_denominator(10 ** 12)


@dataclass(frozen=True)
class GapReport:
    ok: bool
    gaps: tuple
    assumptions: tuple = ()

    def __bool__(self):
        return self.ok


def _rational_gcd(values):
    g = Fraction(0)
    for v in values:
        v = Fraction(v)
        if g == 0:
            g = v
        else:
            num = math.gcd(g.numerator * v.denominator, v.numerator * g.denominator)
            g = Fraction(num, g.denominator * v.denominator)
    return g


def _im_values(data):
    out = []
    for x in data:
        if isinstance(x, Gauss):
            x = x.im
        elif isinstance(x, complex):
            raise Undecidable("floating-point charges carry no lattice structure")
        if isinstance(x, float):
            raise Undecidable("floating-point imaginary parts carry no lattice structure")
        x = qnum(x)
        if x < 0:
            raise PreconditionError("imaginary parts on a heart must be non-negative")
        out.append(x)
    return out


def check_gluing_condition_a(data1, data2) -> GapReport:
    """0 is isolated in Im Z_i(H_i) for both factors.

    The data are imaginary parts (or charges) of generators of each heart; for
    rational generators the additive semigroup they span has smallest positive
    element the gcd, so the condition always holds and the gap is reported.
    """
    gaps = []
    notes = []
    for k, data in enumerate((data1, data2), start=1):
        vals = [v for v in _im_values(data) if v != 0]
        if not vals:
            gaps.append(None)
            notes.append(f"factor {k}: all imaginary parts vanish; Noetherianity of the phase-1 part is assumed")
        else:
            gaps.append(qnum(_rational_gcd(vals)))
    return GapReport(True, tuple(gaps), tuple(notes))


def check_gluing_condition_b(p: ExtPattern, s2: StabilitySummary) -> bool:
    """No hom of degree <= 1 from the first heart to objects of phase in (0, 1) of the second."""
    targets = set()
    for y in s2.simples:
        if y.phase < 1 and y.label in p.G2:
            targets.add(p.G2.index(y.label))
    return not any(j in targets and any(k <= 1 for k in d) for _, j, d in p.homs)


# --------------------------------------------------------------------------
# glued charges
# --------------------------------------------------------------------------


def _solve_exact(cols, target):
    """Solve sum x_k cols[k] = target over Q; cols form a square matrix."""
    n = len(target)
    A = [[Fraction(cols[k][r]) for k in range(n)] + [Fraction(target[r])] for r in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise InvalidDecomposition("factor bases do not span the lattice")
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                m = A[r][c]
                A[r] = [x - m * y for x, y in zip(A[r], A[c])]
    return [A[r][n] for r in range(n)]


def _coords(c):
    return tuple(c.coords) if isinstance(c, KClass) else tuple(int(x) for x in c)


class Decomposition:
    """Splitting of a lattice as the sum of the K-groups of the two factors.

    ``basis1`` and ``basis2`` are ambient classes spanning the images of the two
    factors; together they must be a Z-basis.  An optional ``rule`` maps a class to
    its pair of components and is checked against the bases.
    """

    def __init__(self, basis1: Sequence, basis2: Sequence, labels1=None, labels2=None, rule=None):
        self.basis1 = [_coords(b) for b in basis1]
        self.basis2 = [_coords(b) for b in basis2]
        self.labels1 = tuple(labels1 or (f"A{k}" for k in range(len(self.basis1))))
        self.labels2 = tuple(labels2 or (f"B{k}" for k in range(len(self.basis2))))
        self.rule = rule
        cols = self.basis1 + self.basis2
        self.rank = len(cols)
        if any(len(c) != self.rank for c in cols):
            raise InvalidDecomposition("factor bases must together form a square basis")
        # unimodularity: every standard vector has integral coordinates
        for k in range(self.rank):
            e = [0] * self.rank
            e[k] = 1
            if any(x.denominator != 1 for x in _solve_exact(cols, e)):
                raise InvalidDecomposition("factor bases are not a Z-basis of the lattice")

    def split(self, c):
        """Integer coordinates of the two components of ``c``."""
        target = _coords(c)
        if self.rule is not None:
            c1, c2 = self.rule(c)
            c1, c2 = _coords(c1), _coords(c2)
            if tuple(a + b for a, b in zip(c1, c2)) != target:
                raise InvalidDecomposition("components do not sum to the class")
            x1 = _solve_exact(self.basis1 + self.basis2, c1)
            x2 = _solve_exact(self.basis1 + self.basis2, c2)
            k = len(self.basis1)
            if any(x1[k:]) or any(x2[:k]):
                raise InvalidDecomposition("a component leaves its factor")
            x = x1[:k] + x2[k:]
        else:
            x = _solve_exact(self.basis1 + self.basis2, target)
        if any(v.denominator != 1 for v in x):
            raise InvalidDecomposition("class has non-integral components")
        k = len(self.basis1)
        return tuple(int(v) for v in x[:k]), tuple(int(v) for v in x[k:])

    def components(self, c):
        a, b = self.split(c)
        c1 = tuple(sum(a[k] * self.basis1[k][r] for k in range(len(a))) for r in range(self.rank))
        c2 = tuple(sum(b[k] * self.basis2[k][r] for k in range(len(b))) for r in range(self.rank))
        return c1, c2


class GluedCharge:
    """Z(X) = Z1(first component of X) + Z2(second component of X)."""

    def __init__(self, Z1: Sequence, Z2: Sequence, decomp: Decomposition):
        self.Z1 = tuple(Gauss.coerce(z) for z in Z1)
        self.Z2 = tuple(Gauss.coerce(z) for z in Z2)
        if len(self.Z1) != len(decomp.basis1) or len(self.Z2) != len(decomp.basis2):
            raise InvalidDecomposition("one charge value per factor basis element")
        self.decomp = decomp

    def eval(self, c) -> Gauss:
        a, b = self.decomp.split(c)
        out = Gauss(0)
        for k, z in zip(a, self.Z1):
            out = out + z * k
        for k, z in zip(b, self.Z2):
            out = out + z * k
        return out

    __call__ = eval

    def restrict1(self) -> tuple:
        return tuple(self.eval(b) for b in self.decomp.basis1)

    def restrict2(self) -> tuple:
        return tuple(self.eval(b) for b in self.decomp.basis2)

    def standard_values(self) -> tuple:
        out = []
        for k in range(self.decomp.rank):
            e = [0] * self.decomp.rank
            e[k] = 1
            out.append(self.eval(tuple(e)))
        return tuple(out)

    def as_central_charge(self) -> CentralCharge:
        return CentralCharge(self.standard_values())


def glue_charge(Z1, Z2, decomp: Decomposition) -> GluedCharge:
    return GluedCharge(Z1, Z2, decomp)


# --------------------------------------------------------------------------
# Ext-exceptional collections
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExceptionalCollection:
    """(E_1, ..., E_n) with Hom^k(E_i, E_j) recorded for i < j and zero for i > j."""

    labels: tuple
    homs: tuple = ()  # ((i, j, frozenset(degrees)), ...) with i < j, 0-based

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        n = len(self.labels)
        if n < 1:
            raise PreconditionError("collection must be nonempty")
        items = self.homs.items() if isinstance(self.homs, dict) else \
            (((i, j), d) for i, j, d in self.homs)
        clean = []
        for (i, j), d in items:
            d = frozenset(int(k) for k in d)
            if not d:
                continue
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise PreconditionError(f"bad hom entry ({i}, {j})")
            if i > j:
                raise NotExtExceptional(f"Hom({self.labels[i]}, {self.labels[j]}) must vanish")
            if min(d) <= 0:
                raise NotExtExceptional(
                    f"Hom^{min(d)}({self.labels[i]}, {self.labels[j]}) != 0 breaks Ext-exceptionality")
            clean.append((i, j, d))
        object.__setattr__(self, "homs", tuple(sorted(clean)))

    @property
    def n(self):
        return len(self.labels)

    def degrees(self, i, j) -> frozenset:
        for a, b, d in self.homs:
            if (a, b) == (i, j):
                return d
        return frozenset()

    def split_at(self, k) -> ExtPattern:
        """The pattern of <E_1..E_k> against <E_{k+1}..E_n>."""
        homs = {(i, j - k): d for i, j, d in self.homs if i < k <= j}
        return ExtPattern(self.labels[:k], self.labels[k:], homs)


@dataclass(frozen=True)
class GluedDescriptor:
    collection: ExceptionalCollection
    charges: tuple
    tag: str = "finite-length"

    def heart(self) -> tuple:
        """Extension-closure order: later members are subobjects, earlier ones quotients."""
        return tuple(reversed(self.collection.labels))

    def phase_of(self, k):
        return heart_phase(self.charges[k])

    def charge(self, c) -> Gauss:
        out = Gauss(0)
        for k, z in zip(_coords(c), self.charges):
            out = out + z * k
        return out

    def hn(self, certificate: Sequence[int], shift: int = 0) -> HNResult:
        """HN filtration relative to a composition series (indices listed bottom first).

        Adjacent pieces with sub E_a and quotient E_b, a < b, form a split extension
        because Ext^1(E_b, E_a) = 0; such pieces are swapped whenever that raises
        the phase of the lower one.  The polygon algorithm then runs on the result.
        """
        cert = [int(k) for k in certificate]
        if not cert:
            return HNResult(())
        n = self.collection.n
        if any(not (0 <= k < n) for k in cert):
            raise PreconditionError("certificate refers to a missing member")
        changed = True
        while changed:
            changed = False
            for pos in range(len(cert) - 1):
                a, b = cert[pos], cert[pos + 1]
                if a < b and det2(self.charges[a], self.charges[b]) > 0:
                    cert[pos], cert[pos + 1] = b, a
                    changed = True
        classes = []
        acc = [0] * n
        for k in cert:
            acc[k] += 1
            classes.append(tuple(acc))
        labels = tuple(self.collection.labels[k] for k in cert)

        def namer(j, k, _labels=labels, _cert=cert):
            if k - j == 1:
                return _labels[j]
            return "ext(" + ",".join(_labels[j:k]) + ")"

        chain = ChainObject(tuple(classes), labels, namer)
        res = hn_polygon(chain, self.charge)
        return res.shifted(shift) if shift else res


def macri_glued(collection: ExceptionalCollection, charges: Sequence):
    """Glue a stability from an Ext-exceptional collection and one charge per member.

    The heart is the extension closure of the members, which are its simple
    objects; returns the descriptor and the summary of simples.
    """
    if not isinstance(collection, ExceptionalCollection):
        raise PreconditionError("expected an ExceptionalCollection")
    zs = tuple(Gauss.coerce(z) for z in charges)
    if len(zs) != collection.n:
        raise PreconditionError("one charge per member")
    for lab, z in zip(collection.labels, zs):
        if z.is_zero():
            raise DegeneratePhase(f"member {lab} has zero charge")
        if not in_h_prime(z):
            raise InvalidStabilityFunction(f"member {lab} has charge outside h'")
    desc = GluedDescriptor(collection, zs)
    summary = StabilitySummary(tuple(SimpleData(lab, z, phase(z)) for lab, z in zip(collection.labels, zs)))
    return desc, summary


# --------------------------------------------------------------------------
# the exceptional collection on a rational base
# --------------------------------------------------------------------------


def cover_exceptional_collection(n, N) -> ExceptionalCollection:
    """(pi^*O(N)[1], pi^*O(N+1), O_p1[-1], ..., O_pn[-1]) with its built-in hom table."""
    labels = [f"pi*O({N})[1]", f"pi*O({N + 1})"] + [f"O_p{i}[-1]" for i in range(1, n + 1)]
    homs = {(0, 1): {1}}
    for i in range(n):
        homs[(0, 2 + i)] = {2}
        homs[(1, 2 + i)] = {1}
    return ExceptionalCollection(tuple(labels), homs)


def cover_exceptional_classes(n, N) -> list:
    return ([-(KClass.pullback(n, 1, N))], [KClass.pullback(n, 1, N + 1)],
            *([-KClass.point(n, i)] for i in range(1, n + 1)))


def _sign_im(Z, c) -> int:
    if isinstance(Z, RotatedCharge):
        return Z.sign_im(c)
    return sign(Z.eval(c).im)


def _approx(Z, c) -> complex:
    if isinstance(Z, RotatedCharge):
        return Z.approx(c)
    return complex(Z.eval(c))


@dataclass(frozen=True)
class ExcP1Report:
    ok: bool
    N: Optional[int]
    labels: tuple
    phases: tuple
    window_ok: bool
    glued_equal: bool
    reason: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "N": self.N, "collection": list(self.labels),
                "phases_approx": [float(x) for x in self.phases], "window_ok": self.window_ok,
                "glued_charge_equal": self.glued_equal, "reason": self.reason}


def exc_P1_check(sigma, a) -> ExcP1Report:
    """Exhibit a rotation of a stability on a cover of P^1 as glued from the collection above.

    ``sigma`` is a global stability from the classification (partition with no I-
    block and all n_i = 1); the rotated charge is Z_a = Z * exp(-i pi a) on the
    normalized frame.  N is the unique integer with Im Z_a(pi^*O(N)) < 0 <
    Im Z_a(pi^*O(N+1)).
    """
    a = Fraction(a)
    if not (0 < a < 1):
        raise PreconditionError("the rotation must be a small positive amount")
    geom = sigma.geometry
    if geom.genusY != 0:
        raise PreconditionGenus("the collection lives on covers of the projective line")
    part = sigma.partition
    if part.Iminus or any(k != 1 for k in part.n_i.values()):
        raise PreconditionError("need a stability from the family with I- empty and all n_i = 1")
    Zn = sigma.normalized
    n = Zn.n
    v = Zn.fiber
    for i in range(1, n + 1):
        if det2(Zn.point(i), v) == 0:
            raise HypothesisViolation(f"Z(O_p{i}) and Z(O_2p{i}) are R-linearly dependent", condition=i)
    Za = rotate_charge(Zn, a)
    x, y = Zn.OX.re, Zn.OX.im
    vr = -v.re  # v is a negative real number in the normalized frame
    cot = math.cos(math.pi * float(a)) / math.sin(math.pi * float(a))
    m_star = (float(x) - float(y) * cot) / float(vr)
    N = math.floor(m_star)
    for _ in range(4):
        lo = _sign_im(Za, KClass.pullback(n, 1, N))
        hi = _sign_im(Za, KClass.pullback(n, 1, N + 1))
        if lo < 0 < hi:
            break
        if lo == 0 or hi == 0:
            return ExcP1Report(False, None, (), (), False, False,
                               "Im Z_a vanishes on a pulled-back line bundle; no valid N")
        N = N + 1 if hi <= 0 else N - 1
    else:
        return ExcP1Report(False, None, (), (), False, False, "no sign change found")
    coll = cover_exceptional_collection(n, N)
    classes = [c[0] for c in cover_exceptional_classes(n, N)]
    phases = []
    in_heart = True
    for c in classes:
        z = _approx(Za, c)
        if _sign_im(Za, c) <= 0:
            in_heart = False
        phases.append(math.atan2(z.imag, z.real) / math.pi)
    # sigma-phase bounds of the members, moved by -a: pullbacks lie in P(0,1)
    bounds = [(1 - a, 2 - a), (-a, 1 - a)]
    for i in range(1, n + 1):
        p = phase(-Zn.point(i))
        bounds.append((p - a, p - a))
    window_ok = all(-1 - a < lo and hi <= 2 - a for lo, hi in bounds)
    # the glued charge agrees with Z on the whole lattice (test on the basis, unrotated)
    zs = [Zn.eval(c) for c in classes]
    cols = [c.coords for c in classes]
    glued_equal = True
    for k in range(n + 2):
        e = [0] * (n + 2)
        e[k] = 1
        coeffs = _solve_exact(cols, e)
        val = Gauss(0)
        for q, z in zip(coeffs, zs):
            val = val + z * q
        if val != Zn.values[k]:
            glued_equal = False
    ok = in_heart and window_ok and glued_equal
    reason = "" if in_heart else "rotation too large: a member leaves the upper half-plane"
    return ExcP1Report(ok, N, coll.labels, tuple(phases), window_ok, glued_equal, reason)
