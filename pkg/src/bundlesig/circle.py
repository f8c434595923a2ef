"""Orientation-preserving circle homeomorphisms and their lifts to the line.

The circle is R/Z.  Every map carries a *reference lift* F: R -> R with
F(x + 1) = F(x) + 1; a :class:`LiftedMap` is a reference lift plus an integer
deck translation.  Three closed families are supported:

* :class:`Rotation` -- x -> x + theta, theta rational;
* :class:`PLMap` -- piecewise-linear with rational breakpoints and slopes;
* :class:`MoebiusMap` -- the action of a real 2x2 matrix of determinant one
  on the projective line, i.e. on lines through the origin of R^2.

A line making angle phi with the horizontal axis sits at the circle
coordinate x = phi/pi + 1/2 (mod 1).  On the affine chart u = v1/v0 this is
x = arctan(u)/pi + 1/2, an order-preserving identification RP^1 -> R/Z.

Exact families compose with each other; mixing them with MoebiusMap raises
:class:`MixedExactnessError`.  Products are written left to right: ``f * g``
applies ``f`` first.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import gmpy2

from .errors import AmbiguousLift, InternalConsistency, MixedExactnessError

Q = gmpy2.mpq
Real = Union[Fraction, float]

ZERO = gmpy2.mpq(0)
ONE = gmpy2.mpq(1)

LIFT_TOL = 1e-9
DET_TOL = 1e-12
OFFSET_TOL = 1e-6
RESIDUAL_TOL = 1e-6
RESIDUAL_SAMPLES = 32


def to_fraction(value):
    """Parse ints, Fractions and ``"p/q"`` strings into a reduced rational.

    Values are ``gmpy2.mpq``; they compare and hash equal to ``Fraction``.
    Floats are rejected.
    """
    if type(value) is type(ZERO):
        return value
    if isinstance(value, Fraction):
        return Q(value.numerator, value.denominator)
    if isinstance(value, int) and not isinstance(value, bool):
        return Q(value)
    if isinstance(value, str):
        return Q(Fraction(value.strip()))
    raise TypeError(f"expected an exact rational, got {value!r}")


def is_exact_number(x) -> bool:
    return not isinstance(x, float)


def frac(x: Real) -> Real:
    return x - math.floor(x)


def circle_distance(x: float, y: float) -> float:
    d = (float(x) - float(y)) % 1.0
    return min(d, 1.0 - d)


class CircleMap:
    """Base class; subclasses provide ``lift``, ``inverse`` and ``is_identity``."""

    kind = "abstract"
    exact = True

    def lift(self, x: Real) -> Real:
        raise NotImplementedError

    def inverse(self) -> "CircleMap":
        raise NotImplementedError

    def is_identity(self) -> bool:
        raise NotImplementedError

    def __call__(self, x: Real) -> Real:
        return frac(self.lift(x))

    def __mul__(self, other: "CircleMap") -> "CircleMap":
        return compose(self, other)

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Rotation(CircleMap):
    theta: Fraction

    kind = "rotation"

    def __post_init__(self):
        t = to_fraction(self.theta)
        object.__setattr__(self, "theta", t - math.floor(t))

    def lift(self, x):
        if isinstance(x, float):
            return x + float(self.theta)
        return x + self.theta

    def inverse(self):
        return Rotation(-self.theta)

    def is_identity(self):
        return self.theta == 0

    def to_pl(self) -> "PLMap":
        return PLMap(((ZERO, self.theta, ONE),))

    def to_json(self):
        return {"kind": "rotation", "theta": _fmt(self.theta)}


def _normalize_pl(breakpoints) -> tuple:
    bps = [tuple(to_fraction(v) for v in bp) for bp in breakpoints]
    if not bps:
        raise ValueError("a PL map needs at least one breakpoint")
    for bp in bps:
        if len(bp) != 3:
            raise ValueError(f"breakpoint must be (x, y, slope), got {bp}")
    for k, (x, _, s) in enumerate(bps):
        if not 0 <= x < 1:
            raise ValueError(f"breakpoint abscissa {x} outside [0, 1)")
        if s <= 0:
            raise ValueError(f"slope {s} is not positive")
        if k and x <= bps[k - 1][0]:
            raise ValueError("breakpoint abscissae must be strictly increasing")
    if bps[0][0] != 0:
        x_last, y_last, s_last = bps[-1]
        bps.insert(0, (ZERO, y_last + s_last * (1 - x_last) - 1, s_last))
    for (x0, y0, s0), (x1, y1, _) in zip(bps, bps[1:]):
        if y0 + s0 * (x1 - x0) != y1:
            raise ValueError(f"discontinuity at x = {x1}")
    x_last, y_last, s_last = bps[-1]
    if y_last + s_last * (1 - x_last) != bps[0][1] + 1:
        raise ValueError("total rise over [0, 1) is not 1")
    merged = [bps[0]]
    for bp in bps[1:]:
        if bp[2] != merged[-1][2]:
            merged.append(bp)
    shift = math.floor(merged[0][1])
    return tuple((x, y - shift, s) for x, y, s in merged)


@dataclass(frozen=True)
class PLMap(CircleMap):
    """Piecewise-linear homeomorphism.

    ``breakpoints`` lists ``(x_k, y_k, slope_k)``: on ``[x_k, x_{k+1})`` the
    reference lift is ``y_k + slope_k * (x - x_k)``.  The stored form is
    normalized (first abscissa 0, ``y_0`` in [0, 1), no redundant
    breakpoints) so structural equality is equality of circle maps.
    """

    breakpoints: tuple

    kind = "pl"

    def __post_init__(self):
        bps = _normalize_pl(self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        self._cache()

    def _cache(self):
        object.__setattr__(self, "_xs", [bp[0] for bp in self.breakpoints])
        object.__setattr__(self, "_ys", [bp[1] for bp in self.breakpoints])

    @classmethod
    def _trusted(cls, bps) -> "PLMap":
        # bps: continuous by construction, first abscissa 0; only merge and shift
        merged = [bps[0]]
        for bp in bps[1:]:
            if bp[2] != merged[-1][2]:
                merged.append(bp)
        shift = math.floor(merged[0][1])
        if shift:
            merged = [(x, y - shift, s) for x, y, s in merged]
        obj = object.__new__(cls)
        object.__setattr__(obj, "breakpoints", tuple(merged))
        obj._cache()
        return obj

    def _segment(self, t):
        return self.breakpoints[bisect_right(self._xs, t) - 1]

    def lift(self, x):
        m = math.floor(x)
        t = x - m
        xk, yk, sk = self._segment(t)
        if isinstance(x, float):
            return float(yk) + float(sk) * (t - float(xk)) + m
        return yk + sk * (t - xk) + m

    def slope_at(self, x) -> Fraction:
        return self._segment(frac(x))[2]

    def lift_inverse(self, y):
        m = math.floor(y - self._ys[0])
        t = y - m
        xk, yk, sk = self.breakpoints[bisect_right(self._ys, t) - 1]
        return xk + (t - yk) / sk + m

    def inverse(self):
        pts = []
        for x, y, s in self.breakpoints:
            m = math.floor(y)
            pts.append((y - m, x - m, 1 / s))
        return _most_specific(PLMap._trusted(_close_at_zero(pts)))

    def is_identity(self):
        return self.breakpoints == ((0, 0, 1),)

    def to_pl(self):
        return self

    def to_json(self):
        return {"kind": "pl",
                "breakpoints": [[_fmt(x), _fmt(y), _fmt(s)] for x, y, s in self.breakpoints]}


@dataclass(frozen=True)
class MoebiusMap(CircleMap):
    """Projective action of ``[[a, b], [c, d]]`` on lines of R^2 (floating point)."""

    matrix: tuple

    kind = "moebius"
    exact = False

    def __post_init__(self):
        m = self.matrix
        if len(m) == 2:
            m = (m[0][0], m[0][1], m[1][0], m[1][1])
        a, b, c, d = (float(v) for v in m)
        det = a * d - b * c
        # relative: products of hyperbolic matrices have large entries
        if abs(det - 1.0) > DET_TOL * max(1.0, abs(a * d) + abs(b * c)):
            raise ValueError(f"determinant {det!r} is not 1")
        if det != 1.0:
            r = math.sqrt(det)
            a, b, c, d = a / r, b / r, c / r, d / r
        object.__setattr__(self, "matrix", (a, b, c, d))
        # polar decomposition A = R(alpha) P with P symmetric positive definite;
        # P moves every vector by less than a quarter turn, so the lift is continuous
        alpha = math.atan2(c - b, a + d)
        ca, sa = math.cos(alpha), math.sin(alpha)
        p = (ca * a + sa * c, ca * b + sa * d, -sa * a + ca * c, -sa * b + ca * d)
        object.__setattr__(self, "_alpha", alpha)
        object.__setattr__(self, "_p", p)

    @property
    def rows(self):
        a, b, c, d = self.matrix
        return ((a, b), (c, d))

    def lift(self, x):
        phi = math.pi * (float(x) - 0.5)
        v0, v1 = math.cos(phi), math.sin(phi)
        p00, p01, p10, p11 = self._p
        w0, w1 = p00 * v0 + p01 * v1, p10 * v0 + p11 * v1
        delta = math.atan2(v0 * w1 - v1 * w0, v0 * w0 + v1 * w1)
        return (phi + delta + self._alpha) / math.pi + 0.5

    def inverse(self):
        a, b, c, d = self.matrix
        return MoebiusMap((d, -b, -c, a))

    @property
    def exactly_identity(self) -> bool:
        return self.matrix in ((1.0, 0.0, 0.0, 1.0), (-1.0, 0.0, 0.0, -1.0))

    def is_identity(self, tol: float = 0.0):
        if self.exactly_identity:
            return True
        return tol > 0 and displacement(self) <= tol

    def to_json(self):
        a, b, c, d = self.matrix
        return {"kind": "moebius", "matrix": [[repr(a), repr(b)], [repr(c), repr(d)]]}


def displacement(f: CircleMap, samples: int = RESIDUAL_SAMPLES) -> float:
    """Largest circle distance ``d(f(x), x)`` over ``samples`` equally spaced points."""
    return max(circle_distance(f(k / samples), k / samples) for k in range(samples))


def moebius_rotation(turn: float) -> MoebiusMap:
    """Rotation of R^2 by ``pi * turn``; shifts the circle coordinate by ``turn``."""
    c, s = math.cos(math.pi * turn), math.sin(math.pi * turn)
    return MoebiusMap((c, -s, s, c))


def identity_map(exact: bool = True) -> CircleMap:
    return Rotation(ZERO) if exact else MoebiusMap((1.0, 0.0, 0.0, 1.0))


def _most_specific(f: PLMap) -> CircleMap:
    if len(f.breakpoints) == 1 and f.breakpoints[0][2] == 1:
        return Rotation(f.breakpoints[0][1])
    return f


def _close_at_zero(pts: list) -> list:
    # sort points reduced to [0, 1) and restore a breakpoint at x = 0
    pts.sort()
    if pts[0][0] != 0:
        x, y, s = pts[-1]
        pts.insert(0, (ZERO, y + s * (1 - x) - 1, s))
    return pts


def _rotate_then(theta, g: PLMap) -> PLMap:
    pts = []
    for x, y, s in g.breakpoints:
        u = x - theta
        m = math.floor(u)
        pts.append((u - m, y - m, s))
    return PLMap._trusted(_close_at_zero(pts))


def _compose_pl(f: PLMap, g: PLMap) -> PLMap:
    pts = set(f._xs)
    pts.add(ZERO)
    y0 = f._ys[0]
    for xg in g._xs:
        t = xg + math.ceil(y0 - xg)
        if t < y0 + 1:
            pts.add(f.lift_inverse(t))
    bps = []
    for p in sorted(pts):
        fp = f.lift(p)
        bps.append((p, g.lift(fp), f.slope_at(p) * g.slope_at(fp)))
    return PLMap._trusted(bps)


def compose(f: CircleMap, g: CircleMap) -> CircleMap:
    """Apply ``f`` first, then ``g``; returns the most specific family."""
    if f.exact != g.exact:
        raise MixedExactnessError(f"cannot compose {f.kind} with {g.kind}")
    if not f.exact:
        a1, b1, c1, d1 = f.matrix
        a2, b2, c2, d2 = g.matrix
        m = (a2 * a1 + b2 * c1, a2 * b1 + b2 * d1, c2 * a1 + d2 * c1, c2 * b1 + d2 * d1)
        det = m[0] * m[3] - m[1] * m[2]
        r = math.sqrt(det)
        return MoebiusMap(tuple(v / r for v in m))
    if isinstance(f, Rotation) and isinstance(g, Rotation):
        return Rotation(f.theta + g.theta)
    # composing with a rotation only shifts breakpoints
    if isinstance(g, Rotation):
        return PLMap._trusted([(x, y + g.theta, s) for x, y, s in f.breakpoints])
    if isinstance(f, Rotation):
        return _rotate_then(f.theta, g)
    return _most_specific(_compose_pl(f.to_pl(), g.to_pl()))


@dataclass(frozen=True)
class LiftedMap:
    """Increasing degree-one map of R: ``base.lift(x) + offset``."""

    base: CircleMap
    offset: int = 0
    basepoint: Fraction | None = field(default=None, compare=False)

    def __call__(self, x: Real) -> Real:
        return self.base.lift(x) + self.offset

    @property
    def exact(self) -> bool:
        return self.base.exact

    def _origin(self):
        return ZERO if self.exact else 0.0

    def _integral(self, value) -> int:
        if self.exact:
            if denominator(value) != 1:
                raise InternalConsistency(f"lift offset {value} is not an integer")
            return int(value)
        r = round(value)
        if abs(value - r) > OFFSET_TOL:
            raise InternalConsistency(f"lift offset {value!r} is not near an integer")
        return int(r)

    def then(self, other: "LiftedMap") -> "LiftedMap":
        """The lift applying ``self`` first and ``other`` second."""
        base = compose(self.base, other.base)
        p = self._origin()
        return LiftedMap(base, self._integral(other(self(p)) - base.lift(p)))

    def inverse(self) -> "LiftedMap":
        base = self.base.inverse()
        p = self._origin()
        return LiftedMap(base, self._integral(p - base.lift(self(p))))

    def shifted(self, k: int) -> "LiftedMap":
        return LiftedMap(self.base, self.offset + k, self.basepoint)

    def translation(self, tol: float = RESIDUAL_TOL) -> int | None:
        """The integer ``t`` if this lift is ``x -> x + t``, else ``None``."""
        if self.exact:
            if not self.base.is_identity():
                return None
            return self._integral(self(ZERO))
        if not self.base.is_identity(tol):
            return None
        return self._integral(self(0.0))


def canonical_lift(h: CircleMap, x0) -> LiftedMap:
    """The unique lift ``L`` of ``h`` with ``L(x0) - x0`` in [0, 1)."""
    x0 = to_fraction(x0)
    if h.exact:
        return LiftedMap(h, -int(math.floor(h.lift(x0) - x0)), x0)
    d = h.lift(float(x0)) - float(x0)
    # numerically trivial products are the identity element: use the identity lift
    if h.exactly_identity or (abs(d - round(d)) <= LIFT_TOL and h.is_identity(RESIDUAL_TOL)):
        return LiftedMap(h, -int(round(d)), x0)
    if abs(d - round(d)) <= LIFT_TOL:
        raise AmbiguousLift(f"h(x0) - x0 = {d!r} is within {LIFT_TOL} of an integer")
    return LiftedMap(h, -int(math.floor(d)), x0)


def lift_evaluate(lifted: LiftedMap, x: Real) -> Real:
    return lifted(x)


def lift_defect(first: LiftedMap, second: LiftedMap) -> int:
    """Integer ``t`` with ``second(x) = first(x) + t`` for all ``x``.

    Both lifts must cover the same circle map.  Exact maps are compared
    structurally; numeric ones on the residual sample grid.
    """
    if first.base == second.base:
        return second.offset - first.offset
    if first.exact or second.exact:
        raise InternalConsistency(f"lifts of different circle maps: {first.base} vs {second.base}")
    diffs = [second(k / RESIDUAL_SAMPLES) - first(k / RESIDUAL_SAMPLES)
             for k in range(RESIDUAL_SAMPLES)]
    t = round(diffs[0])
    if max(abs(d - t) for d in diffs) > OFFSET_TOL:
        raise InternalConsistency("numeric lifts do not differ by an integer translation")
    return int(t)


def classical_euler_cocycle(g: CircleMap, h: CircleMap, x0=ZERO) -> int:
    """``s(gh)^-1 s(g) s(h)`` for the section ``s`` of canonical lifts at ``x0``.

    ``gh`` means "``g`` first, then ``h``".  The value is 0 or 1.
    """
    if g.exact != h.exact:
        raise MixedExactnessError("cocycle arguments differ in exactness")
    product = canonical_lift(g, x0).then(canonical_lift(h, x0))
    composite = canonical_lift(product.base, x0)
    return product.offset - composite.offset


def translation_number(lifted: LiftedMap, iterations: int, x0=None) -> tuple:
    """Interval ``[(L^n(x0) - x0 - 1)/n, (L^n(x0) - x0 + 1)/n]`` containing the translation number."""
    if iterations < 1:
        raise ValueError("iterations must be positive")
    if x0 is None:
        x0 = lifted.basepoint if lifted.basepoint is not None else ZERO
    x0 = to_fraction(x0) if lifted.exact else float(x0)
    x = x0
    for _ in range(iterations):
        x = lifted(x)
    return ((x - x0 - 1) / iterations, (x - x0 + 1) / iterations)


def denominator(q) -> int:
    return int(q.denominator)


def _fmt(q) -> str:
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def circle_map_from_json(obj: dict) -> CircleMap:
    kind = obj["kind"]
    if kind == "rotation":
        return Rotation(to_fraction(obj["theta"]))
    if kind == "pl":
        return _most_specific(PLMap(tuple(tuple(bp) for bp in obj["breakpoints"])))
    if kind == "moebius":
        (a, b), (c, d) = obj["matrix"]
        return MoebiusMap(tuple(float(v) for v in (a, b, c, d)))
    raise ValueError(f"unknown circle map kind {kind!r}")
