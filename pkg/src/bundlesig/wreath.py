"""The wreath-type group S_n x| Top+(S^1)^n, its lift, and the bounded cocycle.

Elements are pairs ``(sigma, (h^0, ..., h^{n-1}))`` acting on the torus by
applying ``h^j`` to coordinate ``j`` and then moving that coordinate to
position ``sigma(j)``.  Products read left to right (``a * b`` applies ``a``
first), which forces

    (sigma, g) * (eta, h) = (eta o sigma, u),   u^j = g^j followed by h^{sigma(j)}.

The lifted group replaces every ``h^j`` by a lift to the line; its kernel
over the base group is Z^n (integer translations in each coordinate).
Summing kernel coordinates is invariant under the permutation action, so the
cyclic central extension is never built explicitly: every cocycle value is
a coordinate sum of a kernel vector.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .circle import (CircleMap, LiftedMap, Rotation, canonical_lift, circle_map_from_json,
                     compose, identity_map, lift_defect, to_fraction, _fmt)
from .errors import DimensionMismatch, InternalConsistency, MixedExactnessError


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0, ..., n-1} in one-line notation (0-based)."""

    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"{images} is not a permutation")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_one_line(cls, images: Sequence[int]) -> "Permutation":
        """From 1-based one-line notation, as used in JSON files."""
        return cls(tuple(i - 1 for i in images))

    def to_one_line(self) -> list:
        return [i + 1 for i in self.images]

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # left to right: self first
        return Permutation(tuple(other.images[i] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, i in enumerate(self.images):
            inv[i] = j
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(self.n))

    def permute(self, v: Sequence) -> tuple:
        """Move entry ``j`` of ``v`` to position ``sigma(j)``."""
        out = [None] * self.n
        for j, x in enumerate(v):
            out[self.images[j]] = x
        return tuple(out)


def _check_maps(maps: Sequence[CircleMap]) -> None:
    if maps and len({m.exact for m in maps}) > 1:
        raise MixedExactnessError("wreath element mixes exact and numeric circle maps")


@dataclass(frozen=True)
class WreathElement:
    sigma: Permutation
    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if len(maps) != self.sigma.n:
            raise DimensionMismatch(f"{len(maps)} maps for a permutation of {self.sigma.n}")
        _check_maps(maps)
        object.__setattr__(self, "maps", maps)

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "WreathElement":
        return cls(Permutation.identity(n), (identity_map(exact),) * n)

    @property
    def n(self) -> int:
        return self.sigma.n

    @property
    def exact(self) -> bool:
        return all(m.exact for m in self.maps)

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        return wreath_multiply(self, other)

    def inverse(self) -> "WreathElement":
        inv = self.sigma.permute([m.inverse() for m in self.maps])
        return WreathElement(self.sigma.inverse(), inv)

    def is_identity(self, tol: float = 0.0) -> bool:
        if not self.sigma.is_identity():
            return False
        return all(m.is_identity() if m.exact else m.is_identity(tol) for m in self.maps)

    def __call__(self, point):
        return wreath_action(self, point)

    def to_json(self) -> dict:
        return {"n": self.n, "sigma": self.sigma.to_one_line(),
                "maps": [m.to_json() for m in self.maps]}


def wreath_from_json(obj: dict) -> WreathElement:
    sigma = Permutation.from_one_line(obj["sigma"])
    if obj.get("n", sigma.n) != sigma.n:
        raise DimensionMismatch("'n' disagrees with the permutation length")
    return WreathElement(sigma, tuple(circle_map_from_json(m) for m in obj["maps"]))


def wreath_multiply(a: WreathElement, b: WreathElement) -> WreathElement:
    if a.n != b.n:
        raise DimensionMismatch(f"cannot multiply n={a.n} by n={b.n}")
    u = tuple(compose(a.maps[j], b.maps[a.sigma(j)]) for j in range(a.n))
    return WreathElement(a.sigma * b.sigma, u)


def wreath_action(a: WreathElement, point: Sequence) -> tuple:
    """Component ``i`` of the result is ``h^{s^-1(i)}(x^{s^-1(i)})``."""
    if len(point) != a.n:
        raise DimensionMismatch(f"point of length {len(point)} for n={a.n}")
    return a.sigma.permute([h(x) for h, x in zip(a.maps, point)])


@dataclass(frozen=True)
class LiftedWreathElement:
    sigma: Permutation
    lifts: tuple

    def __post_init__(self):
        lifts = tuple(self.lifts)
        if len(lifts) != self.sigma.n:
            raise DimensionMismatch("lift count does not match the permutation")
        object.__setattr__(self, "lifts", lifts)

    @property
    def n(self) -> int:
        return self.sigma.n

    def __mul__(self, other: "LiftedWreathElement") -> "LiftedWreathElement":
        if self.n != other.n:
            raise DimensionMismatch(f"cannot multiply n={self.n} by n={other.n}")
        u = tuple(self.lifts[j].then(other.lifts[self.sigma(j)]) for j in range(self.n))
        return LiftedWreathElement(self.sigma * other.sigma, u)

    def inverse(self) -> "LiftedWreathElement":
        return LiftedWreathElement(self.sigma.inverse(),
                                   self.sigma.permute([L.inverse() for L in self.lifts]))

    def project(self) -> WreathElement:
        return WreathElement(self.sigma, tuple(L.base for L in self.lifts))

    def shifted(self, v: Sequence[int]) -> "LiftedWreathElement":
        return LiftedWreathElement(self.sigma, tuple(L.shifted(k) for L, k in zip(self.lifts, v)))

    def kernel_vector(self) -> tuple:
        """The Z^n coordinates of a kernel element; raises if not in the kernel."""
        if not self.sigma.is_identity():
            raise InternalConsistency(f"permutation part {self.sigma.images} is not trivial")
        v = tuple(L.translation() for L in self.lifts)
        if None in v:
            raise InternalConsistency("a factor is not an integer translation")
        return v

    def __call__(self, point):
        return self.sigma.permute([L(x) for L, x in zip(self.lifts, point)])


def section(a: WreathElement, x0=Fraction(0)) -> LiftedWreathElement:
    """Lift every factor canonically at ``x0``; the permutation is kept."""
    return LiftedWreathElement(a.sigma, tuple(canonical_lift(h, x0) for h in a.maps))


def lifted_identity(n: int, exact: bool = True) -> LiftedWreathElement:
    return LiftedWreathElement(Permutation.identity(n), (LiftedMap(identity_map(exact)),) * n)


def rho(v: Sequence[int]) -> int:
    return sum(v)


def kernel_defect(a: WreathElement, b: WreathElement, x0=Fraction(0),
                  multiply=wreath_multiply) -> tuple:
    """``s(ab)^-1 s(a) s(b)`` as an integer vector; entries lie in {0, 1}."""
    if a.n != b.n:
        raise DimensionMismatch(f"cannot pair n={a.n} with n={b.n}")
    direct = section(multiply(a, b), x0)
    product = section(a, x0) * section(b, x0)
    if direct.sigma != product.sigma:
        raise InternalConsistency(
            f"s(ab) has permutation {direct.sigma.images}, s(a)s(b) has {product.sigma.images}")
    # s(ab)^-1 s(a)s(b) = (e, t) where t moves coordinate j to sigma(j) and
    # t_j is the translation taking the j-th factor of s(ab) to that of s(a)s(b)
    shifts = [lift_defect(d, p) for d, p in zip(direct.lifts, product.lifts)]
    return direct.sigma.permute(shifts)


@dataclass(frozen=True)
class CocycleValue:
    raw: int
    shifted: int
    n: int
    basepoint: Fraction
    defect: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {"raw": self.raw, "shifted": self.shifted, "n": self.n,
                "basepoint": _fmt(self.basepoint)}


def cocycle(a: WreathElement, b: WreathElement, x0=Fraction(0),
            multiply=wreath_multiply) -> CocycleValue:
    """Raw value ``rho(kernel_defect)`` in {0..n} and its shift by ``-(n/2)``."""
    if a.n % 2:
        raise DimensionMismatch(f"n = {a.n} must be even for the shifted cocycle")
    defect = kernel_defect(a, b, x0, multiply)
    raw = rho(defect)
    return CocycleValue(raw, raw - a.n // 2, a.n, to_fraction(x0), defect)


def raw_cocycle(a: WreathElement, b: WreathElement, x0=Fraction(0)) -> int:
    return rho(kernel_defect(a, b, x0))


def monomial_rep(a: WreathElement, sample: Sequence[complex] | None = None) -> np.ndarray:
    """Monomial matrix of ``a`` acting on row vectors.

    Entry ``(j, sigma(j))`` carries the scalar attached to factor ``j``: the
    given ``sample`` value, or ``exp(2 pi i theta_j)`` when every factor is a
    rotation.  With rotation scalars this is a homomorphism for the left to
    right product: ``M(a * b) = M(a) @ M(b)``.
    """
    n = a.n
    if sample is None:
        if not all(isinstance(h, Rotation) for h in a.maps):
            raise TypeError("default scalars need every factor to be a rotation")
        sample = [cmath.exp(2j * math.pi * float(h.theta)) for h in a.maps]
    if len(sample) != n:
        raise DimensionMismatch("one scalar per factor is required")
    if any(s == 0 for s in sample):
        raise ValueError("monomial scalars must be nonzero")
    m = np.zeros((n, n), dtype=complex)
    for j in range(n):
        m[j, a.sigma(j)] = sample[j]
    return m
