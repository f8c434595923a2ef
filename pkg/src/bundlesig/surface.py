"""Surface groups, their fundamental 2-cycle, and Euler numbers of representations.

Words are tuples of nonzero integers: generator ``a_i`` is ``2i - 1``,
``b_i`` is ``2i`` (1-based ``i``) and a negative entry is the inverse letter.
The relator of the genus-``h`` surface group is
``a_1 b_1 a_1^-1 b_1^-1 ... a_h b_h a_h^-1 b_h^-1``.

Two routes lead to the Euler number of a representation into the wreath
group (or into Top+(S^1) itself):

* ``evaluate_euler_relator_lift`` lifts the generators with the canonical
  section and reads the coordinate sum of the lifted relator;
* ``evaluate_cocycle_bar`` pairs the section's cocycle with the fundamental
  cycle of ``build_fundamental_cycle``.

The cycle is chosen so that both routes agree on the nose.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .circle import (RESIDUAL_TOL, classical_euler_cocycle, displacement,
                     identity_map, to_fraction, _fmt)
from .errors import DimensionMismatch, RelatorViolation
from .wreath import (Permutation, WreathElement, cocycle, raw_cocycle, rho, section)

TARGETS = ("wreath", "circle", "sp")


def generator_names(genus: int) -> list:
    return [f"{c}{i}" for i in range(1, genus + 1) for c in "ab"]


def letter_name(letter: int) -> str:
    k = abs(letter) - 1
    name = f"{'ab'[k % 2]}{k // 2 + 1}"
    return name if letter > 0 else name + "^-1"


def format_word(word: Sequence[int]) -> str:
    return " ".join(letter_name(x) for x in word) or "e"


def parse_word(text: str) -> tuple:
    out = []
    for tok in text.split():
        inv = tok.endswith("^-1")
        base = tok[:-3] if inv else tok
        if base == "e":
            continue
        kind, digits = base[:1], base[1:]
        if kind not in ("a", "b") or not digits.isdigit() or int(digits) < 1:
            raise ValueError(f"bad generator {tok!r}")
        letter = 2 * int(digits) - 1 + (kind == "b")
        out.append(-letter if inv else letter)
    return tuple(out)


def free_reduce(word: Sequence[int]) -> tuple:
    out: list = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(word: Sequence[int]) -> tuple:
    return tuple(-x for x in reversed(word))


@dataclass(frozen=True)
class SurfaceGroupPresentation:
    genus: int

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus h >= 1 required")

    @property
    def generators(self) -> list:
        return generator_names(self.genus)

    @property
    def relator(self) -> tuple:
        word = []
        for i in range(self.genus):
            a, b = 2 * i + 1, 2 * i + 2
            word += [a, b, -a, -b]
        return tuple(word)

    def _conjugates(self) -> list:
        r = self.relator
        out = []
        for w in (r, invert_word(r)):
            out += [w[k:] + w[:k] for k in range(len(w))]
        return out

    def is_trivial(self, word: Sequence[int]) -> bool:
        """Word problem: Dehn's algorithm for genus >= 2, abelianization for the torus."""
        if self.genus == 1:
            sums = [0, 0]
            for x in word:
                sums[abs(x) - 1] += 1 if x > 0 else -1
            return sums == [0, 0]
        w = list(free_reduce(word))
        conj = self._conjugates()
        half = len(self.relator) // 2
        changed = True
        while w and changed:
            changed = False
            for p in range(len(w)):
                for r in conj:
                    k = 0
                    while k < len(r) and p + k < len(w) and w[p + k] == r[k]:
                        k += 1
                    if k > half:
                        w = list(free_reduce(w[:p] + list(invert_word(r[k:])) + w[p + k:]))
                        changed = True
                        break
                if changed:
                    break
        return not w

    def equal(self, w1: Sequence[int], w2: Sequence[int]) -> bool:
        return self.is_trivial(tuple(w1) + invert_word(w2))


@dataclass(frozen=True)
class FundamentalCycle:
    """Signed bar 2-simplices ``sign * [w | w']`` with words in the generators."""

    genus: int
    simplices: tuple

    @property
    def sign_sum(self) -> int:
        return sum(s for s, _, _ in self.simplices)

    def __len__(self):
        return len(self.simplices)

    def describe(self) -> list:
        return [f"{'+' if s > 0 else '-'}[{format_word(w)} | {format_word(v)}]"
                for s, w, v in self.simplices]


def build_fundamental_cycle(genus: int) -> FundamentalCycle:
    """Prefix (fan) cycle with ``4h - 2`` simplices.

    With ``R_i`` the product of the first ``i`` commutators, commutator ``i``
    contributes ``+[R_{i-1} | a_i] + [R_{i-1} a_i | b_i] - [R_i | b_i] - [R_i b_i | a_i]``.
    The two degenerate simplices (``R_0 = e`` and ``R_h = e``) are dropped and
    ``R_h`` is written as the empty word.
    """
    SurfaceGroupPresentation(genus)  # validates genus
    simplices = []
    prefix: tuple = ()
    for i in range(genus):
        a, b = 2 * i + 1, 2 * i + 2
        nxt = free_reduce(prefix + (a, b, -a, -b)) if i < genus - 1 else ()
        if prefix:
            simplices.append((1, prefix, (a,)))
        simplices.append((1, free_reduce(prefix + (a,)), (b,)))
        if nxt:
            simplices.append((-1, nxt, (b,)))
        simplices.append((-1, free_reduce(nxt + (b,)), (a,)))
        prefix = nxt
    return FundamentalCycle(genus, tuple(simplices))


def certify_cycle(cycle: FundamentalCycle, trials: int = 20, seed: int = 0,
                  bound: int = 10**6) -> bool:
    """Coboundary test: every random bounded 1-cochain ``b`` gives ``(db)(Z) = 0``.

    ``(db)(g, h) = b(g) + b(h) - b(gh)`` (trivial coefficients, unnormalized).
    Cochain values are assigned per group element, deciding equality of
    words with the surface group's word problem.
    """
    pres = SurfaceGroupPresentation(cycle.genus)
    reps: list = []

    def cls(word):
        for k, r in enumerate(reps):
            if pres.equal(word, r):
                return k
        reps.append(tuple(word))
        return len(reps) - 1

    terms = [(s, cls(w), cls(v), cls(free_reduce(w + v))) for s, w, v in cycle.simplices]
    rng = random.Random(seed)
    for _ in range(trials):
        b = [rng.randint(-bound, bound) for _ in reps]
        if sum(s * (b[x] + b[y] - b[xy]) for s, x, y, xy in terms) != 0:
            return False
    return True


@dataclass
class Representation:
    """Images of ``a1, b1, ..., ah, bh`` in a target group.

    Group elements multiply with ``*``: left-to-right composition for the
    wreath and circle targets, ordinary matrix product for ``sp``.
    """

    genus: int
    target: str
    images: dict
    geometric: bool = False
    certified: bool = False
    label: str = ""

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}")
        if self.genus < 1:
            raise ValueError("genus h >= 1 required")
        missing = set(generator_names(self.genus)) - set(self.images)
        if missing:
            raise ValueError(f"missing generator images: {sorted(missing)}")
        if self.target == "wreath":
            ns = {x.n for x in self.images.values()}
            if len(ns) != 1:
                raise DimensionMismatch("wreath images have different n")

    @property
    def presentation(self) -> SurfaceGroupPresentation:
        return SurfaceGroupPresentation(self.genus)

    def generator_list(self) -> list:
        return [self.images[name] for name in generator_names(self.genus)]

    @property
    def exact(self) -> bool:
        if self.target == "sp":
            return True
        return all(x.exact for x in self.images.values())

    @property
    def n(self) -> int:
        first = self.images["a1"]
        if self.target == "wreath":
            return first.n
        if self.target == "circle":
            return 1
        return 2 * first.g

    def identity(self):
        first = self.images["a1"]
        if self.target == "wreath":
            return WreathElement.identity(first.n, self.exact)
        if self.target == "circle":
            return identity_map(self.exact)
        return first.identity_like()

    def image(self, word: Sequence[int]):
        gens = self.generator_list()
        out = self.identity()
        for x in word:
            g = gens[abs(x) - 1]
            out = out * (g if x > 0 else g.inverse())
        return out

    def relator_image(self):
        return self.image(self.presentation.relator)

    def residual(self) -> float:
        """0 for an exact identity, the circle displacement for numeric maps, inf otherwise."""
        r = self.relator_image()
        if self.target == "sp":
            return 0.0 if r == r.identity_like() else math.inf
        maps = (r,) if self.target == "circle" else r.maps
        if self.target == "wreath" and not r.sigma.is_identity():
            return math.inf
        worst = 0.0
        for m in maps:
            if m.exact:
                if not m.is_identity():
                    return math.inf
            else:
                worst = max(worst, displacement(m))
        return worst

    def check(self, tol: float = RESIDUAL_TOL) -> float:
        res = self.residual()
        if res > tol:
            raise RelatorViolation(f"relator residual {res!r} exceeds {tol}")
        return res

    def conjugate(self, g) -> "Representation":
        """Images ``g^-1 x g``."""
        gi = g.inverse()
        images = {k: gi * x * g for k, x in self.images.items()}
        return Representation(self.genus, self.target, images, self.geometric, self.certified,
                              self.label)

    def to_json(self) -> dict:
        return {"genus": self.genus, "target": self.target,
                "images": {k: self.images[k].to_json() for k in generator_names(self.genus)}}


def representation_from_json(obj: dict) -> Representation:
    from .circle import circle_map_from_json
    from .wreath import wreath_from_json

    target = obj["target"]
    if target == "wreath":
        conv = wreath_from_json
    elif target == "circle":
        conv = circle_map_from_json
    elif target == "sp":
        from .meyer import sp_from_json
        conv = sp_from_json
    else:
        raise ValueError(f"unknown target {target!r}")
    images = {k: conv(v) for k, v in obj["images"].items()}
    return Representation(int(obj["genus"]), target, images,
                          geometric=bool(obj.get("geometric", False)),
                          certified=bool(obj.get("certified", False)))


def evaluate_cocycle_bar(c: Callable, rep: Representation, cycle: FundamentalCycle):
    """``sum sign * c(rep(w), rep(w'))`` over the cycle."""
    if cycle.genus != rep.genus:
        raise DimensionMismatch("cycle and representation have different genus")
    rep.check()
    return sum(s * c(rep.image(w), rep.image(v)) for s, w, v in cycle.simplices)


@dataclass(frozen=True)
class EulerNumberResult:
    value: int
    method: str
    target: str
    n: int
    h: int
    basepoint: Fraction
    geometric: bool = False

    @property
    def bound(self) -> int:
        """``(2g - 2)(2h - 2)`` with ``n = 2g - 2``; also ``|chi(E)|``."""
        return self.n * (2 * self.h - 2)

    @property
    def chi_total(self) -> int:
        return self.bound

    @property
    def signature_interpretation(self) -> int | None:
        # 3 sigma(E) = -e; only meaningful for externally certified geometric data
        if self.geometric and self.value % 3 == 0:
            return -self.value // 3
        return None

    def to_json(self) -> dict:
        return {"e": self.value, "method": self.method, "target": self.target, "n": self.n,
                "h": self.h, "bound": self.bound, "basepoint": _fmt(self.basepoint),
                "signature": self.signature_interpretation}


def _as_wreath(rep: Representation) -> dict:
    if rep.target == "wreath":
        return dict(rep.images)
    if rep.target == "circle":
        return {k: WreathElement(Permutation.identity(1), (m,)) for k, m in rep.images.items()}
    raise ValueError("Euler numbers need a wreath or circle target")


def lifted_relator(rep: Representation, x0=0, perturbation: dict | None = None):
    """Product of the commutators of the generator lifts in the lifted group."""
    images = _as_wreath(rep)
    lifts = {}
    for name, x in images.items():
        s = section(x, x0)
        if perturbation and name in perturbation:
            s = s.shifted(perturbation[name])
        lifts[name] = s
    out = None
    for i in range(1, rep.genus + 1):
        a, b = lifts[f"a{i}"], lifts[f"b{i}"]
        comm = a * b * a.inverse() * b.inverse()
        out = comm if out is None else out * comm
    return out


def evaluate_euler_relator_lift(rep: Representation, x0=0,
                                perturbation: dict | None = None) -> EulerNumberResult:
    """Euler number as the coordinate sum of the lifted relator.

    ``perturbation`` maps generator names to integer vectors added to the
    canonical lifts; the result does not depend on it.
    """
    rep.check()
    v = lifted_relator(rep, x0, perturbation).kernel_vector()
    return EulerNumberResult(rho(v), "relator-lift", rep.target, rep.n, rep.genus,
                             to_fraction(x0), rep.geometric)


def euler_cocycle_for(rep: Representation, x0=0, shifted: bool = False) -> Callable:
    if rep.target == "circle":
        if shifted:
            raise ValueError("the shifted cocycle needs an even number of factors")
        return lambda g, h: classical_euler_cocycle(g, h, x0)
    if shifted:
        return lambda a, b: cocycle(a, b, x0).shifted
    return lambda a, b: raw_cocycle(a, b, x0)


def evaluate_euler_bar(rep: Representation, cycle: FundamentalCycle | None = None, x0=0,
                       shifted: bool = False) -> EulerNumberResult:
    """Bar pairing of the section cocycle with the fundamental cycle.

    The shifted cocycle differs from the raw one by the constant ``n/2``; its
    pairing is corrected by ``(n/2) * sum(signs)`` so both normalizations
    report the same integer.
    """
    cycle = cycle or build_fundamental_cycle(rep.genus)
    value = evaluate_cocycle_bar(euler_cocycle_for(rep, x0, shifted), rep, cycle)
    if shifted:
        value += (rep.n // 2) * cycle.sign_sum
    return EulerNumberResult(value, "bar", rep.target, rep.n, rep.genus, to_fraction(x0),
                             rep.geometric)


@dataclass(frozen=True)
class MilnorWoodVerdict:
    passed: bool
    e: int
    bound: int
    slack: int
    n: int
    h: int
    method: str
    basepoint: Fraction
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": "PASS" if self.passed else "FAIL", "e": self.e, "bound": self.bound,
                "slack": self.slack, "n": self.n, "h": self.h, "method": self.method,
                "basepoint": _fmt(self.basepoint), **self.details}


def milnor_wood_check(result: EulerNumberResult, **details) -> MilnorWoodVerdict:
    """PASS iff ``|e| <= n (2h - 2)``."""
    slack = result.bound - abs(result.value)
    return MilnorWoodVerdict(slack >= 0, result.value, result.bound, slack, result.n, result.h,
                             result.method, result.basepoint, dict(details))
