"""Random objects for sweeps and tests.

Every sampler takes a ``random.Random``; ``sample_rng(seed, index)`` gives
the per-sample stream so any record can be regenerated from its index.

Surface-group representations are built so the relator holds by
construction, using two tricks:

* commuting families: any images that pairwise commute;
* pairing handles: ``a_i, b_i, a_{i+1}, b_{i+1} = x, y, y, x`` gives
  ``[x, y][y, x] = 1`` for arbitrary ``x, y``.

Wreath representations combine a permutation representation with one circle
representation per orbit of the permutation images, which makes the
product a homomorphism.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction

from .circle import MoebiusMap, PLMap, Q, Rotation, compose, identity_map, moebius_rotation
from .fuchsian import fuchsian_representation
from .meyer import SpMatrix, TwistWord, transvection
from .surface import Representation, generator_names
from .wreath import Permutation, WreathElement

MAX_DENOMINATOR = 64
SLOPES = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 2), Fraction(2), Fraction(3))
MAX_TWIST_LETTERS = 12
MAX_CLASS_ENTRY = 2


def sample_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


def random_rational(rng: random.Random, max_den: int = MAX_DENOMINATOR):
    q = rng.randint(1, max_den)
    return Q(rng.randrange(q), q)


def random_rotation(rng: random.Random) -> Rotation:
    return Rotation(random_rational(rng))


def bump_map(s, t, r=0) -> PLMap:
    """Slope ``s`` on ``[r, r + L)`` and ``t`` elsewhere, ``L = (1 - t) / (s - t)``."""
    s, t = Q(s), Q(t)
    length = (1 - t) / (s - t)
    if not 0 < length < 1:
        raise ValueError(f"slopes {s}, {t} cannot close up")
    base = PLMap(((0, 0, s), (length, s * length, t)))
    if r == 0:
        return base
    return compose(compose(Rotation(-Q(r)), base), Rotation(Q(r)))


def random_pl(rng: random.Random):
    """A rotation after a bump: at most four breakpoints, slopes from ``SLOPES``."""
    s = rng.choice([x for x in SLOPES if x > 1])
    t = rng.choice([x for x in SLOPES if x < 1])
    if rng.random() < 0.5:
        s, t = t, s
    return compose(bump_map(s, t, random_rational(rng)), random_rotation(rng))


def random_exact_map(rng: random.Random):
    return random_rotation(rng) if rng.random() < 0.4 else random_pl(rng)


def random_permutation(rng: random.Random, n: int) -> Permutation:
    images = list(range(n))
    rng.shuffle(images)
    return Permutation(tuple(images))


def random_wreath(rng: random.Random, n: int, identity_only: bool = False) -> WreathElement:
    if identity_only:
        return WreathElement.identity(n)
    return WreathElement(random_permutation(rng, n), tuple(random_exact_map(rng) for _ in range(n)))


def _power(x, k: int, one):
    out = one
    step = x if k >= 0 else x.inverse()
    for _ in range(abs(k)):
        out = out * step
    return out


def _pairing_images(genus: int, x, y, commuting: list) -> list:
    """Images for ``a1, b1, ..., ah, bh``: handle pairs get ``x, y, y, x``; an odd handle gets ``commuting``."""
    out = []
    for i in range(genus // 2):
        out += [x, y, y, x]
    if genus % 2:
        out += commuting
    return out


def random_circle_images(rng: random.Random, genus: int, numeric: bool = False) -> tuple:
    """Generator images in Top+(S^1) satisfying the relator, and a label."""
    m = 2 * genus
    if numeric:
        kinds = ["rotation"] + (["pairs", "fuchsian"] if genus >= 2 else [])
        kind = rng.choice(kinds + (["pinch"] if genus == 3 else []))
        rot = lambda: moebius_rotation(rng.random())  # noqa: E731
        if kind == "rotation":
            return [rot() for _ in range(m)], "moebius-rotations"
        if kind == "pairs":
            x = moebius_rotation(rng.random())
            y = _random_moebius(rng)
            return _pairing_images(genus, x, y, [rot(), rot()]), "moebius-pairs"
        if kind == "fuchsian":
            images = fuchsian_representation(genus).generator_list()
        else:
            # pinch the third handle: genus-2 uniformization pulled back by a degree-one map
            images = fuchsian_representation(2).generator_list() + [identity_map(False)] * 2
        if rng.random() < 0.5:
            images = [reflected(x) for x in images]
        g = _random_moebius(rng)
        gi = g.inverse()
        return [gi * x * g for x in images], kind
    kind = rng.choice(["trivial", "rotation", "pl-powers", "pairs", "conjugated"]
                      if genus >= 2 else ["trivial", "rotation", "pl-powers", "conjugated"])
    if kind == "trivial":
        return [identity_map()] * m, kind
    if kind == "rotation":
        return [random_rotation(rng) for _ in range(m)], kind
    if kind == "pl-powers":
        f = random_pl(rng)
        return [_power(f, rng.randint(-2, 2), identity_map()) for _ in range(m)], kind
    if kind == "pairs":
        f = random_pl(rng)
        commuting = [_power(f, rng.randint(-1, 1), identity_map()) for _ in range(2)]
        return _pairing_images(genus, random_exact_map(rng), random_exact_map(rng), commuting), kind
    base, _ = random_circle_images(rng, genus)
    g = random_pl(rng)
    gi = g.inverse()
    return [gi * x * g for x in base], "conjugated"


def reflected(f: MoebiusMap) -> MoebiusMap:
    """Conjugate by ``x -> -x`` on lines; reverses orientation, so Euler numbers flip sign."""
    a, b, c, d = f.matrix
    return MoebiusMap((a, -b, -c, d))


def _random_moebius(rng: random.Random) -> MoebiusMap:
    a = math.exp(rng.uniform(-1, 1))
    b = rng.uniform(-1, 1)
    c = rng.uniform(-1, 1)
    return MoebiusMap((a, b, c, (1 + b * c) / a))


def random_circle_representation(rng: random.Random, genus: int,
                                 numeric: bool = False) -> Representation:
    images, label = random_circle_images(rng, genus, numeric)
    return Representation(genus, "circle", dict(zip(generator_names(genus), images)), label=label)


def random_permutation_images(rng: random.Random, genus: int, n: int) -> list:
    m = 2 * genus
    if genus >= 2 and rng.random() < 0.5:
        p = random_permutation(rng, n)
        return _pairing_images(genus, random_permutation(rng, n), random_permutation(rng, n),
                               [_power(p, rng.randint(0, 2), Permutation.identity(n))
                                for _ in range(2)])
    p = random_permutation(rng, n)
    return [_power(p, rng.randint(0, 3), Permutation.identity(n)) for _ in range(m)]


def _orbits(perms: list, n: int) -> list:
    label = list(range(n))

    def find(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for p in perms:
        for j in range(n):
            a, b = find(j), find(p(j))
            if a != b:
                label[a] = b
    return [find(j) for j in range(n)]


def random_wreath_representation(rng: random.Random, genus: int, n: int,
                                 numeric: bool = False, fuchsian: dict | None = None) -> Representation:
    """Permutation images plus one circle representation per orbit.

    ``fuchsian`` maps an orbit index (in order of first appearance) to a
    numeric circle representation used for that orbit instead of a random one.
    """
    perms = random_permutation_images(rng, genus, n)
    roots = _orbits(perms, n)
    per_orbit = {}
    order = []
    for r in roots:
        if r not in per_orbit:
            k = len(order)
            order.append(r)
            if fuchsian and k in fuchsian:
                per_orbit[r] = fuchsian[k].generator_list()
            else:
                per_orbit[r] = random_circle_images(rng, genus, numeric)[0]
    images = {}
    for idx, name in enumerate(generator_names(genus)):
        maps = tuple(per_orbit[roots[j]][idx] for j in range(n))
        images[name] = WreathElement(perms[idx], maps)
    label = "numeric" if numeric else "exact"
    return Representation(genus, "wreath", images, label=f"wreath-{label}")


def random_class(rng: random.Random, g: int) -> tuple:
    while True:
        c = tuple(rng.randint(-MAX_CLASS_ENTRY, MAX_CLASS_ENTRY) for _ in range(2 * g))
        if any(c):
            return c


def random_twist_word(rng: random.Random, g: int, max_len: int = MAX_TWIST_LETTERS) -> TwistWord:
    letters = tuple((random_class(rng, g), rng.choice((-2, -1, 1, 2)))
                    for _ in range(rng.randint(0, max_len)))
    return TwistWord(g, letters)


def random_sp(rng: random.Random, g: int, max_len: int = MAX_TWIST_LETTERS) -> SpMatrix:
    return random_twist_word(rng, g, max_len).matrix()


def handle_curve(g: int, i: int, beta: bool) -> tuple:
    """Homology class of ``alpha_i`` (``e_i``) or ``beta_i`` (``e_{g+i}``), 0-based handle."""
    c = [0] * (2 * g)
    c[g + i if beta else i] = 1
    return tuple(c)


def disjoint_twist_images(rng: random.Random, g: int, genus: int) -> list:
    """Powers of twists about one curve per fiber handle; the curves are disjoint so all images commute."""
    curves = [handle_curve(g, i, rng.random() < 0.5) for i in range(g)]
    out = []
    for _ in range(2 * genus):
        m = SpMatrix.identity(g)
        for c in curves:
            k = rng.randint(-2, 2)
            if k:
                m = m * transvection(c, k, g)
        out.append(m)
    return out


def random_sp_representation(rng: random.Random, g: int, genus: int,
                             kind: str | None = None) -> Representation:
    """Sp(2g)-valued monodromy; ``certified`` marks images of genuine mapping classes."""
    kinds = ["trivial", "disjoint", "free", "sp-only"] + (["pairs"] if genus >= 2 else [])
    kind = kind or rng.choice(kinds)
    names = generator_names(genus)
    one = SpMatrix.identity(g)
    if kind == "trivial":
        images = [one] * (2 * genus)
    elif kind == "disjoint":
        images = disjoint_twist_images(rng, g, genus)
    elif kind == "free":
        images = []
        for _ in range(genus):
            images += [random_sp(rng, g), one]
    elif kind == "pairs":
        x, y = random_sp(rng, g, 6), random_sp(rng, g, 6)
        images = _pairing_images(genus, x, y, disjoint_twist_images(rng, g, 1))
    elif kind == "sp-only":
        images = [_rational_diagonal(rng, g) for _ in range(2 * genus)]
    else:
        raise ValueError(f"unknown monodromy kind {kind!r}")
    return Representation(genus, "sp", dict(zip(names, images)), certified=kind != "sp-only",
                          label=kind)


def _rational_diagonal(rng: random.Random, g: int) -> SpMatrix:
    ds = [Q(rng.choice((1, 2, 3)), rng.choice((1, 2, 3))) for _ in range(g)]
    rows = []
    for i in range(2 * g):
        d = ds[i] if i < g else 1 / ds[i - g]
        rows.append(tuple(d if j == i else Q(0) for j in range(2 * g)))
    return SpMatrix(tuple(rows), g)

