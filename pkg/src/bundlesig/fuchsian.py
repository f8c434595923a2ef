"""Uniformizing representations of closed surface groups into PSL(2, R).

The regular hyperbolic ``4h``-gon with interior angles ``2 pi / 4h`` tiles
the disk under its side pairings.  Side ``4i + 2`` is paired with side
``4i`` and side ``4i + 3`` with side ``4i + 1``.  The pairings are built in
SU(1, 1) and conjugated into SL(2, R) by the Cayley transform.  The
resulting maps act on the circle of lines in R^2.  Orientation is
normalized so the Euler number is ``-(2h - 2)``.
"""
from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import numpy as np

from .circle import MoebiusMap, RESIDUAL_TOL
from .errors import RelatorViolation
from .surface import Representation, evaluate_euler_relator_lift, generator_names

_CAYLEY = np.array([[1, -1j], [1, 1j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)

# generic rotation keeps fixed points away from the rational basepoints
DEFAULT_PHASE = 0.1234567


def _rot(phi: float) -> np.ndarray:
    return np.array([[np.exp(0.5j * phi), 0], [0, np.exp(-0.5j * phi)]])


def _trans(d: float) -> np.ndarray:
    c, s = math.cosh(d / 2), math.sinh(d / 2)
    return np.array([[c, s], [s, c]], dtype=complex)


def _to_sl2r(m: np.ndarray) -> MoebiusMap:
    h = _CAYLEY_INV @ m @ _CAYLEY
    # h is real up to a unit scalar; fix the phase with the largest entry
    k = np.unravel_index(np.argmax(np.abs(h)), h.shape)
    h = h * (abs(h[k]) / h[k])
    real = h.real
    det = np.linalg.det(real)
    real = real / math.sqrt(det)
    return MoebiusMap(tuple(float(x) for x in real.ravel()))


def side_pairings(genus: int, phase: float = DEFAULT_PHASE, clockwise: bool = False) -> dict:
    """SU(1, 1) matrices for ``a_i``, ``b_i`` mapping side ``4i+2 -> 4i`` and ``4i+3 -> 4i+1``."""
    n = 4 * genus
    inradius = math.acosh(1 / math.tan(math.pi / n))
    sgn = -1 if clockwise else 1

    def mid(j):
        return phase + sgn * (2 * j + 1) * math.pi / n

    def pairing(src, dst):
        return _rot(mid(dst)) @ _trans(2 * inradius) @ _rot(math.pi - mid(src))

    out = {}
    for i in range(genus):
        out[f"a{i + 1}"] = pairing(4 * i + 2, 4 * i)
        out[f"b{i + 1}"] = pairing(4 * i + 3, 4 * i + 1)
    return out


@lru_cache(maxsize=None)
def _convention(genus: int, phase: float) -> tuple:
    best = None
    for clockwise, inv_a, inv_b in product((False, True), repeat=3):
        rep = _build(genus, phase, clockwise, inv_a, inv_b)
        res = rep.residual()
        if best is None or res < best[0]:
            best = (res, clockwise, inv_a, inv_b)
    if best[0] > RESIDUAL_TOL:
        raise RelatorViolation(f"no side-pairing convention closes up (residual {best[0]:.3g})")
    return best[1:]


def _build(genus, phase, clockwise, inv_a, inv_b) -> Representation:
    images = {}
    for name, m in side_pairings(genus, phase, clockwise).items():
        g = _to_sl2r(m)
        if (name[0] == "a" and inv_a) or (name[0] == "b" and inv_b):
            g = g.inverse()
        images[name] = g
    return Representation(genus, "circle", images, geometric=True, label=f"fuchsian-{genus}")


def fuchsian_representation(genus: int, phase: float = DEFAULT_PHASE) -> Representation:
    """Circle-valued uniformizing representation; relator residual below ``1e-6``."""
    if genus < 2:
        raise ValueError("a hyperbolic structure needs genus >= 2")
    rep = _build(genus, phase, *_convention(genus, phase))
    rep.check()
    if evaluate_euler_relator_lift(rep).value > 0:
        images = {}
        for name, g in rep.images.items():
            # conjugation by diag(1, -1) reverses orientation
            a, b, c, d = g.matrix
            images[name] = MoebiusMap((a, -b, -c, d))
        rep = Representation(genus, "circle", images, geometric=True, label=rep.label)
    return rep


def fuchsian_pair(genus: int, phase: float = DEFAULT_PHASE,
                  other_phase: float = 0.3141592) -> Representation:
    """The ``n = 2`` wreath representation with two Fuchsian factors and trivial permutations."""
    from .wreath import Permutation, WreathElement

    first = fuchsian_representation(genus, phase)
    second = fuchsian_representation(genus, other_phase)
    images = {name: WreathElement(Permutation.identity(2), (first.images[name], second.images[name]))
              for name in generator_names(genus)}
    return Representation(genus, "wreath", images, geometric=True, label=f"fuchsian-pair-{genus}")
