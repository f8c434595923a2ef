"""Finite simplicial branched coverings and the transfer on rational cochains.

Simplices are sorted vertex tuples; an oriented simplex is taken with the
increasing vertex order.  A k-cochain is a dict from k-simplices to
rationals, with missing keys meaning zero.

The covering test follows the unfolded definition: a branch subcomplex
``X1`` of codimension 2 whose image pulls back to itself, a constant fiber
count ``m`` off the branch image, and a connectivity proxy for the
neighbourhood condition at branch image points.  For a point in the open
simplex ``tau`` the small open neighbourhoods are open stars of ``tau``; the
punctured star is connected iff the simplices strictly containing ``tau``
and not in the branch image form a connected graph under the face relation.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import networkx as nx

from .circle import Q
from .errors import (DegenerateMap, InternalConsistency, NotHomogeneous, NotOrientable,
                     NotSurjective, NotValidated)

PROXY_LABEL = "combinatorial punctured-star connectivity (proxy for the neighbourhood condition)"


def _faces(simplex: tuple) -> Iterable[tuple]:
    for k in range(1, len(simplex) + 1):
        yield from itertools.combinations(simplex, k)


class SimplicialComplex:
    """Closure of the given simplices under taking faces."""

    def __init__(self, simplices: Iterable[Iterable[int]]):
        closed = set()
        for s in simplices:
            s = tuple(sorted(set(int(v) for v in s)))
            if s:
                closed.update(_faces(s))
        self.simplices = frozenset(closed)
        self.by_dim: dict = {}
        for s in sorted(self.simplices):
            self.by_dim.setdefault(len(s) - 1, []).append(s)
        self.dim = max(self.by_dim) if self.by_dim else -1
        self.vertices = sorted(v for (v,) in self.by_dim.get(0, []))

    def __contains__(self, simplex) -> bool:
        return tuple(sorted(simplex)) in self.simplices

    def __len__(self):
        return len(self.simplices)

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.simplices == other.simplices

    def __hash__(self):
        return hash(self.simplices)

    def simplices_of_dim(self, k: int) -> list:
        return list(self.by_dim.get(k, []))

    def top_simplices(self) -> list:
        return self.simplices_of_dim(self.dim)

    def is_homogeneous(self) -> bool:
        tops = self.top_simplices()
        covered = set()
        for t in tops:
            covered.update(_faces(t))
        return covered == set(self.simplices)

    def cofaces(self, simplex: tuple) -> list:
        """Simplices strictly containing ``simplex``."""
        s = set(simplex)
        return [t for t in self.simplices if len(t) > len(simplex) and s.issubset(t)]

    def is_connected(self) -> bool:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.simplices_of_dim(1))
        return len(self.vertices) > 0 and nx.is_connected(g)


def boundary(chain: Mapping, k: int) -> dict:
    """Boundary of a k-chain (dict from k-simplices to coefficients)."""
    out: dict = {}
    for s, c in chain.items():
        if c == 0:
            continue
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            out[face] = out.get(face, 0) + (-1) ** i * c
    return {f: c for f, c in out.items() if c != 0}


def coboundary(K: SimplicialComplex, c: Mapping, k: int) -> dict:
    """``(dc)(s) = sum_i (-1)^i c(s minus vertex i)`` on (k+1)-simplices."""
    out = {}
    for s in K.simplices_of_dim(k + 1):
        val = sum(((-1) ** i * c.get(s[:i] + s[i + 1:], 0) for i in range(len(s))), Q(0))
        if val != 0:
            out[s] = val
    return out


def _parity(seq: tuple) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass
class SimplicialMap:
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: dict

    def __post_init__(self):
        self.vertex_map = {int(k): int(v) for k, v in self.vertex_map.items()}
        missing = set(self.source.vertices) - set(self.vertex_map)
        if missing:
            raise ValueError(f"vertex map misses {sorted(missing)}")
        for s in self.source.simplices:
            if self.image(s) not in self.target:
                raise ValueError(f"simplex {s} maps to {self.image(s)}, not a target simplex")

    def image(self, simplex: tuple) -> tuple:
        return tuple(sorted({self.vertex_map[v] for v in simplex}))

    def is_degenerate_on(self, simplex: tuple) -> bool:
        return len(self.image(simplex)) < len(simplex)

    def is_nondegenerate(self) -> bool:
        return not any(self.is_degenerate_on(s) for s in self.source.simplices)

    def orientation_sign(self, simplex: tuple) -> int:
        """+1 if the vertex images of ``simplex`` are already increasing."""
        if self.is_degenerate_on(simplex):
            return 0
        return _parity(tuple(self.vertex_map[v] for v in simplex))

    def preimages(self, simplex: tuple) -> list:
        t = tuple(sorted(simplex))
        return [s for s in self.source.simplices_of_dim(len(t) - 1) if self.image(s) == t]

    def image_complex(self, sub: SimplicialComplex) -> SimplicialComplex:
        return SimplicialComplex(self.image(s) for s in sub.simplices)


def local_degree(phi: SimplicialMap, simplex) -> int:
    """Largest fiber of ``phi`` restricted to the open star of ``simplex``.

    A point in the open simplex ``r`` of the star has one preimage per
    simplex ``r'`` of the star with the same image, so the count is
    combinatorial.
    """
    s = (simplex,) if isinstance(simplex, int) else tuple(sorted(simplex))
    if not phi.is_nondegenerate():
        raise DegenerateMap("local degree needs a non-degenerate map")
    star = [s] + phi.source.cofaces(s)
    best = 0
    for r in star:
        img = phi.image(r)
        best = max(best, sum(1 for r2 in star if phi.image(r2) == img))
    return best


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    local_degrees: dict
    branch: SimplicialComplex
    fiber_sums: dict

    def summation_holds(self) -> bool:
        return all(v == self.degree for v in self.fiber_sums.values())


@dataclass
class ValidationReport:
    valid: bool
    degree: int | None
    diagnostics: list = field(default_factory=list)
    proxy: str = PROXY_LABEL
    covering: "BranchedCovering | None" = None

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class BranchedCovering:
    """A simplicial map that passed ``validate_unfolded``; build it only through that function."""

    map: SimplicialMap
    branch: SimplicialComplex
    degree: int

    @property
    def source(self) -> SimplicialComplex:
        return self.map.source

    @property
    def target(self) -> SimplicialComplex:
        return self.map.target


def validate_unfolded(phi: SimplicialMap, branch: Iterable = ()) -> ValidationReport:
    X, Y = phi.source, phi.target
    if not (X.is_homogeneous() and Y.is_homogeneous()):
        raise NotHomogeneous("source and target must be of homogeneous dimension")
    if X.dim != Y.dim:
        raise NotHomogeneous(f"dimensions differ: {X.dim} vs {Y.dim}")
    images = {phi.image(s) for s in X.simplices}
    if images != set(Y.simplices):
        raise NotSurjective(f"{len(set(Y.simplices) - images)} target simplices are not hit")
    if not phi.is_nondegenerate():
        raise DegenerateMap("the map collapses a simplex")

    X1 = SimplicialComplex(branch)
    diag = []
    if not set(X1.simplices) <= set(X.simplices):
        diag.append("branch set is not a subcomplex of the source")
        return ValidationReport(False, None, diag)
    Y1 = phi.image_complex(X1)
    n = X.dim
    if X1.dim > n - 2:
        diag.append(f"branch set has dimension {X1.dim}, codimension 2 needs <= {n - 2}")
    if not (X.is_connected() and Y.is_connected()):
        diag.append("source and target must be connected")

    pulled = {s for s in X.simplices if phi.image(s) in Y1.simplices}
    if pulled != set(X1.simplices):
        diag.append("preimage of the branch image is larger than the branch set")

    counts = {t: len(phi.preimages(t)) for t in Y.simplices if t not in Y1.simplices}
    degree = counts[Y.top_simplices()[0]] if Y.top_simplices()[0] in counts else None
    uneven = sorted(t for t, c in counts.items() if c != degree)
    if degree is None or uneven:
        diag.append(f"fiber count is not constant off the branch image: {uneven[:5]}")

    for tau in Y1.simplices:
        cells = [r for r in Y.cofaces(tau) if r not in Y1.simplices]
        g = nx.Graph()
        g.add_nodes_from(cells)
        g.add_edges_from((r, q) for r in cells for q in cells
                         if len(r) < len(q) and set(r) <= set(q))
        if not cells or not nx.is_connected(g):
            diag.append(f"punctured star of {tau} is disconnected")

    if diag:
        return ValidationReport(False, degree, diag)
    cov = BranchedCovering(phi, X1, degree)
    return ValidationReport(True, degree, ["valid"], covering=cov)


def degree_report(cov: BranchedCovering) -> DegreeReport:
    phi = cov.map
    lds = {s: local_degree(phi, s) for s in cov.source.simplices}
    sums = {t: sum(lds[s] for s in phi.preimages(t)) for t in cov.target.simplices}
    return DegreeReport(cov.degree, lds, cov.branch, sums)


def _require(cov) -> BranchedCovering:
    if not isinstance(cov, BranchedCovering):
        raise NotValidated("run validate_unfolded first and pass its covering")
    return cov


def pullback(phi, c: Mapping, k: int) -> dict:
    """``(phi^* c)(s) = sign * c(phi(s))``; zero on collapsed simplices."""
    m = phi.map if isinstance(phi, BranchedCovering) else phi
    out = {}
    for s in m.source.simplices_of_dim(k):
        sign = m.orientation_sign(s)
        val = sign * c.get(m.image(s), 0)
        if val != 0:
            out[s] = Q(val)
    return out


def transfer(cov: BranchedCovering, c: Mapping, k: int) -> dict:
    """Fiber sum ``tau(c)(t) = sum over s -> t of localdeg(s) * sign * c(s)``."""
    cov = _require(cov)
    phi = cov.map
    out = {}
    for t in cov.target.simplices_of_dim(k):
        val = Q(0)
        for s in phi.preimages(t):
            val += local_degree(phi, s) * phi.orientation_sign(s) * c.get(s, 0)
        if val != 0:
            out[t] = val
    return out


def orient(K: SimplicialComplex) -> dict:
    """A coherent orientation of a closed pseudomanifold as signs on top simplices."""
    n = K.dim
    tops = K.top_simplices()
    if not tops:
        raise NotOrientable("empty complex")
    around: dict = {}
    for t in tops:
        for i in range(len(t)):
            around.setdefault(t[:i] + t[i + 1:], []).append((t, (-1) ** i))
    if any(len(v) != 2 for v in around.values()):
        raise NotOrientable("some codimension-1 face does not lie in exactly two top simplices")
    signs = {tops[0]: 1}
    stack = [tops[0]]
    while stack:
        t = stack.pop()
        for i in range(n + 1):
            face = t[:i] + t[i + 1:]
            for u, eps in around[face]:
                if u == t:
                    continue
                # boundary contributions cancel: signs[t] (-1)^i + signs[u] eps = 0
                want = -signs[t] * (-1) ** i * eps
                if u not in signs:
                    signs[u] = want
                    stack.append(u)
                elif signs[u] != want:
                    raise NotOrientable("no coherent orientation")
    if len(signs) != len(tops):
        raise NotOrientable("complex is not connected through codimension-1 faces")
    return signs


def fundamental_cycle_of_cover(cov: BranchedCovering, orientation: Mapping | None = None) -> dict:
    """Top simplices of the source with orientations pulled back from the target."""
    cov = _require(cov)
    orientation = orientation or orient(cov.target)
    phi = cov.map
    chain = {s: phi.orientation_sign(s) * orientation[phi.image(s)]
             for s in cov.source.top_simplices()}
    if boundary(chain, cov.source.dim):
        raise InternalConsistency("pulled-back orientation chain has nonzero boundary")
    return chain


def parse_cover(text: str) -> dict:
    """Read the keyword-section format.

    Scalar lines are ``name <str>`` and ``degree <int>``.  Sections
    ``source``, ``target``, ``map`` and ``branch`` run until ``end``; each
    line of a complex section lists one simplex's vertices, each ``map`` line
    is ``<source vertex> <target vertex>``.  ``#`` starts a comment.
    """
    out: dict = {"name": None, "degree": None, "source": [], "target": [], "map": {},
                 "branch": []}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if section is None:
            key = words[0]
            if key in ("source", "target", "map", "branch") and len(words) == 1:
                section = key
            elif key == "name" and len(words) == 2:
                out["name"] = words[1]
            elif key == "degree" and len(words) == 2:
                out["degree"] = int(words[1])
            else:
                raise ValueError(f"line {lineno}: unexpected {line!r}")
        elif words == ["end"]:
            section = None
        elif section == "map":
            if len(words) != 2:
                raise ValueError(f"line {lineno}: map lines need two vertices")
            out["map"][int(words[0])] = int(words[1])
        else:
            out[section].append(tuple(int(w) for w in words))
    if section is not None:
        raise ValueError(f"section {section!r} is not closed by 'end'")
    if not out["source"] or not out["target"]:
        raise ValueError("source and target sections are required")
    return out


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    map: SimplicialMap
    branch: tuple
    expected_degree: int | None
    path: str


def load_cover(path) -> CorpusEntry:
    path = Path(path)
    data = parse_cover(path.read_text())
    phi = SimplicialMap(SimplicialComplex(data["source"]), SimplicialComplex(data["target"]),
                        data["map"])
    return CorpusEntry(data["name"] or path.stem, phi, tuple(data["branch"]), data["degree"],
                       str(path))


def default_corpus_dir() -> Path:
    env = os.environ.get("BUNDLESIG_CORPUS")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "corpus"


def load_corpus(path=None) -> list:
    root = Path(path) if path is not None else default_corpus_dir()
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory {root} does not exist")
    return [load_cover(p) for p in sorted(root.glob("*.cover"))]
