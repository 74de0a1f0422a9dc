"""Nerve complexes, simplicial homology, the Cohen-Macaulay criterion and the
regular-sequence verification.

Homology is computed over Q or over a prime field, via exact ranks of
boundary matrices.  The Cohen-Macaulay check is Reisner's: reduced homology
of the complex and of every face link must vanish below the dimension of the
respective complex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from . import linalg
from .errors import PreconditionError
from .polyhedra import DelzantPolyhedron, check_delzant, enumerate_vertices, is_compact


@dataclass(frozen=True)
class NerveComplex:
    """Simplicial complex on facet labels 1..ground, stored by maximal faces.

    The face family is the downward closure; the empty face always belongs.
    """

    ground: int
    maximal: tuple[frozenset[int], ...]

    @property
    def dim(self) -> int:
        return max((len(m) for m in self.maximal), default=0) - 1

    def is_face(self, J) -> bool:
        J = frozenset(J)
        return any(J <= m for m in self.maximal) or not J

    def faces(self) -> set[frozenset[int]]:
        out = {frozenset()}
        for m in self.maximal:
            for k in range(1, len(m) + 1):
                out.update(map(frozenset, itertools.combinations(sorted(m), k)))
        return out

    def faces_by_dim(self) -> list[list[tuple[int, ...]]]:
        """Entry d holds the sorted (d-1)-dimensional faces as sorted tuples,
        so entry 0 is [()] and entry 1 lists the vertices."""
        by_size: list[set] = [set() for _ in range(self.dim + 2)]
        for f in self.faces():
            by_size[len(f)].add(tuple(sorted(f)))
        return [sorted(s) for s in by_size]


def make_complex(ground: int, faces) -> NerveComplex:
    """Normalize an arbitrary face family into maximal-face form."""
    fs = [frozenset(f) for f in faces]
    maximal = [f for f in fs if not any(f < g for g in fs)]
    canon = sorted(set(maximal), key=lambda f: (len(f), sorted(f)))
    return NerveComplex(ground, tuple(canon))


@lru_cache(maxsize=None)
def build_nerve(P: DelzantPolyhedron) -> NerveComplex:
    """Nerve of the facet family: faces are the facet subsets with nonempty
    intersection.

    Because the polyhedron is pointed, every nonempty face of the polyhedron
    contains a vertex, so the nerve is the downward closure of the vertex
    incidence sets.  Requires a passed Delzant check.
    """
    if not enumerate_vertices(P):
        raise PreconditionError("nerve construction needs a vertex")
    if not check_delzant(P).passed:
        raise PreconditionError("nerve construction needs a passed Delzant check")
    return make_complex(P.nfacets, [v.incident for v in enumerate_vertices(P)])


@dataclass(frozen=True)
class HomologyProfile:
    """Reduced Betti numbers in degrees -1 .. dim."""

    dim: int
    ranks: tuple[int, ...]  # ranks[i] is the reduced Betti number in degree i-1

    def betti(self, degree: int) -> int:
        idx = degree + 1
        return self.ranks[idx] if 0 <= idx < len(self.ranks) else 0

    def nonzero(self) -> dict[int, int]:
        return {i - 1: r for i, r in enumerate(self.ranks) if r}


def reduced_homology(K: NerveComplex, p: int | None = None) -> HomologyProfile:
    """Reduced simplicial homology ranks over Q (p None) or over F_p."""
    layers = K.faces_by_dim()
    index = [{f: i for i, f in enumerate(layer)} for layer in layers]
    counts = [len(layer) for layer in layers]

    def boundary_rank(d):
        # rank of the boundary map from (d-1)-dimensional to (d-2)-dimensional
        # faces; d indexes layers by face cardinality.
        if d <= 0 or d >= len(layers) or not layers[d]:
            return 0
        rows = []
        for f in layers[d]:
            row = {}
            for i in range(len(f)):
                sub = f[:i] + f[i + 1:]
                row[index[d - 1][sub]] = (-1) ** i
            rows.append(row)
        return linalg.rank(rows, p)

    branks = [boundary_rank(d) for d in range(len(layers) + 1)]
    ranks = []
    for d in range(len(layers)):
        next_rank = branks[d + 1] if d + 1 < len(branks) else 0
        ranks.append(counts[d] - branks[d] - next_rank)
    return HomologyProfile(K.dim, tuple(ranks))


def link(K: NerveComplex, J) -> NerveComplex:
    """The link of a face: all faces disjoint from J whose union with J is a face."""
    J = frozenset(J)
    if not K.is_face(J):
        raise PreconditionError(f"{sorted(J)} is not a face of the complex")
    return make_complex(K.ground, [m - J for m in K.maximal if J <= m])


@dataclass(frozen=True)
class CMReport:
    passed: bool
    field: str
    witness: str | None = None


def reisner_cm_check(K: NerveComplex, p: int | None = None) -> CMReport:
    """Reisner's criterion: reduced homology of the complex and of every face
    link vanishes in all degrees strictly below the dimension of that complex."""
    field = "Q" if p is None else f"F{p}"
    for face in sorted(K.faces(), key=lambda f: (len(f), sorted(f))):
        L = link(K, face)
        profile = reduced_homology(L, p)
        for degree, rank in profile.nonzero().items():
            if degree < L.dim:
                return CMReport(False, field,
                                f"link of {sorted(face)} has reduced homology of "
                                f"rank {rank} in degree {degree} < dim {L.dim}")
    return CMReport(True, field)


@dataclass(frozen=True)
class ProfileReport:
    compact: bool
    expected: str
    match: bool
    actual: tuple[int, ...]


def sphere_or_ball_profile(P: DelzantPolyhedron, p: int | None = None) -> ProfileReport:
    """Compare the nerve's homology with that of S^(n-1) (compact case) or of
    a point (non-compact case).  Homology-level only: homeomorphism itself is
    not decided."""
    K = build_nerve(P)
    profile = reduced_homology(K, p)
    compact = is_compact(P)
    n = P.dim
    if compact:
        expected = f"S^{n - 1}"
        ok = profile.nonzero() == ({n - 1: 1} if n >= 1 else {-1: 1})
    else:
        expected = f"B^{n - 1}"
        ok = profile.nonzero() == {}
    return ProfileReport(compact, expected, ok, profile.ranks)


def sr_monomials(K: NerveComplex, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``degree`` whose support is a face,
    sorted in graded lexicographic order.  These are the monomial basis of
    the Stanley-Reisner ring in that degree."""
    if degree == 0:
        return [(0,) * K.ground]
    out = []
    for face in sorted(K.faces(), key=lambda f: (len(f), sorted(f))):
        k = len(face)
        if not 1 <= k <= degree:
            continue
        labels = sorted(face)
        # compositions of `degree` into k positive parts
        for cut in itertools.combinations(range(1, degree), k - 1):
            parts = [b - a for a, b in zip((0,) + cut, cut + (degree,))]
            expo = [0] * K.ground
            for lbl, e in zip(labels, parts):
                expo[lbl - 1] = e
            out.append(tuple(expo))
    return sorted(out)


def sr_hilbert_function(P: DelzantPolyhedron, maxdeg: int) -> list[int]:
    """Dimensions of the Stanley-Reisner ring per degree, 0..maxdeg, counted
    face by face: a face with k vertices carries C(d-1, k-1) monomials of
    degree d."""
    if maxdeg < 0:
        raise PreconditionError("maxdeg must be non-negative")
    K = build_nerve(P)
    sizes = sorted(len(f) for f in K.faces() if f)
    values = [1]
    for d in range(1, maxdeg + 1):
        values.append(sum(comb(d - 1, k - 1) for k in sizes))
    return values


@dataclass(frozen=True)
class RegSeqReport:
    passed: bool
    field: str
    quotient_dims: tuple[int, ...]
    expected_dims: tuple[int, ...]


def regular_sequence_check(P: DelzantPolyhedron, p: int | None = None,
                           maxdeg: int | None = None) -> RegSeqReport:
    """Verify that the n linear combinations c_i = sum_j nu_j[i] Z_j cut the
    Stanley-Reisner ring by a regular sequence, via Hilbert functions.

    For each degree d the quotient of the degree-d slice by the images
    c_i * (degree d-1 slice) must have dimension equal to the d-th
    coefficient of (1-t)^n * H_SR(t).
    """
    if maxdeg is None:
        maxdeg = P.dim + 2
    if maxdeg < P.dim:
        raise PreconditionError(f"maxdeg must be at least the dimension {P.dim}")
    K = build_nerve(P)
    n, N = P.dim, P.nfacets
    hilbert = sr_hilbert_function(P, maxdeg)
    expected = []
    for d in range(maxdeg + 1):
        expected.append(sum((-1) ** k * comb(n, k) * hilbert[d - k]
                            for k in range(0, min(d, n) + 1)))

    dims = [1]
    prev = sr_monomials(K, 0)
    for d in range(1, maxdeg + 1):
        cur = sr_monomials(K, d)
        index = {m: i for i, m in enumerate(cur)}
        rows = []
        for m in prev:
            for i in range(n):
                row: dict[int, Fraction | int] = {}
                for j in range(N):
                    coeff = P.normals[j][i]
                    if coeff == 0:
                        continue
                    bumped = m[:j] + (m[j] + 1,) + m[j + 1:]
                    col = index.get(bumped)
                    if col is not None:
                        row[col] = row.get(col, 0) + coeff
                if row:
                    rows.append(row)
        dims.append(len(cur) - linalg.rank(rows, p))
        prev = cur
    field = "Q" if p is None else f"F{p}"
    return RegSeqReport(tuple(dims) == tuple(expected), field,
                        tuple(dims), tuple(expected))
