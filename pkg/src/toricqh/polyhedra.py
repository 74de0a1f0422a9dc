"""Delzant polyhedra: construction, vertex enumeration, structural checks.

A polyhedron is the set {x : <x, nu_j> >= -lambda_j} with primitive integer
normals nu_j and positive rational offsets lambda_j.  Facets carry 1-based
labels throughout the public API (label j corresponds to index j-1 in the
``normals``/``offsets`` tuples).

Positivity of every offset makes the origin an interior point, so the
feasible set is always nonempty and full-dimensional; irredundancy of each
inequality is verified exactly at construction time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import linalg, lp
from .errors import PreconditionError, SchemaError


@dataclass(frozen=True)
class Vertex:
    point: tuple[Fraction, ...]
    incident: frozenset[int]  # 1-based facet labels active at the point


@dataclass(frozen=True)
class DelzantPolyhedron:
    dim: int
    normals: tuple[tuple[int, ...], ...]
    offsets: tuple[Fraction, ...]

    @property
    def nfacets(self) -> int:
        return len(self.normals)

    def normal(self, label: int) -> tuple[int, ...]:
        return self.normals[label - 1]

    def offset(self, label: int) -> Fraction:
        return self.offsets[label - 1]

    def inequalities(self):
        """Pairs (nu_j, -lambda_j) for the LP helpers."""
        return [(list(nu), -lam) for nu, lam in zip(self.normals, self.offsets)]


def polyhedron(dim: int, facets) -> DelzantPolyhedron:
    """Validate raw facet data and build a polyhedron.

    ``facets`` is an iterable of (normal, offset) pairs.  Raises SchemaError
    on any type-level invariant violation: non-primitive or zero normals,
    non-positive offsets, or a redundant inequality.
    """
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"dimension must be a positive integer, got {dim!r}")
    normals = []
    offsets = []
    for k, (nu, lam) in enumerate(facets, start=1):
        nu = tuple(nu)
        if len(nu) != dim or not all(isinstance(x, int) for x in nu):
            raise SchemaError(f"facet {k}: normal must be {dim} integers, got {nu!r}")
        g = 0
        for x in nu:
            g = gcd(g, x)
        if g != 1:
            raise SchemaError(f"facet {k}: normal {nu} is not primitive (gcd {g})")
        lam = Fraction(lam)
        if lam <= 0:
            raise SchemaError(f"facet {k}: offset must be positive, got {lam}")
        normals.append(nu)
        offsets.append(lam)
    if not normals:
        raise SchemaError("a polyhedron needs at least one facet")
    P = DelzantPolyhedron(dim, tuple(normals), tuple(offsets))
    _check_irredundant(P)
    return P


def _check_irredundant(P: DelzantPolyhedron) -> None:
    ineqs = P.inequalities()
    for j in range(P.nfacets):
        others = ineqs[:j] + ineqs[j + 1:]
        status, value = lp.minimize(list(P.normals[j]), others, [], P.dim)
        # P contains the origin, so the reduced system is never infeasible.
        if status == lp.OPTIMAL and value >= -P.offsets[j]:
            raise SchemaError(f"facet {j + 1} is redundant: dropping it does not "
                              f"change the polyhedron")


def parse_polyhedron(obj) -> DelzantPolyhedron:
    """Build a polyhedron from the JSON input schema.

    Expected shape: {"dim": n, "facets": [{"normal": [int...], "offset": "p/q"}...]}.
    Offsets must be exact: integers or fraction strings, never floats.
    """
    if not isinstance(obj, dict):
        raise SchemaError("top-level value must be an object")
    if "dim" not in obj or "facets" not in obj:
        raise SchemaError('missing required keys "dim" and "facets"')
    dim = obj["dim"]
    if not isinstance(dim, int):
        raise SchemaError(f'"dim" must be an integer, got {dim!r}')
    facets = []
    if not isinstance(obj["facets"], list):
        raise SchemaError('"facets" must be a list')
    for k, f in enumerate(obj["facets"], start=1):
        if not isinstance(f, dict) or "normal" not in f or "offset" not in f:
            raise SchemaError(f'facet {k}: expected {{"normal": ..., "offset": ...}}')
        off = f["offset"]
        if isinstance(off, float):
            raise SchemaError(f"facet {k}: offsets must be exact "
                              f"(int or fraction string), got float {off}")
        try:
            lam = Fraction(off)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise SchemaError(f"facet {k}: bad offset {off!r}: {exc}") from exc
        normal = f["normal"]
        if not isinstance(normal, list) or not all(isinstance(x, int) for x in normal):
            raise SchemaError(f"facet {k}: normal must be a list of integers")
        facets.append((normal, lam))
    return polyhedron(dim, facets)


def polyhedron_to_json(P: DelzantPolyhedron) -> dict:
    return {
        "dim": P.dim,
        "facets": [{"normal": list(nu), "offset": str(lam)}
                   for nu, lam in zip(P.normals, P.offsets)],
    }


@lru_cache(maxsize=None)
def enumerate_vertices(P: DelzantPolyhedron) -> tuple[Vertex, ...]:
    """All vertices, each listed once, sorted by coordinates.

    Solves the equality system of every dim-subset of facets whose normal
    submatrix is invertible and keeps solutions satisfying the remaining
    inequalities.  Incident sets are recomputed from scratch at each point,
    so degenerate (non-simple) vertices report every active facet.
    """
    n, N = P.dim, P.nfacets
    points = set()
    for subset in itertools.combinations(range(N), n):
        A = [list(P.normals[j]) for j in subset]
        if linalg.determinant(A) == 0:
            continue
        b = [-P.offsets[j] for j in subset]
        x = linalg.solve_rational(A, b)
        assert x is not None
        if all(_pairing(P.normals[j], x) >= -P.offsets[j] for j in range(N)):
            points.add(tuple(x))
    vertices = []
    for pt in sorted(points):
        active = frozenset(j + 1 for j in range(N)
                           if _pairing(P.normals[j], pt) == -P.offsets[j])
        vertices.append(Vertex(pt, active))
    return tuple(vertices)


def _pairing(nu, x):
    return sum(a * b for a, b in zip(nu, x))


@dataclass(frozen=True)
class DelzantReport:
    passed: bool
    violations: tuple[str, ...]


def check_delzant(P: DelzantPolyhedron) -> DelzantReport:
    """Delzant condition at every vertex: exactly dim incident facets whose
    normals have determinant +-1.  Never raises; returns a structured report.
    """
    violations = []
    for v in enumerate_vertices(P):
        labels = sorted(v.incident)
        if len(labels) != P.dim:
            violations.append(f"vertex {_fmt_point(v.point)}: {len(labels)} facets "
                              f"meet (expected {P.dim})")
            continue
        det = linalg.determinant([list(P.normal(j)) for j in labels])
        if det not in (1, -1):
            violations.append(f"vertex {_fmt_point(v.point)}: normal determinant "
                              f"{det} is not a unit")
    return DelzantReport(not violations, tuple(violations))


def _fmt_point(pt) -> str:
    return "(" + ", ".join(str(x) for x in pt) + ")"


@dataclass(frozen=True)
class SplittingReport:
    has_vertex: bool
    split_rank: int
    annihilator_basis: tuple[tuple[int, ...], ...]


def check_vertex_and_splitting(P: DelzantPolyhedron) -> SplittingReport:
    """Vertex existence and the torus factor split off when there is none.

    split_rank k is dim minus the rank of the normal matrix; when k > 0 the
    polyhedron is a product of an affine R^k (direction lattice reported as
    the annihilator basis) with a lower-dimensional one that has a vertex.
    """
    M = [list(nu) for nu in P.normals]
    k = P.dim - linalg.rank(M)
    basis = tuple(tuple(row) for row in linalg.integer_kernel(M)) if k else ()
    assert len(basis) == k
    return SplittingReport(k == 0, k, basis)


@lru_cache(maxsize=None)
def is_compact(P: DelzantPolyhedron) -> bool:
    """True iff the recession cone {x : <x, nu_j> >= 0 for all j} is {0}."""
    recession = [(list(nu), 0) for nu in P.normals]
    for i in range(P.dim):
        for sign in (1, -1):
            pin = [0] * P.dim
            pin[i] = sign
            if lp.feasible(recession, [(pin, 1)], P.dim):
                return False
    return True


def facet_intersection_nonempty(P: DelzantPolyhedron, labels) -> bool:
    """Exact LP feasibility of the face where the given facets are active."""
    labels = set(labels)
    if not labels:
        raise PreconditionError("facet subset must be nonempty")
    if not labels <= set(range(1, P.nfacets + 1)):
        raise PreconditionError(f"unknown facet labels in {sorted(labels)}")
    eqs = [(list(P.normal(j)), -P.offset(j)) for j in sorted(labels)]
    return lp.feasible(P.inequalities(), eqs, P.dim)


@lru_cache(maxsize=None)
def minimal_nonfaces(P: DelzantPolyhedron) -> tuple[tuple[int, ...], ...]:
    """Inclusion-minimal facet subsets with empty common intersection.

    Breadth-first over subset sizes; a size-k candidate is only tested when
    all of its (k-1)-subsets intersect, which prunes everything that already
    contains a smaller nonface.
    """
    N = P.nfacets
    faces_prev = {frozenset()}
    result = []
    for k in range(1, N + 1):
        faces_here = set()
        for J in itertools.combinations(range(1, N + 1), k):
            S = frozenset(J)
            if not all(S - {j} in faces_prev for j in S):
                continue
            if facet_intersection_nonempty(P, S):
                faces_here.add(S)
            else:
                result.append(J)
        if not faces_here:
            break
        faces_prev = faces_here
    return tuple(result)


@dataclass(frozen=True)
class MonotoneNormalization:
    translation: tuple[Fraction, ...]  # b with lambda_j = lambda + <b, nu_j>
    offset: Fraction                   # the common offset lambda after translating
    rescaled: DelzantPolyhedron        # translated polyhedron, offsets scaled to 1


def monotone_normalization(P: DelzantPolyhedron) -> MonotoneNormalization | None:
    """Solve lambda_j = lambda + <b, nu_j>; None when the system has no
    solution with lambda > 0.

    On success returns the translate of P by b with all offsets equal,
    rescaled so the common offset is 1 (the scale is recorded in ``offset``).
    """
    A = [[1] + list(nu) for nu in P.normals]
    b = list(P.offsets)
    x = linalg.solve_rational(A, b)
    if x is not None and x[0] <= 0:
        # Underdetermined systems (e.g. C^n) admit a family; pin lambda = 1.
        x = linalg.solve_rational(A + [[1] + [0] * P.dim], b + [Fraction(1)])
    if x is None or x[0] <= 0:
        return None
    lam = x[0]
    translation = tuple(x[1:])
    rescaled = DelzantPolyhedron(P.dim, P.normals, (Fraction(1),) * P.nfacets)
    return MonotoneNormalization(translation, lam, rescaled)
