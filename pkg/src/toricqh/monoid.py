"""The disc-area cone, height filtration, and filtered monoid-ring arithmetic.

A cone element is a pair ``(lam, nu)`` with ``lam`` rational and ``nu`` an
integer vector: a point of Q (+) Z^n which may or may not lie in the cone
spanned by the facet data (lambda_j, nu_j) together with (1, 0).  Membership,
heights and canonical intersecting-sum decompositions live on a
:class:`ConeMonoid` bound to a fixed polyhedron; monomials certified by a
decomposition support exact ring arithmetic through
:class:`FilteredElement`.

Monomial identity is the pair (lam, nu), never the exponent vector that
happens to express it: two products of generators landing on the same cone
point are the same monomial, which is precisely how quantum Stanley-Reisner
relations arise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import linalg, lp
from .errors import LatticeError, PreconditionError, SchemaError
from .polyhedra import DelzantPolyhedron, Vertex, enumerate_vertices


def _lam_nu(c):
    if isinstance(c, Monomial):
        return c.lam, c.nu
    lam, nu = c
    return Fraction(lam), tuple(nu)


def theta(v: Vertex, c) -> Fraction:
    """The linear functional lam + <v, nu> attached to a vertex."""
    lam, nu = _lam_nu(c)
    return lam + sum(a * b for a, b in zip(v.point, nu))


@dataclass(frozen=True)
class Monomial:
    """A cone element certified to lie in the integral monoid, with its
    canonical decomposition height * (1,0) + sum_j exponents[j] * (lam_j, nu_j)
    cached at construction."""

    lam: Fraction
    nu: tuple[int, ...]
    height: Fraction = field(compare=False)
    exponents: tuple[int, ...] = field(compare=False)
    monoid: "ConeMonoid" = field(compare=False, repr=False)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(j + 1 for j, t in enumerate(self.exponents) if t)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return self.monoid.monomial(self.lam + other.lam,
                                    tuple(a + b for a, b in zip(self.nu, other.nu)))

    def __str__(self) -> str:
        return format_monomial(self.height, self.exponents)


def format_monomial(height, exponents) -> str:
    parts = []
    if height:
        parts.append("T" if height == 1 else
                     f"T^{height}" if height.denominator == 1 else f"T^({height})")
    for j, t in enumerate(exponents, start=1):
        if t == 1:
            parts.append(f"v{j}")
        elif t:
            parts.append(f"v{j}^{t}")
    return "*".join(parts) if parts else "1"


class ConeMonoid:
    """Cone membership, heights and decompositions for one polyhedron."""

    def __init__(self, P: DelzantPolyhedron):
        self.P = P
        self.vertices = enumerate_vertices(P)
        if not self.vertices:
            raise PreconditionError("polyhedron has no vertex; the cone machinery "
                                    "needs the standing vertex assumption")
        self._monomials: dict[tuple[Fraction, tuple[int, ...]], Monomial] = {}

    def thetas(self, c) -> list[Fraction]:
        return [theta(v, c) for v in self.vertices]

    def contains(self, c) -> bool:
        """Membership in the cone: all theta_v non-negative and nu a
        non-negative rational combination of the facet normals."""
        lam, nu = _lam_nu(c)
        if any(t < 0 for t in self.thetas((lam, nu))):
            return False
        return lp.nonnegative_combination_exists(
            [list(n) for n in self.P.normals], list(nu))

    def height(self, c) -> Fraction:
        s, _ = self.decompose(c)
        return s

    def decompose(self, c) -> tuple[Fraction, tuple[int, ...]]:
        """Canonical intersecting sum (s, t): s is the height, the support of
        t meets in a common face, and the reconstruction is exact.

        A successful expression is itself a membership certificate, so the
        cone-membership LP only runs on the error path, to tell apart
        "outside the cone" from a lattice failure (non-Delzant input).
        """
        lam, nu = _lam_nu(c)
        ths = self.thetas((lam, nu))
        if any(t < 0 for t in ths):
            raise PreconditionError(f"({lam}, {nu}) is not in the cone")
        s = min(ths)
        v = self.vertices[ths.index(s)]
        t = self._express_at_vertex(v, nu)
        if t is None:
            if self.contains((lam, nu)):
                raise LatticeError(
                    f"no non-negative integral expression of {nu} in the normals "
                    f"incident to vertex {v.point}; the input is not Delzant")
            raise PreconditionError(f"({lam}, {nu}) is not in the cone")
        assert lam - s == sum(ti * lamj for ti, lamj in zip(t, self.P.offsets))
        return s, t

    def _express_at_vertex(self, v: Vertex, nu) -> tuple[int, ...] | None:
        labels = sorted(v.incident)
        cols = [self.P.normal(j) for j in labels]
        if len(labels) > self.P.dim:
            for sub in itertools.combinations(range(len(labels)), self.P.dim):
                if linalg.determinant([list(cols[i]) for i in sub]) != 0:
                    labels = [labels[i] for i in sub]
                    cols = [self.P.normal(j) for j in labels]
                    break
        A = [[col[i] for col in cols] for i in range(self.P.dim)]
        sol = linalg.solve_rational(A, list(nu))
        if sol is None or any(x.denominator != 1 or x < 0 for x in sol):
            return None
        t = [0] * self.P.nfacets
        for x, j in zip(sol, labels):
            t[j - 1] = int(x)
        return tuple(t)

    def monomial(self, lam, nu) -> Monomial:
        lam, nu = _lam_nu((lam, nu))
        m = self._monomials.get((lam, nu))
        if m is None:
            s, t = self.decompose((lam, nu))
            m = Monomial(lam, nu, s, t, self)
            self._monomials[(lam, nu)] = m
        return m

    def generator(self, j: int) -> Monomial:
        """The distinguished monomial v_j carrying (lambda_j, nu_j)."""
        return self.monomial(self.P.offset(j), self.P.normal(j))

    def generators(self) -> list[Monomial]:
        return [self.generator(j) for j in range(1, self.P.nfacets + 1)]

    def one(self) -> Monomial:
        return self.monomial(0, (0,) * self.P.dim)

    def t_power(self, q) -> Monomial:
        q = Fraction(q)
        if q < 0:
            raise PreconditionError("negative T-exponents are outside the monoid")
        return self.monomial(q, (0,) * self.P.dim)

    def from_exponents(self, t, height=0) -> Monomial:
        lam = Fraction(height) + sum(Fraction(ti) * lamj
                                     for ti, lamj in zip(t, self.P.offsets))
        nu = tuple(sum(ti * nuj[i] for ti, nuj in zip(t, self.P.normals))
                   for i in range(self.P.dim))
        return self.monomial(lam, nu)

    def zero(self) -> "FilteredElement":
        return FilteredElement(self, {})

    def element(self, terms) -> "FilteredElement":
        """Build a filtered element from {monomial: coefficient}."""
        return FilteredElement(self, {m: Fraction(c) for m, c in terms.items() if c})


@lru_cache(maxsize=None)
def monoid_for(P: DelzantPolyhedron) -> ConeMonoid:
    return ConeMonoid(P)


class FilteredElement:
    """Finite sum of rational coefficients times monomials of one monoid."""

    __slots__ = ("monoid", "terms")

    def __init__(self, monoid: ConeMonoid, terms: dict[Monomial, Fraction]):
        self.monoid = monoid
        self.terms = terms

    def is_zero(self) -> bool:
        return not self.terms

    def height(self) -> Fraction | None:
        """Minimum height over the support; None for the zero element (the
        paper's convention would be +infinity)."""
        return min((m.height for m in self.terms), default=None)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0].height, kv[0].nu))

    def __add__(self, other):
        if not isinstance(other, FilteredElement):
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            c = terms.get(m, 0) + c
            if c:
                terms[m] = c
            else:
                terms.pop(m, None)
        return FilteredElement(self.monoid, terms)

    def __neg__(self):
        return FilteredElement(self.monoid, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.monoid.zero()
            return FilteredElement(self.monoid,
                                   {m: c * other for m, c in self.terms.items()})
        if isinstance(other, Monomial):
            other = FilteredElement(self.monoid, {other: Fraction(1)})
        if not isinstance(other, FilteredElement):
            return NotImplemented
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                c = terms.get(m, 0) + c1 * c2
                if c:
                    terms[m] = c
                else:
                    terms.pop(m, None)
        return FilteredElement(self.monoid, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, FilteredElement) and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            if c == 1:
                parts.append(str(m))
            elif c == -1:
                parts.append(f"-{m}")
            else:
                parts.append(f"{c}*{m}")
        return " + ".join(parts).replace("+ -", "- ")


def element_from_monomial(m: Monomial) -> FilteredElement:
    return FilteredElement(m.monoid, {m: Fraction(1)})


def cone_membership(P: DelzantPolyhedron, c) -> bool:
    return monoid_for(P).contains(c)


def height(P: DelzantPolyhedron, c) -> Fraction:
    return monoid_for(P).height(c)


def intersecting_sum(P: DelzantPolyhedron, c) -> tuple[Fraction, tuple[int, ...]]:
    return monoid_for(P).decompose(c)


def gamma_r_membership(P: DelzantPolyhedron, c) -> bool:
    """Membership in the integral monoid: nu integral (by representation) and
    the pair lies in the cone."""
    return monoid_for(P).contains(c)


def gamma_membership(P: DelzantPolyhedron, c, monoid: "HeightMonoid") -> bool:
    """The height-restricted monoid: additionally the height must be one of
    the enumerated values of the given height monoid (below its cutoff)."""
    ctx = monoid_for(P)
    if not ctx.contains(c):
        return False
    h = ctx.height(c)
    return h < monoid.cutoff and h in monoid.element_set


def monotone_gamma_membership(P: DelzantPolyhedron, c) -> bool:
    """Membership in the monotone monoid generated by (1, nu_j) and (1, 0).

    Requires a normalized polyhedron (all offsets 1): then membership is cone
    membership together with integrality of the T-exponent.
    """
    if any(lam != 1 for lam in P.offsets):
        raise PreconditionError("monotone monoid needs all offsets equal to 1; "
                                "normalize first")
    lam, nu = _lam_nu(c)
    return lam.denominator == 1 and lam >= 0 and monoid_for(P).contains((lam, nu))


def multiply(x: FilteredElement, y: FilteredElement) -> FilteredElement:
    if x.monoid is not y.monoid:
        raise PreconditionError("operands live in different monoid contexts")
    return x * y


def truncate(x: FilteredElement, g) -> FilteredElement:
    """Drop all monomials of height >= g."""
    g = Fraction(g)
    if g <= 0:
        raise PreconditionError("truncation cutoff must be positive")
    return FilteredElement(x.monoid,
                           {m: c for m, c in x.terms.items() if m.height < g})


@dataclass(frozen=True)
class HeightMonoid:
    """The discrete monoid of admissible heights, enumerated below a cutoff."""

    generators: tuple[Fraction, ...]
    cutoff: Fraction
    elements: tuple[Fraction, ...]

    @property
    def element_set(self) -> frozenset[Fraction]:
        return frozenset(self.elements)


def build_height_monoid(P: DelzantPolyhedron, extra, g) -> HeightMonoid:
    """Monoid generated by all values theta_v(lambda_j, nu_j) plus the given
    extra heights, enumerated on [0, g)."""
    g = Fraction(g)
    if g <= 0:
        raise PreconditionError("cutoff must be positive")
    extra = [Fraction(x) for x in extra]
    if any(x < 0 for x in extra):
        raise PreconditionError("extra heights must be non-negative")
    ctx = monoid_for(P)
    gens = {theta(v, (lam, nu))
            for v in ctx.vertices
            for lam, nu in zip(P.offsets, P.normals)}
    gens.update(extra)
    positive = sorted(x for x in gens if x > 0)
    elements = {Fraction(0)}
    frontier = [Fraction(0)]
    while frontier:
        base = frontier.pop()
        for x in positive:
            s = base + x
            if s < g and s not in elements:
                elements.add(s)
                frontier.append(s)
    return HeightMonoid(tuple(sorted(gens)), g, tuple(sorted(elements)))


def enumerate_gamma_degree(P: DelzantPolyhedron, k: int) -> list[Monomial]:
    """All monomials (k, nu) of the monotone monoid, sorted lexicographically
    by nu.  Requires all offsets equal to 1."""
    if any(lam != 1 for lam in P.offsets):
        raise PreconditionError("degree slices need a normalized monotone "
                                "polyhedron (all offsets 1)")
    if k < 0:
        raise PreconditionError("degree must be non-negative")
    ctx = monoid_for(P)
    reachable = {(0,) * P.dim}
    for _ in range(k):
        extra = {tuple(a + b for a, b in zip(nu, normal))
                 for nu in reachable for normal in P.normals}
        reachable |= extra
    return [ctx.monomial(Fraction(k), nu) for nu in sorted(reachable)]


def log_derivative_generators(W: FilteredElement) -> list[FilteredElement]:
    """Coordinatewise logarithmic derivatives: the i-th output scales each
    monomial by the i-th component of its nu vector."""
    n = W.monoid.P.dim
    outs = []
    for i in range(n):
        terms = {m: c * m.nu[i] for m, c in W.terms.items() if m.nu[i]}
        outs.append(FilteredElement(W.monoid, terms))
    return outs


def filtered_to_json(x: FilteredElement) -> list[dict]:
    """Serialize sorted by (height, lex nu); round-trips bit-exactly."""
    return [{"lambda": str(m.lam), "nu": list(m.nu), "coeff": str(c)}
            for m, c in x.sorted_terms()]


def filtered_from_json(ctx: ConeMonoid, data) -> FilteredElement:
    if not isinstance(data, list):
        raise SchemaError("a filtered element must be a list of terms")
    terms: dict[Monomial, Fraction] = {}
    for item in data:
        try:
            lam = Fraction(item["lambda"])
            nu = tuple(item["nu"])
            coeff = Fraction(item["coeff"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad term {item!r}: {exc}") from exc
        if not all(isinstance(v, int) for v in nu) or len(nu) != ctx.P.dim:
            raise SchemaError(f"bad nu vector in term {item!r}")
        m = ctx.monomial(lam, nu)
        if m in terms:
            raise SchemaError(f"duplicate monomial ({lam}, {nu}) in serialized element")
        if coeff:
            terms[m] = coeff
    return FilteredElement(ctx, terms)
