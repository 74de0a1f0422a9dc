"""Bundled example polyhedra and a random Delzant generator.

The JSON files under data/ are the canonical corpus used by the CLI docs and
the test suite; ``load_example`` parses them through the ordinary input
schema.  Random polyhedra are produced by truncating vertices of known
Delzant seeds (a toric blowup), which preserves the Delzant property for
small enough cuts, followed by a random unimodular relabeling of the
lattice.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from importlib import resources

from .errors import SchemaError
from .polyhedra import (DelzantPolyhedron, check_delzant, enumerate_vertices,
                        parse_polyhedron, polyhedron)
from .presentation import random_unimodular, relabel_lattice

VALID_EXAMPLES = ("c1", "c2", "c3", "cp1", "cp2", "cp3", "cp1xcp1",
                  "o_minus_1", "hirzebruch_f2")
INVALID_EXAMPLES = ("non_delzant", "vertexless")


def example_names() -> tuple[str, ...]:
    return VALID_EXAMPLES + INVALID_EXAMPLES


def load_example(name: str) -> DelzantPolyhedron:
    if name not in example_names():
        raise KeyError(f"unknown example {name!r}; known: {example_names()}")
    text = resources.files("toricqh").joinpath("data", f"{name}.json").read_text()
    return parse_polyhedron(json.loads(text))


def load_valid_examples() -> dict[str, DelzantPolyhedron]:
    return {name: load_example(name) for name in VALID_EXAMPLES}


def _pairing(nu, x):
    return sum(a * b for a, b in zip(nu, x))


def blow_up(P: DelzantPolyhedron, vertex_index: int,
            fraction=Fraction(1, 2)) -> DelzantPolyhedron:
    """Truncate the given vertex with the sum of its incident normals.

    The cut is placed a rational fraction of the way towards the nearest
    other vertex (or towards the origin when that is closer), so the new
    facet meets every edge at the vertex in its interior and the result is
    again Delzant with positive offsets.
    """
    fraction = Fraction(fraction)
    if not 0 < fraction < 1:
        raise ValueError("cut fraction must be strictly between 0 and 1")
    vertices = enumerate_vertices(P)
    v = vertices[vertex_index]
    labels = sorted(v.incident)
    nu0 = tuple(sum(P.normal(j)[i] for j in labels) for i in range(P.dim))
    a = _pairing(nu0, v.point)
    others = [_pairing(nu0, w.point) for w in vertices if w.point != v.point]
    upper = min(others + [Fraction(0)])
    assert a < upper
    cut = a + fraction * (upper - a)
    facets = list(zip(P.normals, P.offsets)) + [(nu0, -cut)]
    return polyhedron(P.dim, facets)


_SEEDS = {
    "simplex": lambda n: [(tuple(1 if i == j else 0 for i in range(n)), 1)
                          for j in range(n)] + [((-1,) * n, 1)],
    "cube": lambda n: [(tuple(s if i == j else 0 for i in range(n)), 1)
                       for j in range(n) for s in (1, -1)],
    "orthant": lambda n: [(tuple(1 if i == j else 0 for i in range(n)), 1)
                          for j in range(n)],
}


def random_delzant(rng: random.Random, dim: int, max_facets: int,
                   allow_noncompact: bool = True) -> DelzantPolyhedron:
    """A random Delzant polyhedron with at most max_facets facets."""
    kinds = list(_SEEDS) if allow_noncompact else ["simplex", "cube"]
    kind = rng.choice(kinds)
    scale = Fraction(rng.randrange(1, 4), rng.randrange(1, 3))
    facets = [(nu, lam * scale) for nu, lam in _SEEDS[kind](dim)]
    P = polyhedron(dim, facets)
    while P.nfacets < max_facets and rng.random() < 0.7:
        idx = rng.randrange(len(enumerate_vertices(P)))
        frac = Fraction(1, rng.randrange(2, 5))
        try:
            P = blow_up(P, idx, frac)
        except SchemaError:
            # The truncating facet collided with an existing one; skip.
            break
    U = random_unimodular(dim, rng)
    P = relabel_lattice(P, U)
    report = check_delzant(P)
    assert report.passed, report.violations
    return P
