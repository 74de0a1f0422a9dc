import random
from fractions import Fraction

import pytest

from toricqh import catalog
from toricqh.errors import PreconditionError, SchemaError
from toricqh.polyhedra import (check_delzant, check_vertex_and_splitting,
                               enumerate_vertices, facet_intersection_nonempty,
                               is_compact, minimal_nonfaces,
                               monotone_normalization, parse_polyhedron,
                               polyhedron)
from toricqh.presentation import random_unimodular, relabel_lattice


def test_vertices_o_minus_1(o_minus_1):
    vs = enumerate_vertices(o_minus_1)
    data = {tuple(v.point): set(v.incident) for v in vs}
    assert data == {(-1, 0): {1, 2}, (0, -1): {2, 3}}


def test_vertices_cp2(cp2):
    points = {tuple(v.point) for v in enumerate_vertices(cp2)}
    assert points == {(-1, -1), (-1, 2), (2, -1)}


def test_vertices_halfspace():
    P = polyhedron(1, [((1,), 1)])
    vs = enumerate_vertices(P)
    assert [tuple(v.point) for v in vs] == [(-1,)]


def test_vertex_incident_equalities(corpus):
    for P in corpus.values():
        for v in enumerate_vertices(P):
            for j in range(1, P.nfacets + 1):
                pairing = sum(a * b for a, b in zip(P.normal(j), v.point))
                if j in v.incident:
                    assert pairing == -P.offset(j)
                else:
                    assert pairing > -P.offset(j)


def test_check_delzant_passes(o_minus_1, cp2):
    assert check_delzant(o_minus_1).passed
    assert check_delzant(cp2).passed


def test_check_delzant_fails_determinant_2():
    P = polyhedron(2, [((1, 0), 1), ((1, 2), 1)])
    report = check_delzant(P)
    assert not report.passed
    assert "determinant" in report.violations[0]


def test_check_delzant_non_delzant_example():
    P = catalog.load_example("non_delzant")
    report = check_delzant(P)
    assert not report.passed


def test_splitting_o_minus_1(o_minus_1):
    rep = check_vertex_and_splitting(o_minus_1)
    assert rep.has_vertex and rep.split_rank == 0


def test_splitting_vertexless():
    P = catalog.load_example("vertexless")
    rep = check_vertex_and_splitting(P)
    assert not rep.has_vertex
    assert rep.split_rank == 1
    (basis_vec,) = rep.annihilator_basis
    assert basis_vec in ((0, 1), (0, -1))
    assert enumerate_vertices(P) == ()


def test_splitting_single_normal():
    P = polyhedron(2, [((1, 0), 1)])
    rep = check_vertex_and_splitting(P)
    assert (rep.has_vertex, rep.split_rank) == (False, 1)


def test_splitting_line_in_1d():
    P = polyhedron(1, [((1,), 1), ((-1,), 1)])
    rep = check_vertex_and_splitting(P)
    assert (rep.has_vertex, rep.split_rank) == (True, 0)


def test_compactness(corpus):
    expected = {"c1": False, "c2": False, "c3": False, "cp1": True,
                "cp2": True, "cp3": True, "cp1xcp1": True,
                "o_minus_1": False, "hirzebruch_f2": True}
    for name, P in corpus.items():
        assert is_compact(P) == expected[name], name


def test_facet_intersections_o_minus_1(o_minus_1):
    assert not facet_intersection_nonempty(o_minus_1, {1, 3})
    assert facet_intersection_nonempty(o_minus_1, {1, 2})
    for j in (1, 2, 3):
        assert facet_intersection_nonempty(o_minus_1, {j})
    with pytest.raises(PreconditionError):
        facet_intersection_nonempty(o_minus_1, set())


def test_minimal_nonfaces(corpus):
    assert minimal_nonfaces(corpus["o_minus_1"]) == ((1, 3),)
    assert minimal_nonfaces(corpus["cp2"]) == ((1, 2, 3),)
    assert minimal_nonfaces(corpus["c3"]) == ()
    assert minimal_nonfaces(corpus["cp1xcp1"]) == ((1, 2), (3, 4))


def test_nonface_partition_exhaustive(corpus):
    # every subset has empty intersection iff it contains a minimal nonface
    import itertools
    polys = [corpus[name] for name in
             ("o_minus_1", "cp2", "cp1xcp1", "hirzebruch_f2", "c2")]
    rng = random.Random(77)
    while True:  # one larger random instance, up to 8 facets
        P = catalog.random_delzant(rng, 3, 8)
        if P.nfacets >= 6:
            polys.append(P)
            break
    for P in polys:
        nonfaces = [set(J) for J in minimal_nonfaces(P)]
        for k in range(1, P.nfacets + 1):
            for J in itertools.combinations(range(1, P.nfacets + 1), k):
                covered = any(nf <= set(J) for nf in nonfaces)
                assert facet_intersection_nonempty(P, J) == (not covered)


def test_intersection_monotone_under_inclusion(corpus):
    import itertools
    for P in (corpus["cp1xcp1"], corpus["hirzebruch_f2"]):
        labels = range(1, P.nfacets + 1)
        for k in range(2, P.nfacets + 1):
            for J in itertools.combinations(labels, k):
                if facet_intersection_nonempty(P, J):
                    for sub in itertools.combinations(J, k - 1):
                        assert facet_intersection_nonempty(P, sub)


def test_monotone_normalization_o_minus_1(o_minus_1):
    norm = monotone_normalization(o_minus_1)
    assert norm is not None
    assert norm.translation == (0, 0)
    assert norm.offset == 1
    assert norm.rescaled == o_minus_1


def test_monotone_normalization_cp1_scaled():
    P = polyhedron(1, [((1,), 1), ((-1,), 3)])
    norm = monotone_normalization(P)
    assert norm is not None
    assert norm.translation == (Fraction(-1),)
    assert norm.offset == 2
    assert set(norm.rescaled.offsets) == {Fraction(1)}


def test_monotone_normalization_hirzebruch_absent(corpus):
    assert monotone_normalization(corpus["hirzebruch_f2"]) is None


def test_monotone_normalization_orthant_family(corpus):
    # C^n has a one-parameter family of monotone fibres; some solution with
    # positive offset must be found
    norm = monotone_normalization(corpus["c2"])
    assert norm is not None and norm.offset > 0


def test_schema_rejects_imprimitive_normal():
    with pytest.raises(SchemaError):
        polyhedron(2, [((2, 0), 1), ((0, 1), 1)])


def test_schema_rejects_nonpositive_offset():
    with pytest.raises(SchemaError):
        polyhedron(1, [((1,), 0)])


def test_schema_rejects_redundant_facet():
    # x >= -2 is implied by x >= -1
    with pytest.raises(SchemaError):
        polyhedron(1, [((1,), 1), ((1,), 2)])
    # the point (0,0) face: x+y >= 0 is redundant for the orthant
    with pytest.raises(SchemaError):
        polyhedron(2, [((1, 0), 1), ((0, 1), 1), ((1, 1), 2)])


def test_schema_rejects_float_offset():
    with pytest.raises(SchemaError):
        parse_polyhedron({"dim": 1, "facets": [{"normal": [1], "offset": 1.0}]})


def test_parse_accepts_fraction_strings():
    P = parse_polyhedron({"dim": 1, "facets": [{"normal": [1], "offset": "3/2"}]})
    assert P.offsets == (Fraction(3, 2),)


@pytest.mark.parametrize("seed", range(6))
def test_vertex_count_invariant_under_relabeling(seed, corpus):
    rng = random.Random(seed)
    for P in (corpus["o_minus_1"], corpus["cp2"], corpus["hirzebruch_f2"]):
        U = random_unimodular(P.dim, rng)
        P2 = relabel_lattice(P, U)
        assert len(enumerate_vertices(P2)) == len(enumerate_vertices(P))
        perm = list(range(P.nfacets))
        rng.shuffle(perm)
        P3 = polyhedron(P.dim, [(P.normals[i], P.offsets[i]) for i in perm])
        assert len(enumerate_vertices(P3)) == len(enumerate_vertices(P))


@pytest.mark.parametrize("seed", range(10))
def test_random_delzant_generator_is_valid(seed):
    rng = random.Random(seed)
    P = catalog.random_delzant(rng, rng.choice([1, 2, 2, 3]), 8)
    assert check_delzant(P).passed
    assert check_vertex_and_splitting(P).has_vertex
    # vertex-based face criterion agrees with the LP decision
    vs = enumerate_vertices(P)
    import itertools
    for k in (1, 2):
        for J in itertools.combinations(range(1, P.nfacets + 1), k):
            by_vertex = any(set(J) <= v.incident for v in vs)
            assert facet_intersection_nonempty(P, J) == by_vertex


@pytest.mark.parametrize("seed", range(12))
def test_random_delzant_rank_formulas(seed):
    # Borel-Moore rank count: classical total rank equals the vertex count
    # and the degree-1 rank equals N - n, on generated instances
    from toricqh.presentation import classical_presentation
    rng = random.Random(4000 + seed)
    P = catalog.random_delzant(rng, rng.choice([2, 3]), 7)
    cp = classical_presentation(P)
    assert cp.total_rank == len(enumerate_vertices(P))
    assert cp.ranks[1] == P.nfacets - P.dim
