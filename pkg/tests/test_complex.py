import json
from itertools import combinations
from math import comb

import numpy as np
import pytest

from sheafccz.complexes import (
    CellComplex,
    CubicalSpec,
    build_cubical,
    build_simplicial,
    simplex_boundary,
)


def expected_cubical_counts(n, delta, t):
    return [comb(t, k) * n * delta**k * 2 ** (t - k) for k in range(t + 1)]


def test_single_cube_counts(single_cube):
    assert single_cube.counts() == [8, 12, 6, 1]
    assert single_cube.counts() == expected_cubical_counts(1, 1, 3)


def test_cycle6_structure(cycle6):
    assert cycle6.counts() == [6, 6]
    for i in range(6):
        assert len(cycle6.up[0][i]) == 2
    assert cycle6.validate().n_components == 1


def test_cayley_counts(cayley):
    assert cayley.counts() == [24, 48, 24]
    assert cayley.counts() == expected_cubical_counts(6, 2, 2)


def test_toric_counts(toric3):
    assert toric3.counts() == expected_cubical_counts(3, 2, 3)


def test_counts_per_type(toric3):
    # |X(S)| = N * delta^k * 2^(t-k) for every individual type set
    for k in range(4):
        for s in combinations(range(3), k):
            cnt = sum(1 for c in toric3.cells[k] if c[0] == s)
            assert cnt == 3 * 2**k * 2 ** (3 - k)


def test_validation_all_builders(single_cube, cycle6, cayley, toric3, torus7, rp3):
    for x in (single_cube, cycle6, cayley, toric3, torus7, rp3):
        rep = x.validate()
        assert rep.ok, rep.to_json()


def test_noncommuting_rejected():
    spec = CubicalSpec(3, 2, [[np.array([1, 2, 0])], [np.array([0, 2, 1])]])
    with pytest.raises(ValueError, match="direction 0 index 0 vs direction 1 index 0"):
        build_cubical(spec)


def test_nonpermutation_rejected():
    with pytest.raises(ValueError, match="non-permutation"):
        CubicalSpec(3, 1, [[np.array([0, 0, 1])]])


def test_simplicial_counts():
    assert build_simplicial([[0, 1, 2]]).counts() == [3, 3, 1]
    assert simplex_boundary(4).counts() == [4, 6, 4]


def test_torus_euler(torus7):
    counts = torus7.counts()
    assert counts == [7, 21, 14]
    assert counts[0] - counts[1] + counts[2] == 0


def test_mixed_facets_rejected():
    with pytest.raises(ValueError, match="mixed facet dimensions"):
        build_simplicial([[0, 1, 2], [3, 4]])
    with pytest.raises(ValueError, match="repeated"):
        build_simplicial([[0, 1, 1]])


def test_disjoint_components():
    two = build_simplicial([[0, 1, 2], [3, 4, 5]])
    assert two.validate().n_components == 2


def test_up_set_examples(toric3, torus7):
    # a top cell is its own up-set
    assert toric3.up_set(3, 0, 3).tolist() == [0]
    # cubical (t-1)-cells have exactly delta top cells above
    for i in range(toric3.n_cells(2)):
        assert len(toric3.up_set(2, i, 3)) == 2
    # a vertex of a triangle has its incident edges above it
    tri = build_simplicial([[0, 1, 2]])
    d, i = tri.idx((0,))
    edges = [tri.cell(1, j) for j in tri.up_set(0, i, 1)]
    assert edges == [(0, 1), (0, 2)]
    with pytest.raises(ValueError):
        torus7.up_set(1, 0, 0)
    with pytest.raises(KeyError):
        torus7.idx((99, 100))


def test_up_down_consistency(toric3):
    rng = np.random.default_rng(0)
    for _ in range(50):
        d = int(rng.integers(0, 3))
        i = int(rng.integers(0, toric3.n_cells(d)))
        for j in toric3.up[d][i]:
            assert i in toric3.down[d + 1][j]


def test_diamond_property_exhaustive(toric3, torus7):
    for x in (toric3, torus7):
        for d in range(x.t - 1):
            for i in range(x.n_cells(d)):
                counts = {}
                for mid in x.up[d][i]:
                    for top in x.up[d + 1][mid]:
                        counts[top] = counts.get(top, 0) + 1
                assert all(v == 2 for v in counts.values())


def test_rp3_is_closed_3_manifold(rp3):
    counts = rp3.counts()
    assert counts[0] - counts[1] + counts[2] - counts[3] == 0
    assert all(len(u) == 2 for u in rp3.up[2])
    assert rp3.validate().n_components == 1


def test_complex_serialization_roundtrip(toric3, torus7):
    for x in (toric3, torus7):
        data = json.loads(json.dumps(x.to_json()))
        again = CellComplex.from_json(data)
        assert again.counts() == x.counts()
        assert again.cells == x.cells
        assert again.up == x.up


def test_cubical_spec_roundtrip(toric3):
    spec = toric3.spec
    again = CubicalSpec.from_json(json.loads(json.dumps(spec.to_json())))
    rebuilt = build_cubical(again)
    assert rebuilt.cells == toric3.cells
