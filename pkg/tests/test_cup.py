import numpy as np
import pytest

from sheafccz.chain import ChainComplex
from sheafccz.complexes import build_cubical, cyclic_spec
from sheafccz.cup import (
    Cochain,
    constant_one_cochain,
    cube_intersection_value,
    cup_quadruple_value,
    cup_triple_value,
    leibniz_check,
    product_complex,
    simplicial_cup,
    square_intersection_value,
    sum_over_tops,
)
from sheafccz.gf import dense_rref, matmul, reduce_against
from sheafccz.localcode import reed_solomon, schur_span
from sheafccz.sheaf import constant_sheaf


@pytest.fixture(scope="module")
def torus_prod(torus7_chain):
    return product_complex(torus7_chain, torus7_chain)


def test_cup_with_zero(torus7_chain, torus_prod):
    rng = np.random.default_rng(0)
    a = Cochain.random(torus7_chain, 1, rng)
    z = Cochain.zero(torus7_chain, 1)
    assert not simplicial_cup(a, z, torus_prod).vec.any()
    assert not simplicial_cup(z, a, torus_prod).vec.any()


def test_unit_cochain_is_identity(torus7_chain, torus_prod):
    one = constant_one_cochain(torus7_chain)
    rng = np.random.default_rng(1)
    for deg in range(3):
        b = Cochain.random(torus7_chain, deg, rng)
        assert np.array_equal(simplicial_cup(one, b, torus_prod).vec, b.vec)


def test_cup_requires_simplicial(toric3_chain):
    prod = product_complex(toric3_chain, toric3_chain)
    a = Cochain.zero(toric3_chain, 1)
    with pytest.raises(ValueError, match="simplicial"):
        simplicial_cup(a, a, prod)


def test_leibniz_seeded_batch(torus7_chain, torus_prod, tetra_chain):
    rng = np.random.default_rng(42)
    for cplx, prod in (
        (torus7_chain, torus_prod),
        (tetra_chain, product_complex(tetra_chain, tetra_chain)),
    ):
        t = cplx.x.t
        for _ in range(100):
            i = int(rng.integers(0, t + 1))
            j = int(rng.integers(0, t + 1 - i))
            a = Cochain.random(cplx, i, rng)
            b = Cochain.random(cplx, j, rng)
            assert leibniz_check(a, b, prod).ok


def test_cocycles_cup_to_cocycle(torus7_chain, torus_prod):
    z1 = Cochain(torus7_chain, 1, torus7_chain.cocycle_basis(1)[0])
    z2 = Cochain(torus7_chain, 1, torus7_chain.cocycle_basis(1)[1])
    assert not simplicial_cup(z1, z2, torus_prod).coboundary().vec.any()


def test_cocycle_cup_coboundary_is_coboundary(torus7_chain, torus_prod):
    rng = np.random.default_rng(7)
    _, reps = torus7_chain.cohomology(1)
    for rep in reps:
        zeta = Cochain(torus7_chain, 1, rep)
        c = Cochain.random(torus7_chain, 0, rng)
        prod_cochain = simplicial_cup(zeta, c.coboundary(), torus_prod)
        x = torus_prod.delta[1].solve(prod_cochain.vec)
        assert x is not None
        assert np.array_equal(torus_prod.delta[1].mat_vec(x), prod_cochain.vec)
        # and it equals d(zeta cup c) by the Leibniz rule
        direct = simplicial_cup(zeta, c, torus_prod).coboundary()
        assert np.array_equal(direct.vec, prod_cochain.vec)


def test_cup_values_land_in_schur_span(torus7_chain, torus_prod):
    """Cup values lie in the entrywise product of the two cell spaces,
    not only in the (possibly larger) product sheaf space."""
    rng = np.random.default_rng(3)
    sheaf = torus7_chain.sheaf
    x = torus7_chain.x
    for _ in range(10):
        i = int(rng.integers(0, 3))
        j = int(rng.integers(0, 3 - i))
        a = Cochain.random(torus7_chain, i, rng)
        b = Cochain.random(torus7_chain, j, rng)
        ab = simplicial_cup(a, b, torus_prod)
        deg = i + j
        for idx in range(x.n_cells(deg)):
            vals = torus_prod.sheaf.section_values(deg, idx, ab.cell_coords(idx))
            prods = []
            for u in sheaf.basis[deg][idx]:
                for v in sheaf.basis[deg][idx]:
                    prods.append(sheaf.fs.mul_arr(u, v))
            rref, piv = dense_rref(sheaf.fs, np.array(prods))
            assert not reduce_against(sheaf.fs, rref, piv, vals).any()


def test_torus_cup_pairing_matrix(torus7_chain, torus_prod):
    k, reps = torus7_chain.cohomology(1)
    assert k == 2
    m = np.zeros((2, 2), dtype=np.int64)
    for i in range(2):
        for j in range(2):
            ci = Cochain(torus7_chain, 1, reps[i])
            cj = Cochain(torus7_chain, 1, reps[j])
            m[i, j] = sum_over_tops(simplicial_cup(ci, cj, torus_prod))
    # nondegenerate and alternating over GF(2)
    assert m.tolist() == [[0, 1], [1, 0]]


def test_triple_value_reduces_to_pairing(torus7_chain, torus_prod):
    p3 = product_complex(torus7_chain, torus7_chain, torus7_chain)
    one = constant_one_cochain(torus7_chain)
    _, reps = torus7_chain.cohomology(1)
    for i in range(2):
        for j in range(2):
            ci = Cochain(torus7_chain, 1, reps[i])
            cj = Cochain(torus7_chain, 1, reps[j])
            direct = sum_over_tops(simplicial_cup(ci, cj, torus_prod))
            tri = cup_triple_value(ci, cj, one, torus_prod, p3)
            assert tri == direct
    with pytest.raises(ValueError, match="sum"):
        cup_triple_value(one, one, one, torus_prod, p3)


def test_cup_between_different_sheaves(torus7, torus7_chain, f2):
    """Cup of a constant-sheaf cochain with a full-sheaf cochain: the
    product sheaf has higher-dimensional spaces and Leibniz still holds."""
    from sheafccz.localcode import full_code
    from sheafccz.sheaf import sheaf_from_local_codes, uniform_assignment

    full_cplx = ChainComplex(
        sheaf_from_local_codes(torus7, uniform_assignment(torus7, full_code(f2, 2)))
    )
    prod = product_complex(torus7_chain, full_cplx)
    assert prod.dims[1] > torus7_chain.dims[1]
    rng = np.random.default_rng(29)
    for _ in range(60):
        i = int(rng.integers(0, 3))
        j = int(rng.integers(0, 3 - i))
        a = Cochain.random(torus7_chain, i, rng)
        b = Cochain.random(full_cplx, j, rng)
        assert leibniz_check(a, b, prod).ok


def test_mixed_sheaf_cup_form_matches_direct(torus7, torus7_chain, f2):
    from sheafccz.ccz import cup_form
    from sheafccz.cup import cup_triple_value
    from sheafccz.localcode import full_code
    from sheafccz.sheaf import sheaf_from_local_codes, uniform_assignment

    full_cplx = ChainComplex(
        sheaf_from_local_codes(torus7, uniform_assignment(torus7, full_code(f2, 2)))
    )
    legs = [torus7_chain, full_cplx, torus7_chain]
    form = cup_form(legs, [1, 1, 0])
    p2 = product_complex(torus7_chain, full_cplx)
    p3 = product_complex(*legs)
    rng = np.random.default_rng(31)
    for _ in range(25):
        a1 = Cochain.random(torus7_chain, 1, rng)
        a2 = Cochain.random(full_cplx, 1, rng)
        a3 = Cochain.random(torus7_chain, 0, rng)
        assert form.evaluate(a1.vec, a2.vec, a3.vec) == cup_triple_value(a1, a2, a3, p2, p3)


def test_coboundary_sum_vanishes_under_parity_condition(torus7_chain):
    """Top-cell sums of coboundaries vanish when local codes multiply into
    the sum-zero code."""
    rng = np.random.default_rng(11)
    for _ in range(20):
        c = Cochain.random(torus7_chain, 1, rng)
        assert sum_over_tops(c.coboundary()) == 0


def test_quadruple_value(torus7_chain, torus_prod):
    p3 = product_complex(torus7_chain, torus7_chain, torus7_chain)
    p4 = ChainComplex(_quad_sheaf(torus7_chain))
    one = constant_one_cochain(torus7_chain)
    _, reps = torus7_chain.cohomology(1)
    c0 = Cochain(torus7_chain, 1, reps[0])
    c1 = Cochain(torus7_chain, 1, reps[1])
    z4 = Cochain.zero(torus7_chain, 0)
    assert cup_quadruple_value(c0, c1, one, z4, torus_prod, p3, p4) == 0
    got = cup_quadruple_value(c0, c1, one, one, torus_prod, p3, p4)
    assert got == cup_triple_value(c0, c1, one, torus_prod, p3)


def _quad_sheaf(cplx):
    from sheafccz.localcode import schur_span
    from sheafccz.sheaf import LocalCodeAssignment, sheaf_from_local_codes

    s = cplx.sheaf
    x = s.x
    codes = {}
    for i in range(x.n_cells(x.t - 1)):
        c = s.local_code(i)
        codes[i] = schur_span(schur_span(c, c), schur_span(c, c))
    return sheaf_from_local_codes(x, LocalCodeAssignment(codes))


# ---------------------------------------------------------------------------
# Explicit cubical forms
# ---------------------------------------------------------------------------


def test_square_form_zero_and_bilinear(t2rs):
    rng = np.random.default_rng(5)
    zero = Cochain.zero(t2rs, 1)
    a = Cochain.random(t2rs, 1, rng)
    assert square_intersection_value(zero, a) == 0
    for _ in range(20):
        a1 = Cochain.random(t2rs, 1, rng)
        a1p = Cochain.random(t2rs, 1, rng)
        a2 = Cochain.random(t2rs, 1, rng)
        lhs = square_intersection_value(a1 + a1p, a2)
        rhs = square_intersection_value(a1, a2) ^ square_intersection_value(a1p, a2)
        assert lhs == rhs


def test_square_form_invariance(t2rs, f4):
    """Cohomology invariance of the 2D form under the product condition."""
    rs = reed_solomon(f4, 2)
    assert schur_span(rs, rs).dim <= 3  # contained in the sum-zero code
    z = t2rs.cocycle_basis(1)
    b = t2rs.coboundary_basis(1)
    rng = np.random.default_rng(17)
    for _ in range(200):
        z1 = matmul(f4, f4.random_arr(rng, z.shape[0])[None, :], z)[0]
        z2 = matmul(f4, f4.random_arr(rng, z.shape[0])[None, :], z)[0]
        b1 = matmul(f4, f4.random_arr(rng, b.shape[0])[None, :], b)[0]
        b2 = matmul(f4, f4.random_arr(rng, b.shape[0])[None, :], b)[0]
        base = square_intersection_value(Cochain(t2rs, 1, z1), Cochain(t2rs, 1, z2))
        shifted = square_intersection_value(Cochain(t2rs, 1, z1 ^ b1), Cochain(t2rs, 1, z2 ^ b2))
        assert base == shifted


def test_cube_form_zero_and_trilinear(toric3_chain):
    rng = np.random.default_rng(6)
    zero = Cochain.zero(toric3_chain, 1)
    a = Cochain.random(toric3_chain, 1, rng)
    b = Cochain.random(toric3_chain, 1, rng)
    assert cube_intersection_value(zero, a, b) == 0
    for _ in range(10):
        a1 = Cochain.random(toric3_chain, 1, rng)
        a1p = Cochain.random(toric3_chain, 1, rng)
        a2 = Cochain.random(toric3_chain, 1, rng)
        a3 = Cochain.random(toric3_chain, 1, rng)
        lhs = cube_intersection_value(a1 + a1p, a2, a3)
        rhs = cube_intersection_value(a1, a2, a3) ^ cube_intersection_value(a1p, a2, a3)
        assert lhs == rhs


def test_cube_form_invariance(toric3_chain, f2):
    z = toric3_chain.cocycle_basis(1)
    b = toric3_chain.coboundary_basis(1)
    rng = np.random.default_rng(23)
    for _ in range(200):
        zs = [matmul(f2, f2.random_arr(rng, z.shape[0])[None, :], z)[0] for _ in range(3)]
        bs = [matmul(f2, f2.random_arr(rng, b.shape[0])[None, :], b)[0] for _ in range(3)]
        base = cube_intersection_value(*(Cochain(toric3_chain, 1, v) for v in zs))
        shifted = cube_intersection_value(
            *(Cochain(toric3_chain, 1, v ^ w) for v, w in zip(zs, bs))
        )
        assert base == shifted


def test_cube_form_wrong_dimension(t2rs):
    a = Cochain.zero(t2rs, 1)
    with pytest.raises(ValueError, match="3-dimensional"):
        cube_intersection_value(a, a, a)
    x1 = build_cubical(cyclic_spec(3, 1, [[1, 2]]))
    from sheafccz.gf import FieldSpec

    c1 = ChainComplex(constant_sheaf(x1, FieldSpec(1)))
    with pytest.raises(ValueError, match="2-dimensional"):
        square_intersection_value(Cochain.zero(c1, 1), Cochain.zero(c1, 1))
