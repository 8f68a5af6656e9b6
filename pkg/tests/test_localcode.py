import numpy as np
import pytest

from sheafccz.gf import SpMat, matmul
from sheafccz.localcode import (
    LinCode,
    dual,
    full_code,
    named_code,
    parity_code,
    product_condition,
    reed_solomon,
    repetition_code,
    schur_span,
    tensor_code,
    zero_code,
)


def test_generator_must_have_full_rank(f2):
    with pytest.raises(ValueError):
        LinCode(f2, 3, [[1, 1, 0], [1, 1, 0]])


def test_dual_examples(f2, f8):
    rep2 = repetition_code(f2, 2)
    assert dual(rep2).same_subspace(rep2)
    assert dual(full_code(f2, 3)).dim == 0
    assert dual(zero_code(f2, 3)).same_subspace(full_code(f2, 3))
    rs2 = reed_solomon(f8, 2)
    d = dual(rs2)
    assert d.dim == 6
    for u in rs2.generator:
        for v in d.generator:
            assert int(np.bitwise_xor.reduce(f8.mul_arr(u, v))) == 0


def test_dual_involution(f2, f4, f8):
    for code in (
        repetition_code(f2, 5),
        reed_solomon(f4, 2),
        reed_solomon(f8, 3),
        zero_code(f4, 6),
    ):
        assert dual(dual(code)).same_subspace(code)


def test_reed_solomon(f4, f8):
    assert reed_solomon(f4, 1).same_subspace(repetition_code(f4, 4))
    assert reed_solomon(f4, 4).same_subspace(full_code(f4, 4))
    # the evaluation of p(x) = x in encoding order
    assert reed_solomon(f4, 2).generator[1].tolist() == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        reed_solomon(f8, 0)
    with pytest.raises(ValueError):
        reed_solomon(f8, 9)


def test_schur_examples(f2, f8):
    rep = repetition_code(f2, 4)
    assert schur_span(rep, rep).same_subspace(rep)
    rs2 = reed_solomon(f8, 2)
    prod = schur_span(rs2, rs2)
    assert prod.dim == 3 and prod.same_subspace(reed_solomon(f8, 3))
    assert schur_span(rs2, zero_code(f8, 8)).dim == 0
    with pytest.raises(ValueError):
        schur_span(rep, repetition_code(f2, 5))


def test_schur_dimension_rule(f8):
    for k1 in range(1, 6):
        for k2 in range(1, 6):
            got = schur_span(reed_solomon(f8, k1), reed_solomon(f8, k2)).dim
            assert got == min(8, k1 + k2 - 1)


def test_tensor_code(f2, f4):
    rep2 = repetition_code(f2, 2)
    t = tensor_code([rep2, rep2])
    assert t.dim == 1 and t.generator[0].tolist() == [1, 1, 1, 1]
    c = reed_solomon(f4, 2)
    assert tensor_code([c, full_code(f4, 3)]).dim == 6
    assert tensor_code([c, zero_code(f4, 2)]).dim == 0


def test_tensor_fiber_characterization(f2, f4):
    """The tensor code equals the set of arrays whose fibers are codewords."""
    rep2 = repetition_code(f2, 2)
    rs = reed_solomon(f4, 2)
    t = tensor_code([repetition_code(f4, 2), rs])
    # stack the dual checks of every row fiber and column fiber
    rows = []
    dual_a = dual(repetition_code(f4, 2)).generator
    dual_b = dual(rs).generator
    for col in range(4):  # axis-0 fibers: entries (0, col), (1, col)
        for chk in dual_a:
            row = np.zeros(8, dtype=np.int64)
            row[col] = chk[0]
            row[4 + col] = chk[1]
            rows.append(row)
    for r0 in range(2):  # axis-1 fibers
        for chk in dual_b:
            row = np.zeros(8, dtype=np.int64)
            row[4 * r0 : 4 * r0 + 4] = chk
            rows.append(row)
    ker = SpMat.from_dense(f4, np.array(rows)).kernel_basis()
    assert ker.shape[0] == t.dim
    for g in t.generator:
        assert not matmul(f4, np.array(rows), g[:, None]).any()


def test_product_condition(f2, f8):
    rep2 = repetition_code(f2, 2)
    assert product_condition(rep2, rep2, rep2)
    rs2 = reed_solomon(f8, 2)
    assert product_condition(rs2, rs2, rs2)  # 3(k-1) <= q-2
    assert not product_condition(*([full_code(f2, 1)] * 3))
    assert not product_condition(*([reed_solomon(f8, 4)] * 3))  # 3*3 > 6
    # power sums vanish below q-1
    for j in range(7):
        acc = 0
        for x in range(8):
            acc ^= f8.power(x, j) if (x or j == 0) else 0
        assert acc == 0


def test_product_condition_matches_dual_membership(f8):
    rs2 = reed_solomon(f8, 2)
    span = schur_span(rs2, rs2, rs2)
    assert dual(span).contains(np.ones(8, dtype=np.int64))
    assert span.same_subspace(reed_solomon(f8, 4))


def test_parity_code(f2):
    p = parity_code(f2, 4)
    assert p.dim == 3
    for row in p.generator:
        assert int(row.sum()) % 2 == 0


def test_named_codes(f4):
    assert named_code(f4, "rep", 5).same_subspace(repetition_code(f4, 5))
    assert named_code(f4, "full", 3).dim == 3
    assert named_code(f4, "zero", 3).dim == 0
    assert named_code(f4, "rs:2", 4).same_subspace(reed_solomon(f4, 2))
    assert named_code(f4, "dual:rs:2", 4).same_subspace(dual(reed_solomon(f4, 2)))
    with pytest.raises(ValueError):
        named_code(f4, "nope", 4)
    with pytest.raises(ValueError):
        named_code(f4, "rs:2", 5)


def test_code_json_roundtrip(f8):
    import json

    code = reed_solomon(f8, 3)
    again = LinCode.from_json(json.loads(json.dumps(code.to_json())))
    assert again.same_subspace(code)
