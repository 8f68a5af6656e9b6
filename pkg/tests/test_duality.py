import numpy as np

from sheafccz.chain import ChainComplex
from sheafccz.complexes import build_cubical, cyclic_spec
from sheafccz.duality import (
    global_section_basis,
    verify_exactness,
    verify_poincare,
    verify_section_duality,
)
from sheafccz.localcode import LinCode, full_code, repetition_code, zero_code
from sheafccz.sheaf import (
    LocalCodeAssignment,
    dual_sheaf,
    is_locally_acyclic,
    sheaf_from_local_codes,
    uniform_assignment,
    verify_axioms,
)


def _pair(cplx):
    return cplx, ChainComplex(dual_sheaf(cplx.sheaf))


def test_section_duality_all_fixtures(
    toric3_chain, t2rs, torus7_chain, tetra_chain, single_cube, cycle6, f2
):
    fixtures = [toric3_chain, t2rs, torus7_chain, tetra_chain]
    fixtures.append(
        ChainComplex(
            sheaf_from_local_codes(single_cube, uniform_assignment(single_cube, full_code(f2, 1)))
        )
    )
    from sheafccz.sheaf import constant_sheaf

    fixtures.append(ChainComplex(constant_sheaf(cycle6, f2)))
    for cplx in fixtures:
        rep = verify_section_duality(*_pair(cplx))
        assert rep.ok, rep.to_json()


def test_section_duality_zero_spaces(toric3, f2):
    """Full-code sheaf: the dual is the zero sheaf, all three spaces vanish."""
    sheaf = sheaf_from_local_codes(toric3, uniform_assignment(toric3, full_code(f2, 2)))
    rep = verify_section_duality(*_pair(ChainComplex(sheaf)))
    assert rep.ok
    assert rep.dim_top_homology == 0


def test_global_sections_of_constant_sheaf(torus7_chain):
    """For self-dual repetition local codes the global sections are constants."""
    basis = global_section_basis(torus7_chain.sheaf)
    assert basis.shape[0] == 1
    assert np.count_nonzero(basis[0]) == torus7_chain.x.n_cells(2)


def test_poincare_on_acyclic_fixtures(toric3_chain, t2rs, torus7_chain, single_cube, f2):
    fixtures = [toric3_chain, t2rs, torus7_chain]
    fixtures.append(
        ChainComplex(
            sheaf_from_local_codes(single_cube, uniform_assignment(single_cube, full_code(f2, 1)))
        )
    )
    for cplx in fixtures:
        rep = verify_poincare(*_pair(cplx))
        assert rep.applicable
        assert rep.ok, rep.to_json()


def test_poincare_contractible_cube(single_cube, f2):
    sheaf = sheaf_from_local_codes(single_cube, uniform_assignment(single_cube, full_code(f2, 1)))
    rep = verify_poincare(*_pair(ChainComplex(sheaf)))
    assert rep.ok
    for i, a, b in rep.pairs:
        if i >= 1:
            assert a == b == 0


def test_exactness_statements(toric3_chain, t2rs, torus7_chain):
    for cplx in (toric3_chain, t2rs, torus7_chain):
        rep = verify_exactness(*_pair(cplx))
        assert rep.statements == {"1": True, "2": True, "3": True, "4": True, "5": True}
        assert rep.long_exact is True
        assert rep.ok


def _non_acyclic_instance(f2):
    """Seeded search for a valid sheaf that fails acyclicity and duality."""
    x = build_cubical(cyclic_spec(2, 3, [[0, 1]] * 3))
    menu = [
        repetition_code(f2, 2),
        full_code(f2, 2),
        zero_code(f2, 2),
        LinCode(f2, 2, [[1, 0]]),
        LinCode(f2, 2, [[0, 1]]),
    ]
    rng = np.random.default_rng(7)
    while True:
        picks = rng.integers(0, len(menu), size=x.n_cells(2))
        assign = LocalCodeAssignment({i: menu[int(p)] for i, p in enumerate(picks)})
        sheaf = sheaf_from_local_codes(x, assign)
        if not verify_axioms(sheaf).ok or is_locally_acyclic(sheaf).ok:
            continue
        return sheaf


def test_poincare_negative_control(f2):
    sheaf = _non_acyclic_instance(f2)
    rep = verify_poincare(*_pair(ChainComplex(sheaf)))
    assert not rep.acyclic
    assert not rep.applicable
    assert not rep.ok
    # the hypothesis failure comes with a recorded dimension mismatch
    assert rep.mismatches
    # statements 1-5 do not depend on acyclicity; the long exact sequence does
    ex = verify_exactness(*_pair(ChainComplex(sheaf)))
    assert ex.statements["3"] and ex.statements["5"]
    assert ex.long_exact is None


def test_reports_are_deterministic(torus7_chain):
    a = verify_poincare(*_pair(torus7_chain)).to_json()
    b = verify_poincare(*_pair(torus7_chain)).to_json()
    assert a == b
    ea = verify_exactness(*_pair(torus7_chain)).to_json()
    eb = verify_exactness(*_pair(torus7_chain)).to_json()
    assert ea == eb
