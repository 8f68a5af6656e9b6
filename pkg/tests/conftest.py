import numpy as np
import pytest

from sheafccz.ccz import CczLeg, CCZCode, cube_form
from sheafccz.chain import ChainComplex
from sheafccz.complexes import (
    CubicalSpec,
    build_cubical,
    cyclic_spec,
    left_right_cayley_s3,
    projective_space_3,
    simplex_boundary,
    torus_triangulation,
)
from sheafccz.gf import FieldSpec
from sheafccz.localcode import full_code, reed_solomon, repetition_code
from sheafccz.sheaf import constant_sheaf, cubical_tensor_sheaf, sheaf_from_local_codes, uniform_assignment


@pytest.fixture(scope="session")
def f2():
    return FieldSpec(1)


@pytest.fixture(scope="session")
def f4():
    return FieldSpec(2)


@pytest.fixture(scope="session")
def f8():
    return FieldSpec(3)


@pytest.fixture(scope="session")
def single_cube():
    return build_cubical(CubicalSpec(1, 3, [[np.array([0])]] * 3))


@pytest.fixture(scope="session")
def cycle6():
    return build_cubical(cyclic_spec(3, 1, [[1, 2]]))


@pytest.fixture(scope="session")
def cayley():
    return build_cubical(left_right_cayley_s3())


@pytest.fixture(scope="session")
def toric3():
    return build_cubical(cyclic_spec(3, 3, [[1, 2]] * 3))


@pytest.fixture(scope="session")
def toric3_chain(toric3, f2):
    sheaf = cubical_tensor_sheaf(toric3, [repetition_code(f2, 2)] * 3)
    return ChainComplex(sheaf)


@pytest.fixture(scope="session")
def toric3_ccz(toric3_chain):
    form = cube_form(toric3_chain, toric3_chain, toric3_chain)
    leg = CczLeg.from_complex(toric3_chain, 1)
    return CCZCode((leg, leg, leg), form)


@pytest.fixture(scope="session")
def t2rs(f4):
    x = build_cubical(cyclic_spec(4, 2, [[0, 1, 2, 3]] * 2))
    sheaf = cubical_tensor_sheaf(x, [reed_solomon(f4, 2)] * 2)
    return ChainComplex(sheaf)


@pytest.fixture(scope="session")
def torus7():
    return torus_triangulation()


@pytest.fixture(scope="session")
def torus7_chain(torus7, f2):
    return ChainComplex(constant_sheaf(torus7, f2))


@pytest.fixture(scope="session")
def tetra_chain(f2):
    return ChainComplex(constant_sheaf(simplex_boundary(4), f2))


@pytest.fixture(scope="session")
def rp3():
    return projective_space_3()


@pytest.fixture(scope="session")
def rp3_chain(rp3, f2):
    return ChainComplex(constant_sheaf(rp3, f2))


@pytest.fixture(scope="session")
def rs_fixture(f8):
    """The large Reed-Solomon cubical instance: V = Z_9, delta = q = 8, k = 2."""
    x = build_cubical(cyclic_spec(9, 3, [[1, 2, 3, 4, 5, 6, 7, 8]] * 3))
    sheaf = cubical_tensor_sheaf(x, [reed_solomon(f8, 2)] * 3)
    return ChainComplex(sheaf)


@pytest.fixture(scope="session")
def neg_control_chain(f8):
    """Tiny 3D instance with full local codes: the product condition fails."""
    x = build_cubical(cyclic_spec(2, 3, [[1]] * 3))
    sheaf = sheaf_from_local_codes(x, uniform_assignment(x, full_code(f8, 1)))
    return ChainComplex(sheaf)
