"""Cochains, cup products, and explicit cubical intersection forms.

The simplicial cup product multiplies the front-face value of one cochain
with the back-face value of the other inside every top cell, using the
global vertex order carried by the canonical (sorted-tuple) cell encoding.
The 2D and 3D cubical forms use explicit per-square / per-cube corner
terms instead; both are certified by cohomology invariance downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf
from .chain import ChainComplex
from .sheaf import SheafIntegrityError, product_sheaf


@dataclass
class Cochain:
    """A flat coordinate vector in one degree of a cochain complex."""

    cplx: ChainComplex
    degree: int
    vec: np.ndarray
    _value_memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.vec = np.asarray(self.vec, dtype=np.int64)
        want = self.cplx.degree_dim(self.degree)
        if self.vec.shape != (want,):
            raise ValueError(f"cochain vector has length {self.vec.shape}, expected {want}")

    @classmethod
    def zero(cls, cplx: ChainComplex, degree: int) -> "Cochain":
        return cls(cplx, degree, np.zeros(cplx.degree_dim(degree), dtype=np.int64))

    @classmethod
    def random(cls, cplx: ChainComplex, degree: int, rng) -> "Cochain":
        return cls(cplx, degree, cplx.fs.random_arr(rng, cplx.degree_dim(degree)))

    def cell_coords(self, i: int) -> np.ndarray:
        return self.vec[self.cplx.cell_slice(self.degree, i)]

    def values_on_tops(self, i: int) -> np.ndarray:
        """The section at cell i of this degree, as a function on top cells."""
        if i not in self._value_memo:
            self._value_memo[i] = self.cplx.sheaf.section_values(
                self.degree, i, self.cell_coords(i)
            )
        return self._value_memo[i]

    def coboundary(self) -> "Cochain":
        return Cochain(self.cplx, self.degree + 1, self.cplx.coboundary(self.degree, self.vec))

    def __add__(self, other: "Cochain") -> "Cochain":
        if self.cplx is not other.cplx or self.degree != other.degree:
            raise ValueError("cochain degree/complex mismatch")
        return Cochain(self.cplx, self.degree, self.vec ^ other.vec)

    def __eq__(self, other):
        return (
            isinstance(other, Cochain)
            and self.cplx is other.cplx
            and self.degree == other.degree
            and np.array_equal(self.vec, other.vec)
        )


def product_complex(*cplxs: ChainComplex) -> ChainComplex:
    """Cochain complex of the entrywise-product sheaf of the given legs."""
    return ChainComplex(product_sheaf(*(c.sheaf for c in cplxs)))


def constant_one_cochain(cplx: ChainComplex) -> Cochain:
    """The degree-0 cochain equal to 1 on every top cell above each vertex."""
    sheaf = cplx.sheaf
    vec = np.zeros(cplx.dims[0], dtype=np.int64)
    for i in range(cplx.x.n_cells(0)):
        ones = np.ones(len(sheaf.tops_above(0, i)), dtype=np.int64)
        coords = gf.coords_in_rowspace(sheaf.fs, sheaf.basis[0][i], sheaf.pivots[0][i], ones)
        if coords is None:
            raise ValueError("the all-ones section is not a section at some vertex")
        vec[cplx.cell_slice(0, i)] = coords
    return Cochain(cplx, 0, vec)


def _positions(big: np.ndarray, small: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(big, small)
    if pos.size and not np.array_equal(big[pos], small):
        raise AssertionError("up-set inclusion violated")
    return pos


def simplicial_cup(ca: Cochain, cb: Cochain, out: ChainComplex) -> Cochain:
    """Cup product of cochains over two sheaves on one simplicial complex.

    ``out`` must be the cochain complex of the product sheaf of the two
    legs; a value falling outside its section space signals a sheaf
    construction bug and raises SheafIntegrityError.
    """
    x = ca.cplx.x
    if x.kind != "simplicial":
        raise ValueError("cup products via vertex order need a simplicial complex")
    if cb.cplx.x is not x or out.x is not x:
        raise ValueError("cochains live on different complexes")
    i, j = ca.degree, cb.degree
    deg = i + j
    if deg > x.t:
        return Cochain.zero(out, deg)
    fs = out.fs
    sheaf = out.sheaf
    vec = np.zeros(out.dims[deg], dtype=np.int64)
    for idx, cell in enumerate(x.cells[deg]):
        front = cell[: i + 1]
        back = cell[i:]
        fd, fi = x.idx(front)
        bd, bi = x.idx(back)
        u = x.up_set(deg, idx, x.t)
        pos_f = _positions(x.up_set(fd, fi, x.t), u)
        pos_b = _positions(x.up_set(bd, bi, x.t), u)
        vals = fs.mul_arr(ca.values_on_tops(fi)[pos_f], cb.values_on_tops(bi)[pos_b])
        coords = gf.coords_in_rowspace(fs, sheaf.basis[deg][idx], sheaf.pivots[deg][idx], vals)
        if coords is None:
            raise SheafIntegrityError(
                f"cup value at {cell} falls outside the product sheaf section space"
            )
        vec[out.cell_slice(deg, idx)] = coords
    return Cochain(out, deg, vec)


@dataclass
class LeibnizReport:
    ok: bool
    witness_cell: tuple | None = None

    def to_json(self):
        return {"ok": self.ok, "witness": None if self.witness_cell is None else str(self.witness_cell)}


def leibniz_check(ca: Cochain, cb: Cochain, out: ChainComplex) -> LeibnizReport:
    """Exact check of d(a cup b) = (da cup b) + (a cup db)."""
    lhs = simplicial_cup(ca, cb, out).coboundary()
    rhs = simplicial_cup(ca.coboundary(), cb, out) + simplicial_cup(ca, cb.coboundary(), out)
    if lhs == rhs:
        return LeibnizReport(True)
    deg = lhs.degree
    x = out.x
    for i in range(x.n_cells(deg)):
        if not np.array_equal(
            lhs.vec[out.cell_slice(deg, i)], rhs.vec[out.cell_slice(deg, i)]
        ):
            return LeibnizReport(False, x.cell(deg, i))
    return LeibnizReport(False)


def sum_over_tops(c: Cochain) -> int:
    """Sum of a top-degree cochain's values over all top cells."""
    x = c.cplx.x
    if c.degree != x.t:
        raise ValueError("sum requires a top-degree cochain")
    total = 0
    for i in range(x.n_cells(x.t)):
        total ^= int(np.bitwise_xor.reduce(c.values_on_tops(i))) if c.values_on_tops(i).size else 0
    return total


def cup_triple_value(
    ca1: Cochain, ca2: Cochain, ca3: Cochain, out12: ChainComplex, out123: ChainComplex
) -> int:
    """((a1 cup a2) cup a3) summed over top cells."""
    x = ca1.cplx.x
    if ca1.degree + ca2.degree + ca3.degree != x.t:
        raise ValueError("cup degrees must sum to the complex dimension")
    return sum_over_tops(simplicial_cup(simplicial_cup(ca1, ca2, out12), ca3, out123))


def cup_quadruple_value(
    ca1: Cochain,
    ca2: Cochain,
    ca3: Cochain,
    ca4: Cochain,
    out12: ChainComplex,
    out123: ChainComplex,
    out1234: ChainComplex,
) -> int:
    """(((a1 cup a2) cup a3) cup a4) summed over top cells."""
    x = ca1.cplx.x
    if ca1.degree + ca2.degree + ca3.degree + ca4.degree != x.t:
        raise ValueError("cup degrees must sum to the complex dimension")
    c12 = simplicial_cup(ca1, ca2, out12)
    c123 = simplicial_cup(c12, ca3, out123)
    return sum_over_tops(simplicial_cup(c123, ca4, out1234))


# ---------------------------------------------------------------------------
# Explicit cubical intersection forms (2D squares, 3D cubes)
# ---------------------------------------------------------------------------


def _cub_edge(x, direction: int, base: int, label: int, bits: dict[int, int]) -> tuple[int, int]:
    s = (direction,)
    comp = tuple(j for j in range(x.t) if j != direction)
    cell = (s, int(base), (int(label),), tuple(int(bits[j]) for j in comp))
    return x.idx(cell)


def _square_corner_pairs(x, sq_cell):
    """The two corner (edge, edge) products contributing on one square."""
    p = x.spec.perms
    _, g, (au, av), _ = sq_cell
    e_u0 = _cub_edge(x, 0, g, au, {1: 0})
    e_0v = _cub_edge(x, 1, g, av, {0: 0})
    e_u1 = _cub_edge(x, 0, int(p[1][av][g]), au, {1: 1})
    e_1v = _cub_edge(x, 1, int(p[0][au][g]), av, {0: 1})
    return [(e_u1, e_0v), (e_1v, e_u0)]


def square_intersection_value(ca1: Cochain, ca2: Cochain) -> int:
    """Bilinear intersection form of two degree-1 cochains on a 2D square complex.

    On every square the horizontal string of the first cochain is shifted
    to the far side and crossed with the vertical string of the second,
    and vice versa; crossings multiply the attached values.
    """
    x = ca1.cplx.x
    if x.kind != "cubical" or x.t != 2:
        raise ValueError("square form needs a 2-dimensional cubical complex")
    if ca1.degree != 1 or ca2.degree != 1:
        raise ValueError("square form takes degree-1 cochains")
    fs = ca1.cplx.fs
    total = 0
    for sq_idx, sq in enumerate(x.cells[2]):
        for (d1, i1), (d2, i2) in _square_corner_pairs(x, sq):
            v1 = ca1.values_on_tops(i1)[_positions(x.up_set(1, i1, 2), np.array([sq_idx]))[0]]
            v2 = ca2.values_on_tops(i2)[_positions(x.up_set(1, i2, 2), np.array([sq_idx]))[0]]
            total ^= fs.mul(int(v1), int(v2))
    return total


def _cube_corner_triples(x, cu_cell):
    """The six corner (edge, edge, edge) products contributing in one cube."""
    p = x.spec.perms
    _, g, (au, av, aw), _ = cu_cell
    avw = int(p[1][av][p[2][aw][g]])
    auw = int(p[0][au][p[2][aw][g]])
    auv = int(p[0][au][p[1][av][g]])
    ag = {0: int(p[0][au][g]), 1: int(p[1][av][g]), 2: int(p[2][aw][g])}
    e = _cub_edge
    return [
        (e(x, 0, avw, au, {1: 1, 2: 1}), e(x, 1, ag[2], av, {0: 0, 2: 1}), e(x, 2, g, aw, {0: 0, 1: 0})),
        (e(x, 0, avw, au, {1: 1, 2: 1}), e(x, 2, ag[1], aw, {0: 0, 1: 1}), e(x, 1, g, av, {0: 0, 2: 0})),
        (e(x, 1, auw, av, {0: 1, 2: 1}), e(x, 2, ag[0], aw, {0: 1, 1: 0}), e(x, 0, g, au, {1: 0, 2: 0})),
        (e(x, 1, auw, av, {0: 1, 2: 1}), e(x, 0, ag[2], au, {1: 0, 2: 1}), e(x, 2, g, aw, {0: 0, 1: 0})),
        (e(x, 2, auv, aw, {0: 1, 1: 1}), e(x, 0, ag[1], au, {1: 1, 2: 0}), e(x, 1, g, av, {0: 0, 2: 0})),
        (e(x, 2, auv, aw, {0: 1, 1: 1}), e(x, 1, ag[0], av, {0: 1, 2: 0}), e(x, 0, g, au, {1: 0, 2: 0})),
    ]


def cube_intersection_value(ca1: Cochain, ca2: Cochain, ca3: Cochain) -> int:
    """Trilinear intersection form of degree-1 cochains on a 3D cubical complex.

    Six shifted corner crossings per cube; the attached values multiply.
    """
    x = ca1.cplx.x
    if x.kind != "cubical" or x.t != 3:
        raise ValueError("cube form needs a 3-dimensional cubical complex")
    for c in (ca1, ca2, ca3):
        if c.degree != 1:
            raise ValueError("cube form takes degree-1 cochains")
    fs = ca1.cplx.fs
    total = 0
    for cu_idx, cu in enumerate(x.cells[3]):
        for (d1, i1), (d2, i2), (d3, i3) in _cube_corner_triples(x, cu):
            v1 = ca1.values_on_tops(i1)[_positions(x.up_set(1, i1, 3), np.array([cu_idx]))[0]]
            v2 = ca2.values_on_tops(i2)[_positions(x.up_set(1, i2, 3), np.array([cu_idx]))[0]]
            v3 = ca3.values_on_tops(i3)[_positions(x.up_set(1, i3, 3), np.array([cu_idx]))[0]]
            total ^= fs.mul(fs.mul(int(v1), int(v2)), int(v3))
    return total


# ---------------------------------------------------------------------------
# Sparse entry generation for the physical-qudit forms
# ---------------------------------------------------------------------------


def square_form_entries(c1: ChainComplex, c2: ChainComplex):
    """COO entries (j1, j2, value) of the 2D bilinear form on qudit coordinates."""
    x = c1.x
    if x.kind != "cubical" or x.t != 2:
        raise ValueError("square form needs a 2-dimensional cubical complex")
    fs = c1.fs
    j1s, j2s, vals = [], [], []
    for sq_idx, sq in enumerate(x.cells[2]):
        top = np.array([sq_idx])
        for (d1, i1), (d2, i2) in _square_corner_pairs(x, sq):
            b1 = c1.sheaf.basis[1][i1][:, _positions(x.up_set(1, i1, 2), top)[0]]
            b2 = c2.sheaf.basis[1][i2][:, _positions(x.up_set(1, i2, 2), top)[0]]
            o1, o2 = c1.offsets[1][i1], c2.offsets[1][i2]
            prod = fs.mul_arr(b1[:, None], b2[None, :])
            r, c = np.nonzero(prod)
            j1s.append(r + o1)
            j2s.append(c + o2)
            vals.append(prod[r, c])
    return _coalesce(fs, [j1s, j2s], vals)


def cube_form_entries(c1: ChainComplex, c2: ChainComplex, c3: ChainComplex):
    """COO entries (j1, j2, j3, value) of the 3D trilinear form on qudit coordinates."""
    x = c1.x
    if x.kind != "cubical" or x.t != 3:
        raise ValueError("cube form needs a 3-dimensional cubical complex")
    if c2.x is not x or c3.x is not x:
        raise ValueError("legs live on different complexes")
    fs = c1.fs
    j1s, j2s, j3s, vals = [], [], [], []
    for cu_idx, cu in enumerate(x.cells[3]):
        top = np.array([cu_idx])
        for (d1, i1), (d2, i2), (d3, i3) in _cube_corner_triples(x, cu):
            b1 = c1.sheaf.basis[1][i1][:, _positions(x.up_set(1, i1, 3), top)[0]]
            b2 = c2.sheaf.basis[1][i2][:, _positions(x.up_set(1, i2, 3), top)[0]]
            b3 = c3.sheaf.basis[1][i3][:, _positions(x.up_set(1, i3, 3), top)[0]]
            prod = fs.mul_arr(fs.mul_arr(b1[:, None, None], b2[None, :, None]), b3[None, None, :])
            r, c, w = np.nonzero(prod)
            j1s.append(r + c1.offsets[1][i1])
            j2s.append(c + c2.offsets[1][i2])
            j3s.append(w + c3.offsets[1][i3])
            vals.append(prod[r, c, w])
    return _coalesce(fs, [j1s, j2s, j3s], vals)


def simplicial_form_entries(legs: list[ChainComplex], degrees: list[int]):
    """COO entries of the iterated-cup form on a simplicial complex.

    On each top simplex the iterated front/back splitting leaves exactly
    one product of consecutive faces, so the form materializes directly
    from the section bases of those faces.
    """
    x = legs[0].x
    if x.kind != "simplicial":
        raise ValueError("needs a simplicial complex")
    if sum(degrees) != x.t:
        raise ValueError(f"degrees {degrees} must sum to the complex dimension {x.t}")
    fs = legs[0].fs
    nlegs = len(legs)
    idx_lists = [[] for _ in range(nlegs)]
    vals = []
    for top_idx, cell in enumerate(x.cells[x.t]):
        cuts = np.cumsum([0] + list(degrees))
        faces = [cell[cuts[m] : cuts[m + 1] + 1] for m in range(nlegs)]
        cols = []
        offs = []
        for m, face in enumerate(faces):
            fd, fi = x.idx(face)
            pos = _positions(x.up_set(fd, fi, x.t), np.array([top_idx]))[0]
            cols.append(legs[m].sheaf.basis[fd][fi][:, pos])
            offs.append(legs[m].offsets[fd][fi])
        prod = cols[0]
        for m in range(1, nlegs):
            prod = fs.mul_arr(prod[..., None], cols[m][(None,) * m])
        nz = np.nonzero(prod)
        for m in range(nlegs):
            idx_lists[m].append(nz[m] + offs[m])
        vals.append(prod[nz])
    return _coalesce(fs, idx_lists, vals)


def _coalesce(fs, idx_lists, vals):
    """Merge duplicate multi-index entries by field addition (XOR)."""
    if not vals or sum(v.size for v in vals) == 0:
        return tuple(np.empty(0, dtype=np.int64) for _ in idx_lists) + (np.empty(0, dtype=np.int64),)
    idxs = [np.concatenate([np.asarray(a, dtype=np.int64) for a in lst]) for lst in idx_lists]
    v = np.concatenate(vals).astype(np.int64)
    order = np.lexsort(tuple(reversed(idxs)))
    idxs = [a[order] for a in idxs]
    v = v[order]
    boundary = np.zeros(v.size, dtype=bool)
    boundary[0] = True
    for a in idxs:
        boundary[1:] |= np.diff(a) != 0
    starts = np.nonzero(boundary)[0]
    red = np.bitwise_xor.reduceat(v, starts)
    keep = red != 0
    return tuple(a[starts][keep] for a in idxs) + (red[keep],)
