"""Duality checks between a sheaf and its dual sheaf.

Three layers: the top-homology / dual-global-sections identification
(holds for every sheaf), the full dimension-level Poincaré pairing
(needs local acyclicity), and the five finite exactness statements plus
the per-cell long exact sequence that the duality argument rests on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf
from .chain import ChainComplex
from .gf import SpMat
from .sheaf import (
    Sheaf,
    dual_section_space,
    dual_sheaf,
    is_locally_acyclic,
    local_star_maps,
)


@dataclass
class SectionDualityReport:
    dim_top_homology: int
    dim_dual_h0: int
    dim_global_sections: int
    subspace_match: bool
    witness_match: bool

    @property
    def ok(self) -> bool:
        return (
            self.dim_top_homology == self.dim_dual_h0 == self.dim_global_sections
            and self.subspace_match
            and self.witness_match
        )

    def to_json(self):
        return {
            "ok": self.ok,
            "dim_Ht": self.dim_top_homology,
            "dim_H0_dual": self.dim_dual_h0,
            "dim_global_sections": self.dim_global_sections,
            "subspace_match": self.subspace_match,
            "witness_match": self.witness_match,
        }


def global_section_basis(sheaf: Sheaf) -> np.ndarray:
    """Top-cell functions whose every local restriction is dual-code valued."""
    x, fs = sheaf.x, sheaf.fs
    n_top = x.n_cells(x.t)
    rows_i, cols_i, vals = [], [], []
    nrows = 0
    for i in range(x.n_cells(x.t - 1)):
        gen = sheaf.basis[x.t - 1][i]
        if gen.shape[0] == 0:
            continue
        u = x.up_set(x.t - 1, i, x.t)
        r, c = np.nonzero(gen)
        rows_i.append(r + nrows)
        cols_i.append(u[c])
        vals.append(gen[r, c])
        nrows += gen.shape[0]
    if nrows == 0:
        return np.eye(n_top, dtype=np.int64)
    h = SpMat(
        fs, (nrows, n_top), np.concatenate(rows_i), np.concatenate(cols_i), np.concatenate(vals)
    )
    return h.kernel_basis()


def verify_section_duality(
    cplx: ChainComplex, dual_cplx: ChainComplex | None = None
) -> SectionDualityReport:
    """Top homology = degree-0 cohomology of the dual = dual global sections.

    All three spaces are computed independently and compared as subspaces
    of the top-cell coordinate space, with an explicit witness map from
    dual vertex sections to global top-cell functions.
    """
    sheaf = cplx.sheaf
    x, fs = sheaf.x, sheaf.fs
    if dual_cplx is None:
        dual_cplx = ChainComplex(dual_sheaf(sheaf))
    ht = cplx.cohomology(x.t, "homology")
    h0 = dual_cplx.cohomology(0, "co")
    sections = global_section_basis(sheaf)
    # top-cell coordinates of the primal complex are exactly X(t) functions
    ht_basis = gf.dense_rref(fs, ht[1])[0] if ht[1].size else ht[1]
    sec_rref = gf.dense_rref(fs, sections)[0] if sections.size else sections
    subspace_match = ht_basis.shape == sec_rref.shape and np.array_equal(ht_basis, sec_rref)
    # witness: extend each dual vertex cocycle to a top-cell function
    witness_rows = []
    dsheaf = dual_cplx.sheaf
    for vec in h0[1]:
        out = np.zeros(x.n_cells(x.t), dtype=np.int64)
        seen = np.zeros(x.n_cells(x.t), dtype=bool)
        for vi in range(x.n_cells(0)):
            vals = dsheaf.section_values(0, vi, vec[dual_cplx.cell_slice(0, vi)])
            tops = dsheaf.tops_above(0, vi)
            out[tops] = vals
            seen[tops] = True
        if not seen.all():
            return SectionDualityReport(ht[0], h0[0], sections.shape[0], subspace_match, False)
        witness_rows.append(out)
    if witness_rows:
        wit = gf.dense_rref(fs, np.array(witness_rows))[0]
        witness_match = wit.shape == sec_rref.shape and np.array_equal(wit, sec_rref)
    else:
        witness_match = sections.shape[0] == 0
    return SectionDualityReport(ht[0], h0[0], sections.shape[0], subspace_match, witness_match)


@dataclass
class DualityReport:
    pairs: list  # (i, dim H_{t-i}(F), dim H^i(F_dual))
    acyclic: bool
    acyclic_failures: list
    applicable: bool

    @property
    def ok(self) -> bool:
        return self.applicable and all(a == b for _, a, b in self.pairs)

    @property
    def mismatches(self):
        return [(i, a, b) for i, a, b in self.pairs if a != b]

    def to_json(self):
        return {
            "ok": self.ok,
            "applicable": self.applicable,
            "acyclic": self.acyclic,
            "pairs": [
                {"i": i, "dim_H_homology": a, "dim_H_dual_cohomology": b} for i, a, b in self.pairs
            ],
        }


def verify_poincare(cplx: ChainComplex, dual_cplx: ChainComplex | None = None) -> DualityReport:
    """Dimension pairing H_{t-i}(F) vs H^i(dual F) for 0 <= i <= t-1.

    Local acyclicity is the hypothesis; when it fails the report is marked
    not applicable but still records the dimension pairs.
    """
    sheaf = cplx.sheaf
    x = sheaf.x
    if dual_cplx is None:
        dual_cplx = ChainComplex(dual_sheaf(sheaf))
    ac = is_locally_acyclic(sheaf)
    pairs = []
    for i in range(x.t):
        a = cplx.cohomology(x.t - i, "homology")[0]
        b = dual_cplx.cohomology(i, "co")[0]
        pairs.append((i, a, b))
    return DualityReport(
        pairs=pairs,
        acyclic=ac.ok,
        acyclic_failures=[f.to_json() for f in ac.failures[:8]],
        applicable=ac.ok,
    )


# ---------------------------------------------------------------------------
# The five exactness statements and the long exact sequence
# ---------------------------------------------------------------------------


@dataclass
class ExactnessReport:
    statements: dict
    long_exact: bool | None

    @property
    def ok(self) -> bool:
        base = all(self.statements.values())
        return base and (self.long_exact is None or self.long_exact)

    def to_json(self):
        return {"ok": self.ok, "statements": self.statements, "long_exact": self.long_exact}


def _vertex_collection_maps(sheaf: Sheaf, i: int) -> tuple[SpMat, SpMat]:
    """The inclusion of degree-i chains into per-vertex collections and the
    edge-difference map between per-vertex and per-edge collections."""
    x, fs = sheaf.x, sheaf.fs
    dims_i = [sheaf.dim_at(i, j) for j in range(x.n_cells(i))]
    col_off = np.zeros(x.n_cells(i) + 1, dtype=np.int64)
    col_off[1:] = np.cumsum(dims_i)

    def collection_offsets(level: int):
        offs = []
        total = 0
        for v in range(x.n_cells(level)):
            per = {}
            for tau in x.up_set(level, v, i):
                per[int(tau)] = total
                total += dims_i[int(tau)]
            offs.append(per)
        return offs, total

    v_offs, n_vertexblocks = collection_offsets(0)
    rows, cols, vals = [], [], []
    for v in range(x.n_cells(0)):
        for tau, off in v_offs[v].items():
            for a in range(dims_i[tau]):
                rows.append(off + a)
                cols.append(int(col_off[tau]) + a)
                vals.append(1)
    g_map = SpMat(fs, (n_vertexblocks, int(col_off[-1])), rows, cols, vals)

    e_offs, n_edgeblocks = collection_offsets(1)
    rows, cols, vals = [], [], []
    for e in range(x.n_cells(1)):
        for v in sheaf.x.down[1][e]:
            for tau, off in e_offs[e].items():
                src = v_offs[v].get(tau)
                if src is None:
                    continue
                for a in range(dims_i[tau]):
                    rows.append(off + a)
                    cols.append(src + a)
                    vals.append(1)
    # same (row, col) may appear from both endpoints; coalesce via dense add
    d_map = _coalesced(fs, (n_edgeblocks, n_vertexblocks), rows, cols, vals)
    return g_map, d_map


def _coalesced(fs, shape, rows, cols, vals) -> SpMat:
    if not rows:
        return SpMat.zeros(fs, shape)
    r = np.asarray(rows, dtype=np.int64)
    c = np.asarray(cols, dtype=np.int64)
    v = np.asarray(vals, dtype=np.int64)
    order = np.lexsort((c, r))
    r, c, v = r[order], c[order], v[order]
    boundary = np.ones(r.size, dtype=bool)
    boundary[1:] = (np.diff(r) != 0) | (np.diff(c) != 0)
    starts = np.nonzero(boundary)[0]
    red = np.bitwise_xor.reduceat(v, starts)
    return SpMat(fs, shape, r[starts], c[starts], red)


def verify_exactness(cplx: ChainComplex, dual_cplx: ChainComplex | None = None) -> ExactnessReport:
    """The five finite exactness statements behind the duality theorem.

    1. degree-0 chains match the per-vertex collections of vertex sections;
    2. degree-i chains embed as the equalizer of per-vertex collections
       over per-edge collections (i = 1..t);
    3. each cell's section space injects into the next level up;
    4. top-degree dual cochains match the top-cell coordinate space;
    5. each cell's dual section space is the kernel of the transposed
       local coboundary at the top level.

    The per-cell long exact sequence is checked whenever the sheaf is
    locally acyclic (it is that statement's verification).
    """
    sheaf = cplx.sheaf
    x, fs = sheaf.x, sheaf.fs
    if dual_cplx is None:
        dual_cplx = ChainComplex(dual_sheaf(sheaf))
    statements: dict[str, bool] = {}
    # 1: free identification at the vertex level
    statements["1"] = cplx.dims[0] == sum(
        sheaf.dim_at(0, v) for v in range(x.n_cells(0))
    )
    # 2: chains = matching per-vertex collections
    ok2 = True
    for i in range(1, x.t + 1):
        g_map, d_map = _vertex_collection_maps(sheaf, i)
        rg = g_map.rank()
        injective = rg == cplx.dims[i]
        composes = (d_map @ g_map).is_zero()
        exact_mid = rg + d_map.rank() == g_map.shape[0]
        if not (injective and composes and exact_mid):
            ok2 = False
            break
    statements["2"] = ok2
    # 3: per-cell injectivity into the next level
    ok3 = True
    for d in range(x.t):
        for j in range(x.n_cells(d)):
            m0 = local_star_maps(sheaf, d, j)[0]
            if m0.rank() != sheaf.dim_at(d, j):
                ok3 = False
                break
        if not ok3:
            break
    statements["3"] = ok3
    # 4: top-degree dual cochains are top-cell functions
    statements["4"] = dual_cplx.dims[x.t] == x.n_cells(x.t)
    # 5: dual section space = kernel of the transposed top local coboundary
    ok5 = True
    for d in range(x.t):
        for j in range(x.n_cells(d)):
            maps = local_star_maps(sheaf, d, j)
            ker = maps[-1].T.kernel_basis()
            dual_b = dual_section_space(sheaf, d, j)
            if ker.shape != dual_b.shape or not np.array_equal(ker, dual_b):
                ok5 = False
                break
        if not ok5:
            break
    statements["5"] = ok5
    ac = is_locally_acyclic(sheaf)
    long_exact = ac.ok if ac.ok else None
    return ExactnessReport(statements=statements, long_exact=long_exact)
