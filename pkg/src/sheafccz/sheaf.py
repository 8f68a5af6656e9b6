"""Sheaves of section spaces on cell complexes.

A sheaf stores, for every cell, a basis of its section space represented
extensionally: sections are functions on the top cells above the cell
(columns in canonical complex order, basis rows in RREF).  Restriction
maps are then literal coordinate restrictions, which makes the injectivity
of sections-to-functions true by construction.

Sheaves are determined by the local codes attached to the codimension-1
cells; lower section spaces are cut out as kernels of the stacked local
parity checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf
from .complexes import CellComplex
from .gf import FieldSpec, SpMat
from .localcode import LinCode, dual, schur_span, zero_code


class SheafIntegrityError(Exception):
    """A stored section restricts outside the target cell's section space."""


@dataclass
class LocalCodeAssignment:
    """Local code per (t-1)-cell, coordinates in canonical up-set order."""

    codes: dict[int, LinCode]

    def code_at(self, idx: int) -> LinCode:
        return self.codes[idx]


def uniform_assignment(x: CellComplex, code: LinCode) -> LocalCodeAssignment:
    codes = {}
    for i in range(x.n_cells(x.t - 1)):
        width = len(x.up_set(x.t - 1, i, x.t))
        if width != code.length:
            raise ValueError(
                f"cell {x.cell(x.t - 1, i)} has {width} top cells above it, "
                f"code has length {code.length}"
            )
        codes[i] = code
    return LocalCodeAssignment(codes)


def directional_assignment(x: CellComplex, codes: list[LinCode]) -> LocalCodeAssignment:
    """Cubical assignment: a (t-1)-cell missing direction j carries codes[j].

    Generator columns are permuted from label order into the canonical
    up-set order of the complex.
    """
    if x.kind != "cubical":
        raise ValueError("directional assignments need a cubical complex")
    spec = x.spec
    if len(codes) != x.t:
        raise ValueError(f"need {x.t} directional codes, got {len(codes)}")
    for c in codes:
        if c.length != spec.delta:
            raise ValueError(f"directional code length {c.length} != delta {spec.delta}")
    out = {}
    for i in range(x.n_cells(x.t - 1)):
        cell = x.cell(x.t - 1, i)
        s = cell[0]
        (j,) = [d for d in range(x.t) if d not in s]
        perm = _label_order_to_upset(x, x.t - 1, i)
        gen = np.zeros_like(codes[j].generator)
        gen[:, perm] = codes[j].generator
        out[i] = LinCode(codes[j].fs, codes[j].length, gen)
    return LocalCodeAssignment(out)


def _label_order_to_upset(x: CellComplex, d: int, i: int) -> np.ndarray:
    """Position in the canonical up-set for each label tuple (lex order)."""
    spec = x.spec
    cell = x.cell(d, i)
    s, v, labels, bits = cell
    comp = [j for j in range(x.t) if j not in s]
    inv = {j: [np.argsort(p) for p in spec.perms[j]] for j in comp}
    u = x.up_set(d, i, x.t)
    full_s = tuple(range(x.t))
    pos = np.empty(spec.delta ** len(comp), dtype=np.int64)
    for p, lab in enumerate(np.ndindex(*([spec.delta] * len(comp)))):
        base = v
        for bslot, j in enumerate(comp):
            if bits[bslot] == 1:
                base = int(inv[j][lab[bslot]][base])
        merged = [0] * x.t
        for slot, j in enumerate(s):
            merged[j] = labels[slot]
        for slot, j in enumerate(comp):
            merged[j] = lab[slot]
        top = (full_s, base, tuple(merged), ())
        td, ti = x.idx(top)
        pos[p] = int(np.searchsorted(u, ti))
        if u[pos[p]] != ti:
            raise AssertionError("top cell missing from up-set")
    return pos


class Sheaf:
    """Per-cell section spaces with extensional (function) representation."""

    def __init__(self, x: CellComplex, fs: FieldSpec):
        self.x = x
        self.fs = fs
        self.basis: list[list[np.ndarray]] = [[None] * x.n_cells(d) for d in range(x.t + 1)]
        self.pivots: list[list[np.ndarray]] = [[None] * x.n_cells(d) for d in range(x.t + 1)]

    # -- accessors ---------------------------------------------------------

    def dim_at(self, d: int, i: int) -> int:
        return self.basis[d][i].shape[0]

    def section_basis(self, d: int, i: int) -> np.ndarray:
        return self.basis[d][i]

    def tops_above(self, d: int, i: int) -> np.ndarray:
        return self.x.up_set(d, i, self.x.t)

    def set_space(self, d: int, i: int, rows: np.ndarray):
        width = len(self.tops_above(d, i))
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, width)
        rref, piv = gf.dense_rref(self.fs, rows)
        self.basis[d][i] = rref
        self.pivots[d][i] = piv

    def local_code(self, i: int) -> LinCode:
        """The (t-1)-cell local code, read off the stored basis."""
        b = self.basis[self.x.t - 1][i]
        if b.shape[0] == 0:
            return zero_code(self.fs, b.shape[1])
        return LinCode(self.fs, b.shape[1], b)

    def same_sections(self, other: "Sheaf") -> bool:
        if self.x is not other.x or self.fs != other.fs:
            return False
        for d in range(self.x.t + 1):
            for i in range(self.x.n_cells(d)):
                if not np.array_equal(self.basis[d][i], other.basis[d][i]):
                    return False
        return True

    # -- restriction --------------------------------------------------------

    def upset_positions(self, src: tuple[int, int], dst: tuple[int, int]) -> np.ndarray:
        """Column positions of dst's top cells inside src's top-cell list."""
        u_src = self.tops_above(*src)
        u_dst = self.tops_above(*dst)
        pos = np.searchsorted(u_src, u_dst)
        if not np.array_equal(u_src[pos], u_dst):
            raise ValueError(f"cells are not comparable: {src} vs {dst}")
        return pos

    def restriction(self, src: tuple[int, int], dst: tuple[int, int]) -> np.ndarray:
        """Matrix of the restriction map (column convention: y = M x)."""
        if src == dst:
            return np.eye(self.dim_at(*src), dtype=np.int64)
        sd, si = src
        dd, di = dst
        if not (sd <= dd and di in set(self.x.up_set(sd, si, dd).tolist())):
            raise ValueError(f"cells are not comparable: {src} vs {dst}")
        pos = self.upset_positions(src, dst)
        restricted = self.basis[sd][si][:, pos]
        coords = gf.coords_in_rowspace(self.fs, self.basis[dd][di], self.pivots[dd][di], restricted)
        if coords is None:
            raise SheafIntegrityError(
                f"section of {self.x.cell(sd, si)} restricts outside the "
                f"space at {self.x.cell(dd, di)}"
            )
        return coords.T.copy()

    def section_values(self, d: int, i: int, coords: np.ndarray) -> np.ndarray:
        """A section (coordinates in the cell basis) as a function on top cells."""
        b = self.basis[d][i]
        if b.shape[0] == 0:
            return np.zeros(b.shape[1], dtype=np.int64)
        return gf.matmul(self.fs, np.asarray(coords, dtype=np.int64)[None, :], b)[0]

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "field": self.fs.to_json(),
            "spaces": [
                [b.tolist() for b in self.basis[d]] for d in range(self.x.t + 1)
            ],
        }

    @classmethod
    def from_json(cls, x: CellComplex, data: dict) -> "Sheaf":
        fs = FieldSpec.from_json(data["field"])
        sheaf = cls(x, fs)
        for d in range(x.t + 1):
            for i in range(x.n_cells(d)):
                rows = np.asarray(data["spaces"][d][i], dtype=np.int64)
                width = len(sheaf.tops_above(d, i))
                sheaf.set_space(d, i, rows.reshape(-1, width))
        return sheaf

    def __repr__(self):
        dims = [sum(self.dim_at(d, i) for i in range(self.x.n_cells(d))) for d in range(self.x.t + 1)]
        return f"Sheaf(q={self.fs.q}, cochain dims={dims})"


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def sheaf_from_local_codes(x: CellComplex, assignment: LocalCodeAssignment) -> Sheaf:
    """The unique sheaf whose (t-1)-cell spaces are the given local codes.

    Every lower section space is the kernel of the stacked dual parity
    checks of the local codes sitting above the cell.
    """
    t = x.t
    for i in range(x.n_cells(t - 1)):
        if i not in assignment.codes:
            raise ValueError(f"missing local code for cell {x.cell(t - 1, i)}")
    fs = next(iter(assignment.codes.values())).fs
    sheaf = Sheaf(x, fs)
    for i in range(x.n_cells(t)):
        sheaf.set_space(t, i, np.ones((1, 1), dtype=np.int64))
    dual_cache: dict[int, np.ndarray] = {}
    for i in range(x.n_cells(t - 1)):
        code = assignment.code_at(i)
        width = len(x.up_set(t - 1, i, t))
        if code.length != width:
            raise ValueError(
                f"local code at {x.cell(t - 1, i)} has length {code.length}, expected {width}"
            )
        sheaf.set_space(t - 1, i, code.generator)
        dual_cache[i] = dual(code).generator
    for d in range(t - 2, -1, -1):
        for i in range(x.n_cells(d)):
            u = x.up_set(d, i, t)
            col_of = {int(c): p for p, c in enumerate(u)}
            rows_i, cols_i, vals = [], [], []
            nrows = 0
            for f in x.up_set(d, i, t - 1):
                checks = dual_cache[int(f)]
                if checks.shape[0] == 0:
                    continue
                u_f = x.up_set(t - 1, int(f), t)
                pos = np.array([col_of[int(c)] for c in u_f], dtype=np.int64)
                r, c = np.nonzero(checks)
                rows_i.append(r + nrows)
                cols_i.append(pos[c])
                vals.append(checks[r, c])
                nrows += checks.shape[0]
            if nrows == 0:
                ker = np.eye(len(u), dtype=np.int64)
            else:
                h = SpMat(
                    fs,
                    (nrows, len(u)),
                    np.concatenate(rows_i),
                    np.concatenate(cols_i),
                    np.concatenate(vals),
                )
                ker = h.kernel_basis()
            sheaf.set_space(d, i, ker)
    return sheaf


def cubical_tensor_sheaf(x: CellComplex, codes: list[LinCode]) -> Sheaf:
    """Tensor-coefficient sheaf on a cubical complex.

    The section space of a cell is the image of the Kronecker product of
    the generators along its unlabeled directions, laid out on the top
    cells above the cell.
    """
    if x.kind != "cubical":
        raise ValueError("cubical_tensor_sheaf needs a cubical complex")
    spec = x.spec
    if len(codes) != x.t:
        raise ValueError(f"need {x.t} directional codes, got {len(codes)}")
    for c in codes:
        if c.length != spec.delta:
            raise ValueError(f"code length {c.length} != delta {spec.delta}")
    fs = codes[0].fs
    sheaf = Sheaf(x, fs)
    for d in range(x.t + 1):
        for i in range(x.n_cells(d)):
            cell = x.cell(d, i)
            s = cell[0]
            comp = [j for j in range(x.t) if j not in s]
            if not comp:
                sheaf.set_space(d, i, np.ones((1, 1), dtype=np.int64))
                continue
            gen = codes[comp[0]].generator
            for j in comp[1:]:
                if gen.shape[0] == 0 or codes[j].dim == 0:
                    gen = np.zeros((0, gen.shape[1] * spec.delta), dtype=np.int64)
                    break
                rows = []
                for urow in gen:
                    for vrow in codes[j].generator:
                        rows.append(fs.mul_arr(urow[:, None], vrow[None, :]).ravel())
                gen = np.array(rows)
            perm = _label_order_to_upset(x, d, i)
            laid = np.zeros_like(gen)
            laid[:, perm] = gen
            sheaf.set_space(d, i, laid)
    return sheaf


def constant_sheaf(x: CellComplex, fs: FieldSpec) -> Sheaf:
    """All-ones local codes: sections locally constant on top cells."""
    from .localcode import repetition_code

    codes = {}
    for i in range(x.n_cells(x.t - 1)):
        codes[i] = repetition_code(fs, len(x.up_set(x.t - 1, i, x.t)))
    return sheaf_from_local_codes(x, LocalCodeAssignment(codes))


def dual_sheaf(sheaf: Sheaf) -> Sheaf:
    """Sheaf rebuilt from the duals of the (t-1)-cell local codes."""
    codes = {
        i: dual(sheaf.local_code(i)) for i in range(sheaf.x.n_cells(sheaf.x.t - 1))
    }
    return sheaf_from_local_codes(sheaf.x, LocalCodeAssignment(codes))


def product_sheaf(*sheaves: Sheaf) -> Sheaf:
    """Sheaf of the entrywise products of the (t-1)-cell local codes."""
    if not 2 <= len(sheaves) <= 3:
        raise ValueError("product_sheaf takes 2 or 3 sheaves")
    x = sheaves[0].x
    for s in sheaves[1:]:
        if s.x is not x:
            raise ValueError("sheaves live on different complexes")
    codes = {}
    for i in range(x.n_cells(x.t - 1)):
        codes[i] = schur_span(*(s.local_code(i) for s in sheaves))
    return sheaf_from_local_codes(x, LocalCodeAssignment(codes))


# ---------------------------------------------------------------------------
# Axioms, local exactness
# ---------------------------------------------------------------------------


@dataclass
class AxiomFailure:
    cell: tuple
    axiom: str
    detail: str

    def to_json(self):
        return {"cell": str(self.cell), "axiom": self.axiom, "detail": self.detail}


@dataclass
class AxiomReport:
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"ok": self.ok, "failures": [f.to_json() for f in self.failures]}


def _block_map(sheaf: Sheaf, srcs: list[tuple[int, int]], dsts: list[tuple[int, int]]) -> SpMat:
    """Column-convention matrix of summed restrictions between cell sums.

    Maps c -> (sum over immediate faces pi of dst with pi in srcs of
    res(c_pi)); the src cells must sit one dimension below the dst cells.
    """
    fs = sheaf.fs
    src_off, n_src = {}, 0
    for c in srcs:
        src_off[c] = n_src
        n_src += sheaf.dim_at(*c)
    dst_off, n_dst = {}, 0
    for c in dsts:
        dst_off[c] = n_dst
        n_dst += sheaf.dim_at(*c)
    src_set = set(srcs)
    rows, cols, vals = [], [], []
    for cd in dsts:
        dd, di = cd
        for fi in sheaf.x.down[dd][di]:
            cs = (dd - 1, fi)
            if cs not in src_set:
                continue
            m = sheaf.restriction(cs, cd)
            r, c = np.nonzero(m)
            rows.append(r + dst_off[cd])
            cols.append(c + src_off[cs])
            vals.append(m[r, c])
    if rows:
        return SpMat(
            fs, (n_dst, n_src), np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
        )
    return SpMat.zeros(fs, (n_dst, n_src))


def local_star_maps(sheaf: Sheaf, d: int, i: int) -> list[SpMat]:
    """Coboundary maps of the cochain complex of the cells above one cell.

    Degree j holds the sum of section spaces over the (d+j)-cells above the
    cell (degree 0 is the cell's own space); maps sum restrictions over
    immediate faces.
    """
    x = sheaf.x
    levels = [[(d, i)]] + [
        [(k, int(j)) for j in x.up_set(d, i, k)] for k in range(d + 1, x.t + 1)
    ]
    return [_block_map(sheaf, levels[j], levels[j + 1]) for j in range(len(levels) - 1)]


def dual_section_space(sheaf: Sheaf, d: int, i: int) -> np.ndarray:
    """Basis of the dual sheaf's section space at one cell (RREF rows)."""
    x, fs = sheaf.x, sheaf.fs
    if d == x.t:
        return np.ones((1, 1), dtype=np.int64)
    u = x.up_set(d, i, x.t)
    col_of = {int(c): p for p, c in enumerate(u)}
    rows_i, cols_i, vals = [], [], []
    nrows = 0
    for f in x.up_set(d, i, x.t - 1):
        gen = sheaf.basis[x.t - 1][int(f)]
        if gen.shape[0] == 0:
            continue
        u_f = x.up_set(x.t - 1, int(f), x.t)
        pos = np.array([col_of[int(c)] for c in u_f], dtype=np.int64)
        r, c = np.nonzero(gen)
        rows_i.append(r + nrows)
        cols_i.append(pos[c])
        vals.append(gen[r, c])
        nrows += gen.shape[0]
    if nrows == 0:
        return np.eye(len(u), dtype=np.int64)
    h = SpMat(fs, (nrows, len(u)), np.concatenate(rows_i), np.concatenate(cols_i), np.concatenate(vals))
    return h.kernel_basis()


def verify_axioms(sheaf: Sheaf) -> AxiomReport:
    """Identity and gluability of every cell, as exactness rank conditions."""
    x = sheaf.x
    failures: list[AxiomFailure] = []
    for d in range(x.t):
        for i in range(x.n_cells(d)):
            try:
                maps = local_star_maps(sheaf, d, i)
            except SheafIntegrityError as exc:
                failures.append(AxiomFailure(x.cell(d, i), "restriction", str(exc)))
                continue
            m0 = maps[0]
            r0 = m0.rank()
            if r0 != sheaf.dim_at(d, i):
                failures.append(
                    AxiomFailure(
                        x.cell(d, i),
                        "identity",
                        f"rank {r0} < dim {sheaf.dim_at(d, i)}",
                    )
                )
            if d <= x.t - 2:
                m1 = maps[1]
                if not (m1 @ m0).is_zero():
                    failures.append(
                        AxiomFailure(x.cell(d, i), "gluability", "composition is nonzero")
                    )
                    continue
                mid = m0.shape[0]
                r1 = m1.rank()
                if r0 + r1 != mid:
                    failures.append(
                        AxiomFailure(
                            x.cell(d, i),
                            "gluability",
                            f"rank {r0} + rank {r1} != middle dim {mid}",
                        )
                    )
    return AxiomReport(failures)


@dataclass
class AcyclicityReport:
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self):
        return {"ok": self.ok, "failures": [f.to_json() for f in self.failures]}


def is_locally_acyclic(sheaf: Sheaf) -> AcyclicityReport:
    """Exactness of the full local sequence above every cell.

    For an i-cell the sequence runs from the cell's own section space up
    through the sums over higher cells and ends in the dual local section
    space (paired against the top level); exactness is checked at every
    position and the first failing position per cell is reported.
    """
    x, fs = sheaf.x, sheaf.fs
    failures: list[AxiomFailure] = []
    for d in range(x.t):
        for i in range(x.n_cells(d)):
            maps = local_star_maps(sheaf, d, i)
            dual_b = dual_section_space(sheaf, d, i)
            pair = SpMat.from_dense(fs, dual_b)
            ranks = [m.rank() for m in maps]
            dims = [maps[0].shape[1]] + [m.shape[0] for m in maps]
            # position 0: injectivity
            if ranks[0] != dims[0]:
                failures.append(AxiomFailure(x.cell(d, i), "exactness@0", "not injective"))
                continue
            ok = True
            for j in range(1, len(maps)):
                if not (maps[j] @ maps[j - 1]).is_zero():
                    failures.append(
                        AxiomFailure(x.cell(d, i), f"exactness@{j}", "composition nonzero")
                    )
                    ok = False
                    break
                if ranks[j - 1] + ranks[j] != dims[j]:
                    failures.append(
                        AxiomFailure(
                            x.cell(d, i),
                            f"exactness@{j}",
                            f"rank {ranks[j - 1]} + rank {ranks[j]} != dim {dims[j]}",
                        )
                    )
                    ok = False
                    break
            if not ok:
                continue
            # top position: kernel of the dual pairing equals the image
            top_dim = dims[-1]
            if not (pair @ maps[-1]).is_zero():
                failures.append(
                    AxiomFailure(x.cell(d, i), "exactness@top", "image not annihilated by duals")
                )
                continue
            if ranks[-1] + pair.rank() != top_dim:
                failures.append(
                    AxiomFailure(
                        x.cell(d, i),
                        "exactness@top",
                        f"rank {ranks[-1]} + dual dim {pair.rank()} != {top_dim}",
                    )
                )
    return AcyclicityReport(failures)
