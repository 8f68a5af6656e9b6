"""Graded cell complexes: labeled cubical complexes and simplicial complexes.

Cells are immutable tuples with a canonical total order, so every matrix
built on top of a complex has a stable, reproducible indexing.

Cubical cells of a t-dimensional complex built from a vertex domain of
size N and t commuting permutation families are encoded as
``(type_set, base_vertex, labels, bits)``: ``type_set`` is the sorted
tuple of labeled directions, ``labels`` the permutation index per labeled
direction, ``bits`` the 0/1 side per unlabeled direction.  Simplicial
cells are sorted vertex tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np


@dataclass
class CubicalSpec:
    """Build data for a labeled cubical complex.

    ``perms[j]`` lists the permutations of ``range(n_vertices)`` for
    direction ``j`` as index arrays; all families must share one size and
    permutations from distinct directions must commute.
    """

    n_vertices: int
    t: int
    perms: list[list[np.ndarray]]

    def __post_init__(self):
        self.perms = [[np.asarray(p, dtype=np.int64) for p in fam] for fam in self.perms]
        if len(self.perms) != self.t:
            raise ValueError(f"expected {self.t} permutation families, got {len(self.perms)}")
        sizes = {len(fam) for fam in self.perms}
        if len(sizes) != 1:
            raise ValueError(f"permutation families must share one size, got {sorted(sizes)}")
        self.delta = len(self.perms[0])
        ident = np.arange(self.n_vertices)
        for j, fam in enumerate(self.perms):
            for a in fam:
                if sorted(a.tolist()) != ident.tolist():
                    raise ValueError(f"direction {j} contains a non-permutation")

    def validate_commuting(self):
        for i in range(self.t):
            for j in range(i + 1, self.t):
                for ai_idx, ai in enumerate(self.perms[i]):
                    for aj_idx, aj in enumerate(self.perms[j]):
                        if not np.array_equal(ai[aj], aj[ai]):
                            raise ValueError(
                                "non-commuting permutations: "
                                f"direction {i} index {ai_idx} vs direction {j} index {aj_idx}"
                            )

    def to_json(self) -> dict:
        return {
            "N": self.n_vertices,
            "t": self.t,
            "permutations": [[p.tolist() for p in fam] for fam in self.perms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CubicalSpec":
        return cls(int(data["N"]), int(data["t"]), data["permutations"])


def cyclic_spec(n: int, t: int, shifts_per_dir: list[list[int]]) -> CubicalSpec:
    """Cubical spec over Z_n with shift permutations per direction."""
    base = np.arange(n, dtype=np.int64)
    perms = [[(base + s) % n for s in shifts] for shifts in shifts_per_dir]
    return CubicalSpec(n, t, perms)


@dataclass
class ValidationReport:
    diamond_violations: list = field(default_factory=list)
    dangling: list = field(default_factory=list)
    n_components: int = 0

    @property
    def ok(self) -> bool:
        return not self.diamond_violations and not self.dangling

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "diamond_violations": [[str(a), str(b), n] for a, b, n in self.diamond_violations],
            "dangling": [str(x) for x in self.dangling],
            "components": self.n_components,
        }


class CellComplex:
    """A graded poset of cells with covering (codimension-1) incidence."""

    def __init__(self, t: int, kind: str, cells_by_dim: list[list[tuple]], cover_pairs, spec=None):
        self.t = t
        self.kind = kind
        self.cells = [sorted(cs) for cs in cells_by_dim]
        self.index: dict[tuple, tuple[int, int]] = {}
        for d, cs in enumerate(self.cells):
            for i, c in enumerate(cs):
                if c in self.index:
                    raise ValueError(f"duplicate cell {c}")
                self.index[c] = (d, i)
        self.up: list[list[list[int]]] = [[[] for _ in cs] for cs in self.cells]
        self.down: list[list[list[int]]] = [[[] for _ in cs] for cs in self.cells]
        for lo, hi in cover_pairs:
            dl, il = self.index[lo]
            dh, ih = self.index[hi]
            if dh != dl + 1:
                raise ValueError(f"cover pair with dimension gap != 1: {lo} < {hi}")
            self.up[dl][il].append(ih)
            self.down[dh][ih].append(il)
        for d in range(t + 1):
            for i in range(len(self.cells[d])):
                self.up[d][i] = sorted(set(self.up[d][i]))
                self.down[d][i] = sorted(set(self.down[d][i]))
        self.spec = spec  # CubicalSpec when cubical
        self._upset_cache: dict[tuple[int, int, int], np.ndarray] = {}

    # -- basic queries ----------------------------------------------------

    def n_cells(self, dim: int) -> int:
        return len(self.cells[dim])

    def counts(self) -> list[int]:
        return [len(cs) for cs in self.cells]

    def cell(self, dim: int, idx: int) -> tuple:
        return self.cells[dim][idx]

    def idx(self, cell: tuple) -> tuple[int, int]:
        if cell not in self.index:
            raise KeyError(f"cell not in complex: {cell}")
        return self.index[cell]

    def up_set(self, dim: int, idx: int, k: int) -> np.ndarray:
        """Indices (ascending) of the k-cells above the given cell."""
        if not dim <= k <= self.t:
            raise ValueError(f"up_set target dimension {k} out of range [{dim}, {self.t}]")
        key = (dim, idx, k)
        cached = self._upset_cache.get(key)
        if cached is not None:
            return cached
        frontier = {idx}
        for d in range(dim, k):
            frontier = {j for i in frontier for j in self.up[d][i]}
        out = np.array(sorted(frontier), dtype=np.int64)
        self._upset_cache[key] = out
        return out

    def down_set(self, dim: int, idx: int, k: int) -> list[int]:
        if not 0 <= k <= dim:
            raise ValueError(f"down_set target dimension {k} out of range [0, {dim}]")
        frontier = {idx}
        for d in range(dim, k, -1):
            frontier = {j for i in frontier for j in self.down[d][i]}
        return sorted(frontier)

    # -- validation ---------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Diamond property, incidence sanity, and top-cell connectivity."""
        rep = ValidationReport()
        for d in range(self.t - 1):
            for i in range(self.n_cells(d)):
                paths: dict[int, int] = {}
                for mid in self.up[d][i]:
                    for top in self.up[d + 1][mid]:
                        paths[top] = paths.get(top, 0) + 1
                for top, n in paths.items():
                    if n != 2:
                        rep.diamond_violations.append(
                            (self.cell(d, i), self.cell(d + 2, top), n)
                        )
        for d in range(self.t + 1):
            for i in range(self.n_cells(d)):
                for j in self.up[d][i]:
                    if i not in self.down[d + 1][j]:
                        rep.dangling.append((self.cell(d, i), self.cell(d + 1, j)))
        # top-cell adjacency components (share a (t-1)-cell)
        n_top = self.n_cells(self.t)
        parent = list(range(n_top))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(self.n_cells(self.t - 1)) if self.t >= 1 else []:
            tops = self.up[self.t - 1][i]
            for a, b in zip(tops, tops[1:]):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
        rep.n_components = len({find(x) for x in range(n_top)})
        return rep

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "kind": self.kind,
            "cells": [[list(_flatten_cell(c)) for c in cs] for cs in self.cells],
            "incidence": [
                [d, i, j]
                for d in range(self.t)
                for i in range(self.n_cells(d))
                for j in self.up[d][i]
            ],
            "spec": self.spec.to_json() if self.spec is not None else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CellComplex":
        t = int(data["t"])
        cells_by_dim = [
            [_unflatten_cell(c) for c in cs] for cs in data["cells"]
        ]
        tmp = cls(t, data["kind"], cells_by_dim, [], spec=None)
        covers = [
            (tmp.cells[d][i], tmp.cells[d + 1][j]) for d, i, j in data["incidence"]
        ]
        spec = CubicalSpec.from_json(data["spec"]) if data.get("spec") else None
        return cls(t, data["kind"], cells_by_dim, covers, spec=spec)

    def __repr__(self):
        return f"CellComplex(kind={self.kind}, t={self.t}, counts={self.counts()})"


def _unflatten_cell(data: list) -> tuple:
    if data[0] == "c":
        return (tuple(data[1]), int(data[2]), tuple(data[3]), tuple(data[4]))
    return tuple(data[1])


def _flatten_cell(cell: tuple):
    if isinstance(cell[0], tuple):  # cubical: (S, v, labels, bits)
        s, v, labels, bits = cell
        return ["c", list(s), v, list(labels), list(bits)]
    return ["s", list(cell)]


# ---------------------------------------------------------------------------
# Cubical builder
# ---------------------------------------------------------------------------


def cubical_cell(spec: CubicalSpec, type_set, base: int, labels, bits) -> tuple:
    s = tuple(sorted(type_set))
    return (s, int(base), tuple(int(x) for x in labels), tuple(int(x) for x in bits))


def cubical_faces(spec: CubicalSpec, cell: tuple):
    """The 2k codimension-1 faces of a cubical cell.

    A labeled direction j is replaced by a side bit b; for b = 1 the base
    moves along the permutation labeling j.
    """
    s, v, labels, bits = cell
    comp = [j for j in range(spec.t) if j not in s]
    for pos, j in enumerate(s):
        s2 = s[:pos] + s[pos + 1 :]
        lab2 = labels[:pos] + labels[pos + 1 :]
        ins = sum(1 for jj in comp if jj < j)
        a = spec.perms[j][labels[pos]]
        for b in (0, 1):
            bits2 = bits[:ins] + (b,) + bits[ins:]
            base2 = int(a[v]) if b == 1 else v
            yield (s2, base2, lab2, bits2)


def build_cubical(spec: CubicalSpec) -> CellComplex:
    """Labeled cubical complex from commuting permutation families."""
    spec.validate_commuting()
    t, n, delta = spec.t, spec.n_vertices, spec.delta
    cells_by_dim: list[list[tuple]] = [[] for _ in range(t + 1)]
    for k in range(t + 1):
        for s in combinations(range(t), k):
            comp_size = t - k
            for v in range(n):
                for lab_flat in np.ndindex(*([delta] * k)):
                    for bit_flat in np.ndindex(*([2] * comp_size)):
                        cells_by_dim[k].append((s, v, tuple(lab_flat), tuple(bit_flat)))
    covers = []
    for k in range(1, t + 1):
        for cell in cells_by_dim[k]:
            for f in cubical_faces(spec, cell):
                covers.append((f, cell))
    return CellComplex(t, "cubical", cells_by_dim, covers, spec=spec)


# ---------------------------------------------------------------------------
# Simplicial builder
# ---------------------------------------------------------------------------


def build_simplicial(facets: list) -> CellComplex:
    """Pure simplicial complex from its facet list."""
    if not facets:
        raise ValueError("empty facet list")
    dims = {len(f) for f in facets}
    if len(dims) != 1:
        raise ValueError(f"mixed facet dimensions (sizes {sorted(dims)}); pure complexes only")
    t = dims.pop() - 1
    cells: list[set] = [set() for _ in range(t + 1)]
    for f in facets:
        verts = tuple(sorted(int(v) for v in f))
        if len(set(verts)) != len(verts):
            raise ValueError(f"facet with repeated vertices: {f}")
        for k in range(t + 1):
            for sub in combinations(verts, k + 1):
                cells[k].add(sub)
    cells_by_dim = [sorted(cs) for cs in cells]
    covers = []
    for k in range(1, t + 1):
        for cell in cells_by_dim[k]:
            for drop in range(len(cell)):
                covers.append((cell[:drop] + cell[drop + 1 :], cell))
    return CellComplex(t, "simplicial", cells_by_dim, covers)


# ---------------------------------------------------------------------------
# Stock complexes used across tests and the CLI
# ---------------------------------------------------------------------------


def simplex_boundary(n_vertices: int) -> CellComplex:
    """Boundary of the (n_vertices-1)-simplex (a triangulated sphere)."""
    verts = range(n_vertices)
    return build_simplicial(list(combinations(verts, n_vertices - 1)))


def torus_triangulation() -> CellComplex:
    """The 7-vertex triangulation of the 2-torus (Csaszar torus)."""
    facets = []
    for i in range(7):
        facets.append([i, (i + 1) % 7, (i + 3) % 7])
        facets.append([i, (i + 2) % 7, (i + 3) % 7])
    return build_simplicial(facets)


def projective_space_3() -> CellComplex:
    """A triangulation of real projective 3-space.

    Built as the antipodal quotient of the barycentric subdivision of the
    boundary of the 4-dimensional cross-polytope.  The subdivision is
    centrally symmetric and no simplex contains an antipodal vertex pair,
    so the quotient is again a simplicial complex.
    """
    # faces of the cross-polytope boundary: signed axes with no +-pair
    axes = (1, 2, 3, 4)
    faces = []
    for k in range(1, 5):
        for combo in combinations(axes, k):
            for signs in np.ndindex(*([2] * k)):
                faces.append(tuple(a if s == 0 else -a for a, s in zip(combo, signs)))
    face_set = set(faces)

    def canon(face: tuple) -> tuple:
        neg = tuple(sorted(-x for x in face))
        pos = tuple(sorted(face))
        return min(pos, neg)

    reps = sorted({canon(f) for f in face_set})
    rep_id = {f: i for i, f in enumerate(reps)}

    def vert_id(face: tuple) -> int:
        return rep_id[canon(face)]

    facets = []
    for top in faces:
        if len(top) != 4:
            continue
        tops = tuple(sorted(top))
        for order in _chains_of(tops):
            facets.append(sorted(vert_id(f) for f in order))
    # each flag chain appears once per facet orientation; dedupe
    uniq = sorted({tuple(f) for f in facets})
    return build_simplicial([list(f) for f in uniq])


def _chains_of(top: tuple):
    """All maximal chains of proper subsets of a 4-element set, as tuples."""
    from itertools import permutations

    for perm in permutations(top):
        yield tuple(tuple(sorted(perm[: i + 1])) for i in range(4))


def left_right_cayley_s3() -> CubicalSpec:
    """2-dimensional left/right translation complex over the symmetric group S3."""
    from itertools import permutations

    elems = sorted(permutations(range(3)))
    eid = {e: i for i, e in enumerate(elems)}

    def compose(a, b):  # (a o b)(x) = a[b[x]]
        return tuple(a[b[x]] for x in range(3))

    gens = [(1, 0, 2), (1, 2, 0)]  # a transposition and a 3-cycle
    left = [np.array([eid[compose(g, e)] for e in elems]) for g in gens]
    right = [np.array([eid[compose(e, g)] for e in elems]) for g in gens]
    return CubicalSpec(6, 2, [left, right])
