"""Cochain complexes of sheaves, cohomology, CSS extraction, distances.

Degree-i cochains are flat coordinate vectors over the sum of the
section spaces of the i-cells (blocks in canonical cell order); the
coboundary of a cochain sums restrictions over immediate faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gf
from .gf import FieldSpec, SpMat, quotient_reps
from .sheaf import Sheaf, verify_axioms


class ChainIntegrityError(Exception):
    """The assembled coboundaries do not square to zero."""


class ChainComplex:
    """Based cochain complex of a sheaf with coboundary matrices."""

    def __init__(self, sheaf: Sheaf, check_axioms: bool = False):
        if check_axioms:
            rep = verify_axioms(sheaf)
            if not rep.ok:
                raise ValueError(f"sheaf axioms fail: {rep.failures[:3]}")
        self.sheaf = sheaf
        self.x = sheaf.x
        self.fs: FieldSpec = sheaf.fs
        t = self.x.t
        self.offsets: list[np.ndarray] = []
        self.dims: list[int] = []
        for d in range(t + 1):
            offs = np.zeros(self.x.n_cells(d) + 1, dtype=np.int64)
            for i in range(self.x.n_cells(d)):
                offs[i + 1] = offs[i] + sheaf.dim_at(d, i)
            self.offsets.append(offs)
            self.dims.append(int(offs[-1]))
        self.delta: list[SpMat] = [self._assemble_delta(d) for d in range(t)]
        for i in range(t - 1):
            if not (self.delta[i + 1] @ self.delta[i]).is_zero():
                raise ChainIntegrityError(f"coboundary squared is nonzero at degree {i}")
        self._coh_cache: dict = {}

    def _assemble_delta(self, d: int) -> SpMat:
        x, sheaf = self.x, self.sheaf
        rows, cols, vals = [], [], []
        for i in range(x.n_cells(d + 1)):
            roff = self.offsets[d + 1][i]
            for fi in x.down[d + 1][i]:
                m = sheaf.restriction((d, fi), (d + 1, i))
                r, c = np.nonzero(m)
                if r.size:
                    rows.append(r + roff)
                    cols.append(c + self.offsets[d][fi])
                    vals.append(m[r, c])
        if rows:
            return SpMat(
                self.fs,
                (self.dims[d + 1], self.dims[d]),
                np.concatenate(rows),
                np.concatenate(cols),
                np.concatenate(vals),
            )
        return SpMat.zeros(self.fs, (self.dims[d + 1], self.dims[d]))

    def degree_dim(self, d: int) -> int:
        """Dimension of the degree-d cochain space; zero outside [0, t]."""
        if 0 <= d <= self.x.t:
            return self.dims[d]
        return 0

    # -- labels -------------------------------------------------------------

    def basis_labels(self, d: int) -> list[tuple[tuple, int]]:
        """(cell, local basis index) for every coordinate of degree d."""
        out = []
        for i in range(self.x.n_cells(d)):
            for j in range(self.sheaf.dim_at(d, i)):
                out.append((self.x.cell(d, i), j))
        return out

    def cell_slice(self, d: int, i: int) -> slice:
        return slice(int(self.offsets[d][i]), int(self.offsets[d][i + 1]))

    # -- cboundary action -----------------------------------------------------

    def coboundary(self, d: int, vec: np.ndarray) -> np.ndarray:
        if d >= self.x.t:
            return np.zeros(0, dtype=np.int64)
        return self.delta[d].mat_vec(vec)

    def boundary(self, d: int, vec: np.ndarray) -> np.ndarray:
        """Transpose coboundary, mapping degree d to degree d-1."""
        if d <= 0:
            return np.zeros(0, dtype=np.int64)
        return self.delta[d - 1].T.mat_vec(vec)

    # -- cohomology -------------------------------------------------------------

    def cocycle_basis(self, d: int) -> np.ndarray:
        key = ("Z", d)
        if key not in self._coh_cache:
            if d < self.x.t:
                self._coh_cache[key] = self.delta[d].kernel_basis()
            else:
                self._coh_cache[key] = np.eye(self.dims[d], dtype=np.int64)
        return self._coh_cache[key]

    def coboundary_basis(self, d: int) -> np.ndarray:
        key = ("B", d)
        if key not in self._coh_cache:
            if d > 0:
                self._coh_cache[key] = self.delta[d - 1].image_basis()
            else:
                self._coh_cache[key] = np.zeros((0, self.dims[d]), dtype=np.int64)
        return self._coh_cache[key]

    def cycle_basis(self, d: int) -> np.ndarray:
        key = ("Zlow", d)
        if key not in self._coh_cache:
            if d > 0:
                self._coh_cache[key] = self.delta[d - 1].T.kernel_basis()
            else:
                self._coh_cache[key] = np.eye(self.dims[d], dtype=np.int64)
        return self._coh_cache[key]

    def boundary_basis(self, d: int) -> np.ndarray:
        key = ("Blow", d)
        if key not in self._coh_cache:
            if d < self.x.t:
                self._coh_cache[key] = self.delta[d].T.image_basis()
            else:
                self._coh_cache[key] = np.zeros((0, self.dims[d]), dtype=np.int64)
        return self._coh_cache[key]

    def cohomology(self, d: int, side: str = "co") -> tuple[int, np.ndarray]:
        """Dimension and representative basis of (co)homology at degree d."""
        if not 0 <= d <= self.x.t:
            raise ValueError(f"degree {d} out of range [0, {self.x.t}]")
        key = ("H", d, side)
        if key not in self._coh_cache:
            if side == "co":
                z, b = self.cocycle_basis(d), self.coboundary_basis(d)
            elif side == "homology":
                z, b = self.cycle_basis(d), self.boundary_basis(d)
            else:
                raise ValueError(f"side must be 'co' or 'homology', got {side!r}")
            reps = quotient_reps(self.fs, z, b)
            self._coh_cache[key] = (reps.shape[0], reps)
        return self._coh_cache[key]

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * n for i, n in enumerate(self.dims))

    def __repr__(self):
        return f"ChainComplex(q={self.fs.q}, dims={self.dims})"


def sheaf_cochain_complex(sheaf: Sheaf, check_axioms: bool = False) -> ChainComplex:
    return ChainComplex(sheaf, check_axioms=check_axioms)


# ---------------------------------------------------------------------------
# CSS codes
# ---------------------------------------------------------------------------


@dataclass
class CSSCode:
    """CSS code cut out of a cochain complex at one level."""

    cplx: ChainComplex
    level: int

    def __post_init__(self):
        if not 1 <= self.level <= self.cplx.x.t - 1:
            raise ValueError(f"level {self.level} out of range [1, {self.cplx.x.t - 1}]")

    @property
    def n(self) -> int:
        return self.cplx.dims[self.level]

    @property
    def hx(self) -> SpMat:
        return self.cplx.delta[self.level - 1].T

    @property
    def hz(self) -> SpMat:
        return self.cplx.delta[self.level]

    @property
    def k(self) -> int:
        return self.cplx.cohomology(self.level, "co")[0]

    def check_orthogonality(self) -> bool:
        return (self.hx @ self.hz.T).is_zero()

    def metadata(self) -> dict:
        return {
            "n": self.n,
            "m_x": self.hx.shape[0],
            "m_z": self.hz.shape[0],
            "k": self.k,
            "level": self.level,
            "field": self.cplx.fs.to_json(),
        }

    def __repr__(self):
        return f"CSSCode(n={self.n}, k={self.k}, level={self.level}, q={self.cplx.fs.q})"


def css_from_complex(cplx: ChainComplex, level: int) -> CSSCode:
    return CSSCode(cplx, level)


def to_alist(mat: SpMat) -> str:
    """Sparse parity-check text in alist layout (1-based, value-annotated).

    Nonbinary entries are appended to each index as ``index:value``.
    """
    rows, cols = mat.shape
    by_row: list[list[tuple[int, int]]] = [[] for _ in range(rows)]
    by_col: list[list[tuple[int, int]]] = [[] for _ in range(cols)]
    for r, c, v in mat.triples():
        by_row[r].append((c + 1, v))
        by_col[c].append((r + 1, v))
    dmax_r = max((len(x) for x in by_row), default=0)
    dmax_c = max((len(x) for x in by_col), default=0)
    q = mat.fs.q

    def fmt(items):
        if q == 2:
            return " ".join(str(i) for i, _ in items)
        return " ".join(f"{i}:{v}" for i, v in items)

    lines = [
        f"{cols} {rows}",
        f"{dmax_c} {dmax_r}",
        " ".join(str(len(x)) for x in by_col),
        " ".join(str(len(x)) for x in by_row),
    ]
    lines += [fmt(x) for x in by_col]
    lines += [fmt(x) for x in by_row]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Distance estimation
# ---------------------------------------------------------------------------


@dataclass
class DistanceSide:
    exact: bool
    best: int | None
    witness: np.ndarray | None

    def to_json(self):
        return {
            "exact": self.exact,
            "weight": self.best,
            "witness": None if self.witness is None else self.witness.tolist(),
        }


@dataclass
class DistanceReport:
    x_side: DistanceSide
    z_side: DistanceSide
    seed: int
    trials: int

    @property
    def d_upper(self) -> int | None:
        cands = [s.best for s in (self.x_side, self.z_side) if s.best is not None]
        return min(cands) if cands else None

    @property
    def d_exact(self) -> int | None:
        if self.x_side.exact and self.z_side.exact:
            return self.d_upper
        return None

    @property
    def attained_side(self) -> str | None:
        bx, bz = self.x_side.best, self.z_side.best
        if bx is None and bz is None:
            return None
        if bz is None or (bx is not None and bx <= bz):
            return "x"
        return "z"

    def to_json(self):
        return {
            "d_upper": self.d_upper if self.d_upper is not None else "∞",
            "d_exact": self.d_exact if self.d_exact is not None else None,
            "side": self.attained_side,
            "x": self.x_side.to_json(),
            "z": self.z_side.to_json(),
            "seed": self.seed,
            "trials": self.trials,
        }


def _min_weight_exhaustive(fs, h_reps, b_basis) -> tuple[int, np.ndarray]:
    """Minimum weight over all nonzero-class combinations, by enumeration.

    Walks every coefficient assignment for the class representatives and
    the coboundary basis with single-digit increments, skipping the pure
    coboundary branch.
    """
    n = h_reps.shape[1]
    best = n + 1
    best_vec = None
    digits = [("h", i) for i in range(h_reps.shape[0])] + [
        ("b", i) for i in range(b_basis.shape[0])
    ]
    vec = np.zeros(n, dtype=np.int64)
    q = fs.q

    def rec(pos: int, h_nonzero: bool):
        nonlocal best, best_vec
        if pos == len(digits):
            if h_nonzero:
                w = int(np.count_nonzero(vec))
                if w < best:
                    best = w
                    best_vec = vec.copy()
            return
        kind, i = digits[pos]
        row = h_reps[i] if kind == "h" else b_basis[i]
        if kind == "b" and not h_nonzero:
            return  # pure coboundaries are not logical
        prev = 0
        for v in range(q):
            if v != prev:
                vec[:] ^= fs.mul_arr(prev ^ v, row)
                prev = v
            rec(pos + 1, h_nonzero or (kind == "h" and v != 0))
        if prev:
            vec[:] ^= fs.mul_arr(prev, row)

    rec(0, False)
    return best, best_vec


def _min_weight_random(fs, h_reps, b_basis, trials: int, rng) -> tuple[int, np.ndarray]:
    """Seeded random sampling of nontrivial classes with greedy reduction."""
    n = h_reps.shape[1]
    best = n + 1
    best_vec = None
    nonzero_scalars = list(range(1, fs.q))
    for _ in range(trials):
        hc = fs.random_arr(rng, h_reps.shape[0])
        while not hc.any():
            hc = fs.random_arr(rng, h_reps.shape[0])
        vec = gf.matmul(fs, hc[None, :], h_reps)[0]
        if b_basis.shape[0]:
            bc = fs.random_arr(rng, b_basis.shape[0])
            vec ^= gf.matmul(fs, bc[None, :], b_basis)[0]
        improved = True
        w = int(np.count_nonzero(vec))
        while improved:
            improved = False
            for row in b_basis:
                for s in nonzero_scalars:
                    cand = vec ^ fs.mul_arr(s, row)
                    cw = int(np.count_nonzero(cand))
                    if cw < w:
                        vec, w = cand, cw
                        improved = True
        if w < best:
            best, best_vec = w, vec.copy()
    return best, best_vec


def distance_bounds(
    code: CSSCode,
    exhaustive_cap: int = 1 << 22,
    trials: int = 200,
    seed: int = 0,
) -> DistanceReport:
    """Minimum nontrivial (co)cycle weights on the X and Z sides.

    Exact by full enumeration whenever the coset space fits under
    ``exhaustive_cap`` candidates; otherwise a seeded randomized upper
    bound.  Weight counts nonzero coordinate entries.
    """
    cplx, lvl, fs = code.cplx, code.level, code.cplx.fs
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    sides = {}
    for name in ("x", "z"):
        if name == "x":
            z = cplx.cocycle_basis(lvl)
            b = cplx.coboundary_basis(lvl)
        else:
            z = cplx.cycle_basis(lvl)
            b = cplx.boundary_basis(lvl)
        reps = quotient_reps(fs, z, b)
        if reps.shape[0] == 0:
            sides[name] = DistanceSide(exact=True, best=None, witness=None)
            continue
        log_total = (reps.shape[0] + b.shape[0]) * math.log2(fs.q)
        if log_total <= math.log2(exhaustive_cap):
            w, vec = _min_weight_exhaustive(fs, reps, b)
            exact = True
        else:
            w, vec = _min_weight_random(fs, reps, b, trials, rng)
            exact = False
        # the witness must be a nontrivial closed vector
        closed = cplx.coboundary(lvl, vec) if name == "x" else cplx.boundary(lvl, vec)
        if closed.any():
            raise AssertionError("distance witness is not closed")
        rb, pb = gf.dense_rref(fs, b)
        if b.shape[0] and not gf.reduce_against(fs, rb, pb, vec).any():
            raise AssertionError("distance witness is exact (trivial class)")
        sides[name] = DistanceSide(exact=exact, best=w, witness=vec)
    return DistanceReport(sides["x"], sides["z"], seed=seed, trials=trials)
