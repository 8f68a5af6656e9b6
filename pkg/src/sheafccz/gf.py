"""Exact arithmetic over GF(2^r) and exact sparse/dense linear algebra.

Field elements are encoded as integers in [0, 2^r): the bits are the
coefficients of a polynomial over GF(2), reduced modulo an irreducible
modulus.  Addition is XOR; multiplication uses log/antilog tables built
from a multiplicative generator, so all vector operations are plain
numpy gathers.

Two independent elimination routes are provided and kept separate on
purpose:

* a sparse route (dict-of-rows Gaussian elimination, leftmost column /
  lowest row pivoting), the default for :class:`SpMat`;
* a dense route (``dense_rref`` and friends, numba-accelerated when
  available) used as a fallback for large matrices with at most
  ``DENSE_COL_CAP`` columns and as the cross-check oracle in tests.

Both produce the (unique) reduced row echelon form, so their outputs are
directly comparable.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

# One irreducible (primitive) polynomial per extension degree, bit encoded
# with the leading term included, e.g. r=3 -> x^3 + x + 1 -> 0b1011.
DEFAULT_MODULI: dict[int, int] = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}

# Matrices wider than this never take the dense fallback.
DENSE_COL_CAP = 4096
# Work threshold (rows*cols) above which linalg dispatches to the dense route.
_DENSE_WORK_MIN = 50_000


def _clmul(a: int, b: int) -> int:
    """Carry-less (polynomial) product of two bit-encoded GF(2) polynomials."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        b >>= 1
    return acc


def _polymod(a: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while a.bit_length() - 1 >= dm:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


def _polypow_x(exp: int, mod: int) -> int:
    """x^exp reduced mod the given polynomial."""
    result = 1
    base = 2
    while exp:
        if exp & 1:
            result = _polymod(_clmul(result, base), mod)
        base = _polymod(_clmul(base, base), mod)
        exp >>= 1
    return result


def _poly_gcd(a: int, b: int) -> int:
    while b:
        if a.bit_length() < b.bit_length():
            a, b = b, a
            continue
        a ^= b << (a.bit_length() - b.bit_length())
    return a


def is_irreducible(poly: int, r: int) -> bool:
    """Rabin irreducibility test for a degree-r polynomial over GF(2)."""
    if poly.bit_length() - 1 != r:
        return False
    if r == 1:
        return True
    # x^(2^r) == x mod poly
    if _polypow_x(1 << r, poly) != 2:
        return False
    # gcd(x^(2^(r/p)) - x, poly) == 1 for all prime divisors p of r
    n, primes, d = r, [], 2
    while d * d <= n:
        if n % d == 0:
            primes.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        primes.append(n)
    for p in primes:
        h = _polypow_x(1 << (r // p), poly) ^ 2
        if _poly_gcd(h, poly) != 1:
            return False
    return True


def _factorize(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FieldSpec:
    """The field GF(2^r) with a fixed modulus; immutable after construction.

    All element-level operations accept and return plain ints; the ``*_arr``
    variants operate on numpy integer arrays elementwise.
    """

    def __init__(self, r: int, modulus: int | None = None):
        if not 1 <= r <= 16:
            raise ValueError(f"extension degree r={r} out of supported range [1, 16]")
        if modulus is None:
            modulus = DEFAULT_MODULI[r]
        if not is_irreducible(modulus, r):
            raise ValueError(f"modulus {modulus:#b} is not irreducible of degree {r}")
        self.r = r
        self.modulus = modulus
        self.q = 1 << r
        self._build_tables()

    def _build_tables(self):
        q = self.q
        if q == 2:
            self._exp = np.array([1], dtype=np.int64)
            self._log = np.array([0, 0], dtype=np.int64)
            return
        gen = self._find_generator()
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v = _polymod(_clmul(v, gen), self.modulus)
        if v != 1:
            raise AssertionError("generator does not have full multiplicative order")
        self._exp = exp
        self._log = log

    def _find_generator(self) -> int:
        order = self.q - 1
        primes = _factorize(order)

        def powmod(a: int, e: int) -> int:
            result, base = 1, a
            while e:
                if e & 1:
                    result = _polymod(_clmul(result, base), self.modulus)
                base = _polymod(_clmul(base, base), self.modulus)
                e >>= 1
            return result

        for cand in range(2, self.q):
            if all(powmod(cand, order // p) != 1 for p in primes):
                return cand
        raise AssertionError("no multiplicative generator found")

    # -- scalar ops ----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.q == 2:
            return 1
        qm1 = self.q - 1
        return int(self._exp[(int(self._log[a]) + int(self._log[b])) % qm1])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        if self.q == 2:
            return 1
        return int(self._exp[(self.q - 1 - int(self._log[a])) % (self.q - 1)])

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(self.inv(a), -e)
        if a == 0:
            return 0 if e else 1
        if self.q == 2:
            return 1
        return int(self._exp[(int(self._log[a]) * e) % (self.q - 1)])

    def trace(self, a: int) -> int:
        """Field trace down to GF(2): sum of the r conjugates a^(2^i)."""
        acc, v = 0, a
        for _ in range(self.r):
            acc ^= v
            v = self.mul(v, v)
        return acc

    # -- array ops -----------------------------------------------------

    def mul_arr(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.q == 2:
            return a & b
        out = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no multiplicative inverse")
        if self.q == 2:
            return a.copy()
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def trace_arr(self, a):
        a = np.asarray(a, dtype=np.int64)
        acc = np.zeros_like(a)
        v = a
        for _ in range(self.r):
            acc ^= v
            v = self.mul_arr(v, v)
        return acc

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def random_arr(self, rng, size, nonzero: bool = False):
        lo = 1 if nonzero else 0
        return rng.integers(lo, self.q, size=size, dtype=np.int64)

    # -- misc ------------------------------------------------------------

    def to_json(self) -> dict:
        return {"r": self.r, "modulus": self.modulus}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        return cls(int(data["r"]), int(data["modulus"])) if "modulus" in data else cls(int(data["r"]))

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.r, self.modulus) == (other.r, other.modulus)

    def __hash__(self):
        return hash((self.r, self.modulus))

    def __repr__(self):
        return f"FieldSpec(r={self.r}, modulus={self.modulus:#b})"


def entrywise_product(fs: FieldSpec, u, v):
    """Entrywise (Schur) product of two equal-length vectors."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch for entrywise product: {u.shape} vs {v.shape}")
    return fs.mul_arr(u, v)


def matmul(fs: FieldSpec, a, b):
    """Dense matrix product over the field (small operands)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"incompatible shapes {a.shape} @ {b.shape}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        col = a[:, k]
        nz = np.nonzero(col)[0]
        if nz.size:
            out[nz] ^= fs.mul_arr(col[nz][:, None], b[k][None, :])
    return out


def matvec(fs: FieldSpec, a, v):
    v = np.asarray(v, dtype=np.int64)
    return matmul(fs, a, v[:, None])[:, 0]


# ---------------------------------------------------------------------------
# Dense elimination (vectorized / numba): the oracle and large-matrix fallback
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _rref_kernel(mat, log, exp, qm1):  # pragma: no cover - compiled
        rows, cols = mat.shape
        piv_cols = np.empty(min(rows, cols), dtype=np.int64)
        pr = 0
        for c in range(cols):
            piv = -1
            for ri in range(pr, rows):
                if mat[ri, c] != 0:
                    piv = ri
                    break
            if piv < 0:
                continue
            if piv != pr:
                for j in range(c, cols):
                    tmp = mat[pr, j]
                    mat[pr, j] = mat[piv, j]
                    mat[piv, j] = tmp
            v = mat[pr, c]
            if v != 1:
                li = qm1 - log[v]
                for j in range(c, cols):
                    w = mat[pr, j]
                    if w != 0:
                        mat[pr, j] = exp[(log[w] + li) % qm1]
            for ri in range(pr + 1, rows):
                f = mat[ri, c]
                if f != 0:
                    lf = log[f]
                    for j in range(c, cols):
                        w = mat[pr, j]
                        if w != 0:
                            mat[ri, j] ^= exp[(lf + log[w]) % qm1]
            piv_cols[pr] = c
            pr += 1
            if pr == rows:
                break
        # back substitution
        for i in range(pr - 1, -1, -1):
            c = piv_cols[i]
            for ri in range(i):
                f = mat[ri, c]
                if f != 0:
                    lf = log[f]
                    for j in range(c, cols):
                        w = mat[i, j]
                        if w != 0:
                            mat[ri, j] ^= exp[(lf + log[w]) % qm1]
        return piv_cols[:pr]

    @njit(cache=True)
    def _rref_kernel_f2(mat):  # pragma: no cover - compiled
        rows, cols = mat.shape
        piv_cols = np.empty(min(rows, cols), dtype=np.int64)
        pr = 0
        for c in range(cols):
            piv = -1
            for ri in range(pr, rows):
                if mat[ri, c] != 0:
                    piv = ri
                    break
            if piv < 0:
                continue
            if piv != pr:
                for j in range(c, cols):
                    tmp = mat[pr, j]
                    mat[pr, j] = mat[piv, j]
                    mat[piv, j] = tmp
            for ri in range(pr + 1, rows):
                if mat[ri, c] != 0:
                    for j in range(c, cols):
                        mat[ri, j] ^= mat[pr, j]
            piv_cols[pr] = c
            pr += 1
            if pr == rows:
                break
        for i in range(pr - 1, -1, -1):
            c = piv_cols[i]
            for ri in range(i):
                if mat[ri, c] != 0:
                    for j in range(c, cols):
                        mat[ri, j] ^= mat[i, j]
        return piv_cols[:pr]


def _rref_numpy(fs: FieldSpec, mat: np.ndarray) -> list[int]:
    rows, cols = mat.shape
    piv_cols: list[int] = []
    pr = 0
    for c in range(cols):
        nz = np.nonzero(mat[pr:, c])[0]
        if nz.size == 0:
            continue
        p = pr + int(nz[0])
        if p != pr:
            mat[[pr, p], c:] = mat[[p, pr], c:]
        v = int(mat[pr, c])
        if v != 1:
            mat[pr, c:] = fs.mul_arr(fs.inv(v), mat[pr, c:])
        below = np.nonzero(mat[pr + 1 :, c])[0]
        if below.size:
            idx = pr + 1 + below
            mat[np.ix_(idx, range(c, cols))] ^= fs.mul_arr(
                mat[idx, c][:, None], mat[pr, c:][None, :]
            )
        piv_cols.append(c)
        pr += 1
        if pr == rows:
            break
    for i in range(len(piv_cols) - 1, -1, -1):
        c = piv_cols[i]
        above = np.nonzero(mat[:i, c])[0]
        if above.size:
            mat[np.ix_(above, range(c, cols))] ^= fs.mul_arr(
                mat[above, c][:, None], mat[i, c:][None, :]
            )
    return piv_cols


def dense_rref(fs: FieldSpec, mat) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of a dense matrix.

    Returns ``(rref_rows, pivot_cols)`` where ``rref_rows`` holds only the
    nonzero rows (rank many).
    """
    work = np.ascontiguousarray(np.asarray(mat, dtype=np.int64)).copy()
    if work.size == 0:
        return work.reshape(0, work.shape[1] if work.ndim == 2 else 0), np.empty(0, dtype=np.int64)
    if _HAVE_NUMBA:
        if fs.q == 2:
            piv = _rref_kernel_f2(work)
        else:
            piv = _rref_kernel(work, fs._log, fs._exp, fs.q - 1)
        piv = np.asarray(piv, dtype=np.int64)
    else:  # pragma: no cover - numba is a declared dependency
        piv = np.array(_rref_numpy(fs, work), dtype=np.int64)
    return work[: piv.size], piv


def dense_rank(fs: FieldSpec, mat) -> int:
    return int(dense_rref(fs, mat)[0].shape[0])


def _kernel_from_rref(rref: np.ndarray, piv: np.ndarray, cols: int) -> np.ndarray:
    """Kernel basis from an RREF; one row per free column, ascending."""
    piv_set = set(int(c) for c in piv)
    free = [c for c in range(cols) if c not in piv_set]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        out[i, f] = 1
        # x_piv = sum over free cols of rref entries (characteristic 2)
        out[i, piv] = rref[:, f]
    return out


def dense_kernel_basis(fs: FieldSpec, mat) -> np.ndarray:
    """Right kernel of a dense matrix, rows in canonical RREF."""
    mat = np.asarray(mat, dtype=np.int64)
    cols = mat.shape[1]
    rref, piv = dense_rref(fs, mat)
    ker = _kernel_from_rref(rref, piv, cols)
    return dense_rref(fs, ker)[0] if ker.size else ker


def dense_image_basis(fs: FieldSpec, mat) -> np.ndarray:
    """Column-space basis (as row vectors) in canonical RREF."""
    mat = np.asarray(mat, dtype=np.int64)
    return dense_rref(fs, mat.T)[0]


def dense_solve(fs: FieldSpec, mat, b) -> np.ndarray | None:
    """One solution of ``mat @ x = b`` or None if inconsistent."""
    mat = np.asarray(mat, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    aug = np.hstack([mat, b[:, None]])
    rref, piv = dense_rref(fs, aug)
    cols = mat.shape[1]
    if piv.size and piv[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.int64)
    x[piv] = rref[:, cols]
    return x


# ---------------------------------------------------------------------------
# Sparse elimination: the primary SpMat route
# ---------------------------------------------------------------------------


def _sparse_rref(fs: FieldSpec, rows: list[dict[int, int]], cols: int):
    """RREF of a list of sparse rows; returns list of (pivot_col, row_dict)."""
    from collections import defaultdict

    mul, inv = fs.mul, fs.inv
    pending: dict[int, list[tuple[int, dict[int, int]]]] = defaultdict(list)
    for idx, row in enumerate(rows):
        if row:
            pending[min(row)].append((idx, row))
    pivots: list[tuple[int, dict[int, int]]] = []
    for c in range(cols):
        bucket = pending.pop(c, None)
        if not bucket:
            continue
        bucket.sort(key=lambda item: item[0])
        pidx, prow = bucket[0]
        pv = prow[c]
        if pv != 1:
            fi = inv(pv)
            prow = {k: mul(fi, v) for k, v in prow.items()}
        pivots.append((c, prow))
        for idx, row in bucket[1:]:
            f = row[c]
            for k, v in prow.items():
                nv = row.get(k, 0) ^ mul(f, v)
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            if row:
                pending[min(row)].append((idx, row))
    # back substitution
    for i in range(len(pivots) - 1, -1, -1):
        c, prow = pivots[i]
        for j in range(i):
            rj = pivots[j][1]
            f = rj.get(c, 0)
            if f:
                for k, v in prow.items():
                    nv = rj.get(k, 0) ^ mul(f, v)
                    if nv:
                        rj[k] = nv
                    else:
                        rj.pop(k, None)
    return pivots


class SpMat:
    """Immutable sorted-COO sparse matrix over a FieldSpec.

    Rank/kernel/image/solve default to the sparse elimination route and
    fall back to the dense route for large matrices with at most
    ``DENSE_COL_CAP`` columns; ``method`` forces one route explicitly.
    """

    def __init__(self, fs: FieldSpec, shape: tuple[int, int], rows, cols, vals):
        self.fs = fs
        self.shape = (int(shape[0]), int(shape[1]))
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.int64)
        keep = vals != 0
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size:
            dup = (np.diff(rows) == 0) & (np.diff(cols) == 0)
            if np.any(dup):
                raise ValueError("duplicate (row, col) entries in SpMat")
            if rows.max(initial=-1) >= self.shape[0] or cols.max(initial=-1) >= self.shape[1]:
                raise ValueError("entry outside matrix shape")
        self.row = rows
        self.col = cols
        self.val = vals

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_dense(cls, fs: FieldSpec, arr) -> "SpMat":
        arr = np.asarray(arr, dtype=np.int64)
        r, c = np.nonzero(arr)
        return cls(fs, arr.shape, r, c, arr[r, c])

    @classmethod
    def zeros(cls, fs: FieldSpec, shape) -> "SpMat":
        return cls(fs, shape, [], [], [])

    @classmethod
    def identity(cls, fs: FieldSpec, n: int) -> "SpMat":
        idx = np.arange(n)
        return cls(fs, (n, n), idx, idx, np.ones(n, dtype=np.int64))

    # -- conversions -----------------------------------------------------

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        out[self.row, self.col] = self.val
        return out

    def to_rowdicts(self) -> list[dict[int, int]]:
        rows: list[dict[int, int]] = [dict() for _ in range(self.shape[0])]
        for r, c, v in zip(self.row.tolist(), self.col.tolist(), self.val.tolist()):
            rows[r][c] = v
        return rows

    def triples(self) -> list[tuple[int, int, int]]:
        return list(zip(self.row.tolist(), self.col.tolist(), self.val.tolist()))

    @property
    def nnz(self) -> int:
        return int(self.val.size)

    # -- algebra ---------------------------------------------------------

    def transpose(self) -> "SpMat":
        return SpMat(self.fs, (self.shape[1], self.shape[0]), self.col, self.row, self.val)

    @property
    def T(self) -> "SpMat":
        return self.transpose()

    def mat_vec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if v.shape[0] != self.shape[1]:
            raise ValueError("vector length mismatch")
        out = np.zeros(self.shape[0], dtype=np.int64)
        if self.nnz:
            np.bitwise_xor.at(out, self.row, self.fs.mul_arr(self.val, v[self.col]))
        return out

    def __matmul__(self, other: "SpMat") -> "SpMat":
        if self.shape[1] != other.shape[0]:
            raise ValueError("shape mismatch in sparse matmul")
        if self.nnz == 0 or other.nnz == 0:
            return SpMat.zeros(self.fs, (self.shape[0], other.shape[1]))
        # expand products along the shared index, then coalesce by XOR
        b_order = np.lexsort((other.col, other.row))
        brow, bcol, bval = other.row[b_order], other.col[b_order], other.val[b_order]
        starts = np.searchsorted(brow, self.col, side="left")
        ends = np.searchsorted(brow, self.col, side="right")
        counts = ends - starts
        keep = counts > 0
        if not np.any(keep):
            return SpMat.zeros(self.fs, (self.shape[0], other.shape[1]))
        arow, aval = self.row[keep], self.val[keep]
        starts, counts = starts[keep], counts[keep]
        total = int(counts.sum())
        take = np.repeat(starts, counts) + (
            np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        )
        rr = np.repeat(arow, counts)
        cc = bcol[take]
        vv = self.fs.mul_arr(np.repeat(aval, counts), bval[take])
        order = np.lexsort((cc, rr))
        rr, cc, vv = rr[order], cc[order], vv[order]
        boundary = np.ones(rr.size, dtype=bool)
        boundary[1:] = (np.diff(rr) != 0) | (np.diff(cc) != 0)
        group_starts = np.nonzero(boundary)[0]
        red = np.bitwise_xor.reduceat(vv, group_starts)
        return SpMat(self.fs, (self.shape[0], other.shape[1]), rr[group_starts], cc[group_starts], red)

    def __eq__(self, other):
        return (
            isinstance(other, SpMat)
            and self.shape == other.shape
            and np.array_equal(self.row, other.row)
            and np.array_equal(self.col, other.col)
            and np.array_equal(self.val, other.val)
        )

    def is_zero(self) -> bool:
        return self.nnz == 0

    # -- elimination-backed queries ---------------------------------------

    def _pick_method(self, method: str | None) -> str:
        if method is not None:
            return method
        work = self.shape[0] * self.shape[1]
        if work > _DENSE_WORK_MIN and self.shape[1] <= DENSE_COL_CAP:
            return "dense"
        return "sparse"

    def rref(self, method: str | None = None) -> tuple[np.ndarray, np.ndarray]:
        if self._pick_method(method) == "dense":
            return dense_rref(self.fs, self.to_dense())
        pivots = _sparse_rref(self.fs, self.to_rowdicts(), self.shape[1])
        out = np.zeros((len(pivots), self.shape[1]), dtype=np.int64)
        for i, (_, row) in enumerate(pivots):
            for k, v in row.items():
                out[i, k] = v
        return out, np.array([c for c, _ in pivots], dtype=np.int64)

    def rank(self, method: str | None = None) -> int:
        return int(self.rref(method)[0].shape[0])

    def kernel_basis(self, method: str | None = None) -> np.ndarray:
        rref, piv = self.rref(method)
        ker = _kernel_from_rref(rref, piv, self.shape[1])
        if ker.size == 0:
            return ker
        if self._pick_method(method) == "dense":
            return dense_rref(self.fs, ker)[0]
        return SpMat.from_dense(self.fs, ker).rref(method="sparse")[0]

    def image_basis(self, method: str | None = None) -> np.ndarray:
        return self.transpose().rref(method)[0]

    def solve(self, b, method: str | None = None) -> np.ndarray | None:
        """One solution of ``self @ x = b`` or None if inconsistent."""
        b = np.asarray(b, dtype=np.int64)
        if b.shape[0] != self.shape[0]:
            raise ValueError("rhs length mismatch")
        cols = self.shape[1]
        if self._pick_method(method) == "dense":
            return dense_solve(self.fs, self.to_dense(), b)
        rows = self.to_rowdicts()
        for r in np.nonzero(b)[0]:
            rows[int(r)][cols] = int(b[r])
        pivots = _sparse_rref(self.fs, rows, cols + 1)
        if pivots and pivots[-1][0] == cols:
            return None
        x = np.zeros(cols, dtype=np.int64)
        for c, row in pivots:
            x[c] = row.get(cols, 0)
        return x

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "shape": list(self.shape),
            "entries": [[int(r), int(c), int(v)] for r, c, v in self.triples()],
        }

    @classmethod
    def from_json(cls, fs: FieldSpec, data: dict) -> "SpMat":
        ent = data["entries"]
        rows = [e[0] for e in ent]
        cols = [e[1] for e in ent]
        vals = [e[2] for e in ent]
        return cls(fs, tuple(data["shape"]), rows, cols, vals)

    def __repr__(self):
        return f"SpMat({self.shape[0]}x{self.shape[1]}, nnz={self.nnz}, q={self.fs.q})"


# ---------------------------------------------------------------------------
# Row-space utilities shared by the sheaf and chain layers
# ---------------------------------------------------------------------------


def reduce_against(fs: FieldSpec, rref: np.ndarray, piv: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Reduce row vectors against an RREF basis; residual is zero iff in span."""
    vecs = np.array(vecs, dtype=np.int64, copy=True)
    if vecs.ndim == 1:
        vecs = vecs[None, :]
    for i, c in enumerate(piv):
        f = vecs[:, c]
        nz = np.nonzero(f)[0]
        if nz.size:
            vecs[nz] ^= fs.mul_arr(f[nz][:, None], rref[i][None, :])
    return vecs


def coords_in_rowspace(fs: FieldSpec, rref: np.ndarray, piv: np.ndarray, vecs) -> np.ndarray | None:
    """Coordinates of vectors in an RREF row basis, or None if not in span."""
    vecs = np.asarray(vecs, dtype=np.int64)
    single = vecs.ndim == 1
    if single:
        vecs = vecs[None, :]
    coords = vecs[:, piv] if piv.size else np.zeros((vecs.shape[0], 0), dtype=np.int64)
    if not np.array_equal(matmul(fs, coords, rref) if rref.size else np.zeros_like(vecs), vecs):
        return None
    return coords[0] if single else coords


def quotient_reps(fs: FieldSpec, z_basis: np.ndarray, b_basis: np.ndarray) -> np.ndarray:
    """Representatives of the quotient span(Z)/span(B).

    Requires span(B) to be contained in span(Z) (checked).  The returned
    rows together with ``b_basis`` span Z, and the result is the RREF of
    the reduced generators, hence deterministic.
    """
    z_basis = np.asarray(z_basis, dtype=np.int64)
    b_basis = np.asarray(b_basis, dtype=np.int64)
    if z_basis.ndim != 2:
        raise ValueError("z_basis must be 2-d")
    zr, zp = dense_rref(fs, z_basis)
    if b_basis.size:
        if b_basis.shape[1] != z_basis.shape[1]:
            raise ValueError("basis length mismatch")
        resid = reduce_against(fs, zr, zp, b_basis)
        if np.any(resid):
            raise ValueError("b_basis is not contained in span(z_basis)")
        br, bp = dense_rref(fs, b_basis)
        reduced = reduce_against(fs, br, bp, zr)
    else:
        reduced = zr
    reps = dense_rref(fs, reduced)[0]
    return reps
