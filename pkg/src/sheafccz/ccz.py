"""CCZ codes: sparse trilinear forms on physical qudits, certification,
logical restriction, and subrank bounds.

A trilinear form with the invariance property (its value only depends on
the cohomology classes of its three arguments) makes the phase unitary it
defines act within the code space; the entry list of the form doubles as
the gate decomposition, one controlled-phase gate per nonzero entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf
from .chain import ChainComplex
from .cup import cube_form_entries, simplicial_form_entries, square_form_entries
from .gf import FieldSpec, quotient_reps


@dataclass
class BilinearForm:
    """Sparse bilinear form on two coordinate spaces."""

    fs: FieldSpec
    n1: int
    n2: int
    j1: np.ndarray
    j2: np.ndarray
    val: np.ndarray

    def evaluate(self, a1, a2) -> int:
        if self.val.size == 0:
            return 0
        a1 = np.asarray(a1, dtype=np.int64)
        a2 = np.asarray(a2, dtype=np.int64)
        terms = self.fs.mul_arr(self.fs.mul_arr(self.val, a1[self.j1]), a2[self.j2])
        return int(np.bitwise_xor.reduce(terms))


@dataclass
class TrilinearForm:
    """Sparse trilinear form on three physical coordinate spaces."""

    fs: FieldSpec
    n1: int
    n2: int
    n3: int
    j1: np.ndarray
    j2: np.ndarray
    j3: np.ndarray
    val: np.ndarray

    def __post_init__(self):
        self.j1 = np.asarray(self.j1, dtype=np.int64)
        self.j2 = np.asarray(self.j2, dtype=np.int64)
        self.j3 = np.asarray(self.j3, dtype=np.int64)
        self.val = np.asarray(self.val, dtype=np.int64)
        if np.any(self.val == 0):
            raise ValueError("form entries must be nonzero")

    def evaluate(self, a1, a2, a3) -> int:
        if self.val.size == 0:
            return 0
        a1 = np.asarray(a1, dtype=np.int64)
        a2 = np.asarray(a2, dtype=np.int64)
        a3 = np.asarray(a3, dtype=np.int64)
        terms = self.fs.mul_arr(
            self.fs.mul_arr(self.fs.mul_arr(self.val, a1[self.j1]), a2[self.j2]), a3[self.j3]
        )
        return int(np.bitwise_xor.reduce(terms))

    @property
    def n_ccz(self) -> int:
        """Number of physical controlled-phase gates in the decomposition."""
        return int(self.val.size)

    @property
    def w_ccz(self) -> int:
        """Largest number of gates any single qudit participates in."""
        if self.val.size == 0:
            return 0
        return max(
            int(np.bincount(j, minlength=n).max())
            for j, n in ((self.j1, self.n1), (self.j2, self.n2), (self.j3, self.n3))
        )

    def restrict(self, r1: np.ndarray, r2: np.ndarray, r3: np.ndarray) -> np.ndarray:
        """Dense tensor of the form on the rows of three basis matrices."""
        fs = self.fs
        k1, k2, k3 = r1.shape[0], r2.shape[0], r3.shape[0]
        out = np.zeros((k1, k2, k3), dtype=np.int64)
        if self.val.size == 0 or 0 in (k1, k2, k3):
            return out
        for a in range(k1):
            w = fs.mul_arr(self.val, r1[a][self.j1])
            keep = w != 0
            if not np.any(keep):
                continue
            wk, j2k, j3k = w[keep], self.j2[keep], self.j3[keep]
            partial = np.zeros((k2, self.n3), dtype=np.int64)
            for b in range(k2):
                t = fs.mul_arr(wk, r2[b][j2k])
                np.bitwise_xor.at(partial[b], j3k, t)
            out[a] = gf.matmul(fs, partial, r3.T)
        return out

    def gate_lines(self):
        """Gate decomposition, one line per physical controlled-phase gate."""
        for a, b, c, v in zip(self.j1, self.j2, self.j3, self.val):
            yield f"CCZ {int(a)} {int(b)} {int(c)} {int(v)}"

    def to_json(self) -> dict:
        return {
            "shape": [self.n1, self.n2, self.n3],
            "entries": [
                [int(a), int(b), int(c), int(v)]
                for a, b, c, v in zip(self.j1, self.j2, self.j3, self.val)
            ],
        }


def materialize_form(
    fs: FieldSpec,
    evaluator,
    n1: int,
    n2: int,
    n3: int,
    candidates=None,
    spot_check: int = 8,
    seed: int = 0,
) -> TrilinearForm:
    """Entry list of a trilinear evaluator on standard basis triples.

    ``candidates`` optionally restricts evaluation to triples that can be
    nonzero (a locality hint); all other triples are taken to vanish.
    Trilinearity is spot-checked on random additive combinations.
    """
    if candidates is None:
        candidates = (
            (a, b, c) for a in range(n1) for b in range(n2) for c in range(n3)
        )
    j1s, j2s, j3s, vals = [], [], [], []
    e1 = np.zeros(n1, dtype=np.int64)
    e2 = np.zeros(n2, dtype=np.int64)
    e3 = np.zeros(n3, dtype=np.int64)
    for a, b, c in candidates:
        e1[a] = e2[b] = e3[c] = 1
        v = evaluator(e1, e2, e3)
        e1[a] = e2[b] = e3[c] = 0
        if v:
            j1s.append(a)
            j2s.append(b)
            j3s.append(c)
            vals.append(v)
    form = TrilinearForm(fs, n1, n2, n3, np.array(j1s), np.array(j2s), np.array(j3s), np.array(vals))
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    for _ in range(spot_check):
        x1, y1 = fs.random_arr(rng, n1), fs.random_arr(rng, n1)
        x2 = fs.random_arr(rng, n2)
        x3 = fs.random_arr(rng, n3)
        lhs = evaluator(x1 ^ y1, x2, x3)
        rhs = evaluator(x1, x2, x3) ^ evaluator(y1, x2, x3)
        if lhs != rhs:
            raise ValueError("evaluator is not trilinear (additivity fails in leg 1)")
        if form.evaluate(x1, x2, x3) != evaluator(x1, x2, x3):
            raise ValueError("materialized entries do not reproduce the evaluator")
    return form


def square_form(c1: ChainComplex, c2: ChainComplex) -> BilinearForm:
    j1, j2, val = square_form_entries(c1, c2)
    return BilinearForm(c1.fs, c1.dims[1], c2.dims[1], j1, j2, val)


def cube_form(c1: ChainComplex, c2: ChainComplex, c3: ChainComplex) -> TrilinearForm:
    j1, j2, j3, val = cube_form_entries(c1, c2, c3)
    return TrilinearForm(c1.fs, c1.dims[1], c2.dims[1], c3.dims[1], j1, j2, j3, val)


def cup_form(legs: list[ChainComplex], degrees: list[int]) -> TrilinearForm:
    j1, j2, j3, val = simplicial_form_entries(legs, degrees)
    return TrilinearForm(
        legs[0].fs,
        legs[0].dims[degrees[0]],
        legs[1].dims[degrees[1]],
        legs[2].dims[degrees[2]],
        j1,
        j2,
        j3,
        val,
    )


def cup_form_fixed_leg(
    legs: list[ChainComplex], degrees: list[int], zeta4: np.ndarray
) -> TrilinearForm:
    """Trilinear form obtained by freezing the fourth leg of a quadruple cup form.

    ``zeta4`` should be a cocycle of the fourth leg at its degree; the
    resulting form certifies exactly like the three-leg one.
    """
    i1, i2, i3, i4, val = simplicial_form_entries(legs, degrees)
    v = legs[3].fs.mul_arr(val, np.asarray(zeta4, dtype=np.int64)[i4])
    keep = v != 0
    from .cup import _coalesce

    j1, j2, j3, vv = _coalesce(
        legs[0].fs, [[i1[keep]], [i2[keep]], [i3[keep]]], [v[keep]]
    )
    return TrilinearForm(
        legs[0].fs,
        legs[0].dims[degrees[0]],
        legs[1].dims[degrees[1]],
        legs[2].dims[degrees[2]],
        j1,
        j2,
        j3,
        vv,
    )


# ---------------------------------------------------------------------------
# CCZ codes and their certification
# ---------------------------------------------------------------------------


@dataclass
class CczLeg:
    """One leg of a CCZ code: a coordinate space with its cocycles and
    coboundaries (X logical candidates and X stabilizers)."""

    fs: FieldSpec
    n: int
    zbasis: np.ndarray
    bbasis: np.ndarray
    cplx: ChainComplex | None = None
    level: int | None = None

    @classmethod
    def from_complex(cls, cplx: ChainComplex, level: int) -> "CczLeg":
        return cls(
            cplx.fs,
            cplx.dims[level],
            cplx.cocycle_basis(level),
            cplx.coboundary_basis(level),
            cplx,
            level,
        )

    @classmethod
    def from_spans(cls, fs: FieldSpec, stabilizers: np.ndarray, logicals: np.ndarray) -> "CczLeg":
        stabilizers = np.asarray(stabilizers, dtype=np.int64).reshape(-1, logicals.shape[-1])
        logicals = np.asarray(logicals, dtype=np.int64)
        z = gf.dense_rref(fs, np.vstack([stabilizers, logicals]))[0]
        b = gf.dense_rref(fs, stabilizers)[0]
        return cls(fs, logicals.shape[-1], z, b)

    @property
    def k(self) -> int:
        return self.zbasis.shape[0] - self.bbasis.shape[0]

    def logical_reps(self) -> np.ndarray:
        return quotient_reps(self.fs, self.zbasis, self.bbasis)

    def random_cocycle(self, rng) -> np.ndarray:
        c = self.fs.random_arr(rng, self.zbasis.shape[0])
        return gf.matmul(self.fs, c[None, :], self.zbasis)[0] if c.size else np.zeros(self.n, dtype=np.int64)

    def random_coboundary(self, rng) -> np.ndarray:
        c = self.fs.random_arr(rng, self.bbasis.shape[0])
        return gf.matmul(self.fs, c[None, :], self.bbasis)[0] if c.size else np.zeros(self.n, dtype=np.int64)


@dataclass
class CertReport:
    trials: int
    seed: int
    passed: int
    failures: list

    @property
    def ok(self) -> bool:
        return self.passed == self.trials and not self.failures

    def to_json(self):
        return {
            "ok": self.ok,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "failures": self.failures,
        }


@dataclass
class CCZCode:
    """Three legs and a trilinear form, with its certification status.

    The certified invariance is at field level, which by nondegeneracy of
    the trace pairing already covers the trace-level phase condition.
    """

    legs: tuple
    form: TrilinearForm
    certification: CertReport | None = None

    @property
    def certified(self) -> bool:
        return self.certification is not None and self.certification.ok


def product_condition_status(code: CCZCode) -> dict:
    """Per-(t-1)-cell status of the sum-zero product condition.

    Available when every leg is backed by a sheaf cochain complex on one
    complex; the theorem guarantees certification whenever all cells pass.
    """
    from .localcode import product_condition

    cplxs = [leg.cplx for leg in code.legs]
    # diagnostic only ("ok" pinned true): the condition is sufficient for
    # certification, not necessary
    if any(c is None for c in cplxs) or len({id(c.x) for c in cplxs}) != 1:
        return {"ok": True, "available": False, "cells": {}}
    x = cplxs[0].x
    cells = {}
    for i in range(x.n_cells(x.t - 1)):
        codes = [c.sheaf.local_code(i) for c in cplxs]
        cells[str(x.cell(x.t - 1, i))] = bool(product_condition(*codes))
    return {"ok": True, "available": True, "all_pass": all(cells.values()), "cells": cells}


def certify_ccz(code: CCZCode, trials: int = 200, seed: int = 0) -> CertReport:
    """Seeded trials of invariance under coboundary shifts on every leg.

    Each trial draws random cocycles and coboundaries and requires
    f(z1+b1, z2+b2, z3+b3) = f(z1, z2, z3) exactly.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    failures = []
    passed = 0
    for trial in range(trials):
        zs = [leg.random_cocycle(rng) for leg in code.legs]
        bs = [leg.random_coboundary(rng) for leg in code.legs]
        base = code.form.evaluate(*zs)
        shifted = code.form.evaluate(*(z ^ b for z, b in zip(zs, bs)))
        if base == shifted:
            passed += 1
        else:
            failures.append(
                {
                    "trial": trial,
                    "base": int(base),
                    "shifted": int(shifted),
                    "witness_weights": [int(np.count_nonzero(v)) for v in zs + bs],
                }
            )
            if len(failures) >= 8:
                break
    report = CertReport(trials=trials, seed=seed, passed=passed, failures=failures)
    code.certification = report
    return report


# ---------------------------------------------------------------------------
# Logical tensor and subrank
# ---------------------------------------------------------------------------


@dataclass
class LogicalTensor:
    """Dense tensor of the form restricted to logical representatives."""

    fs: FieldSpec
    tensor: np.ndarray
    reps: tuple

    @property
    def dims(self):
        return self.tensor.shape


def build_logical_tensor(code: CCZCode, recheck_shift_seed: int | None = None) -> LogicalTensor:
    """Restrict the form to cohomology representatives of the three legs.

    With ``recheck_shift_seed`` the representatives are re-randomized by
    coboundaries and the tensor recomputed; certified forms must give the
    identical tensor, and a mismatch raises.
    """
    reps = tuple(leg.logical_reps() for leg in code.legs)
    t = code.form.restrict(*reps)
    if recheck_shift_seed is not None:
        rng = np.random.default_rng(np.random.SeedSequence(recheck_shift_seed))
        shifted = []
        for leg, r in zip(code.legs, reps):
            if r.shape[0] == 0:
                shifted.append(r)
                continue
            shift = np.vstack([leg.random_coboundary(rng) for _ in range(r.shape[0])])
            shifted.append(r ^ shift)
        t2 = code.form.restrict(*shifted)
        if not np.array_equal(t, t2) and code.certified:
            raise AssertionError("certified form changed under representative shift")
    return LogicalTensor(code.form.fs, t, reps)


@dataclass
class SubrankCertificate:
    r: int
    maps: tuple  # (M1, M2, M3), each r x k_i

    def to_json(self):
        return {"r": self.r, "maps": [m.tolist() for m in self.maps]}


def verify_subrank_certificate(fs: FieldSpec, tensor: np.ndarray, cert: SubrankCertificate) -> bool:
    """Direct contraction check that the maps diagonalize the tensor."""
    m1, m2, m3 = cert.maps
    r = cert.r
    k1, k2, k3 = tensor.shape
    out = np.zeros((r, r, r), dtype=np.int64)
    for i in range(k1):
        for j in range(k2):
            row = tensor[i, j]
            if not row.any():
                continue
            contrib = gf.matmul(fs, m3, row[:, None])[:, 0]
            if not contrib.any():
                continue
            coef = fs.mul_arr(m1[:, i][:, None], m2[:, j][None, :])
            out ^= fs.mul_arr(coef[:, :, None], contrib[None, None, :])
    want = np.zeros((r, r, r), dtype=np.int64)
    for a in range(r):
        want[a, a, a] = 1
    return np.array_equal(out, want)


def _tensor_eval(fs, tensor, x, y, z) -> int:
    v = gf.matmul(fs, tensor.reshape(-1, tensor.shape[2]), z[:, None])[:, 0].reshape(
        tensor.shape[0], tensor.shape[1]
    )
    v = gf.matmul(fs, v, y[:, None])[:, 0]
    return int(np.bitwise_xor.reduce(fs.mul_arr(v, x))) if v.size else 0


def subrank_lower_bound(
    fs: FieldSpec, tensor: np.ndarray, restarts: int = 64, seed: int = 0
) -> SubrankCertificate:
    """Greedy diagonalization lower bound on the subrank, with certificate.

    Repeatedly extends a list of triples evaluating to a unit diagonal:
    new left/middle vectors are sampled from the linear constraints
    imposed by the previous triples, and the right vector solves the
    remaining affine system.  The best run over all restarts wins.
    """
    k1, k2, k3 = tensor.shape
    rmax = min(k1, k2, k3)
    best = SubrankCertificate(0, (np.zeros((0, k1), np.int64), np.zeros((0, k2), np.int64), np.zeros((0, k3), np.int64)))
    if rmax == 0 or not tensor.any():
        return best
    root = np.random.SeedSequence(seed)
    for restart_seq in root.spawn(restarts):
        rng = np.random.default_rng(restart_seq)
        xs: list[np.ndarray] = []
        ys: list[np.ndarray] = []
        zs: list[np.ndarray] = []
        while len(xs) < rmax:
            added = False
            for attempt in range(24):
                # left vector: kill all (old middle, old right) pairs
                cons = [
                    np.array([_tensor_eval(fs, tensor, e, yb, zc) for e in np.eye(k1, dtype=np.int64)])
                    for yb in ys
                    for zc in zs
                ]
                x = _sample_kernel(fs, cons, k1, rng, attempt)
                if x is None:
                    continue
                # middle vector: kill (old left, old right) and (new left, old right)
                cons = [
                    np.array([_tensor_eval(fs, tensor, xa, e, zc) for e in np.eye(k2, dtype=np.int64)])
                    for xa in xs + [x]
                    for zc in zs
                ]
                y = _sample_kernel(fs, cons, k2, rng, attempt)
                if y is None:
                    continue
                # right vector: affine solve over all index patterns
                rows, rhs = [], []
                allx, ally = xs + [x], ys + [y]
                for a, xa in enumerate(allx):
                    for b, yb in enumerate(ally):
                        rows.append(
                            np.array(
                                [_tensor_eval(fs, tensor, xa, yb, e) for e in np.eye(k3, dtype=np.int64)]
                            )
                        )
                        rhs.append(1 if a == b == len(xs) else 0)
                z = gf.dense_solve(fs, np.array(rows), np.array(rhs, dtype=np.int64))
                if z is None:
                    continue
                xs.append(x)
                ys.append(y)
                zs.append(z)
                added = True
                break
            if not added:
                break
        if len(xs) > best.r:
            cert = SubrankCertificate(len(xs), (np.array(xs), np.array(ys), np.array(zs)))
            if not verify_subrank_certificate(fs, tensor, cert):
                raise AssertionError("greedy subrank certificate failed verification")
            best = cert
            if best.r == rmax:
                break
    return best


def _sample_kernel(fs, constraint_rows, n, rng, attempt: int = 0) -> np.ndarray | None:
    if constraint_rows:
        ker = gf.dense_kernel_basis(fs, np.array(constraint_rows))
    else:
        ker = np.eye(n, dtype=np.int64)
    if ker.shape[0] == 0:
        return None
    # early attempts walk the kernel basis itself before going random
    if attempt < ker.shape[0]:
        return ker[attempt].copy()
    for _ in range(12):
        c = fs.random_arr(rng, ker.shape[0])
        v = gf.matmul(fs, c[None, :], ker)[0]
        if v.any():
            return v
    return None


def _full_row_rank_maps(fs, r, k):
    """All full-row-rank r x k matrices over the field (exhaustive, tiny)."""
    total = fs.q ** (r * k)
    out = []
    for enc in range(total):
        m = np.zeros((r, k), dtype=np.int64)
        e = enc
        for a in range(r):
            for b in range(k):
                m[a, b] = e % fs.q
                e //= fs.q
        if gf.dense_rank(fs, m) == r:
            out.append(m)
    return out


def exhaustive_subrank(fs: FieldSpec, tensor: np.ndarray) -> SubrankCertificate:
    """Exact subrank by exhaustion over the map space (tiny dimensions only).

    Intended for dims at most 3 over small fields; enumerates full-row-rank
    left/middle maps and solves linearly for the right map.
    """
    k1, k2, k3 = tensor.shape
    rmax = min(k1, k2, k3)
    if max(k1, k2, k3) > 3 or fs.q > 4:
        raise ValueError("exhaustive subrank is gated to dims <= 3 and q <= 4")
    for r in range(rmax, 0, -1):
        maps1 = _full_row_rank_maps(fs, r, k1)
        maps2 = _full_row_rank_maps(fs, r, k2)
        for m1 in maps1:
            # partial contraction along legs 1: P[a, j, k]
            p1 = np.zeros((r, k2, k3), dtype=np.int64)
            for i in range(k1):
                col = m1[:, i]
                nz = np.nonzero(col)[0]
                for a in nz:
                    p1[a] ^= fs.mul_arr(int(col[a]), tensor[i])
            for m2 in maps2:
                p2 = np.zeros((r, r, k3), dtype=np.int64)
                for j in range(k2):
                    col = m2[:, j]
                    nz = np.nonzero(col)[0]
                    for b in nz:
                        p2[:, b, :] ^= fs.mul_arr(int(col[b]), p1[:, j, :])
                # solve rows of M3: for each c, sum_k M3[c,k] p2[a,b,k] = delta
                a_mat = p2.reshape(r * r, k3)
                m3 = np.zeros((r, k3), dtype=np.int64)
                good = True
                for c in range(r):
                    rhs = np.zeros((r, r), dtype=np.int64)
                    rhs[c, c] = 1
                    x = gf.dense_solve(fs, a_mat, rhs.reshape(-1))
                    if x is None:
                        good = False
                        break
                    m3[c] = x
                if good:
                    cert = SubrankCertificate(r, (m1, m2, m3))
                    if not verify_subrank_certificate(fs, tensor, cert):
                        raise AssertionError("exhaustive subrank certificate failed verification")
                    return cert
    return SubrankCertificate(
        0, (np.zeros((0, k1), np.int64), np.zeros((0, k2), np.int64), np.zeros((0, k3), np.int64))
    )


# ---------------------------------------------------------------------------
# Triorthogonality
# ---------------------------------------------------------------------------


@dataclass
class TriorthReport:
    ok: bool
    violations: list
    code: CCZCode | None = None

    def to_json(self):
        return {"ok": self.ok, "violations": self.violations}


def triorthogonal_report(stab_rows, logical_rows) -> TriorthReport:
    """Check the four triorthogonality conditions over GF(2).

    On success assembles the diagonal form sum_i x_i y_i z_i over three
    copies of the code as a CCZ code (certification left to the caller).
    """
    fs = FieldSpec(1)
    logical_rows = np.asarray(logical_rows, dtype=np.int64)
    if logical_rows.ndim != 2:
        raise ValueError("logical_rows must be a 2-d binary matrix")
    n = logical_rows.shape[1]
    stab_rows = np.asarray(stab_rows, dtype=np.int64).reshape(-1, n)
    violations = []
    for a, row in enumerate(stab_rows):
        if int(row.sum()) % 2 != 0:
            violations.append(f"stabilizer row {a} has odd weight")
    for a, row in enumerate(logical_rows):
        if int(row.sum()) % 2 != 1:
            violations.append(f"logical row {a} has even weight")
    rows = [("b", i, r) for i, r in enumerate(stab_rows)] + [
        ("z", i, r) for i, r in enumerate(logical_rows)
    ]
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if int((rows[i][2] & rows[j][2]).sum()) % 2 != 0:
                violations.append(f"pairwise overlap {rows[i][:2]} x {rows[j][:2]} is odd")
            for k in range(j + 1, len(rows)):
                if int((rows[i][2] & rows[j][2] & rows[k][2]).sum()) % 2 != 0:
                    violations.append(
                        f"triple overlap {rows[i][:2]} x {rows[j][:2]} x {rows[k][:2]} is odd"
                    )
    if violations:
        return TriorthReport(False, violations)
    leg = CczLeg.from_spans(fs, stab_rows, logical_rows)
    idx = np.arange(n)
    form = TrilinearForm(fs, n, n, n, idx, idx, idx, np.ones(n, dtype=np.int64))
    return TriorthReport(True, [], CCZCode((leg, leg, leg), form))
