"""Classical linear codes over GF(2^r): duals, Schur products, tensor codes.

A code is stored by a full-row-rank generator matrix.  Codes compare as
subspaces via their canonical RREF.
"""

from __future__ import annotations

import numpy as np

from . import gf
from .gf import FieldSpec, SpMat


class LinCode:
    """Linear code of given length with a full-row-rank generator matrix."""

    def __init__(self, fs: FieldSpec, length: int, generator):
        self.fs = fs
        self.length = int(length)
        g = np.asarray(generator, dtype=np.int64).reshape(-1, self.length)
        rref, piv = gf.dense_rref(fs, g)
        if rref.shape[0] != g.shape[0]:
            raise ValueError("generator rows are linearly dependent")
        self.generator = g
        self._rref = rref
        self._piv = piv

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    def rref(self) -> tuple[np.ndarray, np.ndarray]:
        return self._rref, self._piv

    def contains(self, vec) -> bool:
        resid = gf.reduce_against(self.fs, self._rref, self._piv, np.asarray(vec))
        return not resid.any()

    def same_subspace(self, other: "LinCode") -> bool:
        return (
            self.length == other.length
            and self.dim == other.dim
            and np.array_equal(self._rref, other._rref)
        )

    def __eq__(self, other):
        return isinstance(other, LinCode) and self.fs == other.fs and self.same_subspace(other)

    def __hash__(self):
        return hash((self.fs, self.length, self._rref.tobytes()))

    def to_json(self) -> dict:
        return {
            "field": self.fs.to_json(),
            "length": self.length,
            "generator": self.generator.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinCode":
        fs = FieldSpec.from_json(data["field"])
        return cls(fs, data["length"], data["generator"])

    def __repr__(self):
        return f"LinCode(q={self.fs.q}, n={self.length}, k={self.dim})"


def zero_code(fs: FieldSpec, length: int) -> LinCode:
    code = LinCode.__new__(LinCode)
    code.fs = fs
    code.length = length
    code.generator = np.zeros((0, length), dtype=np.int64)
    code._rref = np.zeros((0, length), dtype=np.int64)
    code._piv = np.empty(0, dtype=np.int64)
    return code


def full_code(fs: FieldSpec, length: int) -> LinCode:
    return LinCode(fs, length, np.eye(length, dtype=np.int64))


def repetition_code(fs: FieldSpec, length: int) -> LinCode:
    return LinCode(fs, length, np.ones((1, length), dtype=np.int64))


def parity_code(fs: FieldSpec, length: int) -> LinCode:
    """The sum-zero code: all vectors whose coordinates sum to zero."""
    return dual(repetition_code(fs, length))


def reed_solomon(fs: FieldSpec, k: int) -> LinCode:
    """Reed-Solomon code of dimension k evaluating x^0..x^(k-1) at all of GF(q).

    Evaluation points are the q field elements in encoding order.
    """
    if not 1 <= k <= fs.q:
        raise ValueError(f"Reed-Solomon dimension k={k} out of range [1, {fs.q}]")
    pts = fs.elements()
    gen = np.zeros((k, fs.q), dtype=np.int64)
    gen[0] = 1
    for j in range(1, k):
        gen[j] = fs.mul_arr(gen[j - 1], pts)
    return LinCode(fs, fs.q, gen)


def dual(code: LinCode) -> LinCode:
    """The orthogonal code under the standard bilinear form."""
    if code.dim == 0:
        return full_code(code.fs, code.length)
    ker = SpMat.from_dense(code.fs, code.generator).kernel_basis()
    if ker.shape[0] == 0:
        return zero_code(code.fs, code.length)
    return LinCode(code.fs, code.length, ker)


def schur_span(*codes: LinCode) -> LinCode:
    """Span of entrywise products of codewords of two or three codes.

    Multilinearity makes products of generator rows sufficient.
    """
    if not 2 <= len(codes) <= 3:
        raise ValueError("schur_span takes 2 or 3 codes")
    length = codes[0].length
    fs = codes[0].fs
    for c in codes[1:]:
        if c.length != length:
            raise ValueError(f"length mismatch in Schur product: {length} vs {c.length}")
    rows = []
    if len(codes) == 2:
        for u in codes[0].generator:
            for v in codes[1].generator:
                rows.append(fs.mul_arr(u, v))
    else:
        for u in codes[0].generator:
            for v in codes[1].generator:
                uv = fs.mul_arr(u, v)
                for w in codes[2].generator:
                    rows.append(fs.mul_arr(uv, w))
    if not rows:
        return zero_code(fs, length)
    basis = gf.dense_rref(fs, np.array(rows))[0]
    if basis.shape[0] == 0:
        return zero_code(fs, length)
    return LinCode(fs, length, basis)


def tensor_code(codes: list[LinCode]) -> LinCode:
    """Tensor (product) code; generator is the Kronecker product of generators.

    Coordinates are ordered lexicographically with the first factor slowest,
    matching ``np.kron``.
    """
    if not codes:
        raise ValueError("tensor_code needs at least one factor")
    fs = codes[0].fs
    gen = codes[0].generator
    for c in codes[1:]:
        if c.dim == 0 or gen.shape[0] == 0:
            return zero_code(fs, gen.shape[1] * c.length)
        rows = []
        for u in gen:
            for v in c.generator:
                rows.append(fs.mul_arr(u[:, None], v[None, :]).ravel())
        gen = np.array(rows)
    if gen.shape[0] == 0:
        return zero_code(fs, gen.shape[1])
    return LinCode(fs, gen.shape[1], gen)


def product_condition(*codes: LinCode) -> bool:
    """True iff the Schur span of the codes lies in the sum-zero code."""
    span = schur_span(*codes)
    ones = np.ones(span.length, dtype=np.int64)
    fs = span.fs
    return all(int(np.bitwise_xor.reduce(fs.mul_arr(row, ones))) == 0 for row in span.generator)


# ---------------------------------------------------------------------------
# Named constructors ("rep", "rs:k", "full", "zero", "dual:<name>")
# ---------------------------------------------------------------------------


def named_code(fs: FieldSpec, name: str, length: int) -> LinCode:
    name = name.strip()
    if name.startswith("dual:"):
        return dual(named_code(fs, name[5:], length))
    if name == "rep":
        return repetition_code(fs, length)
    if name == "full":
        return full_code(fs, length)
    if name == "zero":
        return zero_code(fs, length)
    if name == "parity":
        return parity_code(fs, length)
    if name.startswith("rs:"):
        k = int(name[3:])
        if length != fs.q:
            raise ValueError(f"rs codes need length q={fs.q}, complex provides {length}")
        return reed_solomon(fs, k)
    raise ValueError(f"unknown code name: {name!r}")
