"""Bit-packed +/-1 matrices and the elementary Hadamard-equivalence moves.

Row ``i`` of an order-``n`` matrix is stored as a Python int whose bit ``j``
is 1 when entry ``(i, j)`` is +1 and 0 when it is -1.  Inner products reduce
to ``n - 2 * popcount(a ^ b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class MatrixError(ValueError):
    """Raised for malformed matrices, bad indices or failed preconditions."""


def _mask(n: int) -> int:
    return (1 << n) - 1


def pack_rows(arr: np.ndarray) -> tuple[int, ...]:
    """Pack a 2-D +/-1 array into row integers (bit j <-> column j)."""
    bits = np.packbits(np.asarray(arr) > 0, axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in bits)


def unpack_rows(rows: Sequence[int], n: int) -> np.ndarray:
    nbytes = (n + 7) // 8
    buf = b"".join(r.to_bytes(nbytes, "little") for r in rows)
    raw = np.frombuffer(buf, dtype=np.uint8).reshape(len(rows), nbytes)
    bits = np.unpackbits(raw, axis=1, count=n, bitorder="little")
    return (bits.astype(np.int8) * 2 - 1).astype(np.int8)


@dataclass(frozen=True)
class HadamardMatrix:
    """Square +/-1 matrix stored as bit-packed rows.

    Instances are immutable.  ``array`` (int8 +/-1) and ``cols`` (bit-packed
    columns) are derived lazily and cached.
    """

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise MatrixError(f"order must be positive, got {self.n}")
        if len(self.rows) != self.n:
            raise MatrixError(f"expected {self.n} rows, got {len(self.rows)}")
        mask = _mask(self.n)
        for r in self.rows:
            if r < 0 or r & ~mask:
                raise MatrixError("row has bits outside the matrix width")

    @classmethod
    def from_array(cls, arr) -> "HadamardMatrix":
        a = np.asarray(arr)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MatrixError(f"matrix must be square, got shape {a.shape}")
        if not np.all((a == 1) | (a == -1)):
            raise MatrixError("entries must be +1 or -1")
        return cls(a.shape[0], pack_rows(a))

    @cached_property
    def array(self) -> np.ndarray:
        a = unpack_rows(self.rows, self.n)
        a.setflags(write=False)
        return a

    @cached_property
    def cols(self) -> tuple[int, ...]:
        return pack_rows(self.array.T)

    @cached_property
    def is_valid(self) -> bool:
        return verify(self)

    def row(self, i: int) -> np.ndarray:
        return self.array[i]

    def __getitem__(self, ij):
        i, j = ij
        return 1 if (self.rows[i] >> j) & 1 else -1

    def __repr__(self):
        return f"HadamardMatrix(n={self.n})"

    def __str__(self):
        return to_text(self).rstrip("\n")


@dataclass(frozen=True)
class SignedPermutation:
    """A signed permutation acting on vectors by ``(s.x)[i] = signs[i] * x[perm[i]]``."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise MatrixError("perm is not a bijection")
        if len(self.signs) != len(self.perm) or any(s not in (1, -1) for s in self.signs):
            raise MatrixError("signs must be a +/-1 vector of the same length as perm")

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(tuple(range(n)), (1,) * n)

    @classmethod
    def from_perm(cls, perm: Iterable[int], signs: Iterable[int] | None = None) -> "SignedPermutation":
        perm = tuple(int(p) for p in perm)
        signs = (1,) * len(perm) if signs is None else tuple(int(s) for s in signs)
        return cls(perm, signs)

    def __len__(self):
        return len(self.perm)

    def inverse(self) -> "SignedPermutation":
        n = len(self.perm)
        p = [0] * n
        s = [1] * n
        for i, (pi, si) in enumerate(zip(self.perm, self.signs)):
            p[pi] = i
            s[pi] = si
        return SignedPermutation(tuple(p), tuple(s))

    def compose(self, other: "SignedPermutation") -> "SignedPermutation":
        """Return ``self * other``: applying the result equals applying ``other`` then ``self``."""
        if len(other) != len(self):
            raise MatrixError("size mismatch in compose")
        p = tuple(other.perm[pi] for pi in self.perm)
        s = tuple(si * other.signs[pi] for pi, si in zip(self.perm, self.signs))
        return SignedPermutation(p, s)

    def matrix(self) -> np.ndarray:
        n = len(self.perm)
        out = np.zeros((n, n), dtype=np.int64)
        out[np.arange(n), self.perm] = self.signs
        return out


def verify(m: HadamardMatrix) -> bool:
    """True iff every pair of distinct rows is orthogonal."""
    n = m.n
    if n == 1:
        return True
    if n % 2:
        return False
    half = n // 2
    rows = m.rows
    for i in range(n):
        ri = rows[i]
        for j in range(i + 1, n):
            if (ri ^ rows[j]).bit_count() != half:
                return False
    return True


def _check_indices(n: int, idx: Sequence[int]) -> None:
    if len(set(idx)) != len(idx):
        raise MatrixError(f"duplicate index in {tuple(idx)}")
    for i in idx:
        if not 0 <= i < n:
            raise MatrixError(f"index {i} out of range for order {n}")


def hadamard_product(m: HadamardMatrix, rows: Sequence[int]) -> int:
    """Entrywise product of the named rows, as a packed bit-vector.

    Multiplying +/-1 entries is XNOR on the bit encoding.
    """
    if not rows:
        raise MatrixError("need at least one row")
    _check_indices(m.n, rows)
    mask = _mask(m.n)
    acc = m.rows[rows[0]]
    for i in rows[1:]:
        acc = ~(acc ^ m.rows[i]) & mask
    return acc


def negate_rows(m: HadamardMatrix, rows: Iterable[int]) -> HadamardMatrix:
    mask = _mask(m.n)
    out = list(m.rows)
    for i in rows:
        out[i] ^= mask
    return HadamardMatrix(m.n, tuple(out))


def apply(m: HadamardMatrix, row_move: SignedPermutation, col_move: SignedPermutation) -> HadamardMatrix:
    """Permute/negate rows by ``row_move`` then columns by ``col_move``.

    Entry ``(i, j)`` of the result is ``rs[i] * cs[j] * m[rp[i], cp[j]]``.
    """
    if len(row_move) != m.n or len(col_move) != m.n:
        raise MatrixError("move size does not match matrix order")
    a = m.array[np.asarray(row_move.perm)][:, np.asarray(col_move.perm)]
    a = a * np.asarray(row_move.signs, dtype=np.int8)[:, None] * np.asarray(col_move.signs, dtype=np.int8)[None, :]
    return HadamardMatrix.from_array(a)


def transpose(m: HadamardMatrix) -> HadamardMatrix:
    return HadamardMatrix(m.n, m.cols)


def gram(m: HadamardMatrix) -> np.ndarray:
    a = m.array.astype(np.int64)
    return a @ a.T


# ---------------------------------------------------------------------------
# .had text format

def to_text(m: HadamardMatrix) -> str:
    lines = [str(m.n)]
    for r in m.rows:
        lines.append("".join("+" if (r >> j) & 1 else "-" for j in range(m.n)))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> HadamardMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MatrixError("empty matrix file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise MatrixError(f"first line must be the order, got {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != n:
        raise MatrixError(f"expected {n} matrix lines, got {len(body)}")
    rows = []
    for k, ln in enumerate(body):
        if len(ln) != n:
            raise MatrixError(f"line {k + 2} has {len(ln)} entries, expected {n}")
        r = 0
        for j, ch in enumerate(ln):
            if ch in "+1":
                r |= 1 << j
            elif ch not in "-0":
                raise MatrixError(f"bad character {ch!r} on line {k + 2}")
        rows.append(r)
    return HadamardMatrix(n, tuple(rows))


def read_had(path) -> HadamardMatrix:
    return from_text(Path(path).read_text())


def write_had(m: HadamardMatrix, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(to_text(m))

