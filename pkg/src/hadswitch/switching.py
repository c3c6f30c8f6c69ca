"""Closed-quadruple and Hall-set switching, plus validated block substitution."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Sequence

import numpy as np

from .core import (
    HadamardMatrix,
    MatrixError,
    SignedPermutation,
    _check_indices,
    apply,
    transpose,
)
from .structure import COLUMNS, ROWS, QuadrupleInfo, field_partition, quadruple_type

CLOSED_ROW = "closed-row-quad"
CLOSED_COL = "closed-col-quad"
HALL = "hall-set"

H4 = 2 * np.eye(4, dtype=np.int64) - 1
# Column patterns of F_1..F_4 and row patterns of G_1..G_4 in the Hall normal form.
F_PATTERNS = np.array([[1, 1, 1, 1], [1, -1, -1, 1], [1, -1, 1, -1], [-1, -1, 1, 1]])
G_PATTERNS = np.array([[1, 1, 1, 1], [-1, 1, 1, -1], [-1, 1, -1, 1], [1, 1, -1, -1]])


@dataclass(frozen=True)
class SwitchMove:
    kind: str
    indices: tuple[int, int, int, int]
    field: int = 1

    def apply(self, m: HadamardMatrix) -> HadamardMatrix:
        if self.kind == CLOSED_ROW:
            return switch_closed_quadruple(m, self.indices, self.field, ROWS)
        if self.kind == CLOSED_COL:
            return switch_closed_quadruple(m, self.indices, self.field, COLUMNS)
        if self.kind == HALL:
            return switch_hall_set(m, self.indices, self.field)
        raise MatrixError(f"unknown switch kind {self.kind!r}")


def _indices(q) -> tuple[int, ...]:
    return tuple(q.indices) if isinstance(q, QuadrupleInfo) else tuple(int(i) for i in q)


def _check_field(field: int) -> None:
    if field not in (1, 2, 3, 4):
        raise MatrixError(f"field must be 1..4, got {field}")


def _negate_block(m: HadamardMatrix, rows: Sequence[int], cols: Sequence[int]) -> HadamardMatrix:
    flip = 0
    for c in cols:
        flip |= 1 << c
    out = list(m.rows)
    for r in rows:
        out[r] ^= flip
    return HadamardMatrix(m.n, tuple(out))


def switch_closed_quadruple(m: HadamardMatrix, q, field: int = 1, axis: str = ROWS) -> HadamardMatrix:
    """Negate the quadruple's rows (or columns) on one of its four fields."""
    _check_field(field)
    if axis == COLUMNS:
        return transpose(switch_closed_quadruple(transpose(m), q, field, ROWS))
    if axis != ROWS:
        raise MatrixError(f"axis must be 'rows' or 'columns', got {axis!r}")
    idx = _indices(q)
    info = quadruple_type(m, idx, ROWS)
    if info.type_r != 0:
        raise MatrixError(f"rows {idx} are not a closed quadruple (type {info.type_r})")
    part = field_partition(m, sorted(idx)[:3])
    return _negate_block(m, idx, part.fields[field - 1])


@dataclass(frozen=True)
class HallFrame:
    """Placement of a Hall set into the normal form.

    ``hall_rows``/``hall_cols`` are in normal-form order with signs
    ``row_signs``/``col_signs``; ``f_groups[i]`` and ``g_groups[i]`` hold the
    non-Hall columns and rows carrying pattern ``i + 1``, each with its sign.
    """

    hall_rows: tuple[int, ...]
    hall_cols: tuple[int, ...]
    row_signs: tuple[int, ...]
    col_signs: tuple[int, ...]
    f_groups: tuple[tuple[tuple[int, int], ...], ...]
    g_groups: tuple[tuple[tuple[int, int], ...], ...]

    def moves(self, n: int) -> tuple[SignedPermutation, SignedPermutation]:
        """Signed permutations taking the matrix to the normal form."""
        rp = list(self.hall_rows) + [r for g in self.g_groups for r, _ in g]
        rs = list(self.row_signs) + [s for g in self.g_groups for _, s in g]
        cp = list(self.hall_cols) + [c for f in self.f_groups for c, _ in f]
        cs = list(self.col_signs) + [s for f in self.f_groups for _, s in f]
        assert len(rp) == n and len(cp) == n
        return SignedPermutation.from_perm(rp, rs), SignedPermutation.from_perm(cp, cs)


def _match_pattern(v: np.ndarray, patterns: np.ndarray) -> tuple[int, int]:
    for i, p in enumerate(patterns):
        if np.array_equal(v, p):
            return i, 1
        if np.array_equal(v, -p):
            return i, -1
    raise MatrixError("vector matches no Hall normal-form pattern")


def hall_frames(m: HadamardMatrix, q):
    """Every placement of the Hall set ``q`` into normal form.

    Hall rows keep their index order; the Hall columns run over the orderings
    (lexicographic over permutations) for which the 4x4 block can be signed
    into ``2I - J``.  Signs are fixed by making the first Hall column positive.
    """
    n = m.n
    if n % 8 != 4:
        raise MatrixError(f"Hall-set switching needs n = 4 (mod 8), got n={n}")
    idx = tuple(sorted(_indices(q)))
    info = quadruple_type(m, idx, ROWS)
    if info.type_r != 1:
        raise MatrixError(f"rows {idx} are not a Hall set (type {info.type_r})")
    a = m.array.astype(np.int64)
    hall_cols = info.hall_columns
    block = a[np.ix_(idx, hall_cols)]
    for kappa in permutations(range(4)):
        E = block[:, kappa] * H4
        d = E[:, 0]
        e = E[0, :] * E[0, 0]
        if np.array_equal(E, np.outer(d, e)):
            yield _frame(a, idx, tuple(hall_cols[k] for k in kappa), d, e)


def _frame(a: np.ndarray, idx, cols, d, e) -> HallFrame:
    n = a.shape[0]
    hall_set = set(idx)
    col_set = set(cols)
    f_groups = [[] for _ in range(4)]
    for c in range(n):
        if c not in col_set:
            i, s = _match_pattern(d * a[list(idx), c], F_PATTERNS)
            f_groups[i].append((c, s))
    g_groups = [[] for _ in range(4)]
    for r in range(n):
        if r not in hall_set:
            i, s = _match_pattern(a[r, list(cols)] * e, G_PATTERNS)
            g_groups[i].append((r, s))
    size = (n - 4) // 4
    if any(len(g) != size for g in f_groups + g_groups):
        raise MatrixError("Hall normal-form groups have the wrong sizes")
    return HallFrame(
        tuple(idx),
        tuple(cols),
        tuple(int(x) for x in d),
        tuple(int(x) for x in e),
        tuple(tuple(g) for g in f_groups),
        tuple(tuple(g) for g in g_groups),
    )


def hall_frame(m: HadamardMatrix, q) -> HallFrame:
    """The first placement yielded by :func:`hall_frames`; switching uses this one."""
    for frame in hall_frames(m, q):
        return frame
    raise MatrixError("Hall block is not equivalent to 2I - J")  # pragma: no cover


def _pattern_of_field(m: HadamardMatrix, frame: HallFrame, field: int) -> int:
    """Normal-form index (0-based) of the F-group lying in the given field."""
    part = field_partition(m, frame.hall_rows[:3])
    cols = set(part.fields[field - 1]) - set(frame.hall_cols)
    for i, grp in enumerate(frame.f_groups):
        if cols == {c for c, _ in grp}:
            return i
    raise MatrixError("field does not coincide with an F-group")  # pragma: no cover


def switch_hall_set(m: HadamardMatrix, q, field: int = 1) -> HadamardMatrix:
    """Negate F_i (Hall rows x non-Hall columns of one field) and the matching G_i block."""
    _check_field(field)
    frame = hall_frame(m, q)
    i = _pattern_of_field(m, frame, field)
    cols = [c for c, _ in frame.f_groups[i]]
    rows = [r for r, _ in frame.g_groups[i]]
    out = _negate_block(m, frame.hall_rows, cols)
    return _negate_block(out, rows, frame.hall_cols)


def switch_hall_set_reference(m: HadamardMatrix, q, field: int = 1, frame: HallFrame | None = None) -> HadamardMatrix:
    """Literal normal-form route: permute into form, check it, negate, permute back."""
    _check_field(field)
    frame = frame or hall_frame(m, q)
    i = _pattern_of_field(m, frame, field)
    rmove, cmove = frame.moves(m.n)
    N = apply(m, rmove, cmove).array.astype(np.int64)
    k = (m.n - 4) // 4
    assert np.array_equal(N[:4, :4], H4)
    for g in range(4):
        blk = slice(4 + g * k, 4 + (g + 1) * k)
        assert np.all(N[:4, blk] == F_PATTERNS[g][:, None])
        assert np.all(N[blk, :4] == G_PATTERNS[g][None, :])
        for h in range(4):
            A = N[blk, 4 + h * k : 4 + (h + 1) * k]
            want = 2 if g == h else 0
            assert np.all(A.sum(axis=0) == want) and np.all(A.sum(axis=1) == want)
    blk = slice(4 + i * k, 4 + (i + 1) * k)
    N[:4, blk] *= -1
    N[blk, :4] *= -1
    return apply(HadamardMatrix.from_array(N), rmove.inverse(), cmove.inverse())


# ---------------------------------------------------------------------------
# General block substitution


def substitute_block(m: HadamardMatrix, rows: Sequence[int], replacement) -> HadamardMatrix:
    """Replace the rows ``rows`` by ``replacement`` when ``B^T B = A^T A`` exactly."""
    rows = [int(r) for r in rows]
    _check_indices(m.n, rows)
    B = np.asarray(replacement, dtype=np.int64)
    A = m.array[rows].astype(np.int64)
    if B.shape != A.shape:
        raise MatrixError(f"replacement shape {B.shape} does not match block shape {A.shape}")
    if not np.all((B == 1) | (B == -1)):
        raise MatrixError("replacement entries must be +1 or -1")
    if not np.array_equal(B.T @ B, A.T @ A):
        raise MatrixError("B^T B differs from A^T A")
    out = m.array.astype(np.int64)
    out[rows] = B
    return HadamardMatrix.from_array(out)


def closed_quadruple_block(m: HadamardMatrix, q, field: int = 1) -> np.ndarray:
    """Quadruple rows with one column class of the underlying H_4 negated."""
    _check_field(field)
    idx = list(_indices(q))
    part = field_partition(m, sorted(idx)[:3])
    B = m.array[idx].astype(np.int64)
    B[:, list(part.fields[field - 1])] *= -1
    return B


def doubled_swap_equivalence_check(a: HadamardMatrix, b: HadamardMatrix, i: int, j: int) -> bool:
    """Switching quadruple (i, j, i+n, j+n) of [[A, B], [A, -B]] swaps rows i, j of B."""
    from .constructions import double

    n = a.n
    if i == j:
        raise MatrixError("i and j must differ")
    _check_indices(n, [i, j])
    H = double(a, b)
    quad = sorted((i, j, i + n, j + n))
    bi, bj = b.array[i], b.array[j]
    target = {n + c for c in range(n) if bi[c] != bj[c]}
    part = field_partition(H, quad[:3])
    matches = [k for k, f in enumerate(part.fields, 1) if set(f) == target]
    if len(matches) != 1:
        return False
    switched = switch_closed_quadruple(H, quad, matches[0])
    swapped = b.array.copy()
    swapped[[i, j]] = swapped[[j, i]]
    return switched == double(a, HadamardMatrix.from_array(swapped))
