"""3-normalization, field partitions, quadruple types, closed quadruples and Hall sets."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .core import HadamardMatrix, MatrixError, _check_indices, _mask, hadamard_product, transpose

ROWS = "rows"
COLUMNS = "columns"


def _oriented(m: HadamardMatrix, axis: str) -> HadamardMatrix:
    if axis == ROWS:
        return m
    if axis == COLUMNS:
        return transpose(m)
    raise MatrixError(f"axis must be 'rows' or 'columns', got {axis!r}")


@dataclass(frozen=True)
class FieldPartition:
    fields: tuple[tuple[int, ...], ...]
    defining_rows: tuple[int, int, int]

    def field_of(self, col: int) -> int:
        """1-based index of the field containing ``col``."""
        for k, f in enumerate(self.fields, 1):
            if col in f:
                return k
        raise MatrixError(f"column {col} is not in any field")


@dataclass(frozen=True)
class QuadrupleInfo:
    indices: tuple[int, int, int, int]
    axis: str
    type_r: int
    hall_columns: tuple[int, int, int, int] | None = None

    @property
    def closed(self) -> bool:
        return self.type_r == 0


def three_normalize(m: HadamardMatrix, rows: Sequence[int]) -> tuple[HadamardMatrix, np.ndarray]:
    """Negate columns so that the product of the three chosen rows is all ones.

    Returns the normalized matrix and the column sign vector that was applied.
    """
    if len(rows) != 3:
        raise MatrixError("three_normalize needs exactly three rows")
    _check_indices(m.n, rows)
    a = m.array
    signs = (a[rows[0]] * a[rows[1]] * a[rows[2]]).astype(np.int8)
    return HadamardMatrix.from_array(a * signs[None, :]), signs


def field_partition(m: HadamardMatrix, rows: Sequence[int]) -> FieldPartition:
    """Group columns by the signs of ``(h_j h_k, h_j h_l)``.

    Fields come in the order ``(+,+), (-,+), (+,-), (-,-)``.
    """
    if len(rows) != 3:
        raise MatrixError("field_partition needs exactly three rows")
    _check_indices(m.n, rows)
    j, k, l = rows
    a = m.array
    p1 = a[j] * a[k]
    p2 = a[j] * a[l]
    code = (p1 < 0).astype(int) + 2 * (p2 < 0).astype(int)
    fields = tuple(tuple(np.nonzero(code == c)[0].tolist()) for c in range(4))
    if m.n >= 4:
        want = m.n // 4
        if any(len(f) != want for f in fields) or m.n % 4:
            raise MatrixError(
                f"field sizes {[len(f) for f in fields]} differ from n/4; input is not a Hadamard matrix"
            )
    return FieldPartition(fields, (int(j), int(k), int(l)))


def quadruple_type(m: HadamardMatrix, indices: Sequence[int], axis: str = ROWS) -> QuadrupleInfo:
    """Type ``r`` of a quadruple: ``4r`` entries of its product carry the minority sign."""
    if len(indices) != 4:
        raise MatrixError("a quadruple needs four indices")
    mm = _oriented(m, axis)
    _check_indices(mm.n, indices)
    prod = hadamard_product(mm, list(indices))
    plus = prod.bit_count()
    minority = min(plus, mm.n - plus)
    r = minority // 4
    hall = None
    if r == 1:
        bits = prod if plus < mm.n - plus else ~prod & _mask(mm.n)
        hall = tuple(j for j in range(mm.n) if (bits >> j) & 1)
    return QuadrupleInfo(tuple(sorted(int(i) for i in indices)), axis, r, hall)


def _sign_free(v: int, n: int) -> int:
    """Representative of ``+/-v``: the one with bit 0 set."""
    return v if v & 1 else ~v & _mask(n)


def find_closed_quadruples(m: HadamardMatrix, axis: str = ROWS) -> list[QuadrupleInfo]:
    """All type-0 quadruples, by joining pairs with equal products up to sign."""
    mm = _oriented(m, axis)
    n = mm.n
    if n < 4:
        return []
    mask = _mask(n)
    buckets: dict[int, list[tuple[int, int]]] = defaultdict(list)
    rows = mm.rows
    for i in range(n):
        ri = rows[i]
        for j in range(i + 1, n):
            buckets[_sign_free(~(ri ^ rows[j]) & mask, n)].append((i, j))
    found: set[tuple[int, ...]] = set()
    for plist in buckets.values():
        if len(plist) < 2:
            continue
        for (a, b), (c, d) in combinations(plist, 2):
            if len({a, b, c, d}) == 4:
                found.add(tuple(sorted((a, b, c, d))))
    return [QuadrupleInfo(q, axis, 0) for q in sorted(found)]


@lru_cache(maxsize=None)
def _split_pairs(n: int):
    pairs = np.array(list(combinations(range(n), 2)), dtype=np.int64).reshape(-1, 2)
    # each 4-set {a<b<c<d} appears once as ((a,b),(c,d))
    ordered = pairs[:, 1][:, None] < pairs[:, 0][None, :]
    return pairs, ordered


def quadruple_sums(m: HadamardMatrix, axis: str = ROWS):
    """Every 4-subset with the sum of its Hadamard product.

    Returns ``(quads, sums)`` with ``quads`` of shape ``(C(n,4), 4)`` sorted
    lexicographically.
    """
    mm = _oriented(m, axis)
    n = mm.n
    if n < 4:
        return np.zeros((0, 4), dtype=np.int64), np.zeros(0, dtype=np.int64)
    pairs, ordered = _split_pairs(n)
    a = mm.array.astype(np.float64)
    V = a[pairs[:, 0]] * a[pairs[:, 1]]
    G = np.rint(V @ V.T).astype(np.int64)
    p, q = np.nonzero(ordered)
    quads = np.concatenate([pairs[p], pairs[q]], axis=1)
    sums = G[p, q]
    order = np.lexsort(quads.T[::-1])
    return quads[order], sums[order]


def type_histogram(m: HadamardMatrix, axis: str = ROWS) -> dict[int, int]:
    """Number of quadruples of each type; the counts add up to C(n, 4)."""
    n = _oriented(m, axis).n
    _, sums = quadruple_sums(m, axis)
    minority = (n - np.abs(sums)) // 2
    types, counts = np.unique(minority // 4, return_counts=True)
    hist = {int(t): int(c) for t, c in zip(types, counts)}
    assert sum(hist.values()) == comb(n, 4)
    return hist


def find_hall_sets(m: HadamardMatrix, axis: str = ROWS) -> list[QuadrupleInfo]:
    """All type-1 quadruples with their Hall columns.

    For ``n = 4 (mod 8)`` the Hall columns of every Hall set are themselves
    checked to form a type-1 column quadruple.
    """
    mm = _oriented(m, axis)
    n = mm.n
    if n < 8:
        return []
    quads, sums = quadruple_sums(mm, ROWS)
    hits = quads[np.abs(sums) == n - 8]
    out = []
    for q in hits.tolist():
        info = quadruple_type(mm, q, ROWS)
        info = QuadrupleInfo(info.indices, axis, info.type_r, info.hall_columns)
        if n % 8 == 4:
            dual = quadruple_type(mm, info.hall_columns, COLUMNS)
            if dual.type_r != 1:
                raise MatrixError(f"Hall columns of {info.indices} do not form a Hall set")
        out.append(info)
    return out


def closed_quadruple_counts(m: HadamardMatrix) -> tuple[int, int]:
    return len(find_closed_quadruples(m, ROWS)), len(find_closed_quadruples(m, COLUMNS))
