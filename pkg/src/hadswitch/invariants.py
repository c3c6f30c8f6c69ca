"""Switching invariants: closed-quadruple counts, Smith normal form, binary codes."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .core import HadamardMatrix, MatrixError, transpose
from .structure import COLUMNS, ROWS, find_closed_quadruples
from .switching import switch_closed_quadruple

ENUMERATOR_CAP = 26


class InvariantViolation(AssertionError):
    """A proven invariant failed to hold; points at a bug, not at bad input."""


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    factors: tuple[int, ...]
    alpha: int | None = None

    @property
    def twos(self) -> int:
        return sum(1 for s in self.factors if s == 2)


def smith_normal_form(mat) -> SmithForm:
    """Invariant factors by pivoting on the smallest nonzero entry, in exact integers."""
    A = [[int(x) for x in row] for row in np.asarray(mat).tolist()]
    r = len(A)
    c = len(A[0]) if r else 0
    diag: list[int] = []
    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                row = A[i]
                for j in range(t, c):
                    v = row[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
                        if best[0] == 1:
                            break
                if best and best[0] == 1:
                    break
            if best is None:
                diag.extend([0] * (min(r, c) - t))
                return SmithForm(tuple(diag))
            _, i, j = best
            A[t], A[i] = A[i], A[t]
            if j != t:
                for row in A:
                    row[t], row[j] = row[j], row[t]
            p = A[t][t]
            clean = True
            for i in range(t + 1, r):
                if A[i][t]:
                    q = A[i][t] // p
                    if q:
                        Ai, At = A[i], A[t]
                        for j in range(t, c):
                            Ai[j] -= q * At[j]
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, c):
                if A[t][j]:
                    q = A[t][j] // p
                    if q:
                        for row in A[t:]:
                            row[j] -= q * row[t]
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, r) if any(A[i][j] % p for j in range(t + 1, c))), None)
            if bad is None:
                break
            At, Ab = A[t], A[bad]
            for j in range(t, c):
                At[j] += Ab[j]
        diag.append(abs(A[t][t]))
    return SmithForm(tuple(diag))


def smith_form(m: HadamardMatrix) -> SmithForm:
    """Smith form of a Hadamard matrix, with ``alpha`` filled in at order 36."""
    sf = smith_normal_form(m.array)
    if m.n == 36:
        return SmithForm(sf.factors, _alpha36(sf.factors))
    return sf


def _alpha36(f: Sequence[int]) -> int:
    alpha = sum(1 for s in f if s == 2)
    want = (1,) + (2,) * alpha + (6,) * (34 - 2 * alpha) + (18,) * alpha + (36,)
    if tuple(f) != want or not 0 <= alpha <= 17:
        raise MatrixError(f"invariant factors {tuple(f)} do not fit the order-36 pattern")
    return alpha


def smith_class(m: HadamardMatrix) -> int:
    """Number of invariant factors equal to 2 for an order-36 matrix."""
    if m.n != 36:
        raise MatrixError(f"Smith class is defined for order 36, got {m.n}")
    return _alpha36(smith_normal_form(m.array).factors)


# ---------------------------------------------------------------------------
# GF(2) codes


class Gf2Space:
    """Subspace of GF(2)^n kept as a reduced echelon basis of int bit-vectors."""

    def __init__(self, n: int, vectors=()):
        self.n = n
        self.basis: dict[int, int] = {}  # pivot bit -> vector
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> int:
        for piv, b in self.basis.items():
            if (v >> piv) & 1:
                v ^= b
        return v

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        piv = v.bit_length() - 1
        for p, b in list(self.basis.items()):
            if (b >> piv) & 1:
                self.basis[p] = b ^ v
        self.basis[piv] = v
        return True

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def vectors(self) -> list[int]:
        return [self.basis[p] for p in sorted(self.basis)]

    def contains_space(self, other: "Gf2Space") -> bool:
        return all(v in self for v in other.vectors())


def code_generators(m: HadamardMatrix, axis: str = COLUMNS) -> list[int]:
    """0/1 generators of the binary code.

    ``rows``: columns are negated so the first row is all ones, and the code is
    the span of the rows (coordinates = columns).  ``columns``: the same on the
    transpose, so coordinates are the row indices.
    """
    mm = transpose(m) if axis == COLUMNS else m
    if axis not in (ROWS, COLUMNS):
        raise MatrixError(f"axis must be 'rows' or 'columns', got {axis!r}")
    mask = (1 << mm.n) - 1
    first = mm.rows[0]
    # multiplying by the first row is XNOR in the bit encoding; a 1 bit marks +1
    return [~(r ^ first) & mask for r in mm.rows]


def code_space(m: HadamardMatrix, axis: str = COLUMNS) -> Gf2Space:
    return Gf2Space(m.n, code_generators(m, axis))


@dataclass(frozen=True)
class BinaryCodeSummary:
    n: int
    dimension: int
    self_orthogonal: bool
    self_dual: bool
    weight4_count: int
    weight_enumerator: dict[int, int] | None = None

    def as_dict(self) -> dict:
        d = {
            "n": self.n,
            "dimension": self.dimension,
            "self_orthogonal": self.self_orthogonal,
            "self_dual": self.self_dual,
            "weight4_count": self.weight4_count,
        }
        if self.weight_enumerator is not None:
            d["weight_enumerator"] = {str(k): v for k, v in sorted(self.weight_enumerator.items())}
        return d


def _to_words(vs: Sequence[int], n: int) -> np.ndarray:
    nw = (n + 63) // 64
    out = np.zeros((len(vs), nw), dtype=np.uint64)
    for i, v in enumerate(vs):
        for w in range(nw):
            out[i, w] = (v >> (64 * w)) & 0xFFFF_FFFF_FFFF_FFFF
    return out


def weight_enumerator(space: Gf2Space, chunk_bits: int = 16) -> dict[int, int]:
    """Exact weight distribution by enumerating every codeword."""
    basis = space.vectors()
    k = len(basis)
    if k > ENUMERATOR_CAP:
        raise MatrixError(f"dimension {k} exceeds the enumeration cap {ENUMERATOR_CAP}")
    words = _to_words(basis, space.n)
    lo = min(k, chunk_bits)
    table = np.zeros((1, words.shape[1]), dtype=np.uint64)
    for b in words[:lo]:
        table = np.concatenate([table, table ^ b], axis=0)
    counts = np.zeros(space.n + 1, dtype=np.int64)
    hi = words[lo:]
    for mask in range(1 << (k - lo)):
        off = np.zeros(words.shape[1], dtype=np.uint64)
        for i in range(k - lo):
            if (mask >> i) & 1:
                off ^= hi[i]
        w = np.bitwise_count(table ^ off).sum(axis=1)
        counts += np.bincount(w, minlength=space.n + 1)
    return {i: int(c) for i, c in enumerate(counts) if c}


def weight4_supports(space: Gf2Space) -> list[tuple[int, int, int, int]]:
    """Supports of the weight-4 codewords.

    ``{i, j, k, l}`` is a codeword iff the syndromes (reductions of the unit
    vectors modulo the code) satisfy ``s_i ^ s_j == s_k ^ s_l``, so disjoint
    pairs are joined on their syndrome sums.
    """
    n = space.n
    syn = [space.reduce(1 << i) for i in range(n)]
    buckets: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for i in range(n):
        for j in range(i + 1, n):
            buckets[syn[i] ^ syn[j]].append((i, j))
    found = set()
    for plist in buckets.values():
        for (a, b), (c, d) in combinations(plist, 2):
            if len({a, b, c, d}) == 4:
                found.add(tuple(sorted((a, b, c, d))))
    return sorted(found)


def binary_code_summary(m: HadamardMatrix, axis: str = COLUMNS) -> BinaryCodeSummary:
    space = code_space(m, axis)
    basis = space.vectors()
    self_orth = all((u & v).bit_count() % 2 == 0 for u, v in combinations(basis, 2)) and all(
        v.bit_count() % 2 == 0 for v in basis
    )
    dim = space.dimension
    enum_ = weight_enumerator(space) if dim <= ENUMERATOR_CAP else None
    w4 = enum_.get(4, 0) if enum_ is not None else len(weight4_supports(space))
    return BinaryCodeSummary(m.n, dim, self_orth, self_orth and 2 * dim == m.n, w4, enum_)


def weight4_vs_closed_quadruples(m: HadamardMatrix) -> bool:
    """Do the weight-4 supports of the column code coincide with the closed row quadruples?"""
    if m.n % 8:
        raise MatrixError(f"needs n = 0 (mod 8), got {m.n}")
    words = set(weight4_supports(code_space(m, COLUMNS)))
    quads = {q.indices for q in find_closed_quadruples(m, ROWS)}
    return words == quads


class CodeInclusion(enum.Enum):
    EQUAL = "equal"
    PROPER = "properSubspaceByWeight4Vector"


def code_inclusion_check(h: HadamardMatrix, h_prime: HadamardMatrix) -> CodeInclusion:
    """Compare the column codes of ``h`` and a row-quadruple switch ``h_prime`` of it."""
    if h.n != h_prime.n:
        raise MatrixError("order mismatch")
    C = code_space(h, COLUMNS)
    if 2 * C.dimension != h.n or not binary_code_summary(h, COLUMNS).self_dual:
        raise MatrixError("the column code of h is not self-dual")
    Cp = code_space(h_prime, COLUMNS)
    if not C.contains_space(Cp):
        raise InvariantViolation("switched code is not contained in the original code")
    if Cp.dimension == C.dimension:
        return CodeInclusion.EQUAL
    changed = [i for i in range(h.n) if h.rows[i] != h_prime.rows[i]]
    if len(changed) != 4:
        raise MatrixError(f"h_prime differs from h in {len(changed)} rows, not a row-quadruple switch")
    c = sum(1 << i for i in changed)
    if c not in C:
        raise InvariantViolation("switched quadruple is not a codeword of the original code")
    aug = Gf2Space(h.n, Cp.vectors() + [c])
    if aug.dimension != C.dimension:
        raise InvariantViolation("code is not spanned by the switched code and the quadruple word")
    return CodeInclusion.PROPER


# ---------------------------------------------------------------------------
# closed-quadruple counts


def closed_quadruple_overlaps(m: HadamardMatrix, axis: str = ROWS) -> set[int]:
    """Sizes of nonempty intersections between distinct closed quadruples."""
    qs = [set(q.indices) for q in find_closed_quadruples(m, axis)]
    sizes = set()
    for a, b in combinations(qs, 2):
        k = len(a & b)
        if k:
            sizes.add(k)
    return sizes


def closed_quadruple_count_invariance_check(h: HadamardMatrix) -> bool:
    """Switch every closed row quadruple; does the count of closed row quadruples stay put?"""
    if h.n % 16 != 8:
        raise MatrixError(f"needs n = 8 (mod 16), got {h.n}")
    quads = find_closed_quadruples(h, ROWS)
    if not quads:
        raise MatrixError("matrix has no closed row quadruple")
    base = len(quads)
    return all(len(find_closed_quadruples(switch_closed_quadruple(h, q), ROWS)) == base for q in quads)
