"""Canonical form under Hadamard equivalence.

A matrix of order ``n`` becomes a graph on ``4n`` vertices: ``r_i^+, r_i^-``
for every row and ``c_j^+, c_j^-`` for every column.  An entry ``+1`` at
``(i, j)`` joins ``r_i^+ c_j^+`` and ``r_i^- c_j^-``; an entry ``-1`` joins
``r_i^+ c_j^-`` and ``r_i^- c_j^+``; each ``v^+ v^-`` pair is joined too.
Row vertices and column vertices get different colours.  Colour-preserving
graph isomorphisms are exactly the Hadamard equivalences.

The labelling is found by individualization-refinement.  Every leaf of the
search tree fixes an ordering of the vertices; it is decoded to the signed
row/column permutation it induces (a row is taken positive when ``r_i^+``
precedes ``r_i^-``) and the permuted matrix is compared as bytes.  The
canonical representative is the least decoded matrix among the leaves with
the least trace of node invariants.  Sibling subtrees are pruned with the
automorphisms met on the way.

Vertex numbering: ``r_i^+ = 2i``, ``r_i^- = 2i + 1``, ``c_j^+ = 2n + 2j``,
``c_j^- = 2n + 2j + 1``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .core import HadamardMatrix, MatrixError, SignedPermutation, transpose

KEY_HEADER = 2  # big-endian order prefix


@dataclass(frozen=True)
class EquivalenceGraph:
    n: int
    adjacency: np.ndarray  # (4n, 4n) 0/1
    colours: np.ndarray  # 0 for row vertices, 1 for column vertices

    @property
    def num_vertices(self) -> int:
        return 4 * self.n

    def edges(self) -> list[tuple[int, int]]:
        u, v = np.nonzero(np.triu(self.adjacency))
        return list(zip(u.tolist(), v.tolist()))


@dataclass(frozen=True)
class CanonicalKey:
    """Order (2 bytes, big-endian) followed by the packed canonical rows."""

    data: bytes

    @property
    def n(self) -> int:
        return int.from_bytes(self.data[:KEY_HEADER], "big")

    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def fromhex(cls, text: str) -> "CanonicalKey":
        return cls(bytes.fromhex(text.strip()))

    def fingerprint(self) -> int:
        return fingerprint(self.data)

    def __lt__(self, other):
        return self.data < other.data


def fingerprint(data: bytes) -> int:
    """Stable 64-bit hash of a key (blake2b, not Python's salted ``hash``)."""
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")


# ---------------------------------------------------------------------------
# key encoding


def encode_key(m: HadamardMatrix) -> bytes:
    """Rows packed big-endian, one ceil(n/8)-byte word per row, MSB = column 0."""
    n = m.n
    nbytes = (n + 7) // 8
    bits = np.packbits(m.array > 0, axis=1, bitorder="big")
    return n.to_bytes(KEY_HEADER, "big") + bits.reshape(n, nbytes).tobytes()


def decode_key(key: CanonicalKey | bytes) -> HadamardMatrix:
    data = key.data if isinstance(key, CanonicalKey) else bytes(key)
    n = int.from_bytes(data[:KEY_HEADER], "big")
    nbytes = (n + 7) // 8
    body = data[KEY_HEADER:]
    if n < 1 or len(body) != n * nbytes:
        raise MatrixError("malformed canonical key")
    raw = np.frombuffer(body, dtype=np.uint8).reshape(n, nbytes)
    bits = np.unpackbits(raw, axis=1, count=n, bitorder="big")
    return HadamardMatrix.from_array(bits.astype(np.int8) * 2 - 1)


# ---------------------------------------------------------------------------
# graph


def to_graph(m: HadamardMatrix) -> EquivalenceGraph:
    n = m.n
    V = 4 * n
    A = np.zeros((V, V), dtype=np.int8)
    plus = (m.array > 0)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i, j, p = i.ravel(), j.ravel(), plus.ravel()
    rp, rm = 2 * i, 2 * i + 1
    cp, cm = 2 * n + 2 * j, 2 * n + 2 * j + 1
    b = np.where(p, cp, cm)
    A[rp, b] = A[b, rp] = 1
    b = np.where(p, cm, cp)
    A[rm, b] = A[b, rm] = 1
    even = np.arange(0, V, 2)
    A[even, even + 1] = A[even + 1, even] = 1
    colours = np.repeat([0, 1], 2 * n)
    return EquivalenceGraph(n, A, colours)


# ---------------------------------------------------------------------------
# vertex invariant used to pre-split the colour classes


@lru_cache(maxsize=None)
def _pair_tables(n: int):
    pairs = np.array(list(combinations(range(n), 2)), dtype=np.int64).reshape(-1, 2)
    P = len(pairs)
    inc = np.zeros((n, P), dtype=np.int64)
    inc[pairs[:, 0], np.arange(P)] = 1
    inc[pairs[:, 1], np.arange(P)] = 1
    disjoint = (inc.T @ inc) == 0
    return pairs, inc, disjoint


def pair_profile(a: np.ndarray) -> np.ndarray:
    """Row ``p`` (one per row pair ``i < j``) counts, for each type ``t``, the
    disjoint pairs ``(k, l)`` such that ``{i, j, k, l}`` has type ``t``."""
    n = a.shape[0]
    pairs, inc, disjoint = _pair_tables(n)
    a = a.astype(np.float64)
    V = a[pairs[:, 0]] * a[pairs[:, 1]]
    G = np.abs(np.rint(V @ V.T)).astype(np.int64)
    levels = (n - G) // 8
    nl = n // 8 + 1
    return np.stack([((levels == t) & disjoint).sum(axis=1) for t in range(nl)], axis=1)


def quad_profile(a: np.ndarray) -> np.ndarray:
    """Per-row histogram of quadruple types over the quadruples containing that row.

    Column ``t`` counts (with multiplicity 3 per quadruple) the quadruples
    whose Hadamard product sums to ``+/-(n - 8t)``.  Unchanged by negating or
    permuting rows and columns, up to the matching row permutation.
    """
    n = a.shape[0]
    if n < 8:
        return np.zeros((n, 1), dtype=np.int64)
    _, inc, _ = _pair_tables(n)
    return inc @ pair_profile(a)


def pair_colours(a: np.ndarray) -> np.ndarray:
    """Symmetric ``n x n`` colouring of row pairs by their pair profile (0 on the diagonal)."""
    n = a.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    if n < 8:
        return out
    pairs, _, _ = _pair_tables(n)
    rank = _rank_rows(pair_profile(a)) + 1
    out[pairs[:, 0], pairs[:, 1]] = rank
    out[pairs[:, 1], pairs[:, 0]] = rank
    return out


def _rank_rows(table: np.ndarray) -> np.ndarray:
    _, inv = np.unique(table, axis=0, return_inverse=True)
    return inv.reshape(-1)


# ---------------------------------------------------------------------------
# refinement

_rng = np.random.default_rng(0x5EED_4AD)
_W = _rng.integers(1, 2 ** 62, size=4096, dtype=np.int64)
_EDGE_W = _rng.integers(1, 2 ** 62, size=2, dtype=np.int64)  # entry edges, pairing edges
_ROW_W = _rng.integers(1, 2 ** 62, size=8192, dtype=np.int64)
_COL_W = _rng.integers(1, 2 ** 62, size=8192, dtype=np.int64)


def weighted_adjacency(m: HadamardMatrix) -> np.ndarray:
    """The graph's adjacency with edge-colour weights, plus coloured row-row
    and column-column edges from the pair profiles.  All additions are
    equivalence invariants, so they only sharpen refinement."""
    n = m.n
    g = to_graph(m)
    W = g.adjacency.astype(np.int64) * _EDGE_W[0]
    even = np.arange(0, 4 * n, 2)
    W[even, even + 1] = W[even + 1, even] = _EDGE_W[1]
    a = m.array
    for colours, table, off in ((pair_colours(a), _ROW_W, 0), (pair_colours(a.T), _COL_W, 2 * n)):
        if not colours.any():
            continue
        w = np.where(colours > 0, table[colours % len(table)], 0)
        block = np.kron(w, np.ones((2, 2), dtype=np.int64))
        W[off:off + 2 * n, off:off + 2 * n] += block
    return W


class _Refiner:
    """Equitable refinement of ordered partitions of the 4n vertices.

    A partition is an int array ``lab`` giving every vertex the start
    position of its cell; cells are ordered by that position.
    """

    def __init__(self, weights: np.ndarray):
        self.A = weights
        self.V = weights.shape[0]

    def refine(self, lab: np.ndarray) -> tuple[np.ndarray, bytes]:
        A, V = self.A, self.V
        k = np.count_nonzero(np.bincount(lab, minlength=V))
        while k < V:
            # cells are named by their start position, so _W[lab] weights each cell
            key = A @ _W[lab]
            order = np.lexsort((key, lab))
            sl, sk = lab[order], key[order]
            newcell = np.empty(V, dtype=bool)
            newcell[0] = True
            newcell[1:] = (sl[1:] != sl[:-1]) | (sk[1:] != sk[:-1])
            firstpos = np.maximum.accumulate(np.where(newcell, np.arange(V), 0))
            new = np.empty(V, dtype=np.int64)
            new[order] = firstpos
            k_new = int(newcell.sum())
            if k_new == k:
                return new, _quotient(new, key)
            lab, k = new, k_new
        return lab, b"d"


def _quotient(lab: np.ndarray, key: np.ndarray) -> bytes:
    starts, first = np.unique(lab, return_index=True)
    return starts.tobytes() + key[first].tobytes()


# ---------------------------------------------------------------------------
# search


@dataclass
class CanonResult:
    key: CanonicalKey
    row: SignedPermutation  # apply(m, row, col) is the canonical representative
    col: SignedPermutation
    generators: list = field(default_factory=list)  # automorphisms as (row, col) pairs
    nodes: int = 0

    @property
    def matrix(self) -> HadamardMatrix:
        return decode_key(self.key)


def _decode_leaf(lab: np.ndarray, n: int, a: np.ndarray):
    """Decode a discrete partition into (certificate, canonical bytes, row move, col move).

    Moves come back as ``(perm, signs)`` array pairs.

    The certificate is the labelled graph in compact form: the decoded
    matrix plus, for every position, which decoded row/column vertex sits
    there.  Equal certificates mean the two labellings differ by a graph
    automorphism.
    """
    pos = lab
    rp, rm = pos[0:2 * n:2], pos[1:2 * n:2]
    cp, cm = pos[2 * n::2], pos[2 * n + 1::2]
    rperm = np.argsort(np.minimum(rp, rm), kind="stable")
    cperm = np.argsort(np.minimum(cp, cm), kind="stable")
    rpos_first = rp < rm
    cpos_first = cp < cm
    rs = np.where(rpos_first, 1, -1)[rperm]
    cs = np.where(cpos_first, 1, -1)[cperm]
    M = a[rperm][:, cperm] * rs[:, None] * cs[None, :]
    nbytes = (n + 7) // 8
    data = n.to_bytes(KEY_HEADER, "big") + np.packbits(M > 0, axis=1, bitorder="big").reshape(n * nbytes).tobytes()
    rrank = np.empty(n, dtype=np.int64)
    rrank[rperm] = np.arange(n)
    crank = np.empty(n, dtype=np.int64)
    crank[cperm] = np.arange(n)
    code = np.empty(4 * n, dtype=np.int64)
    code[0:2 * n:2] = 2 * rrank + np.where(rpos_first, 0, 1)
    code[1:2 * n:2] = 2 * rrank + np.where(rpos_first, 1, 0)
    code[2 * n::2] = 2 * n + 2 * crank + np.where(cpos_first, 0, 1)
    code[2 * n + 1::2] = 2 * n + 2 * crank + np.where(cpos_first, 1, 0)
    layout = np.empty(4 * n, dtype=np.int16)
    layout[pos] = code
    cert = layout.tobytes() + data
    return cert, data, (rperm, rs), (cperm, cs)


def _matrix_automorphism(n: int, g: np.ndarray) -> tuple[SignedPermutation, SignedPermutation]:
    """Signed row/column permutations ``(R, C)`` with ``apply(m, R, C) == m`` for a vertex automorphism ``g``."""
    rperm = [0] * n
    rsign = [1] * n
    for i in range(n):
        u = int(g[2 * i])
        rperm[u // 2] = i
        rsign[u // 2] = 1 if u % 2 == 0 else -1
    cperm = [0] * n
    csign = [1] * n
    for j in range(n):
        u = int(g[2 * n + 2 * j]) - 2 * n
        cperm[u // 2] = j
        csign[u // 2] = 1 if u % 2 == 0 else -1
    return SignedPermutation(tuple(rperm), tuple(rsign)), SignedPermutation(tuple(cperm), tuple(csign))


def _orbits(gens: list[np.ndarray], V: int) -> np.ndarray:
    parent = list(range(V))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for v, w in enumerate(g.tolist()):
            a, b = find(v), find(w)
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    return np.array([find(v) for v in range(V)])


def initial_partition(m: HadamardMatrix) -> np.ndarray:
    """Row vertices before column vertices, each colour split by the quadruple profile."""
    n = m.n
    a = m.array
    rinv = _rank_rows(quad_profile(a))
    cinv = _rank_rows(quad_profile(a.T))
    cls = np.concatenate([np.repeat(rinv, 2), np.repeat(cinv, 2) + (n + 1)])
    order = np.argsort(cls, kind="stable")
    sc = cls[order]
    V = 4 * n
    newcell = np.ones(V, dtype=bool)
    newcell[1:] = sc[1:] != sc[:-1]
    firstpos = np.maximum.accumulate(np.where(newcell, np.arange(V), 0))
    lab = np.empty(V, dtype=np.int64)
    lab[order] = firstpos
    return lab


@dataclass
class _Leaf:
    trace: tuple
    cert: bytes
    data: bytes
    path: tuple
    lab: np.ndarray
    row: tuple  # (perm, signs) arrays; turned into moves only for the winner
    col: tuple


def _common_prefix(a: tuple, b: tuple) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


def canonical_form(m: HadamardMatrix) -> CanonResult:
    """Run the labelling search; returns key, transforming moves and automorphism generators."""
    n = m.n
    V = 4 * n
    ref = _Refiner(weighted_adjacency(m))
    a = m.array.astype(np.int8)

    gens: list[np.ndarray] = [np.arange(V) ^ 1]  # negating everything fixes the matrix
    best: _Leaf | None = None
    first: _Leaf | None = None
    nodes = 0

    def automorphism(x: _Leaf, y: _Leaf) -> None:
        inv = np.empty(V, dtype=np.int64)
        inv[y.lab] = np.arange(V)
        gens.append(inv[x.lab])

    def search(lab: np.ndarray, path: tuple, trace: tuple) -> int:
        nonlocal best, first, nodes
        level = len(path)
        nodes += 1
        lab, inv = ref.refine(lab)
        trace = trace + (inv,)
        if best is not None and trace > best.trace[: len(trace)]:
            return level
        counts = np.bincount(lab, minlength=V)
        starts = np.nonzero(counts)[0]
        counts = counts[starts]
        if len(starts) == V:
            cert, data, row, col = _decode_leaf(lab, n, a)
            leaf = _Leaf(trace, cert, data, path, lab, row, col)
            if first is None:
                first = best = leaf
                return level
            if leaf.trace == first.trace and leaf.cert == first.cert:
                automorphism(leaf, first)
                return _common_prefix(path, first.path)
            if (leaf.trace, leaf.cert) < (best.trace, best.cert):
                best = leaf
            elif leaf.trace == best.trace and leaf.cert == best.cert:
                automorphism(leaf, best)
                return _common_prefix(path, best.path)
            return level
        nontriv = counts > 1
        start = starts[nontriv][0]  # first non-singleton cell
        cell = np.nonzero(lab == start)[0].tolist()
        tried: list[int] = []
        seen = -1
        orb = None
        for v in cell:
            if tried:
                if len(gens) != seen:
                    stab = [g for g in gens if all(g[p] == p for p in path)]
                    orb = _orbits(stab, V)
                    seen = len(gens)
                if any(orb[v] == orb[t] for t in tried):
                    continue
            tried.append(v)
            child = lab.copy()
            child[cell] = start + 1
            child[v] = start
            back = search(child, path + (v,), trace)
            if back < level:
                return back
        return level

    search(initial_partition(m), (), ())
    assert best is not None
    generators = [_matrix_automorphism(n, g) for g in gens[1:]]
    row, col = (SignedPermutation(tuple(p.tolist()), tuple(s.tolist())) for p, s in (best.row, best.col))
    return CanonResult(CanonicalKey(best.data), row, col, generators, nodes)


def canonical_key(m: HadamardMatrix) -> CanonicalKey:
    return canonical_form(m).key


def canonical_matrix(m: HadamardMatrix) -> HadamardMatrix:
    return decode_key(canonical_key(m))


def equivalent(a: HadamardMatrix, b: HadamardMatrix) -> bool:
    if a.n != b.n:
        raise MatrixError(f"order mismatch: {a.n} vs {b.n}")
    return canonical_key(a) == canonical_key(b)


def is_self_dual_class(m: HadamardMatrix) -> bool:
    return equivalent(m, transpose(m))


def automorphism_generators(m: HadamardMatrix) -> list[tuple[SignedPermutation, SignedPermutation]]:
    """Automorphisms ``(row, col)`` with ``apply(m, row, col) == m`` found by the search."""
    return canonical_form(m).generators
