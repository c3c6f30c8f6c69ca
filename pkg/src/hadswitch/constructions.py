"""Seed matrices: Sylvester, Paley I/II and the doubling constructions."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import HadamardMatrix, MatrixError, read_had
from .gf import field, prime_power


@dataclass(frozen=True)
class ConstructionSpec:
    """Recipe for a seed matrix; ``build()`` materializes it.

    ``parameter`` is ``k`` for sylvester, ``q`` for paley1/paley2, a pair of
    paths for the doubling kinds and a single path for ``file``.
    """

    kind: str
    parameter: object
    permutation: tuple[int, ...] | None = None

    def build(self) -> HadamardMatrix:
        if self.kind == "sylvester":
            return sylvester(int(self.parameter))
        if self.kind == "paley1":
            return paley(int(self.parameter), 1)
        if self.kind == "paley2":
            return paley(int(self.parameter), 2)
        if self.kind in ("doubleH", "doubleHtilde"):
            a_path, b_path = self.parameter
            a, b = load_seed(a_path), load_seed(b_path)
            shape = "H" if self.kind == "doubleH" else "Htilde"
            return double(a, b, self.permutation, shape)
        if self.kind == "file":
            return load_seed(self.parameter)
        raise MatrixError(f"unknown construction kind {self.kind!r}")


def sylvester(k: int) -> HadamardMatrix:
    """Order ``2**k`` matrix with entry ``(i, j) = (-1)**popcount(i & j)``."""
    if k < 0:
        raise MatrixError("sylvester parameter must be >= 0")
    n = 1 << k
    i = np.arange(n)
    parity = np.bitwise_count(i[:, None] & i[None, :]) & 1
    return HadamardMatrix.from_array(1 - 2 * parity.astype(np.int8))


def jacobsthal(q: int) -> np.ndarray:
    """``Q[a, b] = chi(a - b)`` over GF(q), elements in their integer order."""
    F = field(q)
    chi = F.character()
    return chi[F.sub]


def paley(q: int, kind: int = 1) -> HadamardMatrix:
    """Paley I (order q+1, q = 3 mod 4) or Paley II (order 2(q+1), q = 1 mod 4).

    Paley I is ``I + S`` with ``S = [[0, j^T], [-j, Q]]``.  Paley II replaces
    each entry of the symmetric conference matrix ``C = [[0, j^T], [j, Q]]``
    by a 2x2 block: 0 becomes ``[[1, -1], [-1, -1]]`` and +/-1 becomes
    ``+/-[[1, 1], [1, -1]]``.
    """
    if prime_power(q) is None:
        raise MatrixError(f"q={q} is not a prime power")
    Q = jacobsthal(q)
    ones = np.ones(q, dtype=np.int64)
    if kind == 1:
        if q % 4 != 3:
            raise MatrixError(f"Paley I needs q = 3 mod 4, got {q}")
        S = np.zeros((q + 1, q + 1), dtype=np.int64)
        S[0, 1:] = ones
        S[1:, 0] = -ones
        S[1:, 1:] = Q
        return HadamardMatrix.from_array(S + np.eye(q + 1, dtype=np.int64))
    if kind == 2:
        if q % 4 != 1:
            raise MatrixError(f"Paley II needs q = 1 mod 4, got {q}")
        C = np.zeros((q + 1, q + 1), dtype=np.int64)
        C[0, 1:] = ones
        C[1:, 0] = ones
        C[1:, 1:] = Q
        h2 = np.array([[1, 1], [1, -1]])
        d2 = np.array([[1, -1], [-1, -1]])
        H = np.kron(C, h2) + np.kron(np.eye(q + 1, dtype=np.int64), d2)
        return HadamardMatrix.from_array(H)
    raise MatrixError(f"Paley type must be 1 or 2, got {kind}")


def double(a: HadamardMatrix, b: HadamardMatrix, p: Sequence[int] | None = None, shape: str = "H") -> HadamardMatrix:
    """Order-2n matrix ``[[A, PB], [A, -PB]]`` (shape H) or ``[[A, A], [BP, -BP]]`` (shape Htilde).

    ``P`` is the permutation matrix with ``P[i, p[i]] = 1``, so row ``i`` of
    ``PB`` is row ``p[i]`` of ``B`` and column ``p[i]`` of ``BP`` is column
    ``i`` of ``B``.
    """
    if a.n != b.n:
        raise MatrixError(f"order mismatch: {a.n} vs {b.n}")
    n = a.n
    perm = np.arange(n) if p is None else np.asarray(p)
    if sorted(perm.tolist()) != list(range(n)):
        raise MatrixError("p is not a permutation of the matrix order")
    A = a.array.astype(np.int64)
    B = b.array.astype(np.int64)
    if shape == "H":
        PB = B[perm]
        out = np.block([[A, PB], [A, -PB]])
    elif shape in ("Htilde", "tilde"):
        BP = np.empty_like(B)
        BP[:, perm] = B
        out = np.block([[A, A], [BP, -BP]])
    else:
        raise MatrixError(f"unknown doubling shape {shape!r}")
    return HadamardMatrix.from_array(out)


def load_seed(path) -> HadamardMatrix:
    """Read a .had file and insist that it is a Hadamard matrix."""
    m = read_had(Path(path))
    if not m.is_valid:
        raise MatrixError(f"{path}: rows are not mutually orthogonal")
    return m
