"""Small finite fields GF(p^k) with tabulated arithmetic.

Elements are the integers ``0 .. q-1``; the base-``p`` digits of an element
are the coefficients of its polynomial representative (least significant
digit = constant term).  Products are reduced modulo a fixed monic
irreducible polynomial: the entry of ``IRREDUCIBLE`` when present, otherwise
the lexicographically smallest monic irreducible of degree ``k``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

# Coefficients, constant term first, leading 1 included.
IRREDUCIBLE = {
    9: (1, 0, 1),        # x^2 + 1 over GF(3)
    25: (2, 0, 1),       # x^2 + 2 over GF(5)
    27: (1, 2, 0, 1),    # x^3 + 2x + 1 over GF(3)
    49: (1, 0, 1),       # x^2 + 1 over GF(7)
    81: (2, 0, 0, 1, 1), # x^4 + x^3 + 2 over GF(3)
    121: (1, 0, 1),      # x^2 + 1 over GF(11)
    125: (2, 3, 0, 1),   # x^3 + 3x + 2 over GF(5)
}


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k`` and ``p`` prime, or ``None``."""
    if q < 2:
        return None
    for p in range(2, int(q ** 0.5) + 1):
        if q % p == 0:
            k = 0
            while q % p == 0:
                q //= p
                k += 1
            return (p, k) if q == 1 else None
    return (q, 1)


def _poly_mulmod(a, b, mod, p):
    k = len(mod) - 1
    prod = [0] * (2 * k - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for t in range(k + 1):
                prod[d - k + t] = (prod[d - k + t] - c * mod[t]) % p
    return prod[:k]


def _is_irreducible(mod, p):
    k = len(mod) - 1
    # trial division by every monic polynomial of degree <= k/2
    for deg in range(1, k // 2 + 1):
        for coeffs in itertools.product(range(p), repeat=deg):
            div = list(coeffs) + [1]
            rem = list(mod)
            for d in range(k, deg - 1, -1):
                c = rem[d]
                if c:
                    for t in range(deg + 1):
                        rem[d - deg + t] = (rem[d - deg + t] - c * div[t]) % p
            if not any(rem[:deg]):
                return False
    return True


def _find_irreducible(p, k):
    for coeffs in itertools.product(range(p), repeat=k):
        mod = tuple(coeffs[::-1]) + (1,)
        if mod[0] and _is_irreducible(mod, p):
            return mod
    raise ValueError(f"no irreducible polynomial of degree {k} over GF({p})")


class GF:
    """Finite field of order ``q`` with add/mul lookup tables."""

    def __init__(self, q: int):
        pk = prime_power(q)
        if pk is None:
            raise ValueError(f"{q} is not a prime power")
        self.q = q
        self.p, self.k = pk
        p, k = pk
        if k == 1:
            r = np.arange(q)
            self.add = (r[:, None] + r[None, :]) % q
            self.mul = (r[:, None] * r[None, :]) % q
            self.modulus = (0, 1)
        else:
            mod = IRREDUCIBLE.get(q) or _find_irreducible(p, k)
            self.modulus = mod
            digits = [[(x // p ** i) % p for i in range(k)] for x in range(q)]

            def enc(ds):
                return sum(d * p ** i for i, d in enumerate(ds))

            self.add = np.array(
                [[enc([(a + b) % p for a, b in zip(digits[x], digits[y])]) for y in range(q)] for x in range(q)]
            )
            self.mul = np.array(
                [[enc(_poly_mulmod(digits[x], digits[y], mod, p)) for y in range(q)] for x in range(q)]
            )
        self.neg = np.array([int(np.nonzero(self.add[x] == 0)[0][0]) for x in range(q)])
        self.sub = self.add[:, self.neg]
        if not all(len(set(self.mul[x])) == q for x in range(1, q)):
            raise ValueError(f"modulus {self.modulus} does not define a field of order {q}")

    @property
    def squares(self) -> frozenset[int]:
        return frozenset(int(self.mul[x, x]) for x in range(1, self.q))

    def character(self) -> np.ndarray:
        """Quadratic character as an array indexed by element: 0, +1 or -1."""
        sq = self.squares
        chi = np.array([0] + [1 if x in sq else -1 for x in range(1, self.q)], dtype=np.int64)
        return chi


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)
