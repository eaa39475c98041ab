"""Abelian type (invariant factors) of finite abelian groups, and the
quotient-existence partial order on types.

The type of a finite abelian group is its invariant-factor list, largest
first, rendered exactly as "(9,3)" or "(3,3,3)".  For a p-group the list
is read off the power-layer ranks r_k = log_p |A^{p^{k-1}} / A^{p^k}|:
the r_k form the conjugate of the partition of exponents, so

    lambda_i = #{k >= 1 : r_k >= i}.

General finite abelian groups decompose per prime and the per-prime
partitions merge back into invariant factors (largest with largest).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import zip_longest

import numpy as np

__all__ = [
    "AbelianType",
    "abelian_type",
    "abelian_type_of_subquotient",
    "type_precedes",
    "abelian_group_of_type",
]


@dataclass(frozen=True, order=True)
class AbelianType:
    """Invariant factors, nonincreasing, each dividing the previous."""

    invariants: tuple

    def __post_init__(self):
        inv = tuple(int(d) for d in self.invariants)
        object.__setattr__(self, "invariants", inv)
        for d in inv:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(inv, inv[1:]):
            if a % b != 0:
                raise ValueError("each factor must divide the previous: %r" % (inv,))

    @property
    def order(self):
        n = 1
        for d in self.invariants:
            n *= d
        return n

    @property
    def rank(self):
        return len(self.invariants)

    def p_partition(self, p):
        """Exponent partition of the p-part, nonincreasing."""
        out = []
        for d in self.invariants:
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            if e:
                out.append(e)
        return out

    def primes(self):
        out = set()
        for d in self.invariants:
            out |= set(_prime_factors(d))
        return sorted(out)

    def render(self):
        if not self.invariants:
            return "(1)"
        return "(" + ",".join(str(d) for d in self.invariants) + ")"

    def __str__(self):
        return self.render()


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def abelian_type(A):
    """AbelianType of an abelian group handle (verified abelian)."""
    gens = A.generators()
    for i, a in enumerate(gens):
        for b in gens[i + 1 :]:
            if A.mult(a, b) != A.mult(b, a):
                raise ValueError("abelian_type of a non-abelian group")
    n = A.order
    if n == 1:
        return AbelianType(())
    per_prime = {}
    for p in _prime_factors(n):
        # layer ranks r_k = log_p |A^{p^{k-1}}| / |A^{p^k}|
        ranks = []
        prev = set(A.elements())
        while True:
            cur = {A.power(a, p) for a in prev}
            if len(cur) == len(prev):
                break
            ratio = len(prev) // len(cur)
            r = 0
            while ratio > 1:
                ratio //= p
                r += 1
            ranks.append(r)
            prev = cur
        # ranks is the conjugate of the exponent partition
        exps = sorted(_conjugate_partition(ranks), reverse=True)
        per_prime[p] = exps
    # merge: align largest exponents across primes
    width = max(len(v) for v in per_prime.values())
    factors = []
    for i in range(width):
        d = 1
        for p, exps in per_prime.items():
            if i < len(exps):
                d *= p ** exps[i]
        factors.append(d)
    return AbelianType(tuple(factors))


def _conjugate_partition(part):
    """Conjugate of a partition given as a list of nonnegative ints."""
    out = []
    j = 1
    while True:
        c = sum(1 for x in part if x >= j)
        if c == 0:
            return out
        out.append(c)
        j += 1


def abelian_type_of_subquotient(G, U, V):
    """Type of U/V for V normal in U, both Subgroups of G (U/V abelian)."""
    from .core import subquotient_with_projection

    Q, _ = subquotient_with_projection(U, V)
    return abelian_type(Q)


def type_precedes(a, b):
    """True iff a group of type a is an epimorphic image of type b.

    For each prime the conjugate partitions must dominate prefix-wise:
    every layer of b has at least the rank of the same layer of a.
    """
    for p in set(a.primes()) | set(b.primes()):
        ca = _conjugate_partition(a.p_partition(p))
        cb = _conjugate_partition(b.p_partition(p))
        for x, y in zip_longest(ca, cb, fillvalue=0):
            if x > y:
                return False
    return True


def abelian_group_of_type(t):
    """Direct-product table group realizing an AbelianType (test utility)."""
    from .core import TableGroup

    dims = list(t.invariants) or [1]
    n = 1
    for d in dims:
        n *= d
    weights = []
    w = n
    for d in dims:
        w //= d
        weights.append(w)

    def compose(v):
        return sum(x * w for x, w in zip(v, weights))

    def decompose(a):
        return [(a // w) % d for w, d in zip(weights, dims)]

    table = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        vi = decompose(i)
        for j in range(n):
            vj = decompose(j)
            table[i, j] = compose([(x + y) % d for x, y, d in zip(vi, vj, dims)])
    gens = [w for w in weights if n > 1]
    return TableGroup(table, gens=gens or [0], name="A%s" % (tuple(dims),))
