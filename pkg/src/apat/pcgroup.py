"""Power-commutator presentations and collection.

A finite polycyclic group is described by generators g_1, ..., g_n with
relative orders e_i >= 2, power relations

    g_i^{e_i} = w_ii   (a word over g_{i+1}, ..., g_n)

and conjugation relations

    g_j^{g_i} = g_i^-1 g_j g_i = w_ji   for j > i
    (a word over g_{i+1}, ..., g_n; absent means g_j and g_i commute).

Every element then has a unique collected normal form
g_1^{a_1} g_2^{a_2} ... g_n^{a_n} with 0 <= a_i < e_i, provided the
presentation is consistent.  Elements are represented as exponent tuples
and, inside :class:`PcGroup`, as dense integer ids obtained by ranking the
exponent vector lexicographically (g_1 most significant).

Collection here is "from the left" with an explicit work stack: the
leftmost uncollected generator is repeatedly merged into a growing normal
prefix, conjugation relations are applied to move low-index generators
across higher-index tails, and power relations absorb exponent overflow.

Presentation text format (see :func:`parse_pc`)::

    group q8            # '#' starts a comment
    gens 3
    orders 2 2 2
    pow 1 = g3          # a^2 = c
    pow 2 = g3          # b^2 = c
    conj 2 1 = g2 g3    # b^a = b*c
    end

Several blocks may appear in one file.  Words are whitespace-separated
``g<k>^<e>`` tokens with strictly increasing k (``^1`` may be omitted);
the empty word is spelled ``id``.  Conjugation lines read
``conj j i = ...`` with j > i and mean g_j conjugated by g_i; the
right-hand side may use any generators of index > i.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

DEFAULT_ENUM_BOUND = 10**5

Word = tuple  # tuple of (gen, exp) pairs, gens 1-based


class PcError(ValueError):
    """Raised for grammar violations and malformed presentations."""


class BoundExceeded(RuntimeError):
    """Raised when a requested enumeration would exceed the element bound."""


@dataclass
class PcPresentation:
    """A power-commutator presentation.

    power_rels maps i -> word for g_i^{e_i}; conj_rels maps (j, i) with
    j > i to the word for g_j^{g_i}.  Both use 1-based generator indices
    and omit trivial relations.
    """

    name: str
    gens: list
    rel_orders: list
    power_rels: dict = field(default_factory=dict)
    conj_rels: dict = field(default_factory=dict)

    @property
    def ngens(self):
        return len(self.gens)

    def order_upper_bound(self):
        n = 1
        for e in self.rel_orders:
            n *= e
        return n

    def validate(self):
        n = self.ngens
        if n != len(self.rel_orders):
            raise PcError("%s: gens/orders length mismatch" % self.name)
        for e in self.rel_orders:
            if e < 2:
                raise PcError("%s: relative orders must be >= 2" % self.name)
        for i, w in self.power_rels.items():
            if not 1 <= i <= n:
                raise PcError("%s: pow index %d out of range" % (self.name, i))
            _check_word(self.name, w, n, min_index=i + 1)
        for (j, i), w in self.conj_rels.items():
            if not (1 <= i < j <= n):
                raise PcError(
                    "%s: conj %d %d must conjugate a higher index by a lower"
                    % (self.name, j, i)
                )
            _check_word(self.name, w, n, min_index=i + 1)
        return self


def _check_word(name, word, ngens, min_index):
    last = 0
    for g, e in word:
        if not min_index <= g <= ngens:
            raise PcError("%s: generator g%d out of range in relation" % (name, g))
        if g <= last:
            raise PcError("%s: word indices must strictly increase" % name)
        if e < 1:
            raise PcError("%s: relation exponents must be positive" % name)
        last = g


_TOKEN_RE = re.compile(r"^g(\d+)(?:\^(-?\d+))?$")


def parse_word(text):
    """Parse ``g2 g3^2`` (or ``id``) into a tuple of (gen, exp) pairs."""
    text = text.strip()
    if text == "id":
        return ()
    out = []
    for tok in text.split():
        m = _TOKEN_RE.match(tok)
        if not m:
            raise PcError("bad word token %r" % tok)
        g = int(m.group(1))
        e = int(m.group(2)) if m.group(2) is not None else 1
        out.append((g, e))
    return tuple(out)


def format_word(word):
    if not word:
        return "id"
    return " ".join("g%d" % g if e == 1 else "g%d^%d" % (g, e) for g, e in word)


def parse_pc(text):
    """Parse presentation text into a list of PcPresentation blocks."""
    pres = None
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split(None, 1)
        key = fields[0]
        rest = fields[1] if len(fields) > 1 else ""
        try:
            if key == "group":
                if pres is not None:
                    raise PcError("nested group block")
                if not rest:
                    raise PcError("group needs a name")
                pres = PcPresentation(name=rest.strip(), gens=[], rel_orders=[])
            elif pres is None:
                raise PcError("%r outside a group block" % key)
            elif key == "gens":
                n = int(rest)
                if n < 1:
                    raise PcError("gens must be >= 1")
                pres.gens = ["g%d" % (i + 1) for i in range(n)]
            elif key == "orders":
                pres.rel_orders = [int(t) for t in rest.split()]
            elif key == "pow":
                lhs, _, rhs = rest.partition("=")
                i = int(lhs)
                w = parse_word(rhs)
                if i in pres.power_rels:
                    raise PcError("duplicate pow %d" % i)
                if w:
                    pres.power_rels[i] = w
            elif key == "conj":
                lhs, _, rhs = rest.partition("=")
                parts = lhs.split()
                if len(parts) != 2:
                    raise PcError("conj needs two indices")
                j, i = int(parts[0]), int(parts[1])
                if j <= i:
                    raise PcError(
                        "conj %d %d: conjugated index must exceed conjugator" % (j, i)
                    )
                w = parse_word(rhs)
                if (j, i) in pres.conj_rels:
                    raise PcError("duplicate conj %d %d" % (j, i))
                # g_j^{g_i} = g_j means they commute; store only nontrivial.
                if w != ((j, 1),):
                    pres.conj_rels[(j, i)] = w
            elif key == "end":
                out.append(pres.validate())
                pres = None
            else:
                raise PcError("unknown directive %r" % key)
        except PcError as exc:
            raise PcError("line %d: %s" % (lineno, exc)) from None
        except ValueError as exc:
            raise PcError("line %d: %s" % (lineno, exc)) from None
    if pres is not None:
        raise PcError("unterminated group block %r" % pres.name)
    if not out:
        raise PcError("no group blocks found")
    return out


def parse_pc_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pc(fh.read())


# ---------------------------------------------------------------------------
# collection


class _Collector:
    """Collection from the left over a fixed presentation."""

    def __init__(self, pres):
        pres.validate()
        self.pres = pres
        self.n = pres.ngens
        self.orders = list(pres.rel_orders)
        # 0-based lookup tables; words stored as (gen, exp) with 1-based gens
        self.pow = [pres.power_rels.get(i + 1) for i in range(self.n)]
        self.conj = {}
        for (j, i), w in pres.conj_rels.items():
            self.conj[(j - 1, i - 1)] = w
        self._gen_inverses = [None] * self.n

    def mult(self, u, v_tokens):
        """Normal form of u * (word given by v_tokens), u an exponent tuple.

        v_tokens is a sequence of (gen, exp) with 1-based gens and positive
        exponents.  Collection from the left: the work stack holds the
        uncollected word, top = leftmost letter.
        """
        a = list(u)
        orders = self.orders
        n = self.n
        stack = [(g - 1, e) for g, e in reversed(v_tokens)]
        while stack:
            t, c = stack.pop()
            # find the highest collected index that g_t would have to cross
            k = n - 1
            while k > t and a[k] == 0:
                k -= 1
            if k <= t:
                # merge the exponent at position t
                s = a[t] + c
                a[t] = s % orders[t]
                q = s // orders[t]
                if q:
                    w = self.pow[t]
                    if w:
                        rev = [(g - 1, e) for g, e in reversed(w)]
                        for _ in range(q):
                            stack.extend(rev)
                continue
            # a ends in ... g_k^{a_k}; move one g_t across it
            ak = a[k]
            a[k] = 0
            rel = self.conj.get((k, t))
            if rel is None:
                # commuting: g_k^{ak} g_t^c = g_t^c g_k^{ak}
                stack.append((k, ak))
                stack.append((t, c))
            else:
                # g_k^{ak} g_t = g_t (g_k^{g_t})^{ak}
                if c > 1:
                    stack.append((t, c - 1))
                rev = [(g - 1, e) for g, e in reversed(rel)]
                for _ in range(ak):
                    stack.extend(rev)
                stack.append((t, 1))
        return tuple(a)

    def mult_nf(self, u, v):
        """Normal form of u * v for exponent tuples u, v."""
        tokens = [(i + 1, e) for i, e in enumerate(v) if e]
        return self.mult(u, tokens)

    def gen_inverse(self, t):
        """Normal form of g_{t+1}^{-1} (0-based t), cached."""
        if self._gen_inverses[t] is None:
            unit = tuple(1 if i == t else 0 for i in range(self.n))
            self._gen_inverses[t] = self.inverse(unit)
        return self._gen_inverses[t]

    def inverse(self, u):
        """Normal form of u^{-1}.

        Peels coordinates left to right: multiplying on the right by
        g_i^{e_i - u_i} clears coordinate i without touching lower ones.
        """
        x = [0] * self.n
        p = tuple(u)
        for i in range(self.n):
            d = (-p[i]) % self.orders[i]
            if d:
                x[i] = d
                p = self.mult(p, [(i + 1, d)])
        # the peeling word g_1^{x_1}...g_n^{x_n} is already collected
        return tuple(x)

    def collect_word(self, word):
        """Normal form of an arbitrary word of (gen, exp), exp may be < 0."""
        a = tuple([0] * self.n)
        for g, e in word:
            if not 1 <= g <= self.n:
                raise PcError("generator g%d out of range" % g)
            if e == 0:
                continue
            if e > 0:
                a = self.mult(a, [(g, e)])
            else:
                inv = self.gen_inverse(g - 1)
                for _ in range(-e):
                    a = self.mult_nf(a, inv)
        return a


def collect(pres, word):
    """Collected normal form (exponent tuple) of a free word.

    `word` is a list of (gen-index, exponent) pairs with 1-based indices;
    exponents may be negative.  Collection is a monoid homomorphism from
    free words onto the group.
    """
    return _Collector(pres).collect_word(word)


# ---------------------------------------------------------------------------
# the group handle


class PcGroup:
    """Finite group handle backed by pc-collection.

    Elements are dense ids 0 .. order-1, the lexicographic ranks of the
    exponent vectors (g_1 most significant); id 0 is the identity.  Right
    multiplication by each generator is tabulated once (numpy arrays), and
    general products chain through those tables, so only n*order
    collections are ever performed per group.
    """

    backend = "pc-collection"

    def __init__(self, pres, bound=DEFAULT_ENUM_BOUND):
        pres.validate()
        order = pres.order_upper_bound()
        if bound is not None and order > bound:
            raise BoundExceeded(
                "group %s has %d normal forms, exceeding the bound %d"
                % (pres.name, order, bound)
            )
        self.pres = pres
        self.name = pres.name
        self.n = pres.ngens
        self.orders = list(pres.rel_orders)
        self.order = order
        self._coll = _Collector(pres)
        # mixed-radix weights, g_1 most significant
        w = [1] * self.n
        for i in range(self.n - 2, -1, -1):
            w[i] = w[i + 1] * self.orders[i + 1]
        self._weights = w
        self._rtab = None
        self._inv = None
        self._orders_of = None
        self.identity = 0

    # -- id <-> vector ---------------------------------------------------

    def vec(self, a):
        """Exponent tuple of element id a."""
        out = []
        for i in range(self.n):
            out.append((a // self._weights[i]) % self.orders[i])
        return tuple(out)

    def id_of(self, v):
        """Dense id of an exponent tuple."""
        a = 0
        for i in range(self.n):
            a += (v[i] % self.orders[i]) * self._weights[i]
        return a

    @property
    def gen_ids(self):
        return [self._weights[i] for i in range(self.n)]

    def generators(self):
        return self.gen_ids

    def elements(self):
        return range(self.order)

    # -- multiplication ---------------------------------------------------

    def _ensure_tables(self):
        if self._rtab is not None:
            return
        rtab = []
        coll = self._coll
        for i in range(self.n):
            col = np.empty(self.order, dtype=np.int64)
            tok = [(i + 1, 1)]
            for a in range(self.order):
                col[a] = self.id_of(coll.mult(self.vec(a), tok))
            rtab.append(col)
        self._rtab = rtab

    def mult(self, a, b):
        """id of the product a*b."""
        self._ensure_tables()
        x = a
        for i in range(self.n):
            e = (b // self._weights[i]) % self.orders[i]
            col = self._rtab[i]
            for _ in range(e):
                x = int(col[x])
        return x

    def rmult_col(self, b, base=None):
        """numpy column c with c[x] = x*b (right translation by b)."""
        self._ensure_tables()
        col = np.arange(self.order, dtype=np.int64) if base is None else base
        for i in range(self.n):
            e = (b // self._weights[i]) % self.orders[i]
            for _ in range(e):
                col = self._rtab[i][col]
        return col

    def inv(self, a):
        """id of a^{-1}."""
        if self._inv is not None:
            return int(self._inv[a])
        return self.id_of(self._coll.inverse(self.vec(a)))

    def _ensure_inverses(self):
        if self._inv is None:
            inv = np.empty(self.order, dtype=np.int64)
            for a in range(self.order):
                inv[a] = self.id_of(self._coll.inverse(self.vec(a)))
            self._inv = inv
        return self._inv

    def power(self, a, k):
        """id of a^k for any integer k."""
        if k < 0:
            a, k = self.inv(a), -k
        result, base = 0, a
        while k:
            if k & 1:
                result = self.mult(result, base)
            base = self.mult(base, base)
            k >>= 1
        return result

    def conjugate(self, a, b):
        """id of b^{-1} a b."""
        return self.mult(self.mult(self.inv(b), a), b)

    def commutator(self, a, b):
        """id of [a, b] = a^{-1} b^{-1} a b."""
        return self.mult(self.inv(self.mult(b, a)), self.mult(a, b))

    def element_order(self, a):
        k, x = 1, a
        while x != 0:
            x = self.mult(x, a)
            k += 1
        return k

    def exponent_of(self, a, i):
        """Exponent of g_{i+1} (0-based i) in the normal form of a."""
        return (a // self._weights[i]) % self.orders[i]

    def full_table(self):
        """Dense multiplication table T[a, b] = a*b (numpy, order^2)."""
        self._ensure_tables()
        T = np.empty((self.order, self.order), dtype=np.int64)
        base = np.arange(self.order, dtype=np.int64)
        for b in range(self.order):
            T[:, b] = self.rmult_col(b, base)
        return T

    def describe(self):
        return "%s (order %d, pc presentation on %d generators)" % (
            self.name,
            self.order,
            self.n,
        )

    def __repr__(self):
        return "PcGroup(%s, order=%d)" % (self.name, self.order)


def enumerate_elements(pres, bound=DEFAULT_ENUM_BOUND):
    """Materialize all collected normal forms, in dense-id (lex) order."""
    G = PcGroup(pres, bound=bound)
    return [G.vec(a) for a in range(G.order)]


@dataclass
class ConsistencyReport:
    name: str
    consistent: bool
    order: int
    products_checked: int
    witness: tuple = None  # (kind, detail...) describing the collision

    def __bool__(self):
        return self.consistent


def check_consistency(pres, bound=DEFAULT_ENUM_BOUND):
    """Verify a presentation defines a group of order prod(e_i).

    Constructive check by full enumeration:  every product g_i * (normal
    form) is collected, giving the left-translation map L_i of the
    normal-form set.  The presentation is consistent iff

      (a) every L_i is injective (a collision of collected products is an
          immediate witness that the group collapses), and
      (b) the defining relations hold as pointwise identities of those
          maps: g_i^{e_i} * v = w_ii * v for all forms v, and for j > i,
          g_j * (g_i * v) = g_i * (w_ji * v).

    Sufficiency of (a)+(b): they make the collected product an associative
    cancellative operation on the prod(e_i) normal forms with identity, i.e.
    a group satisfying the presented relations, so the presented group has
    at least prod(e_i) elements; the normal forms always span, giving
    equality.  Injectivity alone is *not* enough: a collapsing presentation
    can still act bijectively (relations then fail associativity instead),
    which (b) catches.  Returns a report with a witness on failure.
    """
    pres.validate()
    order = pres.order_upper_bound()
    if order > bound:
        raise BoundExceeded(
            "group %s has %d normal forms, exceeding the bound %d"
            % (pres.name, order, bound)
        )
    coll = _Collector(pres)
    G = PcGroup(pres, bound=bound)
    n = pres.ngens
    checked = 0

    # left-translation maps over dense ids, built by collection
    ltab = []
    for i in range(n):
        g_vec = tuple(1 if j == i else 0 for j in range(n))
        col = np.empty(order, dtype=np.int64)
        seen = {}
        for a in range(order):
            img = coll.mult_nf(g_vec, G.vec(a))
            checked += 1
            b = G.id_of(img)
            if b in seen:
                return ConsistencyReport(
                    pres.name,
                    False,
                    order,
                    checked,
                    ("collision", i + 1, G.vec(seen[b]), G.vec(a), img),
                )
            seen[b] = a
            col[a] = b
        ltab.append(col)

    ident = np.arange(order, dtype=np.int64)

    def left_word(word, base):
        # image of base under v -> word * v (rightmost letter acts first)
        out = base
        for g, e in reversed(word):
            for _ in range(e):
                out = ltab[g - 1][out]
        return out

    for i in range(n):
        lhs = left_word(((i + 1, pres.rel_orders[i]),), ident)
        rhs = left_word(pres.power_rels.get(i + 1, ()), ident)
        checked += order
        bad = np.nonzero(lhs != rhs)[0]
        if bad.size:
            v = int(bad[0])
            return ConsistencyReport(
                pres.name,
                False,
                order,
                checked,
                ("power", i + 1, G.vec(v), G.vec(int(lhs[v])), G.vec(int(rhs[v]))),
            )
    for j in range(2, n + 1):
        for i in range(1, j):
            w = pres.conj_rels.get((j, i), ((j, 1),))
            lhs = ltab[j - 1][ltab[i - 1][ident]]
            rhs = ltab[i - 1][left_word(w, ident)]
            checked += order
            bad = np.nonzero(lhs != rhs)[0]
            if bad.size:
                v = int(bad[0])
                return ConsistencyReport(
                    pres.name,
                    False,
                    order,
                    checked,
                    ("conj", j, i, G.vec(v), G.vec(int(lhs[v])), G.vec(int(rhs[v]))),
                )
    return ConsistencyReport(pres.name, True, order, checked)
