"""Generic finite-group machinery over group handles.

A *group handle* is any object with the small duck-typed interface that
:class:`~apat.pcgroup.PcGroup` and :class:`TableGroup` share: `order`,
`identity` (always id 0), `mult(a, b)`, `inv(a)`, `power(a, k)`,
`elements()`, `element_order(a)`, `generators()`, `rmult_col(b)` (numpy
right-translation column) and a `backend` tag.  Everything downstream
(series, transversals, transfers, patterns) is written against that
interface, so pc-collection groups and coset-table quotients mix freely.

Subgroups are explicit element-id sets: at the orders treated here
(≤ 3500) membership, equality, and normality are set operations, and every
theorem can be checked directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Subgroup",
    "Transversal",
    "SeriesKind",
    "SubgroupLayerSystem",
    "TableGroup",
    "subgroup_closure",
    "whole_group",
    "trivial_subgroup",
    "commutator_subgroup",
    "series",
    "derived_subgroup",
    "center",
    "two_step_centralizer",
    "left_transversal",
    "random_left_transversal",
    "right_transversal_from_left",
    "quotient",
    "abelianization",
    "subgroup_layers",
    "is_isomorphic_small",
    "conjugacy_class_reps",
    "IsoVerdict",
]


class Subgroup:
    """A subgroup given by its explicit, sorted element-id set."""

    def __init__(self, ambient, elems, gens=None):
        self.ambient = ambient
        self.elems = frozenset(elems)
        self.sorted_elems = tuple(sorted(self.elems))
        self.gens = list(gens) if gens is not None else list(self.sorted_elems)
        if 0 not in self.elems:
            raise ValueError("subgroup must contain the identity")

    @property
    def order(self):
        return len(self.elems)

    @property
    def index(self):
        return self.ambient.order // self.order

    def __contains__(self, a):
        return a in self.elems

    def contains_subgroup(self, other):
        return other.elems <= self.elems

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.ambient is other.ambient
            and self.elems == other.elems
        )

    def __hash__(self):
        return hash((id(self.ambient), self.elems))

    def __len__(self):
        return len(self.elems)

    def is_normal(self):
        G = self.ambient
        return all(
            G.conjugate(h, g) in self.elems for h in self.gens for g in G.generators()
        )

    def is_abelian(self):
        G = self.ambient
        return all(
            G.mult(a, b) == G.mult(b, a) for a in self.gens for b in self.gens
        )

    def __repr__(self):
        return "Subgroup(order=%d, index=%d)" % (self.order, self.index)


@dataclass
class Transversal:
    """An ordered system of coset representatives."""

    subgroup: Subgroup
    reps: list
    side: str  # "left" or "right"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    @property
    def group(self):
        return self.subgroup.ambient

    def __len__(self):
        return len(self.reps)

    def verify(self):
        """Check disjoint cover: the cosets tile the ambient group."""
        G = self.group
        H = self.subgroup
        seen = set()
        for r in self.reps:
            if self.side == "left":
                coset = {G.mult(r, h) for h in H.elems}
            else:
                coset = {G.mult(h, r) for h in H.elems}
            if seen & coset:
                return False
            seen |= coset
        return len(seen) == G.order


@dataclass(frozen=True)
class SeriesKind:
    tag: str  # derived | lower-central | lower-p-central
    prime: int = None

    def __post_init__(self):
        if self.tag not in ("derived", "lower-central", "lower-p-central"):
            raise ValueError("unknown series kind %r" % self.tag)
        if (self.tag == "lower-p-central") != (self.prime is not None):
            raise ValueError("prime required exactly for lower-p-central")


# ---------------------------------------------------------------------------
# coset-table quotient groups


class TableGroup:
    """Finite group handle backed by a dense multiplication table."""

    backend = "coset-table"

    def __init__(self, table, gens, name="quotient"):
        self.table = np.asarray(table, dtype=np.int64)
        self.order = self.table.shape[0]
        self.identity = 0
        self.name = name
        self._gens = list(dict.fromkeys(int(g) for g in gens if g != 0)) or [0]
        inv = np.empty(self.order, dtype=np.int64)
        rows, cols = np.nonzero(self.table == 0)
        inv[rows] = cols
        self._inv = inv

    def generators(self):
        return list(self._gens)

    def elements(self):
        return range(self.order)

    def mult(self, a, b):
        return int(self.table[a, b])

    def inv(self, a):
        return int(self._inv[a])

    def rmult_col(self, b, base=None):
        col = self.table[:, b]
        return col if base is None else col[base]

    def power(self, a, k):
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
        return self.mult(self.mult(self.inv(b), a), b)

    def commutator(self, a, b):
        return self.mult(self.inv(self.mult(b, a)), self.mult(a, b))

    def element_order(self, a):
        k, x = 1, a
        while x != 0:
            x = self.mult(x, a)
            k += 1
        return k

    def full_table(self):
        return self.table

    def describe(self):
        return "%s (order %d, coset table)" % (self.name, self.order)

    def __repr__(self):
        return "TableGroup(%s, order=%d)" % (self.name, self.order)


# ---------------------------------------------------------------------------
# closure, commutators, series


def subgroup_closure(ambient, gens):
    """Smallest subgroup containing gens (right-multiplication orbit)."""
    gens = [g for g in dict.fromkeys(int(g) for g in gens)]
    elems = {0}
    frontier = [0]
    use = [g for g in gens if g != 0]
    while frontier:
        x = frontier.pop()
        for g in use:
            y = ambient.mult(x, g)
            if y not in elems:
                elems.add(y)
                frontier.append(y)
    return Subgroup(ambient, elems, gens=use or [0])


def whole_group(G):
    return Subgroup(G, range(G.order), gens=G.generators())


def trivial_subgroup(G):
    return Subgroup(G, [0], gens=[0])


def commutator_subgroup(U, V):
    """[U, V]: generated by commutators, normal closure inside ⟨U, V⟩."""
    if U.ambient is not V.ambient:
        raise ValueError("subgroups live in different ambient groups")
    G = U.ambient
    seed = {G.commutator(u, v) for u in U.gens for v in V.gens}
    seed.discard(0)
    uv_gens = list(dict.fromkeys(list(U.gens) + list(V.gens)))
    while True:
        H = subgroup_closure(G, sorted(seed) or [0])
        grew = False
        for s in list(seed):
            for g in uv_gens:
                c = G.conjugate(s, g)
                if c not in H.elems:
                    seed.add(c)
                    grew = True
        if not grew:
            return H


def derived_subgroup(G):
    W = whole_group(G)
    return commutator_subgroup(W, W)


def derived_of(U):
    """Derived subgroup [U, U] of a Subgroup, inside the same ambient."""
    gens = U.gens if U.gens is not None else list(U.sorted_elems)
    V = Subgroup(U.ambient, U.sorted_elems, gens=gens)
    return commutator_subgroup(V, V)


def _p_power_subgroup(G, U, p):
    """Subgroup generated by {x^p : x in U} and nothing else."""
    return subgroup_closure(G, sorted({G.power(x, p) for x in U.elems}))


def series(G, kind):
    """Characteristic series as a descending chain of Subgroups.

    derived: G ▷ G' ▷ G'' ▷ ...; lower-central: γ_1=G, γ_{j+1} = [γ_j, G];
    lower-p-central: P_0=G, P_n = P_{n-1}^p · [G, P_{n-1}].  The chain ends
    at the trivial subgroup when the series reaches it; a series that
    stabilizes at a nontrivial term (non-nilpotent/non-perfect cases) is
    returned up to its stable term.
    """
    if isinstance(kind, str):
        kind = SeriesKind(kind) if kind != "lower-p-central" else None
    if kind is None:
        raise ValueError("lower-p-central needs SeriesKind with a prime")
    W = whole_group(G)
    chain = [W]
    cur = W
    while cur.order > 1:
        if kind.tag == "derived":
            nxt = commutator_subgroup(cur, cur)
        elif kind.tag == "lower-central":
            nxt = commutator_subgroup(cur, W)
        else:
            comm = commutator_subgroup(W, cur)
            pw = _p_power_subgroup(G, cur, kind.prime)
            nxt = subgroup_closure(G, list(pw.gens) + list(comm.gens))
        if nxt.order == cur.order:
            break  # stabilized above the trivial subgroup
        chain.append(nxt)
        cur = nxt
    return chain


def center(G):
    cols = {g: G.rmult_col(g) for g in G.generators()}
    elems = [
        a
        for a in G.elements()
        if all(int(cols[g][a]) == G.mult(g, a) for g in G.generators())
    ]
    return Subgroup(G, elems)


def two_step_centralizer(G, j):
    """χ_j(G): the largest subgroup with [χ_j, γ_j] ≤ γ_{j+2}."""
    if j < 2:
        raise ValueError("two-step centralizer needs j >= 2")
    gamma = series(G, SeriesKind("lower-central"))
    m = len(gamma)  # chain γ_1 .. γ_m with γ_m possibly trivial
    gj = gamma[j - 1] if j - 1 < m else trivial_subgroup(G)
    gj2 = gamma[j + 1] if j + 1 < m else trivial_subgroup(G)
    elems = [
        a
        for a in G.elements()
        if all(G.commutator(a, u) in gj2.elems for u in gj.gens)
    ]
    return Subgroup(G, elems)


# ---------------------------------------------------------------------------
# transversals


def _left_coset_labels(G, H):
    """label[x] = least element id in the left coset x·H."""
    label = np.arange(G.order, dtype=np.int64)
    for h in H.sorted_elems:
        if h == 0:
            continue
        label = np.minimum(label, G.rmult_col(h))
    return label


def left_transversal(G, H):
    """Canonical left transversal: lex-least reps, identity first."""
    label = _left_coset_labels(G, H)
    reps = sorted(set(int(v) for v in label))
    assert reps[0] == 0
    return Transversal(subgroup=H, reps=reps, side="left")


def random_left_transversal(G, H, rng):
    """A left transversal with a uniformly random rep in each coset."""
    label = _left_coset_labels(G, H)
    buckets = {}
    for x in range(G.order):
        buckets.setdefault(int(label[x]), []).append(x)
    reps = [rng.choice(buckets[k]) for k in sorted(buckets)]
    return Transversal(subgroup=H, reps=reps, side="left")


def right_transversal_from_left(t):
    """Element-wise inverses of a left transversal form a right one."""
    if t.side != "left":
        raise ValueError("expected a left transversal")
    G = t.group
    return Transversal(subgroup=t.subgroup, reps=[G.inv(r) for r in t.reps], side="right")


# ---------------------------------------------------------------------------
# quotients


def _coset_labels_normal(G, N):
    """label[x] = least id in x·N (= N·x for normal N)."""
    label = np.arange(G.order, dtype=np.int64)
    for h in N.sorted_elems:
        if h == 0:
            continue
        label = np.minimum(label, G.rmult_col(h))
    return label


def quotient(G, N, name=None):
    """Coset-table group G/N plus the canonical projection epimorphism."""
    if not N.is_normal():
        raise ValueError("quotient by a non-normal subgroup")
    label = _coset_labels_normal(G, N)
    reps = sorted(set(int(v) for v in label))
    m = len(reps)
    # dense map from ambient ids to quotient ids
    qid = np.searchsorted(np.array(reps, dtype=np.int64), label)
    table = np.empty((m, m), dtype=np.int64)
    for j, rj in enumerate(reps):
        col = G.rmult_col(rj)  # x -> x * r_j
        table[:, j] = qid[col[np.array(reps, dtype=np.int64)]]
    gens = [int(qid[g]) for g in G.generators()]
    qname = name or "%s/N%d" % (getattr(G, "name", "G"), N.order)
    Q = TableGroup(table, gens, name=qname)
    from .hom import GroupHomomorphism  # deferred: hom builds on core

    pi = GroupHomomorphism(G, Q, images=gens, full_map=qid, check=False)
    pi._kernel = N
    return Q, pi


def abelianization(G):
    """(A, π) with A = G/G' as a coset-table group."""
    return quotient(G, derived_subgroup(G), name="%s_ab" % getattr(G, "name", "G"))


def subgroup_as_group(U, name="sub"):
    """Copy a Subgroup into its own TableGroup handle.

    Returns (H, members, idxmap): members[i] is the ambient id of H's
    element i; idxmap is the inverse (ambient id -> H id, -1 outside U).
    """
    G = U.ambient
    members = np.array(U.sorted_elems, dtype=np.int64)
    idxmap = np.full(G.order, -1, dtype=np.int64)
    idxmap[members] = np.arange(len(members))
    n = len(members)
    table = np.empty((n, n), dtype=np.int64)
    for j, b in enumerate(members):
        col = G.rmult_col(int(b))  # x -> x*b
        table[:, j] = idxmap[col[members]]
    if (table < 0).any():
        raise ValueError("element set is not multiplicatively closed")
    H = TableGroup(table, gens=[int(idxmap[g]) for g in U.gens], name=name)
    return H, members, idxmap


def subquotient_with_projection(U, V, name=None):
    """U/V as a TableGroup plus the dense map ambient-id -> quotient-id.

    V must be a normal subgroup of U; entries of the returned map are -1
    for ambient elements outside U.
    """
    if not V.elems <= U.elems:
        raise ValueError("V must be contained in U")
    G = U.ambient
    H, members, idxmap = subgroup_as_group(U, name=name or "sub")
    Vh = Subgroup(H, [int(idxmap[v]) for v in V.sorted_elems])
    Q, pi = quotient(H, Vh, name=name or "subquotient")
    to_q = np.full(G.order, -1, dtype=np.int64)
    to_q[members] = np.asarray(pi.full_map)[idxmap[members]]
    return Q, to_q


# ---------------------------------------------------------------------------
# subgroup layers between G' and G


@dataclass
class SubgroupLayerSystem:
    """All subgroups between G′ and G, grouped by index.

    layers[k] is the list of subgroups of index p^k (k = 0 gives [G]; the
    last layer is [G′]).  With the paper-convention ordering active the
    designated generator pair (x, y) fixes positions inside layers 1 and 2
    and `distinguished[k]` marks the special member (1-based position).
    """

    group: object
    derived: Subgroup
    layers: list
    indices: list
    convention: str = "canonical"
    distinguished: dict = field(default_factory=dict)
    x: int = None
    y: int = None
    shape: str = None       # "(p,p)" or "(p^2,p)" once designated
    prime: int = None

    def layer(self, k):
        return self.layers[k]

    @property
    def maximal(self):
        return self.layers[1] if len(self.layers) > 1 else []

    def all_proper_intermediate(self):
        out = []
        for k in range(1, len(self.layers) - 1):
            out.extend(self.layers[k])
        return out

    def position(self, U):
        for k, layer in enumerate(self.layers):
            for i, V in enumerate(layer):
                if V.elems == U.elems:
                    return (k, i + 1)
        return None


def _abelian_subgroup_sets(A):
    """All subgroups of a small abelian group, as frozensets of ids."""
    # rank bound: largest p-rank over primes dividing |A|
    n = A.order
    rank = 1
    for p in _prime_divisors(n):
        cnt = sum(1 for a in A.elements() if A.power(a, p) == 0)
        # cnt = p^{rank_p}
        rp = 0
        while cnt > 1:
            cnt //= p
            rp += 1
        rank = max(rank, rp)
    elems = list(A.elements())
    found = {frozenset([0])}
    tuples = [()]
    for _ in range(rank):
        new_tuples = []
        for t in tuples:
            start = elems.index(t[-1]) + 1 if t else 0
            for a in elems[start:]:
                tt = t + (a,)
                new_tuples.append(tt)
                found.add(subgroup_closure(A, list(tt)).elems)
        tuples = new_tuples
    return found


def _prime_divisors(n):
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


def subgroup_layers(G, x=None, y=None):
    """Layer system of the subgroups G′ ≤ U ≤ G, grouped by index.

    Default ordering inside each layer is canonical: by sorted element-id
    tuple.  If a designated generator pair (x, y) is given and G/G′ has
    type (p,p) or (p²,p), the conventional ordering is used instead:
    type (p,p):   U_1 = ⟨y,G′⟩,  U_i = ⟨x·y^{i-2},G′⟩  (2 ≤ i ≤ p+1);
    type (p²,p):  layer 1: H_{1,i} = ⟨x·y^{i-1},G′⟩ (i ≤ p), and the
                  distinguished H_{1,p+1} = ⟨y, x^p, G′⟩;
                  layer 2: H_{2,1} = ⟨y,G′⟩, H_{2,i} = ⟨x^p·y^{i-1},G′⟩
                  (2 ≤ i ≤ p), and the distinguished H_{2,p+1} = ⟨x^p,G′⟩
                  = Φ(G).
    """
    Gd = derived_subgroup(G)
    A, pi = quotient(G, Gd, name="ab")
    subs = _abelian_subgroup_sets(A)
    qid = pi.full_map
    # preimages, grouped by index
    by_index = {}
    qid_arr = np.asarray(qid)
    for s in subs:
        mask = np.isin(qid_arr, np.fromiter(s, dtype=np.int64))
        elem_ids = np.nonzero(mask)[0]
        U = Subgroup(G, elem_ids.tolist(), gens=None)
        # generators: lift of the quotient subgroup gens plus G' gens
        lift = []
        for q in sorted(s):
            if q != 0:
                lift.append(int(np.nonzero(qid_arr == q)[0][0]))
        U.gens = list(dict.fromkeys(lift + list(Gd.gens))) or [0]
        by_index.setdefault(G.order // U.order, []).append(U)
    indices = sorted(by_index)
    layers = [sorted(by_index[i], key=lambda U: U.sorted_elems) for i in indices]

    system = SubgroupLayerSystem(
        group=G, derived=Gd, layers=layers, indices=indices, convention="canonical"
    )
    if x is None or y is None:
        return system

    # conventional ordering from the designated generators
    abtype = _abelian_power_type(A)
    gens_d = Gd.gens
    if len(abtype) == 2 and abtype[0] == abtype[1]:
        p = abtype[0]
        ordered = [subgroup_closure(G, [y] + list(gens_d))]
        for i in range(2, p + 2):
            w = G.mult(x, G.power(y, i - 2))
            ordered.append(subgroup_closure(G, [w] + list(gens_d)))
        _install_convention(system, 1, ordered, distinguished=None)
        system.convention = "designated"
        system.shape, system.prime = "(p,p)", p
    elif len(abtype) == 2 and abtype[0] == abtype[1] ** 2:
        p = abtype[1]
        xp = G.power(x, p)
        lyr1 = [
            subgroup_closure(G, [G.mult(x, G.power(y, i - 1))] + list(gens_d))
            for i in range(1, p + 1)
        ]
        lyr1.append(subgroup_closure(G, [y, xp] + list(gens_d)))
        lyr2 = [subgroup_closure(G, [y] + list(gens_d))]
        for i in range(2, p + 1):
            lyr2.append(
                subgroup_closure(G, [G.mult(xp, G.power(y, i - 1))] + list(gens_d))
            )
        lyr2.append(subgroup_closure(G, [xp] + list(gens_d)))
        _install_convention(system, 1, lyr1, distinguished=p + 1)
        _install_convention(system, 2, lyr2, distinguished=p + 1)
        system.convention = "designated"
        system.shape, system.prime = "(p^2,p)", p
    else:
        raise ValueError(
            "designated generators only apply to abelianization types (p,p)/(p^2,p)"
        )
    system.x, system.y = x, y
    return system


def _abelian_power_type(A):
    """Invariant factors of a small abelian group, largest first."""
    from .abelian import abelian_type

    return abelian_type(A).invariants


def _install_convention(system, k, ordered, distinguished):
    current = system.layers[k]
    keyset = {U.elems for U in current}
    newset = {U.elems for U in ordered}
    if keyset != newset or len(ordered) != len(current):
        raise ValueError("conventional ordering does not tile layer %d" % k)
    system.layers[k] = ordered
    if distinguished is not None:
        system.distinguished[k] = distinguished


# ---------------------------------------------------------------------------
# small-group isomorphism testing


@dataclass
class IsoVerdict:
    isomorphic: bool
    mapping: object = None  # numpy array, domain id -> codomain id

    def __bool__(self):
        return self.isomorphic


def _minimal_generators(G):
    """A short generating list (greedy; Burnside basis for p-groups)."""
    gens = []
    H = subgroup_closure(G, [0])
    # prefer high-order elements: fewer generators
    order_of = sorted(G.elements(), key=lambda a: -G.element_order(a))
    while H.order < G.order:
        for a in order_of:
            if a not in H.elems:
                gens.append(a)
                H = subgroup_closure(G, gens)
                break
    if len(gens) > 3:
        p = _prime_power_base(G.order)
        if p is not None:
            gens = _burnside_basis(G, p, order_of)
    return gens or [0]


def _prime_power_base(n):
    for p in range(2, n + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return p if n == 1 else None
    return None


def _burnside_basis(G, p, order_of):
    """Lift a basis of G/Phi(G); minimal for p-groups (Burnside).

    Phi(G) = G' * {p-th powers} for a p-group, so images that span the
    Frattini quotient lift to a generating set of minimal size.
    """
    W = whole_group(G)
    frat_gens = list(derived_of(W).sorted_elems)
    frat_gens.extend(G.power(a, p) for a in G.elements())
    Phi = subgroup_closure(G, sorted(set(frat_gens)))
    Q, pi = quotient(G, Phi, name="frattini-quotient")
    gens = []
    span = subgroup_closure(Q, [0])
    for a in order_of:
        if span.order == Q.order:
            break
        if pi(a) not in span.elems:
            gens.append(a)
            span = subgroup_closure(Q, [pi(g) for g in gens])
    return gens


def conjugacy_class_reps(G):
    """Representatives and sizes of the conjugacy classes."""
    seen = np.zeros(G.order, dtype=bool)
    reps = []
    gens = G.generators()
    for a in G.elements():
        if seen[a]:
            continue
        orbit = {a}
        frontier = [a]
        while frontier:
            xcur = frontier.pop()
            for g in gens:
                yx = G.conjugate(xcur, g)
                if yx not in orbit:
                    orbit.add(yx)
                    frontier.append(yx)
        for o in orbit:
            seen[o] = True
        reps.append((a, len(orbit)))
    return reps


def _element_profile(G):
    """per-element invariant (order, conjugacy class size) for pruning."""
    prof = {}
    for a, size in conjugacy_class_reps(G):
        # profile constant on classes; fill by re-walking the orbit
        orbit = {a}
        frontier = [a]
        while frontier:
            xcur = frontier.pop()
            for g in G.generators():
                yx = G.conjugate(xcur, g)
                if yx not in orbit:
                    orbit.add(yx)
                    frontier.append(yx)
        val = (G.element_order(a), size)
        for o in orbit:
            prof[o] = val
    return prof


def _extend_to_hom(A, B, agens, bimgs):
    """BFS-extend generator images to a full map; None on conflict.

    If the extension exists it is automatically a homomorphism (the
    defining property m(x·a_i) = m(x)·b_i propagates over words).
    """
    m = np.full(A.order, -1, dtype=np.int64)
    m[0] = 0
    frontier = [0]
    while frontier:
        xcur = frontier.pop()
        mx = m[xcur]
        for a, b in zip(agens, bimgs):
            xa = A.mult(xcur, a)
            target = B.mult(int(mx), b)
            if m[xa] == -1:
                m[xa] = target
                frontier.append(xa)
            elif m[xa] != target:
                return None
    if (m == -1).any():
        return None  # gens do not generate A
    return m


def is_isomorphic_small(A, B, bound=3500):
    """Exhaustive generator-image isomorphism search with pruning.

    Requires |A| = |B| ≤ bound and A generated by ≤ 3 elements.  The first
    image ranges over conjugacy-class representatives only (composing with
    an inner automorphism normalizes it), later images over all elements
    with a matching (order, class size) profile and a matching partial
    subgroup order.
    """
    if A.order != B.order:
        return IsoVerdict(False)
    if A.order > bound:
        raise ValueError("isomorphism search bound exceeded (%d > %d)" % (A.order, bound))
    if A.order == 1:
        return IsoVerdict(True, np.zeros(1, dtype=np.int64))
    agens = _minimal_generators(A)
    if len(agens) > 3:
        raise ValueError("isomorphism search expects <= 3 generators")
    profA = _element_profile(A)
    profB = _element_profile(B)
    # quick global invariant: multiset of profiles must agree
    if sorted(profA.values()) != sorted(profB.values()):
        return IsoVerdict(False)
    class_reps = conjugacy_class_reps(B)
    partial_orders = []
    for k in range(1, len(agens) + 1):
        partial_orders.append(subgroup_closure(A, agens[:k]).order)

    def candidates(k, chosen):
        want = profA[agens[k]]
        if k == 0:
            pool = [r for r, _ in class_reps]
        else:
            pool = list(B.elements())
        for b in pool:
            if profB[b] != want:
                continue
            if subgroup_closure(B, chosen + [b]).order != partial_orders[k]:
                continue
            yield b

    def search(k, chosen):
        if k == len(agens):
            m = _extend_to_hom(A, B, agens, chosen)
            if m is not None and len(set(m.tolist())) == B.order:
                return m
            return None
        for b in candidates(k, chosen):
            res = search(k + 1, chosen + [b])
            if res is not None:
                return res
        return None

    m = search(0, [])
    return IsoVerdict(m is not None, m)
