#!/usr/bin/env python3
"""Derive the embedded catalog: presentations, designated generators, fixtures.

Strategy per family of groups:

  * write down the defining commutator skeleton (the relations that name
    the generators) and leave undetermined "tails" on the remaining
    relations; tails take values in a central elementary-abelian slice
  * collection defects of the Sims consistency conditions are affine in
    the tails (tail letters are central and inert, so the rewrite path on
    the other coordinates never depends on them); solve the small linear
    system over F_p and enumerate only the affine solution space
  * run the full enumeration consistency check on every solution, bucket
    by invariant fingerprints, and pick the classes whose computed pattern
    invariants reproduce the recorded target values positionwise for some
    generator pair (x, y)

Outputs (all regenerated from scratch; nothing else is written):
    src/apat/data/catalog/*.pc
    src/apat/data/catalog.json
    src/apat/data/forest.json

Run:  python3 tools/derive_catalog.py all
"""

import itertools
import json
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from apat.pcgroup import PcGroup, parse_pc, check_consistency, _Collector
from apat.core import (
    Subgroup,
    TableGroup,
    SeriesKind,
    center,
    derived_subgroup,
    derived_of,
    quotient,
    series,
    subgroup_closure,
    subgroup_layers,
    trivial_subgroup,
    whole_group,
    is_isomorphic_small,
)
from apat.abelian import AbelianType, abelian_type_of_subquotient
from apat.transfer import artin_transfer
from apat.pattern import canonical_tkt, total_kernel_counter
from apat.tree import TreeError

DATA = ROOT / "src" / "apat" / "data"
CATALOG_DIR = DATA / "catalog"


# ---------------------------------------------------------------------------
# presentation text assembly


def word_text(vec):
    parts = []
    for i, e in enumerate(vec):
        if e == 1:
            parts.append("g%d" % (i + 1))
        elif e:
            parts.append("g%d^%d" % (i + 1, e))
    return " ".join(parts)


def pres_text(name, orders, pows, conjs):
    """pows: {i: exponent vector}; conjs: {(j, i): exponent vector}."""
    n = len(orders)
    lines = [
        "group %s" % name,
        "gens %d" % n,
        "orders %s" % " ".join(str(e) for e in orders),
    ]
    unit = [0] * n
    for i in sorted(pows):
        w = word_text(pows[i])
        if w:
            lines.append("pow %d = %s" % (i, w))
    for (j, i) in sorted(conjs):
        vec = list(conjs[(j, i)])
        unit_j = list(unit)
        unit_j[j - 1] = 1
        if vec == unit_j:
            continue  # trivial action, leave implicit
        lines.append("conj %d %d = %s" % (j, i, word_text(vec)))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_one(text):
    return parse_pc(text)[0]


# ---------------------------------------------------------------------------
# Sims consistency conditions and the affine tail solver


def consistency_defects(pres):
    """Pairs (lhs, rhs) of collected normal forms for the overlap conditions.

    The condition list's structure depends only on ngens and the relative
    orders, so defects are comparable across tail choices.
    """
    col = _Collector(pres)
    n = col.n
    e = col.orders

    def unit(t):
        return tuple(1 if i == t else 0 for i in range(n))

    zero = tuple([0] * n)
    out = []
    for k in range(n):
        for j in range(k):
            for i in range(j):
                lhs = col.mult_nf(col.mult_nf(unit(k), unit(j)), unit(i))
                rhs = col.mult_nf(unit(k), col.mult_nf(unit(j), unit(i)))
                out.append((lhs, rhs))
    pow_nf = []
    for j in range(n):
        w = col.pow[j]
        pow_nf.append(col.collect_word(w) if w else zero)
    for j in range(n):
        for i in range(j):
            t = col.mult_nf(unit(j), unit(i))
            # g_j^{e_j} g_i  vs  g_j^{e_j-1} (g_j g_i)
            lhs = col.mult_nf(pow_nf[j], unit(i))
            half = tuple(e[j] - 1 if x == j else 0 for x in range(n))
            rhs = col.mult_nf(half, t)
            out.append((lhs, rhs))
            # g_j g_i^{e_i}  vs  (g_j g_i) g_i^{e_i-1}
            lhs = col.mult_nf(unit(j), pow_nf[i])
            rhs = col.mult(t, [(i + 1, e[i] - 1)])
            out.append((lhs, rhs))
        # g_j^{e_j} g_j  vs  g_j g_j^{e_j}
        lhs = col.mult_nf(pow_nf[j], unit(j))
        rhs = col.mult(unit(j), [(j + 1, e[j])])
        out.append((lhs, rhs))
    return out


def defect_vector(pres, tail_coords):
    """Flattened defect over tail coords; None if a non-tail coordinate
    disagrees (tails can never repair those)."""
    vec = []
    for lhs, rhs in consistency_defects(pres):
        for c in range(len(lhs)):
            d = lhs[c] - rhs[c]
            if c in tail_coords:
                vec.append(d)
            elif d:
                return None
    return np.array(vec, dtype=np.int64)


def gauss_affine(M, b, p):
    """Solve M t = b over F_p: (particular, nullspace basis) or None."""
    M = np.array(M, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64) % p
    rows, cols = M.shape
    aug = np.concatenate([M, b.reshape(-1, 1)], axis=1)
    pivots = []
    r = 0
    for c in range(cols):
        sel = None
        for rr in range(r, rows):
            if aug[rr, c] % p:
                sel = rr
                break
        if sel is None:
            continue
        aug[[r, sel]] = aug[[sel, r]]
        inv = pow(int(aug[r, c]), p - 2, p)
        aug[r] = (aug[r] * inv) % p
        for rr in range(rows):
            if rr != r and aug[rr, c] % p:
                aug[rr] = (aug[rr] - aug[rr, c] * aug[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for rr in range(r, rows):
        if aug[rr, -1] % p:
            return None  # inconsistent
    part = np.zeros(cols, dtype=np.int64)
    for idx, c in enumerate(pivots):
        part[c] = aug[idx, -1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for idx, c in enumerate(pivots):
            v[c] = (-aug[idx, f]) % p
        basis.append(v)
    return part, basis


def solve_tails_system(builder, nslots, p, tail_coords):
    """(particular, nullspace basis) of the overlap-condition system.

    builder(t) -> presentation text.  Defects are affine in t, so the
    solution set is an affine subspace recovered from nslots+1 probes.
    Returns None when the system has no solution.
    """
    tail_coords = set(tail_coords)

    def defect(t):
        return defect_vector(parse_one(builder(t)), tail_coords)

    d0 = defect([0] * nslots)
    if d0 is None:
        return None
    cols = []
    for k in range(nslots):
        ek = [0] * nslots
        ek[k] = 1
        dk = defect(ek)
        if dk is None:
            raise RuntimeError("non-tail defect appeared on a basis probe")
        cols.append((dk - d0) % p)
    M = np.stack(cols, axis=1) if cols else np.zeros((len(d0), 0), dtype=np.int64)
    return gauss_affine(M, (-d0) % p, p)


def span_members(vectors, p, nslots, cap=200000):
    """All F_p combinations of the given vectors (as a sorted tuple list)."""
    count = p ** len(vectors)
    if count > cap:
        raise RuntimeError("solution space too large: %d" % count)
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(vectors)):
        t = np.zeros(nslots, dtype=np.int64)
        for c, v in zip(coeffs, vectors):
            t = (t + c * v) % p
        out.add(tuple(int(x) for x in t))
    return sorted(out)


def solve_tails(builder, nslots, p, tail_coords, cap=200000):
    """Enumerate all tail vectors passing the overlap conditions."""
    sol = solve_tails_system(builder, nslots, p, tail_coords)
    if sol is None:
        return []
    part, basis = sol
    count = p ** len(basis)
    if count > cap:
        raise RuntimeError("solution space too large: %d" % count)
    out = []
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        t = part.copy()
        for c, v in zip(coeffs, basis):
            t = (t + c * v) % p
        out.append(tuple(int(x) for x in t))
    return sorted(out)


# ---------------------------------------------------------------------------
# group analysis helpers


def build_checked(text):
    """PcGroup from text if the full enumeration check passes, else None."""
    pres = parse_one(text)
    rep = check_consistency(pres)
    if not rep:
        return None
    return PcGroup(pres)


def build_checked_fast(text):
    """build_checked behind the cheap overlap-condition filter."""
    if defect_vector(parse_one(text), frozenset()) is None:
        return None
    return build_checked(text)


def order_histogram(G):
    return tuple(sorted(Counter(G.element_order(a) for a in G.elements()).items()))


def fingerprint(G):
    lc = tuple(H.order for H in series(G, SeriesKind("lower-central")))
    dv = tuple(H.order for H in series(G, SeriesKind("derived")))
    Z = center(G)
    zt = abelian_type_of_subquotient(G, Z, trivial_subgroup(G)).invariants
    ab = abelian_type_of_subquotient(G, whole_group(G), derived_subgroup(G)).invariants
    return (G.order, order_histogram(G), lc, dv, zt, ab)


def nilpotency_class(G):
    chain = series(G, SeriesKind("lower-central"))
    if chain[-1].order != 1:
        raise ValueError("not nilpotent")
    return len(chain) - 2 + 1 if len(chain) >= 2 else 0


def centre_type(G):
    return abelian_type_of_subquotient(G, center(G), trivial_subgroup(G)).invariants


def derived_type(G):
    """Type of G'/G'' (the bottom layer of the restricted family)."""
    D = derived_of(whole_group(G))
    return abelian_type_of_subquotient(G, D, derived_of(D)).invariants


def transfer_table(G):
    """Per maximal subgroup U (keyed by element set): kernel and U/U' type."""
    sys0 = subgroup_layers(G)
    table = {}
    for U in sys0.layer(1):
        T = artin_transfer(G, U)
        table[frozenset(U.elems)] = (T.kernel, abelian_type_of_subquotient(G, U, derived_of(U)))
    return table, sys0


def pp_digit(G, kernel, maximals):
    if kernel.order == G.order:
        return 0
    kset = frozenset(kernel.elems)
    for j, U in enumerate(maximals, start=1):
        if kset == frozenset(U.elems):
            return j
    return -1


def designation_candidates(G):
    """(x, y) pairs, one per ordered pair of independent F_p^2 directions,
    each lifted to the minimal-id coset representative."""
    der = derived_subgroup(G)
    Q, pi = quotient(G, der)
    reps = {}
    for a in G.elements():
        reps.setdefault(pi(a), a)
    p2 = Q.order
    pairs = []
    for qx in sorted(reps):
        if qx == 0:
            continue
        for qy in sorted(reps):
            if qy == 0 or qy == qx:
                continue
            if subgroup_closure(Q, [qx, qy]).order != p2:
                continue
            pairs.append((reps[qx], reps[qy]))
    return pairs


def designated_view(G, x, y, table):
    """(kappa digits, tau types) for the designated convention (x, y)."""
    sysd = subgroup_layers(G, x=x, y=y)
    maximals = sysd.layer(1)
    digits = []
    taus = []
    for U in maximals:
        ker, tau = table[frozenset(U.elems)]
        digits.append(None)  # placeholder, fill after the list is fixed
        taus.append(tau)
    digits = [pp_digit(G, table[frozenset(U.elems)][0], maximals) for U in maximals]
    return tuple(digits), tuple(taus)


def find_designation(G, table, kappa=None, tau=None):
    """Lex-least (x, y) reproducing the recorded strings positionwise."""
    want_tau = None
    if tau is not None:
        want_tau = tuple(AbelianType(tuple(t)) for t in tau)
    for x, y in designation_candidates(G):
        try:
            digits, taus = designated_view(G, x, y, table)
        except ValueError:
            # pair violates the conventional ordering (wrong shape slot)
            continue
        if kappa is not None and digits != tuple(kappa):
            continue
        if want_tau is not None and taus != want_tau:
            continue
        return x, y, digits, taus
    return None


# ---------------------------------------------------------------------------
# family scans


def stem243_builder(name="cand"):
    orders = (3, 3, 3, 3, 3)
    conjs = {
        (2, 1): (0, 1, 1, 0, 0),  # [y, x] = s2
        (3, 1): (0, 0, 1, 1, 0),  # [s2, x] = s3
        (3, 2): (0, 0, 1, 0, 1),  # [s2, y] = t3
    }

    def builder(t):
        a4, a5, b4, b5, c4, c5 = t
        pows = {
            1: (0, 0, 0, a4, a5),
            2: (0, 0, 0, b4, b5),
            3: (0, 0, 0, c4, c5),
        }
        return pres_text(name, orders, pows, conjs)

    return builder, 6, [3, 4]


def scan_stem243():
    """Class-3 coclass-2 groups of order 243 with gamma_3 of type (3,3)."""
    builder, nslots, coords = stem243_builder()
    sols = solve_tails(builder, nslots, 3, coords)
    survivors = []
    for t in sols:
        G = build_checked(builder(t))
        if G is not None:
            survivors.append((t, builder(t), G))
    return survivors


def sims_consistent(text):
    """Fast necessary filter: all overlap conditions collect equal."""
    return defect_vector(parse_one(text), frozenset()) is not None


def scan_stem243_cyclic():
    """Class-3 coclass-2 groups of order 243 with cyclic gamma_3 = C9.

    Chain x, y, s2, s3, z with s3^3 = z and gamma_3 = <s3>.  Either
    [s2,x] has order 9 (normalize s3 := [s2,x]) or it falls in <z> and
    [s2,y] must generate (normalize s3 := [s2,y]).  The C9 slice carries
    nonlinearly (cube overflow), so this family is enumerated outright
    behind the overlap-condition filter.
    """
    orders = (3, 3, 3, 3, 3)
    base_conjs = {(2, 1): (0, 1, 1, 0, 0)}
    conj_variants = []
    for m2, l2 in itertools.product(range(3), repeat=2):
        conj_variants.append({(3, 1): (0, 0, 1, 1, 0), (3, 2): (0, 0, 1, m2, l2)})
    for l1 in range(3):
        conj_variants.append({(3, 1): (0, 0, 1, 0, l1), (3, 2): (0, 0, 1, 1, 0)})
    survivors = []
    for cv in conj_variants:
        conjs = dict(base_conjs)
        conjs.update(cv)
        for a1, a2, b1, b2, c1, c2 in itertools.product(range(3), repeat=6):
            pows = {
                1: (0, 0, 0, a1, a2),
                2: (0, 0, 0, b1, b2),
                3: (0, 0, 0, c1, c2),
                4: (0, 0, 0, 0, 1),  # s3^3 = z
            }
            text = pres_text("cand", orders, pows, conjs)
            if not sims_consistent(text):
                continue
            G = build_checked(text)
            if G is not None:
                key = tuple(sorted(cv.items())) + (a1, a2, b1, b2, c1, c2)
                survivors.append((key, text, G))
    return survivors


def stem_maxclass_builder(p, wide):
    """Order p^4 maximal-class skeleton; wide=True also scans the
    non-central s2-components of x^p and y^p (needed only at p = 3)."""
    orders = (p, p, p, p)
    conjs = {
        (2, 1): (0, 1, 1, 0),  # [y, x] = s2
        (3, 1): (0, 0, 1, 1),  # [s2, x] = s3
    }
    if not wide:

        def builder(t):
            a, b, c = t
            pows = {1: (0, 0, 0, a), 2: (0, 0, 0, b), 3: (0, 0, 0, c)}
            return pres_text("cand", orders, pows, conjs)

        return builder, 3, [3]

    def builder(t):
        a2, a3, b2, b3, c = t
        pows = {1: (0, 0, a2, a3), 2: (0, 0, b2, b3), 3: (0, 0, 0, c)}
        return pres_text("cand", orders, pows, conjs)

    return builder, 5, None  # brute: s2-tails are not central


def scan_maxclass_p4(p):
    """All maximal-class groups of order p^4 (conventional generators)."""
    if p == 3:
        builder, nslots, _ = stem_maxclass_builder(p, wide=True)
        survivors = []
        for t in itertools.product(range(3), repeat=nslots):
            G = build_checked_fast(builder(t))
            if G is not None:
                survivors.append((t, builder(t), G))
        return survivors
    builder, nslots, coords = stem_maxclass_builder(p, wide=False)
    sols = solve_tails(builder, nslots, p, coords)
    survivors = []
    for t in sols:
        G = build_checked(builder(t))
        if G is not None:
            survivors.append((t, builder(t), G))
    return survivors


def scan_class2_81():
    """Order-81 class-2 groups with (3,3) abelianization (G' = C9)."""
    orders = (3, 3, 3, 3)
    conjs = {(2, 1): (0, 1, 1, 0)}  # [y, x] = w
    survivors = []
    for a1, a2, b1, b2 in itertools.product(range(3), repeat=4):
        pows = {1: (0, 0, a1, a2), 2: (0, 0, b1, b2), 3: (0, 0, 0, 1)}  # w^3 = w3
        text = pres_text("cand", orders, pows, conjs)
        G = build_checked_fast(text)
        if G is not None:
            survivors.append(((a1, a2, b1, b2), text, G))
    return survivors


def lift_builder(parent, d, name="cand"):
    """Generic central lift: append d new order-p central generators and
    put tail slots on every parent relation (including implicit trivial
    commutators)."""
    orders = parent["orders"]
    n = len(orders)
    p = orders[0]
    N = n + d
    child_orders = orders + (p,) * d
    slots = [("pow", i) for i in range(1, n + 1)]
    slots += [("conj", j, i) for j in range(2, n + 1) for i in range(1, j)]
    nslots = len(slots) * d

    def pad(vec):
        return list(vec) + [0] * d

    def builder(t):
        pows = {i: pad(parent["pows"].get(i, (0,) * n)) for i in range(1, n + 1)}
        conjs = {k: pad(v) for k, v in parent["conjs"].items()}
        for idx, slot in enumerate(slots):
            tails = t[idx * d : (idx + 1) * d]
            if not any(tails):
                continue
            if slot[0] == "pow":
                vec = pows[slot[1]]
            else:
                key = (slot[1], slot[2])
                if key not in conjs:
                    vec = [0] * N
                    vec[slot[1] - 1] = 1
                    conjs[key] = vec
                vec = conjs[key]
            for c in range(d):
                vec[n + c] = tails[c]
        pows = {i: tuple(v) for i, v in pows.items() if any(v)}
        conjs = {k: tuple(v) for k, v in conjs.items()}
        return pres_text(name, child_orders, pows, conjs)

    return builder, nslots, list(range(n, N))


def lift_slots(parent):
    n = len(parent["orders"])
    slots = [("pow", i) for i in range(1, n + 1)]
    slots += [("conj", j, i) for j in range(2, n + 1) for i in range(1, j)]
    return slots


def coboundary_basis(parent, p):
    """Tail shifts induced by rebasing g_k -> g_k * t^mu_k (t central).

    Substituting into a relation ``lhs = w * t^tail`` changes the tail by
    e_i*mu_i - sum_k w_k*mu_k on the power slot for g_i and by
    mu_j - sum_k w_k*mu_k on the conjugation slot (j, i); two lifts whose
    tails differ by such a shift present the same group.
    """
    slots = lift_slots(parent)
    n = len(parent["orders"])
    basis = []
    for k in range(1, n + 1):
        vec = np.zeros(len(slots), dtype=np.int64)
        for idx, slot in enumerate(slots):
            if slot[0] == "pow":
                i = slot[1]
                w = parent["pows"].get(i, (0,) * n)
                val = (parent["orders"][i - 1] if i == k else 0) - w[k - 1]
            else:
                j = slot[1]
                w = parent["conjs"].get((slot[1], slot[2]))
                if w is None:
                    w = tuple(1 if c == j - 1 else 0 for c in range(n))
                val = (1 if j == k else 0) - w[k - 1]
            vec[idx] = val % p
        if vec.any():
            basis.append(vec)
    return basis


def reduce_mod(vectors, p):
    """Row-reduced basis (as a pivot dict) for a span over F_p."""
    pivots = {}
    for v in vectors:
        v = v.copy() % p
        while v.any():
            c = int(np.nonzero(v)[0][0])
            if c in pivots:
                v = (v - v[c] * pow(int(pivots[c][c]), p - 2, p) * pivots[c]) % p
            else:
                pivots[c] = v
                break
    return pivots


def in_span(pivots, v, p):
    v = v.copy() % p
    while v.any():
        c = int(np.nonzero(v)[0][0])
        if c not in pivots:
            return False
        v = (v - v[c] * pow(int(pivots[c][c]), p - 2, p) * pivots[c]) % p
    return True


def lift_complement(parent):
    """Basis of a complement of the coboundary space inside the (homogeneous)
    solution space of the central C_p lift tails."""
    builder, nslots, coords = lift_builder(parent, 1)
    p = parent["orders"][0]
    sol = solve_tails_system(builder, nslots, p, coords)
    if sol is None:
        return None
    part, basis = sol
    if part.any():
        raise RuntimeError("lift system should be homogeneous (zero tails split)")
    cob = coboundary_basis(parent, p)
    sol_pivots = reduce_mod(basis, p)
    for v in cob:
        if not in_span(sol_pivots, v, p):
            raise RuntimeError("coboundary outside the solution space")
    pivots = reduce_mod(cob, p)
    complement = []
    for v in basis:
        if not in_span(pivots, v, p):
            complement.append(v)
            pivots = reduce_mod(list(pivots.values()) + [v], p)
    return complement


def subspace_reps(q, p, dim):
    """Canonical (reduced row echelon) bases for all dim-dimensional
    subspaces of F_p^q, one matrix per subspace."""
    out = []
    for piv in itertools.combinations(range(q), dim):
        freepos = [
            (i, j)
            for i in range(dim)
            for j in range(piv[i] + 1, q)
            if j not in piv
        ]
        for vals in itertools.product(range(p), repeat=len(freepos)):
            M = [[0] * q for _ in range(dim)]
            for i in range(dim):
                M[i][piv[i]] = 1
            for (i, j), v in zip(freepos, vals):
                M[i][j] = v
            out.append(M)
    return out


def scan_lift(parent, d, filt=None):
    """Consistent central lifts of `parent` by C_p^d where the appended
    layer has full rank d (no central C_p direct factor splits off).

    Rebasing the new generators into the old ones shifts each tail column
    by a coboundary, and a basis change of the new layer mixes the columns,
    so the isomorphism class of a lift depends only on the column span of
    the tail matrix inside solution-space/coboundary-space.  One build per
    canonical subspace representative.
    """
    builder, nslots, coords = lift_builder(parent, d)
    p = parent["orders"][0]
    basis = lift_complement(parent)
    if basis is None:
        return []
    q = len(basis)
    nslots1 = nslots // d
    survivors = []
    for M in subspace_reps(q, p, d):
        t = [0] * nslots
        for c in range(d):
            u = np.zeros(nslots1, dtype=np.int64)
            for a, bvec in zip(M[c], basis):
                u = (u + a * bvec) % p
            for idx in range(nslots1):
                t[idx * d + c] = int(u[idx])
        t = tuple(t)
        text = builder(t)
        if filt is not None and not filt(parse_one(text)):
            continue
        G = build_checked(text)
        if G is not None:
            survivors.append((t, text, G))
    return survivors


def parent_dict(orders, pows, conjs):
    return {"orders": tuple(orders), "pows": dict(pows), "conjs": dict(conjs)}


def parent_from_text(text):
    pres = parse_one(text)
    pows = {i: vec_of_word(pres, w) for i, w in pres.power_rels.items()}
    conjs = {k: vec_of_word(pres, w) for k, w in pres.conj_rels.items()}
    return parent_dict(pres.rel_orders, pows, conjs)


def vec_of_word(pres, word):
    v = [0] * pres.ngens
    for g, e in word:
        v[g - 1] += e
    return tuple(v)


# ---------------------------------------------------------------------------
# target registry: recorded invariants for the catalogued identifiers


def T(*rows):
    return [tuple(r) for r in rows]


TARGETS_243 = {
    "243.3": dict(kappa=(0, 0, 4, 3), tau=T((9, 3), (9, 3), (3, 3, 3), (3, 3, 3))),
    "243.4": dict(kappa=(4, 4, 4, 3), tau=T((3, 3, 3), (3, 3, 3), (9, 3), (3, 3, 3))),
    "243.6": dict(kappa=(0, 1, 2, 2), tau=None),
    "243.8": dict(kappa=(2, 0, 3, 4), tau=None),
    "243.9": dict(kappa=(2, 1, 4, 3), tau=T((9, 3), (9, 3), (9, 3), (9, 3))),
}

TARGETS_625 = {
    "625.7": dict(kappa=(0,) * 6, tau=T((5, 5, 5), (5, 5), (5, 5), (5, 5), (5, 5), (5, 5))),
    "625.8": dict(kappa=(1, 0, 0, 0, 0, 0), tau=T((5, 5, 5), (5, 5), (5, 5), (5, 5), (5, 5), (5, 5))),
}

TARGET_81_7 = dict(kappa=(2, 0, 0, 0), tau=None)


def _wreath81():
    """C3 wr C3 on nine points (top 3-cycle of blocks, one base 3-cycle)."""
    top = perm_of_cycles(9, [(0, 3, 6), (1, 4, 7), (2, 5, 8)])
    base = perm_of_cycles(9, [(0, 1, 2)])
    W = perm_table_group([top, base], "c3wrc3")
    assert W.order == 81
    return W


_WREATH81_CACHE = []


def wreath81():
    if not _WREATH81_CACHE:
        _WREATH81_CACHE.append(_wreath81())
    return _WREATH81_CACHE[0]


# Two maximal-class groups of order 81 print the digits (2,0,0,0); the
# catalogued one is the wreath product C3 wr C3 (elementary abelian first
# maximal subgroup), so anchor the identifier to that permutation model.
AUX_81 = {"81.7": lambda G: is_isomorphic_small(G, wreath81())}

TARGETS_729 = {
    "729.45": dict(kappa=(4, 4, 4, 3), tau=T((3, 3, 3), (3, 3, 3), (9, 3), (3, 3, 3)),
                   centre="cyclic"),
    "729.54": dict(kappa=(0, 2, 3, 1), tau=T((9, 9), (9, 3), (9, 3), (9, 3))),
}

TARGET_2187_77 = dict(kappa=(3, 4, 4, 3), tau=T((9, 9), (9, 9), (3, 3, 3), (3, 3, 3)))
TARGET_2187_304 = dict(kappa=(1, 2, 3, 1), tau=T((27, 9), (9, 3), (9, 3), (9, 3)))
TARGET_3125_33 = dict(kappa=(0,) * 6, tau=T((5, 5, 5), (5, 5), (5, 5), (5, 5), (5, 5), (5, 5)))


def sibling_diag(G):
    """One-line invariant summary for ambiguity diagnostics."""
    from collections import Counter

    lc = [s.order for s in series(G, SeriesKind("lower-central"))]
    hist = Counter(G.element_order(a) for a in G.elements())
    return "centre=%s lc=%s orders=%s" % (
        centre_type(G), lc, sorted(hist.items()))


def match_targets(survivors, targets, aux=None, tie_break=()):
    """Assign ids to scan survivors via designated-print reproduction.

    Returns {id: (tails, text, G, x, y)} and prints ambiguity diagnostics.
    aux: optional {id: predicate(G)} extra structural filters.
    tie_break: ids where non-isomorphic multi-matches are resolved by
    taking the lex-least tails vector (use only when the recorded
    invariants provably cannot separate the siblings).
    """
    by_fp = {}
    for t, text, G in survivors:
        by_fp.setdefault(fingerprint(G), []).append((t, text, G))
    print("    %d consistent candidates in %d fingerprint classes" % (len(survivors), len(by_fp)))
    tables = {}

    def table_of(idx, G):
        if idx not in tables:
            tables[idx] = transfer_table(G)[0]
        return tables[idx]

    chosen = {}
    for gid, want in targets.items():
        hit_fps = set()
        hits = []
        for idx, (t, text, G) in enumerate(survivors):
            if aux and gid in aux and not aux[gid](G):
                continue
            got = find_designation(G, table_of(idx, G), kappa=want["kappa"], tau=want["tau"])
            if got is not None:
                hits.append((t, text, G, got[0], got[1]))
                hit_fps.add(fingerprint(G))
        if not hits:
            raise RuntimeError("no candidate matches %s" % gid)
        if len(hit_fps) > 1:
            # fingerprints are lossy; only non-isomorphic hits are ambiguous
            reps = {}
            for h in hits:
                reps.setdefault(fingerprint(h[2]), h)
            reps = list(reps.values())
            if all(is_isomorphic_small(reps[0][2], r[2]) for r in reps[1:]):
                print("    note: %d fingerprint classes match %s; all isomorphic"
                      % (len(hit_fps), gid))
            elif gid in tie_break:
                print("    NOTE: non-isomorphic siblings both match %s; "
                      "keeping lex-least tails" % gid)
                for r in reps:
                    print("      tails %s: %s" % (r[0], sibling_diag(r[2])))
            else:
                raise RuntimeError(
                    "non-isomorphic candidates both match %s" % gid)
        hits.sort(key=lambda h: h[0])
        chosen[gid] = hits[0]
        print("    %-9s <- tails %s" % (gid, chosen[gid][0]))
    return chosen


# ---------------------------------------------------------------------------
# hand-written entries


HAND_PC = {
    "4.2": """group g4_2
gens 2
orders 2 2
end
""",
    "8.4": """group g8_4
gens 3
orders 2 2 2
pow 1 = g3
pow 2 = g3
conj 2 1 = g2 g3
end
""",
    "9.2": """group g9_2
gens 2
orders 3 3
end
""",
    "25.2": """group g25_2
gens 2
orders 5 5
end
""",
    "27.2": """group g27_2
gens 3
orders 3 3 3
pow 1 = g3
end
""",
    "27.3": """group g27_3
gens 3
orders 3 3 3
conj 2 1 = g2 g3
end
""",
    "27.4": """group g27_4
gens 3
orders 3 3 3
pow 1 = g3
conj 2 1 = g2 g3
end
""",
    "125.3": """group g125_3
gens 3
orders 5 5 5
conj 2 1 = g2 g3
end
""",
    "6.1": """group g6_1
gens 2
orders 2 3
conj 2 1 = g2^2
end
""",
    # chain S4 > A4 > V4 > C2: a=(12), b=(123), c=(12)(34), d=(13)(24)
    "24.12": """group g24_12
gens 4
orders 2 3 2 2
conj 2 1 = g2^2
conj 3 2 = g4
conj 4 1 = g3 g4
conj 4 2 = g3 g4
end
""",
    # modular group of order 81: x of order 27, x^y = x^10
    "81.6": """group g81_6
gens 4
orders 3 3 3 3
pow 2 = g3
pow 3 = g4
conj 2 1 = g2 g4
end
""",
    # Sylow 2-subgroup of S8 = C2 wr C2 wr C2: t | u1 u2 | b11 b12 b21 b22
    "128.s8s2": """group g128_s8s2
gens 7
orders 2 2 2 2 2 2 2
conj 2 1 = g3
conj 3 1 = g2
conj 4 1 = g6
conj 6 1 = g4
conj 5 1 = g7
conj 7 1 = g5
conj 4 2 = g5
conj 5 2 = g4
conj 6 3 = g7
conj 7 3 = g6
end
""",
}


def perm_table_group(perms, name):
    """Multiplication table group from a generating set of permutations."""
    base = tuple(range(len(perms[0])))
    elems = {base: 0}
    order_list = [base]
    frontier = [base]
    gens_t = [tuple(p) for p in perms]
    while frontier:
        cur = frontier.pop()
        for g in gens_t:
            nxt = tuple(cur[g[i]] for i in range(len(g)))
            if nxt not in elems:
                elems[nxt] = len(order_list)
                order_list.append(nxt)
                frontier.append(nxt)
    n = len(order_list)
    table = np.zeros((n, n), dtype=np.int64)
    for a, pa in enumerate(order_list):
        for b, pb in enumerate(order_list):
            prod = tuple(pa[pb[i]] for i in range(len(pa)))
            table[a, b] = elems[prod]
    gen_ids = [elems[tuple(p)] for p in perms]
    return TableGroup(table.tolist(), gens=gen_ids, name=name)


def perm_of_cycles(npts, cycles):
    p = list(range(npts))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            p[a] = b
    # p maps position i to p[i]; we want the function form i -> image
    q = [0] * npts
    for i, v in enumerate(p):
        q[i] = v
    return q


def validate_hand_models():
    """Cross-check the hand pc presentations against permutation models."""
    s4_gens = [perm_of_cycles(4, [(0, 1)]), perm_of_cycles(4, [(0, 1, 2, 3)])]
    S4_perm = perm_table_group(s4_gens, "s4perm")
    G = PcGroup(parse_one(HAND_PC["24.12"]))
    assert S4_perm.order == 24 and G.order == 24
    assert is_isomorphic_small(G, S4_perm), "S4 pc presentation mismatch"

    tn = perm_of_cycles(8, [(0, 4), (1, 5), (2, 6), (3, 7)])
    u1 = perm_of_cycles(8, [(0, 2), (1, 3)])
    u2 = perm_of_cycles(8, [(4, 6), (5, 7)])
    b1 = perm_of_cycles(8, [(0, 1)])
    b2 = perm_of_cycles(8, [(2, 3)])
    b3 = perm_of_cycles(8, [(4, 5)])
    b4 = perm_of_cycles(8, [(6, 7)])
    W = perm_table_group([tn, u1, u2, b1, b2, b3, b4], "syl2s8perm")
    H = PcGroup(parse_one(HAND_PC["128.s8s2"]))
    assert W.order == 128 and H.order == 128
    dv = series(H, SeriesKind("derived"))
    assert tuple(x.order for x in dv) == (128, 16, 2, 1), "derived length 3 expected"
    assert is_isomorphic_small(H, W), "Syl2(S8) pc presentation mismatch"
    print("    hand models validated (S4, Syl2(S8))")


# ---------------------------------------------------------------------------
# emission


def entry_record(gid, text, G, x, y, fixtures, aliases=(), name_note=""):
    pres = parse_one(text)
    return {
        "id": gid,
        "order": G.order,
        "file": "catalog/%s.pc" % text.splitlines()[0].split()[1],
        "aliases": list(aliases),
        "x": list(G.vec(x)) if x is not None else None,
        "y": list(G.vec(y)) if y is not None else None,
        "note": name_note,
        "fixtures": fixtures,
        "_text": text,
    }


SCAN_CACHE = Path("/tmp/apat_scan_chosen.json")


def serialize_chosen(chosen):
    return {
        gid: {
            "tails": [int(v) for v in t],
            "text": text,
            "x": int(x),
            "y": int(y),
        }
        for gid, (t, text, G, x, y) in chosen.items()
    }


def stage_cache(name, fn):
    """Serialized per-stage results cached under /tmp between runs."""
    path = Path("/tmp/apat_scan_stage_%s.json" % name)
    if path.exists():
        print("    (stage cache hit: %s)" % path)
        return json.loads(path.read_text())
    t = time.monotonic()
    out = serialize_chosen(fn())
    print("    %.1f s" % (time.monotonic() - t))
    path.write_text(json.dumps(out, indent=1))
    return out


def compute_chosen():
    """Run every scan stage; returns {gid: record} for the derived groups."""
    merged = {}

    print("[1/6] hand-model validation")
    validate_hand_models()

    print("[2/6] order-243 stem scan (class 3, coclass 2)")
    s243 = stage_cache("243", lambda: match_targets(scan_stem243(), TARGETS_243))
    merged.update(s243)

    print("[3/6] order-81 scans (maximal class + class 2)")
    merged.update(stage_cache("81", lambda: match_targets(
        scan_maxclass_p4(3) + scan_class2_81(),
        {"81.7": TARGET_81_7}, aux=AUX_81)))

    print("[4/6] order-625 stem scan (maximal class)")
    s625 = stage_cache("625", lambda: match_targets(
        scan_maxclass_p4(5), TARGETS_625))
    merged.update(s625)

    print("[5/6] order-729 lifts")
    # the recorded parent is part of each target's identity, so match
    # each id only among the lifts of its own parent
    aux729 = {
        # cyclic centre, class 4, and the bottom layer growing to (9,3,3)
        # are all recorded for 729.45; a non-isomorphic sibling shares every
        # one of those invariants, so the survivor is picked by lex-least
        # tails (deterministic) and the ambiguity is logged
        "729.45": lambda G: len(centre_type(G)) == 1
        and nilpotency_class(G) == 4 and derived_type(G) == (9, 3, 3),
        "729.54": lambda G: nilpotency_class(G) == 4,
    }
    s729 = stage_cache("729_45", lambda: match_targets(
        scan_lift(parent_from_text(s243["243.4"]["text"]), 1),
        {"729.45": TARGETS_729["729.45"]}, aux=aux729,
        tie_break={"729.45"}))
    s729.update(stage_cache("729_54", lambda: match_targets(
        scan_lift(parent_from_text(s243["243.8"]["text"]), 1),
        {"729.54": TARGETS_729["729.54"]}, aux=aux729)))
    merged.update(s729)

    print("[6/6] order-2187 and order-3125 lifts")
    aux77 = {"2187.77": lambda G: centre_type(G) == (3, 3)
             and nilpotency_class(G) == 4}
    merged.update(stage_cache("2187_77", lambda: match_targets(
        scan_lift(parent_from_text(s243["243.3"]["text"]), 2),
        {"2187.77": TARGET_2187_77}, aux=aux77)))
    aux304 = {"2187.304": lambda G: nilpotency_class(G) == 5}
    merged.update(stage_cache("2187_304", lambda: match_targets(
        scan_lift(parent_from_text(s729["729.54"]["text"]), 1),
        {"2187.304": TARGET_2187_304}, aux=aux304)))
    aux33 = {"3125.33": lambda G: nilpotency_class(G) == 4}
    merged.update(stage_cache("3125_33", lambda: match_targets(
        scan_lift(parent_from_text(s625["625.7"]["text"]), 1),
        {"3125.33": TARGET_3125_33}, aux=aux33)))

    return merged


def load_chosen():
    if SCAN_CACHE.exists():
        print("using cached scan results from %s" % SCAN_CACHE)
        return json.loads(SCAN_CACHE.read_text())
    merged = compute_chosen()
    SCAN_CACHE.write_text(json.dumps(merged, indent=1))
    return merged


def run_all():
    t0 = time.monotonic()
    CATALOG_DIR.mkdir(parents=True, exist_ok=True)
    merged = load_chosen()
    print("[emit] writing catalog files")
    emit(merged)
    print("total %.1f s" % (time.monotonic() - t0))


# forest: id -> (parent id or None, parent kind).  Roots carry None.
FOREST_EDGES = {
    "4.2": (None, None),
    "6.1": (None, None),
    "9.2": (None, None),
    "25.2": (None, None),
    "27.2": (None, None),
    "128.s8s2": (None, None),
    "8.4": ("4.2", "lower-central"),
    "24.12": ("6.1", "derived"),
    "27.3": ("9.2", "lower-central"),
    "27.4": ("9.2", "lower-central"),
    "81.6": ("27.2", "lower-central"),
    "81.7": ("27.3", "lower-central"),
    "125.3": ("25.2", "lower-central"),
    "243.3": ("27.3", "lower-central"),
    "243.4": ("27.3", "lower-central"),
    "243.6": ("27.3", "lower-central"),
    "243.8": ("27.3", "lower-central"),
    "243.9": ("27.3", "lower-central"),
    "625.7": ("125.3", "lower-central"),
    "625.8": ("125.3", "lower-central"),
    "729.45": ("243.4", "lower-central"),
    "729.54": ("243.8", "lower-central"),
    "2187.77": ("243.3", "lower-central"),
    "2187.304": ("729.54", "lower-central"),
    "3125.33": ("625.7", "lower-central"),
}

# printed-value registry for the hand-presented entries (scan entries carry
# their printed values in the TARGETS_* tables)
HAND_PRINTED = {
    "8.4": dict(kappa=(1, 2, 3), tau=T((4,), (4,), (4,))),
    "27.3": dict(kappa=(0, 0, 0, 0), tau=T((3, 3), (3, 3), (3, 3), (3, 3))),
    "27.4": dict(kappa=(1, 1, 1, 1), tau=None),
    "125.3": dict(kappa=(0,) * 6, tau=None),
}

# which fixture values reproduce a printed display (everything else is
# recomputed and frozen by this tool)
PRINTED_KAPPA = {
    "8.4", "27.3", "27.4", "81.7", "125.3",
    "243.3", "243.4", "243.6", "243.8", "243.9",
    "625.7", "625.8", "729.45", "729.54",
    "2187.77", "2187.304", "3125.33",
}
PRINTED_TAU = {
    "8.4", "27.3", "243.3", "243.4", "243.9",
    "625.7", "729.45", "729.54", "2187.77", "2187.304", "3125.33",
}
PRINTED_COUNTER0 = {"27.4", "243.6", "243.8", "243.3", "81.7", "27.3"}
PRINTED_CLASSIFICATION = {
    "8.4": "total-polarization",
    "625.8": "unipolarization",
    "729.45": "total-stabilization",
    "2187.77": "bipolarization",
    "2187.304": "unipolarization",
    "3125.33": "total-stabilization",
}
PRINTED_PARENT = {
    "8.4", "24.12", "625.8", "729.45", "2187.77", "2187.304", "3125.33",
}
PRINTED_POLARIZATION = {"2187.77"}  # Pol={1,2} Stb={3,4} printed verbatim

TAU_DISPLAY_NOTE = (
    "tau: the printed display in the example source appears side-swapped "
    "with the tree parent's; the recorded value is recomputed from the "
    "presentation and is authoritative")

ENTRY_META = {
    "4.2": dict(aliases=["V4"], note="Klein four-group (2,2)"),
    "6.1": dict(aliases=["S3"], note="symmetric group on three letters"),
    "8.4": dict(aliases=["Q8"], note="quaternion group"),
    "9.2": dict(aliases=[], note="elementary abelian (3,3)"),
    "24.12": dict(aliases=["S4"], note="symmetric group on four letters"),
    "25.2": dict(aliases=[], note="elementary abelian (5,5)"),
    "27.2": dict(aliases=[], note="abelian C9 x C3"),
    "27.3": dict(aliases=[], note="extraspecial of order 27, exponent 3"),
    "27.4": dict(aliases=[], note="extraspecial of order 27, exponent 9"),
    "81.6": dict(
        aliases=["M81"], note="modular group of order 81 (C27 : C3)",
        notes=["the small-group number for this presentation is recorded "
               "with moderate confidence; no recorded fixture depends on it"]),
    "81.7": dict(aliases=["C3wrC3"],
                 note="wreath product C3 wr C3 (Sylow 3-subgroup of S9)"),
    "125.3": dict(
        aliases=[], note="extraspecial of order 125, exponent 5",
        flags=["tau-print-disagreement"], notes=[TAU_DISPLAY_NOTE]),
    "128.s8s2": dict(
        aliases=["Syl2S8"],
        note="Sylow 2-subgroup of S8 = C2 wr C2 wr C2 (derived length 3)",
        notes=["catalogued under a structural alias; no small-group number "
               "is claimed for this presentation"]),
    "243.3": dict(aliases=[], note="class-3 coclass-2 stem group"),
    "243.4": dict(aliases=[], note="class-3 coclass-2 stem group"),
    "243.6": dict(aliases=[], note="class-3 coclass-2 stem group"),
    "243.8": dict(aliases=[], note="class-3 coclass-2 stem group"),
    "243.9": dict(aliases=[], note="class-3 coclass-2 stem group"),
    "625.7": dict(aliases=[], note="maximal-class group of order 5^4"),
    "625.8": dict(
        aliases=[], note="maximal-class group of order 5^4",
        flags=["tau-print-disagreement"], notes=[TAU_DISPLAY_NOTE]),
    "729.45": dict(aliases=[], note="class-4 coclass-2 descendant"),
    "729.54": dict(aliases=[], note="class-4 coclass-2 descendant"),
    "2187.77": dict(aliases=[], note="class-4 coclass-3 descendant"),
    "2187.304": dict(aliases=[], note="class-5 coclass-2 descendant"),
    "3125.33": dict(aliases=[], note="maximal-class group of order 5^5"),
}

ID_ASSIGNMENT_NOTE = (
    "identifier assigned from the recorded invariants (kernel digits, "
    "layer types, parent isomorphism, classification); siblings sharing "
    "every recorded invariant cannot be told apart by this catalog")


def canonical_name(gid):
    return "g" + gid.replace(".", "_")


def rename_pres(text, name):
    pres = parse_one(text)
    pows = {i: vec_of_word(pres, w) for i, w in pres.power_rels.items()}
    conjs = {k: vec_of_word(pres, w) for k, w in pres.conj_rels.items()}
    return pres_text(name, pres.rel_orders, pows, conjs)


def fixture(value, printed):
    return {"value": value,
            "provenance": "paper-example" if printed else "oracle-derived"}


def sort_key(gid):
    head, _, tail = gid.partition(".")
    return (int(head), int(tail) if tail.isdigit() else 10 ** 9, gid)


def pattern_fixtures(gid, G, x, y, printed):
    """Fixture block from the package's own pattern path, cross-checked
    against the printed values wherever those exist."""
    from apat.pattern import restricted_pattern

    ap = restricted_pattern(G, x=x, y=y)
    digits = ap.tkt[1].digits
    taus = [list(t.invariants) for t in ap.ttt[1]]
    want_kappa = printed.get("kappa")
    if want_kappa is not None and tuple(want_kappa) != digits:
        raise RuntimeError("%s: printed kappa %r != computed %r"
                           % (gid, want_kappa, digits))
    want_tau = printed.get("tau")
    if want_tau is not None and [list(t) for t in want_tau] != taus:
        raise RuntimeError("%s: printed tau %r != computed %r"
                           % (gid, want_tau, taus))
    fx = {
        "kappa": fixture(list(digits), gid in PRINTED_KAPPA),
        "tau": fixture(taus, gid in PRINTED_TAU),
        "kappa_canonical": fixture(
            list(canonical_tkt(ap.tkt[1]).digits), False),
        "counter0": fixture(
            total_kernel_counter(ap.tkt[1]), gid in PRINTED_COUNTER0),
    }
    if 2 in ap.tkt:
        fx["kappa2"] = fixture(list(ap.tkt[2].digits), False)
        fx["tau2"] = fixture([list(t.invariants) for t in ap.ttt[2]], False)
    return fx


def classification_fixtures(gid, G, x, y):
    from apat.tree import classify_polarization

    cls = classify_polarization(G, kind="lower-central", x=x, y=y)
    want = PRINTED_CLASSIFICATION.get(gid)
    if want is not None and want != cls.label:
        raise RuntimeError("%s: printed classification %r != computed %r"
                           % (gid, want, cls.label))
    return {
        "classification": fixture(cls.label, want is not None),
        "polarization": fixture(
            {"pol": list(cls.partition.polarized),
             "stb": list(cls.partition.stable)},
            gid in PRINTED_POLARIZATION),
    }


def emit(chosen):
    records = {}

    for gid, text in HAND_PC.items():
        G = build_checked(text)
        if G is None:
            raise RuntimeError("hand presentation %s is inconsistent" % gid)
        records[gid] = {"text": text, "G": G, "x": None, "y": None}

    for gid, rec in chosen.items():
        text = rename_pres(rec["text"], canonical_name(gid))
        G = build_checked(text)
        if G is None:
            raise RuntimeError("scan presentation %s is inconsistent" % gid)
        records[gid] = {"text": text, "G": G, "x": rec["x"], "y": rec["y"]}

    # designated pairs for the hand entries with a digit-encodable shape
    for gid in ("4.2", "8.4", "9.2", "25.2", "27.2", "27.3", "27.4",
                "81.6", "125.3"):
        rec = records[gid]
        G = rec["G"]
        table, _ = transfer_table(G)
        printed = HAND_PRINTED.get(gid, {})
        got = find_designation(G, table, kappa=printed.get("kappa"),
                               tau=printed.get("tau"))
        if got is None:
            raise RuntimeError("no designated pair reproduces %s" % gid)
        rec["x"], rec["y"] = got[0], got[1]

    # fixtures
    scan_printed = {}
    for tbl in (TARGETS_243, TARGETS_625, TARGETS_729):
        for gid, want in tbl.items():
            scan_printed[gid] = want
    scan_printed.update({
        "81.7": TARGET_81_7,
        "2187.77": TARGET_2187_77,
        "2187.304": TARGET_2187_304,
        "3125.33": TARGET_3125_33,
    })

    rows = []
    for gid in sorted(records, key=sort_key):
        rec = records[gid]
        G, x, y = rec["G"], rec["x"], rec["y"]
        meta = ENTRY_META[gid]
        fixtures = {}
        if x is not None:
            printed = dict(scan_printed.get(gid, HAND_PRINTED.get(gid, {})))
            # the recorded tau of 625.8/125.3 is the recomputed one; the
            # printed display is only flagged, never stored
            fixtures.update(pattern_fixtures(gid, G, x, y, printed))
        try:
            cls_order = nilpotency_class(G)
        except ValueError:
            cls_order = None
        if cls_order is not None and G.order > 1:
            fixtures["class"] = fixture(cls_order, False)
            e = 0
            n = G.order
            p = G.pres.rel_orders[0]
            while n % p == 0 and n > 1:
                n //= p
                e += 1
            if n == 1:
                fixtures["coclass"] = fixture(e - cls_order, False)
        pid, kind = FOREST_EDGES[gid]
        if pid is not None:
            fixtures["parent"] = fixture(pid, gid in PRINTED_PARENT)
            fixtures["parent_kind"] = fixture(kind, gid in PRINTED_PARENT)
        if x is not None and pid is not None and kind == "lower-central":
            try:
                fixtures.update(classification_fixtures(gid, G, x, y))
            except TreeError:
                pass  # only the (p,p)-abelianization edges are classified
        row = entry_record(
            gid, rec["text"], G, x, y, fixtures,
            aliases=meta.get("aliases", ()), name_note=meta.get("note", ""))
        row["flags"] = list(meta.get("flags", ()))
        row["notes"] = list(meta.get("notes", ()))
        if gid in ("2187.77", "2187.304", "3125.33"):
            row["notes"].append(ID_ASSIGNMENT_NOTE)
        rows.append(row)
        print("    %-9s fixtures: %s" % (gid, " ".join(sorted(fixtures))))

    # parent edges must reproduce under the engine before anything is written
    by_id = {row["id"]: row for row in rows}
    from apat.tree import parent as tree_parent

    for row in rows:
        pid, kind = FOREST_EDGES[row["id"]]
        if pid is None:
            continue
        edge = tree_parent(records[row["id"]]["G"], kind)
        P = edge.group
        want = records[pid]["G"]
        if P.order != want.order or not is_isomorphic_small(P, want):
            raise RuntimeError("%s: %s parent is not %s"
                               % (row["id"], kind, pid))
        print("    edge %-9s -> %-9s (%s) verified" % (row["id"], pid, kind))

    # write everything
    for row in rows:
        (DATA / row["file"]).write_text(row.pop("_text"), encoding="utf-8")
    payload = {"schema": "apat-catalog/1", "entries": rows}
    (DATA / "catalog.json").write_text(
        json.dumps(payload, indent=1), encoding="utf-8")
    forest = [
        {
            "id": row["id"],
            "presentation-ref": row["file"],
            "parent-id": FOREST_EDGES[row["id"]][0],
            "parent-kind": FOREST_EDGES[row["id"]][1],
        }
        for row in rows
    ]
    (DATA / "forest.json").write_text(
        json.dumps(forest, indent=1), encoding="utf-8")
    print("    wrote %d entries, %d pc files, forest" % (len(rows), len(rows)))

    # reload through the package loader and re-verify the frozen data
    import apat.catalog as cat

    cat._CACHE.clear()
    entries = cat.catalog_load()
    assert len(entries) == len(rows)
    from apat.pattern import restricted_pattern

    for e in entries:
        G = e.group()
        x, y = e.designated()
        if x is None:
            continue
        ap = restricted_pattern(G, x=x, y=y)
        if list(ap.tkt[1].digits) != e.fixture("kappa"):
            raise RuntimeError("%s: reloaded kappa mismatch" % e.id)
        if [list(t.invariants) for t in ap.ttt[1]] != e.fixture("tau"):
            raise RuntimeError("%s: reloaded tau mismatch" % e.id)
    from apat.tree import load_forest

    nodes, roots = load_forest(cat.forest_path())
    assert len(nodes) == len(rows) and roots
    for node in nodes.values():
        cat.resolve_ref(node.presentation_ref)
    print("    reload verification passed (%d entries)" % len(entries))


def diag81():
    """Inspect every order-81 scan survivor: class, series, taus, digits."""
    for label, surv in (("maxclass", scan_maxclass_p4(3)), ("class2", scan_class2_81())):
        for t, text, G in surv:
            lc = tuple(s.order for s in series(G, SeriesKind("lower-central")))
            zt = abelian_type_of_subquotient(G, center(G), trivial_subgroup(G))
            table, _ = transfer_table(G)
            got = find_designation(G, table, kappa=TARGET_81_7["kappa"], tau=None)
            layers = subgroup_layers(G)
            taus = sorted(
                tuple(abelian_type_of_subquotient(G, U, derived_of(U)).invariants)
                for U in layers.layer(1)
            )
            print(
                "%-8s t=%-18s cl=%d lc=%-18s Z=%s tau=%s hit=%s"
                % (label, t, nilpotency_class(G), lc, zt.invariants, taus,
                   got is not None and got[2])
            )
    surv = scan_maxclass_p4(3)
    classes = []
    for t, text, G in surv:
        for cls in classes:
            if is_isomorphic_small(G, cls[0][2]):
                cls.append((t, text, G))
                break
        else:
            classes.append([(t, text, G)])
    W = wreath81()
    for i, cls in enumerate(classes):
        print("iso class %d: %s wreath=%s"
              % (i, [c[0] for c in cls], is_isomorphic_small(cls[0][2], W)))


STAGES = {
    "validate": lambda: validate_hand_models(),
    "stem243": lambda: match_targets(scan_stem243() + scan_stem243_cyclic(), TARGETS_243),
    "scan81": lambda: match_targets(
        scan_maxclass_p4(3) + scan_class2_81(), {"81.7": TARGET_81_7}, aux=AUX_81
    ),
    "diag81": diag81,
    "stem625": lambda: match_targets(scan_maxclass_p4(5), TARGETS_625),
    "scan": load_chosen,
    "all": run_all,
}


if __name__ == "__main__":
    stage = sys.argv[1] if len(sys.argv) > 1 else "all"
    STAGES[stage]()
