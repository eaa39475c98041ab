"""Homomorphisms between finite groups and the induced-map machinery.

A GroupHomomorphism stores generator images plus the eagerly cached full
element map (orders here are well below the 4096 eager-cache bound), so
kernel/image identities and the induced-homomorphism theorems become exact
set computations:

* induced maps on quotients exist iff phi(U) <= V, with
  ker(phi~) = phi^{-1}(V)/U;
* phi factors through G/U iff U <= ker(phi), with ker(phi~) = ker(phi)/U;
* factorization through the characteristic series G^{(n)}, gamma_n(G),
  P_n(G) is equivalent to dl(phi(G)) <= n, cl(phi(G)) <= n-1,
  cl_p(phi(G)) <= n respectively;
* an automorphism sigma of G induces one on G/ker(phi) iff it fixes the
  kernel setwise (kernel invariance property), and generator-inverting
  automorphisms (sigma(x) = x^{-1} mod G') induce generator-inverting ones.
"""

from __future__ import annotations

import numpy as np

from . import core
from .core import Subgroup, SeriesKind, quotient, series, subgroup_closure

__all__ = [
    "GroupHomomorphism",
    "HomomorphismError",
    "CriterionViolated",
    "make_hom",
    "image_of",
    "preimage_of",
    "induced_on_quotients",
    "factor_through_quotient",
    "series_factor_criterion",
    "induced_automorphism",
    "is_generator_inverting",
    "SeriesFactorVerdict",
]

EAGER_MAP_BOUND = 4096


class HomomorphismError(ValueError):
    """Generator images do not define a homomorphism; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CriterionViolated(ValueError):
    """An induced-map criterion fails; carries the witnessing element."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class GroupHomomorphism:
    """A verified homomorphism with eagerly cached element map."""

    def __init__(self, domain, codomain, images, full_map=None, check=True):
        self.domain = domain
        self.codomain = codomain
        self.images = [int(b) for b in images]
        gens = domain.generators()
        if len(self.images) != len(gens):
            raise ValueError("need one image per domain generator")
        if full_map is None:
            if check and getattr(domain, "pres", None) is not None:
                # a precise relation witness beats a bare extension conflict
                _check_pc_relations(domain, codomain, self.images)
            full_map = _extend_map(domain, codomain, gens, self.images)
            if full_map is None:
                raise HomomorphismError(
                    "generator images are inconsistent (no extension exists)"
                )
            self.full_map = np.asarray(full_map, dtype=np.int64)
            self._kernel = None
            self._image = None
            if check and getattr(domain, "pres", None) is None:
                ok, bad = self.verify_multiplicative()
                if not ok:
                    raise HomomorphismError(
                        "map is not multiplicative", witness=bad
                    )
            return
        self.full_map = np.asarray(full_map, dtype=np.int64)
        self._kernel = None
        self._image = None
        if check:
            _check_relations(self)

    # -- basic queries -----------------------------------------------------

    def __call__(self, a):
        return int(self.full_map[a])

    @property
    def kernel(self):
        if self._kernel is None:
            ids = np.nonzero(self.full_map == 0)[0]
            self._kernel = Subgroup(self.domain, ids.tolist())
        return self._kernel

    @property
    def image(self):
        if self._image is None:
            vals = sorted(set(self.full_map.tolist()))
            self._image = Subgroup(
                self.codomain, vals, gens=[b for b in self.images if b] or [0]
            )
        return self._image

    def is_surjective(self):
        return self.image.order == self.codomain.order

    def is_injective(self):
        return self.kernel.order == 1

    def is_automorphism(self):
        return (
            self.domain is self.codomain
            and self.is_injective()
            and self.is_surjective()
        )

    def compose(self, other):
        """self o other (apply other first)."""
        if other.codomain is not self.domain:
            raise ValueError("composition domain mismatch")
        return GroupHomomorphism(
            other.domain,
            self.codomain,
            [int(self.full_map[b]) for b in other.images],
            full_map=self.full_map[other.full_map],
            check=False,
        )

    def verify_multiplicative(self, rng=None, samples=10**5):
        """phi(xy) = phi(x)phi(y), exhaustively when |G| <= 4096."""
        G, H, m = self.domain, self.codomain, self.full_map
        if G.order <= EAGER_MAP_BOUND:
            for b in G.elements():
                col = G.rmult_col(b)
                hb = int(m[b])
                hcol = H.rmult_col(hb)
                if not (m[col] == hcol[m]).all():
                    bad = int(np.nonzero(m[col] != hcol[m])[0][0])
                    return False, (bad, b)
            return True, None
        import random

        rng = rng or random.Random(0)
        for _ in range(samples):
            a = rng.randrange(G.order)
            b = rng.randrange(G.order)
            if m[G.mult(a, b)] != H.mult(int(m[a]), int(m[b])):
                return False, (a, b)
        return True, None

    def __repr__(self):
        return "GroupHomomorphism(%s -> %s)" % (
            getattr(self.domain, "name", "G"),
            getattr(self.codomain, "name", "H"),
        )


def _extend_map(G, H, gens, images):
    """Extend generator images multiplicatively; None on conflict."""
    m = np.full(G.order, -1, dtype=np.int64)
    m[0] = 0
    frontier = [0]
    while frontier:
        x = frontier.pop()
        mx = int(m[x])
        for g, hg in zip(gens, images):
            xg = G.mult(x, g)
            t = H.mult(mx, hg)
            if m[xg] == -1:
                m[xg] = t
                frontier.append(xg)
            elif m[xg] != t:
                return None
    if (m == -1).any():
        raise ValueError("generator set does not generate the domain")
    return m


def _check_relations(phi):
    """Verify phi on the domain's defining pc relations when available."""
    pres = getattr(phi.domain, "pres", None)
    if pres is None:
        ok, bad = phi.verify_multiplicative()
        if not ok:
            raise HomomorphismError("map is not multiplicative", witness=bad)
        return
    _check_pc_relations(phi.domain, phi.codomain, phi.images)


def _check_pc_relations(G, H, images):
    """Verify generator images satisfy G's pc relations (witness on failure)."""
    pres = G.pres
    img = list(images)

    def eval_word(word):
        out = 0
        for g, e in word:
            out = H.mult(out, H.power(img[g - 1], e))
        return out

    for i in range(pres.ngens):
        lhs = H.power(img[i], pres.rel_orders[i])
        rhs = eval_word(pres.power_rels.get(i + 1, ()))
        if lhs != rhs:
            raise HomomorphismError(
                "power relation for g%d not preserved" % (i + 1),
                witness=("pow", i + 1),
            )
    for j in range(2, pres.ngens + 1):
        for i in range(1, j):
            w = pres.conj_rels.get((j, i), ((j, 1),))
            a, b = img[j - 1], img[i - 1]
            lhs = H.mult(H.mult(H.inv(b), a), b)
            rhs = eval_word(w)
            if lhs != rhs:
                raise HomomorphismError(
                    "conjugation relation g%d^g%d not preserved" % (j, i),
                    witness=("conj", j, i),
                )


def make_hom(domain, codomain, images):
    """Build and verify a homomorphism from generator images."""
    return GroupHomomorphism(domain, codomain, images, check=True)


def identity_hom(G):
    return GroupHomomorphism(
        G, G, G.generators(), full_map=np.arange(G.order), check=False
    )


def image_of(phi, U):
    """phi(U) as a Subgroup of the codomain."""
    vals = sorted({int(phi.full_map[a]) for a in U.elems})
    return Subgroup(
        phi.codomain, vals, gens=[int(phi.full_map[g]) for g in U.gens] or [0]
    )


def preimage_of(phi, V):
    """phi^{-1}(V) as a Subgroup of the domain."""
    mask = np.isin(phi.full_map, np.fromiter(V.elems, dtype=np.int64))
    ids = np.nonzero(mask)[0]
    return Subgroup(phi.domain, ids.tolist())


def induced_on_quotients(phi, U, V, check=True):
    """phi~ : G/U -> H/V when phi(U) <= V (with the projections).

    Returns (phi~, piU, piV).  Raises CriterionViolated with a witness
    u in U, phi(u) not in V, when the existence criterion fails.
    """
    for u in U.elems:
        if int(phi.full_map[u]) not in V.elems:
            raise CriterionViolated(
                "phi(U) is not contained in V", witness=u
            )
    QU, piU = quotient(phi.domain, U)
    QV, piV = quotient(phi.codomain, V)
    # well-defined by the criterion; build by picking preimages
    m = np.full(QU.order, -1, dtype=np.int64)
    for x in phi.domain.elements():
        m[int(piU.full_map[x])] = int(piV.full_map[int(phi.full_map[x])])
    tilde = GroupHomomorphism(
        QU,
        QV,
        [int(m[g]) for g in QU.generators()],
        full_map=m,
        check=False,
    )
    if check:
        # commutativity phi~ o piU = piV o phi, exhaustively
        lhs = tilde.full_map[piU.full_map]
        rhs = piV.full_map[phi.full_map]
        if not (lhs == rhs).all():
            raise HomomorphismError("induced map does not commute with projections")
    return tilde, piU, piV


def factor_through_quotient(phi, U):
    """phi~ : G/U -> H with phi~ o omega = phi, for U <= ker(phi)."""
    if not U.elems <= phi.kernel.elems:
        bad = next(iter(U.elems - phi.kernel.elems))
        raise CriterionViolated("U is not contained in ker(phi)", witness=bad)
    QU, piU = quotient(phi.domain, U)
    m = np.full(QU.order, -1, dtype=np.int64)
    for x in phi.domain.elements():
        m[int(piU.full_map[x])] = int(phi.full_map[x])
    tilde = GroupHomomorphism(
        QU, phi.codomain, [int(m[g]) for g in QU.generators()], full_map=m, check=False
    )
    return tilde, piU


class SeriesFactorVerdict:
    """Both sides of the series-factorization equivalence, independently."""

    def __init__(self, kind, n, factors, image_bound, term_order):
        self.kind = kind
        self.n = n
        self.factors = factors  # factorization attempt succeeded
        self.image_bound = image_bound  # series-length bound on phi(G)
        self.term_order = term_order

    @property
    def agree(self):
        return self.factors == self.image_bound

    def __bool__(self):
        return self.agree


def series_factor_criterion(phi, kind, n):
    """Corollary-style equivalence, both sides computed independently.

    factorization side: the nth series term of the domain is contained in
    ker(phi) (equivalently phi factors through the quotient by it);
    image side: dl(phi(G)) <= n for derived, cl(phi(G)) <= n-1 for
    lower-central, cl_p(phi(G)) <= n for lower-p-central.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(kind, str):
        kind = SeriesKind(kind)
    chain = series(phi.domain, kind)
    # term index: derived G^{(n)} = chain[n]; gamma_n = chain[n-1]; P_n = chain[n]
    if kind.tag == "lower-central":
        idx = n - 1
    else:
        idx = n
    term = chain[idx] if idx < len(chain) else core.trivial_subgroup(phi.domain)
    factors = term.elems <= phi.kernel.elems

    img = image_of(phi, core.whole_group(phi.domain))
    H, _, _ = core.subgroup_as_group(img, name="im")
    img_chain = series(H, kind)
    length = len(img_chain) - 1
    if img_chain[-1].order > 1:
        length = None  # series stabilized above 1; no finite bound applies
    if kind.tag == "lower-central":
        bound = length is not None and length <= n - 1
    else:
        bound = length is not None and length <= n
    return SeriesFactorVerdict(kind, n, factors, bound, term.order)


def induced_automorphism(phi, sigma):
    """sigma^ on the codomain of an epimorphism phi, requiring KIP.

    sigma must be an automorphism of phi's domain with
    sigma(ker(phi)) = ker(phi); then sigma^ o phi = phi o sigma defines an
    automorphism of the codomain.
    """
    if not phi.is_surjective():
        raise ValueError("induced automorphism needs an epimorphism")
    if not sigma.is_automorphism():
        raise ValueError("sigma is not an automorphism")
    K = phi.kernel
    moved = {int(sigma.full_map[k]) for k in K.elems}
    if moved != K.elems:
        witness = next(iter(K.elems - moved))
        raise CriterionViolated(
            "kernel invariance property fails", witness=witness
        )
    H = phi.codomain
    m = np.full(H.order, -1, dtype=np.int64)
    for x in phi.domain.elements():
        m[int(phi.full_map[x])] = int(phi.full_map[int(sigma.full_map[x])])
    hat = GroupHomomorphism(
        H, H, [int(m[g]) for g in H.generators()], full_map=m, check=False
    )
    return hat


def is_generator_inverting(sigma):
    """sigma(x) = x^{-1} mod G' for every x, tested exhaustively."""
    G = sigma.domain
    if sigma.codomain is not G:
        raise ValueError("generator-inverting test needs an endomorphism")
    Gd = core.derived_subgroup(G)
    for x in G.elements():
        # sigma(x) * x must lie in G'
        if G.mult(int(sigma.full_map[x]), x) not in Gd.elems:
            return False
    return True
