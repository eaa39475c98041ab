"""Transfer target types (TTT), transfer kernel types (TKT), and Artin
patterns of finite p-groups.

For the family of all subgroups G' <= U <= G, grouped into layers by
index, the TTT is the family of abelianizations U/U' and the TKT is the
family of kernels ker(T_{G,U}) of the Artin transfers.  Both together
form the (restricted) Artin pattern of G.

For abelianization G/G' of type (p,p) the p+1 maximal subgroups H_1,
..., H_{p+1} give a digit encoding

    kappa(i) = 0  if ker(T_i) = G,
               j  if ker(T_i) = H_j,

taken up to the renumeration action kappa -> ~pi^{-1} o kappa o pi of
S_{p+1} (with ~pi fixing 0).  For type (p^2,p) the two layers of p+1
subgroups each are encoded against one another: layer-1 kernels have
exponent p mod G', so kappa_1(i) is 0 for the distinguished maximal
subgroup H_{1,p+1} and j for the index-p^2 subgroup H_{2,j}; layer-2
digits use 0 for G and j for the maximal subgroup H_{1,j}.  The
renumeration group is S_p x S_p acting by

    (lambda_1, lambda_2) = (~sigma^{-1} o kappa_1 o ^tau,
                            ~tau^{-1} o kappa_2 o ^sigma)

with the distinguished positions p+1 (and the value 0) held fixed.

A kernel that matches no legal digit case (in particular ker(T) = G',
whose impossibility is an arithmetic theorem, not a group-theoretic
one) is encoded with the sentinel digit -1 (rendered "*") and reported
as a warning instead of being silently mis-encoded.
"""

import itertools
import json
from dataclasses import dataclass, field

from . import abelian
from .core import (
    Subgroup,
    derived_of,
    subgroup_closure,
    subgroup_layers,
    whole_group,
)
from .transfer import artin_transfer


SENTINEL = -1


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class TktDigits:
    """Digit string of one TKT layer.

    digits are over {0, ..., p+1} with -1 as the anomaly sentinel;
    layer is 1 or 2; anomalies lists the 0-based positions carrying the
    sentinel.
    """

    digits: tuple
    layer: int
    p: int
    anomalies: tuple = ()

    def render(self):
        parts = ["*" if d == SENTINEL else str(d) for d in self.digits]
        sep = "," if self.p > 7 else ""
        return sep.join(parts)

    def __iter__(self):
        return iter(self.digits)


def total_kernel_counter(k):
    """#H_0: the number of total transfer kernels (digit 0)."""
    return sum(1 for d in k.digits if d == 0)


# -- digit encodings ----------------------------------------------------


def _match_layer(kernel, subgroups):
    for j, U in enumerate(subgroups, start=1):
        if kernel.elems == U.elems:
            return j
    return None


def _encode_pp(kernel, G, maximals):
    if kernel.order == G.order:
        return 0
    j = _match_layer(kernel, maximals)
    return SENTINEL if j is None else j


def _encode_p2p_layer1(kernel, system):
    p = system.prime
    distinguished = system.layer(1)[p]
    if kernel.elems == distinguished.elems:
        return 0
    j = _match_layer(kernel, system.layer(2))
    return SENTINEL if j is None else j


def _encode_p2p_layer2(kernel, system):
    if kernel.order == system.group.order:
        return 0
    j = _match_layer(kernel, system.layer(1))
    return SENTINEL if j is None else j


# -- pattern object ------------------------------------------------------


@dataclass
class ArtinPattern:
    """TTT and TKT over the layered family G' <= U <= G.

    ttt[k] lists the abelian types of layer k (layer 0 is [G/G'], the
    last layer is [G'/G'']); kernels[k] the raw transfer kernels.  tkt
    maps the encodable layers (1, and 2 for shape (p^2,p)) to
    TktDigits.  warnings collects anomaly reports.
    """

    group: object
    system: object
    ttt: dict
    kernels: dict
    tkt: dict
    warnings: list = field(default_factory=list)

    @property
    def shape(self):
        return self.system.shape

    def layer_count(self):
        return len(self.system.layers)

    def tau(self, k):
        return self.ttt[k]

    def kappa(self, k):
        return self.tkt.get(k)

    def canonical_key(self):
        """Relabeling-invariant key: canonicalized (tau, kappa) data."""
        canon = canonical_pattern(self)
        key = []
        for k in range(canon.layer_count()):
            taus = tuple(t.invariants for t in canon.ttt[k])
            kap = canon.tkt.get(k)
            key.append((taus, kap.digits if kap is not None else None))
        return tuple(key)


def ttt(G, layers="all", x=None, y=None, system=None):
    """Per-layer abelian types of U/U' for the restricted family.

    ``layers`` selects which layers to return: "all", an int, or a list
    of ints.  Layer 0 is the type of G/G'; the last layer is the type
    of G'/G''.
    """
    if system is None:
        system = subgroup_layers(G, x=x, y=y)
    out = {}
    for k, layer in enumerate(system.layers):
        out[k] = [
            abelian.abelian_type_of_subquotient(G, U, derived_of(U))
            for U in layer
        ]
    return _select_layers(out, layers)


def _select_layers(perlayer, sel):
    if sel == "all":
        return perlayer
    if isinstance(sel, int):
        return perlayer[sel]
    return {k: perlayer[k] for k in sel}


def tkt(G, layers="all", x=None, y=None, system=None):
    """Per-layer TKT digits and raw kernels.

    Returns (digits, kernels, warnings): digits maps encodable layer
    numbers to TktDigits; kernels maps every layer to its list of raw
    kernel subgroups.
    """
    if system is None:
        system = subgroup_layers(G, x=x, y=y)
    kernels = {}
    for k, layer in enumerate(system.layers):
        kernels[k] = [artin_transfer(G, U).kernel for U in layer]
    digits, warnings = _encode_layers(system, kernels)
    return _select_layers(digits, layers) if layers != "all" else digits, \
        kernels, warnings


def _encode_layers(system, kernels):
    G = system.group
    Gd = system.derived
    digits = {}
    warnings = []

    def check_anomaly(kernel, code, layer, i):
        if code != SENTINEL:
            return code
        kind = "kernel equals G'" if kernel.elems == Gd.elems else \
            "kernel matches no digit case"
        warnings.append(
            "layer %d position %d: %s (order %d)"
            % (layer, i, kind, kernel.order))
        return SENTINEL

    if system.shape == "(p,p)" or (
        system.shape is None and _looks_pp(system)
    ):
        p = system.prime if system.prime else _layer_prime(system)
        maxs = system.layer(1)
        ds = []
        anom = []
        for i, K in enumerate(kernels[1], start=1):
            c = check_anomaly(K, _encode_pp(K, G, maxs), 1, i)
            ds.append(c)
            if c == SENTINEL:
                anom.append(i - 1)
        digits[1] = TktDigits(tuple(ds), 1, p, tuple(anom))
    elif system.shape == "(p^2,p)":
        p = system.prime
        for layer, encode in ((1, _encode_p2p_layer1),
                              (2, _encode_p2p_layer2)):
            ds = []
            anom = []
            for i, K in enumerate(kernels[layer], start=1):
                c = check_anomaly(K, encode(K, system), layer, i)
                ds.append(c)
                if c == SENTINEL:
                    anom.append(i - 1)
            digits[layer] = TktDigits(tuple(ds), layer, p, tuple(anom))
    return digits, warnings


def _looks_pp(system):
    """Canonical systems of elementary (p,p) shape still get digits."""
    if len(system.layers) != 3:
        return False
    A = _layer_prime(system)
    return A is not None and len(system.layer(1)) == A + 1


def _layer_prime(system):
    n = len(system.layer(1)) - 1
    if n >= 2 and system.indices[1] == n:
        return n
    return None


def restricted_pattern(G, x=None, y=None, system=None):
    """The restricted Artin pattern over all G' <= U <= G."""
    if system is None:
        system = subgroup_layers(G, x=x, y=y)
    taus = ttt(G, system=system)
    digits, kernels, warnings = tkt(G, system=system)
    return ArtinPattern(G, system, taus, kernels, digits, warnings)


@dataclass
class FamilyPattern:
    """Complete Artin pattern over a caller-supplied subgroup family."""

    group: object
    family: list
    ttt: list
    kernels: list


def complete_pattern(G, family):
    """TTT/TKT data over an arbitrary finite-index family of subgroups."""
    for U in family:
        if not isinstance(U, Subgroup) or U.ambient is not G:
            raise PatternError("family member is not a subgroup of G")
    taus = [
        abelian.abelian_type_of_subquotient(G, U, derived_of(U))
        for U in family
    ]
    kerns = [artin_transfer(G, U).kernel for U in family]
    return FamilyPattern(G, list(family), taus, kerns)


# -- renumeration orbits -------------------------------------------------


def _act_pp(digits, pi):
    """lambda = ~pi^{-1} o kappa o pi on 0-based digit tuples.

    pi is a tuple permutation of positions {0..p}; the value relabeling
    ~pi fixes 0 and sends j+1 -> pi(j)+1; sentinels stay put.
    """
    n = len(digits)
    inv = [0] * (n + 1)
    for i, v in enumerate(pi):
        inv[v + 1] = i + 1
    out = []
    for i in range(n):
        d = digits[pi[i]]
        out.append(d if d <= 0 else inv[d])
    return tuple(out)


def canonical_tkt(k, p=None):
    """Lexicographically least orbit element of a (p,p)-layer TKT."""
    if p is None:
        p = k.p
    n = len(k.digits)
    best = None
    for pi in itertools.permutations(range(n)):
        cand = _act_pp(k.digits, pi)
        if best is None or cand < best:
            best = cand
    anom = tuple(i for i, d in enumerate(best) if d == SENTINEL)
    return TktDigits(best, k.layer, p, anom)


def _hat_perms(p):
    """Permutations of {0..p} fixing the distinguished last position."""
    for s in itertools.permutations(range(p)):
        yield tuple(s) + (p,)


def _act_p2p(d1, d2, sigma_hat, tau_hat):
    """(lambda1, lambda2) = (~sigma^{-1} o k1 o ^tau, ~tau^{-1} o k2 o ^sigma)."""
    n = len(d1)
    sinv = [0] * (n + 1)
    tinv = [0] * (n + 1)
    for i, v in enumerate(sigma_hat):
        sinv[v + 1] = i + 1
    for i, v in enumerate(tau_hat):
        tinv[v + 1] = i + 1
    l1 = tuple(
        d1[tau_hat[i]] if d1[tau_hat[i]] <= 0 else sinv[d1[tau_hat[i]]]
        for i in range(n)
    )
    l2 = tuple(
        d2[sigma_hat[i]] if d2[sigma_hat[i]] <= 0 else tinv[d2[sigma_hat[i]]]
        for i in range(n)
    )
    return l1, l2


def canonical_tkt_pair(k1, k2, p=None):
    """Joint canonical form of a (p^2,p) TKT pair under S_p x S_p."""
    if p is None:
        p = k1.p
    best = None
    for sigma in _hat_perms(p):
        for tau in _hat_perms(p):
            cand = _act_p2p(k1.digits, k2.digits, sigma, tau)
            if best is None or cand < best:
                best = cand
    b1, b2 = best
    return (
        TktDigits(b1, 1, p, tuple(i for i, d in enumerate(b1) if d == SENTINEL)),
        TktDigits(b2, 2, p, tuple(i for i, d in enumerate(b2) if d == SENTINEL)),
    )


def canonical_tkt_layer1(k1, p=None):
    """Canonical layer-1 digits of a (p^2,p) TKT, layer 2 ignored.

    Minimizes over the same S_p x S_p action as the joint form but
    compares only the first component, so the distinguished position
    p+1 and the distinguished value stay put.
    """
    if p is None:
        p = k1.p
    best = None
    for sigma in _hat_perms(p):
        for tau in _hat_perms(p):
            cand, _ = _act_p2p(k1.digits, k1.digits, sigma, tau)
            if best is None or cand < best:
                best = cand
    return TktDigits(
        best, 1, p, tuple(i for i, d in enumerate(best) if d == SENTINEL))


def tkt_equivalent(a, b, p=None):
    """Whether two TKT digit strings lie in the same renumeration orbit."""
    return canonical_tkt(a, p).digits == canonical_tkt(b, p).digits


def canonical_pattern(ap):
    """Joint lexicographic minimization of (tau, kappa) over renumerations.

    One permutation (pair) reorders the subgroup positions of the
    encodable layers; tau lists and kappa digits move together so the
    pattern stays aligned.  Layers without renumeration freedom get
    their tau lists sorted.  The result is a new ArtinPattern; the
    input is not modified.
    """
    system = ap.system
    ttt2 = {k: list(v) for k, v in ap.ttt.items()}
    kern2 = {k: list(v) for k, v in ap.kernels.items()}
    tkt2 = dict(ap.tkt)

    if 1 in ap.tkt and ap.system.shape != "(p^2,p)":
        taus = ap.ttt[1]
        digs = ap.tkt[1]
        n = len(digs.digits)
        best = None
        best_pi = None
        for pi in itertools.permutations(range(n)):
            d = _act_pp(digs.digits, pi)
            t = tuple(taus[pi[i]].invariants for i in range(n))
            key = (t, d)
            if best is None or key < best:
                best, best_pi = key, pi
        pi = best_pi
        ttt2[1] = [taus[pi[i]] for i in range(n)]
        kern2[1] = [ap.kernels[1][pi[i]] for i in range(n)]
        tkt2[1] = TktDigits(
            best[1], 1, digs.p,
            tuple(i for i, d in enumerate(best[1]) if d == SENTINEL))
    elif ap.system.shape == "(p^2,p)":
        p = system.prime
        t1, t2 = ap.ttt[1], ap.ttt[2]
        d1, d2 = ap.tkt[1], ap.tkt[2]
        best = None
        best_perms = None
        for sigma in _hat_perms(p):
            for tau in _hat_perms(p):
                l1, l2 = _act_p2p(d1.digits, d2.digits, sigma, tau)
                tt1 = tuple(t1[tau[i]].invariants for i in range(p + 1))
                tt2 = tuple(t2[sigma[i]].invariants for i in range(p + 1))
                key = (tt1, l1, tt2, l2)
                if best is None or key < best:
                    best, best_perms = key, (sigma, tau)
        sigma, tau = best_perms
        ttt2[1] = [t1[tau[i]] for i in range(p + 1)]
        ttt2[2] = [t2[sigma[i]] for i in range(p + 1)]
        kern2[1] = [ap.kernels[1][tau[i]] for i in range(p + 1)]
        kern2[2] = [ap.kernels[2][sigma[i]] for i in range(p + 1)]
        tkt2[1] = TktDigits(
            best[1], 1, p,
            tuple(i for i, d in enumerate(best[1]) if d == SENTINEL))
        tkt2[2] = TktDigits(
            best[3], 2, p,
            tuple(i for i, d in enumerate(best[3]) if d == SENTINEL))

    for k in ttt2:
        if k not in (1, 2) or k not in ap.tkt:
            ttt2[k] = sorted(ttt2[k])

    return ArtinPattern(ap.group, system, ttt2, kern2, tkt2,
                        list(ap.warnings))


# -- layer connections and consistency checks ---------------------------


def layer_connection_check(ap):
    """Kernel containments between the two layers of a (p^2,p) pattern.

    ker(T_{2,i}) >= ker(T_{1,p+1}) for i <= p, and ker(T_{2,p+1})
    contains the subgroup generated by all first-layer kernels.
    """
    if ap.system.shape != "(p^2,p)":
        raise PatternError("layer connections need shape (p^2,p)")
    p = ap.system.prime
    k1 = ap.kernels[1]
    k2 = ap.kernels[2]
    top = k1[p]  # kernel at the distinguished maximal subgroup
    for i in range(p):
        if not k2[i].contains_subgroup(top):
            return False
    gens = []
    for K in k1:
        gens.extend(K.gens if K.gens is not None else K.sorted_elems)
    joined = subgroup_closure(ap.group, gens)
    return k2[p].contains_subgroup(joined)


def hilbert94_check(ap):
    """Digit-layer positions whose kernel equals G' exactly.

    In the digit-encoded layers a transfer kernel equal to G' itself
    has no legal digit; its impossibility is known on arithmetic
    grounds, so occurrences are reported rather than asserted away.
    (The trivial kernel ker(T_{G,G}) = G' of layer 0 is not an
    instance.)
    """
    Gd = ap.system.derived
    hits = []
    for k in ap.tkt:
        for i, K in enumerate(ap.kernels[k], start=1):
            if K.elems == Gd.elems and Gd.order > 1:
                hits.append((k, i))
    return hits


# -- metabelianization ---------------------------------------------------


@dataclass
class MetabelianizationVerdict:
    """Outcome of comparing AP(G) with AP(G/G'')."""

    metabelian: bool
    tau_equal: bool
    kappa_equal: bool
    mismatches: list

    def __bool__(self):
        return self.tau_equal and self.kappa_equal


def metabelianization_check(G):
    """Restricted pattern of G equals that of G/G'' (Main Theorem).

    The derived quotient map omega: G -> G/G'' induces a bijection
    U -> omega(U) between the restricted families; the types of U/U'
    and omega(U)/omega(U)' must agree, and omega(ker T_{G,U}) must
    equal ker T_{G/G'', omega(U)}.
    """
    from .core import quotient
    from .hom import image_of

    W = whole_group(G)
    Gd = derived_of(W)
    Gdd = derived_of(Gd)
    if Gdd.order == 1:
        return MetabelianizationVerdict(True, True, True, [])

    M, omega = quotient(G, Gdd, name="metabelianization")
    sysG = subgroup_layers(G)
    mismatches = []
    tau_ok = True
    kap_ok = True
    for k, layer in enumerate(sysG.layers):
        for i, U in enumerate(layer):
            V = image_of(omega, U)
            tU = abelian.abelian_type_of_subquotient(G, U, derived_of(U))
            tV = abelian.abelian_type_of_subquotient(M, V, derived_of(V))
            if tU != tV:
                tau_ok = False
                mismatches.append(("tau", k, i + 1, tU, tV))
            kerU = artin_transfer(G, U).kernel
            kerV = artin_transfer(M, V).kernel
            if image_of(omega, kerU).elems != kerV.elems:
                kap_ok = False
                mismatches.append(("kappa", k, i + 1))
    return MetabelianizationVerdict(False, tau_ok, kap_ok, mismatches)


# -- reports -------------------------------------------------------------

SCHEMA_TAG = "apat-report/1"


def pattern_report(ap, group_id=None):
    """JSON-ready dict for a pattern; deterministic field order."""
    G = ap.group
    layers = []
    for k in sorted(ap.tkt):
        layers.append({
            "layer": k,
            "ttt": [t.render() for t in ap.ttt[k]],
            "tkt": ap.tkt[k].render(),
        })
    if not layers:
        for k in range(1, ap.layer_count() - 1):
            layers.append({
                "layer": k,
                "ttt": [t.render() for t in ap.ttt[k]],
                "tkt": None,
            })
    report = {
        "schema": SCHEMA_TAG,
        "group": group_id or getattr(G, "name", None)
        or getattr(getattr(G, "pres", None), "name", "G"),
        "order": G.order,
        "G/G'": ap.ttt[0][0].render(),
        "G'": ap.ttt[ap.layer_count() - 1][0].render(),
        "layers": layers,
    }
    if 1 in ap.tkt:
        if ap.system.shape == "(p^2,p)":
            c1, c2 = canonical_tkt_pair(ap.tkt[1], ap.tkt[2])
            report["tkt_canonical"] = c1.render() + ";" + c2.render()
        else:
            report["tkt_canonical"] = canonical_tkt(ap.tkt[1]).render()
        report["counter0"] = total_kernel_counter(ap.tkt[1])
    if ap.warnings:
        report["warnings"] = list(ap.warnings)
    return report


def render_report(report):
    return json.dumps(report, indent=2, sort_keys=False)
