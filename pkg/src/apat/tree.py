"""Descendant-tree navigation: parents, stabilization/polarization, and
pattern search.

For a finite p-group G and a series kind (lower central, lower
p-central, or derived), the parent is the quotient pi: G -> G/N by the
last nontrivial series term N.  Because N is contained in G', the
restricted families of G and of the parent correspond bijectively via
U -> pi(U), and along that bijection the transfer targets grow while
the transfer kernels shrink:

    tau(pi(G)) <= tau(G)   and   kappa(G) <= kappa(pi(G)).

The indices split into the stable part Stb = {i : N <= U_i'} (both
components frozen across the edge) and the polarized part Pol (target
strictly grows; kernel only non-strictly shrinks).  The shape of the
partition -- none, one, two, or all of the maximal subgroups polarized
-- is decided by structural data: the position of N = gamma_c(G)
relative to the centre, the two-step centralizer for maximal class, or
the extreme-class degenerations.
"""

import itertools
import json
from dataclasses import dataclass, field

from .abelian import AbelianType, abelian_type_of_subquotient, type_precedes
from .core import (
    SeriesKind,
    Subgroup,
    center,
    derived_of,
    quotient,
    series,
    subgroup_layers,
    two_step_centralizer,
    whole_group,
)
from .hom import image_of
from .pattern import (
    ArtinPattern,
    TktDigits,
    canonical_tkt,
    canonical_tkt_layer1,
    pattern_report,
    restricted_pattern,
)


class TreeError(ValueError):
    pass


def as_kind(kind, prime=None):
    if isinstance(kind, SeriesKind):
        return kind
    if kind == "lower-p-central":
        return SeriesKind(kind, prime)
    return SeriesKind(kind)


# -- parents -------------------------------------------------------------


@dataclass
class ParentEdge:
    """The quotient edge G -> G/N for the last nontrivial series term N."""

    child: object
    kind: SeriesKind
    kernel: Subgroup
    group: object
    projection: object

    def __iter__(self):
        yield self.group
        yield self.projection


def parent(G, kind, prime=None):
    """Parent quotient of G under a series kind, with its projection.

    Returns a ParentEdge (unpacks as (group, projection)).  Abelian
    groups are roots of the lower-central and derived trees and yield
    None; under the lower-p-central kind the parent of an elementary
    abelian group is the trivial group.  The trivial group has no
    parent at all.
    """
    kind = as_kind(kind, prime)
    if G.order == 1:
        raise TreeError("the trivial group is the root and has no parent")
    chain = series(G, kind)
    N = chain[-1] if chain[-1].order > 1 else chain[-2]
    if N.order == G.order:
        # the whole group is the last nontrivial term
        if kind.tag in ("lower-central", "derived"):
            return None
        name = "%s-parent" % kind.tag
        P, pi = quotient(G, whole_group(G), name=name)
        return ParentEdge(G, kind, whole_group(G), P, pi)
    P, pi = quotient(G, N, name="%s-parent" % kind.tag)
    return ParentEdge(G, kind, N, P, pi)


# -- stable / polarized partition ----------------------------------------


@dataclass
class StbPol:
    """Index partition of a subgroup family along a parent edge.

    stable lists the 1-based layer-1 positions i with ker(pi) <= U_i';
    by_layer carries the same partition for every layer when requested.
    """

    kind: SeriesKind
    stable: tuple
    polarized: tuple
    by_layer: dict = None

    def render(self):
        return "Pol={%s} Stb={%s}" % (
            ",".join(str(i) for i in self.polarized),
            ",".join(str(i) for i in self.stable),
        )


def _partition_layer(N, layer):
    stb, pol = [], []
    for i, U in enumerate(layer, start=1):
        if derived_of(U).contains_subgroup(N):
            stb.append(i)
        else:
            pol.append(i)
    return tuple(stb), tuple(pol)


def stb_pol(G, kind, prime=None, x=None, y=None, system=None,
            full_family=False):
    """Stable and polarized maximal-subgroup positions of G.

    i is stable iff the parent kernel lies in U_i'; the partition is
    taken over layer 1 (pass full_family=True to also partition every
    other layer of the restricted family).
    """
    kind = as_kind(kind, prime)
    edge = parent(G, kind)
    if edge is None:
        raise TreeError("G is a root under the %s kind" % kind.tag)
    if system is None:
        system = subgroup_layers(G, x=x, y=y)
    N = edge.kernel
    stb, pol = _partition_layer(N, system.layer(1))
    by_layer = None
    if full_family:
        by_layer = {
            k: _partition_layer(N, system.layer(k))
            for k in range(len(system.layers))
        }
    return StbPol(kind, stb, pol, by_layer)


# -- pattern comparison along an edge ------------------------------------

EQUAL = "equal"
STRICT = "strictly-precedes"
INCOMPARABLE = "incomparable"


@dataclass
class ComponentVerdict:
    layer: int
    position: int           # 1-based position in the child family
    parent_position: int    # matched position in the parent family
    tau: str                # equal | strictly-precedes | incomparable
    kappa: str


@dataclass
class PatternComparison:
    """Per-component verdicts between a child pattern and its parent.

    tau verdicts state how the parent target relates to the child
    target (the parent precedes); kappa verdicts state how the child
    kernel, pushed through the projection, sits inside the parent
    kernel.
    """

    components: list
    tau_ok: bool
    kappa_ok: bool

    def __bool__(self):
        return self.tau_ok and self.kappa_ok

    def layer(self, k):
        return [c for c in self.components if c.layer == k]


def compare_patterns(child, parent_ap, pi):
    """Componentwise verdicts for tau and kappa along a projection.

    child and parent_ap are ArtinPatterns; pi maps the child group onto
    the parent group.  Requires ker(pi) <= G' so that the restricted
    families correspond (U -> pi(U) preserves layers); raises TreeError
    otherwise.
    """
    ker = pi.kernel
    if not child.system.derived.contains_subgroup(ker):
        raise TreeError(
            "projection kernel is not contained in every family member")
    H = parent_ap.group
    comps = []
    tau_ok = True
    kappa_ok = True
    for k, layer in enumerate(child.system.layers):
        for i, U in enumerate(layer, start=1):
            V = image_of(pi, U)
            pos = parent_ap.system.position(V)
            if pos is None or pos[0] != k:
                raise TreeError(
                    "image of a layer-%d member missing from the parent "
                    "family" % k)
            j = pos[1]
            tc = child.ttt[k][i - 1]
            tp = parent_ap.ttt[k][j - 1]
            if tc == tp:
                tv = EQUAL
            elif type_precedes(tp, tc):
                tv = STRICT
            else:
                tv = INCOMPARABLE
                tau_ok = False
            Kc = image_of(pi, child.kernels[k][i - 1])
            Kp = parent_ap.kernels[k][j - 1]
            if Kc.elems == Kp.elems:
                kv = EQUAL
            elif Kp.contains_subgroup(Kc):
                kv = STRICT
            else:
                kv = INCOMPARABLE
                kappa_ok = False
            comps.append(ComponentVerdict(k, i, j, tv, kv))
    return PatternComparison(comps, tau_ok, kappa_ok)


def compare_with_parent(G, kind, prime=None, x=None, y=None):
    """Patterns of G and of its parent, compared along the projection.

    Returns (edge, child_pattern, parent_pattern, comparison).  When a
    designated generator pair is given, the parent inherits the images
    pi(x), pi(y), so positions line up with the child convention.
    """
    kind = as_kind(kind, prime)
    edge = parent(G, kind)
    if edge is None:
        raise TreeError("G is a root under the %s kind" % kind.tag)
    system = subgroup_layers(G, x=x, y=y)
    child = restricted_pattern(G, system=system)
    px = edge.projection(x) if x is not None else None
    py = edge.projection(y) if y is not None else None
    if edge.group.order == 1:
        px = py = None
    psystem = subgroup_layers(edge.group, x=px, y=py)
    par = restricted_pattern(edge.group, system=psystem)
    comparison = compare_patterns(child, par, edge.projection)
    return edge, child, par, comparison


# -- polarization classification -----------------------------------------

LABELS = {
    0: "total-stabilization",
    1: "unipolarization",
    2: "bipolarization",
}


@dataclass
class Classification:
    label: str
    partition: StbPol
    criterion: str = None        # label predicted by the structural theorem
    criterion_source: str = None  # which theorem family applied
    detail: dict = field(default_factory=dict)

    def render(self):
        return "%s; %s" % (self.label, self.partition.render())


def _type_of_subgroup(G, U):
    return abelian_type_of_subquotient(G, U, Subgroup(G, [0], gens=[0]))


def _lower_central_index(chain, M):
    """j with gamma_j = M, or None (chain is gamma_1, gamma_2, ...)."""
    for j, term in enumerate(chain, start=1):
        if term.elems == M.elems:
            return j
    if M.order == 1:
        return len(chain) + 1
    return None


def classify_polarization(G, kind="lower-central", x=None, y=None):
    """Label the stabilization/polarization shape of the parent edge.

    Expects a p-group with G/G' of type (p,p) and the lower-central
    kind.  The label comes from the directly computed partition; in the
    structurally understood situations (non-maximal class via the
    position of gamma_c relative to the centre; maximal class via the
    two-step centralizer invariant k; the extreme classes <= 3) the
    theorem's prediction is evaluated independently and must agree.
    """
    kind = as_kind(kind)
    if kind.tag != "lower-central":
        raise TreeError("classification is defined for the lower-central kind")
    system = subgroup_layers(G, x=x, y=y)
    top = abelian_type_of_subquotient(
        G, whole_group(G), system.derived).invariants
    if len(top) != 2 or top[0] != top[1]:
        raise TreeError("classification needs G/G' of type (p,p)")
    p = top[0]
    sp = stb_pol(G, kind, system=system)
    npol = len(sp.polarized)
    if npol == p + 1:
        label = "total-polarization"
    elif npol in LABELS:
        label = LABELS[npol]
    else:
        raise TreeError(
            "partition %s matches no classification label" % (sp.render(),))

    chain = series(G, kind)
    cl = len(chain) - 1  # chain ends at the trivial subgroup for p-groups
    m = 0
    n = G.order
    while n > 1:
        n //= p
        m += 1
    cc = m - cl
    Gd = system.derived
    metabelian = derived_of(Gd).order == 1
    criterion = None
    source = None
    detail = {"class": cl, "coclass": cc, "order": G.order, "p": p}

    N = chain[-2] if chain[-1].order == 1 else chain[-1]
    if cl == 2 and cc == 1:
        # extraspecial of order p^3: every maximal subgroup is abelian
        if all(derived_of(U).order == 1 for U in system.layer(1)):
            criterion, source = "total-polarization", "extreme-class-2"
    elif cl == 3 and cc == 2 and metabelian:
        dtypes = [_type_of_subgroup(G, derived_of(U)).invariants
                  for U in system.layer(1)]
        ntype = _type_of_subgroup(G, N).invariants
        if all(t == (p,) for t in dtypes) and ntype == (p, p):
            criterion, source = "total-polarization", "extreme-class-3"
    elif cc == 1 and cl >= 3:
        chi2 = two_step_centralizer(G, 2)
        comm = _commutator_of(G, chi2, chain[1])
        j = _lower_central_index(chain, comm)
        detail["chi2_order"] = chi2.order
        if j is not None:
            k = m - j
            detail["k"] = k
            u1 = next(
                (U for U in system.layer(1) if U.elems == chi2.elems), None)
            if k >= 1:
                criterion, source = "total-stabilization", "maximal-class"
            elif u1 is not None and derived_of(u1).order == 1:
                criterion, source = "unipolarization", "maximal-class"
    elif cc >= 2 and cl >= 4 and metabelian and p == 3:
        Z = center(G)
        ntype = _type_of_subgroup(G, N).invariants
        ztype = _type_of_subgroup(G, Z).invariants
        detail["gamma_c"] = ntype
        detail["centre"] = ztype
        if N.elems == Z.elems and len(ztype) == 2:
            criterion, source = "bipolarization", "non-maximal-class"
        elif (len(ntype) == 1 and len(ztype) == 2
              and Z.contains_subgroup(N) and N.order < Z.order):
            criterion, source = "unipolarization", "non-maximal-class"
        elif N.elems == Z.elems and len(ztype) == 1:
            criterion, source = "total-stabilization", "non-maximal-class"

    if criterion is not None and criterion != label:
        raise TreeError(
            "structural criterion (%s: %s) disagrees with the computed "
            "partition (%s)" % (source, criterion, label))
    return Classification(label, sp, criterion, source, detail)


def _commutator_of(G, U, V):
    from .core import commutator_subgroup

    return commutator_subgroup(
        Subgroup(G, U.sorted_elems, gens=U.gens or list(U.sorted_elems)),
        Subgroup(G, V.sorted_elems, gens=V.gens or list(V.sorted_elems)),
    )


# -- layer theorems -------------------------------------------------------


@dataclass
class LayerVerdict:
    """Top/bottom layer behaviour across one parent edge.

    top_equal: type of G/G' equals that of the parent (lower-central
    and derived kinds).  bottom_changed: type of G' strictly exceeds
    the parent's (metabelian child; None when not applicable).
    rank_equal: p-rank of the abelianization preserved (lower-p-central
    kind).  notes records degenerate conventions.
    """

    kind: SeriesKind
    top_equal: bool = None
    bottom_changed: bool = None
    rank_equal: bool = None
    notes: list = field(default_factory=list)

    def __bool__(self):
        checks = [self.top_equal, self.bottom_changed, self.rank_equal]
        return all(c for c in checks if c is not None)


def layer_theorems_check(G, kind, prime=None):
    """Verify the stable-layer laws across the parent edge of G.

    Lower-central/derived: the top layer (type of the abelianization)
    is equal across the edge, and for a metabelian child the bottom
    layer (type of G') strictly changes.  Lower-p-central: only the
    p-rank of the abelianization is preserved.
    """
    kind = as_kind(kind, prime)
    edge = parent(G, kind)
    v = LayerVerdict(kind)
    if edge is None:
        v.notes.append("root: no parent under the %s kind" % kind.tag)
        return v
    P = edge.group
    if P.order == 1:
        v.notes.append("parent trivial: layer laws hold by convention")
        v.rank_equal = True if kind.tag == "lower-p-central" else None
        v.top_equal = None
        return v
    W, Gd = whole_group(G), derived_of(whole_group(G))
    WP, Pd = whole_group(P), derived_of(whole_group(P))
    t_top = abelian_type_of_subquotient(G, W, Gd)
    p_top = abelian_type_of_subquotient(P, WP, Pd)
    if kind.tag in ("lower-central", "derived"):
        v.top_equal = t_top == p_top
        metabelian = Gd.order > 1 and derived_of(Gd).order == 1
        if metabelian:
            t_bot = abelian_type_of_subquotient(G, Gd, derived_of(Gd))
            p_bot = abelian_type_of_subquotient(P, Pd, derived_of(Pd))
            v.bottom_changed = (
                t_bot != p_bot and type_precedes(p_bot, t_bot))
        else:
            v.notes.append("bottom-layer law needs a metabelian child")
    else:
        v.rank_equal = t_top.rank == p_top.rank
    return v


# -- forest files and pattern search --------------------------------------


@dataclass
class ForestNode:
    id: str
    presentation_ref: str
    parent_id: str
    parent_kind: str
    children: list = field(default_factory=list)


def load_forest(source):
    """Parse a forest file (or already-loaded list) into linked nodes.

    The file is a JSON array of {"id", "presentation-ref", "parent-id",
    "parent-kind"}; parent-id null marks a root.  Returns (nodes dict,
    roots list) with children links resolved.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = source
    if not isinstance(data, list):
        raise TreeError("forest file must be a JSON array of nodes")
    nodes = {}
    for row in data:
        try:
            node = ForestNode(
                id=row["id"],
                presentation_ref=row["presentation-ref"],
                parent_id=row["parent-id"],
                parent_kind=row["parent-kind"],
            )
        except (TypeError, KeyError) as exc:
            raise TreeError("malformed forest node: %r" % (row,)) from exc
        if node.id in nodes:
            raise TreeError("duplicate forest node id %r" % node.id)
        nodes[node.id] = node
    roots = []
    for node in nodes.values():
        if node.parent_id is None:
            roots.append(node)
        elif node.parent_id in nodes:
            nodes[node.parent_id].children.append(node)
        else:
            raise TreeError(
                "node %r references unknown parent %r"
                % (node.id, node.parent_id))
    for node in nodes.values():
        node.children.sort(key=lambda c: c.id)
    return nodes, sorted(roots, key=lambda r: r.id)


@dataclass
class SearchConstraints:
    """Partial-pattern constraints for a forest search.

    tkt: layer-1 digit tuple, matched up to renumeration (canonical
    orbit forms).  ttt: {layer: [types]}; every listed type must occur
    (with multiplicity) in the node's sorted layer multiset.  Types may
    be given as AbelianType or as invariant tuples.
    """

    tkt: tuple = None
    ttt: dict = None

    def __post_init__(self):
        if self.tkt is not None:
            self.tkt = tuple(int(d) for d in self.tkt)
        if self.ttt is not None:
            norm = {}
            for k, comps in self.ttt.items():
                norm[int(k)] = [
                    c if isinstance(c, AbelianType)
                    else AbelianType(tuple(int(v) for v in c))
                    for c in comps
                ]
            self.ttt = norm
        if self.tkt is None and self.ttt is None:
            raise TreeError("empty search constraints")


@dataclass
class SearchResult:
    matches: list   # (node id, pattern report) sorted by id
    visited: int
    pruned: int

    def report(self):
        return {
            "schema": "apat-report/1",
            "matches": [
                {"id": nid, "pattern": rep} for nid, rep in self.matches
            ],
            "visited": self.visited,
            "pruned": self.pruned,
        }


MONOTONE_KINDS = ("lower-central", "derived")


def _matches(ap, constraints):
    if constraints.tkt is not None:
        digs = ap.tkt.get(1)
        if digs is None or len(constraints.tkt) != len(digs.digits):
            return False
        # shape decides the renumeration group acting on layer 1
        canon = canonical_tkt_layer1 if ap.system.shape == "(p^2,p)" \
            else canonical_tkt
        want = canon(TktDigits(constraints.tkt, 1, digs.p))
        if canon(digs).digits != want.digits:
            return False
    if constraints.ttt is not None:
        for k, comps in constraints.ttt.items():
            if k >= len(ap.system.layers):
                return False
            have = sorted(t.invariants for t in ap.ttt[k])
            for c in comps:
                if c.invariants in have:
                    have.remove(c.invariants)
                else:
                    return False
    return True


def _tau_prunable(ap, constraints):
    """No descendant can satisfy the tau constraints.

    Along a descent edge the family corresponds positionwise and each
    target only grows, so a constraint component c can only ever be
    met by a current component u with u <= c.  An injective assignment
    of constraint components to compatible current components must
    exist (Hall's condition); when it already fails, the subtree is
    dead.
    """
    if constraints.ttt is None:
        return False
    for k, comps in constraints.ttt.items():
        if k >= len(ap.system.layers):
            return True
        have = [t for t in ap.ttt[k]]
        want = list(comps)
        for r in range(1, len(want) + 1):
            for S in itertools.combinations(range(len(want)), r):
                avail = sum(
                    1 for u in have
                    if any(type_precedes(u, want[j]) for j in S)
                )
                if avail < r:
                    return True
    return False


def _subtree_size(node):
    return 1 + sum(_subtree_size(c) for c in node.children)


def _subtree_monotone(node):
    return all(
        c.parent_kind in MONOTONE_KINDS and _subtree_monotone(c)
        for c in node.children
    )


def pattern_search(forest, constraints, resolve, cache=None):
    """All forest nodes whose canonical pattern meets the constraints.

    forest is a file path or node list (see load_forest); resolve maps
    a presentation-ref to (group, x, y) with optional designated
    generators.  Traversal is depth-first from the roots; a subtree is
    cut only when the tau constraints can no longer be met anywhere
    below (targets grow along lower-central/derived descent).  kappa
    constraints never prune; they are checked at match time on
    canonical orbit forms.  Pass a dict as cache to reuse computed
    patterns across searches (keyed by presentation-ref).
    """
    if not isinstance(constraints, SearchConstraints):
        raise TreeError("constraints must be a SearchConstraints")
    nodes, roots = load_forest(forest)
    matches = []
    visited = 0
    pruned = 0
    stack = list(reversed(roots))
    while stack:
        node = stack.pop()
        ap = cache.get(node.presentation_ref) if cache is not None else None
        if ap is None:
            G, x, y = resolve(node.presentation_ref)
            ap = restricted_pattern(G, x=x, y=y)
            if cache is not None:
                cache[node.presentation_ref] = ap
        visited += 1
        if _matches(ap, constraints):
            matches.append((node.id, pattern_report(ap, group_id=node.id)))
        if node.children and _tau_prunable(ap, constraints) \
                and _subtree_monotone(node):
            pruned += _subtree_size(node) - 1
            continue
        stack.extend(reversed(node.children))
    matches.sort(key=lambda t: t[0])
    return SearchResult(matches, visited, pruned)
