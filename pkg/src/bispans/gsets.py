"""Finite G-sets and equivariant maps.

A :class:`GSet` is an action table over a :class:`~bispans.groups.Group`;
a :class:`GMap` is a point mapping validated for equivariance.  The module
supplies the categorical toolkit everything else is built from: orbits and
stabilizers, pullbacks, (co)products, restriction/induction/coinduction,
dependent products by direct section enumeration, exponential diagrams, and
isomorphism testing via the orbit-type fingerprint.

Point numbering is deterministic but never part of any contract: G-sets are
compared up to isomorphism through their fingerprints.  The ``labels`` field
records how points were built (cosets, pairs, sections) for debugging and
for reading off structure maps; it carries no semantics of its own.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from .groups import Group, ResourceCapError, SubgroupLattice, lattice

DEP_PRODUCT_POINT_CAP = 2_000_000


class GSetError(ValueError):
    """Invalid G-set or equivariant-map data."""


@dataclass(frozen=True)
class OrbitType:
    """Isomorphism type of one orbit: a stabilizer conjugacy class index."""

    stabilizer_class: int
    multiplicity: int


class GSet:
    """A finite G-set given by its action table ``action[g][p]``."""

    __slots__ = ("group", "size", "action", "labels", "_orbit_data", "_fingerprint")

    def __init__(
        self,
        group: Group,
        action: Sequence[Sequence[int]],
        labels: Optional[tuple] = None,
        *,
        validate: bool = False,
    ) -> None:
        self.group = group
        self.action = tuple(tuple(row) for row in action)
        if len(self.action) != group.order:
            raise GSetError(
                f"action table has {len(self.action)} rows, group order is {group.order}"
            )
        self.size = len(self.action[0]) if self.action else 0
        self.labels = labels
        if validate:
            self.validate()
        self._orbit_data = None
        self._fingerprint = None

    def validate(self) -> None:
        G, n = self.group, self.size
        for g in G.elements():
            row = self.action[g]
            if len(row) != n:
                raise GSetError(f"action row {g} has length {len(row)}, expected {n}")
            for p in row:
                if not (0 <= p < n):
                    raise GSetError(f"action value {p} out of range")
        e = G.identity
        if self.action[e] != tuple(range(n)):
            raise GSetError("identity does not act trivially")
        for g in G.elements():
            for h in G.elements():
                gh = G.mul(g, h)
                for p in range(n):
                    if self.action[g][self.action[h][p]] != self.action[gh][p]:
                        raise GSetError(f"action not compatible at g={g}, h={h}, p={p}")

    def act(self, g: int, p: int) -> int:
        return self.action[g][p]

    # -- orbits ----------------------------------------------------------------

    def _orbits(self):
        """(orbits, orbit_of, transversal) with transversal[p]*rep = p."""
        if self._orbit_data is not None:
            return self._orbit_data
        G = self.group
        orbit_of = [-1] * self.size
        orbits: list[tuple[int, ...]] = []
        transversal = [G.identity] * self.size
        for p in range(self.size):
            if orbit_of[p] >= 0:
                continue
            idx = len(orbits)
            seen = [p]
            orbit_of[p] = idx
            queue = [p]
            while queue:
                q = queue.pop()
                for g in G.elements():
                    r = self.action[g][q]
                    if orbit_of[r] < 0:
                        orbit_of[r] = idx
                        transversal[r] = G.mul(g, transversal[q])
                        seen.append(r)
                        queue.append(r)
            orbits.append(tuple(sorted(seen)))
        self._orbit_data = (tuple(orbits), tuple(orbit_of), tuple(transversal))
        return self._orbit_data

    @property
    def orbits(self) -> tuple[tuple[int, ...], ...]:
        return self._orbits()[0]

    def orbit_of(self, p: int) -> int:
        return self._orbits()[1][p]

    def orbit_reps(self) -> tuple[int, ...]:
        return tuple(o[0] for o in self.orbits)

    def transversal_element(self, p: int) -> int:
        """A group element carrying the orbit representative of ``p`` to ``p``."""
        return self._orbits()[2][p]

    def stabilizer(self, p: int) -> frozenset[int]:
        return frozenset(g for g in self.group.elements() if self.action[g][p] == p)

    def fingerprint(self) -> tuple[OrbitType, ...]:
        """Multiset of orbit types; a complete isomorphism invariant."""
        if self._fingerprint is None:
            lat = lattice(self.group)
            counts: dict[int, int] = {}
            for rep in self.orbit_reps():
                c = lat.class_of[lat.index_of(self.stabilizer(rep))]
                counts[c] = counts.get(c, 0) + 1
            self._fingerprint = tuple(
                OrbitType(c, counts[c]) for c in sorted(counts)
            )
        return self._fingerprint

    def __repr__(self) -> str:
        return f"GSet({self.group.name}, size={self.size})"


@dataclass(frozen=True)
class GMap:
    """An equivariant map between G-sets over the same group."""

    source: GSet
    target: GSet
    points: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.source.group is not self.target.group:
            raise GSetError("source and target live over different groups")
        if len(self.points) != self.source.size:
            raise GSetError(
                f"map has {len(self.points)} values for {self.source.size} points"
            )
        for v in self.points:
            if not (0 <= v < self.target.size):
                raise GSetError(f"map value {v} outside target")

    def check_equivariance(self) -> None:
        G = self.source.group
        for g in G.elements():
            src, tgt = self.source.action[g], self.target.action[g]
            for p in range(self.source.size):
                if self.points[src[p]] != tgt[self.points[p]]:
                    raise GSetError(f"map not equivariant at g={g}, p={p}")

    def __call__(self, p: int) -> int:
        return self.points[p]

    def compose_with(self, other: "GMap") -> "GMap":
        """self after other (other's target must be self's source)."""
        if other.target is not self.source:
            raise GSetError("maps not composable")
        return GMap(other.source, self.target, tuple(self.points[p] for p in other.points))


def equivariant_map(source: GSet, target: GSet, points: Sequence[int]) -> GMap:
    """Build and fully validate an equivariant map."""
    f = GMap(source, target, tuple(points))
    f.check_equivariance()
    return f


def identity_map(X: GSet) -> GMap:
    return GMap(X, X, tuple(range(X.size)))


# -- basic constructions -------------------------------------------------------


def from_action_table(group: Group, action: Sequence[Sequence[int]]) -> GSet:
    """Validated G-set from an explicit action table."""
    return GSet(group, action, validate=True)


def empty_gset(G: Group) -> GSet:
    return GSet(G, tuple(() for _ in G.elements()))


def trivial_gset(G: Group, n: int) -> GSet:
    row = tuple(range(n))
    return GSet(G, tuple(row for _ in G.elements()), labels=tuple(("pt", i) for i in range(n)))


def coset_space(lat: SubgroupLattice, k: int) -> GSet:
    """G/K with points the left cosets ordered by least member."""
    G = lat.group
    members = lat.subgroups[k].members
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for x in G.elements():
        if x in coset_of:
            continue
        idx = len(reps)
        for m in members:
            coset_of[G.mul(x, m)] = idx
        reps.append(x)
    action = tuple(
        tuple(coset_of[G.mul(g, r)] for r in reps) for g in G.elements()
    )
    return GSet(G, action, labels=tuple(("coset", k, r) for r in reps))


def from_orbit_types(lat: SubgroupLattice, types: Sequence[int]) -> GSet:
    """Disjoint union of coset spaces G/K over the given subgroup indices.

    Realizes the bijection between isomorphism classes of G-sets and
    multisets of subgroup conjugacy classes; indices are sorted so the
    result is canonical in the multiset.
    """
    for t in types:
        if not (0 <= t < len(lat.subgroups)):
            raise GSetError(f"invalid subgroup index {t}")
    parts = [coset_space(lat, t) for t in sorted(types)]
    X = empty_gset(lat.group)
    for part in parts:
        X, _, _ = coproduct(X, part)
    return X


def coproduct(X: GSet, Y: GSet) -> tuple[GSet, GMap, GMap]:
    """Disjoint union with its two injections."""
    if X.group is not Y.group:
        raise GSetError("coproduct needs a common group")
    G = X.group
    action = tuple(
        tuple(X.action[g]) + tuple(v + X.size for v in Y.action[g])
        for g in G.elements()
    )
    lx = X.labels if X.labels is not None else tuple(range(X.size))
    ly = Y.labels if Y.labels is not None else tuple(range(Y.size))
    Z = GSet(G, action, labels=tuple((0, l) for l in lx) + tuple((1, l) for l in ly))
    inl = GMap(X, Z, tuple(range(X.size)))
    inr = GMap(Y, Z, tuple(range(X.size, X.size + Y.size)))
    return Z, inl, inr


def product(X: GSet, Y: GSet) -> tuple[GSet, GMap, GMap]:
    """Cartesian product with the two projections."""
    if X.group is not Y.group:
        raise GSetError("product needs a common group")
    G = X.group
    pairs = [(i, j) for i in range(X.size) for j in range(Y.size)]
    index = {p: n for n, p in enumerate(pairs)}
    action = tuple(
        tuple(index[(X.action[g][i], Y.action[g][j])] for (i, j) in pairs)
        for g in G.elements()
    )
    Z = GSet(G, action, labels=tuple(pairs))
    p1 = GMap(Z, X, tuple(i for (i, _) in pairs))
    p2 = GMap(Z, Y, tuple(j for (_, j) in pairs))
    return Z, p1, p2


def pullback(f: GMap, g: GMap) -> tuple[GSet, GMap, GMap]:
    """Fiber product ``{(x, y) : f(x) = g(y)}`` with its projections."""
    if f.target is not g.target:
        raise GSetError("pullback needs a common target")
    G = f.source.group
    pairs = [
        (x, y)
        for x in range(f.source.size)
        for y in range(g.source.size)
        if f.points[x] == g.points[y]
    ]
    index = {p: n for n, p in enumerate(pairs)}
    action = tuple(
        tuple(index[(f.source.action[gid][x], g.source.action[gid][y])] for (x, y) in pairs)
        for gid in G.elements()
    )
    P = GSet(G, action, labels=tuple(pairs))
    p1 = GMap(P, f.source, tuple(x for (x, _) in pairs))
    p2 = GMap(P, g.source, tuple(y for (_, y) in pairs))
    return P, p1, p2


def fold_map(X: GSet, n: int) -> tuple[GSet, GMap]:
    """The n-fold coproduct of ``X`` with the fold map down to ``X``."""
    if n < 1:
        raise GSetError("fold needs n >= 1")
    S = X
    for _ in range(n - 1):
        S, _, _ = coproduct(S, X)
    # summand blocks are consecutive, so reduction mod |X| is the fold
    return S, GMap(S, X, tuple(p % X.size for p in range(S.size)))


# -- change of group -----------------------------------------------------------


def restrict(lat: SubgroupLattice, h: int, X: GSet) -> GSet:
    """The underlying H-set of a G-set, over ``lat.subgroup_group(h)``."""
    if X.group is not lat.group:
        raise GSetError("restrict: G-set not over the lattice's group")
    Hg = lat.subgroup_group(h)
    action = tuple(X.action[parent] for parent in Hg.parent_elements)
    return GSet(Hg, action, labels=X.labels)


def induce(lat: SubgroupLattice, h: int, X: GSet) -> GSet:
    """G ×_H X for an H-set ``X``; points are (coset of G/H, point) pairs."""
    G = lat.group
    Hg = lat.subgroup_group(h)
    if X.group is not Hg:
        raise GSetError("induce: set is not over the subgroup's group")
    members = lat.subgroups[h].members
    coset_of: dict[int, int] = {}
    reps: list[int] = []
    for x in G.elements():
        if x in coset_of:
            continue
        idx = len(reps)
        for m in members:
            coset_of[G.mul(x, m)] = idx
        reps.append(x)
    pairs = [(c, p) for c in range(len(reps)) for p in range(X.size)]
    index = {q: n for n, q in enumerate(pairs)}
    action_rows = []
    for g in G.elements():
        row = []
        for (c, p) in pairs:
            t = G.mul(g, reps[c])
            c2 = coset_of[t]
            hh = G.mul(G.inv(reps[c2]), t)  # element of H with g*rep_c = rep_c2 * hh
            row.append(index[(c2, X.action[Hg.local_id(hh)][p])])
        action_rows.append(tuple(row))
    return GSet(G, tuple(action_rows), labels=tuple(pairs))


def induction_projection(lat: SubgroupLattice, h: int, ind: GSet) -> GMap:
    """Structure map G ×_H X -> G/H, read off the induced set's labels."""
    base = coset_space(lat, h)
    return GMap(ind, base, tuple(c for (c, _) in ind.labels))


def coinduce(lat: SubgroupLattice, k: int, h: int, T: GSet) -> GSet:
    """The H-set of K-equivariant functions H -> T, for K <= H.

    Functions are encoded by their values on the canonical (least-element)
    representatives of the right cosets K\\H, enumerated lexicographically.
    """
    if not lat.leq[k][h]:
        raise GSetError("coinduce requires K <= H")
    Hg = lat.subgroup_group(h)
    Kg = lat.subgroup_group(k)
    if T.group is not Kg:
        raise GSetError("coinduce: set is not over the inner subgroup's group")
    k_local = [Hg.local_id(p) for p in Kg.parent_elements]
    coset_of = [-1] * Hg.order
    reps: list[int] = []
    for x in range(Hg.order):
        if coset_of[x] >= 0:
            continue
        idx = len(reps)
        for kk in k_local:
            coset_of[Hg.mul(kk, x)] = idx
        reps.append(x)
    m = len(reps)
    # for each rep index i and h, where does right translation send it
    # and through which K-twist: reps[i]*h = twist * reps[j]
    moves = []
    for hh in range(Hg.order):
        mv = []
        for i in range(m):
            z = Hg.mul(reps[i], hh)
            j = coset_of[z]
            twist_h = Hg.mul(z, Hg.inv(reps[j]))
            twist_k = Kg.local_id(Hg.parent_elements[twist_h])
            mv.append((j, twist_k))
        moves.append(mv)
    points = list(itertools.product(range(T.size), repeat=m))
    index = {p: n for n, p in enumerate(points)}
    action_rows = []
    for hh in range(Hg.order):
        mv = moves[hh]
        row = []
        for tup in points:
            row.append(index[tuple(T.action[tw][tup[j]] for (j, tw) in mv)])
        action_rows.append(tuple(row))
    return GSet(Hg, tuple(action_rows), labels=tuple(points))


def coinduce_map(lat: SubgroupLattice, k: int, h: int, f: GMap) -> GMap:
    """Functorial action of coinduction on a map of K-sets."""
    CX = coinduce(lat, k, h, f.source)
    CY = coinduce(lat, k, h, f.target)
    target_index = {lab: n for n, lab in enumerate(CY.labels)}
    points = tuple(
        target_index[tuple(f.points[t] for t in lab)] for lab in CX.labels
    )
    return GMap(CX, CY, points)


# -- dependent products ---------------------------------------------------------


def _fibers(f: GMap) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(f.target.size)]
    for x in range(f.source.size):
        out[f.points[x]].append(x)
    return out


def dependent_product(
    g: GMap, h: GMap, *, point_cap: int = DEP_PRODUCT_POINT_CAP
) -> tuple[GSet, GMap]:
    """Right adjoint to pullback along ``g``, by direct section enumeration.

    ``g : S -> T`` is the map pushed along; ``h : A -> S`` is an object of
    the slice over ``S``.  The result is the G-set over ``T`` whose points
    over ``t`` are the sections ``s : g^-1(t) -> A`` with ``h(s(x)) = x``,
    together with its structure map to ``T``.  A point with empty fiber
    carries exactly one (empty) section, as forced by the adjunction.
    """
    if h.target is not g.source:
        raise GSetError("dependent product: h must land in the source of g")
    S, T, A = g.source, g.target, h.source
    G = S.group
    fibers = _fibers(g)
    choices = _fibers(h)
    labels: list[tuple[int, tuple[int, ...]]] = []
    count = 0
    for t in range(T.size):
        opts = [choices[x] for x in fibers[t]]
        block = 1
        for o in opts:
            block *= len(o)
        count += block
        if count > point_cap:
            raise ResourceCapError(
                f"dependent product would exceed {point_cap} points"
            )
        for combo in itertools.product(*opts):
            labels.append((t, combo))
    index = {lab: n for n, lab in enumerate(labels)}
    fiber_pos = [
        {x: i for i, x in enumerate(fibers[t])} for t in range(T.size)
    ]
    action_rows = []
    for gid in G.elements():
        ginv = G.inv(gid)
        row = []
        for (t, combo) in labels:
            t2 = T.action[gid][t]
            new_combo = tuple(
                A.action[gid][combo[fiber_pos[t][S.action[ginv][x]]]]
                for x in fibers[t2]
            )
            row.append(index[(t2, new_combo)])
        action_rows.append(tuple(row))
    P = GSet(G, tuple(action_rows), labels=tuple(labels))
    struct = GMap(P, T, tuple(t for (t, _) in labels))
    return P, struct


@dataclass(frozen=True)
class ExponentialDiagram:
    """The canonical diagram turning a product-of-sums into a sum-of-products.

    For ``h : S -> T`` and ``g : T -> U`` it packages the dependent product
    ``h_prime : P -> U`` of ``h`` along ``g``, the pullback leg
    ``g_prime : T x_U P -> P`` of ``g``, and the evaluation counit
    ``f_prime : T x_U P -> S``.
    """

    dep: GSet
    h_prime: GMap
    pull: GSet
    g_prime: GMap
    f_prime: GMap
    t_leg: GMap  # projection T x_U P -> T


def exponential_diagram(g: GMap, h: GMap) -> ExponentialDiagram:
    if h.target is not g.source:
        raise GSetError("exponential diagram: need h into the source of g")
    P, h_prime = dependent_product(g, h)
    pull, t_leg, g_prime = pullback(g, h_prime)
    fibers = _fibers(g)
    fiber_pos = [
        {x: i for i, x in enumerate(fibers[u])} for u in range(g.target.size)
    ]
    eval_points = []
    for (t, pidx) in pull.labels:
        u, combo = P.labels[pidx]
        eval_points.append(combo[fiber_pos[u][t]])
    f_prime = GMap(pull, h.source, tuple(eval_points))
    return ExponentialDiagram(P, h_prime, pull, g_prime, f_prime, t_leg)


# -- isomorphism ----------------------------------------------------------------


def iso_test(X: GSet, Y: GSet) -> Optional[GMap]:
    """An equivariant bijection X -> Y, or None if none exists.

    Isomorphism holds iff the fingerprints agree; the concrete bijection is
    assembled orbit by orbit, sending each orbit representative to the least
    point of a matching orbit with literally the same stabilizer.
    """
    if X.group is not Y.group:
        raise GSetError("iso test needs a common group")
    if X.fingerprint() != Y.fingerprint():
        return None
    G = X.group
    lat = lattice(G)
    by_class: dict[int, list[int]] = {}
    for oi, rep in enumerate(Y.orbit_reps()):
        c = lat.class_of[lat.index_of(Y.stabilizer(rep))]
        by_class.setdefault(c, []).append(oi)
    points = [-1] * X.size
    for orbit, rep in zip(X.orbits, X.orbit_reps()):
        stab = X.stabilizer(rep)
        c = lat.class_of[lat.index_of(stab)]
        oi = by_class[c].pop(0)
        target_orbit = Y.orbits[oi]
        image = None
        for q in target_orbit:
            if Y.stabilizer(q) == stab:
                image = q
                break
        assert image is not None  # same conjugacy class, so some point matches
        for p in orbit:
            points[p] = Y.action[X.transversal_element(p)][image]
    return GMap(X, Y, tuple(points))


def is_isomorphic(X: GSet, Y: GSet) -> bool:
    return X.fingerprint() == Y.fingerprint()


# -- fibers ----------------------------------------------------------------------


@dataclass(frozen=True)
class FiberDatum:
    """One target orbit of a map: its representative, stabilizer, and fiber."""

    target_rep: int
    stabilizer_index: int
    fiber: GSet  # an L-set over lattice(...).subgroup_group(stabilizer_index)


def map_fiber_data(f: GMap) -> tuple[FiberDatum, ...]:
    """Per-orbit fibers of a map, each as a set over its orbit's stabilizer.

    Reassembling the data by induction recovers the source up to
    isomorphism; this is how maps translate into slice-category data.
    """
    Y = f.target
    lat = lattice(Y.group)
    out = []
    for rep in Y.orbit_reps():
        stab = Y.stabilizer(rep)
        l_idx = lat.index_of(stab)
        Lg = lat.subgroup_group(l_idx)
        pts = [x for x in range(f.source.size) if f.points[x] == rep]
        pos = {x: i for i, x in enumerate(pts)}
        action = tuple(
            tuple(pos[f.source.action[parent][x]] for x in pts)
            for parent in Lg.parent_elements
        )
        out.append(FiberDatum(rep, l_idx, GSet(Lg, action, labels=tuple(pts))))
    return tuple(out)


# -- map enumeration --------------------------------------------------------------


def equivariant_maps(X: GSet, Y: GSet, *, limit: Optional[int] = None) -> Iterator[GMap]:
    """All equivariant maps X -> Y in a deterministic order.

    A map is fixed by choosing, for each orbit representative, an image
    point whose stabilizer contains the representative's stabilizer.
    """
    reps = X.orbit_reps()
    stabs = [X.stabilizer(r) for r in reps]
    candidates = [
        [q for q in range(Y.size) if stabs[i] <= Y.stabilizer(q)]
        for i in range(len(reps))
    ]
    produced = 0
    for choice in itertools.product(*candidates):
        points = [-1] * X.size
        for oi, orbit in enumerate(X.orbits):
            for p in orbit:
                points[p] = Y.action[X.transversal_element(p)][choice[oi]]
        yield GMap(X, Y, tuple(points))
        produced += 1
        if limit is not None and produced >= limit:
            return


def count_equivariant_maps(X: GSet, Y: GSet) -> int:
    total = 1
    for rep in X.orbit_reps():
        stab = X.stabilizer(rep)
        total *= sum(1 for q in range(Y.size) if stab <= Y.stabilizer(q))
    return total
