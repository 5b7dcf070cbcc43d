"""Transfer systems: which orbits H/K admit transfers and norms.

A :class:`TransferSystem` stores the relation "H/K is admissible" as a set
of subgroup-index pairs ``(K, H)`` on a :class:`SubgroupLattice`, closed
under reflexivity, conjugation, restriction (pullback stability), and
transitivity (self-induction).  Edges are stored on all subgroup pairs, not
just class representatives: the groups involved are tiny and the redundancy
makes restriction-closure checks one-line lookups.

The same object stands in for the three equivalent formulations in use
(indexing system / indexing category / transfer system); the translations
are the admissibility queries below rather than separate data types.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .groups import ResourceCapError, SubgroupLattice
from .gsets import GSet, GMap, OrbitType, map_fiber_data

Edge = tuple[int, int]


class TransferSystemError(ValueError):
    """Invalid edge data for a transfer system."""


@dataclass(frozen=True)
class AdmissibleSetQuery:
    """Result of an admissibility query, with the first offending orbit."""

    admissible: bool
    offending_orbit: Optional[OrbitType] = None


@dataclass(frozen=True)
class TransferSystem:
    lattice: SubgroupLattice
    edges: frozenset[Edge]

    def has_edge(self, k: int, h: int) -> bool:
        return (k, h) in self.edges

    def nontrivial_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(e for e in self.edges if e[0] != e[1]))

    def encode(self) -> tuple[Edge, ...]:
        """Canonical encoding: the sorted edge tuple."""
        return tuple(sorted(self.edges))

    def is_trivial(self) -> bool:
        return not self.nontrivial_edges()

    def is_complete(self) -> bool:
        return self.edges == _all_edges(self.lattice)

    def __repr__(self) -> str:
        return f"TransferSystem({self.lattice.group.name}, edges={sorted(self.nontrivial_edges())})"


def _all_edges(lat: SubgroupLattice) -> frozenset[Edge]:
    n = len(lat.subgroups)
    return frozenset((k, h) for h in range(n) for k in range(n) if lat.leq[k][h])


def closure(lat: SubgroupLattice, seed: Iterable[Edge]) -> frozenset[Edge]:
    """Least closed edge set containing ``seed``.

    Iterates the four closure rules to a fixed point: reflexivity,
    conjugation by every group element, restriction (K, H) & L <= H =>
    (K n L, L), and transitivity.
    """
    n = len(lat.subgroups)
    edges: set[Edge] = {(i, i) for i in range(n)}
    for (k, h) in seed:
        if not lat.leq[k][h]:
            raise TransferSystemError(f"edge ({k}, {h}): {k} is not a subgroup of {h}")
        edges.add((k, h))
    G = lat.group
    changed = True
    while changed:
        changed = False
        for (k, h) in list(edges):
            for g in G.elements():
                e = (lat.conj_maps[g][k], lat.conj_maps[g][h])
                if e not in edges:
                    edges.add(e)
                    changed = True
            for l in range(n):
                if lat.leq[l][h]:
                    e = (lat.meet_table[k][l], l)
                    if e not in edges:
                        edges.add(e)
                        changed = True
            for (k2, h2) in list(edges):
                if k2 == h:
                    e = (k, h2)
                    if e not in edges:
                        edges.add(e)
                        changed = True
    return frozenset(edges)


def is_closed(lat: SubgroupLattice, edges: frozenset[Edge]) -> bool:
    n = len(lat.subgroups)
    if any((i, i) not in edges for i in range(n)):
        return False
    for (k, h) in edges:
        if not lat.leq[k][h]:
            return False
        for g in lat.group.elements():
            if (lat.conj_maps[g][k], lat.conj_maps[g][h]) not in edges:
                return False
        for l in range(n):
            if lat.leq[l][h] and (lat.meet_table[k][l], l) not in edges:
                return False
    for (k, h) in edges:
        for (k2, h2) in edges:
            if k2 == h and (k, h2) not in edges:
                return False
    return True


def transfer_system_from_edges(
    lat: SubgroupLattice,
    seed: Iterable[Edge],
    *,
    require_closed: bool = False,
) -> TransferSystem:
    """The least transfer system containing the seed edges.

    With ``require_closed`` the input must already be closed and is rejected
    otherwise (used when reading user data that claims to be a full system).
    """
    seed = list(seed)
    closed = closure(lat, seed)
    if require_closed:
        given = frozenset(seed) | frozenset((i, i) for i in range(len(lat.subgroups)))
        if given != closed:
            missing = sorted(closed - given)
            raise TransferSystemError(
                f"edge set is not closed; closure adds {missing}"
            )
    return TransferSystem(lat, closed)


def trivial_system(lat: SubgroupLattice) -> TransferSystem:
    return TransferSystem(lat, frozenset((i, i) for i in range(len(lat.subgroups))))


def complete_system(lat: SubgroupLattice) -> TransferSystem:
    return TransferSystem(lat, _all_edges(lat))


# -- admissibility ---------------------------------------------------------------


def _to_parent_index(lat: SubgroupLattice, group, members: frozenset[int]) -> int:
    """Index in ``lat`` of a subgroup given by local ids of a subgroup-group."""
    if group is lat.group:
        return lat.index_of(members)
    return lat.index_of(frozenset(group.parent_elements[m] for m in members))


def is_admissible_set(O: TransferSystem, h: int, T: GSet) -> AdmissibleSetQuery:
    """Is the H-set ``T`` admissible: does every orbit stabilizer transfer to H?

    ``T`` lives over ``O.lattice.subgroup_group(h)`` (or over the ambient
    group itself when ``h`` is the top index).
    """
    lat = O.lattice
    counts: dict[int, int] = {}
    order = []
    for rep in T.orbit_reps():
        stab_idx = _to_parent_index(lat, T.group, T.stabilizer(rep))
        if stab_idx not in counts:
            order.append(stab_idx)
        counts[stab_idx] = counts.get(stab_idx, 0) + 1
    for stab_idx in order:
        if (stab_idx, h) not in O.edges:
            cls = lat.class_of[stab_idx]
            return AdmissibleSetQuery(False, OrbitType(cls, counts[stab_idx]))
    return AdmissibleSetQuery(True, None)


def admissible_orbit_types(O: TransferSystem, h: int) -> tuple[int, ...]:
    """Subgroup indices M <= H (one per H-conjugacy class) with an edge to H.

    These index the admissible transitive H-sets H/M; classes are taken in
    the subgroup-group's own lattice so the answer is exact for H.
    """
    from .groups import lattice as _lattice

    lat = O.lattice
    Hg = lat.subgroup_group(h)
    hlat = _lattice(Hg)
    out = []
    for rep_local in hlat.class_reps:
        members = hlat.subgroups[rep_local].members
        parent_idx = _to_parent_index(lat, Hg, members)
        if (parent_idx, h) in O.edges:
            out.append(rep_local)
    return tuple(out)


def restrict_system(O: TransferSystem, h: int) -> TransferSystem:
    """The restricted system on the subgroup-group of H."""
    from .groups import lattice as _lattice

    lat = O.lattice
    Hg = lat.subgroup_group(h)
    hlat = _lattice(Hg)
    edges = set()
    for a in range(len(hlat.subgroups)):
        pa = _to_parent_index(lat, Hg, hlat.subgroups[a].members)
        for b in range(len(hlat.subgroups)):
            if not hlat.leq[a][b]:
                continue
            pb = _to_parent_index(lat, Hg, hlat.subgroups[b].members)
            if (pa, pb) in O.edges:
                edges.add((a, b))
    return TransferSystem(hlat, frozenset(edges))


def map_in_indexing_category(O: TransferSystem, f: GMap) -> bool:
    """Membership of an equivariant map in the indexing category of ``O``.

    A map belongs iff over each target orbit with stabilizer L the fiber is
    an admissible L-set; this is the slice-category translation of
    admissibility.  The map must live over ``O``'s group.
    """
    if f.source.group is not O.lattice.group:
        raise TransferSystemError("map does not live over the system's group")
    lat = O.lattice
    for datum in map_fiber_data(f):
        for rep in datum.fiber.orbit_reps():
            stab_idx = _to_parent_index(lat, datum.fiber.group, datum.fiber.stabilizer(rep))
            if (stab_idx, datum.stabilizer_index) not in O.edges:
                return False
    return True


# -- lattice operations ------------------------------------------------------------


def _check_same_lattice(O1: TransferSystem, O2: TransferSystem) -> None:
    if O1.lattice is not O2.lattice:
        raise TransferSystemError("transfer systems live on different lattices")


def meet(O1: TransferSystem, O2: TransferSystem) -> TransferSystem:
    """Greatest lower bound; edge intersection is already closed."""
    _check_same_lattice(O1, O2)
    return TransferSystem(O1.lattice, O1.edges & O2.edges)


def join(O1: TransferSystem, O2: TransferSystem) -> TransferSystem:
    """Least upper bound: the closure of the edge union."""
    _check_same_lattice(O1, O2)
    return TransferSystem(O1.lattice, closure(O1.lattice, O1.edges | O2.edges))


def leq(O1: TransferSystem, O2: TransferSystem) -> bool:
    _check_same_lattice(O1, O2)
    return O1.edges <= O2.edges


# -- enumeration --------------------------------------------------------------------


def enumerate_transfer_systems(
    lat: SubgroupLattice, *, max_systems: int = 100_000
) -> tuple[TransferSystem, ...]:
    """Every transfer system on the lattice, in canonical encoding order.

    Breadth-first: starting from the trivial system, extend each known
    system by one comparable pair and close; every system is reached since
    it is the closure of its own edges added one at a time.
    """
    candidates = lat.comparable_pairs()
    start = closure(lat, [])
    seen: set[frozenset[Edge]] = {start}
    queue = [start]
    while queue:
        edges = queue.pop()
        for e in candidates:
            if e in edges:
                continue
            bigger = closure(lat, edges | {e})
            if bigger not in seen:
                if len(seen) >= max_systems:
                    raise ResourceCapError(
                        f"more than {max_systems} transfer systems; raise the cap"
                    )
                seen.add(bigger)
                queue.append(bigger)
    systems = [TransferSystem(lat, e) for e in seen]
    systems.sort(key=lambda s: s.encode())
    return tuple(systems)
