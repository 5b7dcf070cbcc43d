"""Finite groups, subgroups, and subgroup lattices with 0-based element ids.

A :class:`Group` is a validated multiplication table on dense element ids
``0..order-1``.  A :class:`SubgroupLattice` enumerates every subgroup,
orders them canonically (size, then lexicographic member set) and carries
containment, conjugacy, and sub-conjugacy data.  Everything downstream
(G-sets, transfer systems, bispans) indexes subgroups through the lattice,
so the canonical ordering here is what makes all reports reproducible.

All objects are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

DEFAULT_ORDER_CAP = 64


class GroupError(ValueError):
    """Invalid group data (non-associative table, bad generator, ...)."""


class ResourceCapError(RuntimeError):
    """A configured size cap (group order, enumeration size) was exceeded."""


class Group:
    """A finite group as a multiplication table on ids ``0..order-1``.

    ``parent`` / ``parent_elements`` are set when the group was derived from
    a subgroup of another group; ``parent_elements[i]`` is the parent-group
    id of local element ``i``.
    """

    __slots__ = (
        "name",
        "order",
        "identity",
        "_mul",
        "_inv",
        "parent",
        "parent_elements",
        "_parent_index",
        "_lattice",
    )

    def __init__(
        self,
        name: str,
        table: Sequence[Sequence[int]],
        *,
        parent: Optional["Group"] = None,
        parent_elements: Optional[tuple[int, ...]] = None,
        validate: bool = True,
    ) -> None:
        self.name = name
        self.order = len(table)
        self._mul = tuple(tuple(row) for row in table)
        if validate:
            self._validate_table()
        self.identity = self._find_identity()
        self._inv = self._find_inverses()
        self.parent = parent
        self.parent_elements = parent_elements
        self._parent_index = (
            {p: i for i, p in enumerate(parent_elements)} if parent_elements else None
        )
        self._lattice: Optional[SubgroupLattice] = None

    # -- basic operations ----------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def elements(self) -> range:
        return range(self.order)

    def conjugate(self, g: int, x: int) -> int:
        """g * x * g^-1."""
        return self._mul[self._mul[g][x]][self._inv[g]]

    def local_id(self, parent_id: int) -> int:
        """Translate a parent-group element id into this subgroup-group."""
        if self._parent_index is None:
            raise GroupError(f"group {self.name} has no parent embedding")
        return self._parent_index[parent_id]

    def is_abelian(self) -> bool:
        return all(
            self._mul[a][b] == self._mul[b][a]
            for a in range(self.order)
            for b in range(a)
        )

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != self.identity:
            x = self._mul[x][a]
            n += 1
        return n

    def __repr__(self) -> str:
        return f"Group({self.name!r}, order={self.order})"

    # -- validation ----------------------------------------------------------

    def _validate_table(self) -> None:
        n = self.order
        if n == 0:
            raise GroupError("empty multiplication table")
        for i, row in enumerate(self._mul):
            if len(row) != n:
                raise GroupError(f"table row {i} has length {len(row)}, expected {n}")
            for v in row:
                if not (0 <= v < n):
                    raise GroupError(f"table entry {v} out of range 0..{n - 1}")
        for a in range(n):
            for b in range(n):
                ab = self._mul[a][b]
                for c in range(n):
                    if self._mul[ab][c] != self._mul[a][self._mul[b][c]]:
                        raise GroupError(
                            f"non-associative at ({a},{b},{c})"
                        )

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(
                self._mul[e][x] == x and self._mul[x][e] == x
                for x in range(self.order)
            ):
                return e
        raise GroupError("no two-sided identity element")

    def _find_inverses(self) -> tuple[int, ...]:
        inv = []
        for a in range(self.order):
            for b in range(self.order):
                if self._mul[a][b] == self.identity and self._mul[b][a] == self.identity:
                    inv.append(b)
                    break
            else:
                raise GroupError(f"element {a} has no inverse")
        return tuple(inv)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its member element ids inside ``parent``."""

    parent: Group
    members: frozenset[int]

    def __post_init__(self) -> None:
        G = self.parent
        if G.identity not in self.members:
            raise GroupError("subgroup must contain the identity")
        for a in self.members:
            if G.inv(a) not in self.members:
                raise GroupError(f"subgroup not closed under inverse at {a}")
            for b in self.members:
                if G.mul(a, b) not in self.members:
                    raise GroupError(f"subgroup not closed under product at ({a},{b})")

    @property
    def order(self) -> int:
        return len(self.members)

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def __repr__(self) -> str:
        return f"Subgroup({sorted(self.members)})"


def closure_of(G: Group, seed: Iterable[int]) -> frozenset[int]:
    """Smallest subgroup of ``G`` containing ``seed``."""
    members = {G.identity}
    frontier = [G.identity]
    gens = [g for g in seed]
    for g in gens:
        if g not in members:
            members.add(g)
            frontier.append(g)
    while frontier:
        x = frontier.pop()
        for g in gens:
            for y in (G.mul(x, g), G.mul(g, x)):
                if y not in members:
                    members.add(y)
                    frontier.append(y)
    # saturate: products of accumulated members (covers non-generator pairs)
    changed = True
    while changed:
        changed = False
        for a in list(members):
            for b in list(members):
                p = G.mul(a, b)
                if p not in members:
                    members.add(p)
                    changed = True
    return frozenset(members)


class SubgroupLattice:
    """All subgroups of a group with containment/conjugacy/sub-conjugacy data.

    Subgroups are ordered by (size, lexicographic member tuple); all indices
    used across the package refer to this ordering.  Conjugacy classes are
    ordered by their least member index and represented by it.
    """

    def __init__(self, group: Group) -> None:
        self.group = group
        subs = _enumerate_subgroups(group)
        subs.sort(key=lambda m: (len(m), tuple(sorted(m))))
        self.subgroups: tuple[Subgroup, ...] = tuple(
            Subgroup(group, m) for m in subs
        )
        self._index = {s.members: i for i, s in enumerate(self.subgroups)}
        n = len(self.subgroups)
        self.bottom_index = 0
        self.top_index = n - 1

        # containment: leq[i][j] True iff subgroup i is contained in subgroup j
        self.leq = tuple(
            tuple(self.subgroups[i].members <= self.subgroups[j].members for j in range(n))
            for i in range(n)
        )
        # meet (intersection) table
        self.meet_table = tuple(
            tuple(
                self._index[frozenset(self.subgroups[i].members & self.subgroups[j].members)]
                for j in range(n)
            )
            for i in range(n)
        )
        # conjugation action of each group element on subgroup indices
        G = group
        self.conj_maps = tuple(
            tuple(
                self._index[frozenset(G.conjugate(g, x) for x in self.subgroups[i].members)]
                for i in range(n)
            )
            for g in G.elements()
        )

        # conjugacy classes, ordered by least member
        class_of = [-1] * n
        classes: list[tuple[int, ...]] = []
        for i in range(n):
            if class_of[i] >= 0:
                continue
            orbit = sorted({self.conj_maps[g][i] for g in G.elements()})
            c = len(classes)
            for j in orbit:
                class_of[j] = c
            classes.append(tuple(orbit))
        self.conjugacy_classes: tuple[tuple[int, ...], ...] = tuple(classes)
        self.class_of: tuple[int, ...] = tuple(class_of)
        self.class_reps: tuple[int, ...] = tuple(c[0] for c in classes)

        # sub-conjugacy on class indices: some member of c1 inside some member of c2
        self.subconjugacy: frozenset[tuple[int, int]] = frozenset(
            (c1, c2)
            for c1 in range(len(classes))
            for c2 in range(len(classes))
            if any(
                self.leq[i][j]
                for i in self.conjugacy_classes[c1]
                for j in self.conjugacy_classes[c2]
            )
        )

        self._sub_groups: dict[int, Group] = {}

    def __len__(self) -> int:
        return len(self.subgroups)

    def index_of(self, members: Iterable[int]) -> int:
        return self._index[frozenset(members)]

    def contains(self, inner: int, outer: int) -> bool:
        return self.leq[inner][outer]

    def meet(self, i: int, j: int) -> int:
        return self.meet_table[i][j]

    def conjugate_subgroup(self, g: int, i: int) -> int:
        return self.conj_maps[g][i]

    def is_normal(self, i: int) -> bool:
        return len(self.conjugacy_classes[self.class_of[i]]) == 1

    def subgroups_below(self, h: int) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.subgroups)) if self.leq[i][h])

    def comparable_pairs(self) -> tuple[tuple[int, int], ...]:
        """All (k, h) with k properly contained in h."""
        n = len(self.subgroups)
        return tuple(
            (k, h) for h in range(n) for k in range(n) if k != h and self.leq[k][h]
        )

    def subgroup_name(self, i: int) -> str:
        s = self.subgroups[i]
        if i == self.bottom_index:
            return "e"
        if i == self.top_index:
            return self.group.name
        return f"#{i}|{{{','.join(map(str, s.sorted_members()))}}}"

    def subgroup_group(self, i: int) -> Group:
        """The subgroup at index ``i`` as a Group of its own (cached).

        Local element ids are the members in increasing parent-id order;
        ``parent_elements`` records the embedding.
        """
        cached = self._sub_groups.get(i)
        if cached is not None:
            return cached
        G = self.group
        members = self.subgroups[i].sorted_members()
        local = {p: k for k, p in enumerate(members)}
        table = [[local[G.mul(a, b)] for b in members] for a in members]
        sub = Group(
            f"{G.name}[{self.subgroup_name(i)}]",
            table,
            parent=G,
            parent_elements=members,
            validate=False,
        )
        self._sub_groups[i] = sub
        return sub


def _enumerate_subgroups(G: Group) -> list[frozenset[int]]:
    """All subgroups by breadth-first closure extension.

    Start from all cyclic subgroups and repeatedly extend each known
    subgroup by one outside element; every subgroup arises this way since
    it is generated by finitely many elements added one at a time.
    """
    found: set[frozenset[int]] = {frozenset({G.identity})}
    queue: list[frozenset[int]] = [frozenset({G.identity})]
    for a in G.elements():
        c = closure_of(G, [a])
        if c not in found:
            found.add(c)
            queue.append(c)
    while queue:
        S = queue.pop()
        if len(S) == G.order:
            continue
        for a in G.elements():
            if a in S:
                continue
            T = closure_of(G, list(S) + [a])
            if T not in found:
                found.add(T)
                queue.append(T)
    return list(found)


def lattice(G: Group) -> SubgroupLattice:
    """Subgroup lattice of ``G`` (cached on the group object)."""
    if G._lattice is None:
        G._lattice = SubgroupLattice(G)
    return G._lattice


# -- constructors -------------------------------------------------------------


def build_group_from_table(
    name: str, table: Sequence[Sequence[int]], *, order_cap: int = DEFAULT_ORDER_CAP
) -> Group:
    """Validated group from a Cayley table."""
    if len(table) > order_cap:
        raise ResourceCapError(
            f"group order {len(table)} exceeds cap {order_cap}"
        )
    return Group(name, table)


def build_group_from_permutations(
    name: str,
    generators: Sequence[Sequence[int]],
    *,
    order_cap: int = DEFAULT_ORDER_CAP,
) -> Group:
    """Group generated by permutations of a common finite set.

    Elements are the closure of the generators under composition, with ids
    assigned in sorted-tuple order.  Composition convention:
    ``(p*q)(x) = p(q(x))``.
    """
    if not generators:
        raise GroupError("need at least one generator")
    degree = len(generators[0])
    gens: list[tuple[int, ...]] = []
    for gi, g in enumerate(generators):
        t = tuple(g)
        if len(t) != degree or sorted(t) != list(range(degree)):
            raise GroupError(f"generator {gi} is not a permutation of 0..{degree - 1}")
        gens.append(t)
    ident = tuple(range(degree))
    elems = {ident}
    frontier = [ident]
    while frontier:
        p = frontier.pop()
        for g in gens:
            q = tuple(p[g[x]] for x in range(degree))
            if q not in elems:
                if len(elems) >= order_cap:
                    raise ResourceCapError(
                        f"permutation closure exceeds order cap {order_cap}"
                    )
                elems.add(q)
                frontier.append(q)
    ordered = sorted(elems)
    index = {p: i for i, p in enumerate(ordered)}
    table = [
        [index[tuple(p[q[x]] for x in range(degree))] for q in ordered]
        for p in ordered
    ]
    return Group(name, table)


def _cyclic_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def _product_table(tables: list[list[list[int]]]) -> list[list[int]]:
    sizes = [len(t) for t in tables]
    total = 1
    for s in sizes:
        total *= s

    def split(x: int) -> list[int]:
        out = []
        for s in reversed(sizes):
            out.append(x % s)
            x //= s
        return list(reversed(out))

    def join(parts: list[int]) -> int:
        x = 0
        for p, s in zip(parts, sizes):
            x = x * s + p
        return x

    table = []
    for a in range(total):
        pa = split(a)
        row = []
        for b in range(total):
            pb = split(b)
            row.append(join([t[x][y] for t, x, y in zip(tables, pa, pb)]))
        table.append(row)
    return table


def _dihedral_table(n: int) -> list[list[int]]:
    # ids 0..n-1 are rotations r^i, ids n..2n-1 are reflections r^i s;
    # (r^a s^e)(r^b s^d) = r^(a + (-1)^e b) s^(e+d)
    def enc(a: int, e: int) -> int:
        return a % n + n * e

    table = []
    for x in range(2 * n):
        a, e = x % n, x // n
        row = []
        for y in range(2 * n):
            b, d = y % n, y // n
            row.append(enc(a + (b if e == 0 else -b), (e + d) % 2))
        table.append(row)
    return table


def _quaternion8_table() -> list[list[int]]:
    # ids: 0:1, 1:-1, 2:i, 3:-i, 4:j, 5:-j, 6:k, 7:-k
    basis = {0: (1, 0), 1: (-1, 0), 2: (1, 1), 3: (-1, 1), 4: (1, 2), 5: (-1, 2), 6: (1, 3), 7: (-1, 3)}
    rev = {v: k for k, v in basis.items()}
    # axis multiplication table for 1,i,j,k with signs
    axis_mul = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    table = []
    for x in range(8):
        sx, ax = basis[x]
        row = []
        for y in range(8):
            sy, ay = basis[y]
            s, a = axis_mul[(ax, ay)]
            row.append(rev[(s * sx * sy, a)])
        table.append(row)
    return table


_BUILTIN_CYCLIC = re.compile(r"^C(\d+)$")
_BUILTIN_PRODUCT = re.compile(r"^C(\d+)(?:xC(\d+))+$")
_BUILTIN_DIHEDRAL = re.compile(r"^D(\d+)$")
_BUILTIN_SYMMETRIC = re.compile(r"^S(\d+)$")


def builtin_group(name: str, *, order_cap: int = DEFAULT_ORDER_CAP) -> Group:
    """Named standard groups with documented canonical element numbering.

    Supported names:

    * ``C1``/``trivial`` and ``Cn`` -- cyclic of order n; id k is the k-th
      power of the generator.
    * ``CnxCm[xC...]`` -- products of cyclics; ids in row-major mixed radix.
    * ``Dn`` -- dihedral of order 2n; ids 0..n-1 rotations, n..2n-1
      reflections.
    * ``Q8`` -- quaternion group; ids 1, -1, i, -i, j, -j, k, -k.
    * ``Sn`` (n <= 4) -- symmetric group; ids enumerate the permutation
      tuples of range(n) in lexicographic order.
    """
    label = name.strip()
    if label in ("trivial", "C1"):
        return build_group_from_table("C1", [[0]], order_cap=order_cap)
    m = _BUILTIN_CYCLIC.match(label)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise GroupError(f"bad cyclic order {n}")
        if n > order_cap:
            raise ResourceCapError(f"order {n} exceeds cap {order_cap}")
        return Group(label, _cyclic_table(n))
    if _BUILTIN_PRODUCT.match(label):
        parts = [int(p[1:]) for p in label.split("x")]
        total = 1
        for p in parts:
            if p < 1:
                raise GroupError(f"bad cyclic factor {p}")
            total *= p
        if total > order_cap:
            raise ResourceCapError(f"order {total} exceeds cap {order_cap}")
        return Group(label, _product_table([_cyclic_table(p) for p in parts]))
    m = _BUILTIN_DIHEDRAL.match(label)
    if m:
        n = int(m.group(1))
        if n < 2:
            raise GroupError("dihedral parameter must be >= 2")
        if 2 * n > order_cap:
            raise ResourceCapError(f"order {2 * n} exceeds cap {order_cap}")
        return Group(label, _dihedral_table(n))
    if label == "Q8":
        return Group(label, _quaternion8_table())
    m = _BUILTIN_SYMMETRIC.match(label)
    if m:
        n = int(m.group(1))
        if not (1 <= n <= 4):
            raise GroupError("symmetric groups supported for n <= 4 only")
        perms = sorted(itertools.permutations(range(n)))
        index = {p: i for i, p in enumerate(perms)}
        table = [
            [index[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms
        ]
        return Group(label, table)
    raise GroupError(f"unknown builtin group name {name!r}")
