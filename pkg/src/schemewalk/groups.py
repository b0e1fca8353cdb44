"""Finite groups given by explicit Cayley tables.

Elements are integers ``0..order-1``; ``cayley[x][y]`` is the index of the
product x*y.  Built-in constructors cover the cyclic, symmetric, dihedral
and quaternion families; anything else can be supplied as a raw table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ValidationError

# Full associativity is cubic in the order; beyond this we trust the
# permutation/identity/inverse checks.
_ASSOC_CHECK_MAX_ORDER = 64


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group as a Cayley table.

    Attributes
    ----------
    order : int
        Number of elements.
    cayley : tuple of tuples
        ``cayley[x][y]`` = index of the product x*y.
    name : str
        Human-readable tag used in error messages and CLI output.
    identity : int
        Index of the neutral element (derived).
    inverse : tuple of int
        ``inverse[x]`` = index of x**-1 (derived).
    """

    order: int
    cayley: tuple[tuple[int, ...], ...]
    name: str = "group"
    identity: int = field(init=False)
    inverse: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        n = self.order
        if n <= 0:
            raise ValidationError("group order must be positive")
        if len(self.cayley) != n or any(len(row) != n for row in self.cayley):
            raise ValidationError(f"Cayley table must be {n}x{n}")
        for x, row in enumerate(self.cayley):
            if sorted(row) != list(range(n)):
                raise ValidationError(f"row {x} of the Cayley table is not a permutation")
        for y in range(n):
            col = [self.cayley[x][y] for x in range(n)]
            if sorted(col) != list(range(n)):
                raise ValidationError(f"column {y} of the Cayley table is not a permutation")

        identity = None
        for e in range(n):
            if all(self.cayley[e][x] == x and self.cayley[x][e] == x for x in range(n)):
                identity = e
                break
        if identity is None:
            raise ValidationError("Cayley table has no identity element")

        inverse = [None] * n
        for x in range(n):
            for y in range(n):
                if self.cayley[x][y] == identity and self.cayley[y][x] == identity:
                    inverse[x] = y
                    break
            if inverse[x] is None:
                raise ValidationError(f"element {x} has no inverse")

        if n <= _ASSOC_CHECK_MAX_ORDER:
            c = self.cayley
            for x, y, z in itertools.product(range(n), repeat=3):
                if c[c[x][y]][z] != c[x][c[y][z]]:
                    raise ValidationError(
                        f"associativity fails on triple ({x}, {y}, {z}): "
                        f"({x}*{y})*{z} = {c[c[x][y]][z]} != {c[x][c[y][z]]} = {x}*({y}*{z})"
                    )

        object.__setattr__(self, "identity", identity)
        object.__setattr__(self, "inverse", tuple(inverse))

    def mul(self, x: int, y: int) -> int:
        return self.cayley[x][y]

    def is_abelian(self) -> bool:
        c = self.cayley
        return all(c[x][y] == c[y][x] for x in range(self.order) for y in range(x + 1, self.order))

    def conjugacy_classes(self) -> list[list[int]]:
        """Conjugacy classes, identity class first, then by smallest member."""
        c, n = self.cayley, self.order
        seen = [False] * n
        classes = []
        for x in range(n):
            if seen[x]:
                continue
            orbit = sorted({c[c[g][x]][self.inverse[g]] for g in range(n)})
            for y in orbit:
                seen[y] = True
            classes.append(orbit)
        classes.sort(key=lambda cl: (cl != [self.identity], cl[0]))
        return classes


def from_table(cayley, name: str = "group") -> FiniteGroup:
    """Build and validate a group from a nested-list Cayley table."""
    table = tuple(tuple(int(v) for v in row) for row in cayley)
    return FiniteGroup(order=len(table), cayley=table, name=name)


def cyclic(n: int) -> FiniteGroup:
    """Z_n with addition mod n; element k is the residue k."""
    if n < 1:
        raise ValidationError("cyclic group needs n >= 1")
    table = [[(x + y) % n for y in range(n)] for x in range(n)]
    return from_table(table, name=f"Z_{n}")


def symmetric(n: int) -> FiniteGroup:
    """S_n on {0..n-1}; elements are permutations in lexicographic order."""
    if n < 1:
        raise ValidationError("symmetric group needs n >= 1")
    if n > 5:
        raise ValidationError("symmetric group supported up to n = 5 (order 120)")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(i) = p(q(i)): apply q first, then p.
    table = [[index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return from_table(table, name=f"S_{n}")


def dihedral(n: int) -> FiniteGroup:
    """D_n of order 2n: indices 0..n-1 are rotations r^i, n..2n-1 are s*r^i."""
    if n < 1:
        raise ValidationError("dihedral group needs n >= 1")

    def mul(a, b):
        ka, ia = divmod(a, n)[0], a % n
        kb, ib = divmod(b, n)[0], b % n
        if kb == 0:
            return ka * n + (ia + ib) % n
        return (ka ^ 1) * n + (ib - ia) % n

    table = [[mul(a, b) for b in range(2 * n)] for a in range(2 * n)]
    return from_table(table, name=f"D_{n}")


def quaternion() -> FiniteGroup:
    """Q_8 = {1, -1, i, -i, j, -j, k, -k} in that element order."""
    # (sign, axis) with axis 0='1', 1='i', 2='j', 3='k'; index = 2*axis + (sign<0)
    axis_mul = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (2, 0): (1, 2), (3, 0): (1, 3),
        (1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
        (1, 2): (1, 3), (2, 3): (1, 1), (3, 1): (1, 2),
        (2, 1): (-1, 3), (3, 2): (-1, 1), (1, 3): (-1, 2),
    }

    def mul(a, b):
        ax_a, neg_a = divmod(a, 2)[0], a % 2
        ax_b, neg_b = divmod(b, 2)[0], b % 2
        sign, axis = axis_mul[(ax_a, ax_b)]
        neg = (neg_a + neg_b + (sign < 0)) % 2
        return 2 * axis + neg

    table = [[mul(a, b) for b in range(8)] for a in range(8)]
    return from_table(table, name="Q_8")


_BUILTIN_FACTORIES = {
    "s3": lambda: symmetric(3),
    "s4": lambda: symmetric(4),
    "q8": quaternion,
}


def builtin(name: str) -> FiniteGroup:
    """Look up a named group: z<n>, s3, s4, d<n>, q8."""
    key = name.strip().lower()
    if key in _BUILTIN_FACTORIES:
        return _BUILTIN_FACTORIES[key]()
    if key.startswith("z") and key[1:].isdigit():
        return cyclic(int(key[1:]))
    if key.startswith("d") and key[1:].isdigit():
        return dihedral(int(key[1:]))
    raise ValidationError(f"unknown group name {name!r} (try z<n>, s3, s4, d<n>, q8)")
