"""Association schemes: constructors and axiom verification.

An association scheme on a vertex set X partitions X x X into relations
R_0..R_d whose 0/1 matrices A_j satisfy

    (1) A_0 = I,
    (2) sum_j A_j = J (the 1's partition X x X),
    (3) each A_j^T is again some A_{j'},
    (4) A_i A_j lies in span{A_0..A_d},

and the scheme is commutative when additionally A_i A_j = A_j A_i.

The canonical representation here is the n x n `relation` matrix of class
indices (relation[x][y] = j iff (x, y) in R_j); adjacency matrices are
derived 0/1 views.  All axiom checks run in exact integer arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from . import galois
from .errors import ValidationError
from .groups import FiniteGroup

# Grassmann vertex counts above this need an explicit opt-in.
DEFAULT_VERTEX_CAP = 5000


@dataclass(frozen=True)
class AssociationScheme:
    """An association scheme stored as its relation matrix.

    Attributes
    ----------
    n : int
        Number of vertices.
    d : int
        Number of non-identity classes (class indices run 0..d).
    relation : np.ndarray
        n x n integer matrix, relation[x][y] = class of the pair (x, y).
    labels : tuple of str, optional
        Per-class display names.
    """

    n: int
    d: int
    relation: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        rel = np.asarray(self.relation, dtype=np.int64)
        rel.setflags(write=False)
        object.__setattr__(self, "relation", rel)
        if rel.shape != (self.n, self.n):
            raise ValidationError(f"relation matrix must be {self.n}x{self.n}, got {rel.shape}")
        if rel.min() < 0 or rel.max() > self.d:
            raise ValidationError(
                f"class indices must lie in 0..{self.d}, found {rel.min()}..{rel.max()}"
            )
        if self.labels is not None and len(self.labels) != self.d + 1:
            raise ValidationError("labels must list one name per class")

    def adjacency(self, j: int) -> np.ndarray:
        """The 0/1 adjacency matrix A_j (a fresh integer array)."""
        if not 0 <= j <= self.d:
            raise ValidationError(f"class index {j} out of range 0..{self.d}")
        return (self.relation == j).astype(np.int64)

    def adjacency_matrices(self) -> list[np.ndarray]:
        return [self.adjacency(j) for j in range(self.d + 1)]

    def valencies(self) -> np.ndarray:
        """Row-constant class sizes k_j (validated schemes only)."""
        return np.array([int(np.sum(self.relation[0] == j)) for j in range(self.d + 1)])


@dataclass(frozen=True)
class AxiomReport:
    """Result of verify_axioms: violations carry (axiom id, witness indices).

    `commutative` is only meaningful when `passed` is True.
    """

    passed: bool
    violations: tuple[tuple[int, tuple[int, ...]], ...]
    commutative: bool


def verify_axioms(s: AssociationScheme) -> AxiomReport:
    """Check the four scheme axioms exactly; report rather than raise.

    Violation witnesses: axiom 1 -> (x, y), axiom 2 -> (missing class,),
    axiom 3 -> (x, y, x', y') with relation[x][y] = relation[x'][y'] but
    transposed classes differing, axiom 4 -> (i, j, x, y, x', y') where the
    product count differs between two pairs in one class.
    """
    rel = s.relation
    n, d = s.n, s.d
    violations: list[tuple[int, tuple[int, ...]]] = []

    diag = np.diagonal(rel)
    bad = np.nonzero(diag != 0)[0]
    if bad.size:
        violations.append((1, (int(bad[0]), int(bad[0]))))
    off_zero = (rel == 0) & ~np.eye(n, dtype=bool)
    if off_zero.any():
        x, y = np.argwhere(off_zero)[0]
        violations.append((1, (int(x), int(y))))

    present = np.unique(rel)
    for j in range(d + 1):
        if j not in present:
            violations.append((2, (j,)))

    # axiom 3: the transpose of class j must be exactly one class
    transpose_of = [None] * (d + 1)
    ok3 = True
    for j in range(d + 1):
        xs, ys = np.nonzero(rel == j)
        if xs.size == 0:
            continue
        back = rel[ys, xs]
        j2 = int(back[0])
        mismatch = np.nonzero(back != j2)[0]
        if mismatch.size:
            m = int(mismatch[0])
            violations.append((3, (int(xs[0]), int(ys[0]), int(xs[m]), int(ys[m]))))
            ok3 = False
        else:
            transpose_of[j] = j2

    ok4 = True
    if ok3 and not violations:
        mats = np.stack(s.adjacency_matrices())
        masks = [rel == k for k in range(d + 1)]
        for i in range(d + 1):
            if not ok4:
                break
            for j in range(d + 1):
                prod = mats[i] @ mats[j]
                for k in range(d + 1):
                    vals = prod[masks[k]]
                    if vals.size and (vals != vals[0]).any():
                        xs, ys = np.nonzero(masks[k])
                        m = int(np.nonzero(vals != vals[0])[0][0])
                        violations.append(
                            (4, (i, j, int(xs[0]), int(ys[0]), int(xs[m]), int(ys[m])))
                        )
                        ok4 = False
                        break
                if not ok4:
                    break

    passed = not violations
    commutative = False
    if passed:
        commutative = True
        for i in range(d + 1):
            for j in range(i + 1, d + 1):
                if not np.array_equal(mats[i] @ mats[j], mats[j] @ mats[i]):
                    commutative = False
                    break
            if not commutative:
                break
    return AxiomReport(passed=passed, violations=tuple(violations), commutative=commutative)


def _class_order_with_identity_first(identity: int, count: int) -> list[int]:
    """Class index for each raw label: identity -> 0, others keep their order."""
    mapping = [None] * count
    mapping[identity] = 0
    nxt = 1
    for x in range(count):
        if x != identity:
            mapping[x] = nxt
            nxt += 1
    return mapping


def build_group_scheme(g: FiniteGroup) -> AssociationScheme:
    """The scheme of left translations: (y, z) lies in the class of y * z^-1.

    One class per group element; class 0 is the identity, so d = |G| - 1
    and A_x A_y = A_{xy}, A_x^T = A_{x^-1}.
    """
    n = g.order
    class_of = _class_order_with_identity_first(g.identity, n)
    rel = np.empty((n, n), dtype=np.int64)
    for y in range(n):
        for z in range(n):
            rel[y, z] = class_of[g.cayley[y][g.inverse[z]]]
    return AssociationScheme(n=n, d=n - 1, relation=rel)


def build_conjugacy_scheme(g: FiniteGroup) -> AssociationScheme:
    """Merge the group-scheme classes along conjugacy classes of g.

    The class matrices B_j = sum_{x in C_j} A_x span the center of the
    group algebra, so the result is always commutative.
    """
    n = g.order
    classes = g.conjugacy_classes()
    class_of_elt = [None] * n
    for idx, cl in enumerate(classes):
        for x in cl:
            class_of_elt[x] = idx
    rel = np.empty((n, n), dtype=np.int64)
    for y in range(n):
        for z in range(n):
            rel[y, z] = class_of_elt[g.cayley[y][g.inverse[z]]]
    return AssociationScheme(n=n, d=len(classes) - 1, relation=rel)


def build_orbit_scheme(generators: list[list[int]], n: int) -> AssociationScheme:
    """Scheme of orbitals of a transitive permutation action on {0..n-1}.

    Classes are the orbits of the generated group acting diagonally on
    pairs; the diagonal orbit gets class 0.  Remaining classes are ordered
    by their lexicographically smallest pair.
    """
    if n < 1:
        raise ValidationError("point count must be positive")
    gens = []
    for p in generators:
        perm = [int(v) for v in p]
        if sorted(perm) != list(range(n)):
            raise ValidationError(f"{p} is not a permutation of 0..{n - 1}")
        gens.append(perm)
    if not gens:
        raise ValidationError("need at least one generator")

    # point orbits, for the transitivity precondition
    seen = [False] * n
    stack, orbit0 = [0], []
    seen[0] = True
    while stack:
        x = stack.pop()
        orbit0.append(x)
        for p in gens:
            if not seen[p[x]]:
                seen[p[x]] = True
                stack.append(p[x])
    if len(orbit0) != n:
        partition = []
        assigned = [False] * n
        for x in range(n):
            if assigned[x]:
                continue
            block, frontier = [], [x]
            assigned[x] = True
            while frontier:
                y = frontier.pop()
                block.append(y)
                for p in gens:
                    if not assigned[p[y]]:
                        assigned[p[y]] = True
                        frontier.append(p[y])
            partition.append(sorted(block))
        raise ValidationError(f"action is not transitive; point orbits: {partition}")

    rel = np.full((n, n), -1, dtype=np.int64)
    orbit_reps = []
    for x0, y0 in itertools.product(range(n), repeat=2):
        if rel[x0, y0] >= 0:
            continue
        members = [(x0, y0)]
        rel[x0, y0] = len(orbit_reps)
        while members:
            x, y = members.pop()
            for p in gens:
                if rel[p[x], p[y]] < 0:
                    rel[p[x], p[y]] = len(orbit_reps)
                    members.append((p[x], p[y]))
        orbit_reps.append((x0, y0))
    # renumber: diagonal orbit first, then by smallest representative
    order = sorted(range(len(orbit_reps)), key=lambda t: (orbit_reps[t] != (0, 0), orbit_reps[t]))
    renumber = np.empty(len(orbit_reps), dtype=np.int64)
    for new, old in enumerate(order):
        renumber[old] = new
    rel = renumber[rel]
    return AssociationScheme(n=n, d=len(orbit_reps) - 1, relation=rel)


def build_johnson(v: int, k: int) -> AssociationScheme:
    """Johnson scheme J(v, k) on the k-subsets of a v-set.

    Subsets a, b get class k - |a n b|.  Requires k <= v - k (J(v, k) and
    J(v, v-k) are isomorphic, so nothing is lost).
    """
    if k <= 0 or 2 * k > v:
        raise ValidationError(f"Johnson scheme needs 0 < k <= v/2, got v={v}, k={k}")
    subsets = [frozenset(c) for c in itertools.combinations(range(v), k)]
    n = comb(v, k)
    rel = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            rel[a, b] = k - len(subsets[a] & subsets[b])
    return AssociationScheme(n=n, d=k, relation=rel)


def build_grassmann(q: int, v: int, d: int,
                    vertex_cap: int = DEFAULT_VERTEX_CAP) -> AssociationScheme:
    """Grassmann scheme J_q(v, d) on the d-dim subspaces of GF(q)^v.

    Subspaces a, b get class d - dim(a n b), so class 0 is the identity
    relation (pairs with full intersection are equal subspaces).
    """
    if q not in galois.SUPPORTED_ORDERS:
        raise ValidationError(
            f"unsupported field order {q}; supported: {galois.SUPPORTED_ORDERS}"
        )
    if d <= 0 or 2 * d > v:
        raise ValidationError(f"Grassmann scheme needs 0 < d <= v/2, got v={v}, d={d}")
    n = galois.gaussian_binomial(v, d, q)
    if n > vertex_cap:
        raise ValidationError(
            f"J_{q}({v},{d}) has {n} vertices, above the cap of {vertex_cap}"
        )
    field = galois.GF(q)
    bases = galois.enumerate_subspaces(q, v, d)
    rel = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        rel[a, a] = 0
        for b in range(a + 1, n):
            j = d - galois.intersection_dim(field, bases[a], bases[b])
            rel[a, b] = j
            rel[b, a] = j
    return AssociationScheme(n=n, d=d, relation=rel)
