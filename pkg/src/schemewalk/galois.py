"""Arithmetic over the small finite fields GF(q), q in {2, 3, 4, 5, 7, 8, 9}.

Field elements are integers 0..q-1.  For prime q the integer IS the
residue; for prime powers it encodes the coefficient vector of the
polynomial basis in base p (so GF(4) element 3 = x + 1).  Multiplication
goes through log/antilog tables built from a fixed primitive element, so
all arithmetic stays exact integer table lookups.
"""

from __future__ import annotations

import itertools

from .errors import ValidationError

# q -> (p, k, irreducible poly coefficients c_0..c_{k-1} with x^k = -(c_0 + c_1 x + ...))
_FIELD_SPECS = {
    2: (2, 1, ()),
    3: (3, 1, ()),
    5: (5, 1, ()),
    7: (7, 1, ()),
    4: (2, 2, (1, 1)),      # x^2 + x + 1
    8: (2, 3, (1, 1, 0)),   # x^3 + x + 1
    9: (3, 2, (1, 0)),      # x^2 + 1
}

SUPPORTED_ORDERS = tuple(sorted(_FIELD_SPECS))


class GF:
    """GF(q) with table-driven add/mul; instances are cached per order."""

    _cache: dict[int, "GF"] = {}

    def __new__(cls, q: int):
        if q in cls._cache:
            return cls._cache[q]
        if q not in _FIELD_SPECS:
            raise ValidationError(f"unsupported field order {q}; supported: {SUPPORTED_ORDERS}")
        self = super().__new__(cls)
        self._init(q)
        cls._cache[q] = self
        return self

    def _init(self, q: int):
        p, k, poly = _FIELD_SPECS[q]
        self.q = q
        self.p = p
        self.degree = k

        def digits(a):
            return tuple((a // p**i) % p for i in range(k))

        def undigits(vec):
            return sum(v * p**i for i, v in enumerate(vec))

        self._add = [[undigits(tuple((x + y) % p for x, y in zip(digits(a), digits(b))))
                      for b in range(q)] for a in range(q)]
        self._neg = [undigits(tuple((-x) % p for x in digits(a))) for a in range(q)]

        def poly_mul(a, b):
            # schoolbook product of the coefficient vectors, reduced by the
            # defining relation x^k = -(c_0 + c_1 x + ... + c_{k-1} x^{k-1})
            da, db = digits(a), digits(b)
            prod = [0] * (2 * k - 1)
            for i, x in enumerate(da):
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
            for deg in range(2 * k - 2, k - 1, -1):
                c = prod[deg]
                if c:
                    prod[deg] = 0
                    for i, ci in enumerate(poly):
                        prod[deg - k + i] = (prod[deg - k + i] - c * ci) % p
            return undigits(tuple(prod[:k]))

        # find a primitive element and fill log/antilog (for q = 2 the
        # multiplicative group is trivial and 1 generates it)
        for g in range(1 if q == 2 else 2, q):
            power, seen = 1, []
            for _ in range(q - 1):
                seen.append(power)
                power = poly_mul(power, g)
            if len(set(seen)) == q - 1:
                break
        else:  # pragma: no cover - the listed fields all have generators
            raise ValidationError(f"no primitive element found for GF({q})")

        self.antilog = seen                       # antilog[i] = g**i
        self.log = [0] * q                        # log[antilog[i]] = i
        for i, v in enumerate(seen):
            self.log[v] = i
        self._poly_mul = poly_mul

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.antilog[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in a field")
        return self.antilog[(-self.log[a]) % (self.q - 1)]


def gaussian_binomial(v: int, d: int, q: int) -> int:
    """Number of d-dimensional subspaces of GF(q)^v, as an exact integer."""
    if d < 0 or d > v:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (v - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def rref(field: GF, rows: list[list[int]]) -> list[list[int]]:
    """Reduced row echelon form over `field`; returns only the nonzero rows."""
    m = [row[:] for row in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivot_row = 0
    for col in range(n_cols):
        pivot = next((r for r in range(pivot_row, n_rows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[pivot_row], m[pivot] = m[pivot], m[pivot_row]
        scale = field.inv(m[pivot_row][col])
        m[pivot_row] = [field.mul(scale, x) for x in m[pivot_row]]
        for r in range(n_rows):
            if r != pivot_row and m[r][col] != 0:
                c = m[r][col]
                m[r] = [field.sub(x, field.mul(c, y)) for x, y in zip(m[r], m[pivot_row])]
        pivot_row += 1
        if pivot_row == n_rows:
            break
    return [row for row in m[:pivot_row] if any(row)]


def rank(field: GF, rows: list[list[int]]) -> int:
    return len(rref(field, rows))


def enumerate_subspaces(q: int, v: int, d: int) -> list[tuple[tuple[int, ...], ...]]:
    """All d-dimensional subspaces of GF(q)^v as canonical RREF bases.

    Deterministic order: pivot columns lexicographically, then free entries
    counted in base q, row-major.
    """
    field = GF(q)
    if d == 0:
        return [()]
    out = []
    for pivots in itertools.combinations(range(v), d):
        # free positions: to the right of each row's pivot, excluding later pivot columns
        free = [(r, c) for r in range(d) for c in range(pivots[r] + 1, v) if c not in pivots]
        for values in itertools.product(range(q), repeat=len(free)):
            mat = [[0] * v for _ in range(d)]
            for r, pc in enumerate(pivots):
                mat[r][pc] = 1
            for (r, c), val in zip(free, values):
                mat[r][c] = val
            out.append(tuple(tuple(row) for row in mat))
    assert len(out) == gaussian_binomial(v, d, q)
    return out


def intersection_dim(field: GF, basis_a, basis_b) -> int:
    """dim(A ∩ B) = dim A + dim B - rank of the stacked bases."""
    stacked = [list(row) for row in basis_a] + [list(row) for row in basis_b]
    return len(basis_a) + len(basis_b) - rank(field, stacked)
