"""Exact integer and rational linear algebra.

Smith normal form with full transform matrices, abelian quotient
invariants, co-invariant modules of matrix actions, symplectic form checks,
saturated integral kernels, and rational averaging projectors.

All arithmetic is exact: Python integers are unbounded and rational work
uses ``fractions.Fraction``.  There is no floating point anywhere in this
module or its callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, row-major tuples."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = self.entries
        if not rows or not rows[0]:
            raise ValueError("matrix must have positive dimensions")
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise ValueError("ragged rows")
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise ValueError(f"non-integer entry {x!r}")

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(tuple((0,) * cols for _ in range(rows)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, idx: tuple[int, int]) -> int:
        return self.entries[idx[0]][idx[1]]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries)))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch {self.cols} vs {other.rows}")
        bt = tuple(zip(*other.entries))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(arow, bcol)) for bcol in bt)
                for arow in self.entries
            )
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-a for a in r) for r in self.entries))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * a for a in r) for r in self.entries))

    def apply(self, vec) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * x for a, x in zip(r, vec)) for r in self.entries)

    def trace(self) -> int:
        if self.rows != self.cols:
            raise ValueError("trace of non-square matrix")
        return sum(self.entries[i][i] for i in range(self.rows))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def det(self) -> int:
        """Fraction-free Bareiss determinant."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        m = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                pivot_row = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if pivot_row is None:
                    return 0
                m[k], m[pivot_row] = m[pivot_row], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and self.det() in (1, -1)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [list(r) for r in self.entries]}

    @classmethod
    def from_json(cls, doc: dict) -> "IntMatrix":
        m = cls.from_rows(doc["entries"])
        if m.rows != doc["rows"] or m.cols != doc["cols"]:
            raise ValueError("matrix dimensions disagree with entries")
        return m

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.entries]})"


def hstack(mats) -> IntMatrix:
    mats = list(mats)
    rows = mats[0].rows
    if any(m.rows != rows for m in mats):
        raise ValueError("row count mismatch in hstack")
    return IntMatrix(tuple(sum((m.entries[i] for m in mats), ()) for i in range(rows)))


def vstack(mats) -> IntMatrix:
    mats = list(mats)
    cols = mats[0].cols
    if any(m.cols != cols for m in mats):
        raise ValueError("column count mismatch in vstack")
    return IntMatrix(tuple(r for m in mats for r in m.entries))


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SNFResult:
    """U * A * V = D with U, V unimodular and D diagonal, d_i >= 0,
    d_i | d_{i+1}."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        n = min(self.D.rows, self.D.cols)
        return tuple(self.D.entries[i][i] for i in range(n))

    def verify(self, a: IntMatrix) -> bool:
        if (self.U * a * self.V).entries != self.D.entries:
            return False
        if not (self.U.is_unimodular() and self.V.is_unimodular()):
            return False
        d = self.diagonal
        for i in range(self.D.rows):
            for j in range(self.D.cols):
                if i != j and self.D.entries[i][j] != 0:
                    return False
        for i, x in enumerate(d):
            if x < 0:
                return False
            if i + 1 < len(d) and x != 0 and d[i + 1] % x != 0:
                return False
            if x == 0 and i + 1 < len(d) and d[i + 1] != 0:
                return False
        return True


def snf(a: IntMatrix) -> SNFResult:
    """Smith normal form with transforms.

    Pivot policy: smallest absolute value among nonzero entries of the
    working submatrix, ties broken in row-major order.  Before the pivot
    block is finalized it is made to divide every remaining entry, so the
    divisibility chain holds by construction.
    """
    R, C = a.rows, a.cols
    d = [list(r) for r in a.entries]
    u = [[1 if i == j else 0 for j in range(R)] for i in range(R)]
    v = [[1 if i == j else 0 for j in range(C)] for i in range(C)]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_add(i, j, q):  # r_i += q * r_j
        d[i] = [x + q * y for x, y in zip(d[i], d[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]

    def col_add(i, j, q):  # c_i += q * c_j
        for r in d:
            r[i] += q * r[j]
        for r in v:
            r[i] += q * r[j]

    def row_negate(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(R, C)
    while t < limit:
        best = None
        for i in range(t, R):
            for j in range(t, C):
                x = d[i][j]
                if x != 0 and (best is None or abs(x) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        if best[0] != t:
            row_swap(t, best[0])
        if best[1] != t:
            col_swap(t, best[1])
        while True:
            # clear column t, re-pivoting when a smaller remainder appears
            dirty = False
            for i in range(t + 1, R):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    row_add(i, t, -q)
                    if d[i][t] != 0:
                        row_swap(i, t)
                        dirty = True
            if dirty:
                continue
            for j in range(t + 1, C):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    col_add(j, t, -q)
                    if d[t][j] != 0:
                        col_swap(j, t)
                        dirty = True
                        break
            if dirty:
                continue
            # pivot must divide the rest of the submatrix
            offender = None
            for i in range(t + 1, R):
                for j in range(t + 1, C):
                    if d[i][j] % d[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_add(t, offender, 1)
        if d[t][t] < 0:
            row_negate(t)
        t += 1

    return SNFResult(IntMatrix.from_rows(u), IntMatrix.from_rows(d), IntMatrix.from_rows(v))


# ---------------------------------------------------------------------------
# Abelian invariants and co-invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianInvariants:
    """Canonical form of a finitely generated abelian group: free rank plus
    a divisibility chain of torsion moduli (no 1s)."""

    free_rank: int
    torsion: tuple[int, ...]

    def __post_init__(self):
        for i, x in enumerate(self.torsion):
            if x <= 1:
                raise ValueError("torsion moduli must exceed 1")
            if i + 1 < len(self.torsion) and self.torsion[i + 1] % x != 0:
                raise ValueError("torsion moduli must form a divisibility chain")

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> int | None:
        if not self.is_finite:
            return None
        n = 1
        for x in self.torsion:
            n *= x
        return n

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def quotient_invariants(ambient_rank: int, relations: IntMatrix | None) -> AbelianInvariants:
    """Invariants of Z^n modulo the column span of ``relations``."""
    if relations is None:
        return AbelianInvariants(ambient_rank, ())
    if relations.rows != ambient_rank:
        raise ValueError("relation matrix has wrong ambient rank")
    diag = snf(relations).diagonal
    nonzero = [x for x in diag if x != 0]
    return AbelianInvariants(ambient_rank - len(nonzero), tuple(x for x in nonzero if x > 1))


def coinvariants(dim: int, action_gens) -> AbelianInvariants:
    """Invariants of Z^dim / <(M - I) v : M a generator, v in Z^dim>.

    Generator matrices suffice: the relation lattice of the generated group
    equals the lattice spanned by the (M - I) blocks of any generating set,
    since (M N - I) v = M (N - I) v + (M - I) v.
    """
    gens = list(action_gens)
    for m in gens:
        if m.rows != dim or m.cols != dim:
            raise ValueError("action matrices must be square of the given dimension")
    blocks = [m - IntMatrix.identity(dim) for m in gens]
    blocks = [b for b in blocks if not b.is_zero()]
    if not blocks:
        return AbelianInvariants(dim, ())
    return quotient_invariants(dim, hstack(blocks))


# ---------------------------------------------------------------------------
# Integer kernels and lattice membership
# ---------------------------------------------------------------------------


def kernel_basis(a: IntMatrix) -> IntMatrix | None:
    """Saturated basis of {x : A x = 0}, as matrix columns; None if trivial."""
    res = snf(a)
    diag = res.diagonal
    rank = sum(1 for x in diag if x != 0)
    free = [j for j in range(a.cols) if j >= rank]
    if not free:
        return None
    cols = [res.V.column(j) for j in free]
    return IntMatrix(tuple(zip(*cols)))


def integer_solve(a: IntMatrix, b) -> tuple[int, ...] | None:
    """One integral solution of A x = b, or None."""
    if len(b) != a.rows:
        raise ValueError("rhs length mismatch")
    res = snf(a)
    ub = res.U.apply(tuple(b))
    y = [0] * a.cols
    diag = res.diagonal
    for i, val in enumerate(ub):
        di = diag[i] if i < len(diag) else 0
        if di == 0:
            if val != 0:
                return None
        else:
            if val % di != 0:
                return None
            y[i] = val // di
    return res.V.apply(tuple(y))


def lattice_contains(lattice: IntMatrix | None, v) -> bool:
    """Membership of an integer vector in the column lattice."""
    if lattice is None:
        return all(x == 0 for x in v)
    return integer_solve(lattice, v) is not None


def invert_unimodular(u: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +-1."""
    sol = rational_solve(u, frac_identity(u.rows))
    if sol is None:
        raise ValueError("matrix is singular")
    rows = []
    for r in sol:
        out = []
        for x in r:
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            out.append(int(x))
        rows.append(out)
    return IntMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# Symplectic checks, fixed subspaces, projectors
# ---------------------------------------------------------------------------


def standard_symplectic_form(genus: int) -> IntMatrix:
    """J for the interleaved basis a_1, b_1, ..., a_g, b_g."""
    n = 2 * genus
    rows = [[0] * n for _ in range(n)]
    for i in range(genus):
        rows[2 * i][2 * i + 1] = 1
        rows[2 * i + 1][2 * i] = -1
    return IntMatrix.from_rows(rows)


def is_symplectic(m: IntMatrix, genus: int) -> bool:
    if m.rows != 2 * genus or m.cols != 2 * genus:
        raise ValueError(f"expected a {2 * genus}x{2 * genus} matrix")
    j = standard_symplectic_form(genus)
    return (m.transpose() * j * m).entries == j.entries


def fixed_subspace(action_gens) -> IntMatrix | None:
    """Saturated integral basis of the common fixed space of the generators,
    as matrix columns; None when only 0 is fixed."""
    gens = list(action_gens)
    if not gens:
        raise ValueError("need at least one matrix")
    n = gens[0].rows
    for m in gens:
        if m.rows != n or m.cols != n:
            raise ValueError("action matrices must be square of equal size")
    blocks = [m - IntMatrix.identity(n) for m in gens]
    nonzero = [b for b in blocks if not b.is_zero()]
    if not nonzero:
        return IntMatrix.identity(n)
    return kernel_basis(vstack(nonzero))


class NotAGroupError(ValueError):
    """The supplied matrix list is not closed under multiplication."""


def averaging_projector(group_mats):
    """(1/|Q|) * sum of the matrices of a full finite matrix group, as an
    exact rational matrix.  Verifies multiplicative closure and idempotence."""
    mats = list(group_mats)
    if not mats:
        raise NotAGroupError("empty matrix list")
    n = mats[0].rows
    seen = {m.entries for m in mats}
    for a in mats:
        for b in mats:
            if (a * b).entries not in seen:
                raise NotAGroupError("matrix list is not closed under multiplication")
    total = [[Fraction(0)] * n for _ in range(n)]
    for m in mats:
        for i in range(n):
            for j in range(n):
                total[i][j] += m.entries[i][j]
    k = Fraction(len(mats))
    p = tuple(tuple(x / k for x in row) for row in total)
    if frac_mul(p, p) != p:
        raise NotAGroupError("averaging operator is not idempotent")
    return p


# ---------------------------------------------------------------------------
# Exact rational helpers
# ---------------------------------------------------------------------------


def frac_matrix(a: IntMatrix):
    return tuple(tuple(Fraction(x) for x in r) for r in a.entries)


def frac_identity(n: int):
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n))


def frac_mul(a, b):
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def frac_sub(a, b):
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def frac_is_zero(a) -> bool:
    return all(x == 0 for r in a for x in r)


def rational_rank(a) -> int:
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    rank = 0
    for j in range(cols):
        pivot = next((i for i in range(rank, rows) if m[i][j] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][j]
        m[rank] = [x / pv for x in m[rank]]
        for i in range(rows):
            if i != rank and m[i][j] != 0:
                f = m[i][j]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def rational_solve(a, b):
    """Solve A X = B exactly over Q; A, B rational or integer matrices.
    Returns X (rows = A.cols, cols = B's) with free variables at 0, or None
    if inconsistent."""
    a_rows = a.entries if isinstance(a, IntMatrix) else a
    b_rows = b.entries if isinstance(b, IntMatrix) else b
    rows = len(a_rows)
    cols = len(a_rows[0])
    if len(b_rows) != rows:
        raise ValueError("rhs row mismatch")
    width = len(b_rows[0])
    m = [
        [Fraction(x) for x in a_rows[i]] + [Fraction(y) for y in b_rows[i]]
        for i in range(rows)
    ]
    pivots: list[tuple[int, int]] = []
    r = 0
    for j in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][j] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][j]
        m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][j] != 0:
                f = m[i][j]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append((r, j))
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if any(m[i][cols + t] != 0 for t in range(width)):
            return None
    x = [[Fraction(0)] * width for _ in range(cols)]
    for (ri, cj) in pivots:
        for t in range(width):
            x[cj][t] = m[ri][cols + t]
    return tuple(tuple(row) for row in x)


def rational_in_span(basis: IntMatrix | None, vec) -> bool:
    """Is the rational vector in the rational column span of ``basis``?"""
    if basis is None:
        return all(x == 0 for x in vec)
    column = tuple((Fraction(x),) for x in vec)
    return rational_solve(basis, column) is not None


def frac_to_json(a):
    return [[[x.numerator, x.denominator] for x in row] for row in a]


def frac_from_json(doc):
    return tuple(tuple(Fraction(p, q) for p, q in row) for row in doc)
