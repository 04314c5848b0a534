import math
import random
from fractions import Fraction

import pytest

from finorbit.linalg import (
    AbelianInvariants,
    IntMatrix,
    NotAGroupError,
    averaging_projector,
    coinvariants,
    fixed_subspace,
    frac_identity,
    frac_matrix,
    frac_mul,
    hstack,
    integer_solve,
    invert_unimodular,
    is_symplectic,
    kernel_basis,
    lattice_contains,
    quotient_invariants,
    rational_in_span,
    rational_rank,
    rational_solve,
    snf,
    vstack,
)

I2 = IntMatrix.identity(2)


def rand_matrix(rng, rows, cols, bound=5):
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]
    )


def test_snf_identity():
    res = snf(IntMatrix.identity(3))
    assert res.U.entries == IntMatrix.identity(3).entries
    assert res.V.entries == IntMatrix.identity(3).entries
    assert res.D.entries == IntMatrix.identity(3).entries


def test_snf_frozen_example():
    # d1 = gcd of entries = 2 and d1*d2 = |det| = |16 - 24| = 8, so D = diag(2, 4)
    a = IntMatrix.from_rows([[2, 4], [6, 8]])
    res = snf(a)
    assert res.diagonal == (2, 4)
    assert res.verify(a)


def test_snf_zero_matrix():
    a = IntMatrix.zeros(2, 3)
    res = snf(a)
    assert res.diagonal == (0, 0)
    assert res.verify(a)


def test_snf_randomized_contract():
    rng = random.Random(0)
    for _ in range(40):
        a = rand_matrix(rng, rng.randint(1, 5), rng.randint(1, 5), bound=9)
        res = snf(a)
        assert res.verify(a), a


def test_snf_divisibility_needs_fixup():
    # block diag(2, 3) must become diag(1, 6)
    a = IntMatrix.from_rows([[2, 0], [0, 3]])
    res = snf(a)
    assert res.diagonal == (1, 6)
    assert res.verify(a)


def test_det_and_unimodularity():
    assert IntMatrix.from_rows([[2, 4], [6, 8]]).det() == -8
    assert IntMatrix.from_rows([[0, 1], [1, 0]]).det() == -1
    assert IntMatrix.identity(4).is_unimodular()
    assert not IntMatrix.from_rows([[2, 0], [0, 1]]).is_unimodular()


def test_invert_unimodular():
    rng = random.Random(3)
    for _ in range(10):
        # random product of elementary matrices is unimodular
        m = IntMatrix.identity(3)
        for _ in range(6):
            e = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
            i, j = rng.sample(range(3), 2)
            e[i][j] = rng.randint(-2, 2)
            m = m * IntMatrix.from_rows(e)
        inv = invert_unimodular(m)
        assert (m * inv).entries == IntMatrix.identity(3).entries


def test_coinvariants_identity_action():
    assert coinvariants(3, [IntMatrix.identity(3)]) == AbelianInvariants(3, ())
    assert coinvariants(2, []) == AbelianInvariants(2, ())


def test_coinvariants_transvection_pair_is_trivial():
    t1 = IntMatrix.from_rows([[1, 1], [0, 1]])
    t2 = IntMatrix.from_rows([[1, 0], [1, 1]])
    inv = coinvariants(2, [t1, t2])
    assert inv.is_trivial


@pytest.mark.parametrize("n", [2, 3, 5])
def test_coinvariants_nth_powers_give_torsion(n):
    t1 = IntMatrix.from_rows([[1, n], [0, 1]])  # n-th power of the transvection
    t2 = IntMatrix.from_rows([[1, 0], [n, 1]])
    inv = coinvariants(2, [t1, t2])
    assert inv == AbelianInvariants(0, (n, n))


def mod_quotient_order(dim, gens, modulus):
    """Brute-force order of (Z/M)^dim modulo the reduced relation vectors."""
    cols = []
    for m in gens:
        diff = m - IntMatrix.identity(dim)
        for j in range(dim):
            cols.append(tuple(x % modulus for x in diff.column(j)))
    span = {(0,) * dim}
    frontier = list(span)
    while frontier:
        new = []
        for v in frontier:
            for c in cols:
                w = tuple((a + b) % modulus for a, b in zip(v, c))
                if w not in span:
                    span.add(w)
                    new.append(w)
        frontier = new
    return modulus**dim // len(span)


def test_coinvariants_against_modular_enumeration():
    # invariants (free rank f, torsion t_i) predict the order of the mod-M
    # reduction: product of gcd(t_i, M) times M^f
    rng = random.Random(5)
    cases = []
    for n in (1, 2, 3):
        for _ in range(12):
            k = rng.randint(1, 2)
            cases.append((n, [rand_matrix(rng, n, n, bound=3) for _ in range(k)]))
    # the spec-level pair examples as fixed cases
    cases.append((2, [IntMatrix.from_rows([[1, 2], [0, 1]]), IntMatrix.from_rows([[1, 0], [2, 1]])]))
    for n, gens in cases:
        inv = coinvariants(n, gens)
        for modulus in (2, 3, 5, 8):
            predicted = modulus**inv.free_rank
            for t in inv.torsion:
                predicted *= math.gcd(t, modulus)
            assert mod_quotient_order(n, gens, modulus) == predicted


def test_coinvariants_basis_invariance():
    rng = random.Random(9)
    t1 = IntMatrix.from_rows([[1, 3], [0, 1]])
    t2 = IntMatrix.from_rows([[1, 0], [3, 1]])
    base = coinvariants(2, [t1, t2])
    for _ in range(10):
        u = IntMatrix.identity(2)
        for _ in range(5):
            e = [[1, 0], [0, 1]]
            i, j = rng.sample(range(2), 2)
            e[i][j] = rng.randint(-2, 2)
            u = u * IntMatrix.from_rows(e)
        uinv = invert_unimodular(u)
        conj = coinvariants(2, [u * t1 * uinv, u * t2 * uinv])
        assert conj == base


def test_coinvariants_dimension_mismatch():
    with pytest.raises(ValueError):
        coinvariants(3, [IntMatrix.identity(2)])


def test_is_symplectic():
    assert is_symplectic(IntMatrix.identity(4), 2)
    # a_1 -> a_1 + b_1 transvection in the interleaved basis
    t = IntMatrix.from_rows([[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert is_symplectic(t, 2)
    bad = IntMatrix.from_rows([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert not is_symplectic(bad, 2)
    with pytest.raises(ValueError):
        is_symplectic(IntMatrix.identity(3), 1)


def test_fixed_subspace_examples():
    assert fixed_subspace([IntMatrix.identity(3)]).entries == IntMatrix.identity(3).entries
    swap = IntMatrix.from_rows([[0, 1], [1, 0]])
    basis = fixed_subspace([swap])
    assert basis.cols == 1
    assert basis.column(0) in ((1, 1), (-1, -1))
    # regular representation of a 3-cycle on Q^3 fixes exactly one line
    cyc = IntMatrix.from_rows([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    assert fixed_subspace([cyc]).cols == 1


def test_fixed_subspace_rank_identity():
    rng = random.Random(2)
    for _ in range(20):
        n = rng.randint(1, 4)
        m = rand_matrix(rng, n, n, bound=2)
        basis = fixed_subspace([m])
        dim = 0 if basis is None else basis.cols
        stacked = m - IntMatrix.identity(n)
        assert dim + rational_rank(frac_matrix(stacked)) == n


def test_averaging_projector():
    trivial = averaging_projector([IntMatrix.identity(2)])
    assert trivial == frac_identity(2)
    swap = IntMatrix.from_rows([[0, 1], [1, 0]])
    p = averaging_projector([IntMatrix.identity(2), swap])
    assert p == ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2)))
    assert frac_mul(p, p) == p
    with pytest.raises(NotAGroupError):
        averaging_projector([swap])  # not closed: misses the identity product swap*swap


def test_projector_image_matches_fixed_subspace():
    cyc = IntMatrix.from_rows([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    group = [IntMatrix.identity(3), cyc, cyc * cyc]
    p = averaging_projector(group)
    basis = fixed_subspace(group)
    # every projector column lies in the span of the fixed basis and vice versa
    for j in range(3):
        assert rational_in_span(basis, tuple(row[j] for row in p))
    pf = [list(row) for row in p]
    for j in range(basis.cols):
        col = tuple((Fraction(x),) for x in basis.column(j))
        assert rational_solve(tuple(tuple(r) for r in pf), col) is not None


def test_kernel_and_solve():
    a = IntMatrix.from_rows([[1, 2, 3], [2, 4, 6]])
    k = kernel_basis(a)
    assert k.cols == 2
    for j in range(k.cols):
        assert a.apply(k.column(j)) == (0, 0)
    assert integer_solve(a, (1, 2)) is not None
    assert integer_solve(a, (1, 1)) is None
    lattice = IntMatrix.from_rows([[2], [0]])
    assert lattice_contains(lattice, (4, 0))
    assert not lattice_contains(lattice, (1, 0))
    assert lattice_contains(None, (0, 0))
    assert not lattice_contains(None, (1, 0))


def test_quotient_invariants_and_stacks():
    rel = IntMatrix.from_rows([[2, 0], [0, 3]])
    inv = quotient_invariants(2, rel)
    assert inv == AbelianInvariants(0, (6,))
    assert inv.order() == 6
    h = hstack([I2, I2])
    assert h.rows == 2 and h.cols == 4
    v = vstack([I2, I2])
    assert v.rows == 4 and v.cols == 2
