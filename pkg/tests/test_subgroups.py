import random

import pytest

from finorbit.autos import nielsen_generators
from finorbit.linalg import frac_matrix, rational_rank
from finorbit.subgroups import (
    NotInSubgroupError,
    NotSurjectiveError,
    characteristic_core,
    coset_table,
    cw_character,
    cw_verify,
    expand_rewrite,
    finite_quotient,
    rewrite,
    schreier_pair_word,
    subgroup_homology,
    transfer_map,
)
from finorbit.targets import FiniteAbelianGroup, SymmetricGroup
from finorbit.words import (
    EMPTY,
    free_presentation,
    reduce,
    surface_presentation,
    word,
)

P2 = free_presentation(2)
C2 = FiniteAbelianGroup((2,))


def quotient_free2_c2():
    return finite_quotient(P2, C2, ((1,), (1,)))


def test_surjectivity_required():
    with pytest.raises(NotSurjectiveError):
        finite_quotient(P2, FiniteAbelianGroup((4,)), ((2,), (0,)))


def test_coset_table_trivial_quotient():
    fq = finite_quotient(P2, FiniteAbelianGroup((1,)), ((0,), (0,)))
    t = coset_table(fq)
    assert t.index == 1
    assert t.transversal == (EMPTY,)


def test_coset_table_free2_c2():
    t = coset_table(quotient_free2_c2())
    assert t.index == 2
    assert [w.letters for w in t.transversal] == [(), (1,)]
    assert t.contains(word(1, 1)) and t.contains(word(1, 2))
    assert not t.contains(word(1))


def test_coset_table_surface_relator_acts_trivially():
    sp = surface_presentation(2)
    fq = finite_quotient(sp, C2, ((1,), (0,), (0,), (0,)))
    t = coset_table(fq)
    assert t.index == 2
    r = sp.relators[0]
    for c in range(t.index):
        assert t.coset_of_word(r, c) == c


def test_rewrite_empty_and_example():
    t = coset_table(quotient_free2_c2())
    assert rewrite(t, EMPTY) == ()
    syll = rewrite(t, word(1, 1))
    # prefix convention: the tree pair (0, x1) then the generator at coset 1
    assert expand_rewrite(t, syll).letters == (1, 1)
    assert len(syll) == 2
    with pytest.raises(NotInSubgroupError):
        rewrite(t, word(1))


def test_rewrite_expansion_randomized():
    t = coset_table(quotient_free2_c2())
    rng = random.Random(3)
    for _ in range(30):
        # random even-exponent-sum words lie in the kernel
        w = EMPTY
        for _ in range(rng.randint(1, 5)):
            conj = reduce([rng.choice([-2, -1, 1, 2]) for _ in range(rng.randint(0, 3))])
            gen = rng.choice([word(1, 1), word(2, 2), word(1, 2), word(-1, 2)])
            w = w * (conj * gen * conj.inverse())
        assert expand_rewrite(t, rewrite(t, w)).letters == w.letters


def test_free_homology_rank():
    fq = quotient_free2_c2()
    h = subgroup_homology(fq)
    assert h.rank == 3
    assert len(h.basis_pairs) == 3


def test_surface_homology_rank():
    sp = surface_presentation(2)
    fq = finite_quotient(sp, C2, ((1,), (0,), (0,), (0,)))
    h = subgroup_homology(fq)
    assert h.rank == 6
    assert h.ambient_rank == 7  # 2*4 pairs minus 1 tree pair


@pytest.mark.parametrize(
    "n,m", [(2, 2), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (3, 4), (3, 6)]
)
def test_free_rank_formula(n, m):
    p = free_presentation(n)
    cm = FiniteAbelianGroup((m,))
    fq = finite_quotient(p, cm, tuple((1,) for _ in range(n)))
    h = subgroup_homology(fq)
    assert h.rank == 1 + m * (n - 1)


@pytest.mark.parametrize("g,m", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)])
def test_surface_rank_formula(g, m):
    sp = surface_presentation(g)
    cm = FiniteAbelianGroup((m,))
    images = [(1,)] + [(0,)] * (2 * g - 1)
    fq = finite_quotient(sp, cm, tuple(images))
    h = subgroup_homology(fq)
    # rank 2g' with 2g' - 2 = m(2g - 2)
    assert h.rank - 2 == m * (2 * g - 2)


def test_q_action_is_multiplicative_and_unimodular():
    cases = [
        quotient_free2_c2(),
        finite_quotient(P2, FiniteAbelianGroup((3,)), ((1,), (1,))),
        finite_quotient(P2, SymmetricGroup(3), ((1, 0, 2), (1, 2, 0))),
        finite_quotient(
            surface_presentation(2), C2, ((1,), (0,), (0,), (0,))
        ),
    ]
    for fq in cases:
        h = subgroup_homology(fq)
        q = fq.quotient
        for a in h.q_elements:
            assert h.q_action[a].det() in (1, -1)
            for b in h.q_elements:
                prod = h.q_action[a] * h.q_action[b]
                assert prod.entries == h.q_action[q.multiply(a, b)].entries


def test_character_values():
    fq = quotient_free2_c2()
    h = subgroup_homology(fq)
    chi = cw_character(h)
    ident = fq.quotient.identity()
    assert chi.value(ident) == h.rank == 3
    assert all(chi.value(qe) == 1 for qe in h.q_elements if qe != ident)


def test_cw_verify_free_cases():
    for target, images, chi_one in [
        (FiniteAbelianGroup((2,)), ((1,), (1,)), 3),
        (FiniteAbelianGroup((3,)), ((1,), (1,)), 4),
        (SymmetricGroup(3), ((1, 0, 2), (1, 2, 0)), 7),
    ]:
        fq = finite_quotient(P2, target, images)
        rep = cw_verify(fq)
        assert rep.verdict == "PASS"
        ident_pos = rep.q_elements.index(target.identity())
        assert rep.character[ident_pos] == chi_one
        assert all(
            v == 1 for i, v in enumerate(rep.character) if i != ident_pos
        )


def test_cw_verify_surface_cases():
    sp = surface_presentation(2)
    fq = finite_quotient(sp, C2, ((1,), (0,), (0,), (0,)))
    rep = cw_verify(fq)
    assert rep.verdict == "PASS" and rep.rank == 6
    klein = FiniteAbelianGroup((2, 2))
    fq2 = finite_quotient(sp, klein, ((1, 0), (0, 1), (0, 0), (0, 0)))
    rep2 = cw_verify(fq2)
    assert rep2.verdict == "PASS" and rep2.rank == 10
    ident_pos = rep2.q_elements.index(klein.identity())
    assert rep2.character[ident_pos] == 10
    assert all(v == 2 for i, v in enumerate(rep2.character) if i != ident_pos)


def test_transfer_trivial_quotient_is_identity():
    fq = finite_quotient(P2, FiniteAbelianGroup((1,)), ((0,), (0,)))
    h = subgroup_homology(fq)
    t = transfer_map(h)
    assert t.entries == ((1, 0), (0, 1))


def test_transfer_free_and_surface():
    h = subgroup_homology(quotient_free2_c2())
    t = transfer_map(h)  # transfer_map itself asserts Q-fixedness
    assert rational_rank(frac_matrix(t)) == 2
    sp = surface_presentation(2)
    fq = finite_quotient(sp, C2, ((1,), (0,), (0,), (0,)))
    hs = subgroup_homology(fq)
    ts = transfer_map(hs)
    assert rational_rank(frac_matrix(ts)) == 4


def test_characteristic_core_small_indices():
    fq = characteristic_core(P2, 1)
    assert fq.order == 1
    core2 = characteristic_core(P2, 2)
    assert core2.order == 4
    # oracle: the index-4 kernel is the kernel of abelianization mod 2
    q = core2.quotient
    elems = q.elements()
    assert all(q.multiply(a, b) == q.multiply(b, a) for a in elems for b in elems)
    assert all(q.multiply(a, a) == q.identity() for a in elems)


def test_characteristic_core_invariant_under_catalog():
    core2 = characteristic_core(P2, 2)
    t = coset_table(core2)
    basis_words = [
        schreier_pair_word(t, i, k)
        for i in range(t.index)
        for k in (1, 2)
        if (i, k) not in t.tree_pairs
    ]
    for g in nielsen_generators(2):
        for w in basis_words:
            assert t.contains(g.apply(w))
            assert t.contains(g.backward.apply(w))
