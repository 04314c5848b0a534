import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from finorbit.targets import SymmetricGroup
from finorbit.words import (
    EMPTY,
    MalformedWordError,
    abelianized,
    conjugate_in_free,
    cyclic_reduce,
    evaluate,
    free_presentation,
    parse_group_spec,
    reduce,
    surface_presentation,
    surface_relator,
    word,
)

letters = st.lists(
    st.integers(min_value=-4, max_value=4).filter(lambda x: x != 0), max_size=64
)


def test_reduce_cancellation():
    assert reduce([1, -1]).letters == ()
    assert reduce([1, 2, -2, 1]).letters == (1, 1)


def test_reduce_rejects_zero_and_nonint():
    with pytest.raises(MalformedWordError):
        reduce([1, 0, 2])
    with pytest.raises(MalformedWordError):
        reduce([1.5])
    with pytest.raises(MalformedWordError):
        reduce([True])


@given(letters)
def test_reduce_idempotent_and_length_nonincreasing(ls):
    w = reduce(ls)
    assert reduce(w.letters).letters == w.letters
    assert len(w) <= len(ls)


@given(letters)
def test_word_times_inverse_is_identity(ls):
    w = reduce(ls)
    assert (w * w.inverse()).letters == ()
    assert (w.inverse() * w).letters == ()


def test_surface_relator_values():
    assert surface_relator(1).letters == (1, 2, -1, -2)
    assert surface_relator(2).letters == (1, 2, -1, -2, 3, 4, -3, -4)
    with pytest.raises(ValueError):
        surface_relator(0)


def test_surface_relator_length_and_abelianization():
    for g in (1, 2, 3):
        r = surface_relator(g)
        assert len(r) == 4 * g
        assert abelianized(r, 2 * g) == (0,) * (2 * g)


def test_cyclic_reduce_examples():
    core, conj = cyclic_reduce(word(1, 2, -1))
    assert core.letters == (2,) and conj.letters == (1,)
    core, conj = cyclic_reduce(word(1, 2))
    assert core.letters == (1, 2) and conj.letters == ()


@given(letters)
def test_cyclic_reduce_reassembly(ls):
    w = reduce(ls)
    core, conj = cyclic_reduce(w)
    assert (conj * core * conj.inverse()).letters == w.letters
    # core is cyclically reduced
    if len(core) >= 2:
        assert core.letters[0] != -core.letters[-1]


def test_conjugacy_examples():
    assert conjugate_in_free(word(1, 2), word(2, 1))
    assert not conjugate_in_free(word(1), word(2))
    r = surface_relator(2)
    c = word(3, -1)
    assert conjugate_in_free(r, c * r * c.inverse())


def test_conjugacy_is_an_equivalence_on_witnessed_sample():
    rng = random.Random(7)
    for _ in range(20):
        u = reduce([rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(rng.randint(0, 10))])
        c1 = reduce([rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(rng.randint(0, 6))])
        c2 = reduce([rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(rng.randint(0, 6))])
        v = c1 * u * c1.inverse()
        w = c2 * v * c2.inverse()
        assert conjugate_in_free(u, u)
        assert conjugate_in_free(u, v) and conjugate_in_free(v, u)
        assert conjugate_in_free(u, w)  # transitivity witness


def test_evaluate_empty_word_is_identity():
    s3 = SymmetricGroup(3)
    assert evaluate(EMPTY, [s3.identity()], s3) == s3.identity()


def test_evaluate_permutation_oracle():
    # x1 -> the 3-cycle sending 0->1->2->0; the square is the reverse cycle
    s3 = SymmetricGroup(3)
    three_cycle = (1, 2, 0)
    square = evaluate(word(1, 1), [three_cycle], s3)
    # independent composition: apply the cycle twice to each point
    expected = tuple(three_cycle[three_cycle[i]] for i in range(3))
    assert square == expected == (2, 0, 1)


def test_evaluate_index_out_of_range():
    s3 = SymmetricGroup(3)
    with pytest.raises(IndexError):
        evaluate(word(2), [s3.identity()], s3)


@given(letters, letters)
def test_evaluate_respects_concatenation(ls1, ls2):
    s4 = SymmetricGroup(4)
    rng = random.Random(11)
    images = [tuple(rng.sample(range(4), 4)) for _ in range(4)]
    u, v = reduce(ls1), reduce(ls2)
    lhs = evaluate(u * v, images, s4)
    rhs = s4.multiply(evaluate(u, images, s4), evaluate(v, images, s4))
    assert lhs == rhs


def test_presentations():
    p = free_presentation(2)
    assert p.kind == "free" and p.generator_count == 2 and p.relators == ()
    s = surface_presentation(2)
    assert s.generator_count == 4 and len(s.relators) == 1
    assert s.relators[0].letters == surface_relator(2).letters
    with pytest.raises(ValueError):
        free_presentation(1)
    with pytest.raises(ValueError):
        surface_presentation(0)


def test_group_spec_parsing():
    assert parse_group_spec("free:3").key == "free:3"
    assert parse_group_spec("surface:2").key == "surface:2"
    with pytest.raises(ValueError):
        parse_group_spec("free")
    with pytest.raises(ValueError):
        parse_group_spec("ring:2")
