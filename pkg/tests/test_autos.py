import random

import pytest

from finorbit.autos import (
    CatalogValidationError,
    PresentationMismatchError,
    braid_generators,
    compose,
    get_catalog,
    identity_automorphism,
    induced_h1,
    inner_automorphism,
    make_automorphism,
    nielsen_generators,
    surface_mcg_generators,
)
from finorbit.linalg import IntMatrix, is_symplectic
from finorbit.orbits import Homomorphism, apply_to_hom, orbit
from finorbit.targets import FreeAbelianGroup, SymmetricGroup, closure
from finorbit.words import (
    EMPTY,
    conjugate_in_free,
    free_presentation,
    surface_presentation,
    word,
)


def test_nielsen_requires_rank_two():
    with pytest.raises(ValueError):
        nielsen_generators(1)


def test_nielsen_n2_catalog():
    gens = {g.label: g for g in nielsen_generators(2)}
    assert set(gens) == {"s12", "inv1", "m21"}
    m = gens["m21"]
    assert [w.letters for w in m.forward.images] == [(2, 1), (2,)]
    h1 = induced_h1(m)
    assert h1.entries == ((1, 0), (1, 1))  # adds a row: a_1 -> a_1 + a_2


def test_certification_composes_to_identity():
    for n in (2, 3):
        for g in nielsen_generators(n) + braid_generators(n):
            assert compose(g, g.inverse()).forward.is_identity()
            assert compose(g.inverse(), g).forward.is_identity()


def test_invalid_inverse_rejected():
    p = free_presentation(2)
    with pytest.raises(CatalogValidationError):
        make_automorphism(p, [[2, 1], [2]], [[2, 1], [2]], "bogus")


def test_nielsen_h1_transitive_on_nonzero_mod2_vectors():
    # closure of the induced matrices mod 2 acts transitively on the three
    # nonzero vectors, computed by exhaustive closure
    mats = [induced_h1(g) for g in nielsen_generators(2)]
    vecs = {(0, 1), (1, 0), (1, 1)}
    reach = {(1, 0)}
    frontier = [(1, 0)]
    while frontier:
        new = []
        for v in frontier:
            for m in mats:
                w = tuple(x % 2 for x in m.apply(v))
                if w != (0, 0) and w not in reach:
                    reach.add(w)
                    new.append(w)
        frontier = new
    assert reach == vecs


def test_braid_generator_images():
    sigma = braid_generators(2)[0]
    assert [w.letters for w in sigma.forward.images] == [(1, 2, -1), (1,)]
    with pytest.raises(ValueError):
        braid_generators(1)


def test_braid_abelianization_is_permutation():
    for n in (2, 3, 4):
        for i, sigma in enumerate(braid_generators(n), start=1):
            m = induced_h1(sigma)
            expected = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
            expected[i - 1][i - 1] = expected[i][i] = 0
            expected[i - 1][i] = expected[i][i - 1] = 1
            assert m.entries == IntMatrix.from_rows(expected).entries


def test_braid_relations():
    s1, s2 = braid_generators(3)
    lhs = compose(compose(s1, s2), s1)
    rhs = compose(compose(s2, s1), s2)
    assert lhs.forward == rhs.forward
    s = braid_generators(4)
    far = compose(s[0], s[2])
    raf = compose(s[2], s[0])
    assert far.forward == raf.forward


@pytest.mark.parametrize("g", [1, 2, 3])
def test_surface_catalog_certifies(g):
    cat = surface_mcg_generators(g)
    relator = surface_presentation(g).relators[0]
    for a in cat:
        image = a.forward.apply(relator)
        assert conjugate_in_free(image, relator) or conjugate_in_free(image, relator.inverse())
        assert compose(a, a.inverse()).forward.is_identity()


def test_surface_catalog_symplectic_and_transvections():
    for g in (2, 3):
        cat = surface_mcg_generators(g)
        mats = [induced_h1(a) for a in cat]
        assert all(is_symplectic(m, g) for m in mats)
        n = 2 * g
        for i in range(g):
            a, b = 2 * i, 2 * i + 1
            want_ab = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
            want_ab[b][a] = 1  # a_i -> a_i + b_i
            want_ba = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
            want_ba[a][b] = 1  # b_i -> b_i + a_i
            entries = {m.entries for m in mats}
            assert IntMatrix.from_rows(want_ab).entries in entries
            assert IntMatrix.from_rows(want_ba).entries in entries


def test_surface_catalog_product_realizes_first_transvection():
    # BFS over products of depth <= 6 reaches the matrix sending a_1 to a_1+b_1
    mats = [induced_h1(a) for a in surface_mcg_generators(2)]
    target_col = (1, 1, 0, 0)
    seen = {IntMatrix.identity(4).entries}
    frontier = [IntMatrix.identity(4)]
    found = False
    for _ in range(6):
        new = []
        for m in frontier:
            for g in mats:
                prod = m * g
                if prod.entries not in seen:
                    seen.add(prod.entries)
                    new.append(prod)
                    if prod.column(0) == target_col:
                        found = True
        frontier = new
        if found:
            break
    assert found


def test_inner_automorphism_identity_and_conjugation():
    p = free_presentation(2)
    assert inner_automorphism(p, EMPTY).forward.is_identity()
    s3 = SymmetricGroup(3)
    rho = Homomorphism(p, s3, ((1, 0, 2), (1, 2, 0)))
    gamma = word(1, 2)
    conj = apply_to_hom(inner_automorphism(p, gamma), rho)
    gval = rho(gamma)
    for old, new in zip(rho.images, conj.images):
        assert new == s3.multiply(s3.multiply(gval, old), s3.inverse(gval))


def test_inner_orbit_size_is_centralizer_index():
    # the image is all of sym:3, whose center is trivial: orbit size 6
    p = free_presentation(2)
    s3 = SymmetricGroup(3)
    rho = Homomorphism(p, s3, ((1, 0, 2), (1, 2, 0)))
    catalog = [inner_automorphism(p, word(1)), inner_automorphism(p, word(2))]
    res = orbit(rho, catalog, cap=100)
    assert res.complete and res.size == 6


def test_compose_properties():
    rng = random.Random(12)
    gens = nielsen_generators(2)
    ident = identity_automorphism(free_presentation(2))
    for g in gens:
        assert compose(g, g.inverse()).forward == ident.forward
    for _ in range(15):
        a, b, c = (rng.choice(gens) for _ in range(3))
        assert compose(compose(a, b), c).forward == compose(a, compose(b, c)).forward
        lhs = induced_h1(compose(a, b))
        rhs = induced_h1(a) * induced_h1(b)
        assert lhs.entries == rhs.entries


def test_induced_h1_inverse_functoriality():
    from finorbit.linalg import invert_unimodular

    for catalog in (nielsen_generators(3), braid_generators(3), surface_mcg_generators(2)):
        for g in catalog:
            lhs = induced_h1(g.inverse())
            rhs = invert_unimodular(induced_h1(g))
            assert lhs.entries == rhs.entries


def test_compose_presentation_mismatch():
    with pytest.raises(PresentationMismatchError):
        compose(nielsen_generators(2)[0], nielsen_generators(3)[0])


def test_apply_to_hom_identity_and_image_preservation():
    p = free_presentation(2)
    s3 = SymmetricGroup(3)
    rho = Homomorphism(p, s3, ((1, 0, 2), (1, 2, 0)))
    assert apply_to_hom(identity_automorphism(p), rho) == rho
    for g in nielsen_generators(2):
        moved = apply_to_hom(g, rho)
        before = closure(rho.images, s3, cap=10).elements
        after = closure(moved.images, s3, cap=10).elements
        assert before == after


def test_exponent_sum_fixed_by_braids_not_by_nielsen():
    p = free_presentation(3)
    z = FreeAbelianGroup(1)
    rho = Homomorphism(p, z, ((1,), (1,), (1,)))
    for sigma in braid_generators(3):
        assert apply_to_hom(sigma, rho) == rho
    inv1 = {g.label: g for g in nielsen_generators(3)}["inv1"]
    assert apply_to_hom(inv1, rho) != rho


def test_induced_h1_identity_and_braid_swap():
    p = free_presentation(2)
    assert induced_h1(identity_automorphism(p)).entries == ((1, 0), (0, 1))
    sigma = braid_generators(2)[0]
    assert induced_h1(sigma).entries == ((0, 1), (1, 0))


def test_get_catalog_dispatch(tmp_path):
    import json

    p = free_presentation(2)
    assert len(get_catalog("nielsen", p)) == 3
    assert len(get_catalog("braid", p)) == 1
    s = surface_presentation(2)
    assert len(get_catalog("mcg", s)) == 6
    with pytest.raises(PresentationMismatchError):
        get_catalog("mcg", p)
    path = tmp_path / "cat.json"
    path.write_text(json.dumps([g.to_json() for g in nielsen_generators(2)]))
    loaded = get_catalog(f"file:{path}", p)
    assert [g.label for g in loaded] == ["s12", "inv1", "m21"]
    with pytest.raises(ValueError):
        get_catalog("dehn", p)
