"""Finite-index subgroup machinery.

Given a surjection onto a finite group Q, this module builds the coset
table of the kernel N with a prefix-closed (BFS-shortlex) Schreier
transversal, rewrites elements of N over Schreier generators, computes
H_1(N, Z) together with its Q-action by conjugation, verifies the
regular-plus-trivial rational character decomposition, computes the
transfer map from H_1 of the ambient group, and constructs characteristic
cores (intersections of all subgroups up to a given index).

Conventions fixed here:

* Cosets are right cosets N w, identified with images in Q; coset 0 is N.
* The BFS letter order is x_1, x_1^-1, x_2, x_2^-1, ...; the resulting
  transversal is prefix-closed with representative epsilon for coset 0.
* Schreier pairs (i, k) index the elements t_i x_k t_{i.x_k}^-1; pairs on
  BFS tree edges are trivial and are dropped from the homology basis.
* Q acts on H_1(N) on the left, by conjugation with transversal
  representatives: the matrix of q sends the class of w to the class of
  t_q w t_q^-1.
* In the surface case H_1(N) is the Schreier-generator lattice modulo the
  abelianized rewritten relator conjugates (one per coset); the quotient
  basis is cut out of a Smith normal form, fixed deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import (
    IntMatrix,
    frac_matrix,
    invert_unimodular,
    rational_rank,
    snf,
)
from .orbits import BudgetError, Homomorphism, enumerate_homs
from .targets import FiniteSubgroup, SymmetricGroup, TargetGroup, closure
from .words import EMPTY, FreeWord, Presentation, word


class NotSurjectiveError(ValueError):
    pass


class NotInSubgroupError(ValueError):
    """A word expected to lie in the kernel does not."""


@dataclass(frozen=True)
class FiniteQuotient:
    """A surjection from a presentation onto a finite group Q; the kernel
    is the finite-index subgroup under study."""

    presentation: Presentation
    quotient: TargetGroup
    surjection: Homomorphism

    def __post_init__(self):
        if not self.quotient.is_finite:
            raise NotSurjectiveError("quotient must be finite")
        reached = closure(self.surjection.images, self.quotient, cap=self.quotient.order() + 1)
        if not reached.closed or set(reached.elements) != set(self.quotient.elements()):
            raise NotSurjectiveError("generator images do not generate the quotient")

    @property
    def order(self) -> int:
        return self.quotient.order()


def finite_quotient(p: Presentation, quotient: TargetGroup, images) -> FiniteQuotient:
    return FiniteQuotient(p, quotient, Homomorphism(p, quotient, tuple(images)))


# ---------------------------------------------------------------------------
# Coset tables and Reidemeister-Schreier rewriting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CosetTable:
    quotient: FiniteQuotient
    elements: tuple  # coset index -> Q element; coset 0 = identity
    action: tuple[tuple[int, ...], ...]  # action[k-1][i] = i . x_k
    transversal: tuple[FreeWord, ...]
    tree_pairs: frozenset  # (coset, generator) pairs on BFS tree edges

    @property
    def index(self) -> int:
        return len(self.elements)

    @property
    def generator_count(self) -> int:
        return len(self.action)

    def coset_of(self, q_element) -> int:
        return self._coset_index[q_element]

    def __post_init__(self):
        object.__setattr__(
            self, "_coset_index", {e: i for i, e in enumerate(self.elements)}
        )

    def step(self, coset: int, letter: int) -> int:
        k = abs(letter)
        if letter > 0:
            return self.action[k - 1][coset]
        return self._inverse_action[k - 1][coset]

    @property
    def _inverse_action(self):
        inv = getattr(self, "_inv_cache", None)
        if inv is None:
            inv = []
            for perm in self.action:
                out = [0] * len(perm)
                for i, j in enumerate(perm):
                    out[j] = i
                inv.append(tuple(out))
            object.__setattr__(self, "_inv_cache", tuple(inv))
        return self._inv_cache

    def coset_of_word(self, w: FreeWord, start: int = 0) -> int:
        c = start
        for letter in w.letters:
            c = self.step(c, letter)
        return c

    def contains(self, w: FreeWord) -> bool:
        """Membership in the kernel N."""
        return self.coset_of_word(w) == 0


def coset_table(q: FiniteQuotient) -> CosetTable:
    """Permutation action of the generators on cosets of the kernel, with a
    BFS-shortlex Schreier transversal."""
    target = q.quotient
    images = q.surjection.images
    n = q.presentation.generator_count
    letters = []
    for k in range(1, n + 1):
        letters.append(k)
        letters.append(-k)
    elem_of = [target.identity()]
    index_of = {target.identity(): 0}
    transversal = [EMPTY]
    tree_pairs = set()
    frontier = [0]
    inv_images = [target.inverse(im) for im in images]
    while frontier:
        nxt = []
        for c in frontier:
            for letter in letters:
                k = abs(letter)
                g = images[k - 1] if letter > 0 else inv_images[k - 1]
                e = target.multiply(elem_of[c], g)
                if e not in index_of:
                    j = len(elem_of)
                    index_of[e] = j
                    elem_of.append(e)
                    transversal.append(transversal[c] * word(letter))
                    tree_pairs.add((c, k) if letter > 0 else (j, k))
                    nxt.append(j)
        frontier = nxt
    if len(elem_of) != target.order():
        raise NotSurjectiveError("coset action is not transitive on the quotient")
    action = []
    for k in range(1, n + 1):
        perm = tuple(index_of[target.multiply(e, images[k - 1])] for e in elem_of)
        action.append(perm)
    table = CosetTable(q, tuple(elem_of), tuple(action), tuple(transversal), frozenset(tree_pairs))
    for r in q.presentation.relators:
        for c in range(table.index):
            if table.coset_of_word(r, c) != c:
                raise AssertionError("relator does not act trivially on cosets")
    return table


def schreier_pair_word(t: CosetTable, coset: int, k: int) -> FreeWord:
    """The subgroup element t_i x_k t_{i.x_k}^-1."""
    j = t.step(coset, k)
    return t.transversal[coset] * word(k) * t.transversal[j].inverse()


def rewrite(t: CosetTable, w: FreeWord) -> tuple[int, ...]:
    """Reidemeister-Schreier rewriting of a kernel element.

    Returns signed 1-based indices into the full Schreier pair list
    (pair (i, k) has index i * n + k); the expansion of the output reduces
    to ``w``.  Raises for words outside the kernel.
    """
    if not t.contains(w):
        raise NotInSubgroupError("word does not lie in the subgroup")
    n = t.generator_count
    out = []
    c = 0
    for letter in w.letters:
        k = abs(letter)
        if letter > 0:
            out.append(c * n + k)
            c = t.step(c, letter)
        else:
            j = t.step(c, letter)
            out.append(-(j * n + k))
            c = j
    return tuple(out)


def expand_rewrite(t: CosetTable, syllables) -> FreeWord:
    """Expansion oracle: substitute each Schreier pair by its word."""
    n = t.generator_count
    out = EMPTY
    for s in syllables:
        p = abs(s) - 1
        w = schreier_pair_word(t, p // n, p % n + 1)
        out = out * (w if s > 0 else w.inverse())
    return out


# ---------------------------------------------------------------------------
# Homology of the kernel with its Q-action
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupHomology:
    """H_1(N, Z) as a lattice with Q-action.

    Free case: the lattice is free on the non-tree Schreier pairs.  Surface
    case: the Schreier-pair lattice modulo the abelianized rewritten relator
    conjugates; ``section``/``projection`` translate between pair
    coordinates and the quotient basis, and all recorded matrices act on
    the quotient basis.
    """

    quotient: FiniteQuotient
    table: CosetTable
    basis_pairs: tuple[tuple[int, int], ...]
    basis_words: tuple[FreeWord, ...]
    ambient_rank: int  # number of non-tree Schreier pairs
    rank: int  # rank of H_1(N)
    relations: IntMatrix | None
    projection: IntMatrix | None  # rank x ambient_rank
    section: IntMatrix | None  # ambient_rank x rank
    q_elements: tuple
    q_action: dict

    def pair_vector(self, w: FreeWord) -> tuple[int, ...]:
        """Abelianized rewriting in non-tree pair coordinates."""
        n = self.table.generator_count
        index = self._pair_index
        v = [0] * self.ambient_rank
        for s in rewrite(self.table, w):
            p = abs(s) - 1
            pos = index.get((p // n, p % n + 1))
            if pos is not None:
                v[pos] += 1 if s > 0 else -1
        return tuple(v)

    def __post_init__(self):
        object.__setattr__(
            self, "_pair_index", {pair: i for i, pair in enumerate(self.basis_pairs)}
        )

    def homology_vector(self, w: FreeWord) -> tuple[int, ...]:
        """Class of a kernel element in the H_1(N) basis."""
        v = self.pair_vector(w)
        if self.projection is None:
            return v
        return self.projection.apply(v)

    def matrix_of_endomorphism(self, image_words) -> IntMatrix:
        """Matrix on H_1(N) of the map sending each basis word w_s to the
        supplied image word; images must lie in the kernel.

        Surface case: the map is formed on pair coordinates and conjugated
        into the quotient basis; it must preserve the relation lattice,
        which is asserted."""
        cols = [self.pair_vector(w) for w in image_words]
        ambient = IntMatrix(tuple(zip(*cols)))
        if self.projection is None:
            return ambient
        if not (self.projection * (ambient * self.relations)).is_zero():
            raise AssertionError("endomorphism does not preserve the relation lattice")
        return self.projection * ambient * self.section

    def matrix_of_automorphism(self, phi) -> IntMatrix:
        """Action of an automorphism preserving N."""
        images = [phi.apply(w) for w in self.basis_words]
        for im in images:
            if not self.table.contains(im):
                raise NotInSubgroupError(f"{phi.label!r} does not preserve the subgroup")
        return self.matrix_of_endomorphism(images)


def subgroup_homology(q: FiniteQuotient) -> SubgroupHomology:
    t = coset_table(q)
    n = t.generator_count
    m = t.index
    basis_pairs = tuple(
        (i, k) for i in range(m) for k in range(1, n + 1) if (i, k) not in t.tree_pairs
    )
    basis_words = tuple(schreier_pair_word(t, i, k) for i, k in basis_pairs)
    ambient = len(basis_pairs)
    p = q.presentation

    relations = None
    projection = None
    section = None
    rank = ambient
    if p.kind == "surface":
        pair_index = {pair: i for i, pair in enumerate(basis_pairs)}

        def pair_vec(w):
            v = [0] * ambient
            c = 0
            for letter in w.letters:
                k = abs(letter)
                if letter > 0:
                    pos = pair_index.get((c, k))
                    if pos is not None:
                        v[pos] += 1
                    c = t.step(c, letter)
                else:
                    j = t.step(c, letter)
                    pos = pair_index.get((j, k))
                    if pos is not None:
                        v[pos] -= 1
                    c = j
            return tuple(v)

        relator = p.relators[0]
        rel_cols = [pair_vec(relator.conjugated_by(t.transversal[i])) for i in range(m)]
        relations = IntMatrix(tuple(zip(*rel_cols)))
        res = snf(relations)
        diag = res.diagonal
        cut = sum(1 for x in diag if x != 0)
        if any(x not in (0, 1) for x in diag):
            raise AssertionError("surface kernel homology has unexpected torsion")
        rank = ambient - cut
        uinv = invert_unimodular(res.U)
        projection = IntMatrix(tuple(res.U.entries[cut:]))
        section = IntMatrix(tuple(row[cut:] for row in uinv.entries))

    expected = 1 + m * (n - 1) if p.kind == "free" else m * (2 * p.genus - 2) + 2
    if rank != expected:
        raise AssertionError(f"homology rank {rank} differs from expected {expected}")

    partial = SubgroupHomology(
        q, t, basis_pairs, basis_words, ambient, rank, relations, projection, section,
        t.elements, {},
    )
    q_action = {}
    for idx, qe in enumerate(t.elements):
        rep = t.transversal[idx]
        images = [w.conjugated_by(rep) for w in basis_words]
        mat = partial.matrix_of_endomorphism(images)
        if mat.det() not in (1, -1):
            raise AssertionError("conjugation action is not unimodular")
        q_action[qe] = mat
    return SubgroupHomology(
        q, t, basis_pairs, basis_words, ambient, rank, relations, projection, section,
        t.elements, q_action,
    )


# ---------------------------------------------------------------------------
# Character verification and the transfer map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QCharacter:
    """Exact integer traces of the Q-action, keyed by Q element."""

    values: dict

    def __post_init__(self):
        pass

    def value(self, q_element) -> int:
        return self.values[q_element]


def cw_character(h: SubgroupHomology) -> QCharacter:
    return QCharacter({qe: m.trace() for qe, m in h.q_action.items()})


def predicted_character(p: Presentation, q_order: int):
    """(value at identity, value elsewhere) for the known rational
    decomposition: (n-1) regular copies plus one trivial for free groups,
    (2g-2) regular copies plus two trivial for surface groups."""
    if p.kind == "free":
        return ((p.generator_count - 1) * q_order + 1, 1)
    return ((2 * p.genus - 2) * q_order + 2, 2)


@dataclass(frozen=True)
class CwReport:
    verdict: str  # "PASS" | "FAIL"
    group: str
    quotient_order: int
    rank: int
    character: tuple[int, ...]  # aligned with q_elements
    predicted: tuple[int, ...]
    q_elements: tuple

    def element_keys(self, quotient) -> tuple[str, ...]:
        import json as _json

        return tuple(
            _json.dumps(quotient.element_to_json(qe)) for qe in self.q_elements
        )

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "group": self.group,
            "quotient_order": self.quotient_order,
            "rank": self.rank,
            "character": list(self.character),
            "predicted": list(self.predicted),
        }

    def to_table(self, quotient) -> str:
        keys = self.element_keys(quotient)
        width = max(len(k) for k in keys)
        lines = [
            f"group {self.group}  quotient order {self.quotient_order}  "
            f"rank {self.rank}  verdict {self.verdict}",
            f"{'element'.ljust(width)}  trace  predicted",
        ]
        for k, c, p in zip(keys, self.character, self.predicted):
            lines.append(f"{k.ljust(width)}  {str(c).rjust(5)}  {str(p).rjust(9)}")
        return "\n".join(lines) + "\n"


def cw_verify(q: FiniteQuotient, homology: SubgroupHomology | None = None) -> CwReport:
    """Exact character comparison against the regular-plus-trivial
    prediction."""
    h = homology if homology is not None else subgroup_homology(q)
    chi = cw_character(h)
    ident = q.quotient.identity()
    at_one, off = predicted_character(q.presentation, q.order)
    actual = tuple(chi.value(qe) for qe in h.q_elements)
    predicted = tuple(at_one if qe == ident else off for qe in h.q_elements)
    verdict = "PASS" if actual == predicted else "FAIL"
    return CwReport(verdict, q.presentation.key, q.order, h.rank, actual, predicted, h.q_elements)


def transfer_map(h: SubgroupHomology) -> IntMatrix:
    """Matrix of the transfer H_1(ambient) -> H_1(N): each ambient generator
    maps to the sum over cosets of t_i x_k t_{i.x_k}^-1.  The image is
    pointwise fixed by the Q-action and has full rational rank."""
    t = h.table
    n = t.generator_count
    cols = []
    for k in range(1, n + 1):
        total = [0] * h.rank
        for i in range(t.index):
            v = h.homology_vector(schreier_pair_word(t, i, k))
            total = [a + b for a, b in zip(total, v)]
        cols.append(tuple(total))
    mat = IntMatrix(tuple(zip(*cols)))
    for qe, action in h.q_action.items():
        if (action * mat).entries != mat.entries:
            raise AssertionError("transfer image is not fixed by the quotient action")
    if rational_rank(frac_matrix(mat)) != n:
        raise AssertionError("transfer map does not have full rank")
    return mat


# ---------------------------------------------------------------------------
# Characteristic cores
# ---------------------------------------------------------------------------


def characteristic_core(
    p: Presentation,
    max_index: int,
    hom_budget: int = 1_000_000,
    closure_cap: int = 100_000,
) -> FiniteQuotient:
    """Quotient by the intersection of all subgroups of index <= max_index.

    Every subgroup of index k <= m is the preimage of a point stabilizer
    under some action on m points, so the intersection is the kernel of the
    diagonal map into the product of all homomorphisms to Sym(m); the
    kernel is characteristic by construction.  The product embeds in one
    large permutation group on (number of homs) * m points.
    """
    if max_index < 1:
        raise ValueError("index bound must be >= 1")
    if max_index == 1:
        from .targets import FiniteAbelianGroup

        trivial = FiniteAbelianGroup((1,))
        images = tuple(trivial.identity() for _ in range(p.generator_count))
        return finite_quotient(p, trivial, images)
    sym = SymmetricGroup(max_index)
    homs = enumerate_homs(p, sym, budget=hom_budget)
    degree = max_index * len(homs)
    big = SymmetricGroup(degree)
    big_images = []
    for k in range(p.generator_count):
        perm = []
        for h in homs:
            block = h.images[k]
            offset = len(perm)
            perm.extend(offset + x for x in block)
        big_images.append(tuple(perm))
    reached = closure(big_images, big, cap=closure_cap)
    if not reached.closed:
        raise BudgetError(f"characteristic core closure exceeded {closure_cap} elements")
    quotient = FiniteSubgroup(big, reached.elements, key_suffix=f";core<= {max_index}")
    return finite_quotient(p, quotient, tuple(big_images))
