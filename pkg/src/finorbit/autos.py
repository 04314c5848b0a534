"""Automorphism catalogs: Nielsen generators of Aut(F_n), validated surface
mapping classes, braid generators inside Aut(F_n), and inner automorphisms.

An endomorphism is a generator-image map.  An automorphism carries an
explicit inverse, certified on construction: the two compositions must
reduce to the identity map, and for surface presentations the forward map
must send the defining relator to a free-group conjugate of itself or its
inverse.  Certification is the source of truth for catalog entries; no
entry is derived from twist formulas at run time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import IntMatrix
from .words import (
    FreeWord,
    Presentation,
    abelianized,
    commutator,
    conjugate_in_free,
    free_presentation,
    surface_presentation,
    word,
)


class CatalogValidationError(ValueError):
    """An automorphism failed inverse or relator certification."""


class PresentationMismatchError(ValueError):
    pass


# Guard against runaway word growth under repeated composition.
MAX_IMAGE_LETTERS = 1_000_000


@dataclass(frozen=True)
class Endo:
    """Generator-image map on a presentation's free generators."""

    presentation: Presentation
    images: tuple[FreeWord, ...]
    label: str = ""

    def __post_init__(self):
        n = self.presentation.generator_count
        if len(self.images) != n:
            raise ValueError(f"expected {n} images, got {len(self.images)}")
        for w in self.images:
            if w.max_index() > n:
                raise ValueError("image letter outside generator range")
            if len(w) > MAX_IMAGE_LETTERS:
                raise ValueError("image length exceeds growth guard")

    def apply(self, w: FreeWord) -> FreeWord:
        out: list[int] = []
        for letter in w.letters:
            img = self.images[abs(letter) - 1]
            out.extend(img.letters if letter > 0 else img.inverse().letters)
        return FreeWord(tuple(out))

    def is_identity(self) -> bool:
        return all(im.letters == (k + 1,) for k, im in enumerate(self.images))

    def __eq__(self, other):
        return (
            isinstance(other, Endo)
            and self.presentation == other.presentation
            and tuple(w.letters for w in self.images) == tuple(w.letters for w in other.images)
        )

    def __hash__(self):
        return hash((self.presentation.key, tuple(w.letters for w in self.images)))

    @property
    def max_image_length(self) -> int:
        return max(len(w) for w in self.images)


def identity_endo(p: Presentation) -> Endo:
    return Endo(p, tuple(word(k + 1) for k in range(p.generator_count)), "id")


def compose_endo(f: Endo, g: Endo) -> Endo:
    """f after g: x |-> f(g(x))."""
    if f.presentation != g.presentation:
        raise PresentationMismatchError("cannot compose endos on different presentations")
    return Endo(f.presentation, tuple(f.apply(w) for w in g.images))


@dataclass(frozen=True)
class Automorphism:
    """An endomorphism with a certified inverse."""

    forward: Endo
    backward: Endo
    label: str = ""

    def __post_init__(self):
        fb = compose_endo(self.forward, self.backward)
        bf = compose_endo(self.backward, self.forward)
        if not (fb.is_identity() and bf.is_identity()):
            raise CatalogValidationError(f"inverse certification failed for {self.label!r}")
        p = self.presentation
        if p.kind == "surface":
            r = p.relators[0]
            image = self.forward.apply(r)
            if not (conjugate_in_free(image, r) or conjugate_in_free(image, r.inverse())):
                raise CatalogValidationError(
                    f"{self.label!r} does not preserve the surface relator up to conjugacy"
                )

    @property
    def presentation(self) -> Presentation:
        return self.forward.presentation

    def inverse(self) -> "Automorphism":
        return Automorphism(self.backward, self.forward, _inverse_label(self.label))

    def apply(self, w: FreeWord) -> FreeWord:
        return self.forward.apply(w)

    @property
    def max_image_length(self) -> int:
        return max(self.forward.max_image_length, self.backward.max_image_length)

    def __eq__(self, other):
        return isinstance(other, Automorphism) and self.forward == other.forward

    def __hash__(self):
        return hash(self.forward)

    def to_json(self) -> dict:
        return {
            "presentation": self.presentation.to_json(),
            "images": [list(w.letters) for w in self.forward.images],
            "inverse_images": [list(w.letters) for w in self.backward.images],
            "label": self.label,
        }

    def __repr__(self):
        return f"Automorphism({self.label or self.forward.images})"


def _inverse_label(label: str) -> str:
    if label.endswith("^-1"):
        return label[:-3]
    return label + "^-1"


def make_automorphism(p: Presentation, images, inverse_images, label="") -> Automorphism:
    fwd = Endo(p, tuple(FreeWord(tuple(w)) for w in images), label)
    bwd = Endo(p, tuple(FreeWord(tuple(w)) for w in inverse_images), label)
    return Automorphism(fwd, bwd, label)


def automorphism_from_json(doc: dict) -> Automorphism:
    from .words import presentation_from_json

    p = presentation_from_json(doc["presentation"])
    return make_automorphism(p, doc["images"], doc["inverse_images"], doc.get("label", ""))


def identity_automorphism(p: Presentation) -> Automorphism:
    e = identity_endo(p)
    return Automorphism(e, e, "id")


def compose(phi: Automorphism, psi: Automorphism) -> Automorphism:
    """phi after psi as substitution; H1(compose) = H1(phi) * H1(psi)."""
    if phi.presentation != psi.presentation:
        raise PresentationMismatchError("presentation mismatch in compose")
    if phi.forward.is_identity():
        return psi
    if psi.forward.is_identity():
        return phi
    fwd = compose_endo(phi.forward, psi.forward)
    bwd = compose_endo(psi.backward, phi.backward)
    return Automorphism(fwd, bwd, f"{phi.label}*{psi.label}")


def induced_h1(phi: Automorphism) -> IntMatrix:
    """Abelianized action: column i is the exponent vector of the image of
    generator i."""
    n = phi.presentation.generator_count
    cols = [abelianized(w, n) for w in phi.forward.images]
    m = IntMatrix(tuple(zip(*cols)))
    if m.det() not in (1, -1):
        raise CatalogValidationError("induced homology matrix is not unimodular")
    return m


def inner_automorphism(p: Presentation, gamma: FreeWord) -> Automorphism:
    """x |-> gamma x gamma^-1."""
    n = p.generator_count
    fwd = Endo(p, tuple(word(k + 1).conjugated_by(gamma) for k in range(n)))
    bwd = Endo(p, tuple(word(k + 1).conjugated_by(gamma.inverse()) for k in range(n)))
    return Automorphism(fwd, bwd, f"inn{list(gamma.letters)}")


# ---------------------------------------------------------------------------
# Catalogs
# ---------------------------------------------------------------------------


def nielsen_generators(n: int) -> tuple[Automorphism, ...]:
    """Adjacent transpositions, inversion of x_1, and x_1 |-> x_2 x_1."""
    p = free_presentation(n)
    out = []
    for i in range(1, n):
        images = [word(k + 1) for k in range(n)]
        images[i - 1], images[i] = word(i + 1), word(i)
        imgs = tuple(w.letters for w in images)
        out.append(make_automorphism(p, imgs, imgs, f"s{i}{i + 1}"))
    inv = [[k + 1] for k in range(n)]
    inv[0] = [-1]
    out.append(make_automorphism(p, inv, inv, "inv1"))
    fwd = [[k + 1] for k in range(n)]
    fwd[0] = [2, 1]
    bwd = [[k + 1] for k in range(n)]
    bwd[0] = [-2, 1]
    out.append(make_automorphism(p, fwd, bwd, "m21"))
    return tuple(out)


def braid_generators(n: int) -> tuple[Automorphism, ...]:
    """sigma_i: x_i |-> x_i x_{i+1} x_i^-1, x_{i+1} |-> x_i."""
    p = free_presentation(n)
    out = []
    for i in range(1, n):
        fwd = [[k + 1] for k in range(n)]
        fwd[i - 1] = [i, i + 1, -i]
        fwd[i] = [i]
        bwd = [[k + 1] for k in range(n)]
        bwd[i - 1] = [i + 1]
        bwd[i] = [-(i + 1), i, i + 1]
        out.append(make_automorphism(p, fwd, bwd, f"sigma{i}"))
    return tuple(out)


def surface_mcg_generators(g: int) -> tuple[Automorphism, ...]:
    """A validated catalog of mapping classes of the genus-g surface group.

    Twist-like entries tb_i (a_i |-> a_i b_i) and ta_i (b_i |-> b_i a_i)
    preserve each commutator factor of the relator exactly and realize the
    homology transvections a_i |-> a_i + b_i and b_i |-> b_i + a_i.  Handle
    swaps h_i exchange adjacent handles, conjugating one pair by the
    commutator of the other so the relator is again preserved exactly.
    Chain entries cm_i mix adjacent handles: they fix the relator exactly
    and induce the symplectic transvection along a_i - a_{i+1}, the
    homology class of the Humphries chain curve between the handles.
    Whether the catalog generates the full pointed mapping class group is
    not certified; orbit results under it are lower bounds.
    """
    p = surface_presentation(g)
    n = 2 * g
    out = []
    for i in range(1, g + 1):
        a, b = 2 * i - 1, 2 * i
        fwd = [[k + 1] for k in range(n)]
        fwd[a - 1] = [a, b]
        bwd = [[k + 1] for k in range(n)]
        bwd[a - 1] = [a, -b]
        out.append(make_automorphism(p, fwd, bwd, f"tb{i}"))
        fwd = [[k + 1] for k in range(n)]
        fwd[b - 1] = [b, a]
        bwd = [[k + 1] for k in range(n)]
        bwd[b - 1] = [b, -a]
        out.append(make_automorphism(p, fwd, bwd, f"ta{i}"))
    for i in range(1, g):
        a1, b1, a2, b2 = 2 * i - 1, 2 * i, 2 * i + 1, 2 * i + 2
        u = commutator(word(a1), word(b1))
        v = commutator(word(a2), word(b2))
        fwd = [[k + 1] for k in range(n)]
        fwd[a1 - 1] = list(word(a2).conjugated_by(u).letters)
        fwd[b1 - 1] = list(word(b2).conjugated_by(u).letters)
        fwd[a2 - 1] = [a1]
        fwd[b2 - 1] = [b1]
        bwd = [[k + 1] for k in range(n)]
        bwd[a1 - 1] = [a2]
        bwd[b1 - 1] = [b2]
        bwd[a2 - 1] = list(word(a1).conjugated_by(v.inverse()).letters)
        bwd[b2 - 1] = list(word(b1).conjugated_by(v.inverse()).letters)
        out.append(make_automorphism(p, fwd, bwd, f"h{i}{i + 1}"))
    # chain twists, written out for handles (1, 2) and shifted into place;
    # both directions fix the relator exactly, so any shift works
    chain_fwd = [(1,), (2, -1, -2, 3, 2), (2, -1, -2, 3, 2, 1, -2), (4, -3, 2, 1, -2)]
    chain_bwd = [(1,), (-3, 2, 1), (-3, 2, 1, -2, 3, 2, -1, -2, 3), (4, 2, -1, -2, 3)]
    for i in range(1, g):
        off = 2 * (i - 1)
        fwd = [[k + 1] for k in range(n)]
        bwd = [[k + 1] for k in range(n)]
        for pos in range(4):
            fwd[off + pos] = [l + off if l > 0 else l - off for l in chain_fwd[pos]]
            bwd[off + pos] = [l + off if l > 0 else l - off for l in chain_bwd[pos]]
        out.append(make_automorphism(p, fwd, bwd, f"cm{i}{i + 1}"))
    return tuple(out)


def catalog_from_file(path: str, presentation: Presentation | None = None):
    import json

    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    entries = tuple(automorphism_from_json(d) for d in doc)
    if presentation is not None:
        for e in entries:
            if e.presentation != presentation:
                raise PresentationMismatchError(
                    f"catalog entry {e.label!r} is for {e.presentation.key}"
                )
    return entries


def get_catalog(spec: str, presentation: Presentation) -> tuple[Automorphism, ...]:
    """Resolve ``nielsen`` / ``mcg`` / ``braid`` / ``file:<path>`` against a
    presentation."""
    if spec == "nielsen":
        if presentation.kind != "free":
            raise PresentationMismatchError("nielsen catalog requires a free presentation")
        return nielsen_generators(presentation.generator_count)
    if spec == "braid":
        if presentation.kind != "free":
            raise PresentationMismatchError("braid catalog requires a free presentation")
        return braid_generators(presentation.generator_count)
    if spec == "mcg":
        if presentation.kind != "surface":
            raise PresentationMismatchError("mcg catalog requires a surface presentation")
        return surface_mcg_generators(presentation.genus)
    if spec.startswith("file:"):
        return catalog_from_file(spec[5:], presentation)
    raise ValueError(f"unknown generator-set spec {spec!r}")
