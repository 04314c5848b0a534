"""Reduced words in free groups, and presentations of free and closed
surface groups.

A word is a sequence of nonzero signed generator indices: the letter ``k``
(``k >= 1``) stands for the generator ``x_k`` and ``-k`` for its inverse.
Words are freely reduced on construction, so two words are equal in the
free group exactly when their letter tuples are equal.

Surface presentations use the interleaved generator numbering
``a_1, b_1, ..., a_g, b_g``: generator ``2i-1`` is ``a_i`` and generator
``2i`` is ``b_i``.  The single relator is the product of commutators
``[a_1,b_1]...[a_g,b_g]``; the order of the commutator factors is a
convention fixed here once and used everywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass


class MalformedWordError(ValueError):
    """A letter was zero or not an integer."""


def _reduced(letters) -> tuple[int, ...]:
    stack: list[int] = []
    for raw in letters:
        if not isinstance(raw, int) or isinstance(raw, bool) or raw == 0:
            raise MalformedWordError(f"invalid generator letter {raw!r}")
        if stack and stack[-1] == -raw:
            stack.pop()
        else:
            stack.append(raw)
    return tuple(stack)


@dataclass(frozen=True)
class FreeWord:
    """A freely reduced word; ``letters`` is canonical after construction."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduced(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple(-l for l in reversed(self.letters)))

    def __pow__(self, n: int) -> "FreeWord":
        if n < 0:
            return self.inverse() ** (-n)
        w = EMPTY
        for _ in range(n):
            w = w * self
        return w

    def conjugated_by(self, c: "FreeWord") -> "FreeWord":
        """c * self * c^-1."""
        return c * self * c.inverse()

    def max_index(self) -> int:
        return max((abs(l) for l in self.letters), default=0)

    def __repr__(self) -> str:
        return f"FreeWord({list(self.letters)})"


EMPTY = FreeWord(())


def word(*letters: int) -> FreeWord:
    return FreeWord(tuple(letters))


def reduce(letters) -> FreeWord:
    """Freely reduce a raw letter sequence.  Idempotent."""
    return FreeWord(tuple(letters))


def commutator(u: FreeWord, v: FreeWord) -> FreeWord:
    return u * v * u.inverse() * v.inverse()


def surface_relator(genus: int) -> FreeWord:
    """The word [a_1,b_1]...[a_g,b_g] of length 4g in interleaved numbering."""
    if genus < 1:
        raise ValueError(f"genus must be >= 1, got {genus}")
    letters: list[int] = []
    for i in range(1, genus + 1):
        a, b = 2 * i - 1, 2 * i
        letters += [a, b, -a, -b]
    return FreeWord(tuple(letters))


def cyclic_reduce(w: FreeWord) -> tuple[FreeWord, FreeWord]:
    """Split ``w`` as ``conjugator * core * conjugator^-1`` with the core
    cyclically reduced.  Returns ``(core, conjugator)``."""
    letters = w.letters
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return FreeWord(letters[i:j]), FreeWord(letters[:i])


def conjugate_in_free(u: FreeWord, v: FreeWord) -> bool:
    """Conjugacy test in the ambient free group: the cyclic reductions must
    agree up to rotation."""
    cu = cyclic_reduce(u)[0].letters
    cv = cyclic_reduce(v)[0].letters
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    doubled = cu + cu
    return any(doubled[i : i + len(cv)] == cv for i in range(len(cu)))


def evaluate(w: FreeWord, images, target):
    """Product of generator images along ``w`` in ``target``.

    ``images[k-1]`` is the image of generator ``x_k``; negative letters use
    the target's inverse.  The empty word evaluates to the identity.
    """
    acc = target.identity()
    for letter in w.letters:
        k = abs(letter)
        if k > len(images):
            raise IndexError(f"letter {letter} out of range for {len(images)} images")
        g = images[k - 1]
        if letter < 0:
            g = target.inverse(g)
        acc = target.multiply(acc, g)
    return acc


def abelianized(w: FreeWord, n: int) -> tuple[int, ...]:
    """Exponent-sum vector of ``w`` over ``n`` generators."""
    v = [0] * n
    for letter in w.letters:
        k = abs(letter)
        if k > n:
            raise IndexError(f"letter {letter} out of range for rank {n}")
        v[k - 1] += 1 if letter > 0 else -1
    return tuple(v)


@dataclass(frozen=True)
class Presentation:
    """A free group of rank >= 2 or a closed surface group of genus >= 1.

    Genus one is admitted only as scaffolding for braid and test setups;
    the main machinery targets genus >= 2.
    """

    kind: str  # "free" | "surface"
    generator_count: int
    relators: tuple[FreeWord, ...]

    def __post_init__(self):
        if self.kind not in ("free", "surface"):
            raise ValueError(f"unknown presentation kind {self.kind!r}")
        for r in self.relators:
            if r.max_index() > self.generator_count:
                raise MalformedWordError("relator letter out of generator range")

    @property
    def genus(self) -> int:
        if self.kind != "surface":
            raise ValueError("genus is only defined for surface presentations")
        return self.generator_count // 2

    @property
    def key(self) -> str:
        if self.kind == "free":
            return f"free:{self.generator_count}"
        return f"surface:{self.genus}"

    def to_json(self) -> dict:
        if self.kind == "free":
            return {"kind": "free", "rank": self.generator_count}
        return {"kind": "surface", "genus": self.genus}

    def __repr__(self) -> str:
        return f"Presentation({self.key})"


def free_presentation(rank: int) -> Presentation:
    if rank < 2:
        raise ValueError(f"free rank must be >= 2, got {rank}")
    return Presentation("free", rank, ())


def surface_presentation(genus: int) -> Presentation:
    if genus < 1:
        raise ValueError(f"genus must be >= 1, got {genus}")
    return Presentation("surface", 2 * genus, (surface_relator(genus),))


def presentation_from_json(doc: dict) -> Presentation:
    kind = doc.get("kind")
    if kind == "free":
        return free_presentation(int(doc["rank"]))
    if kind == "surface":
        return surface_presentation(int(doc["genus"]))
    raise ValueError(f"unknown presentation kind {kind!r}")


def parse_group_spec(spec: str) -> Presentation:
    """Parse ``free:n`` / ``surface:g``."""
    parts = spec.split(":")
    if len(parts) != 2:
        raise ValueError(f"malformed group spec {spec!r}")
    kind, num = parts
    try:
        n = int(num)
    except ValueError:
        raise ValueError(f"malformed group spec {spec!r}") from None
    if kind == "free":
        return free_presentation(n)
    if kind == "surface":
        return surface_presentation(n)
    raise ValueError(f"unknown group kind {kind!r}")
