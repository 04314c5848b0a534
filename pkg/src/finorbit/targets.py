"""Concrete target groups: permutation groups, finitely generated abelian
groups, integral and modular Heisenberg groups, and unimodular integer
matrix groups.

Elements are immutable hashable tuples in a realization-specific normal
form: permutations as image tuples on points ``0..d-1``, abelian elements
as coordinate vectors, Heisenberg elements as ``(a, b, c)`` for the
unitriangular matrix ``[[1,a,c],[0,1,b],[0,0,1]]``, and matrix-group
elements as row tuples.  The group object carries the arithmetic.

Permutation composition order is fixed once, here: ``multiply(p, q)`` acts
with ``q`` first, so ``multiply(p, q)[i] == p[q[i]]``.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

from .linalg import IntMatrix, invert_unimodular


class InfiniteGroupError(ValueError):
    """Full enumeration requested for an infinite realization."""


class NotCentralError(ValueError):
    pass


class NotFiniteError(ValueError):
    """A quotient or closure that was required to be finite is not."""


class TargetGroup(ABC):
    """Shared element protocol for all realizations."""

    key: str

    @abstractmethod
    def identity(self): ...

    @abstractmethod
    def multiply(self, a, b): ...

    @abstractmethod
    def inverse(self, a): ...

    def order(self) -> int | None:
        """Exact order, or None for unbounded realizations."""
        return None

    def elements(self) -> tuple:
        raise InfiniteGroupError(f"{self.key} cannot be enumerated")

    @property
    def is_finite(self) -> bool:
        return self.order() is not None

    def power(self, a, n: int):
        if n < 0:
            return self.power(self.inverse(a), -n)
        acc = self.identity()
        base = a
        while n:
            if n & 1:
                acc = self.multiply(acc, base)
            base = self.multiply(base, base)
            n >>= 1
        return acc

    def commutes(self, a, b) -> bool:
        return self.multiply(a, b) == self.multiply(b, a)

    @abstractmethod
    def element_to_json(self, e): ...

    @abstractmethod
    def element_from_json(self, doc): ...

    def __eq__(self, other):
        return isinstance(other, TargetGroup) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<target {self.key}>"


class SymmetricGroup(TargetGroup):
    def __init__(self, degree: int):
        if degree < 1:
            raise ValueError("degree must be >= 1")
        self.degree = degree
        self.key = f"sym:{degree}"

    def identity(self):
        return tuple(range(self.degree))

    def multiply(self, a, b):
        return tuple(a[b[i]] for i in range(self.degree))

    def inverse(self, a):
        out = [0] * self.degree
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    def order(self):
        return math.factorial(self.degree)

    def elements(self):
        return tuple(itertools.permutations(range(self.degree)))

    def element_to_json(self, e):
        return list(e)

    def element_from_json(self, doc):
        e = tuple(int(x) for x in doc)
        if sorted(e) != list(range(self.degree)):
            raise ValueError(f"not a permutation of degree {self.degree}: {doc!r}")
        return e


class FreeAbelianGroup(TargetGroup):
    """Z^r, written additively as integer vectors."""

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("rank must be >= 1")
        self.rank = rank
        self.key = f"ab:{rank}"

    def identity(self):
        return (0,) * self.rank

    def multiply(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inverse(self, a):
        return tuple(-x for x in a)

    def element_to_json(self, e):
        return list(e)

    def element_from_json(self, doc):
        if isinstance(doc, int):
            doc = [doc]
        e = tuple(int(x) for x in doc)
        if len(e) != self.rank:
            raise ValueError(f"expected rank-{self.rank} vector")
        return e


class FiniteAbelianGroup(TargetGroup):
    """Direct sum of Z/m_i, coordinates reduced into 0..m_i-1."""

    def __init__(self, moduli):
        moduli = tuple(int(m) for m in moduli)
        if not moduli or any(m < 1 for m in moduli):
            raise ValueError("moduli must be positive")
        self.moduli = moduli
        if len(moduli) == 1:
            self.key = f"cyclic:{moduli[0]}"
        else:
            self.key = "abfin:" + ",".join(str(m) for m in moduli)

    def identity(self):
        return (0,) * len(self.moduli)

    def multiply(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def inverse(self, a):
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def order(self):
        return math.prod(self.moduli)

    def elements(self):
        return tuple(itertools.product(*(range(m) for m in self.moduli)))

    def element_to_json(self, e):
        return list(e)

    def element_from_json(self, doc):
        if isinstance(doc, int):
            doc = [doc]
        e = tuple(int(x) for x in doc)
        if len(e) != len(self.moduli):
            raise ValueError(f"expected {len(self.moduli)} coordinates")
        return tuple(x % m for x, m in zip(e, self.moduli))


class HeisenbergGroup(TargetGroup):
    """Upper unitriangular 3x3 matrices over Z (modulus None) or Z/k.

    (a, b, c) * (d, e, f) = (a + d, b + e, c + f + a*e); the center is
    {(0, 0, c)}.  Standard generators are X = (1,0,0) and Y = (0,1,0).
    """

    def __init__(self, modulus: int | None):
        if modulus is not None and modulus < 2:
            raise ValueError("modulus must be >= 2")
        self.modulus = modulus
        self.key = f"heis:{modulus}" if modulus else "heis:Z"

    def _norm(self, t):
        if self.modulus is None:
            return t
        k = self.modulus
        return (t[0] % k, t[1] % k, t[2] % k)

    def identity(self):
        return (0, 0, 0)

    def multiply(self, a, b):
        return self._norm((a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]))

    def inverse(self, a):
        return self._norm((-a[0], -a[1], a[0] * a[1] - a[2]))

    def order(self):
        return None if self.modulus is None else self.modulus**3

    def elements(self):
        if self.modulus is None:
            raise InfiniteGroupError("heis:Z cannot be enumerated")
        k = self.modulus
        return tuple(itertools.product(range(k), range(k), range(k)))

    def standard_generators(self):
        return ((1, 0, 0), (0, 1, 0))

    def central_generator(self):
        return self._norm((0, 0, 1))

    def is_central(self, e) -> bool:
        return e[0] == 0 and e[1] == 0

    def element_to_json(self, e):
        return list(e)

    def element_from_json(self, doc):
        e = tuple(int(x) for x in doc)
        if len(e) != 3:
            raise ValueError("Heisenberg element needs 3 coordinates")
        return self._norm(e)


class MatrixGroup(TargetGroup):
    """Subgroups of GL_m(Z); elements are unimodular integer matrices as
    row tuples."""

    def __init__(self, size: int, generators=None):
        if size < 1:
            raise ValueError("size must be >= 1")
        self.size = size
        self.key = f"matz:{size}"
        self.generators = tuple(self.validate(g) for g in generators) if generators else ()

    def validate(self, e):
        m = IntMatrix.from_rows(e)
        if m.rows != self.size or m.cols != self.size:
            raise ValueError(f"expected {self.size}x{self.size} matrix")
        if not m.is_unimodular():
            raise ValueError("matrix group elements must have determinant +-1")
        return m.entries

    def identity(self):
        return IntMatrix.identity(self.size).entries

    def multiply(self, a, b):
        return (IntMatrix(a) * IntMatrix(b)).entries

    def inverse(self, a):
        return invert_unimodular(IntMatrix(a)).entries

    def element_to_json(self, e):
        return [list(r) for r in e]

    def element_from_json(self, doc):
        return self.validate(doc)


class FiniteSubgroup(TargetGroup):
    """A finite subgroup of an ambient realization, given by its element set.
    Used for quotient groups realized inside large permutation groups."""

    def __init__(self, ambient: TargetGroup, elements, key_suffix: str = ""):
        self.ambient = ambient
        self._elements = tuple(sorted(elements))
        self.key = f"sub({ambient.key};{len(self._elements)}{key_suffix})"

    def identity(self):
        return self.ambient.identity()

    def multiply(self, a, b):
        return self.ambient.multiply(a, b)

    def inverse(self, a):
        return self.ambient.inverse(a)

    def order(self):
        return len(self._elements)

    def elements(self):
        return self._elements

    def element_to_json(self, e):
        return self.ambient.element_to_json(e)

    def element_from_json(self, doc):
        return self.ambient.element_from_json(doc)


class FiniteQuotientGroup(TargetGroup):
    """Quotient of a finite subgroup of ``ambient`` by a finite central
    subgroup.  Elements are canonical coset representatives (the minimal
    element of each coset); ``project`` maps carrier elements to their
    representative."""

    def __init__(self, ambient: TargetGroup, central_elements, carrier_elements):
        self.ambient = ambient
        self.central = frozenset(central_elements)
        reps = {}
        for e in sorted(carrier_elements):
            coset = min(ambient.multiply(e, z) for z in self.central)
            reps[e] = coset
        self._rep = reps
        self._elements = tuple(sorted(set(reps.values())))
        self.key = f"quot({ambient.key};{len(self.central)};{len(self._elements)})"

    def project(self, x):
        return self._rep[x]

    def identity(self):
        return self._rep[self.ambient.identity()]

    def multiply(self, a, b):
        return self._rep[self.ambient.multiply(a, b)]

    def inverse(self, a):
        return self._rep[self.ambient.inverse(a)]

    def order(self):
        return len(self._elements)

    def elements(self):
        return self._elements

    def element_to_json(self, e):
        return self.ambient.element_to_json(e)

    def element_from_json(self, doc):
        return self.project(self.ambient.element_from_json(doc))


# ---------------------------------------------------------------------------
# Subgroup closure, centers, element orders, central quotients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupClosure:
    """BFS closure of a generating set; ``elements`` is None when the cap
    was exceeded, otherwise the full closed set in sorted canonical order."""

    target: TargetGroup
    generators: tuple
    elements: tuple | None
    cap: int

    @property
    def closed(self) -> bool:
        return self.elements is not None

    @property
    def order(self) -> int | None:
        return None if self.elements is None else len(self.elements)

    @property
    def status(self) -> str:
        return "closed" if self.closed else "exceeded"


def closure(generators, target: TargetGroup, cap: int, workers: int = 1) -> SubgroupClosure:
    """Breadth-first closure under the generators and their inverses.

    The final element set is independent of generator order and of the
    worker count; it is returned in sorted canonical order.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    gens = tuple(generators)
    step = []
    for g in gens:
        step.append(g)
        inv = target.inverse(g)
        if inv != g:
            step.append(inv)
    seen = {target.identity()}
    frontier = [target.identity()]
    while frontier:
        new = []
        for e in frontier:
            for g in step:
                x = target.multiply(e, g)
                if x not in seen:
                    if len(seen) >= cap:
                        return SubgroupClosure(target, gens, None, cap)
                    seen.add(x)
                    new.append(x)
        frontier = new
    return SubgroupClosure(target, gens, tuple(sorted(seen)), cap)


def center(c: SubgroupClosure) -> tuple:
    """Elements of a closed subgroup commuting with every generator (hence
    with the whole subgroup)."""
    if not c.closed:
        raise NotFiniteError("center is only supported for closed subgroups")
    t = c.target
    return tuple(e for e in c.elements if all(t.commutes(e, g) for g in c.generators))


def element_order(target: TargetGroup, e, cap: int) -> int | None:
    """Least k <= cap with e^k = identity, else None."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    acc = e
    ident = target.identity()
    for k in range(1, cap + 1):
        if acc == ident:
            return k
        acc = target.multiply(acc, e)
    return None


def quotient_map_to_finite(c: SubgroupClosure, central, cap: int = 100_000) -> FiniteQuotientGroup:
    """Quotient of a subgroup by the (finite) subgroup generated by the
    designated central elements.

    For a closed subgroup this is a coset partition; otherwise cosets are
    enumerated by capped BFS, which fails with ``NotFiniteError`` when the
    quotient does not close (for example the integer Heisenberg group by
    its center, whose quotient is Z^2).
    """
    t = c.target
    central = tuple(central)
    for z in central:
        if not all(t.commutes(z, g) for g in c.generators):
            raise NotCentralError(f"{z!r} does not commute with the generators")
    zc = closure(central, t, cap)
    if not zc.closed:
        raise NotFiniteError("designated central subgroup is not finite within cap")
    zset = zc.elements
    if c.closed:
        return FiniteQuotientGroup(t, zset, c.elements)
    # coset BFS over representatives
    def rep(x):
        return min(t.multiply(x, z) for z in zset)

    step = []
    for g in c.generators:
        step.append(g)
        inv = t.inverse(g)
        if inv != g:
            step.append(inv)
    seen = {rep(t.identity())}
    frontier = list(seen)
    carrier = set(seen)
    while frontier:
        new = []
        for e in frontier:
            for g in step:
                r = rep(t.multiply(e, g))
                if r not in seen:
                    if len(seen) >= cap:
                        raise NotFiniteError(f"quotient did not close within {cap} cosets")
                    seen.add(r)
                    new.append(r)
        frontier = new
        carrier.update(new)
    full_carrier = {t.multiply(r, z) for r in seen for z in zset}
    return FiniteQuotientGroup(t, zset, full_carrier)


# ---------------------------------------------------------------------------
# Target mini-language
# ---------------------------------------------------------------------------


def parse_target(spec: str, reader=None) -> TargetGroup:
    """Parse ``sym:d`` / ``cyclic:k`` / ``abfin:m1,m2,..`` / ``ab:r`` /
    ``heis:k`` / ``heis:Z`` / ``matz:m`` / ``matz:file:<path>``.

    ``reader`` maps a path to its parsed JSON (defaults to reading the
    filesystem); only matz:file uses it.
    """
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "sym" and len(parts) == 2:
            return SymmetricGroup(int(parts[1]))
        if kind == "cyclic" and len(parts) == 2:
            return FiniteAbelianGroup((int(parts[1]),))
        if kind == "abfin" and len(parts) == 2:
            return FiniteAbelianGroup(tuple(int(x) for x in parts[1].split(",")))
        if kind == "ab" and len(parts) == 2:
            return FreeAbelianGroup(int(parts[1]))
        if kind == "heis" and len(parts) == 2:
            if parts[1] == "Z":
                return HeisenbergGroup(None)
            return HeisenbergGroup(int(parts[1]))
        if kind == "matz" and len(parts) == 2:
            return MatrixGroup(int(parts[1]))
        if kind == "matz" and len(parts) >= 3 and parts[1] == "file":
            path = ":".join(parts[2:])
            if reader is None:
                import json

                with open(path, "r", encoding="utf-8") as fh:
                    doc = json.load(fh)
            else:
                doc = reader(path)
            return MatrixGroup(int(doc["size"]), doc.get("generators"))
    except ValueError as exc:
        raise ValueError(f"malformed target spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown target spec {spec!r}")
