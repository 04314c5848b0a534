"""The representation variety at desk scale: enumeration of Hom(G, target)
for finite targets, capped BFS orbits under an automorphism catalog, fixed
points, orbit partitions, Schreier stabilizer generators, and DOT export.

Orbits are of raw homomorphisms (no conjugacy quotient); the action is by
precomposition.  Homomorphisms are ordered lexicographically on their image
tuples, and all results are deterministic across runs and worker counts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .autos import Automorphism, PresentationMismatchError, compose
from .targets import TargetGroup
from .words import FreeWord, Presentation, evaluate

DEFAULT_ORBIT_CAP = 100_000


class InvalidHomomorphismError(ValueError):
    """Generator images do not satisfy the presentation's relators."""


class BudgetError(RuntimeError):
    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class IncompleteOrbitError(ValueError):
    """Operation needs a complete orbit but the cap was exceeded."""


@dataclass(frozen=True)
class Homomorphism:
    presentation: Presentation
    target: TargetGroup
    images: tuple

    def __post_init__(self):
        if len(self.images) != self.presentation.generator_count:
            raise InvalidHomomorphismError(
                f"expected {self.presentation.generator_count} images, got {len(self.images)}"
            )
        ident = self.target.identity()
        for r in self.presentation.relators:
            if evaluate(r, self.images, self.target) != ident:
                raise InvalidHomomorphismError("relator does not map to the identity")

    def __call__(self, w: FreeWord):
        return evaluate(w, self.images, self.target)

    def is_trivial(self) -> bool:
        ident = self.target.identity()
        return all(im == ident for im in self.images)

    def __eq__(self, other):
        return (
            isinstance(other, Homomorphism)
            and self.presentation == other.presentation
            and self.target.key == other.target.key
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.presentation.key, self.target.key, self.images))

    def to_json(self) -> dict:
        return {
            "presentation": self.presentation.to_json(),
            "target": self.target.key,
            "images": [self.target.element_to_json(e) for e in self.images],
        }

    def __repr__(self):
        return f"Homomorphism({self.presentation.key} -> {self.target.key}, {self.images})"


def apply_to_hom(phi: Automorphism, rho: Homomorphism) -> Homomorphism:
    """Precomposition: x_k |-> rho(phi(x_k))."""
    if phi.presentation != rho.presentation:
        raise PresentationMismatchError("automorphism and homomorphism presentations differ")
    images = tuple(evaluate(w, rho.images, rho.target) for w in phi.forward.images)
    return Homomorphism(rho.presentation, rho.target, images)


def enumerate_homs(p: Presentation, target: TargetGroup, budget: int = 1_000_000):
    """All homomorphisms into a finite target, in lexicographic image order."""
    if not target.is_finite:
        raise BudgetError(f"{target.key} is not finite")
    elems = target.elements()
    required = len(elems) ** p.generator_count
    if required > budget:
        raise BudgetError(
            f"enumeration needs {required} candidate tuples, budget is {budget}",
            required=required,
        )
    import itertools

    ident = target.identity()
    out = []
    for images in itertools.product(elems, repeat=p.generator_count):
        if all(evaluate(r, images, target) == ident for r in p.relators):
            out.append(Homomorphism(p, target, images))
    out.sort(key=lambda h: h.images)
    return tuple(out)


@dataclass(frozen=True)
class OrbitResult:
    """BFS closure of a homomorphism under a catalog.

    When complete, ``homs`` is the full orbit in canonical (lexicographic)
    order and ``edges`` records (from, generator index, to) for every
    hom/generator pair.  When the cap is exceeded, ``homs`` holds the
    partial exploration and ``edges`` only the edges seen.
    """

    base_index: int
    homs: tuple[Homomorphism, ...]
    edges: tuple[tuple[int, int, int], ...]
    status: str  # "complete" | "exceeded"
    cap: int
    catalog_labels: tuple[str, ...]

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    @property
    def size(self) -> int:
        return len(self.homs)


def orbit(
    rho: Homomorphism,
    catalog,
    cap: int = DEFAULT_ORBIT_CAP,
    workers: int = 1,
) -> OrbitResult:
    """Breadth-first orbit of ``rho`` under precomposition by the catalog.

    Frontier expansion may be spread over ``workers`` threads; results are
    identical for any worker count.
    """
    catalog = tuple(catalog)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    visited: dict[Homomorphism, int] = {rho: 0}
    order: list[Homomorphism] = [rho]
    raw_edges: list[tuple[int, int, int]] = []
    frontier = [0]
    exceeded = False
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frontier and not exceeded:
            tasks = [(i, g) for i in frontier for g in range(len(catalog))]
            if pool is not None:
                results = list(pool.map(lambda t: apply_to_hom(catalog[t[1]], order[t[0]]), tasks))
            else:
                results = [apply_to_hom(catalog[g], order[i]) for i, g in tasks]
            new_frontier = []
            for (i, g), h in zip(tasks, results):
                j = visited.get(h)
                if j is None:
                    if len(order) >= cap:
                        exceeded = True
                        break
                    j = len(order)
                    visited[h] = j
                    order.append(h)
                    new_frontier.append(j)
                raw_edges.append((i, g, j))
            frontier = new_frontier
    finally:
        if pool is not None:
            pool.shutdown()
    status = "exceeded" if exceeded else "complete"
    # canonical reindexing by image tuples
    perm = sorted(range(len(order)), key=lambda i: order[i].images)
    new_index = {old: new for new, old in enumerate(perm)}
    homs = tuple(order[i] for i in perm)
    edges = tuple(sorted((new_index[u], g, new_index[v]) for u, g, v in raw_edges))
    labels = tuple(a.label for a in catalog)
    return OrbitResult(new_index[0], homs, edges, status, cap, labels)


def fixed_points(homs, catalog):
    """Homomorphisms fixed exactly by every catalog entry."""
    catalog = tuple(catalog)
    return tuple(h for h in homs if all(apply_to_hom(g, h) == h for g in catalog))


def orbit_partition(homs, catalog):
    """Disjoint orbits covering ``homs``; sizes sum to len(homs)."""
    homs = tuple(homs)
    catalog = tuple(catalog)
    seen = set()
    parts = []
    for h in homs:
        if h in seen:
            continue
        res = orbit(h, catalog, cap=max(len(homs), 1))
        if not res.complete:
            raise IncompleteOrbitError("orbit escaped the enumerated hom set")
        parts.append(res)
        seen.update(res.homs)
    return tuple(parts)


def orbit_spanning_tree(o: OrbitResult):
    """Deterministic BFS spanning tree over the orbit's edges.

    Returns (parent, tree_edges) where parent[v] = (u, g) for non-base
    nodes and tree_edges is the set of (u, g, v) used.
    """
    adjacency: dict[int, list[tuple[int, int]]] = {}
    for u, g, v in o.edges:
        adjacency.setdefault(u, []).append((g, v))
    for lst in adjacency.values():
        lst.sort()
    parent: dict[int, tuple[int, int]] = {}
    tree_edges = set()
    frontier = [o.base_index]
    seen = {o.base_index}
    while frontier:
        nxt = []
        for u in frontier:
            for g, v in adjacency.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    parent[v] = (u, g)
                    tree_edges.add((u, g, v))
                    nxt.append(v)
        frontier = nxt
    if len(seen) != len(o.homs):
        raise IncompleteOrbitError("orbit edges do not connect all elements")
    return parent, tree_edges


def tree_path(parent, base_index: int, v: int) -> tuple[int, ...]:
    """Catalog indices labelling the tree path base -> v, in application
    order (rightmost applied last under precomposition)."""
    path = []
    while v != base_index:
        u, g = parent[v]
        path.append(g)
        v = u
    return tuple(reversed(path))


@dataclass(frozen=True)
class StabilizerData:
    """Schreier generators of the stabilizer of the orbit base point."""

    schreier_generators: tuple[Automorphism, ...]
    orbit_size: int


def stabilizer_generators(o: OrbitResult, catalog) -> StabilizerData:
    """Schreier generators t_u * g * t_v^-1 over a BFS spanning tree; each
    fixes the base homomorphism exactly."""
    if not o.complete:
        raise IncompleteOrbitError("stabilizer requires a complete orbit")
    catalog = tuple(catalog)
    parent, tree_edges = orbit_spanning_tree(o)
    base = o.homs[o.base_index]
    tree_auto: dict[int, Automorphism] = {}

    def auto_of(v: int) -> Automorphism:
        if v == o.base_index:
            from .autos import identity_automorphism

            return identity_automorphism(base.presentation)
        if v not in tree_auto:
            u, g = parent[v]
            tree_auto[v] = compose(auto_of(u), catalog[g])
        return tree_auto[v]

    gens: list[Automorphism] = []
    seen = set()
    for u, g, v in o.edges:
        if (u, g, v) in tree_edges:
            continue
        s = compose(compose(auto_of(u), catalog[g]), auto_of(v).inverse())
        if apply_to_hom(s, base) != base:
            raise AssertionError("schreier generator does not fix the base point")
        if s not in seen:
            seen.add(s)
            gens.append(s)
    return StabilizerData(tuple(gens), o.size)


def export_orbit_dot(o: OrbitResult) -> str:
    """Deterministic DOT digraph; nodes are hom indices, edge labels are
    catalog labels."""
    lines = ["digraph orbit {"]
    for i in range(len(o.homs)):
        lines.append(f'  {i} [label="{i}"];')
    for u, g, v in o.edges:
        lines.append(f'  {u} -> {v} [label="{o.catalog_labels[g]}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def partition_up_to_conjugation(homs):
    """Convenience quotient: classes of homomorphisms under simultaneous
    conjugation of the images by the finite target."""
    homs = tuple(homs)
    if not homs:
        return ()
    target = homs[0].target
    elems = target.elements()
    seen = set()
    classes = []
    for h in homs:
        if h.images in seen:
            continue
        cls = set()
        for g in elems:
            ginv = target.inverse(g)
            cls.add(tuple(target.multiply(target.multiply(g, im), ginv) for im in h.images))
        seen.update(cls)
        classes.append(tuple(sorted(cls)))
    return tuple(classes)
