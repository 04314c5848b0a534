"""Machine-checked finiteness certificates.

Given a homomorphism rho from a free or surface group into a target group
and an automorphism catalog, the pipeline replays, on the concrete
instance, the argument that a finite precomposition orbit forces a finite
image:

1. capped BFS orbit and Schreier stabilizer data;
2. a central subgroup Z of the image with finite quotient F (the image is
   a central extension when the inner orbit is finite);
3. the pullback N = preimage of Z, a finite-index normal subgroup with
   quotient Q = F, and H_1(N) with its Q-action;
4. the exact character check that H_1(N, Q) decomposes as regular copies
   plus trivial summands;
5. the induced map from H_1(N) to the coordinates of Z, which must kill
   every nontrivial isotypic component rationally (Schur step);
6. co-invariant triviality of the Q-invariant subspace under the
   stabilizer action, which forces the map to vanish rationally there too,
   so Z has no free part.

A certificate records every matrix identity used, is self-contained JSON,
and is re-verifiable by ``check_certificate`` without re-running the
pipeline.  The conclusion is cross-checked against a direct closure of the
image; the pipeline never reports a finite image when the two disagree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .autos import automorphism_from_json
from .linalg import (
    IntMatrix,
    averaging_projector,
    coinvariants,
    fixed_subspace,
    frac_from_json,
    frac_identity,
    frac_matrix,
    frac_mul,
    frac_sub,
    frac_to_json,
    hstack,
    invert_unimodular,
    lattice_contains,
    rational_in_span,
    rational_rank,
    rational_solve,
    snf,
)
from .orbits import (
    DEFAULT_ORBIT_CAP,
    Homomorphism,
    OrbitResult,
    apply_to_hom,
    orbit,
    orbit_spanning_tree,
)
from .subgroups import (
    FiniteQuotient,
    characteristic_core,
    cw_verify,
    finite_quotient,
    subgroup_homology,
    transfer_map,
)
from .targets import (
    FiniteAbelianGroup,
    FiniteQuotientGroup,
    FreeAbelianGroup,
    HeisenbergGroup,
    NotFiniteError,
    center,
    closure,
    element_order,
    parse_target,
)
from .words import free_presentation, presentation_from_json

CERT_SCHEMA = "finorbit/certificate/1"


class CentralStructureError(RuntimeError):
    """No finite central quotient of the image could be constructed."""


class ConsistencyError(RuntimeError):
    """A pipeline precondition failed (for example the kernel does not map
    into the designated central subgroup)."""


class InternalInvariantError(RuntimeError):
    """An identity that must hold mathematically failed; indicates a bug,
    never a property of the instance."""


@dataclass(frozen=True)
class CentralData:
    """A central subgroup Z of the image with finite quotient F.

    Z is recorded by generators plus the lattice of exponent relations
    among them, so maps into Z are integer matrices compared modulo the
    relation lattice.  A trivial Z is encoded by zero generators and the
    full relation lattice on one slot.
    """

    z_generators: tuple
    z_relations: IntMatrix | None  # columns span the relation lattice
    z_orders: tuple
    subgroup_order: int | None
    f: object  # finite TargetGroup, the quotient of the image
    pullback: FiniteQuotient
    _coords: object  # value -> exponent tuple, or None when not in <Z>

    @property
    def coordinate_count(self) -> int:
        return max(len(self.z_generators), 1)

    def coordinates(self, value):
        return self._coords(value)

    @property
    def z_is_finite(self) -> bool:
        return all(o is not None for o in self.z_orders)


def _minimal_generators(elements, target, skip_identity=True):
    """Greedy minimal generating subset of a finite abelian set, scanned in
    sorted order for determinism."""
    ident = target.identity()
    gens = []
    reached = {ident}
    for e in sorted(elements):
        if skip_identity and e == ident:
            continue
        if e not in reached:
            gens.append(e)
            reached = set(closure(gens, target, cap=len(elements) + 1).elements)
    return tuple(gens)


def _finite_dlog_table(z_gens, orders, target):
    """Exponent coordinates for every element of a finite <Z>, first-found
    over the lexicographic exponent box."""
    table = {}
    for exps in itertools.product(*(range(o) for o in orders)):
        val = target.identity()
        for g, e in zip(z_gens, exps):
            val = target.multiply(val, target.power(g, e))
        table.setdefault(val, exps)
    return table


def _finite_relation_lattice(z_gens, orders, table, target):
    """Columns spanning {e : z^e = identity} for a finite <Z>."""
    r = len(z_gens)
    cols = []
    for exps in itertools.product(*(range(o) for o in orders)):
        val = target.identity()
        for g, e in zip(z_gens, exps):
            val = target.multiply(val, target.power(g, e))
        if val == target.identity() and any(exps):
            cols.append(exps)
    for i, o in enumerate(orders):
        cols.append(tuple(o if j == i else 0 for j in range(r)))
    return IntMatrix(tuple(zip(*cols)))


def central_extension_data(rho: Homomorphism, cap: int = 100_000) -> CentralData:
    """Choose a central subgroup Z of the image with finite quotient F and
    build the pullback surjection onto F.

    Finite images take Z to be the full center.  Infinite abelian images
    take Z to be the whole image (F trivial).  Infinite Heisenberg images
    take Z to be the subgroup generated by the commutators of the images,
    which is central; its quotient is probed by capped coset enumeration
    and reported not finite when it does not close.
    """
    target = rho.target
    p = rho.presentation
    c = closure(rho.images, target, cap)
    if c.closed:
        z_gens = _minimal_generators(center(c), target)
        orders = tuple(element_order(target, g, cap) for g in z_gens)
        table = _finite_dlog_table(z_gens, orders, target) if z_gens else {target.identity(): ()}
        relations = (
            _finite_relation_lattice(z_gens, orders, table, target)
            if z_gens
            else IntMatrix.from_rows([[1]])
        )
        zset = tuple(table.keys())
        f = FiniteQuotientGroup(target, zset, c.elements)
        images = tuple(f.project(im) for im in rho.images)
        pull = finite_quotient(p, f, images)
        sub_order = len(zset)
        return CentralData(z_gens, relations, orders, sub_order, f, pull, table.get)

    if all(target.commutes(a, b) for a in rho.images for b in rho.images):
        return _abelian_image_central_data(rho, cap)

    if isinstance(target, HeisenbergGroup):
        comms = set()
        for a in rho.images:
            for b in rho.images:
                x = target.multiply(
                    target.multiply(a, b), target.inverse(target.multiply(b, a))
                )
                if x != target.identity():
                    comms.add(x)
        if comms and all(target.is_central(x) for x in comms):
            from math import gcd

            d = 0
            for x in comms:
                d = gcd(d, x[2])
            z = (0, 0, d) if target.modulus is None else target._norm((0, 0, d))
            try:
                _probe_heisenberg_quotient(rho, z, cap)
            except NotFiniteError as exc:
                raise CentralStructureError(
                    f"no finite central quotient found within cap: {exc}"
                ) from exc
    raise CentralStructureError(
        "image closure exceeded the cap and the target has no curated central structure"
    )


def _probe_heisenberg_quotient(rho, z, cap):
    """Capped coset enumeration of image / <z> for a central z in the
    integer Heisenberg group; raises NotFiniteError when it does not close."""
    target = rho.target
    d = z[2]

    def rep(x):
        if target.modulus is not None:
            return x
        return (x[0], x[1], x[2] % d if d else x[2])

    step = []
    for g in rho.images:
        step.append(g)
        step.append(target.inverse(g))
    seen = {rep(target.identity())}
    frontier = list(seen)
    while frontier:
        nxt = []
        for e in frontier:
            for g in step:
                r = rep(target.multiply(e, g))
                if r not in seen:
                    if len(seen) >= cap:
                        raise NotFiniteError(f"quotient did not close within {cap} cosets")
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    raise NotFiniteError("unexpected finite quotient of an infinite Heisenberg image")


def _abelian_image_central_data(rho: Homomorphism, cap: int) -> CentralData:
    """Z = whole (abelian) image, F trivial.  Supported coordinates:
    free abelian targets, finite abelian targets, and Heisenberg targets
    whose images are all central."""
    target = rho.target
    p = rho.presentation
    ident = target.identity()
    z_gens = tuple(dict.fromkeys(im for im in rho.images if im != ident))
    orders = tuple(element_order(target, g, cap) for g in z_gens)

    if isinstance(target, FreeAbelianGroup):
        coord_matrix = IntMatrix(tuple(zip(*z_gens))) if z_gens else None

        def coords(value):
            from .linalg import integer_solve

            if value == ident:
                return (0,) * len(z_gens)
            if coord_matrix is None:
                return None
            return integer_solve(coord_matrix, value)

        relations = _abelian_relation_lattice(z_gens, moduli=None, rank=target.rank)
    elif isinstance(target, HeisenbergGroup) and all(target.is_central(g) for g in z_gens):
        cvals = tuple(g[2] for g in z_gens)
        mod = target.modulus

        def coords(value):
            from .linalg import integer_solve

            if value == ident:
                return (0,) * len(z_gens)
            if not target.is_central(value):
                return None
            mat_rows = [list(cvals)]
            rhs = [value[2]]
            if mod is not None:
                mat_rows[0].append(mod)
                sol = integer_solve(IntMatrix.from_rows(mat_rows), rhs)
                return None if sol is None else sol[: len(z_gens)]
            return integer_solve(IntMatrix.from_rows(mat_rows), rhs)

        relations = _abelian_relation_lattice(
            tuple((c,) for c in cvals), moduli=(mod,) if mod else None, rank=1
        )
    else:
        raise CentralStructureError(
            f"abelian image coordinates are not supported for {target.key}"
        )

    if not z_gens:
        relations = IntMatrix.from_rows([[1]])
    trivial = FiniteAbelianGroup((1,))
    images = tuple(trivial.identity() for _ in range(p.generator_count))
    pull = finite_quotient(p, trivial, images)
    return CentralData(z_gens, relations, orders, None if z_gens else 1, trivial, pull, coords)


def _abelian_relation_lattice(z_vectors, moduli, rank):
    """Relation lattice of additive generators, optionally modulo per-
    coordinate moduli."""
    from .linalg import kernel_basis

    if not z_vectors:
        return IntMatrix.from_rows([[1]])
    r = len(z_vectors)
    cols = [list(v) for v in z_vectors]
    if moduli:
        for i in range(rank):
            col = [0] * rank
            col[i] = moduli[i % len(moduli)] if len(moduli) == rank else moduli[0]
            cols.append(col)
    mat = IntMatrix(tuple(zip(*cols)))
    ker = kernel_basis(mat)
    if ker is None:
        return None
    rows = ker.entries[:r]
    trimmed = [[row[j] for j in range(ker.cols)] for row in rows]
    keep = [j for j in range(ker.cols) if any(trimmed[i][j] for i in range(r))]
    if not keep:
        return None
    return IntMatrix.from_rows([[trimmed[i][j] for j in keep] for i in range(r)])


# ---------------------------------------------------------------------------
# The induced central map and the two rational steps
# ---------------------------------------------------------------------------


def induced_central_map(rho: Homomorphism, central: CentralData, h) -> IntMatrix:
    """Matrix of the map H_1(N) -> Z-coordinates induced by rho.

    Columns are exponent vectors of the images of the homology basis;
    well-definedness and Q-equivariance are verified exactly (equality of
    integer matrices modulo the relation lattice of Z)."""
    r = central.coordinate_count
    cols = []
    for w in h.basis_words:
        value = rho(w)
        e = central.coordinates(value)
        if e is None:
            raise ConsistencyError("kernel image is not inside the designated central subgroup")
        cols.append(e if e else (0,))
    ambient = IntMatrix(tuple(zip(*cols))) if central.z_generators else IntMatrix.zeros(1, len(cols))
    mat = ambient * h.section if h.section is not None else ambient
    if h.relations is not None and central.z_generators:
        for j in range(h.relations.cols):
            col = (ambient * h.relations).column(j)
            if not lattice_contains(central.z_relations, col):
                raise ConsistencyError("central map is not well defined on the relation lattice")
    for qe in h.q_elements:
        if not _congruent(mat * h.q_action[qe], mat, central.z_relations):
            raise InternalInvariantError("central map does not commute with the quotient action")
    return mat


def _congruent(a: IntMatrix, b: IntMatrix, lattice: IntMatrix | None) -> bool:
    diff = a - b
    return all(lattice_contains(lattice, diff.column(j)) for j in range(diff.cols))


@dataclass(frozen=True)
class StepReport:
    name: str
    verdict: str  # "PASS" | "FAIL"
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_json(self):
        doc = {"verdict": self.verdict}
        if self.reason:
            doc["reason"] = self.reason
        return doc


def isotypic_kernel_step(central_map: IntMatrix, h, z_relations) -> tuple[StepReport, tuple]:
    """Verify that the central map kills every nontrivial isotypic component
    rationally: composed with (I - averaging projector) it must land in the
    rational span of the relation lattice."""
    mats = [h.q_action[qe] for qe in h.q_elements]
    p0 = averaging_projector(mats)
    n = len(p0)
    complement = frac_sub(frac_identity(n), p0)
    image = frac_mul(frac_matrix(central_map), complement)
    ok = all(
        rational_in_span(z_relations, tuple(row[j] for row in image)) for j in range(n)
    )
    verdict = StepReport(
        "kernel_step",
        "PASS" if ok else "FAIL",
        "" if ok else "a nontrivial isotypic component survives the central map",
    )
    return verdict, p0


@dataclass(frozen=True)
class CoinvariantsData:
    report: StepReport
    invariant_basis: IntMatrix
    catalog_action: tuple[IntMatrix, ...]
    restricted: tuple[IntMatrix, ...]
    invariants: object
    schreier_edge_count: int
    vanishes_on_invariants: bool


def stabilizer_coinvariants_step(
    o: OrbitResult,
    catalog,
    h,
    central_map: IntMatrix,
    z_relations,
) -> CoinvariantsData:
    """Co-invariants of the Q-invariant subspace under the stabilizer.

    Catalog actions on H_1(N) are computed by rewriting; tree and Schreier
    matrices then come from functoriality, so no automorphism words are
    composed.  Requires every catalog entry to preserve N (the caller
    upgrades N to a characteristic core when this fails).  PASS means the
    co-invariants are finite and the central map vanishes rationally on the
    invariant subspace."""
    catalog = tuple(catalog)
    q_mats = [h.q_action[qe] for qe in h.q_elements]
    basis = fixed_subspace(q_mats)
    if basis is None:
        raise InternalInvariantError("invariant subspace is zero; transfer image is missing")
    action = [h.matrix_of_automorphism(g) for g in catalog]
    action_inv = [invert_unimodular(m) for m in action]
    parent, tree_edges = orbit_spanning_tree(o)
    size = len(o.homs)
    tree_mat: dict[int, IntMatrix] = {o.base_index: IntMatrix.identity(h.rank)}
    tree_inv: dict[int, IntMatrix] = {o.base_index: IntMatrix.identity(h.rank)}

    order_by_depth = sorted(parent.keys(), key=lambda v: _depth(parent, o.base_index, v))
    for v in order_by_depth:
        u, g = parent[v]
        tree_mat[v] = tree_mat[u] * action[g]
        tree_inv[v] = action_inv[g] * tree_inv[u]

    seen = set()
    stab_mats = []
    schreier_count = 0
    for u, g, v in o.edges:
        if (u, g, v) in tree_edges:
            continue
        schreier_count += 1
        s = tree_mat[u] * action[g] * tree_inv[v]
        if s.entries not in seen:
            seen.add(s.entries)
            stab_mats.append(s)

    restricted = []
    rseen = set()
    for s in stab_mats:
        x = _restrict(s, basis)
        if x.entries not in rseen:
            rseen.add(x.entries)
            restricted.append(x)
        if not _congruent(central_map * s, central_map, z_relations):
            raise InternalInvariantError("stabilizer does not fix the central map")

    dim = basis.cols
    inv = coinvariants(dim, [x for x in restricted if x.entries != IntMatrix.identity(dim).entries])
    vanishes = all(
        rational_in_span(z_relations, (central_map * basis).column(j)) for j in range(dim)
    )
    if inv.is_finite:
        if not vanishes:
            raise InternalInvariantError(
                "finite co-invariants must force the central map to vanish rationally"
            )
        report = StepReport("coinvariants_step", "PASS")
    else:
        report = StepReport(
            "coinvariants_step",
            "FAIL",
            f"co-invariants of the invariant subspace have free rank {inv.free_rank}",
        )
    return CoinvariantsData(report, basis, tuple(action), tuple(restricted), inv, schreier_count, vanishes)


def _depth(parent, base, v):
    d = 0
    while v != base:
        v = parent[v][0]
        d += 1
    return d


def _restrict(s: IntMatrix, basis: IntMatrix) -> IntMatrix:
    sol = rational_solve(basis, s * basis)
    if sol is None:
        raise InternalInvariantError("stabilizer action does not preserve the invariant subspace")
    rows = []
    for r in sol:
        out = []
        for x in r:
            if x.denominator != 1:
                raise InternalInvariantError("restricted stabilizer action is not integral")
            out.append(int(x))
        rows.append(out)
    return IntMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# The full pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    doc: dict

    @property
    def conclusion(self) -> dict:
        return self.doc["conclusion"]

    @property
    def image_finite(self) -> bool:
        return self.conclusion["kind"] == "image_finite"

    @property
    def order(self):
        return self.conclusion.get("order")

    @property
    def reason(self):
        return self.conclusion.get("reason")


def _inconclusive(doc, reason):
    doc["conclusion"] = {"kind": "inconclusive", "reason": reason}
    return Certificate(doc)


def certify(
    rho: Homomorphism,
    catalog,
    catalog_spec: str = "custom",
    orbit_cap: int = DEFAULT_ORBIT_CAP,
    closure_cap: int = 100_000,
    workers: int = 1,
    characteristic_bound: int | None = None,
) -> Certificate:
    """Run the whole pipeline and emit a self-contained certificate.

    The conclusion is ``image_finite`` only when every step passes and the
    direct closure cross-check confirms the computed order; any failing or
    capped step yields ``inconclusive`` with the failing step named."""
    catalog = tuple(catalog)
    doc: dict = {
        "schema": CERT_SCHEMA,
        "instance": {
            "presentation": rho.presentation.to_json(),
            "target": rho.target.key,
            "images": [rho.target.element_to_json(e) for e in rho.images],
            "catalog_spec": catalog_spec,
        },
        "caps": {"orbit": orbit_cap, "closure": closure_cap},
        "catalog": [a.to_json() for a in catalog],
    }
    cross = closure(rho.images, rho.target, closure_cap)
    doc["cross_check"] = {"status": cross.status, "order": cross.order, "cap": closure_cap}

    o = orbit(rho, catalog, cap=orbit_cap, workers=workers)
    doc["orbit"] = {
        "status": o.status,
        "size": o.size,
        "base_index": o.base_index,
        "edges": [list(e) for e in o.edges] if o.complete else None,
    }
    if not o.complete:
        return _inconclusive(doc, "orbit not finite within cap")

    try:
        central = central_extension_data(rho, closure_cap)
    except CentralStructureError as exc:
        return _inconclusive(doc, f"central structure: {exc}")
    doc["central"] = {
        "z_generators": [rho.target.element_to_json(g) for g in central.z_generators],
        "z_relations": central.z_relations.to_json() if central.z_relations is not None else None,
        "z_orders": list(central.z_orders),
        "subgroup_order": central.subgroup_order,
        "f_order": central.f.order(),
    }

    fq = central.pullback
    h = subgroup_homology(fq)
    upgraded = False
    if not _catalog_preserves_kernel(catalog, h):
        bound = characteristic_bound if characteristic_bound is not None else central.f.order()
        try:
            fq = characteristic_core(rho.presentation, bound)
            h = subgroup_homology(fq)
        except Exception as exc:  # budget or construction failure
            return _inconclusive(doc, f"characteristic core upgrade failed: {exc}")
        upgraded = True
        if not _catalog_preserves_kernel(catalog, h):
            raise InternalInvariantError("characteristic core is not catalog invariant")
    doc["kernel_upgraded_to_characteristic_core"] = upgraded

    table = h.table
    qn = table.index
    elem_index = {e: i for i, e in enumerate(h.q_elements)}
    mul_table = [
        [elem_index[fq.quotient.multiply(a, b)] for b in h.q_elements] for a in h.q_elements
    ]
    doc["quotient"] = {
        "order": qn,
        "identity_index": elem_index[fq.quotient.identity()],
        "mul_table": mul_table,
    }
    doc["homology"] = {
        "kind": rho.presentation.kind,
        "ambient_rank": h.ambient_rank,
        "rank": h.rank,
        "q_action": [h.q_action[qe].to_json() for qe in h.q_elements],
        "catalog_action": None,  # filled by the co-invariants step
    }

    cw = cw_verify(fq, h)
    doc["cw"] = cw.to_json()
    if cw.verdict != "PASS":
        return _inconclusive(doc, "character decomposition check failed")

    doc["transfer"] = transfer_map(h).to_json()

    try:
        central_map = induced_central_map(rho, central, h)
    except ConsistencyError as exc:
        return _inconclusive(doc, f"central map: {exc}")
    doc["central_map"] = central_map.to_json()

    kernel_report, projector = isotypic_kernel_step(central_map, h, central.z_relations)
    doc["projector"] = frac_to_json(projector)
    doc["kernel_step"] = kernel_report.to_json()

    coin = stabilizer_coinvariants_step(o, catalog, h, central_map, central.z_relations)
    doc["homology"]["catalog_action"] = [m.to_json() for m in coin.catalog_action]
    doc["invariant_basis"] = coin.invariant_basis.to_json()
    tree_parent, _tree_edges = orbit_spanning_tree(o)
    doc["stabilizer"] = {
        "tree": sorted([v, u, g] for v, (u, g) in tree_parent.items()),
        "schreier_edge_count": coin.schreier_edge_count,
        "distinct_restricted": len(coin.restricted),
        # the stabilizer fixes rho exactly, hence acts trivially on Z: the
        # co-invariants of Z under that action are Z itself
        "acts_trivially_on_z": True,
    }
    nontrivial = [
        x for x in coin.restricted if x.entries != IntMatrix.identity(x.rows).entries
    ]
    doc["coinvariants_step"] = {
        **coin.report.to_json(),
        "restricted_matrices": [m.to_json() for m in coin.restricted],
        "stacked": hstack(
            [m - IntMatrix.identity(m.rows) for m in nontrivial]
        ).to_json()
        if nontrivial
        else None,
        "invariants": coin.invariants.to_json(),
        "vanishes_on_invariants": coin.vanishes_on_invariants,
    }
    stacked = doc["coinvariants_step"]["stacked"]
    if stacked is not None:
        res = snf(IntMatrix.from_json(stacked))
        doc["coinvariants_step"]["snf"] = {
            "U": res.U.to_json(),
            "D": res.D.to_json(),
            "V": res.V.to_json(),
        }
    else:
        doc["coinvariants_step"]["snf"] = None

    failed = [r for r in (kernel_report, coin.report) if not r.passed]
    if failed:
        return _inconclusive(doc, f"{failed[0].name}: {failed[0].reason}")
    if not central.z_is_finite:
        raise InternalInvariantError("all steps passed but Z has an infinite generator")
    order = central.subgroup_order * central.f.order()
    if not cross.closed or cross.order != order:
        raise InternalInvariantError(
            f"certified order {order} disagrees with closure cross-check {cross.order}"
        )
    doc["conclusion"] = {"kind": "image_finite", "order": order}
    return Certificate(doc)


def _catalog_preserves_kernel(catalog, h) -> bool:
    t = h.table
    for g in catalog:
        for w in h.basis_words:
            if not t.contains(g.apply(w)) or not t.contains(g.backward.apply(w)):
                return False
    return True


# ---------------------------------------------------------------------------
# Independent certificate checking
# ---------------------------------------------------------------------------

_TOP_KEYS = {
    "schema",
    "instance",
    "caps",
    "catalog",
    "cross_check",
    "orbit",
    "central",
    "kernel_upgraded_to_characteristic_core",
    "quotient",
    "homology",
    "cw",
    "transfer",
    "central_map",
    "projector",
    "kernel_step",
    "invariant_basis",
    "stabilizer",
    "coinvariants_step",
    "conclusion",
}


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    failures: tuple[str, ...]
    checks_run: int


def check_certificate(doc: dict) -> CheckReport:
    """Re-verify every identity recorded in a certificate.

    Uses only the certificate contents (plus deterministic reconstruction
    of the target arithmetic from its spec string); the pipeline is not
    re-run.  Unknown fields are rejected: certificates are evidence.
    Malformed or internally inconsistent data is reported as a failure,
    never raised."""
    failures: list[str] = []
    checks = 0

    def check(cond: bool, msg: str):
        nonlocal checks
        checks += 1
        if not cond:
            failures.append(msg)

    try:
        return _check_certificate_body(doc, failures, check, lambda: checks)
    except (KeyError, TypeError, ValueError, IndexError, InternalInvariantError) as exc:
        failures.append(f"certificate does not verify: {type(exc).__name__}: {exc}")
        return CheckReport(False, tuple(failures), checks + 1)


def _check_certificate_body(doc, failures, check, checks_count) -> CheckReport:

    unknown = set(doc) - _TOP_KEYS
    if unknown:
        return CheckReport(False, (f"unknown certificate fields: {sorted(unknown)}",), 1)
    check(doc.get("schema") == CERT_SCHEMA, "schema mismatch")

    inst = doc["instance"]
    presentation = presentation_from_json(inst["presentation"])
    target = parse_target(inst["target"])
    images = tuple(target.element_from_json(e) for e in inst["images"])
    rho = Homomorphism(presentation, target, images)
    catalog = tuple(automorphism_from_json(a) for a in doc["catalog"])  # re-certifies entries
    check(all(a.presentation == presentation for a in catalog), "catalog presentation mismatch")

    conclusion = doc["conclusion"]
    orbit_doc = doc["orbit"]

    if orbit_doc["edges"] is not None:
        homs = _replay_orbit(rho, catalog, orbit_doc, check)
    else:
        homs = None
        check(conclusion["kind"] == "inconclusive", "capped orbit cannot certify finiteness")

    if doc.get("cross_check", {}).get("status") == "closed":
        cc = closure(images, target, doc["cross_check"]["cap"])
        check(
            cc.closed and cc.order == doc["cross_check"]["order"],
            "closure cross-check does not reproduce",
        )

    if "quotient" not in doc or doc.get("central") is None:
        check(conclusion["kind"] == "inconclusive", "incomplete certificate must be inconclusive")
        return CheckReport(not failures, tuple(failures), checks_count())

    central = doc["central"]
    z_rel = (
        IntMatrix.from_json(central["z_relations"])
        if central["z_relations"] is not None
        else None
    )

    q = doc["quotient"]
    mul = q["mul_table"]
    ident = q["identity_index"]
    q_mats = [IntMatrix.from_json(m) for m in doc["homology"]["q_action"]]
    check(len(q_mats) == q["order"], "quotient action size mismatch")
    check(
        q_mats[ident].entries == IntMatrix.identity(doc["homology"]["rank"]).entries,
        "identity does not act trivially",
    )
    for i in range(len(q_mats)):
        for j in range(len(q_mats)):
            if (q_mats[i] * q_mats[j]).entries != q_mats[mul[i][j]].entries:
                check(False, f"quotient action not multiplicative at ({i},{j})")
                break
        else:
            continue
        break
    else:
        check(True, "quotient action multiplicative")

    rank = doc["homology"]["rank"]
    n = presentation.generator_count
    m_order = q["order"]
    kind = doc["homology"]["kind"]
    if kind == "free":
        check(rank == 1 + m_order * (n - 1), "free-kernel rank formula fails")
        pred_one, pred_off = (n - 1) * m_order + 1, 1
    else:
        g = presentation.genus
        check(rank - 2 == m_order * (2 * g - 2), "surface-kernel rank formula fails")
        pred_one, pred_off = (2 * g - 2) * m_order + 2, 2
    cw = doc["cw"]
    traces = [mm.trace() for mm in q_mats]
    check(traces == list(cw["character"]), "recorded character differs from traces")
    expected = [pred_one if i == ident else pred_off for i in range(m_order)]
    check(list(cw["predicted"]) == expected, "predicted character is wrong")
    check(
        (cw["verdict"] == "PASS") == (traces == expected),
        "character verdict inconsistent",
    )

    transfer = IntMatrix.from_json(doc["transfer"])
    check(
        all((mm * transfer).entries == transfer.entries for mm in q_mats),
        "transfer image is not fixed by the quotient action",
    )
    check(rational_rank(frac_matrix(transfer)) == n, "transfer rank is wrong")

    cmap = IntMatrix.from_json(doc["central_map"])
    for mm in q_mats:
        if not _congruent(cmap * mm, cmap, z_rel):
            check(False, "central map does not commute with the quotient action")
            break
    else:
        check(True, "central map equivariance")

    p0 = frac_from_json(doc["projector"])
    total = [[Fraction(0)] * rank for _ in range(rank)]
    for mm in q_mats:
        for i in range(rank):
            for jj in range(rank):
                total[i][jj] += mm.entries[i][jj]
    avg = tuple(tuple(x / m_order for x in row) for row in total)
    check(avg == p0, "projector is not the group average")
    check(frac_mul(p0, p0) == p0, "projector is not idempotent")

    complement = frac_sub(frac_identity(rank), p0)
    image = frac_mul(frac_matrix(cmap), complement)
    kernel_ok = all(
        rational_in_span(z_rel, tuple(row[j] for row in image)) for j in range(rank)
    )
    check(
        (doc["kernel_step"]["verdict"] == "PASS") == kernel_ok,
        "kernel step verdict inconsistent",
    )

    basis = IntMatrix.from_json(doc["invariant_basis"])
    check(
        all((mm * basis).entries == basis.entries for mm in q_mats),
        "invariant basis is not fixed",
    )
    check(rational_rank(frac_matrix(basis)) == basis.cols, "invariant basis is degenerate")
    check(basis.cols == (n if kind == "free" else 2 * presentation.genus), "invariant dimension")

    cat_mats = [IntMatrix.from_json(mm) for mm in doc["homology"]["catalog_action"]]
    check(len(cat_mats) == len(catalog), "catalog action count mismatch")
    check(all(mm.det() in (1, -1) for mm in cat_mats), "catalog action not unimodular")

    stab = doc["stabilizer"]
    if homs is not None:
        restricted = _replay_stabilizer(doc, orbit_doc, stab, cat_mats, basis, check)
        recorded = {IntMatrix.from_json(mm).entries for mm in doc["coinvariants_step"]["restricted_matrices"]}
        check(restricted == recorded, "restricted stabilizer matrices do not reproduce")
        check(len(recorded) == stab["distinct_restricted"], "distinct matrix count mismatch")

    coin = doc["coinvariants_step"]
    xs = [IntMatrix.from_json(mm) for mm in coin["restricted_matrices"]]
    dim = basis.cols
    nontrivial = [x for x in xs if x.entries != IntMatrix.identity(dim).entries]
    if nontrivial:
        stacked = hstack([x - IntMatrix.identity(dim) for x in nontrivial])
        check(
            coin["stacked"] is not None
            and IntMatrix.from_json(coin["stacked"]).entries == stacked.entries,
            "stacked relation matrix mismatch",
        )
        res_doc = coin["snf"]
        u, d, v = (IntMatrix.from_json(res_doc[k]) for k in ("U", "D", "V"))
        from .linalg import SNFResult

        check(SNFResult(u, d, v).verify(stacked), "recorded SNF does not verify")
        diag = [d.entries[i][i] for i in range(min(d.rows, d.cols))]
        finite = all(diag[i] != 0 for i in range(min(dim, len(diag)))) and len(diag) >= dim
        inv = coin["invariants"]
        check((inv["free_rank"] == 0) == finite, "invariants disagree with SNF")
        torsion = [x for x in diag if x > 1]
        check(list(inv["torsion"]) == torsion, "torsion moduli disagree with SNF")
    else:
        check(coin["stacked"] is None, "stacked matrix recorded without relations")
        check(coin["invariants"]["free_rank"] == dim, "invariants of trivial action")
        finite = dim == 0

    vanishes = all(
        rational_in_span(z_rel, (cmap * basis).column(j)) for j in range(basis.cols)
    )
    check(coin["vanishes_on_invariants"] == vanishes, "vanishing flag inconsistent")
    check(
        (coin["verdict"] == "PASS") == (finite and vanishes),
        "coinvariants verdict inconsistent",
    )

    if conclusion["kind"] == "image_finite":
        check(doc["kernel_step"]["verdict"] == "PASS", "finite conclusion with failed kernel step")
        check(coin["verdict"] == "PASS", "finite conclusion with failed coinvariants step")
        check(all(o is not None for o in central["z_orders"]), "finite conclusion with infinite Z")
        check(
            central["subgroup_order"] is not None
            and conclusion["order"] == central["subgroup_order"] * central["f_order"],
            "conclusion order does not factor through the central extension",
        )
        check(
            doc["cross_check"]["status"] == "closed"
            and doc["cross_check"]["order"] == conclusion["order"],
            "conclusion order disagrees with the closure cross-check",
        )
    return CheckReport(not failures, tuple(failures), checks_count())


def _replay_orbit(rho, catalog, orbit_doc, check):
    """Walk the recorded tree and verify every recorded edge, proving the
    recorded orbit is catalog-closed of the recorded size."""
    size = orbit_doc["size"]
    base = orbit_doc["base_index"]
    edges = [tuple(e) for e in orbit_doc["edges"]]
    check(len(edges) == size * len(catalog), "edge count is not size x catalog")
    check(
        sorted((u, g) for u, g, _ in edges)
        == sorted((i, g) for i in range(size) for g in range(len(catalog))),
        "edges do not cover every node/generator pair exactly once",
    )
    adjacency = {}
    for u, g, v in edges:
        adjacency[(u, g)] = v
    homs = {base: rho}
    frontier = [base]
    while frontier:
        nxt = []
        for u in frontier:
            for g in range(len(catalog)):
                v = adjacency[(u, g)]
                img = apply_to_hom(catalog[g], homs[u])
                if v not in homs:
                    homs[v] = img
                    nxt.append(v)
                elif homs[v] != img:
                    check(False, f"edge ({u},{g},{v}) does not verify")
                    return homs
        frontier = nxt
    check(len(homs) == size, "recorded orbit is not connected at the recorded size")
    check(len(set(h.images for h in homs.values())) == size, "recorded orbit has duplicates")
    return homs


def _replay_stabilizer(doc, orbit_doc, stab, cat_mats, basis, check):
    base = orbit_doc["base_index"]
    size = orbit_doc["size"]
    parent = {v: (u, g) for v, u, g in (tuple(row) for row in stab["tree"])}
    check(set(parent) == set(range(size)) - {base}, "stabilizer tree does not span the orbit")
    rank = cat_mats[0].rows if cat_mats else 0
    tree_mat = {base: IntMatrix.identity(rank)}
    tree_inv = {base: IntMatrix.identity(rank)}
    cat_inv = [invert_unimodular(m) for m in cat_mats]

    def fill(v):
        if v in tree_mat:
            return
        u, g = parent[v]
        fill(u)
        tree_mat[v] = tree_mat[u] * cat_mats[g]
        tree_inv[v] = cat_inv[g] * tree_inv[u]

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, size + 100))
    try:
        for v in parent:
            fill(v)
    finally:
        sys.setrecursionlimit(old)
    tree_edges = {(u, g, v) for v, (u, g) in parent.items()}
    restricted = set()
    count = 0
    for u, g, v in (tuple(e) for e in orbit_doc["edges"]):
        if (u, g, v) in tree_edges:
            continue
        count += 1
        s = tree_mat[u] * cat_mats[g] * tree_inv[v]
        restricted.add(_restrict(s, basis).entries)
    check(count == stab["schreier_edge_count"], "schreier edge count mismatch")
    return restricted


# ---------------------------------------------------------------------------
# Braid invariance of the exponent-sum representation
# ---------------------------------------------------------------------------


def exponent_sum_hom(n: int, target=None) -> Homomorphism:
    """The map sending every free generator to a fixed infinite-order
    element (default: 1 in Z)."""
    target = target if target is not None else FreeAbelianGroup(1)
    p = free_presentation(n)
    gen = target.element_from_json([1]) if isinstance(target, FreeAbelianGroup) else None
    if gen is None:
        raise ValueError("exponent-sum construction needs a free abelian target")
    return Homomorphism(p, target, tuple(gen for _ in range(n)))


def braid_invariant_check(n: int, order_cap: int = 1000) -> dict:
    """Verify that the exponent-sum representation is fixed by every braid
    generator and has infinite image (within the order cap)."""
    from .autos import braid_generators

    rho = exponent_sum_hom(n)
    gens = braid_generators(n)
    fixed = all(apply_to_hom(g, rho) == rho for g in gens)
    infinite = element_order(rho.target, rho.images[0], order_cap) is None
    return {
        "strands": n,
        "fixed_by_braid_generators": fixed,
        "image_infinite_within_cap": infinite,
        "order_cap": order_cap,
        "verdict": "PASS" if fixed and infinite else "FAIL",
    }
