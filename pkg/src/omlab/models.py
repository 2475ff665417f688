"""Labelled-graph models of the measurement logic, and their axiom checker.

A model is a directed graph whose edges carry lattice elements: an edge from
``a`` to ``b`` labelled ``p`` means the outcome ``p`` is possible at ``a`` and
leaves the system at ``b``.  A vertex *verifies* a label when no outgoing edge
carries its orthocomplement, i.e. when that outcome can never be refuted.

Three graph kinds are provided: explicit finite graphs loaded from data, the
canonical graph of unit vectors of C^d (edges are normalized projections), and
the canonical graph of nonzero lattice elements (edges go below the Sasaki
projection of the source onto the label).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ProbeRequired, UnknownVertex, UnsupportedFilter, ValidationError
from .filters import SasakiFilter
from .oml import FiniteOml, boolean_lattice, mo_lattice
from .subspaces import HilbertLattice, Subspace, random_unit_vector

AXIOM_LETTERS = "abcdef"

AXIOM_DESCRIPTIONS = {
    "a": "every vertex verifies the top element",
    "b": "no vertex verifies the bottom element",
    "c": "every label other than top fails at some vertex",
    "d": "verification is monotone along the lattice order",
    "e": "jointly verified labels keep their Sasaki combination verified",
    "f": "a verified label survives a measurement step as its Sasaki update",
    "edge": "the outcome of every measurement step is verified afterwards",
}


class ExplicitGraph:
    """A finite labelled graph given by vertex names and edge triples.

    Whether the graph satisfies the measurement axioms is the checker's job;
    construction only requires that endpoints resolve and labels belong to
    the declared lattice.
    """

    kind = "explicit"

    def __init__(self, lattice, vertices, edges):
        self.lattice = lattice
        self.vertex_names = tuple(str(v) for v in vertices)
        if len(set(self.vertex_names)) != len(self.vertex_names):
            raise ValidationError("vertex names must be unique")
        self._order = {v: i for i, v in enumerate(self.vertex_names)}
        checked = []
        for a, label, b in edges:
            if a not in self._order:
                raise ValidationError(f"edge source {a!r} is not a vertex")
            if b not in self._order:
                raise ValidationError(f"edge target {b!r} is not a vertex")
            lattice.check_element(label)
            checked.append((a, label, b))
        self.edges = tuple(checked)
        self._out: dict[str, list] = {v: [] for v in self.vertex_names}
        for a, label, b in self.edges:
            self._out[a].append((label, b))

    def _require(self, a: str) -> str:
        if a not in self._order:
            raise UnknownVertex(f"vertex {a!r} is not in the graph")
        return a

    def out_edges(self, a: str):
        return tuple(self._out[self._require(a)])

    def verifies(self, a: str, p) -> bool:
        """True iff no outgoing edge of ``a`` is labelled with p's complement."""
        lat = self.lattice
        comp = lat.ortho(p)
        return not any(lat.eq(label, comp) for label, _ in self._out[self._require(a)])

    def successors(self, a: str, p):
        lat = self.lattice
        hits = [b for label, b in self._out[self._require(a)] if lat.eq(label, p)]
        return sorted(hits, key=self._order.__getitem__)

    def step(self, a: str, p):
        """Deterministic single successor: lowest vertex id among matches."""
        hits = self.successors(a, p)
        return hits[0] if hits else None

    def describe_vertex(self, a) -> str:
        return str(a)


class HilbertGraph:
    """Canonical model on unit vectors: a step projects and renormalizes."""

    kind = "hilbert"

    def __init__(self, lattice: HilbertLattice):
        self.lattice = lattice

    def check_vertex(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=np.complex128).reshape(-1)
        if phi.shape[0] != self.lattice.dim:
            raise UnknownVertex(f"vertex must be a vector of length {self.lattice.dim}")
        if abs(np.linalg.norm(phi) - 1.0) > 1e-8:
            raise UnknownVertex("vertex must be a unit vector")
        return phi

    def verifies(self, phi, p) -> bool:
        """True iff the vector lies inside the label's subspace."""
        phi = self.check_vertex(phi)
        self.lattice.check_element(p)
        return float(np.linalg.norm(phi - p.projector() @ phi)) < self.lattice.tol.eq

    def step(self, phi, p):
        phi = self.check_vertex(phi)
        self.lattice.check_element(p)
        image = p.projector() @ phi
        norm = float(np.linalg.norm(image))
        if norm <= max(self.lattice.tol.rank, 1e-12):
            return None
        return image / norm

    def describe_vertex(self, phi) -> str:
        return "vector " + np.array2string(np.asarray(phi), precision=3, suppress_small=True)


class LatticeGraph:
    """Canonical model on nonzero lattice elements; works over either kind."""

    kind = "lattice"

    def __init__(self, lattice):
        self.lattice = lattice

    def check_vertex(self, a):
        self.lattice.check_element(a)
        if self.lattice.is_bottom(a):
            raise UnknownVertex("the zero element is not a vertex")
        return a

    def verifies(self, a, p) -> bool:
        """True iff the vertex lies below the label."""
        return self.lattice.leq(self.check_vertex(a), p)

    def step(self, a, p):
        target = self.lattice.sasaki(self.check_vertex(a), p)
        return None if self.lattice.is_bottom(target) else target

    def describe_vertex(self, a) -> str:
        return self.lattice.describe(a)


def explicit_lattice_graph(lattice: FiniteOml) -> ExplicitGraph:
    """Materialize the canonical lattice-element model of a finite lattice as
    an explicit graph: every edge (a, p, b) with b below the projection of a
    onto p.  Vertex names are the element names."""
    vertices = [e.name for e in lattice.elements if not lattice.is_bottom(e)]
    edges = []
    for a in lattice.elements:
        if lattice.is_bottom(a):
            continue
        for p in lattice.elements:
            target = lattice.sasaki(a, p)
            for b in lattice.elements:
                if not lattice.is_bottom(b) and lattice.leq(b, target):
                    edges.append((a.name, p, b.name))
    return ExplicitGraph(lattice, vertices, edges)


# -- axiom checking -------------------------------------------------------------


@dataclass(frozen=True)
class AxiomCheck:
    axiom: str
    description: str
    passed: bool
    counterexample: str | None
    instances: int

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "description": self.description,
            "passed": self.passed,
            "counterexample": self.counterexample,
            "instances": self.instances,
        }


@dataclass(frozen=True)
class AxiomReport:
    mode: str  # "exhaustive" or "probe"
    checks: tuple[AxiomCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_axioms(self) -> tuple[str, ...]:
        return tuple(c.axiom for c in self.checks if not c.passed)

    def check(self, axiom: str) -> AxiomCheck:
        for c in self.checks:
            if c.axiom == axiom:
                return c
        raise KeyError(axiom)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def _sample_vertices(graph, labels, seed: int, count: int):
    """Vertex sample for implicit graphs: targeted vertices derived from the
    probe labels (so the conditional axioms are exercised, not vacuous), then
    seeded random fill."""
    lat = graph.lattice
    picked = []
    if graph.kind == "hilbert":
        for _, p in labels:
            if p.dim > 0 and len(picked) < count // 2:
                picked.append(p.basis[:, 0])
        for (_, p), (_, q) in combinations(labels[:6], 2):
            m = lat.meet(p, q)
            if m.dim > 0 and len(picked) < count:
                picked.append(m.basis[:, 0])
        i = 0
        while len(picked) < count:
            picked.append(random_unit_vector(lat.dim, seed * 100003 + i))
            i += 1
    else:
        for _, p in labels:
            if not lat.is_bottom(p) and len(picked) < count // 2:
                picked.append(p)
        for (_, p), (_, q) in combinations(labels[:6], 2):
            m = lat.meet(p, q)
            if not lat.is_bottom(m) and len(picked) < count:
                picked.append(m)
        if isinstance(lat, HilbertLattice):
            i = 0
            while len(picked) < count:
                rank = 1 + (i % (lat.dim - 1)) if lat.dim > 1 else 1
                picked.append(lat.random(rank, seed * 100003 + i))
                i += 1
        else:
            picked.extend(e for e in lat.elements if not lat.is_bottom(e))
    return picked[:count]


def check_axioms(graph, probe=None, seed: int = 0, sample_vertices: int = 64,
                 enrich_pairs: int = 8) -> AxiomReport:
    """Check the six measurement axioms plus the step-outcome property.

    Over a finite label lattice the check is exhaustive and complete.  Over a
    subspace lattice a finite ``probe`` of labels is required and the check is
    a necessary condition: quantifiers over labels run over the probe (the
    order axiom also over meets and joins of the first few probe labels) and,
    for implicit graphs, vertices are a seeded sample enriched with vertices
    built from the probe.  Counterexamples name the vertex, labels and edge.
    """
    lat = graph.lattice
    finite = lat.is_finite

    if finite:
        labels = [(e.name, e) for e in lat.elements]
        mode = "exhaustive"
    else:
        if probe is None:
            raise ProbeRequired("an infinite label lattice needs a finite probe set")
        labels = []
        for i, p in enumerate(probe):
            lat.check_element(p)
            labels.append((f"probe[{i}]", p))
        if not labels:
            raise ProbeRequired("the probe set is empty")
        mode = "probe"

    if graph.kind == "explicit":
        vertices = list(graph.vertex_names)
    elif finite:
        vertices = [e for e in lat.elements if not lat.is_bottom(e)]
    else:
        vertices = _sample_vertices(graph, labels, seed, sample_vertices)

    vdesc = graph.describe_vertex

    # verification matrix over the declared labels
    ver = [[graph.verifies(s, p) for _, p in labels] for s in vertices]
    sasaki_cache: dict[tuple[int, int], object] = {}

    def sas(i: int, j: int):
        if (i, j) not in sasaki_cache:
            sasaki_cache[(i, j)] = lat.sasaki(labels[i][1], labels[j][1])
        return sasaki_cache[(i, j)]

    checks = []

    # (a) top is always verified
    bad = None
    for si, s in enumerate(vertices):
        if not graph.verifies(s, lat.top):
            bad = f"vertex {vdesc(s)} does not verify the top element"
            break
    checks.append(AxiomCheck("a", AXIOM_DESCRIPTIONS["a"], bad is None, bad, len(vertices)))

    # (b) bottom is never verified
    bad = None
    for s in vertices:
        if graph.verifies(s, lat.bottom):
            bad = f"vertex {vdesc(s)} verifies the bottom element"
            break
    checks.append(AxiomCheck("b", AXIOM_DESCRIPTIONS["b"], bad is None, bad, len(vertices)))

    # (c) every non-top label fails somewhere
    bad = None
    tested = 0
    for li, (ldesc, p) in enumerate(labels):
        if lat.is_top(p):
            continue
        tested += 1
        if any(not ver[si][li] for si in range(len(vertices))):
            continue
        if graph.kind != "explicit":
            # targeted falsifier: a vertex inside the label's complement
            comp = lat.ortho(p)
            if graph.kind == "hilbert":
                if comp.dim > 0 and not graph.verifies(comp.basis[:, 0], p):
                    continue
            elif not lat.is_bottom(comp) and not graph.verifies(comp, p):
                continue
        bad = f"label {ldesc} is verified by every vertex"
        break
    checks.append(AxiomCheck("c", AXIOM_DESCRIPTIONS["c"], bad is None, bad, tested))

    # (d) monotone along the order
    pairs = []
    if finite:
        for i, (_, p) in enumerate(labels):
            for j, (_, q) in enumerate(labels):
                if i != j and lat.leq(p, q):
                    pairs.append((labels[i], labels[j]))
    else:
        for (di, p), (dj, q) in combinations(labels, 2):
            if lat.leq(p, q):
                pairs.append(((di, p), (dj, q)))
            elif lat.leq(q, p):
                pairs.append(((dj, q), (di, p)))
        for (di, p), (dj, q) in combinations(labels[:enrich_pairs], 2):
            m = lat.meet(p, q)
            pairs.append(((f"meet({di},{dj})", m), (di, p)))
            j = lat.join(p, q)
            pairs.append(((di, p), (f"join({di},{dj})", j)))
    bad = None
    count = 0
    for (pd, p), (qd, q) in pairs:
        for s in vertices:
            count += 1
            if graph.verifies(s, p) and not graph.verifies(s, q):
                bad = (f"vertex {vdesc(s)} verifies {pd} but not {qd} although "
                       f"{pd} lies below {qd}")
                break
        if bad:
            break
    checks.append(AxiomCheck("d", AXIOM_DESCRIPTIONS["d"], bad is None, bad, count))

    # (e) closure of joint verification under the Sasaki combination
    bad = None
    count = 0
    for si, s in enumerate(vertices):
        held = [i for i in range(len(labels)) if ver[si][i]]
        for i in held:
            for j in held:
                count += 1
                if not graph.verifies(s, sas(i, j)):
                    bad = (f"vertex {vdesc(s)} verifies {labels[i][0]} and "
                           f"{labels[j][0]} but not their Sasaki combination")
                    break
            if bad:
                break
        if bad:
            break
    checks.append(AxiomCheck("e", AXIOM_DESCRIPTIONS["e"], bad is None, bad, count))

    # edge instances: actual edges for explicit graphs, canonical steps otherwise;
    # each instance carries the source's sample index and the label's index when known
    label_index = {p: i for i, (_, p) in enumerate(labels)}

    def edge_instances():
        if graph.kind == "explicit":
            vidx = {v: i for i, v in enumerate(vertices)}
            for a, label, b in graph.edges:
                yield vidx[a], (lat.describe(label), label, label_index.get(label)), b
        elif graph.kind == "lattice" and finite:
            for si, a in enumerate(vertices):
                for li, (ldesc, p) in enumerate(labels):
                    target = lat.sasaki(a, p)
                    for b in vertices:
                        if lat.leq(b, target):
                            yield si, (ldesc, p, li), b
        else:
            for si, a in enumerate(vertices):
                for li, (ldesc, p) in enumerate(labels):
                    b = graph.step(a, p)
                    if b is not None:
                        yield si, (ldesc, p, li), b

    edges = list(edge_instances())
    held = [[i for i in range(len(labels)) if ver[si][i]] for si in range(len(vertices))]

    # (f) verified labels survive a step as their Sasaki update
    bad = None
    count = 0
    for si, (qd, q, qi), b in edges:
        for i in held[si]:
            count += 1
            update = sas(i, qi) if qi is not None else lat.sasaki(labels[i][1], q)
            if not graph.verifies(b, update):
                bad = (f"edge ({vdesc(vertices[si])}, {qd}, {vdesc(b)}): source verifies "
                       f"{labels[i][0]} but target does not verify its Sasaki update")
                break
        if bad:
            break
    checks.append(AxiomCheck("f", AXIOM_DESCRIPTIONS["f"], bad is None, bad, count))

    # derived: the outcome of a step is verified at the target
    bad = None
    for si, (qd, q, _), b in edges:
        if not graph.verifies(b, q):
            bad = (f"edge ({vdesc(vertices[si])}, {qd}, {vdesc(b)}): "
                   f"target does not verify the outcome")
            break
    checks.append(AxiomCheck("edge", AXIOM_DESCRIPTIONS["edge"], bad is None, bad, len(edges)))

    return AxiomReport(mode, tuple(checks))


# -- brackets ---------------------------------------------------------------------


@dataclass(frozen=True)
class BracketMin:
    """Minimum of the set of labels a vertex verifies, with a flag telling
    whether that set is exactly the minimum's up-set."""

    element: object
    principal: bool


def bracket_min(graph, a) -> BracketMin:
    """The least verified label of a vertex.

    Canonical models are principal by construction: the vector's ray for the
    unit-vector model, the vertex itself for the lattice-element model.  For
    explicit graphs over a finite lattice the verified set is scanned and its
    meet returned; the flag reports whether the scan is exactly an up-set
    (over arbitrary finite lattices it may legitimately not be).
    """
    if graph.kind == "hilbert":
        phi = graph.check_vertex(a)
        return BracketMin(Subspace(phi.reshape(-1, 1), graph.lattice.tol), True)
    if graph.kind == "lattice":
        return BracketMin(graph.check_vertex(a), True)
    lat = graph.lattice
    if not lat.is_finite:
        raise UnsupportedFilter(
            "bracket scan needs a finite label lattice or a canonical model"
        )
    graph._require(a)
    verified = [p for p in lat.elements if graph.verifies(a, p)]
    if not verified:
        return BracketMin(lat.top, False)
    minimum = verified[0]
    for p in verified[1:]:
        minimum = lat.meet(minimum, p)
    principal = all(lat.leq(minimum, p) == (p in verified) for p in lat.elements)
    return BracketMin(minimum, principal)


def bracket_filter(graph, a) -> SasakiFilter:
    """The verified-label set of a vertex, packaged as a Sasaki filter."""
    result = bracket_min(graph, a)
    if result.principal:
        return SasakiFilter.principal(graph.lattice, result.element)
    lat = graph.lattice
    verified = tuple(p for p in lat.elements if graph.verifies(a, p))
    return SasakiFilter.generated(lat, verified)


def atom_count(graph, a) -> int:
    """Number of atoms among the labels the vertex verifies."""
    return len(bracket_filter(graph, a).atoms())


# -- mutation fixtures --------------------------------------------------------------

#: Axioms expected to fail for each mutant.  Breaking the order axiom alone is
#: impossible: a vertex that verifies p but not q >= p must carry an edge
#: labelled with q's complement, and the Sasaki update of p along that edge is
#: the bottom element, so axiom (f) or (b) must break alongside (d).  The (d)
#: mutant here is the minimal one, breaking exactly {d, f}.
MUTANT_FAILURES = {
    "a": frozenset("a"),
    "b": frozenset("b"),
    "c": frozenset("c"),
    "d": frozenset("df"),
    "e": frozenset("e"),
    "f": frozenset("f"),
}


def mutant_graph(axiom: str) -> ExplicitGraph:
    """An explicit graph engineered to violate the given axiom.

    Every mutant except "d" fails exactly its target among the six axioms
    (see :data:`MUTANT_FAILURES`); the "a" mutant additionally fails the
    derived step-outcome property, which no graph with a bottom-labelled
    edge can satisfy.
    """
    if axiom not in MUTANT_FAILURES:
        raise ValueError(f"axiom must be one of {sorted(MUTANT_FAILURES)}, got {axiom!r}")

    if axiom == "a":
        lat = mo_lattice(2)
        base = explicit_lattice_graph(lat)
        edges = list(base.edges) + [("1", lat.bottom, "1")]
        return ExplicitGraph(lat, base.vertex_names, edges)

    if axiom == "b":
        lat = mo_lattice(2)
        base = explicit_lattice_graph(lat)
        return ExplicitGraph(lat, list(base.vertex_names) + ["limbo"], base.edges)

    if axiom == "c":
        lat = mo_lattice(2)
        top, a, b, bp = (lat.element(n) for n in ("1", "a", "b", "b'"))
        edges = [
            ("v", top, "v"), ("v", a, "v"), ("v", b, "t"), ("v", bp, "w"),
            ("t", top, "t"), ("t", a, "v"), ("t", b, "t"),
            ("w", top, "w"), ("w", a, "v"), ("w", bp, "w"),
        ]
        return ExplicitGraph(lat, ["v", "t", "w"], edges)

    if axiom == "d":
        lat = boolean_lattice(3)
        base = explicit_lattice_graph(lat)
        top, a, ab, ac, c = (lat.element(n) for n in ("abc", "a", "ab", "ac", "c"))
        extra = [("s", top, "a"), ("s", ac, "a"), ("s", ab, "a"),
                 ("s", a, "a"), ("s", c, "c")]
        return ExplicitGraph(lat, list(base.vertex_names) + ["s"],
                             list(base.edges) + extra)

    if axiom == "e":
        lat = mo_lattice(2)
        base = explicit_lattice_graph(lat)
        top, b, bp = (lat.element(n) for n in ("1", "b", "b'"))
        extra = [("s", top, "s"), ("s", b, "b"), ("s", bp, "b'")]
        return ExplicitGraph(lat, list(base.vertex_names) + ["s"],
                             list(base.edges) + extra)

    # axiom == "f"
    lat = mo_lattice(2)
    base = explicit_lattice_graph(lat)
    top, a, b, bp = (lat.element(n) for n in ("1", "a", "b", "b'"))
    extra = [("s", top, "b"), ("s", a, "a"), ("s", b, "b"), ("s", bp, "b'")]
    return ExplicitGraph(lat, list(base.vertex_names) + ["s"],
                         list(base.edges) + extra)
