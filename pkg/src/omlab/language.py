"""Deciders for whether a sequence of outcomes is possible, and their harness.

Three independent routes answer the same question for a word of labels:

* fold the Sasaki projection over the word, starting from the whole space,
  and accept iff the residual is nonzero (left-associated by construction:
  the projection is not associative, and this reading is the one realized by
  stepping through the lattice-element model from the top vertex);
* multiply the label projectors in order and accept iff the product is
  nonzero;
* build an explicit path through a canonical model and accept iff one exists.

Over a subspace lattice of dimension at least 3 all routes provably agree;
the harness samples words and reports any disagreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .errors import DimMismatch
from .models import HilbertGraph, LatticeGraph
from .oml import FiniteOml
from .subspaces import DEFAULT_TOL, HilbertLattice, RANK_FLOOR, Subspace, Tolerances


@dataclass(frozen=True)
class Word:
    """A finite sequence of labels from one lattice (possibly empty)."""

    lattice: FiniteOml | HilbertLattice
    labels: tuple

    def __post_init__(self):
        for p in self.labels:
            self.lattice.check_element(p)

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class FoldVerdict:
    accepted: bool
    residual: object  # the final fold value; the word is possible iff nonzero


def decide_sasaki(lattice, labels) -> FoldVerdict:
    """Left-associated Sasaki fold from the whole space; accept iff nonzero.

    The residual equals the least element of the final vertex reachable in
    the lattice-element model when starting from the top.
    """
    m = lattice.top
    for p in labels:
        lattice.check_element(p)
        m = lattice.sasaki(m, p)
        if lattice.is_bottom(m):
            break  # absorbing: no extension can recover
    return FoldVerdict(not lattice.is_bottom(m), m)


@dataclass(frozen=True)
class ProductVerdict:
    accepted: bool
    norm: float  # largest singular value of the projector product


def decide_projector(labels, tol: Tolerances = DEFAULT_TOL) -> ProductVerdict:
    """Multiply the label projectors in word order; accept iff the product
    operator is nonzero (largest singular value above the rank threshold)."""
    labels = list(labels)
    if not labels:
        return ProductVerdict(True, 1.0)
    d = labels[0].ambient_dim
    m = np.eye(d, dtype=np.complex128)
    for p in labels:
        if not isinstance(p, Subspace) or p.ambient_dim != d:
            raise DimMismatch("projector decider needs subspace labels of one ambient space")
        m = p.projector() @ m
    norm = float(np.linalg.norm(m, 2))
    return ProductVerdict(norm > max(tol.rank, RANK_FLOOR), norm)


@dataclass(frozen=True)
class PathWitness:
    """A path through a model, one vertex more than there are labels."""

    vertices: tuple
    labels: tuple

    def __len__(self) -> int:
        return len(self.labels)


def verify_path(graph, witness: PathWitness, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Re-check every step of a path against the graph's edge relation."""
    if len(witness.vertices) != len(witness.labels) + 1:
        return False
    for k, p in enumerate(witness.labels):
        a, b = witness.vertices[k], witness.vertices[k + 1]
        if isinstance(graph, HilbertGraph):
            image = p.projector() @ graph.check_vertex(a)
            norm = float(np.linalg.norm(image))
            if norm <= max(tol.rank, RANK_FLOOR):
                return False
            if float(np.linalg.norm(image / norm - graph.check_vertex(b))) > 1e3 * tol.eq:
                return False
        elif isinstance(graph, LatticeGraph):
            lat = graph.lattice
            if lat.is_bottom(b) or not lat.leq(b, lat.sasaki(a, p)):
                return False
        else:
            if b not in graph.successors(a, p):
                return False
    return True


def decide_simulation(graph, labels, start=None) -> PathWitness | None:
    """Walk a canonical model along the word; the path is verified before
    being returned, and ``None`` means the word labels no path.

    For the unit-vector model the start vector defaults to the top right
    singular vector of the projector product, which maximizes the norm
    surviving the walk and so keeps a possible word clear of the rank
    threshold; a zero product short-circuits to ``None``.  For the
    lattice-element model the walk starts from the top, which dominates
    every other start.
    """
    labels = list(labels)
    if isinstance(graph, HilbertGraph):
        lat = graph.lattice
        if start is None:
            if labels:
                m = np.eye(lat.dim, dtype=np.complex128)
                for p in labels:
                    m = p.projector() @ m
                if float(np.linalg.norm(m, 2)) <= max(lat.tol.rank, RANK_FLOOR):
                    return None
                _, _, vh = np.linalg.svd(m)
                start = vh[0].conj()
            else:
                start = np.eye(lat.dim, dtype=np.complex128)[:, 0]
        path = [graph.check_vertex(start)]
        for p in labels:
            nxt = graph.step(path[-1], p)
            if nxt is None:
                return None
            path.append(nxt)
        witness = PathWitness(tuple(path), tuple(labels))
        return witness if verify_path(graph, witness, lat.tol) else None

    if isinstance(graph, LatticeGraph):
        lat = graph.lattice
        path = [lat.top if start is None else graph.check_vertex(start)]
        for p in labels:
            nxt = graph.step(path[-1], p)
            if nxt is None:
                return None
            path.append(nxt)
        witness = PathWitness(tuple(path), tuple(labels))
        return witness if verify_path(graph, witness) else None

    raise ValueError("simulation runs on the canonical models only")


@dataclass(frozen=True)
class EquivalenceReport:
    """Per-word verdicts of all applicable deciders, plus any disagreements."""

    deciders: tuple[str, ...]
    total_words: int
    evaluated: int
    exhaustive: bool
    disagreements: list[dict] = field(default_factory=list)
    outside_stated_scope: bool = False  # subspace alphabets of dimension < 3

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_dict(self) -> dict:
        return {
            "deciders": list(self.deciders),
            "total_words": self.total_words,
            "evaluated": self.evaluated,
            "exhaustive": self.exhaustive,
            "disagreements": self.disagreements,
            "outside_stated_scope": self.outside_stated_scope,
        }


def word_verdicts(lattice, labels) -> dict[str, bool]:
    """Run every decider applicable to the lattice kind on one word."""
    verdicts = {"sasaki_fold": decide_sasaki(lattice, labels).accepted}
    if lattice.is_finite:
        graph = LatticeGraph(lattice)
        verdicts["lattice_path"] = decide_simulation(graph, labels) is not None
    else:
        verdicts["projector_product"] = decide_projector(labels, lattice.tol).accepted
        verdicts["hilbert_path"] = decide_simulation(HilbertGraph(lattice), labels) is not None
        verdicts["lattice_path"] = decide_simulation(LatticeGraph(lattice), labels) is not None
    return verdicts


def equivalence_harness(alphabet, max_len: int = 5, seed: int = 0,
                        samples: int = 500, lattice=None) -> EquivalenceReport:
    """Check that all deciders agree on words over the given alphabet.

    Words up to ``max_len`` are enumerated when there are at most ``samples``
    of them, otherwise ``samples`` words are drawn with a seeded generator.
    Over finite lattices only the fold and the lattice-path deciders apply,
    so the harness degrades to a two-way check there.
    """
    alphabet = list(alphabet)
    if not alphabet:
        raise ValueError("alphabet must be nonempty")
    if lattice is None:
        first = alphabet[0]
        if isinstance(first, Subspace):
            lattice = HilbertLattice(first.ambient_dim)
        else:
            lattice = first.lattice
    for p in alphabet:
        lattice.check_element(p)

    k = len(alphabet)
    total = sum(k**n for n in range(max_len + 1))
    words: list[tuple[int, ...]] = []
    if total <= samples:
        for n in range(max_len + 1):
            words.extend(iter_product(range(k), repeat=n))
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            n = int(rng.integers(1, max_len + 1))
            words.append(tuple(int(i) for i in rng.integers(0, k, size=n)))
        exhaustive = False

    names = None
    disagreements = []
    for idxs in words:
        verdicts = word_verdicts(lattice, [alphabet[i] for i in idxs])
        if names is None:
            names = tuple(verdicts)
        if len(set(verdicts.values())) > 1:
            disagreements.append({"word": list(idxs), "verdicts": verdicts})

    scope_warning = (not lattice.is_finite) and lattice.dim < 3
    return EquivalenceReport(names or (), total, len(words), exhaustive,
                             disagreements, scope_warning)
