"""Finite orthomodular lattices backed by explicit order tables.

A :class:`FiniteOml` stores the order relation as a boolean matrix and the
orthocomplement as an index permutation; meet and join tables are derived
from the order once at construction and cached.  Everything is immutable
after construction and all operations are pure, so concurrent reads are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MixedLattice, ValidationError


@dataclass(frozen=True)
class LatticeElement:
    """Handle to one element of a :class:`FiniteOml`.

    Identity is positional: two handles are equal iff they point at the same
    index of the same lattice instance.  Using a handle with a different
    lattice raises :class:`MixedLattice`.
    """

    lattice: "FiniteOml"
    index: int

    @property
    def name(self) -> str:
        return self.lattice.names[self.index]

    def __repr__(self) -> str:
        return f"<{self.name}>"


@dataclass
class ValidationReport:
    """Result of a structural validation; an empty issue list means valid."""

    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, message: str) -> None:
        self.issues.append(message)

    def raise_if_failed(self, context: str) -> None:
        if self.issues:
            head = "; ".join(self.issues[:4])
            more = f" (+{len(self.issues) - 4} more)" if len(self.issues) > 4 else ""
            raise ValidationError(f"{context}: {head}{more}")


class FiniteOml:
    """A finite bounded lattice with orthocomplement, given by order tables.

    The constructor accepts any well-formed tables; whether the structure is
    actually an orthomodular lattice is the job of :func:`validate_oml`, so
    that defective structures (used as negative fixtures) can still be built
    and inspected.
    """

    is_finite = True

    def __init__(self, names, leq, ortho):
        names = tuple(str(n) for n in names)
        n = len(names)
        if n == 0:
            raise ValidationError("a lattice needs at least one element")
        if len(set(names)) != n:
            raise ValidationError("element names must be unique")
        leq = np.array(leq, dtype=bool)
        if leq.shape != (n, n):
            raise ValidationError(f"leq table must be {n}x{n}, got {leq.shape}")
        ortho = tuple(int(i) for i in ortho)
        if len(ortho) != n or any(i < 0 or i >= n for i in ortho):
            raise ValidationError("ortho map must be a permutation of element indices")

        self.names = names
        self._leq = leq
        self._leq.setflags(write=False)
        self._ortho = ortho
        self._index = {name: i for i, name in enumerate(names)}
        self._bottom_i = self._unique_extremum(rows=True)
        self._top_i = self._unique_extremum(rows=False)
        self._meet_t, self._join_t, self._table_defects = self._derive_tables()

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_relations(cls, names, leq_pairs, ortho_map) -> "FiniteOml":
        """Build from a name-based pair list; the order is closed reflexively
        and transitively, so only a covering set of pairs is required."""
        names = tuple(str(n) for n in names)
        index = {name: i for i, name in enumerate(names)}
        n = len(names)
        leq = np.eye(n, dtype=bool)
        for a, b in leq_pairs:
            if a not in index or b not in index:
                raise ValidationError(f"leq pair ({a!r}, {b!r}) names unknown elements")
            leq[index[a], index[b]] = True
        # Warshall transitive closure
        for k in range(n):
            leq |= np.outer(leq[:, k], leq[k, :])
        ortho = [0] * n
        for a, b in ortho_map.items():
            if a not in index or b not in index:
                raise ValidationError(f"ortho entry ({a!r}: {b!r}) names unknown elements")
            ortho[index[a]] = index[b]
        return cls(names, leq, ortho)

    def _unique_extremum(self, rows: bool) -> int | None:
        axis = 1 if rows else 0
        hits = np.flatnonzero(self._leq.all(axis=axis))
        return int(hits[0]) if hits.size == 1 else None

    def _derive_tables(self):
        n = len(self.names)
        leq = self._leq
        meet_t = np.zeros((n, n), dtype=int)
        join_t = np.zeros((n, n), dtype=int)
        defects: list[str] = []
        for i in range(n):
            for j in range(n):
                meet_t[i, j], ok = self._bound(leq, i, j, lower=True)
                if not ok:
                    defects.append(f"no unique meet for ({self.names[i]}, {self.names[j]})")
                join_t[i, j], ok = self._bound(leq, i, j, lower=False)
                if not ok:
                    defects.append(f"no unique join for ({self.names[i]}, {self.names[j]})")
        meet_t.setflags(write=False)
        join_t.setflags(write=False)
        return meet_t, join_t, defects

    @staticmethod
    def _bound(leq, i, j, lower: bool):
        """Greatest lower / least upper bound of (i, j); falls back to an
        arbitrary maximal/minimal bound (flagged) when none is unique."""
        if lower:
            cands = np.flatnonzero(leq[:, i] & leq[:, j])
        else:
            cands = np.flatnonzero(leq[i, :] & leq[j, :])
        if cands.size == 0:
            return 0, False
        for k in cands:
            if lower and leq[cands, k].all():
                return int(k), True
            if not lower and leq[k, cands].all():
                return int(k), True
        # no maximum among the bounds: pick a maximal (resp. minimal) one
        for k in cands:
            others = cands[cands != k]
            if lower and not leq[k, others].any():
                return int(k), False
            if not lower and not leq[others, k].any():
                return int(k), False
        return int(cands[0]), False

    # -- element access -------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def elements(self) -> tuple[LatticeElement, ...]:
        return tuple(LatticeElement(self, i) for i in range(len(self.names)))

    def element(self, name: str) -> LatticeElement:
        if name not in self._index:
            raise ValidationError(f"no element named {name!r} in this lattice")
        return LatticeElement(self, self._index[name])

    @property
    def bottom(self) -> LatticeElement:
        if self._bottom_i is None:
            raise ValidationError("lattice has no unique least element")
        return LatticeElement(self, self._bottom_i)

    @property
    def top(self) -> LatticeElement:
        if self._top_i is None:
            raise ValidationError("lattice has no unique greatest element")
        return LatticeElement(self, self._top_i)

    def check_element(self, p: LatticeElement) -> int:
        if not isinstance(p, LatticeElement) or p.lattice is not self:
            raise MixedLattice(f"{p!r} does not belong to this lattice")
        return p.index

    # -- operations ------------------------------------------------------------

    def leq(self, p: LatticeElement, q: LatticeElement) -> bool:
        return bool(self._leq[self.check_element(p), self.check_element(q)])

    def eq(self, p: LatticeElement, q: LatticeElement) -> bool:
        return self.check_element(p) == self.check_element(q)

    def meet(self, p: LatticeElement, q: LatticeElement) -> LatticeElement:
        return LatticeElement(self, int(self._meet_t[self.check_element(p), self.check_element(q)]))

    def join(self, p: LatticeElement, q: LatticeElement) -> LatticeElement:
        return LatticeElement(self, int(self._join_t[self.check_element(p), self.check_element(q)]))

    def ortho(self, p: LatticeElement) -> LatticeElement:
        return LatticeElement(self, self._ortho[self.check_element(p)])

    def sasaki(self, p: LatticeElement, q: LatticeElement) -> LatticeElement:
        """Sasaki projection of ``p`` onto ``q``: the meet of ``q`` with the
        join of ``p`` and the orthocomplement of ``q``.  Always below ``q``."""
        return self.meet(q, self.join(p, self.ortho(q)))

    def compatible(self, p: LatticeElement, q: LatticeElement) -> bool:
        """True iff ``p`` splits along ``q``: p = (p meet q) join (p meet q-ortho)."""
        split = self.join(self.meet(p, q), self.meet(p, self.ortho(q)))
        return self.eq(p, split)

    def is_bottom(self, p: LatticeElement) -> bool:
        return self.check_element(p) == self._bottom_i

    def is_top(self, p: LatticeElement) -> bool:
        return self.check_element(p) == self._top_i

    def atoms(self) -> tuple[LatticeElement, ...]:
        """Minimal nonzero elements."""
        bot = self._bottom_i
        out = []
        for i in range(len(self.names)):
            if i == bot:
                continue
            below = np.flatnonzero(self._leq[:, i])
            if all(k == i or k == bot for k in below):
                out.append(LatticeElement(self, i))
        return tuple(out)

    def describe(self, p: LatticeElement) -> str:
        return self.names[self.check_element(p)]

    def __repr__(self) -> str:
        return f"FiniteOml({len(self.names)} elements)"


def validate_oml(lattice: FiniteOml) -> ValidationReport:
    """Check every law a finite orthomodular lattice must satisfy.

    The report lists each violated instance: order axioms, existence of the
    bounds, well-defined meets/joins, orthocomplement laws (involution, order
    reversal, complementation, De Morgan) and the orthomodular law itself.
    """
    report = ValidationReport()
    leq = lattice._leq
    names = lattice.names
    n = len(names)

    for i in range(n):
        if not leq[i, i]:
            report.add(f"order not reflexive at {names[i]}")
    for i in range(n):
        for j in range(n):
            if i != j and leq[i, j] and leq[j, i]:
                report.add(f"order not antisymmetric on ({names[i]}, {names[j]})")
    reach = leq.astype(int) @ leq.astype(int) > 0
    for i, j in zip(*np.nonzero(reach & ~leq)):
        report.add(f"order not transitive: {names[i]} reaches {names[j]} indirectly only")

    if lattice._bottom_i is None:
        report.add("no unique least element")
    if lattice._top_i is None:
        report.add("no unique greatest element")
    if (
        lattice._bottom_i is not None
        and lattice._top_i is not None
        and lattice._bottom_i == lattice._top_i
    ):
        report.add("least and greatest elements coincide")

    for defect in lattice._table_defects:
        report.add(defect)

    o = lattice._ortho
    for i in range(n):
        if o[o[i]] != i:
            report.add(f"orthocomplement not involutive at {names[i]}")
    for i in range(n):
        for j in range(n):
            if leq[i, j] != leq[o[j], o[i]]:
                report.add(
                    f"orthocomplement not order-reversing on ({names[i]}, {names[j]})"
                )

    if not report.ok:
        return report  # bound-dependent laws are meaningless on a broken order

    meet_t, join_t = lattice._meet_t, lattice._join_t
    bot, top = lattice._bottom_i, lattice._top_i
    for i in range(n):
        if meet_t[i, o[i]] != bot:
            report.add(f"{names[i]} meet its orthocomplement is not the least element")
        if join_t[i, o[i]] != top:
            report.add(f"{names[i]} join its orthocomplement is not the greatest element")
    for i in range(n):
        for j in range(n):
            if o[meet_t[i, j]] != join_t[o[i], o[j]]:
                report.add(f"De Morgan fails on ({names[i]}, {names[j]})")
    for i in range(n):
        for j in range(n):
            if leq[i, j] and join_t[i, meet_t[j, o[i]]] != j:
                report.add(
                    f"orthomodular law fails: {names[i]} <= {names[j]} but "
                    f"{names[j]} != {names[i]} join ({names[j]} meet {names[o[i]]})"
                )
    return report


# -- built-in fixtures ---------------------------------------------------------

_ATOM_LETTERS = "abcdefgh"


def boolean_lattice(num_atoms: int) -> FiniteOml:
    """Boolean lattice of all subsets of ``num_atoms`` generators (2^k elements)."""
    if not 1 <= num_atoms <= len(_ATOM_LETTERS):
        raise ValidationError(f"num_atoms must be in 1..{len(_ATOM_LETTERS)}")
    masks = range(2**num_atoms)
    full = 2**num_atoms - 1

    def name(mask: int) -> str:
        if mask == 0:
            return "0"
        return "".join(_ATOM_LETTERS[i] for i in range(num_atoms) if mask & (1 << i))

    names = [name(m) for m in masks]
    leq = [[(i | j) == j for j in masks] for i in masks]
    ortho = [m ^ full for m in masks]
    return FiniteOml(names, leq, ortho)


def mo_lattice(num_pairs: int) -> FiniteOml:
    """The modular ortholattice MO_k: bounds plus 2k pairwise incomparable atoms."""
    if not 1 <= num_pairs <= len(_ATOM_LETTERS):
        raise ValidationError(f"num_pairs must be in 1..{len(_ATOM_LETTERS)}")
    names = ["0"]
    for i in range(num_pairs):
        names += [_ATOM_LETTERS[i], _ATOM_LETTERS[i] + "'"]
    names.append("1")
    n = len(names)
    leq = np.eye(n, dtype=bool)
    leq[0, :] = True
    leq[:, n - 1] = True
    ortho = list(range(n))
    ortho[0], ortho[n - 1] = n - 1, 0
    for i in range(num_pairs):
        a, ap = 1 + 2 * i, 2 + 2 * i
        ortho[a], ortho[ap] = ap, a
    return FiniteOml(names, leq, ortho)


def o6() -> FiniteOml:
    """The hexagon ortholattice: two chains 0 < a < b < 1 and 0 < b' < a' < 1.

    An ortholattice but not orthomodular; kept as the standard negative fixture.
    """
    names = ["0", "a", "b", "b'", "a'", "1"]
    pairs = [("0", x) for x in names] + [(x, "1") for x in names]
    pairs += [("a", "b"), ("b'", "a'")]
    ortho = {"0": "1", "1": "0", "a": "a'", "a'": "a", "b": "b'", "b'": "b"}
    return FiniteOml.from_relations(names, pairs, ortho)


BUILTIN_LATTICES = {
    "b2": lambda: boolean_lattice(1),
    "b4": lambda: boolean_lattice(2),
    "b8": lambda: boolean_lattice(3),
    "b16": lambda: boolean_lattice(4),
    "mo1": lambda: mo_lattice(1),
    "mo2": lambda: mo_lattice(2),
    "mo3": lambda: mo_lattice(3),
    "o6": o6,
}
