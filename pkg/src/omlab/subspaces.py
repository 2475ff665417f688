"""Numerical arithmetic on closed subspaces of a finite-dimensional complex space.

Subspaces are stored as orthonormal column bases; every statement about them
("equal", "below", "compatible") is exact in the mathematics and realized here
at explicit floating-point tolerances.  Equality and order are tested through
orthogonal projectors, never through bases, since bases are not unique.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import AmbiguousSpectrum, DimMismatch

RANK_FLOOR = 1e-12  # absolute floor under the relative rank threshold
MAX_AMBIENT = 64  # dense d x d matrices only; desk scale


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used by all subspace decisions.

    rank: relative singular-value cutoff for rank truncation
    orth: orthonormality residual allowed on stored bases
    eq:   projector Frobenius-distance bound for equality and order tests
    spec: eigenvalue classification band around {0, 1} for compatibility
    """

    rank: float = 1e-9
    orth: float = 1e-10
    eq: float = 1e-8
    spec: float = 1e-7

    def __post_init__(self):
        for name in ("rank", "orth", "eq", "spec"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"tolerance {name!r} must be strictly positive")
        if self.spec >= 0.5:
            raise ValueError("spec band must stay below 0.5")

    def updated(self, **overrides) -> "Tolerances":
        return replace(self, **overrides)


DEFAULT_TOL = Tolerances()


def orthonormal_columns(a: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis for the column span of ``a``, with rank truncation.

    Column-pivoted QR decides the rank (threshold ``tol.rank`` relative to the
    largest pivot, with absolute floor ``RANK_FLOOR``), followed by one
    re-orthogonalization pass so rank decisions stay stable when columns are
    nearly dependent.
    """
    a = np.asarray(a, dtype=np.complex128)
    d, k = a.shape
    if k == 0 or not np.any(np.abs(a) > RANK_FLOOR):
        return np.zeros((d, 0), dtype=np.complex128)
    q, r, _ = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diagonal(r))
    cut = max(tol.rank * float(diag[0]), RANK_FLOOR)
    rank = int(np.sum(diag > cut))
    if rank == 0:
        return np.zeros((d, 0), dtype=np.complex128)
    b, _ = np.linalg.qr(q[:, :rank])
    return b


class Subspace:
    """A closed subspace of C^d held as a d x r orthonormal column basis.

    r = 0 encodes the zero subspace, r = d the whole space.  Instances are
    immutable; the projector is computed once on first use and cached.
    """

    __slots__ = ("basis", "_proj")

    def __init__(self, basis, tol: Tolerances = DEFAULT_TOL):
        basis = np.array(basis, dtype=np.complex128)
        if basis.ndim != 2:
            raise ValueError("basis must be a 2-d array of column vectors")
        d, r = basis.shape
        if not 1 <= d <= MAX_AMBIENT:
            raise ValueError(f"ambient dimension must be in 1..{MAX_AMBIENT}, got {d}")
        if r > d:
            raise ValueError(f"rank {r} exceeds ambient dimension {d}")
        if r:
            gram = basis.conj().T @ basis
            if np.linalg.norm(gram - np.eye(r)) > tol.orth:
                raise ValueError("basis columns are not orthonormal within tolerance")
        basis.setflags(write=False)
        self.basis = basis
        self._proj = None

    @classmethod
    def from_vectors(cls, vectors, ambient: int | None = None,
                     tol: Tolerances = DEFAULT_TOL) -> "Subspace":
        """Span of the given row vectors; orthonormalizes and rank-truncates."""
        arr = np.asarray(list(vectors), dtype=np.complex128)
        if arr.size == 0:
            if ambient is None:
                raise ValueError("empty vector list needs an explicit ambient dimension")
            return cls.zero(ambient)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if ambient is not None and arr.shape[1] != ambient:
            raise ValueError(f"vectors have length {arr.shape[1]}, expected {ambient}")
        return cls(orthonormal_columns(arr.T, tol), tol)

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(np.zeros((ambient, 0), dtype=np.complex128))

    @classmethod
    def full(cls, ambient: int) -> "Subspace":
        return cls(np.eye(ambient, dtype=np.complex128))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """The orthogonal projector onto this subspace (cached, read-only)."""
        if self._proj is None:
            p = self.basis @ self.basis.conj().T
            p.setflags(write=False)
            self._proj = p
        return self._proj

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.ambient_dim}, dim={self.dim})"


def span(*vectors, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    return Subspace.from_vectors(vectors, tol=tol)


def _check_same_space(p: Subspace, q: Subspace) -> None:
    if p.ambient_dim != q.ambient_dim:
        raise DimMismatch(
            f"ambient dimensions differ: {p.ambient_dim} vs {q.ambient_dim}"
        )


def is_bottom(p: Subspace) -> bool:
    return p.dim == 0


def is_top(p: Subspace) -> bool:
    return p.dim == p.ambient_dim


def ortho(p: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Orthogonal complement; its projector is the identity minus p's."""
    d, r = p.basis.shape
    if r == 0:
        return Subspace.full(d)
    if r == d:
        return Subspace.zero(d)
    q, _ = np.linalg.qr(p.basis, mode="complete")
    return Subspace(q[:, r:], tol)


def join(p: Subspace, q: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Smallest subspace containing both: span of the concatenated bases."""
    _check_same_space(p, q)
    return Subspace(orthonormal_columns(np.hstack([p.basis, q.basis]), tol), tol)


def meet(p: Subspace, q: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Intersection, computed by De Morgan from join and complement."""
    _check_same_space(p, q)
    return ortho(join(ortho(p, tol), ortho(q, tol), tol), tol)


def sasaki(p: Subspace, q: Subspace, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Image of ``p`` under orthogonal projection onto ``q``.

    Lattice-theoretically this is the meet of ``q`` with the join of ``p`` and
    the complement of ``q``; the two routes agree within tolerance and the
    projector-image route used here is the cheaper one.
    """
    _check_same_space(p, q)
    return Subspace(orthonormal_columns(q.projector() @ p.basis, tol), tol)


def equal(p: Subspace, q: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    _check_same_space(p, q)
    return float(np.linalg.norm(p.projector() - q.projector())) < tol.eq


def leq(p: Subspace, q: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff p is contained in q: the part of p outside q vanishes."""
    _check_same_space(p, q)
    pp = p.projector()
    return float(np.linalg.norm(pp - q.projector() @ pp)) < tol.eq


def commutator_norm(p: Subspace, q: Subspace) -> float:
    _check_same_space(p, q)
    pp, qq = p.projector(), q.projector()
    return float(np.linalg.norm(pp @ qq - qq @ pp))


def projectors_commute(p: Subspace, q: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    return commutator_norm(p, q) < tol.eq


@dataclass(frozen=True)
class CompatReport:
    """Outcome of the spectral compatibility test.

    ``spectrum`` holds the eigenvalues of q's projector compressed to p.  When
    incompatible, ``witness_value``/``witness_vector`` give the eigenpair whose
    eigenvalue is farthest inside (0, 1) (closest to one half), with the
    eigenvector expressed as a unit vector of the ambient space, inside p.
    """

    compatible: bool
    spectrum: tuple[float, ...]
    by_convention: bool = False
    witness_value: float | None = None
    witness_vector: np.ndarray | None = None


def compat_report(p: Subspace, q: Subspace, tol: Tolerances = DEFAULT_TOL) -> CompatReport:
    """Spectral compatibility of two subspaces.

    Compatible iff every eigenvalue of the compression of q's projector to p
    lies within ``tol.spec`` of 0 or 1.  The zero subspace is compatible with
    everything by convention (the compression has no domain there).  Raises
    :class:`AmbiguousSpectrum` when an eigenvalue falls within half of
    ``tol.spec`` of a classification edge, i.e. when the tolerances cannot
    separate noise from a genuine violation.
    """
    _check_same_space(p, q)
    if p.dim == 0:
        return CompatReport(True, (), by_convention=True)
    b = p.basis
    m = b.conj().T @ q.projector() @ b
    m = (m + m.conj().T) / 2.0
    values, vectors = np.linalg.eigh(m)
    spectrum = tuple(float(v) for v in values)

    edge_lo, edge_hi = tol.spec, 1.0 - tol.spec
    guard = tol.spec / 2.0
    for v in spectrum:
        if min(abs(v - edge_lo), abs(v - edge_hi)) < guard:
            raise AmbiguousSpectrum(
                f"eigenvalue {v!r} lies within {guard!r} of a classification edge",
                spectrum,
            )

    middle = [i for i, v in enumerate(spectrum) if abs(v) > tol.spec and abs(1.0 - v) > tol.spec]
    if not middle:
        return CompatReport(True, spectrum)

    best = min(middle, key=lambda i: abs(spectrum[i] - 0.5))
    vec = b @ vectors[:, best]
    # canonical phase: largest-magnitude entry made real positive
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (vec[k].conj() / abs(vec[k]))
    vec = vec / np.linalg.norm(vec)
    return CompatReport(False, spectrum, witness_value=spectrum[best], witness_vector=vec)


def random_subspace(ambient: int, rank: int, seed: int,
                    tol: Tolerances = DEFAULT_TOL) -> Subspace:
    """Seeded random subspace: orthonormalized complex-Gaussian columns.

    Deterministic per seed; the generator state is local, so concurrent use
    needs no coordination.
    """
    if not 0 <= rank <= ambient:
        raise ValueError(f"rank must be in 0..{ambient}, got {rank}")
    if rank == 0:
        return Subspace.zero(ambient)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((ambient, rank)) + 1j * rng.standard_normal((ambient, rank))
    basis = orthonormal_columns(g, tol)
    if basis.shape[1] != rank:  # vanishing chance with Gaussian columns
        raise ValueError("random draw was rank deficient; use another seed")
    return Subspace(basis, tol)


def random_unit_vector(ambient: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(ambient) + 1j * rng.standard_normal(ambient)
    return v / np.linalg.norm(v)


class HilbertLattice:
    """Operation handle for the lattice of subspaces of C^d at fixed tolerances.

    Exposes the same surface as :class:`~omlab.oml.FiniteOml` (order, bounds,
    meet/join/ortho/sasaki, compatibility) so observables, filters, graphs and
    deciders can work over either lattice kind.
    """

    is_finite = False

    def __init__(self, dim: int, tol: Tolerances = DEFAULT_TOL):
        if not 1 <= dim <= MAX_AMBIENT:
            raise ValueError(f"dimension must be in 1..{MAX_AMBIENT}, got {dim}")
        self.dim = dim
        self.tol = tol
        self._bottom = Subspace.zero(dim)
        self._top = Subspace.full(dim)

    @property
    def bottom(self) -> Subspace:
        return self._bottom

    @property
    def top(self) -> Subspace:
        return self._top

    def check_element(self, p: Subspace) -> Subspace:
        if not isinstance(p, Subspace):
            raise DimMismatch(f"expected a Subspace, got {type(p).__name__}")
        if p.ambient_dim != self.dim:
            raise DimMismatch(f"ambient dimension {p.ambient_dim} does not match {self.dim}")
        return p

    def leq(self, p, q) -> bool:
        return leq(self.check_element(p), self.check_element(q), self.tol)

    def eq(self, p, q) -> bool:
        return equal(self.check_element(p), self.check_element(q), self.tol)

    def meet(self, p, q) -> Subspace:
        return meet(self.check_element(p), self.check_element(q), self.tol)

    def join(self, p, q) -> Subspace:
        return join(self.check_element(p), self.check_element(q), self.tol)

    def ortho(self, p) -> Subspace:
        return ortho(self.check_element(p), self.tol)

    def sasaki(self, p, q) -> Subspace:
        return sasaki(self.check_element(p), self.check_element(q), self.tol)

    def compatible(self, p, q) -> bool:
        return compat_report(self.check_element(p), self.check_element(q), self.tol).compatible

    def is_bottom(self, p) -> bool:
        return self.check_element(p).dim == 0

    def is_top(self, p) -> bool:
        return self.check_element(p).dim == self.dim

    def is_atom(self, p) -> bool:
        return self.check_element(p).dim == 1

    def span(self, vectors) -> Subspace:
        return Subspace.from_vectors(vectors, ambient=self.dim, tol=self.tol)

    def ray(self, vector) -> Subspace:
        return self.span([vector])

    def random(self, rank: int, seed: int) -> Subspace:
        return random_subspace(self.dim, rank, seed, self.tol)

    def describe(self, p) -> str:
        return f"subspace(dim={p.dim})"

    def __repr__(self) -> str:
        return f"HilbertLattice(dim={self.dim})"
