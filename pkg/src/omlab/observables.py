"""Finite observables: families of mutually exclusive, jointly exhaustive outcomes.

An observable is a finite set of nonzero, pairwise orthogonal lattice elements
whose join is the whole space -- over a subspace lattice, exactly the
eigenspace family of a Hermitian operator (eigenvalues are deliberately
discarded; only the eigenspaces matter here).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoRefutation, NotHermitian
from .oml import FiniteOml, ValidationReport
from .subspaces import (
    DEFAULT_TOL,
    HilbertLattice,
    Subspace,
    Tolerances,
    orthonormal_columns,
)

DEFAULT_DEGENERACY = 1e-8  # eigenvalue gap below which eigenspaces are merged


@dataclass(frozen=True)
class Observable:
    """An observable over either lattice kind.

    ``parts`` are lattice elements or subspaces, all owned by ``lattice``.
    """

    lattice: FiniteOml | HilbertLattice
    parts: tuple

    def __len__(self) -> int:
        return len(self.parts)


def validate_observable(obs: Observable) -> ValidationReport:
    """Check the three observable conditions: no zero part, pairwise
    orthogonality, and join equal to the whole space."""
    report = ValidationReport()
    lat = obs.lattice
    parts = obs.parts
    if not parts:
        report.add("observable has no parts")
        return report
    for i, p in enumerate(parts):
        lat.check_element(p)
        if lat.is_bottom(p):
            report.add(f"part {i} is the zero element")
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if not lat.leq(parts[i], lat.ortho(parts[j])):
                report.add(f"parts {i} and {j} are not orthogonal")
    total = parts[0]
    for p in parts[1:]:
        total = lat.join(total, p)
    if not lat.is_top(total):
        report.add("parts do not join to the whole space")
    return report


def eigenspaces(h, tol: Tolerances = DEFAULT_TOL,
                degeneracy: float = DEFAULT_DEGENERACY) -> Observable:
    """Observable formed by the eigenspaces of a Hermitian matrix.

    Eigenvalues closer than ``degeneracy`` are treated as one degenerate level
    and their eigenvectors merged into a single part.  The eigenvalues
    themselves are not retained.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.linalg.norm(h)))
    if float(np.linalg.norm(h - h.conj().T)) > tol.eq * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    values, vectors = np.linalg.eigh((h + h.conj().T) / 2.0)

    parts = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] >= degeneracy:
            parts.append(Subspace(vectors[:, start:i], tol))
            start = i
    return Observable(HilbertLattice(h.shape[0], tol), tuple(parts))


def refuting_observable(e: Subspace, seed: int = 0, tol: Tolerances = DEFAULT_TOL,
                        max_tries: int = 100) -> Observable:
    """An atomic observable none of whose outcomes lies above ``e``.

    Construction is deterministic first: the standard basis rotated by 45
    degrees in a plane chosen so that no basis ray contains ``e``; if every
    plane fails (it cannot for the supported inputs, but the output is always
    verified), seeded random orthonormal bases are tried as a fallback.

    Raises :class:`NoRefutation` for the trivial subspaces (everything lies
    above the zero subspace, and nothing can avoid lying below the whole
    space) and for ambient dimension below 3.
    """
    d = e.ambient_dim
    if e.dim == 0:
        raise NoRefutation("every outcome lies above the zero subspace")
    if e.dim == d:
        raise NoRefutation("the whole space is verified by every vertex")
    if d < 3:
        raise NoRefutation(f"refutation construction needs ambient dimension >= 3, got {d}")

    lat = HilbertLattice(d, tol)

    def rays_of(basis: np.ndarray) -> tuple[Subspace, ...]:
        return tuple(Subspace(basis[:, [i]], tol) for i in range(d))

    def refutes(parts) -> bool:
        from .subspaces import leq as _leq

        return all(not _leq(e, p, tol) for p in parts)

    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            basis = np.eye(d, dtype=np.complex128)
            basis[:, i] = inv_sqrt2 * (np.eye(d)[:, i] + np.eye(d)[:, j])
            basis[:, j] = inv_sqrt2 * (np.eye(d)[:, i] - np.eye(d)[:, j])
            parts = rays_of(basis)
            if refutes(parts):
                return Observable(lat, parts)

    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        basis = orthonormal_columns(g, tol)
        if basis.shape[1] != d:
            continue
        parts = rays_of(basis)
        if refutes(parts):
            return Observable(lat, parts)
    raise NoRefutation("search exhausted without a verified refuting basis")
