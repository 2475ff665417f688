"""Sasaki filters: upward-closed, Sasaki-stable subsets of a lattice.

Over a finite lattice the filter generated by a set is computed exactly as a
fixpoint.  Over a subspace lattice the full closure is not enumerable, so
generated filters are handled through a descent procedure that folds the
Sasaki projection over the generators; when the resulting candidate lies
below every generator the filter is exactly the candidate's up-set, and the
result says so.  A failed certificate is surfaced, never silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotIncompatible, UnsupportedFilter
from .oml import FiniteOml, LatticeElement
from .subspaces import (
    DEFAULT_TOL,
    HilbertLattice,
    Subspace,
    Tolerances,
    commutator_norm,
    compat_report,
    equal,
    join,
    leq,
    ortho,
    sasaki,
)


def closure_finite(generators, lattice: FiniteOml) -> frozenset[LatticeElement]:
    """Least Sasaki filter of a finite lattice containing the generators.

    Iterates upward closure and pairwise Sasaki projection to a fixpoint;
    termination is immediate from finiteness.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("a filter needs at least one generator")
    for g in gens:
        lattice.check_element(g)
    members = set(gens)
    while True:
        fresh = set()
        for p in members:
            for q in lattice.elements:
                if lattice.leq(p, q) and q not in members:
                    fresh.add(q)
        for p in members:
            for q in members:
                s = lattice.sasaki(p, q)
                if s not in members:
                    fresh.add(s)
        if not fresh:
            return frozenset(members)
        members |= fresh


@dataclass(frozen=True)
class DescentResult:
    """Outcome of the generated-filter descent over a subspace lattice.

    ``candidate`` is the fold of the Sasaki projection over the generators,
    started from the whole space.  ``principal`` is True when every generator
    lies above the candidate, in which case the generated filter is exactly
    the candidate's up-set.  A False flag is a certificate that this
    procedure could not exhibit a minimum, not a proof that none exists.
    """

    candidate: Subspace
    principal: bool
    sweeps: int
    converged: bool


def closure_descent(generators, tol: Tolerances = DEFAULT_TOL) -> DescentResult:
    """Compute the candidate minimum of the filter generated by subspaces.

    Sweeps the generators in input order (deterministic), replacing the
    candidate by its Sasaki projection onto each generator, until a full
    sweep leaves it unchanged.  The dimension never increases along the way,
    so the sweep count is capped at ambient-dimension times generator count.
    """
    gens = [g for g in generators]
    if not gens:
        raise ValueError("a filter needs at least one generator")
    d = gens[0].ambient_dim
    for g in gens:
        if g.ambient_dim != d:
            raise ValueError("generators must share one ambient space")
    m = Subspace.full(d)
    max_sweeps = d * len(gens) + 2
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        previous = m
        for g in gens:
            m = sasaki(m, g, tol)
        if equal(m, previous, tol):
            converged = True
            break
    principal = converged and all(leq(m, g, tol) for g in gens)
    return DescentResult(m, principal, sweeps, converged)


@dataclass(frozen=True)
class SasakiFilter:
    """A Sasaki filter in principal or generated form.

    Principal filters are up-sets of a single element.  Generated filters
    over a finite lattice carry their exact closure; over a subspace lattice
    they carry the descent result, and queries that need the exact filter
    raise :class:`UnsupportedFilter` when the descent failed to certify a
    principal form.
    """

    lattice: FiniteOml | HilbertLattice
    minimum: object = None
    generators: tuple = ()
    closure: frozenset | None = field(default=None, compare=False)
    descent: DescentResult | None = field(default=None, compare=False)

    @classmethod
    def principal(cls, lattice, minimum) -> "SasakiFilter":
        lattice.check_element(minimum)
        return cls(lattice, minimum=minimum)

    @classmethod
    def generated(cls, lattice, generators) -> "SasakiFilter":
        gens = tuple(generators)
        for g in gens:
            lattice.check_element(g)
        if lattice.is_finite:
            return cls(lattice, generators=gens, closure=closure_finite(gens, lattice))
        result = closure_descent(gens, lattice.tol)
        minimum = result.candidate if result.principal else None
        return cls(lattice, minimum=minimum, generators=gens, descent=result)

    @property
    def is_principal(self) -> bool:
        return self.minimum is not None

    def member(self, p) -> bool:
        """Membership test.

        Principal: containment above the minimum.  Generated over a finite
        lattice: exact closure membership.  Generated over a subspace
        lattice: membership in the descent candidate's up-set, which is the
        exact filter precisely when the descent certified principality.
        """
        self.lattice.check_element(p)
        if self.minimum is not None:
            return self.lattice.leq(self.minimum, p)
        if self.closure is not None:
            return p in self.closure
        return self.lattice.leq(self.descent.candidate, p)

    @property
    def is_consistent(self) -> bool:
        """True iff the filter excludes the zero element."""
        if self.minimum is not None:
            return not self.lattice.is_bottom(self.minimum)
        if self.closure is not None:
            return self.lattice.bottom not in self.closure
        if self.lattice.is_bottom(self.descent.candidate):
            return False
        raise UnsupportedFilter(
            "consistency is undecided: the descent did not certify a principal form"
        )

    def atoms(self) -> frozenset:
        """The atoms contained in the filter.

        Over a subspace lattice a principal filter contains an atom iff its
        minimum is itself a ray; generated subspace filters without a
        certified minimum are not decidable here.
        """
        lat = self.lattice
        if lat.is_finite:
            if self.closure is not None:
                return frozenset(a for a in lat.atoms() if a in self.closure)
            return frozenset(a for a in lat.atoms() if lat.leq(self.minimum, a))
        if self.minimum is None:
            raise UnsupportedFilter(
                "atom query needs a principal filter over a subspace lattice"
            )
        if self.minimum.dim == 1:
            return frozenset({self.minimum})
        return frozenset()


@dataclass(frozen=True)
class Witness:
    """Refinement data for an incompatible pair of subspaces.

    ``u`` is a ray in the first subspace outside the second, ``v`` its image
    ray in the second, and ``context`` their two-dimensional span, compatible
    with both inputs.  Projecting either input onto the complement of the
    context strictly shrinks it, which is the content of the refinement.
    ``residuals`` carries the numerical evidence for every claim.
    """

    u: Subspace
    v: Subspace
    context: Subspace
    eigenvalue: float
    residuals: dict[str, float]


def refine_incompatible(p: Subspace, q: Subspace,
                        tol: Tolerances = DEFAULT_TOL) -> Witness:
    """Construct the two-ray context witnessing that an incompatible pair is
    not minimal in any filter containing both.

    The ray ``u`` is the spectral witness of the compatibility test (the
    eigenvector whose eigenvalue is closest to one half, maximizing the
    margin from the classification band); ``v`` is its normalized projection
    onto ``q``.  All postconditions are checked before returning.
    """
    report = compat_report(p, q, tol)
    if report.compatible:
        raise NotIncompatible("the pair is compatible; no spectral witness exists")

    u_vec = report.witness_vector
    v_raw = q.projector() @ u_vec
    v_vec = v_raw / np.linalg.norm(v_raw)
    u = Subspace(u_vec.reshape(-1, 1), tol)
    v = Subspace(v_vec.reshape(-1, 1), tol)
    context = join(u, v, tol)
    comp = ortho(context, tol)
    comp_p = sasaki(comp, p, tol)
    comp_q = sasaki(comp, q, tol)

    def proj_dist(a: Subspace, b: Subspace) -> float:
        return float(np.linalg.norm(a.projector() - b.projector()))

    def outside_margin(vec: np.ndarray, s: Subspace) -> float:
        return float(np.linalg.norm(vec - s.projector() @ vec))

    def leq_residual(a: Subspace, b: Subspace) -> float:
        return float(np.linalg.norm(a.projector() - b.projector() @ a.projector()))

    residuals = {
        "context_compatible_p": commutator_norm(context, p),
        "context_compatible_q": commutator_norm(context, q),
        "p_onto_context_is_u": proj_dist(sasaki(p, context, tol), u),
        "q_onto_context_is_v": proj_dist(sasaki(q, context, tol), v),
        "u_outside_q_margin": outside_margin(u_vec, q),
        "v_outside_p_margin": outside_margin(v_vec, p),
        "complement_refines_p": leq_residual(comp_p, p),
        "complement_refines_q": leq_residual(comp_q, q),
        "p_dim_drop": float(p.dim - comp_p.dim),
        "q_dim_drop": float(q.dim - comp_q.dim),
    }
    for key in ("context_compatible_p", "context_compatible_q",
                "p_onto_context_is_u", "q_onto_context_is_v",
                "complement_refines_p", "complement_refines_q"):
        if residuals[key] > 1000 * tol.eq:
            raise ArithmeticError(f"witness postcondition {key} failed: {residuals[key]!r}")
    if residuals["p_dim_drop"] < 1 or residuals["q_dim_drop"] < 1:
        raise ArithmeticError("witness postcondition failed: no strict refinement")
    return Witness(u, v, context, float(report.witness_value), residuals)
