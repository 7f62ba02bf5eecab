"""Max-min codewords by semidefinite relaxation and eigenvector restoration.

The lifted variable is ``Omega = p p^H`` over the stored codeword ``p`` (the
same convention as :func:`risfocus.ris.response`), so the power of
constraint ``l`` is ``|a_l^T p|^2 = conj(a_l)^H Omega conj(a_l)`` where ``a_l``
is the response vector of the ray pair.
"""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .geometry import AngleDirection, ArrayGeometry, Wave
from .ris import PhaseVector, RayPair, response_matrix, unit_cell_factor
from .sdp import SolverError, solve_maxmin

__all__ = [
    "DEFAULT_TOL",
    "MaxMinProblem",
    "SdrSolution",
    "SolverError",
    "ZeroEntryWarning",
    "build_problem",
    "opt_codebook",
    "opt_codeword",
    "restore_rank_one",
    "solve_relaxed",
]

DEFAULT_TOL = 1e-6
DEGENERACY_RTOL = 1e-9
ZERO_ENTRY = 1e-12


class ZeroEntryWarning(RuntimeWarning):
    """A leading-eigenvector entry vanished; its phase was set to zero."""


@dataclass(frozen=True, eq=False)
class MaxMinProblem:
    """Constraint vectors (rows) of one max-min instance and the power scale |gbar|^2."""

    constraint_vectors: np.ndarray
    scale: float

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.constraint_vectors, dtype=complex))
        if v.shape[0] < 1:
            raise ValueError("a max-min problem needs at least one constraint")
        if np.max(np.abs(np.abs(v) - 1.0)) > 1e-9:
            raise ValueError("constraint vectors must have unit-modulus entries")
        v.setflags(write=False)
        object.__setattr__(self, "constraint_vectors", v)

    @property
    def dimension(self) -> int:
        return self.constraint_vectors.shape[1]

    def __len__(self):
        return self.constraint_vectors.shape[0]

    def powers(self, coefficients: np.ndarray) -> np.ndarray:
        """Per-constraint power ``scale * |a_l^T p|^2``; ``coefficients`` may be (..., N)."""
        c = np.asarray(coefficients)
        return self.scale * np.abs(c @ self.constraint_vectors.T) ** 2

    def lifted_powers(self, omega: np.ndarray) -> np.ndarray:
        a = self.constraint_vectors
        return self.scale * np.real(np.einsum("li,ij,lj->l", a, omega, a.conj()))


@dataclass(frozen=True, eq=False)
class SdrSolution:
    omega: np.ndarray
    gamma_relaxed: float
    codeword: PhaseVector
    gamma_restored: float
    leading_eigenvalue: float

    def __post_init__(self):
        om = self.omega
        if np.max(np.abs(om - om.conj().T)) > 1e-8:
            raise SolverError("relaxed solution is not Hermitian")
        if np.max(np.abs(np.diag(om) - 1.0)) > 1e-6:
            raise SolverError("relaxed solution violates the unit diagonal")
        if np.linalg.eigvalsh(0.5 * (om + om.conj().T))[0] < -1e-7:
            raise SolverError("relaxed solution is not positive semidefinite")
        if self.gamma_restored > self.gamma_relaxed * (1.0 + 1e-6):
            raise SolverError(f"restored value {self.gamma_restored:.12g} exceeds the "
                              f"relaxation bound {self.gamma_relaxed:.12g}")


def build_problem(g: ArrayGeometry, w: Wave, incident_rays: Sequence[AngleDirection],
                  reflected_rays: Sequence[AngleDirection], gbar: float) -> MaxMinProblem:
    """One constraint per (incident, reflected) pair, incident index outer."""
    if not incident_rays or not reflected_rays:
        raise ValueError("incident and reflected ray lists must be non-empty")
    pairs = [RayPair(t, r) for t in incident_rays for r in reflected_rays]
    return MaxMinProblem(response_matrix(g, w, pairs), abs(gbar) ** 2)


def solve_relaxed(p: MaxMinProblem, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """Solve the SDP with the rank constraint dropped.

    Returns ``(omega, gamma_relaxed)`` where ``gamma_relaxed`` is the dual
    bound of the solver, within ``tol`` (relative) of the relaxed optimum
    and never below it.
    """
    n = p.dimension
    res = solve_maxmin(p.constraint_vectors.conj().T, tol=tol)
    return res.X, p.scale * n * res.upper


def _leading_vector(omega: np.ndarray) -> tuple[np.ndarray, float]:
    vals, vecs = np.linalg.eigh(omega)
    lam1 = vals[-1]
    cand = vecs[:, vals >= lam1 - DEGENERACY_RTOL * abs(lam1)]
    if cand.shape[1] == 1:
        return cand[:, 0], float(lam1)
    # degenerate top eigenspace: fix each candidate's phase on its first
    # non-negligible entry, then take the lexicographically largest
    keys = []
    for k in range(cand.shape[1]):
        u = cand[:, k]
        first = np.flatnonzero(np.abs(u) > ZERO_ENTRY)[0]
        u = u * np.exp(-1j * np.angle(u[first]))
        cand[:, k] = u
        keys.append(tuple(np.column_stack([u.real, u.imag]).ravel()))
    best = max(range(len(keys)), key=keys.__getitem__)
    return cand[:, best], float(lam1)


def restore_rank_one(omega: np.ndarray, geometry: ArrayGeometry | None = None
                     ) -> tuple[np.ndarray | PhaseVector, float]:
    """Unit-modulus codeword from the leading eigenvector of ``omega``.

    The global phase is fixed so the first element is real positive. Entries
    whose magnitude is below 1e-12 get phase 0 and a :class:`ZeroEntryWarning`.
    Returns a :class:`PhaseVector` if ``geometry`` is given, else the raw array.
    """
    omega = np.asarray(omega, dtype=complex)
    u, lam1 = _leading_vector(0.5 * (omega + omega.conj().T))
    mag = np.abs(u)
    zero = mag < ZERO_ENTRY
    if np.any(zero):
        warnings.warn(f"{int(zero.sum())} leading-eigenvector entries are zero; "
                      "phase 0 substituted", ZeroEntryWarning, stacklevel=2)
    phase = np.where(zero, 0.0, np.angle(u))
    phase -= phase[0]
    code = np.exp(1j * phase)
    if geometry is not None:
        return PhaseVector(code, geometry), lam1
    return code, lam1


def opt_codeword(g: ArrayGeometry, w: Wave, incident_rays: Sequence[AngleDirection],
                 reflected_rays: Sequence[AngleDirection], gbar: float | None = None,
                 tol: float = DEFAULT_TOL) -> SdrSolution:
    """Max-min codeword over every (incident, reflected) ray pair."""
    if gbar is None:
        gbar = unit_cell_factor(g, w)
    prob = build_problem(g, w, incident_rays, reflected_rays, gbar)
    omega, gamma_relaxed = solve_relaxed(prob, tol)
    code, lam1 = restore_rank_one(omega, g)
    gamma_restored = float(prob.powers(code.coefficients).min())
    return SdrSolution(omega, gamma_relaxed, code, gamma_restored, lam1)


def opt_codebook(scenario, source, tol: float = DEFAULT_TOL,
                 with_solutions: bool = False) -> dict:
    """Optimised codeword of ``source`` for every other RIS of ``scenario``.

    Maps target id to :class:`PhaseVector` (or to :class:`SdrSolution` when
    ``with_solutions`` is set).
    """
    node = scenario.ris_node(source)
    incident = scenario.bs_arrivals(source)
    book = {}
    for target in scenario.targets(source):
        try:
            sol = opt_codeword(node.geometry, scenario.wave, incident,
                               scenario.departures(source, target),
                               scenario.gbar(source), tol)
        except SolverError as exc:
            raise SolverError(f"RIS {source} -> RIS {target}: {exc}") from exc
        book[target] = sol if with_solutions else sol.codeword
    return book
