"""Primal-dual interior-point solver for the lifted max-min quadratic problem.

Solves, over Hermitian ``X`` (N x N) and scalar ``t``::

    maximize    t
    subject to  w_l^H X w_l / N >= t      for every column w_l of W
                diag(X) = 1
                X >= 0 (positive semidefinite)

using Mehrotra predictor-corrector steps along the HKM direction. With only
N diagonal constraints and L rank-one constraints, the Schur complement is
assembled in O(N^2 (N + L)) per iteration instead of the generic O(N^6).

The iterates are kept primal and dual feasible from the start: X = I
satisfies the diagonal constraint and the dual slack starts as a shifted
identity. The reported upper bound is the dual objective, which certifies
the relaxed optimum from above.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """The interior-point iteration failed to reach the requested accuracy."""


@dataclass(frozen=True)
class SdpResult:
    X: np.ndarray
    lower: float   # min_l w_l^H X w_l / N at the returned X
    upper: float   # dual objective, >= relaxed optimum
    iterations: int


def _herm(a):
    return 0.5 * (a + a.conj().T)


def _max_step_psd(X, dX):
    """Largest alpha with X + alpha dX still PSD (inf if unbounded)."""
    L = np.linalg.cholesky(X)
    tmp = sla.solve_triangular(L, dX, lower=True)
    M = sla.solve_triangular(L, tmp.conj().T, lower=True).conj().T
    lam = np.linalg.eigvalsh(_herm(M))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x, dx):
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def solve_maxmin(W: np.ndarray, tol: float = 1e-6, max_iter: int = 100,
                 step: float = 0.98) -> SdpResult:
    """Solve the relaxed problem for the constraint vectors in the columns of ``W``.

    Stops when the gap between the dual bound and the primal value, relative
    to the primal value, and the feasibility residuals are all below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    W = np.asarray(W, dtype=complex)
    N, L = W.shape
    if L == 0:
        raise ValueError("at least one constraint vector is required")
    beta = 1.0 / N
    m = N + L

    # LP block: slacks s (L) and t, coupled only to the rank-one rows
    # A_lp[N + l] has -1 on s_l and -1 on t
    def a_lp(v):        # A_lp @ v, only the last L rows are non-zero
        return -(v[:L] + v[L])

    def a_lp_t(yl):     # A_lp^T @ y restricted to the rank-one rows
        return -np.concatenate([yl, [yl.sum()]])

    def a_psd(M):       # Re tr(A_i M) for every row
        out = np.empty(m)
        out[:N] = np.real(np.diag(M))
        out[N:] = beta * np.real(np.einsum("il,ij,jl->l", W.conj(), M, W))
        return out

    def a_psd_t(y):
        return np.diag(y[:N].astype(complex)) + beta * (W * y[N:]) @ W.conj().T

    b = np.concatenate([np.ones(N), np.zeros(L)])
    c_lp = np.zeros(L + 1)
    c_lp[-1] = -1.0

    X = np.eye(N, dtype=complex)
    x_lp = np.full(L + 1, 0.5)
    y = np.concatenate([np.full(N, -3.0), np.full(L, 2.0 / L)])
    Z = -a_psd_t(y)
    z_lp = c_lp - a_lp_t(y[N:])

    def direction(Zi, D, rp, Rd, rd_lp, Rc, rc, chol):
        # M dy = rp - A(Rc - X Rd Zi) - A_lp(rc - D rd_lp)
        rhs = rp - a_psd(Rc - X @ Rd @ Zi)
        rhs[N:] -= a_lp(rc - D * rd_lp)
        dy = sla.cho_solve(chol, rhs)
        dZ = Rd - a_psd_t(dy)
        dZ = _herm(dZ)
        dX = Rc - _herm(X @ dZ @ Zi)
        dz = rd_lp - a_lp_t(dy[N:])
        dx = rc - D * dz
        return dX, dx, dy, dZ, dz

    for it in range(1, max_iter + 1):
        t = x_lp[-1]
        rp = b - a_psd(X)
        rp[N:] -= a_lp(x_lp)
        Rd = _herm(-a_psd_t(y) - Z)
        rd_lp = c_lp - a_lp_t(y[N:]) - z_lp
        upper = -float(y[:N].sum())
        gap = (upper - t) / max(abs(t), 1e-12)
        pinf = np.linalg.norm(rp) / (1.0 + np.sqrt(N))
        dinf = max(np.linalg.norm(Rd), np.linalg.norm(rd_lp)) / 2.0
        log.debug("iter %d t=%.10g upper=%.10g gap=%.3g pinf=%.3g dinf=%.3g",
                  it, t, upper, gap, pinf, dinf)
        if gap < tol and pinf < tol and dinf < tol:
            vals = beta * np.real(np.einsum("il,ij,jl->l", W.conj(), X, W))
            return SdpResult(_herm(X), float(vals.min()), upper, it - 1)

        Zi = np.linalg.inv(Z)
        Zi = _herm(Zi)
        D = x_lp / z_lp
        XW = X @ W
        ZW = Zi @ W
        P = W.conj().T @ XW
        Q = W.conj().T @ ZW
        M = np.empty((m, m))
        M[:N, :N] = np.real(X * Zi.T)
        cross = beta * np.real(XW * ZW.conj())
        M[:N, N:] = cross
        M[N:, :N] = cross.T
        M[N:, N:] = beta**2 * np.real(P * Q.T) + D[L] + np.diag(D[:L])
        M = 0.5 * (M + M.T)
        try:
            chol = sla.cho_factor(M)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"Schur complement lost definiteness at iteration {it}") from exc

        mu = (np.real(np.vdot(X, Z)) + x_lp @ z_lp) / (N + L + 1)

        # predictor
        dXa, dxa, dya, dZa, dza = direction(Zi, D, rp, Rd, rd_lp, -X, -x_lp, chol)
        ap = min(1.0, _max_step_psd(X, dXa), _max_step_lp(x_lp, dxa))
        ad = min(1.0, _max_step_psd(Z, dZa), _max_step_lp(z_lp, dza))
        mu_aff = (np.real(np.vdot(X + ap * dXa, Z + ad * dZa))
                  + (x_lp + ap * dxa) @ (z_lp + ad * dza)) / (N + L + 1)
        sigma = min(1.0, (mu_aff / mu) ** 3)

        # corrector
        Rc = sigma * mu * Zi - X - _herm(dXa @ dZa @ Zi)
        rc = sigma * mu / z_lp - x_lp - dxa * dza / z_lp
        dX, dx, dy, dZ, dz = direction(Zi, D, rp, Rd, rd_lp, Rc, rc, chol)
        ap = min(1.0, step * _max_step_psd(X, dX), step * _max_step_lp(x_lp, dx))
        ad = min(1.0, step * _max_step_psd(Z, dZ), step * _max_step_lp(z_lp, dz))

        X = _herm(X + ap * dX)
        x_lp = x_lp + ap * dx
        y = y + ad * dy
        Z = _herm(Z + ad * dZ)
        z_lp = z_lp + ad * dz

    raise SolverError(f"no convergence to tol={tol:g} within {max_iter} iterations")
