"""Dense two-phase tableau simplex.

Solves ``max c^T x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``x >= 0``. Pricing is Dantzig's largest-coefficient rule; after
``bland_after`` consecutive degenerate pivots it switches to Bland's rule for
the rest of the phase, which rules out cycling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    """Infeasible, unbounded or numerically failed linear program."""


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    pivots: int
    basis: np.ndarray


def _run_phase(T: np.ndarray, basis: np.ndarray, allowed: int, *, tol: float,
               bland_after: int, max_pivots: int) -> int:
    """Pivot on tableau ``T`` (last row = reduced costs of a max problem, last
    column = rhs) until optimal. Only the first ``allowed`` columns may enter."""
    m = T.shape[0] - 1
    pivots = 0
    degenerate_run = 0
    bland = False
    while True:
        red = T[-1, :allowed]
        if bland:
            cand = np.flatnonzero(red > tol)
            if cand.size == 0:
                return pivots
            col = int(cand[0])
        else:
            col = int(np.argmax(red))
            if red[col] <= tol:
                return pivots
        column = T[:m, col]
        pos = column > tol
        if not pos.any():
            raise LPError("linear program is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / column[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        # smallest basic variable index among ties (Bland's leaving rule)
        row = int(ties[np.argmin(basis[ties])])
        if best <= 1e-12:
            degenerate_run += 1
            if degenerate_run >= bland_after:
                bland = True
        else:
            degenerate_run = 0
        T[row] /= T[row, col]
        others = T[:, col].copy()
        others[row] = 0.0
        T -= np.outer(others, T[row])
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise LPError(f"simplex exceeded {max_pivots} pivots")


def simplex_maximize(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, tol: float = 1e-9,
                     bland_after: int = 500, max_pivots: int = 100_000) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # columns: x | slacks (m_ub) | artificials (m)
    n_slack = m_ub
    A = np.zeros((m, n + n_slack))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b = np.where(neg, -b, b)

    # rows whose slack can start basic need no artificial
    basis = np.empty(m, dtype=int)
    need_art = []
    for r in range(m):
        if r < m_ub and not neg[r]:
            basis[r] = n + r
        else:
            need_art.append(r)
    n_art = len(need_art)
    width = n + n_slack + n_art
    T = np.zeros((m + 1, width + 1))
    T[:m, : n + n_slack] = A
    T[:m, -1] = b
    for k, r in enumerate(need_art):
        T[r, n + n_slack + k] = 1.0
        basis[r] = n + n_slack + k

    pivots = 0
    if n_art:
        # phase I: maximize -sum(artificials)
        art_rows = np.array(need_art)
        T[-1, : n + n_slack] = T[art_rows, : n + n_slack].sum(axis=0)
        T[-1, -1] = T[art_rows, -1].sum()
        pivots += _run_phase(T, basis, n + n_slack, tol=tol, bland_after=bland_after,
                             max_pivots=max_pivots)
        if T[-1, -1] > 1e-7 * max(1.0, np.abs(b).max(initial=0.0)):
            raise LPError("linear program is infeasible")
        # drive remaining artificials out of the basis
        for r in range(m):
            if basis[r] >= n + n_slack:
                row = T[r, : n + n_slack]
                cand = np.flatnonzero(np.abs(row) > 1e-9)
                if cand.size == 0:
                    continue  # redundant row
                col = int(cand[0])
                T[r] /= T[r, col]
                others = T[:, col].copy()
                others[r] = 0.0
                T -= np.outer(others, T[r])
                basis[r] = col
        keep = np.flatnonzero(basis < n + n_slack)
        T = np.vstack([T[keep], T[-1:]])
        basis = basis[keep]
        T = np.delete(T, np.s_[n + n_slack: width], axis=1)
        m = len(keep)

    # phase II objective row: reduced costs c_j - c_B B^-1 A_j
    cost = np.zeros(n + n_slack)
    cost[:n] = c
    T[-1, :-1] = cost - cost[basis] @ T[:m, :-1]
    T[-1, -1] = -(cost[basis] @ T[:m, -1])
    pivots += _run_phase(T, basis, n + n_slack, tol=tol, bland_after=bland_after,
                         max_pivots=max_pivots)

    x_full = np.zeros(n + n_slack)
    x_full[basis] = T[:m, -1]
    x = np.maximum(x_full[:n], 0.0)
    return SimplexResult(x, float(c @ x), pivots, basis.copy())
