"""Small dense linear programs and a two-phase primal simplex.

Problems are stated as::

    minimize    c @ x + constant
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                lb <= x <= ub          (entries may be infinite)

The solver targets the tiny per-slice relaxations built in ``relaxation``;
it favours exactness checks over speed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11


class LPStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


class LPNumericalError(RuntimeError):
    """The simplex lost accuracy; the answer cannot be trusted."""


@dataclass
class LinearProgram:
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    names: list[str] = field(default_factory=list)
    constant: float = 0.0

    @classmethod
    def build(
        cls,
        c: Sequence[float],
        A_ub=None,
        b_ub=None,
        A_eq=None,
        b_eq=None,
        bounds: Optional[Sequence[tuple[Optional[float], Optional[float]]]] = None,
        names: Optional[list[str]] = None,
        constant: float = 0.0,
    ) -> "LinearProgram":
        """Convenience constructor; ``bounds`` defaults to ``x >= 0``."""
        c = np.asarray(c, dtype=np.float64)
        n = c.shape[0]

        def mat(A):
            return np.zeros((0, n)) if A is None else np.asarray(A, dtype=np.float64).reshape(-1, n)

        def vec(b):
            return np.zeros(0) if b is None else np.asarray(b, dtype=np.float64).reshape(-1)

        bounds = bounds if bounds is not None else [(0.0, None)] * n
        lb = np.array([-np.inf if lo is None else lo for lo, _ in bounds], dtype=np.float64)
        ub = np.array([np.inf if hi is None else hi for _, hi in bounds], dtype=np.float64)
        return cls(c, mat(A_ub), vec(b_ub), mat(A_eq), vec(b_eq), lb, ub, names or [f"x{j}" for j in range(n)], constant)

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    def objective_at(self, x: np.ndarray) -> float:
        return float(self.c @ x) + self.constant

    def max_violation(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation at ``x`` (0 when feasible)."""
        worst = 0.0
        if self.A_ub.shape[0]:
            worst = max(worst, float(np.max(self.A_ub @ x - self.b_ub)))
        if self.A_eq.shape[0]:
            worst = max(worst, float(np.max(np.abs(self.A_eq @ x - self.b_eq))))
        worst = max(worst, float(np.max(self.lb - x, initial=0.0)), float(np.max(x - self.ub, initial=0.0)))
        return worst


@dataclass
class LPSolution:
    status: LPStatus
    x: Optional[np.ndarray]
    objective: float
    names: list[str] = field(default_factory=list)
    iterations: int = 0

    @property
    def values(self) -> dict[str, float]:
        if self.x is None:
            return {}
        return dict(zip(self.names, self.x.tolist()))


def _standard_form(lp: LinearProgram):
    """Rewrite as ``A x' (+ slack) = b, x' >= 0``; returns the data and the back-map."""
    n = lp.n_vars
    cols = []  # per original var: list of (std column, sign)
    offset = np.zeros(n)
    ub_rows = []  # (std column, bound)
    n_std = 0
    for j in range(n):
        lo, hi = lp.lb[j], lp.ub[j]
        if lo > hi + FEAS_TOL:
            return None
        if np.isfinite(lo):
            offset[j] = lo
            cols.append([(n_std, 1.0)])
            if np.isfinite(hi):
                ub_rows.append((n_std, hi - lo))
            n_std += 1
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append([(n_std, -1.0)])
            n_std += 1
        else:
            cols.append([(n_std, 1.0), (n_std + 1, -1.0)])
            n_std += 2

    def expand(A):
        out = np.zeros((A.shape[0], n_std))
        for j, parts in enumerate(cols):
            for k, sign in parts:
                out[:, k] += sign * A[:, j]
        return out

    c_std = expand(lp.c.reshape(1, -1))[0]
    const = lp.constant + float(lp.c @ offset)

    A_ub = expand(lp.A_ub)
    b_ub = lp.b_ub - lp.A_ub @ offset
    if ub_rows:
        extra = np.zeros((len(ub_rows), n_std))
        for r, (k, bound) in enumerate(ub_rows):
            extra[r, k] = 1.0
        A_ub = np.vstack([A_ub, extra])
        b_ub = np.concatenate([b_ub, [b for _, b in ub_rows]])
    A_eq = expand(lp.A_eq)
    b_eq = lp.b_eq - lp.A_eq @ offset
    return c_std, const, A_ub, b_ub, A_eq, b_eq, cols, offset


def solve_lp(problem, max_iter: Optional[int] = None, iterate=None) -> LPSolution:
    """Solve a LinearProgram (or anything carrying one as ``.lp``).

    Raises LPNumericalError when pivoting breaks down or the reported optimum
    fails the feasibility re-check.
    """
    lp: LinearProgram = getattr(problem, "lp", problem)
    iterate = iterate or kernels.simplex_iterate
    names = list(lp.names)
    std = _standard_form(lp)
    if std is None:
        return LPSolution(LPStatus.INFEASIBLE, None, np.inf, names)
    c, const, A_ub, b_ub, A_eq, b_eq, cols, offset = std
    n_std = c.shape[0]
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    A = np.zeros((m, n_std + m_ub))
    A[:m_ub, :n_std] = A_ub
    A[:m_ub, n_std:] = np.eye(m_ub)
    A[m_ub:, :n_std] = A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    n_real = n_std + m_ub
    basis = np.full(m, -1, dtype=np.int64)
    for r in range(m_ub):
        if not neg[r]:
            basis[r] = n_std + r
    art_rows = np.flatnonzero(basis < 0)
    n_art = art_rows.size
    T = np.zeros((m + 1, n_real + n_art + 1))
    T[:m, :n_real] = A
    T[:m, -1] = b
    for k, r in enumerate(art_rows):
        T[r, n_real + k] = 1.0
        basis[r] = n_real + k
    max_iter = max_iter or 50 * (m + n_real + 10)
    iterations = 0

    if n_art:
        T[m, :n_real] = -T[art_rows, :n_real].sum(axis=0)
        T[m, -1] = -T[art_rows, -1].sum()
        status, it = iterate(T, basis, n_real, FEAS_TOL, max_iter)
        iterations += it
        if status != kernels.STATUS_OPTIMAL:
            raise LPNumericalError(f"phase 1 did not converge (status {status})")
        if -T[m, -1] > FEAS_TOL * (1.0 + float(np.abs(b).max(initial=0.0))):
            return LPSolution(LPStatus.INFEASIBLE, None, np.inf, names, iterations)
        # drive remaining artificials out of the basis, dropping redundant rows
        keep = np.ones(m + 1, dtype=bool)
        for r in range(m):
            if basis[r] < n_real:
                continue
            row = np.abs(T[r, :n_real])
            j = int(np.argmax(row)) if n_real else -1
            if j < 0 or row[j] < PIVOT_TOL:
                if abs(T[r, -1]) > FEAS_TOL:
                    raise LPNumericalError(f"artificial stuck at {T[r, -1]:.3e} with no pivot above {PIVOT_TOL}")
                keep[r] = False
                continue
            kernels.pivot_np(T, r, j)
            basis[r] = j
        T = np.ascontiguousarray(np.delete(T[keep], np.s_[n_real : n_real + n_art], axis=1))
        basis = np.ascontiguousarray(basis[keep[:m]])
        m = basis.size

    cost = np.zeros(n_real)
    cost[:n_std] = c
    T[m, :n_real] = cost - cost[basis] @ T[:m, :n_real]
    T[m, -1] = -float(cost[basis] @ T[:m, -1])
    status, it = iterate(T, basis, n_real, FEAS_TOL, max_iter)
    iterations += it
    if status == kernels.STATUS_UNBOUNDED:
        return LPSolution(LPStatus.UNBOUNDED, None, -np.inf, names, iterations)
    if status != kernels.STATUS_OPTIMAL:
        raise LPNumericalError("phase 2 hit the iteration limit")

    xs = np.zeros(n_real)
    xs[basis] = T[:m, -1]
    if xs.min(initial=0.0) < -FEAS_TOL:
        raise LPNumericalError("basic solution went negative")
    xs = np.maximum(xs, 0.0)
    x = offset.copy()
    for j, parts in enumerate(cols):
        for k, sign in parts:
            x[j] += sign * xs[k]
    scale = 1.0 + max(float(np.abs(lp.b_ub).max(initial=0.0)), float(np.abs(lp.b_eq).max(initial=0.0)))
    if lp.max_violation(x) > FEAS_TOL * scale:
        raise LPNumericalError(f"solution violates constraints by {lp.max_violation(x):.3e}")
    return LPSolution(LPStatus.OPTIMAL, x, lp.objective_at(x), names, iterations)


def _fmt(x: float) -> str:
    return repr(float(x))


def _expr(row, names) -> str:
    terms = [f"{'-' if a < 0 else '+'} {_fmt(abs(a))} {nm}" for a, nm in zip(row, names) if a != 0.0]
    if not terms:
        return "0 " + names[0]
    head = terms[0]
    return (head[2:] if head.startswith("+") else head) + "".join(" " + t for t in terms[1:])


def to_lp_text(problem, title: str = "relaxation") -> str:
    """CPLEX LP format text, for cross-checking with an external solver."""
    lp: LinearProgram = getattr(problem, "lp", problem)
    names = [nm.replace(",", "_").replace("(", "_").replace(")", "").replace(" ", "") for nm in lp.names]
    lines = [f"\\ {title}", f"\\ objective constant {_fmt(lp.constant)}", "Minimize", " obj: " + _expr(lp.c, names)]
    lines.append("Subject To")
    for r in range(lp.A_ub.shape[0]):
        lines.append(f" ub{r}: {_expr(lp.A_ub[r], names)} <= {_fmt(lp.b_ub[r])}")
    for r in range(lp.A_eq.shape[0]):
        lines.append(f" eq{r}: {_expr(lp.A_eq[r], names)} = {_fmt(lp.b_eq[r])}")
    lines.append("Bounds")
    for nm, lo, hi in zip(names, lp.lb, lp.ub):
        if not np.isfinite(lo) and not np.isfinite(hi):
            lines.append(f" {nm} free")
            continue
        lo_s = "-inf" if not np.isfinite(lo) else _fmt(lo)
        hi_s = "+inf" if not np.isfinite(hi) else _fmt(hi)
        lines.append(f" {lo_s} <= {nm} <= {hi_s}")
    lines.append("End")
    return "\n".join(lines) + "\n"
