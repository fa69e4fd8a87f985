"""Max-min LP assembly and a deterministic dense-tableau simplex.

The solver exists for reproducibility, not speed.  Every pivot decision uses
the lowest-eligible-index rule (Bland) over a canonical column order, so
identical programs take identical pivot paths and return bit-identical
optima -- several agents re-deriving the same local optimum from their own
views must agree to the last bit.  Problems here are ball-sized, so a dense
tableau is plenty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Assignment

PIVOT_TOL = 1e-12
FEASIBILITY_TOL = 1e-9
_MAX_PIVOTS = 200_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class EmptyBeneficiaryError(ValueError):
    """The max-min objective is undefined without beneficiary rows (empty K)."""


@dataclass
class LinearProgram:
    """maximise objective @ x  subject to  row_coeffs @ x <= row_rhs,
    with x_j >= 0 wherever ``nonneg[j]`` is set (free otherwise)."""

    variables: tuple
    objective: np.ndarray
    row_coeffs: np.ndarray
    row_rhs: np.ndarray
    nonneg: tuple
    row_labels: tuple = ()


@dataclass
class LpSolution:
    status: str
    values: dict
    objective: float | None


def assemble_maxmin_lp(sub_instance):
    """Epigraph form of the max-min objective.

    One extra variable carries the common benefit level; it is maximised
    subject to sitting below every beneficiary row.  Canonical variable
    order: the level first, then agents ascending by id.  Canonical row
    order: resources ascending, then beneficiaries ascending.
    """
    if not sub_instance.beneficiaries:
        raise EmptyBeneficiaryError(
            "empty K: the max-min objective needs at least one beneficiary"
        )
    agents = list(sub_instance.agents)
    col = {v: 1 + t for t, v in enumerate(agents)}
    names = ("omega",) + tuple(f"x{v}" for v in agents)
    n = len(names)

    rows = []
    rhs = []
    labels = []
    for i, row in sub_instance.resources.items():
        coeffs = np.zeros(n)
        for v, a in row.items():
            if v not in col:
                raise ValueError(f"resource {i} references unknown agent {v}")
            coeffs[col[v]] = a
        rows.append(coeffs)
        rhs.append(1.0)
        labels.append(f"resource:{i}")
    for k, row in sub_instance.beneficiaries.items():
        coeffs = np.zeros(n)
        coeffs[0] = 1.0
        for v, c in row.items():
            if v not in col:
                raise ValueError(f"beneficiary {k} references unknown agent {v}")
            coeffs[col[v]] = -c
        rows.append(coeffs)
        rhs.append(0.0)
        labels.append(f"beneficiary:{k}")

    objective = np.zeros(n)
    objective[0] = 1.0
    nonneg = (False,) + (True,) * len(agents)
    return LinearProgram(
        variables=names,
        objective=objective,
        row_coeffs=np.array(rows) if rows else np.zeros((0, n)),
        row_rhs=np.array(rhs),
        nonneg=nonneg,
        row_labels=tuple(labels),
    )


def _pivot(T, basis, obj, pr, pc):
    T[pr] /= T[pr, pc]
    factors = T[:, pc].copy()
    factors[pr] = 0.0
    T -= np.outer(factors, T[pr])
    obj -= obj[pc] * T[pr]
    # kill residual drift in the pivot column so later scans stay clean
    T[:, pc] = 0.0
    T[pr, pc] = 1.0
    obj[pc] = 0.0
    basis[pr] = pc


def _price_out(obj, T, basis):
    for i, b in enumerate(basis):
        if obj[b] != 0.0:
            obj -= obj[b] * T[i]
            obj[b] = 0.0


def _run_simplex(T, basis, obj, n_enterable):
    """Bland iterations until optimal or unbounded.

    Entering column: lowest index with improving potential above PIVOT_TOL.
    Leaving row: minimum ratio, ties broken by lowest basic-variable index.
    """
    for _ in range(_MAX_PIVOTS):
        eligible = np.flatnonzero(obj[:n_enterable] > PIVOT_TOL)
        if eligible.size == 0:
            return OPTIMAL
        pc = int(eligible[0])
        column = T[:, pc]
        rows = np.flatnonzero(column > PIVOT_TOL)
        if rows.size == 0:
            return UNBOUNDED
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best]
        pr = int(min(tied, key=lambda i: basis[i]))
        _pivot(T, basis, obj, pr, pc)
    raise ArithmeticError("simplex failed to terminate; Bland's rule should preclude this")


def _simplex_standard(A, b, c):
    """maximise c @ y  s.t.  A y <= b, y >= 0.  Two phases when needed."""
    m, n = A.shape
    A = A.astype(float).copy()
    b = b.astype(float).copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    art_rows = np.flatnonzero(neg)
    n_art = len(art_rows)
    ncols = n + m + n_art

    T = np.zeros((m, ncols + 1))
    T[:, :n] = A
    for i in range(m):
        T[i, n + i] = -1.0 if neg[i] else 1.0
    basis = np.empty(m, dtype=int)
    basis[:] = np.arange(n, n + m)
    for t, i in enumerate(art_rows):
        T[i, n + m + t] = 1.0
        basis[i] = n + m + t
    T[:, -1] = b

    if n_art:
        obj = np.zeros(ncols + 1)
        obj[n + m : ncols] = -1.0
        _price_out(obj, T, basis)
        status = _run_simplex(T, basis, obj, ncols)
        if status != OPTIMAL or obj[-1] > FEASIBILITY_TOL:
            return INFEASIBLE, None
        # pivot lingering artificials out; rows that cannot release one are
        # redundant (all-real-zero) and stay inert for phase 2
        for i in range(m):
            if basis[i] >= n + m:
                real = np.flatnonzero(np.abs(T[i, : n + m]) > PIVOT_TOL)
                if real.size:
                    _pivot(T, basis, obj, i, int(real[0]))

    obj = np.zeros(ncols + 1)
    obj[:n] = c
    _price_out(obj, T, basis)
    status = _run_simplex(T, basis, obj, n + m)
    if status != OPTIMAL:
        return status, None

    y = np.zeros(ncols)
    y[basis] = T[:, -1]
    return OPTIMAL, y[:n]


def solve_deterministic(lp):
    """Solve an arbitrary well-formed program.

    Free variables are split into positive and negative parts so the tableau
    only ever sees nonnegative columns; the split preserves the canonical
    column order.  The returned point is verified feasible within 1e-9.
    """
    cols = []
    ncols = 0
    for flag in lp.nonneg:
        if flag:
            cols.append((ncols, None))
            ncols += 1
        else:
            cols.append((ncols, ncols + 1))
            ncols += 2

    m = lp.row_coeffs.shape[0]
    A = np.zeros((m, ncols))
    c = np.zeros(ncols)
    for j, (pos, negc) in enumerate(cols):
        A[:, pos] = lp.row_coeffs[:, j]
        c[pos] = lp.objective[j]
        if negc is not None:
            A[:, negc] = -lp.row_coeffs[:, j]
            c[negc] = -lp.objective[j]

    status, y = _simplex_standard(A, np.asarray(lp.row_rhs, dtype=float), c)
    if status != OPTIMAL:
        return LpSolution(status, {}, None)

    values = {}
    for name, (pos, negc) in zip(lp.variables, cols):
        values[name] = float(y[pos] - (y[negc] if negc is not None else 0.0))

    vec = np.array([values[name] for name in lp.variables])
    slack = lp.row_coeffs @ vec - lp.row_rhs
    lowest = min(
        (values[name] for name, flag in zip(lp.variables, lp.nonneg) if flag),
        default=0.0,
    )
    if (slack.size and slack.max() > FEASIBILITY_TOL) or lowest < -FEASIBILITY_TOL:
        raise ArithmeticError("simplex returned an infeasible point")
    return LpSolution(OPTIMAL, values, float(lp.objective @ vec))


def solve_maxmin(sub_instance):
    """Canonical optimum of the assembled max-min LP: (assignment, omega).

    The fixed pivot path makes the answer a pure function of the
    sub-instance.  Infeasible or unbounded statuses cannot legitimately occur
    (zero activity is always feasible and the packing rows bound everything),
    so they surface as internal errors.
    """
    lp = assemble_maxmin_lp(sub_instance)
    sol = solve_deterministic(lp)
    if sol.status != OPTIMAL:
        raise ArithmeticError(
            f"assembled max-min LP reported {sol.status}; "
            "zero activity is always feasible and resources bound the rest"
        )
    values = {v: max(0.0, sol.values[f"x{v}"]) for v in sub_instance.agents}
    return Assignment(values), max(0.0, sol.values["omega"])
