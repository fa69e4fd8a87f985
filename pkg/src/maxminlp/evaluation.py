"""Judging assignments: feasibility, objectives, ratios, structural checks.

Quantities that certify algorithm guarantees (ball statistics, level sums,
acyclicity) are recomputed here from the raw rows with self-contained code,
so this module can serve as an independent check on the algorithm modules
rather than inheriting their bugs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .hypergraph import growth_factor
from .lp import solve_maxmin

DEFAULT_ORACLE_CAP = 200


class OracleUnavailableError(RuntimeError):
    """The exact oracle was declined because the instance exceeds the cap."""


def _check_domain(instance, assignment):
    if set(assignment.values) != set(instance.agents):
        raise ValueError("assignment domain does not match the instance's agents")


def feasibility(instance, assignment, tol=1e-9):
    """(feasible, max violation): the worst resource-row overshoot.

    The violation of a row is (load - 1); the reported maximum is negative
    when every row has slack.  Negative activities below -tol also fail.
    """
    _check_domain(instance, assignment)
    x = assignment.values
    worst = -math.inf
    for row in instance.resources.values():
        load = sum(a * x[v] for v, a in row.items())
        worst = max(worst, load - 1.0)
    lowest = min(x.values(), default=0.0)
    feasible = worst <= tol and lowest >= -tol
    return feasible, worst


def benefits(instance, assignment):
    """Benefit collected by each beneficiary row."""
    _check_domain(instance, assignment)
    x = assignment.values
    return {
        k: sum(c * x[v] for v, c in row.items())
        for k, row in instance.beneficiaries.items()
    }


def objective(instance, assignment):
    """Smallest beneficiary benefit."""
    got = benefits(instance, assignment)
    if not got:
        raise ValueError("empty K: the objective needs at least one beneficiary")
    return min(got.values())


def approximation_ratio(instance, assignment, oracle_cap=DEFAULT_ORACLE_CAP):
    """optimum / achieved, from the exact LP oracle.

    Returns ``math.inf`` when the achieved objective is zero but the optimum
    is positive ("unbounded" ratio -- a report value, not an error).  Raises
    OracleUnavailableError above the cap instead of silently grinding.
    """
    if len(instance.agents) > oracle_cap:
        raise OracleUnavailableError(
            f"oracle unavailable: {len(instance.agents)} agents exceed the cap of {oracle_cap}"
        )
    achieved = objective(instance, assignment)
    _, optimum = solve_maxmin(instance)
    if achieved <= 0.0:
        return math.inf if optimum > 0.0 else 1.0
    return optimum / achieved


@dataclass
class EvaluationReport:
    feasible: bool
    max_violation: float
    omega: float | None
    omega_star: float | None
    ratio: float | None
    certificate: float | None
    benefits: dict
    notes: tuple = ()

    def to_dict(self):
        ratio = self.ratio
        if ratio is not None and math.isinf(ratio):
            ratio = "unbounded"
        return {
            "feasible": self.feasible,
            "max_violation": self.max_violation,
            "omega": self.omega,
            "omega_star": self.omega_star,
            "ratio": ratio,
            "certificate": self.certificate,
            "benefits": {str(k): v for k, v in sorted(self.benefits.items())},
            "notes": list(self.notes),
        }


def evaluate(instance, assignment, tol=1e-9, R=None, oracle_cap=DEFAULT_ORACLE_CAP):
    """One-stop report for an (instance, assignment) pair.

    Passing the averaging radius R adds the growth certificate
    gamma(R-1) * gamma(R) that the averaged-local-solutions guarantee quotes.
    """
    feasible, worst = feasibility(instance, assignment, tol)
    got = benefits(instance, assignment)
    notes = []
    omega = min(got.values()) if got else None
    if omega is None:
        notes.append("no beneficiaries: objective undefined")

    omega_star = None
    ratio = None
    if len(instance.agents) > oracle_cap:
        notes.append(
            f"oracle unavailable: {len(instance.agents)} agents exceed the cap of {oracle_cap}"
        )
    elif got:
        _, omega_star = solve_maxmin(instance)
        if omega > 0.0:
            ratio = omega_star / omega
        elif omega_star > 0.0:
            ratio = math.inf
            notes.append("achieved objective is zero: ratio unbounded")
        else:
            ratio = 1.0

    certificate = None
    if R is not None:
        if R < 1:
            raise ValueError("the certificate needs R >= 1")
        certificate = float(growth_factor(instance, R - 1) * growth_factor(instance, R))

    return EvaluationReport(
        feasible=feasible,
        max_violation=worst,
        omega=omega,
        omega_star=omega_star,
        ratio=ratio,
        certificate=certificate,
        benefits=got,
        notes=tuple(notes),
    )


CSV_FIELDS = (
    "instance",
    "algorithm",
    "feasible",
    "max_violation",
    "omega",
    "omega_star",
    "ratio",
    "certificate",
)


def write_reports_csv(path, entries):
    """One CSV row per (instance label, algorithm name, report).

    Deterministic: fixed header, rows in the order given, canonical float
    formatting via str().
    """
    with Path(path).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for label, algorithm, report in entries:
            flat = report.to_dict()
            writer.writerow(
                {
                    "instance": label,
                    "algorithm": algorithm,
                    "feasible": flat["feasible"],
                    "max_violation": flat["max_violation"],
                    "omega": flat["omega"],
                    "omega_star": flat["omega_star"],
                    "ratio": flat["ratio"],
                    "certificate": flat["certificate"],
                }
            )


# ---------------------------------------------------------------------------
# Structural checks used by the adversarial pipeline.


def acyclicity(instance):
    """True when the agent-row incidence graph is a forest.

    Union-find over incidences: joining two already-connected nodes closes a
    cycle.  Two rows sharing two agents already count as cyclic.
    """
    parent = {}

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for v in instance.agents:
        parent[("agent", v)] = ("agent", v)
    rows = [("resource", i, row) for i, row in instance.resources.items()]
    rows += [("beneficiary", k, row) for k, row in instance.beneficiaries.items()]
    for kind, rid, row in rows:
        node = (kind, rid)
        parent[node] = node
        for v in row:
            ra, rb = find(node), find(("agent", v))
            if ra == rb:
                return False
            parent[ra] = rb
    return True


def level_sums(meta, assignment):
    """Total activity per level of the selected tree.

    Works for assignments on the full instance or on the carved sub-instance;
    both contain the selected tree.
    """
    if meta.p is None:
        raise ValueError("no tree has been selected yet")
    x = assignment.values
    return [sum(x[v] for v in level) for level in meta.tree_levels[meta.p]]


@dataclass(frozen=True)
class LocalityProfile:
    """Ball statistics the averaging guarantee quotes.

    per_resource maps i -> (n_i, N_i): the smallest radius-R ball among the
    row's agents and the size of the union of their balls.  per_beneficiary
    maps k -> (m_k, M_k): the size of the intersection of the row's balls and
    the largest ball.  beta = min_i n_i / N_i.
    """

    beta: float
    per_resource: dict
    per_beneficiary: dict


def locality_profile(instance, R):
    if R < 1:
        raise ValueError("R must be a positive integer")
    adj = {v: set() for v in instance.agents}
    for mapping in (instance.resources, instance.beneficiaries):
        for row in mapping.values():
            members = list(row)
            for v in members:
                adj[v].update(members)
    for v, neighbours in adj.items():
        neighbours.discard(v)

    def ball(v):
        seen = {v}
        frontier = {v}
        for _ in range(R):
            frontier = {w for u in frontier for w in adj[u]} - seen
            seen |= frontier
        return seen

    balls = {v: ball(v) for v in instance.agents}

    beta = math.inf
    per_resource = {}
    for i, row in instance.resources.items():
        sizes = [len(balls[v]) for v in row]
        union = set()
        for v in row:
            union |= balls[v]
        n_i, N_i = min(sizes), len(union)
        per_resource[i] = (n_i, N_i)
        beta = min(beta, n_i / N_i)

    per_beneficiary = {}
    for k, row in instance.beneficiaries.items():
        members = list(row)
        inter = set(balls[members[0]])
        for v in members[1:]:
            inter &= balls[v]
        per_beneficiary[k] = (len(inter), max(len(balls[v]) for v in members))

    return LocalityProfile(beta=beta, per_resource=per_resource, per_beneficiary=per_beneficiary)
