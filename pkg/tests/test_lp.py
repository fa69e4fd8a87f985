import numpy as np
import pytest

import oracles
from maxminlp.generators import TorusParams, gen_random, gen_torus
from maxminlp.lp import (
    EmptyBeneficiaryError,
    INFEASIBLE,
    LinearProgram,
    OPTIMAL,
    UNBOUNDED,
    assemble_maxmin_lp,
    solve_deterministic,
    solve_maxmin,
)
from maxminlp.model import Instance


def lp(objective, rows, rhs, nonneg=None, variables=None):
    objective = np.asarray(objective, dtype=float)
    n = len(objective)
    return LinearProgram(
        variables=tuple(variables or (f"x{j}" for j in range(n))),
        objective=objective,
        row_coeffs=np.asarray(rows, dtype=float).reshape(-1, n),
        row_rhs=np.asarray(rhs, dtype=float),
        nonneg=tuple(nonneg if nonneg is not None else [True] * n),
    )


def test_assemble_epigraph_layout():
    inst = Instance(
        agents=(4, 7),
        resources={0: {4: 1.0, 7: 2.0}},
        beneficiaries={1: {4: 3.0}, 2: {7: 0.5}},
    )
    prog = assemble_maxmin_lp(inst)
    assert prog.variables == ("omega", "x4", "x7")
    assert prog.row_labels == ("resource:0", "beneficiary:1", "beneficiary:2")
    assert prog.row_coeffs.tolist() == [
        [0.0, 1.0, 2.0],
        [1.0, -3.0, 0.0],
        [1.0, 0.0, -0.5],
    ]
    assert prog.row_rhs.tolist() == [1.0, 0.0, 0.0]
    assert prog.objective.tolist() == [1.0, 0.0, 0.0]
    assert prog.nonneg == (False, True, True)


def test_assemble_requires_a_beneficiary():
    inst = Instance((0,), {0: {0: 1.0}}, {})
    with pytest.raises(EmptyBeneficiaryError):
        assemble_maxmin_lp(inst)


def test_bounded_basic_lp():
    # max x0 + x1 st x0 <= 2, x1 <= 3: corner at (2, 3)
    sol = solve_deterministic(lp([1, 1], [[1, 0], [0, 1]], [2, 3]))
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(5.0, abs=1e-9)
    assert sol.values == {"x0": pytest.approx(2.0), "x1": pytest.approx(3.0)}


def test_infeasible_lp_detected():
    # x0 <= -1 contradicts x0 >= 0
    sol = solve_deterministic(lp([1], [[1]], [-1]))
    assert sol.status == INFEASIBLE
    assert sol.objective is None


def test_unbounded_lp_detected():
    sol = solve_deterministic(lp([1, 0], [[0, 1]], [1]))
    assert sol.status == UNBOUNDED


def test_free_variable_can_go_negative():
    # minimise nothing, just force y = -2 via two inequalities
    sol = solve_deterministic(
        lp([0, -1], [[0, 1], [0, -1]], [-2, 2], nonneg=[True, False])
    )
    assert sol.status == OPTIMAL
    assert sol.values["x1"] == pytest.approx(-2.0)


def test_degenerate_ties_resolve_identically():
    # many rows active at the optimum; rerunning must replay the same pivots
    prog = lp([1, 1, 1], [[1, 1, 0], [0, 1, 1], [1, 0, 1], [1, 1, 1]], [1, 1, 1, 1])
    first = solve_deterministic(prog)
    for _ in range(3):
        again = solve_deterministic(prog)
        assert again.values == first.values
        assert again.objective == first.objective


def two_agent():
    return Instance((0, 1), {0: {0: 1.0, 1: 1.0}}, {1: {0: 1.0, 1: 1.0}})


def hexagon():
    # six agents around a ring, resources pairing them one way and benefit
    # rows the other way
    res = {0: {0: 1.0, 1: 1.0}, 1: {2: 1.0, 3: 1.0}, 2: {4: 1.0, 5: 1.0}}
    ben = {3: {1: 1.0, 2: 1.0}, 4: {3: 1.0, 4: 1.0}, 5: {5: 1.0, 0: 1.0}}
    return Instance(tuple(range(6)), res, ben)


def test_maxmin_on_shared_pair():
    x, omega = solve_maxmin(two_agent())
    assert omega == pytest.approx(1.0, abs=1e-9)
    assert sum(x.values.values()) == pytest.approx(1.0, abs=1e-9)


def test_maxmin_on_hexagon_ring():
    # every agent shares its resource with one neighbour and its benefit row
    # with the other, so activity 1/2 everywhere is feasible and the three
    # packing rows cap total activity at 3, forcing some benefit row to 1
    x, omega = solve_maxmin(hexagon())
    assert omega == pytest.approx(1.0, abs=1e-9)
    assert omega == pytest.approx(oracles.linprog_maxmin(hexagon()), abs=1e-7)


def test_maxmin_rejects_empty_beneficiaries():
    with pytest.raises(EmptyBeneficiaryError):
        solve_maxmin(Instance((0,), {0: {0: 1.0}}, {}))


@pytest.mark.parametrize("seed", range(30))
def test_maxmin_matches_reference_solver(seed):
    inst = gen_random(4 + seed % 9, 3, seed=seed)
    x, omega = solve_maxmin(inst)
    assert omega == pytest.approx(oracles.linprog_maxmin(inst), abs=1e-7)
    # and the reported point actually earns the reported objective
    for row in inst.resources.values():
        assert sum(a * x.values[v] for v, a in row.items()) <= 1.0 + 1e-9
    worst = min(
        sum(c * x.values[v] for v, c in row.items())
        for row in inst.beneficiaries.values()
    )
    assert worst == pytest.approx(omega, abs=1e-9)


@pytest.mark.parametrize("dim, side", [(1, 4), (1, 6), (2, 3), (2, 4)])
def test_uniform_torus_optimum_is_one(dim, side):
    x, omega = solve_maxmin(gen_torus(TorusParams(dim=dim, side=side)))
    assert omega == pytest.approx(1.0, abs=1e-9)


def test_benefit_scaling_scales_the_optimum_exactly():
    inst = gen_random(8, 3, seed=5)
    _, omega = solve_maxmin(inst)
    scaled = Instance(
        inst.agents,
        inst.resources,
        {k: {v: 4.0 * c for v, c in row.items()} for k, row in inst.beneficiaries.items()},
    )
    _, omega4 = solve_maxmin(scaled)
    # scaling by a power of two shifts exponents only: equality is exact
    assert omega4 == 4.0 * omega


@pytest.mark.parametrize("seed", range(10))
def test_resolve_is_bit_identical(seed):
    inst = gen_random(10, 3, seed=seed)
    a1, o1 = solve_maxmin(inst)
    a2, o2 = solve_maxmin(inst)
    assert o1 == o2
    assert a1.values == a2.values


def test_omega_never_negative():
    # beneficiary coefficients tiny, resources tight: optimum near zero but
    # the reported value must not dip below it
    inst = Instance((0,), {0: {0: 1.0}}, {1: {0: 1e-9}})
    _, omega = solve_maxmin(inst)
    assert omega >= 0.0
