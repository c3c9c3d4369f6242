"""The three iterative flow solvers plus node-pressure back-propagation.

All three methods iterate on signed pipe flows until two successive
iterations agree everywhere within the configured flow tolerance:

* node-loop: continuity rows and linearized loop rows stacked into one
  square system, solved directly for all flows each pass;
* hardy-cross: one independent correction per loop each pass;
* hardy-cross-improved: all loop corrections solved simultaneously through
  the loop Jacobian.

Signs are handled uniformly: flows are signed against each pipe's reference
orientation and loop membership signs come from the basis matrix, which
replaces the traditional hand bookkeeping of correction directions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .fluids import FluidModel, PipeEval, make_fluid_model
from .model import (
    GAS,
    WATER,
    FlowState,
    Network,
    NodeId,
    PipeId,
    SolveReport,
    feasible_initial_flows,
    m3h_to_m3s,
    validate,
)
from .numerics import DenseSystem, SingularSystemError, condition_estimate, solve_linear
from .topology import LoopBasis, NodeMatrix, adopt_explicit_loops, build_node_matrix, derive_loop_basis

NODE_LOOP = "node-loop"
HARDY_CROSS = "hardy-cross"
HARDY_CROSS_IMPROVED = "hardy-cross-improved"
METHODS = (NODE_LOOP, HARDY_CROSS, HARDY_CROSS_IMPROVED)

# Loop-imbalance tolerance at convergence: Pa² for gas, Pa for water.
DEFAULT_RESIDUAL_TOLERANCE = {GAS: 1e3, WATER: 1.0}

# A damped pass is triggered when an iterate inflates the worst loop
# residual by more than this factor (only with SolverConfig.damping).
DAMPING_TRIGGER = 10.0


log = logging.getLogger(__name__)


class InfeasiblePressureError(ValueError):
    """Gas pressure propagation hit a negative squared pressure."""


@dataclass
class SolverConfig:
    method: str = NODE_LOOP
    flow_tolerance_m3h: float = 0.01
    residual_tolerance: float | None = None   # default picked per fluid
    max_iterations: int = 50
    derivative_flow_floor: float = 1e-7       # m³/s
    damping: bool = False

    def resolved_residual_tolerance(self, fluid_kind: str) -> float:
        if self.residual_tolerance is not None:
            return self.residual_tolerance
        return DEFAULT_RESIDUAL_TOLERANCE[fluid_kind]


@dataclass
class LoopEval:
    """Signed loop imbalances and member derivative magnitudes, one state."""
    residuals: list[float]
    member_dflow: list[dict[PipeId, float]]

    def abs_residuals(self) -> list[float]:
        return [abs(r) for r in self.residuals]


def select_basis(net: Network) -> LoopBasis:
    """Explicit loops win over derived ones when the file carries them."""
    if net.explicit_loops:
        return adopt_explicit_loops(net)
    return derive_loop_basis(net)


def _sign(value: float) -> float:
    return -1.0 if value < 0.0 else 1.0


def _pipe_evals(net: Network, model: FluidModel, flows: FlowState,
                floor: float) -> dict[PipeId, PipeEval]:
    return {p.id: model.evaluate(p, abs(flows.flows[p.id]), floor)
            for p in net.pipes}


def evaluate_loops(net: Network, basis: LoopBasis, flows: FlowState,
                   derivative_flow_floor: float = 1e-7,
                   model: FluidModel | None = None,
                   evals: dict[PipeId, PipeEval] | None = None) -> LoopEval:
    """Loop imbalances at the given state.

    Per loop: sum of sign(membership)·sign(flow)·drop(|flow|) over member
    pipes, plus each member's |d drop/d flow| evaluated away from zero flow.
    """
    if model is None:
        model = make_fluid_model(net.fluid)
    if evals is None:
        evals = _pipe_evals(net, model, flows, derivative_flow_floor)
    residuals = []
    member_dflow = []
    for loop in basis.loops:
        total = 0.0
        dflow: dict[PipeId, float] = {}
        for pid, s in loop:
            q = flows.flows[pid]
            total += s * _sign(q) * evals[pid].drop
            dflow[pid] = evals[pid].ddrop_dflow
        residuals.append(total)
        member_dflow.append(dflow)
    return LoopEval(residuals, member_dflow)


def assemble_node_loop_system(net: Network, node_matrix: NodeMatrix,
                              basis: LoopBasis, flows: FlowState,
                              loop_eval: LoopEval) -> DenseSystem:
    """Stack continuity rows over linearized loop rows.

    Top block: node matrix with the node demands (m³/s, supply negative) as
    right-hand side.  Bottom block, one row per loop: membership sign times
    |d drop/d flow| per pipe, with right-hand side
    -imbalance + sum(sign·flow·|d drop/d flow|), the first-order expansion
    of the loop equation around the current flows.
    """
    n_nodes, n_pipes = node_matrix.entries.shape
    n_loops = len(basis)
    if n_nodes + n_loops != n_pipes:
        raise ValueError(
            f"dimension mismatch: {n_nodes} node rows + {n_loops} loop rows "
            f"!= {n_pipes} pipe unknowns")
    col = {pid: j for j, pid in enumerate(node_matrix.col_pipes)}

    matrix = np.zeros((n_pipes, n_pipes))
    rhs = np.zeros(n_pipes)
    matrix[:n_nodes] = node_matrix.entries
    demand = {n.id: m3h_to_m3s(n.demand_m3h) for n in net.nodes}
    for i, node in enumerate(node_matrix.row_nodes):
        rhs[i] = demand[node]

    for k, loop in enumerate(basis.loops):
        row = n_nodes + k
        rhs[row] = -loop_eval.residuals[k]
        for pid, s in loop:
            d = loop_eval.member_dflow[k][pid]
            matrix[row, col[pid]] = s * d
            rhs[row] += s * flows.flows[pid] * d
    return DenseSystem(matrix, rhs)


def _initial_state(net: Network, initial: FlowState | None) -> FlowState:
    if initial is not None:
        return FlowState(dict(initial.flows))
    if net.initial_flows_m3h is not None:
        return FlowState({pid: m3h_to_m3s(q)
                          for pid, q in net.initial_flows_m3h.items()})
    return feasible_initial_flows(net, seed=0)


def solve(net: Network, config: SolverConfig | None = None,
          initial: FlowState | None = None) -> SolveReport:
    """Run the solver selected by `config.method`."""
    config = config or SolverConfig()
    if config.method == NODE_LOOP:
        return solve_node_loop(net, config, initial)
    if config.method == HARDY_CROSS:
        return solve_hardy_cross_original(net, config, initial)
    if config.method == HARDY_CROSS_IMPROVED:
        return solve_hardy_cross_improved(net, config, initial)
    raise ValueError(f"unknown method {config.method!r}; expected one of {METHODS}")


def solve_node_loop(net: Network, config: SolverConfig | None = None,
                    initial: FlowState | None = None) -> SolveReport:
    """Direct flow calculation: each pass solves for all pipe flows at once."""
    logged_condition = False

    def step(flows: FlowState, loop_eval: LoopEval,
             ctx: _RunContext) -> FlowState:
        nonlocal logged_condition
        system = assemble_node_loop_system(net, ctx.node_matrix, ctx.basis,
                                           flows, loop_eval)
        if not logged_condition and log.isEnabledFor(logging.DEBUG):
            log.debug("stacked system 1-norm condition estimate: %.3g",
                      condition_estimate(system))
            logged_condition = True
        x = solve_linear(system)
        return FlowState({pid: x[j] for j, pid in enumerate(ctx.node_matrix.col_pipes)})

    return _iterate(net, config or SolverConfig(), initial, NODE_LOOP, step)


def solve_hardy_cross_original(net: Network, config: SolverConfig | None = None,
                               initial: FlowState | None = None) -> SolveReport:
    """One independent flow correction per loop per pass.

    Loop correction = -imbalance / sum of member |d drop/d flow|; every
    member pipe receives each containing loop's correction with its
    membership sign, which preserves the node balances exactly.
    """

    def step(flows: FlowState, loop_eval: LoopEval,
             ctx: _RunContext) -> FlowState:
        deltas = []
        for k in range(len(ctx.basis)):
            denom = sum(loop_eval.member_dflow[k].values())
            deltas.append(0.0 if denom < 1e-30
                          else -loop_eval.residuals[k] / denom)
        return _apply_corrections(flows, ctx.basis, deltas)

    return _iterate(net, config or SolverConfig(), initial, HARDY_CROSS, step)


def solve_hardy_cross_improved(net: Network, config: SolverConfig | None = None,
                               initial: FlowState | None = None) -> SolveReport:
    """All loop corrections solved simultaneously through the loop Jacobian.

    J[l,l] = sum of member |d drop/d flow|; J[l,m] couples loops l and m
    through their shared pipes with the product of membership signs.
    """

    def step(flows: FlowState, loop_eval: LoopEval,
             ctx: _RunContext) -> FlowState:
        n = len(ctx.basis)
        jac = np.zeros((n, n))
        signs = [dict(loop) for loop in ctx.basis.loops]
        for l in range(n):
            jac[l, l] = sum(loop_eval.member_dflow[l].values())
            for m in range(l + 1, n):
                coupling = 0.0
                for pid, s in ctx.basis.loops[l]:
                    if pid in signs[m]:
                        coupling += s * signs[m][pid] * loop_eval.member_dflow[l][pid]
                jac[l, m] = jac[m, l] = coupling
        deltas = solve_linear(DenseSystem(jac, [-r for r in loop_eval.residuals]))
        return _apply_corrections(flows, ctx.basis, list(deltas))

    return _iterate(net, config or SolverConfig(), initial,
                    HARDY_CROSS_IMPROVED, step)


def _apply_corrections(flows: FlowState, basis: LoopBasis,
                       deltas: list[float]) -> FlowState:
    new = dict(flows.flows)
    for k, loop in enumerate(basis.loops):
        for pid, s in loop:
            new[pid] += s * deltas[k]
    return FlowState(new)


@dataclass
class _RunContext:
    model: FluidModel
    basis: LoopBasis
    node_matrix: NodeMatrix
    config: SolverConfig


def _iterate(net: Network, config: SolverConfig, initial: FlowState | None,
             method: str, step) -> SolveReport:
    violations = validate(net)
    if violations:
        raise ValueError("invalid network: " + "; ".join(violations))

    ctx = _RunContext(model=make_fluid_model(net.fluid),
                      basis=select_basis(net),
                      node_matrix=build_node_matrix(net),
                      config=config)
    flows = _initial_state(net, initial)
    residual_tol = config.resolved_residual_tolerance(net.fluid.kind)

    loop_eval = evaluate_loops(net, ctx.basis, flows,
                               config.derivative_flow_floor, model=ctx.model)
    iterations = [flows]
    residual_history = [loop_eval.abs_residuals()]
    damped: list[int] = []
    termination = "max-iterations"

    while len(iterations) - 1 < config.max_iterations:
        current = iterations[-1]
        try:
            candidate = step(current, loop_eval, ctx)
        except SingularSystemError:
            termination = "singular-system"
            break
        candidate_eval = evaluate_loops(net, ctx.basis, candidate,
                                        config.derivative_flow_floor,
                                        model=ctx.model)
        if config.damping:
            candidate, candidate_eval = _maybe_damp(
                net, ctx, current, candidate, loop_eval, candidate_eval,
                config, damped, len(iterations))
        iterations.append(candidate)
        residual_history.append(candidate_eval.abs_residuals())
        loop_eval = candidate_eval
        # Converged when successive flows agree everywhere and the loop
        # imbalances are below tolerance (the flow criterion alone can fire
        # while single-adjustment corrections still carry real imbalance).
        if candidate.max_change_m3h(current) <= config.flow_tolerance_m3h \
                and max(loop_eval.abs_residuals(), default=0.0) <= residual_tol:
            termination = "converged"
            break

    return SolveReport(
        method=method,
        iterations=iterations,
        loop_residuals=residual_history,
        termination=termination,
        velocities=final_velocities(net, iterations[-1]),
        damped_iterations=damped,
    )


def _maybe_damp(net: Network, ctx: _RunContext, current: FlowState,
                candidate: FlowState, before_eval: LoopEval,
                after_eval: LoopEval, config: SolverConfig,
                damped: list[int], iteration: int) -> tuple[FlowState, LoopEval]:
    before = max(before_eval.abs_residuals(), default=0.0)
    after = max(after_eval.abs_residuals(), default=0.0)
    if before > 0.0 and after > DAMPING_TRIGGER * before:
        damped.append(iteration)
        halved = FlowState({pid: 0.5 * (current.flows[pid] + candidate.flows[pid])
                            for pid in current.flows})
        halved_eval = evaluate_loops(net, ctx.basis, halved,
                                     config.derivative_flow_floor,
                                     model=ctx.model)
        return halved, halved_eval
    return candidate, after_eval


def final_velocities(net: Network, flows: FlowState) -> dict[PipeId, float]:
    model = make_fluid_model(net.fluid)
    return {p.id: model.velocity(p, abs(flows.flows[p.id])) for p in net.pipes}


def propagate_pressures(net: Network, flows: FlowState, source_node: NodeId,
                        source_pressure: float) -> dict[NodeId, float]:
    """Node pressures (Pa absolute) from one known source pressure.

    Breadth-first walk from the source, expanding neighbours in ascending
    node-id order; pressure falls along the local flow direction.  Gas
    networks propagate squared pressures (the Renouard drop is a difference
    of squared pressures) and fail if one would go negative.
    """
    if source_pressure <= 0.0:
        raise ValueError("source pressure must be > 0 Pa")
    model = make_fluid_model(net.fluid)
    squared = net.fluid.kind == GAS
    incident = net.incident_pipes()

    potentials = {source_node: source_pressure ** 2 if squared else source_pressure}
    queue = [source_node]
    while queue:
        node = queue.pop(0)
        neighbours = []
        for p in incident[node]:
            other = p.to_node if p.from_node == node else p.from_node
            neighbours.append((str(other), p.id, other, p))
        for _, _, other, p in sorted(neighbours, key=lambda t: (t[0], t[1])):
            if other in potentials:
                continue
            q = flows.flows[p.id]
            drop = model.drop(p, abs(q))
            leaving = (q >= 0.0) == (p.from_node == node)
            value = potentials[node] - drop if leaving else potentials[node] + drop
            if squared and value < 0.0:
                raise InfeasiblePressureError(
                    f"negative squared pressure at node {other!r}: the network "
                    f"is infeasible at source pressure {source_pressure:g} Pa")
            potentials[other] = value
            queue.append(other)

    if squared:
        return {nid: math.sqrt(v) for nid, v in potentials.items()}
    return potentials
