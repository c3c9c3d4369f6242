"""Inverse problem: fix the flows, iterate pipe diameters to loop balance.

The loop corrections mirror the flow solvers, but the adjusted variable is
the diameter: per loop, correction = imbalance / sum of member |d drop /
d diameter|, applied to each member with its membership and flow signs and
clamped to the diameter bounds.  Since drops fall with growing diameter the
positive-imbalance loops get wider positive-side pipes, which is the Newton
step for this variable.

Pipes outside every loop are unconstrained by the loop equations and are
left at their input diameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fluids import make_fluid_model
from .kernels import darcy_weisbach_drop_ddiam, renouard_drop_ddiam  # noqa: F401  (re-exported surface)
from .model import FlowState, Network, NODE_BALANCE_TOL_M3S, PipeId, node_imbalances, validate
from .solvers import DEFAULT_RESIDUAL_TOLERANCE
from .topology import LoopBasis

DEFAULT_DIAMETER_BOUNDS = (0.01, 2.0)

CONVERGED = "converged"
MAX_ITERATIONS = "max-iterations"
INFEASIBLE_BOUNDS = "infeasible-bounds"


class SizingInfeasibleError(ValueError):
    """Inputs rule the sizing problem out before iteration starts."""


@dataclass
class SizingConfig:
    fixed_flows: FlowState
    diameter_bounds: tuple[float, float] | dict[PipeId, tuple[float, float]] = \
        DEFAULT_DIAMETER_BOUNDS
    residual_tolerance: float | None = None
    max_iterations: int = 200

    def bounds_for(self, pipe_id: PipeId) -> tuple[float, float]:
        if isinstance(self.diameter_bounds, dict):
            bounds = self.diameter_bounds[pipe_id]
        else:
            bounds = self.diameter_bounds
        lo, hi = bounds
        if not (0.0 < lo < hi):
            raise ValueError(
                f"diameter bounds for pipe {pipe_id} must satisfy 0 < lower "
                f"< upper, got ({lo}, {hi})")
        return lo, hi


@dataclass
class SizingReport:
    diameters: dict[PipeId, float]
    diameter_history: list[dict[PipeId, float]]
    loop_residual_history: list[list[float]]
    termination: str
    tree_pipes: set[PipeId] = field(default_factory=set)
    bounded_pipes: set[PipeId] = field(default_factory=set)

    @property
    def iteration_count(self) -> int:
        return len(self.diameter_history) - 1

    @property
    def max_residual(self) -> float:
        return max(self.loop_residual_history[-1], default=0.0)


def optimize_diameters(net: Network, basis: LoopBasis,
                       config: SizingConfig) -> SizingReport:
    """Adjust member-pipe diameters until every loop imbalance is below
    tolerance, never leaving the configured bounds.

    The fixed flows must balance every node and be nonzero on every pipe
    that belongs to a loop (a zero-flow pipe has zero diameter sensitivity).
    """
    violations = validate(net)
    if violations:
        raise ValueError("invalid network: " + "; ".join(violations))
    flows = config.fixed_flows
    worst_imbalance = max(abs(r) for r in node_imbalances(net, flows).values())
    if worst_imbalance > NODE_BALANCE_TOL_M3S:
        raise SizingInfeasibleError(
            f"fixed flows violate node balances by {worst_imbalance:.3e} m3/s")

    member_ids = {pid for loop in basis.loops for pid, _ in loop}
    for pid in sorted(member_ids):
        if flows.flows[pid] == 0.0:
            raise SizingInfeasibleError(
                f"pipe {pid} lies in a loop but carries zero fixed flow")
    tree_pipes = set(net.pipe_ids) - member_ids

    model = make_fluid_model(net.fluid)
    tolerance = (config.residual_tolerance
                 if config.residual_tolerance is not None
                 else DEFAULT_RESIDUAL_TOLERANCE[net.fluid.kind])
    pipes = {p.id: p for p in net.pipes}
    diameters = {p.id: p.diameter for p in net.pipes}
    bounds = {pid: config.bounds_for(pid) for pid in member_ids}
    # Sized pipes start inside their bounds; tree pipes keep the input value.
    for pid, (lo, hi) in bounds.items():
        diameters[pid] = min(max(diameters[pid], lo), hi)

    def loop_residuals(diam: dict[PipeId, float]) -> list[float]:
        out = []
        for loop in basis.loops:
            total = 0.0
            for pid, s in loop:
                q = flows.flows[pid]
                sign = -1.0 if q < 0.0 else 1.0
                total += s * sign * model.drop_at_diameter(pipes[pid], abs(q),
                                                           diam[pid])
            out.append(total)
        return out

    history = [dict(diameters)]
    residuals = loop_residuals(diameters)
    residual_history = [[abs(r) for r in residuals]]
    termination = MAX_ITERATIONS

    for _ in range(config.max_iterations):
        worst = max(residual_history[-1], default=0.0)
        if worst <= tolerance:
            termination = CONVERGED
            break

        deltas = []
        for k, loop in enumerate(basis.loops):
            denom = sum(abs(model.ddrop_ddiam(pipes[pid], abs(flows.flows[pid]),
                                              diameters[pid]))
                        for pid, _ in loop)
            deltas.append(0.0 if denom < 1e-30 else residuals[k] / denom)

        # Backtrack on overshoot: the drop grows steeply for shrinking
        # diameters, so a full multi-loop step can overshoot badly.
        scale = 1.0
        improved = False
        for _ in range(30):
            candidate = _apply(diameters, basis, flows, deltas, scale, bounds)
            cand_residuals = loop_residuals(candidate)
            if max(abs(r) for r in cand_residuals) < worst:
                improved = True
                break
            scale *= 0.5
        if not improved:
            break

        diameters = candidate
        residuals = cand_residuals
        history.append(dict(diameters))
        residual_history.append([abs(r) for r in residuals])
    else:
        termination = MAX_ITERATIONS

    if termination != CONVERGED and residual_history[-1] and \
            max(residual_history[-1]) <= tolerance:
        termination = CONVERGED

    bounded = {pid for pid in member_ids
               if diameters[pid] <= bounds[pid][0] or diameters[pid] >= bounds[pid][1]}
    if termination != CONVERGED and bounded:
        termination = INFEASIBLE_BOUNDS

    return SizingReport(
        diameters=diameters,
        diameter_history=history,
        loop_residual_history=residual_history,
        termination=termination,
        tree_pipes=tree_pipes,
        bounded_pipes=bounded,
    )


def _apply(diameters, basis: LoopBasis, flows: FlowState, deltas, scale,
           bounds) -> dict[PipeId, float]:
    new = dict(diameters)
    for k, loop in enumerate(basis.loops):
        for pid, s in loop:
            sign = -1.0 if flows.flows[pid] < 0.0 else 1.0
            new[pid] += s * sign * scale * deltas[k]
    for pid, (lo, hi) in bounds.items():
        new[pid] = min(max(new[pid], lo), hi)
    return new
