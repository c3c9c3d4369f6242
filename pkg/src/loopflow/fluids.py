"""Per-pipe pressure functions for the two supported fluids.

A `FluidModel` turns a pipe and a flow magnitude into the pressure function
used by the network equations: the squared-pressure (Renouard) drop for
distribution gas, the Colebrook/Darcy-Weisbach drop for water.  Solvers
only talk to this interface, so the two fluids share every solver path.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .model import GAS, WATER, FluidSpec, Pipe

# Residual units of the loop equations per fluid kind.
RESIDUAL_UNIT = {GAS: "Pa2", WATER: "Pa"}


@dataclass(frozen=True)
class PipeEval:
    """Pressure function and flow derivative of one pipe at one flow.

    `drop` is evaluated at the flow magnitude itself, `ddrop_dflow` at the
    magnitude floored away from zero (a zero derivative would zero out a
    loop row).  `friction_factor` and `reynolds` are water-only diagnostics.
    """
    drop: float
    ddrop_dflow: float
    friction_factor: float | None = None
    reynolds: float | None = None


class FluidModel:
    """Pressure-function evaluator; stateless and thread-safe."""

    kind: str

    def evaluate(self, pipe: Pipe, flow: float, dflow_floor: float) -> PipeEval:
        raise NotImplementedError

    def drop(self, pipe: Pipe, flow: float) -> float:
        raise NotImplementedError

    def ddrop_ddiam(self, pipe: Pipe, flow: float, diameter: float) -> float:
        """Diameter sensitivity of the drop at fixed flow (sizing problem)."""
        raise NotImplementedError

    def drop_at_diameter(self, pipe: Pipe, flow: float, diameter: float) -> float:
        raise NotImplementedError

    def velocity(self, pipe: Pipe, flow: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class GasModel(FluidModel):
    rel_density: float
    pressure_ratio: float
    kind: str = GAS

    def evaluate(self, pipe, flow, dflow_floor):
        floored = max(flow, dflow_floor)
        return PipeEval(
            drop=kernels.renouard_drop(self.rel_density, pipe.length, flow,
                                       pipe.diameter),
            ddrop_dflow=kernels.renouard_drop_dflow(
                self.rel_density, pipe.length, floored, pipe.diameter))

    def drop(self, pipe, flow):
        return kernels.renouard_drop(self.rel_density, pipe.length, flow,
                                     pipe.diameter)

    def drop_at_diameter(self, pipe, flow, diameter):
        return kernels.renouard_drop(self.rel_density, pipe.length, flow, diameter)

    def ddrop_ddiam(self, pipe, flow, diameter):
        return kernels.renouard_drop_ddiam(self.rel_density, pipe.length, flow,
                                           diameter)

    def velocity(self, pipe, flow):
        return kernels.flow_velocity(self.pressure_ratio, flow, pipe.diameter)


@dataclass(frozen=True)
class WaterModel(FluidModel):
    density: float
    viscosity: float
    kind: str = WATER

    def _friction_factor(self, flow: float, diameter: float,
                         roughness: float) -> tuple[float, float]:
        re = kernels.reynolds_number(self.density, self.viscosity, flow, diameter)
        return kernels.colebrook_friction_factor(re, roughness / diameter), re

    def evaluate(self, pipe, flow, dflow_floor):
        floored = max(flow, dflow_floor)
        lam_d, re_d = self._friction_factor(floored, pipe.diameter, pipe.roughness)
        ddrop = kernels.darcy_weisbach_drop_dflow(
            lam_d, pipe.length, floored, pipe.diameter, self.density)
        if flow == floored:
            lam, re = lam_d, re_d
        elif flow > 0.0:
            lam, re = self._friction_factor(flow, pipe.diameter, pipe.roughness)
        else:
            lam, re = lam_d, 0.0
        drop = (kernels.darcy_weisbach_drop(lam, pipe.length, flow,
                                            pipe.diameter, self.density)
                if flow > 0.0 else 0.0)
        return PipeEval(drop=drop, ddrop_dflow=ddrop, friction_factor=lam,
                        reynolds=re)

    def drop(self, pipe, flow):
        return self.drop_at_diameter(pipe, flow, pipe.diameter)

    def drop_at_diameter(self, pipe, flow, diameter):
        if flow <= 0.0:
            return 0.0
        lam, _ = self._friction_factor(flow, diameter, pipe.roughness)
        return kernels.darcy_weisbach_drop(lam, pipe.length, flow, diameter,
                                           self.density)

    def ddrop_ddiam(self, pipe, flow, diameter):
        # Friction factor frozen at the current state, as in the flow
        # derivative: only the explicit diameter dependence is followed.
        if flow <= 0.0:
            return 0.0
        lam, _ = self._friction_factor(flow, diameter, pipe.roughness)
        return kernels.darcy_weisbach_drop_ddiam(lam, pipe.length, flow,
                                                 diameter, self.density)

    def velocity(self, pipe, flow):
        return kernels.flow_velocity(1.0, flow, pipe.diameter)


def make_fluid_model(fluid: FluidSpec) -> FluidModel:
    if fluid.kind == GAS:
        return GasModel(rel_density=fluid.rel_density,
                        pressure_ratio=fluid.pressure_ratio)
    return WaterModel(density=fluid.density, viscosity=fluid.viscosity)
