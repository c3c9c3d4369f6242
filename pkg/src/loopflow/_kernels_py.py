"""Scalar per-pipe hydraulic kernels, pure-Python backend.

These functions are the hot inner loop of the network solvers: every
iteration of every method evaluates a pressure function and its derivative
for each pipe.  ``loopflow._kernels`` is the compiled twin with identical
signatures and semantics; ``loopflow.kernels`` selects whichever imports.

Units are strict SI throughout: flows in m³/s, lengths and diameters in m,
pressures in Pa (gas pressure functions are differences of squared
pressures, Pa²).
"""

import math

# Renouard relation for distribution-pressure natural gas:
#   p1² - p2² = 4810 · rho_r · L · Q^1.82 / d^4.82
RENOUARD_COEFF = 4810.0
RENOUARD_FLOW_EXP = 1.82
RENOUARD_DIAM_EXP = 4.82

# Friction-factor regimes: laminar below, Colebrook above, linear blend
# in between (solver iterates may transit low flows even when the final
# state is fully turbulent).
LAMINAR_RE_LIMIT = 2300.0
TURBULENT_RE_LIMIT = 4000.0

COLEBROOK_TOL = 1e-12
COLEBROOK_MAX_ITER = 100


def _check_pipe(length: float, diameter: float) -> None:
    if diameter <= 0.0:
        raise ValueError(f"pipe diameter must be > 0 m, got {diameter}")
    if length <= 0.0:
        raise ValueError(f"pipe length must be > 0 m, got {length}")


def _check_flow(flow: float) -> None:
    if flow < 0.0:
        raise ValueError(f"flow magnitude must be >= 0 m3/s, got {flow}")


def renouard_drop(rel_density: float, length: float, flow: float,
                  diameter: float) -> float:
    """Gas pseudo-pressure drop p1² - p2² (Pa²) at flow magnitude `flow`."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (RENOUARD_COEFF * rel_density * length
            * flow ** RENOUARD_FLOW_EXP / diameter ** RENOUARD_DIAM_EXP)


def renouard_drop_dflow(rel_density: float, length: float, flow: float,
                        diameter: float) -> float:
    """Flow derivative of `renouard_drop` (Pa²·s/m³)."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (RENOUARD_FLOW_EXP * RENOUARD_COEFF * rel_density * length
            * flow ** (RENOUARD_FLOW_EXP - 1.0)
            / diameter ** RENOUARD_DIAM_EXP)


def renouard_drop_ddiam(rel_density: float, length: float, flow: float,
                        diameter: float) -> float:
    """Diameter derivative of `renouard_drop` (Pa²/m); negative for flow > 0."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (-RENOUARD_DIAM_EXP * RENOUARD_COEFF * rel_density * length
            * flow ** RENOUARD_FLOW_EXP
            / diameter ** (RENOUARD_DIAM_EXP + 1.0))


def reynolds_number(density: float, viscosity: float, flow: float,
                    diameter: float) -> float:
    """Reynolds number Re = 4·rho·Q / (pi·d·mu) of circular-pipe flow."""
    if viscosity <= 0.0:
        raise ValueError(f"viscosity must be > 0 Pa*s, got {viscosity}")
    if diameter <= 0.0:
        raise ValueError(f"pipe diameter must be > 0 m, got {diameter}")
    _check_flow(flow)
    return 4.0 * density * flow / (math.pi * diameter * viscosity)


def colebrook_friction_factor(reynolds: float, rel_roughness: float) -> float:
    """Darcy friction factor from the implicit Colebrook-White relation.

    Solves 1/sqrt(lam) = -2·log10(2.51/(Re·sqrt(lam)) + rr/3.71) by fixed-
    point iteration on x = 1/sqrt(lam), which contracts rapidly for every
    turbulent input.  Below Re = 2300 the laminar value 64/Re is returned;
    between 2300 and 4000 the two regimes are blended linearly in Re.
    """
    if reynolds <= 0.0:
        raise ValueError(f"Reynolds number must be > 0, got {reynolds}")
    if rel_roughness < 0.0:
        raise ValueError(f"relative roughness must be >= 0, got {rel_roughness}")
    if reynolds < LAMINAR_RE_LIMIT:
        return 64.0 / reynolds
    if reynolds < TURBULENT_RE_LIMIT:
        lam_low = 64.0 / LAMINAR_RE_LIMIT
        lam_high = _colebrook_turbulent(TURBULENT_RE_LIMIT, rel_roughness)
        t = (reynolds - LAMINAR_RE_LIMIT) / (TURBULENT_RE_LIMIT - LAMINAR_RE_LIMIT)
        return (1.0 - t) * lam_low + t * lam_high
    return _colebrook_turbulent(reynolds, rel_roughness)


def _colebrook_turbulent(reynolds: float, rel_roughness: float) -> float:
    # Blasius smooth-pipe estimate seeds the iteration.
    x = 1.0 / math.sqrt(0.316 / reynolds ** 0.25)
    rough_term = rel_roughness / 3.71
    for _ in range(COLEBROOK_MAX_ITER):
        x_next = -2.0 * math.log10(2.51 * x / reynolds + rough_term)
        if abs(x_next - x) <= COLEBROOK_TOL:
            return 1.0 / (x_next * x_next)
        x = x_next
    raise RuntimeError(
        f"Colebrook iteration did not converge (Re={reynolds}, "
        f"rel_roughness={rel_roughness})")


def darcy_weisbach_drop(friction_factor: float, length: float, flow: float,
                        diameter: float, density: float) -> float:
    """Liquid pressure drop (Pa): lam · L/d⁵ · 8·Q²/pi² · rho."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (friction_factor * length * 8.0 * flow * flow * density
            / (diameter ** 5 * math.pi * math.pi))


def darcy_weisbach_drop_dflow(friction_factor: float, length: float,
                              flow: float, diameter: float,
                              density: float) -> float:
    """Flow derivative of `darcy_weisbach_drop` (Pa·s/m³), friction factor
    held constant."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (friction_factor * length * 16.0 * flow * density
            / (diameter ** 5 * math.pi * math.pi))


def darcy_weisbach_drop_ddiam(friction_factor: float, length: float,
                              flow: float, diameter: float,
                              density: float) -> float:
    """Diameter derivative of `darcy_weisbach_drop` (Pa/m), friction factor
    held constant; negative for flow > 0."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (-5.0 * 8.0 * density * friction_factor * length * flow * flow
            / (math.pi * math.pi * diameter ** 6))


def flow_velocity(pressure_ratio: float, flow: float, diameter: float) -> float:
    """Mean velocity (m/s) in a circular pipe: 4·ratio·Q / (d²·pi).

    `pressure_ratio` rescales a flow stated at normal (standard) pressure to
    the operating pressure (p_normal / p_operating for gas, 1 for liquids).
    """
    if diameter <= 0.0:
        raise ValueError(f"pipe diameter must be > 0 m, got {diameter}")
    _check_flow(flow)
    return 4.0 * pressure_ratio * flow / (diameter * diameter * math.pi)
