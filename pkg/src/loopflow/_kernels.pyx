# cython: language_level=3, boundscheck=False, cdivision=True
"""Scalar per-pipe hydraulic kernels, compiled backend.

Twin of loopflow._kernels_py: same functions, same semantics, same
exceptions, evaluated in C doubles.  Keep the two files in sync.
"""

from libc.math cimport fabs, log10, pow, sqrt

RENOUARD_COEFF = 4810.0
RENOUARD_FLOW_EXP = 1.82
RENOUARD_DIAM_EXP = 4.82
LAMINAR_RE_LIMIT = 2300.0
TURBULENT_RE_LIMIT = 4000.0
COLEBROOK_TOL = 1e-12
COLEBROOK_MAX_ITER = 100

cdef double PI = 3.141592653589793

cdef double C_RENOUARD = 4810.0
cdef double FLOW_EXP = 1.82
cdef double DIAM_EXP = 4.82
cdef double RE_LAMINAR = 2300.0
cdef double RE_TURBULENT = 4000.0
cdef double FP_TOL = 1e-12
cdef int FP_MAX_ITER = 100


cdef inline int _check_pipe(double length, double diameter) except -1:
    if diameter <= 0.0:
        raise ValueError(f"pipe diameter must be > 0 m, got {diameter}")
    if length <= 0.0:
        raise ValueError(f"pipe length must be > 0 m, got {length}")
    return 0


cdef inline int _check_flow(double flow) except -1:
    if flow < 0.0:
        raise ValueError(f"flow magnitude must be >= 0 m3/s, got {flow}")
    return 0


cpdef double renouard_drop(double rel_density, double length, double flow,
                           double diameter) except? -1.0:
    """Gas pseudo-pressure drop p1² - p2² (Pa²) at flow magnitude `flow`."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (C_RENOUARD * rel_density * length
            * pow(flow, FLOW_EXP) / pow(diameter, DIAM_EXP))


cpdef double renouard_drop_dflow(double rel_density, double length,
                                 double flow, double diameter) except? -1.0:
    """Flow derivative of `renouard_drop` (Pa²·s/m³)."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (FLOW_EXP * C_RENOUARD * rel_density * length
            * pow(flow, FLOW_EXP - 1.0) / pow(diameter, DIAM_EXP))


cpdef double renouard_drop_ddiam(double rel_density, double length,
                                 double flow, double diameter) except? 1.0:
    """Diameter derivative of `renouard_drop` (Pa²/m); negative for flow > 0."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (-DIAM_EXP * C_RENOUARD * rel_density * length
            * pow(flow, FLOW_EXP) / pow(diameter, DIAM_EXP + 1.0))


cpdef double reynolds_number(double density, double viscosity, double flow,
                             double diameter) except? -1.0:
    """Reynolds number Re = 4·rho·Q / (pi·d·mu) of circular-pipe flow."""
    if viscosity <= 0.0:
        raise ValueError(f"viscosity must be > 0 Pa*s, got {viscosity}")
    if diameter <= 0.0:
        raise ValueError(f"pipe diameter must be > 0 m, got {diameter}")
    _check_flow(flow)
    return 4.0 * density * flow / (PI * diameter * viscosity)


cdef double _colebrook_turbulent(double reynolds, double rel_roughness) except? -1.0:
    cdef double x = 1.0 / sqrt(0.316 / pow(reynolds, 0.25))
    cdef double rough_term = rel_roughness / 3.71
    cdef double x_next
    cdef int i
    for i in range(FP_MAX_ITER):
        x_next = -2.0 * log10(2.51 * x / reynolds + rough_term)
        if fabs(x_next - x) <= FP_TOL:
            return 1.0 / (x_next * x_next)
        x = x_next
    raise RuntimeError(
        f"Colebrook iteration did not converge (Re={reynolds}, "
        f"rel_roughness={rel_roughness})")


cpdef double colebrook_friction_factor(double reynolds,
                                       double rel_roughness) except? -1.0:
    """Darcy friction factor from the implicit Colebrook-White relation.

    Fixed-point iteration on 1/sqrt(lam) in the turbulent regime; 64/Re
    below Re = 2300 with a linear blend up to Re = 4000.
    """
    cdef double lam_low, lam_high, t
    if reynolds <= 0.0:
        raise ValueError(f"Reynolds number must be > 0, got {reynolds}")
    if rel_roughness < 0.0:
        raise ValueError(f"relative roughness must be >= 0, got {rel_roughness}")
    if reynolds < RE_LAMINAR:
        return 64.0 / reynolds
    if reynolds < RE_TURBULENT:
        lam_low = 64.0 / RE_LAMINAR
        lam_high = _colebrook_turbulent(RE_TURBULENT, rel_roughness)
        t = (reynolds - RE_LAMINAR) / (RE_TURBULENT - RE_LAMINAR)
        return (1.0 - t) * lam_low + t * lam_high
    return _colebrook_turbulent(reynolds, rel_roughness)


cpdef double darcy_weisbach_drop(double friction_factor, double length,
                                 double flow, double diameter,
                                 double density) except? -1.0:
    """Liquid pressure drop (Pa): lam · L/d⁵ · 8·Q²/pi² · rho."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (friction_factor * length * 8.0 * flow * flow * density
            / (pow(diameter, 5) * PI * PI))


cpdef double darcy_weisbach_drop_dflow(double friction_factor, double length,
                                       double flow, double diameter,
                                       double density) except? -1.0:
    """Flow derivative of `darcy_weisbach_drop` (Pa·s/m³), friction factor
    held constant."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (friction_factor * length * 16.0 * flow * density
            / (pow(diameter, 5) * PI * PI))


cpdef double darcy_weisbach_drop_ddiam(double friction_factor, double length,
                                       double flow, double diameter,
                                       double density) except? 1.0:
    """Diameter derivative of `darcy_weisbach_drop` (Pa/m), friction factor
    held constant; negative for flow > 0."""
    _check_pipe(length, diameter)
    _check_flow(flow)
    return (-5.0 * 8.0 * density * friction_factor * length * flow * flow
            / (PI * PI * pow(diameter, 6)))


cpdef double flow_velocity(double pressure_ratio, double flow,
                           double diameter) except? -1.0:
    """Mean velocity (m/s) in a circular pipe: 4·ratio·Q / (d²·pi)."""
    if diameter <= 0.0:
        raise ValueError(f"pipe diameter must be > 0 m, got {diameter}")
    _check_flow(flow)
    return 4.0 * pressure_ratio * flow / (diameter * diameter * PI)
