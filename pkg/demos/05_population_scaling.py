"""The continuum limit of the scaling factors on a circle.

Solves the population (integral) version of the scaling equation by
quadrature and compares the solution rho_eps with the small-bandwidth
approximation q^(-1/2). The gap shrinks linearly with epsilon.
"""

import numpy as np

from dskernel import solve_population_scaling_1d, wrapped_normal_density

SIGMA_SQ = 0.16 * np.pi**2
density = lambda theta: wrapped_normal_density(theta, SIGMA_SQ)

print(f"{'eps':>8} {'max |rho - q^(-1/2)|':>22}")
previous = None
for eps in (0.1, 0.05, 0.025, 0.0125):
    ps = solve_population_scaling_1d(density, eps)
    q = density(ps.grid)
    err = np.abs(ps.rho - q**-0.5).max()
    note = "" if previous is None else f"  (ratio {previous / err:.2f} per halving)"
    print(f"{eps:>8} {err:>22.5f}{note}")
    previous = err
