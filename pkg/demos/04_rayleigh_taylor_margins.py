"""Sweep of the Rayleigh-Taylor margins over the bottom pressure.

For flat interfaces the margins have closed forms; the sweep shows the
numeric monitor reproducing them and locating the sign changes that bound
the parabolic regime.  The lower margin is insensitive to the bottom
pressure when the viscosities match; the upper margin flips sign where
the prescribed pressure starts pushing the top interface outward fast
enough.
"""

import numpy as np

from muskatlab.evolution import rayleigh_taylor
from muskatlab.geometry import InterfacePair, constant_fn, make_grid
from muskatlab.operators import FluidParams

params = FluidParams(mu_minus=2.0, mu_plus=0.5)
grid = make_grid(16)
flat = InterfacePair(constant_fn(grid, 0.0), constant_fn(grid, 1.0), -1.0)

print(f"{'b':>6} {'margin_f':>10} {'margin_h':>10} {'closed_f':>10} {'closed_h':>10} {'parabolic':>10}")
for c in np.linspace(-6.0, 6.0, 9):
    rep = rayleigh_taylor(flat, constant_fn(grid, c), params, n_y=12)
    t = (params.g * params.rho_plus - c) / (params.mu_plus + params.mu_minus)
    closed_f = params.g * (params.rho_minus - params.rho_plus) \
        - (params.mu_minus - params.mu_plus) * t
    closed_h = params.g * params.rho_plus - params.mu_plus * t
    print(f"{c:>6.1f} {rep.margin_f:>10.4f} {rep.margin_h:>10.4f} "
          f"{closed_f:>10.4f} {closed_h:>10.4f} {str(rep.satisfied):>10}")
