"""
What the heat trace hears
=========================

Area, perimeter and the corner constant a0 are read off the small-t
behaviour of sum exp(-lambda t).
"""
#%%
import numpy as np

from hearshape.exact_spectra import rectangle_spectrum
from hearshape.heat_trace import default_t_grid, fit_heat_invariants, geometric_heat_invariants, heat_trace_table
from hearshape.mesh_fem import dirichlet_eigenvalues
from hearshape.polygon import make_rectangle

#%% Exact spectrum of a 1 x 2 rectangle up to lambda = 1e6.
s = rectangle_spectrum(1, 2, ceiling=1e6)
print(len(s), "eigenvalues")
grid, bounds = default_t_grid(s)
print(heat_trace_table(s, grid[::6]))
inv, resid = fit_heat_invariants(s, grid)
print("fitted:", inv, "residual", resid)
print("truth: ", geometric_heat_invariants(make_rectangle(1, 2)))

#%% A few hundred FEM eigenvalues are not enough for the automatic window.
fem = dirichlet_eigenvalues(make_rectangle(1, 2), 300, 5, extrapolate=True).spectrum
grid, _ = default_t_grid(fem)
try:
    print("FEM, automatic window:", fit_heat_invariants(fem, grid)[0])
except ValueError as exc:
    print("FEM, automatic window rejected:", exc)
print("FEM, window [0.01, 0.1]:", fit_heat_invariants(fem, np.logspace(-2, -1, 24))[0])
