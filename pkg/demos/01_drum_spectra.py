"""
Drum spectra from finite elements
=================================

Dirichlet eigenvalues of polygons, checked against the exact values for
the square and the disk, then the classic isospectral pair.
"""
#%%
import numpy as np

from hearshape.exact_spectra import disk_spectrum, rectangle_spectrum
from hearshape.mesh_fem import dirichlet_eigenvalues, triangulate
from hearshape.polygon import gww_pair, inscribed_polygon, make_rectangle

#%% The unit square: lambda = pi^2 (m^2 + n^2).
exact = rectangle_spectrum(1, 1, count=6).eigenvalues
for level in (3, 4, 5):
    fem = dirichlet_eigenvalues(make_rectangle(1, 1), 6, level, extrapolate=True).eigenvalues
    print(f"level {level}: max relative error {np.max(np.abs(fem / exact - 1)):.2e}")

#%% An inscribed 64-gon sits inside the unit disk, so its lambda_1 is a little larger.
lam = dirichlet_eigenvalues(inscribed_polygon(64), 1, 4, extrapolate=True).eigenvalues[0]
print(f"64-gon {lam:.5f}, disk {disk_spectrum(1, count=1)[0]:.5f}")

#%% Two non-congruent polygons that sound the same.
p1, p2 = gww_pair()
print("triangles per mesh at level 5:", len(triangulate(p1, 5).triangles))
a = dirichlet_eigenvalues(p1, 8, 5, extrapolate=True).eigenvalues
b = dirichlet_eigenvalues(p2, 8, 5, extrapolate=True).eigenvalues
for k, (x, y) in enumerate(zip(a, b), start=1):
    print(f"lambda_{k}: {x:9.4f} {y:9.4f}  rel diff {abs(x - y) / x:.1e}")
