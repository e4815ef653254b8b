"""
The best n-gon
==============

Among n-gons, area / perimeter^2 is largest for the regular one. Steiner
moves, edge translations and gradient steps climb there from any convex
seed.
"""
#%%
import numpy as np

from hearshape.isoperimetric import MaximizeOptions, f_first_variation, maximize_f
from hearshape.polygon import make_regular_ngon, random_convex_polygon, regular_shape_functional

#%% The first variation vanishes on regular polygons.
print(max(abs(f_first_variation(make_regular_ngon(7), i)) for i in range(7)))

#%% Climb from random seeds.
rng = np.random.default_rng(1)
for n in range(3, 9):
    res = maximize_f(n, random_convex_polygon(n, rng), MaximizeOptions(record_steps=True))
    kinds = {k: sum(s.kind == k for s in res.steps) for k in {s.kind for s in res.steps}}
    print(f"n={n}: f={res.f:.12f} target={regular_shape_functional(n):.12f} "
          f"iterations={res.iterations} residual={res.stationarity_residual:.1e} moves={kinds}")

#%% The trajectory is a small CSV table.
print(res.trajectory_csv().splitlines()[:4])
