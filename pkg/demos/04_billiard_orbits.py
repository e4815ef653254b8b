"""
Shortest closed billiard paths in trapezoids
============================================

In an acute trapezoid the bouncing ball between the parallel sides, of
length 2h, is the shortest closed path. Three-bounce orbits are searched
and certified by their reflection defects.
"""
#%%
import math

from hearshape.billiards import (
    bouncing_ball_orbit, search_triangular_orbits, shortest_closed_geodesic, triangular_orbit_candidates,
)
from hearshape.polygon import TrapezoidParams

#%% Acute example: no triangular orbit beats 2h.
t = TrapezoidParams.from_base(6, 1, math.pi / 5, math.pi / 10)
print(bouncing_ball_orbit(t).to_json())
print("triangular orbit shorter than 2h:", search_triangular_orbits(t))
print("shortest:", shortest_closed_geodesic(t)[0])

#%% Outside the class (alpha + beta > pi/2) a genuine 3-bounce orbit appears.
wide = TrapezoidParams.from_base(3, 2, 1.2, 1.2)
for cand in triangular_orbit_candidates(wide):
    if cand.admissible:
        print(cand.sides, round(cand.length, 4), "vs 2h =", 2 * wide.h, "defects", max(cand.reflection_defects))
