"""
Hearing parallelograms and acute trapezoids
===========================================

Three heat invariants fix a parallelogram. A trapezoid with base angles
summing below pi/2 also needs the shortest closed billiard path, 2h.
"""
#%%
import math

from hearshape.heat_trace import geometric_heat_invariants
from hearshape.inverse_hearing import (
    find_isoinvariant_trapezoids, hear_acute_trapezoid, hear_parallelogram, trapezoid_invariants, uniqueness_scan,
)
from hearshape.polygon import ParallelogramParams, TrapezoidParams, congruent

#%% Parallelogram with sides 2 and 1 and angle pi/3 (a0 = 7/24).
truth = ParallelogramParams(2, 1, math.pi / 3)
inv = geometric_heat_invariants(truth.polygon())
got = hear_parallelogram(inv)
print(inv, "->", got, "congruent:", congruent(got.polygon(), truth.polygon(), 1e-9))

#%% Trapezoid: base 6, height 1, base angles pi/5 and pi/10.
t = TrapezoidParams.from_base(6, 1, math.pi / 5, math.pi / 10)
inv, geodesic = trapezoid_invariants(t)
got = hear_acute_trapezoid(inv, geodesic)
print(got, "congruent:", congruent(got.polygon(), t.polygon(), 1e-7))

#%% Uniqueness of the angle solution rests on u < 0 and u'' > 0 on (0, pi/2).
print(uniqueness_scan(10_000).to_dict())

#%% Without the geodesic, (A, P, a0) alone do not decide the trapezoid.
t1, t2, mismatch = find_isoinvariant_trapezoids(t)
print("heights", t1.h, t2.h, "invariant mismatch", mismatch)
print("congruent:", congruent(t1.polygon(), t2.polygon(), 1e-6))
