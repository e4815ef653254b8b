"""
Fundamental gap of thin triangles
=================================

For triangles of width 1 and growing length d, lambda_2 - lambda_1
shrinks. The upper bound decays like d^(-2/3); the observed rate is faster.
"""
#%%
import numpy as np

from hearshape.mesh_fem import dirichlet_eigenvalues
from hearshape.polygon import thin_triangle

#%%
ds = np.array([4.0, 8.0, 16.0, 32.0])
gaps = []
for d in ds:
    lam = dirichlet_eigenvalues(thin_triangle(1, d), 2, 5, extrapolate=True).eigenvalues
    gaps.append(lam[1] - lam[0])
    print(f"d={d:4.0f} lambda_1={lam[0]:.4f} lambda_2={lam[1]:.4f} gap={gaps[-1]:.4f} "
          f"gap*d^(2/3)={gaps[-1] * d ** (2 / 3):.3f}")
print("log-log slope:", np.polyfit(np.log(ds), np.log(gaps), 1)[0])
