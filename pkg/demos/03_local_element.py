"""
The local element on one polygon
================================

The whole method sits in a few small matrices per cell. D carries the
vertex values of the scaled monomials {1, (x-xc)/h, (y-yc)/h}; B
carries the boundary integrals that define the gradient projector.
Their product G = B D is the projector's Gram matrix, Pi_star = G^-1 B
maps vertex values to polynomial coefficients, and the stiffness is a
consistency part plus a stabilization on the projector's kernel.
"""

import numpy as np

from polyvem.element import build_element, consistency_check
from polyvem.geometry import cell_geometry
from polyvem.linalg import dense_sym_eigen

pentagon = np.array(
    [[0.0, 0.0], [3.0, 0.0], [3.0, 2.0], [1.5, 3.5], [0.0, 2.0]])
geom = cell_geometry(pentagon)
el = build_element(geom)

np.set_printoptions(precision=4, suppress=True)
print("D (vertex values of the monomials):\n", el.D)
print("\nG = B D:\n", el.G)
print("\nK (local stiffness):\n", el.K)

# projector identities: Pi_star reproduces polynomial data exactly,
# and Pi = D Pi_star is idempotent
print("\n|Pi_star D - I| =", np.abs(el.Pi_star @ el.D - np.eye(3)).max())
print("|Pi^2 - Pi|     =", np.abs(el.Pi @ el.Pi - el.Pi).max())

# rank structure: the consistency part alone has rank 2 on any
# polygon, the stabilization lifts it to N-1 (constants stay free)
k_c = el.Pi_star.T @ el.G_tilde @ el.Pi_star
print("\neigenvalues of K_c:", dense_sym_eigen(k_c))
print("eigenvalues of K:  ", dense_sym_eigen(el.K))
print("K applied to constants:", el.K @ np.ones(len(pentagon)))

# applying K to linear vertex data reproduces boundary integrals
# no matter how the kernel is stabilized
print("\nconsistency residual:", consistency_check(el.K, el.D, el.B))

# the stabilization scaling is selectable; "trace" mimics the size of
# the consistency part instead of using 1
el_trace = build_element(geom, nu_policy="trace")
print("nu (unit policy): ", el.nu)
print("nu (trace policy):", el_trace.nu)
