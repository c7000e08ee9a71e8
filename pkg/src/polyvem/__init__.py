"""Virtual element Poisson solver on general polygonal meshes.

Lowest-order conforming virtual elements with one degree of freedom per
vertex, a harmonic finite element reference for verifying local matrices,
and a convergence study driver.
"""

__version__ = "0.1.0"
