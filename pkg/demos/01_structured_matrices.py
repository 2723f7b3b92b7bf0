# coding: utf-8

# # Structured matrices and their spectra
#
# The inclusions we study are driven by a symmetric positive definite matrix.
# Three families show up again and again: constant tridiagonal matrices
# (second-order differences), the pentadiagonal fourth-order stencil
# (6, -4, 1), and the five-point Laplacian on an m-by-n grid.

# In[1]:

import math

import numpy as np

from discrete_inclusions import (
    GridShape,
    build_fourth_order,
    build_grid_laplacian,
    build_second_order,
    build_tridiagonal,
    grid_index,
    ones_quadratic,
    spectrum,
)

# In[2]:

# The classical second-order difference matrix for T = 5.
A = build_second_order(5)
print(A.entries)

# Its eigenvalues come from a Jacobi sweep and agree with the closed form
# b + 2a cos(k pi / (T + 1)).

# In[3]:

ev = np.array(spectrum(A).eigenvalues)
closed = 2 - 2 * np.cos(np.arange(1, 6) * math.pi / 6)
print(ev)
print("max deviation from closed form:", np.max(np.abs(ev - closed)))

# The quantity 1^T A 1 enters every threshold below. For the fourth-order
# stencil it is 4 no matter how large T is, because the interior rows sum to zero.

# In[4]:

for T in (4, 9, 30):
    print(T, ones_quadratic(build_fourth_order(T)))

# A tridiagonal matrix is only accepted when it is positive definite, i.e.
# b > 2|a| cos(pi / (T + 1)).

# In[5]:

try:
    build_tridiagonal(2, -1.0, 0.5)
except ValueError as exc:
    print(type(exc).__name__, exc)

# Grid cells are numbered column by column, k = i + m (j - 1).

# In[6]:

shape = GridShape(3, 2)
B = build_grid_laplacian(shape)
print(B.entries.astype(int))
print("cell (2, 2) has index", grid_index(2, 2, shape))
print("1^T B 1 =", ones_quadratic(B), "= 2 (m + n)")
print("lambda_1 =", spectrum(B).lambda_min)
