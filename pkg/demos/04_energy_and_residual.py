# coding: utf-8

# # Energy, generalized gradient and residual
#
# Solutions of Au in lambda alpha_k [g-(u_k), g+(u_k)] are exactly the points
# where the energy J(u) = u^T A u / 2 - lambda sum alpha_k G(u_k) has zero in
# its generalized gradient. The residual measures how far Au sits outside the
# box of allowed values, in the max norm.

# In[1]:

import numpy as np

from discrete_inclusions import (
    AsymptoticBound,
    InclusionProblem,
    SpdMatrix,
    certify,
    descent_direction,
    gradient_box,
    j_lambda,
    residual,
    truncated_power,
)

h = truncated_power(2, 1.0, AsymptoticBound(c=0.0, radius=1.0, linear=0.0))
p = InclusionProblem(SpdMatrix([[2.0]]), [h], 4.0)

# In one dimension the inclusion reads 2u in 4 [h-(u), h+(u)], so u = 0,
# u = 0.5 and u = 1 are solutions (the last one thanks to the jump).

# In[2]:

for u in (0.0, 0.3, 0.5, 1.0, 1.2):
    print(f"u={u}: J={j_lambda(p, [u]):+.5f}  box={gradient_box(p, [u])[0]}  residual={residual(p, [u]):.3g}")

# The descent direction is the point of the box closest to zero. At smooth
# points it is the ordinary gradient, which a central difference confirms.

# In[3]:

u, eps = 0.3, 1e-6
fd = (j_lambda(p, [u + eps]) - j_lambda(p, [u - eps])) / (2 * eps)
print(descent_direction(p, [u])[0], fd)

# certify bundles a candidate with its residual and energy and classifies it.

# In[4]:

for u in (0.0, 0.5, 1.0):
    print(certify(p, [u]))
