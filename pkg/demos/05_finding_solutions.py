# coding: utf-8

# # Finding all the solutions
#
# Minima come from nonsmooth descent started at many points. Saddles, which
# descent never reaches, come from a mountain pass: a string of points joining
# two minima is relaxed until its highest node sits on the saddle.

# In[1]:

import numpy as np

from discrete_inclusions import (
    AsymptoticBound,
    InclusionProblem,
    SolveConfig,
    SpdMatrix,
    brute_force_oracle,
    build_second_order,
    find_multiplicity,
    minimize_from,
    mountain_pass,
    multistart,
    shared,
    truncated_power,
)

h = truncated_power(2, 1.0, AsymptoticBound(c=0.0, radius=1.0, linear=0.0))
scalar = InclusionProblem(SpdMatrix([[2.0]]), [h], 4.0)
cfg = SolveConfig(seed=0)

# Descent from 0.4 falls back to 0; from 0.6 it reaches the jump at 1.

# In[2]:

print(minimize_from(scalar, [0.4], cfg).u, minimize_from(scalar, [0.6], cfg).u)
print(sorted(s.u[0] for s in multistart(scalar, cfg, delta=1.0).solutions))

# The mountain pass between the two minima recovers the middle solution.

# In[3]:

saddle = mountain_pass(scalar, [0.0], [1.0], cfg)
print(saddle.u, saddle.kind, saddle.residual)

# find_multiplicity runs both and checks the count the theory promises.

# In[4]:

report = find_multiplicity(scalar, cfg, "theorem31", delta=1.0)
for s in report.solutions:
    print(s.kind, s.u, s.residual)
print("claims met:", report.claims_met)

# For T <= 3 a lattice scan gives an independent answer to compare against.

# In[5]:

p2 = InclusionProblem(build_second_order(2), shared(h, 2), 2.0)
solver = sorted(tuple(round(x, 6) for x in s.u) for s in find_multiplicity(p2, cfg, "corollary32", delta=1.0).solutions)
oracle = sorted(tuple(round(x, 6) for x in s.u) for s in brute_force_oracle(p2, 3.0, 301))
print(solver)
print(oracle)
