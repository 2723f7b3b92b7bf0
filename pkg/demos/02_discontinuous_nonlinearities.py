# coding: utf-8

# # Discontinuous nonlinearities
#
# A nonlinearity is a piecewise polynomial with finitely many breakpoints.
# At a jump the inclusion replaces the single value g(t) by the interval
# between the lower and upper envelopes. The running example is the
# truncated square h(t) = t^2 on |t| < 1 and 0 outside.

# In[1]:

import numpy as np

from discrete_inclusions import (
    AsymptoticBound,
    PiecewiseNonlinearity,
    envelope_minus,
    envelope_plus,
    potential,
    sup_potential,
    truncated_power,
    value_range,
)

h = truncated_power(2, 1.0, AsymptoticBound(c=0.0, radius=1.0, linear=0.0))

# In[2]:

for t in (-1.0, 0.5, 1.0, 2.0):
    print(f"t={t:5}: h={h(t):5}  envelope=[{envelope_minus(h, t)}, {envelope_plus(h, t)}]")

# The potential G(t) is the integral of g from 0. It is continuous even where
# g jumps, and for polynomial pieces it is exact.

# In[3]:

ts = np.linspace(-2, 2, 9)
print(np.round(potential(h, ts), 6))
print("exact G(1) =", h.potential_exact(1.0))

# sup G over [-gamma, gamma] is found from the critical points of each piece,
# the breakpoints and the ends of the interval. No sampling is involved.

# In[4]:

two_step = PiecewiseNonlinearity((0.0, 1.0), ((-1.0,), (1.0,), (-0.5,)))
for gamma in (0.5, 1.0, 3.0):
    xs = np.linspace(-gamma, gamma, 200001)
    print(gamma, sup_potential(two_step, gamma), np.max(two_step.potential(xs)))

# value_range reports the smallest interval holding all envelope values on [lo, hi].

# In[5]:

print(value_range(h, 0.9, 1.1))
print(value_range(two_step, -1.0, 2.0))
