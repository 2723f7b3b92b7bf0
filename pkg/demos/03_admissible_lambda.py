# coding: utf-8

# # Which lambda give several solutions?
#
# Two sets of growth conditions on the potentials yield explicit ranges of the
# parameter lambda. With a small-gamma condition and a large-delta condition
# we get an open interval (three solutions). With conditions on h near zero
# and at infinity we get a half line (two nontrivial solutions).

# In[1]:

from discrete_inclusions import (
    AsymptoticBound,
    GridShape,
    WeightVector,
    build_second_order,
    check_g1,
    check_h_conditions,
    shared,
    specialize_grid,
    specialize_fourth_order_h,
    truncated_power,
)

h = truncated_power(2, 1.0, AsymptoticBound(c=0.0, radius=1.0, linear=0.0))

# For the second-order matrix with T = 5 and h everywhere, gamma = 0.01 and
# delta = 1 leave a wide interval.

# In[2]:

A = build_second_order(5)
r = check_g1(A, shared(h, 5), gamma=0.01, delta=1.0)
print("satisfied:", r.satisfied)
print("lambda interval:", r.lambda_interval)

# Increasing gamma eventually breaks the first condition and the interval closes.

# In[3]:

for gamma in (0.01, 0.1, 0.3, 0.6):
    r = check_g1(A, shared(h, 5), gamma=gamma, delta=1.0)
    print(f"gamma={gamma:4}: satisfied={r.satisfied}  interval={r.lambda_interval}")

# The half-line threshold is computed in exact rational arithmetic, so the
# value for this example is exactly 0.6.

# In[4]:

c = check_h_conditions(h, WeightVector.ones(5), A, delta=1.0)
print(c.threshold, c.satisfied, "optimized:", c.optimized_threshold, "at delta", c.optimal_delta)

# The grid and fourth-order specializations reuse the same machinery.

# In[5]:

print(specialize_grid(GridShape(2, 2), shared(h, 4), 0.01, 1.0).lambda_interval)
print(specialize_fourth_order_h(9, h, 1.0).threshold)
