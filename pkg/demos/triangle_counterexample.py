"""Region distances need not satisfy the triangle inequality.

Three l1 strips with weights 1, 2 and 3. Crossing the heavy strip directly
costs more than going around through an intermediate point.
"""
from lpregions.verify import triangle_violation_demo

rep = triangle_violation_demo()
print(f"D(s, t) = {rep.d_st:.6f}")
print(f"D(s, u) = {rep.d_su:.6f}")
print(f"D(u, t) = {rep.d_ut:.6f}")
print(f"D(s, u) + D(u, t) = {rep.d_su + rep.d_ut:.6f}; violated: {rep.violated}")
