# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Step functions and the three decreasing projections
#
# Everything in `couples` works on exact step functions: rational breakpoints,
# rational values and a constant tail. This notebook builds the two test
# functions used throughout, `b = chi[1,3)` and `g = 2 chi[0,1) + chi[1,3)`,
# and compares the decreasing rearrangement, the least decreasing majorant and
# the level function.

# %%
from fractions import Fraction

from couples.constructions import least_decreasing_majorant, level_function
from couples.core import StepFunction, primitive, rearrange

b = StepFunction.indicator(1, 3)
g = StepFunction.indicator(0, 1, 2) + b
b, g

# %% [markdown]
# For `b` the three projections differ. The rearrangement keeps the mass
# (support length 2), the majorant fills in everything to the left, and the
# level function spreads the mass evenly over `[0, 3)`.

# %%
for name, op in [("f*", rearrange), ("f~", least_decreasing_majorant), ("f°", level_function)]:
    print(f"{name:3} {op(b)}")

# %% [markdown]
# `g` is already nonnegative and decreasing, so all three leave it alone.

# %%
assert rearrange(g) == least_decreasing_majorant(g) == level_function(g) == g

# %% [markdown]
# The level function is the slope of the least concave majorant of the
# primitive. The primitive of `b` has vertices (0,0),(1,0),(3,2); its hull
# drops the middle vertex, giving slope 2/3 up to 3.

# %%
print(primitive(b))
print(primitive(level_function(b)))
assert level_function(b)(Fraction(5, 2)) == Fraction(2, 3)
