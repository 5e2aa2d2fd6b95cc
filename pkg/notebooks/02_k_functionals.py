# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # K-functionals for three couples
#
# Each K-functional is an exact concave piecewise-linear profile. For the
# couple `(L1, Linf)` it is the primitive of the rearrangement. The other two
# couples reduce to it after projecting: the majorant for `(L1~, Linf)` and
# the level function for `(L1, Linf°)`.

# %%
from fractions import Fraction

from couples.core import StepFunction, random_step
from couples.kcalc import (COUPLE_KINDS, L1_LINF, CoupleTag, PhiSpec, dual_bound, dual_witness,
                           k_method_norm, k_profile, optimal_split, profile_csv, split_cost)

b = StepFunction.indicator(1, 3)
for kind in COUPLE_KINDS:
    print(f"{kind:13} {k_profile(b, CoupleTag(kind))}")

# %% [markdown]
# So `K(t; L1, Linf) = min(t, 2)` and `K(t; L1~, Linf) = min(t, 3)`, while
# `K(t; L1, Linf°) = (2/3) min(t, 3)`. As CSV:

# %%
print(profile_csv(k_profile(b, CoupleTag("L1tilde_Linf"))))

# %% [markdown]
# ## Certifying a value from both sides
#
# A split `f = f0 + f1` whose cost equals the profile proves the upper bound.
# A test function `w` proves the lower bound by weak duality. Checking both on
# a random function shows that the profile value is exactly right.

# %%
f = random_step(2024, tail_values=(0,))
for kind in COUPLE_KINDS:
    c = CoupleTag(kind)
    K = k_profile(f, c)
    for t in K.xs[1:]:
        f0, f1 = optimal_split(t, f, c)
        assert split_cost(f0, f1, t, c) == K(t) == dual_bound(t, f, dual_witness(t, f, c), c)
print("sandwich holds at every breakpoint")

# %% [markdown]
# ## K-method norms
#
# With the power weight `theta = 1/2, q = 2` the indicator of `[0, 1)` has
# norm `sqrt(1/((1-theta) q) + 1/(theta q)) = sqrt 2`.

# %%
a = StepFunction.indicator(0, 1)
k_method_norm(a, CoupleTag(L1_LINF), PhiSpec.power(Fraction(1, 2), 2))
