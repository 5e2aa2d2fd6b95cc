# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # The dyadic averaging operator
#
# On `[2^j, 2^(j+1))`, `S h` is the average of `h` over the previous dyadic
# cell. Its four norm ratios are bounded by `(1, 2, 4, 2)`, and
# `h = chi[1,2)` is sharp in the last three.

# %%
from couples.core import StepFunction, random_step
from couples.operators import (S_BOUNDS, GridSpec, SOperator, S_op, discretize_operator,
                               grid_operator_norms, mbar, s_norm_ratios)

h = StepFunction.indicator(1, 2)
print(S_op(h), s_norm_ratios(h))

# %%
worst = [0, 0, 0, 0]
for seed in range(300):
    f = random_step(seed, dyadic=True, breakpoint_range=(0, 16))
    if not f.is_zero:
        worst = [max(w, r) for w, r in zip(worst, s_norm_ratios(f))]
print("largest ratios seen:", [str(w) for w in worst], "bounds:", S_BOUNDS)

# %% [markdown]
# ## As a matrix
#
# On the cells `[0,1), [1,2), [2,4)` the operator, truncated to `[0, 4)`, is a
# 3x3 matrix. `grid_operator_norms` returns its exact norms.

# %%
G = GridSpec((0, 1, 2, 4))
S = discretize_operator(SOperator(), G, G)
print(S.matrix)
grid_operator_norms(S)

# %% [markdown]
# ## Recovering g from its majorant
#
# `M psi = (g / S g~) S psi` maps the majorant `g~` back to `g`.

# %%
b = StepFunction.indicator(1, 3)
mbar(b)(StepFunction.indicator(0, 3))
