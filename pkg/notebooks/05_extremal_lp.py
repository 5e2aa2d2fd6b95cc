# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # How small can the operator norm be?
#
# For `g = 2a + b` we search for grid operators that map `g~` (or `g°`) back
# to `g`, minimising the largest of the two relevant operator norms. Cell
# averaging contracts every norm involved, so any operator on the line gives
# a grid operator that is no worse. The grid optimum is therefore a lower
# bound, and the exact pivoting simplex computes it as a rational number.

# %%
from couples.extremal import run_instance

for kind in ("exm", "exn"):
    certs = run_instance(kind, refine=2)
    print(kind, [c.optimum for c in certs])

# %% [markdown]
# The optimum is 9/8 on the base grid and stays there under refinement. Each
# certificate also re-derives the inequality chain from the solved operator.
# Every line must hold with the numbers substituted.

# %%
cert = run_instance("exm")[0]
for line in cert.chain:
    print(line)
print(cert.operator.matrix)
