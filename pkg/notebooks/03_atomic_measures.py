# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Moving between a measure on the line and Lebesgue measure
#
# A Borel measure made of atoms and constant-density segments is laid out on
# `(0, L)` by its cumulative mass. `E` carries functions across. `A` averages
# a function over the images of the atoms, which projects onto the range of `E`.
#
# The standard example uses atoms of weight `2^-k` at `k = 1, 2, ...`. It is
# truncated at `K_max`, and the leftover mass is put on one closing atom.

# %%
from fractions import Fraction

from couples.constructions import level_function, level_function_via_transfer, star_star
from couples.core import NEG_INF, StepFunction
from couples.measure import A_lambda, BorelMeasure, E_lambda, ae_equal, retract

lam = BorelMeasure.geometric_atoms(20)
chi1 = StepFunction(NEG_INF, (1, Fraction(3, 2)), (0, 1), 0)   # 1 at the atom x = 1
one = StepFunction.constant(1, NEG_INF)

print(retract(lam).atom_images[:3])
print(E_lambda(lam, chi1), E_lambda(lam, one))

# %% [markdown]
# Averaging `chi(0,1/4]` over the first atom image `(0, 1/2]` halves it.

# %%
A_lambda(lam, StepFunction.indicator(0, Fraction(1, 4)))

# %% [markdown]
# ## Maximal functions on the atomic space
#
# `f**(x)` is the mean of the rearrangement over `(0, x)`. On this measure,
# `1** = min(1, 1/x)` and `chi_1** = min(1, 1/(2x))`. So the constant function
# is at most twice the single atom, even though it has infinitely many atoms.

# %%
for x in (Fraction(1, 4), 1, 3):
    print(x, star_star(one, lam, x), star_star(chi1, lam, x))

# %% [markdown]
# ## Two routes to the level function
#
# Concavity with respect to the measure means concavity in the cumulative
# mass parameter. The direct hull and the route through `E` must agree
# almost everywhere.

# %%
chi2 = StepFunction(NEG_INF, (2, Fraction(5, 2)), (0, 1), 0)
direct, via = level_function(chi2, lam), level_function_via_transfer(chi2, lam)
print(direct)
assert ae_equal(direct, via, lam)
