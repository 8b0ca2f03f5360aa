# # Sumsets on windows
#
# Sets live on explicit integer windows. Results are exact on the output
# window and remember when something was clipped away.

# %%

from fractions import Fraction

from partreg.sumsets import (WindowSet, check_new_lemma, check_symmetric_lemma, diffset,
                             lcm_bound, sumset, window_density)

evens = WindowSet.from_members(range(2, 21, 2), 2, 20)
print(diffset(evens, evens, (-18, 18)).members())

cut = sumset(evens, evens, (0, 10))
print(cut.members(), "clipped:", cut.clipped)

# %%

thirds = WindowSet.residue(0, 3, 1, 3000)
print("density on [1..30]:", window_density(thirds, 30))

# %% [markdown]
# 4A - 4A for A = 2 mod 4 is exactly the multiples of 4 on the window.

# %%

rep = check_symmetric_lemma(WindowSet.residue(2, 4, 1, 100), 4, (-200, 200))
print(rep.verdict, rep.params["m"])

# %% [markdown]
# For the multiples of 3, every multiple of lcm(1, 2, 3) = 6 in [-600, 600] is
# some a - (a_1 + ... + a_6) with all terms above t = 100.

# %%

m = lcm_bound(Fraction(1, 3))
print(check_new_lemma(thirds, 100, 6, m, (-600, 600)).verdict)

# %% [markdown]
# The class 1 mod 3 fails for a structural reason: a - 6 terms is always 1 mod 3.

# %%

rep = check_new_lemma(WindowSet.residue(1, 3, 1, 3000), 50, 6, m, (-600, 600))
print(rep.verdict, rep.counterexample)
