# # Building a monochromatic image
#
# execute_proof takes a colouring of [1..W] and coefficients a_n, and builds
# a verified monochromatic image of the depth-n_max truncation. The trace
# records every stage; a failing stage says why.

# %%

from partreg import Coloring
from partreg.proof import execute_proof

trace = execute_proof(Coloring.residue(3, 100_000), [1, 2, 3, 4], 4)
print(trace.to_text())
print(trace.witness.assignment)

# %% [markdown]
# Odd numbers contain no multiple of 2, so the parity colouring is first
# restricted to the even numbers.

# %%

trace = execute_proof(Coloring.residue(2, 100_000), [1, 1, 1, 1], 4)
print(trace.step("subgroup-reduction").outputs)
print(sorted(set(trace.witness.image_values))[:10])

# %% [markdown]
# A window of 10 cannot hold the depth-5 system.

# %%

trace = execute_proof(Coloring.residue(2, 10), [1, 2, 3, 4, 5], 5)
print(trace.to_text())
