# # Forcing windows
#
# How long must [1..N] be before every 2-colouring contains a monochromatic
# s, t, s + t, or a 3-term progression? Backtracking answers both, and the
# SAT encoding gives a second opinion when a solver is available.

# %%

import os

from partreg import Coloring
from partreg.search import export_cnf, forced, min_forcing_N, mono_witness, solve_external
from partreg.systems import ap3_system, kernel_system, schur_system

schur, ap3 = schur_system(), ap3_system()
print("Schur:", min_forcing_N(schur, 2, 10).value)
print("3-AP:", min_forcing_N(ap3, 2, 12).value)

# %%

res = forced(schur, 2, 4)
print(res.verdict, res.avoiding_coloring)
print(mono_witness(schur, Coloring.constant(4), 4))

# %% [markdown]
# x + y = 3z has no columns certificate; four colours avoid it on [1..20].

# %%

print(forced(kernel_system([[1, 1, -3]]), 4, 20).verdict)

# %%

cnf = export_cnf(schur, 2, 5)
print(cnf.to_dimacs().splitlines()[3])
if os.environ.get("PARTREG_SAT_SOLVER"):
    print("SAT solver says satisfiable:", solve_external(cnf).satisfiable)
