# # Columns property
#
# A kernel system A x = 0 is partition regular exactly when the columns of A
# can be split into ordered blocks, the first summing to zero and every later
# block summing into the rational span of the columns before it. This script
# asks partreg for such a split on a few small matrices.

# %%

from partreg import SparseIntMatrix, columns_property, verify_certificate
from partreg.systems import gen_finite_system

# %% [markdown]
# x + y = z. The columns are (1), (1), (-1); columns 1 and 3 cancel, and
# column 2 is a multiple of column 1.

# %%

schur = SparseIntMatrix.from_dense([[1, 1, -1]])
cert = columns_property(schur)
print("x + y - z:", cert.one_based(), verify_certificate(schur, cert))

# %% [markdown]
# x + y = 3z has no zero-sum subset of columns, so there is no certificate.

# %%

print("x + y - 3z:", columns_property(SparseIntMatrix.from_dense([[1, 1, -3]])))

# %% [markdown]
# The finite system u_n = x_n1 + ... + x_nn, v_ni = x_ni + a_n y. With N = 3
# it already has 16 columns, and a certificate still comes back quickly.

# %%

for N in (1, 2, 3):
    system = gen_finite_system(N, [1, 2, 3])
    cert = columns_property(system.matrix)
    blocks = [[system.variables[j] for j in block] for block in cert.blocks]
    print(f"N={N}:", blocks)
