# # Truncated systems
#
# The infinite image system x_n1 + ... + x_nn, x_ni + a_n y, y is cut off at a
# finite depth. Here we print a few truncations and map a kernel solution of
# the shifted system onto an image assignment.

# %%

from partreg.systems import gen_dh_truncation, gen_nearmiss_kernel, transform_nearmiss

system = gen_dh_truncation(2, [1, 2])
print(system.variables)
for row in system.matrix.to_dense():
    print(row)

# %% [markdown]
# Power-of-two blocks (sizes 2, 4, ...) with a_n = 2^n.

# %%

pow2 = gen_dh_truncation(2, [2, 4], schedule="pow2")
print(pow2.variables)
print(pow2.matrix.n_rows, "rows")

# %% [markdown]
# Choose xt values and y freely, set z_n so the shifted equations hold, then
# subtract a_n y. The image rows reproduce z_n, every xt and y.

# %%

a = [1, 2]
sol = {"y": 3, "xtilde_1_1": 7, "xtilde_2_1": 9, "xtilde_2_2": 8}
sol["z_1"] = sol["xtilde_1_1"] - 1 * a[0] * sol["y"]
sol["z_2"] = sol["xtilde_2_1"] + sol["xtilde_2_2"] - 2 * a[1] * sol["y"]
print(gen_nearmiss_kernel(2, a).evaluate(sol))

res = transform_nearmiss(sol, a)
print(res.assignment)
print(res.image, "all positive:", res.all_positive)
