"""
Mixed Wirtinger derivatives from truncated Taylor jets
======================================================

Every tensor in the package is built from partial derivatives of a
real-valued function of (z, eta) taken in the holomorphic and
antiholomorphic directions separately. This script shows how to ask for
them and how to check them against finite differences.
"""

import numpy as np

from cfinsler import MultiIndex, TangentSample, derive, fd_check
from cfinsler import dsl

# a Randers-type expression in two complex variables
L = dsl.parse("(sqrt(abs2(eta1)+abs2(eta2)) + abs2(z1)*eta1 + conj(abs2(z1)*eta1))^2")
point = TangentSample([0.3 + 0.1j, -0.2 + 0.25j], [0.7 + 0.2j, 0.4 - 0.3j])

# the metric tensor is d/deta_i d/dconj(eta_j) of L
requests = [MultiIndex.of(2, ("eta", i), ("etabar", j)) for i in (1, 2) for j in (1, 2)]
values = derive(L, point, requests)
g = np.array([[values[MultiIndex.of(2, ("eta", i), ("etabar", j))] for j in (1, 2)] for i in (1, 2)])
print("g_{i jbar} =\n", np.round(g, 6))

# it is Hermitian and positive definite at this point
print("hermitian:", np.allclose(g, g.conj().T), " eigenvalues:", np.round(np.linalg.eigvalsh(g), 6))

# %%
# Derivatives up to second order can be checked against central
# differences in the underlying real coordinates.

for idx in (MultiIndex.of(2, ("z", 1), ("etabar", 2)), MultiIndex.of(2, ("zbar", 1), ("eta", 1))):
    print(idx, "finite-difference error:", fd_check(L, point, idx))

# higher orders come from the same jet
idx = MultiIndex.of(2, ("z", 1), ("eta", 1), ("etabar", 2))
exact = derive(L, point, [idx])[idx]
print("d_z1 d_eta1 d_etabar2 L =", exact)

# %%
# Conjugation symmetry: for real L, swapping barred and unbarred
# indices conjugates the derivative.

swapped = MultiIndex(idx.zbar, idx.z, idx.etabar, idx.eta)
print("conjugation gap:", abs(derive(L, point, [swapped])[swapped] - np.conj(exact)))
