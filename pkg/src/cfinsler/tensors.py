"""Small dense complex tensors: Hermitian inversion and slot contractions.

Layout conventions used throughout the package (0-based indices):

* ``g[i, j]``     = g_{i jbar}  (row unbarred, column barred)
* ``ginv[j, i]``  = g^{jbar i}, so ``ginv @ g = I`` reads g^{jbar i} g_{k jbar} = delta^i_k
* ``C[i, j, k]``  = C_{i jbar k},  ``Cbar[i, j, k]`` = C_{i jbar kbar}
* mixed coefficients ``X[i, j, k]`` = X^i_{jk}
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError, SingularMatrix
from .jets import Jet, jeinsum

PIVOT_RTOL = 1e-10
MAX_CONDITION = 1e12


def is_hermitian(g, tol: float = 1e-10) -> bool:
    g = np.asarray(g)
    return bool(np.max(np.abs(g - g.conj().T), initial=0.0) <= tol * (1 + np.max(np.abs(g), initial=0.0)))


def ldl(g):
    """LDL* factorization of a Hermitian matrix; returns unit lower ``L`` and real pivots ``d``.

    Raises :class:`SingularMatrix` when a pivot is below ``PIVOT_RTOL * trace / n``
    (which also covers non-positive leading minors).
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {g.shape}")
    n = g.shape[0]
    scale = float(np.real(np.trace(g))) / n
    if not scale > 0:
        raise SingularMatrix(f"trace {scale * n:.3g} is not positive")
    L = np.eye(n, dtype=complex)
    d = np.zeros(n)
    for j in range(n):
        dj = g[j, j].real - np.sum(np.abs(L[j, :j]) ** 2 * d[:j])
        if dj < PIVOT_RTOL * scale:
            raise SingularMatrix(f"pivot {j} = {dj:.3g} (leading minor not positive)")
        d[j] = dj
        for i in range(j + 1, n):
            L[i, j] = (g[i, j] - np.sum(L[i, :j] * L[j, :j].conj() * d[:j])) / dj
    return L, d


def invert(g) -> np.ndarray:
    """Inverse of a positive definite Hermitian matrix via LDL*.

    Returns the Hermitian matrix ``h`` with ``h @ g = I``.
    """
    L, d = ldl(g)
    n = len(d)
    Linv = np.linalg.solve(L, np.eye(n))
    h = Linv.conj().T @ (Linv / d[:, None])
    h = 0.5 * (h + h.conj().T)
    cond = np.linalg.norm(np.asarray(g), 1) * np.linalg.norm(h, 1)
    if cond > MAX_CONDITION:
        raise SingularMatrix(f"condition estimate {cond:.3g} exceeds {MAX_CONDITION:.0e}")
    return h


def is_positive_definite(g) -> bool:
    try:
        ldl(g)
    except SingularMatrix:
        return False
    return True


def contract(tensor, vectors, slots):
    """Contract ``tensor`` with one vector per slot (remaining axes keep their order).

    ``vectors`` may be a single vector or a sequence matching ``slots``; pass
    ``eta`` or ``eta.conj()`` for the usual ``0`` / ``0bar`` convention.
    """
    if isinstance(slots, int):
        slots, vectors = (slots,), (vectors,)
    slots = tuple(slots)
    vectors = tuple(vectors)
    if len(slots) != len(vectors):
        raise ShapeError("one vector per slot is required")
    if len(set(slots)) != len(slots):
        raise ShapeError("repeated slot")
    shape = tensor.shape
    rank = len(shape)
    for s, v in zip(slots, vectors):
        if not -rank <= s < rank:
            raise ShapeError(f"slot {s} out of range for rank {rank}")
        if np.shape(v) != (shape[s],):
            raise ShapeError(f"slot {s} has length {shape[s]}, vector has shape {np.shape(v)}")
    letters = "abcdefghijklmnop"[:rank]
    out = letters
    for s, v in zip(slots, vectors):
        s %= rank
        tensor_sub = out
        out = out.replace(letters[s], "")
        tensor = _einsum(f"{tensor_sub},{letters[s]}->{out}", tensor, v)
    return tensor


def _einsum(spec, a, b):
    if isinstance(a, Jet) or isinstance(b, Jet):
        return jeinsum(spec, a, b)
    return np.einsum(spec, a, b)


def jet_inverse(g: Jet) -> Jet:
    """Inverse of a matrix-valued jet, with the same layout as :func:`invert`.

    Writes ``g = g0 + D`` with ``D`` vanishing at the base point, so
    ``g^{-1} = sum_k (-g0^{-1} D)^k g0^{-1}`` terminates at the truncation order.
    """
    g0 = g.value
    h0 = invert(g0)
    D = Jet(g.basis, g.c.copy(), g.valid)
    D.c[..., 0] = 0.0
    # term_k = (-h0 D)^k h0, built right to left
    term = Jet.constant(g.basis, h0)
    total = Jet.constant(g.basis, h0)
    for _ in range(g.valid[0]):
        term = -1.0 * jeinsum("ab,bc->ac", h0, jeinsum("ab,bc->ac", D, term))
        total = total + term
    total.valid = g.valid
    return total
