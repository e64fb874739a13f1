"""Truncated multivariate Taylor arithmetic in Wirtinger coordinates.

A :class:`Jet` stores the Taylor coefficients of a (tensor of) function(s)
around a point, in the independent variables ``z, zbar, eta, etabar``.
Treating a variable and its conjugate as independent is exact for real
analytic functions: the polynomial ring in ``(Re w, Im w)`` and the one in
``(w, conj w)`` are related by a linear change of variables that commutes
with every arithmetic operation, so Wirtinger derivatives are read off
directly as ``alpha! * coefficient``.

Truncation keeps monomials whose total degree, horizontal (z-type) degree and
vertical (eta-type) degree are all within caps.  That set is closed under
taking divisors, which is what makes truncated products exact.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

GROUPS = ("z", "zbar", "eta", "etabar")
CONJ_GROUP = {"z": "zbar", "zbar": "z", "eta": "etabar", "etabar": "eta"}
HORIZONTAL = frozenset({"z", "zbar"})

VarKey = tuple  # (group, 0-based index)


def _enumerate(nvars, is_h, total, hcap, vcap):
    out = []

    def rec(pos, acc, tot, h, v):
        if pos == nvars:
            out.append(tuple(acc))
            return
        for e in range(total - tot + 1):
            nh = h + e if is_h[pos] else h
            nv = v if is_h[pos] else v + e
            if nh > hcap or nv > vcap:
                break
            acc.append(e)
            rec(pos + 1, acc, tot + e, nh, nv)
            acc.pop()

    rec(0, [], 0, 0, 0)
    out.sort(key=lambda m: (sum(m), tuple(-x for x in m)))
    return out


class Basis:
    """Monomial layout plus the index tables used by :class:`Jet`."""

    def __init__(self, variables: tuple, total: int, hcap: int, vcap: int):
        keys = set(variables)
        for g, i in variables:
            if (CONJ_GROUP[g], i) not in keys:
                raise ValueError(f"basis must contain the conjugate of {(g, i)}")
        self.variables = tuple(variables)
        self.position = {v: p for p, v in enumerate(self.variables)}
        self.caps = (total, hcap, vcap)
        is_h = [g in HORIZONTAL for g, _ in self.variables]
        self.is_h = np.array(is_h, dtype=bool)
        self.monomials = _enumerate(len(self.variables), is_h, total, hcap, vcap)
        self.index = {m: k for k, m in enumerate(self.monomials)}
        self.size = len(self.monomials)
        mons = np.array(self.monomials, dtype=np.int64).reshape(self.size, len(self.variables))
        self._mons = mons
        self.degree = mons.sum(axis=1)
        self.hdegree = mons[:, self.is_h].sum(axis=1)
        self.vdegree = self.degree - self.hdegree
        self.factorial = np.array([math.prod(math.factorial(e) for e in m) for m in self.monomials], dtype=float)
        self._build_product_table()
        self._build_shift_tables()
        self._build_conj_table()

    def _build_product_table(self):
        I, J = [], []
        starts = []
        for k, gamma in enumerate(self.monomials):
            starts.append(len(I))
            for alpha in itertools.product(*(range(e + 1) for e in gamma)):
                beta = tuple(g - a for g, a in zip(gamma, alpha))
                I.append(self.index[alpha])
                J.append(self.index[beta])
        self._I = np.array(I, dtype=np.int64)
        self._J = np.array(J, dtype=np.int64)
        self._starts = np.array(starts, dtype=np.int64)

    def _build_shift_tables(self):
        self._shift = {}
        for p, var in enumerate(self.variables):
            src = np.full(self.size, self.size, dtype=np.int64)
            fac = np.zeros(self.size)
            for k, m in enumerate(self.monomials):
                up = list(m)
                up[p] += 1
                j = self.index.get(tuple(up))
                if j is not None:
                    src[k] = j
                    fac[k] = up[p]
            self._shift[var] = (src, fac)

    def _build_conj_table(self):
        perm = [self.position[(CONJ_GROUP[g], i)] for g, i in self.variables]
        cmap = np.empty(self.size, dtype=np.int64)
        for k, m in enumerate(self.monomials):
            swapped = [0] * len(m)
            for p, e in enumerate(m):
                swapped[perm[p]] = e
            cmap[k] = self.index[tuple(swapped)]
        self._cmap = cmap

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        prod = a[..., self._I] * b[..., self._J]
        return np.add.reduceat(prod, self._starts, axis=-1)

    def monomial_of(self, exponents: dict) -> tuple:
        m = [0] * len(self.variables)
        for var, e in exponents.items():
            if e:
                m[self.position[var]] = e
        return tuple(m)

    def __repr__(self):
        return f"Basis({len(self.variables)} vars, caps={self.caps}, size={self.size})"


@lru_cache(maxsize=64)
def make_basis(variables: tuple, total: int, hcap: int, vcap: int) -> Basis:
    return Basis(variables, total, hcap, vcap)


def full_variables(n: int, groups=GROUPS) -> tuple:
    return tuple((g, i) for g in groups for i in range(n))


def _min_valid(a, b):
    return tuple(min(x, y) for x, y in zip(a, b))


class Jet:
    """Tensor of truncated Taylor polynomials sharing one :class:`Basis`.

    ``c`` has shape ``tensor_shape + (basis.size,)``.  ``valid`` gives the
    (total, horizontal, vertical) caps up to which coefficients are exact;
    differentiation lowers it.
    """

    __array_priority__ = 1000
    __slots__ = ("basis", "c", "valid")

    def __init__(self, basis: Basis, c, valid=None):
        self.basis = basis
        self.c = np.asarray(c, dtype=complex)
        self.valid = basis.caps if valid is None else valid

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, basis: Basis, value) -> "Jet":
        value = np.asarray(value, dtype=complex)
        c = np.zeros(value.shape + (basis.size,), dtype=complex)
        c[..., 0] = value
        return cls(basis, c)

    @classmethod
    def variable(cls, basis: Basis, var: VarKey, value: complex) -> "Jet":
        c = np.zeros(basis.size, dtype=complex)
        c[0] = value
        one = basis.monomial_of({var: 1})
        c[basis.index[one]] = 1.0
        return cls(basis, c)

    @classmethod
    def stack(cls, jets, axis: int = 0) -> "Jet":
        jets = list(jets)
        valid = jets[0].valid
        for j in jets[1:]:
            valid = _min_valid(valid, j.valid)
        ax = axis if axis >= 0 else axis - 1
        return cls(jets[0].basis, np.stack([j.c for j in jets], axis=ax), valid)

    # tensor plumbing --------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.c.shape[:-1]

    @property
    def value(self) -> np.ndarray:
        v = self.c[..., 0]
        return v if v.ndim else complex(v)

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.basis, self.c[idx], self.valid)

    def transpose(self, *axes) -> "Jet":
        return Jet(self.basis, self.c.transpose(tuple(axes) + (self.c.ndim - 1,)), self.valid)

    def sum(self, axis) -> "Jet":
        axis = axis if axis >= 0 else axis - 1
        return Jet(self.basis, self.c.sum(axis=axis), self.valid)

    # arithmetic ---------------------------------------------------------
    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(self.basis, other)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.basis, self.c + other.c, _min_valid(self.valid, other.valid))
        other = np.asarray(other, dtype=complex)
        c = self.c + np.zeros(other.shape + (1,))
        c[..., 0] += other
        return Jet(self.basis, c, self.valid)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.basis, -self.c, self.valid)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(self.basis, self.basis.mul(self.c, other.c), _min_valid(self.valid, other.valid))
        other = np.asarray(other, dtype=complex)
        return Jet(self.basis, self.c * other[..., None], self.valid)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other, dtype=complex))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)):
            raise TypeError("jets support integer powers only")
        if k < 0:
            return self.reciprocal() ** (-k)
        result = Jet.constant(self.basis, np.ones(self.shape))
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def conj(self) -> "Jet":
        return Jet(self.basis, self.c.conj()[..., self.basis._cmap], self.valid)

    # elementwise analytic functions ------------------------------------
    def compose(self, taylor_coeffs) -> "Jet":
        """Return f(self) given ``taylor_coeffs[k] = f^(k)(x0)/k!`` (arrays of the tensor shape)."""
        h = Jet(self.basis, self.c.copy(), self.valid)
        h.c[..., 0] = 0.0
        order = self.valid[0]
        result = Jet.constant(self.basis, taylor_coeffs[order])
        for k in range(order - 1, -1, -1):
            result = result * h + taylor_coeffs[k]
        result.valid = self.valid
        return result

    def _orders(self):
        return range(self.valid[0] + 1)

    def reciprocal(self) -> "Jet":
        x0 = self.c[..., 0]
        return self.compose([(-1.0) ** k / x0 ** (k + 1) for k in self._orders()])

    def exp(self) -> "Jet":
        e = np.exp(self.c[..., 0])
        return self.compose([e / math.factorial(k) for k in self._orders()])

    def log(self) -> "Jet":
        x0 = self.c[..., 0]
        coeffs = [np.log(x0)] + [(-1.0) ** (k - 1) / (k * x0 ** k) for k in self._orders() if k > 0]
        return self.compose(coeffs)

    def sqrt(self) -> "Jet":
        x0 = self.c[..., 0]
        root = np.sqrt(x0)
        coeffs = []
        binom = 1.0
        for k in self._orders():
            coeffs.append(root * binom / x0 ** k)
            binom *= (0.5 - k) / (k + 1)
        return self.compose(coeffs)

    # differentiation ----------------------------------------------------
    def d(self, var: VarKey) -> "Jet":
        """Partial derivative with respect to one basis variable, as a jet."""
        src, fac = self.basis._shift[var]
        padded = np.concatenate([self.c, np.zeros(self.shape + (1,), dtype=complex)], axis=-1)
        tot, h, v = self.valid
        if var[0] in HORIZONTAL:
            h -= 1
        else:
            v -= 1
        return Jet(self.basis, padded[..., src] * fac, (tot - 1, h, v))

    def grad(self, group: str, n: int) -> "Jet":
        """Stack of derivatives along every index of ``group``; new trailing tensor axis."""
        return Jet.stack([self.d((group, i)) for i in range(n)], axis=-1)

    def derivative(self, exponents: dict) -> np.ndarray:
        """Value of the mixed derivative ``prod d^e / d var^e`` at the base point."""
        m = self.basis.monomial_of(exponents)
        tot = sum(m)
        h = sum(e for e, hh in zip(m, self.basis.is_h) if hh)
        if tot > self.valid[0] or h > self.valid[1] or tot - h > self.valid[2]:
            raise ValueError(f"derivative {exponents} beyond jet validity {self.valid}")
        k = self.basis.index[m]
        return self.c[..., k] * self.basis.factorial[k]

    def __repr__(self):
        return f"Jet(shape={self.shape}, valid={self.valid}, {self.basis!r})"


def jeinsum(subscripts: str, a, b) -> Jet:
    """Two-operand einsum where either operand may be a Jet (product is the truncated one)."""
    lhs, out = subscripts.split("->")
    sa, sb = lhs.split(",")
    p = next(ch for ch in "ZYXWVU" if ch not in subscripts)
    if isinstance(a, Jet) and isinstance(b, Jet):
        basis = a.basis
        ga = a.c[..., basis._I]
        gb = b.c[..., basis._J]
        prod = np.einsum(f"{sa}{p},{sb}{p}->{out}{p}", ga, gb)
        return Jet(basis, np.add.reduceat(prod, basis._starts, axis=-1), _min_valid(a.valid, b.valid))
    if isinstance(a, Jet):
        c = np.einsum(f"{sa}{p},{sb}->{out}{p}", a.c, np.asarray(b, dtype=complex))
        return Jet(a.basis, c, a.valid)
    if isinstance(b, Jet):
        c = np.einsum(f"{sa},{sb}{p}->{out}{p}", np.asarray(a, dtype=complex), b.c)
        return Jet(b.basis, c, b.valid)
    return np.einsum(subscripts, a, b)
