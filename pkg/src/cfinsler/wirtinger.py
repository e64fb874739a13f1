"""Mixed Wirtinger derivatives of DSL expressions at a point.

The derivatives are exact up to rounding: the expression is evaluated in
truncated Taylor arithmetic (:mod:`cfinsler.jets`) with ``z, zbar, eta,
etabar`` seeded as independent variables.  :func:`fd_check` is the
independent finite-difference oracle on real and imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import dsl
from .errors import OrderError
from .jets import GROUPS, HORIZONTAL, Jet, make_basis
from .sample import TangentSample

MAX_ORDER = 5
# geometry needs one order more than single-expression requests (third eta-derivative of the spray)
ENGINE_ORDER = 6


@dataclass(frozen=True)
class MultiIndex:
    """Per-variable derivative orders in the four Wirtinger groups (0-based positions)."""

    z: tuple = ()
    zbar: tuple = ()
    eta: tuple = ()
    etabar: tuple = ()

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls(*(((0,) * n),) * 4)

    @classmethod
    def of(cls, n: int, *terms) -> "MultiIndex":
        """``MultiIndex.of(2, ("eta", 1), ("etabar", 2))``; indices are 1-based, repeats add up."""
        orders = {g: [0] * n for g in GROUPS}
        for term in terms:
            group, index = term[0], term[1]
            count = term[2] if len(term) > 2 else 1
            if not 1 <= index <= n:
                raise ValueError(f"variable index {index} outside 1..{n}")
            orders[group][index - 1] += count
        return cls(*(tuple(orders[g]) for g in GROUPS))

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def total(self) -> int:
        return sum(self.z) + sum(self.zbar) + sum(self.eta) + sum(self.etabar)

    @property
    def horizontal(self) -> int:
        return sum(self.z) + sum(self.zbar)

    @property
    def vertical(self) -> int:
        return sum(self.eta) + sum(self.etabar)

    def conjugate(self) -> "MultiIndex":
        return MultiIndex(self.zbar, self.z, self.etabar, self.eta)

    def exponents(self) -> dict:
        out = {}
        for g in GROUPS:
            for i, e in enumerate(getattr(self, g)):
                if e:
                    out[(g, i)] = e
        return out

    def __post_init__(self):
        lengths = {len(self.z), len(self.zbar), len(self.eta), len(self.etabar)}
        if len(lengths) != 1:
            raise ValueError("all four groups need the same dimension")
        if any(e < 0 for g in GROUPS for e in getattr(self, g)):
            raise ValueError("orders must be non-negative")


class JetValue(Mapping):
    """Derivative values keyed by :class:`MultiIndex`, with the evaluation point attached."""

    def __init__(self, values: dict, point: TangentSample):
        self._values = dict(values)
        self.point = point

    def __getitem__(self, key):
        return self._values[key]

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return f"JetValue({len(self)} entries at {self.point!r})"


def _env(point: TangentSample, basis, hot_h: bool, hot_v: bool) -> dict:
    env = {}
    for k in range(point.n):
        env[("z", k + 1)] = Jet.variable(basis, ("z", k), point.z[k]) if hot_h else complex(point.z[k])
        env[("eta", k + 1)] = Jet.variable(basis, ("eta", k), point.eta[k]) if hot_v else complex(point.eta[k])
    return env


def taylor(expr: dsl.Expr, point: TangentSample, total: int, hcap: int, vcap: int) -> Jet:
    """Jet of ``expr`` at ``point`` over all 4n Wirtinger variables, truncated at the caps."""
    if total > ENGINE_ORDER:
        raise OrderError(f"order {total} exceeds the cap {ENGINE_ORDER}")
    groups = [g for g in GROUPS if (g in HORIZONTAL and hcap > 0) or (g not in HORIZONTAL and vcap > 0)]
    variables = tuple((g, i) for g in groups for i in range(point.n))
    basis = make_basis(variables, total, hcap if hcap > 0 else 0, vcap if vcap > 0 else 0)
    out = dsl.evaluate(expr, _env(point, basis, hcap > 0, vcap > 0))
    if not isinstance(out, Jet):
        out = Jet.constant(basis, out)
    if not np.all(np.isfinite(out.c)):
        raise dsl.DomainError("non-finite derivative", dsl.to_text(expr))
    return out


def derive(expr: dsl.Expr, point: TangentSample, requests: Iterable[MultiIndex]) -> JetValue:
    """All requested mixed Wirtinger derivatives of ``expr`` at ``point``.

    The zero multi-index (plain value) is always included.
    """
    requests = list(requests)
    n = point.n
    zero = MultiIndex.zero(n)
    for r in requests:
        if r.n != n:
            raise ValueError(f"multi-index dimension {r.n} does not match the point ({n})")
        if r.total > MAX_ORDER:
            raise OrderError(f"requested order {r.total} exceeds the cap {MAX_ORDER}")
    total = max((r.total for r in requests), default=0)
    hcap = max((r.horizontal for r in requests), default=0)
    vcap = max((r.vertical for r in requests), default=0)
    jet = taylor(expr, point, total, hcap, vcap)
    values = {zero: complex(jet.value)}
    for r in requests:
        values[r] = complex(jet.derivative(r.exponents())) if r.total else values[zero]
    return JetValue(values, point)


# --------------------------------------------------------------------------
# finite-difference oracle

def _real_directions(group: str, index: int):
    """Wirtinger operator as a combination of real partials: [(coord, direction, weight)]."""
    coord = "z" if group in HORIZONTAL else "eta"
    sign = -1.0 if group in ("z", "eta") else 1.0
    return [((coord, index), 1.0, 0.5), ((coord, index), 1j, 0.5j * sign)]


def _shift(point: TangentSample, moves) -> tuple:
    z = point.z.copy()
    eta = point.eta.copy()
    for (coord, k), step in moves:
        if coord == "z":
            z[k] += step
        else:
            eta[k] += step
    return z, eta


def fd_derivative(expr: dsl.Expr, point: TangentSample, index: MultiIndex, step: float) -> tuple[complex, float]:
    """Richardson-refined central-difference estimate and the h vs h/2 discrepancy."""
    if index.total not in (1, 2):
        raise OrderError("the finite-difference oracle covers orders 1 and 2 only")
    if step <= 0:
        raise ValueError("step must be positive")
    ops = []
    for (g, i), e in index.exponents().items():
        ops.extend([(g, i)] * e)
    combos = [[]]
    for g, i in ops:
        combos = [c + [d] for c in combos for d in _real_directions(g, i)]

    def f(z, eta):
        return dsl.evaluate_at(expr, z, eta)

    def estimate(h):
        acc = 0.0 + 0.0j
        for combo in combos:
            weight = np.prod([w for _, _, w in combo])
            if len(combo) == 1:
                (c, d, _), = combo
                val = (f(*_shift(point, [(c, h * d)])) - f(*_shift(point, [(c, -h * d)]))) / (2 * h)
            else:
                (c1, d1, _), (c2, d2, _) = combo
                val = 0.0
                for s1 in (1, -1):
                    for s2 in (1, -1):
                        val += s1 * s2 * f(*_shift(point, [(c1, s1 * h * d1), (c2, s2 * h * d2)]))
                val /= 4 * h * h
            acc += weight * val
        return acc

    d1 = estimate(step)
    d2 = estimate(step / 2)
    return (4 * d2 - d1) / 3, float(abs(d1 - d2))


DEFAULT_FD_STEP = {1: 1e-5, 2: 1e-4}


def fd_check(expr: dsl.Expr, point: TangentSample, index: MultiIndex, step: float | None = None) -> float:
    """Relative disagreement ``|AD - FD| / max(1, |AD|)`` for an order-1 or order-2 index."""
    if index.total > 2:
        raise OrderError("fd_check is limited to order <= 2")
    step = DEFAULT_FD_STEP[index.total] if step is None else step
    ad = derive(expr, point, [index])[index]
    fd, _ = fd_derivative(expr, point, index, step)
    return float(abs(ad - fd) / max(1.0, abs(ad)))
