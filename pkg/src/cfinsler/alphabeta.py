"""Closed-form auxiliaries of (alpha, beta)-metrics: Randers alpha + |beta| and Kropina alpha^2 / |beta|.

These are evaluated directly from ``a_{i jbar}(z)`` and ``b_i(z)`` (first
z-derivatives by a small jet), independently of the generic connection
engine, so they serve as cross-checks of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dsl
from .errors import DegenerateDelta, DomainError, KindError
from .jets import Jet, full_variables, jeinsum, make_basis
from .metric import BETA_FLOOR, MetricSpec
from .sample import TangentSample
from .tensors import jet_inverse

DELTA_FLOOR = 1e-10


def _z_jets(spec: MetricSpec, z):
    n = spec.n
    basis = make_basis(full_variables(n, ("z", "zbar")), 1, 1, 0)
    env = {("z", k + 1): Jet.variable(basis, ("z", k), z[k]) for k in range(n)}

    def ev(e):
        v = dsl.evaluate(e, env)
        return v if isinstance(v, Jet) else Jet.constant(basis, v)

    a = Jet.stack([Jet.stack([ev(x) for x in row]) for row in spec.a])
    b = Jet.stack([ev(x) for x in spec.b])
    return a, b


@dataclass(eq=False)
class ABAux:
    """Shared (alpha, beta) data at one sample.

    Index layouts: ``a[i, j]`` = a_{i jbar}, ``ainv[j, i]`` = a^{jbar i},
    ``da[i, j, k]`` = d a_{i jbar} / dz^k, ``db[i, k]`` = d b_i / dz^k,
    ``dbbar_low[r, j]`` = d conj(b_r) / dz^j, ``dbbar_up[r, j]`` = d conj(b^r) / dz^j.
    """

    n: int
    eta: np.ndarray
    a: np.ndarray
    ainv: np.ndarray
    da: np.ndarray
    b: np.ndarray
    db: np.ndarray
    b_up: np.ndarray
    dbbar_low: np.ndarray
    dbbar_up: np.ndarray
    bnorm2: float
    alpha: float
    beta: complex
    l: np.ndarray
    aN: np.ndarray
    aG: np.ndarray

    @property
    def abs_beta(self) -> float:
        return abs(self.beta)

    @property
    def l_bar(self) -> np.ndarray:
        return self.l.conj()

    def gb_terms(self) -> tuple[np.ndarray, np.ndarray]:
        """The two j-indexed terms betabar l_rbar d(conj b^r)/dz^j and beta d(conj b_r)/dz^j etabar^r."""
        return (self.beta.conjugate() * (self.l_bar @ self.dbbar_up),
                self.beta * (self.eta.conj() @ self.dbbar_low))

    def gb_vector(self) -> np.ndarray:
        t1, t2 = self.gb_terms()
        return t1 + t2

    def gb_scalar(self) -> complex:
        return complex(self.gb_vector() @ self.eta)


def ab_aux(spec: MetricSpec, sample: TangentSample) -> ABAux:
    if spec.kind not in ("randers", "kropina"):
        raise KindError(f"(alpha, beta) auxiliaries need a randers or kropina metric, got {spec.kind}")
    n = spec.n
    aJ, bJ = _z_jets(spec, sample.z)
    ainvJ = jet_inverse(aJ)
    # b^i = a^{jbar i} conj(b_j)
    bupJ = jeinsum("ji,j->i", ainvJ, bJ.conj())
    a, ainv, b, b_up = aJ.value, ainvJ.value, bJ.value, bupJ.value
    da = aJ.grad("z", n).value
    db = bJ.grad("z", n).value
    dbbar_low = bJ.conj().grad("z", n).value
    dbbar_up = bupJ.conj().grad("z", n).value
    eta = sample.eta
    etab = eta.conj()
    alpha2 = float(np.real(eta @ a @ etab))
    beta = complex(b @ eta)
    if abs(beta) < BETA_FLOOR and spec.kind == "kropina":
        raise DomainError(f"|beta| = {abs(beta):.3g} below {BETA_FLOOR:g}", "b_i eta^i")
    l = a @ etab
    aN = np.einsum("mi,lmj,l->ij", ainv, da, eta)
    return ABAux(
        n=n, eta=eta, a=a, ainv=ainv, da=da, b=b, db=db, b_up=b_up,
        dbbar_low=dbbar_low, dbbar_up=dbbar_up,
        bnorm2=float(np.real(np.einsum("ji,i,j->", ainv, b, b.conj()))),
        alpha=float(np.sqrt(alpha2)), beta=beta, l=l, aN=aN, aG=0.5 * aN @ eta,
    )


# --------------------------------------------------------------------------
# Randers F = alpha + |beta|

@dataclass(eq=False)
class RandersAux:
    base: ABAux
    F: float
    L: float
    gamma: float
    xi: np.ndarray
    k: np.ndarray      # k[r, i] = k^{rbar i}
    delta: float
    C_vec: np.ndarray  # C_j
    Gamma: np.ndarray  # Gamma[r, j, i] = Gamma^{rbar}_{jbar i}
    F2: np.ndarray     # F2[i, l] = F_{il}
    eta_low: np.ndarray


def randers_aux(spec: MetricSpec, sample: TangentSample) -> RandersAux:
    if spec.kind != "randers":
        raise KindError(f"expected a randers metric, got {spec.kind}")
    x = ab_aux(spec, sample)
    n, eta, etab = x.n, x.eta, x.eta.conj()
    al, be, ab_ = x.alpha, x.beta, x.abs_beta
    F = al + ab_
    L = F * F
    gamma = L + al ** 2 * (x.bnorm2 - 1)
    xi = be.conjugate() * eta + al ** 2 * x.b_up
    bbar_up = x.b_up.conj()
    k = (2 * al * x.ainv
         + 2 * (al * x.bnorm2 + 2 * ab_) / gamma * np.outer(etab, eta)
         - 2 * al ** 3 / gamma * np.outer(bbar_up, x.b_up)
         - 2 * al / gamma * (be.conjugate() * np.outer(bbar_up, eta) + be * np.outer(etab, x.b_up)))
    delta = (al ** 2 * x.bnorm2 - ab_ ** 2) / (2 * gamma) - n * ab_ / (2 * F)
    C_vec = delta * (x.l / al ** 2 - be.conjugate() / ab_ ** 2 * x.b)
    # Gamma^{rbar}_{jbar i} = 1/2 a^{rbar k} (d_i a_{k jbar} - d_k a_{i jbar})
    Gamma = 0.5 * (np.einsum("rk,kji->rji", x.ainv, x.da) - np.einsum("rk,ijk->rji", x.ainv, x.da))
    F2 = x.db.T - x.db  # F_{il} = d_i b_l - d_l b_i ; db[l, i] = d b_l / dz^i
    eta_low = F / al * x.l + F * be.conjugate() / ab_ * x.b
    return RandersAux(x, F, L, gamma, xi, k, delta, C_vec, Gamma, F2, eta_low)


def randers_spray(r: RandersAux) -> np.ndarray:
    """Closed-form spray of a Randers metric."""
    x = r.base
    eta, etab = x.eta, x.eta.conj()
    be, ab_ = x.beta, x.abs_beta
    bracket = x.l_bar @ x.dbbar_up - be ** 2 / ab_ ** 2 * (etab @ x.dbbar_low)  # indexed by j
    term1 = (bracket @ eta) / (2 * r.gamma) * r.xi
    term2 = be / (4 * ab_) * np.einsum("ri,rj,j->i", r.k, x.dbbar_low, eta)
    return x.aG + term1 + term2


def randers_weak_kahler_vector(r: RandersAux) -> np.ndarray:
    """Left side of the Randers weak-Kaehler criterion, indexed by k."""
    x = r.base
    eta, etab = x.eta, x.eta.conj()
    al, be, ab_ = x.alpha, x.beta, x.abs_beta
    if abs(r.delta) < DELTA_FLOOR:
        raise DegenerateDelta(f"|delta| = {abs(r.delta):.3g}")
    bbar_up = x.b_up.conj()  # b^{mbar}
    dbl = x.dbbar_low          # [m, r] = d b_mbar / dz^r
    inner = (be * (al * x.bnorm2 + ab_) / ab_ * (etab @ dbl)
             + be.conjugate() * (eta @ x.db.T - np.einsum("m,lmr,l->r", bbar_up, x.da, eta))
             - al * ab_ * (bbar_up @ dbl))
    first = al ** 2 * ab_ / (r.gamma * r.delta) * (inner @ eta) * r.C_vec
    # (alpha betabar F_kl + alpha b_l d_k b_rbar etabar^r + 2|beta| a_{l rbar} Gamma^{rbar}_{jbar k} etabar^j) eta^l
    second = (al * be.conjugate() * (r.F2 @ eta)
              + al * (x.b @ eta) * (etab @ dbl)
              + 2 * ab_ * np.einsum("lr,rjk,j,l->k", x.a, r.Gamma, etab, eta))
    third = al * x.b * (etab @ dbl @ eta)
    return first - second + third


# --------------------------------------------------------------------------
# Kropina F = alpha^2 / |beta|

@dataclass(eq=False)
class KropinaAux:
    base: ABAux
    q: float
    t: np.ndarray      # t[r, i] = t^{rbar i}
    eta_low: np.ndarray


def kropina_aux(spec: MetricSpec, sample: TangentSample) -> KropinaAux:
    if spec.kind != "kropina":
        raise KindError(f"expected a kropina metric, got {spec.kind}")
    x = ab_aux(spec, sample)
    eta, etab = x.eta, x.eta.conj()
    be, ab_ = x.beta, x.abs_beta
    q = x.alpha / ab_
    bbar_up = x.b_up.conj()
    t = (x.ainv
         + (2 - q ** 2 * x.bnorm2) / (q ** 2 * ab_ ** 2) * np.outer(etab, eta)
         + (be.conjugate() * np.outer(bbar_up, eta) - be * np.outer(etab, x.b_up)) / ab_ ** 2)
    eta_low = 2 * q ** 2 * x.l - q ** 4 * be.conjugate() * x.b
    return KropinaAux(x, q, t, eta_low)


def kropina_spray(kr: KropinaAux) -> np.ndarray:
    """Closed-form spray of a Kropina metric."""
    x = kr.base
    eta = x.eta
    be, ab_ = x.beta, x.abs_beta
    s = (x.l_bar @ x.dbbar_up) @ eta
    term1 = -be.conjugate() / (2 * ab_ ** 2) * s * eta
    term2 = -kr.q ** 2 * be / 4 * np.einsum("ri,rj,j->i", kr.t, x.dbbar_low, eta)
    return x.aG + term1 + term2


def kropina_connection(kr: KropinaAux) -> np.ndarray:
    """Closed-form N^i_j of a Kropina metric."""
    x = kr.base
    be, ab_ = x.beta, x.abs_beta
    v = x.l_bar @ x.dbbar_up  # indexed by j
    return (x.aN
            - be.conjugate() / ab_ ** 2 * np.outer(x.eta, v)
            - kr.q ** 2 * be / 2 * np.einsum("ri,rj->ij", kr.t, x.dbbar_low))


def alpha_spec(spec: MetricSpec) -> MetricSpec:
    """The purely Hermitian metric alpha underlying an (alpha, beta)-metric."""
    if spec.kind not in ("randers", "kropina"):
        raise KindError(f"expected an (alpha, beta)-metric, got {spec.kind}")
    return MetricSpec(f"{spec.name}:alpha", spec.n, "hermitian", a=spec.a, base_point=spec.base_point)


__all__ = [
    "ABAux", "RandersAux", "KropinaAux", "ab_aux", "randers_aux", "kropina_aux",
    "randers_spray", "randers_weak_kahler_vector", "kropina_spray", "kropina_connection",
    "alpha_spec",
]
