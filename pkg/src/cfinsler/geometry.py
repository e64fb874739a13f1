"""Connection apparatus of a complex Finsler metric at one point of the slit bundle.

Everything is computed from a single truncated Taylor expansion of L in the
Wirtinger variables.  Matrix inverses are expanded with a Neumann series, so
every derivative of every coefficient is exact up to rounding; there is no
finite differencing.

Array layouts (0-based; see :mod:`cfinsler.tensors`):

* ``g[i, j]`` = g_{i jbar}, ``g_inv[j, i]`` = g^{jbar i}
* ``C[i, j, k]`` = d/deta^k g_{i jbar}, ``Cbar[i, j, k]`` = d/detabar^k g_{i jbar}
* ``N[i, k]`` = N^i_k (Chern-Finsler), ``cN[i, j]`` = d/deta^j G^i
* ``dNbar[i, k, h]`` = d/detabar^h N^i_k, ``dGbar[i, k]`` = d/detabar^k G^i
* mixed coefficients ``X[i, j, k]`` = X^i_{jk}; ``BLbar[i, j, k]`` = BL^i_{j kbar},
  ``cLbar[i, j, k]`` = cL^i_{j kbar}
* Cartan covariant derivatives ``D[l, r, h, k]`` with the derivative index last.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .jets import Jet, jeinsum
from .metric import MetricSpec, assemble_L
from .sample import TangentSample
from .tensors import invert, jet_inverse
from .wirtinger import ENGINE_ORDER, taylor

# one z-derivative (inside N) plus up to five eta-derivatives of L
CAPS = (ENGINE_ORDER, 1, ENGINE_ORDER - 1)


def _L_expr(source) -> dsl.Expr:
    return assemble_L(source) if isinstance(source, MetricSpec) else dsl.as_expr(source)


def _eta_jet(basis, eta) -> Jet:
    return Jet.stack([Jet.variable(basis, ("eta", k), eta[k]) for k in range(len(eta))])


@dataclass(eq=False)
class ConnectionBundle:
    """All connection data at one sample (numeric arrays; layouts in the module docstring)."""

    sample: TangentSample
    L: complex
    g: np.ndarray
    g_inv: np.ndarray
    C: np.ndarray
    Cbar: np.ndarray
    N: np.ndarray
    cN: np.ndarray
    dNbar: np.ndarray
    G: np.ndarray
    dGbar: np.ndarray
    L_cf: np.ndarray
    L_cf_alt: np.ndarray
    C_cf: np.ndarray
    BL: np.ndarray
    BLbar: np.ndarray
    cL: np.ndarray
    cLbar: np.ndarray
    T: np.ndarray
    jets: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def eta(self) -> np.ndarray:
        return self.sample.eta

    def arrays(self) -> dict:
        names = ("g", "g_inv", "C", "Cbar", "N", "cN", "dNbar", "G", "dGbar", "L_cf", "C_cf",
                 "BL", "BLbar", "cL", "cLbar", "T")
        return {k: getattr(self, k) for k in names}


def connection(source, sample: TangentSample) -> ConnectionBundle:
    """Build the full :class:`ConnectionBundle` for a spec (or an L expression) at ``sample``."""
    L = _L_expr(source)
    n = sample.n
    Lj = taylor(L, sample, *CAPS)
    basis = Lj.basis
    eta = _eta_jet(basis, sample.eta)

    g = Lj.grad("eta", n).grad("etabar", n)
    h = jet_inverse(g)
    C = g.grad("eta", n)
    Cbar = g.grad("etabar", n)
    dzg = g.grad("z", n)

    # N^i_k = g^{mbar i} (d_k g_{l mbar}) eta^l
    N = jeinsum("mi,mk->ik", h, jeinsum("l,lmk->mk", eta, dzg))
    G = 0.5 * jeinsum("ik,k->i", N, eta)
    cN = G.grad("eta", n)
    BL = cN.grad("eta", n)
    BLbar = cN.grad("etabar", n)
    dGbar = G.grad("etabar", n)
    dNbar = N.grad("etabar", n)
    L_cf = N.grad("eta", n).transpose(0, 2, 1)

    hv, gv, Cv, Cbv = h.value, g.value, C.value, Cbar.value
    Nv, cNv = N.value, cN.value
    dzgv = dzg.value
    dzbgv = g.grad("zbar", n).value

    L_cf_alt = np.einsum("li,jlk->ijk", hv, dzgv - np.einsum("mk,jlm->jlk", Nv, Cv))
    C_cf = np.einsum("li,jlk->ijk", hv, Cv)
    cdg = dzgv - np.einsum("mk,jlm->jlk", cNv, Cv)
    cL = 0.5 * np.einsum("li,jlk->ijk", hv, cdg + cdg.transpose(2, 1, 0))
    cdbg = dzbgv - np.einsum("mk,jlm->jlk", cNv.conj(), Cbv)
    cLbar = 0.5 * np.einsum("li,jlk->ijk", hv, cdbg - cdbg.transpose(0, 2, 1))
    Lcfv = L_cf.value

    jets = {"L": Lj, "g": g, "h": h, "C": C, "Cbar": Cbar, "dzg": dzg, "N": N, "G": G,
            "cN": cN, "BL": BL, "BLbar": BLbar, "L_cf": L_cf}
    return ConnectionBundle(
        sample=sample,
        L=complex(Lj.value),
        g=gv,
        g_inv=hv,
        C=Cv,
        Cbar=Cbv,
        N=Nv,
        cN=cNv,
        dNbar=dNbar.value,
        G=G.value,
        dGbar=dGbar.value,
        L_cf=Lcfv,
        L_cf_alt=L_cf_alt,
        C_cf=C_cf,
        BL=BL.value,
        BLbar=BLbar.value,
        cL=cL,
        cLbar=cLbar,
        T=Lcfv - Lcfv.transpose(0, 2, 1),
        jets=jets,
    )


# thin views matching the individual construction steps ----------------------

def fundamental(source, sample: TangentSample):
    """``(g, g_inv)`` from second eta-derivatives of L."""
    Lj = taylor(_L_expr(source), sample, 2, 0, 2)
    g = Lj.grad("eta", sample.n).grad("etabar", sample.n).value
    return g, invert(g)


def chern_finsler(bundle: ConnectionBundle):
    return bundle.N, bundle.L_cf, bundle.C_cf


def spray_and_canonical(bundle: ConnectionBundle):
    return bundle.G, bundle.cN, bundle.dGbar, bundle.dNbar


def berwald_rund(bundle: ConnectionBundle):
    return bundle.BL, bundle.BLbar, bundle.cL, bundle.cLbar


# --------------------------------------------------------------------------
# covariant derivatives

@dataclass(eq=False)
class CovDerivs:
    """Horizontal covariant derivatives of the Cartan tensors and of g.

    ``C_cf_h``       C_{l rbar h | k}            (Chern-Finsler)
    ``C_cf_hbar``    C_{l rbar h | kbar}         (Chern-Finsler)
    ``Cbar_cf_h``    C_{l rbar hbar | k}         (Chern-Finsler)
    ``C_B_h``        C_{l rbar h B| k}           (Berwald)
    ``C_B_hbar_arg`` C_{l rbar hbar B| k}        (Berwald)
    ``C_B_bar``      C_{l rbar h B| kbar}        (Berwald, conjugate-dual rule)
    ``g_B``          g_{i jbar B| k}             (Berwald)
    ``g_cf``         g_{i jbar | k}              (Chern-Finsler, vanishes identically)

    ``Bc[m, r, k]`` = conj(BLbar[m, r, k]) is the barred-index Berwald coefficient.
    """

    C_cf_h: np.ndarray
    C_cf_hbar: np.ndarray
    Cbar_cf_h: np.ndarray
    C_B_h: np.ndarray
    C_B_hbar_arg: np.ndarray
    C_B_bar: np.ndarray
    g_B: np.ndarray
    g_cf: np.ndarray
    Bc: np.ndarray
    jets: dict = field(default_factory=dict, repr=False)


def _adapted(dz, dv, Nmat):
    """(d/dz^k - N^m_k d/deta^m) applied to a rank-3 tensor: dz[...,k], dv[...,m]."""
    return dz - np.einsum("mk,lrhm->lrhk", Nmat, dv)


def cov_derivs(bundle: ConnectionBundle) -> CovDerivs:
    n = bundle.n
    J = bundle.jets
    C, Cbar = J["C"], J["Cbar"]
    N, cN = bundle.N, bundle.cN
    Lcf, BL, BLbar = bundle.L_cf, bundle.BL, bundle.BLbar
    Cv, Cbv, gv = bundle.C, bundle.Cbar, bundle.g
    Bc = BLbar.conj()

    dzC, dzbC = C.grad("z", n).value, C.grad("zbar", n).value
    dvC, dvbC = C.grad("eta", n).value, C.grad("etabar", n).value
    dzCb = Cbar.grad("z", n).value
    dvCb = Cbar.grad("eta", n).value

    # Chern-Finsler: L^i_{jk} on unbarred slots, conj(L) on barred slots for kbar
    C_cf_h = (_adapted(dzC, dvC, N)
              - np.einsum("ilk,irh->lrhk", Lcf, Cv)
              - np.einsum("ihk,lri->lrhk", Lcf, Cv))
    C_cf_hbar = (_adapted(dzbC, dvbC, N.conj())
                 - np.einsum("mrk,lmh->lrhk", Lcf.conj(), Cv))
    Cbar_cf_h = _adapted(dzCb, dvCb, N) - np.einsum("ilk,irh->lrhk", Lcf, Cbv)

    C_B_h = (_adapted(dzC, dvC, cN)
             - np.einsum("ilk,irh->lrhk", BL, Cv)
             - np.einsum("mrk,lmh->lrhk", Bc, Cv)
             - np.einsum("ihk,lri->lrhk", BL, Cv))
    C_B_hbar_arg = (_adapted(dzCb, dvCb, cN)
                    - np.einsum("ilk,irh->lrhk", BL, Cbv)
                    - np.einsum("mrk,lmh->lrhk", Bc, Cbv)
                    - np.einsum("mhk,lrm->lrhk", Bc, Cbv))
    C_B_bar = (_adapted(dzbC, dvbC, cN.conj())
               - np.einsum("ilk,irh->lrhk", BLbar, Cv)
               - np.einsum("mrk,lmh->lrhk", BL.conj(), Cv)
               - np.einsum("ihk,lri->lrhk", BLbar, Cv))

    # g_{i jbar B|k} as a jet so its eta-derivatives are available
    gJ, BLJ, BLbJ = J["g"], J["BL"], J["BLbar"]
    BcJ = BLbJ.conj()
    cdg = J["dzg"] - jeinsum("mk,ijm->ijk", J["cN"], C)
    gBJ = cdg - jeinsum("lik,lj->ijk", BLJ, gJ) - jeinsum("mjk,im->ijk", BcJ, gJ)
    g_cf = J["dzg"].value - np.einsum("mk,ijm->ijk", N, Cv) - np.einsum("lik,lj->ijk", Lcf, gv)

    return CovDerivs(
        C_cf_h=C_cf_h,
        C_cf_hbar=C_cf_hbar,
        Cbar_cf_h=Cbar_cf_h,
        C_B_h=C_B_h,
        C_B_hbar_arg=C_B_hbar_arg,
        C_B_bar=C_B_bar,
        g_B=gBJ.value,
        g_cf=g_cf,
        Bc=Bc,
        jets={"g_B": gBJ, "Bc": BcJ},
    )


# --------------------------------------------------------------------------
# identities

def scaled_residual(diff, *ingredients) -> float:
    """max|diff| / (1 + max|entry| over the ingredients)."""
    diff = np.asarray(diff)
    scale = max((float(np.max(np.abs(x), initial=0.0)) for x in ingredients), default=0.0)
    return float(np.max(np.abs(diff), initial=0.0)) / (1.0 + scale)


def bundle_identities(b: ConnectionBundle) -> dict:
    """Structural identities of a single bundle, as scaled residuals."""
    eta = b.eta
    twoG = 2 * b.G
    Neta = b.N @ eta
    cNeta = b.cN @ eta
    BLee = np.einsum("ijk,j,k->i", b.BL, eta, eta)
    return {
        "spray_N": scaled_residual(twoG - Neta, twoG, Neta),
        "spray_cN": scaled_residual(twoG - cNeta, twoG, cNeta),
        "spray_BL": scaled_residual(twoG - BLee, twoG, BLee),
        "BLbar_etabar": scaled_residual(b.BLbar @ eta.conj(), b.BLbar),
        "L_cf_two_ways": scaled_residual(b.L_cf - b.L_cf_alt, b.L_cf, b.L_cf_alt),
        "BL_symmetric": scaled_residual(b.BL - b.BL.transpose(0, 2, 1), b.BL),
        "cL_symmetric": scaled_residual(b.cL - b.cL.transpose(0, 2, 1), b.cL),
        "C_symmetric": scaled_residual(b.C - b.C.transpose(2, 1, 0), b.C),
        "Cbar_mirror": scaled_residual(b.Cbar - b.C.conj().transpose(1, 0, 2), b.C),
        "g_hermitian": scaled_residual(b.g - b.g.conj().T, b.g),
    }


def homogeneity(source, sample: TangentSample, lam: complex) -> float:
    """Relative deviation of L(z, lam eta) from |lam|^2 L(z, eta)."""
    L = _L_expr(source)
    v0 = dsl.evaluate_at(L, sample.z, sample.eta)
    v1 = dsl.evaluate_at(L, sample.z, lam * sample.eta)
    return abs(v1 - abs(lam) ** 2 * v0) / max(1e-300, abs(lam) ** 2 * abs(v0))


def compatibility(b: ConnectionBundle, d: CovDerivs) -> dict:
    eta = b.eta
    n = b.n
    L_from_g = eta @ b.g @ eta.conj()
    vert = np.eye(n) + np.einsum("ijk,j->ik", b.C_cf, eta)
    horiz = np.einsum("ijk,j->ik", b.L_cf, eta) - b.N
    return {
        "g_contract_L": abs(L_from_g - b.L) / (1 + abs(b.L)),
        "C_eta": scaled_residual(np.einsum("ijk,k->ij", b.C, eta), b.C),
        "g_cf_h": scaled_residual(d.g_cf, b.g, b.L_cf, b.jets["dzg"].value),
        "eta_v": scaled_residual(vert - np.eye(n), b.C_cf),
        "eta_h": scaled_residual(horiz, b.L_cf, b.N),
    }


def cartan_cf_identities(b: ConnectionBundle, d: CovDerivs) -> dict:
    """C-F horizontal derivatives of the Cartan tensors against vertical derivatives of L_cf."""
    n = b.n
    J = b.jets
    g, C = b.g, b.C
    out = {}

    dL = J["L_cf"].grad("eta", n).value        # [i, l, k, h]
    dLb = J["L_cf"].grad("etabar", n).value
    rhs1 = np.einsum("ilkh,ir->lrhk", dL, g)
    out["cartan_h_vertical_L"] = scaled_residual(d.C_cf_h - rhs1, d.C_cf_h, rhs1)
    rhs2 = np.einsum("ilkh,ir->lrhk", dLb, g) + np.einsum("ikh,irl->lrhk", b.dNbar, C)
    out["cartan_bar_h_vertical_L"] = scaled_residual(d.Cbar_cf_h - rhs2, d.Cbar_cf_h, rhs2)
    return out


def berwald_cartan_identities(b: ConnectionBundle, d: CovDerivs) -> dict:
    """Identities for Berwald covariant derivatives of the Cartan tensor, each side computed independently.

    ``cartan_b_hbar_vertical_split`` is the same identity read with the left
    barred index free of the right one; it is reported, not expected to vanish.
    """
    n = b.n
    J = b.jets
    eta, etab = b.eta, b.eta.conj()
    g, C, Cbar = b.g, b.C, b.Cbar
    out = {}
    out["berwald_mixed_etabar"] = scaled_residual(b.BLbar @ etab, b.BLbar)

    lhs = -np.einsum("lrhk,k->lrh", d.C_B_h, eta)
    gB, Bc = d.g_B, d.Bc
    rhs = gB + gB.transpose(2, 1, 0) + np.einsum("mrh,lm->lrh", Bc, g) + np.einsum("mrl,hm->lrh", Bc, g)
    out["cartan_b0_metric_b"] = scaled_residual(lhs - rhs, lhs, rhs)

    lhs3 = 2 * np.einsum("ih,ir->rh", b.dGbar, g)
    mid = np.einsum("lrhk,l,k->rh", d.C_B_hbar_arg, eta, eta)
    right = np.einsum("lrhk,l,k->rh", d.Cbar_cf_h, eta, eta)
    out["spray_bar_cartan"] = max(scaled_residual(lhs3 - mid, lhs3, mid), scaled_residual(mid - right, mid, right))

    gBJ, BcJ, BLJ = d.jets["g_B"], d.jets["Bc"], J["BL"]
    rhs4 = (gBJ.grad("eta", n).value.transpose(0, 1, 3, 2)
            + np.einsum("likh,lj->ijhk", BLJ.grad("eta", n).value, g)
            + np.einsum("mjkh,im->ijhk", BcJ.grad("eta", n).value, g))
    out["cartan_b_h_vertical"] = scaled_residual(d.C_B_h - rhs4, d.C_B_h, rhs4)

    rhs5 = (gBJ.grad("etabar", n).value.transpose(0, 1, 3, 2)
            + np.einsum("likh,lj->ijhk", BLJ.grad("etabar", n).value, g)
            + np.einsum("mjkh,im->ijhk", BcJ.grad("etabar", n).value, g)
            + np.einsum("lkh,ijl->ijhk", b.BLbar, C)
            - np.einsum("mhk,ijm->ijhk", Bc, Cbar))
    out["cartan_b_hbar_vertical"] = scaled_residual(d.C_B_hbar_arg - rhs5, d.C_B_hbar_arg, rhs5)
    # alternative reading: free barred index on the left (r) independent of the one on the right (j)
    split = d.C_B_hbar_arg[:, :, None] - rhs5[:, None, :]
    out["cartan_b_hbar_vertical_split"] = scaled_residual(split, d.C_B_hbar_arg, rhs5)
    return out
