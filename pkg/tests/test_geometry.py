import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinsler import TangentSample, zoo
from cfinsler.geometry import (
    berwald_cartan_identities, bundle_identities, cartan_cf_identities, chern_finsler, compatibility,
    connection, cov_derivs, fundamental, homogeneity, spray_and_canonical,
)

# Randers a = I, b = (z1^2, 0) at the shared point; reference from symbolic differentiation
RANDERS_QUAD = {
    "N": [[0.42528751596176184 - 0.01849076156355486j, 0j], [0.06732895622760053 - 0.09725293677320077j, 0j]],
    "G": [0.15069970674297212 + 0.03605698504893198j, 0.03329042835698026 - 0.027305632247860215j],
    "dGbar": [[-0.005146773545190541 - 0.002900204471843023j, 0.007893397907105582 - 0.0034180773771991663j],
              [0.008850974149752364 - 0.0038327365303869147j, -0.0033428828765332597 + 0.013639938160453228j]],
    "L_cf": [[[0.5393261019643073 - 0.17977536732143576j, 0j], [0.019502543593628876 + 0.013343845616693441j, 0j]],
             [[0.008517192289748699 - 0.025091188096827248j, 0j], [0.1878289466847033 - 0.0626096488949011j, 0j]]],
    "BL": [[[0.543279798895232 - 0.1810932662984107j, 0.004743255684309738 + 0.003245385468211926j],
            [0.004743255684309738 + 0.003245385468211926j, 0.0004322708644477741 + 0.008824651549824071j]],
           [[0.0019976493846701492 - 0.00588496710619044j, 0.12193088744795946 - 0.04064362914931982j],
            [0.12193088744795946 - 0.04064362914931982j, -0.03548745786710324 - 0.02428089222486011j]]],
}

# one generic point per z-independent check; each zoo entry has its own valid region
COORD = st.floats(-0.45, 0.45)


def test_against_symbolic_reference(point):
    b = connection(zoo.make("randers", b=["z1^2", "0"]), point)
    for key, want in RANDERS_QUAD.items():
        assert np.max(np.abs(getattr(b, key) - np.array(want))) < 1e-12, key


def test_hermitian_nonkahler_by_hand(point):
    # a = diag(exp(|w|^2), 1): only N^1_2 = conj(w) eta^1 and L^1_{12} = conj(w) survive
    b = connection(zoo.make("hermitian_nonkahler"), point)
    wbar = np.conj(point.z[1])
    N = np.zeros((2, 2), complex)
    N[0, 1] = wbar * point.eta[0]
    assert np.max(np.abs(b.N - N)) < 1e-15
    L = np.zeros((2, 2, 2), complex)
    L[0, 0, 1] = wbar
    assert np.max(np.abs(b.L_cf - L)) < 1e-15
    T = L - L.transpose(0, 2, 1)
    assert np.max(np.abs(b.T - T)) < 1e-15
    assert np.max(np.abs(b.dGbar)) == 0


def test_flat_vanishes(point):
    b = connection(zoo.make("flat"), point)
    g, g_inv = fundamental(zoo.make("flat"), point)
    assert np.array_equal(g, np.eye(2)) and np.array_equal(g_inv, np.eye(2))
    for x in (*chern_finsler(b), *spray_and_canonical(b)):
        assert not np.any(x)
    d = cov_derivs(b)
    for x in (d.C_cf_h, d.C_cf_hbar, d.C_B_h, d.C_B_bar, d.g_B):
        assert not np.any(x)


def test_purely_hermitian_is_eta_independent(point):
    spec = zoo.make("hermitian_kahler_potential")
    other = TangentSample(point.z, [0.1 - 0.9j, 0.6])
    g1 = connection(spec, point).g
    g2 = connection(spec, other).g
    assert np.max(np.abs(g1 - g2)) < 1e-14
    b = connection(spec, point)
    assert np.max(np.abs(b.C)) == 0
    assert np.max(np.abs(np.einsum("ijk,j->ik", b.T, point.eta))) < 1e-9
    assert np.max(np.abs(b.dGbar)) < 1e-10
    assert np.max(np.abs(b.L_cf - b.cL)) < 1e-9 and np.max(np.abs(b.cL - b.BL)) < 1e-9
    assert np.max(np.abs(b.cLbar)) < 1e-12


def test_randers_eta_lower(point):
    from cfinsler.alphabeta import randers_aux
    spec = zoo.make("randers", b=["0.3+0.2*conj(z2)", "0.1*z1"])
    b = connection(spec, point)
    r = randers_aux(spec, point)
    assert np.max(np.abs(b.g @ point.eta.conj() - r.eta_low)) < 1e-8


def test_antonelli_shimada_closed_form(point):
    b = connection(zoo.make("antonelli_shimada"), point)
    zb, wb = point.z.conj()
    assert np.allclose([b.L_cf[0, 0, 0], b.L_cf[1, 1, 0], b.L_cf[0, 0, 1], b.L_cf[1, 1, 1]], [zb, zb, wb, wb],
                       atol=1e-14)
    assert np.max(np.abs(b.dGbar)) < 1e-12


@pytest.mark.parametrize("id", zoo.IDS)
@settings(max_examples=4, deadline=None)
@given(xs=st.lists(COORD, min_size=8, max_size=8))
def test_identities_hold_everywhere(id, xs):
    spec = zoo.make(id)
    center = np.array(spec.center)
    s = TangentSample(center + np.array([complex(xs[0], xs[1]), complex(xs[2], xs[3])]),
                      [complex(0.55 + xs[4], xs[5]), complex(-0.5 + xs[6], xs[7])])
    b = connection(spec, s)
    d = cov_derivs(b)
    res = {**bundle_identities(b), **compatibility(b, d), **cartan_cf_identities(b, d),
           **berwald_cartan_identities(b, d)}
    res.pop("cartan_b_hbar_vertical_split")
    assert max(res.values()) < 1e-9, {k: v for k, v in res.items() if v >= 1e-9}
    assert homogeneity(spec, s, 0.7 - 1.1j) < 1e-12


def test_split_reading_is_not_an_identity(point):
    spec = zoo.make("antonelli_shimada")
    b = connection(spec, point)
    res = berwald_cartan_identities(b, cov_derivs(b))
    assert res["cartan_b_hbar_vertical"] < 1e-12
    assert res["cartan_b_hbar_vertical_split"] > 1e-3


def test_accepts_bare_expression(point):
    from cfinsler.metric import assemble_L
    spec = zoo.make("randers")
    a = connection(spec, point)
    b = connection(assemble_L(spec), point)
    assert np.max(np.abs(a.BL - b.BL)) == 0
