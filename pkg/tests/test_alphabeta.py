import numpy as np
import pytest

from cfinsler import SamplePlan, TangentSample, classify, zoo
from cfinsler.alphabeta import (
    ab_aux, alpha_spec, kropina_aux, kropina_connection, kropina_spray, randers_aux, randers_spray,
    randers_weak_kahler_vector,
)
from cfinsler.classifier import kropina_gb_residual, randers_gb_residual, randers_weakly_kahler_residual
from cfinsler.errors import DomainError, KindError
from cfinsler.geometry import connection
from cfinsler.metric import plan_samples

KAHLER_A = [["exp(z1*conj(z1))", "0"], ["0", "1"]]
RANDERS_CASES = {
    "constant": {},
    "quadratic": {"b": ["z1^2", "0"]},
    "antiholomorphic": {"b": ["0.3+0.2*conj(z2)", "0.1*z1"]},
    "kahler_alpha": {"a": KAHLER_A, "b": ["0.2*z2", "0.3"]},
}
KROPINA_CASES = {
    "constant": {},
    "linear": {"b": ["1+0.5*z1", "0"]},
    "antiholomorphic": {"b": ["1", "0.4*conj(z1)"]},
    "kahler_alpha": {"a": KAHLER_A, "b": ["0.3*z2", "1"]},
}


@pytest.mark.parametrize("case", sorted(RANDERS_CASES))
def test_randers_spray_closed_form(case, point):
    spec = zoo.make("randers", **RANDERS_CASES[case])
    G = connection(spec, point).G
    assert np.max(np.abs(randers_spray(randers_aux(spec, point)) - G)) < 1e-8 * (1 + np.max(np.abs(G)))


@pytest.mark.parametrize("case", sorted(KROPINA_CASES))
def test_kropina_closed_forms(case, point):
    spec = zoo.make("kropina", **KROPINA_CASES[case])
    b = connection(spec, point)
    kr = kropina_aux(spec, point)
    assert np.max(np.abs(kropina_spray(kr) - b.G)) < 1e-8 * (1 + np.max(np.abs(b.G)))
    assert np.max(np.abs(kropina_connection(kr) - b.N)) < 1e-8 * (1 + np.max(np.abs(b.N)))
    assert np.max(np.abs(kr.eta_low - b.g @ point.eta.conj())) < 1e-8


def test_alpha_quantities_match_engine(point):
    spec = zoo.make("randers", **RANDERS_CASES["kahler_alpha"])
    x = ab_aux(spec, point)
    a = connection(alpha_spec(spec), point)
    assert np.max(np.abs(x.aN - a.N)) < 1e-12
    assert np.max(np.abs(x.aG - a.G)) < 1e-12


def test_hand_evaluated_scalars(point):
    # a = I, b = (z1^2, 0): scalar = conj(z1^2 eta1) * 2 z1 eta1^2
    quad = ab_aux(zoo.make("randers", b=["z1^2", "0"]), point)
    assert abs(quad.gb_scalar() - (0.024379999999999992 - 0.0010600000000000036j)) < 1e-15
    # a = I, b = (z1, 0): scalar = conj(z1 eta1) eta1^2
    lin = ab_aux(zoo.make("kropina", b=["z1", "0"], base_point=[0.8, 0, 0, 0]), point)
    assert abs(lin.gb_scalar() - (0.12189999999999998 - 0.005299999999999999j)) < 1e-15


def test_weak_kahler_vector_agrees_with_engine():
    for case in ("quadratic", "antiholomorphic", "kahler_alpha"):
        spec = zoo.make("randers", **RANDERS_CASES[case])
        report = classify(spec, SamplePlan(z_count=2, eta_count=2))
        assert report.crosscheck("randers_weakly_kahler")["consistent"], case


def test_randers_residuals():
    spec = zoo.make("randers")
    samples = plan_samples(spec, SamplePlan(z_count=2, eta_count=2))
    assert randers_gb_residual(spec, samples) == 0
    assert randers_weakly_kahler_residual(spec, samples) == 0
    quad = zoo.make("randers", b=["z1^2", "0"])
    assert randers_gb_residual(quad, plan_samples(quad, SamplePlan(z_count=2, eta_count=2))) > 1e-3


def test_kropina_implications():
    lin = zoo.make("kropina", b=["z1", "0"], base_point=[0.8, 0, 0, 0])
    r = kropina_gb_residual(lin, plan_samples(lin, SamplePlan(z_count=2, eta_count=2)))
    # the criterion fails here, and so does G = aG
    assert r["scalar"] > 1e-3 and r["spray_gap"] > 1e-3
    report = classify(lin, SamplePlan(z_count=2, eta_count=3))
    for name in ("kropina_spray", "kropina_connection", "kropina_generalized_berwald", "kropina_complex_berwald"):
        assert report.crosscheck(name)["consistent"], name


def test_kind_errors(point):
    flat = zoo.make("flat")
    with pytest.raises(KindError):
        randers_aux(flat, point)
    with pytest.raises(KindError):
        kropina_aux(zoo.make("randers"), point)
    with pytest.raises(KindError):
        randers_gb_residual(zoo.make("kropina"), plan_samples(zoo.make("kropina"), SamplePlan(1, 1)))


def test_kropina_small_beta(point):
    with pytest.raises(DomainError):
        ab_aux(zoo.make("kropina"), TangentSample(point.z, [1e-9, 1]))


def test_randers_degenerate_delta_is_reported(point):
    r = randers_aux(zoo.make("randers"), point)
    r.delta = 0.0
    from cfinsler.errors import DegenerateDelta
    with pytest.raises(DegenerateDelta):
        randers_weak_kahler_vector(r)
