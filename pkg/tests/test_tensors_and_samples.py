import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinsler import SamplePlan, TangentSample, draw_samples, zoo
from cfinsler.errors import DomainError, ShapeError, SingularMatrix, ValidationError
from cfinsler.geometry import connection
from cfinsler.tensors import contract, invert, is_hermitian, is_positive_definite


def test_invert_examples():
    assert np.allclose(invert(np.eye(2)), np.eye(2))
    assert np.allclose(invert(np.diag([2.0, 1.0])), np.diag([0.5, 1.0]))


def test_invert_randers_metric(point):
    g = connection(zoo.make("randers"), point).g
    assert np.max(np.abs(invert(g) @ g - np.eye(2))) < 1e-12


def test_singular_and_indefinite():
    with pytest.raises(SingularMatrix):
        invert(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularMatrix):
        invert(np.diag([1.0, -1.0]))
    with pytest.raises(SingularMatrix):
        invert(np.diag([1.0, 1e-14]))
    assert not is_positive_definite(np.diag([1.0, -0.5]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_invert_random_hpd(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    g = m @ m.conj().T + 0.5 * np.eye(n)
    h = invert(g)
    assert is_hermitian(h)
    assert np.max(np.abs(h @ g - np.eye(n))) < 1e-10
    assert np.allclose(h, np.linalg.inv(g), atol=1e-10)


def test_contract_examples(point):
    b = connection(zoo.make("randers"), point)
    eta = point.eta
    assert np.max(np.abs(contract(b.C, eta, 2))) < 1e-10
    assert abs(contract(b.g, [eta, eta.conj()], [0, 1]) - b.L) < 1e-12
    assert np.allclose(contract(np.eye(2), eta, 1), eta)


def test_contract_shape_errors():
    with pytest.raises(ShapeError):
        contract(np.zeros((2, 2)), np.ones(3), 0)
    with pytest.raises(ShapeError):
        contract(np.zeros((2, 2)), [np.ones(2), np.ones(2)], [0, 0])
    with pytest.raises(ShapeError):
        contract(np.zeros((2, 2)), np.ones(2), 2)


def test_sample_basics():
    with pytest.raises(DomainError):
        TangentSample([0, 0], [0, 0])
    s = TangentSample([0.1 + 0.2j, 0.3], [1, -1j])
    assert TangentSample.from_reals(s.to_reals()).to_reals() == s.to_reals()
    with pytest.raises(ValueError):
        s.z[0] = 1


def test_draw_samples_deterministic_and_in_range():
    plan = SamplePlan(z_count=5, eta_count=3, seed=9, radius=0.4)
    a = draw_samples(plan, 2, center=[1 + 1j, 0])
    b = draw_samples(plan, 2, center=[1 + 1j, 0])
    assert len(a) == 15 and len(a.groups) == 5
    for x, y in zip(a.flat, b.flat):
        assert x.to_reals() == y.to_reals()
    for group in a.groups:
        assert all(np.array_equal(s.z, group[0].z) for s in group)
    for s in a.flat:
        assert np.all(np.abs(s.z - np.array([1 + 1j, 0])) <= 0.4 + 1e-12)
        assert np.all((np.abs(s.eta) >= 0.25 - 1e-12) & (np.abs(s.eta) <= 1 + 1e-12))


def test_draw_samples_rejects_impossible_filter():
    with pytest.raises(ValidationError):
        draw_samples(SamplePlan(z_count=1, eta_count=1), 2, accept=lambda s: False, max_tries=5)


def test_plan_validation():
    with pytest.raises(ValueError):
        SamplePlan(z_count=0)
    assert SamplePlan().describe() == {"seed": 42, "z_count": 8, "eta_count": 8, "radius": 0.5}
