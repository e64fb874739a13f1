import json

import numpy as np
import pytest

from cfinsler import TangentSample, dsl, load_metric, make_spec, zoo
from cfinsler.errors import ExprSyntaxError, SchemaError, ValidationError
from cfinsler.metric import (
    assemble_L, dump_metric, linear_change, linear_samples, plan_samples, scaled, spec_to_dict,
)
from cfinsler.sample import SamplePlan

FLAT = {"name": "flat", "dimension": 2, "kind": "hermitian", "a": [["1", "0"], ["0", "1"]]}


def L_at(spec, z, eta):
    return dsl.evaluate_at(assemble_L(spec), z, eta)


def test_flat_file(tmp_path):
    path = tmp_path / "flat.json"
    path.write_text(json.dumps(FLAT))
    spec = load_metric(str(path))
    assert spec.n == 2 and spec.kind == "hermitian"
    assert L_at(spec, [0.4, 0.1j], [1, 0]) == 1


def test_randers_norm_and_value():
    spec = load_metric(json.dumps({**FLAT, "kind": "randers", "b": ["0.3", "0"]}))
    s = TangentSample([0.2, -0.1j], [1, 0])
    # ||b||^2 = a^{jbar i} b_i conj(b_j)
    b = np.array([dsl.evaluate_at(x, s.z) for x in spec.b])
    assert abs(np.vdot(b, b) - 0.09) < 1e-15
    assert abs(L_at(spec, s.z, s.eta) - 1.69) < 1e-14


def test_antonelli_shimada_value():
    spec = make_spec("as", "antonelli_shimada", 2, sigma="0")
    assert abs(L_at(spec, [0, 0], [1, 1]) - np.sqrt(2)) < 1e-15


def test_kropina_zero_b_rejected():
    with pytest.raises(ValidationError):
        load_metric({**FLAT, "kind": "kropina", "b": ["0", "0"]})


def test_schema_errors():
    with pytest.raises(SchemaError):
        load_metric({**FLAT, "colour": "red"})
    with pytest.raises(SchemaError):
        load_metric({**FLAT, "b": ["1", "0"]})  # b is not a hermitian field
    with pytest.raises(SchemaError):
        load_metric({**FLAT, "a": [["1", "0"], ["0", "eta1"]]})
    with pytest.raises(SchemaError):
        load_metric({**FLAT, "a": [["1", "0"], ["0", "z3"]]})
    with pytest.raises(SchemaError):
        make_spec("x", "antonelli_shimada", 3, sigma="0")
    with pytest.raises(SchemaError):
        load_metric("{not json")
    with pytest.raises(SchemaError):
        load_metric("/no/such/file.json")


def test_syntax_error_carries_field():
    with pytest.raises(ExprSyntaxError) as info:
        load_metric({**FLAT, "a": [["1", "0"], ["0", "1+*2"]]})
    assert info.value.field == "a[1][1]"


def test_validation_failures_have_witness():
    with pytest.raises(ValidationError) as info:
        load_metric({**FLAT, "a": [["1", "z1"], ["0", "1"]]})
    assert info.value.witness is not None
    with pytest.raises(ValidationError):
        load_metric({**FLAT, "a": [["1", "0"], ["0", "-1"]]})
    with pytest.raises(ValidationError):
        make_spec("c", "custom", 2, L="abs2(eta1) + eta2")


def test_dump_roundtrip():
    for id in zoo.IDS:
        spec = zoo.make(id)
        again = load_metric(dump_metric(spec))
        assert again == spec
        assert spec_to_dict(again) == spec_to_dict(spec)


def test_scaled_doubles_L(point):
    for id in zoo.IDS:
        spec = zoo.make(id)
        a = L_at(spec, point.z, point.eta)
        b = L_at(scaled(spec, 2.0), point.z, point.eta)
        assert abs(b - 2 * a) < 1e-12 * abs(a), id


def test_linear_change_pulls_back_L(point):
    A = np.array([[1.0, 0.3], [0.2j, 1.0]])
    for id in zoo.IDS:
        spec = zoo.make(id)
        moved = linear_change(spec, A)
        # z' = A z, eta' = A eta
        assert abs(L_at(moved, A @ point.z, A @ point.eta) - L_at(spec, point.z, point.eta)) < 1e-12, id
    samples = plan_samples(zoo.make("flat"), SamplePlan(z_count=2, eta_count=2))
    moved = linear_samples(samples, A)
    assert np.allclose(moved.flat[0].eta, A @ samples.flat[0].eta)
