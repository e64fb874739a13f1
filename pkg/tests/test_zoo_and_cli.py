import json

import pytest

from cfinsler import dsl, load_metric, zoo
from cfinsler.cli import main
from cfinsler.errors import SchemaError, UnknownId, ValidationError

FAST = ["--samples", "2", "--eta-samples", "2"]


def test_ids_and_defaults():
    assert set(zoo.IDS) == {"flat", "hermitian_kahler_potential", "hermitian_nonkahler", "antonelli_shimada",
                            "randers", "kropina", "local_minkowski"}
    flat = zoo.make("flat", n=3)
    assert flat.n == 3 and flat.kind == "hermitian"
    assert zoo.make("antonelli_shimada", sigma="(z1*conj(z1)+z2*conj(z2))/2").n == 2
    assert zoo.make("local_minkowski").kind == "custom"
    assert [dsl.evaluate_at(x, [0, 0]) for x in zoo.make("randers").b] == [0.3, 0]


def test_zoo_errors():
    with pytest.raises(UnknownId):
        zoo.make("finsler_sphere")
    with pytest.raises(ValidationError):
        zoo.make("kropina", a=[["1", "0"], ["0", "1"]], b=["0", "0"])
    with pytest.raises(SchemaError):
        zoo.make("flat", sigma="0")


def test_antonelli_shimada_rejects_degenerate_sigma():
    with pytest.raises(ValidationError):
        zoo.make("antonelli_shimada", sigma="log(z1)")


def test_export_roundtrip():
    for id in zoo.IDS:
        assert load_metric(zoo.export(id)) == zoo.make(id)


def test_classify_flat(tmp_path):
    out = tmp_path / "r.json"
    assert main(["classify", "--zoo", "flat", "--out", str(out), *FAST]) == 0
    doc = json.loads(out.read_text())
    assert set(doc["lattice"].values()) == {"holds"}


def test_classify_antonelli_shimada(tmp_path):
    out = tmp_path / "r.json"
    code = main(["classify", "--zoo", "antonelli_shimada", "--sigma", "(z1*conj(z1)+z2*conj(z2))/2",
                 "--out", str(out), *FAST])
    assert code == 0
    assert json.loads(out.read_text())["lattice"]["generalized_berwald"] == "holds"


def test_classify_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x", "dimension": 2, "kind": "hermitian", "extra": 1}))
    assert main(["classify", "--metric", str(bad)]) == 1
    assert "SchemaError" in capsys.readouterr().err
    assert main(["classify", "--metric", str(tmp_path / "missing.json")]) == 1


def test_classify_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["classify", "--zoo", "randers", "--b", "z1^2,0", "--seed", "3", *FAST]
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_classify_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["classify", "--zoo", "kropina", "--format", "csv", "--out", str(out), *FAST]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "predicate_id,sample_index,residual"
    assert len(lines) > 4


def test_check_suites(tmp_path):
    out = tmp_path / "c.json"
    assert main(["check", "cartan-berwald", "--zoo", "flat", "--out", str(out), *FAST]) == 0
    doc = json.loads(out.read_text())
    assert all(i["max_residual"] == 0 for i in doc["identities"])
    assert main(["check", "cartan-cf", "--zoo", "randers", "--out", str(out), *FAST]) == 0
    assert all(i["max_residual"] < 1e-7 for i in json.loads(out.read_text())["identities"])
    for suite in ("connection", "homogeneity"):
        assert main(["check", suite, "--zoo", "antonelli_shimada", "--out", str(out), *FAST]) == 0
    assert main(["check", "no-such-suite", "--zoo", "flat"]) == 1


def test_dump(tmp_path, capsys):
    out = tmp_path / "d.json"
    sample = "0.3,0.1,-0.2,0.25,0.7,0.2,0.4,-0.3"
    assert main(["dump", "--zoo", "antonelli_shimada", "--sample", sample, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert "conventions" in doc
    L = doc["tensors"]["L_cf"]
    assert abs(L["re"][0][0][0] - 0.3) < 1e-12 and abs(L["im"][0][0][0] + 0.1) < 1e-12
    assert main(["dump", "--zoo", "flat", "--out", str(out), *FAST]) == 0
    assert not any(v for v in json.loads(out.read_text())["tensors"]["N"]["re"][0])
    assert main(["dump", "--zoo", "kropina", "--sample", "0,0,0,0,0,0,1,0"]) == 1
    assert "DomainError" in capsys.readouterr().err
    assert main(["dump", "--zoo", "flat", "--sample", "1,2,3"]) == 1


def test_usage_errors():
    assert main(["classify"]) == 1
    assert main(["classify", "--zoo", "flat", "--samples", "0"]) == 1
    assert main(["classify", "--zoo", "flat", "--tol", "-1"]) == 1
    assert main([]) == 1


def test_inconsistent_report_exits_2(monkeypatch, tmp_path):
    import cfinsler.cli as cli
    from cfinsler.classifier import ClassificationReport

    def fake(spec, plan, tol):
        return ClassificationReport(spec.name, plan.describe(), tol, [], {},
                                    [{"theorem": "landsberg_characterizations", "consistent": False}], [])

    monkeypatch.setattr(cli, "classify", fake)
    assert main(["classify", "--zoo", "flat", "--out", str(tmp_path / "r.json")]) == 2
