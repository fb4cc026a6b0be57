import copy
import json

import numpy as np
import pytest

from hypnet import io
from hypnet.classifier import classify
from hypnet.models import make_model

DOC = {
    "name": "loop",
    "graph": {"edges": [{"id": "e1", "tail": "v", "head": "v", "length": 1.0, "size": 2}]},
    "coefficients": {"e1": {"M": [[[0, -1], [-1, 0]]], "N": [[[0, 0], [0, 0]]]}},
    "boundary": {"global": [[1, 0, 1, 0], [0, 1, 0, 1]]},
}


def test_minimal_document_and_q_synthesis():
    s = io.from_dict(DOC)
    assert s.name == "loop"
    assert s.synthesized_Q == ("e1",)
    assert np.allclose(s.coefficients["e1"].Q(0.3), np.eye(2))
    r = classify(s)
    assert r.unitary_group.value == "yes"
    assert any("synthesized" in n for n in r.notes)
    # synthesized Q is not written back
    assert "Q" not in io.to_dict(s)["coefficients"]["e1"]


def test_complex_pairs():
    d = copy.deepcopy(DOC)
    d["coefficients"]["e1"] = {"M": [[[0, [0, 1]], [[0, -1], 0]]], "Q": [[[1, 0], [0, 1]]]}
    s = io.from_dict(d)
    assert s.coefficients["e1"].M(0.0)[0, 1] == 1j
    out = io.to_dict(s)["coefficients"]["e1"]["M"]
    assert out == [[[0.0, [0.0, 1.0]], [[0.0, -1.0], 0.0]]]


def test_round_trip_file(tmp_path):
    s = make_model("dirac_star").system
    io.dump(s, tmp_path / "d.json")
    s2 = io.load(tmp_path / "d.json")
    assert (tmp_path / "d.json").read_text() == io.dumps(s2)
    for e in s.graph.edges:
        for name in "MNQ":
            assert np.allclose(getattr(s.coefficients[e.id], name)(0.2),
                               getattr(s2.coefficients[e.id], name)(0.2))
    for v in s.graph.vertices:
        assert np.allclose(s.Y(v), s2.Y(v))


def _bad(mutate):
    d = copy.deepcopy(DOC)
    mutate(d)
    return d


@pytest.mark.parametrize("mutate,fragment", [
    (lambda d: d["graph"]["edges"][0].update(length=-1), "graph.edges[0].length"),
    (lambda d: d["coefficients"]["e1"]["N"][0][0].__setitem__(1, "x"), "coefficients.e1.N[0][0][1]"),
    (lambda d: d["coefficients"]["e1"].update(M=[[[0, 1, 2], [1, 0, 2]]]), "must be 2x2"),
    (lambda d: d["coefficients"].update(e9={"M": [[[1]]]}), "unknown edges"),
    (lambda d: d["coefficients"].pop("e1"), "no coefficients for edge 'e1'"),
    (lambda d: d.update(boundary={"global": [[1, 0, 1]]}), "length 4"),
    (lambda d: d.update(boundary={"local": {"w": []}}), "unknown vertex"),
    (lambda d: d.update(extra=1), "extra"),
    (lambda d: d["graph"]["edges"].append(dict(d["graph"]["edges"][0])), "graph"),
    (lambda d: d.update(simulation={"initial": {"e2": {"profile": "sine"}}}), "unknown edge"),
    (lambda d: d.update(simulation={"config": {"cfl": 2}}), "simulation.config.cfl"),
])
def test_schema_errors(mutate, fragment):
    with pytest.raises(io.SystemFileError) as exc:
        io.from_dict(_bad(mutate))
    assert fragment in str(exc.value)


def test_invalid_json_location():
    with pytest.raises(io.SystemFileError, match=r"line 2"):
        io.loads('{\n  "name": }')


def test_tolerance_override_round_trip():
    d = copy.deepcopy(DOC)
    d["tolerances"] = {"herm_tol": 1e-8}
    s = io.from_dict(d)
    assert s.tolerances.herm_tol == 1e-8
    assert io.to_dict(s)["tolerances"] == {"herm_tol": 1e-8}


def test_dumps_is_valid_json_with_format():
    doc = json.loads(io.dumps(make_model("second_sound").system))
    assert doc["format"] == io.FORMAT_VERSION
    io.validate(doc)
