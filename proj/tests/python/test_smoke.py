import json
import math
import os

import pytest

import bvkit

DATA = os.environ.get("BVK_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data", "systems"))


def system(name):
    return bvkit.Diagram.load(os.path.join(DATA, name + ".obd"))


def test_heights_and_round_trip():
    fib = system("fibonacci")
    assert fib.heights(3) == [3, 2]
    assert bvkit.Diagram.parse(fib.serialize()).serialize() == fib.serialize()
    assert system("dyadic").heights(70) == [2**70]


def test_frobenius_and_represent():
    assert bvkit.frobenius([3, 5]) == 8
    assert bvkit.represent(8, [3, 5]) == [1, 1]
    assert bvkit.represent(7, [3, 5]) is None
    with pytest.raises(ValueError):
        bvkit.frobenius([4, 6])


def test_spectrum_and_divisibility():
    spectrum, complete = bvkit.periodic_spectrum(system("dyadic"))
    assert complete and spectrum == {2: math.inf}
    assert bvkit.divides_unit(system("dyadic"), 8) == ("yes", 3)
    assert bvkit.divides_unit(system("triadic"), 2)[0] == "no"


def test_verdicts_and_certificates():
    dy, quat, tri = system("dyadic"), system("quaternary"), system("triadic")
    k = bvkit.classify_k(dy, quat)
    assert k["verdict"] == "yes"
    ok, claim, _ = bvkit.verify_certificate(k["certificate"])
    assert ok and claim == "k-conjugate"
    assert bvkit.classify_weak(dy, tri)["verdict"] == "no"
    assert bvkit.classify_tau(dy, quat)["verdict"] == "yes"
    tampered = k["certificate"].replace('"H":[[["2"]]]', '"H":[[["3"]]]')
    assert tampered != k["certificate"]
    assert not bvkit.verify_certificate(tampered)[0]


def test_cli_in_process():
    status, out, _ = bvkit.run_cli(["spectrum", os.path.join(DATA, "dyadic.obd")])
    assert status == 0
    assert json.loads(out)["spectrum"] == {"2": "inf"}
    assert bvkit.run_cli(["heights", os.path.join(DATA, "explicit4.obd"), "50"])[0] == 2


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        bvkit.Diagram.parse("{not json")
    with pytest.raises(RuntimeError):
        system("explicit4").heights(50)
