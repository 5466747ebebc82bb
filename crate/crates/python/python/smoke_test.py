"""Smoke test for the pgeneo extension module.

Build and install first, e.g. `maturin develop` from crates/python.
"""

import json
import os
import tempfile

import pgeneo


def main():
    d = pgeneo.Domain.indexed(3)
    phi = pgeneo.MeasurementSpace("Phi", d, [[5.0, 7.0, 9.0]])
    s = pgeneo.DomainMap(d, [1, 2, 0])
    assert s.act([5.0, 7.0, 9.0]) == [7.0, 9.0, 5.0]
    assert s.compose(s.inverse()).is_identity()

    orbit = pgeneo.MeasurementSpace("Orbit", d, [[5.0, 7.0, 9.0], [7.0, 9.0, 5.0], [9.0, 5.0, 7.0]])
    assert pgeneo.is_admissible(s, phi, orbit)
    assert not pgeneo.is_admissible(s, phi, phi)
    assert pgeneo.domain_pseudometric(phi, 0, 2) == 4.0
    assert pgeneo.aut_pseudometric(phi, pgeneo.DomainMap.identity(d), s) == 4.0

    triple = pgeneo.PerceptionTriple(orbit, orbit, [pgeneo.DomainMap.identity(d), s])
    assert triple.validate()["admissible"]
    cert = pgeneo.OperatorPair.identity(triple).certify()
    assert cert["certified"] and cert["equivariance_residual"] == 0.0

    squares = pgeneo.demo_squares(naive=True)
    assert squares.validate("source")["admissible"]
    assert squares.certify("cut")["certified"]
    assert not squares.certify("cut_naive")["certified"]
    restriction = squares.operator("cut").restriction()
    assert restriction["status"] == "not_applicable"

    six = pgeneo.demo_six()
    assert six.validate("small_turns")["admissible"]
    assert not six.validate("all_turns")["admissible"]

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "squares.json")
        squares.save(path)
        again = pgeneo.Instance.load(path)
        assert again.to_json() == squares.to_json()
        assert json.loads(again.to_json())["version"] == 1

    net = pgeneo.greedy_net([[0, 1, 3], [1, 0, 2], [3, 2, 0]], 1.5)
    assert net["center_indices"] == [0, 2]

    try:
        pgeneo.DomainMap(d, [0, 0, 1])
    except ValueError as e:
        assert "more than once" in str(e)
    else:
        raise AssertionError("repeated index accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
