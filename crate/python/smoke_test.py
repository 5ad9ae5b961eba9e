"""Quick check of the Python bindings. Build first with
`maturin develop -m crates/python/Cargo.toml` or install the wheel."""

import json
import math

import polarlab

BOX1 = {"dimension": 1, "class": {"s": 1},
        "family": {"kind": "polytope_indicator", "vertices": [[-1], [1]]}}


def main():
    hhat = polarlab.FunctionSpec.hhat(2, 2.0)
    assert hhat.dimension == 2
    assert abs(hhat.evaluate([0.0, 0.0]) - 1.0) < 1e-12

    # self-polar extremal function
    y = [0.3, -0.2]
    assert abs(polarlab.polar(hhat, 2.0, y) - hhat.evaluate(y)) < 1e-6

    k = polarlab.kappa(2, 2.0)
    assert abs(hhat.integrate() - k) < 1e-6
    r = polarlab.phi(hhat, 2.0, [0.0, 0.0])
    assert abs(r["value"] - k) < 1e-3, r

    g = polarlab.FunctionSpec.gaussian([0.0], 1.0)
    assert abs(polarlab.polar(g, "inf", [0.5]) - math.exp(-0.125)) < 1e-6

    box = polarlab.FunctionSpec.from_json(json.dumps(BOX1))
    assert json.loads(box.to_json())["dimension"] == 1
    p = polarlab.santalo_point(box, 1.0)
    assert abs(p["z_star"][0]) < 1e-6, p

    m = polarlab.region_membership(box, 1.0, 2.0, [0.0])
    assert m["member"]
    b = polarlab.region_boundary(box, 1.0, 2.0, rays=2)
    assert b["kind"] == "body"

    try:
        polarlab.FunctionSpec.from_json('{"class":"log"}')
    except ValueError:
        pass
    else:
        raise AssertionError("schema error not raised")

    report = polarlab.run_suite("transforms", seed=1)
    assert report["failed"] == 0, report
    print("smoke test ok")


if __name__ == "__main__":
    main()
