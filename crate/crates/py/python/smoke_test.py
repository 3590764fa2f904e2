"""Smoke test for the compiled module. Run after `maturin develop`."""

import json
import math
import tempfile
from pathlib import Path

import centralspin as cs


def close(x, y, tol):
    return abs(x - y) <= tol * abs(y)


def main():
    t0 = cs.sensing_time(1.0, 1.0, "global")
    assert close(t0, 2 * math.pi / math.sqrt(1.25), 1e-15)

    model = cs.Model.no_zeeman(10)
    assert model.is_collective
    assert close(model.qfi(t0), 707.45, 1e-4)
    assert close(cs.qfi_analytic_t0(1.0, 1.0, 10), model.qfi(t0), 1e-8)

    ising = cs.Model.ising_ring(6)
    t_local = cs.sensing_time(1.0, 1.0, "local")
    assert close(ising.local_qfi(t_local), 16 * 36 / 25, 1e-6)

    fmax, theta, phi = cs.fmax(1.0, 1.0, 4, t0)
    assert fmax >= cs.qfi_analytic_t0(1.0, 1.0, 4)

    ns = list(range(8, 65))
    fit = cs.fit_scaling(ns, [cs.qfi_analytic_t0(1.0, 1.0, n) for n in ns], "quad")
    alpha, beta, _ = cs.generator_coeffs(1.0, 1.0, t0)
    assert close(fit["a"], alpha**2, 1e-8) and close(fit["b"], beta**2 / 4, 1e-8)

    config = {
        "name": "smoke",
        "model": {"variant": "zzxx", "n_ring": 2},
        "probe": "ring_z_stretched",
        "time": {"kind": "sensing", "rule": "global_qfi"},
        "sweep": {"axis": "N", "values": [2, 4, 6]},
        "methods": ["fd_state", "analytic"],
    }
    with tempfile.TemporaryDirectory() as out:
        result = cs.run_config(json.dumps(config), out)
        assert len(result["rows"]) == 6 and not result["failures"]
        assert (Path(out) / "smoke.csv").read_text() == result["csv"]
        assert json.loads((Path(out) / "meta.json").read_text())["schema_version"] == 1

    try:
        cs.run_config(json.dumps({**config, "methods": ["bogus"]}))
    except ValueError:
        pass
    else:
        raise AssertionError("bad config accepted")

    big = {**config, "model": {"variant": "ising_ring_central", "n_ring": 20}, "methods": ["generator_exact"],
           "sweep": {"axis": "h", "values": [1.0]}}
    try:
        cs.run_config(json.dumps(big))
    except cs.CapacityError:
        pass
    else:
        raise AssertionError("oversized run accepted")

    print("smoke test ok", cs.__version__)


if __name__ == "__main__":
    main()
