"""Smoke test for the fnls extension module."""

import math

import fnls


def main():
    assert fnls.dispersion(2.0, "hyperbolic", 3.0, 2) == 9.0 - 16.0
    assert fnls.critical_index(2.0) == -0.25

    m = fnls.measure(2.0, "hyperbolic", 0, 1.0, 1.0, 1)
    exact = 2 * (math.sqrt(2) - 1) + 4 * (math.sqrt(3) - math.sqrt(2))
    assert abs(m["lower"] - exact) < 1e-12, m
    assert m["upper"] >= m["lower"] and not m["outside_hypotheses"]

    try:
        fnls.measure(1.5, "elliptic", 0, 0.5, 1.0, 10)
    except ValueError as e:
        assert "C" in str(e)
    else:
        raise AssertionError("elliptic C < 1 accepted")

    s = fnls.series_partial("s1_plus_hyp", 1.0, 1.0, 4.0, 1)
    assert abs(s - 4.0 / math.sqrt(6.0)) < 1e-14, s

    b = fnls.proof_bounds(1.5, 4.0, 8.0)
    assert b["pass"] and b["j1"] <= b["j1_bound"] and b["j2"] <= b["j2_bound"]

    run = fnls.simulate(1.5, "hyperbolic", 64, 16, 20.0, 1.0, 1e-3, 0.05, seed=1)
    assert len(run["t"]) == 51 and run["max_mass_drift"] < 1e-10

    a = fnls.strichartz_sweep(2.0, "elliptic", [4, 8], 2, 0.25, 16, seed=5)
    assert a == fnls.strichartz_sweep(2.0, "elliptic", [4, 8], 2, 0.25, 16, seed=5)
    assert len(a) == 4 and all(r > 0 for _, r in a)

    print("fnls smoke test: ok")


if __name__ == "__main__":
    main()
