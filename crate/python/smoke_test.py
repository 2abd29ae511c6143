"""Smoke test for the compiled extension.

Build first with `pip install --no-build-isolation ./crates/python`.
"""

import math

import cyclic_wcl_py as cw

FS = 200e6


def main():
    st = cw.SignalSpec.single_carrier(4, 20e6)
    si = cw.SignalSpec.single_carrier(4, 25e6)
    x = st.generate(500, FS, 1)
    on = abs(cw.cac(x, FS, 20e6))
    off = abs(cw.cac(x, FS, 27.4e6))
    print(f"CAC at symbol rate {on:.4f}, off-rate {off:.4f}")
    assert on > off

    reps = [cw.cac(st.generate(500, FS, s), FS, 20e6) for s in range(100)]
    phi = cw.fvc(reps)
    print(f"sample FVC over 100 realizations {phi:.4f}")
    assert 0.0 <= phi <= 1.0 + 1e-9

    locs = [(-20.0, 0.0), (20.0, 0.0), (0.0, 20.0)]
    print("WCL", cw.wcl(locs, [1.0, 1.0, 2.0]))

    stats = cw.theta_moments(st, si, 500, FS, 1e-12)
    eps = cw.rmse_theoretical([1e-6, 1e-6, 1e-6], [1e-9] * 3, locs, [True] * 3, stats)
    print(f"theoretical RMSE {eps:.3f} m")
    assert math.isfinite(eps)

    cfg = cw.SweepConfig("sweep = power_ratio_db\nvalues = 10, -40\n")
    cfg.trials = 20
    for row in cfg.run():
        print(row["sweep_value"], row["algorithm"], round(row["rmse_m"], 3))
    print("ops", cw.ops_count("ImprovedCyclicWCL", 50, 500, 60))
    print("ok")


if __name__ == "__main__":
    main()
