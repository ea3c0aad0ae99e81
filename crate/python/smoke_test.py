"""Quick end-to-end check of the Python bindings.

Run python/build.sh first so that cogmimo.so sits next to this file.
"""
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import cogmimo


def main():
    cfg = cogmimo.SystemConfig.from_db(m=4, n=5, l_t=2, l_r=2, p_p_db=10.0, p_max_db=20.0, q_db=7.0, gamma_th_db=3.0)
    stats = cogmimo.LinkStats.from_geometry(18.0, [56.0, 56.0], [60.0, 60.0])
    sol = cogmimo.solve_lambda(cfg, stats)
    assert sol.lambda_ > 0 and sol.c_threshold > 0
    assert math.isclose(sol.target_mean_power, cogmimo.conventional_power(cfg, stats))

    p_out, branch = cogmimo.outage_probability(cfg, stats, sol)
    assert branch == "iid_pts", branch
    assert 0.0 < p_out < 1.0
    assert p_out <= cogmimo.outage_conventional(cfg, stats)

    mc, se = cogmimo.empirical_outage(cfg, stats, sol, trials=50_000, seed=7)
    assert abs(mc - p_out) <= 4 * se, (mc, p_out, se)

    one = cogmimo.leakage_probability([1.0], [1.0], 1.0)
    assert abs(one - math.exp(-1)) < 1e-15

    pmf, mean_active, _ = cogmimo.antenna_pmf(cfg, stats, sol, t_g=1.0, trials=1000)
    assert pmf[-1] == 1.0 and mean_active == 4.0

    try:
        cogmimo.SystemConfig(m=4, n=3, l_t=1, l_r=1, p_p=10.0, p_max=100.0, q=5.0, gamma_th=2.0)
    except ValueError as e:
        assert "system.n" in str(e)
    else:
        raise AssertionError("N < M accepted")

    here = os.path.dirname(os.path.abspath(__file__))
    csv = cogmimo.run_scenario(os.path.join(here, "..", "scenarios", "fig2_outage_vs_d_st_pr.toml"), "power")
    assert csv.splitlines()[0].startswith("swept_value,lambda")

    print(f"ok  lambda={sol.lambda_:.6g}  p_out={p_out:.6g}  mc={mc:.6g}±{se:.2g}")


if __name__ == "__main__":
    main()
