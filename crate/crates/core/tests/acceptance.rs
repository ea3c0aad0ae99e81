//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any check fails that is not listed in `KNOWN_GAPS`.
//! The gaps are explained in the README.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use cogmimo::commands::{self, regression_grid};
use cogmimo::leakage::{antenna_pmf, leakage_probability, reduced_outage};
use cogmimo::linkstats::{mean_max_iid, mean_max_inid, mean_sum_inid};
use cogmimo::mcharness::{empirical_leakage, empirical_mean_power, empirical_outage, empirical_rate, gain_distribution_check};
use cogmimo::outage::{
    deterministic_rate, outage_conventional, outage_equal_antennas, outage_general, outage_iid_pts, outage_iid_pts_series,
    outage_probability,
};
use cogmimo::powalloc::{asymptotic_power, mean_power_by_quadrature, mean_power_closed_form, solve_lambda};
use cogmimo::scenario::{db_to_linear, McSettings, Scenario};
use cogmimo::{Geometry, LinkStats, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

/// Checks that fail for reasons documented in the README.
const KNOWN_GAPS: &[&str] = &["hardened-rate", "optimal-vs-conventional"];

struct Line {
    key: &'static str,
    pass: bool,
    detail: String,
}

fn scenario(prefix: &str) -> Scenario {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut hits: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(prefix))
        .collect();
    hits.sort();
    Scenario::from_path(&hits[0]).unwrap()
}

fn bundled() -> Vec<(String, Scenario)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), Scenario::from_path(&p).unwrap()))
        .collect()
}

fn outage_vs_mc() -> Line {
    let mut worst = (String::new(), 0.0f64);
    let mut slowest = 0.0f64;
    for case in regression_grid() {
        let t0 = Instant::now();
        let sol = solve_lambda(&case.config, &case.stats).unwrap();
        let analytic = outage_probability(&case.config, &case.stats, &sol).unwrap().p_out;
        let mc = empirical_outage(&case.config, &case.stats, &sol, 1_000_000, 17).unwrap();
        slowest = slowest.max(t0.elapsed().as_secs_f64());
        let z = mc.z_score(analytic);
        if z > worst.1 {
            worst = (case.name.clone(), z);
        }
    }
    Line {
        key: "outage-closed-form",
        pass: worst.1 <= 3.0 && slowest <= 60.0,
        detail: format!("12 configs at 1e6 trials, worst {:.2} SE ({}), slowest {slowest:.1} s", worst.1, worst.0),
    }
}

fn constraint_closure() -> Line {
    let (mut worst_z, mut worst_res, mut worst_quad) = (0.0f64, 0.0f64, 0.0f64);
    for case in regression_grid() {
        let sol = solve_lambda(&case.config, &case.stats).unwrap();
        let target = sol.target_mean_power;
        let closed = mean_power_closed_form(sol.lambda, &case.config, &case.stats).unwrap();
        let quad = mean_power_by_quadrature(sol.lambda, &case.config, &case.stats).unwrap();
        let mc = empirical_mean_power(&case.config, &case.stats, &sol, 1_000_000, 23).unwrap();
        worst_z = worst_z.max(mc.z_score(target));
        worst_res = worst_res.max((closed - target).abs() / target);
        worst_quad = worst_quad.max((closed - quad).abs() / closed);
    }
    Line {
        key: "power-constraint",
        pass: worst_z <= 3.0 && worst_res <= 1e-10 && worst_quad <= 1e-8,
        detail: format!("MC {worst_z:.2} SE, residual {worst_res:.1e}, quadrature {worst_quad:.1e}"),
    }
}

fn reductions() -> Line {
    let (mut equal, mut iid_equal, mut single) = (0.0f64, 0.0f64, 0.0f64);
    for case in regression_grid() {
        let (cfg, stats) = (&case.config, &case.stats);
        let sol = solve_lambda(cfg, stats).unwrap();
        if cfg.m == cfg.n && !stats.iid_z {
            let g = outage_general(cfg, stats, &sol).unwrap().p_out;
            let c = outage_equal_antennas(cfg, stats, &sol).unwrap().p_out;
            equal = equal.max((g - c).abs());
        }
        if cfg.m == cfg.n && stats.iid_z {
            let series = outage_iid_pts_series(cfg, stats, &sol).unwrap().p_out;
            let reduced = outage_iid_pts(cfg, stats, &sol).unwrap().p_out;
            iid_equal = iid_equal.max((series - reduced).abs());
        }
        if cfg.l_t == 1 {
            let g = outage_general(cfg, stats, &sol).unwrap().p_out;
            let i = outage_iid_pts(cfg, stats, &sol).unwrap().p_out;
            single = single.max((g - i).abs());
        }
    }
    Line {
        key: "reductions",
        pass: equal <= 1e-12 && iid_equal <= 1e-12 && single <= 1e-10,
        detail: format!("M=N general {equal:.1e}, M=N co-located {iid_equal:.1e}, L_T=1 {single:.1e}"),
    }
}

fn ks_equivalence() -> Line {
    let g = |d: f64| (d / 100.0f64).powf(-4.0);
    let cases = [(1u32, 1u32, vec![56.0]), (5, 4, vec![56.0, 70.0]), (6, 2, vec![40.0, 56.0, 90.0])];
    let mut worst = 1.0f64;
    for (n, m, d_pt) in cases {
        let stats = LinkStats::new(g(18.0), vec![g(60.0)], d_pt.iter().map(|&d| g(d)).collect()).unwrap();
        let cfg = SystemConfig {
            m,
            n,
            l_t: d_pt.len() as u32,
            l_r: 1,
            p_p: db_to_linear(10.0),
            p_max: db_to_linear(20.0),
            q: db_to_linear(7.0),
            n0: 1.0,
            gamma_th: db_to_linear(3.0),
        };
        let r = gain_distribution_check(&cfg, &stats, 100_000, 29).unwrap();
        worst = worst.min(r.gain.p_value).min(r.interference.p_value);
    }
    Line {
        key: "zf-distribution",
        pass: worst >= 0.01,
        detail: format!("KS at 1e5 trials, smallest p-value {worst:.3}"),
    }
}

fn order_statistics() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let subset_oracle = |mu: &[f64]| -> f64 {
        let mut s = 0.0;
        for mask in 1u32..(1 << mu.len()) {
            let rate: f64 = (0..mu.len()).filter(|i| mask & (1 << i) != 0).map(|i| 1.0 / mu[i]).sum();
            let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
            s += sign / rate;
        }
        s
    };
    let mut worst_z = 0.0f64;
    let mut worst_rel = 0.0f64;
    let inid_cases: [&[f64]; 3] = [&[1.0, 2.0, 3.5], &[10.0, 0.5], &[0.3, 0.7, 1.1, 4.0, 9.0]];
    for mu in inid_cases {
        let analytic = mean_max_inid(mu).unwrap();
        worst_rel = worst_rel.max((analytic - subset_oracle(mu)).abs() / analytic);
        let (mut s, mut s2) = (0.0, 0.0);
        let n = 1_000_000;
        for _ in 0..n {
            let v = mu
                .iter()
                .map(|m| {
                    let e: f64 = Exp1.sample(&mut rng);
                    m * e
                })
                .fold(0.0, f64::max);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        worst_z = worst_z.max((mean - analytic).abs() / se);
    }
    for (mu, l) in [(5.0, 3u32), (2.0, 1), (0.8, 6)] {
        let analytic = mean_max_iid(mu, l).unwrap();
        worst_rel = worst_rel.max((analytic - subset_oracle(&vec![mu; l as usize])).abs() / analytic);
        let (mut s, mut s2) = (0.0, 0.0);
        let n = 1_000_000;
        for _ in 0..n {
            let v = (0..l)
                .map(|_| {
                    let e: f64 = Exp1.sample(&mut rng);
                    mu * e
                })
                .fold(0.0, f64::max);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        worst_z = worst_z.max((mean - analytic).abs() / se);
    }
    let mut worst_sum = 0.0f64;
    for _ in 0..1000 {
        let len = rng.random_range(1..=8);
        let mu: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..50.0)).collect();
        let want: f64 = mu.iter().sum();
        worst_sum = worst_sum.max((mean_sum_inid(&mu).unwrap() - want).abs() / want);
    }
    Line {
        key: "order-statistics",
        pass: worst_z <= 3.0 && worst_rel <= 1e-9 && worst_sum <= 1e-10,
        detail: format!("MC {worst_z:.2} SE, subset oracle {worst_rel:.1e}, sum of means {worst_sum:.1e}"),
    }
}

fn leakage_anchors() -> Line {
    let e = std::f64::consts::E;
    let anchors: [(&[f64], &[f64], f64, Option<f64>); 5] = [
        (&[1.0], &[1.0], 1.0, Some(1.0 / e)),
        (&[1.0, 2.0], &[1.0], 1.0, Some(2.0 * (-0.5f64).exp() - 1.0 / e)),
        (&[1.0, 1.0, 1.0], &[1.0], 2.0, Some(5.0 * (-2.0f64).exp())),
        (&[0.5, 1.3, 2.0], &[0.7, 1.1], 2.0, None),
        (&[3.0, 0.2], &[1.5, 0.5, 2.0], 1.5, None),
    ];
    let mut worst_z = 0.0f64;
    let mut worst_exact = 0.0f64;
    for (i, (p, y, q, exact)) in anchors.iter().enumerate() {
        let analytic = leakage_probability(p, y, *q).unwrap();
        if let Some(v) = exact {
            worst_exact = worst_exact.max((analytic - v).abs());
        }
        let mc = empirical_leakage(p, y, *q, 1_000_000, 37 + i as u64).unwrap();
        worst_z = worst_z.max(mc.z_score(analytic));
    }
    Line {
        key: "leakage",
        pass: worst_z <= 3.0 && worst_exact <= 1e-12,
        detail: format!("5 anchors at 1e6 draws, worst {worst_z:.2} SE, exact values within {worst_exact:.1e}"),
    }
}

fn reference_config(m: u32, n: u32, d_st_sr: f64, d_pt_sr: Vec<f64>, d_st_pr: Vec<f64>) -> (SystemConfig, LinkStats) {
    let stats = LinkStats::from_geometry(&Geometry {
        d_st_sr,
        d_pt_sr: d_pt_sr.clone(),
        d_st_pr: d_st_pr.clone(),
        d_ref: 100.0,
        alpha: 4.0,
    })
    .unwrap();
    let cfg = SystemConfig {
        m,
        n,
        l_t: d_pt_sr.len() as u32,
        l_r: d_st_pr.len() as u32,
        p_p: db_to_linear(10.0),
        p_max: db_to_linear(20.0),
        q: db_to_linear(7.0),
        n0: 1.0,
        gamma_th: db_to_linear(3.0),
    };
    (cfg, stats)
}

fn massive_power() -> Line {
    let (cfg, stats) = reference_config(4, 512, 18.0, vec![56.0, 56.0], vec![60.0, 60.0]);
    let sol = solve_lambda(&cfg, &stats).unwrap();
    let mc = empirical_mean_power(&cfg, &stats, &sol, 1_000_000, 41).unwrap();
    let limit = asymptotic_power(&cfg, &stats);
    let rel = (mc.value - limit).abs() / limit;
    Line {
        key: "massive-power",
        pass: rel <= 0.02,
        detail: format!("N = 512: MC mean power {:.6} vs limit {limit:.6} ({:.3}%)", mc.value, 100.0 * rel),
    }
}

fn hardened_rate() -> Line {
    let (cfg, stats) = reference_config(16, 80, 15.0, vec![30.0; 80], vec![30.0, 30.0]);
    let sol = solve_lambda(&cfg, &stats).unwrap();
    let mc = empirical_rate(&cfg, &stats, &sol, 20_000, 43).unwrap();
    let det = deterministic_rate(&cfg, &stats, &sol).unwrap();
    let rel = (mc.value - det).abs() / mc.value;
    Line {
        key: "hardened-rate",
        pass: rel <= 0.05,
        detail: format!(
            "N = L_T = 80, M = 16: MC {:.5} bps/Hz vs deterministic {det:.5} bps/Hz (off by {:.0}%)",
            mc.value,
            100.0 * rel
        ),
    }
}

fn optimal_vs_conventional() -> Line {
    let mut bad = Vec::new();
    let mut total = 0;
    for prefix in ["fig2", "fig3", "fig4"] {
        for p in scenario(prefix).points().unwrap() {
            let sol = solve_lambda(&p.config, &p.stats).unwrap();
            let opt = outage_probability(&p.config, &p.stats, &sol).unwrap().p_out;
            let conv = outage_conventional(&p.config, &p.stats).unwrap();
            total += 1;
            if opt > conv {
                bad.push(format!("{prefix}@{}", p.swept_value.unwrap()));
            }
        }
    }
    Line {
        key: "optimal-vs-conventional",
        pass: bad.is_empty(),
        detail: format!("{} of {total} points with optimal above conventional: {}", bad.len(), bad.join(" ")),
    }
}

fn tighter_leakage_fewer_antennas() -> Line {
    let tight = scenario("fig5_antennas_vs_d_st_pr_tg005");
    let loose = scenario("fig5_antennas_vs_d_st_pr_tg01");
    let (a, b) = (tight.points().unwrap(), loose.points().unwrap());
    let mut ok = true;
    let mut gap = f64::INFINITY;
    for (pa, pb) in a.iter().zip(&b) {
        let sol = solve_lambda(&pa.config, &pa.stats).unwrap();
        let ma = antenna_pmf(&pa.config, &pa.stats, &sol, tight.t_g.unwrap(), tight.mc.trials, tight.mc.seed).unwrap();
        let mb = antenna_pmf(&pb.config, &pb.stats, &sol, loose.t_g.unwrap(), loose.mc.trials, loose.mc.seed).unwrap();
        ok &= ma.mean_active <= mb.mean_active;
        gap = gap.min(mb.mean_active - ma.mean_active);
    }
    Line {
        key: "leakage-threshold-trend",
        pass: ok,
        detail: format!("{} points, smallest margin {gap:.4} antennas", a.len()),
    }
}

fn active_fraction_grows() -> Line {
    let s = scenario("fig7");
    let t_g = s.t_g.unwrap();
    let mut fractions = Vec::new();
    for p in s.points().unwrap() {
        let sol = solve_lambda(&p.config, &p.stats).unwrap();
        let pmf = antenna_pmf(&p.config, &p.stats, &sol, t_g, s.mc.trials, s.mc.seed).unwrap();
        fractions.push(pmf.mean_active / p.config.m as f64);
    }
    let monotone = fractions.windows(2).all(|w| w[1] >= w[0]);
    let last = *fractions.last().unwrap();
    Line {
        key: "active-fraction-trend",
        pass: monotone && last >= 0.99,
        detail: format!("M = 4..64: {:.4} -> {last:.4}, non-decreasing: {monotone}", fractions[0]),
    }
}

fn reduction_helps() -> Line {
    let s = scenario("fig8");
    let t_g = s.t_g.unwrap();
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for p in s.points().unwrap() {
        let sol = solve_lambda(&p.config, &p.stats).unwrap();
        let fixed = outage_probability(&p.config, &p.stats, &sol).unwrap().p_out;
        let pmf = antenna_pmf(&p.config, &p.stats, &sol, t_g, s.mc.trials, s.mc.seed).unwrap();
        let reduced = reduced_outage(&p.config, &p.stats, &pmf).unwrap();
        ok &= reduced <= fixed;
        margin = margin.min(fixed - reduced);
    }
    Line {
        key: "antenna-reduction-trend",
        pass: ok,
        detail: format!("reduced-array outage <= fixed-M outage, smallest margin {margin:.2e}"),
    }
}

fn render_all(trials: u64) -> Vec<String> {
    let mut out = Vec::new();
    let mc = McSettings { trials, seed: 3 };
    out.push(commands::cmd_validate(None, mc).unwrap().to_json());
    for (name, mut s) in bundled() {
        s.mc.trials = trials;
        let text = match &name {
            n if n.starts_with("fig5") || n.starts_with("fig7") => commands::cmd_antennas(&s).unwrap().to_csv(),
            n if n.starts_with("fig6") => commands::cmd_rate(&s).unwrap().to_csv(),
            _ => commands::cmd_outage(&s).unwrap().to_csv(),
        };
        out.push(text);
        out.push(commands::cmd_power(&s).unwrap().to_json());
    }
    out
}

fn determinism() -> Line {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| render_all(3000))
    };
    let one = run(1);
    let eight = run(8);
    let same = one == eight;
    Line {
        key: "determinism",
        pass: same,
        detail: format!("{} outputs compared byte for byte, 1 vs 8 threads", one.len()),
    }
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Line); 13] = [
        ("closed-form outage vs MC", outage_vs_mc),
        ("mean-power constraint", constraint_closure),
        ("closed-form reductions", reductions),
        ("ZF gain and interference laws", ks_equivalence),
        ("order statistics", order_statistics),
        ("leakage probability", leakage_anchors),
        ("large-N mean power", massive_power),
        ("hardened rate at N = L_T = 80", hardened_rate),
        ("optimal vs fixed power outage", optimal_vs_conventional),
        ("tighter leakage target, fewer antennas", tighter_leakage_fewer_antennas),
        ("active fraction grows with M", active_fraction_grows),
        ("antenna reduction lowers outage", reduction_helps),
        ("thread-count determinism", determinism),
    ];
    let mut unexpected = 0;
    for (title, f) in checks {
        let t0 = Instant::now();
        let line = f();
        let gap = KNOWN_GAPS.contains(&line.key);
        let tag = match (line.pass, gap) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known gap)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("{tag:<16} {title}: {} [{:.1} s]", line.detail, t0.elapsed().as_secs_f64());
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
