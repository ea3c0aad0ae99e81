//! Scenario-level evaluations behind the command-line tool. Each returns
//! a [`Table`] whose column order is fixed per command.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::leakage::{antenna_pmf, reduced_outage};
use crate::linkstats::{Geometry, LinkStats};
use crate::mcharness::{empirical_outage, empirical_outage_reduced, empirical_rate};
use crate::outage::{
    deterministic_rate, ergodic_capacity, outage_conventional, outage_equal_antennas, outage_general, outage_iid_pts_series,
    outage_probability,
};
use crate::powalloc::{asymptotic_lambda, mean_power_by_quadrature, mean_power_closed_form, solve_lambda, SystemConfig};
use crate::scenario::{db_to_linear, McSettings, Scenario, ScenarioPoint};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    /// Array of row objects keyed by column name, in column order.
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    obj.insert(c.clone(), json_number(*v));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
        s.push('\n');
        s
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn swept(p: &ScenarioPoint) -> f64 {
    p.swept_value.unwrap_or(f64::NAN)
}

/// Outage vs. the swept value: closed form under optimal and fixed power,
/// plus the MC estimate. With `t_g` set, adds the antenna-reduction run on
/// the same channel draws.
pub fn cmd_outage(scenario: &Scenario) -> Result<Table> {
    let points = scenario.points()?;
    let mc = scenario.mc;
    let reduced = scenario.t_g;
    let mut cols = vec!["swept_value", "p_out_optimal", "p_out_conventional", "p_out_mc", "mc_stderr"];
    if reduced.is_some() {
        cols.extend(["p_out_reduced", "p_out_reduced_mc", "reduced_stderr", "mean_active"]);
    }
    let mut table = Table::new(&cols);
    table.rows = points
        .par_iter()
        .map(|p| {
            let sol = solve_lambda(&p.config, &p.stats)?;
            let opt = outage_probability(&p.config, &p.stats, &sol)?.p_out;
            let conv = outage_conventional(&p.config, &p.stats)?;
            let mut row = vec![swept(p), opt, conv];
            match reduced {
                None => {
                    let e = empirical_outage(&p.config, &p.stats, &sol, mc.trials, mc.seed)?;
                    row.extend([e.value, e.std_error]);
                }
                Some(t_g) => {
                    let r = empirical_outage_reduced(&p.config, &p.stats, &sol, t_g, mc.trials, mc.seed)?;
                    let pmf = antenna_pmf(&p.config, &p.stats, &sol, t_g, mc.trials, mc.seed)?;
                    let semi = reduced_outage(&p.config, &p.stats, &pmf)?;
                    row.extend([r.fixed.value, r.fixed.std_error, semi, r.reduced.value, r.reduced.std_error, r.mean_active]);
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(table)
}

/// Distribution of the number of antennas left on by the reduction.
pub fn cmd_antennas(scenario: &Scenario) -> Result<Table> {
    let t_g = scenario
        .t_g
        .ok_or_else(|| Error::config("t_g", "the antennas command needs a leakage threshold"))?;
    let points = scenario.points()?;
    let m_max = points.iter().map(|p| p.config.m).max().unwrap_or(0);
    let mut columns: Vec<String> = ["swept_value", "m", "mean_active", "mean_active_over_m", "stderr"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    columns.extend((0..=m_max).map(|l| format!("pmf_{l}")));
    let mc = scenario.mc;
    let rows = points
        .par_iter()
        .map(|p| {
            let sol = solve_lambda(&p.config, &p.stats)?;
            let pmf = antenna_pmf(&p.config, &p.stats, &sol, t_g, mc.trials, mc.seed)?;
            let m = p.config.m as f64;
            let mut row = vec![swept(p), m, pmf.mean_active, pmf.mean_active / m, pmf.std_error];
            row.extend((0..=m_max as usize).map(|l| pmf.pmf.get(l).copied().unwrap_or(0.0)));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { columns, rows })
}

/// Per-stream rate: MC, outage integral, and the hardened-SINR value.
pub fn cmd_rate(scenario: &Scenario) -> Result<Table> {
    let points = scenario.points()?;
    let mc = scenario.mc;
    let mut table = Table::new(&["n_value", "rate_mc", "rate_mc_stderr", "rate_semianalytic", "rate_deterministic"]);
    table.rows = points
        .par_iter()
        .map(|p| {
            let sol = solve_lambda(&p.config, &p.stats)?;
            let e = empirical_rate(&p.config, &p.stats, &sol, mc.trials, mc.seed)?;
            let semi = ergodic_capacity(&p.config, &p.stats, &sol)?;
            let det = deterministic_rate(&p.config, &p.stats, &sol)?;
            Ok(vec![p.config.n as f64, e.value, e.std_error, semi, det])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(table)
}

/// Water level and threshold at every point.
pub fn cmd_power(scenario: &Scenario) -> Result<Table> {
    let points = scenario.points()?;
    let mut table = Table::new(&[
        "swept_value",
        "lambda",
        "c_threshold",
        "target_mean_power",
        "slope",
        "offset",
        "lambda_limit",
        "mean_power",
    ]);
    table.rows = points
        .par_iter()
        .map(|p| {
            let sol = solve_lambda(&p.config, &p.stats)?;
            let mean = mean_power_closed_form(sol.lambda, &p.config, &p.stats)?;
            Ok(vec![
                swept(p),
                sol.lambda,
                sol.c_threshold,
                sol.target_mean_power,
                sol.slope,
                sol.offset,
                asymptotic_lambda(&p.config, &p.stats),
                mean,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// One line per check: `name,tolerance,observed,pass`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "tolerance", "observed", "pass"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                format!("{}", c.tolerance),
                format!("{}", c.observed),
                c.pass.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn check(name: String, tolerance: f64, observed: f64) -> Check {
    Check {
        pass: observed <= tolerance,
        name,
        tolerance,
        observed,
    }
}

/// A named configuration of the built-in regression grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCase {
    pub name: String,
    pub config: SystemConfig,
    pub stats: LinkStats,
}

/// `{M = N, N > M} × {i.i.d., i.n.i.d.} × {L_T ∈ 1, 2, 4}` around the
/// reference link (`M = 4`, `L_R = 2`, `Q = 7 dB`, `p_p = 10 dB`,
/// `γ_th = 3 dB`, `p_max = 20 dB`, `α = 4`, `d_ref = 100 m`). The
/// `N = 5`, i.i.d., `L_T = 2` entry is the reference link itself.
pub fn regression_grid() -> Vec<GridCase> {
    let mut out = Vec::new();
    for n in [4u32, 5] {
        for iid in [true, false] {
            for l_t in [1u32, 2, 4] {
                let d_pt_sr: Vec<f64> = if iid {
                    vec![56.0; l_t as usize]
                } else {
                    [56.0, 70.0, 85.0, 100.0][..l_t as usize].to_vec()
                };
                let d_st_pr = if iid { vec![60.0, 60.0] } else { vec![60.0, 75.0] };
                let geo = Geometry {
                    d_st_sr: 18.0,
                    d_pt_sr,
                    d_st_pr,
                    d_ref: 100.0,
                    alpha: 4.0,
                };
                let stats = LinkStats::from_geometry(&geo).expect("grid geometry is valid");
                let config = SystemConfig {
                    m: 4,
                    n,
                    l_t,
                    l_r: 2,
                    p_p: db_to_linear(10.0),
                    p_max: db_to_linear(20.0),
                    q: db_to_linear(7.0),
                    n0: 1.0,
                    gamma_th: db_to_linear(3.0),
                };
                out.push(GridCase {
                    name: format!("n{n}_{}_lt{l_t}", if iid { "iid" } else { "inid" }),
                    config,
                    stats,
                });
            }
        }
    }
    out
}

fn validate_case(name: &str, config: &SystemConfig, stats: &LinkStats, mc: McSettings) -> Result<Vec<Check>> {
    let sol = solve_lambda(config, stats)?;
    let target = sol.target_mean_power;
    let closed = mean_power_closed_form(sol.lambda, config, stats)?;
    let quadr = mean_power_by_quadrature(sol.lambda, config, stats)?;
    let analytic = outage_probability(config, stats, &sol)?.p_out;
    let e = empirical_outage(config, stats, &sol, mc.trials, mc.seed)?;
    let mut checks = vec![
        check(format!("{name}/constraint_residual"), 1e-10, (closed - target).abs() / target),
        check(format!("{name}/mean_power_quadrature"), 1e-8, (closed - quadr).abs() / closed.abs().max(f64::MIN_POSITIVE)),
        check(format!("{name}/outage_vs_mc_sigmas"), 3.0, e.z_score(analytic)),
    ];
    if config.m == config.n {
        // tied means go through the co-located series; the partial
        // fractions of the general form are only exact for distinct means
        let (g, c) = if stats.iid_z {
            (outage_iid_pts_series(config, stats, &sol)?.p_out, analytic)
        } else {
            (outage_general(config, stats, &sol)?.p_out, outage_equal_antennas(config, stats, &sol)?.p_out)
        };
        checks.push(check(format!("{name}/equal_antenna_reduction"), 1e-12, (g - c).abs()));
    }
    if config.l_t == 1 {
        let g = outage_general(config, stats, &sol)?.p_out;
        checks.push(check(format!("{name}/single_pt_branches"), 1e-10, (g - analytic).abs()));
    }
    Ok(checks)
}

/// Regression checks on every point of `scenario`, or on the built-in
/// grid when none is given.
pub fn cmd_validate(scenario: Option<&Scenario>, mc: McSettings) -> Result<ValidationReport> {
    let cases: Vec<GridCase> = match scenario {
        None => regression_grid(),
        Some(s) => s
            .points()?
            .into_iter()
            .enumerate()
            .map(|(i, p)| GridCase {
                name: format!("point{i}"),
                config: p.config,
                stats: p.stats,
            })
            .collect(),
    };
    let checks: Vec<Vec<Check>> = cases
        .par_iter()
        .map(|c| validate_case(&c.name, &c.config, &c.stats, mc))
        .collect::<Result<_>>()?;
    let checks: Vec<Check> = checks.into_iter().flatten().collect();
    Ok(ValidationReport {
        passed: checks.iter().all(|c| c.pass),
        checks,
    })
}
