//! Scenario files: one TOML (or JSON, by extension) document with the
//! link parameters in dB, node geometry or explicit channel means, an
//! optional one-dimensional sweep, and Monte-Carlo settings.
//!
//! dB quantities are converted to linear scale here and nowhere else.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkstats::{Geometry, LinkStats};
use crate::powalloc::SystemConfig;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn default_n0_db() -> f64 {
    0.0
}

fn default_d_ref() -> f64 {
    100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    m: u32,
    n: u32,
    l_t: u32,
    l_r: u32,
    p_p_db: f64,
    p_max_db: f64,
    q_db: f64,
    gamma_th_db: f64,
    #[serde(default = "default_n0_db")]
    n0_db: f64,
}

/// A single distance shared by all nodes of a kind, or one per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Distances {
    One(f64),
    Many(Vec<f64>),
}

impl Distances {
    fn expand(&self, count: u32, path: &str) -> Result<Vec<f64>> {
        match self {
            Distances::One(d) => Ok(vec![*d; count as usize]),
            Distances::Many(v) if v.len() == count as usize => Ok(v.clone()),
            Distances::Many(v) => Err(Error::config(
                path,
                format!("{} distances given for {count} nodes", v.len()),
            )),
        }
    }

    fn set_all(&mut self, d: f64) {
        *self = match self {
            Distances::One(_) => Distances::One(d),
            Distances::Many(v) => Distances::Many(vec![d; v.len()]),
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub d_st_sr: f64,
    pub d_pt_sr: Distances,
    pub d_st_pr: Distances,
    #[serde(default = "default_d_ref")]
    pub d_ref: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeansSpec {
    pub x: f64,
    pub y_per_pr: Vec<f64>,
    pub z_per_pt: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    DStSr,
    DPtSr,
    DStPr,
    Alpha,
    PPDb,
    PMaxDb,
    QDb,
    GammaThDb,
    M,
    N,
    LT,
    LR,
}

impl SweepParameter {
    fn parse(name: &str, path: &str) -> Result<Self> {
        Ok(match name {
            "d_st_sr" => Self::DStSr,
            "d_pt_sr" => Self::DPtSr,
            "d_st_pr" => Self::DStPr,
            "alpha" => Self::Alpha,
            "p_p_db" => Self::PPDb,
            "p_max_db" => Self::PMaxDb,
            "q_db" => Self::QDb,
            "gamma_th_db" => Self::GammaThDb,
            "m" => Self::M,
            "n" => Self::N,
            "l_t" => Self::LT,
            "l_r" => Self::LR,
            other => return Err(Error::config(path, format!("unknown sweep parameter `{other}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::DStSr => "d_st_sr",
            Self::DPtSr => "d_pt_sr",
            Self::DStPr => "d_st_pr",
            Self::Alpha => "alpha",
            Self::PPDb => "p_p_db",
            Self::PMaxDb => "p_max_db",
            Self::QDb => "q_db",
            Self::GammaThDb => "gamma_th_db",
            Self::M => "m",
            Self::N => "n",
            Self::LT => "l_t",
            Self::LR => "l_r",
        }
    }

    fn is_geometric(self) -> bool {
        matches!(self, Self::DStSr | Self::DPtSr | Self::DStPr | Self::Alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    parameter: String,
    start: f64,
    stop: f64,
    steps: usize,
    #[serde(default)]
    scale: Scale,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    also: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    /// Further fields set to the same value at every point.
    pub also: Vec<SweepParameter>,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl Sweep {
    /// Grid values in file units (dB for power fields).
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let f = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.start + f * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

fn default_trials() -> u64 {
    100_000
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSettings {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            trials: default_trials(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    caption: Option<String>,
    system: SystemFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geometry: Option<GeometrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    means: Option<MeansSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepFile>,
    #[serde(default)]
    mc: McSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_g: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Links {
    Geometry(GeometrySpec),
    Means(MeansSpec),
}

/// Parsed scenario, all powers linear.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub caption: Option<String>,
    pub system: SystemConfig,
    pub links: Links,
    pub sweep: Option<Sweep>,
    pub mc: McSettings,
    pub t_g: Option<f64>,
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPoint {
    pub swept_value: Option<f64>,
    pub config: SystemConfig,
    pub stats: LinkStats,
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if json {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::config("<toml>", e.message().to_string()))?;
        Self::from_file(file)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))?;
        Self::from_file(file)
    }

    fn from_file(f: ScenarioFile) -> Result<Self> {
        let s = &f.system;
        let system = SystemConfig {
            m: s.m,
            n: s.n,
            l_t: s.l_t,
            l_r: s.l_r,
            p_p: db_to_linear(s.p_p_db),
            p_max: db_to_linear(s.p_max_db),
            q: db_to_linear(s.q_db),
            n0: db_to_linear(s.n0_db),
            gamma_th: db_to_linear(s.gamma_th_db),
        };
        let links = match (f.geometry, f.means) {
            (Some(g), None) => Links::Geometry(g),
            (None, Some(m)) => Links::Means(m),
            _ => return Err(Error::config("geometry", "exactly one of [geometry] or [means] is required")),
        };
        let sweep = match f.sweep {
            None => None,
            Some(sw) => {
                let parameter = SweepParameter::parse(&sw.parameter, "sweep.parameter")?;
                let also = sw
                    .also
                    .iter()
                    .map(|a| SweepParameter::parse(a, "sweep.also"))
                    .collect::<Result<Vec<_>>>()?;
                if sw.steps == 0 {
                    return Err(Error::config("sweep.steps", "must be >= 1"));
                }
                if sw.scale == Scale::Log && !(sw.start > 0.0 && sw.stop > 0.0) {
                    return Err(Error::config("sweep.scale", "log scale needs positive start and stop"));
                }
                for p in std::iter::once(parameter).chain(also.iter().copied()) {
                    if p.is_geometric() && matches!(links, Links::Means(_)) {
                        return Err(Error::config("sweep.parameter", format!("`{}` needs a [geometry] table", p.name())));
                    }
                }
                Some(Sweep {
                    parameter,
                    also,
                    start: sw.start,
                    stop: sw.stop,
                    steps: sw.steps,
                    scale: sw.scale,
                })
            }
        };
        if let Some(t) = f.t_g {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::config("t_g", format!("must lie in (0, 1], got {t}")));
            }
        }
        if f.mc.trials == 0 {
            return Err(Error::config("mc.trials", "must be >= 1"));
        }
        let scenario = Scenario {
            caption: f.caption,
            system,
            links,
            sweep,
            mc: f.mc,
            t_g: f.t_g,
        };
        // surface field errors now rather than at evaluation time
        scenario.points()?;
        Ok(scenario)
    }

    /// Writes the scenario back in file units.
    pub fn to_toml_string(&self) -> String {
        let s = &self.system;
        let file = ScenarioFile {
            caption: self.caption.clone(),
            system: SystemFile {
                m: s.m,
                n: s.n,
                l_t: s.l_t,
                l_r: s.l_r,
                p_p_db: linear_to_db(s.p_p),
                p_max_db: linear_to_db(s.p_max),
                q_db: linear_to_db(s.q),
                gamma_th_db: linear_to_db(s.gamma_th),
                n0_db: linear_to_db(s.n0),
            },
            geometry: match &self.links {
                Links::Geometry(g) => Some(g.clone()),
                Links::Means(_) => None,
            },
            means: match &self.links {
                Links::Means(m) => Some(m.clone()),
                Links::Geometry(_) => None,
            },
            sweep: self.sweep.as_ref().map(|sw| SweepFile {
                parameter: sw.parameter.name().to_string(),
                start: sw.start,
                stop: sw.stop,
                steps: sw.steps,
                scale: sw.scale,
                also: sw.also.iter().map(|p| p.name().to_string()).collect(),
            }),
            mc: self.mc,
            t_g: self.t_g,
        };
        toml::to_string(&file).expect("scenario serializes")
    }

    fn apply(&self, param: SweepParameter, value: f64, system: &mut SystemConfig, links: &mut Links) -> Result<()> {
        let path = "sweep";
        let int = || -> Result<u32> {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(Error::config(path, format!("`{}` takes integers, got {value}", param.name())));
            }
            Ok(value as u32)
        };
        match param {
            SweepParameter::M => system.m = int()?,
            SweepParameter::N => system.n = int()?,
            SweepParameter::LT => system.l_t = int()?,
            SweepParameter::LR => system.l_r = int()?,
            SweepParameter::PPDb => system.p_p = db_to_linear(value),
            SweepParameter::PMaxDb => system.p_max = db_to_linear(value),
            SweepParameter::QDb => system.q = db_to_linear(value),
            SweepParameter::GammaThDb => system.gamma_th = db_to_linear(value),
            SweepParameter::DStSr | SweepParameter::DPtSr | SweepParameter::DStPr | SweepParameter::Alpha => {
                let Links::Geometry(g) = links else {
                    return Err(Error::config(path, "geometric sweep without [geometry]"));
                };
                match param {
                    SweepParameter::DStSr => g.d_st_sr = value,
                    SweepParameter::DPtSr => g.d_pt_sr.set_all(value),
                    SweepParameter::DStPr => g.d_st_pr.set_all(value),
                    _ => g.alpha = value,
                }
            }
        }
        Ok(())
    }

    fn point(&self, swept_value: Option<f64>) -> Result<ScenarioPoint> {
        let mut system = self.system;
        let mut links = self.links.clone();
        if let (Some(sw), Some(v)) = (&self.sweep, swept_value) {
            for &p in std::iter::once(&sw.parameter).chain(&sw.also) {
                self.apply(p, v, &mut system, &mut links)?;
            }
        }
        let stats = match &links {
            Links::Geometry(g) => LinkStats::from_geometry(&Geometry {
                d_st_sr: g.d_st_sr,
                d_pt_sr: g.d_pt_sr.expand(system.l_t, "geometry.d_pt_sr")?,
                d_st_pr: g.d_st_pr.expand(system.l_r, "geometry.d_st_pr")?,
                d_ref: g.d_ref,
                alpha: g.alpha,
            })?,
            Links::Means(m) => LinkStats::new(m.x, m.y_per_pr.clone(), m.z_per_pt.clone())?,
        };
        system.validate_with(&stats)?;
        Ok(ScenarioPoint {
            swept_value,
            config: system,
            stats,
        })
    }

    /// Every grid point in sweep order (a single point without a sweep).
    pub fn points(&self) -> Result<Vec<ScenarioPoint>> {
        match &self.sweep {
            None => Ok(vec![self.point(None)?]),
            Some(sw) => sw.values().into_iter().map(|v| self.point(Some(v))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG: &str = r#"
caption = "test"
[system]
m = 4
n = 5
l_t = 2
l_r = 2
p_p_db = 10
p_max_db = 20
q_db = 7
gamma_th_db = 3

[geometry]
d_st_sr = 18
d_pt_sr = 56
d_st_pr = [60, 60]
alpha = 4

[sweep]
parameter = "d_st_pr"
start = 20
stop = 100
steps = 5

[mc]
trials = 1000
seed = 7
"#;

    #[test]
    fn parses_and_converts_db_once() {
        let s = Scenario::from_toml_str(FIG).unwrap();
        assert!((s.system.q - 10f64.powf(0.7)).abs() < 1e-12);
        assert_eq!(s.system.n0, 1.0);
        let pts = s.points().unwrap();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0].swept_value, Some(20.0));
        assert_eq!(pts[4].stats.mean_y_per_pr, vec![1.0, 1.0]);
        assert_eq!(pts[0].stats.mean_z_per_pt.len(), 2);
    }

    #[test]
    fn round_trip_through_print() {
        let s = Scenario::from_toml_str(FIG).unwrap();
        let again = Scenario::from_toml_str(&s.to_toml_string()).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(again.system.q, s.system.q) < 1e-14);
        assert!(rel(again.system.p_p, s.system.p_p) < 1e-14);
        assert!(rel(again.system.gamma_th, s.system.gamma_th) < 1e-14);
        assert_eq!(again.links, s.links);
        assert_eq!(again.sweep, s.sweep);
        assert_eq!(again.mc, s.mc);
    }

    #[test]
    fn json_is_accepted() {
        let s = Scenario::from_toml_str(FIG).unwrap();
        let v: toml::Value = toml::from_str(FIG).unwrap();
        let j = serde_json::to_string(&v).unwrap();
        assert_eq!(Scenario::from_json_str(&j).unwrap(), s);
    }

    #[test]
    fn errors_name_fields() {
        let bad = FIG.replace("n = 5", "n = 3");
        match Scenario::from_toml_str(&bad) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "system.n"),
            other => panic!("{other:?}"),
        }
        let bad = FIG.replace("parameter = \"d_st_pr\"", "parameter = \"colour\"");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(Error::Config { path, .. }) if path == "sweep.parameter"));
        let bad = FIG.replace("d_st_pr = [60, 60]", "d_st_pr = [60, 60, 60]");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(Error::Config { path, .. }) if path == "geometry.d_st_pr"));
        let bad = FIG.replace("[geometry]", "[means]\nx = 1\ny_per_pr = [1]\nz_per_pt = [1]\n[geometry]");
        assert!(matches!(Scenario::from_toml_str(&bad), Err(Error::Config { path, .. }) if path == "geometry"));
    }

    #[test]
    fn tied_integer_sweep() {
        let text = FIG
            .replace("parameter = \"d_st_pr\"\nstart = 20\nstop = 100\nsteps = 5", "parameter = \"n\"\nalso = [\"l_t\"]\nstart = 16\nstop = 32\nsteps = 3")
            .replace("m = 4", "m = 16");
        let s = Scenario::from_toml_str(&text).unwrap();
        let pts = s.points().unwrap();
        assert_eq!(pts[1].config.n, 24);
        assert_eq!(pts[1].config.l_t, 24);
        assert_eq!(pts[1].stats.l_t(), 24);

        let frac = text.replace("steps = 3", "steps = 4");
        assert!(Scenario::from_toml_str(&frac).is_err());
    }
}
