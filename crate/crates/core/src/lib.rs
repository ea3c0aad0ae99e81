//! Underlay cognitive MIMO links with ZF detection: optimal per-stream
//! power under an average interference temperature, exact outage
//! analysis, interference-leakage control by antenna reduction, and a
//! Monte-Carlo reference for all of it.

pub mod commands;
pub mod error;
pub mod hypoexp;
pub mod leakage;
pub mod linkstats;
pub mod mcharness;
pub mod outage;
pub mod powalloc;
pub mod quad;
pub mod rng;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
pub use leakage::{antenna_pmf, leakage_probability, reduce_antennas, reduced_outage, AntennaPmf, LeakageReport};
pub use linkstats::{Geometry, LinkStats};
pub use mcharness::{ChannelDraw, McEstimate};
pub use outage::{AsymptoticCase, OutageBranch, OutageResult};
pub use powalloc::{solve_lambda, PowerSolution, SystemConfig};
