//! Ballast-water invasion risk on higher-order shipping networks.
//!
//! The pipeline reads ports, voyages and regions ([`ingest`]), scores every
//! ballast transfer with a per-leg risk kernel ([`risk`]), grows a
//! higher-order network from the resulting paths ([`hon`]), and aggregates
//! risk to ports and regions ([`aggregate`]). Alongside, it prices treatment
//! compliance per route ([`cost`]) and measures how burdens and benefits are
//! spread across regions of different income ([`inequality`]). [`scenario`]
//! ties the stages together and [`cli`] is the command-line front end.
//!
//! ```
//! use balhon::params::{Params, RiskParams, IMO_BWM_SURVIVAL};
//! use balhon::scenario::{compare_scenarios, run_scenario, Normalization, ScenarioConfig};
//!
//! let data = balhon::synth::synth_dataset(1, 12, 300).unwrap();
//! let risk = RiskParams::with_alpha(1.0);
//! let base = ScenarioConfig::new("no_policy", risk, data.params()).with_normalization(Normalization::Raw);
//! let treated = ScenarioConfig::new("imo", risk.with_rho(IMO_BWM_SURVIVAL), data.params())
//!     .with_normalization(Normalization::Raw);
//! let a = run_scenario(&data, &base).unwrap();
//! let b = run_scenario(&data, &treated).unwrap();
//! let report = compare_scenarios(&a, &b).unwrap();
//! for row in report.regions.iter().filter(|r| r.risk_no_policy > 0.0) {
//!     assert!(row.reduction_pct.unwrap() <= 1.0 - IMO_BWM_SURVIVAL + 1e-12);
//! }
//! ```

pub mod aggregate;
pub mod cli;
pub mod cost;
pub mod error;
pub mod hon;
pub mod inequality;
pub mod ingest;
pub mod params;
pub mod report;
pub mod risk;
pub mod scenario;
pub mod synth;

pub use error::{Error, Result};
