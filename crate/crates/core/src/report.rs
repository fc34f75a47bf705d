//! Output files: region risks, route costs, Lorenz curves and the run
//! manifest. Numbers use fixed formats so files compare byte for byte.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::aggregate::RegionRiskSummary;
use crate::cost::RouteCostChange;
use crate::error::{Error, Result};
use crate::inequality::LorenzCurve;

pub const REGION_RISK_FILE: &str = "region_risk.csv";
pub const COST_MATRIX_FILE: &str = "cost_matrix.csv";
pub const LORENZ_FILE: &str = "lorenz.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RULES_FILE: &str = "rules.csv";

/// Probabilities and ratios that can span many orders of magnitude.
pub fn sci(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.6e}")
    }
}

/// Money, shares and fractions.
pub fn fixed(x: f64) -> String {
    // Avoid printing "-0.000000".
    let s = format!("{x:.6}");
    if s.trim_start_matches('-')
        .bytes()
        .all(|b| b == b'0' || b == b'.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn blank_or(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// One row per region. Risk columns for the treated scenario are blank when
/// there is none.
pub fn region_risk_csv(rows: &[RegionRiskSummary], with_policy: bool) -> String {
    let mut out = String::from("region_id,risk_no_policy,risk_policy,reduction_pct,fold_change\n");
    for r in rows {
        if with_policy {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.region_id,
                sci(r.risk_no_policy),
                sci(r.risk_policy),
                blank_or(r.reduction_pct, fixed),
                blank_or(r.fold_change, sci),
            ));
        } else {
            out.push_str(&format!("{},{},,,\n", r.region_id, sci(r.risk_no_policy)));
        }
    }
    out
}

pub fn write_region_risk_csv(
    path: &Path,
    rows: &[RegionRiskSummary],
    with_policy: bool,
) -> Result<()> {
    write_file(path, &region_risk_csv(rows, with_policy))
}

/// Routes with traffic only; `pct_change` is a fraction.
pub fn cost_matrix_csv(matrix: &BTreeMap<(String, String), RouteCostChange>) -> String {
    let mut out =
        String::from("origin_region,dest_region,baseline_usd,compliance_usd,pct_change\n");
    for r in matrix.values() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.origin_region,
            r.dest_region,
            fixed(r.baseline_usd),
            fixed(r.compliance_usd),
            blank_or(r.pct_change, fixed),
        ));
    }
    out
}

pub fn write_cost_matrix_csv(
    path: &Path,
    matrix: &BTreeMap<(String, String), RouteCostChange>,
) -> Result<()> {
    write_file(path, &cost_matrix_csv(matrix))
}

/// Curve points followed by a `gini,<value>` record. Without a curve only
/// the header and an empty gini record are written.
pub fn lorenz_csv(curve: Option<&LorenzCurve>) -> String {
    let mut out = String::from("cum_income_share,cum_metric_share\n");
    match curve {
        Some(c) => {
            for (x, y) in &c.points {
                out.push_str(&format!("{},{}\n", fixed(*x), fixed(*y)));
            }
            out.push_str(&format!("gini,{}\n", fixed(c.gini)));
        }
        None => out.push_str("gini,\n"),
    }
    out
}

pub fn write_lorenz_csv(path: &Path, curve: Option<&LorenzCurve>) -> Result<()> {
    write_file(path, &lorenz_csv(curve))
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestScenario {
    pub name: String,
    pub config_hash: String,
    pub config: crate::scenario::ScenarioConfig,
    /// Distinct rule contexts per order, starting at order 1.
    pub contexts_per_order: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub dataset_hash: String,
    pub ports: usize,
    pub voyages: usize,
    pub regions: usize,
    pub rejected_rows: usize,
    pub scenarios: Vec<ManifestScenario>,
    pub lorenz_metric: String,
    pub outputs: Vec<String>,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    crate::ingest::write_json(path, manifest)
}
