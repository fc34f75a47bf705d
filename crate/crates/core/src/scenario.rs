//! Named scenarios run end to end, and baseline/treated comparisons.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aggregate::{port_risks, summarize_regions, EmptyRegion, PortRisk, RegionRiskSummary};
use crate::cost::{cost_change_matrix, RouteCostChange};
use crate::error::{Error, Result};
use crate::hon::{
    build_hon_network, extract_paths, grow_rules, merge_paths, normalize_edges, project_physical,
    PhysicalAdjacency, RuleSet,
};
use crate::ingest::Dataset;
use crate::params::{CostParams, DischargeProfile, HonParams, Params, RiskParams};

/// Whether the port×port risk matrix is divided by its own maximum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Entries are probabilities.
    Raw,
    /// Entries are relative to the largest pair risk of the same scenario.
    #[default]
    PerScenario,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub normalization: Normalization,
    pub risk: RiskParams,
    pub cost: CostParams,
    pub hon: HonParams,
    pub discharge: DischargeProfile,
    /// When set, the scenario only runs on the dataset with this content hash.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset_hash: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    normalization: Normalization,
    risk: Option<RiskParams>,
    cost: Option<CostParams>,
    hon: Option<HonParams>,
    discharge: Option<DischargeProfile>,
    dataset_hash: Option<String>,
}

impl ScenarioConfig {
    /// Scenario with the given risk parameters and everything else taken
    /// from `defaults`.
    pub fn new(name: impl Into<String>, risk: RiskParams, defaults: &Params) -> Self {
        ScenarioConfig {
            name: name.into(),
            normalization: Normalization::default(),
            risk,
            cost: defaults.cost.clone(),
            hon: defaults.hon,
            discharge: defaults.discharge.clone(),
            dataset_hash: None,
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// Parses a scenario file. Sections it leaves out come from `defaults`;
    /// the risk section (or `defaults.risk`) must supply `alpha`.
    pub fn from_json(text: &str, file: &str, defaults: &Params) -> Result<Self> {
        let raw: ScenarioFile = serde_json::from_str(text).map_err(|source| Error::Json {
            file: file.to_string(),
            source,
        })?;
        let risk = raw.risk.or(defaults.risk).ok_or_else(|| {
            Error::Config(format!(
                "{file}: scenario `{}` has no risk section with alpha",
                raw.name
            ))
        })?;
        let cfg = ScenarioConfig {
            name: raw.name,
            normalization: raw.normalization,
            risk,
            cost: raw.cost.unwrap_or_else(|| defaults.cost.clone()),
            hon: raw.hon.unwrap_or(defaults.hon),
            discharge: raw.discharge.unwrap_or_else(|| defaults.discharge.clone()),
            dataset_hash: raw.dataset_hash,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, defaults: &Params) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ScenarioConfig::from_json(&text, &path.display().to_string(), defaults)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Config("scenario name is empty".into()));
        }
        self.risk.validate()?;
        self.cost.validate()?;
        self.hon.validate()?;
        self.discharge.validate()
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub dataset_hash: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub rules: RuleSet,
    /// Pair risks as used for port risks (normalized when configured).
    pub adjacency: PhysicalAdjacency,
    /// Port risks in dataset port order.
    pub port_risks: Vec<PortRisk>,
    /// Region id → positions in `port_risks`.
    pub regions: BTreeMap<String, Vec<usize>>,
    pub cost_matrix: BTreeMap<(String, String), RouteCostChange>,
    pub provenance: Provenance,
}

/// Paths → weighted rules.
pub fn build_rules(dataset: &Dataset, cfg: &ScenarioConfig) -> RuleSet {
    let observed = extract_paths(dataset, &cfg.discharge, &cfg.risk);
    let merged = merge_paths(&observed);
    grow_rules(&merged, &cfg.hon)
}

/// Rules → state network → port×port matrix, normalized if configured.
pub fn risk_adjacency(
    rules: &RuleSet,
    n_ports: usize,
    normalization: Normalization,
) -> Result<PhysicalAdjacency> {
    let network = build_hon_network(rules)?;
    let adj = project_physical(&network, n_ports);
    Ok(match normalization {
        Normalization::Raw => adj,
        Normalization::PerScenario => normalize_edges(&adj),
    })
}

/// Runs every stage on one scenario. The result depends only on the dataset
/// and the configuration.
pub fn run_scenario(dataset: &Dataset, cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let dataset_hash = dataset.content_hash();
    if let Some(pinned) = &cfg.dataset_hash {
        if *pinned != dataset_hash {
            return Err(Error::DatasetMismatch {
                left: pinned.clone(),
                right: dataset_hash,
            });
        }
    }
    let rules = build_rules(dataset, cfg);
    let adjacency = risk_adjacency(&rules, dataset.ports().len(), cfg.normalization)?;
    let port_risks = port_risks(dataset, &adjacency);
    let cost_matrix = cost_change_matrix(dataset, &cfg.cost)?;
    let regions = dataset
        .ports_by_region()
        .into_iter()
        .map(|(r, p)| (r.to_string(), p))
        .collect();
    Ok(ScenarioResult {
        provenance: Provenance {
            config_hash: cfg.config_hash(),
            dataset_hash,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        config: cfg.clone(),
        rules,
        adjacency,
        port_risks,
        regions,
        cost_matrix,
    })
}

/// Change in annual compliance cost on one route between two scenarios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostDelta {
    pub origin_region: String,
    pub dest_region: String,
    pub baseline_compliance_usd: f64,
    pub treated_compliance_usd: f64,
    pub delta_usd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub baseline: String,
    pub treated: String,
    pub regions: Vec<RegionRiskSummary>,
    pub empty_regions: Vec<EmptyRegion>,
    pub cost_deltas: Vec<CostDelta>,
}

/// Region reductions of `treated` relative to `baseline`. Both must come
/// from the same dataset.
pub fn compare_scenarios(
    baseline: &ScenarioResult,
    treated: &ScenarioResult,
) -> Result<ComparisonReport> {
    if baseline.provenance.dataset_hash != treated.provenance.dataset_hash {
        return Err(Error::DatasetMismatch {
            left: baseline.provenance.dataset_hash.clone(),
            right: treated.provenance.dataset_hash.clone(),
        });
    }
    let (regions, empty_regions) =
        summarize_regions(&baseline.port_risks, &treated.port_risks, &baseline.regions)?;
    let cost_deltas = baseline
        .cost_matrix
        .iter()
        .map(|(key, a)| {
            let b = treated
                .cost_matrix
                .get(key)
                .map_or(0.0, |b| b.compliance_usd);
            CostDelta {
                origin_region: key.0.clone(),
                dest_region: key.1.clone(),
                baseline_compliance_usd: a.compliance_usd,
                treated_compliance_usd: b,
                delta_usd: b - a.compliance_usd,
            }
        })
        .collect();
    Ok(ComparisonReport {
        baseline: baseline.config.name.clone(),
        treated: treated.config.name.clone(),
        regions,
        empty_regions,
        cost_deltas,
    })
}
