//! Model parameters and the `params.json` file.
//!
//! Every section of the file is optional except that a risk section, when
//! present, must carry `alpha`: the establishment ceiling has no accepted
//! default value and has to be chosen by the analyst.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::VesselType;

/// Species introduction potential per tonne of discharged ballast water.
pub const INTRODUCTION_POTENTIAL_PER_TONNE: f64 = 3.22e-6;
/// Daily mortality of organisms held in ballast tanks.
pub const DAILY_MORTALITY: f64 = 0.02;
/// Temperature tolerance scale, °C.
pub const TEMPERATURE_SCALE_C: f64 = 2.0;
/// Salinity tolerance scale, ppt.
pub const SALINITY_SCALE_PPT: f64 = 10.0;
/// Organism removal achieved by a convention-compliant treatment system.
pub const IMO_BWM_EFFICACY: f64 = 0.9915;
/// Surviving fraction under convention-compliant treatment (`1 - IMO_BWM_EFFICACY`).
pub const IMO_BWM_SURVIVAL: f64 = 0.0085;

pub const ANNUAL_CAPITAL_USD: f64 = 49_000.0;
pub const ANNUAL_OPERATING_USD: f64 = 13_500.0;
pub const TREATMENT_USD_PER_TONNE: f64 = 0.135;

/// Parameters of the per-leg risk kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskParams {
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_delta_t")]
    pub delta_t: f64,
    #[serde(default = "default_delta_s")]
    pub delta_s: f64,
    pub alpha: f64,
    /// Surviving fraction after treatment; 1 means no treatment.
    #[serde(default = "default_rho")]
    pub rho: f64,
}

fn default_lambda() -> f64 {
    INTRODUCTION_POTENTIAL_PER_TONNE
}
fn default_mu() -> f64 {
    DAILY_MORTALITY
}
fn default_delta_t() -> f64 {
    TEMPERATURE_SCALE_C
}
fn default_delta_s() -> f64 {
    SALINITY_SCALE_PPT
}
fn default_rho() -> f64 {
    1.0
}

impl RiskParams {
    /// Published kernel constants with no treatment and the given
    /// establishment ceiling.
    pub fn with_alpha(alpha: f64) -> Self {
        RiskParams {
            lambda: INTRODUCTION_POTENTIAL_PER_TONNE,
            mu: DAILY_MORTALITY,
            delta_t: TEMPERATURE_SCALE_C,
            delta_s: SALINITY_SCALE_PPT,
            alpha,
            rho: 1.0,
        }
    }

    pub fn with_rho(self, rho: f64) -> Self {
        RiskParams { rho, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = [
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("delta_t", self.delta_t),
            ("delta_s", self.delta_s),
        ];
        for (name, value) in finite_nonneg {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Config(format!(
                    "risk.{name} must be >= 0, got {value}"
                )));
            }
        }
        if self.delta_t == 0.0 || self.delta_s == 0.0 {
            return Err(Error::Config(
                "risk.delta_t and risk.delta_s must be > 0".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "risk.alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!(
                "risk.rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

/// Treatment-system and shipping cost inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParams {
    #[serde(default = "default_capital")]
    pub annual_capital_usd: f64,
    #[serde(default = "default_operating")]
    pub annual_operating_usd: f64,
    #[serde(default = "default_per_tonne")]
    pub per_tonne_treatment_usd: f64,
    #[serde(default = "default_daily_costs")]
    pub daily_cost_usd: BTreeMap<VesselType, f64>,
}

fn default_capital() -> f64 {
    ANNUAL_CAPITAL_USD
}
fn default_operating() -> f64 {
    ANNUAL_OPERATING_USD
}
fn default_per_tonne() -> f64 {
    TREATMENT_USD_PER_TONNE
}

/// Placeholder daily operating costs (USD/day). Real analyses should supply
/// their own per-type figures.
pub fn default_daily_costs() -> BTreeMap<VesselType, f64> {
    BTreeMap::from([
        (VesselType::Containership, 25_000.0),
        (VesselType::Bulker, 10_000.0),
        (VesselType::Tanker, 24_000.0),
        (VesselType::Other, 8_000.0),
    ])
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            annual_capital_usd: ANNUAL_CAPITAL_USD,
            annual_operating_usd: ANNUAL_OPERATING_USD,
            per_tonne_treatment_usd: TREATMENT_USD_PER_TONNE,
            daily_cost_usd: default_daily_costs(),
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("annual_capital_usd", self.annual_capital_usd),
            ("annual_operating_usd", self.annual_operating_usd),
            ("per_tonne_treatment_usd", self.per_tonne_treatment_usd),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Config(format!(
                    "cost.{name} must be >= 0, got {value}"
                )));
            }
        }
        for (ty, value) in &self.daily_cost_usd {
            if !(value.is_finite() && *value >= 0.0) {
                return Err(Error::Config(format!(
                    "cost.daily_cost_usd.{ty} must be >= 0, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Copy with the treatment-system cost fields multiplied by `factor`.
    /// Baseline daily shipping costs are left alone.
    pub fn scale_compliance(&self, factor: f64) -> Self {
        CostParams {
            annual_capital_usd: self.annual_capital_usd * factor,
            annual_operating_usd: self.annual_operating_usd * factor,
            per_tonne_treatment_usd: self.per_tonne_treatment_usd * factor,
            daily_cost_usd: self.daily_cost_usd.clone(),
        }
    }
}

/// Rule-growth controls for the higher-order network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HonParams {
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default = "default_min_support")]
    pub min_support: u32,
    #[serde(default = "default_threshold_scale")]
    pub divergence_threshold_scale: f64,
}

fn default_max_order() -> usize {
    3
}
fn default_min_support() -> u32 {
    5
}
fn default_threshold_scale() -> f64 {
    1.0
}

impl Default for HonParams {
    fn default() -> Self {
        HonParams {
            max_order: 3,
            min_support: 5,
            divergence_threshold_scale: 1.0,
        }
    }
}

impl HonParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_order < 1 {
            return Err(Error::Config("hon.max_order must be >= 1".into()));
        }
        if self.min_support < 1 {
            return Err(Error::Config("hon.min_support must be >= 1".into()));
        }
        if !(self.divergence_threshold_scale.is_finite() && self.divergence_threshold_scale > 0.0) {
            return Err(Error::Config(
                "hon.divergence_threshold_scale must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Share of the ballast taken up at a port that is released at each of the
/// following calls. `fractions[0]` goes to the next call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DischargeProfile {
    pub fractions: Vec<f64>,
}

impl Default for DischargeProfile {
    fn default() -> Self {
        DischargeProfile {
            fractions: vec![0.5, 0.3, 0.2],
        }
    }
}

impl DischargeProfile {
    pub fn horizon(&self) -> usize {
        self.fractions.len()
    }

    pub fn mass(&self) -> f64 {
        self.fractions.iter().sum()
    }

    /// Fractions for an itinerary with only `calls` subsequent calls left.
    /// The profile is cut and rescaled so the released mass is unchanged.
    pub fn truncated(&self, calls: usize) -> Vec<f64> {
        if calls >= self.fractions.len() {
            return self.fractions.clone();
        }
        let head = &self.fractions[..calls];
        let kept: f64 = head.iter().sum();
        if kept <= 0.0 {
            return head.to_vec();
        }
        let scale = self.mass() / kept;
        head.iter().map(|f| f * scale).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() {
            return Err(Error::Config(
                "discharge.fractions must not be empty".into(),
            ));
        }
        if self.fractions.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
            return Err(Error::Config("discharge.fractions must be >= 0".into()));
        }
        if self.mass() > 1.0 + 1e-12 {
            return Err(Error::Config(format!(
                "discharge.fractions sum to {} (> 1)",
                self.mass()
            )));
        }
        Ok(())
    }
}

/// Unordered pairs of ecoregions treated as biogeographic neighbours.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, String)>", into = "Vec<(String, String)>")]
pub struct EcoregionAdjacency {
    pairs: BTreeSet<(String, String)>,
}

impl EcoregionAdjacency {
    pub fn new<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut set = BTreeSet::new();
        for (a, b) in pairs {
            let (a, b) = (a.into(), b.into());
            if a == b {
                return Err(Error::Config(format!(
                    "ecoregion `{a}` listed as its own neighbour"
                )));
            }
            set.insert(if a < b { (a, b) } else { (b, a) });
        }
        Ok(EcoregionAdjacency { pairs: set })
    }

    /// Same ecoregion, or a declared neighbouring pair.
    pub fn same_or_neighbor(&self, a: &str, b: &str) -> bool {
        if a == b {
            return true;
        }
        let key = if a < b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        self.pairs.contains(&key)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }
}

impl TryFrom<Vec<(String, String)>> for EcoregionAdjacency {
    type Error = Error;

    fn try_from(pairs: Vec<(String, String)>) -> Result<Self> {
        EcoregionAdjacency::new(pairs)
    }
}

impl From<EcoregionAdjacency> for Vec<(String, String)> {
    fn from(adj: EcoregionAdjacency) -> Self {
        adj.pairs.into_iter().collect()
    }
}

/// Contents of `params.json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk: Option<RiskParams>,
    #[serde(default)]
    pub cost: CostParams,
    #[serde(default)]
    pub hon: HonParams,
    #[serde(default)]
    pub discharge: DischargeProfile,
    #[serde(default)]
    pub neighbor_ecoregions: EcoregionAdjacency,
}

impl Params {
    pub fn from_json(text: &str, file: &str) -> Result<Self> {
        let params: Params = serde_json::from_str(text).map_err(|source| Error::Json {
            file: file.to_string(),
            source,
        })?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Params::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(risk) = &self.risk {
            risk.validate()?;
        }
        self.cost.validate()?;
        self.hon.validate()?;
        self.discharge.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err =
            Params::from_json(r#"{"risk": {"alpha": 1.0, "lamda": 1.0}}"#, "p.json").unwrap_err();
        assert!(matches!(err, Error::Json { .. }), "{err}");
        let err = Params::from_json(r#"{"risks": {}}"#, "p.json").unwrap_err();
        assert!(matches!(err, Error::Json { .. }));
    }

    #[test]
    fn alpha_is_required_in_risk_section() {
        let err = Params::from_json(r#"{"risk": {"rho": 1.0}}"#, "p.json").unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
    }

    #[test]
    fn defaults_fill_missing_fields() {
        let p = Params::from_json(r#"{"risk": {"alpha": 0.5}}"#, "p.json").unwrap();
        let risk = p.risk.unwrap();
        assert_eq!(risk.lambda, 3.22e-6);
        assert_eq!(risk.mu, 0.02);
        assert_eq!(risk.delta_t, 2.0);
        assert_eq!(risk.delta_s, 10.0);
        assert_eq!(risk.rho, 1.0);
        assert_eq!(p.cost.annual_capital_usd, 49_000.0);
        assert_eq!(p.cost.annual_operating_usd, 13_500.0);
        assert_eq!(p.cost.per_tonne_treatment_usd, 0.135);
        assert_eq!(p.discharge.fractions, vec![0.5, 0.3, 0.2]);
        assert_eq!(p.hon, HonParams::default());
    }

    #[test]
    fn risk_ranges_are_enforced() {
        assert!(RiskParams::with_alpha(0.0).validate().is_err());
        assert!(RiskParams::with_alpha(1.5).validate().is_err());
        assert!(RiskParams::with_alpha(1.0)
            .with_rho(1.01)
            .validate()
            .is_err());
        assert!(RiskParams::with_alpha(1.0)
            .with_rho(IMO_BWM_SURVIVAL)
            .validate()
            .is_ok());
        assert!((1.0 - IMO_BWM_EFFICACY - IMO_BWM_SURVIVAL).abs() < 1e-15);
    }

    #[test]
    fn profile_truncation_preserves_mass() {
        let p = DischargeProfile::default();
        assert_eq!(p.truncated(5), vec![0.5, 0.3, 0.2]);
        let two = p.truncated(2);
        assert!((two[0] - 0.625).abs() < 1e-15);
        assert!((two[1] - 0.375).abs() < 1e-15);
        assert_eq!(p.truncated(1), vec![1.0]);

        let partial = DischargeProfile {
            fractions: vec![0.4, 0.2, 0.2],
        };
        let one = partial.truncated(1);
        assert!((one[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn profile_over_unit_mass_is_rejected() {
        let p = DischargeProfile {
            fractions: vec![0.6, 0.6],
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn ecoregion_adjacency_is_symmetric() {
        let adj = EcoregionAdjacency::new([("E2", "E1")]).unwrap();
        assert!(adj.same_or_neighbor("E1", "E2"));
        assert!(adj.same_or_neighbor("E2", "E1"));
        assert!(adj.same_or_neighbor("E3", "E3"));
        assert!(!adj.same_or_neighbor("E1", "E3"));
        assert!(EcoregionAdjacency::new([("E1", "E1")]).is_err());

        let p =
            Params::from_json(r#"{"neighbor_ecoregions": [["B", "A"], ["A", "B"]]}"#, "p").unwrap();
        assert_eq!(p.neighbor_ecoregions.len(), 1);
    }
}
