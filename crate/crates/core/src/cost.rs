//! Ballast-water treatment compliance costs and their size relative to
//! ordinary shipping costs, per ordered region pair.
//!
//! Per voyage: `(C + O)/N + T·V`, where `C` and `O` are the annual capital
//! and operating costs of the treatment system, `N` the vessel's treatments
//! per year and `V` the treated volume in tonnes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{voyage_duration, Dataset, VoyageRecord};
use crate::params::CostParams;

/// Compliance cost of one treated voyage.
///
/// ```
/// use balhon::cost::voyage_compliance_cost;
/// use balhon::params::CostParams;
/// # let mut v = balhon::synth::synth_dataset(1, 4, 4).unwrap().voyages()[0].clone();
/// v.discharge_tonnes = 20_000.0;
/// assert_eq!(voyage_compliance_cost(&v, 50, &CostParams::default()).unwrap(), 3_950.0);
/// ```
pub fn voyage_compliance_cost(v: &VoyageRecord, n_treatments: u32, cp: &CostParams) -> Result<f64> {
    if n_treatments == 0 {
        return Err(Error::ZeroTreatments);
    }
    let fixed = (cp.annual_capital_usd + cp.annual_operating_usd) / f64::from(n_treatments);
    Ok(fixed + cp.per_tonne_treatment_usd * v.discharge_tonnes)
}

/// Treatments per vessel: its discharging voyages in the dataset, which is
/// taken to cover one year. Never below 1.
pub fn treatment_counts(dataset: &Dataset) -> BTreeMap<&str, u32> {
    let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
    for v in dataset.voyages() {
        let n = counts.entry(v.vessel_id.as_str()).or_insert(0);
        if v.discharge_tonnes > 0.0 {
            *n += 1;
        }
    }
    for n in counts.values_mut() {
        *n = (*n).max(1);
    }
    counts
}

pub fn count_annual_treatments(dataset: &Dataset, vessel_id: &str) -> u32 {
    let n = dataset
        .voyages()
        .iter()
        .filter(|v| v.vessel_id == vessel_id && v.discharge_tonnes > 0.0)
        .count();
    (n as u32).max(1)
}

/// Ordinary cost of the voyage: duration times the vessel type's daily cost.
pub fn baseline_voyage_cost(v: &VoyageRecord, cp: &CostParams) -> Result<f64> {
    let daily = cp
        .daily_cost_usd
        .get(&v.vessel_type)
        .ok_or_else(|| Error::UnknownVesselType(v.vessel_type.to_string()))?;
    Ok(voyage_duration(v) * daily)
}

/// Annual costs on one directed region pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteCostChange {
    pub origin_region: String,
    pub dest_region: String,
    pub baseline_usd: f64,
    pub compliance_usd: f64,
    /// `compliance / baseline`, as a fraction; `None` when the baseline is 0.
    pub pct_change: Option<f64>,
}

/// Baseline and compliance cost of a single voyage. Voyages that discharge
/// nothing need no treatment and cost nothing extra.
pub fn voyage_costs(v: &VoyageRecord, n_treatments: u32, cp: &CostParams) -> Result<(f64, f64)> {
    let baseline = baseline_voyage_cost(v, cp)?;
    let compliance = if v.discharge_tonnes > 0.0 {
        voyage_compliance_cost(v, n_treatments, cp)?
    } else {
        0.0
    };
    Ok((baseline, compliance))
}

/// Sums voyage costs over every directed region pair that has traffic.
/// Pairs without voyages are absent.
pub fn cost_change_matrix(
    dataset: &Dataset,
    cp: &CostParams,
) -> Result<BTreeMap<(String, String), RouteCostChange>> {
    let counts = treatment_counts(dataset);
    let per_voyage: Vec<(f64, f64)> = dataset
        .voyages()
        .par_iter()
        .map(|v| voyage_costs(v, counts[v.vessel_id.as_str()], cp))
        .collect::<Result<_>>()?;

    let region = |port: &str| {
        dataset
            .port(port)
            .map(|p| p.region_id.clone())
            .expect("voyage ports are validated")
    };
    let mut matrix: BTreeMap<(String, String), RouteCostChange> = BTreeMap::new();
    for (v, (baseline, compliance)) in dataset.voyages().iter().zip(per_voyage) {
        let key = (region(&v.origin_port), region(&v.dest_port));
        let entry = matrix
            .entry(key.clone())
            .or_insert_with(|| RouteCostChange {
                origin_region: key.0,
                dest_region: key.1,
                baseline_usd: 0.0,
                compliance_usd: 0.0,
                pct_change: None,
            });
        entry.baseline_usd += baseline;
        entry.compliance_usd += compliance;
    }
    for r in matrix.values_mut() {
        r.pct_change = (r.baseline_usd > 0.0).then(|| r.compliance_usd / r.baseline_usd);
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_timestamp, VesselType};

    fn voyage(ty: VesselType, sail: &str, arrive: &str, d: f64) -> VoyageRecord {
        VoyageRecord {
            voyage_id: "v".into(),
            vessel_id: "s".into(),
            vessel_type: ty,
            dwt: 100_000.0,
            origin_port: "A".into(),
            dest_port: "B".into(),
            sail: parse_timestamp(sail).unwrap(),
            arrival: parse_timestamp(arrive).unwrap(),
            discharge_tonnes: d,
        }
    }

    #[test]
    fn compliance_reference_values() {
        let cp = CostParams::default();
        let v = voyage(VesselType::Bulker, "2019-01-01", "2019-01-11", 20_000.0);
        assert_eq!(voyage_compliance_cost(&v, 50, &cp).unwrap(), 3_950.0);
        let empty = voyage(VesselType::Bulker, "2019-01-01", "2019-01-11", 0.0);
        assert_eq!(voyage_compliance_cost(&empty, 1, &cp).unwrap(), 62_500.0);
        let free = CostParams {
            per_tonne_treatment_usd: 0.0,
            ..cp.clone()
        };
        assert_eq!(voyage_compliance_cost(&v, 1, &free).unwrap(), 62_500.0);
        assert!(matches!(
            voyage_compliance_cost(&v, 0, &cp),
            Err(Error::ZeroTreatments)
        ));
    }

    #[test]
    fn baseline_reference_values() {
        let cp = CostParams::default();
        let bulker = voyage(VesselType::Bulker, "2019-01-01", "2019-01-11", 0.0);
        assert_eq!(baseline_voyage_cost(&bulker, &cp).unwrap(), 100_000.0);
        let same_day = voyage(VesselType::Bulker, "2019-01-01", "2019-01-01", 0.0);
        assert_eq!(baseline_voyage_cost(&same_day, &cp).unwrap(), 0.0);
        let tanker = voyage(
            VesselType::Tanker,
            "2019-01-01T00:00:00",
            "2019-01-08T12:00:00",
            0.0,
        );
        assert_eq!(baseline_voyage_cost(&tanker, &cp).unwrap(), 180_000.0);

        let mut missing = cp.clone();
        missing.daily_cost_usd.remove(&VesselType::Tanker);
        assert!(matches!(
            baseline_voyage_cost(&tanker, &missing),
            Err(Error::UnknownVesselType(t)) if t == "tanker"
        ));
    }
}
