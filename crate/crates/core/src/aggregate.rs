//! Combining independent transfer risks into pair, port and region figures.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hon::PhysicalAdjacency;
use crate::ingest::Dataset;

/// `1 − Π(1 − p)`, evaluated as `−expm1(Σ log1p(−p))` so long lists of small
/// probabilities neither underflow nor lose precision. Empty input gives 0.
pub fn aggregate_pair_risk(route_probs: &[f64]) -> f64 {
    let log_survival: f64 = route_probs.iter().map(|p| (-p).ln_1p()).sum();
    -log_survival.exp_m1()
}

/// Risk that a port receives a species from at least one incoming pair.
pub fn cumulative_port_risk(incoming: &[f64]) -> f64 {
    aggregate_pair_risk(incoming)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortRisk {
    pub port_id: String,
    pub cumulative_risk: f64,
}

/// Cumulative risk for every port of `dataset`, in port order.
pub fn port_risks(dataset: &Dataset, adj: &PhysicalAdjacency) -> Vec<PortRisk> {
    adj.incoming_by_port()
        .iter()
        .zip(dataset.ports())
        .map(|(incoming, p)| PortRisk {
            port_id: p.port_id.clone(),
            cumulative_risk: cumulative_port_risk(incoming),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRiskSummary {
    pub region_id: String,
    pub risk_no_policy: f64,
    pub risk_policy: f64,
    /// `(no_policy − policy) / no_policy`; `None` when no-policy risk is 0.
    pub reduction_pct: Option<f64>,
    /// `no_policy / policy`; infinite when only the policy risk is 0,
    /// `None` when both are.
    pub fold_change: Option<f64>,
}

/// A region with no ports; it has no mean and is left out of the summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmptyRegion {
    pub region_id: String,
}

/// Relative reduction and fold change between two risks.
///
/// ```
/// let (reduction, fold) = balhon::aggregate::reduction_stats(0.5, 0.005).unwrap();
/// assert!((reduction - 0.99).abs() < 1e-12);
/// assert!((fold - 100.0).abs() < 1e-9);
/// assert!(balhon::aggregate::reduction_stats(0.0, 0.0).is_err());
/// ```
pub fn reduction_stats(no_policy: f64, policy: f64) -> Result<(f64, f64)> {
    if no_policy <= 0.0 {
        return Err(Error::UndefinedReduction);
    }
    let fold = if policy > 0.0 {
        no_policy / policy
    } else {
        f64::INFINITY
    };
    Ok(((no_policy - policy) / no_policy, fold))
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Unweighted mean port risk per region under both scenarios, with the
/// reduction statistics. Regions are reported in id order.
pub fn region_risk_summary(
    no_policy: &[PortRisk],
    policy: &[PortRisk],
    dataset: &Dataset,
) -> Result<(Vec<RegionRiskSummary>, Vec<EmptyRegion>)> {
    let expected: Vec<&str> = dataset.ports().iter().map(|p| p.port_id.as_str()).collect();
    let same_ports = |rs: &[PortRisk]| {
        rs.len() == expected.len() && rs.iter().zip(&expected).all(|(r, e)| r.port_id == *e)
    };
    if !same_ports(no_policy) || !same_ports(policy) {
        return Err(mismatch(no_policy, policy));
    }
    let groups = dataset
        .ports_by_region()
        .into_iter()
        .map(|(r, ports)| (r.to_string(), ports))
        .collect();
    summarize_regions(no_policy, policy, &groups)
}

fn mismatch(a: &[PortRisk], b: &[PortRisk]) -> Error {
    let ids = |rs: &[PortRisk]| {
        rs.iter()
            .map(|r| r.port_id.as_str())
            .collect::<Vec<_>>()
            .join(",")
    };
    Error::DatasetMismatch {
        left: ids(a),
        right: ids(b),
    }
}

/// As [`region_risk_summary`], with region membership given as port
/// positions in the two risk lists.
pub fn summarize_regions(
    no_policy: &[PortRisk],
    policy: &[PortRisk],
    groups: &BTreeMap<String, Vec<usize>>,
) -> Result<(Vec<RegionRiskSummary>, Vec<EmptyRegion>)> {
    let aligned = no_policy.len() == policy.len()
        && no_policy
            .iter()
            .zip(policy)
            .all(|(a, b)| a.port_id == b.port_id);
    if !aligned {
        return Err(mismatch(no_policy, policy));
    }
    let mut summaries = Vec::new();
    let mut empty = Vec::new();
    for (region, ports) in groups {
        if ports.is_empty() {
            log::warn!("region {region} has no ports");
            empty.push(EmptyRegion {
                region_id: region.clone(),
            });
            continue;
        }
        let a = mean(ports.iter().map(|&i| no_policy[i].cumulative_risk));
        let b = mean(ports.iter().map(|&i| policy[i].cumulative_risk));
        let (reduction_pct, fold_change) = match reduction_stats(a, b) {
            Ok((r, f)) => (Some(r), Some(f)),
            Err(_) => (None, None),
        };
        summaries.push(RegionRiskSummary {
            region_id: region.clone(),
            risk_no_policy: a,
            risk_policy: b,
            reduction_pct,
            fold_change,
        });
    }
    Ok((summaries, empty))
}

/// Flat map of port id → risk, handy for lookups in tests and reports.
pub fn risk_by_port(risks: &[PortRisk]) -> BTreeMap<&str, f64> {
    risks
        .iter()
        .map(|r| (r.port_id.as_str(), r.cumulative_risk))
        .collect()
}
