use std::collections::BTreeMap;

use rayon::prelude::*;

use super::PortIdx;
use crate::aggregate::aggregate_pair_risk;
use crate::ingest::{voyage_duration, Dataset, VoyageRecord};
use crate::params::{DischargeProfile, RiskParams};
use crate::risk::{spread_probability, LegContext};

/// One ballast transfer: taken up at the first port, released at the last,
/// carried through the calls in between.
#[derive(Debug, Clone, PartialEq)]
pub struct PathObservation {
    pub port_sequence: Vec<PortIdx>,
    /// Spread probability of the transfer.
    pub weight: f64,
}

impl PathObservation {
    pub fn new(port_sequence: Vec<PortIdx>, weight: f64) -> Self {
        debug_assert!(port_sequence.len() >= 2);
        debug_assert!(port_sequence.windows(2).all(|w| w[0] != w[1]));
        PathObservation {
            port_sequence,
            weight,
        }
    }

    pub fn source(&self) -> PortIdx {
        self.port_sequence[0]
    }

    pub fn sink(&self) -> PortIdx {
        *self
            .port_sequence
            .last()
            .expect("paths have at least two ports")
    }
}

/// Splits a vessel's ordered voyages into connected itineraries. A voyage
/// that does not leave from the previous destination starts a new one.
fn itineraries<'a>(voyages: &[&'a VoyageRecord]) -> Vec<Vec<&'a VoyageRecord>> {
    let mut out: Vec<Vec<&VoyageRecord>> = Vec::new();
    for &v in voyages {
        match out.last_mut() {
            Some(chain) if chain.last().is_some_and(|p| p.dest_port == v.origin_port) => {
                chain.push(v)
            }
            _ => out.push(vec![v]),
        }
    }
    out
}

fn itinerary_paths(
    dataset: &Dataset,
    legs: &[&VoyageRecord],
    profile: &DischargeProfile,
    params: &RiskParams,
) -> Vec<PathObservation> {
    let idx = |id: &str| dataset.port_index(id).expect("voyage ports are validated") as PortIdx;
    let mut calls: Vec<PortIdx> = Vec::with_capacity(legs.len() + 1);
    calls.push(idx(&legs[0].origin_port));
    calls.extend(legs.iter().map(|v| idx(&v.dest_port)));
    let durations: Vec<f64> = legs.iter().map(|v| voyage_duration(v)).collect();
    let ports = dataset.ports();

    let mut out = Vec::new();
    for (uptake, leg) in legs.iter().enumerate() {
        let fractions = profile.truncated(legs.len() - uptake);
        let source = &ports[calls[uptake] as usize];
        let mut elapsed = 0.0;
        for (step, fraction) in fractions.iter().enumerate() {
            let sink_pos = uptake + step + 1;
            elapsed += durations[uptake + step];
            let sink = &ports[calls[sink_pos] as usize];
            let ctx = LegContext {
                discharge_tonnes: leg.discharge_tonnes * fraction,
                duration_days: elapsed,
                temp_diff: (source.temperature - sink.temperature).abs(),
                sal_diff: (source.salinity - sink.salinity).abs(),
                same_or_neighbor_ecoregion: dataset
                    .ecoregions()
                    .same_or_neighbor(&source.ecoregion_id, &sink.ecoregion_id),
                params: *params,
            };
            out.push(PathObservation::new(
                calls[uptake..=sink_pos].to_vec(),
                spread_probability(&ctx),
            ));
        }
    }
    out
}

/// Ballast transfer paths for every vessel, in vessel-id order.
///
/// The volume recorded on a voyage is treated as ballast taken up at its
/// origin and released over the following calls according to `profile`.
/// Each path is scored with the apportioned volume, the elapsed sailing time
/// since uptake, and the environmental contrast between uptake and release
/// ports.
pub fn extract_paths(
    dataset: &Dataset,
    profile: &DischargeProfile,
    params: &RiskParams,
) -> Vec<PathObservation> {
    let vessels: Vec<Vec<&VoyageRecord>> = dataset.voyages_by_vessel().into_values().collect();
    vessels
        .par_iter()
        .map(|voyages| {
            itineraries(voyages)
                .iter()
                .flat_map(|legs| itinerary_paths(dataset, legs, profile, params))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Collapses repeated port sequences into one path whose weight is the
/// probability that at least one of the repeats spreads a species.
/// Output is sorted by sequence.
pub fn merge_paths(observations: &[PathObservation]) -> Vec<PathObservation> {
    let mut grouped: BTreeMap<&[PortIdx], Vec<f64>> = BTreeMap::new();
    for obs in observations {
        grouped
            .entry(obs.port_sequence.as_slice())
            .or_default()
            .push(obs.weight);
    }
    grouped
        .into_iter()
        .map(|(seq, weights)| PathObservation::new(seq.to_vec(), aggregate_pair_risk(&weights)))
        .collect()
}
