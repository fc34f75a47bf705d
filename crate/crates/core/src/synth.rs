//! Seeded synthetic fleets for tests, demos and benchmarks.
//!
//! Vessels run liner loops over a few ports and occasionally divert, so the
//! traffic has both first-order structure and some longer memory.

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{Dataset, LoadOptions, PortRecord, RegionRecord, VesselType, VoyageRecord};
use crate::params::{EcoregionAdjacency, Params};

/// (id, name, country, sids, ldc)
const REGIONS: [(&str, &str, &str, bool, bool); 23] = [
    ("BEN", "Benin", "BEN", false, true),
    ("BGD", "Bangladesh", "BGD", false, true),
    ("BHR", "Bahrain", "BHR", true, false),
    ("BRA", "Brazil", "BRA", false, false),
    ("CHN", "China", "CHN", false, false),
    ("DOM", "Dominican Republic", "DOM", true, false),
    ("EUR", "Europe", "NLD", false, false),
    ("IND", "India", "IND", false, false),
    ("JAM", "Jamaica", "JAM", true, false),
    ("MUS", "Mauritius", "MUS", true, false),
    ("NTHAME", "North America", "CAN", false, false),
    ("OceROW", "Oceania and Rest of World", "AUS", false, false),
    ("SEN", "Senegal", "SEN", false, true),
    ("SGP", "Singapore", "SGP", true, false),
    ("SICB", "Caribbean SIDS", "BRB", true, true),
    ("SIOC", "Oceania SIDS", "FJI", true, true),
    ("SLAF", "African SIDS and LDCs", "MOZ", true, true),
    ("STHAME", "South America", "ARG", false, false),
    ("TGO", "Togo", "TGO", false, true),
    ("TZA", "Tanzania", "TZA", false, true),
    ("USA", "USA", "USA", false, false),
    ("XAF", "Rest Africa", "NGA", false, false),
    ("XAS", "Rest Asia", "IDN", false, false),
];

const VOYAGES_PER_VESSEL: usize = 20;

fn dwt_range(ty: VesselType) -> (f64, f64) {
    match ty {
        VesselType::Containership => (20_000.0, 150_000.0),
        VesselType::Bulker => (30_000.0, 200_000.0),
        VesselType::Tanker => (40_000.0, 300_000.0),
        VesselType::Other => (5_000.0, 40_000.0),
    }
}

fn regions(rng: &mut ChaCha8Rng) -> Vec<RegionRecord> {
    REGIONS
        .iter()
        .map(|&(id, name, _, sids, ldc)| {
            let gdp: f64 = if ldc {
                rng.gen_range(700.0..3_000.0)
            } else if sids {
                rng.gen_range(6_000.0..60_000.0)
            } else {
                rng.gen_range(3_000.0..65_000.0)
            };
            RegionRecord {
                region_id: id.to_string(),
                region_name: name.to_string(),
                gdp_per_capita_usd: gdp.round(),
                is_sids: sids,
                is_ldc: ldc,
            }
        })
        .collect()
}

fn ports(rng: &mut ChaCha8Rng, n: usize) -> Vec<PortRecord> {
    let n_eco = (n / 2).max(2);
    (0..n)
        .map(|i| {
            let (region, _, country, _, _) = REGIONS[i % REGIONS.len()];
            PortRecord {
                port_id: format!("P{i:04}"),
                name: format!("Port {i}"),
                country: country.to_string(),
                region_id: region.to_string(),
                latitude: (rng.gen_range(-60.0..70.0f64) * 1e4).round() / 1e4,
                longitude: (rng.gen_range(-180.0..180.0f64) * 1e4).round() / 1e4,
                temperature: (rng.gen_range(2.0..30.0f64) * 10.0).round() / 10.0,
                salinity: (rng.gen_range(15.0..38.0f64) * 10.0).round() / 10.0,
                ecoregion_id: format!("E{:03}", i % n_eco),
            }
        })
        .collect()
}

fn neighbors(n_ports: usize) -> EcoregionAdjacency {
    let n_eco = (n_ports / 2).max(2);
    if n_eco < 4 {
        return EcoregionAdjacency::default();
    }
    let pairs: Vec<(String, String)> = (0..n_eco - 1)
        .step_by(3)
        .map(|k| (format!("E{k:03}"), format!("E{:03}", k + 1)))
        .collect();
    EcoregionAdjacency::new(pairs).expect("distinct ecoregions")
}

fn start_of_year() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2019, 1, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid date")
}

fn vessel_voyages(
    rng: &mut ChaCha8Rng,
    vessel: usize,
    count: usize,
    ports: &[PortRecord],
    first_voyage: usize,
) -> Vec<VoyageRecord> {
    let ty = VesselType::ALL[rng.gen_range(0..VesselType::ALL.len())];
    let (lo, hi) = dwt_range(ty);
    let dwt = (rng.gen_range(lo..hi) / 100.0f64).round() * 100.0;

    let loop_len = ports.len().min(rng.gen_range(2..=6));
    let mut indices: Vec<usize> = (0..ports.len()).collect();
    indices.shuffle(rng);
    let route = &indices[..loop_len];

    let mut clock = start_of_year() + Duration::hours(rng.gen_range(0..24 * 30));
    let mut at = rng.gen_range(0..loop_len);
    let mut current = route[at];
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let next = if rng.gen_bool(0.15) {
            let mut p = rng.gen_range(0..ports.len() - 1);
            if p >= current {
                p += 1;
            }
            p
        } else {
            at = (at + 1) % loop_len;
            if route[at] == current {
                at = (at + 1) % loop_len;
            }
            route[at]
        };
        let sail = clock;
        let arrival = sail + Duration::hours(rng.gen_range(24..24 * 12));
        let discharge = if rng.gen_bool(0.1) {
            0.0
        } else {
            (rng.gen_range(0.0..0.3) * dwt).round()
        };
        out.push(VoyageRecord {
            voyage_id: format!("V{:06}", first_voyage + k),
            vessel_id: format!("S{vessel:04}"),
            vessel_type: ty,
            dwt,
            origin_port: ports[current].port_id.clone(),
            dest_port: ports[next].port_id.clone(),
            sail,
            arrival,
            discharge_tonnes: discharge,
        });
        current = next;
        if let Some(pos) = route.iter().position(|&p| p == current) {
            at = pos;
        }
        clock = arrival + Duration::hours(rng.gen_range(6..48));
    }
    out
}

/// A reproducible dataset of `n_ports` ports (at least 2) and `n_voyages`
/// voyages (at least 1), all sailing in 2019.
///
/// ```
/// let a = balhon::synth::synth_dataset(7, 10, 100).unwrap();
/// let b = balhon::synth::synth_dataset(7, 10, 100).unwrap();
/// assert_eq!(a.voyages().len(), 100);
/// assert_eq!(a.content_hash(), b.content_hash());
/// ```
pub fn synth_dataset(seed: u64, n_ports: usize, n_voyages: usize) -> Result<Dataset> {
    if n_ports < 2 {
        return Err(Error::Config(format!(
            "need at least 2 ports, got {n_ports}"
        )));
    }
    if n_voyages < 1 {
        return Err(Error::Config("need at least 1 voyage".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let regions = regions(&mut rng);
    let ports = ports(&mut rng, n_ports);

    let n_vessels = n_voyages.div_ceil(VOYAGES_PER_VESSEL);
    let mut voyages = Vec::with_capacity(n_voyages);
    for vessel in 0..n_vessels {
        let count = VOYAGES_PER_VESSEL.min(n_voyages - voyages.len());
        let batch = vessel_voyages(&mut rng, vessel, count, &ports, voyages.len());
        voyages.extend(batch);
    }

    let params = Params {
        neighbor_ecoregions: neighbors(n_ports),
        ..Params::default()
    };
    Dataset::from_parts(
        ports,
        voyages,
        regions,
        params,
        LoadOptions { strict: true },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_validity() {
        let ds = synth_dataset(1, 50, 1_000).unwrap();
        assert_eq!(ds.ports().len(), 50);
        assert_eq!(ds.voyages().len(), 1_000);
        assert_eq!(ds.regions().len(), 23);
        assert!(ds.report().rejections.is_empty());
        let ecos: std::collections::BTreeSet<_> =
            ds.ports().iter().map(|p| &p.ecoregion_id).collect();
        assert_eq!(ecos.len(), 25);
        let zeros = ds
            .voyages()
            .iter()
            .filter(|v| v.discharge_tonnes == 0.0)
            .count();
        assert!(zeros > 50 && zeros < 200, "{zeros}");
        let end = NaiveDate::from_ymd_opt(2020, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        assert!(ds.voyages().iter().all(|v| v.arrival < end));
    }

    #[test]
    fn smallest_dataset() {
        let ds = synth_dataset(3, 2, 1).unwrap();
        assert_eq!(ds.ports().len(), 2);
        assert_ne!(ds.ports()[0].ecoregion_id, ds.ports()[1].ecoregion_id);
    }

    #[test]
    fn invalid_counts() {
        assert!(matches!(synth_dataset(1, 1, 10), Err(Error::Config(_))));
        assert!(matches!(synth_dataset(1, 10, 0), Err(Error::Config(_))));
    }

    #[test]
    fn seeds_differ() {
        let a = synth_dataset(1, 10, 50).unwrap();
        let b = synth_dataset(2, 10, 50).unwrap();
        assert_ne!(a.content_hash(), b.content_hash());
    }
}
