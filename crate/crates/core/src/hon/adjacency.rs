use std::collections::BTreeMap;

use super::{HonNetwork, PortIdx};

/// Port×port spread risk, stored sparsely. Missing pairs are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalAdjacency {
    /// Number of ports; indices run over `0..size`.
    pub size: usize,
    pub entries: BTreeMap<(PortIdx, PortIdx), f64>,
    pub normalized: bool,
    /// Largest entry before normalization.
    pub max_weight: f64,
}

impl PhysicalAdjacency {
    pub fn new(size: usize, entries: BTreeMap<(PortIdx, PortIdx), f64>) -> Self {
        let max_weight = entries.values().copied().fold(0.0, f64::max);
        PhysicalAdjacency {
            size,
            entries,
            normalized: false,
            max_weight,
        }
    }

    pub fn get(&self, from: PortIdx, to: PortIdx) -> f64 {
        self.entries.get(&(from, to)).copied().unwrap_or(0.0)
    }

    /// Nonzero and zero entries pointing at `port`, by source index.
    pub fn incoming(&self, port: PortIdx) -> impl Iterator<Item = (PortIdx, f64)> + '_ {
        self.entries
            .iter()
            .filter(move |((_, to), _)| *to == port)
            .map(|(&(from, _), &w)| (from, w))
    }

    /// Incoming risks for every port, in port order.
    pub fn incoming_by_port(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); self.size];
        for (&(_, to), &w) in &self.entries {
            out[to as usize].push(w);
        }
        out
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.values().copied().fold(0.0, f64::max)
    }
}

/// Averages the risk of every state edge that joins the same two ports.
pub fn project_physical(hon: &HonNetwork, n_ports: usize) -> PhysicalAdjacency {
    let mut sums: BTreeMap<(PortIdx, PortIdx), (f64, usize)> = BTreeMap::new();
    for e in &hon.edges {
        let s = sums
            .entry((hon.port_of(e.source), hon.port_of(e.target)))
            .or_default();
        s.0 += e.risk;
        s.1 += 1;
    }
    let entries = sums
        .into_iter()
        .map(|(k, (sum, n))| (k, sum / n as f64))
        .collect();
    PhysicalAdjacency::new(n_ports, entries)
}

/// Divides every entry by the largest one. An all-zero matrix is left as is.
pub fn normalize_edges(adj: &PhysicalAdjacency) -> PhysicalAdjacency {
    let max = adj.max_entry();
    let entries = if max > 0.0 {
        adj.entries.iter().map(|(&k, &w)| (k, w / max)).collect()
    } else {
        adj.entries.clone()
    };
    PhysicalAdjacency {
        size: adj.size,
        entries,
        normalized: true,
        max_weight: max,
    }
}
