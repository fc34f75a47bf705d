use std::collections::{BTreeMap, BTreeSet};

use super::{PortIdx, RuleSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct HonEdge {
    /// Index into [`HonNetwork::nodes`].
    pub source: usize,
    pub target: usize,
    /// Conditional probability of the rule behind the edge.
    pub probability: f64,
    /// Path weight routed through the edge.
    pub weight: f64,
    pub count: u64,
    /// Probability that at least one routed transfer spreads a species.
    pub risk: f64,
}

/// Network of (port, history) states. A node is its context; the physical
/// port is the last element.
#[derive(Debug, Clone, PartialEq)]
pub struct HonNetwork {
    pub max_order: usize,
    /// Sorted contexts.
    pub nodes: Vec<Vec<PortIdx>>,
    /// Sorted by (source, target).
    pub edges: Vec<HonEdge>,
}

impl HonNetwork {
    pub fn port_of(&self, node: usize) -> PortIdx {
        *self.nodes[node].last().expect("contexts are non-empty")
    }

    pub fn node_index(&self, context: &[PortIdx]) -> Option<usize> {
        self.nodes
            .binary_search_by(|n| n.as_slice().cmp(context))
            .ok()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Total routed weight leaving each physical port.
    pub fn physical_outflow(&self) -> BTreeMap<PortIdx, f64> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            *out.entry(self.port_of(e.source)).or_insert(0.0) += e.weight;
        }
        out
    }

    /// Human-readable node label, most recent port first: `B|A` is "at B,
    /// having come from A".
    pub fn label(&self, node: usize, names: &[&str]) -> String {
        let parts: Vec<&str> = self.nodes[node]
            .iter()
            .rev()
            .map(|&p| names[p as usize])
            .collect();
        parts.join("|")
    }
}

/// Rewires rules into a state network.
///
/// Each rule `context → next` becomes an edge from the `context` state to the
/// longest suffix of `context ++ [next]` that is itself a state, falling back
/// to a first-order sink state for ports with no outgoing rules. Edges are
/// created only for rules that carry routed flow, so every observed transition
/// appears exactly once.
pub fn build_hon_network(rules: &RuleSet) -> Result<HonNetwork> {
    let contexts: BTreeSet<&[PortIdx]> = rules.contexts();
    for ctx in &contexts {
        if ctx.len() > 1 && !contexts.contains(&ctx[..ctx.len() - 1]) {
            return Err(Error::DanglingRule {
                context: format!("{ctx:?}"),
            });
        }
    }

    let mut nodes: BTreeSet<Vec<PortIdx>> = contexts.iter().map(|c| c.to_vec()).collect();
    let mut wired = Vec::new();
    for r in rules.rules.iter().filter(|r| r.routed.count > 0) {
        let mut history = r.context.clone();
        history.push(r.next_port);
        let longest = rules.max_order.min(history.len());
        let target = (1..=longest)
            .rev()
            .map(|k| &history[history.len() - k..])
            .find(|s| contexts.contains(s))
            .unwrap_or(&history[history.len() - 1..])
            .to_vec();
        nodes.insert(target.clone());
        wired.push((r, target));
    }

    let nodes: Vec<Vec<PortIdx>> = nodes.into_iter().collect();
    let index = |c: &[PortIdx]| {
        nodes
            .binary_search_by(|n| n.as_slice().cmp(c))
            .expect("every context is a node")
    };
    let mut edges: Vec<HonEdge> = wired
        .into_iter()
        .map(|(r, target)| HonEdge {
            source: index(&r.context),
            target: index(&target),
            probability: r.probability,
            weight: r.routed.weight,
            count: r.routed.count,
            risk: r.routed.risk(),
        })
        .collect();
    edges.sort_by_key(|e| (e.source, e.target));
    Ok(HonNetwork {
        max_order: rules.max_order,
        nodes,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hon::{grow_rules, HonRule, PathObservation};
    use crate::params::HonParams;

    const A: PortIdx = 0;
    const B: PortIdx = 1;
    const C: PortIdx = 2;
    const D: PortIdx = 3;
    const E: PortIdx = 4;

    fn second_order_corpus() -> Vec<PathObservation> {
        let mut paths = Vec::new();
        for _ in 0..10 {
            paths.push(PathObservation::new(vec![A, B, C], 0.5));
            paths.push(PathObservation::new(vec![D, B, E], 0.6));
        }
        paths
    }

    #[test]
    fn first_order_rules_give_first_order_graph() {
        let rs = RuleSet::new(
            1,
            vec![
                HonRule::observed(vec![A], B, 0.2),
                HonRule::observed(vec![B], C, 0.3),
                HonRule::observed(vec![B], A, 0.1),
            ],
        );
        let net = build_hon_network(&rs).unwrap();
        assert_eq!(net.nodes, vec![vec![A], vec![B], vec![C]]);
        let pairs: Vec<_> = net
            .edges
            .iter()
            .map(|e| (net.port_of(e.source), net.port_of(e.target)))
            .collect();
        assert_eq!(pairs, vec![(A, B), (B, A), (B, C)]);
        assert!((net.edges[2].probability - 0.75).abs() < 1e-15);
    }

    #[test]
    fn second_order_states_have_distinct_out_edges() {
        let rs = grow_rules(&second_order_corpus(), &HonParams::default());
        let net = build_hon_network(&rs).unwrap();
        let names = ["A", "B", "C", "D", "E"];
        let from = |label: &str| -> Vec<String> {
            net.edges
                .iter()
                .filter(|e| net.label(e.source, &names) == label)
                .map(|e| net.label(e.target, &names))
                .collect()
        };
        assert_eq!(from("B|A"), vec!["C"]);
        assert_eq!(from("B|D"), vec!["E"]);
        assert!(from("B").is_empty());
        // A and D now lead into the history states.
        assert_eq!(from("A"), vec!["B|A"]);
        assert_eq!(from("D"), vec!["B|D"]);
    }

    #[test]
    fn edge_targets_highest_order_state() {
        let rs = RuleSet::new(
            2,
            vec![
                HonRule::observed(vec![A], B, 0.1),
                HonRule::observed(vec![B], C, 0.1),
                HonRule::observed(vec![C], D, 0.1),
                HonRule::observed(vec![A, B], C, 0.1),
                HonRule::observed(vec![B, C], D, 0.1),
            ],
        );
        let net = build_hon_network(&rs).unwrap();
        let ba = net.node_index(&[A, B]).unwrap();
        let cb = net.node_index(&[B, C]).unwrap();
        let e = net.edges.iter().find(|e| e.source == ba).unwrap();
        assert_eq!(e.target, cb);
        // Sink state for a port with no outgoing rules.
        assert!(net.node_index(&[D]).is_some());
    }

    #[test]
    fn missing_prefix_is_dangling() {
        let rs = RuleSet::new(
            3,
            vec![
                HonRule::observed(vec![A], B, 0.1),
                HonRule::observed(vec![C, A, B], D, 0.1),
            ],
        );
        assert!(matches!(
            build_hon_network(&rs),
            Err(Error::DanglingRule { .. })
        ));
    }

    #[test]
    fn rewiring_conserves_outflow() {
        let mut paths = second_order_corpus();
        paths.push(PathObservation::new(vec![C, A, B, E], 0.125));
        paths.push(PathObservation::new(vec![E, D], 0.0625));
        let rs = grow_rules(&paths, &HonParams::default());
        let before = rs.first_order_outflow();
        let after = build_hon_network(&rs).unwrap().physical_outflow();
        assert_eq!(
            before.keys().collect::<Vec<_>>(),
            after.keys().collect::<Vec<_>>()
        );
        for (port, w) in before {
            assert!((w - after[&port]).abs() < 1e-9);
        }
    }
}
