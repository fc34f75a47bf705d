use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;

use super::{PathObservation, PortIdx};
use crate::error::{Error, Result};
use crate::params::HonParams;

type Context = Vec<PortIdx>;

/// Mass carried by a rule or an edge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Flow {
    /// Sum of path weights.
    pub weight: f64,
    /// Number of path transitions.
    pub count: u64,
    /// `Σ ln(1 − w)` over the same transitions.
    pub log_survival: f64,
}

impl Flow {
    fn add(&mut self, w: f64) {
        self.weight += w;
        self.count += 1;
        self.log_survival += (-w).ln_1p();
    }

    /// Probability that at least one contributing transfer spreads a species.
    pub fn risk(&self) -> f64 {
        -self.log_survival.exp_m1()
    }
}

/// "After `context`, the next call is `next_port`."
#[derive(Debug, Clone, PartialEq)]
pub struct HonRule {
    /// Oldest port first; the current port is last.
    pub context: Context,
    pub next_port: PortIdx,
    /// All observed transitions matching the rule.
    pub weight: f64,
    pub count: u64,
    /// Conditional probability of `next_port` given `context`.
    pub probability: f64,
    /// The part of the observed flow that leaves through this rule once every
    /// transition is attributed to its longest matching context.
    pub routed: Flow,
}

impl HonRule {
    /// A rule whose observed and routed flow are both a single transition
    /// of weight `weight`. Probabilities are filled in by [`RuleSet::new`].
    pub fn observed(context: Context, next_port: PortIdx, weight: f64) -> Self {
        let mut flow = Flow::default();
        flow.add(weight);
        HonRule {
            context,
            next_port,
            weight,
            count: 1,
            probability: 0.0,
            routed: flow,
        }
    }

    pub fn order(&self) -> usize {
        self.context.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub max_order: usize,
    /// Sorted by context, then next port.
    pub rules: Vec<HonRule>,
}

impl RuleSet {
    /// Sorts the rules and recomputes each context's conditional
    /// distribution from the rule weights.
    pub fn new(max_order: usize, mut rules: Vec<HonRule>) -> Self {
        rules.sort_by(|a, b| (&a.context, a.next_port).cmp(&(&b.context, b.next_port)));
        let mut totals: BTreeMap<&[PortIdx], (f64, u64)> = BTreeMap::new();
        for r in &rules {
            let t = totals.entry(r.context.as_slice()).or_default();
            t.0 += r.weight;
            t.1 += r.count;
        }
        let probs: Vec<f64> = rules
            .iter()
            .map(|r| {
                let (w, n) = totals[r.context.as_slice()];
                conditional(r.weight, r.count, w, n)
            })
            .collect();
        for (r, p) in rules.iter_mut().zip(probs) {
            r.probability = p;
        }
        RuleSet { max_order, rules }
    }

    pub fn contexts(&self) -> BTreeSet<&[PortIdx]> {
        self.rules.iter().map(|r| r.context.as_slice()).collect()
    }

    pub fn higher_order(&self) -> impl Iterator<Item = &HonRule> {
        self.rules.iter().filter(|r| r.order() > 1)
    }

    /// Count of distinct contexts per order (index 0 = order 1).
    pub fn contexts_per_order(&self) -> Vec<usize> {
        let mut out = vec![0; self.max_order];
        for c in self.contexts() {
            out[c.len() - 1] += 1;
        }
        out
    }

    /// Total weight leaving each port according to the first-order rules.
    pub fn first_order_outflow(&self) -> BTreeMap<PortIdx, f64> {
        let mut out = BTreeMap::new();
        for r in self.rules.iter().filter(|r| r.order() == 1) {
            *out.entry(r.context[0]).or_insert(0.0) += r.weight;
        }
        out
    }
}

/// Next-step probability. Contexts whose paths all carry zero weight fall
/// back to transition counts so the topology stays usable.
fn conditional(weight: f64, count: u64, total_weight: f64, total_count: u64) -> f64 {
    if total_weight > 0.0 {
        weight / total_weight
    } else if total_count > 0 {
        count as f64 / total_count as f64
    } else {
        0.0
    }
}

#[derive(Debug, Default, Clone)]
struct Tally {
    weight: f64,
    count: u64,
}

#[derive(Debug, Default)]
struct Distribution {
    next: BTreeMap<PortIdx, Tally>,
    support: f64,
    count: u64,
}

impl Distribution {
    fn probability(&self, port: PortIdx) -> f64 {
        self.next.get(&port).map_or(0.0, |t| {
            conditional(t.weight, t.count, self.support, self.count)
        })
    }

    fn probabilities(&self) -> impl Iterator<Item = (PortIdx, f64)> + '_ {
        self.next
            .iter()
            .map(|(&p, t)| (p, conditional(t.weight, t.count, self.support, self.count)))
    }

    /// Upper bound on the divergence of any distribution from this one.
    fn max_divergence(&self) -> f64 {
        let min = self
            .probabilities()
            .map(|(_, p)| p)
            .filter(|p| *p > 0.0)
            .fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            -min.log2()
        } else {
            0.0
        }
    }
}

/// Kullback-Leibler divergence D(child ‖ parent) in bits.
fn kl_divergence(child: &Distribution, parent: &Distribution) -> f64 {
    child
        .probabilities()
        .filter(|(_, p)| *p > 0.0)
        .map(|(port, p)| {
            let q = parent.probability(port);
            if q > 0.0 {
                p * (p / q).log2()
            } else {
                f64::INFINITY
            }
        })
        .sum()
}

struct Growth<'a> {
    hp: &'a HonParams,
    dists: BTreeMap<Context, Distribution>,
    /// Context → the contexts one port longer that end with it.
    extensions: BTreeMap<Context, Vec<Context>>,
}

impl Growth<'_> {
    fn threshold(&self, order: usize, context: &[PortIdx]) -> f64 {
        let support = self.dists.get(context).map_or(0.0, |d| d.support);
        if support <= 0.0 {
            return f64::INFINITY;
        }
        self.hp.divergence_threshold_scale * order as f64 / (1.0 + support).log2()
    }

    /// Walks longer histories of `current`, comparing them against the last
    /// context that was worth keeping (`valid`).
    fn extend(
        &self,
        valid: &[PortIdx],
        current: &[PortIdx],
        order: usize,
        keep: &mut Vec<Context>,
    ) {
        if order >= self.hp.max_order {
            keep.push(valid.to_vec());
            return;
        }
        let parent = &self.dists[valid];
        if parent.max_divergence() < self.threshold(order + 1, current) {
            keep.push(valid.to_vec());
            return;
        }
        let Some(longer) = self.extensions.get(current) else {
            keep.push(valid.to_vec());
            return;
        };
        for ext in longer {
            let dist = &self.dists[ext];
            let significant = dist.support >= self.hp.min_support as f64
                && kl_divergence(dist, parent) > self.threshold(order + 1, ext);
            if significant {
                self.extend(ext, ext, order + 1, keep);
            } else {
                self.extend(valid, ext, order + 1, keep);
            }
        }
    }
}

fn count_contexts(paths: &[PathObservation], max_order: usize) -> BTreeMap<Context, Distribution> {
    let mut dists: BTreeMap<Context, Distribution> = BTreeMap::new();
    for path in paths {
        let seq = &path.port_sequence;
        for t in 1..seq.len() {
            for k in 1..=max_order.min(t) {
                let d = dists.entry(seq[t - k..t].to_vec()).or_default();
                let tally = d.next.entry(seq[t]).or_default();
                tally.weight += path.weight;
                tally.count += 1;
                d.support += path.weight;
                d.count += 1;
            }
        }
    }
    dists
}

/// Longest kept context matching the history that ends at `seq[t]`.
fn state_at<'a>(
    seq: &[PortIdx],
    t: usize,
    max_order: usize,
    kept: &'a BTreeSet<Context>,
) -> &'a [PortIdx] {
    for k in (1..=max_order.min(t + 1)).rev() {
        if let Some(c) = kept.get(&seq[t + 1 - k..=t]) {
            return c;
        }
    }
    unreachable!("every port with an outgoing transition has a first-order context")
}

/// Grows variable-order rules from weighted paths.
///
/// First-order rules are always kept. A longer context is kept when its
/// weighted support reaches `min_support` and the KL divergence of its
/// next-port distribution from the last kept ancestor exceeds
/// `scale · order / log2(1 + support)`. Prefixes of kept contexts are kept
/// as well so every higher-order state can be entered.
///
/// Work is split by first-order context; results are merged in sorted order
/// so the output does not depend on scheduling.
pub fn grow_rules(paths: &[PathObservation], hp: &HonParams) -> RuleSet {
    let max_order = hp.max_order.max(1);
    let dists = count_contexts(paths, max_order);
    let mut extensions: BTreeMap<Context, Vec<Context>> = BTreeMap::new();
    for ctx in dists.keys().filter(|c| c.len() > 1) {
        extensions
            .entry(ctx[1..].to_vec())
            .or_default()
            .push(ctx.clone());
    }
    let growth = Growth {
        hp,
        dists,
        extensions,
    };

    let first: Vec<&Context> = growth.dists.keys().filter(|c| c.len() == 1).collect();
    let found: Vec<Vec<Context>> = first
        .par_iter()
        .map(|ctx| {
            let mut keep = vec![(*ctx).clone()];
            growth.extend(ctx, ctx, 1, &mut keep);
            keep
        })
        .collect();
    let mut kept: BTreeSet<Context> = BTreeSet::new();
    for ctx in found.into_iter().flatten() {
        for len in 1..=ctx.len() {
            kept.insert(ctx[..len].to_vec());
        }
    }

    let assignments: Vec<Vec<(&[PortIdx], PortIdx)>> = paths
        .par_iter()
        .map(|path| {
            let seq = &path.port_sequence;
            (0..seq.len() - 1)
                .map(|t| (state_at(seq, t, max_order, &kept), seq[t + 1]))
                .collect()
        })
        .collect();
    let mut routed: BTreeMap<(&[PortIdx], PortIdx), Flow> = BTreeMap::new();
    for (path, steps) in paths.iter().zip(&assignments) {
        for &(state, next) in steps {
            routed.entry((state, next)).or_default().add(path.weight);
        }
    }

    let mut rules = Vec::new();
    for ctx in &kept {
        let dist = &growth.dists[ctx];
        for (&next, tally) in &dist.next {
            rules.push(HonRule {
                context: ctx.clone(),
                next_port: next,
                weight: tally.weight,
                count: tally.count,
                probability: conditional(tally.weight, tally.count, dist.support, dist.count),
                routed: routed
                    .get(&(ctx.as_slice(), next))
                    .copied()
                    .unwrap_or_default(),
            });
        }
    }
    RuleSet { max_order, rules }
}

/// Debug dump: `context|next|support|probability`, ports by name, context
/// ports joined with `,`.
pub fn write_rules_csv(path: &Path, rules: &RuleSet, port_names: &[&str]) -> Result<()> {
    use std::io::Write;

    let mut out = String::from("context|next|support|probability\n");
    for r in &rules.rules {
        let ctx: Vec<&str> = r.context.iter().map(|&p| port_names[p as usize]).collect();
        out.push_str(&format!(
            "{}|{}|{:.6}|{:.6}\n",
            ctx.join(","),
            port_names[r.next_port as usize],
            r.weight,
            r.probability
        ));
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
