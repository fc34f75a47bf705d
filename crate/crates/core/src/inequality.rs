//! Lorenz curves and Gini coefficients of a regional burden or benefit
//! measured against regional income.
//!
//! Regions are ordered by metric per unit of income (a concentration curve),
//! and the cumulative income share is plotted against the cumulative metric
//! share.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionDatum {
    pub region_id: String,
    /// GDP per capita, USD. Positive.
    pub income: f64,
    /// Nonnegative burden or benefit.
    pub metric: f64,
}

impl RegionDatum {
    pub fn new(region_id: impl Into<String>, income: f64, metric: f64) -> Self {
        RegionDatum {
            region_id: region_id.into(),
            income,
            metric,
        }
    }

    fn intensity(&self) -> f64 {
        self.metric / self.income
    }
}

/// Ordering of regions along the curve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    /// Ascending metric / income.
    #[default]
    Intensity,
    /// Ascending income. The curve may then cross the diagonal and the
    /// coefficient may be negative.
    Income,
}

impl std::str::FromStr for SortKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intensity" => Ok(SortKey::Intensity),
            "income" => Ok(SortKey::Income),
            other => Err(Error::Config(format!(
                "unknown sort key `{other}` (intensity|income)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorenzCurve {
    /// `(cum_income_share, cum_metric_share)` from (0, 0) to (1, 1).
    pub points: Vec<(f64, f64)>,
    /// Region ids in curve order.
    pub order: Vec<String>,
    pub gini: f64,
    pub sort: SortKey,
}

/// Builds the curve and its coefficient.
///
/// ```
/// use balhon::inequality::{lorenz_points, RegionDatum, SortKey};
///
/// let data = [
///     RegionDatum::new("a", 1.0, 1.0),
///     RegionDatum::new("b", 1.0, 2.0),
///     RegionDatum::new("c", 2.0, 1.0),
/// ];
/// let curve = lorenz_points(&data, SortKey::Intensity).unwrap();
/// assert_eq!(curve.points, vec![(0.0, 0.0), (0.5, 0.25), (0.75, 0.5), (1.0, 1.0)]);
/// ```
pub fn lorenz_points(data: &[RegionDatum], sort: SortKey) -> Result<LorenzCurve> {
    if data.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 regions, got {}",
            data.len()
        )));
    }
    for d in data {
        if !(d.income.is_finite() && d.income > 0.0) {
            return Err(Error::DegenerateInput(format!(
                "region {}: income must be > 0, got {}",
                d.region_id, d.income
            )));
        }
        if !(d.metric.is_finite() && d.metric >= 0.0) {
            return Err(Error::DegenerateInput(format!(
                "region {}: metric must be >= 0, got {}",
                d.region_id, d.metric
            )));
        }
    }
    let mut sorted: Vec<&RegionDatum> = data.iter().collect();
    match sort {
        SortKey::Intensity => sorted.sort_by(|a, b| {
            a.intensity()
                .total_cmp(&b.intensity())
                .then_with(|| a.region_id.cmp(&b.region_id))
        }),
        SortKey::Income => sorted.sort_by(|a, b| {
            a.income
                .total_cmp(&b.income)
                .then_with(|| a.region_id.cmp(&b.region_id))
        }),
    }

    // Totals are summed in curve order so the result does not depend on
    // input order.
    let total_income: f64 = sorted.iter().map(|d| d.income).sum();
    let total_metric: f64 = sorted.iter().map(|d| d.metric).sum();
    if total_metric <= 0.0 {
        return Err(Error::DegenerateInput("all metrics are zero".into()));
    }

    let mut points = Vec::with_capacity(data.len() + 1);
    points.push((0.0, 0.0));
    let (mut x, mut y) = (0.0, 0.0);
    for d in &sorted {
        x += d.income;
        y += d.metric;
        points.push((x / total_income, y / total_metric));
    }
    *points.last_mut().expect("non-empty") = (1.0, 1.0);

    let mut g = gini(&points);
    if sort == SortKey::Intensity && g <= 0.0 {
        // Rounding can push an equal-intensity curve a hair above the diagonal.
        g = 0.0;
    }
    Ok(LorenzCurve {
        order: sorted.iter().map(|d| d.region_id.clone()).collect(),
        points,
        gini: g,
        sort,
    })
}

/// `1 − 2 × area under the curve`, by trapezoids.
pub fn gini(points: &[(f64, f64)]) -> f64 {
    let twice_area: f64 = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1))
        .sum();
    1.0 - twice_area
}

/// How many signed inputs were negative, zero and positive before folding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SignCounts {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Folds signed metrics (e.g. GDP changes) to magnitudes.
pub fn fold_signed(data: &[RegionDatum]) -> (Vec<RegionDatum>, SignCounts) {
    let mut signs = SignCounts::default();
    let folded = data
        .iter()
        .map(|d| {
            if d.metric < 0.0 {
                signs.negative += 1;
            } else if d.metric > 0.0 {
                signs.positive += 1;
            } else {
                signs.zero += 1;
            }
            RegionDatum::new(d.region_id.clone(), d.income, d.metric.abs())
        })
        .collect();
    (folded, signs)
}

/// Reads `region_id`, an income column and a metric column from a CSV file.
pub fn read_region_metrics(
    path: &Path,
    metric_col: &str,
    income_col: &str,
) -> Result<Vec<RegionDatum>> {
    let file = path.display().to_string();
    let csv_err = |source| Error::Csv {
        file: file.clone(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                file: file.clone(),
                column: name.to_string(),
            })
    };
    let (id, income, metric) = (
        column("region_id")?,
        column(income_col)?,
        column(metric_col)?,
    );

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = i as u64 + 2;
        let number = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::invariant(&file, row, format!("{name}: not a number `{raw}`"))
                })
        };
        out.push(RegionDatum::new(
            record.get(id).unwrap_or(""),
            number(income, income_col)?,
            number(metric, metric_col)?,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn equal_income(metrics: &[f64]) -> Vec<RegionDatum> {
        metrics
            .iter()
            .enumerate()
            .map(|(i, &m)| RegionDatum::new(format!("r{i:02}"), 1.0, m))
            .collect()
    }

    fn pairwise_gini(m: &[f64]) -> f64 {
        let n = m.len() as f64;
        let mean = m.iter().sum::<f64>() / n;
        let diff: f64 = m
            .iter()
            .flat_map(|a| m.iter().map(move |b| (a - b).abs()))
            .sum();
        diff / (2.0 * n * n * mean)
    }

    #[test]
    fn two_regions_zero_and_one() {
        let c = lorenz_points(&equal_income(&[1.0, 0.0]), SortKey::Intensity).unwrap();
        assert_eq!(c.points, vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]);
        assert_eq!(c.gini, 0.5);
        assert_eq!(c.order, vec!["r01", "r00"]);
    }

    #[test]
    fn equal_intensity_is_the_diagonal() {
        let data = [
            RegionDatum::new("a", 3.0, 0.3),
            RegionDatum::new("b", 7.0, 0.7),
            RegionDatum::new("c", 11.0, 1.1),
        ];
        let c = lorenz_points(&data, SortKey::Intensity).unwrap();
        for (x, y) in &c.points {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(c.gini, 0.0);
        assert_eq!(format!("{:.6}", c.gini), "0.000000");
    }

    #[test]
    fn three_region_hand_computation() {
        let data = [
            RegionDatum::new("a", 1.0, 1.0),
            RegionDatum::new("b", 1.0, 2.0),
            RegionDatum::new("c", 2.0, 1.0),
        ];
        let c = lorenz_points(&data, SortKey::Intensity).unwrap();
        assert_eq!(c.order, vec!["c", "a", "b"]);
        assert_eq!(
            c.points,
            vec![(0.0, 0.0), (0.5, 0.25), (0.75, 0.5), (1.0, 1.0)]
        );
        // 1 - (0.5·0.25 + 0.25·0.75 + 0.25·1.5)
        assert!((c.gini - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn income_sort_can_go_negative() {
        // Richer region carries less of the burden.
        let data = [
            RegionDatum::new("poor", 1.0, 3.0),
            RegionDatum::new("rich", 3.0, 1.0),
        ];
        let c = lorenz_points(&data, SortKey::Income).unwrap();
        assert!(c.gini < 0.0);
        assert_eq!(c.order, vec!["poor", "rich"]);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            lorenz_points(&equal_income(&[0.0, 0.0]), SortKey::Intensity),
            Err(Error::DegenerateInput(_))
        ));
        assert!(lorenz_points(&equal_income(&[1.0]), SortKey::Intensity).is_err());
        assert!(lorenz_points(
            &[
                RegionDatum::new("a", 0.0, 1.0),
                RegionDatum::new("b", 1.0, 1.0)
            ],
            SortKey::Intensity
        )
        .is_err());
        assert!(lorenz_points(&equal_income(&[-1.0, 2.0]), SortKey::Intensity).is_err());
    }

    #[test]
    fn folding_keeps_sign_counts() {
        let (folded, signs) = fold_signed(&equal_income(&[-2.0, 0.0, 3.0, -1.0]));
        let metrics: Vec<f64> = folded.iter().map(|d| d.metric).collect();
        assert_eq!(metrics, vec![2.0, 0.0, 3.0, 1.0]);
        assert_eq!(
            signs,
            SignCounts {
                negative: 2,
                zero: 1,
                positive: 1
            }
        );
    }

    fn metrics() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0..100.0f64, 2..=12)
            .prop_filter("positive total", |m| m.iter().sum::<f64>() > 1e-6)
    }

    proptest! {
        #[test]
        fn matches_pairwise_oracle(m in metrics()) {
            let c = lorenz_points(&equal_income(&m), SortKey::Intensity).unwrap();
            prop_assert!((c.gini - pairwise_gini(&m)).abs() < 1e-9);
        }

        #[test]
        fn scale_invariant(m in metrics(), incomes in prop::collection::vec(1.0..1e5f64, 12), c in 1e-3..1e3f64) {
            let data: Vec<RegionDatum> = m.iter().zip(&incomes).enumerate()
                .map(|(i, (&m, &y))| RegionDatum::new(format!("r{i:02}"), y, m)).collect();
            let base = lorenz_points(&data, SortKey::Intensity).unwrap();
            let by_metric: Vec<RegionDatum> = data.iter().map(|d| RegionDatum::new(d.region_id.clone(), d.income, d.metric * c)).collect();
            let by_income: Vec<RegionDatum> = data.iter().map(|d| RegionDatum::new(d.region_id.clone(), d.income * c, d.metric)).collect();
            for other in [lorenz_points(&by_metric, SortKey::Intensity).unwrap(), lorenz_points(&by_income, SortKey::Intensity).unwrap()] {
                prop_assert!((other.gini - base.gini).abs() < 1e-12);
                for (p, q) in base.points.iter().zip(&other.points) {
                    prop_assert!((p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn bounded_and_below_diagonal(m in metrics(), incomes in prop::collection::vec(1.0..1e5f64, 12)) {
            let data: Vec<RegionDatum> = m.iter().zip(&incomes).enumerate()
                .map(|(i, (&m, &y))| RegionDatum::new(format!("r{i:02}"), y, m)).collect();
            let c = lorenz_points(&data, SortKey::Intensity).unwrap();
            prop_assert!((0.0..1.0).contains(&c.gini));
            for w in c.points.windows(2) {
                prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
            }
            for (x, y) in &c.points {
                prop_assert!(*y <= *x + 1e-12);
            }
        }

        #[test]
        fn permutation_invariant(m in metrics(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let data = equal_income(&m);
            let mut shuffled = data.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = lorenz_points(&data, SortKey::Intensity).unwrap();
            let b = lorenz_points(&shuffled, SortKey::Intensity).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
