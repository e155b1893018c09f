//! Indicator schema, dataset container, normalization, stratified
//! splitting and minority-class augmentation.

pub mod csv_io;
pub mod world;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::prng::Prng;

pub use csv_io::{load_csv, save_csv};
pub use world::{make_reference_world, IndustryParams, WorldConfig};

/// The 15 numeric financial indicators, in fixed schema order.
///
/// The source variable table lists "Net Profit Growth Rate" under both the
/// profitability and liquidity categories; the liquidity occurrence is kept
/// as a distinct schema slot under a suffixed name so indicator names stay
/// unique and the feature count stays at 15.
pub const NUMERIC_INDICATORS: [&str; 15] = [
    "total_profit",
    "operating_margin",
    "capital_cost_profit_margin",
    "return_on_assets",
    "net_profit_growth_rate",
    "total_assets",
    "development_capability",
    "operating_revenue_growth_rate",
    "total_asset_growth_rate",
    "current_ratio",
    "quick_ratio",
    "inventory_turnover_rate",
    "accounts_receivable_turnover_rate",
    "total_asset_turnover_rate",
    "net_profit_growth_rate_liquidity",
];

pub const NUM_FEATURES: usize = 15;
/// Numeric indicators plus the ordinal contract status.
pub const FEATURE_COLS: usize = NUM_FEATURES + 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorSchema {
    pub numeric_names: Vec<String>,
}

impl IndicatorSchema {
    pub fn standard() -> Self {
        IndicatorSchema {
            numeric_names: NUMERIC_INDICATORS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn feature_count(&self) -> usize {
        self.numeric_names.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Industry {
    Steel,
    PharmaDistribution,
    ECommerce,
}

impl Industry {
    pub fn as_str(&self) -> &'static str {
        match self {
            Industry::Steel => "steel",
            Industry::PharmaDistribution => "pharma_distribution",
            Industry::ECommerce => "e_commerce",
        }
    }

    pub fn parse(s: &str) -> Result<Industry> {
        match s {
            "steel" => Ok(Industry::Steel),
            "pharma_distribution" => Ok(Industry::PharmaDistribution),
            "e_commerce" => Ok(Industry::ECommerce),
            other => Err(Error::Data(format!("unknown industry string: {other:?}"))),
        }
    }

    pub const ALL: [Industry; 3] = [
        Industry::Steel,
        Industry::PharmaDistribution,
        Industry::ECommerce,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirmRecord {
    pub firm_id: String,
    pub industry: Industry,
    /// The 15 numeric indicators in schema order.
    pub indicators: Vec<f64>,
    /// Ordinal: 0 = breached, 1 = fulfilled.
    pub contract_status: u8,
    /// 1 = default, 0 = no default.
    pub label: u8,
    /// Set on records appended by augmentation.
    pub synthetic: bool,
    /// Ground-truth default probability, present for reference worlds.
    pub ground_truth_p: Option<f64>,
}

impl FirmRecord {
    pub fn validate(&self) -> Result<()> {
        if self.indicators.len() != NUM_FEATURES {
            return Err(Error::Data(format!(
                "record {}: expected {NUM_FEATURES} indicators, got {}",
                self.firm_id,
                self.indicators.len()
            )));
        }
        if let Some(i) = self.indicators.iter().position(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!(
                "record {}: non-finite indicator at index {i}",
                self.firm_id
            )));
        }
        if self.contract_status > 1 {
            return Err(Error::Data(format!(
                "record {}: contract_status must be 0 or 1",
                self.firm_id
            )));
        }
        if self.label > 1 {
            return Err(Error::Data(format!(
                "record {}: label must be 0 or 1",
                self.firm_id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureStat {
    pub mean: f64,
    pub std: f64,
    pub zero_variance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub per_feature: Vec<FeatureStat>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub records: Vec<FirmRecord>,
    pub norm_stats: Option<NormStats>,
}

impl Dataset {
    pub fn new(records: Vec<FirmRecord>) -> Result<Self> {
        for r in &records {
            r.validate()?;
        }
        Ok(Dataset {
            records,
            norm_stats: None,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Feature matrix handed to the GAN and classifiers: 15 numeric
    /// indicators followed by contract status, one row per record.
    pub fn feature_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.records.len(), FEATURE_COLS);
        for (r, rec) in self.records.iter().enumerate() {
            for (c, &v) in rec.indicators.iter().enumerate() {
                m.set(r, c, v);
            }
            m.set(r, NUM_FEATURES, rec.contract_status as f64);
        }
        m
    }

    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.label).collect()
    }

    pub fn minority_subset(&self) -> Dataset {
        Dataset {
            records: self
                .records
                .iter()
                .filter(|r| r.label == 1)
                .cloned()
                .collect(),
            norm_stats: self.norm_stats.clone(),
        }
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.records.iter().filter(|r| r.label == 1).count();
        (pos, self.records.len() - pos)
    }
}

/// Z-score each numeric feature using the population standard deviation.
/// Zero-variance features map to 0 and are flagged. Contract status and
/// label are untouched.
pub fn normalize(dataset: &Dataset) -> Result<Dataset> {
    if dataset.norm_stats.is_some() {
        return Err(Error::State("dataset is already normalized".into()));
    }
    let n = dataset.records.len();
    if n < 2 {
        return Err(Error::Data(format!(
            "normalize needs at least 2 records, got {n}"
        )));
    }
    let mut stats = Vec::with_capacity(NUM_FEATURES);
    for c in 0..NUM_FEATURES {
        let mean = dataset.records.iter().map(|r| r.indicators[c]).sum::<f64>() / n as f64;
        let var = dataset
            .records
            .iter()
            .map(|r| (r.indicators[c] - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        let std = var.sqrt();
        stats.push(FeatureStat {
            mean,
            std,
            zero_variance: std <= 0.0,
        });
    }
    let records = dataset
        .records
        .iter()
        .map(|rec| {
            let mut r = rec.clone();
            for (c, stat) in stats.iter().enumerate() {
                r.indicators[c] = if stat.zero_variance {
                    0.0
                } else {
                    (r.indicators[c] - stat.mean) / stat.std
                };
            }
            r
        })
        .collect();
    Ok(Dataset {
        records,
        norm_stats: Some(NormStats { per_feature: stats }),
    })
}

/// Invert `normalize` using the stored statistics.
pub fn denormalize(dataset: &Dataset) -> Result<Dataset> {
    let stats = dataset
        .norm_stats
        .as_ref()
        .ok_or_else(|| Error::State("dataset has no normalization statistics".into()))?;
    let records = dataset
        .records
        .iter()
        .map(|rec| {
            let mut r = rec.clone();
            for (c, stat) in stats.per_feature.iter().enumerate() {
                r.indicators[c] = if stat.zero_variance {
                    stat.mean
                } else {
                    r.indicators[c] * stat.std + stat.mean
                };
            }
            r
        })
        .collect();
    Ok(Dataset {
        records,
        norm_stats: None,
    })
}

/// Apply existing statistics to an un-normalized dataset (e.g. the test
/// split, using the training split's stats).
pub fn normalize_with(dataset: &Dataset, stats: &NormStats) -> Result<Dataset> {
    if dataset.norm_stats.is_some() {
        return Err(Error::State("dataset is already normalized".into()));
    }
    let records = dataset
        .records
        .iter()
        .map(|rec| {
            let mut r = rec.clone();
            for (c, stat) in stats.per_feature.iter().enumerate() {
                r.indicators[c] = if stat.zero_variance {
                    0.0
                } else {
                    (r.indicators[c] - stat.mean) / stat.std
                };
            }
            r
        })
        .collect();
    Ok(Dataset {
        records,
        norm_stats: Some(NormStats {
            per_feature: stats.per_feature.clone(),
        }),
    })
}

/// Per-class split: floor(fraction * count) records of each class go to
/// train, the remainder to test. Selection is shuffled per seed; output
/// preserves the input record order within each side.
pub fn stratified_split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must be in (0,1), got {train_fraction}"
        )));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, r) in dataset.records.iter().enumerate() {
        by_class[r.label as usize].push(i);
    }
    for (label, idx) in by_class.iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::Data(format!(
                "stratification requires >= 2 records of class {label}, got {}",
                idx.len()
            )));
        }
    }
    let mut train_set = vec![false; dataset.records.len()];
    for (label, idx) in by_class.iter().enumerate() {
        let mut shuffled = idx.clone();
        let mut rng = Prng::with_stream(seed, label as u64);
        rng.shuffle(&mut shuffled);
        let n_train = (train_fraction * idx.len() as f64).floor() as usize;
        for &i in shuffled.iter().take(n_train) {
            train_set[i] = true;
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, r) in dataset.records.iter().enumerate() {
        if train_set[i] {
            train.push(r.clone());
        } else {
            test.push(r.clone());
        }
    }
    Ok((
        Dataset {
            records: train,
            norm_stats: dataset.norm_stats.clone(),
        },
        Dataset {
            records: test,
            norm_stats: dataset.norm_stats.clone(),
        },
    ))
}

#[derive(Debug, Clone)]
pub struct AugmentOutcome {
    pub dataset: Dataset,
    pub appended: usize,
    /// Synthetic records that were needed but unavailable.
    pub shortfall: usize,
}

/// Append the minimum number of synthetic minority records needed to reach
/// `target_ratio` = minority/majority (all available if insufficient).
/// Original records are never mutated or reordered.
pub fn augment(train: &Dataset, synthetic: &[FirmRecord], target_ratio: f64) -> Result<AugmentOutcome> {
    if !(target_ratio > 0.0 && target_ratio <= 1.0) {
        return Err(Error::Config(format!(
            "target_ratio must be in (0,1], got {target_ratio}"
        )));
    }
    if let Some(bad) = synthetic.iter().find(|r| r.label != 1) {
        return Err(Error::Data(format!(
            "synthetic record {} has majority-class label", bad.firm_id
        )));
    }
    for r in synthetic {
        r.validate()?;
    }
    let (minority, majority) = train.class_counts();
    let target = (target_ratio * majority as f64).ceil() as usize;
    let needed = target.saturating_sub(minority);
    if needed == 0 {
        return Ok(AugmentOutcome {
            dataset: train.clone(),
            appended: 0,
            shortfall: 0,
        });
    }
    let take = needed.min(synthetic.len());
    let mut records = train.records.clone();
    for rec in synthetic.iter().take(take) {
        let mut r = rec.clone();
        r.synthetic = true;
        records.push(r);
    }
    Ok(AugmentOutcome {
        dataset: Dataset {
            records,
            norm_stats: train.norm_stats.clone(),
        },
        appended: take,
        shortfall: needed - take,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn record(id: &str, label: u8, seed_val: f64) -> FirmRecord {
        FirmRecord {
            firm_id: id.to_string(),
            industry: Industry::Steel,
            indicators: (0..NUM_FEATURES).map(|i| seed_val + i as f64).collect(),
            contract_status: 1,
            label,
            synthetic: false,
            ground_truth_p: None,
        }
    }

    fn toy_dataset(neg: usize, pos: usize) -> Dataset {
        let mut records = Vec::new();
        for i in 0..neg {
            records.push(record(&format!("n{i}"), 0, i as f64));
        }
        for i in 0..pos {
            records.push(record(&format!("p{i}"), 1, 100.0 + i as f64));
        }
        Dataset::new(records).unwrap()
    }

    #[test]
    fn normalize_standardizes() {
        let mut ds = toy_dataset(3, 2);
        ds.records[0].indicators[0] = 1.0;
        ds.records[1].indicators[0] = 2.0;
        ds.records[2].indicators[0] = 3.0;
        ds.records[3].indicators[0] = 2.0;
        ds.records[4].indicators[0] = 2.0;
        let n = normalize(&ds).unwrap();
        let col: Vec<f64> = n.records.iter().map(|r| r.indicators[0]).collect();
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn normalize_twice_is_state_error() {
        let ds = toy_dataset(3, 2);
        let n = normalize(&ds).unwrap();
        assert!(matches!(normalize(&n), Err(Error::State(_))));
    }

    #[test]
    fn zero_variance_flagged_and_zeroed() {
        let mut ds = toy_dataset(3, 2);
        for r in &mut ds.records {
            r.indicators[4] = 4.0;
        }
        let n = normalize(&ds).unwrap();
        assert!(n.norm_stats.as_ref().unwrap().per_feature[4].zero_variance);
        for r in &n.records {
            assert_eq!(r.indicators[4], 0.0);
        }
        let back = denormalize(&n).unwrap();
        for r in &back.records {
            assert_eq!(r.indicators[4], 4.0);
        }
    }

    #[test]
    fn normalize_denormalize_roundtrip() {
        let ds = toy_dataset(5, 3);
        let back = denormalize(&normalize(&ds).unwrap()).unwrap();
        for (a, b) in back.records.iter().zip(&ds.records) {
            for (x, y) in a.indicators.iter().zip(&b.indicators) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn split_counts_follow_floor_rule() {
        let ds = toy_dataset(90, 10);
        let (train, test) = stratified_split(&ds, 0.8, 7).unwrap();
        let (tp, tn) = train.class_counts();
        assert_eq!(tp, 8);
        assert_eq!(tn, 72);
        assert_eq!(train.len() + test.len(), 100);
    }

    #[test]
    fn split_deterministic_and_conserving() {
        let ds = toy_dataset(40, 20);
        let (a1, b1) = stratified_split(&ds, 0.7, 99).unwrap();
        let (a2, b2) = stratified_split(&ds, 0.7, 99).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        let mut ids: Vec<&str> = a1
            .records
            .iter()
            .chain(&b1.records)
            .map(|r| r.firm_id.as_str())
            .collect();
        ids.sort_unstable();
        let mut orig: Vec<&str> = ds.records.iter().map(|r| r.firm_id.as_str()).collect();
        orig.sort_unstable();
        assert_eq!(ids, orig);
    }

    #[test]
    fn split_rejects_tiny_class() {
        let ds = toy_dataset(10, 1);
        assert!(stratified_split(&ds, 0.8, 1).is_err());
    }

    #[test]
    fn augment_reaches_target_ratio() {
        let ds = toy_dataset(95, 5);
        let synthetic: Vec<FirmRecord> =
            (0..200).map(|i| record(&format!("s{i}"), 1, i as f64)).collect();
        let out = augment(&ds, &synthetic, 1.0).unwrap();
        assert_eq!(out.appended, 90);
        let (pos, neg) = out.dataset.class_counts();
        assert_eq!((pos, neg), (95, 95));
        assert!(out.dataset.records[100..].iter().all(|r| r.synthetic));
        // originals untouched, in order
        assert_eq!(&out.dataset.records[..100], &ds.records[..]);
    }

    #[test]
    fn augment_noop_when_target_met() {
        let ds = toy_dataset(10, 10);
        let out = augment(&ds, &[], 1.0).unwrap();
        assert_eq!(out.appended, 0);
        assert_eq!(out.dataset, ds);
    }

    #[test]
    fn augment_reports_shortfall() {
        let ds = toy_dataset(95, 5);
        let synthetic: Vec<FirmRecord> =
            (0..10).map(|i| record(&format!("s{i}"), 1, i as f64)).collect();
        let out = augment(&ds, &synthetic, 1.0).unwrap();
        assert_eq!(out.appended, 10);
        assert_eq!(out.shortfall, 80);
    }

    #[test]
    fn augment_rejects_majority_synthetic() {
        let ds = toy_dataset(10, 5);
        let synthetic = vec![record("bad", 0, 0.0)];
        assert!(augment(&ds, &synthetic, 1.0).is_err());
    }

    #[test]
    fn feature_matrix_has_sixteen_columns() {
        let ds = toy_dataset(4, 2);
        let m = ds.feature_matrix();
        assert_eq!(m.cols(), FEATURE_COLS);
        assert_eq!(m.rows(), 6);
        assert_eq!(m.get(0, NUM_FEATURES), 1.0);
    }
}
