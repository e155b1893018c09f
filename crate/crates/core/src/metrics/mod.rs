//! Classification metrics: confusion counts, accuracy/precision/recall/F1,
//! ROC/AUC, report rendering and plot emission.

pub mod energy;
pub mod report;
pub mod roc;
pub mod svg;

pub use energy::energy_distance;
pub use report::{render_report, table2_f1_discrepancy_note, ReportFormat};
pub use roc::{mann_whitney_auc, roc_and_auc, RocCurve};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub model_name: String,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: Option<f64>,
    /// True when a zero-denominator convention (precision/recall/F1 -> 0)
    /// was applied; flagged with a footnote marker in rendered reports.
    pub degenerate: bool,
}

/// Confusion counts and the derived accuracy/precision/recall/F1.
/// Positive class is `1` (default). Zero denominators map to 0 and set the
/// `degenerate` flag.
pub fn confusion_and_prf(labels: &[u8], predicted: &[u8], model_name: &str) -> Result<(ConfusionMatrix, MetricsRow)> {
    if labels.len() != predicted.len() {
        return Err(Error::Data(format!(
            "labels and predictions differ in length: {} vs {}",
            labels.len(),
            predicted.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Data("cannot score an empty prediction set".into()));
    }
    let mut cm = ConfusionMatrix {
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 0,
    };
    for (&y, &p) in labels.iter().zip(predicted) {
        match (y, p) {
            (1, 1) => cm.tp += 1,
            (0, 1) => cm.fp += 1,
            (1, 0) => cm.fn_ += 1,
            (0, 0) => cm.tn += 1,
            _ => {
                return Err(Error::Data(format!(
                    "labels and predictions must be 0/1, got ({y},{p})"
                )))
            }
        }
    }
    let total = cm.total() as f64;
    let accuracy = (cm.tp + cm.tn) as f64 / total;
    let mut degenerate = false;
    let precision = if cm.tp + cm.fp > 0 {
        cm.tp as f64 / (cm.tp + cm.fp) as f64
    } else {
        degenerate = true;
        0.0
    };
    let recall = if cm.tp + cm.fn_ > 0 {
        cm.tp as f64 / (cm.tp + cm.fn_) as f64
    } else {
        degenerate = true;
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        degenerate = true;
        0.0
    };
    Ok((
        cm,
        MetricsRow {
            model_name: model_name.to_string(),
            accuracy,
            precision,
            recall,
            f1,
            auc: None,
            degenerate,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::Prng;

    #[test]
    fn counting_example() {
        // tp=8, fp=2, fn=0, tn=10
        let mut labels = vec![1u8; 8];
        labels.extend(vec![0u8; 2]);
        labels.extend(vec![0u8; 10]);
        let mut predicted = vec![1u8; 10];
        predicted.extend(vec![0u8; 10]);
        let (cm, row) = confusion_and_prf(&labels, &predicted, "m").unwrap();
        assert_eq!((cm.tp, cm.fp, cm.fn_, cm.tn), (8, 2, 0, 10));
        assert!((row.accuracy - 0.9).abs() < 1e-12);
        assert!((row.precision - 0.8).abs() < 1e-12);
        assert!((row.recall - 1.0).abs() < 1e-12);
        assert!((row.f1 - 0.888889).abs() < 1e-6);
    }

    #[test]
    fn perfect_predictions() {
        let labels = vec![0, 1, 1, 0, 1];
        let (_, row) = confusion_and_prf(&labels, &labels, "m").unwrap();
        assert_eq!(row.accuracy, 1.0);
        assert_eq!(row.precision, 1.0);
        assert_eq!(row.recall, 1.0);
        assert_eq!(row.f1, 1.0);
    }

    #[test]
    fn zero_denominator_convention() {
        let labels = vec![0, 0, 0];
        let predicted = vec![0, 0, 0];
        let (_, row) = confusion_and_prf(&labels, &predicted, "m").unwrap();
        assert_eq!(row.precision, 0.0);
        assert_eq!(row.recall, 0.0);
        assert_eq!(row.f1, 0.0);
        assert!(row.degenerate);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(confusion_and_prf(&[0, 1], &[0], "m").is_err());
    }

    // Brute-force recount oracle on random pairs.
    #[test]
    fn agrees_with_brute_force_recount() {
        let mut rng = Prng::new(17);
        for _ in 0..50 {
            let n = 1 + rng.below(100);
            let labels: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
            let predicted: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
            let (cm, row) = confusion_and_prf(&labels, &predicted, "m").unwrap();
            let tp = labels.iter().zip(&predicted).filter(|(&y, &p)| y == 1 && p == 1).count();
            let fp = labels.iter().zip(&predicted).filter(|(&y, &p)| y == 0 && p == 1).count();
            let fn_ = labels.iter().zip(&predicted).filter(|(&y, &p)| y == 1 && p == 0).count();
            let tn = n - tp - fp - fn_;
            assert_eq!((cm.tp, cm.fp, cm.fn_, cm.tn), (tp, fp, fn_, tn));
            let acc = (tp + tn) as f64 / n as f64;
            assert_eq!(row.accuracy, acc);
            if row.precision + row.recall > 0.0 {
                let f1 = 2.0 * row.precision * row.recall / (row.precision + row.recall);
                assert!((row.f1 - f1).abs() < 1e-12);
            }
        }
    }
}
