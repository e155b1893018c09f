//! ROC curve and AUC.
//!
//! The curve is swept over all distinct score thresholds in descending
//! order; tied scores move as a block, which makes trapezoid AUC equal to
//! the Mann–Whitney statistic `P(s+ > s-) + 0.5 * P(tie)` exactly.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// Ordered (fpr, tpr) points from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    /// Threshold producing each point; the leading (0,0) point carries
    /// +inf (no sample predicted positive).
    pub thresholds: Vec<f64>,
}

pub fn roc_and_auc(labels: &[u8], scores: &[f64]) -> Result<(RocCurve, f64)> {
    if labels.len() != scores.len() {
        return Err(Error::Data(format!(
            "labels and scores differ in length: {} vs {}",
            labels.len(),
            scores.len()
        )));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Data(
            "ROC is undefined when only one class is present".into(),
        ));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::Numeric(format!("non-finite score at index {i}")));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    // descending by score; index as tiebreak for determinism
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        // consume the whole tie block
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        thresholds.push(threshold);
    }

    let mut auc = 0.0;
    for w in points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    Ok((RocCurve { points, thresholds }, auc))
}

/// Pairwise Mann–Whitney AUC: `P(s+ > s-) + 0.5 * P(tie)` by brute force.
/// Kept as the independent second route for the trapezoid sweep.
pub fn mann_whitney_auc(labels: &[u8], scores: &[f64]) -> Result<f64> {
    let positives: Vec<f64> = labels
        .iter()
        .zip(scores)
        .filter(|(&y, _)| y == 1)
        .map(|(_, &s)| s)
        .collect();
    let negatives: Vec<f64> = labels
        .iter()
        .zip(scores)
        .filter(|(&y, _)| y == 0)
        .map(|(_, &s)| s)
        .collect();
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::Data(
            "ROC is undefined when only one class is present".into(),
        ));
    }
    let mut wins = 0.0;
    for &p in &positives {
        for &n in &negatives {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (positives.len() * negatives.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::Prng;

    #[test]
    fn perfect_separation() {
        let labels = [1, 1, 0, 0];
        let scores = [0.9, 0.8, 0.2, 0.1];
        let (curve, auc) = roc_and_auc(&labels, &scores).unwrap();
        assert_eq!(auc, 1.0);
        assert_eq!(curve.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(curve.points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn all_ties_give_half() {
        let labels = [1, 0, 1, 0, 0];
        let scores = [0.5; 5];
        let (_, auc) = roc_and_auc(&labels, &scores).unwrap();
        assert!((auc - 0.5).abs() < 1e-15);
    }

    // Brute force over the 4 positive-negative pairs: 3 wins, 1 loss.
    #[test]
    fn hand_case_auc_075() {
        let labels = [1, 0, 1, 0];
        let scores = [0.9, 0.8, 0.4, 0.3];
        let (_, auc) = roc_and_auc(&labels, &scores).unwrap();
        assert!((auc - 0.75).abs() < 1e-15, "{auc}");
    }

    #[test]
    fn single_class_rejected() {
        assert!(roc_and_auc(&[1, 1], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn curve_is_monotone() {
        let mut rng = Prng::new(6);
        let n = 200;
        let labels: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        let scores: Vec<f64> = (0..n).map(|_| (rng.next_f64() * 10.0).round() / 10.0).collect();
        let (curve, _) = roc_and_auc(&labels, &scores).unwrap();
        for w in curve.points.windows(2) {
            assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn trapezoid_equals_mann_whitney() {
        let mut rng = Prng::new(31);
        for _ in 0..100 {
            let n = 5 + rng.below(60);
            let labels: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
            if labels.iter().all(|&y| y == 0) || labels.iter().all(|&y| y == 1) {
                continue;
            }
            // coarse grid so ties actually occur
            let scores: Vec<f64> = (0..n).map(|_| (rng.next_f64() * 8.0).floor() / 8.0).collect();
            let (_, trap) = roc_and_auc(&labels, &scores).unwrap();
            let mw = mann_whitney_auc(&labels, &scores).unwrap();
            assert!((trap - mw).abs() < 1e-12, "{trap} vs {mw}");
        }
    }

    #[test]
    fn monotone_transform_invariance() {
        let mut rng = Prng::new(12);
        let n = 100;
        let labels: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        let scores: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let transformed: Vec<f64> = scores.iter().map(|s| (s * 0.5).exp()).collect();
        let (c1, a1) = roc_and_auc(&labels, &scores).unwrap();
        let (c2, a2) = roc_and_auc(&labels, &transformed).unwrap();
        assert_eq!(c1.points, c2.points);
        assert!((a1 - a2).abs() < 1e-15);
    }

    #[test]
    fn label_swap_negated_scores_complement() {
        let mut rng = Prng::new(13);
        let n = 80;
        let labels: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
        let scores: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let flipped: Vec<u8> = labels.iter().map(|&y| 1 - y).collect();
        let negated: Vec<f64> = scores.iter().map(|&s| -s).collect();
        let (_, a) = roc_and_auc(&labels, &scores).unwrap();
        let (_, b) = roc_and_auc(&flipped, &negated).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}
