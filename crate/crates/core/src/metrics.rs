//! Threshold-free and thresholded evaluation of anomaly rankings. Higher
//! score means more anomalous; anomalies (label 1) are the positive class.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One precision-recall point at a score threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision-recall curve evaluated at every distinct score, descending.
/// The first point is synthetic (recall 0 at threshold +∞) so average
/// precision can weight the first real point by its full recall increment.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
}

fn check_inputs(scores: &[f64], labels: &[u8]) -> Result<usize> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument("empty score vector".into()));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite score {bad}")));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    if positives == 0 {
        return Err(Error::InvalidArgument(
            "need at least one positive label".into(),
        ));
    }
    Ok(positives)
}

/// Builds the precision-recall curve. Tied scores enter a threshold
/// together, so the curve is independent of input order.
pub fn pr_curve(scores: &[f64], labels: &[u8]) -> Result<PrCurve> {
    let positives = check_inputs(scores, labels)?;

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut points = vec![PrPoint {
        threshold: f64::INFINITY,
        precision: 1.0,
        recall: 0.0,
    }];

    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut idx = 0;
    while idx < order.len() {
        let threshold = scores[order[idx]];
        // Consume the whole tie group.
        while idx < order.len() && scores[order[idx]] == threshold {
            if labels[order[idx]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            idx += 1;
        }
        points.push(PrPoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / positives as f64,
        });
    }
    Ok(PrCurve { points })
}

/// Average precision: Σ (R_n − R_{n−1}) · P_n over the curve, R_0 = 0.
/// Step-interpolated, matching the threshold-sum definition; trapezoidal
/// interpolation would shift values by O(1/N).
pub fn average_precision(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let curve = pr_curve(scores, labels)?;
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for point in &curve.points[1..] {
        ap += (point.recall - prev_recall) * point.precision;
        prev_recall = point.recall;
    }
    Ok(ap)
}

fn confusion(scores: &[f64], labels: &[u8], threshold: f64) -> (usize, usize, usize, usize) {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    let mut tn = 0;
    for (&s, &l) in scores.iter().zip(labels) {
        let predicted = s >= threshold;
        match (predicted, l == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    (tp, fp, fn_, tn)
}

/// F1 of the anomaly class with predictions `score ≥ threshold`;
/// 0 when precision + recall is 0.
pub fn f1_at_threshold(scores: &[f64], labels: &[u8], threshold: f64) -> Result<f64> {
    check_inputs(scores, labels)?;
    let (tp, fp, fn_, _) = confusion(scores, labels, threshold);
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Fraction of correct predictions at the threshold.
pub fn accuracy(scores: &[f64], labels: &[u8], threshold: f64) -> Result<f64> {
    check_inputs(scores, labels)?;
    let (tp, fp, fn_, tn) = confusion(scores, labels, threshold);
    Ok((tp + tn) as f64 / (tp + fp + fn_ + tn) as f64)
}

/// Best F1 over all curve thresholds, with the threshold that attains it.
pub fn best_f1(scores: &[f64], labels: &[u8]) -> Result<(f64, f64)> {
    let curve = pr_curve(scores, labels)?;
    let mut best = (f64::INFINITY, 0.0);
    for point in &curve.points[1..] {
        let denom = point.precision + point.recall;
        let f1 = if denom == 0.0 {
            0.0
        } else {
            2.0 * point.precision * point.recall / denom
        };
        if f1 > best.1 {
            best = (point.threshold, f1);
        }
    }
    Ok(best)
}

/// Writes the curve as CSV with header `threshold,precision,recall`.
pub fn write_pr_csv<W: Write>(curve: &PrCurve, mut writer: W) -> Result<()> {
    writeln!(writer, "threshold,precision,recall")?;
    for p in &curve.points {
        writeln!(writer, "{},{},{}", p.threshold, p.precision, p.recall)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_point_curve() {
        let curve = pr_curve(&[2.0, 1.0], &[1, 0]).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert_eq!(curve.points[0].recall, 0.0);
        assert_eq!(
            curve.points[1],
            PrPoint {
                threshold: 2.0,
                precision: 1.0,
                recall: 1.0
            }
        );
        assert_eq!(
            curve.points[2],
            PrPoint {
                threshold: 1.0,
                precision: 0.5,
                recall: 1.0
            }
        );
    }

    #[test]
    fn perfect_ranking_has_unit_precisions() {
        let scores = [9.0, 8.0, 7.0, 2.0, 1.0];
        let labels = [1, 1, 1, 0, 0];
        let curve = pr_curve(&scores, &labels).unwrap();
        for point in &curve.points[1..=3] {
            assert_eq!(point.precision, 1.0);
        }
        assert_abs_diff_eq!(
            average_precision(&scores, &labels).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn tied_scores_enter_together() {
        let curve = pr_curve(&[1.0, 1.0], &[1, 0]).unwrap();
        assert_eq!(curve.points.len(), 2);
        assert_eq!(
            curve.points[1],
            PrPoint {
                threshold: 1.0,
                precision: 0.5,
                recall: 1.0
            }
        );
    }

    #[test]
    fn worked_three_point_example() {
        // Thresholds 0.9, 0.8, 0.7 give precisions 1, 1/2, 2/3 at recalls
        // 1/2, 1/2, 1: AP = 1·(1/2) + (2/3)·(1/2) = 5/6.
        let scores = [0.9, 0.8, 0.7];
        let labels = [1, 0, 1];
        let ap = average_precision(&scores, &labels).unwrap();
        assert_abs_diff_eq!(ap, 5.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn f1_and_accuracy_basics() {
        let scores = [0.9, 0.8, 0.7];
        let labels = [1, 0, 1];
        // Threshold 0.85 predicts only the top point: TP=1, FP=0, FN=1.
        assert_abs_diff_eq!(
            f1_at_threshold(&scores, &labels, 0.85).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-12
        );
        // Threshold 0.75 predicts the top two: TP=1, FP=1, FN=1.
        assert_abs_diff_eq!(
            f1_at_threshold(&scores, &labels, 0.75).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            accuracy(&scores, &labels, 0.85).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-12
        );

        // Perfect separation.
        let sep_scores = [5.0, 4.0, 1.0, 0.5];
        let sep_labels = [1, 1, 0, 0];
        assert_eq!(f1_at_threshold(&sep_scores, &sep_labels, 2.0).unwrap(), 1.0);
        assert_eq!(accuracy(&sep_scores, &sep_labels, 2.0).unwrap(), 1.0);

        // Predict-all-nominal: no predicted positives.
        assert_eq!(
            f1_at_threshold(&sep_scores, &sep_labels, 10.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn best_f1_scans_thresholds() {
        let scores = [0.9, 0.8, 0.7];
        let labels = [1, 0, 1];
        let (threshold, f1) = best_f1(&scores, &labels).unwrap();
        // Candidates: 2/3 at 0.9, 1/2 at 0.8, 4/5 at 0.7.
        assert_abs_diff_eq!(f1, 0.8, epsilon = 1e-12);
        assert_eq!(threshold, 0.7);
    }

    #[test]
    fn input_validation() {
        assert!(average_precision(&[1.0], &[1, 0]).is_err());
        assert!(average_precision(&[], &[]).is_err());
        assert!(average_precision(&[1.0, 2.0], &[0, 0]).is_err());
        assert!(average_precision(&[f64::NAN, 2.0], &[0, 1]).is_err());
    }

    #[test]
    fn pr_csv_has_expected_header() {
        let curve = pr_curve(&[2.0, 1.0], &[1, 0]).unwrap();
        let mut buf = Vec::new();
        write_pr_csv(&curve, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("threshold,precision,recall\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
