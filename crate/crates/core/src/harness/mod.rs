//! Evaluation metrics, the two experiments over trained models, report
//! emission, and run configuration.

mod config;
mod experiments;
mod report;

pub use config::{ConfigError, ConfigMap};
pub use experiments::{eval_consistency, eval_performance, EvalConfig};
pub use report::{ExperimentReport, ReportReadError, ReportRow, CSV_HEADER};

/// Intersection over union of two membership vectors on a shared point
/// sample. `None` when the union is empty; callers exclude such datapoints
/// from aggregate statistics.
pub fn iou(a: &[bool], b: &[bool]) -> Option<f64> {
    assert_eq!(a.len(), b.len(), "memberships need a shared point sample");
    let mut inter = 0usize;
    let mut union = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        inter += usize::from(x && y);
        union += usize::from(x || y);
    }
    if union == 0 {
        None
    } else {
        Some(inter as f64 / union as f64)
    }
}

/// Fraction of points where the two membership vectors agree.
pub fn accuracy(pred: &[bool], truth: &[bool]) -> f64 {
    assert_eq!(pred.len(), truth.len(), "memberships need a shared point sample");
    assert!(!pred.is_empty(), "need at least one point");
    let agree = pred.iter().zip(truth).filter(|(x, y)| x == y).count();
    agree as f64 / pred.len() as f64
}

pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "mean of empty sample");
    values.iter().sum::<f64>() / values.len() as f64
}

/// Linearly interpolated percentile, `q` in [0, 100], over an unordered
/// sample without NaNs.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of empty sample");
    assert!((0.0..=100.0).contains(&q), "percentile out of range: {q}");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("metric samples are not NaN"));
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    percentile(values, 50.0)
}

/// Spearman rank correlation with average ranks for ties. Panics when either
/// sample is constant; a rank correlation is meaningless there.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    assert!(xs.len() >= 2, "need at least two pairs");
    pearson(&average_ranks(xs), &average_ranks(ys))
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("rank samples are not NaN"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // 1-based ranks; ties share the group average.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    assert!(vx > 0.0 && vy > 0.0, "correlation of a constant sample");
    // Single sqrt of the product: identical rank vectors give exactly 1.
    cov / (vx * vy).sqrt()
}
