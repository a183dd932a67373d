//! The two evaluation experiments.
//!
//! Performance: how well latent-side term evaluation reproduces the true
//! planar set, across term sizes. Consistency: how stable a model's
//! prediction is when the term is rewritten into provably equivalent forms.
//!
//! All random draws (terms, set bindings, points) come from seeds derived
//! only from the experiment seed and case index, never from the model, so
//! every model evaluated at one seed sees identical cases.

use rayon::prelude::*;

use super::report::{ExperimentReport, ReportRow};
use super::{accuracy, iou, mean, median, percentile};
use crate::algebra::{equivalent_term, random_term, Term};
use crate::embed::{EmbedModel, LatentVector};
use crate::rng::SeedRng;
use crate::setgen::{realize_term_on_sets, Dataset, Point, SetSpec, Split};
use crate::transport::{predict_latent, LatentOps};

/// Counts for one experiment invocation.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub num_points: usize,
    pub num_terms: usize,
    pub ell_max: usize,
    pub j_max: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { num_points: 10_000, num_terms: 50, ell_max: 10, j_max: 8 }
    }
}

impl EvalConfig {
    fn validate(&self) {
        assert!(self.num_points >= 1, "need at least one evaluation point");
        assert!(self.num_terms >= 1, "need at least one term");
        assert!(self.ell_max >= 1, "need at least one variable");
        assert!(self.j_max >= 1, "need at least one rewrite step");
    }
}

const PERF_STREAM: u64 = 20;
const CONS_STREAM: u64 = 21;

pub(crate) struct EvalCase {
    pub term: Term,
    pub set_indices: Vec<usize>,
    pub points: Vec<Point>,
}

fn draw_case(dataset: &Dataset, pool: &[usize], ell: usize, num_points: usize, rng: &mut SeedRng) -> EvalCase {
    let term = random_term(ell, rng);
    let set_indices: Vec<usize> =
        (0..ell).map(|_| pool[rng.uniform_usize(pool.len())]).collect();
    let points: Vec<Point> = (0..num_points)
        .map(|_| [rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)])
        .collect();
    let _ = dataset;
    EvalCase { term, set_indices, points }
}

pub(crate) fn draw_performance_case(
    dataset: &Dataset,
    pool: &[usize],
    ell: usize,
    t: usize,
    num_points: usize,
    seed: u64,
) -> EvalCase {
    let mut rng = SeedRng::derived(seed, &[PERF_STREAM, ell as u64, t as u64]);
    draw_case(dataset, pool, ell, num_points, &mut rng)
}

pub(crate) fn draw_consistency_case(
    dataset: &Dataset,
    pool: &[usize],
    ell_max: usize,
    t: usize,
    num_points: usize,
    seed: u64,
) -> EvalCase {
    let mut rng = SeedRng::derived(seed, &[CONS_STREAM, t as u64]);
    let ell = rng.uniform_inclusive(1, ell_max);
    draw_case(dataset, pool, ell, num_points, &mut rng)
}

fn true_membership(dataset: &Dataset, case: &EvalCase) -> Vec<bool> {
    let specs: Vec<SetSpec> =
        case.set_indices.iter().map(|&i| dataset.spec(i).clone()).collect();
    case.points
        .iter()
        .map(|&u| realize_term_on_sets(&case.term, &specs, u).expect("variables bound"))
        .collect()
}

fn predicted_membership<M: LatentOps + Sync + ?Sized>(
    model: &M,
    embed: &EmbedModel,
    latents: &[LatentVector],
    case: &EvalCase,
    term: &Term,
) -> Vec<bool> {
    let leaves: Vec<LatentVector> =
        case.set_indices.iter().map(|&i| latents[i].clone()).collect();
    let z = predict_latent(model, term, &leaves).expect("variables bound");
    embed.predicted_set_membership(&case.points, &z)
}

/// Evaluates term-prediction quality on the test split: per term size ℓ and
/// random term, IoU and accuracy of the decoded prediction against the exact
/// set evaluation. Emits per-term `iou` rows, per-ℓ means, and overall means
/// (`ell_or_J` 0). Terms whose predicted and true sets are both empty on the
/// sample carry no IoU information and are excluded; `n` records how many
/// terms each aggregate kept.
pub fn eval_performance<M: LatentOps + Sync + ?Sized>(
    model: &M,
    embed: &EmbedModel,
    dataset: &Dataset,
    latents: &[LatentVector],
    cfg: &EvalConfig,
    seed: u64,
) -> ExperimentReport {
    cfg.validate();
    assert_eq!(latents.len(), dataset.len(), "need one latent per record");
    let pool = dataset.split_indices(Split::Test);
    let model_id = model.model_id();
    let law_count = model.law_count();

    let cases: Vec<(usize, usize)> = (1..=cfg.ell_max)
        .flat_map(|ell| (0..cfg.num_terms).map(move |t| (ell, t)))
        .collect();
    let measured: Vec<(Option<f64>, f64)> = cases
        .par_iter()
        .map(|&(ell, t)| {
            let case = draw_performance_case(dataset, &pool, ell, t, cfg.num_points, seed);
            let truth = true_membership(dataset, &case);
            let pred = predicted_membership(model, embed, latents, &case, &case.term);
            (iou(&pred, &truth), accuracy(&pred, &truth))
        })
        .collect();

    let mut report = ExperimentReport::new();
    let row = |ell_or_j: usize, metric: &str, value: f64, n: usize| ReportRow {
        experiment: "performance".to_string(),
        model_id: model_id.clone(),
        law_count,
        ell_or_j,
        metric: metric.to_string(),
        value,
        n,
        seed,
    };
    let mut all_ious = Vec::new();
    let mut all_accs = Vec::new();
    for ell in 1..=cfg.ell_max {
        let block = &measured[(ell - 1) * cfg.num_terms..ell * cfg.num_terms];
        let ious: Vec<f64> = block.iter().filter_map(|(v, _)| *v).collect();
        let accs: Vec<f64> = block.iter().map(|(_, a)| *a).collect();
        for &(v, _) in block {
            if let Some(v) = v {
                report.push(row(ell, "iou", v, 1));
            }
        }
        if !ious.is_empty() {
            report.push(row(ell, "iou_mean", mean(&ious), ious.len()));
        }
        report.push(row(ell, "accuracy_mean", mean(&accs), accs.len()));
        all_ious.extend(ious);
        all_accs.extend(accs);
    }
    if !all_ious.is_empty() {
        report.push(row(0, "iou_mean", mean(&all_ious), all_ious.len()));
    }
    report.push(row(0, "accuracy_mean", mean(&all_accs), all_accs.len()));
    report
}

/// Evaluates prediction stability under law rewrites on the test split: per
/// term p, the prediction for p is compared against predictions for J-step
/// equivalent rewrites of p over the same latents and points. Emits per-term
/// `iou` rows and per-J median and 20th/80th percentile rows.
pub fn eval_consistency<M: LatentOps + Sync + ?Sized>(
    model: &M,
    embed: &EmbedModel,
    dataset: &Dataset,
    latents: &[LatentVector],
    cfg: &EvalConfig,
    seed: u64,
) -> ExperimentReport {
    cfg.validate();
    assert_eq!(latents.len(), dataset.len(), "need one latent per record");
    let pool = dataset.split_indices(Split::Test);
    let model_id = model.model_id();
    let law_count = model.law_count();

    let measured: Vec<Vec<Option<f64>>> = (0..cfg.num_terms)
        .into_par_iter()
        .map(|t| {
            let case =
                draw_consistency_case(dataset, &pool, cfg.ell_max, t, cfg.num_points, seed);
            let base = predicted_membership(model, embed, latents, &case, &case.term);
            (1..=cfg.j_max)
                .map(|j| {
                    let mut rng = SeedRng::derived(seed, &[CONS_STREAM, t as u64, j as u64]);
                    let rewritten = equivalent_term(&case.term, j, &mut rng);
                    let other =
                        predicted_membership(model, embed, latents, &case, &rewritten);
                    iou(&other, &base)
                })
                .collect()
        })
        .collect();

    let mut report = ExperimentReport::new();
    let row = |ell_or_j: usize, metric: &str, value: f64, n: usize| ReportRow {
        experiment: "consistency".to_string(),
        model_id: model_id.clone(),
        law_count,
        ell_or_j,
        metric: metric.to_string(),
        value,
        n,
        seed,
    };
    for (t, per_j) in measured.iter().enumerate() {
        let _ = t;
        for (ji, v) in per_j.iter().enumerate() {
            if let Some(v) = *v {
                report.push(row(ji + 1, "iou", v, 1));
            }
        }
    }
    for j in 1..=cfg.j_max {
        let values: Vec<f64> =
            measured.iter().filter_map(|per_j| per_j[j - 1]).collect();
        if values.is_empty() {
            continue;
        }
        report.push(row(j, "iou_median", median(&values), values.len()));
        report.push(row(j, "iou_p20", percentile(&values, 20.0), values.len()));
        report.push(row(j, "iou_p80", percentile(&values, 80.0), values.len()));
    }
    report
}
