//! Autoencoder training: reconstruct set membership at sampled points from
//! the latent embedding of the rasterized set.

use ndarray::Array2;
use thiserror::Error;

use super::{decoder_forward, encoder_forward, grid_sign_row, EmbedArch, EmbedModel};
use crate::diffcore::{AdamConfig, Graph, NodeId, ParamStore};
use crate::rng::SeedRng;
use crate::setgen::{indicator, Dataset, Point, Split};

/// Training hyperparameters. Defaults are the desk-scale configuration.
#[derive(Debug, Clone)]
pub struct EmbedConfig {
    pub latent_dim: usize,
    pub enc_hidden: [usize; 2],
    pub dec_hidden: [usize; 2],
    pub epochs: usize,
    pub batch_sets: usize,
    pub points_per_set: usize,
    pub lr: f64,
    pub weight_decay: f64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            latent_dim: 64,
            enc_hidden: [256, 128],
            dec_hidden: [128, 128],
            epochs: 20,
            batch_sets: 64,
            points_per_set: 256,
            lr: 1e-4,
            weight_decay: 1e-3,
        }
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training diverged at epoch {epoch}, step {step}: loss {loss}")]
    Diverged { epoch: usize, step: usize, loss: f64 },
}

/// Per-epoch loss trace and the checkpoint that was kept.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub best_epoch: usize,
    pub best_val: f64,
}

/// One assembled training batch: sign-mapped grids, a selector that repeats
/// each latent row once per sampled point, the points, and their exact
/// membership targets.
pub(crate) struct BatchData {
    pub x: Array2<f64>,
    pub selector: Array2<f64>,
    pub points: Array2<f64>,
    pub targets: Array2<f64>,
}

/// Reconstruction loss: encode the batch, pair every latent with its sampled
/// points, decode, and take mean BCE against the exact indicator.
pub(crate) fn autoencoder_loss(g: &mut Graph, store: &ParamStore, batch: &BatchData) -> NodeId {
    let x = g.constant(batch.x.clone());
    let z = encoder_forward(g, store, x);
    let selector = g.constant(batch.selector.clone());
    let z_rep = g.matmul(selector, z);
    let points = g.constant(batch.points.clone());
    let dec_in = g.concat_cols(points, z_rep);
    let logits = decoder_forward(g, store, dec_in);
    let targets = g.constant(batch.targets.clone());
    g.bce_with_logits_mean(logits, targets)
}

/// 0/1 selector matrix repeating each of `b` rows `p` times, in order.
fn repeat_selector(b: usize, p: usize) -> Array2<f64> {
    let mut s = Array2::zeros((b * p, b));
    for i in 0..b {
        for j in 0..p {
            s[[i * p + j, i]] = 1.0;
        }
    }
    s
}

pub(crate) fn assemble_batch(
    dataset: &Dataset,
    indices: &[usize],
    points: &[Vec<Point>],
) -> BatchData {
    assert_eq!(indices.len(), points.len());
    let b = indices.len();
    let p = points[0].len();
    let cells = (dataset.resolution() as usize).pow(2);

    let mut x = Array2::zeros((b, cells));
    for (row, &idx) in indices.iter().enumerate() {
        for (col, v) in grid_sign_row(dataset.grid(idx)).into_iter().enumerate() {
            x[[row, col]] = v;
        }
    }

    let mut pts = Array2::zeros((b * p, 2));
    let mut targets = Array2::zeros((b * p, 1));
    for (i, &idx) in indices.iter().enumerate() {
        assert_eq!(points[i].len(), p);
        let spec = dataset.spec(idx);
        for (j, &u) in points[i].iter().enumerate() {
            pts[[i * p + j, 0]] = u[0];
            pts[[i * p + j, 1]] = u[1];
            targets[[i * p + j, 0]] = if indicator(spec, u) { 1.0 } else { 0.0 };
        }
    }

    BatchData { x, selector: repeat_selector(b, p), points: pts, targets }
}

fn fresh_points(n_sets: usize, per_set: usize, rng: &mut SeedRng) -> Vec<Vec<Point>> {
    (0..n_sets)
        .map(|_| {
            (0..per_set)
                .map(|_| [rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)])
                .collect()
        })
        .collect()
}

const SHUFFLE_STREAM: u64 = 1;
const BATCH_STREAM: u64 = 2;
const VAL_STREAM: u64 = 3;

/// Evaluation points for one validation record, fixed for the whole run so
/// per-epoch validation losses are comparable.
fn val_points(index: usize, per_set: usize, seed: u64) -> Vec<Point> {
    let mut rng = SeedRng::derived(seed, &[VAL_STREAM, index as u64]);
    (0..per_set)
        .map(|_| [rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)])
        .collect()
}

fn validation_loss(
    dataset: &Dataset,
    model: &EmbedModel,
    val_idx: &[usize],
    config: &EmbedConfig,
    seed: u64,
) -> f64 {
    let mut weighted = 0.0;
    let mut total = 0usize;
    for chunk in val_idx.chunks(config.batch_sets) {
        let points: Vec<Vec<Point>> = chunk
            .iter()
            .map(|&i| val_points(i, config.points_per_set, seed))
            .collect();
        let batch = assemble_batch(dataset, chunk, &points);
        let mut g = Graph::new();
        let loss = autoencoder_loss(&mut g, model.params(), &batch);
        weighted += g.scalar(loss) * chunk.len() as f64;
        total += chunk.len();
    }
    weighted / total as f64
}

/// Trains the autoencoder on the train split with Adam, validating each
/// epoch on fixed points over the val split and returning the parameters of
/// the best validation epoch.
pub fn train_autoencoder(
    dataset: &Dataset,
    config: &EmbedConfig,
    seed: u64,
) -> Result<(EmbedModel, TrainReport), TrainError> {
    let arch = EmbedArch {
        resolution: dataset.resolution(),
        latent_dim: config.latent_dim,
        enc_hidden: config.enc_hidden,
        dec_hidden: config.dec_hidden,
    };
    let mut model = EmbedModel::new(arch, seed);
    let adam = AdamConfig::new(config.lr).with_weight_decay(config.weight_decay);
    let train_idx = dataset.split_indices(Split::Train);
    let val_idx = dataset.split_indices(Split::Val);

    let mut report = TrainReport {
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        best_epoch: 0,
        best_val: f64::INFINITY,
    };
    let mut best_params = model.params().snapshot();

    for epoch in 0..config.epochs {
        let mut order = train_idx.clone();
        SeedRng::derived(seed, &[SHUFFLE_STREAM, epoch as u64]).shuffle(&mut order);

        let mut epoch_loss = 0.0;
        let mut steps = 0usize;
        for (step, chunk) in order.chunks(config.batch_sets).enumerate() {
            let mut rng = SeedRng::derived(seed, &[BATCH_STREAM, epoch as u64, step as u64]);
            let points = fresh_points(chunk.len(), config.points_per_set, &mut rng);
            let batch = assemble_batch(dataset, chunk, &points);
            let mut g = Graph::new();
            let loss = autoencoder_loss(&mut g, model.params(), &batch);
            let value = g.scalar(loss);
            if !value.is_finite() {
                return Err(TrainError::Diverged { epoch, step, loss: value });
            }
            epoch_loss += value;
            steps += 1;
            let grads = g.backward(loss);
            model.params_mut().adam_step(&grads, &adam);
        }
        report.train_loss.push(epoch_loss / steps as f64);

        let val = validation_loss(dataset, &model, &val_idx, config, seed);
        if !val.is_finite() {
            return Err(TrainError::Diverged { epoch, step: usize::MAX, loss: val });
        }
        report.val_loss.push(val);
        if val < report.best_val {
            report.best_val = val;
            report.best_epoch = epoch;
            best_params = model.params().snapshot();
        }
    }

    model.params_mut().restore(&best_params);
    Ok((model, report))
}

/// Finite-difference audit of the reconstruction loss on a freshly
/// initialized model over a small batch from `dataset`. Returns the worst
/// relative disagreement between reverse-mode gradients and central
/// differences across `samples` randomly chosen parameter entries.
pub fn reconstruction_grad_check(
    dataset: &Dataset,
    latent_dim: usize,
    samples: usize,
    seed: u64,
) -> f64 {
    use crate::diffcore::grad_check;

    let model = EmbedModel::new(EmbedArch::desk(dataset.resolution(), latent_dim), seed);
    let mut rng = SeedRng::derived(seed, &[7]);
    let indices: Vec<usize> = (0..dataset.len().min(3)).collect();
    let points = fresh_points(indices.len(), 8, &mut rng);
    let batch = assemble_batch(dataset, &indices, &points);
    grad_check(
        |g, store| autoencoder_loss(g, store, &batch),
        model.params(),
        1e-5,
        samples,
        &mut rng,
    )
}

/// Fraction of grid cells across a split whose thresholded decoder output
/// agrees with the stored rasterization, evaluated at cell centers.
pub fn heldout_cell_agreement(model: &EmbedModel, dataset: &Dataset, split: Split) -> f64 {
    use crate::setgen::Grid;
    use rayon::prelude::*;

    let r = dataset.resolution();
    let centers: Vec<Point> = (0..r as usize)
        .flat_map(|row| (0..r as usize).map(move |col| Grid::cell_center(r, row, col)))
        .collect();
    let indices = dataset.split_indices(split);
    let agree: usize = indices
        .par_iter()
        .map(|&i| {
            let z = model.encode(dataset.grid(i));
            let predicted = model.predicted_set_membership(&centers, &z);
            predicted
                .iter()
                .zip(dataset.grid(i).cells())
                .filter(|(p, t)| *p == *t)
                .count()
        })
        .sum();
    agree as f64 / (indices.len() * centers.len()) as f64
}
