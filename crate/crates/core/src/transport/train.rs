//! Transport training: fit the coupling map (or a direct baseline) so that
//! term predictions made with latent operations decode to the right sets.
//!
//! Each training instance is a random term over random training sets. The
//! predicted latent is evaluated symbolically inside the autodiff graph, fed
//! through the frozen decoder at fresh points, and scored against the exact
//! set-algebra evaluation of the same term. Only the latent-operation
//! parameters receive updates; the embedding model is borrowed immutably and
//! its parameters never change.

use ndarray::Array2;

use super::baseline::baseline_apply_graph;
use super::{BaselineKind, DirectBaseline, TransportModel, SHIFT_CLAMP};
use crate::algebra::{random_term, OperationSymbol, Term};
use crate::diffcore::{grad_check, AdamConfig, Graph, NodeId, ParamStore};
use crate::embed::{
    decoder_forward, EmbedModel, LatentVector, TrainError, TrainReport, LATTICE_EXP,
};
use crate::mirrored::{CandidateOp, MirroredPair};
use crate::rng::SeedRng;
use crate::setgen::{realize_term_on_sets, Dataset, Point, SetSpec, Split};

/// Training hyperparameters shared by the coupling map and the baselines.
#[derive(Debug, Clone)]
pub struct TransportConfig {
    pub epochs: usize,
    pub batch_terms: usize,
    pub points_per_term: usize,
    pub ell_max: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub val_instances: usize,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            epochs: 10,
            batch_terms: 16,
            points_per_term: 256,
            ell_max: 10,
            lr: 1e-3,
            weight_decay: 0.0,
            val_instances: 64,
        }
    }
}

impl TransportConfig {
    /// Baseline networks train with a smaller step size.
    pub fn baseline_default() -> Self {
        TransportConfig { lr: 1e-4, ..TransportConfig::default() }
    }
}

/// One sampled training case: a term, the dataset records bound to its
/// variables, evaluation points, and exact 0/1 targets at those points.
pub(crate) struct TermInstance {
    pub term: Term,
    pub set_indices: Vec<usize>,
    pub points: Vec<Point>,
    pub targets: Vec<f64>,
}

/// Draws a term of uniform size 1..=ell_max, binds each variable to a record
/// drawn with replacement from `pool`, and samples fresh target points.
pub(crate) fn sample_instance(
    dataset: &Dataset,
    pool: &[usize],
    ell_max: usize,
    points_per_term: usize,
    rng: &mut SeedRng,
) -> TermInstance {
    let ell = rng.uniform_inclusive(1, ell_max);
    let term = random_term(ell, rng);
    let set_indices: Vec<usize> =
        (0..ell).map(|_| pool[rng.uniform_usize(pool.len())]).collect();
    let points: Vec<Point> = (0..points_per_term)
        .map(|_| [rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)])
        .collect();
    let specs: Vec<SetSpec> =
        set_indices.iter().map(|&i| dataset.spec(i).clone()).collect();
    let targets: Vec<f64> = points
        .iter()
        .map(|&u| {
            if realize_term_on_sets(&term, &specs, u).expect("variables bound") {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    TermInstance { term, set_indices, points, targets }
}

/// Mirrored operation applied columnwise inside the graph.
fn candidate_op_graph(g: &mut Graph, op: CandidateOp, a: NodeId, b: NodeId) -> NodeId {
    match op {
        CandidateOp::Min => g.min_elem(a, b),
        CandidateOp::Max => g.max_elem(a, b),
        CandidateOp::Add => g.add(a, b),
        CandidateOp::Sub => g.sub(a, b),
        CandidateOp::Hadamard => g.mul(a, b),
        CandidateOp::ScaledAdd => {
            let s = g.add(a, b);
            g.scale(s, 2.0)
        }
        CandidateOp::MatProd => g.mat_square_prod(a, b),
        CandidateOp::CyclicAdd => {
            let rolled = g.roll_cols(a);
            g.add(rolled, b)
        }
    }
}

/// One coupling shift: the same affine/tanh/clamp/snap chain as the plain
/// path, expressed in graph ops.
fn shift_graph(g: &mut Graph, store: &ParamStore, layer: usize, pass: NodeId) -> NodeId {
    let name = |n: &str| format!("phi.l{layer}.{n}");
    let w1 = g.param(store, &name("w1"));
    let b1 = g.param(store, &name("b1"));
    let h = g.matmul(pass, w1);
    let h = g.add_row(h, b1);
    let h = g.tanh(h);
    let w2 = g.param(store, &name("w2"));
    let b2 = g.param(store, &name("b2"));
    let h = g.matmul(h, w2);
    let h = g.add_row(h, b2);
    let h = g.tanh(h);
    let w3 = g.param(store, &name("w3"));
    let b3 = g.param(store, &name("b3"));
    let out = g.matmul(h, w3);
    let out = g.add_row(out, b3);
    let out = g.clamp(out, -SHIFT_CLAMP, SHIFT_CLAMP);
    g.quantize_lattice(out, LATTICE_EXP)
}

fn halves(g: &mut Graph, z: NodeId, latent_dim: usize) -> (NodeId, NodeId) {
    let half = latent_dim / 2;
    (g.slice_cols(z, 0, half), g.slice_cols(z, half, latent_dim))
}

pub(crate) fn phi_forward_graph(
    g: &mut Graph,
    store: &ParamStore,
    layers: usize,
    latent_dim: usize,
    z: NodeId,
) -> NodeId {
    let mut v = z;
    for layer in 0..layers {
        let (lo, hi) = halves(g, v, latent_dim);
        let (pass, shifted) = if layer % 2 == 0 { (lo, hi) } else { (hi, lo) };
        let s = shift_graph(g, store, layer, pass);
        let moved = g.add(shifted, s);
        v = if layer % 2 == 0 { g.concat_cols(pass, moved) } else { g.concat_cols(moved, pass) };
    }
    v
}

pub(crate) fn phi_inverse_graph(
    g: &mut Graph,
    store: &ParamStore,
    layers: usize,
    latent_dim: usize,
    m: NodeId,
) -> NodeId {
    let mut v = m;
    for layer in (0..layers).rev() {
        let (lo, hi) = halves(g, v, latent_dim);
        let (pass, shifted) = if layer % 2 == 0 { (lo, hi) } else { (hi, lo) };
        let s = shift_graph(g, store, layer, pass);
        let moved = g.sub(shifted, s);
        v = if layer % 2 == 0 { g.concat_cols(pass, moved) } else { g.concat_cols(moved, pass) };
    }
    v
}

/// Latent operations expressed as graph builders, for the trainable model
/// kinds.
pub(crate) enum GraphOps<'a> {
    Coupling { store: &'a ParamStore, pair: MirroredPair, layers: usize, latent_dim: usize },
    Baseline { store: &'a ParamStore, kind: BaselineKind },
}

impl GraphOps<'_> {
    fn apply(&self, g: &mut Graph, symbol: &OperationSymbol, a: NodeId, b: NodeId) -> NodeId {
        match self {
            GraphOps::Coupling { store, pair, layers, latent_dim } => {
                let op = if symbol.is_meet() { pair.meet() } else { pair.join() };
                let m1 = phi_forward_graph(g, store, *layers, *latent_dim, a);
                let m2 = phi_forward_graph(g, store, *layers, *latent_dim, b);
                let m = candidate_op_graph(g, op, m1, m2);
                phi_inverse_graph(g, store, *layers, *latent_dim, m)
            }
            GraphOps::Baseline { store, kind } => {
                baseline_apply_graph(g, store, *kind, symbol, a, b)
            }
        }
    }

    fn term_node(&self, g: &mut Graph, term: &Term, leaves: &[NodeId]) -> NodeId {
        match term {
            Term::Variable(i) => leaves[i - 1],
            Term::Apply(sym, children) => {
                assert_eq!(children.len(), 2);
                let a = self.term_node(g, &children[0], leaves);
                let b = self.term_node(g, &children[1], leaves);
                self.apply(g, sym, a, b)
            }
        }
    }
}

/// Mean BCE of the decoded prediction for one instance.
pub(crate) fn instance_loss(
    g: &mut Graph,
    ops: &GraphOps<'_>,
    embed_store: &ParamStore,
    latents: &[LatentVector],
    instance: &TermInstance,
) -> NodeId {
    let l = latents[0].len();
    let leaves: Vec<NodeId> = instance
        .set_indices
        .iter()
        .map(|&idx| {
            g.constant(Array2::from_shape_vec((1, l), latents[idx].clone()).unwrap())
        })
        .collect();
    let z_pred = ops.term_node(g, &instance.term, &leaves);

    let p = instance.points.len();
    let ones = g.constant(Array2::ones((p, 1)));
    let z_rep = g.matmul(ones, z_pred);
    let mut coords = Vec::with_capacity(p * 2);
    for u in &instance.points {
        coords.push(u[0]);
        coords.push(u[1]);
    }
    let points = g.constant(Array2::from_shape_vec((p, 2), coords).unwrap());
    let dec_in = g.concat_cols(points, z_rep);
    let logits = decoder_forward(g, embed_store, dec_in);
    let targets =
        g.constant(Array2::from_shape_vec((p, 1), instance.targets.clone()).unwrap());
    g.bce_with_logits_mean(logits, targets)
}

/// Mean loss over a slice of instances, as one graph node.
fn batch_loss(
    g: &mut Graph,
    ops: &GraphOps<'_>,
    embed_store: &ParamStore,
    latents: &[LatentVector],
    instances: &[TermInstance],
) -> NodeId {
    let mut total: Option<NodeId> = None;
    for instance in instances {
        let li = instance_loss(g, ops, embed_store, latents, instance);
        total = Some(match total {
            None => li,
            Some(t) => g.add(t, li),
        });
    }
    let t = total.expect("nonempty batch");
    g.scale(t, 1.0 / instances.len() as f64)
}

enum Trainee {
    Coupling(TransportModel),
    Baseline(DirectBaseline),
}

impl Trainee {
    fn graph_ops(&self) -> GraphOps<'_> {
        match self {
            Trainee::Coupling(m) => GraphOps::Coupling {
                store: m.params(),
                pair: m.pair(),
                layers: m.layers(),
                latent_dim: m.latent_dim(),
            },
            Trainee::Baseline(b) => {
                GraphOps::Baseline { store: b.params(), kind: b.kind() }
            }
        }
    }

    fn params_mut(&mut self) -> &mut ParamStore {
        match self {
            Trainee::Coupling(m) => m.params_mut(),
            Trainee::Baseline(b) => b.params_mut(),
        }
    }

    fn params(&self) -> &ParamStore {
        match self {
            Trainee::Coupling(m) => m.params(),
            Trainee::Baseline(b) => b.params(),
        }
    }

    fn grad_prefix(&self) -> &'static str {
        match self {
            Trainee::Coupling(_) => "phi.",
            Trainee::Baseline(_) => "bl.",
        }
    }
}

const BATCH_STREAM: u64 = 10;
const VAL_STREAM: u64 = 11;

fn run_training(
    embed: &EmbedModel,
    dataset: &Dataset,
    latents: &[LatentVector],
    config: &TransportConfig,
    seed: u64,
    trainee: &mut Trainee,
) -> Result<TrainReport, TrainError> {
    assert_eq!(latents.len(), dataset.len(), "need one latent per record");
    let train_idx = dataset.split_indices(Split::Train);
    let val_idx = dataset.split_indices(Split::Val);
    let steps_per_epoch = (train_idx.len() / config.batch_terms).max(1);

    // Validation instances are fixed for the whole run.
    let val_instances: Vec<TermInstance> = (0..config.val_instances)
        .map(|v| {
            let mut rng = SeedRng::derived(seed, &[VAL_STREAM, v as u64]);
            sample_instance(dataset, &val_idx, config.ell_max, config.points_per_term, &mut rng)
        })
        .collect();

    let adam = AdamConfig::new(config.lr).with_weight_decay(config.weight_decay);
    let mut report = TrainReport {
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        best_epoch: 0,
        best_val: f64::INFINITY,
    };
    let mut best_params = trainee.params().snapshot();

    for epoch in 0..config.epochs {
        let mut epoch_loss = 0.0;
        for step in 0..steps_per_epoch {
            let mut rng = SeedRng::derived(seed, &[BATCH_STREAM, epoch as u64, step as u64]);
            let instances: Vec<TermInstance> = (0..config.batch_terms)
                .map(|_| {
                    sample_instance(
                        dataset,
                        &train_idx,
                        config.ell_max,
                        config.points_per_term,
                        &mut rng,
                    )
                })
                .collect();
            let grads = {
                let mut g = Graph::new();
                let loss =
                    batch_loss(&mut g, &trainee.graph_ops(), embed.params(), latents, &instances);
                let value = g.scalar(loss);
                if !value.is_finite() {
                    return Err(TrainError::Diverged { epoch, step, loss: value });
                }
                epoch_loss += value;
                let mut grads = g.backward(loss);
                grads.retain(|name, _| name.starts_with(trainee.grad_prefix()));
                grads
            };
            trainee.params_mut().adam_step(&grads, &adam);
        }
        report.train_loss.push(epoch_loss / steps_per_epoch as f64);

        let mut val_total = 0.0;
        for chunk in val_instances.chunks(config.batch_terms) {
            let mut g = Graph::new();
            let loss =
                batch_loss(&mut g, &trainee.graph_ops(), embed.params(), latents, chunk);
            val_total += g.scalar(loss) * chunk.len() as f64;
        }
        let val = val_total / val_instances.len() as f64;
        if !val.is_finite() {
            return Err(TrainError::Diverged { epoch, step: usize::MAX, loss: val });
        }
        report.val_loss.push(val);
        if val < report.best_val {
            report.best_val = val;
            report.best_epoch = epoch;
            best_params = trainee.params().snapshot();
        }
    }

    trainee.params_mut().restore(&best_params);
    Ok(report)
}

/// Trains the coupling map for one mirrored pair against a frozen embedding
/// model and its precomputed latents. Only `phi.*` parameters are updated.
pub fn train_transport(
    embed: &EmbedModel,
    dataset: &Dataset,
    latents: &[LatentVector],
    pair: MirroredPair,
    config: &TransportConfig,
    seed: u64,
) -> Result<(TransportModel, TrainReport), TrainError> {
    let model = TransportModel::new(pair, embed.arch().latent_dim, seed);
    let mut trainee = Trainee::Coupling(model);
    let report = run_training(embed, dataset, latents, config, seed, &mut trainee)?;
    match trainee {
        Trainee::Coupling(model) => Ok((model, report)),
        Trainee::Baseline(_) => unreachable!(),
    }
}

/// Trains a direct baseline with the same harness; only `bl.*` parameters
/// are updated.
pub fn train_baseline(
    embed: &EmbedModel,
    dataset: &Dataset,
    latents: &[LatentVector],
    kind: BaselineKind,
    config: &TransportConfig,
    seed: u64,
) -> Result<(DirectBaseline, TrainReport), TrainError> {
    let model = DirectBaseline::new(kind, embed.arch().latent_dim, seed);
    let mut trainee = Trainee::Baseline(model);
    let report = run_training(embed, dataset, latents, config, seed, &mut trainee)?;
    match trainee {
        Trainee::Baseline(model) => Ok((model, report)),
        Trainee::Coupling(_) => unreachable!(),
    }
}

/// One store holding both the frozen decoder parameters and the trainee's
/// own, so a finite-difference pass can perturb everything the loss reads.
fn merged_store(embed: &EmbedModel, params: &ParamStore) -> ParamStore {
    let mut merged = ParamStore::new();
    for (name, value) in embed.params().snapshot() {
        merged.insert(&name, value);
    }
    for (name, value) in params.snapshot() {
        merged.insert(&name, value);
    }
    merged
}

fn diagnostic_instances(dataset: &Dataset, seed: u64) -> (Vec<TermInstance>, SeedRng) {
    let mut rng = SeedRng::derived(seed, &[9]);
    let train_idx = dataset.split_indices(Split::Train);
    let instances = (0..2)
        .map(|_| sample_instance(dataset, &train_idx, 3, 8, &mut rng))
        .collect();
    (instances, rng)
}

/// Finite-difference audit of the coupling training loss on a freshly
/// initialized model: two small term instances, gradients taken jointly
/// through the coupling layers and the decoder. Returns the worst relative
/// disagreement over `samples` randomly chosen parameter entries.
pub fn transport_grad_check(
    embed: &EmbedModel,
    dataset: &Dataset,
    latents: &[LatentVector],
    pair: MirroredPair,
    samples: usize,
    seed: u64,
) -> f64 {
    let model = TransportModel::new(pair, embed.arch().latent_dim, seed);
    let (instances, mut rng) = diagnostic_instances(dataset, seed);
    let merged = merged_store(embed, model.params());
    let (layers, latent_dim) = (model.layers(), model.latent_dim());
    grad_check(
        |g, store| {
            let ops = GraphOps::Coupling { store, pair: model.pair(), layers, latent_dim };
            batch_loss(g, &ops, store, latents, &instances)
        },
        &merged,
        1e-5,
        samples,
        &mut rng,
    )
}

/// Same audit for a direct baseline's training loss.
pub fn baseline_grad_check(
    embed: &EmbedModel,
    dataset: &Dataset,
    latents: &[LatentVector],
    kind: BaselineKind,
    samples: usize,
    seed: u64,
) -> f64 {
    let model = DirectBaseline::new(kind, embed.arch().latent_dim, seed);
    let (instances, mut rng) = diagnostic_instances(dataset, seed);
    let merged = merged_store(embed, model.params());
    grad_check(
        |g, store| {
            let ops = GraphOps::Baseline { store, kind };
            batch_loss(g, &ops, store, latents, &instances)
        },
        &merged,
        1e-5,
        samples,
        &mut rng,
    )
}
