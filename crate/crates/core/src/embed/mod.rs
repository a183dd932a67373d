//! Occupancy-grid autoencoder: a dense encoder from flattened grids to latent
//! vectors and a coordinate decoder from (point, latent) pairs to membership
//! logits.
//!
//! Latent vectors are snapped to the dyadic lattice of spacing 2^-40 and
//! clamped to a fixed box. Downstream latent-space operations rely on this:
//! lattice points with bounded magnitude add and subtract exactly in f64, so
//! coupling-based maps over these latents can invert bit for bit.

mod train;

pub use train::{
    heldout_cell_agreement, reconstruction_grad_check, train_autoencoder, EmbedConfig,
    TrainError, TrainReport,
};

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;
use thiserror::Error;

use crate::diffcore::{Graph, NodeId, ParamStore};
use crate::rng::SeedRng;
use crate::setgen::{Dataset, Grid, Point};

/// Latent lattice spacing is 2^LATTICE_EXP.
pub const LATTICE_EXP: i32 = -40;

/// Encoder outputs are clamped to [-LATENT_CLAMP, LATENT_CLAMP] before
/// snapping to the lattice. Multiples of 2^-40 stay exact under f64 addition
/// while magnitudes remain below 2^52 · 2^-40 = 4096; the clamp keeps latent
/// arithmetic far inside that budget.
pub const LATENT_CLAMP: f64 = 64.0;

/// Latent embedding of one set.
pub type LatentVector = Vec<f64>;

/// Network dimensions, fixed at construction and stored with the weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedArch {
    pub resolution: u32,
    pub latent_dim: usize,
    pub enc_hidden: [usize; 2],
    pub dec_hidden: [usize; 2],
}

impl EmbedArch {
    /// Desk-scale default: 32x32 grids into 64 latent dimensions.
    pub fn desk(resolution: u32, latent_dim: usize) -> Self {
        EmbedArch { resolution, latent_dim, enc_hidden: [256, 128], dec_hidden: [128, 128] }
    }

    pub fn grid_cells(&self) -> usize {
        (self.resolution as usize).pow(2)
    }

    fn param_dims(&self) -> Vec<(&'static str, usize, usize)> {
        let cells = self.grid_cells();
        let [e1, e2] = self.enc_hidden;
        let [d1, d2] = self.dec_hidden;
        let l = self.latent_dim;
        vec![
            ("enc.w1", cells, e1),
            ("enc.w2", e1, e2),
            ("enc.w3", e2, l),
            ("dec.w1", 2 + l, d1),
            ("dec.w2", d1, d2),
            ("dec.w3", d2, 1),
        ]
    }
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error(transparent)]
    Params(#[from] crate::diffcore::ParamIoError),
    #[error("missing or malformed architecture header")]
    BadHeader,
}

/// Encoder/decoder parameter bundle.
#[derive(Debug, Clone)]
pub struct EmbedModel {
    arch: EmbedArch,
    params: ParamStore,
}

impl EmbedModel {
    /// Fresh model with uniformly initialized affine weights and zero biases.
    pub fn new(arch: EmbedArch, seed: u64) -> Self {
        assert!(arch.latent_dim > 0 && arch.resolution >= 2);
        let mut params = ParamStore::new();
        let mut rng = SeedRng::derived(seed, &[0x454d_4245]);
        for (name, fan_in, fan_out) in arch.param_dims() {
            params.init_affine(name, fan_in, fan_out, &mut rng);
        }
        for (name, _, fan_out) in arch.param_dims() {
            params.init_zeros(&name.replace('w', "b"), 1, fan_out);
        }
        EmbedModel { arch, params }
    }

    pub fn arch(&self) -> &EmbedArch {
        &self.arch
    }

    pub fn params(&self) -> &ParamStore {
        &self.params
    }

    pub(crate) fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }

    /// Encodes one grid to a lattice-quantized latent vector.
    pub fn encode(&self, grid: &Grid) -> LatentVector {
        assert_eq!(grid.resolution(), self.arch.resolution, "grid resolution mismatch");
        let x = Array2::from_shape_vec((1, self.arch.grid_cells()), grid_sign_row(grid))
            .expect("shape fixed by arch");
        let mut g = Graph::new();
        let input = g.constant(x);
        let z = encoder_forward(&mut g, &self.params, input);
        g.value(z).row(0).to_vec()
    }

    /// Encodes every record of a dataset, in order. Each record is encoded
    /// independently, so the result is identical however the work is split.
    pub fn encode_dataset(&self, dataset: &Dataset) -> Vec<LatentVector> {
        use rayon::prelude::*;
        (0..dataset.len())
            .into_par_iter()
            .map(|i| self.encode(dataset.grid(i)))
            .collect()
    }

    /// Membership logits for a batch of points against one latent vector.
    pub fn decode_logits(&self, points: &[Point], z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.arch.latent_dim, "latent dimension mismatch");
        let l = z.len();
        let mut rows = Vec::with_capacity(points.len() * (2 + l));
        for p in points {
            rows.push(p[0]);
            rows.push(p[1]);
            rows.extend_from_slice(z);
        }
        let input = Array2::from_shape_vec((points.len(), 2 + l), rows).expect("row layout");
        let mut g = Graph::new();
        let input = g.constant(input);
        let logits = decoder_forward(&mut g, &self.params, input);
        g.value(logits).column(0).to_vec()
    }

    /// Membership logit for one point: positive means inside.
    pub fn decode_point(&self, u: Point, z: &[f64]) -> f64 {
        self.decode_logits(&[u], z)[0]
    }

    /// Thresholded membership (logit >= 0) for a batch of points.
    pub fn predicted_set_membership(&self, points: &[Point], z: &[f64]) -> Vec<bool> {
        self.decode_logits(points, z).into_iter().map(|s| s >= 0.0).collect()
    }

    /// Writes weights plus an architecture header record.
    pub fn save(&self, path: &Path) -> Result<(), ModelIoError> {
        let mut with_header = self.params.clone();
        let [e1, e2] = self.arch.enc_hidden;
        let [d1, d2] = self.arch.dec_hidden;
        let header = vec![
            self.arch.resolution as f64,
            self.arch.latent_dim as f64,
            e1 as f64,
            e2 as f64,
            d1 as f64,
            d2 as f64,
        ];
        with_header.insert("meta.arch", Array2::from_shape_vec((1, 6), header).unwrap());
        with_header.save(path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelIoError> {
        let loaded = ParamStore::load(path)?;
        let header = loaded.get("meta.arch").ok_or(ModelIoError::BadHeader)?;
        if header.len() != 6 {
            return Err(ModelIoError::BadHeader);
        }
        let h: Vec<usize> = header.iter().map(|&v| v as usize).collect();
        let arch = EmbedArch {
            resolution: h[0] as u32,
            latent_dim: h[1],
            enc_hidden: [h[2], h[3]],
            dec_hidden: [h[4], h[5]],
        };
        let mut params = ParamStore::new();
        let names: Vec<String> = loaded.names().map(str::to_string).collect();
        for name in names {
            if name != "meta.arch" {
                params.insert(&name, loaded.get(&name).unwrap().clone());
            }
        }
        for (name, fan_in, fan_out) in arch.param_dims() {
            let w = params.get(name).ok_or(ModelIoError::BadHeader)?;
            if w.dim() != (fan_in, fan_out) {
                return Err(ModelIoError::BadHeader);
            }
        }
        Ok(EmbedModel { arch, params })
    }
}

/// Flattens a grid row-major, mapping cells {0,1} to {-1,+1}.
pub(crate) fn grid_sign_row(grid: &Grid) -> Vec<f64> {
    grid.cells().iter().map(|&c| if c { 1.0 } else { -1.0 }).collect()
}

/// Encoder forward pass on a batch of sign-mapped grids (rows). Output is the
/// clamped, lattice-quantized latent batch.
pub(crate) fn encoder_forward(g: &mut Graph, store: &ParamStore, x: NodeId) -> NodeId {
    let mut h = x;
    for (w, b) in [("enc.w1", "enc.b1"), ("enc.w2", "enc.b2")] {
        let w = g.param(store, w);
        let b = g.param(store, b);
        let affine = g.matmul(h, w);
        let affine = g.add_row(affine, b);
        h = g.relu(affine);
    }
    let w3 = g.param(store, "enc.w3");
    let b3 = g.param(store, "enc.b3");
    let z = g.matmul(h, w3);
    let z = g.add_row(z, b3);
    let z = g.clamp(z, -LATENT_CLAMP, LATENT_CLAMP);
    g.quantize_lattice(z, LATTICE_EXP)
}

/// Decoder forward pass: rows are [x, y, z_1..z_l]; output is one logit per row.
pub(crate) fn decoder_forward(g: &mut Graph, store: &ParamStore, input: NodeId) -> NodeId {
    let mut h = input;
    for (w, b) in [("dec.w1", "dec.b1"), ("dec.w2", "dec.b2")] {
        let w = g.param(store, w);
        let b = g.param(store, b);
        let affine = g.matmul(h, w);
        let affine = g.add_row(affine, b);
        h = g.relu(affine);
    }
    let w3 = g.param(store, "dec.w3");
    let b3 = g.param(store, "dec.b3");
    let out = g.matmul(h, w3);
    g.add_row(out, b3)
}

const LATENT_MAGIC: &[u8; 4] = b"STLZ";

#[derive(Debug, Error)]
pub enum LatentIoError {
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a latent file (bad magic)")]
    BadMagic,
    #[error("inconsistent latent dimensions")]
    BadShape,
}

/// Writes latents in dataset order: magic, count, dimension, then packed f64s.
pub fn save_latents(path: &Path, latents: &[LatentVector]) -> Result<(), LatentIoError> {
    let dim = latents.first().map_or(0, Vec::len);
    if latents.iter().any(|z| z.len() != dim) {
        return Err(LatentIoError::BadShape);
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(LATENT_MAGIC)?;
    w.write_u32::<LittleEndian>(latents.len() as u32)?;
    w.write_u32::<LittleEndian>(dim as u32)?;
    for z in latents {
        for &v in z {
            w.write_f64::<LittleEndian>(v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_latents(path: &Path) -> Result<Vec<LatentVector>, LatentIoError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != LATENT_MAGIC {
        return Err(LatentIoError::BadMagic);
    }
    let count = r.read_u32::<LittleEndian>()? as usize;
    let dim = r.read_u32::<LittleEndian>()? as usize;
    let mut latents = Vec::with_capacity(count);
    for _ in 0..count {
        let mut z = Vec::with_capacity(dim);
        for _ in 0..dim {
            z.push(r.read_f64::<LittleEndian>()?);
        }
        latents.push(z);
    }
    Ok(latents)
}
