//! Named parameter arrays, the Adam optimizer, and binary persistence.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;
use thiserror::Error;

use crate::rng::SeedRng;

const MAGIC: &[u8; 4] = b"STNW";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ParamIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a parameter file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    BadVersion(u32),
    #[error("array `{name}` has malformed shape")]
    BadShape { name: String },
}

/// Adam hyperparameters. Weight decay is decoupled: applied directly to the
/// parameter, not mixed into the moment estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl AdamConfig {
    pub fn new(lr: f64) -> Self {
        assert!(lr > 0.0);
        AdamConfig { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, weight_decay: 0.0 }
    }

    pub fn with_weight_decay(mut self, wd: f64) -> Self {
        self.weight_decay = wd;
        self
    }
}

/// Named parameter arrays plus optimizer state.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    arrays: BTreeMap<String, Array2<f64>>,
    adam_m: BTreeMap<String, Array2<f64>>,
    adam_v: BTreeMap<String, Array2<f64>>,
    step: u64,
}

impl ParamStore {
    pub fn new() -> Self {
        ParamStore::default()
    }

    pub fn insert(&mut self, name: &str, value: Array2<f64>) {
        self.arrays.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Array2<f64>> {
        self.arrays.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Array2<f64>> {
        self.arrays.get_mut(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.arrays.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.arrays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrays.is_empty()
    }

    /// Total number of scalar coordinates.
    pub fn coordinate_count(&self) -> usize {
        self.arrays.values().map(|a| a.len()).sum()
    }

    /// Affine weight initialized uniformly in ±1/√fan_in, for y = x·W with
    /// W of shape fan_in×fan_out.
    pub fn init_affine(&mut self, name: &str, fan_in: usize, fan_out: usize, rng: &mut SeedRng) {
        let bound = 1.0 / (fan_in as f64).sqrt();
        let w = Array2::from_shape_fn((fan_in, fan_out), |_| {
            (rng.uniform_f64() * 2.0 - 1.0) * bound
        });
        self.insert(name, w);
    }

    /// Zero array, used for biases and identity-start layers.
    pub fn init_zeros(&mut self, name: &str, rows: usize, cols: usize) {
        self.insert(name, Array2::zeros((rows, cols)));
    }

    /// Copy of the parameter arrays only (no optimizer state).
    pub fn snapshot(&self) -> BTreeMap<String, Array2<f64>> {
        self.arrays.clone()
    }

    /// Restores arrays from a snapshot, leaving optimizer state untouched.
    pub fn restore(&mut self, snapshot: &BTreeMap<String, Array2<f64>>) {
        for (name, value) in snapshot {
            self.arrays.insert(name.clone(), value.clone());
        }
    }

    /// One Adam update. Parameters absent from `grads` keep their value and
    /// state. The shared step counter advances once per call.
    pub fn adam_step(&mut self, grads: &BTreeMap<String, Array2<f64>>, cfg: &AdamConfig) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);
        for (name, g) in grads {
            let theta = self
                .arrays
                .get_mut(name)
                .unwrap_or_else(|| panic!("gradient for unknown parameter `{name}`"));
            assert_eq!(theta.dim(), g.dim(), "gradient shape mismatch for `{name}`");
            let m = self
                .adam_m
                .entry(name.clone())
                .or_insert_with(|| Array2::zeros(theta.dim()));
            let v = self
                .adam_v
                .entry(name.clone())
                .or_insert_with(|| Array2::zeros(theta.dim()));
            for ((mi, vi), (ti, gi)) in
                m.iter_mut().zip(v.iter_mut()).zip(theta.iter_mut().zip(g.iter()))
            {
                *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * gi;
                *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * gi * gi;
                let m_hat = *mi / bc1;
                let v_hat = *vi / bc2;
                *ti -= cfg.lr * (m_hat / (v_hat.sqrt() + cfg.eps) + cfg.weight_decay * *ti);
            }
        }
    }

    /// Writes all arrays in name order: magic, version, count, then per array
    /// the name, rank, dims, and little-endian f64 payload in row-major
    /// order. Loading the file back yields byte-identical arrays.
    pub fn save(&self, path: &Path) -> Result<(), ParamIoError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(FORMAT_VERSION)?;
        w.write_u32::<LittleEndian>(self.arrays.len() as u32)?;
        for (name, arr) in &self.arrays {
            w.write_u32::<LittleEndian>(name.len() as u32)?;
            w.write_all(name.as_bytes())?;
            w.write_u32::<LittleEndian>(2)?;
            w.write_u32::<LittleEndian>(arr.nrows() as u32)?;
            w.write_u32::<LittleEndian>(arr.ncols() as u32)?;
            for &x in arr.as_standard_layout().iter() {
                w.write_f64::<LittleEndian>(x)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a parameter file; optimizer state starts fresh.
    pub fn load(path: &Path) -> Result<Self, ParamIoError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(ParamIoError::BadMagic);
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != FORMAT_VERSION {
            return Err(ParamIoError::BadVersion(version));
        }
        let count = r.read_u32::<LittleEndian>()?;
        let mut store = ParamStore::new();
        for _ in 0..count {
            let name_len = r.read_u32::<LittleEndian>()? as usize;
            let mut name_bytes = vec![0u8; name_len];
            r.read_exact(&mut name_bytes)?;
            let name = String::from_utf8(name_bytes)
                .map_err(|_| ParamIoError::BadShape { name: "<invalid utf-8>".into() })?;
            let rank = r.read_u32::<LittleEndian>()?;
            let mut dims = Vec::with_capacity(rank as usize);
            for _ in 0..rank {
                dims.push(r.read_u32::<LittleEndian>()? as usize);
            }
            let (rows, cols) = match dims.as_slice() {
                [n] => (1, *n),
                [r, c] => (*r, *c),
                _ => return Err(ParamIoError::BadShape { name }),
            };
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows * cols {
                data.push(r.read_f64::<LittleEndian>()?);
            }
            let arr = Array2::from_shape_vec((rows, cols), data)
                .map_err(|_| ParamIoError::BadShape { name: name.clone() })?;
            store.insert(&name, arr);
        }
        Ok(store)
    }
}
