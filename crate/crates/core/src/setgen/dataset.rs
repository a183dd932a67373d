//! Seeded dataset of set specifications with precomputed occupancy grids,
//! plus its binary file format.
//!
//! Records are generated independently, each from a stream derived from the
//! dataset seed and the record index, so generation parallelizes and any
//! record can be regenerated in isolation. Splits are fixed index blocks:
//! the first 80% of records train, the next 10% validate, the rest test.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::ops::Range;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rayon::prelude::*;
use thiserror::Error;

use super::{rasterize, sample_set_spec, Grid, Point, SetSpec};
use crate::rng::SeedRng;

const MAGIC: &[u8; 4] = b"STDS";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetIoError {
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a dataset file (bad magic)")]
    BadMagic,
    #[error("unsupported dataset format version {0}")]
    BadVersion(u32),
    #[error("malformed record {index}: {reason}")]
    BadRecord { index: usize, reason: String },
}

/// Fixed index-block split of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// Generated corpus of planar sets, each stored as its anchor spec plus the
/// occupancy grid rasterized at the dataset resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    resolution: u32,
    seed: u64,
    specs: Vec<SetSpec>,
    grids: Vec<Grid>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self, index: usize) -> &SetSpec {
        &self.specs[index]
    }

    pub fn grid(&self, index: usize) -> &Grid {
        &self.grids[index]
    }

    pub fn specs(&self) -> &[SetSpec] {
        &self.specs
    }

    pub fn grids(&self) -> &[Grid] {
        &self.grids
    }

    /// Index range of a split: 80% train, 10% val, 10% test, in file order.
    /// Boundaries round down, so every split is nonempty from 10 records up.
    pub fn split_range(&self, split: Split) -> Range<usize> {
        split_range(self.len(), split)
    }

    /// Record indices of a split.
    pub fn split_indices(&self, split: Split) -> Vec<usize> {
        self.split_range(split).collect()
    }

    pub fn save(&self, path: &Path) -> Result<(), DatasetIoError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(FORMAT_VERSION)?;
        w.write_u32::<LittleEndian>(self.len() as u32)?;
        w.write_u32::<LittleEndian>(self.resolution)?;
        w.write_u64::<LittleEndian>(self.seed)?;
        for (spec, grid) in self.specs.iter().zip(&self.grids) {
            w.write_u8(spec.inside.len() as u8)?;
            w.write_u8(spec.outside.len() as u8)?;
            for p in spec.inside.iter().chain(&spec.outside) {
                w.write_f64::<LittleEndian>(p[0])?;
                w.write_f64::<LittleEndian>(p[1])?;
            }
            write_grid_bits(&mut w, grid)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, DatasetIoError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(DatasetIoError::BadMagic);
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != FORMAT_VERSION {
            return Err(DatasetIoError::BadVersion(version));
        }
        let count = r.read_u32::<LittleEndian>()? as usize;
        let resolution = r.read_u32::<LittleEndian>()?;
        if resolution < 2 {
            return Err(DatasetIoError::BadRecord {
                index: 0,
                reason: format!("resolution {resolution} below minimum"),
            });
        }
        let seed = r.read_u64::<LittleEndian>()?;
        let mut specs = Vec::with_capacity(count);
        let mut grids = Vec::with_capacity(count);
        for index in 0..count {
            let n_i = r.read_u8()? as usize;
            let n_o = r.read_u8()? as usize;
            if !(1..=10).contains(&n_i) || !(1..=10).contains(&n_o) {
                return Err(DatasetIoError::BadRecord {
                    index,
                    reason: format!("anchor counts {n_i}/{n_o} outside 1..=10"),
                });
            }
            let mut read_points = |n: usize| -> Result<Vec<Point>, DatasetIoError> {
                (0..n)
                    .map(|_| {
                        let x = r.read_f64::<LittleEndian>()?;
                        let y = r.read_f64::<LittleEndian>()?;
                        if !x.is_finite() || !y.is_finite() {
                            return Err(DatasetIoError::BadRecord {
                                index,
                                reason: "non-finite anchor coordinate".into(),
                            });
                        }
                        Ok([x, y])
                    })
                    .collect()
            };
            let inside = read_points(n_i)?;
            let outside = read_points(n_o)?;
            specs.push(SetSpec { inside, outside });
            grids.push(read_grid_bits(&mut r, resolution)?);
        }
        Ok(Dataset { resolution, seed, specs, grids })
    }
}

fn split_range(n: usize, split: Split) -> Range<usize> {
    let train_end = n * 8 / 10;
    let val_end = n * 9 / 10;
    match split {
        Split::Train => 0..train_end,
        Split::Val => train_end..val_end,
        Split::Test => val_end..n,
    }
}

/// Grid rows bit-packed least-significant-bit first, each row padded to a
/// whole byte; padding bits are written as zero.
fn write_grid_bits<W: Write>(w: &mut W, grid: &Grid) -> Result<(), DatasetIoError> {
    let r = grid.resolution() as usize;
    let row_bytes = r.div_ceil(8);
    for row in 0..r {
        let mut packed = vec![0u8; row_bytes];
        for col in 0..r {
            if grid.cell(row, col) {
                packed[col / 8] |= 1 << (col % 8);
            }
        }
        w.write_all(&packed)?;
    }
    Ok(())
}

fn read_grid_bits<R: Read>(r: &mut R, resolution: u32) -> Result<Grid, DatasetIoError> {
    let res = resolution as usize;
    let row_bytes = res.div_ceil(8);
    let mut cells = Vec::with_capacity(res * res);
    let mut packed = vec![0u8; row_bytes];
    for _ in 0..res {
        r.read_exact(&mut packed)?;
        for col in 0..res {
            cells.push(packed[col / 8] & (1 << (col % 8)) != 0);
        }
    }
    Ok(Grid::from_cells(resolution, cells))
}

/// Record stream tag; each record draws from `derive(seed, [RECORD_STREAM, index])`.
const RECORD_STREAM: u64 = 0x5354_4453;

/// Generates `n` records (at least 10, so every split is nonempty) at the
/// given grid resolution. Same arguments, same dataset, bit for bit.
pub fn gen_dataset(n: usize, resolution: u32, seed: u64) -> Dataset {
    assert!(n >= 10, "need at least 10 records for nonempty splits, got {n}");
    assert!(resolution >= 2);
    let records: Vec<(SetSpec, Grid)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeedRng::derived(seed, &[RECORD_STREAM, i as u64]);
            let spec = sample_set_spec(&mut rng);
            let grid = rasterize(&spec, resolution);
            (spec, grid)
        })
        .collect();
    let (specs, grids) = records.into_iter().unzip();
    Dataset { resolution, seed, specs, grids }
}
