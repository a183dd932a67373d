//! Planar set generation on the square [-1, 1]^2.
//!
//! A set is specified by labeled anchor points: a location belongs to the set
//! when it is at least as close to the nearest inside anchor as to the nearest
//! outside anchor. This gives closed regions with piecewise-linear boundaries
//! (unions of Voronoi-style cells) that are cheap to evaluate exactly at any
//! point, rasterize onto occupancy grids, and combine with set intersection
//! and union.

mod dataset;

pub use dataset::{gen_dataset, Dataset, DatasetIoError, Split};

use crate::algebra::{eval_term, EvalError, PairRealization, Term};
use crate::rng::SeedRng;

/// Point in the square, `[x, y]`.
pub type Point = [f64; 2];

/// Anchor-point description of one planar set.
///
/// Both anchor lists hold between 1 and 10 points with coordinates in
/// [-1, 1]; [`sample_set_spec`] and the dataset loader enforce this.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSpec {
    pub inside: Vec<Point>,
    pub outside: Vec<Point>,
}

impl SetSpec {
    pub fn new(inside: Vec<Point>, outside: Vec<Point>) -> Self {
        assert!(
            (1..=10).contains(&inside.len()) && (1..=10).contains(&outside.len()),
            "anchor counts must lie in 1..=10, got {} inside / {} outside",
            inside.len(),
            outside.len()
        );
        SetSpec { inside, outside }
    }
}

fn min_sq_dist(anchors: &[Point], u: Point) -> f64 {
    anchors
        .iter()
        .map(|p| {
            let dx = p[0] - u[0];
            let dy = p[1] - u[1];
            dx * dx + dy * dy
        })
        .fold(f64::INFINITY, f64::min)
}

/// Exact membership test: `u` is in the set when its nearest inside anchor is
/// no farther than its nearest outside anchor. Ties count as inside, so a
/// spec whose anchor lists coincide describes the full square. Squared
/// distances are compared, which orders identically and avoids the square
/// root.
pub fn indicator(spec: &SetSpec, u: Point) -> bool {
    min_sq_dist(&spec.inside, u) <= min_sq_dist(&spec.outside, u)
}

/// Samples anchor counts uniformly from {1, ..., 10} and anchor coordinates
/// uniformly from [-1, 1]. Draw order is fixed: inside count, outside count,
/// inside points, outside points, each point x before y.
pub fn sample_set_spec(rng: &mut SeedRng) -> SetSpec {
    let n_i = rng.uniform_inclusive(1, 10);
    let n_o = rng.uniform_inclusive(1, 10);
    let draw_points = |n: usize, rng: &mut SeedRng| {
        (0..n)
            .map(|_| [rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)])
            .collect::<Vec<Point>>()
    };
    let inside = draw_points(n_i, rng);
    let outside = draw_points(n_o, rng);
    SetSpec { inside, outside }
}

/// Square boolean occupancy grid over [-1, 1]^2.
///
/// Cells are stored row-major with row 0 at the bottom of the square: cell
/// (row, col) is centered at `(-1 + (2 col + 1)/r, -1 + (2 row + 1)/r)` for
/// resolution `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    resolution: u32,
    cells: Vec<bool>,
}

impl Grid {
    pub fn new_empty(resolution: u32) -> Self {
        assert!(resolution >= 2, "grid resolution must be at least 2, got {resolution}");
        let r = resolution as usize;
        Grid { resolution, cells: vec![false; r * r] }
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Row-major cells, `resolution^2` of them.
    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> bool {
        let r = self.resolution as usize;
        assert!(row < r && col < r);
        self.cells[row * r + col]
    }

    pub fn set_cell(&mut self, row: usize, col: usize, value: bool) {
        let r = self.resolution as usize;
        assert!(row < r && col < r);
        self.cells[row * r + col] = value;
    }

    /// Center of cell (row, col) at the given resolution.
    pub fn cell_center(resolution: u32, row: usize, col: usize) -> Point {
        let r = resolution as f64;
        [
            -1.0 + (2.0 * col as f64 + 1.0) / r,
            -1.0 + (2.0 * row as f64 + 1.0) / r,
        ]
    }

    /// Fraction of occupied cells.
    pub fn occupancy(&self) -> f64 {
        let on = self.cells.iter().filter(|&&c| c).count();
        on as f64 / self.cells.len() as f64
    }

    /// Cellwise combination of two grids of equal resolution.
    pub fn zip(&self, other: &Grid, mut f: impl FnMut(bool, bool) -> bool) -> Grid {
        assert_eq!(self.resolution, other.resolution, "grid resolutions differ");
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Grid { resolution: self.resolution, cells }
    }

    pub(crate) fn from_cells(resolution: u32, cells: Vec<bool>) -> Self {
        assert!(resolution >= 2);
        assert_eq!(cells.len(), (resolution as usize).pow(2));
        Grid { resolution, cells }
    }
}

/// Evaluates the exact indicator at every cell center.
pub fn rasterize(spec: &SetSpec, resolution: u32) -> Grid {
    let mut grid = Grid::new_empty(resolution);
    let r = resolution as usize;
    for row in 0..r {
        for col in 0..r {
            let u = Grid::cell_center(resolution, row, col);
            grid.set_cell(row, col, indicator(spec, u));
        }
    }
    grid
}

/// Evaluates `term` at one point, reading `x{i}` as membership of `u` in
/// `specs[i-1]`, with meet as set intersection and join as set union.
pub fn realize_term_on_sets(term: &Term, specs: &[SetSpec], u: Point) -> Result<bool, EvalError> {
    let args: Vec<bool> = specs.iter().map(|s| indicator(s, u)).collect();
    let realization = PairRealization::new(|a: &bool, b: &bool| *a && *b, |a: &bool, b: &bool| *a || *b);
    eval_term(term, &realization, &args)
}

/// Grid-level counterpart of [`realize_term_on_sets`]: combines whole
/// occupancy grids cellwise. All grids must share one resolution.
pub fn realize_term_on_grids(term: &Term, grids: &[Grid]) -> Result<Grid, EvalError> {
    let realization = PairRealization::new(
        |a: &Grid, b: &Grid| a.zip(b, |x, y| x && y),
        |a: &Grid, b: &Grid| a.zip(b, |x, y| x || y),
    );
    eval_term(term, &realization, grids)
}
