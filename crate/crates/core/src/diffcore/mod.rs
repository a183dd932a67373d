//! Minimal reverse-mode autodiff over dense f64 matrices.
//!
//! A [`Graph`] is a tape of [`Node`]s holding batch-major values (rows are
//! batch entries, columns are features). Building an op appends a node, so
//! insertion order is already topological and [`Graph::backward`] just walks
//! the tape in reverse. All arithmetic is double precision.

mod gradcheck;
mod params;

pub use gradcheck::grad_check;
pub use params::{AdamConfig, ParamIoError, ParamStore};

use std::collections::HashMap;

use ndarray::{concatenate, s, Array2, Axis};

/// Handle to a node in a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf { param: Option<String> },
    MatMul { a: NodeId, b: NodeId },
    AddRow { x: NodeId, bias: NodeId },
    Add { a: NodeId, b: NodeId },
    Sub { a: NodeId, b: NodeId },
    Mul { a: NodeId, b: NodeId },
    Scale { x: NodeId, c: f64 },
    Tanh { x: NodeId },
    Relu { x: NodeId },
    MinElem { a: NodeId, b: NodeId },
    MaxElem { a: NodeId, b: NodeId },
    RollCols { x: NodeId },
    MatSquareProd { a: NodeId, b: NodeId, side: usize },
    ConcatCols { a: NodeId, b: NodeId, a_cols: usize },
    SliceCols { x: NodeId, start: usize, end: usize, src_cols: usize },
    Quantize { x: NodeId },
    Clamp { x: NodeId, lo: f64, hi: f64 },
    SumAll { x: NodeId },
    BceWithLogitsMean { logits: NodeId, targets: NodeId },
}

struct Node {
    value: Array2<f64>,
    op: Op,
    requires_grad: bool,
}

/// Reverse-mode tape.
#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
    param_cache: HashMap<String, NodeId>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    fn push(&mut self, value: Array2<f64>, op: Op, requires_grad: bool) -> NodeId {
        self.nodes.push(Node { value, op, requires_grad });
        NodeId(self.nodes.len() - 1)
    }

    fn needs(&self, id: NodeId) -> bool {
        self.nodes[id.0].requires_grad
    }

    pub fn value(&self, id: NodeId) -> &Array2<f64> {
        &self.nodes[id.0].value
    }

    /// Scalar value of a 1×1 node.
    pub fn scalar(&self, id: NodeId) -> f64 {
        let v = self.value(id);
        assert_eq!(v.dim(), (1, 1), "node is not scalar");
        v[[0, 0]]
    }

    /// Constant input; never receives gradient.
    pub fn constant(&mut self, value: Array2<f64>) -> NodeId {
        self.push(value, Op::Leaf { param: None }, false)
    }

    /// Leaf bound to a named parameter. Repeated requests for the same name
    /// return the same node, so shared parameters accumulate gradient across
    /// every use site.
    pub fn param(&mut self, store: &ParamStore, name: &str) -> NodeId {
        if let Some(&id) = self.param_cache.get(name) {
            return id;
        }
        let value = store.get(name).unwrap_or_else(|| panic!("unknown parameter `{name}`"));
        let id = self.push(value.clone(), Op::Leaf { param: Some(name.to_string()) }, true);
        self.param_cache.insert(name.to_string(), id);
        id
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.value(a).dot(self.value(b));
        let rg = self.needs(a) || self.needs(b);
        self.push(v, Op::MatMul { a, b }, rg)
    }

    /// Adds a 1×n bias row to every row of x.
    pub fn add_row(&mut self, x: NodeId, bias: NodeId) -> NodeId {
        let b = self.value(bias);
        assert_eq!(b.nrows(), 1, "bias must be a single row");
        let v = self.value(x) + b;
        let rg = self.needs(x) || self.needs(bias);
        self.push(v, Op::AddRow { x, bias }, rg)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.value(a) + self.value(b);
        let rg = self.needs(a) || self.needs(b);
        self.push(v, Op::Add { a, b }, rg)
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.value(a) - self.value(b);
        let rg = self.needs(a) || self.needs(b);
        self.push(v, Op::Sub { a, b }, rg)
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.value(a) * self.value(b);
        let rg = self.needs(a) || self.needs(b);
        self.push(v, Op::Mul { a, b }, rg)
    }

    pub fn scale(&mut self, x: NodeId, c: f64) -> NodeId {
        let v = self.value(x) * c;
        let rg = self.needs(x);
        self.push(v, Op::Scale { x, c }, rg)
    }

    pub fn tanh(&mut self, x: NodeId) -> NodeId {
        let v = self.value(x).mapv(f64::tanh);
        let rg = self.needs(x);
        self.push(v, Op::Tanh { x }, rg)
    }

    pub fn relu(&mut self, x: NodeId) -> NodeId {
        let v = self.value(x).mapv(|t| if t > 0.0 { t } else { 0.0 });
        let rg = self.needs(x);
        self.push(v, Op::Relu { x }, rg)
    }

    /// Elementwise minimum; ties route gradient to the first argument.
    pub fn min_elem(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let mut v = self.value(a).clone();
        v.zip_mut_with(self.value(b), |x, &y| {
            if y < *x {
                *x = y;
            }
        });
        let rg = self.needs(a) || self.needs(b);
        self.push(v, Op::MinElem { a, b }, rg)
    }

    /// Elementwise maximum; ties route gradient to the first argument.
    pub fn max_elem(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let mut v = self.value(a).clone();
        v.zip_mut_with(self.value(b), |x, &y| {
            if y > *x {
                *x = y;
            }
        });
        let rg = self.needs(a) || self.needs(b);
        self.push(v, Op::MaxElem { a, b }, rg)
    }

    /// Cyclically shifts columns: input column i lands in column (i+1) mod l.
    pub fn roll_cols(&mut self, x: NodeId) -> NodeId {
        let src = self.value(x);
        let mut v = Array2::zeros(src.dim());
        let l = src.ncols();
        for i in 0..l {
            v.column_mut((i + 1) % l).assign(&src.column(i));
        }
        let rg = self.needs(x);
        self.push(v, Op::RollCols { x }, rg)
    }

    /// Per-row product of square reshapes: each row of length k² is read as a
    /// row-major k×k matrix; the output row is the flattened matrix product.
    pub fn mat_square_prod(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let av = self.value(a);
        let bv = self.value(b);
        assert_eq!(av.dim(), bv.dim());
        let l = av.ncols();
        let side = (l as f64).sqrt().round() as usize;
        assert_eq!(side * side, l, "column count {l} is not a perfect square");
        let mut v = Array2::zeros(av.dim());
        for r in 0..av.nrows() {
            for i in 0..side {
                for j in 0..side {
                    let mut acc = 0.0;
                    for m in 0..side {
                        acc += av[[r, i * side + m]] * bv[[r, m * side + j]];
                    }
                    v[[r, i * side + j]] = acc;
                }
            }
        }
        let rg = self.needs(a) || self.needs(b);
        self.push(v, Op::MatSquareProd { a, b, side }, rg)
    }

    pub fn concat_cols(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let a_cols = self.value(a).ncols();
        let v = concatenate(Axis(1), &[self.value(a).view(), self.value(b).view()])
            .expect("row counts match");
        let rg = self.needs(a) || self.needs(b);
        self.push(v, Op::ConcatCols { a, b, a_cols }, rg)
    }

    pub fn slice_cols(&mut self, x: NodeId, start: usize, end: usize) -> NodeId {
        let src = self.value(x);
        assert!(start < end && end <= src.ncols());
        let v = src.slice(s![.., start..end]).to_owned();
        let src_cols = src.ncols();
        let rg = self.needs(x);
        self.push(v, Op::SliceCols { x, start, end, src_cols }, rg)
    }

    /// Rounds every element to the lattice of spacing 2^grid_exp. The
    /// backward rule is straight-through (gradient passes unchanged), which
    /// stays inside finite-difference tolerances because the lattice spacing
    /// is far below the checking step.
    pub fn quantize_lattice(&mut self, x: NodeId, grid_exp: i32) -> NodeId {
        let scale = 2f64.powi(-grid_exp);
        let v = self.value(x).mapv(|t| (t * scale).round() / scale);
        let rg = self.needs(x);
        self.push(v, Op::Quantize { x }, rg)
    }

    /// Clamps to [lo, hi]; gradient passes where lo ≤ x ≤ hi.
    pub fn clamp(&mut self, x: NodeId, lo: f64, hi: f64) -> NodeId {
        assert!(lo < hi);
        let v = self.value(x).mapv(|t| t.clamp(lo, hi));
        let rg = self.needs(x);
        self.push(v, Op::Clamp { x, lo, hi }, rg)
    }

    /// Sum of all elements, as a 1×1 node.
    pub fn sum_all(&mut self, x: NodeId) -> NodeId {
        let v = Array2::from_elem((1, 1), self.value(x).sum());
        let rg = self.needs(x);
        self.push(v, Op::SumAll { x }, rg)
    }

    /// Mean binary cross-entropy of logits against {0,1} targets, computed
    /// in the overflow-safe form max(s,0) − s·t + ln(1+e^{−|s|}).
    pub fn bce_with_logits_mean(&mut self, logits: NodeId, targets: NodeId) -> NodeId {
        let s = self.value(logits);
        let t = self.value(targets);
        assert_eq!(s.dim(), t.dim());
        let mut total = 0.0;
        for (&si, &ti) in s.iter().zip(t.iter()) {
            total += si.max(0.0) - si * ti + (-si.abs()).exp().ln_1p();
        }
        let v = Array2::from_elem((1, 1), total / s.len() as f64);
        let rg = self.needs(logits);
        self.push(v, Op::BceWithLogitsMean { logits, targets }, rg)
    }

    /// Reverse pass from a scalar node. Returns per-parameter gradients keyed
    /// by name; gradients accumulate additively over fan-out.
    pub fn backward(&mut self, loss: NodeId) -> std::collections::BTreeMap<String, Array2<f64>> {
        assert_eq!(self.value(loss).dim(), (1, 1), "backward needs a scalar loss");
        let mut grads: Vec<Option<Array2<f64>>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Array2::ones((1, 1)));

        for idx in (0..self.nodes.len()).rev() {
            if !self.nodes[idx].requires_grad {
                continue;
            }
            let Some(g) = grads[idx].take() else { continue };
            let op = self.nodes[idx].op.clone();
            match op {
                Op::Leaf { .. } => {
                    grads[idx] = Some(g);
                    continue;
                }
                Op::MatMul { a, b } => {
                    if self.needs(a) {
                        let da = g.dot(&self.nodes[b.0].value.t());
                        accumulate(&mut grads[a.0], da);
                    }
                    if self.needs(b) {
                        let db = self.nodes[a.0].value.t().dot(&g);
                        accumulate(&mut grads[b.0], db);
                    }
                }
                Op::AddRow { x, bias } => {
                    if self.needs(bias) {
                        let db = g.sum_axis(Axis(0)).insert_axis(Axis(0));
                        accumulate(&mut grads[bias.0], db);
                    }
                    if self.needs(x) {
                        accumulate(&mut grads[x.0], g);
                    }
                }
                Op::Add { a, b } => {
                    if self.needs(a) {
                        accumulate(&mut grads[a.0], g.clone());
                    }
                    if self.needs(b) {
                        accumulate(&mut grads[b.0], g);
                    }
                }
                Op::Sub { a, b } => {
                    if self.needs(a) {
                        accumulate(&mut grads[a.0], g.clone());
                    }
                    if self.needs(b) {
                        accumulate(&mut grads[b.0], -g);
                    }
                }
                Op::Mul { a, b } => {
                    if self.needs(a) {
                        accumulate(&mut grads[a.0], &g * &self.nodes[b.0].value);
                    }
                    if self.needs(b) {
                        accumulate(&mut grads[b.0], &g * &self.nodes[a.0].value);
                    }
                }
                Op::Scale { x, c } => {
                    if self.needs(x) {
                        accumulate(&mut grads[x.0], g * c);
                    }
                }
                Op::Tanh { x } => {
                    if self.needs(x) {
                        let y = &self.nodes[idx].value;
                        accumulate(&mut grads[x.0], &g * &y.mapv(|t| 1.0 - t * t));
                    }
                }
                Op::Relu { x } => {
                    if self.needs(x) {
                        let mask = self.nodes[x.0].value.mapv(|t| (t > 0.0) as u8 as f64);
                        accumulate(&mut grads[x.0], &g * &mask);
                    }
                }
                Op::MinElem { a, b } => {
                    let av = &self.nodes[a.0].value;
                    let bv = &self.nodes[b.0].value;
                    let first = az_mask(av, bv, |x, y| x <= y);
                    if self.needs(a) {
                        accumulate(&mut grads[a.0], &g * &first);
                    }
                    if self.needs(b) {
                        accumulate(&mut grads[b.0], &g * &(1.0 - &first));
                    }
                }
                Op::MaxElem { a, b } => {
                    let av = &self.nodes[a.0].value;
                    let bv = &self.nodes[b.0].value;
                    let first = az_mask(av, bv, |x, y| x >= y);
                    if self.needs(a) {
                        accumulate(&mut grads[a.0], &g * &first);
                    }
                    if self.needs(b) {
                        accumulate(&mut grads[b.0], &g * &(1.0 - &first));
                    }
                }
                Op::RollCols { x } => {
                    if self.needs(x) {
                        let l = g.ncols();
                        let mut dx = Array2::zeros(g.dim());
                        for i in 0..l {
                            dx.column_mut(i).assign(&g.column((i + 1) % l));
                        }
                        accumulate(&mut grads[x.0], dx);
                    }
                }
                Op::MatSquareProd { a, b, side } => {
                    let av = &self.nodes[a.0].value;
                    let bv = &self.nodes[b.0].value;
                    let k = side;
                    if self.needs(a) {
                        // dA = dC · Bᵀ per row.
                        let mut da = Array2::zeros(av.dim());
                        for r in 0..av.nrows() {
                            for i in 0..k {
                                for j in 0..k {
                                    let mut acc = 0.0;
                                    for m in 0..k {
                                        acc += g[[r, i * k + m]] * bv[[r, j * k + m]];
                                    }
                                    da[[r, i * k + j]] = acc;
                                }
                            }
                        }
                        accumulate(&mut grads[a.0], da);
                    }
                    if self.needs(b) {
                        // dB = Aᵀ · dC per row.
                        let mut db = Array2::zeros(bv.dim());
                        for r in 0..bv.nrows() {
                            for i in 0..k {
                                for j in 0..k {
                                    let mut acc = 0.0;
                                    for m in 0..k {
                                        acc += av[[r, m * k + i]] * g[[r, m * k + j]];
                                    }
                                    db[[r, i * k + j]] = acc;
                                }
                            }
                        }
                        accumulate(&mut grads[b.0], db);
                    }
                }
                Op::ConcatCols { a, b, a_cols } => {
                    if self.needs(a) {
                        accumulate(&mut grads[a.0], g.slice(s![.., ..a_cols]).to_owned());
                    }
                    if self.needs(b) {
                        accumulate(&mut grads[b.0], g.slice(s![.., a_cols..]).to_owned());
                    }
                }
                Op::SliceCols { x, start, end, src_cols } => {
                    if self.needs(x) {
                        let mut dx = Array2::zeros((g.nrows(), src_cols));
                        dx.slice_mut(s![.., start..end]).assign(&g);
                        accumulate(&mut grads[x.0], dx);
                    }
                }
                Op::Quantize { x } => {
                    if self.needs(x) {
                        accumulate(&mut grads[x.0], g);
                    }
                }
                Op::Clamp { x, lo, hi } => {
                    if self.needs(x) {
                        let mask =
                            self.nodes[x.0].value.mapv(|t| (t >= lo && t <= hi) as u8 as f64);
                        accumulate(&mut grads[x.0], &g * &mask);
                    }
                }
                Op::SumAll { x } => {
                    if self.needs(x) {
                        let dx = Array2::from_elem(self.nodes[x.0].value.dim(), g[[0, 0]]);
                        accumulate(&mut grads[x.0], dx);
                    }
                }
                Op::BceWithLogitsMean { logits, targets } => {
                    if self.needs(logits) {
                        let s = &self.nodes[logits.0].value;
                        let t = &self.nodes[targets.0].value;
                        let n = s.len() as f64;
                        let mut ds = Array2::zeros(s.dim());
                        for ((i, j), &si) in s.indexed_iter() {
                            ds[[i, j]] = (sigmoid(si) - t[[i, j]]) * g[[0, 0]] / n;
                        }
                        accumulate(&mut grads[logits.0], ds);
                    }
                }
            }
        }

        let mut out = std::collections::BTreeMap::new();
        for (idx, node) in self.nodes.iter().enumerate() {
            if let Op::Leaf { param: Some(name) } = &node.op {
                if let Some(g) = grads[idx].take() {
                    out.insert(name.clone(), g);
                }
            }
        }
        out
    }
}

fn accumulate(slot: &mut Option<Array2<f64>>, g: Array2<f64>) {
    match slot {
        Some(acc) => *acc += &g,
        None => *slot = Some(g),
    }
}

/// 1.0 where cmp(a, b) holds, else 0.0.
fn az_mask(a: &Array2<f64>, b: &Array2<f64>, cmp: fn(f64, f64) -> bool) -> Array2<f64> {
    let mut m = Array2::zeros(a.dim());
    for ((i, j), &x) in a.indexed_iter() {
        m[[i, j]] = cmp(x, b[[i, j]]) as u8 as f64;
    }
    m
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn store_with(name: &str, value: Array2<f64>) -> ParamStore {
        let mut s = ParamStore::new();
        s.insert(name, value);
        s
    }

    #[test]
    fn min_routes_gradient_to_argmin() {
        let store = store_with("a", array![[1.0, 5.0]]);
        let mut g = Graph::new();
        let a = g.param(&store, "a");
        let b = g.constant(array![[2.0, 3.0]]);
        let m = g.min_elem(a, b);
        assert_eq!(g.value(m), &array![[1.0, 3.0]]);
        let loss = g.sum_all(m);
        let grads = g.backward(loss);
        assert_eq!(grads["a"], array![[1.0, 0.0]]);
    }

    #[test]
    fn min_tie_goes_to_first_argument() {
        let store = store_with("a", array![[2.0]]);
        let mut g = Graph::new();
        let a = g.param(&store, "a");
        let b = g.constant(array![[2.0]]);
        let m = g.min_elem(a, b);
        let loss = g.sum_all(m);
        let grads = g.backward(loss);
        assert_eq!(grads["a"], array![[1.0]]);

        // Same tie under max.
        let mut g = Graph::new();
        let a = g.param(&store, "a");
        let b = g.constant(array![[2.0]]);
        let m = g.max_elem(a, b);
        let loss = g.sum_all(m);
        let grads = g.backward(loss);
        assert_eq!(grads["a"], array![[1.0]]);
    }

    #[test]
    fn matmul_identity_passes_gradient() {
        let store = store_with("b", array![[1.0, 2.0], [3.0, 4.0]]);
        let mut g = Graph::new();
        let eye = g.constant(array![[1.0, 0.0], [0.0, 1.0]]);
        let b = g.param(&store, "b");
        let y = g.matmul(eye, b);
        assert_eq!(g.value(y), &array![[1.0, 2.0], [3.0, 4.0]]);
        let loss = g.sum_all(y);
        let grads = g.backward(loss);
        assert_eq!(grads["b"], array![[1.0, 1.0], [1.0, 1.0]]);
    }

    #[test]
    fn roll_backward_is_inverse_roll() {
        let store = store_with("x", array![[1.0, 2.0, 3.0, 4.0]]);
        let mut g = Graph::new();
        let x = g.param(&store, "x");
        let r = g.roll_cols(x);
        assert_eq!(g.value(r), &array![[4.0, 1.0, 2.0, 3.0]]);
        // Weight the rolled output so each input position gets the weight of
        // the slot it moved into.
        let w = g.constant(array![[10.0, 20.0, 30.0, 40.0]]);
        let wy = g.mul(r, w);
        let loss = g.sum_all(wy);
        let grads = g.backward(loss);
        assert_eq!(grads["x"], array![[20.0, 30.0, 40.0, 10.0]]);
    }

    #[test]
    fn fan_out_accumulates() {
        let store = store_with("x", array![[3.0]]);
        let mut g = Graph::new();
        let x = g.param(&store, "x");
        let y = g.add(x, x);
        let loss = g.sum_all(y);
        let grads = g.backward(loss);
        assert_eq!(grads["x"], array![[2.0]]);
    }

    #[test]
    fn shared_param_nodes_are_cached() {
        let store = store_with("w", array![[1.0]]);
        let mut g = Graph::new();
        let w1 = g.param(&store, "w");
        let w2 = g.param(&store, "w");
        assert_eq!(w1, w2);
    }

    #[test]
    fn quantize_rounds_to_lattice() {
        let mut g = Graph::new();
        let x = g.constant(array![[0.3, -1.7]]);
        let q = g.quantize_lattice(x, -2);
        assert_eq!(g.value(q), &array![[0.25, -1.75]]);
    }

    #[test]
    fn bce_matches_reference_formula() {
        let store = store_with("s", array![[0.5, -30.0, 40.0]]);
        let mut g = Graph::new();
        let s = g.param(&store, "s");
        let t = g.constant(array![[1.0, 0.0, 1.0]]);
        let loss = g.bce_with_logits_mean(s, t);
        let expected = ((1.0 + (-0.5f64).exp()).ln() + (1.0 + (-30.0f64).exp()).ln() + 0.0) / 3.0;
        assert!((g.scalar(loss) - expected).abs() < 1e-12);
        let grads = g.backward(loss);
        let want = |si: f64, ti: f64| (sigmoid(si) - ti) / 3.0;
        assert!((grads["s"][[0, 0]] - want(0.5, 1.0)).abs() < 1e-12);
        assert!((grads["s"][[0, 1]] - want(-30.0, 0.0)).abs() < 1e-12);
        assert!((grads["s"][[0, 2]] - want(40.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn mat_square_prod_matches_flat_reference() {
        let a = array![[1.0, 2.0, 3.0, 4.0], [0.5, 0.0, 1.0, 2.0]];
        let b = array![[5.0, 6.0, 7.0, 8.0], [1.0, 0.0, 0.0, 1.0]];
        let mut g = Graph::new();
        let an = g.constant(a.clone());
        let bn = g.constant(b.clone());
        let c = g.mat_square_prod(an, bn);
        for r in 0..2 {
            let flat = crate::mirrored::apply_candidate(
                crate::mirrored::CandidateOp::MatProd,
                a.row(r).as_slice().unwrap(),
                b.row(r).as_slice().unwrap(),
            )
            .unwrap();
            for j in 0..4 {
                assert_eq!(g.value(c)[[r, j]], flat[j]);
            }
        }
    }

    #[test]
    fn concat_slice_round_trip() {
        let store = store_with("a", array![[1.0, 2.0], [3.0, 4.0]]);
        let mut g = Graph::new();
        let a = g.param(&store, "a");
        let b = g.constant(array![[5.0], [6.0]]);
        let cat = g.concat_cols(a, b);
        assert_eq!(g.value(cat), &array![[1.0, 2.0, 5.0], [3.0, 4.0, 6.0]]);
        let back = g.slice_cols(cat, 0, 2);
        let loss = g.sum_all(back);
        let grads = g.backward(loss);
        assert_eq!(grads["a"], array![[1.0, 1.0], [1.0, 1.0]]);
    }

    #[test]
    fn relu_zero_input_has_zero_gradient() {
        let store = store_with("x", array![[0.0, -1.0, 2.0]]);
        let mut g = Graph::new();
        let x = g.param(&store, "x");
        let y = g.relu(x);
        let loss = g.sum_all(y);
        let grads = g.backward(loss);
        assert_eq!(grads["x"], array![[0.0, 0.0, 1.0]]);
    }
}
