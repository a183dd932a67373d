//! Directly parameterized latent operations: one network per symbol, with no
//! bijection and no exactness guarantees, trained as comparison points.

use std::fmt;
use std::path::Path;

use ndarray::Array2;

use super::{LatentOps, LatentVector};
use crate::algebra::{OperationSymbol, MEET_NAME};
use crate::diffcore::{Graph, NodeId, ParamStore};
use crate::embed::ModelIoError;
use crate::rng::SeedRng;

const HIDDEN: usize = 256;

/// How the two symbol networks consume their arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    /// Plain MLP on the concatenation [z1, z2]; order-sensitive.
    MlpConcat,
    /// h(g(z1) + g(z2)) with shared g per symbol. The sum makes the output
    /// exactly symmetric in its arguments, bit for bit.
    Symmetric,
}

impl BaselineKind {
    pub fn id(self) -> &'static str {
        match self {
            BaselineKind::MlpConcat => "mlp_concat",
            BaselineKind::Symmetric => "symmetric",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "mlp_concat" => Some(BaselineKind::MlpConcat),
            "symmetric" => Some(BaselineKind::Symmetric),
            _ => None,
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Two per-symbol networks realizing meet and join directly on latents.
#[derive(Debug, Clone)]
pub struct DirectBaseline {
    kind: BaselineKind,
    latent_dim: usize,
    params: ParamStore,
}

fn symbol_tag(symbol: &OperationSymbol) -> &'static str {
    if symbol.name == MEET_NAME {
        "meet"
    } else {
        "join"
    }
}

impl DirectBaseline {
    pub fn new(kind: BaselineKind, latent_dim: usize, seed: u64) -> Self {
        assert!(latent_dim >= 1);
        let mut params = ParamStore::new();
        let mut rng = SeedRng::derived(seed, &[0x424c_4e45]);
        for tag in ["meet", "join"] {
            match kind {
                BaselineKind::MlpConcat => {
                    params.init_affine(&format!("bl.{tag}.w1"), 2 * latent_dim, HIDDEN, &mut rng);
                    params.init_zeros(&format!("bl.{tag}.b1"), 1, HIDDEN);
                    params.init_affine(&format!("bl.{tag}.w2"), HIDDEN, HIDDEN, &mut rng);
                    params.init_zeros(&format!("bl.{tag}.b2"), 1, HIDDEN);
                    params.init_affine(&format!("bl.{tag}.w3"), HIDDEN, latent_dim, &mut rng);
                    params.init_zeros(&format!("bl.{tag}.b3"), 1, latent_dim);
                }
                BaselineKind::Symmetric => {
                    params.init_affine(&format!("bl.{tag}.g1"), latent_dim, HIDDEN, &mut rng);
                    params.init_zeros(&format!("bl.{tag}.gb1"), 1, HIDDEN);
                    params.init_affine(&format!("bl.{tag}.g2"), HIDDEN, HIDDEN, &mut rng);
                    params.init_zeros(&format!("bl.{tag}.gb2"), 1, HIDDEN);
                    params.init_affine(&format!("bl.{tag}.h"), HIDDEN, latent_dim, &mut rng);
                    params.init_zeros(&format!("bl.{tag}.hb"), 1, latent_dim);
                }
            }
        }
        DirectBaseline { kind, latent_dim, params }
    }

    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn params(&self) -> &ParamStore {
        &self.params
    }

    pub(crate) fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }

    /// Applies one symbol network outside any training graph.
    pub fn baseline_apply(
        &self,
        symbol: &OperationSymbol,
        z1: &[f64],
        z2: &[f64],
    ) -> LatentVector {
        assert_eq!(z1.len(), self.latent_dim);
        assert_eq!(z2.len(), self.latent_dim);
        let tag = symbol_tag(symbol);
        let p = |n: &str| self.params.get(&format!("bl.{tag}.{n}")).unwrap();
        let relu = |a: Array2<f64>| a.mapv(|v| v.max(0.0));
        let row = |v: &[f64]| Array2::from_shape_vec((1, v.len()), v.to_vec()).unwrap();
        let out = match self.kind {
            BaselineKind::MlpConcat => {
                let mut cat = z1.to_vec();
                cat.extend_from_slice(z2);
                let x = row(&cat);
                let h1 = relu(x.dot(p("w1")) + p("b1"));
                let h2 = relu(h1.dot(p("w2")) + p("b2"));
                h2.dot(p("w3")) + p("b3")
            }
            BaselineKind::Symmetric => {
                let embed = |z: &[f64]| {
                    let h = relu(row(z).dot(p("g1")) + p("gb1"));
                    h.dot(p("g2")) + p("gb2")
                };
                let pooled = embed(z1) + embed(z2);
                relu(pooled).dot(p("h")) + p("hb")
            }
        };
        out.row(0).to_vec()
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelIoError> {
        let mut with_header = self.params.clone();
        let kind_code = match self.kind {
            BaselineKind::MlpConcat => 0.0,
            BaselineKind::Symmetric => 1.0,
        };
        let header = vec![kind_code, self.latent_dim as f64, HIDDEN as f64];
        with_header.insert("meta.arch", Array2::from_shape_vec((1, 3), header).unwrap());
        with_header.save(path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelIoError> {
        let loaded = ParamStore::load(path)?;
        let header = loaded.get("meta.arch").ok_or(ModelIoError::BadHeader)?;
        if header.len() != 3 || header[[0, 2]] as usize != HIDDEN {
            return Err(ModelIoError::BadHeader);
        }
        let kind = match header[[0, 0]] as usize {
            0 => BaselineKind::MlpConcat,
            1 => BaselineKind::Symmetric,
            _ => return Err(ModelIoError::BadHeader),
        };
        let latent_dim = header[[0, 1]] as usize;
        let mut model = DirectBaseline::new(kind, latent_dim, 0);
        let names: Vec<String> = loaded.names().map(str::to_string).collect();
        for name in &names {
            if name == "meta.arch" {
                continue;
            }
            let expected = model.params.get(name).ok_or(ModelIoError::BadHeader)?.dim();
            let arr = loaded.get(name).unwrap();
            if arr.dim() != expected {
                return Err(ModelIoError::BadHeader);
            }
            model.params.insert(name, arr.clone());
        }
        if model.params.len() != names.len() - 1 {
            return Err(ModelIoError::BadHeader);
        }
        Ok(model)
    }
}

impl LatentOps for DirectBaseline {
    fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    fn model_id(&self) -> String {
        format!("baseline_{}", self.kind.id())
    }

    fn law_count(&self) -> usize {
        // The pooled-sum architecture is commutative in both symbols by
        // construction and enforces nothing else; the concat network
        // enforces nothing at all. Matches the unit tests on fresh models.
        match self.kind {
            BaselineKind::MlpConcat => 0,
            BaselineKind::Symmetric => 2,
        }
    }

    fn apply(&self, symbol: &OperationSymbol, z1: &[f64], z2: &[f64]) -> LatentVector {
        self.baseline_apply(symbol, z1, z2)
    }
}

/// Graph twin of [`DirectBaseline::baseline_apply`] for training; `z1` and
/// `z2` are B x l nodes.
pub(crate) fn baseline_apply_graph(
    g: &mut Graph,
    store: &ParamStore,
    kind: BaselineKind,
    symbol: &OperationSymbol,
    z1: NodeId,
    z2: NodeId,
) -> NodeId {
    let tag = symbol_tag(symbol);
    let name = |n: &str| format!("bl.{tag}.{n}");
    match kind {
        BaselineKind::MlpConcat => {
            let x = g.concat_cols(z1, z2);
            let w1 = g.param(store, &name("w1"));
            let b1 = g.param(store, &name("b1"));
            let h1 = g.matmul(x, w1);
            let h1 = g.add_row(h1, b1);
            let h1 = g.relu(h1);
            let w2 = g.param(store, &name("w2"));
            let b2 = g.param(store, &name("b2"));
            let h2 = g.matmul(h1, w2);
            let h2 = g.add_row(h2, b2);
            let h2 = g.relu(h2);
            let w3 = g.param(store, &name("w3"));
            let b3 = g.param(store, &name("b3"));
            let out = g.matmul(h2, w3);
            g.add_row(out, b3)
        }
        BaselineKind::Symmetric => {
            let embed = |g: &mut Graph, z: NodeId| {
                let g1 = g.param(store, &name("g1"));
                let gb1 = g.param(store, &name("gb1"));
                let h = g.matmul(z, g1);
                let h = g.add_row(h, gb1);
                let h = g.relu(h);
                let g2 = g.param(store, &name("g2"));
                let gb2 = g.param(store, &name("gb2"));
                let h = g.matmul(h, g2);
                g.add_row(h, gb2)
            };
            let e1 = embed(g, z1);
            let e2 = embed(g, z2);
            let pooled = g.add(e1, e2);
            let pooled = g.relu(pooled);
            let hw = g.param(store, &name("h"));
            let hb = g.param(store, &name("hb"));
            let out = g.matmul(pooled, hw);
            g.add_row(out, hb)
        }
    }
}
