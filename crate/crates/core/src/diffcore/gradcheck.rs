//! Finite-difference verification of reverse-mode gradients.


use crate::rng::SeedRng;

use super::{Graph, NodeId, ParamStore};

/// Compares reverse-mode gradients against central differences.
///
/// `build` must deterministically construct the scalar loss from the given
/// store (fix any sampled inputs before calling). `samples` parameter
/// coordinates are drawn uniformly over all coordinates of all arrays; for
/// each, the loss is re-evaluated at ±h and the relative error
/// |ad − fd| / max(|ad| + |fd|, 1e−6) is recorded. Returns the maximum.
pub fn grad_check<F>(
    build: F,
    store: &ParamStore,
    h: f64,
    samples: usize,
    rng: &mut SeedRng,
) -> f64
where
    F: Fn(&mut Graph, &ParamStore) -> NodeId,
{
    assert!(h > 0.0);
    let mut graph = Graph::new();
    let loss = build(&mut graph, store);
    let analytic = graph.backward(loss);

    let names: Vec<String> = store.names().map(str::to_string).collect();
    let total: usize = store.coordinate_count();
    assert!(total > 0, "store has no coordinates to check");

    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut coord = rng.uniform_usize(total);
        let mut picked: Option<(&str, usize)> = None;
        for name in &names {
            let len = store.get(name).unwrap().len();
            if coord < len {
                picked = Some((name, coord));
                break;
            }
            coord -= len;
        }
        let (name, flat_idx) = picked.expect("coordinate within bounds");
        let cols = store.get(name).unwrap().ncols();
        let idx = (flat_idx / cols, flat_idx % cols);

        let eval_at = |delta: f64| {
            let mut perturbed = store.clone();
            perturbed.get_mut(name).unwrap()[idx] += delta;
            let mut g = Graph::new();
            let loss = build(&mut g, &perturbed);
            g.scalar(loss)
        };
        let fd = (eval_at(h) - eval_at(-h)) / (2.0 * h);
        let ad = analytic.get(name).map_or(0.0, |g| g[idx]);
        let rel = (ad - fd).abs() / (ad.abs() + fd.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    worst
}
