//! Random term construction by repeated pairwise combination.

use crate::rng::SeedRng;

use super::{OperationSymbol, Term};

/// Builds a random term over x1..xℓ.
///
/// Starts from the list (x1, …, xℓ) and repeatedly removes two entries at
/// uniform positions, combines them under a uniformly chosen symbol (meet or
/// join, in that draw order p1 then p2), and appends the combination, until a
/// single term remains. The result always mentions each variable exactly once
/// and has exactly ℓ−1 application nodes.
///
/// Draw order per round is fixed: first position, second position (after the
/// first removal), then the symbol. Seeded callers get reproducible terms.
///
/// Panics if ℓ = 0.
pub fn random_term(num_symbols: usize, rng: &mut SeedRng) -> Term {
    assert!(num_symbols >= 1, "need at least one variable");
    let mut pool: Vec<Term> = (1..=num_symbols).map(Term::var).collect();
    while pool.len() > 1 {
        let i = rng.uniform_usize(pool.len());
        let p1 = pool.remove(i);
        let j = rng.uniform_usize(pool.len());
        let p2 = pool.remove(j);
        let sym = if rng.uniform_usize(2) == 0 {
            OperationSymbol::meet()
        } else {
            OperationSymbol::join()
        };
        pool.push(Term::Apply(sym, vec![p1, p2]));
    }
    pool.pop().expect("pool holds exactly one term")
}
