//! Law-driven term rewriting: subterm enumeration, pattern application, and
//! random equivalence-preserving transformations.

use std::collections::BTreeMap;

use crate::rng::SeedRng;

use super::laws::LawCatalog;
use super::{LawFamily, Term};

/// Pre-order enumeration of every subterm with its path from the root.
/// Paths are 0-based child-index sequences; the root has the empty path.
pub fn subterms(term: &Term) -> Vec<(Term, Vec<usize>)> {
    fn walk(t: &Term, path: &mut Vec<usize>, out: &mut Vec<(Term, Vec<usize>)>) {
        out.push((t.clone(), path.clone()));
        if let Term::Apply(_, children) = t {
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                walk(c, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(term, &mut Vec::new(), &mut out);
    out
}

/// The subterm at `path`, if the path is valid.
pub fn subterm_at<'a>(term: &'a Term, path: &[usize]) -> Option<&'a Term> {
    let mut cur = term;
    for &k in path {
        match cur {
            Term::Apply(_, children) => cur = children.get(k)?,
            Term::Variable(_) => return None,
        }
    }
    Some(cur)
}

/// A copy of `term` with the subterm at `path` replaced.
pub fn replace_at(term: &Term, path: &[usize], replacement: Term) -> Option<Term> {
    match path.split_first() {
        None => Some(replacement),
        Some((&k, rest)) => match term {
            Term::Variable(_) => None,
            Term::Apply(sym, children) => {
                if k >= children.len() {
                    return None;
                }
                let mut children = children.clone();
                children[k] = replace_at(&children[k], rest, replacement)?;
                Some(Term::Apply(sym.clone(), children))
            }
        },
    }
}

type Binding = BTreeMap<usize, Term>;

/// Matches `pattern` against `subject` at the root, treating pattern
/// variables as wildcards. A repeated pattern variable must bind structurally
/// identical subterms. On failure the binding may hold partial entries, so
/// callers pass a fresh map per attempt.
fn match_pattern(pattern: &Term, subject: &Term, binding: &mut Binding) -> bool {
    match pattern {
        Term::Variable(i) => match binding.get(i) {
            Some(bound) => bound == subject,
            None => {
                binding.insert(*i, subject.clone());
                true
            }
        },
        Term::Apply(sym, pat_children) => match subject {
            Term::Apply(sub_sym, sub_children)
                if sub_sym == sym && sub_children.len() == pat_children.len() =>
            {
                pat_children
                    .iter()
                    .zip(sub_children)
                    .all(|(p, s)| match_pattern(p, s, binding))
            }
            _ => false,
        },
    }
}

/// Builds the pattern under a complete binding; None if a variable is unbound.
fn instantiate(pattern: &Term, binding: &Binding) -> Option<Term> {
    match pattern {
        Term::Variable(i) => binding.get(i).cloned(),
        Term::Apply(sym, children) => {
            let children = children
                .iter()
                .map(|c| instantiate(c, binding))
                .collect::<Option<Vec<_>>>()?;
            Some(Term::Apply(sym.clone(), children))
        }
    }
}

/// Like [`instantiate`], but binds each variable the binding lacks to a
/// uniformly drawn member of `variables`, in first-occurrence order. Used for
/// expanding orientations such as `x -> x & (x | y)` where `y` is free.
fn instantiate_inventing(
    pattern: &Term,
    binding: &Binding,
    variables: &[usize],
    rng: &mut SeedRng,
) -> Term {
    fn walk(pattern: &Term, binding: &mut Binding, variables: &[usize], rng: &mut SeedRng) -> Term {
        match pattern {
            Term::Variable(i) => {
                if let Some(bound) = binding.get(i) {
                    return bound.clone();
                }
                let invented = Term::Variable(variables[rng.uniform_usize(variables.len())]);
                binding.insert(*i, invented.clone());
                invented
            }
            Term::Apply(sym, children) => {
                let children =
                    children.iter().map(|c| walk(c, binding, variables, rng)).collect();
                Term::Apply(sym.clone(), children)
            }
        }
    }
    let mut binding = binding.clone();
    walk(pattern, &mut binding, variables, rng)
}

/// All root matches of the family at `subject`: one entry per (member law,
/// orientation) whose pattern side matches, carrying the replacement side and
/// the binding. Enumeration order is members in family order, forward
/// orientation before reverse. Orientations whose replacement mentions
/// variables the binding lacks are kept only when `allow_invention` is set.
fn matching_forms<'a>(
    family: &'a LawFamily,
    subject: &Term,
    allow_invention: bool,
) -> Vec<(&'a Term, Binding)> {
    let mut out = Vec::new();
    for law in &family.members {
        for (pattern, replacement) in [(&law.lhs, &law.rhs), (&law.rhs, &law.lhs)] {
            let mut binding = Binding::new();
            if match_pattern(pattern, subject, &mut binding) {
                let covered =
                    replacement.variables().iter().all(|v| binding.contains_key(v));
                if covered || allow_invention {
                    out.push((replacement, binding));
                }
            }
        }
    }
    out
}

/// Rewrites `term` at its root with one law of `family`, if any orientation
/// matches. Wildcard variables bind arbitrary subterms; repeated wildcards
/// must bind structurally identical ones. When several orientations match,
/// one is chosen uniformly. Orientations that would introduce variables the
/// match does not bind (the expanding direction of absorption) never apply
/// here, so absorption on `x1 | x2` yields None.
pub fn apply_law(family: &LawFamily, term: &Term, rng: &mut SeedRng) -> Option<Term> {
    let forms = matching_forms(family, term, false);
    if forms.is_empty() {
        return None;
    }
    let (replacement, binding) = &forms[rng.uniform_usize(forms.len())];
    Some(instantiate(replacement, binding).expect("covered orientation instantiates fully"))
}

/// Produces a term provably equal to `p` in every distributive lattice by
/// performing `j` rewrite passes.
///
/// Each pass enumerates subterm positions, shuffles them, shuffles the four
/// law families (associativity, commutativity, absorption, distributivity),
/// and scans families in shuffled order over positions in shuffled order. The
/// first position where a family matches receives one rewrite, chosen
/// uniformly over that family's matching orientations, and the pass ends.
/// Unlike [`apply_law`], expanding orientations are allowed; a variable free
/// in the replacement is bound to a uniform draw from the term's own
/// variables, so the variable set never grows. `j = 0` returns `p` unchanged.
pub fn equivalent_term(p: &Term, j: usize, rng: &mut SeedRng) -> Term {
    let families = LawCatalog::standard().families();
    let mut term = p.clone();
    for _ in 0..j {
        let mut positions = subterms(&term);
        rng.shuffle(&mut positions);
        let mut family_order: Vec<usize> = (0..families.len()).collect();
        rng.shuffle(&mut family_order);
        let variables = term.variables();
        'pass: for &fi in &family_order {
            let family = &families[fi];
            for (sub, path) in &positions {
                let forms = matching_forms(family, sub, true);
                if forms.is_empty() {
                    continue;
                }
                let (replacement, binding) = &forms[rng.uniform_usize(forms.len())];
                let new_sub = instantiate_inventing(replacement, binding, &variables, rng);
                term = replace_at(&term, path, new_sub).expect("path came from subterms");
                break 'pass;
            }
        }
    }
    term
}
