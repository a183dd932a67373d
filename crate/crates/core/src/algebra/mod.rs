//! Terms over a two-operation signature, their realizations, and the
//! distributive-lattice laws.
//!
//! A [`Term`] is a syntax tree over variables `x1..xN` and applications of
//! [`OperationSymbol`]s. Terms stay purely symbolic; a [`Realization`] assigns
//! each symbol a concrete function on some carrier type, and [`eval_term`]
//! folds a term over it. The same term can therefore run over f64 vectors,
//! f32 vectors, booleans, occupancy grids, latent vectors, or autodiff graph
//! nodes without duplicating any traversal logic.

mod parse;
mod random;
mod rewrite;

pub mod laws;

pub use parse::{parse_term, ParseError};
pub use random::random_term;
pub use rewrite::{apply_law, equivalent_term, replace_at, subterm_at, subterms};

use std::fmt;

use thiserror::Error;

/// Named operation symbol with a fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationSymbol {
    pub name: String,
    pub arity: usize,
}

impl OperationSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        OperationSymbol { name: name.into(), arity }
    }

    /// The binary meet symbol, written `&`.
    pub fn meet() -> Self {
        OperationSymbol::new(MEET_NAME, 2)
    }

    /// The binary join symbol, written `|`.
    pub fn join() -> Self {
        OperationSymbol::new(JOIN_NAME, 2)
    }

    pub fn is_meet(&self) -> bool {
        self.name == MEET_NAME
    }

    pub fn is_join(&self) -> bool {
        self.name == JOIN_NAME
    }
}

pub const MEET_NAME: &str = "meet";
pub const JOIN_NAME: &str = "join";

/// Term over variables and operation applications.
///
/// Variable indices are 1-based: `Variable(1)` prints as `x1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Variable(usize),
    Apply(OperationSymbol, Vec<Term>),
}

impl Term {
    pub fn var(index: usize) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        Term::Variable(index)
    }

    pub fn meet(a: Term, b: Term) -> Self {
        Term::Apply(OperationSymbol::meet(), vec![a, b])
    }

    pub fn join(a: Term, b: Term) -> Self {
        Term::Apply(OperationSymbol::join(), vec![a, b])
    }

    /// Number of variable occurrences (leaves).
    pub fn leaf_count(&self) -> usize {
        match self {
            Term::Variable(_) => 1,
            Term::Apply(_, children) => children.iter().map(Term::leaf_count).sum(),
        }
    }

    /// Number of application nodes.
    pub fn apply_count(&self) -> usize {
        match self {
            Term::Variable(_) => 0,
            Term::Apply(_, children) => 1 + children.iter().map(Term::apply_count).sum::<usize>(),
        }
    }

    /// Largest variable index mentioned, or 0 for a term with no variables.
    pub fn max_variable(&self) -> usize {
        match self {
            Term::Variable(i) => *i,
            Term::Apply(_, children) => children.iter().map(Term::max_variable).max().unwrap_or(0),
        }
    }

    /// Sorted distinct variable indices mentioned by the term.
    pub fn variables(&self) -> Vec<usize> {
        fn walk(t: &Term, out: &mut Vec<usize>) {
            match t {
                Term::Variable(i) => out.push(*i),
                Term::Apply(_, children) => children.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut vars = Vec::new();
        walk(self, &mut vars);
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

/// Operator precedence used by both the parser and the printer:
/// `&` binds tighter than `|`, both associate to the left.
fn precedence(sym: &OperationSymbol) -> Option<u8> {
    if sym.is_meet() {
        Some(2)
    } else if sym.is_join() {
        Some(1)
    } else {
        None
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_term(t: &Term, f: &mut fmt::Formatter<'_>, parent: u8, right_child: bool) -> fmt::Result {
            match t {
                Term::Variable(i) => write!(f, "x{i}"),
                Term::Apply(sym, children) => match precedence(sym) {
                    Some(prec) if children.len() == 2 => {
                        // Minimal parentheses: wrap when looser than the parent,
                        // or equal precedence in right position (left-assoc grammar).
                        let need = prec < parent || (prec == parent && right_child);
                        if need {
                            write!(f, "(")?;
                        }
                        write_term(&children[0], f, prec, false)?;
                        write!(f, " {} ", if sym.is_meet() { "&" } else { "|" })?;
                        write_term(&children[1], f, prec, true)?;
                        if need {
                            write!(f, ")")?;
                        }
                        Ok(())
                    }
                    _ => {
                        // Symbols outside the lattice grammar print functionally.
                        write!(f, "{}(", sym.name)?;
                        for (i, c) in children.iter().enumerate() {
                            if i > 0 {
                                write!(f, ", ")?;
                            }
                            write_term(c, f, 0, false)?;
                        }
                        write!(f, ")")
                    }
                },
            }
        }
        write_term(self, f, 0, false)
    }
}

/// One equational law, `lhs = rhs`, with variables read as wildcards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Law {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

impl Law {
    pub fn new(name: impl Into<String>, lhs: Term, rhs: Term) -> Self {
        Law { name: name.into(), lhs, rhs }
    }
}

/// A law together with its dual. Rewriting treats the pair as one unit, the
/// way the named lattice laws are usually quoted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawFamily {
    pub name: String,
    pub members: Vec<Law>,
}

/// Errors from evaluating a term over a realization.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("term mentions x{index} but only {available} arguments were supplied")]
    UnboundVariable { index: usize, available: usize },
    #[error("realization does not define symbol `{name}`")]
    UnknownSymbol { name: String },
    #[error("symbol `{name}` has arity {arity} but was applied to {given} arguments")]
    ArityMismatch { name: String, arity: usize, given: usize },
}

/// Assignment of concrete functions to operation symbols over a carrier `A`.
pub trait Realization<A> {
    fn apply(&self, sym: &OperationSymbol, args: &[A]) -> Result<A, EvalError>;
}

/// Realization of the meet/join signature from two binary closures.
pub struct PairRealization<A, M, J>
where
    M: Fn(&A, &A) -> A,
    J: Fn(&A, &A) -> A,
{
    meet: M,
    join: J,
    _marker: std::marker::PhantomData<A>,
}

impl<A, M, J> PairRealization<A, M, J>
where
    M: Fn(&A, &A) -> A,
    J: Fn(&A, &A) -> A,
{
    pub fn new(meet: M, join: J) -> Self {
        PairRealization { meet, join, _marker: std::marker::PhantomData }
    }
}

impl<A, M, J> Realization<A> for PairRealization<A, M, J>
where
    M: Fn(&A, &A) -> A,
    J: Fn(&A, &A) -> A,
{
    fn apply(&self, sym: &OperationSymbol, args: &[A]) -> Result<A, EvalError> {
        if args.len() != 2 {
            return Err(EvalError::ArityMismatch {
                name: sym.name.clone(),
                arity: 2,
                given: args.len(),
            });
        }
        if sym.is_meet() {
            Ok((self.meet)(&args[0], &args[1]))
        } else if sym.is_join() {
            Ok((self.join)(&args[0], &args[1]))
        } else {
            Err(EvalError::UnknownSymbol { name: sym.name.clone() })
        }
    }
}

/// Evaluates `term` over `realization`, reading `x{i}` as `args[i-1]`.
pub fn eval_term<A: Clone, R: Realization<A> + ?Sized>(
    term: &Term,
    realization: &R,
    args: &[A],
) -> Result<A, EvalError> {
    match term {
        Term::Variable(i) => args
            .get(i - 1)
            .cloned()
            .ok_or(EvalError::UnboundVariable { index: *i, available: args.len() }),
        Term::Apply(sym, children) => {
            let mut vals = Vec::with_capacity(children.len());
            for c in children {
                vals.push(eval_term(c, realization, args)?);
            }
            realization.apply(sym, &vals)
        }
    }
}
