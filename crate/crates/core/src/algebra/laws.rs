//! Catalog of the eight distributive-lattice laws and their four families.
//!
//! Each unstarred law has a starred dual obtained by swapping `&` and `|`.
//! Catalog order doubles as the column order of the law matrix: commutativity,
//! commutativity*, associativity, associativity*, absorption, absorption*,
//! distributivity, distributivity*.

use super::{parse_term, Law, LawFamily};

pub const COMMUTATIVITY: &str = "commutativity";
pub const COMMUTATIVITY_STAR: &str = "commutativity*";
pub const ASSOCIATIVITY: &str = "associativity";
pub const ASSOCIATIVITY_STAR: &str = "associativity*";
pub const ABSORPTION: &str = "absorption";
pub const ABSORPTION_STAR: &str = "absorption*";
pub const DISTRIBUTIVITY: &str = "distributivity";
pub const DISTRIBUTIVITY_STAR: &str = "distributivity*";

/// Number of laws in the catalog.
pub const LAW_COUNT: usize = 8;

/// The immutable catalog of distributive-lattice laws.
#[derive(Debug, Clone)]
pub struct LawCatalog {
    laws: Vec<Law>,
}

fn law(name: &str, lhs: &str, rhs: &str) -> Law {
    let lhs = parse_term(lhs).expect("catalog lhs parses");
    let rhs = parse_term(rhs).expect("catalog rhs parses");
    Law::new(name, lhs, rhs)
}

impl LawCatalog {
    /// The standard eight laws, in matrix column order.
    pub fn standard() -> Self {
        LawCatalog {
            laws: vec![
                law(COMMUTATIVITY, "x1 & x2", "x2 & x1"),
                law(COMMUTATIVITY_STAR, "x1 | x2", "x2 | x1"),
                law(ASSOCIATIVITY, "x1 & (x2 & x3)", "(x1 & x2) & x3"),
                law(ASSOCIATIVITY_STAR, "x1 | (x2 | x3)", "(x1 | x2) | x3"),
                law(ABSORPTION, "x1 | (x1 & x2)", "x1"),
                law(ABSORPTION_STAR, "x1 & (x1 | x2)", "x1"),
                law(DISTRIBUTIVITY, "x1 | (x2 & x3)", "(x1 | x2) & (x1 | x3)"),
                law(DISTRIBUTIVITY_STAR, "x1 & (x2 | x3)", "(x1 & x2) | (x1 & x3)"),
            ],
        }
    }

    pub fn laws(&self) -> &[Law] {
        &self.laws
    }

    pub fn by_name(&self, name: &str) -> Option<&Law> {
        self.laws.iter().find(|l| l.name == name)
    }

    /// The four rewrite families, each pairing a law with its dual, in the
    /// order the rewriting pass lists them before shuffling: associativity,
    /// commutativity, absorption, distributivity.
    pub fn families(&self) -> Vec<LawFamily> {
        let fam = |name: &str, a: &str, b: &str| LawFamily {
            name: name.to_string(),
            members: vec![
                self.by_name(a).expect("catalog member").clone(),
                self.by_name(b).expect("catalog member").clone(),
            ],
        };
        vec![
            fam("associativity", ASSOCIATIVITY, ASSOCIATIVITY_STAR),
            fam("commutativity", COMMUTATIVITY, COMMUTATIVITY_STAR),
            fam("absorption", ABSORPTION, ABSORPTION_STAR),
            fam("distributivity", DISTRIBUTIVITY, DISTRIBUTIVITY_STAR),
        ]
    }
}

/// Names of all eight laws in matrix column order.
pub fn law_names() -> [&'static str; LAW_COUNT] {
    [
        COMMUTATIVITY,
        COMMUTATIVITY_STAR,
        ASSOCIATIVITY,
        ASSOCIATIVITY_STAR,
        ABSORPTION,
        ABSORPTION_STAR,
        DISTRIBUTIVITY,
        DISTRIBUTIVITY_STAR,
    ]
}
