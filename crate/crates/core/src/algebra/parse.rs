//! Parser for the infix term syntax.
//!
//! Grammar, with `&` binding tighter than `|` and both left-associative:
//!
//! ```text
//! term  := joins
//! joins := meets ("|" meets)*
//! meets := atom ("&" atom)*
//! atom  := variable | "(" term ")"
//! variable := "x" [1-9][0-9]*
//! ```
//!
//! Whitespace between tokens is ignored. Errors carry the byte offset of the
//! offending token so callers can point at the input.

use thiserror::Error;

use super::Term;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character `{found}` at byte {offset}")]
    UnexpectedChar { found: char, offset: usize },
    #[error("expected a variable or `(` at byte {offset}")]
    ExpectedAtom { offset: usize },
    #[error("variable at byte {offset} needs a positive index, like x1")]
    BadVariableIndex { offset: usize },
    #[error("unclosed `(` opened at byte {offset}")]
    UnclosedParen { offset: usize },
    #[error("trailing input starting at byte {offset}")]
    TrailingInput { offset: usize },
    #[error("empty input")]
    Empty,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser { bytes: input.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn joins(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.meets()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.meets()?;
            acc = Term::join(acc, rhs);
        }
        Ok(acc)
    }

    fn meets(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = Term::meet(acc, rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'(') => {
                let open = self.pos;
                self.pos += 1;
                let inner = self.joins()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(ParseError::UnclosedParen { offset: open })
                }
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let digits_start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = &self.bytes[digits_start..self.pos];
                if digits.is_empty() || digits[0] == b'0' {
                    return Err(ParseError::BadVariableIndex { offset: start });
                }
                let text = std::str::from_utf8(digits).expect("ascii digits");
                let index: usize =
                    text.parse().map_err(|_| ParseError::BadVariableIndex { offset: start })?;
                Ok(Term::Variable(index))
            }
            Some(_) => Err(ParseError::ExpectedAtom { offset: self.pos }),
            None => Err(ParseError::ExpectedAtom { offset: self.pos }),
        }
    }
}

/// Parses a term like `x1 & (x2 | x3)`.
pub fn parse_term(input: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(input);
    if p.peek().is_none() {
        return Err(ParseError::Empty);
    }
    let term = p.joins()?;
    if let Some(b) = p.peek() {
        let found = char::from(b);
        let _ = found;
        return Err(ParseError::TrailingInput { offset: p.pos });
    }
    Ok(term)
}
