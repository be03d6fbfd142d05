//! The protocol-specification language: lexing, parsing, validation,
//! and printing.
//!
//! A specification is a list of event-type declarations (`name matches
//! {…};`) followed by equations (`Name = term;`). Terms combine event-type
//! references with sequence (juxtaposition), choice `\/`, intersection
//! `/\`, interleaving `|`, repetition `*`, and `{let x, y; …}` blocks that
//! scope parametric variables.

mod ast;
mod lexer;
mod parser;
mod pretty;
mod validate;

pub use ast::{Equation, PatternRef, Spec, Term, MAIN};
pub use lexer::{LexError, Token, TokenKind};
pub use parser::{parse_spec, parse_term, ParseError, ParseErrorKind};
pub use pretty::{format_spec, format_term};
pub use validate::{validate, ValidationError, ValidationErrorKind};

pub(crate) use validate::{equation_nullability, term_nullable};

use crate::pattern::PatternDecl;

impl Spec {
    /// Parses and validates in one step; the usual entry point.
    pub fn compile(source: &str) -> Result<Spec, CompileError> {
        let spec = parse_spec(source).map_err(CompileError::Parse)?;
        let problems = validate(&spec);
        if problems.is_empty() {
            Ok(spec)
        } else {
            Err(CompileError::Validate(problems))
        }
    }

    pub fn decl(&self, name: &str) -> Option<&PatternDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn equation(&self, name: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileError {
    Parse(ParseError),
    Validate(Vec<ValidationError>),
}

impl std::fmt::Display for CompileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompileError::Parse(e) => write!(f, "{e}"),
            CompileError::Validate(problems) => {
                for (i, p) in problems.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for CompileError {}
