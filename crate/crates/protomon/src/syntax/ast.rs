//! Abstract syntax for specifications.

use crate::pattern::{FieldPattern, PatternDecl};

/// A reference to a declared event type, with arguments for its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternRef {
    pub name: String,
    pub args: Vec<FieldPattern>,
}

/// A trace term. `Epsilon` has no surface syntax; it only arises as the
/// residual of a fully consumed term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Epsilon,
    Pattern(PatternRef),
    /// Juxtaposition: all of the left, then all of the right.
    Seq(Box<Term>, Box<Term>),
    /// `|`: any interleaving of the two operands.
    Shuffle(Box<Term>, Box<Term>),
    /// `/\`: traces admitted by both operands.
    And(Box<Term>, Box<Term>),
    /// `\/`: traces admitted by either operand.
    Or(Box<Term>, Box<Term>),
    /// Postfix `*`: zero or more concatenated rounds.
    Star(Box<Term>),
    /// `{let x, y; t}`: fresh variables scoped to `t`.
    Let(Vec<String>, Box<Term>),
    /// An equation name; expanded lazily.
    EqRef(String),
}

impl Term {
    pub fn pattern(name: &str, args: Vec<FieldPattern>) -> Term {
        Term::Pattern(PatternRef {
            name: name.to_string(),
            args,
        })
    }

    pub fn seq(a: Term, b: Term) -> Term {
        Term::Seq(Box::new(a), Box::new(b))
    }

    pub fn shuffle(a: Term, b: Term) -> Term {
        Term::Shuffle(Box::new(a), Box::new(b))
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::Or(Box::new(a), Box::new(b))
    }

    pub fn star(t: Term) -> Term {
        Term::Star(Box::new(t))
    }

    pub fn let_in(vars: &[&str], t: Term) -> Term {
        Term::Let(vars.iter().map(|v| v.to_string()).collect(), Box::new(t))
    }

    pub fn eq_ref(name: &str) -> Term {
        Term::EqRef(name.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub name: String,
    pub body: Term,
}

/// A parsed specification: event-type declarations plus equations.
/// `decl_positions` / `equation_positions` run parallel to the definition
/// lists and record (line, column) of each definition's name, for
/// diagnostics.
#[derive(Debug, Clone, Default)]
pub struct Spec {
    pub decls: Vec<PatternDecl>,
    pub equations: Vec<Equation>,
    pub decl_positions: Vec<(u32, u32)>,
    pub equation_positions: Vec<(u32, u32)>,
}

pub const MAIN: &str = "Main";
