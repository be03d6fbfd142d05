//! Prints specs and terms back to concrete syntax.
//!
//! Output reparses to a structurally identical AST (checked by property
//! tests). Parentheses are inserted only where precedence demands them.

use std::fmt::Write;

use super::ast::{Equation, Spec, Term};
use crate::event::Atom;
use crate::pattern::{FieldPattern, PatternBody, PatternDecl};

// Precedence levels, loosest to tightest; `atom` level needs no parens.
const PREC_SHUFFLE: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_SEQ: u8 = 4;
const PREC_STAR: u8 = 5;
const PREC_ATOM: u8 = 6;

fn atom_text(atom: &Atom) -> String {
    match atom {
        Atom::Str(s) => format!("'{s}'"),
        Atom::Num(n) => n.to_string(),
        // No boolean literal exists in the surface syntax; quote the value
        // so output stays parseable (it then denotes a string atom).
        Atom::Bool(b) => format!("'{b}'"),
    }
}

fn field_pattern_text(pattern: &FieldPattern) -> String {
    match pattern {
        FieldPattern::Literal(atom) => atom_text(atom),
        FieldPattern::Wildcard => "_".to_string(),
        FieldPattern::Var(v) => v.clone(),
        FieldPattern::Nested(body) => body_text(body),
    }
}

fn body_text(body: &PatternBody) -> String {
    let fields: Vec<String> = body
        .constraints
        .iter()
        .map(|(key, pattern)| format!("{key}:{}", field_pattern_text(pattern)))
        .collect();
    format!("{{{}}}", fields.join(", "))
}

fn decl_text(decl: &PatternDecl) -> String {
    let mut out = decl.name.clone();
    if !decl.params.is_empty() {
        let _ = write!(out, "({})", decl.params.join(", "));
    }
    out.push_str(" matches ");
    let alts: Vec<String> = decl.alternatives.iter().map(body_text).collect();
    out.push_str(&alts.join(" | "));
    out.push(';');
    out
}

fn write_term(out: &mut String, term: &Term, min_prec: u8) {
    let prec = match term {
        Term::Shuffle(..) => PREC_SHUFFLE,
        Term::Or(..) => PREC_OR,
        Term::And(..) => PREC_AND,
        Term::Seq(..) => PREC_SEQ,
        Term::Star(..) => PREC_STAR,
        Term::Epsilon | Term::Pattern(_) | Term::Let(..) | Term::EqRef(_) => PREC_ATOM,
    };
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match term {
        Term::Epsilon => out.push_str("<empty>"),
        Term::Pattern(pref) => {
            out.push_str(&pref.name);
            if !pref.args.is_empty() {
                let args: Vec<String> = pref.args.iter().map(field_pattern_text).collect();
                let _ = write!(out, "({})", args.join(", "));
            }
        }
        Term::Seq(a, b) => {
            let mut left = String::new();
            write_term(&mut left, a, PREC_SEQ);
            let mut right = String::new();
            write_term(&mut right, b, PREC_SEQ + 1);
            // A right operand that starts with '(' would read as an
            // argument list for a name ending the left operand; group the
            // left side to keep the juxtaposition unambiguous.
            if right.starts_with('(')
                && left.ends_with(|c: char| c.is_ascii_alphanumeric() || c == '_')
            {
                let _ = write!(out, "({left})");
            } else {
                out.push_str(&left);
            }
            out.push(' ');
            out.push_str(&right);
        }
        Term::Shuffle(a, b) => {
            write_term(out, a, PREC_SHUFFLE);
            out.push_str(" | ");
            write_term(out, b, PREC_SHUFFLE + 1);
        }
        Term::And(a, b) => {
            write_term(out, a, PREC_AND);
            out.push_str(" /\\ ");
            write_term(out, b, PREC_AND + 1);
        }
        Term::Or(a, b) => {
            write_term(out, a, PREC_OR);
            out.push_str(" \\/ ");
            write_term(out, b, PREC_OR + 1);
        }
        Term::Star(t) => {
            // The grammar allows one postfix star per atom, so starred
            // non-atoms (including nested stars) are parenthesized.
            write_term(out, t, PREC_ATOM);
            out.push('*');
        }
        Term::Let(vars, body) => {
            let _ = write!(out, "{{let {}; ", vars.join(", "));
            write_term(out, body, PREC_SHUFFLE);
            out.push('}');
        }
        Term::EqRef(name) => out.push_str(name),
    }
    if parens {
        out.push(')');
    }
}

pub fn format_term(term: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, term, PREC_SHUFFLE);
    out
}

fn equation_text(equation: &Equation) -> String {
    format!("{} = {};", equation.name, format_term(&equation.body))
}

pub fn format_spec(spec: &Spec) -> String {
    let mut out = String::new();
    for decl in &spec.decls {
        out.push_str(&decl_text(decl));
        out.push('\n');
    }
    for equation in &spec.equations {
        out.push_str(&equation_text(equation));
        out.push('\n');
    }
    out
}
