//! Recursive-descent parser.
//!
//! Operator precedence, loosest first: shuffle `|`, then `\/`, then `/\`,
//! then juxtaposition (sequence), then postfix `*`. All binary operators
//! associate to the left. `|` doubles as the separator between alternative
//! bodies of one `matches` declaration; context disambiguates.

use serde::Serialize;
use thiserror::Error;

use super::ast::{Equation, PatternRef, Spec, Term};
use super::lexer::{tokenize, Token, TokenKind};
use crate::event::Atom;
use crate::pattern::{FieldPattern, PatternBody, PatternDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
}

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize)]
#[error("{message} at line {line}, column {column}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub line: u32,
    pub column: u32,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind) -> Result<Token, ParseError> {
        if self.at(kind) {
            Ok(self.bump())
        } else {
            Err(self.error_here(format!("expected {kind}, found {}", self.peek().kind)))
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let token = self.peek();
        ParseError {
            kind: ParseErrorKind::Syntax,
            message: message.into(),
            line: token.line,
            column: token.column,
        }
    }

    fn lower_ident(&mut self, what: &str) -> Result<(String, u32, u32), ParseError> {
        match &self.peek().kind {
            TokenKind::LowerIdent(name) => {
                let name = name.clone();
                let token = self.bump();
                Ok((name, token.line, token.column))
            }
            other => Err(self.error_here(format!("expected {what}, found {other}"))),
        }
    }

    // --- declarations -----------------------------------------------------

    fn parse_decl(&mut self) -> Result<(PatternDecl, u32, u32), ParseError> {
        let (name, line, column) = self.lower_ident("event type name")?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::LParen) {
            loop {
                let (param, ..) = self.lower_ident("parameter name")?;
                params.push(param);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(&TokenKind::RParen)?;
        }
        self.expect(&TokenKind::Matches)?;
        let mut alternatives = vec![self.parse_body()?];
        while self.eat(&TokenKind::Shuffle) {
            alternatives.push(self.parse_body()?);
        }
        self.expect(&TokenKind::Semicolon)?;
        Ok((
            PatternDecl {
                name,
                params,
                alternatives,
            },
            line,
            column,
        ))
    }

    fn parse_body(&mut self) -> Result<PatternBody, ParseError> {
        self.expect(&TokenKind::LBrace)?;
        let mut constraints = Vec::new();
        if !self.at(&TokenKind::RBrace) {
            loop {
                let (key, ..) = self.lower_ident("field key")?;
                self.expect(&TokenKind::Colon)?;
                constraints.push((key, self.parse_field_pattern()?));
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(&TokenKind::RBrace)?;
        Ok(PatternBody::new(constraints))
    }

    fn parse_field_pattern(&mut self) -> Result<FieldPattern, ParseError> {
        match &self.peek().kind {
            TokenKind::Str(s) => {
                let atom = Atom::Str(s.clone());
                self.bump();
                Ok(FieldPattern::Literal(atom))
            }
            TokenKind::Number(n) => {
                let atom = Atom::Num(n.clone());
                self.bump();
                Ok(FieldPattern::Literal(atom))
            }
            TokenKind::Underscore => {
                self.bump();
                Ok(FieldPattern::Wildcard)
            }
            TokenKind::LowerIdent(v) => {
                let var = v.clone();
                self.bump();
                Ok(FieldPattern::Var(var))
            }
            TokenKind::LBrace => Ok(FieldPattern::Nested(self.parse_body()?)),
            other => Err(self.error_here(format!(
                "expected a string, number, '_', variable, or nested pattern, found {other}"
            ))),
        }
    }

    // --- terms ------------------------------------------------------------

    fn parse_equation(&mut self) -> Result<(Equation, u32, u32), ParseError> {
        let (name, line, column) = match &self.peek().kind {
            TokenKind::UpperIdent(name) => {
                let name = name.clone();
                let token = self.bump();
                (name, token.line, token.column)
            }
            other => return Err(self.error_here(format!("expected equation name, found {other}"))),
        };
        self.expect(&TokenKind::Equals)?;
        let body = self.parse_term()?;
        self.expect(&TokenKind::Semicolon)?;
        Ok((Equation { name, body }, line, column))
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let mut term = self.parse_or_term()?;
        while self.eat(&TokenKind::Shuffle) {
            term = Term::shuffle(term, self.parse_or_term()?);
        }
        Ok(term)
    }

    fn parse_or_term(&mut self) -> Result<Term, ParseError> {
        let mut term = self.parse_and_term()?;
        while self.eat(&TokenKind::Or) {
            term = Term::or(term, self.parse_and_term()?);
        }
        Ok(term)
    }

    fn parse_and_term(&mut self) -> Result<Term, ParseError> {
        let mut term = self.parse_seq()?;
        while self.eat(&TokenKind::And) {
            term = Term::and(term, self.parse_seq()?);
        }
        Ok(term)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek().kind,
            TokenKind::LowerIdent(_)
                | TokenKind::UpperIdent(_)
                | TokenKind::LParen
                | TokenKind::LBrace
        )
    }

    fn parse_seq(&mut self) -> Result<Term, ParseError> {
        let mut term = self.parse_starred()?;
        while self.starts_atom() {
            term = Term::seq(term, self.parse_starred()?);
        }
        Ok(term)
    }

    fn parse_starred(&mut self) -> Result<Term, ParseError> {
        let term = self.parse_atom()?;
        if self.eat(&TokenKind::Star) {
            Ok(Term::star(term))
        } else {
            Ok(term)
        }
    }

    fn parse_atom(&mut self) -> Result<Term, ParseError> {
        match &self.peek().kind {
            TokenKind::LowerIdent(name) => {
                let name = name.clone();
                self.bump();
                let mut args = Vec::new();
                if self.eat(&TokenKind::LParen) {
                    loop {
                        args.push(self.parse_field_pattern()?);
                        if !self.eat(&TokenKind::Comma) {
                            break;
                        }
                    }
                    self.expect(&TokenKind::RParen)?;
                }
                Ok(Term::Pattern(PatternRef { name, args }))
            }
            TokenKind::UpperIdent(name) => {
                let name = name.clone();
                self.bump();
                Ok(Term::EqRef(name))
            }
            TokenKind::LParen => {
                self.bump();
                let term = self.parse_term()?;
                self.expect(&TokenKind::RParen)?;
                Ok(term)
            }
            TokenKind::LBrace => {
                self.bump();
                self.expect(&TokenKind::Let)?;
                let mut vars = Vec::new();
                loop {
                    let (var, ..) = self.lower_ident("variable name")?;
                    vars.push(var);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(&TokenKind::Semicolon)?;
                let body = self.parse_term()?;
                self.expect(&TokenKind::RBrace)?;
                Ok(Term::Let(vars, Box::new(body)))
            }
            other => Err(self.error_here(format!("expected a term, found {other}"))),
        }
    }

    fn parse_spec(&mut self) -> Result<Spec, ParseError> {
        let mut spec = Spec::default();
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return Ok(spec),
                TokenKind::LowerIdent(_) => {
                    let (decl, line, column) = self.parse_decl()?;
                    spec.decls.push(decl);
                    spec.decl_positions.push((line, column));
                }
                TokenKind::UpperIdent(_) => {
                    let (equation, line, column) = self.parse_equation()?;
                    spec.equations.push(equation);
                    spec.equation_positions.push((line, column));
                }
                other => {
                    return Err(self
                        .error_here(format!("expected a declaration or equation, found {other}")))
                }
            }
        }
    }
}

fn parser_for(source: &str) -> Result<Parser, ParseError> {
    let tokens = tokenize(source).map_err(|e| ParseError {
        kind: ParseErrorKind::Lexical,
        message: e.message,
        line: e.line,
        column: e.column,
    })?;
    Ok(Parser { tokens, pos: 0 })
}

pub fn parse_spec(source: &str) -> Result<Spec, ParseError> {
    parser_for(source)?.parse_spec()
}

/// Parses a single term (no trailing `;`); handy for tests and tools.
pub fn parse_term(source: &str) -> Result<Term, ParseError> {
    let mut parser = parser_for(source)?;
    let term = parser.parse_term()?;
    parser.expect(&TokenKind::Eof)?;
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::FieldPattern as FP;

    fn pref(name: &str, args: Vec<FP>) -> Term {
        Term::pattern(name, args)
    }

    #[test]
    fn precedence_loosest_to_tightest() {
        // shuffle < or < and < seq < star
        let t = parse_term(r"a | b \/ c /\ d e*").unwrap();
        assert_eq!(
            t,
            Term::shuffle(
                pref("a", vec![]),
                Term::or(
                    pref("b", vec![]),
                    Term::and(
                        pref("c", vec![]),
                        Term::seq(pref("d", vec![]), Term::star(pref("e", vec![])))
                    )
                )
            )
        );
    }

    #[test]
    fn binary_operators_associate_left() {
        assert_eq!(
            parse_term(r"a \/ b \/ c").unwrap(),
            Term::or(
                Term::or(pref("a", vec![]), pref("b", vec![])),
                pref("c", vec![])
            )
        );
        assert_eq!(
            parse_term("a b c").unwrap(),
            Term::seq(
                Term::seq(pref("a", vec![]), pref("b", vec![])),
                pref("c", vec![])
            )
        );
    }

    #[test]
    fn parens_override() {
        assert_eq!(
            parse_term(r"(a \/ b) c").unwrap(),
            Term::seq(
                Term::or(pref("a", vec![]), pref("b", vec![])),
                pref("c", vec![])
            )
        );
    }

    #[test]
    fn star_requires_parens_to_stack() {
        assert!(parse_term("a**").is_err());
        assert_eq!(
            parse_term("(a*)*").unwrap(),
            Term::star(Term::star(pref("a", vec![])))
        );
    }

    #[test]
    fn let_block() {
        assert_eq!(
            parse_term("{let x, y; p(x) q(y)}").unwrap(),
            Term::let_in(
                &["x", "y"],
                Term::seq(
                    pref("p", vec![FP::Var("x".into())]),
                    pref("q", vec![FP::Var("y".into())])
                )
            )
        );
    }

    #[test]
    fn pattern_args_accept_field_patterns() {
        assert_eq!(
            parse_term("p('lit', 3, _, v)").unwrap(),
            pref(
                "p",
                vec![
                    FP::Literal(Atom::str("lit")),
                    FP::Literal(Atom::int(3)),
                    FP::Wildcard,
                    FP::Var("v".into()),
                ]
            )
        );
    }

    #[test]
    fn declaration_with_alternatives() {
        let spec = parse_spec("move matches {dir:'up'} | {dir:'down'};\nMain = move*;\n").unwrap();
        assert_eq!(spec.decls.len(), 1);
        assert_eq!(spec.decls[0].alternatives.len(), 2);
        assert_eq!(spec.equations[0].body, Term::star(pref("move", vec![])));
    }

    #[test]
    fn declaration_with_params_and_nested_body() {
        let spec = parse_spec(
            "ask(ag) matches {performative:'question', sender:ag, content:{name:_}};\nMain = ask(_)*;\n",
        )
        .unwrap();
        let decl = &spec.decls[0];
        assert_eq!(decl.params, vec!["ag".to_string()]);
        let body = &decl.alternatives[0];
        assert_eq!(body.constraints[1].1, FP::Var("ag".into()));
        assert!(matches!(body.constraints[2].1, FP::Nested(_)));
    }

    #[test]
    fn empty_constraint_body_is_allowed() {
        let spec = parse_spec("any matches {};\nMain = any*;\n").unwrap();
        assert_eq!(spec.decls[0].alternatives.len(), 1);
        assert!(spec.decls[0].alternatives[0].constraints.is_empty());
    }

    #[test]
    fn missing_semicolon_is_reported() {
        let err = parse_spec("Main = foo").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert!(err.message.contains("';'"), "got: {}", err.message);
    }

    #[test]
    fn empty_source_parses_to_empty_spec() {
        let spec = parse_spec("  // nothing here\n").unwrap();
        assert!(spec.decls.is_empty() && spec.equations.is_empty());
    }

    #[test]
    fn positions_point_at_definition_names() {
        let spec = parse_spec("p matches {a:'x'};\n  Q = p;\n").unwrap();
        assert_eq!(spec.decl_positions, vec![(1, 1)]);
        assert_eq!(spec.equation_positions, vec![(2, 3)]);
    }

    #[test]
    fn error_location_points_at_offending_token() {
        let err = parse_spec("Main = ;\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 8));
    }
}
