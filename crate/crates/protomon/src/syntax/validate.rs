//! Static checks run after parsing, before a spec may be monitored.
//!
//! Beyond the obvious resolution checks (names, arities, `Main`), two
//! families of rules keep the runtime simple and sound:
//!
//! * **Scoping.** Variables in declaration bodies must be parameters of
//!   that declaration; variables in equation bodies must be introduced by
//!   an enclosing `let`. Equations are therefore closed — no variable
//!   crosses an equation boundary.
//! * **No live re-binding.** The monitor keeps one flat variable
//!   environment per configuration, so a `let` variable must never enter
//!   scope while a binding for the same name may still be live. We reject
//!   conservatively: a `let` may not shadow an enclosing `let`, may not
//!   collide with `let`s reachable through equation references inside its
//!   body, and the two sides of `/\` or `|` may not both declare the same
//!   variable.
//!
//! Recursion through equations must be guarded: following only positions
//! reachable without consuming an event, no equation may reach itself.
//! This makes nullability and derivative computation terminate.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::ast::{Spec, Term, MAIN};
use crate::pattern::{FieldPattern, PatternBody};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidationErrorKind {
    DuplicateDefinition,
    MissingMain,
    UndefinedPattern,
    UndefinedEquation,
    ArityMismatch,
    UnboundVariable,
    ShadowedVariable,
    UnguardedRecursion,
}

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize)]
#[error("{message} at line {line}, column {column}")]
pub struct ValidationError {
    pub kind: ValidationErrorKind,
    pub message: String,
    pub line: u32,
    pub column: u32,
}

struct Checker<'a> {
    spec: &'a Spec,
    errors: Vec<ValidationError>,
}

impl<'a> Checker<'a> {
    fn push(&mut self, kind: ValidationErrorKind, message: String, at: (u32, u32)) {
        self.errors.push(ValidationError {
            kind,
            message,
            line: at.0,
            column: at.1,
        });
    }

    fn check_duplicates(&mut self) {
        let mut seen = BTreeSet::new();
        let decls: Vec<(String, (u32, u32))> = self
            .spec
            .decls
            .iter()
            .map(|d| d.name.clone())
            .zip(self.spec.decl_positions.iter().copied())
            .collect();
        for (name, pos) in decls {
            if !seen.insert(name.clone()) {
                self.push(
                    ValidationErrorKind::DuplicateDefinition,
                    format!("event type '{name}' is declared more than once"),
                    pos,
                );
            }
        }
        let mut seen = BTreeSet::new();
        let equations: Vec<(String, (u32, u32))> = self
            .spec
            .equations
            .iter()
            .map(|e| e.name.clone())
            .zip(self.spec.equation_positions.iter().copied())
            .collect();
        for (name, pos) in equations {
            if !seen.insert(name.clone()) {
                self.push(
                    ValidationErrorKind::DuplicateDefinition,
                    format!("equation '{name}' is defined more than once"),
                    pos,
                );
            }
        }
    }

    fn check_decl_bodies(&mut self) {
        let spec = self.spec;
        for (decl, pos) in spec.decls.iter().zip(spec.decl_positions.iter().copied()) {
            let params: BTreeSet<&str> = decl.params.iter().map(String::as_str).collect();
            let mut stray = BTreeSet::new();
            for alternative in &decl.alternatives {
                collect_body_vars(alternative, &mut stray);
            }
            for var in stray {
                if !params.contains(var.as_str()) {
                    self.push(
                        ValidationErrorKind::UnboundVariable,
                        format!(
                            "variable '{var}' in event type '{}' is not a parameter",
                            decl.name
                        ),
                        pos,
                    );
                }
            }
        }
    }

    /// Resolution, arity, and scoping, per equation. Returns false if any
    /// resolution problem was found (guardedness is skipped then).
    fn check_equations(&mut self) -> bool {
        let before = self.errors.len();
        let spec = self.spec;
        for (eq, pos) in spec
            .equations
            .iter()
            .zip(spec.equation_positions.iter().copied())
        {
            let mut scope = BTreeSet::new();
            self.check_term(&eq.body, &mut scope, pos);
        }
        self.errors.len() == before
    }

    fn check_term(&mut self, term: &Term, scope: &mut BTreeSet<String>, pos: (u32, u32)) {
        match term {
            Term::Epsilon => {}
            Term::Pattern(pref) => {
                let spec = self.spec;
                match spec.decl(&pref.name) {
                    None => self.push(
                        ValidationErrorKind::UndefinedPattern,
                        format!("event type '{}' is not declared", pref.name),
                        pos,
                    ),
                    Some(decl) if decl.params.len() != pref.args.len() => {
                        let msg = format!(
                            "event type '{}' takes {} argument(s), {} given",
                            pref.name,
                            decl.params.len(),
                            pref.args.len()
                        );
                        self.push(ValidationErrorKind::ArityMismatch, msg, pos);
                    }
                    Some(_) => {}
                }
                let mut used = BTreeSet::new();
                for arg in &pref.args {
                    collect_field_pattern_vars(arg, &mut used);
                }
                for var in used {
                    if !scope.contains(&var) {
                        self.push(
                            ValidationErrorKind::UnboundVariable,
                            format!("variable '{var}' is not bound by any enclosing let"),
                            pos,
                        );
                    }
                }
            }
            Term::Seq(a, b) | Term::Or(a, b) => {
                self.check_term(a, scope, pos);
                self.check_term(b, scope, pos);
            }
            Term::Shuffle(a, b) | Term::And(a, b) => {
                self.check_term(a, scope, pos);
                self.check_term(b, scope, pos);
                let left = self.spec.let_vars_reachable(a);
                let right = self.spec.let_vars_reachable(b);
                for var in left.intersection(&right) {
                    let op = if matches!(term, Term::And(..)) {
                        "/\\"
                    } else {
                        "|"
                    };
                    self.push(
                        ValidationErrorKind::ShadowedVariable,
                        format!("variable '{var}' is let-bound on both sides of '{op}'"),
                        pos,
                    );
                }
            }
            Term::Star(t) => self.check_term(t, scope, pos),
            Term::Let(vars, body) => {
                let mut fresh = Vec::new();
                let mut local = BTreeSet::new();
                for var in vars {
                    if !local.insert(var.clone()) {
                        self.push(
                            ValidationErrorKind::ShadowedVariable,
                            format!("variable '{var}' is declared twice in one let"),
                            pos,
                        );
                    } else if scope.contains(var) {
                        self.push(
                            ValidationErrorKind::ShadowedVariable,
                            format!("let variable '{var}' shadows an enclosing let"),
                            pos,
                        );
                    } else {
                        scope.insert(var.clone());
                        fresh.push(var.clone());
                    }
                }
                // A let variable must not collide with lets hidden behind
                // equation references in its body: expanding such an
                // equation while the variable is live would re-bind it.
                let through_refs = self.reachable_equation_let_vars(body);
                for var in vars {
                    if through_refs.contains(var) {
                        self.push(
                            ValidationErrorKind::ShadowedVariable,
                            format!(
                                "let variable '{var}' collides with a let inside a referenced equation"
                            ),
                            pos,
                        );
                    }
                }
                self.check_term(body, scope, pos);
                for var in fresh {
                    scope.remove(&var);
                }
            }
            Term::EqRef(name) => {
                if self.spec.equation(name).is_none() {
                    self.push(
                        ValidationErrorKind::UndefinedEquation,
                        format!("equation '{name}' is not defined"),
                        pos,
                    );
                }
            }
        }
    }

    /// Let variables declared in equations reachable from `term` — not
    /// counting lets appearing syntactically in `term` itself.
    fn reachable_equation_let_vars(&self, term: &Term) -> BTreeSet<String> {
        let mut queue: Vec<&str> = Vec::new();
        collect_eq_refs(term, &mut queue);
        let mut visited = BTreeSet::new();
        let mut vars = BTreeSet::new();
        while let Some(name) = queue.pop() {
            if !visited.insert(name.to_string()) {
                continue;
            }
            if let Some(eq) = self.spec.equation(name) {
                collect_let_vars(&eq.body, &mut vars);
                collect_eq_refs(&eq.body, &mut queue);
            }
        }
        vars
    }

    fn check_guardedness(&mut self) {
        let nullable = equation_nullability(self.spec);
        // Edges lead from an equation to every equation reachable at a
        // position where no event has been consumed yet.
        let mut edges: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for eq in &self.spec.equations {
            let mut heads = BTreeSet::new();
            head_refs(&eq.body, &nullable, &mut heads);
            edges.insert(eq.name.as_str(), heads);
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            InProgress,
            Done,
        }
        fn visit<'s>(
            node: &'s str,
            edges: &BTreeMap<&'s str, BTreeSet<&'s str>>,
            marks: &mut BTreeMap<&'s str, Mark>,
            cyclic: &mut BTreeSet<&'s str>,
        ) {
            match marks.get(node) {
                Some(Mark::Done) => return,
                Some(Mark::InProgress) => {
                    cyclic.insert(node);
                    return;
                }
                None => {}
            }
            marks.insert(node, Mark::InProgress);
            if let Some(targets) = edges.get(node) {
                for target in targets {
                    visit(target, edges, marks, cyclic);
                }
            }
            marks.insert(node, Mark::Done);
        }

        let mut marks = BTreeMap::new();
        let mut cyclic = BTreeSet::new();
        for eq in &self.spec.equations {
            visit(eq.name.as_str(), &edges, &mut marks, &mut cyclic);
        }
        let cyclic: Vec<String> = cyclic.iter().map(|s| s.to_string()).collect();
        for name in cyclic {
            let pos = self
                .spec
                .equations
                .iter()
                .position(|e| e.name == name)
                .map(|i| self.spec.equation_positions[i])
                .unwrap_or((1, 1));
            self.push(
                ValidationErrorKind::UnguardedRecursion,
                format!("equation '{name}' can reach itself without consuming an event"),
                pos,
            );
        }
    }
}

fn collect_body_vars(body: &PatternBody, out: &mut BTreeSet<String>) {
    for (_, pattern) in &body.constraints {
        collect_field_pattern_vars(pattern, out);
    }
}

fn collect_field_pattern_vars(pattern: &FieldPattern, out: &mut BTreeSet<String>) {
    match pattern {
        FieldPattern::Var(v) => {
            out.insert(v.clone());
        }
        FieldPattern::Nested(body) => collect_body_vars(body, out),
        FieldPattern::Literal(_) | FieldPattern::Wildcard => {}
    }
}

fn collect_let_vars(term: &Term, out: &mut BTreeSet<String>) {
    match term {
        Term::Let(vars, body) => {
            out.extend(vars.iter().cloned());
            collect_let_vars(body, out);
        }
        Term::Seq(a, b) | Term::Shuffle(a, b) | Term::And(a, b) | Term::Or(a, b) => {
            collect_let_vars(a, out);
            collect_let_vars(b, out);
        }
        Term::Star(t) => collect_let_vars(t, out),
        Term::Epsilon | Term::Pattern(_) | Term::EqRef(_) => {}
    }
}

fn collect_eq_refs<'t>(term: &'t Term, out: &mut Vec<&'t str>) {
    match term {
        Term::EqRef(name) => out.push(name),
        Term::Seq(a, b) | Term::Shuffle(a, b) | Term::And(a, b) | Term::Or(a, b) => {
            collect_eq_refs(a, out);
            collect_eq_refs(b, out);
        }
        Term::Star(t) | Term::Let(_, t) => collect_eq_refs(t, out),
        Term::Epsilon | Term::Pattern(_) => {}
    }
}

impl Spec {
    /// Every variable declared by a `let` inside `term`, following equation
    /// references transitively.
    pub fn let_vars_reachable(&self, term: &Term) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        collect_let_vars(term, &mut vars);
        let mut queue = Vec::new();
        collect_eq_refs(term, &mut queue);
        let mut visited = BTreeSet::new();
        while let Some(name) = queue.pop() {
            if !visited.insert(name.to_string()) {
                continue;
            }
            if let Some(eq) = self.equation(name) {
                collect_let_vars(&eq.body, &mut vars);
                collect_eq_refs(&eq.body, &mut queue);
            }
        }
        vars
    }
}

/// Whether each equation's language contains the empty trace, as the least
/// fixpoint (unresolved references count as non-nullable).
pub(crate) fn equation_nullability(spec: &Spec) -> BTreeMap<String, bool> {
    let mut table: BTreeMap<String, bool> = spec
        .equations
        .iter()
        .map(|e| (e.name.clone(), false))
        .collect();
    loop {
        let mut changed = false;
        for eq in &spec.equations {
            if !table[&eq.name] && term_nullable(&eq.body, &table) {
                table.insert(eq.name.clone(), true);
                changed = true;
            }
        }
        if !changed {
            return table;
        }
    }
}

pub(crate) fn term_nullable(term: &Term, table: &BTreeMap<String, bool>) -> bool {
    match term {
        Term::Epsilon | Term::Star(_) => true,
        Term::Pattern(_) => false,
        Term::Seq(a, b) | Term::Shuffle(a, b) | Term::And(a, b) => {
            term_nullable(a, table) && term_nullable(b, table)
        }
        Term::Or(a, b) => term_nullable(a, table) || term_nullable(b, table),
        Term::Let(_, t) => term_nullable(t, table),
        Term::EqRef(name) => table.get(name).copied().unwrap_or(false),
    }
}

fn head_refs<'t>(term: &'t Term, nullable: &BTreeMap<String, bool>, out: &mut BTreeSet<&'t str>) {
    match term {
        Term::Epsilon | Term::Pattern(_) => {}
        Term::Seq(a, b) => {
            head_refs(a, nullable, out);
            if term_nullable(a, nullable) {
                head_refs(b, nullable, out);
            }
        }
        Term::Shuffle(a, b) | Term::And(a, b) | Term::Or(a, b) => {
            head_refs(a, nullable, out);
            head_refs(b, nullable, out);
        }
        Term::Star(t) | Term::Let(_, t) => head_refs(t, nullable, out),
        Term::EqRef(name) => {
            out.insert(name);
        }
    }
}

/// Runs every check; an empty result means the spec is safe to monitor.
pub fn validate(spec: &Spec) -> Vec<ValidationError> {
    let mut checker = Checker {
        spec,
        errors: Vec::new(),
    };
    checker.check_duplicates();
    checker.check_decl_bodies();
    if checker.spec.equation(MAIN).is_none() {
        checker.push(
            ValidationErrorKind::MissingMain,
            "no 'Main' equation defined".to_string(),
            (1, 1),
        );
    }
    if checker.check_equations() {
        checker.check_guardedness();
    }
    checker.errors
}
