//! Event-type patterns and the matching relation.
//!
//! A pattern is a set of field constraints; an event matches when every
//! constraint is satisfied, so patterns describe *at least* what must be
//! present and extra event fields never hurt. Constraints are ordered:
//! repeating a key addresses successive elements of a list-valued field,
//! which is how `{name:'answer', name:'result', ...}` pins both the functor
//! and its first nested functor.
//!
//! Variables make patterns parametric. Matching produces [`Binding`]s — there
//! can be several when a variable could be bound more than one way, though
//! with at-most-once keys per constraint the common case is zero or one.

use std::collections::BTreeMap;
use std::fmt;

use crate::event::{Atom, Event, Record, Value};

/// What a single `key: …` constraint demands of the field under `key`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldPattern {
    /// Field (element) must equal this atom exactly.
    Literal(Atom),
    /// Field must be present; any value will do.
    Wildcard,
    /// Field (element) must be an atom; binds or checks the variable.
    Var(String),
    /// Field must be a record matching the nested pattern.
    Nested(PatternBody),
}

/// An ordered conjunction of field constraints.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternBody {
    pub constraints: Vec<(String, FieldPattern)>,
}

impl PatternBody {
    pub fn new(constraints: Vec<(String, FieldPattern)>) -> Self {
        PatternBody { constraints }
    }
}

/// A named, possibly parametric event type. Several alternative bodies are
/// allowed; the event type is their union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternDecl {
    pub name: String,
    pub params: Vec<String>,
    pub alternatives: Vec<PatternBody>,
}

/// A partial map from variable names to atoms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Binding(BTreeMap<String, Atom>);

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn get(&self, var: &str) -> Option<&Atom> {
        self.0.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Atom)> {
        self.0.iter()
    }

    /// Returns an extended copy. `None` if `var` is already bound to a
    /// different atom.
    #[must_use]
    pub fn with(&self, var: &str, atom: &Atom) -> Option<Binding> {
        match self.0.get(var) {
            Some(existing) if existing != atom => None,
            Some(_) => Some(self.clone()),
            None => {
                let mut next = self.clone();
                next.0.insert(var.to_string(), atom.clone());
                Some(next)
            }
        }
    }

    /// Unions two bindings; `None` on any disagreement.
    #[must_use]
    pub fn merge(&self, other: &Binding) -> Option<Binding> {
        let mut merged = self.clone();
        for (var, atom) in other.iter() {
            merged = merged.with(var, atom)?;
        }
        Some(merged)
    }

    /// Returns a copy with the given variables dropped.
    #[must_use]
    pub fn without<'a, I>(&self, vars: I) -> Binding
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut next = self.clone();
        for var in vars {
            next.0.remove(var);
        }
        next
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (var, atom)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{var}={atom}")?;
        }
        write!(f, "}}")
    }
}

/// The field under `key` viewed as a sequence of atoms, for positional
/// (repeated-key) constraints. A scalar is a one-element sequence; a record
/// has no positional view.
fn atom_at<'a>(record: &'a Record, key: &str, index: usize) -> Option<&'a Atom> {
    match record.get(key)? {
        Value::Atom(a) => {
            if index == 0 {
                Some(a)
            } else {
                None
            }
        }
        Value::List(items) => items.get(index),
        Value::Record(_) => None,
    }
}

fn match_constraint(
    record: &Record,
    key: &str,
    occurrence: usize,
    pattern: &FieldPattern,
    binding: &Binding,
) -> Vec<Binding> {
    match pattern {
        FieldPattern::Literal(expected) => match atom_at(record, key, occurrence) {
            Some(actual) if actual == expected => vec![binding.clone()],
            _ => vec![],
        },
        FieldPattern::Wildcard => {
            // First occurrence asserts mere presence; later occurrences
            // demand the list to be long enough.
            let present = if occurrence == 0 {
                record.contains_key(key)
            } else {
                atom_at(record, key, occurrence).is_some()
            };
            if present {
                vec![binding.clone()]
            } else {
                vec![]
            }
        }
        FieldPattern::Var(var) => match atom_at(record, key, occurrence) {
            Some(actual) => binding.with(var, actual).into_iter().collect(),
            None => vec![],
        },
        FieldPattern::Nested(body) => {
            if occurrence != 0 {
                return vec![];
            }
            match record.get(key) {
                Some(Value::Record(inner)) => match_body(body, inner, binding),
                _ => vec![],
            }
        }
    }
}

/// All bindings under which `record` satisfies `body`, extending `binding`.
/// Empty means no match. Duplicates are collapsed.
pub fn match_body(body: &PatternBody, record: &Record, binding: &Binding) -> Vec<Binding> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut candidates = vec![binding.clone()];
    for (key, pattern) in &body.constraints {
        let occurrence = {
            let slot = seen.entry(key.as_str()).or_insert(0);
            let occ = *slot;
            *slot += 1;
            occ
        };
        let mut next = Vec::new();
        for candidate in &candidates {
            for produced in match_constraint(record, key, occurrence, pattern, candidate) {
                if !next.contains(&produced) {
                    next.push(produced);
                }
            }
        }
        if next.is_empty() {
            return vec![];
        }
        candidates = next;
    }
    candidates
}

fn substitute_body(body: &PatternBody, args: &BTreeMap<&str, &FieldPattern>) -> PatternBody {
    let constraints = body
        .constraints
        .iter()
        .map(|(key, pattern)| {
            let substituted = match pattern {
                FieldPattern::Var(v) => match args.get(v.as_str()) {
                    Some(replacement) => (*replacement).clone(),
                    None => pattern.clone(),
                },
                FieldPattern::Nested(inner) => FieldPattern::Nested(substitute_body(inner, args)),
                other => other.clone(),
            };
            (key.clone(), substituted)
        })
        .collect();
    PatternBody::new(constraints)
}

/// Matches an event against a declaration applied to the given arguments.
/// Arguments replace the declared parameters positionally before matching;
/// alternatives contribute their bindings jointly.
///
/// Callers must pass exactly `decl.params.len()` arguments.
pub fn match_decl(
    decl: &PatternDecl,
    args: &[FieldPattern],
    event: &Event,
    binding: &Binding,
) -> Vec<Binding> {
    assert_eq!(
        decl.params.len(),
        args.len(),
        "arity mismatch for event type '{}'",
        decl.name
    );
    let substitution: BTreeMap<&str, &FieldPattern> = decl
        .params
        .iter()
        .map(String::as_str)
        .zip(args.iter())
        .collect();
    let mut results = Vec::new();
    for alternative in &decl.alternatives {
        let ground = substitute_body(alternative, &substitution);
        for produced in match_body(&ground, event.entries(), binding) {
            if !results.contains(&produced) {
                results.push(produced);
            }
        }
    }
    results
}

/// Whether any declared event type matches the event at all, with every
/// parameter left unconstrained. Events failing this are outside the
/// protocol's vocabulary and are skipped rather than judged.
pub fn is_relevant(decls: &[PatternDecl], event: &Event) -> bool {
    decls.iter().any(|decl| {
        let wildcards = vec![FieldPattern::Wildcard; decl.params.len()];
        !match_decl(decl, &wildcards, event, &Binding::new()).is_empty()
    })
}
