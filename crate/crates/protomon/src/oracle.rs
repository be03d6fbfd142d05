//! Brute-force enumeration of a spec's admissible traces, bounded by
//! length, over a fixed finite alphabet of ground events.
//!
//! This is the reference semantics the monitor is tested against: each
//! operator is interpreted directly as a set construction (concatenation,
//! interleaving, intersection, union, assignment projection for `let`,
//! concatenation closure for `*`), with no derivative computation and a
//! separate, purposely naive event matcher. Traces are represented as
//! vectors of alphabet indices.
//!
//! Intended for tests only: cost grows with `|alphabet|^max_len`.

use std::collections::{BTreeMap, BTreeSet};

use crate::event::{Atom, Event, Record, Value};
use crate::pattern::{FieldPattern, PatternBody};
use crate::syntax::{Spec, Term, MAIN};

type Trace = Vec<usize>;
type TraceSet = BTreeSet<Trace>;
type Assign = BTreeMap<String, Atom>;

struct Enumerator<'a> {
    spec: &'a Spec,
    alphabet: &'a [Event],
    /// Every atom occurring in any alphabet event; `let` variables range
    /// over these (values outside can never satisfy a comparison, so they
    /// add no traces).
    candidates: Vec<Atom>,
    /// Equation bodies are closed, so their trace sets depend only on
    /// (name, budget).
    memo: BTreeMap<(String, usize), TraceSet>,
    in_progress: BTreeSet<(String, usize)>,
}

fn collect_atoms(value: &Value, out: &mut Vec<Atom>) {
    match value {
        Value::Atom(a) => {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        Value::List(items) => {
            for a in items {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        Value::Record(r) => {
            for (_, v) in r.iter() {
                collect_atoms(v, out);
            }
        }
    }
}

// --- ground matching, independent of the runtime matcher ----------------

fn subst_field(pattern: &FieldPattern, assign: &Assign) -> FieldPattern {
    match pattern {
        FieldPattern::Var(v) => match assign.get(v) {
            Some(atom) => FieldPattern::Literal(atom.clone()),
            None => pattern.clone(),
        },
        FieldPattern::Nested(body) => FieldPattern::Nested(subst_body(body, assign)),
        other => other.clone(),
    }
}

fn subst_body(body: &PatternBody, assign: &Assign) -> PatternBody {
    PatternBody::new(
        body.constraints
            .iter()
            .map(|(k, p)| (k.clone(), subst_field(p, assign)))
            .collect(),
    )
}

/// The field under `key` flattened to its positional atoms, or `None` when
/// the field is absent or a record (records have no positions).
fn positional<'r>(record: &'r Record, key: &str) -> Option<Vec<&'r Atom>> {
    match record.get(key)? {
        Value::Atom(a) => Some(vec![a]),
        Value::List(items) => Some(items.iter().collect()),
        Value::Record(_) => None,
    }
}

fn ground_body_matches(body: &PatternBody, record: &Record) -> bool {
    let mut occurrence: BTreeMap<&str, usize> = BTreeMap::new();
    for (key, pattern) in &body.constraints {
        let index = {
            let slot = occurrence.entry(key.as_str()).or_insert(0);
            let i = *slot;
            *slot += 1;
            i
        };
        let ok = match pattern {
            FieldPattern::Literal(expected) => positional(record, key)
                .and_then(|atoms| atoms.get(index).copied())
                .is_some_and(|actual| actual == expected),
            FieldPattern::Wildcard => {
                if index == 0 {
                    record.contains_key(key)
                } else {
                    positional(record, key).is_some_and(|atoms| atoms.len() > index)
                }
            }
            // A variable surviving substitution has no value; it can match
            // nothing.
            FieldPattern::Var(_) => false,
            FieldPattern::Nested(inner) => {
                index == 0
                    && matches!(record.get(key), Some(Value::Record(r))
                        if ground_body_matches(inner, r))
            }
        };
        if !ok {
            return false;
        }
    }
    true
}

fn singleton_matches(spec: &Spec, name: &str, args: &[FieldPattern], event: &Event) -> bool {
    let Some(decl) = spec.decl(name) else {
        return false;
    };
    if decl.params.len() != args.len() {
        return false;
    }
    decl.alternatives.iter().any(|alternative| {
        let by_param: BTreeMap<&str, &FieldPattern> = decl
            .params
            .iter()
            .map(String::as_str)
            .zip(args.iter())
            .collect();
        let ground = replace_params(alternative, &by_param);
        ground_body_matches(&ground, event.entries())
    })
}

fn replace_params(body: &PatternBody, by_param: &BTreeMap<&str, &FieldPattern>) -> PatternBody {
    PatternBody::new(
        body.constraints
            .iter()
            .map(|(k, p)| (k.clone(), replace_params_field(p, by_param)))
            .collect(),
    )
}

fn replace_params_field(
    pattern: &FieldPattern,
    by_param: &BTreeMap<&str, &FieldPattern>,
) -> FieldPattern {
    match pattern {
        FieldPattern::Var(v) => match by_param.get(v.as_str()) {
            Some(replacement) => (*replacement).clone(),
            None => pattern.clone(),
        },
        FieldPattern::Nested(body) => FieldPattern::Nested(replace_params(body, by_param)),
        other => other.clone(),
    }
}

// --- set constructions --------------------------------------------------

fn interleave(u: &[usize], v: &[usize], prefix: &mut Trace, out: &mut TraceSet) {
    if u.is_empty() && v.is_empty() {
        out.insert(prefix.clone());
        return;
    }
    if let Some((&first, rest)) = u.split_first() {
        prefix.push(first);
        interleave(rest, v, prefix, out);
        prefix.pop();
    }
    if let Some((&first, rest)) = v.split_first() {
        prefix.push(first);
        interleave(u, rest, prefix, out);
        prefix.pop();
    }
}

impl<'a> Enumerator<'a> {
    fn sem(&mut self, term: &Term, assign: &Assign, budget: usize) -> TraceSet {
        match term {
            Term::Epsilon => TraceSet::from([vec![]]),
            Term::Pattern(pref) => {
                let mut out = TraceSet::new();
                if budget == 0 {
                    return out;
                }
                let args: Vec<FieldPattern> =
                    pref.args.iter().map(|a| subst_field(a, assign)).collect();
                for (i, event) in self.alphabet.iter().enumerate() {
                    if singleton_matches(self.spec, &pref.name, &args, event) {
                        out.insert(vec![i]);
                    }
                }
                out
            }
            Term::Seq(a, b) => {
                let left = self.sem(a, assign, budget);
                concatenations_owned(self, left, b, assign, budget)
            }
            Term::Shuffle(a, b) => {
                let left = self.sem(a, assign, budget);
                let right = self.sem(b, assign, budget);
                let mut out = TraceSet::new();
                for u in &left {
                    for v in &right {
                        if u.len() + v.len() <= budget {
                            interleave(u, v, &mut Vec::new(), &mut out);
                        }
                    }
                }
                out
            }
            Term::And(a, b) => {
                let left = self.sem(a, assign, budget);
                let right = self.sem(b, assign, budget);
                left.intersection(&right).cloned().collect()
            }
            Term::Or(a, b) => {
                let mut out = self.sem(a, assign, budget);
                out.extend(self.sem(b, assign, budget));
                out
            }
            Term::Star(t) => {
                let base = self.sem(t, assign, budget);
                let mut chains = TraceSet::from([vec![]]);
                loop {
                    let mut added = Vec::new();
                    for u in &base {
                        if u.is_empty() {
                            continue;
                        }
                        for s in &chains {
                            if u.len() + s.len() > budget {
                                continue;
                            }
                            let mut joined = u.clone();
                            joined.extend_from_slice(s);
                            if !chains.contains(&joined) {
                                added.push(joined);
                            }
                        }
                    }
                    if added.is_empty() {
                        return chains;
                    }
                    chains.extend(added);
                }
            }
            Term::Let(vars, body) => {
                let mut out = TraceSet::new();
                for assignment in self.assignments(vars) {
                    let mut extended = assign.clone();
                    extended.extend(assignment);
                    out.extend(self.sem(body, &extended, budget));
                }
                out
            }
            Term::EqRef(name) => {
                let key = (name.clone(), budget);
                if let Some(cached) = self.memo.get(&key) {
                    return cached.clone();
                }
                if self.in_progress.contains(&key) {
                    return TraceSet::new();
                }
                let Some(equation) = self.spec.equation(name) else {
                    return TraceSet::new();
                };
                let body = equation.body.clone();
                self.in_progress.insert(key.clone());
                let result = self.sem(&body, &Assign::new(), budget);
                self.in_progress.remove(&key);
                self.memo.insert(key, result.clone());
                result
            }
        }
    }

    /// All ways to assign the given variables to candidate atoms.
    fn assignments(&self, vars: &[String]) -> Vec<Assign> {
        let mut out = vec![Assign::new()];
        for var in vars {
            let mut next = Vec::new();
            for base in &out {
                for atom in &self.candidates {
                    let mut assign = base.clone();
                    assign.insert(var.clone(), atom.clone());
                    next.push(assign);
                }
            }
            out = next;
        }
        out
    }
}

fn concatenations_owned(
    enumerator: &mut Enumerator,
    left: TraceSet,
    right_term: &Term,
    assign: &Assign,
    budget: usize,
) -> TraceSet {
    let mut right_cache: BTreeMap<usize, TraceSet> = BTreeMap::new();
    let mut out = TraceSet::new();
    for u in &left {
        let remaining = budget - u.len();
        if !right_cache.contains_key(&remaining) {
            let set = enumerator.sem(right_term, assign, remaining);
            right_cache.insert(remaining, set);
        }
        for v in &right_cache[&remaining] {
            let mut joined = u.clone();
            joined.extend_from_slice(v);
            out.insert(joined);
        }
    }
    out
}

/// All traces of length ≤ `max_len` over `alphabet` (as index vectors)
/// admitted by the spec's `Main` equation.
pub fn enumerate_traces(spec: &Spec, alphabet: &[Event], max_len: usize) -> BTreeSet<Vec<usize>> {
    let mut candidates = Vec::new();
    for event in alphabet {
        for (_, value) in event.entries().iter() {
            collect_atoms(value, &mut candidates);
        }
    }
    if candidates.is_empty() {
        // Unreachable with a non-empty alphabet (events carry strings);
        // keeps `let` total on the degenerate empty alphabet.
        candidates.push(Atom::str("?"));
    }
    let mut enumerator = Enumerator {
        spec,
        alphabet,
        candidates,
        memo: BTreeMap::new(),
        in_progress: BTreeSet::new(),
    };
    enumerator.sem(&Term::EqRef(MAIN.to_string()), &Assign::new(), max_len)
}
