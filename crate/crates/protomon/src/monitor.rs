//! The verdict engine.
//!
//! A monitor holds a set of configurations, each a residual term plus a
//! variable binding. Consuming an event replaces every configuration with
//! its successors — the ways the event can be matched and the term
//! advanced. The set tracks all viable readings at once, so nondeterminism
//! (choice, interleaving, several bindings) needs no backtracking.
//!
//! When the set empties, no continuation of the observed trace can ever be
//! admissible: the monitor latches `violation` permanently. Otherwise the
//! verdict after each event is `accepting` if the trace so far is itself
//! admissible (some residual is nullable) and `continuing` if it is only a
//! prefix of something admissible.
//!
//! Events matching none of the spec's event types are outside its
//! vocabulary; they are counted but leave the configurations untouched.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::event::Event;
use crate::pattern::{is_relevant, match_decl, Binding};
use crate::syntax::{equation_nullability, term_nullable, Spec, Term, MAIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepting,
    Continuing,
    Violation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Verdict::Accepting => "accepting",
            Verdict::Continuing => "continuing",
            Verdict::Violation => "violation",
        };
        f.write_str(text)
    }
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation)
    }
}

/// One viable reading of the trace so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub residual: Term,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorState {
    configs: Vec<Config>,
    latched: bool,
    events_consumed: u64,
}

/// Per-step context: the spec plus its equation-nullability table (the
/// least fixpoint, so `nullable` needs no recursion through references).
struct Ctx<'a> {
    spec: &'a Spec,
    nullable: BTreeMap<String, bool>,
}

impl<'a> Ctx<'a> {
    fn new(spec: &'a Spec) -> Self {
        Ctx {
            spec,
            nullable: equation_nullability(spec),
        }
    }

    fn nullable(&self, term: &Term) -> bool {
        term_nullable(term, &self.nullable)
    }
}

fn seq_of(first: Term, rest: &Term) -> Term {
    if first == Term::Epsilon {
        rest.clone()
    } else {
        Term::Seq(Box::new(first), Box::new(rest.clone()))
    }
}

fn shuffle_of(left: Term, right: Term) -> Term {
    if left == Term::Epsilon {
        right
    } else if right == Term::Epsilon {
        left
    } else {
        Term::Shuffle(Box::new(left), Box::new(right))
    }
}

/// Combines the two advanced branches of an intersection. A finished branch
/// (`Epsilon`) admits only the empty continuation, so the whole intersection
/// survives only if the other branch is nullable — its unfinished bindings
/// then leave scope.
fn and_of(ctx: &Ctx, left: Term, right: Term, binding: Binding) -> Option<(Term, Binding)> {
    match (&left, &right) {
        (Term::Epsilon, Term::Epsilon) => Some((Term::Epsilon, binding)),
        (Term::Epsilon, t) => {
            if ctx.nullable(t) {
                let dropped = ctx.spec.let_vars_reachable(t);
                Some((Term::Epsilon, binding.without(&dropped)))
            } else {
                None
            }
        }
        (t, Term::Epsilon) => {
            if ctx.nullable(t) {
                let dropped = ctx.spec.let_vars_reachable(t);
                Some((Term::Epsilon, binding.without(&dropped)))
            } else {
                None
            }
        }
        _ => Some((Term::And(Box::new(left), Box::new(right)), binding)),
    }
}

fn push_config(configs: &mut Vec<Config>, config: Config) {
    if !configs.contains(&config) {
        configs.push(config);
    }
}

/// All successor configurations of `term` under `binding` after `event`.
/// `expanding` guards against reference cycles (validated specs cannot
/// trigger it; on malformed input the affected branch yields nothing).
fn successors(
    ctx: &Ctx,
    term: &Term,
    binding: &Binding,
    event: &Event,
    expanding: &mut Vec<String>,
    out: &mut Vec<Config>,
) {
    match term {
        Term::Epsilon => {}
        Term::Pattern(pref) => {
            let Some(decl) = ctx.spec.decl(&pref.name) else {
                return;
            };
            if decl.params.len() != pref.args.len() {
                return;
            }
            for produced in match_decl(decl, &pref.args, event, binding) {
                push_config(
                    out,
                    Config {
                        residual: Term::Epsilon,
                        binding: produced,
                    },
                );
            }
        }
        Term::Seq(a, b) => {
            let mut stepped_a = Vec::new();
            successors(ctx, a, binding, event, expanding, &mut stepped_a);
            for config in stepped_a {
                push_config(
                    out,
                    Config {
                        residual: seq_of(config.residual, b),
                        binding: config.binding,
                    },
                );
            }
            if ctx.nullable(a) {
                // Taking the empty trace for `a` abandons whatever `let`s
                // it still held open; their bindings leave scope.
                let dropped = ctx.spec.let_vars_reachable(a);
                let binding = binding.without(&dropped);
                let mut stepped_b = Vec::new();
                successors(ctx, b, &binding, event, expanding, &mut stepped_b);
                for config in stepped_b {
                    push_config(out, config);
                }
            }
        }
        Term::Shuffle(a, b) => {
            let mut stepped = Vec::new();
            successors(ctx, a, binding, event, expanding, &mut stepped);
            for config in stepped {
                push_config(
                    out,
                    Config {
                        residual: shuffle_of(config.residual, (**b).clone()),
                        binding: config.binding,
                    },
                );
            }
            let mut stepped = Vec::new();
            successors(ctx, b, binding, event, expanding, &mut stepped);
            for config in stepped {
                push_config(
                    out,
                    Config {
                        residual: shuffle_of((**a).clone(), config.residual),
                        binding: config.binding,
                    },
                );
            }
        }
        Term::And(a, b) => {
            let mut stepped_a = Vec::new();
            successors(ctx, a, binding, event, expanding, &mut stepped_a);
            let mut stepped_b = Vec::new();
            successors(ctx, b, binding, event, expanding, &mut stepped_b);
            for ca in &stepped_a {
                for cb in &stepped_b {
                    let Some(merged) = ca.binding.merge(&cb.binding) else {
                        continue;
                    };
                    if let Some((residual, binding)) =
                        and_of(ctx, ca.residual.clone(), cb.residual.clone(), merged)
                    {
                        push_config(out, Config { residual, binding });
                    }
                }
            }
        }
        Term::Or(a, b) => {
            successors(ctx, a, binding, event, expanding, out);
            successors(ctx, b, binding, event, expanding, out);
        }
        Term::Star(t) => {
            let mut stepped = Vec::new();
            successors(ctx, t, binding, event, expanding, &mut stepped);
            for config in stepped {
                push_config(
                    out,
                    Config {
                        residual: seq_of(config.residual, term),
                        binding: config.binding,
                    },
                );
            }
        }
        Term::Let(vars, body) => {
            let mut stepped = Vec::new();
            successors(ctx, body, binding, event, expanding, &mut stepped);
            for config in stepped {
                let produced = if config.residual == Term::Epsilon {
                    Config {
                        residual: Term::Epsilon,
                        binding: config.binding.without(vars),
                    }
                } else {
                    Config {
                        residual: Term::Let(vars.clone(), Box::new(config.residual)),
                        binding: config.binding,
                    }
                };
                push_config(out, produced);
            }
        }
        Term::EqRef(name) => {
            if expanding.iter().any(|n| n == name) {
                return;
            }
            let Some(equation) = ctx.spec.equation(name) else {
                return;
            };
            expanding.push(name.clone());
            successors(ctx, &equation.body, binding, event, expanding, out);
            expanding.pop();
        }
    }
}

fn first_event_types<'t>(
    ctx: &'t Ctx,
    term: &'t Term,
    expanding: &mut Vec<&'t str>,
    out: &mut BTreeSet<&'t str>,
) {
    match term {
        Term::Epsilon => {}
        Term::Pattern(pref) => {
            out.insert(&pref.name);
        }
        Term::Seq(a, b) => {
            first_event_types(ctx, a, expanding, out);
            if ctx.nullable(a) {
                first_event_types(ctx, b, expanding, out);
            }
        }
        Term::Shuffle(a, b) | Term::And(a, b) | Term::Or(a, b) => {
            first_event_types(ctx, a, expanding, out);
            first_event_types(ctx, b, expanding, out);
        }
        Term::Star(t) | Term::Let(_, t) => first_event_types(ctx, t, expanding, out),
        Term::EqRef(name) => {
            if expanding.contains(&name.as_str()) {
                return;
            }
            if let Some(equation) = ctx.spec.equation(name) {
                expanding.push(name);
                first_event_types(ctx, &equation.body, expanding, out);
                expanding.pop();
            }
        }
    }
}

impl MonitorState {
    /// The initial state: the `Main` equation, nothing bound, nothing
    /// consumed.
    pub fn new(spec: &Spec) -> MonitorState {
        debug_assert!(spec.equation(MAIN).is_some(), "spec must define Main");
        MonitorState {
            configs: vec![Config {
                residual: Term::EqRef(MAIN.to_string()),
                binding: Binding::new(),
            }],
            latched: false,
            events_consumed: 0,
        }
    }

    pub fn configs(&self) -> &[Config] {
        &self.configs
    }

    pub fn is_latched(&self) -> bool {
        self.latched
    }

    /// Total events submitted, relevant or not, before or after latching.
    pub fn events_consumed(&self) -> u64 {
        self.events_consumed
    }

    /// The verdict describing the trace consumed so far, without consuming
    /// anything. A fresh monitor reports `accepting` exactly when the spec
    /// admits the empty trace.
    pub fn current_verdict(&self, spec: &Spec) -> Verdict {
        if self.latched {
            return Verdict::Violation;
        }
        let ctx = Ctx::new(spec);
        if self.configs.iter().any(|c| ctx.nullable(&c.residual)) {
            Verdict::Accepting
        } else {
            Verdict::Continuing
        }
    }

    /// Consumes one event and reports the verdict for the extended trace.
    pub fn step(&mut self, spec: &Spec, event: &Event) -> Verdict {
        self.events_consumed += 1;
        if self.latched {
            return Verdict::Violation;
        }
        if !is_relevant(&spec.decls, event) {
            return self.current_verdict(spec);
        }
        let ctx = Ctx::new(spec);
        let mut next = Vec::new();
        for config in &self.configs {
            let mut expanding = Vec::new();
            let mut stepped = Vec::new();
            successors(
                &ctx,
                &config.residual,
                &config.binding,
                event,
                &mut expanding,
                &mut stepped,
            );
            for produced in stepped {
                push_config(&mut next, produced);
            }
        }
        if next.is_empty() {
            self.configs = next;
            self.latched = true;
            return Verdict::Violation;
        }
        self.configs = next;
        if self.configs.iter().any(|c| ctx.nullable(&c.residual)) {
            Verdict::Accepting
        } else {
            Verdict::Continuing
        }
    }

    /// Names of the event types that could consume the next event — the
    /// candidates a violating event failed to be. Heuristic for
    /// diagnostics: for intersections it unions both branches.
    pub fn expected_event_types(&self, spec: &Spec) -> BTreeSet<String> {
        let ctx = Ctx::new(spec);
        let mut names = BTreeSet::new();
        for config in &self.configs {
            let mut expanding = Vec::new();
            let mut found = BTreeSet::new();
            first_event_types(&ctx, &config.residual, &mut expanding, &mut found);
            names.extend(found.into_iter().map(String::from));
        }
        names
    }
}

/// Runs a whole trace from the initial state, collecting per-event
/// verdicts.
pub fn run_trace(spec: &Spec, events: &[Event]) -> Vec<Verdict> {
    let mut state = MonitorState::new(spec);
    events.iter().map(|e| state.step(spec, e)).collect()
}
