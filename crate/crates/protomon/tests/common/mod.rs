//! Helpers shared by the integration test binaries.

#![allow(dead_code)]

use protomon::event::{Atom, Event, Record, Value};
use protomon::listings;
use protomon::monitor::{MonitorState, Verdict};
use protomon::syntax::Spec;

/// Event with just the three required entries.
pub fn msg(performative: &str, sender: &str, receiver: &str) -> Event {
    let mut entries = Record::new();
    entries.insert("performative", Value::str(performative));
    entries.insert("sender", Value::str(sender));
    entries.insert("receiver", Value::str(receiver));
    Event::from_record(entries).unwrap()
}

/// Event with a content record holding a plain `name`.
pub fn msg_named(performative: &str, sender: &str, receiver: &str, name: &str) -> Event {
    msg_with_args(performative, sender, receiver, name, &[])
}

/// Event with a content `name` plus `arg1..argN` string entries.
pub fn msg_with_args(
    performative: &str,
    sender: &str,
    receiver: &str,
    name: &str,
    args: &[&str],
) -> Event {
    let mut content = Record::new();
    content.insert("name", Value::str(name));
    for (i, a) in args.iter().enumerate() {
        content.insert(format!("arg{}", i + 1), Value::str(*a));
    }
    let mut entries = Record::new();
    entries.insert("performative", Value::str(performative));
    entries.insert("sender", Value::str(sender));
    entries.insert("receiver", Value::str(receiver));
    entries.insert("content", Value::Record(content));
    Event::from_record(entries).unwrap()
}

/// Event whose content `name` is a list (nested functor spine).
pub fn msg_nested(
    performative: &str,
    sender: &str,
    receiver: &str,
    names: &[&str],
    args: &[&str],
) -> Event {
    let mut content = Record::new();
    content.insert(
        "name",
        Value::List(names.iter().map(|n| Atom::str(*n)).collect()),
    );
    for (i, a) in args.iter().enumerate() {
        content.insert(format!("arg{}", i + 1), Value::str(*a));
    }
    let mut entries = Record::new();
    entries.insert("performative", Value::str(performative));
    entries.insert("sender", Value::str(sender));
    entries.insert("receiver", Value::str(receiver));
    entries.insert("content", Value::Record(content));
    Event::from_record(entries).unwrap()
}

/// Run a trace from a fresh monitor and collect all step verdicts.
pub fn verdicts_for(spec: &Spec, events: &[Event]) -> Vec<Verdict> {
    let mut state = MonitorState::new(spec);
    events.iter().map(|e| state.step(spec, e)).collect()
}

/// One entry in the monitor-vs-oracle comparison corpus: a compiled
/// protocol and a fixed four-event ground alphabet to enumerate over.
pub struct OracleCase {
    pub name: &'static str,
    pub spec: Spec,
    pub alphabet: Vec<Event>,
}

fn compiled(text: &str) -> Spec {
    Spec::compile(text).unwrap_or_else(|e| panic!("corpus spec failed to compile: {e}\n{text}"))
}

/// Four distinct assert events that differ only in content name, matching
/// the `pat1..pat4` declarations used by the constructed corpus specs.
fn generic_alphabet() -> Vec<Event> {
    (1..=4)
        .map(|i| msg_named("assert", "a", "b", &format!("n{i}")))
        .collect()
}

/// Declarations for `pat1..pat4`, one per generic alphabet event.
const GENERIC_DECLS: &str = "
pat1 matches {performative:'assert', content:{name:'n1'}};
pat2 matches {performative:'assert', content:{name:'n2'}};
pat3 matches {performative:'assert', content:{name:'n3'}};
pat4 matches {performative:'assert', content:{name:'n4'}};
";

fn generic_case(name: &'static str, main: &str) -> OracleCase {
    OracleCase {
        name,
        spec: compiled(&format!("{GENERIC_DECLS}\nMain = {main};")),
        alphabet: generic_alphabet(),
    }
}

/// Specs exercising every operator, compared exhaustively against the
/// brute-force trace enumerator over all traces of length <= 4.
pub fn oracle_corpus() -> Vec<OracleCase> {
    let mut cases = vec![
        OracleCase {
            name: "topic_change_listing",
            spec: listings::topic_change().unwrap(),
            alphabet: vec![
                msg_named("question", "operator", "assistant", "getValidationResult"),
                msg_nested(
                    "assert",
                    "assistant",
                    "operator",
                    &["answer", "result"],
                    &["p12", "bed3"],
                ),
                msg_named("question", "operator", "assistant", "allocValPatients"),
                msg_with_args("assert", "assistant", "operator", "answer", &["done"]),
            ],
        },
        OracleCase {
            name: "question_answer_listing",
            spec: listings::question_answer().unwrap(),
            alphabet: vec![
                msg("question", "operator", "assistant"),
                msg("assert", "assistant", "operator"),
                msg("question", "assistant", "database"),
                msg("assert", "database", "assistant"),
            ],
        },
        generic_case("seq_of_three", "pat1 pat2 pat3"),
        generic_case("star_of_pair", "(pat1 pat2)*"),
        generic_case("or_of_three", "pat1 \\/ pat2 \\/ pat3"),
        generic_case("shuffle_of_pairs", "(pat1 pat2) | (pat3 pat4)"),
        generic_case("star_of_or", "(pat1 \\/ pat2)*"),
        generic_case("star_within_star", "(pat1* pat2)*"),
        generic_case("star_of_star", "(pat1*)*"),
        generic_case("shuffle_under_star", "(pat1 | pat2)*"),
    ];
    // Intersection keeps only pairs that start with n1.
    cases.push(OracleCase {
        name: "and_prefix_filter",
        spec: compiled(&format!(
            "{GENERIC_DECLS}\nanything matches {{performative:_}};\nMain = (anything anything) /\\ (pat1 anything);"
        )),
        alphabet: generic_alphabet(),
    });
    // Parametric intersection: both operands must agree on the bound name.
    cases.push(OracleCase {
        name: "and_shared_binding",
        spec: compiled(
            "pf(v) matches {performative:'assert', content:{name:v}};\n\
             Main = {let x; ({let y; pf(x) pf(y)}) /\\ (pf(x) pf(x))};",
        ),
        alphabet: generic_alphabet(),
    });
    // Fresh bindings on every star iteration.
    cases.push(OracleCase {
        name: "let_under_star",
        spec: compiled(
            "pf(v) matches {performative:'assert', content:{name:v}};\n\
             Main = {let x; pf(x) pf(x)}*;",
        ),
        alphabet: generic_alphabet(),
    });
    // Mutual recursion with a consuming guard on every cycle.
    cases.push(OracleCase {
        name: "guarded_ping_pong",
        spec: compiled(&format!(
            "{GENERIC_DECLS}\nMain = Ping;\nPing = pat1 Pong;\nPong = (pat2 Ping) \\/ pat2;"
        )),
        alphabet: generic_alphabet(),
    });
    // pat3/pat4 undeclared here, so two alphabet events are irrelevant and
    // must pass through the monitor without affecting the verdict.
    cases.push(OracleCase {
        name: "with_irrelevant_events",
        spec: compiled(
            "pat1 matches {performative:'assert', content:{name:'n1'}};\n\
             pat2 matches {performative:'assert', content:{name:'n2'}};\n\
             Main = (pat1 pat2)*;",
        ),
        alphabet: generic_alphabet(),
    });
    cases
}

/// Every index sequence over `alphabet_len` symbols of length <= max_len,
/// in length-then-lexicographic order starting with the empty trace.
pub fn all_traces(alphabet_len: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for t in &frontier {
            for i in 0..alphabet_len {
                let mut ext = t.clone();
                ext.push(i);
                next.push(ext);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
