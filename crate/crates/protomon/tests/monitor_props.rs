//! Property tests of the online monitor: verdict latching, determinism,
//! and indifference to events outside the protocol's vocabulary.

mod common;

use common::{msg, msg_named};
use proptest::prelude::*;
use protomon::event::Event;
use protomon::listings;
use protomon::monitor::{MonitorState, Verdict};
use protomon::pattern::is_relevant;
use protomon::syntax::Spec;

/// (spec, alphabet) fixtures the random traces draw from.
fn fixtures() -> Vec<(Spec, Vec<Event>)> {
    let generic = |main: &str| {
        Spec::compile(&format!(
            "pat1 matches {{performative:'assert', content:{{name:'n1'}}}};\n\
             pat2 matches {{performative:'assert', content:{{name:'n2'}}}};\n\
             Main = {main};"
        ))
        .unwrap()
    };
    let generic_alphabet = vec![
        msg_named("assert", "a", "b", "n1"),
        msg_named("assert", "a", "b", "n2"),
        msg_named("assert", "b", "a", "n1"),
        msg_named("assert", "b", "a", "n2"),
    ];
    vec![
        (
            listings::question_answer().unwrap(),
            vec![
                msg("question", "operator", "assistant"),
                msg("assert", "assistant", "operator"),
                msg("question", "assistant", "database"),
                msg("assert", "database", "assistant"),
            ],
        ),
        (generic("(pat1 pat2)*"), generic_alphabet.clone()),
        (
            Spec::compile(
                "pat1 matches {performative:'assert', content:{name:'n1'}};\n\
                 pat2 matches {performative:'assert', content:{name:'n2'}};\n\
                 Main = Ping;\nPing = pat1 Pong;\nPong = (pat2 Ping) \\/ pat2;",
            )
            .unwrap(),
            generic_alphabet,
        ),
    ]
}

fn trace_strategy() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0usize..3, prop::collection::vec(0usize..4, 0..10))
}

proptest! {
    #[test]
    fn verdicts_latch_after_the_first_violation((f, trace) in trace_strategy()) {
        let (spec, alphabet) = &fixtures()[f];
        let mut state = MonitorState::new(spec);
        let mut seen_violation = false;
        for &i in &trace {
            let verdict = state.step(spec, &alphabet[i]);
            if seen_violation {
                prop_assert_eq!(verdict, Verdict::Violation);
                prop_assert!(state.is_latched());
            }
            seen_violation = seen_violation || verdict == Verdict::Violation;
        }
    }

    #[test]
    fn replaying_a_trace_reproduces_the_verdicts((f, trace) in trace_strategy()) {
        let (spec, alphabet) = &fixtures()[f];
        let events: Vec<_> = trace.iter().map(|&i| alphabet[i].clone()).collect();
        let first = protomon::monitor::run_trace(spec, &events);
        let second = protomon::monitor::run_trace(spec, &events);
        prop_assert_eq!(first, second);
    }

    #[test]
    fn every_event_advances_the_counter((f, trace) in trace_strategy()) {
        let (spec, alphabet) = &fixtures()[f];
        let mut state = MonitorState::new(spec);
        for (n, &i) in trace.iter().enumerate() {
            state.step(spec, &alphabet[i]);
            prop_assert_eq!(state.events_consumed(), (n + 1) as u64);
        }
    }

    #[test]
    fn irrelevant_events_change_nothing_but_their_own_line(
        (f, trace) in trace_strategy(),
        position: prop::sample::Index,
    ) {
        let (spec, alphabet) = &fixtures()[f];
        // No declaration mentions this performative, so the event is
        // outside every fixture protocol's vocabulary.
        let stray = msg_named("inform", "x", "y", "noise");
        prop_assert!(!is_relevant(&spec.decls, &stray));

        let events: Vec<_> = trace.iter().map(|&i| alphabet[i].clone()).collect();
        let at = position.index(events.len() + 1);
        let mut padded = events.clone();
        padded.insert(at, stray);

        let plain = protomon::monitor::run_trace(spec, &events);
        let mut with_stray = protomon::monitor::run_trace(spec, &padded);
        with_stray.remove(at);
        prop_assert_eq!(with_stray, plain);
    }
}
