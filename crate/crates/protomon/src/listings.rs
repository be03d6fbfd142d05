//! The two protocol specifications shipped with the crate, embedded so
//! binaries and tests need no file lookup.
//!
//! * [`TOPIC_CHANGE`] — fixed-agent property for the bed-allocation
//!   assistant: once the operator has asked for a validation result, any
//!   follow-up question must stay on the allocation topic.
//! * [`QUESTION_ANSWER`] — parametric property: whoever is asked must
//!   answer before the conversation moves on, for any pair of agents.

use crate::syntax::{CompileError, Spec};

pub const TOPIC_CHANGE: &str = include_str!("../specs/topic_change.rml");
pub const QUESTION_ANSWER: &str = include_str!("../specs/question_answer.rml");

pub fn topic_change() -> Result<Spec, CompileError> {
    Spec::compile(TOPIC_CHANGE)
}

pub fn question_answer() -> Result<Spec, CompileError> {
    Spec::compile(QUESTION_ANSWER)
}
