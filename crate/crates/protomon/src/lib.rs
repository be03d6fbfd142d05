//! Runtime monitoring of agent interaction protocols.
//!
//! Protocols are written in a small declarative language: named event
//! types describe message shapes (with variables for values fixed at run
//! time), and equations combine them into the set of admissible message
//! sequences. A monitor consumes observed events one by one and reports
//! after each whether the conversation so far is admissible, still
//! completable, or irrecoverably broken.
//!
//! The crate also ships a REST facade over the monitor, an offline trace
//! checker, and a scripted multi-agent simulation that exercises both.

pub mod event;
pub mod harness;
pub mod listings;
pub mod monitor;
pub mod oracle;
pub mod pattern;
pub mod service;
pub mod syntax;
pub mod trace;
