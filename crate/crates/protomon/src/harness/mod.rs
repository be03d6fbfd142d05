//! Simulated multi-agent harness.
//!
//! A scenario wires a handful of scripted agents to an in-process message
//! bus. Every non-warning message that crosses the bus is also forwarded to
//! a monitor endpoint (embedded or remote over HTTP), and the verdict stream
//! is recorded alongside the transcript. When the monitor reports a
//! violation the harness broadcasts warnings to the offending pair and
//! shuts the scenario down.

mod bus;
mod runner;
mod scenario;

pub use bus::{encode_event, BusMessage, EncodeError, FunctorArg, FunctorTerm, Performative};
pub use runner::{
    run_scenario, Annotation, HarnessError, HttpMonitor, LocalMonitor, MonitorEndpoint,
    ScenarioOutcome, TranscriptLine, VerdictReport,
};
pub use scenario::{
    default_spec_text, scenario_by_name, AgentScript, Reaction, Scenario, Trigger, SCENARIO_NAMES,
};
