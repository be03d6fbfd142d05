//! Scenario execution: FIFO delivery, sniffing, verdicts, warnings.

use std::fmt;

use thiserror::Error;

use super::bus::{encode_event, BusMessage, EncodeError, FunctorArg, FunctorTerm, Performative};
use super::scenario::Scenario;
use crate::event::{Atom, Event};
use crate::monitor::{MonitorState, Verdict};
use crate::pattern::is_relevant;
use crate::syntax::Spec;

/// Name the harness signs its warning messages with.
const MONITOR_AGENT: &str = "monitor";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("monitor endpoint unreachable: {0}")]
    Transport(String),
    #[error("monitor endpoint refused the request: {0}")]
    Rejected(String),
}

/// What the monitor said about one submitted event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub event_index: u64,
    pub violation: bool,
}

/// Anything that can judge a stream of events. Implemented by the embedded
/// monitor and by an HTTP client talking to a running service.
pub trait MonitorEndpoint {
    fn submit(&mut self, event: &Event) -> Result<VerdictReport, HarnessError>;
}

/// In-process monitor; no service round-trip involved.
pub struct LocalMonitor {
    spec: Spec,
    state: MonitorState,
    /// High-water mark of simultaneously tracked configurations, for
    /// resource-usage assertions in tests.
    pub max_configs: usize,
}

impl LocalMonitor {
    pub fn new(spec: Spec) -> Self {
        let state = MonitorState::new(&spec);
        let max_configs = state.configs().len();
        LocalMonitor {
            spec,
            state,
            max_configs,
        }
    }

    pub fn state(&self) -> &MonitorState {
        &self.state
    }
}

impl MonitorEndpoint for LocalMonitor {
    fn submit(&mut self, event: &Event) -> Result<VerdictReport, HarnessError> {
        let verdict = self.state.step(&self.spec, event);
        self.max_configs = self.max_configs.max(self.state.configs().len());
        Ok(VerdictReport {
            verdict,
            event_index: self.state.events_consumed(),
            violation: verdict.is_violation(),
        })
    }
}

/// Client for a monitor hosted by the REST service.
pub struct HttpMonitor {
    client: reqwest::blocking::Client,
    base: String,
    id: String,
}

impl HttpMonitor {
    /// Create a fresh monitor on the service from the given protocol text.
    ///
    /// Must not be called from inside an async runtime (the blocking client
    /// panics there); the harness is synchronous by design.
    pub fn create(base_url: &str, spec_text: &str) -> Result<Self, HarnessError> {
        let client = reqwest::blocking::Client::new();
        let base = base_url.trim_end_matches('/').to_owned();
        let resp = client
            .post(format!("{base}/monitors"))
            .body(spec_text.to_owned())
            .send()
            .map_err(|e| HarnessError::Transport(e.to_string()))?;
        let status = resp.status();
        let body: serde_json::Value = resp
            .json()
            .map_err(|e| HarnessError::Transport(e.to_string()))?;
        if status != reqwest::StatusCode::CREATED {
            return Err(HarnessError::Rejected(format!("{status}: {body}")));
        }
        let id = body["id"]
            .as_str()
            .ok_or_else(|| HarnessError::Rejected(format!("no id in {body}")))?
            .to_owned();
        Ok(HttpMonitor { client, base, id })
    }

    pub fn id(&self) -> &str {
        &self.id
    }
}

impl MonitorEndpoint for HttpMonitor {
    fn submit(&mut self, event: &Event) -> Result<VerdictReport, HarnessError> {
        let resp = self
            .client
            .post(format!("{}/monitors/{}/events", self.base, self.id))
            .json(&event.to_json_value())
            .send()
            .map_err(|e| HarnessError::Transport(e.to_string()))?;
        let status = resp.status();
        let body: serde_json::Value = resp
            .json()
            .map_err(|e| HarnessError::Transport(e.to_string()))?;
        if status != reqwest::StatusCode::OK {
            return Err(HarnessError::Rejected(format!("{status}: {body}")));
        }
        let verdict: Verdict = serde_json::from_value(body["verdict"].clone())
            .map_err(|e| HarnessError::Rejected(format!("bad verdict in {body}: {e}")))?;
        let event_index = body["event_index"]
            .as_u64()
            .ok_or_else(|| HarnessError::Rejected(format!("bad event_index in {body}")))?;
        Ok(VerdictReport {
            verdict,
            event_index,
            violation: body["violation"].as_bool().unwrap_or(false),
        })
    }
}

/// How a delivered message relates to the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Annotation {
    /// Forwarded to the monitor and judged under the protocol.
    Verdict(Verdict),
    /// Forwarded, but no event type of the protocol mentions it.
    Skipped,
    /// Harness-originated warning; never forwarded.
    Warn,
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::Verdict(v) => write!(f, "{v}"),
            Annotation::Skipped => f.write_str("skipped"),
            Annotation::Warn => f.write_str("warn"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TranscriptLine {
    /// 1-based delivery index on the bus (warnings included).
    pub tick: u64,
    pub message: BusMessage,
    pub annotation: Annotation,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub transcript: Vec<TranscriptLine>,
    /// Events forwarded to the monitor, in submission order.
    pub events: Vec<Event>,
    /// Monitor verdicts, one per forwarded event.
    pub verdicts: Vec<Verdict>,
    /// For each violation: the reported event index and the agents warned.
    pub warnings: Vec<(u64, Vec<String>)>,
}

impl ScenarioOutcome {
    pub fn final_verdict(&self) -> Option<Verdict> {
        self.verdicts.last().copied()
    }

    /// Tab-separated transcript, one delivered message per line.
    pub fn format_transcript(&self) -> String {
        let mut out = String::new();
        for line in &self.transcript {
            let content = match &line.message.content {
                Some(term) => term.to_string(),
                None => "-".to_owned(),
            };
            out.push_str(&format!(
                "{}\t{}\t{}->{}\t{}\t{}\n",
                line.tick,
                line.message.performative,
                line.message.sender,
                line.message.receiver,
                content,
                line.annotation
            ));
        }
        out
    }
}

/// Drive a scenario against a monitor endpoint.
///
/// `spec` is the same protocol the endpoint was created with; the runner
/// uses it locally to annotate transcript lines as in- or out-of-protocol.
/// Delivery is strictly FIFO. On the first violation the harness warns the
/// sender and receiver of the offending message, drops all undelivered
/// traffic, and ends the scenario.
pub fn run_scenario(
    scenario: &Scenario,
    spec: &Spec,
    endpoint: &mut dyn MonitorEndpoint,
) -> Result<ScenarioOutcome, HarnessError> {
    let mut agents = scenario.agents.clone();
    let mut queue: std::collections::VecDeque<BusMessage> =
        scenario.initial.iter().cloned().collect();
    let mut outcome = ScenarioOutcome {
        transcript: Vec::new(),
        events: Vec::new(),
        verdicts: Vec::new(),
        warnings: Vec::new(),
    };
    let mut tick = 0u64;
    while let Some(msg) = queue.pop_front() {
        tick += 1;
        if msg.performative == Performative::Warn {
            outcome.transcript.push(TranscriptLine {
                tick,
                message: msg,
                annotation: Annotation::Warn,
            });
            continue;
        }
        let event = encode_event(&msg)?;
        let report = endpoint.submit(&event)?;
        let relevant = is_relevant(&spec.decls, &event);
        outcome.events.push(event);
        outcome.verdicts.push(report.verdict);
        let annotation = if relevant {
            Annotation::Verdict(report.verdict)
        } else {
            Annotation::Skipped
        };
        outcome.transcript.push(TranscriptLine {
            tick,
            message: msg.clone(),
            annotation,
        });
        if report.violation {
            // Tell both ends of the offending exchange, drop everything
            // still in flight, and stop the scenario.
            let warned = vec![msg.sender.clone(), msg.receiver.clone()];
            let notice = |to: &str| {
                BusMessage::warn(
                    MONITOR_AGENT,
                    to,
                    FunctorTerm {
                        name: "protocol_violation".to_owned(),
                        args: vec![FunctorArg::Atom(Atom::int(report.event_index as i64))],
                    },
                )
            };
            queue.clear();
            queue.push_back(notice(&msg.sender));
            queue.push_back(notice(&msg.receiver));
            outcome.warnings.push((report.event_index, warned));
            // Deliver the warnings, then fall out of the loop naturally;
            // no reactions fire once the protocol is broken.
            while let Some(warn) = queue.pop_front() {
                tick += 1;
                outcome.transcript.push(TranscriptLine {
                    tick,
                    message: warn,
                    annotation: Annotation::Warn,
                });
            }
            break;
        }
        // Reaction dispatch: the receiver's first unspent matching rule.
        if let Some(agent) = agents.iter_mut().find(|a| a.name == msg.receiver) {
            if let Some(pos) = agent.reactions.iter().position(|r| r.trigger.matches(&msg)) {
                let reaction = agent.reactions.remove(pos);
                queue.extend(reaction.emit);
            }
        }
    }
    Ok(outcome)
}
