//! Canned scenarios for the hospital bed-allocation assistant.
//!
//! Each scenario is a set of scripted agents plus the message that kicks
//! things off. Agents are purely reactive: a reaction fires at most once,
//! when a delivered message matches its trigger, and enqueues follow-up
//! messages. That keeps every scenario finite and deterministic.

use super::bus::{BusMessage, FunctorArg, FunctorTerm, Performative};
use crate::listings;

/// Predicate over delivered messages. `None` fields match anything.
#[derive(Debug, Clone)]
pub struct Trigger {
    pub performative: Performative,
    pub from: Option<String>,
    /// Outermost functor name of the content.
    pub content_name: Option<String>,
    /// Whether the content's first argument is a nested term; used to tell
    /// `answer(result(..))` apart from `answer(done)`.
    pub has_nested: Option<bool>,
}

impl Trigger {
    fn on(performative: Performative, from: &str, content_name: &str) -> Self {
        Trigger {
            performative,
            from: Some(from.to_owned()),
            content_name: Some(content_name.to_owned()),
            has_nested: None,
        }
    }

    fn nested(mut self, yes: bool) -> Self {
        self.has_nested = Some(yes);
        self
    }

    pub fn matches(&self, msg: &BusMessage) -> bool {
        if msg.performative != self.performative {
            return false;
        }
        if let Some(from) = &self.from {
            if &msg.sender != from {
                return false;
            }
        }
        if let Some(name) = &self.content_name {
            match &msg.content {
                Some(term) if &term.name == name => {}
                _ => return false,
            }
        }
        if let Some(wants_nested) = self.has_nested {
            let is_nested = matches!(
                msg.content.as_ref().map(|t| t.args.first()),
                Some(Some(FunctorArg::Nested(_)))
            );
            if is_nested != wants_nested {
                return false;
            }
        }
        true
    }
}

/// One-shot rule: when `trigger` matches a message delivered to the agent,
/// enqueue `emit` and never fire again.
#[derive(Debug, Clone)]
pub struct Reaction {
    pub trigger: Trigger,
    pub emit: Vec<BusMessage>,
}

#[derive(Debug, Clone)]
pub struct AgentScript {
    pub name: String,
    pub reactions: Vec<Reaction>,
}

impl AgentScript {
    fn new(name: &str) -> Self {
        AgentScript {
            name: name.to_owned(),
            reactions: Vec::new(),
        }
    }

    fn react(mut self, trigger: Trigger, emit: Vec<BusMessage>) -> Self {
        self.reactions.push(Reaction { trigger, emit });
        self
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub initial: Vec<BusMessage>,
    pub agents: Vec<AgentScript>,
}

pub const SCENARIO_NAMES: [&str; 4] = [
    "bed_allocation_happy",
    "topic_change_violation",
    "unanswered_question",
    "empty_result_branch",
];

/// The bundled protocol text a scenario was written against.
pub fn default_spec_text(name: &str) -> Option<&'static str> {
    match name {
        "bed_allocation_happy" | "topic_change_violation" | "empty_result_branch" => {
            Some(listings::TOPIC_CHANGE)
        }
        "unanswered_question" => Some(listings::QUESTION_ANSWER),
        _ => None,
    }
}

pub fn scenario_by_name(name: &str) -> Option<Scenario> {
    match name {
        "bed_allocation_happy" => Some(bed_allocation_happy()),
        "topic_change_violation" => Some(topic_change_violation()),
        "unanswered_question" => Some(unanswered_question()),
        "empty_result_branch" => Some(empty_result_branch()),
        _ => None,
    }
}

const OPERATOR: &str = "operator";
const ASSISTANT: &str = "assistant";
const VALIDATOR: &str = "validator";
const OPTIMISER: &str = "optimiser";
const DATABASE: &str = "database";

fn q(sender: &str, receiver: &str, name: &str) -> BusMessage {
    BusMessage::question(sender, receiver, FunctorTerm::leaf(name))
}

fn tell(sender: &str, receiver: &str, content: FunctorTerm) -> BusMessage {
    BusMessage::assert(sender, receiver, content)
}

/// Assistant-side plumbing shared by the bed-allocation scenarios: fan out
/// to the validator, then the optimiser, and answer the operator with the
/// suggested allocation.
fn allocation_pipeline(assistant: AgentScript) -> AgentScript {
    assistant
        .react(
            Trigger::on(Performative::Question, OPERATOR, "getValidationResult"),
            vec![q(ASSISTANT, VALIDATOR, "validatePlan")],
        )
        .react(
            Trigger::on(Performative::Assert, VALIDATOR, "validationReport"),
            vec![q(ASSISTANT, OPTIMISER, "suggestAllocation")],
        )
        .react(
            Trigger::on(Performative::Assert, OPTIMISER, "suggestion"),
            vec![tell(
                ASSISTANT,
                OPERATOR,
                FunctorTerm::wrapping("answer", FunctorTerm::applied("result", &["p12", "bed3"])),
            )],
        )
}

fn validator_agent() -> AgentScript {
    AgentScript::new(VALIDATOR).react(
        Trigger::on(Performative::Question, ASSISTANT, "validatePlan"),
        vec![tell(
            VALIDATOR,
            ASSISTANT,
            FunctorTerm::applied("validationReport", &["ok"]),
        )],
    )
}

fn optimiser_agent() -> AgentScript {
    AgentScript::new(OPTIMISER).react(
        Trigger::on(Performative::Question, ASSISTANT, "suggestAllocation"),
        vec![tell(
            OPTIMISER,
            ASSISTANT,
            FunctorTerm::applied("suggestion", &["p12", "bed3"]),
        )],
    )
}

fn database_agent() -> AgentScript {
    AgentScript::new(DATABASE).react(
        Trigger::on(Performative::Question, ASSISTANT, "storeAllocation"),
        vec![tell(
            DATABASE,
            ASSISTANT,
            FunctorTerm::applied("stored", &["ok"]),
        )],
    )
}

/// Full two-topic conversation: validation result, then allocation storage.
/// Stays inside the protocol, so no warnings are raised.
fn bed_allocation_happy() -> Scenario {
    let assistant = allocation_pipeline(AgentScript::new(ASSISTANT))
        .react(
            Trigger::on(Performative::Question, OPERATOR, "allocValPatients"),
            vec![q(ASSISTANT, DATABASE, "storeAllocation")],
        )
        .react(
            Trigger::on(Performative::Assert, DATABASE, "stored"),
            vec![tell(
                ASSISTANT,
                OPERATOR,
                FunctorTerm::applied("answer", &["done"]),
            )],
        );
    let operator = AgentScript::new(OPERATOR).react(
        Trigger::on(Performative::Assert, ASSISTANT, "answer").nested(true),
        vec![q(OPERATOR, ASSISTANT, "allocValPatients")],
    );
    Scenario {
        name: "bed_allocation_happy",
        initial: vec![q(OPERATOR, ASSISTANT, "getValidationResult")],
        agents: vec![
            operator,
            assistant,
            validator_agent(),
            optimiser_agent(),
            database_agent(),
        ],
    }
}

/// Same opening as the happy path, but once the answer arrives the operator
/// asks a question outside the allowed follow-up set and gets flagged.
fn topic_change_violation() -> Scenario {
    let assistant = allocation_pipeline(AgentScript::new(ASSISTANT));
    let operator = AgentScript::new(OPERATOR).react(
        Trigger::on(Performative::Assert, ASSISTANT, "answer").nested(true),
        vec![q(OPERATOR, ASSISTANT, "whatAboutTomorrow")],
    );
    Scenario {
        name: "topic_change_violation",
        initial: vec![q(OPERATOR, ASSISTANT, "getValidationResult")],
        agents: vec![operator, assistant, validator_agent(), optimiser_agent()],
    }
}

/// Under the strict question/answer protocol every question must be answered
/// before anything else happens between any pair of agents. The assistant
/// relays the operator's question to the database instead of answering, and
/// that second question is the violation.
fn unanswered_question() -> Scenario {
    let assistant = AgentScript::new(ASSISTANT).react(
        Trigger::on(Performative::Question, OPERATOR, "getPatientList"),
        vec![q(ASSISTANT, DATABASE, "queryPatients")],
    );
    let database = AgentScript::new(DATABASE).react(
        Trigger::on(Performative::Question, ASSISTANT, "queryPatients"),
        vec![tell(
            DATABASE,
            ASSISTANT,
            FunctorTerm::applied("patients", &["p12"]),
        )],
    );
    Scenario {
        name: "unanswered_question",
        initial: vec![q(OPERATOR, ASSISTANT, "getPatientList")],
        agents: vec![assistant, database],
    }
}

/// The validator finds nothing to report, so the assistant closes the topic
/// with a bare `answer` and the operator starts the next topic. Exercises
/// the unconstrained-answer branch of the protocol.
fn empty_result_branch() -> Scenario {
    let assistant = AgentScript::new(ASSISTANT)
        .react(
            Trigger::on(Performative::Question, OPERATOR, "getValidationResult"),
            vec![q(ASSISTANT, VALIDATOR, "validatePlan")],
        )
        .react(
            Trigger::on(Performative::Assert, VALIDATOR, "validationReport"),
            vec![tell(ASSISTANT, OPERATOR, FunctorTerm::leaf("answer"))],
        );
    let validator = AgentScript::new(VALIDATOR).react(
        Trigger::on(Performative::Question, ASSISTANT, "validatePlan"),
        vec![tell(
            VALIDATOR,
            ASSISTANT,
            FunctorTerm::applied("validationReport", &["empty"]),
        )],
    );
    let operator = AgentScript::new(OPERATOR).react(
        Trigger::on(Performative::Assert, ASSISTANT, "answer"),
        vec![q(OPERATOR, ASSISTANT, "getValidationResult")],
    );
    Scenario {
        name: "empty_result_branch",
        initial: vec![q(OPERATOR, ASSISTANT, "getValidationResult")],
        agents: vec![operator, assistant, validator],
    }
}
