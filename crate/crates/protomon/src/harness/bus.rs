//! Bus messages and their flattening into monitorable events.
//!
//! Agents speak in structured content terms like `answer(result(p12, bed3))`.
//! The monitor's event format is flat, so the bridge encodes a content term
//! by walking the spine of single nested arguments: the functor names along
//! the spine become the `name` entry (a plain string when the spine has one
//! element, a list otherwise) and the arguments of the innermost functor
//! become `arg1`, `arg2`, ... Content with nesting beyond that shape has no
//! flat encoding and is rejected.

use std::fmt;

use thiserror::Error;

use crate::event::{Atom, Event, EventError, Record, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Performative {
    Question,
    Assert,
    Warn,
}

impl fmt::Display for Performative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Performative::Question => "question",
            Performative::Assert => "assert",
            Performative::Warn => "warn",
        };
        f.write_str(s)
    }
}

/// One argument of a content term: either a ground atom or a nested term.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctorArg {
    Atom(Atom),
    Nested(FunctorTerm),
}

/// A structured content term, e.g. `suggestion(p12, bed3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctorTerm {
    pub name: String,
    pub args: Vec<FunctorArg>,
}

impl FunctorTerm {
    /// A bare functor with no arguments.
    pub fn leaf(name: &str) -> Self {
        FunctorTerm {
            name: name.to_owned(),
            args: Vec::new(),
        }
    }

    /// A functor applied to string atoms.
    pub fn applied(name: &str, args: &[&str]) -> Self {
        FunctorTerm {
            name: name.to_owned(),
            args: args
                .iter()
                .map(|a| FunctorArg::Atom(Atom::str(*a)))
                .collect(),
        }
    }

    /// A functor wrapping a single nested term.
    pub fn wrapping(name: &str, inner: FunctorTerm) -> Self {
        FunctorTerm {
            name: name.to_owned(),
            args: vec![FunctorArg::Nested(inner)],
        }
    }
}

impl fmt::Display for FunctorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match arg {
                FunctorArg::Atom(a) => write!(f, "{a}")?,
                FunctorArg::Nested(t) => write!(f, "{t}")?,
            }
        }
        f.write_str(")")
    }
}

/// A message in flight on the scenario bus.
#[derive(Debug, Clone, PartialEq)]
pub struct BusMessage {
    pub performative: Performative,
    pub sender: String,
    pub receiver: String,
    pub content: Option<FunctorTerm>,
}

impl BusMessage {
    pub fn new(
        performative: Performative,
        sender: &str,
        receiver: &str,
        content: Option<FunctorTerm>,
    ) -> Self {
        assert_ne!(sender, receiver, "agents do not message themselves");
        BusMessage {
            performative,
            sender: sender.to_owned(),
            receiver: receiver.to_owned(),
            content,
        }
    }

    pub fn question(sender: &str, receiver: &str, content: FunctorTerm) -> Self {
        Self::new(Performative::Question, sender, receiver, Some(content))
    }

    pub fn assert(sender: &str, receiver: &str, content: FunctorTerm) -> Self {
        Self::new(Performative::Assert, sender, receiver, Some(content))
    }

    pub fn warn(sender: &str, receiver: &str, content: FunctorTerm) -> Self {
        Self::new(Performative::Warn, sender, receiver, Some(content))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EncodeError {
    /// The content mixes nested and atomic arguments, or nests more than
    /// one level below the spine, so it has no flat event encoding.
    #[error("content term `{term}` is too deeply structured to flatten")]
    TooDeep { term: String },
    #[error("flattened message is not a valid event: {0}")]
    Event(#[from] EventError),
}

/// Flatten a bus message into the monitor's event format.
pub fn encode_event(msg: &BusMessage) -> Result<Event, EncodeError> {
    let mut entries = Record::new();
    entries.insert("performative", Value::str(&msg.performative.to_string()));
    entries.insert("sender", Value::str(&msg.sender));
    entries.insert("receiver", Value::str(&msg.receiver));
    if let Some(term) = &msg.content {
        let mut content = Record::new();
        let mut spine = vec![term.name.clone()];
        let mut cursor = term;
        // Follow the chain of single nested arguments down to the leaves.
        while let [FunctorArg::Nested(inner)] = cursor.args.as_slice() {
            spine.push(inner.name.clone());
            cursor = inner;
        }
        let name = if spine.len() == 1 {
            Value::str(&spine[0])
        } else {
            Value::List(spine.into_iter().map(Atom::Str).collect())
        };
        content.insert("name", name);
        for (i, arg) in cursor.args.iter().enumerate() {
            match arg {
                FunctorArg::Atom(a) => {
                    content.insert(&format!("arg{}", i + 1), Value::Atom(a.clone()));
                }
                FunctorArg::Nested(_) => {
                    return Err(EncodeError::TooDeep {
                        term: term.to_string(),
                    });
                }
            }
        }
        entries.insert("content", Value::Record(content));
    }
    Ok(Event::from_record(entries)?)
}
