//! Observed inter-agent messages and the value model they carry.
//!
//! An [`Event`] is a flat record of named fields. Three fields are mandatory
//! (`performative`, `sender`, `receiver`, all non-empty strings); everything
//! else, including the optional `content` record, is free-form. Field values
//! are [`Value`]s: scalar atoms, lists of atoms, or nested records.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::Number;
use thiserror::Error;

/// A scalar field value: string, number, or boolean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Str(String),
    Num(Number),
    Bool(bool),
}

impl Atom {
    pub fn str(s: impl Into<String>) -> Self {
        Atom::Str(s.into())
    }

    pub fn int(n: i64) -> Self {
        Atom::Num(Number::from(n))
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Atom::Str(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Str(s) => write!(f, "{s}"),
            Atom::Num(n) => write!(f, "{n}"),
            Atom::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// A field value: an atom, an ordered list of atoms, or a nested record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Atom(Atom),
    List(Vec<Atom>),
    Record(Record),
}

impl Value {
    pub fn str(s: impl Into<String>) -> Self {
        Value::Atom(Atom::str(s))
    }

    pub fn as_record(&self) -> Option<&Record> {
        match self {
            Value::Record(r) => Some(r),
            _ => None,
        }
    }
}

/// A map from non-empty string keys to values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Record(BTreeMap<String, Value>);

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    /// Inserts a field. Keys must be non-empty; lists encode multiplicity, so
    /// inserting twice under one key replaces the earlier value.
    pub fn insert(&mut self, key: impl Into<String>, value: Value) -> &mut Self {
        let key = key.into();
        assert!(!key.is_empty(), "record keys must be non-empty");
        self.0.insert(key, value);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, Value)> for Record {
    fn from_iter<T: IntoIterator<Item = (String, Value)>>(iter: T) -> Self {
        let mut r = Record::new();
        for (k, v) in iter {
            r.insert(k, v);
        }
        r
    }
}

pub const KEY_PERFORMATIVE: &str = "performative";
pub const KEY_SENDER: &str = "sender";
pub const KEY_RECEIVER: &str = "receiver";
pub const KEY_CONTENT: &str = "content";

const REQUIRED_KEYS: [&str; 3] = [KEY_PERFORMATIVE, KEY_SENDER, KEY_RECEIVER];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EventError {
    #[error("event must be a JSON object")]
    NotAnObject,
    #[error("missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("key '{0}' must be a non-empty string")]
    BadRequiredKey(&'static str),
    #[error("key 'content' must be an object")]
    ContentNotAnObject,
    #[error("record keys must be non-empty strings")]
    EmptyKey,
    #[error("null is not a legal field value (key '{0}')")]
    NullValue(String),
    #[error("lists may contain only scalars (key '{0}')")]
    NestedList(String),
}

/// One observed message: a record guaranteed to carry the three
/// required string fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    entries: Record,
}

impl Event {
    /// Wraps a record as an event, checking the required-field invariant.
    pub fn from_record(entries: Record) -> Result<Self, EventError> {
        for key in REQUIRED_KEYS {
            match entries.get(key) {
                None => return Err(EventError::MissingKey(key)),
                Some(Value::Atom(Atom::Str(s))) if !s.is_empty() => {}
                Some(_) => return Err(EventError::BadRequiredKey(key)),
            }
        }
        if let Some(v) = entries.get(KEY_CONTENT) {
            if v.as_record().is_none() {
                return Err(EventError::ContentNotAnObject);
            }
        }
        Ok(Event { entries })
    }

    pub fn entries(&self) -> &Record {
        &self.entries
    }

    pub fn performative(&self) -> &str {
        self.required(KEY_PERFORMATIVE)
    }

    pub fn sender(&self) -> &str {
        self.required(KEY_SENDER)
    }

    pub fn receiver(&self) -> &str {
        self.required(KEY_RECEIVER)
    }

    pub fn content(&self) -> Option<&Record> {
        self.entries.get(KEY_CONTENT).and_then(Value::as_record)
    }

    fn required(&self, key: &str) -> &str {
        match self.entries.get(key) {
            Some(Value::Atom(Atom::Str(s))) => s,
            _ => unreachable!("required key checked at construction"),
        }
    }

    pub fn from_json_value(json: &serde_json::Value) -> Result<Self, EventError> {
        let obj = json.as_object().ok_or(EventError::NotAnObject)?;
        let record = record_from_json(obj)?;
        Event::from_record(record)
    }

    pub fn from_json_str(text: &str) -> Result<Self, EventError> {
        let json: serde_json::Value =
            serde_json::from_str(text).map_err(|_| EventError::NotAnObject)?;
        Event::from_json_value(&json)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        record_to_json(&self.entries)
    }

    /// Compact single-line JSON, the wire encoding used by the service and
    /// by trace files.
    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }
}

fn atom_from_json(key: &str, json: &serde_json::Value) -> Result<Atom, EventError> {
    match json {
        serde_json::Value::String(s) => Ok(Atom::Str(s.clone())),
        serde_json::Value::Number(n) => Ok(Atom::Num(n.clone())),
        serde_json::Value::Bool(b) => Ok(Atom::Bool(*b)),
        serde_json::Value::Null => Err(EventError::NullValue(key.to_string())),
        _ => Err(EventError::NestedList(key.to_string())),
    }
}

fn value_from_json(key: &str, json: &serde_json::Value) -> Result<Value, EventError> {
    match json {
        serde_json::Value::Array(items) => {
            let atoms = items
                .iter()
                .map(|item| atom_from_json(key, item))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::List(atoms))
        }
        serde_json::Value::Object(obj) => Ok(Value::Record(record_from_json(obj)?)),
        other => Ok(Value::Atom(atom_from_json(key, other)?)),
    }
}

fn record_from_json(
    obj: &serde_json::Map<String, serde_json::Value>,
) -> Result<Record, EventError> {
    let mut record = Record::new();
    for (key, json) in obj {
        if key.is_empty() {
            return Err(EventError::EmptyKey);
        }
        record.insert(key.clone(), value_from_json(key, json)?);
    }
    Ok(record)
}

fn atom_to_json(atom: &Atom) -> serde_json::Value {
    match atom {
        Atom::Str(s) => serde_json::Value::String(s.clone()),
        Atom::Num(n) => serde_json::Value::Number(n.clone()),
        Atom::Bool(b) => serde_json::Value::Bool(*b),
    }
}

fn value_to_json(value: &Value) -> serde_json::Value {
    match value {
        Value::Atom(a) => atom_to_json(a),
        Value::List(items) => serde_json::Value::Array(items.iter().map(atom_to_json).collect()),
        Value::Record(r) => record_to_json(r),
    }
}

fn record_to_json(record: &Record) -> serde_json::Value {
    let map = record
        .iter()
        .map(|(k, v)| (k.clone(), value_to_json(v)))
        .collect();
    serde_json::Value::Object(map)
}
