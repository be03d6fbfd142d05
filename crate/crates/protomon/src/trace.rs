//! Trace files: one event as a JSON object per line.
//!
//! The format is appendable — a recorder can stream events out and a
//! checker can replay them later. Blank lines are ignored; anything else
//! must parse as a full event, and errors carry the 1-based line number.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::event::Event;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read trace: {0}")]
    Io(#[from] io::Error),
    #[error("trace line {line}: {problem}")]
    Malformed { line: usize, problem: String },
}

pub fn read_trace<R: BufRead>(reader: R) -> Result<Vec<Event>, TraceError> {
    let mut events = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let json: serde_json::Value =
            serde_json::from_str(text).map_err(|e| TraceError::Malformed {
                line: index + 1,
                problem: format!("not valid JSON ({e})"),
            })?;
        let event = Event::from_json_value(&json).map_err(|e| TraceError::Malformed {
            line: index + 1,
            problem: e.to_string(),
        })?;
        events.push(event);
    }
    Ok(events)
}

pub fn read_trace_file(path: &Path) -> Result<Vec<Event>, TraceError> {
    read_trace(BufReader::new(File::open(path)?))
}

pub fn write_trace<W: Write>(mut writer: W, events: &[Event]) -> io::Result<()> {
    for event in events {
        writeln!(writer, "{}", event.to_json_string())?;
    }
    Ok(())
}

pub fn write_trace_file(path: &Path, events: &[Event]) -> io::Result<()> {
    write_trace(File::create(path)?, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Vec<Event> {
        [
            json!({"performative": "question", "sender": "operator", "receiver": "assistant",
                   "content": {"name": "getValidationResult"}}),
            json!({"performative": "assert", "sender": "assistant", "receiver": "operator",
                   "content": {"name": ["answer", "result"], "arg1": "p12", "arg2": "bed3"}}),
        ]
        .iter()
        .map(|j| Event::from_json_value(j).unwrap())
        .collect()
    }

    #[test]
    fn write_then_read_round_trips() {
        let events = sample();
        let mut buffer = Vec::new();
        write_trace(&mut buffer, &events).unwrap();
        let read_back = read_trace(&buffer[..]).unwrap();
        assert_eq!(read_back, events);
    }

    #[test]
    fn blank_lines_are_skipped() {
        let text = "\n{\"performative\":\"q\",\"sender\":\"a\",\"receiver\":\"b\"}\n\n  \n";
        assert_eq!(read_trace(text.as_bytes()).unwrap().len(), 1);
    }

    #[test]
    fn bad_json_names_the_line() {
        let text = "{\"performative\":\"q\",\"sender\":\"a\",\"receiver\":\"b\"}\nnot json\n";
        let err = read_trace(text.as_bytes()).unwrap_err();
        assert!(
            matches!(err, TraceError::Malformed { line: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn invalid_event_names_the_line() {
        let text = "{\"performative\":\"q\",\"sender\":\"a\"}\n";
        let err = read_trace(text.as_bytes()).unwrap_err();
        assert!(
            matches!(err, TraceError::Malformed { line: 1, .. }),
            "{err}"
        );
    }

    #[test]
    fn empty_file_is_an_empty_trace() {
        assert!(read_trace(&b""[..]).unwrap().is_empty());
    }
}
