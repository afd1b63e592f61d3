//! Desk-scale interpreter for generated BPEL processes.
//!
//! Component services are replaced by a [`StubRegistry`]: per operation, an
//! ordered list of guarded cases answering with a message or a fault. A run
//! produces an [`ExecutionTrace`] that serializes as line-delimited JSON.

mod check;
mod interp;
mod stubs;

use serde::Serialize;
use thiserror::Error;

use crate::condition::{Condition, Message};

pub use check::{assert_trace, EventMatcher, TraceCheck};
pub use interp::{simulate, simulate_with, SimOptions, DEFAULT_LOOP_LIMIT};
pub use stubs::{parse_message, parse_stubs};

/// Name of the event a run ends with when it exceeds the loop limit.
pub const LOOP_LIMIT: &str = "LOOP_LIMIT";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StubRegistry {
    pub stubs: Vec<Stub>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stub {
    pub service: String,
    pub operation: String,
    /// Tried in order; the last one carries no guard.
    pub cases: Vec<StubCase>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubCase {
    /// Predicate over `$request`.
    pub when: Option<Condition>,
    pub result: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Response(Message),
    Fault(String),
}

impl StubRegistry {
    pub fn get(&self, service: &str, operation: &str) -> Option<&Stub> {
        self.stubs
            .iter()
            .find(|s| s.service == service && s.operation == operation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Received {
        label: String,
    },
    Invoked {
        service: String,
        operation: String,
        request: Message,
        outcome: Outcome,
    },
    Evaluated {
        condition: String,
        value: bool,
    },
    Replied {
        #[serde(skip_serializing_if = "Option::is_none")]
        fault: Option<String>,
        message: Message,
    },
    Completed,
    Faulted {
        name: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExecutionTrace {
    pub events: Vec<TraceEvent>,
}

impl ExecutionTrace {
    /// One JSON object per line, each terminated by a newline.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn is_completed(&self) -> bool {
        self.events.last() == Some(&TraceEvent::Completed)
    }

    /// `(service, operation)` of every invocation, in order.
    pub fn invocations(&self) -> Vec<(&str, &str)> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Invoked { service, operation, .. } => Some((service.as_str(), operation.as_str())),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("syntax error{}: {message}", position(*.line, *.column))]
    Syntax {
        message: String,
        line: usize,
        column: usize,
    },
    #[error("invalid stub registry: {0}")]
    InvalidStubs(String),
    #[error("no stub for {service}.{operation}")]
    MissingStub { service: String, operation: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("no branch of `{0}` applies and it has no else branch")]
    NoMatchingExclusiveBranch(String),
    #[error("undefined field: {0}")]
    UndefinedField(String),
    #[error("unsupported process: {0}")]
    Unsupported(String),
}

fn position(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" at line {line} column {column}")
    }
}
