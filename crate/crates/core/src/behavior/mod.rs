//! Orchestration behavior of composite services.
//!
//! A [`BehaviorModel`] is a BPMN-style graph: one start event, end events,
//! receive/reply/invoke tasks and exclusive/parallel gateways. It is checked
//! against the service model by [`validate_behavior`] and decomposed into a
//! well-nested [`StructuredBehavior`] by [`normalize_to_structured`], which
//! is what the BPEL generator consumes.

mod document;
mod structured;
mod validate;

use std::collections::HashMap;

use thiserror::Error;

use crate::condition::{Condition, Operand};

pub use document::{parse_behavior, parse_behavior_in};
pub use structured::{normalize_to_structured, Block, Step, StructuredBehavior};
pub use validate::{validate_behavior, FAULT_FIELD};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorModel {
    pub process: String,
    pub variables: Vec<Variable>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// A process variable holding one message of a declared data type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub type_ref: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    /// Display label; falls back to the id.
    pub label: Option<String>,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Start,
    End,
    Receive(ReceiveTask),
    Reply(ReplyTask),
    Invoke(InvokeTask),
    Exclusive,
    Parallel,
}

/// The process entry: accepts a request on one of the composite's own
/// operations and stores it in `variable`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiveTask {
    pub operation: String,
    pub variable: String,
}

/// Answers the received request, either with the operation's output
/// message or with one of its out-faults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplyTask {
    pub fault: Option<String>,
    pub assign: Vec<Copy>,
}

/// Calls an operation of a component service.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvokeTask {
    pub service: String,
    pub operation: String,
    /// Populates the request message field by field.
    pub input: Vec<Copy>,
    /// Variable receiving the response, if the flow reads it.
    pub output: Option<String>,
}

/// One field copy into an outgoing message. `to` is a dotted field path of
/// the message type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Copy {
    pub to: String,
    pub from: Operand,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub condition: Option<Condition>,
    /// Marks the branch an exclusive split takes when no condition holds.
    pub default: bool,
}

impl Node {
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }

    pub fn is_task(&self) -> bool {
        matches!(
            self.kind,
            NodeKind::Receive(_) | NodeKind::Reply(_) | NodeKind::Invoke(_)
        )
    }

    pub fn is_gateway(&self) -> bool {
        matches!(self.kind, NodeKind::Exclusive | NodeKind::Parallel)
    }
}

impl BehaviorModel {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn invoke_tasks(&self) -> impl Iterator<Item = (&Node, &InvokeTask)> {
        self.nodes.iter().filter_map(|n| match &n.kind {
            NodeKind::Invoke(t) => Some((n, t)),
            _ => None,
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BehaviorError {
    #[error("syntax error: {message}")]
    Syntax {
        message: String,
        line: usize,
        column: usize,
    },
    #[error("unresolved reference `{name}` at {path}")]
    UnresolvedReference { path: String, name: String },
    #[error("duplicate {kind} `{name}`")]
    DuplicateName { kind: &'static str, name: String },
}

/// Raised by [`normalize_to_structured`] for graphs that do not decompose
/// into matched single-entry single-exit regions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unstructured region at `{entry}`: {reason}")]
pub struct UnstructuredGraph {
    pub entry: String,
    pub reason: String,
}

/// Adjacency over node indices. Edges whose endpoints do not resolve are
/// left out; duplicate ids resolve to the first node.
pub(crate) struct Topology {
    pub outgoing: Vec<Vec<usize>>,
    pub incoming: Vec<Vec<usize>>,
    /// Edge index to (from, to) node indices.
    pub ends: Vec<Option<(usize, usize)>>,
}

impl Topology {
    pub fn new(b: &BehaviorModel) -> Self {
        let mut index = HashMap::new();
        for (i, n) in b.nodes.iter().enumerate() {
            index.entry(n.id.as_str()).or_insert(i);
        }
        let mut t = Topology {
            outgoing: vec![Vec::new(); b.nodes.len()],
            incoming: vec![Vec::new(); b.nodes.len()],
            ends: Vec::with_capacity(b.edges.len()),
        };
        for (e, edge) in b.edges.iter().enumerate() {
            let ends = index.get(edge.from.as_str()).zip(index.get(edge.to.as_str()));
            if let Some((&f, &to)) = ends {
                t.outgoing[f].push(e);
                t.incoming[to].push(e);
            }
            t.ends.push(ends.map(|(&f, &to)| (f, to)));
        }
        t
    }

    pub fn target(&self, edge: usize) -> usize {
        self.ends[edge].expect("edge in adjacency").1
    }

    /// Marks the nodes reachable from any start event that has an
    /// outgoing edge.
    pub fn reachable(&self, b: &BehaviorModel) -> Vec<bool> {
        let mut seen = vec![false; b.nodes.len()];
        let mut stack: Vec<usize> = b
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, n)| n.kind == NodeKind::Start && !self.outgoing[*i].is_empty())
            .map(|(i, _)| i)
            .collect();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n], true) {
                continue;
            }
            stack.extend(self.outgoing[n].iter().map(|&e| self.target(e)));
        }
        seen
    }
}
