//! Executable process generation for composite services.
//!
//! [`gen_process_wsdl`] produces the process WSDL (imports plus partner link
//! types) and [`gen_bpel`] compiles a [`StructuredBehavior`] into a BPEL
//! process tree. Both serialize deterministically; [`parse_bpel`] and
//! [`parse_process_wsdl`] read the emitted form back.
//!
//! [`StructuredBehavior`]: crate::behavior::StructuredBehavior

mod emit;
mod generate;
mod parse;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::behavior::UnstructuredGraph;
use crate::condition::{Condition, Operand, Path};
use crate::report::ValidationReport;
use crate::sawsdl::SawsdlError;
use crate::transform::TransformError;

pub use emit::{emit_bpel, emit_process_wsdl};
pub use generate::{emit_process_artifacts, gen_bpel, gen_process_wsdl};
pub use parse::{parse_bpel, parse_process_wsdl};

pub const BPEL_NS: &str = "http://docs.oasis-open.org/wsbpel/2.0/process/executable";
pub const PLNK_NS: &str = "http://docs.oasis-open.org/wsbpel/2.0/plnktype";
/// Namespace of the designer annotations (`bpmn:label`, `bpmn:id`).
pub const BPMN_NS: &str = "http://www.intalio.com/bpms";
/// Conditions and copy operands are written in the shared condition grammar.
pub const EXPRESSION_LANGUAGE: &str = "urn:swsforge:condition";
pub const WSDL_IMPORT_TYPE: &str = "http://www.w3.org/ns/wsdl";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessWsdl {
    /// `<Composite>Process`.
    pub process_name: String,
    pub target_namespace: String,
    /// Namespace of the composite's own SAWSDL interface, bound to the
    /// process name as prefix.
    pub interface_namespace: String,
    pub imports: Vec<Import>,
    pub partner_link_types: Vec<PartnerLinkType>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub namespace: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartnerLinkType {
    pub name: String,
    pub role: String,
    pub port_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpelDocument {
    pub name: String,
    pub target_namespace: String,
    /// Prefix declarations besides `bpel` and `bpmn`, in emission order.
    pub namespaces: Vec<(String, String)>,
    pub imports: Vec<Import>,
    pub partner_links: Vec<PartnerLink>,
    pub variables: Vec<BpelVariable>,
    pub body: Activity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartnerLink {
    pub name: String,
    pub partner_link_type: String,
    pub my_role: Option<String>,
    pub partner_role: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpelVariable {
    pub name: String,
    pub message_type: String,
}

/// Designer annotations carried from the behavior node onto its activity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionHint {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Activity {
    Sequence(Vec<Activity>),
    Flow {
        name: String,
        branches: Vec<Activity>,
    },
    If {
        name: String,
        branches: Vec<(Condition, Activity)>,
        otherwise: Option<Box<Activity>>,
    },
    While {
        name: String,
        condition: Condition,
        body: Box<Activity>,
    },
    Receive(Receive),
    Reply(Reply),
    Invoke(Invoke),
    Assign(Assign),
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receive {
    pub hint: ExecutionHint,
    pub partner_link: String,
    pub port_type: String,
    pub operation: String,
    pub variable: String,
    pub create_instance: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub hint: ExecutionHint,
    pub partner_link: String,
    pub port_type: String,
    pub operation: String,
    pub variable: Option<String>,
    /// Qualified fault name (`this:<Fault>`) for fault replies.
    pub fault_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invoke {
    pub hint: ExecutionHint,
    pub partner_link: String,
    pub port_type: String,
    pub operation: String,
    pub input_variable: String,
    pub output_variable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assign {
    pub name: String,
    pub copies: Vec<CopyRule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyRule {
    pub from: Operand,
    pub to: Path,
}

impl Invoke {
    /// Component service named by the port type (`tns:<Service>ServiceSoap`).
    pub fn service(&self) -> Option<&str> {
        service_of_port_type(&self.port_type)
    }
}

impl Activity {
    /// Pre-order walk over this activity and everything nested in it.
    pub fn walk(&self) -> Vec<&Activity> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(a) = stack.pop() {
            out.push(a);
            let children: Vec<&Activity> = match a {
                Activity::Sequence(items) => items.iter().collect(),
                Activity::Flow { branches, .. } => branches.iter().collect(),
                Activity::If {
                    branches, otherwise, ..
                } => branches.iter().map(|(_, a)| a).chain(otherwise.as_deref()).collect(),
                Activity::While { body, .. } => vec![body],
                _ => Vec::new(),
            };
            stack.extend(children.into_iter().rev());
        }
        out
    }

    /// Variables this activity reads or writes directly.
    pub fn variables(&self) -> Vec<&str> {
        match self {
            Activity::Receive(r) => vec![&r.variable],
            Activity::Reply(r) => r.variable.as_deref().into_iter().collect(),
            Activity::Invoke(i) => std::iter::once(i.input_variable.as_str())
                .chain(i.output_variable.as_deref())
                .collect(),
            Activity::Assign(a) => a
                .copies
                .iter()
                .flat_map(|c| {
                    let from = match &c.from {
                        Operand::Path(p) => Some(p.variable.as_str()),
                        Operand::Literal(_) => None,
                    };
                    from.into_iter().chain([c.to.variable.as_str()])
                })
                .collect(),
            Activity::If { branches, .. } => branches.iter().flat_map(|(c, _)| c.variables()).collect(),
            Activity::While { condition, .. } => condition.variables().into_iter().collect(),
            _ => Vec::new(),
        }
    }
}

impl BpelDocument {
    pub fn invokes(&self) -> Vec<&Invoke> {
        self.body
            .walk()
            .into_iter()
            .filter_map(|a| match a {
                Activity::Invoke(i) => Some(i),
                _ => None,
            })
            .collect()
    }

    pub fn partner_link(&self, name: &str) -> Option<&PartnerLink> {
        self.partner_links.iter().find(|p| p.name == name)
    }
}

/// `<Composite>Process`.
pub fn process_name(composite: &str) -> String {
    format!("{composite}Process")
}

/// Port type a component service is reached through.
pub fn component_port_type(service: &str) -> String {
    format!("tns:{service}ServiceSoap")
}

pub fn service_of_port_type(port_type: &str) -> Option<&str> {
    port_type
        .strip_prefix("tns:")?
        .strip_suffix("ServiceSoap")
        .filter(|s| !s.is_empty())
}

/// Partner link variable for a partner link type: first letter lowered,
/// any `Plk` suffix replaced by `PlkVar`.
pub fn partner_link_name(partner_link_type: &str) -> String {
    let stem = partner_link_type.strip_suffix("Plk").unwrap_or(partner_link_type);
    format!("{}PlkVar", crate::names::decapitalize(stem))
}

#[derive(Debug, Error)]
pub enum BpelError {
    #[error("unknown service `{0}`")]
    UnknownService(String),
    #[error("`{0}` is not a composite service")]
    NotComposite(String),
    #[error("model is invalid:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("behavior is invalid:\n{0}")]
    InvalidBehavior(ValidationReport),
    #[error(transparent)]
    Unstructured(#[from] UnstructuredGraph),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Sawsdl(#[from] SawsdlError),
    #[error("process violates invariants:\n  {}", .0.join("\n  "))]
    InvariantViolation(Vec<String>),
    #[error("XML syntax error at line {line} column {column}: {message}")]
    XmlSyntax { message: String, line: u32, column: u32 },
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("cannot write {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}
