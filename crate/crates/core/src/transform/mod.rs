//! Rule-based mapping between the service model and SAWSDL descriptions.
//!
//! The forward direction is a fixed ordered pass: data types, then the
//! interface, then operations (with their message-exchange pattern,
//! messages and faults), then semantic annotations. Every produced PSM
//! node is recorded in a [`TraceLink`] naming the rule that created it.

mod forward;
mod paths;
mod reverse;

use serde::Serialize;
use thiserror::Error;

use crate::report::ValidationReport;

pub use forward::pim_to_psm;
pub use paths::{pim_path_exists, psm_path_exists};
pub use reverse::psm_to_pim;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformRule {
    pub rule_id: &'static str,
    /// Profile element the rule matches.
    pub source_kind: &'static str,
    /// `Stereotype`, `Tag Value`, or `Derived` for rules with no profile row.
    pub profile_type: &'static str,
    pub target_kind: &'static str,
    pub description: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TraceLink {
    pub rule_id: &'static str,
    pub source_path: String,
    pub target_path: String,
}

pub const RULE_INTERFACE: &str = "SemanticInterface";
pub const RULE_OPERATION: &str = "SemanticOperation";
pub const RULE_IN_PARAM: &str = "InParam";
pub const RULE_OUT_PARAM: &str = "OutParam";
pub const RULE_IN_FAULT: &str = "InFault";
pub const RULE_OUT_FAULT: &str = "OutFault";
pub const RULE_TYPE: &str = "SchemaType";
pub const RULE_CONCEPT: &str = "SemanticConcept";
pub const RULE_MAPPING: &str = "SchemaMapping";
pub const RULE_LOWERING: &str = "LoweringSchema";
pub const RULE_LIFTING: &str = "LiftingSchema";
pub const RULE_MEP: &str = "MessageExchangePattern";

static RULES: [TransformRule; 12] = [
    TransformRule {
        rule_id: RULE_INTERFACE,
        source_kind: "AtomicSemanticWebService",
        profile_type: "Stereotype",
        target_kind: "WSDLInterface",
        description: "service interface to wsdl:interface, keeping its name",
    },
    TransformRule {
        rule_id: RULE_OPERATION,
        source_kind: "AtomicSemanticWebService's Method",
        profile_type: "Stereotype",
        target_kind: "WSDLOperation",
        description: "interface operation to wsdl:operation, keeping its name",
    },
    TransformRule {
        rule_id: RULE_IN_PARAM,
        source_kind: "in param",
        profile_type: "Stereotype",
        target_kind: "WSDLInput",
        description: "input parameter to wsdl:input referencing the parameter type's element",
    },
    TransformRule {
        rule_id: RULE_OUT_PARAM,
        source_kind: "out param",
        profile_type: "Stereotype",
        target_kind: "WSDLOutput",
        description: "output parameter to wsdl:output referencing the parameter type's element",
    },
    TransformRule {
        rule_id: RULE_IN_FAULT,
        source_kind: "in fault",
        profile_type: "Stereotype",
        target_kind: "WSDLInfault",
        description: "input fault to wsdl:infault referencing an interface fault",
    },
    TransformRule {
        rule_id: RULE_OUT_FAULT,
        source_kind: "out fault",
        profile_type: "Stereotype",
        target_kind: "WSDLOutfault",
        description: "output fault to wsdl:outfault referencing an interface fault",
    },
    TransformRule {
        rule_id: RULE_TYPE,
        source_kind: "Type",
        profile_type: "Stereotype",
        target_kind: "XMLSchemaElement",
        description: "data type to a global xs:element, simple or sequence-of-built-ins",
    },
    TransformRule {
        rule_id: RULE_CONCEPT,
        source_kind: "SemanticConcept",
        profile_type: "Stereotype",
        target_kind: "SAWSDLModelReference",
        description: "concept URIs to sawsdl:modelReference on the mapped node",
    },
    TransformRule {
        rule_id: RULE_MAPPING,
        source_kind: "Mapping",
        profile_type: "Stereotype",
        target_kind: "SAWSDLSchemaMapping",
        description: "type mapping to the schema-mapping attributes of its element",
    },
    TransformRule {
        rule_id: RULE_LOWERING,
        source_kind: "LoweringSchema",
        profile_type: "Tag Value",
        target_kind: "SAWSDLLoweringSchema",
        description: "lowering URI to sawsdl:loweringSchemaMapping",
    },
    TransformRule {
        rule_id: RULE_LIFTING,
        source_kind: "LiftingSchema",
        profile_type: "Tag Value",
        target_kind: "SAWSDLLiftingSchema",
        description: "lifting URI to sawsdl:liftingSchemaMapping",
    },
    TransformRule {
        rule_id: RULE_MEP,
        source_kind: "AtomicSemanticWebService's Method",
        profile_type: "Derived",
        target_kind: "WSDLOperation pattern",
        description: "inputs only give in-only, inputs and outputs give in-out",
    },
];

/// The rule registry in application order. Stable across calls.
pub fn list_rules() -> &'static [TransformRule] {
    &RULES
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("unknown service `{0}`")]
    UnknownService(String),
    #[error("model cannot be transformed:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("description violates invariants:\n  {}", .0.join("\n  "))]
    InvalidDescription(Vec<String>),
    #[error("no model element corresponds to {0}")]
    AmbiguousReverse(String),
}

/// Target namespace of the description generated for `service`.
pub fn target_namespace(model_namespace: &str, service: &str) -> String {
    format!("{model_namespace}/{service}")
}
