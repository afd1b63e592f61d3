//! Model-driven toolchain for semantic Web services.
//!
//! The pipeline runs from a platform-independent service model ([`pim`])
//! through a rule-based transformation ([`transform`]) to SAWSDL interface
//! documents ([`sawsdl`]), and from a BPMN-style behavior graph
//! ([`behavior`]) to a process WSDL and a BPEL process ([`bpel`]). The
//! [`sim`] module interprets generated BPEL against table-driven stubs.

pub mod behavior;
pub mod bpel;
pub mod condition;
pub mod names;
pub mod pim;
pub mod report;
pub mod sawsdl;
pub mod sim;
pub mod transform;
mod xml;

pub use report::{ValidationReport, Violation};
