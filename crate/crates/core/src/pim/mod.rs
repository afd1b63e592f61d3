//! Platform-independent model of atomic and composite semantic Web services.
//!
//! A [`ServiceModel`] is what the developer authors: services that each
//! realize one interface, operations with typed parameters and faults, data
//! types, and optional semantic annotations (concept URIs plus
//! lowering/lifting mappings). Composite services aggregate other services
//! and point at a behavior document.
//!
//! | profile element | home |
//! |---|---|
//! | business service (atomic / composite) | [`Service`], [`ServiceKind`] |
//! | interface | [`Interface`] |
//! | operation ("method") | [`Operation`] |
//! | in / out param | [`Parameter`] |
//! | in / out fault | [`Fault`] |
//! | Type | [`DataType`] |
//! | SemanticConcept | [`SemanticAnnotation`] |
//! | Mapping (LoweringSchema / LiftingSchema) | [`Mapping`] |
//! | Behavior | [`Service::behavior`] |
//! | composite aggregation | [`Service::components`] |

mod document;
mod validate;

use std::collections::HashSet;

use thiserror::Error;

use crate::report::ValidationReport;

pub(crate) use document::deserialize_json;
pub use document::{parse_model, parse_model_with, serialize_model, ParseOptions};
pub use validate::validate;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ServiceModel {
    pub namespace: String,
    pub data_types: Vec<DataType>,
    pub services: Vec<Service>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServiceKind {
    Atomic,
    Composite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Service {
    pub name: String,
    pub kind: ServiceKind,
    pub interface: Interface,
    /// Names of the aggregated services, in declaration order.
    pub components: Vec<String>,
    /// Identifier of the behavior document that orchestrates the components.
    pub behavior: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub name: String,
    pub operations: Vec<Operation>,
    pub annotation: Option<SemanticAnnotation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub inputs: Vec<Parameter>,
    pub outputs: Vec<Parameter>,
    pub infaults: Vec<Fault>,
    pub outfaults: Vec<Fault>,
    pub annotation: Option<SemanticAnnotation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parameter {
    pub name: String,
    pub type_ref: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub name: String,
    pub type_ref: Option<String>,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataType {
    pub name: String,
    pub content: TypeContent,
    pub annotation: Option<SemanticAnnotation>,
    pub mapping: Option<Mapping>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeContent {
    /// Restriction-free alias of an XML Schema built-in (`integer`, `string`, ...).
    Simple { base_type: String },
    /// Ordered record of named fields.
    Complex { fields: Vec<Field> },
}

/// A complex-type field. `type_ref` names a declared [`DataType`] or, when
/// no such type exists, an XML Schema built-in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub type_ref: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticAnnotation {
    pub concept_uris: Vec<String>,
}

impl SemanticAnnotation {
    pub fn new<I, S>(uris: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SemanticAnnotation {
            concept_uris: uris.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    pub lowering_schema: Option<String>,
    pub lifting_schema: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error{}: {message}", position(*.line, *.column))]
    Syntax {
        message: String,
        line: usize,
        column: usize,
    },
    #[error("unresolved reference `{name}` at {path}")]
    UnresolvedReference { path: String, name: String },
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("invalid model:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("unknown service `{0}`")]
    UnknownService(String),
    #[error("composition cycle through `{0}`")]
    CompositionCycle(String),
}

fn position(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" at line {line} column {column}")
    }
}

/// A resolved field reference: either another declared type or a built-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldType<'a> {
    Declared(&'a DataType),
    BuiltIn(&'a str),
}

impl ServiceModel {
    pub fn empty(namespace: impl Into<String>) -> Self {
        ServiceModel {
            namespace: namespace.into(),
            data_types: Vec::new(),
            services: Vec::new(),
        }
    }

    pub fn service(&self, name: &str) -> Option<&Service> {
        self.services.iter().find(|s| s.name == name)
    }

    pub fn data_type(&self, name: &str) -> Option<&DataType> {
        self.data_types.iter().find(|t| t.name == name)
    }

    pub fn resolve_field_type<'a>(&'a self, type_ref: &'a str) -> Option<FieldType<'a>> {
        match self.data_type(type_ref) {
            Some(t) => Some(FieldType::Declared(t)),
            None if crate::names::is_xsd_builtin(type_ref) => Some(FieldType::BuiltIn(type_ref)),
            None => None,
        }
    }

    /// Depth-first, declaration-ordered list of the atomic services that
    /// `service_name` is transitively composed of. An atomic service is its
    /// own closure. Services reachable along several paths appear once, at
    /// their first position.
    pub fn composition_closure(&self, service_name: &str) -> Result<Vec<String>, ModelError> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut on_stack = Vec::new();
        self.closure_visit(service_name, &mut on_stack, &mut seen, &mut out)?;
        Ok(out)
    }

    fn closure_visit<'a>(
        &'a self,
        name: &'a str,
        on_stack: &mut Vec<&'a str>,
        seen: &mut HashSet<&'a str>,
        out: &mut Vec<String>,
    ) -> Result<(), ModelError> {
        if on_stack.contains(&name) {
            return Err(ModelError::CompositionCycle(name.to_string()));
        }
        let service = self
            .service(name)
            .ok_or_else(|| ModelError::UnknownService(name.to_string()))?;
        match service.kind {
            ServiceKind::Atomic => {
                if seen.insert(name) {
                    out.push(name.to_string());
                }
            }
            ServiceKind::Composite => {
                on_stack.push(name);
                for component in &service.components {
                    self.closure_visit(component, on_stack, seen, out)?;
                }
                on_stack.pop();
            }
        }
        Ok(())
    }

    /// Data types used by `service`'s operations, closed over field
    /// references, in model declaration order.
    pub fn types_used_by(&self, service: &Service) -> Vec<&DataType> {
        let mut wanted: HashSet<&str> = HashSet::new();
        let mut pending: Vec<&str> = Vec::new();
        for op in &service.interface.operations {
            for p in op.inputs.iter().chain(&op.outputs) {
                pending.push(&p.type_ref);
            }
            for f in op.infaults.iter().chain(&op.outfaults) {
                if let Some(t) = &f.type_ref {
                    pending.push(t);
                }
            }
        }
        while let Some(name) = pending.pop() {
            if !wanted.insert(name) {
                continue;
            }
            if let Some(TypeContent::Complex { fields }) = self.data_type(name).map(|t| &t.content) {
                pending.extend(fields.iter().map(|f| f.type_ref.as_str()));
            }
        }
        self.data_types
            .iter()
            .filter(|t| wanted.contains(t.name.as_str()))
            .collect()
    }

    /// The sub-model holding only `service_name` and the types it uses.
    pub fn restrict_to(&self, service_name: &str) -> Result<ServiceModel, ModelError> {
        let service = self
            .service(service_name)
            .ok_or_else(|| ModelError::UnknownService(service_name.to_string()))?;
        Ok(ServiceModel {
            namespace: self.namespace.clone(),
            data_types: self.types_used_by(service).into_iter().cloned().collect(),
            services: vec![service.clone()],
        })
    }

    /// Flattens a data type into dotted leaf paths with their built-in types.
    /// A simple type flattens to the single path `value`. Returns `None` for
    /// unresolved or cyclic references.
    pub fn flatten_type(&self, type_name: &str) -> Option<Vec<(String, String)>> {
        let ty = self.data_type(type_name)?;
        match &ty.content {
            TypeContent::Simple { base_type } => Some(vec![("value".to_string(), base_type.clone())]),
            TypeContent::Complex { .. } => {
                let mut out = Vec::new();
                let mut stack = vec![type_name];
                self.flatten_fields(ty, "", &mut stack, &mut out)?;
                Some(out)
            }
        }
    }

    fn flatten_fields<'a>(
        &'a self,
        ty: &'a DataType,
        prefix: &str,
        stack: &mut Vec<&'a str>,
        out: &mut Vec<(String, String)>,
    ) -> Option<()> {
        let TypeContent::Complex { fields } = &ty.content else {
            return Some(());
        };
        for field in fields {
            let path = if prefix.is_empty() {
                field.name.clone()
            } else {
                format!("{prefix}.{}", field.name)
            };
            match self.resolve_field_type(&field.type_ref)? {
                FieldType::BuiltIn(b) => out.push((path, b.to_string())),
                FieldType::Declared(inner) => match &inner.content {
                    TypeContent::Simple { base_type } => out.push((path, base_type.clone())),
                    TypeContent::Complex { .. } => {
                        if stack.contains(&inner.name.as_str()) {
                            return None;
                        }
                        stack.push(&inner.name);
                        self.flatten_fields(inner, &path, stack, out)?;
                        stack.pop();
                    }
                },
            }
        }
        Some(())
    }
}

impl Service {
    pub fn operation(&self, name: &str) -> Option<&Operation> {
        self.interface.operations.iter().find(|o| o.name == name)
    }
}

impl Operation {
    pub fn faults(&self) -> impl Iterator<Item = &Fault> {
        self.infaults.iter().chain(&self.outfaults)
    }
}
