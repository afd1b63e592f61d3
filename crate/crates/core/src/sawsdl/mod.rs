//! Platform-specific model: WSDL 2.0 interface descriptions carrying SAWSDL
//! annotations, with deterministic XML emission and namespace-driven parsing.

mod emit;
mod parse;

use std::collections::HashSet;

use thiserror::Error;

use crate::names::{is_absolute_uri, is_ncname, is_xsd_builtin};

pub use emit::emit_sawsdl;
pub use parse::parse_sawsdl;

pub const WSDL_NS: &str = "http://www.w3.org/ns/wsdl";
pub const SAWSDL_NS: &str = "http://www.w3.org/ns/sawsdl";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema";
/// Extension namespace recording the model-level parameter name on a
/// message reference when it differs from the referenced element.
pub const PIM_NS: &str = "http://swsforge.dev/ns/pim";

pub const MEP_IN_ONLY: &str = "http://www.w3.org/ns/wsdl/in-only";
pub const MEP_IN_OUT: &str = "http://www.w3.org/ns/wsdl/in-out";
/// Abbreviated pattern URI accepted on input and read as in-only.
pub const MEP_IN_ABBREVIATED: &str = "http://www.w3.org/ns/wsdl/in";

pub const SUPPORTED_MEPS: &[&str] = &[MEP_IN_ONLY, MEP_IN_OUT];

pub fn normalize_mep(pattern: &str) -> &str {
    match pattern.trim() {
        MEP_IN_ABBREVIATED => MEP_IN_ONLY,
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WsdlDescription {
    pub target_namespace: String,
    pub schema_elements: Vec<SchemaElement>,
    pub interfaces: Vec<WsdlInterface>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WsdlInterface {
    pub name: String,
    pub faults: Vec<InterfaceFault>,
    pub operations: Vec<WsdlOperation>,
    pub model_reference: Option<ModelReference>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WsdlOperation {
    pub name: String,
    pub pattern: String,
    pub input: Option<MessageReference>,
    pub output: Option<MessageReference>,
    pub infaults: Vec<FaultReference>,
    pub outfaults: Vec<FaultReference>,
    pub model_reference: Option<ModelReference>,
}

/// `wsdl:input` / `wsdl:output`: the global element carrying the message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageReference {
    pub element: String,
    pub parameter: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaultReference {
    pub fault: String,
    pub message_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceFault {
    pub name: String,
    pub element: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaElement {
    pub name: String,
    pub content: ElementContent,
    pub model_reference: Option<ModelReference>,
    pub lowering_schema_mapping: Vec<String>,
    pub lifting_schema_mapping: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementContent {
    /// `type="xs:<built_in>"`
    Simple { built_in: String },
    /// Anonymous complex type holding a sequence of built-in typed children.
    Complex { children: Vec<ChildElement> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildElement {
    pub name: String,
    pub built_in: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelReference {
    pub uris: Vec<String>,
}

impl ModelReference {
    pub fn new<I, S>(uris: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ModelReference {
            uris: uris.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SawsdlError {
    #[error("XML syntax error at line {line} column {column}: {message}")]
    XmlSyntax { message: String, line: u32, column: u32 },
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("root element `{0}` is not in the WSDL 2.0 namespace")]
    MissingNamespace(String),
    #[error("malformed description: {0}")]
    Malformed(String),
    #[error("description violates invariants:\n  {}", .0.join("\n  "))]
    InvariantViolation(Vec<String>),
}

impl WsdlDescription {
    pub fn empty(target_namespace: impl Into<String>) -> Self {
        WsdlDescription {
            target_namespace: target_namespace.into(),
            ..Default::default()
        }
    }

    pub fn schema_element(&self, name: &str) -> Option<&SchemaElement> {
        self.schema_elements.iter().find(|e| e.name == name)
    }

    pub fn interface(&self, name: &str) -> Option<&WsdlInterface> {
        self.interfaces.iter().find(|i| i.name == name)
    }

    /// Lists every invariant violation; empty when the description can be
    /// emitted.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !is_absolute_uri(&self.target_namespace) {
            out.push(format!(
                "targetNamespace `{}` is not an absolute URI",
                self.target_namespace
            ));
        }
        let check_ref = |out: &mut Vec<String>, what: &str, r: &Option<ModelReference>| {
            if let Some(r) = r {
                if r.uris.is_empty() {
                    out.push(format!("{what}: empty modelReference"));
                }
                for u in &r.uris {
                    if !is_absolute_uri(u) || u.contains(char::is_whitespace) {
                        out.push(format!("{what}: `{u}` is not an absolute URI"));
                    }
                }
            }
        };
        let mut names = HashSet::new();
        for e in &self.schema_elements {
            let what = format!("element {}", e.name);
            if !is_ncname(&e.name) {
                out.push(format!("{what}: invalid name"));
            }
            if !names.insert(e.name.as_str()) {
                out.push(format!("{what}: duplicate schema element"));
            }
            match &e.content {
                ElementContent::Simple { built_in } => {
                    if !is_xsd_builtin(built_in) {
                        out.push(format!("{what}: `{built_in}` is not a built-in type"));
                    }
                }
                ElementContent::Complex { children } => {
                    if children.is_empty() {
                        out.push(format!("{what}: complex content has no child element"));
                    }
                    let mut seen = HashSet::new();
                    for c in children {
                        if !is_ncname(&c.name) || !seen.insert(c.name.as_str()) {
                            out.push(format!("{what}: invalid or repeated child `{}`", c.name));
                        }
                        if !is_xsd_builtin(&c.built_in) {
                            out.push(format!("{what}: `{}` is not a built-in type", c.built_in));
                        }
                    }
                }
            }
            check_ref(&mut out, &what, &e.model_reference);
            for u in e.lowering_schema_mapping.iter().chain(&e.lifting_schema_mapping) {
                if !is_absolute_uri(u) || u.contains(char::is_whitespace) {
                    out.push(format!("{what}: schema mapping `{u}` is not an absolute URI"));
                }
            }
        }
        let mut iface_names = HashSet::new();
        for i in &self.interfaces {
            let what = format!("interface {}", i.name);
            if !is_ncname(&i.name) {
                out.push(format!("{what}: invalid name"));
            }
            if !iface_names.insert(i.name.as_str()) {
                out.push(format!("{what}: duplicate interface"));
            }
            check_ref(&mut out, &what, &i.model_reference);
            let mut fault_names = HashSet::new();
            for f in &i.faults {
                if !is_ncname(&f.name) || !fault_names.insert(f.name.as_str()) {
                    out.push(format!("{what}: invalid or duplicate fault `{}`", f.name));
                }
                if let Some(el) = &f.element {
                    if self.schema_element(el).is_none() {
                        out.push(format!("{what}: fault `{}` references unknown element `{el}`", f.name));
                    }
                }
            }
            let mut op_names = HashSet::new();
            for op in &i.operations {
                let what = format!("{what} operation {}", op.name);
                if !is_ncname(&op.name) || !op_names.insert(op.name.as_str()) {
                    out.push(format!("{what}: invalid or duplicate name"));
                }
                if !SUPPORTED_MEPS.contains(&op.pattern.as_str()) {
                    out.push(format!("{what}: unsupported pattern `{}`", op.pattern));
                }
                match (op.pattern.as_str(), &op.input, &op.output) {
                    (MEP_IN_ONLY, Some(_), None) | (MEP_IN_OUT, Some(_), Some(_)) => {}
                    (MEP_IN_ONLY | MEP_IN_OUT, _, _) => {
                        out.push(format!("{what}: input/output do not fit pattern `{}`", op.pattern))
                    }
                    _ => {}
                }
                for m in op.input.iter().chain(&op.output) {
                    if self.schema_element(&m.element).is_none() {
                        out.push(format!("{what}: unknown element `{}`", m.element));
                    }
                    if let Some(p) = &m.parameter {
                        if !is_ncname(p) {
                            out.push(format!("{what}: invalid parameter name `{p}`"));
                        }
                    }
                }
                for (dir, refs) in [("infault", &op.infaults), ("outfault", &op.outfaults)] {
                    let mut seen = HashSet::new();
                    for r in refs {
                        if !fault_names.contains(r.fault.as_str()) {
                            out.push(format!("{what}: {dir} references undeclared fault `{}`", r.fault));
                        }
                        if !seen.insert(r.fault.as_str()) {
                            out.push(format!("{what}: {dir} `{}` repeated", r.fault));
                        }
                    }
                }
                check_ref(&mut out, &what, &op.model_reference);
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), SawsdlError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SawsdlError::InvariantViolation(v))
        }
    }
}

/// Normal form for comparisons: named collections sorted by name, URI lists
/// trimmed, sorted and de-duplicated, MEP abbreviations expanded. Child
/// element order inside a complex type is significant and kept.
pub fn canonicalize(desc: &WsdlDescription) -> WsdlDescription {
    fn uris(list: &[String]) -> Vec<String> {
        let mut v: Vec<String> = list.iter().map(|u| u.trim().to_string()).collect();
        v.sort();
        v.dedup();
        v
    }
    fn model_ref(r: &Option<ModelReference>) -> Option<ModelReference> {
        r.as_ref().map(|r| ModelReference { uris: uris(&r.uris) })
    }
    fn message(m: &Option<MessageReference>) -> Option<MessageReference> {
        m.as_ref().map(|m| MessageReference {
            element: m.element.trim().to_string(),
            parameter: m.parameter.as_ref().map(|p| p.trim().to_string()),
        })
    }
    fn fault_refs(refs: &[FaultReference]) -> Vec<FaultReference> {
        let mut v: Vec<FaultReference> = refs
            .iter()
            .map(|r| FaultReference {
                fault: r.fault.trim().to_string(),
                message_label: r.message_label.as_ref().map(|l| l.trim().to_string()),
            })
            .collect();
        v.sort();
        v
    }

    let mut schema_elements: Vec<SchemaElement> = desc
        .schema_elements
        .iter()
        .map(|e| SchemaElement {
            name: e.name.trim().to_string(),
            content: match &e.content {
                ElementContent::Simple { built_in } => ElementContent::Simple {
                    built_in: built_in.trim().to_string(),
                },
                ElementContent::Complex { children } => ElementContent::Complex {
                    children: children
                        .iter()
                        .map(|c| ChildElement {
                            name: c.name.trim().to_string(),
                            built_in: c.built_in.trim().to_string(),
                        })
                        .collect(),
                },
            },
            model_reference: model_ref(&e.model_reference),
            lowering_schema_mapping: uris(&e.lowering_schema_mapping),
            lifting_schema_mapping: uris(&e.lifting_schema_mapping),
        })
        .collect();
    schema_elements.sort_by(|a, b| a.name.cmp(&b.name));

    let mut interfaces: Vec<WsdlInterface> = desc
        .interfaces
        .iter()
        .map(|i| {
            let mut faults: Vec<InterfaceFault> = i
                .faults
                .iter()
                .map(|f| InterfaceFault {
                    name: f.name.trim().to_string(),
                    element: f.element.as_ref().map(|e| e.trim().to_string()),
                })
                .collect();
            faults.sort_by(|a, b| a.name.cmp(&b.name));
            let mut operations: Vec<WsdlOperation> = i
                .operations
                .iter()
                .map(|op| WsdlOperation {
                    name: op.name.trim().to_string(),
                    pattern: normalize_mep(&op.pattern).to_string(),
                    input: message(&op.input),
                    output: message(&op.output),
                    infaults: fault_refs(&op.infaults),
                    outfaults: fault_refs(&op.outfaults),
                    model_reference: model_ref(&op.model_reference),
                })
                .collect();
            operations.sort_by(|a, b| a.name.cmp(&b.name));
            WsdlInterface {
                name: i.name.trim().to_string(),
                faults,
                operations,
                model_reference: model_ref(&i.model_reference),
            }
        })
        .collect();
    interfaces.sort_by(|a, b| a.name.cmp(&b.name));

    WsdlDescription {
        target_namespace: desc.target_namespace.trim().to_string(),
        schema_elements,
        interfaces,
    }
}
