//! JSON model document: the textual stand-in for the UML profile.
//!
//! Stereotypes become `kind` values, tagged values become `concept`,
//! `lowering` and `lifting` keys.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::*;

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    /// Reject keys that are not part of the document grammar.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: true }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    namespace: String,
    #[serde(rename = "dataTypes", default)]
    data_types: Vec<TypeDoc>,
    #[serde(default)]
    services: Vec<ServiceDoc>,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum TypeKindDoc {
    Simple,
    Complex,
}

#[derive(Serialize, Deserialize)]
struct TypeDoc {
    name: String,
    kind: TypeKindDoc,
    #[serde(rename = "baseType", skip_serializing_if = "Option::is_none")]
    base_type: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fields: Option<Vec<ParamDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    concept: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lowering: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lifting: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum ServiceKindDoc {
    Atomic,
    Composite,
}

#[derive(Serialize, Deserialize)]
struct ServiceDoc {
    name: String,
    kind: ServiceKindDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    components: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    behavior: Option<String>,
    interface: InterfaceDoc,
}

#[derive(Serialize, Deserialize)]
struct InterfaceDoc {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    concept: Option<Vec<String>>,
    operations: Vec<OperationDoc>,
}

#[derive(Serialize, Deserialize)]
struct OperationDoc {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    concept: Option<Vec<String>>,
    #[serde(default)]
    inputs: Vec<ParamDoc>,
    #[serde(default)]
    outputs: Vec<ParamDoc>,
    #[serde(default)]
    infaults: Vec<FaultDoc>,
    #[serde(default)]
    outfaults: Vec<FaultDoc>,
}

#[derive(Serialize, Deserialize)]
struct ParamDoc {
    name: String,
    #[serde(rename = "type")]
    type_ref: String,
}

#[derive(Serialize, Deserialize)]
struct FaultDoc {
    name: String,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    type_ref: Option<String>,
}

/// Parses a model document in strict mode.
pub fn parse_model(bytes: &[u8]) -> Result<ServiceModel, ModelError> {
    parse_model_with(bytes, ParseOptions::default())
}

pub fn parse_model_with(bytes: &[u8], options: ParseOptions) -> Result<ServiceModel, ModelError> {
    let doc: ModelDoc = deserialize_json(bytes, options.strict)?;
    build_model(doc)
}

/// Deserializes JSON, optionally rejecting keys the target type ignores.
pub(crate) fn deserialize_json<T: serde::de::DeserializeOwned>(bytes: &[u8], strict: bool) -> Result<T, ModelError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let mut unknown = Vec::new();
    let value: T =
        serde_ignored::deserialize(&mut de, |path| unknown.push(path.to_string())).map_err(|e| ModelError::Syntax {
            message: e.to_string(),
            line: e.line(),
            column: e.column(),
        })?;
    de.end().map_err(|e| ModelError::Syntax {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    if strict && !unknown.is_empty() {
        return Err(ModelError::Syntax {
            message: format!("unknown key `{}`", unknown.join("`, `")),
            line: 0,
            column: 0,
        });
    }
    Ok(value)
}

fn structural(message: String) -> ModelError {
    ModelError::Syntax {
        message,
        line: 0,
        column: 0,
    }
}

fn annotation(concept: Option<Vec<String>>) -> Option<SemanticAnnotation> {
    concept.map(|concept_uris| SemanticAnnotation { concept_uris })
}

fn build_model(doc: ModelDoc) -> Result<ServiceModel, ModelError> {
    let mut type_names = HashSet::new();
    for t in &doc.data_types {
        if !type_names.insert(t.name.as_str()) {
            return Err(ModelError::DuplicateName {
                kind: "data type",
                name: t.name.clone(),
            });
        }
    }
    let mut service_names: HashSet<String> = HashSet::new();
    for s in &doc.services {
        if !service_names.insert(s.name.clone()) {
            return Err(ModelError::DuplicateName {
                kind: "service",
                name: s.name.clone(),
            });
        }
    }

    let mut data_types = Vec::with_capacity(doc.data_types.len());
    for t in &doc.data_types {
        let content = match t.kind {
            TypeKindDoc::Simple => {
                if t.fields.is_some() {
                    return Err(structural(format!("simple type `{}` must not declare fields", t.name)));
                }
                let base_type = t
                    .base_type
                    .clone()
                    .ok_or_else(|| structural(format!("simple type `{}` requires baseType", t.name)))?;
                TypeContent::Simple { base_type }
            }
            TypeKindDoc::Complex => {
                if t.base_type.is_some() {
                    return Err(structural(format!(
                        "complex type `{}` must not declare baseType",
                        t.name
                    )));
                }
                let fields = t
                    .fields
                    .as_ref()
                    .ok_or_else(|| structural(format!("complex type `{}` requires fields", t.name)))?;
                let mut out = Vec::with_capacity(fields.len());
                for f in fields {
                    if !type_names.contains(f.type_ref.as_str()) && !crate::names::is_xsd_builtin(&f.type_ref) {
                        return Err(ModelError::UnresolvedReference {
                            path: format!("dataTypes/{}/fields/{}", t.name, f.name),
                            name: f.type_ref.clone(),
                        });
                    }
                    out.push(Field {
                        name: f.name.clone(),
                        type_ref: f.type_ref.clone(),
                    });
                }
                TypeContent::Complex { fields: out }
            }
        };
        let mapping = if t.lowering.is_some() || t.lifting.is_some() {
            Some(Mapping {
                lowering_schema: t.lowering.clone(),
                lifting_schema: t.lifting.clone(),
            })
        } else {
            None
        };
        data_types.push(DataType {
            name: t.name.clone(),
            content,
            annotation: annotation(t.concept.clone()),
            mapping,
        });
    }

    let mut services = Vec::with_capacity(doc.services.len());
    for s in doc.services {
        for c in &s.components {
            if !service_names.contains(c) {
                return Err(ModelError::UnresolvedReference {
                    path: format!("services/{}/components", s.name),
                    name: c.clone(),
                });
            }
        }
        let base = format!("services/{}/interface/operations", s.name);
        let resolve_param = |p: ParamDoc, dir: Direction, op: &str, list: &str| {
            if !type_names.contains(p.type_ref.as_str()) {
                return Err(ModelError::UnresolvedReference {
                    path: format!("{base}/{op}/{list}/{}", p.name),
                    name: p.type_ref,
                });
            }
            Ok(Parameter {
                name: p.name,
                type_ref: p.type_ref,
                direction: dir,
            })
        };
        let resolve_fault = |f: FaultDoc, dir: Direction, op: &str, list: &str| {
            if let Some(t) = &f.type_ref {
                if !type_names.contains(t.as_str()) {
                    return Err(ModelError::UnresolvedReference {
                        path: format!("{base}/{op}/{list}/{}", f.name),
                        name: t.clone(),
                    });
                }
            }
            Ok(Fault {
                name: f.name,
                type_ref: f.type_ref,
                direction: dir,
            })
        };
        let mut operations = Vec::with_capacity(s.interface.operations.len());
        for op in s.interface.operations {
            let name = op.name;
            operations.push(Operation {
                inputs: op
                    .inputs
                    .into_iter()
                    .map(|p| resolve_param(p, Direction::In, &name, "inputs"))
                    .collect::<Result<_, _>>()?,
                outputs: op
                    .outputs
                    .into_iter()
                    .map(|p| resolve_param(p, Direction::Out, &name, "outputs"))
                    .collect::<Result<_, _>>()?,
                infaults: op
                    .infaults
                    .into_iter()
                    .map(|f| resolve_fault(f, Direction::In, &name, "infaults"))
                    .collect::<Result<_, _>>()?,
                outfaults: op
                    .outfaults
                    .into_iter()
                    .map(|f| resolve_fault(f, Direction::Out, &name, "outfaults"))
                    .collect::<Result<_, _>>()?,
                annotation: annotation(op.concept),
                name,
            });
        }
        services.push(Service {
            name: s.name,
            kind: match s.kind {
                ServiceKindDoc::Atomic => ServiceKind::Atomic,
                ServiceKindDoc::Composite => ServiceKind::Composite,
            },
            interface: Interface {
                name: s.interface.name,
                operations,
                annotation: annotation(s.interface.concept),
            },
            components: s.components,
            behavior: s.behavior,
        });
    }

    Ok(ServiceModel {
        namespace: doc.namespace,
        data_types,
        services,
    })
}

/// Writes the canonical document for a valid model: two-space indented
/// JSON with a trailing newline.
pub fn serialize_model(model: &ServiceModel) -> Result<String, ModelError> {
    let report = validate(model);
    if !report.is_empty() {
        return Err(ModelError::InvalidModel(report));
    }
    let concept = |a: &Option<SemanticAnnotation>| a.as_ref().map(|a| a.concept_uris.clone());
    let params = |ps: &[Parameter]| {
        ps.iter()
            .map(|p| ParamDoc {
                name: p.name.clone(),
                type_ref: p.type_ref.clone(),
            })
            .collect()
    };
    let faults = |fs: &[Fault]| {
        fs.iter()
            .map(|f| FaultDoc {
                name: f.name.clone(),
                type_ref: f.type_ref.clone(),
            })
            .collect()
    };
    let doc = ModelDoc {
        namespace: model.namespace.clone(),
        data_types: model
            .data_types
            .iter()
            .map(|t| {
                let (kind, base_type, fields) = match &t.content {
                    TypeContent::Simple { base_type } => (TypeKindDoc::Simple, Some(base_type.clone()), None),
                    TypeContent::Complex { fields } => (
                        TypeKindDoc::Complex,
                        None,
                        Some(
                            fields
                                .iter()
                                .map(|f| ParamDoc {
                                    name: f.name.clone(),
                                    type_ref: f.type_ref.clone(),
                                })
                                .collect(),
                        ),
                    ),
                };
                TypeDoc {
                    name: t.name.clone(),
                    kind,
                    base_type,
                    fields,
                    concept: concept(&t.annotation),
                    lowering: t.mapping.as_ref().and_then(|m| m.lowering_schema.clone()),
                    lifting: t.mapping.as_ref().and_then(|m| m.lifting_schema.clone()),
                }
            })
            .collect(),
        services: model
            .services
            .iter()
            .map(|s| ServiceDoc {
                name: s.name.clone(),
                kind: match s.kind {
                    ServiceKind::Atomic => ServiceKindDoc::Atomic,
                    ServiceKind::Composite => ServiceKindDoc::Composite,
                },
                components: s.components.clone(),
                behavior: s.behavior.clone(),
                interface: InterfaceDoc {
                    name: s.interface.name.clone(),
                    concept: concept(&s.interface.annotation),
                    operations: s
                        .interface
                        .operations
                        .iter()
                        .map(|op| OperationDoc {
                            name: op.name.clone(),
                            concept: concept(&op.annotation),
                            inputs: params(&op.inputs),
                            outputs: params(&op.outputs),
                            infaults: faults(&op.infaults),
                            outfaults: faults(&op.outfaults),
                        })
                        .collect(),
                },
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("model document serializes");
    text.push('\n');
    Ok(text)
}
