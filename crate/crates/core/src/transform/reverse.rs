use std::collections::HashSet;

use super::*;
use crate::names::{is_absolute_uri, is_ncname};
use crate::pim::{
    self, DataType, Direction, Field, Interface, Mapping, Operation, Parameter, SemanticAnnotation, Service,
    ServiceKind, ServiceModel, TypeContent,
};
use crate::sawsdl::{ElementContent, FaultReference, MessageReference, ModelReference, WsdlDescription};

/// Rebuilds a service model from a SAWSDL description.
///
/// A single-interface description whose target namespace ends in
/// `/<Name>` yields a service named `<Name>` in the namespace before the
/// slash (the inverse of the forward naming rule). Otherwise every
/// interface becomes an atomic service of the same name, in the target
/// namespace.
pub fn psm_to_pim(desc: &WsdlDescription) -> Result<ServiceModel, TransformError> {
    let violations = desc.violations();
    if !violations.is_empty() {
        return Err(TransformError::InvalidDescription(violations));
    }

    let split = match desc.interfaces.as_slice() {
        [_] => desc
            .target_namespace
            .rsplit_once('/')
            .filter(|(ns, name)| is_ncname(name) && is_absolute_uri(ns)),
        _ => None,
    };
    let namespace = split.map_or(desc.target_namespace.as_str(), |(ns, _)| ns);
    let mut model = ServiceModel::empty(namespace);

    for el in &desc.schema_elements {
        let content = match &el.content {
            ElementContent::Simple { built_in } => TypeContent::Simple {
                base_type: built_in.clone(),
            },
            ElementContent::Complex { children } => TypeContent::Complex {
                fields: children
                    .iter()
                    .map(|c| Field {
                        name: c.name.clone(),
                        type_ref: c.built_in.clone(),
                    })
                    .collect(),
            },
        };
        let single = |list: &[String], attr: &str| match list {
            [] => Ok(None),
            [uri] => Ok(Some(uri.clone())),
            _ => Err(TransformError::AmbiguousReverse(format!(
                "schema/{}/@{attr} (a type carries at most one {attr} URI)",
                el.name
            ))),
        };
        let lowering = single(&el.lowering_schema_mapping, "loweringSchemaMapping")?;
        let lifting = single(&el.lifting_schema_mapping, "liftingSchemaMapping")?;
        model.data_types.push(DataType {
            name: el.name.clone(),
            content,
            annotation: annotation(&el.model_reference),
            mapping: (lowering.is_some() || lifting.is_some()).then_some(Mapping {
                lowering_schema: lowering,
                lifting_schema: lifting,
            }),
        });
    }

    for iface in &desc.interfaces {
        let path = format!("interfaces/{}", iface.name);
        if iface.operations.is_empty() {
            return Err(TransformError::AmbiguousReverse(format!(
                "{path} (interface without operations)"
            )));
        }
        let mut used_faults = HashSet::new();
        let mut operations = Vec::with_capacity(iface.operations.len());
        for op in &iface.operations {
            let param = |m: &MessageReference, direction| Parameter {
                name: m.parameter.clone().unwrap_or_else(|| m.element.clone()),
                type_ref: m.element.clone(),
                direction,
            };
            let fault = |r: &FaultReference, direction| {
                let declared = iface
                    .faults
                    .iter()
                    .find(|f| f.name == r.fault)
                    .expect("checked by violations()");
                pim::Fault {
                    name: r.fault.clone(),
                    type_ref: declared.element.clone(),
                    direction,
                }
            };
            used_faults.extend(op.infaults.iter().chain(&op.outfaults).map(|r| r.fault.as_str()));
            operations.push(Operation {
                name: op.name.clone(),
                inputs: op.input.iter().map(|m| param(m, Direction::In)).collect(),
                outputs: op.output.iter().map(|m| param(m, Direction::Out)).collect(),
                infaults: op.infaults.iter().map(|r| fault(r, Direction::In)).collect(),
                outfaults: op.outfaults.iter().map(|r| fault(r, Direction::Out)).collect(),
                annotation: annotation(&op.model_reference),
            });
        }
        if let Some(orphan) = iface.faults.iter().find(|f| !used_faults.contains(f.name.as_str())) {
            return Err(TransformError::AmbiguousReverse(format!(
                "{path}/faults/{} (fault not referenced by any operation)",
                orphan.name
            )));
        }
        let service_name = split.map_or(iface.name.as_str(), |(_, name)| name);
        model.services.push(Service {
            name: service_name.to_string(),
            kind: ServiceKind::Atomic,
            interface: Interface {
                name: iface.name.clone(),
                operations,
                annotation: annotation(&iface.model_reference),
            },
            components: Vec::new(),
            behavior: None,
        });
    }

    let report = pim::validate(&model);
    if !report.is_empty() {
        return Err(TransformError::InvalidModel(report));
    }
    Ok(model)
}

fn annotation(r: &Option<ModelReference>) -> Option<SemanticAnnotation> {
    r.as_ref().map(|r| SemanticAnnotation::new(r.uris.iter().cloned()))
}
