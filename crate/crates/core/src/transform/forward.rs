use std::collections::HashMap;

use super::*;
use crate::pim::{self, DataType, FieldType, Operation, Parameter, Service, ServiceModel, TypeContent};
use crate::sawsdl::{
    ChildElement, ElementContent, FaultReference, InterfaceFault, MessageReference, ModelReference, SchemaElement,
    WsdlDescription, WsdlInterface, WsdlOperation, MEP_IN_ONLY, MEP_IN_OUT,
};

pub const MISSING_INPUT: &str = "MISSING_INPUT";
pub const MULTIPLE_INPUTS: &str = "MULTIPLE_INPUTS";
pub const MULTIPLE_OUTPUTS: &str = "MULTIPLE_OUTPUTS";
pub const NESTED_FIELD_TYPE: &str = "NESTED_FIELD_TYPE";
pub const FAULT_TYPE_CONFLICT: &str = "FAULT_TYPE_CONFLICT";

/// Maps `service_name` of a valid model to a SAWSDL description plus the
/// trace of which rule produced which node.
///
/// The target namespace is the model namespace followed by `/` and the
/// service name. Only types used by the service are emitted.
pub fn pim_to_psm(
    model: &ServiceModel,
    service_name: &str,
) -> Result<(WsdlDescription, Vec<TraceLink>), TransformError> {
    let report = pim::validate(model);
    if !report.is_empty() {
        return Err(TransformError::InvalidModel(report));
    }
    let service = model
        .service(service_name)
        .ok_or_else(|| TransformError::UnknownService(service_name.to_string()))?;
    let types = model.types_used_by(service);
    check_subset(model, service, &types)?;

    let mut links = Vec::new();
    let mut link = |rule_id: &'static str, source: String, target: String| {
        links.push(TraceLink {
            rule_id,
            source_path: source,
            target_path: target,
        })
    };

    let mut desc = WsdlDescription::empty(target_namespace(&model.namespace, &service.name));

    // types
    for ty in &types {
        let src = format!("dataTypes/{}", ty.name);
        let dst = format!("schema/{}", ty.name);
        desc.schema_elements.push(schema_element(model, ty));
        link(RULE_TYPE, src.clone(), dst.clone());
        if let Some(m) = &ty.mapping {
            link(RULE_MAPPING, format!("{src}/mapping"), format!("{dst}/@schemaMapping"));
            if m.lowering_schema.is_some() {
                link(
                    RULE_LOWERING,
                    format!("{src}/mapping/lowering"),
                    format!("{dst}/@loweringSchemaMapping"),
                );
            }
            if m.lifting_schema.is_some() {
                link(
                    RULE_LIFTING,
                    format!("{src}/mapping/lifting"),
                    format!("{dst}/@liftingSchemaMapping"),
                );
            }
        }
    }

    // interface
    let iface = &service.interface;
    let iface_src = format!("services/{}/interface", service.name);
    let iface_dst = format!("interfaces/{}", iface.name);
    link(RULE_INTERFACE, iface_src.clone(), iface_dst.clone());
    let mut wsdl_iface = WsdlInterface {
        name: iface.name.clone(),
        faults: Vec::new(),
        operations: Vec::new(),
        model_reference: iface
            .annotation
            .as_ref()
            .map(|a| ModelReference::new(a.concept_uris.iter().cloned())),
    };
    for fault in iface.operations.iter().flat_map(Operation::faults) {
        if !wsdl_iface.faults.iter().any(|f| f.name == fault.name) {
            wsdl_iface.faults.push(InterfaceFault {
                name: fault.name.clone(),
                element: fault.type_ref.clone(),
            });
        }
    }

    // operations
    for op in &iface.operations {
        let src = format!("{iface_src}/operations/{}", op.name);
        let dst = format!("{iface_dst}/operations/{}", op.name);
        link(RULE_OPERATION, src.clone(), dst.clone());
        link(RULE_MEP, src.clone(), format!("{dst}/@pattern"));
        let message = |p: &Parameter| MessageReference {
            element: p.type_ref.clone(),
            parameter: (p.name != p.type_ref).then(|| p.name.clone()),
        };
        for p in &op.inputs {
            link(
                RULE_IN_PARAM,
                format!("{src}/inputs/{}", p.name),
                format!("{dst}/input"),
            );
        }
        for p in &op.outputs {
            link(
                RULE_OUT_PARAM,
                format!("{src}/outputs/{}", p.name),
                format!("{dst}/output"),
            );
        }
        for f in &op.infaults {
            link(
                RULE_IN_FAULT,
                format!("{src}/infaults/{}", f.name),
                format!("{dst}/infaults/{}", f.name),
            );
        }
        for f in &op.outfaults {
            link(
                RULE_OUT_FAULT,
                format!("{src}/outfaults/{}", f.name),
                format!("{dst}/outfaults/{}", f.name),
            );
        }
        let fault_ref = |f: &pim::Fault| FaultReference {
            fault: f.name.clone(),
            message_label: Some(f.name.clone()),
        };
        wsdl_iface.operations.push(WsdlOperation {
            name: op.name.clone(),
            pattern: if op.outputs.is_empty() { MEP_IN_ONLY } else { MEP_IN_OUT }.to_string(),
            input: op.inputs.first().map(message),
            output: op.outputs.first().map(message),
            infaults: op.infaults.iter().map(fault_ref).collect(),
            outfaults: op.outfaults.iter().map(fault_ref).collect(),
            model_reference: op
                .annotation
                .as_ref()
                .map(|a| ModelReference::new(a.concept_uris.iter().cloned())),
        });
    }
    desc.interfaces.push(wsdl_iface);

    // annotations
    for ty in &types {
        if ty.annotation.is_some() {
            link(
                RULE_CONCEPT,
                format!("dataTypes/{}/concept", ty.name),
                format!("schema/{}/@modelReference", ty.name),
            );
        }
    }
    if iface.annotation.is_some() {
        link(
            RULE_CONCEPT,
            format!("{iface_src}/concept"),
            format!("{iface_dst}/@modelReference"),
        );
    }
    for op in &iface.operations {
        if op.annotation.is_some() {
            link(
                RULE_CONCEPT,
                format!("{iface_src}/operations/{}/concept", op.name),
                format!("{iface_dst}/operations/{}/@modelReference", op.name),
            );
        }
    }

    desc.check().map_err(|e| match e {
        crate::sawsdl::SawsdlError::InvariantViolation(v) => TransformError::InvalidDescription(v),
        other => TransformError::InvalidDescription(vec![other.to_string()]),
    })?;
    Ok((desc, links))
}

fn schema_element(model: &ServiceModel, ty: &DataType) -> SchemaElement {
    let content = match &ty.content {
        TypeContent::Simple { base_type } => ElementContent::Simple {
            built_in: base_type.clone(),
        },
        TypeContent::Complex { fields } => ElementContent::Complex {
            children: fields
                .iter()
                .map(|f| ChildElement {
                    name: f.name.clone(),
                    built_in: match model.resolve_field_type(&f.type_ref) {
                        Some(FieldType::BuiltIn(b)) => b.to_string(),
                        // excluded by check_subset
                        _ => unreachable!("non built-in field survived the subset check"),
                    },
                })
                .collect(),
        },
    };
    SchemaElement {
        name: ty.name.clone(),
        content,
        model_reference: ty
            .annotation
            .as_ref()
            .map(|a| ModelReference::new(a.concept_uris.iter().cloned())),
        lowering_schema_mapping: ty.mapping.iter().filter_map(|m| m.lowering_schema.clone()).collect(),
        lifting_schema_mapping: ty.mapping.iter().filter_map(|m| m.lifting_schema.clone()).collect(),
    }
}

/// Restrictions of the WSDL 2.0 subset that the platform-independent
/// model does not impose by itself.
fn check_subset(model: &ServiceModel, service: &Service, types: &[&DataType]) -> Result<(), TransformError> {
    let mut r = ValidationReport::new();
    let base = format!("services/{}/interface/operations", service.name);
    let mut fault_types: HashMap<&str, &Option<String>> = HashMap::new();
    for op in &service.interface.operations {
        let path = format!("{base}/{}", op.name);
        match op.inputs.len() {
            0 => r.push(
                &path,
                MISSING_INPUT,
                "operations without an input map to no supported message exchange pattern",
            ),
            1 => {}
            n => r.push(
                &path,
                MULTIPLE_INPUTS,
                format!("{n} inputs; in-only and in-out carry one input message"),
            ),
        }
        if op.outputs.len() > 1 {
            r.push(
                &path,
                MULTIPLE_OUTPUTS,
                format!("{} outputs; in-out carries one output message", op.outputs.len()),
            );
        }
        for f in op.faults() {
            if let Some(prev) = fault_types.insert(&f.name, &f.type_ref) {
                if prev != &f.type_ref {
                    r.push(
                        format!("{path}/{}", f.name),
                        FAULT_TYPE_CONFLICT,
                        "fault name reused with a different type within the interface",
                    );
                }
            }
        }
    }
    for ty in types {
        if let TypeContent::Complex { fields } = &ty.content {
            for f in fields {
                if !matches!(model.resolve_field_type(&f.type_ref), Some(FieldType::BuiltIn(_))) {
                    r.push(
                        format!("dataTypes/{}/fields/{}", ty.name, f.name),
                        NESTED_FIELD_TYPE,
                        format!("field type `{}` is not an XML Schema built-in", f.type_ref),
                    );
                }
            }
        }
    }
    let r = r.finish();
    if r.is_empty() {
        Ok(())
    } else {
        Err(TransformError::InvalidModel(r))
    }
}
