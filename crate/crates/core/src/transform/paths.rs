//! Entity-path resolution used to audit trace links.

use crate::pim::{ServiceModel, TypeContent};
use crate::sawsdl::WsdlDescription;

/// True when `path` names an entity of `model`.
pub fn pim_path_exists(model: &ServiceModel, path: &str) -> bool {
    let seg: Vec<&str> = path.split('/').collect();
    match seg.as_slice() {
        ["namespace"] => true,
        ["dataTypes", t, rest @ ..] => {
            let Some(ty) = model.data_type(t) else { return false };
            match rest {
                [] => true,
                ["concept"] => ty.annotation.is_some(),
                ["mapping"] => ty.mapping.is_some(),
                ["mapping", "lowering"] => ty.mapping.as_ref().is_some_and(|m| m.lowering_schema.is_some()),
                ["mapping", "lifting"] => ty.mapping.as_ref().is_some_and(|m| m.lifting_schema.is_some()),
                ["fields", f] => {
                    matches!(&ty.content, TypeContent::Complex { fields } if fields.iter().any(|x| x.name == *f))
                }
                _ => false,
            }
        }
        ["services", s, rest @ ..] => {
            let Some(svc) = model.service(s) else { return false };
            match rest {
                [] => true,
                ["components"] | ["behavior"] => true,
                ["components", c] => svc.components.iter().any(|x| x == c),
                ["interface"] => true,
                ["interface", "concept"] => svc.interface.annotation.is_some(),
                ["interface", "operations", o, rest @ ..] => {
                    let Some(op) = svc.operation(o) else { return false };
                    match rest {
                        [] => true,
                        ["concept"] => op.annotation.is_some(),
                        ["inputs", p] => op.inputs.iter().any(|x| x.name == *p),
                        ["outputs", p] => op.outputs.iter().any(|x| x.name == *p),
                        ["infaults", f] => op.infaults.iter().any(|x| x.name == *f),
                        ["outfaults", f] => op.outfaults.iter().any(|x| x.name == *f),
                        _ => false,
                    }
                }
                _ => false,
            }
        }
        _ => false,
    }
}

/// True when `path` names a node or attribute slot of `desc`.
pub fn psm_path_exists(desc: &WsdlDescription, path: &str) -> bool {
    let seg: Vec<&str> = path.split('/').collect();
    match seg.as_slice() {
        ["schema", e, rest @ ..] => {
            let Some(el) = desc.schema_element(e) else { return false };
            match rest {
                [] => true,
                ["@modelReference"] => el.model_reference.is_some(),
                ["@schemaMapping"] => !el.lowering_schema_mapping.is_empty() || !el.lifting_schema_mapping.is_empty(),
                ["@loweringSchemaMapping"] => !el.lowering_schema_mapping.is_empty(),
                ["@liftingSchemaMapping"] => !el.lifting_schema_mapping.is_empty(),
                _ => false,
            }
        }
        ["interfaces", i, rest @ ..] => {
            let Some(iface) = desc.interface(i) else { return false };
            match rest {
                [] => true,
                ["@modelReference"] => iface.model_reference.is_some(),
                ["faults", f] => iface.faults.iter().any(|x| x.name == *f),
                ["operations", o, rest @ ..] => {
                    let Some(op) = iface.operations.iter().find(|x| x.name == *o) else {
                        return false;
                    };
                    match rest {
                        [] | ["@pattern"] => true,
                        ["@modelReference"] => op.model_reference.is_some(),
                        ["input"] => op.input.is_some(),
                        ["output"] => op.output.is_some(),
                        ["infaults", f] => op.infaults.iter().any(|x| x.fault == *f),
                        ["outfaults", f] => op.outfaults.iter().any(|x| x.fault == *f),
                        _ => false,
                    }
                }
                _ => false,
            }
        }
        _ => false,
    }
}
