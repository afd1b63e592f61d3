//! Independent oracle for the rule engine's totality: PIM entities per rule
//! kind and PSM nodes, enumerated from the two models alone, checked
//! against the trace links.

use std::collections::{BTreeMap, BTreeSet};

use swsforge_core::pim::{ServiceModel, TypeContent};
use swsforge_core::sawsdl::WsdlDescription;
use swsforge_core::transform::*;

/// PIM entity paths per rule, enumerated from the model alone.
fn expected_sources(m: &ServiceModel, service: &str) -> BTreeMap<&'static str, BTreeSet<String>> {
    let s = m.service(service).unwrap();
    let mut out: BTreeMap<&'static str, BTreeSet<String>> =
        list_rules().iter().map(|r| (r.rule_id, BTreeSet::new())).collect();
    let mut add = |rule, path: String| {
        out.get_mut(rule).unwrap().insert(path);
    };

    let mut used: BTreeSet<&str> = BTreeSet::new();
    let mut pending: Vec<&str> = Vec::new();
    for op in &s.interface.operations {
        pending.extend(op.inputs.iter().chain(&op.outputs).map(|p| p.type_ref.as_str()));
        pending.extend(
            op.infaults
                .iter()
                .chain(&op.outfaults)
                .filter_map(|f| f.type_ref.as_deref()),
        );
    }
    while let Some(t) = pending.pop() {
        let Some(ty) = m.data_types.iter().find(|d| d.name == t) else {
            continue;
        };
        if used.insert(t) {
            if let TypeContent::Complex { fields } = &ty.content {
                pending.extend(fields.iter().map(|f| f.type_ref.as_str()));
            }
        }
    }
    for ty in m.data_types.iter().filter(|d| used.contains(d.name.as_str())) {
        let p = format!("dataTypes/{}", ty.name);
        add(RULE_TYPE, p.clone());
        if ty.annotation.is_some() {
            add(RULE_CONCEPT, format!("{p}/concept"));
        }
        if let Some(mapping) = &ty.mapping {
            add(RULE_MAPPING, format!("{p}/mapping"));
            if mapping.lowering_schema.is_some() {
                add(RULE_LOWERING, format!("{p}/mapping/lowering"));
            }
            if mapping.lifting_schema.is_some() {
                add(RULE_LIFTING, format!("{p}/mapping/lifting"));
            }
        }
    }
    let iface = format!("services/{service}/interface");
    add(RULE_INTERFACE, iface.clone());
    if s.interface.annotation.is_some() {
        add(RULE_CONCEPT, format!("{iface}/concept"));
    }
    for op in &s.interface.operations {
        let p = format!("{iface}/operations/{}", op.name);
        add(RULE_OPERATION, p.clone());
        add(RULE_MEP, p.clone());
        if op.annotation.is_some() {
            add(RULE_CONCEPT, format!("{p}/concept"));
        }
        for x in &op.inputs {
            add(RULE_IN_PARAM, format!("{p}/inputs/{}", x.name));
        }
        for x in &op.outputs {
            add(RULE_OUT_PARAM, format!("{p}/outputs/{}", x.name));
        }
        for f in &op.infaults {
            add(RULE_IN_FAULT, format!("{p}/infaults/{}", f.name));
        }
        for f in &op.outfaults {
            add(RULE_OUT_FAULT, format!("{p}/outfaults/{}", f.name));
        }
    }
    out
}

/// Every node and annotation slot of a description, enumerated from the
/// description alone. Interface-level fault declarations are covered by the
/// operation fault references that use them.
fn psm_nodes(d: &WsdlDescription) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for e in &d.schema_elements {
        let p = format!("schema/{}", e.name);
        if e.model_reference.is_some() {
            out.insert(format!("{p}/@modelReference"));
        }
        if !e.lowering_schema_mapping.is_empty() {
            out.insert(format!("{p}/@loweringSchemaMapping"));
        }
        if !e.lifting_schema_mapping.is_empty() {
            out.insert(format!("{p}/@liftingSchemaMapping"));
        }
        out.insert(p);
    }
    for i in &d.interfaces {
        let p = format!("interfaces/{}", i.name);
        if i.model_reference.is_some() {
            out.insert(format!("{p}/@modelReference"));
        }
        for op in &i.operations {
            let o = format!("{p}/operations/{}", op.name);
            if op.model_reference.is_some() {
                out.insert(format!("{o}/@modelReference"));
            }
            if op.input.is_some() {
                out.insert(format!("{o}/input"));
            }
            if op.output.is_some() {
                out.insert(format!("{o}/output"));
            }
            for r in &op.infaults {
                out.insert(format!("{o}/infaults/{}", r.fault));
            }
            for r in &op.outfaults {
                out.insert(format!("{o}/outfaults/{}", r.fault));
            }
            out.insert(format!("{o}/@pattern"));
            out.insert(o);
        }
        out.insert(p);
    }
    out
}

fn last_segment(path: &str) -> &str {
    path.rsplit('/').next().unwrap()
}

/// Bijection per rule kind plus path resolution, coverage and name
/// preservation. Returns the first problem found.
pub fn check_totality(m: &ServiceModel, service: &str) -> Result<(), String> {
    let (desc, links) = pim_to_psm(m, service).map_err(|e| e.to_string())?;
    let expected = expected_sources(m, service);
    for rule in list_rules() {
        let of_rule: Vec<&TraceLink> = links.iter().filter(|l| l.rule_id == rule.rule_id).collect();
        let sources: BTreeSet<String> = of_rule.iter().map(|l| l.source_path.clone()).collect();
        let targets: BTreeSet<&str> = of_rule.iter().map(|l| l.target_path.as_str()).collect();
        if sources.len() != of_rule.len() || targets.len() != of_rule.len() {
            return Err(format!("{}: a source or target is linked twice", rule.rule_id));
        }
        if sources != expected[rule.rule_id] {
            return Err(format!(
                "{}: linked {sources:?}, expected {:?}",
                rule.rule_id, expected[rule.rule_id]
            ));
        }
    }
    if let Some(l) = links
        .iter()
        .find(|l| !list_rules().iter().any(|r| r.rule_id == l.rule_id))
    {
        return Err(format!("link by unregistered rule {}", l.rule_id));
    }
    for l in &links {
        if !pim_path_exists(m, &l.source_path) || !psm_path_exists(&desc, &l.target_path) {
            return Err(format!("dangling link {l:?}"));
        }
        let named = [RULE_INTERFACE, RULE_OPERATION, RULE_IN_FAULT, RULE_OUT_FAULT, RULE_TYPE];
        if named.contains(&l.rule_id) && last_segment(&l.source_path) != last_segment(&l.target_path) {
            // the interface rule's source ends in the fixed segment `interface`
            let iface_ok = l.rule_id == RULE_INTERFACE
                && last_segment(&l.target_path) == m.service(service).unwrap().interface.name;
            if !iface_ok {
                return Err(format!("name not preserved by {l:?}"));
            }
        }
    }
    let targets: BTreeSet<&str> = links.iter().map(|l| l.target_path.as_str()).collect();
    if let Some(n) = psm_nodes(&desc).iter().find(|n| !targets.contains(n.as_str())) {
        return Err(format!("PSM node {n} is not reached by any trace link"));
    }
    Ok(())
}
