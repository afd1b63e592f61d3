use std::collections::{HashMap, HashSet};

use super::*;
use crate::names::{is_absolute_uri, is_ncname, is_xsd_builtin};

pub const INVALID_NAMESPACE: &str = "INVALID_NAMESPACE";
pub const INVALID_NAME: &str = "INVALID_NAME";
pub const INVALID_URI: &str = "INVALID_URI";
pub const DUPLICATE_TYPE: &str = "DUPLICATE_TYPE";
pub const DUPLICATE_SERVICE: &str = "DUPLICATE_SERVICE";
pub const DUPLICATE_OPERATION: &str = "DUPLICATE_OPERATION";
pub const DUPLICATE_PARAMETER: &str = "DUPLICATE_PARAMETER";
pub const DUPLICATE_FAULT: &str = "DUPLICATE_FAULT";
pub const DUPLICATE_FIELD: &str = "DUPLICATE_FIELD";
pub const DUPLICATE_COMPONENT: &str = "DUPLICATE_COMPONENT";
pub const UNRESOLVED_TYPE: &str = "UNRESOLVED_TYPE";
pub const UNRESOLVED_COMPONENT: &str = "UNRESOLVED_COMPONENT";
pub const UNKNOWN_BASE_TYPE: &str = "UNKNOWN_BASE_TYPE";
pub const EMPTY_INTERFACE: &str = "EMPTY_INTERFACE";
pub const EMPTY_COMPLEX_TYPE: &str = "EMPTY_COMPLEX_TYPE";
pub const EMPTY_ANNOTATION: &str = "EMPTY_ANNOTATION";
pub const EMPTY_MAPPING: &str = "EMPTY_MAPPING";
pub const TYPE_CYCLE: &str = "TYPE_CYCLE";
pub const PARAMETER_DIRECTION: &str = "PARAMETER_DIRECTION";
pub const ATOMIC_HAS_COMPONENTS: &str = "ATOMIC_HAS_COMPONENTS";
pub const ATOMIC_HAS_BEHAVIOR: &str = "ATOMIC_HAS_BEHAVIOR";
pub const COMPOSITE_MIN_COMPONENTS: &str = "COMPOSITE_MIN_COMPONENTS";
pub const COMPOSITE_MISSING_BEHAVIOR: &str = "COMPOSITE_MISSING_BEHAVIOR";
pub const COMPOSITION_CYCLE: &str = "COMPOSITION_CYCLE";

/// Checks every metamodel invariant. Total: never fails, and terminates on
/// arbitrary (including cyclic or dangling) models.
pub fn validate(model: &ServiceModel) -> ValidationReport {
    let mut r = ValidationReport::new();

    if !is_absolute_uri(&model.namespace) {
        r.push(
            "namespace",
            INVALID_NAMESPACE,
            format!("`{}` is not an absolute URI", model.namespace),
        );
    }

    let mut type_counts: HashMap<&str, usize> = HashMap::new();
    for t in &model.data_types {
        *type_counts.entry(&t.name).or_default() += 1;
    }
    for t in &model.data_types {
        let path = format!("dataTypes/{}", t.name);
        check_name(&mut r, &path, &t.name);
        if type_counts[t.name.as_str()] > 1 {
            r.push(&path, DUPLICATE_TYPE, "data type name declared more than once");
        }
        match &t.content {
            TypeContent::Simple { base_type } => {
                if !is_xsd_builtin(base_type) {
                    r.push(
                        &path,
                        UNKNOWN_BASE_TYPE,
                        format!("`{base_type}` is not an XML Schema built-in"),
                    );
                }
            }
            TypeContent::Complex { fields } => {
                if fields.is_empty() {
                    r.push(&path, EMPTY_COMPLEX_TYPE, "complex type has no fields");
                }
                let mut seen = HashSet::new();
                for f in fields {
                    let fpath = format!("{path}/fields/{}", f.name);
                    check_name(&mut r, &fpath, &f.name);
                    if !seen.insert(f.name.as_str()) {
                        r.push(&fpath, DUPLICATE_FIELD, "field name repeated");
                    }
                    if model.resolve_field_type(&f.type_ref).is_none() {
                        r.push(
                            &fpath,
                            UNRESOLVED_TYPE,
                            format!("`{}` is neither declared nor built in", f.type_ref),
                        );
                    }
                }
            }
        }
        check_annotation(&mut r, &format!("{path}/concept"), &t.annotation);
        if let Some(m) = &t.mapping {
            let mpath = format!("{path}/mapping");
            if m.lowering_schema.is_none() && m.lifting_schema.is_none() {
                r.push(
                    &mpath,
                    EMPTY_MAPPING,
                    "mapping declares neither lowering nor lifting schema",
                );
            }
            for (slot, uri) in [("lowering", &m.lowering_schema), ("lifting", &m.lifting_schema)] {
                if let Some(uri) = uri {
                    if !is_absolute_uri(uri) {
                        r.push(
                            format!("{mpath}/{slot}"),
                            INVALID_URI,
                            format!("`{uri}` is not an absolute URI"),
                        );
                    }
                }
            }
        }
    }
    for name in types_on_cycles(model) {
        r.push(
            format!("dataTypes/{name}"),
            TYPE_CYCLE,
            "type references itself transitively",
        );
    }

    let mut service_counts: HashMap<&str, usize> = HashMap::new();
    for s in &model.services {
        *service_counts.entry(&s.name).or_default() += 1;
    }
    for s in &model.services {
        let path = format!("services/{}", s.name);
        check_name(&mut r, &path, &s.name);
        if service_counts[s.name.as_str()] > 1 {
            r.push(&path, DUPLICATE_SERVICE, "service name declared more than once");
        }
        match s.kind {
            ServiceKind::Atomic => {
                if !s.components.is_empty() {
                    r.push(
                        format!("{path}/components"),
                        ATOMIC_HAS_COMPONENTS,
                        "atomic service aggregates services",
                    );
                }
                if s.behavior.is_some() {
                    r.push(
                        format!("{path}/behavior"),
                        ATOMIC_HAS_BEHAVIOR,
                        "atomic service declares a behavior",
                    );
                }
            }
            ServiceKind::Composite => {
                if s.components.len() < 2 {
                    r.push(
                        format!("{path}/components"),
                        COMPOSITE_MIN_COMPONENTS,
                        format!(
                            "composite aggregates {} service(s); at least 2 required",
                            s.components.len()
                        ),
                    );
                }
                if s.behavior.is_none() {
                    r.push(
                        format!("{path}/behavior"),
                        COMPOSITE_MISSING_BEHAVIOR,
                        "composite service has no behavior",
                    );
                }
            }
        }
        let mut seen = HashSet::new();
        for c in &s.components {
            let cpath = format!("{path}/components/{c}");
            if !seen.insert(c.as_str()) {
                r.push(&cpath, DUPLICATE_COMPONENT, "component listed twice");
            }
            if model.service(c).is_none() {
                r.push(&cpath, UNRESOLVED_COMPONENT, format!("no service named `{c}`"));
            }
        }
        check_interface(&mut r, model, &format!("{path}/interface"), &s.interface);
    }
    for name in services_on_cycles(model) {
        r.push(
            format!("services/{name}"),
            COMPOSITION_CYCLE,
            "service is (transitively) a component of itself",
        );
    }

    r.finish()
}

fn check_name(r: &mut ValidationReport, path: &str, name: &str) {
    if !is_ncname(name) {
        r.push(path, INVALID_NAME, format!("`{name}` is not an NCName"));
    }
}

fn check_annotation(r: &mut ValidationReport, path: &str, annotation: &Option<SemanticAnnotation>) {
    let Some(a) = annotation else { return };
    if a.concept_uris.is_empty() {
        r.push(path, EMPTY_ANNOTATION, "semantic annotation lists no concept URI");
    }
    for uri in &a.concept_uris {
        if !is_absolute_uri(uri) {
            r.push(path, INVALID_URI, format!("`{uri}` is not an absolute URI"));
        }
    }
}

fn check_interface(r: &mut ValidationReport, model: &ServiceModel, path: &str, iface: &Interface) {
    check_name(r, path, &iface.name);
    check_annotation(r, &format!("{path}/concept"), &iface.annotation);
    if iface.operations.is_empty() {
        r.push(path, EMPTY_INTERFACE, "interface declares no operation");
    }
    let mut op_names = HashSet::new();
    for op in &iface.operations {
        let opath = format!("{path}/operations/{}", op.name);
        check_name(r, &opath, &op.name);
        if !op_names.insert(op.name.as_str()) {
            r.push(&opath, DUPLICATE_OPERATION, "operation name repeated in interface");
        }
        check_annotation(r, &format!("{opath}/concept"), &op.annotation);

        let mut params = HashSet::new();
        for (list, expected, ps) in [
            ("inputs", Direction::In, &op.inputs),
            ("outputs", Direction::Out, &op.outputs),
        ] {
            for p in ps {
                let ppath = format!("{opath}/{list}/{}", p.name);
                check_name(r, &ppath, &p.name);
                if !params.insert(p.name.as_str()) {
                    r.push(
                        &ppath,
                        DUPLICATE_PARAMETER,
                        "parameter name repeated across inputs and outputs",
                    );
                }
                if p.direction != expected {
                    r.push(
                        &ppath,
                        PARAMETER_DIRECTION,
                        "direction disagrees with the list holding the parameter",
                    );
                }
                if model.data_type(&p.type_ref).is_none() {
                    r.push(&ppath, UNRESOLVED_TYPE, format!("no data type named `{}`", p.type_ref));
                }
            }
        }
        for (list, expected, fs) in [
            ("infaults", Direction::In, &op.infaults),
            ("outfaults", Direction::Out, &op.outfaults),
        ] {
            let mut names = HashSet::new();
            for f in fs {
                let fpath = format!("{opath}/{list}/{}", f.name);
                check_name(r, &fpath, &f.name);
                if !names.insert(f.name.as_str()) {
                    r.push(&fpath, DUPLICATE_FAULT, "fault listed twice in the same direction");
                }
                if f.direction != expected {
                    r.push(
                        &fpath,
                        PARAMETER_DIRECTION,
                        "direction disagrees with the list holding the fault",
                    );
                }
                if let Some(t) = &f.type_ref {
                    if model.data_type(t).is_none() {
                        r.push(&fpath, UNRESOLVED_TYPE, format!("no data type named `{t}`"));
                    }
                }
            }
        }
    }
}

/// Names that can reach themselves along `edges`.
fn nodes_on_cycles<'a>(nodes: &[&'a str], edges: impl Fn(&'a str) -> Vec<&'a str>) -> Vec<&'a str> {
    let mut out = Vec::new();
    for &start in nodes {
        let mut seen = HashSet::new();
        let mut stack = edges(start);
        while let Some(n) = stack.pop() {
            if n == start {
                out.push(start);
                break;
            }
            if seen.insert(n) {
                stack.extend(edges(n));
            }
        }
    }
    out
}

fn services_on_cycles(model: &ServiceModel) -> Vec<&str> {
    let names: Vec<&str> = model.services.iter().map(|s| s.name.as_str()).collect();
    nodes_on_cycles(&names, |n| {
        model
            .services
            .iter()
            .filter(|s| s.name == n)
            .flat_map(|s| s.components.iter().map(String::as_str))
            .collect()
    })
}

fn types_on_cycles(model: &ServiceModel) -> Vec<&str> {
    let names: Vec<&str> = model.data_types.iter().map(|t| t.name.as_str()).collect();
    nodes_on_cycles(&names, |n| {
        model
            .data_types
            .iter()
            .filter(|t| t.name == n)
            .flat_map(|t| match &t.content {
                TypeContent::Complex { fields } => fields.iter().map(|f| f.type_ref.as_str()).collect(),
                TypeContent::Simple { .. } => Vec::new(),
            })
            .filter(|r| model.data_type(r).is_some())
            .collect()
    })
}
