//! JSON behavior document.
//!
//! ```json
//! {"process": "ElectronicSale",
//!  "variables": [{"name": "purchase", "type": "Purchase"}],
//!  "nodes": [{"id": "start", "kind": "start"},
//!            {"id": "receive", "kind": "receive", "operation": "Buy", "variable": "purchase"}],
//!  "edges": [{"from": "start", "to": "receive"}]}
//! ```

use std::collections::{BTreeMap, HashSet};

use serde::Deserialize;

use super::*;
use crate::pim::{self, ModelError, ServiceModel};

#[derive(Deserialize)]
struct BehaviorDoc {
    process: String,
    #[serde(default)]
    variables: Vec<VariableDoc>,
    nodes: Vec<NodeDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
}

#[derive(Deserialize)]
struct VariableDoc {
    name: String,
    #[serde(rename = "type")]
    type_ref: String,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum KindDoc {
    Start,
    End,
    Receive,
    Reply,
    Invoke,
    Exclusive,
    Parallel,
}

#[derive(Deserialize)]
struct NodeDoc {
    id: String,
    kind: KindDoc,
    label: Option<String>,
    operation: Option<String>,
    variable: Option<String>,
    service: Option<String>,
    input: Option<BTreeMap<String, String>>,
    output: Option<String>,
    fault: Option<String>,
    assign: Option<BTreeMap<String, String>>,
}

#[derive(Deserialize)]
struct EdgeDoc {
    from: String,
    to: String,
    condition: Option<String>,
    #[serde(default)]
    default: bool,
}

/// Parses a behavior document in strict mode, resolving node and variable
/// references within the document.
pub fn parse_behavior(bytes: &[u8]) -> Result<BehaviorModel, BehaviorError> {
    let doc: BehaviorDoc = pim::deserialize_json(bytes, true).map_err(|e| match e {
        ModelError::Syntax { message, line, column } => BehaviorError::Syntax { message, line, column },
        other => structural(other.to_string()),
    })?;
    build(doc)
}

/// Like [`parse_behavior`], and additionally resolves every invoke target
/// against the services `composite` is composed of.
pub fn parse_behavior_in(bytes: &[u8], model: &ServiceModel, composite: &str) -> Result<BehaviorModel, BehaviorError> {
    let b = parse_behavior(bytes)?;
    let closure = model
        .composition_closure(composite)
        .map_err(|_| BehaviorError::UnresolvedReference {
            path: "process".into(),
            name: composite.to_string(),
        })?;
    for (node, task) in b.invoke_tasks() {
        let path = format!("nodes/{}", node.id);
        let service = closure
            .iter()
            .find(|s| **s == task.service)
            .and_then(|s| model.service(s))
            .ok_or_else(|| BehaviorError::UnresolvedReference {
                path: format!("{path}/service"),
                name: task.service.clone(),
            })?;
        if service.operation(&task.operation).is_none() {
            return Err(BehaviorError::UnresolvedReference {
                path: format!("{path}/operation"),
                name: task.operation.clone(),
            });
        }
    }
    Ok(b)
}

fn structural(message: String) -> BehaviorError {
    BehaviorError::Syntax {
        message,
        line: 0,
        column: 0,
    }
}

fn build(doc: BehaviorDoc) -> Result<BehaviorModel, BehaviorError> {
    let mut names = HashSet::new();
    let mut variables = Vec::with_capacity(doc.variables.len());
    for v in doc.variables {
        if !names.insert(v.name.clone()) {
            return Err(BehaviorError::DuplicateName {
                kind: "variable",
                name: v.name,
            });
        }
        variables.push(Variable {
            name: v.name,
            type_ref: v.type_ref,
        });
    }
    let resolve_var = |path: String, name: &str| {
        if names.contains(name) {
            Ok(())
        } else {
            Err(BehaviorError::UnresolvedReference {
                path,
                name: name.to_string(),
            })
        }
    };

    let mut ids = HashSet::new();
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for n in doc.nodes {
        if !ids.insert(n.id.clone()) {
            return Err(BehaviorError::DuplicateName {
                kind: "node",
                name: n.id,
            });
        }
        let path = format!("nodes/{}", n.id);
        let kind = node_kind(&n)?;
        match &kind {
            NodeKind::Receive(t) => resolve_var(format!("{path}/variable"), &t.variable)?,
            NodeKind::Invoke(t) => {
                if let Some(out) = &t.output {
                    resolve_var(format!("{path}/output"), out)?;
                }
                for c in &t.input {
                    if let Operand::Path(p) = &c.from {
                        resolve_var(format!("{path}/input/{}", c.to), &p.variable)?;
                    }
                }
            }
            NodeKind::Reply(t) => {
                for c in &t.assign {
                    if let Operand::Path(p) = &c.from {
                        resolve_var(format!("{path}/assign/{}", c.to), &p.variable)?;
                    }
                }
            }
            _ => {}
        }
        nodes.push(Node {
            id: n.id,
            label: n.label,
            kind,
        });
    }

    let mut edges = Vec::with_capacity(doc.edges.len());
    for (i, e) in doc.edges.into_iter().enumerate() {
        for end in [&e.from, &e.to] {
            if !ids.contains(end) {
                return Err(BehaviorError::UnresolvedReference {
                    path: format!("edges/{i}"),
                    name: end.clone(),
                });
            }
        }
        let condition = match &e.condition {
            Some(text) => {
                let c = Condition::parse(text).map_err(|err| structural(format!("edges/{i}: {err}")))?;
                for v in c.variables() {
                    resolve_var(format!("edges/{i}/condition"), v)?;
                }
                Some(c)
            }
            None => None,
        };
        edges.push(Edge {
            from: e.from,
            to: e.to,
            condition,
            default: e.default,
        });
    }

    Ok(BehaviorModel {
        process: doc.process,
        variables,
        nodes,
        edges,
    })
}

fn node_kind(n: &NodeDoc) -> Result<NodeKind, BehaviorError> {
    let present = [
        ("operation", n.operation.is_some()),
        ("variable", n.variable.is_some()),
        ("service", n.service.is_some()),
        ("input", n.input.is_some()),
        ("output", n.output.is_some()),
        ("fault", n.fault.is_some()),
        ("assign", n.assign.is_some()),
    ];
    let allowed: &[&str] = match n.kind {
        KindDoc::Start | KindDoc::End | KindDoc::Exclusive | KindDoc::Parallel => &[],
        KindDoc::Receive => &["operation", "variable"],
        KindDoc::Reply => &["fault", "assign"],
        KindDoc::Invoke => &["service", "operation", "input", "output"],
    };
    if let Some((key, _)) = present.iter().find(|(k, p)| *p && !allowed.contains(k)) {
        return Err(structural(format!(
            "node `{}`: key `{key}` does not apply to this kind",
            n.id
        )));
    }
    let required = |value: &Option<String>, key: &str| {
        value
            .clone()
            .ok_or_else(|| structural(format!("node `{}` requires `{key}`", n.id)))
    };
    let copies = |map: &Option<BTreeMap<String, String>>| -> Result<Vec<Copy>, BehaviorError> {
        map.iter()
            .flatten()
            .map(|(to, text)| {
                let from = Operand::parse(text).map_err(|e| structural(format!("node `{}`: {e}", n.id)))?;
                Ok(Copy { to: to.clone(), from })
            })
            .collect()
    };
    Ok(match n.kind {
        KindDoc::Start => NodeKind::Start,
        KindDoc::End => NodeKind::End,
        KindDoc::Exclusive => NodeKind::Exclusive,
        KindDoc::Parallel => NodeKind::Parallel,
        KindDoc::Receive => NodeKind::Receive(ReceiveTask {
            operation: required(&n.operation, "operation")?,
            variable: required(&n.variable, "variable")?,
        }),
        KindDoc::Reply => NodeKind::Reply(ReplyTask {
            fault: n.fault.clone(),
            assign: copies(&n.assign)?,
        }),
        KindDoc::Invoke => NodeKind::Invoke(InvokeTask {
            service: required(&n.service, "service")?,
            operation: required(&n.operation, "operation")?,
            input: copies(&n.input)?,
            output: n.output.clone(),
        }),
    })
}
