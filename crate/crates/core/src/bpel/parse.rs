use roxmltree::{Document, Node};

use super::*;
use crate::sawsdl::WSDL_NS;

fn document(bytes: &[u8]) -> Result<Document<'_>, BpelError> {
    let text = std::str::from_utf8(bytes).map_err(|e| BpelError::XmlSyntax {
        message: e.to_string(),
        line: 0,
        column: 0,
    })?;
    Document::parse(text).map_err(|e| {
        let pos = e.pos();
        BpelError::XmlSyntax {
            message: e.to_string(),
            line: pos.row,
            column: pos.col,
        }
    })
}

fn malformed(n: Node, message: impl std::fmt::Display) -> BpelError {
    let line = n.document().text_pos_at(n.range().start).row;
    BpelError::Malformed(format!("<{}> at line {line}: {message}", n.tag_name().name()))
}

fn required<'a>(n: Node<'a, '_>, attr: &str) -> Result<&'a str, BpelError> {
    n.attribute(attr)
        .ok_or_else(|| malformed(n, format!("missing attribute `{attr}`")))
}

fn elements<'a, 'i>(n: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    n.children().filter(Node::is_element)
}

fn local<'a>(n: Node<'a, '_>, ns: &str) -> Option<&'a str> {
    (n.tag_name().namespace() == Some(ns)).then(|| n.tag_name().name())
}

/// Reads a process WSDL as written by [`emit_process_wsdl`](super::emit_process_wsdl).
pub fn parse_process_wsdl(bytes: &[u8]) -> Result<ProcessWsdl, BpelError> {
    let doc = document(bytes)?;
    let root = doc.root_element();
    if local(root, WSDL_NS) != Some("description") {
        return Err(malformed(root, "not a WSDL 2.0 description"));
    }
    let target_namespace = required(root, "targetNamespace")?.to_string();
    let mut imports = Vec::new();
    let mut partner_link_types = Vec::new();
    for child in elements(root) {
        if local(child, WSDL_NS) == Some("import") {
            imports.push(Import {
                namespace: required(child, "namespace")?.to_string(),
                location: required(child, "location")?.to_string(),
            });
        } else if local(child, PLNK_NS) == Some("partnerLinkType") {
            let roles: Vec<Node> = elements(child).filter(|r| local(*r, PLNK_NS) == Some("role")).collect();
            let [role] = roles[..] else {
                return Err(malformed(child, "expected exactly one role"));
            };
            partner_link_types.push(PartnerLinkType {
                name: required(child, "name")?.to_string(),
                role: required(role, "name")?.to_string(),
                port_type: required(role, "portType")?.to_string(),
            });
        } else {
            return Err(malformed(child, "unsupported element"));
        }
    }
    // the own-interface port type is qualified by the process name
    let own = partner_link_types
        .last()
        .ok_or_else(|| malformed(root, "no partner link types"))?;
    let process_name = own
        .port_type
        .split_once(':')
        .map(|(p, _)| p.to_string())
        .ok_or_else(|| malformed(root, "own port type is not qualified"))?;
    let interface_namespace = root
        .lookup_namespace_uri(Some(&process_name))
        .ok_or_else(|| malformed(root, format!("prefix `{process_name}` is not declared")))?
        .to_string();
    Ok(ProcessWsdl {
        process_name,
        target_namespace,
        interface_namespace,
        imports,
        partner_link_types,
    })
}

/// Reads a BPEL process in the generated subset. Conditions and copy
/// operands must be in the condition grammar.
pub fn parse_bpel(bytes: &[u8]) -> Result<BpelDocument, BpelError> {
    let doc = document(bytes)?;
    let root = doc.root_element();
    if local(root, BPEL_NS) != Some("process") {
        return Err(malformed(root, "not a BPEL process"));
    }
    let namespaces = root
        .namespaces()
        .filter_map(|ns| Some((ns.name()?.to_string(), ns.uri().to_string())))
        .filter(|(p, uri)| p != "xml" && uri != BPEL_NS && uri != BPMN_NS)
        .collect();
    let mut out = BpelDocument {
        name: required(root, "name")?.to_string(),
        target_namespace: required(root, "targetNamespace")?.to_string(),
        namespaces,
        imports: Vec::new(),
        partner_links: Vec::new(),
        variables: Vec::new(),
        body: Activity::Empty,
    };
    let mut body = None;
    for child in elements(root) {
        match local(child, BPEL_NS) {
            Some("import") => out.imports.push(Import {
                namespace: required(child, "namespace")?.to_string(),
                location: required(child, "location")?.to_string(),
            }),
            Some("partnerLinks") => {
                for pl in elements(child) {
                    out.partner_links.push(PartnerLink {
                        name: required(pl, "name")?.to_string(),
                        partner_link_type: required(pl, "partnerLinkType")?.to_string(),
                        my_role: pl.attribute("myRole").map(str::to_string),
                        partner_role: pl.attribute("partnerRole").map(str::to_string),
                    });
                }
            }
            Some("variables") => {
                for v in elements(child) {
                    out.variables.push(BpelVariable {
                        name: required(v, "name")?.to_string(),
                        message_type: required(v, "messageType")?.to_string(),
                    });
                }
            }
            _ if body.is_none() => body = Some(activity(child)?),
            _ => return Err(malformed(child, "a process has one activity")),
        }
    }
    out.body = body.ok_or_else(|| malformed(root, "no activity"))?;
    Ok(out)
}

fn hint(n: Node) -> Result<ExecutionHint, BpelError> {
    let name = required(n, "name")?;
    let id = n.attribute((BPMN_NS, "id")).unwrap_or(name);
    Ok(ExecutionHint {
        id: id.to_string(),
        label: n.attribute((BPMN_NS, "label")).unwrap_or(id).to_string(),
    })
}

fn text(n: Node) -> String {
    n.text().unwrap_or_default().trim().to_string()
}

fn condition(n: Node) -> Result<Condition, BpelError> {
    if local(n, BPEL_NS) != Some("condition") {
        return Err(malformed(n, "expected a condition"));
    }
    Condition::parse(&text(n)).map_err(|e| malformed(n, e))
}

fn activity(n: Node) -> Result<Activity, BpelError> {
    let children: Vec<Node> = elements(n).collect();
    let name = || required(n, "name").map(str::to_string);
    Ok(match local(n, BPEL_NS) {
        Some("sequence") => Activity::Sequence(children.into_iter().map(activity).collect::<Result<_, _>>()?),
        Some("flow") => Activity::Flow {
            name: name()?,
            branches: children.into_iter().map(activity).collect::<Result<_, _>>()?,
        },
        Some("while") => {
            let [c, body] = children[..] else {
                return Err(malformed(n, "expected a condition and one activity"));
            };
            Activity::While {
                name: name()?,
                condition: condition(c)?,
                body: Box::new(activity(body)?),
            }
        }
        Some("if") => {
            let mut rest = children.as_slice();
            let mut branches = Vec::new();
            let mut otherwise = None;
            let [c, body, tail @ ..] = rest else {
                return Err(malformed(n, "expected a condition and one activity"));
            };
            branches.push((condition(*c)?, activity(*body)?));
            rest = tail;
            for part in rest {
                let inner: Vec<Node> = elements(*part).collect();
                match (local(*part, BPEL_NS), &inner[..]) {
                    (Some("elseif"), [c, body]) if otherwise.is_none() => {
                        branches.push((condition(*c)?, activity(*body)?))
                    }
                    (Some("else"), [body]) if otherwise.is_none() => otherwise = Some(Box::new(activity(*body)?)),
                    _ => return Err(malformed(*part, "misplaced branch")),
                }
            }
            Activity::If {
                name: name()?,
                branches,
                otherwise,
            }
        }
        Some("receive") => Activity::Receive(Receive {
            hint: hint(n)?,
            partner_link: required(n, "partnerLink")?.to_string(),
            port_type: required(n, "portType")?.to_string(),
            operation: required(n, "operation")?.to_string(),
            variable: required(n, "variable")?.to_string(),
            create_instance: n.attribute("createInstance") == Some("yes"),
        }),
        Some("reply") => Activity::Reply(Reply {
            hint: hint(n)?,
            partner_link: required(n, "partnerLink")?.to_string(),
            port_type: required(n, "portType")?.to_string(),
            operation: required(n, "operation")?.to_string(),
            variable: n.attribute("variable").map(str::to_string),
            fault_name: n.attribute("faultName").map(str::to_string),
        }),
        Some("invoke") => Activity::Invoke(Invoke {
            hint: hint(n)?,
            partner_link: required(n, "partnerLink")?.to_string(),
            port_type: required(n, "portType")?.to_string(),
            operation: required(n, "operation")?.to_string(),
            input_variable: required(n, "inputVariable")?.to_string(),
            output_variable: n.attribute("outputVariable").map(str::to_string),
        }),
        Some("assign") => {
            let mut copies = Vec::new();
            for c in children {
                let parts: Vec<Node> = elements(c).collect();
                let [from, to] = parts[..] else {
                    return Err(malformed(c, "expected from and to"));
                };
                if local(c, BPEL_NS) != Some("copy")
                    || local(from, BPEL_NS) != Some("from")
                    || local(to, BPEL_NS) != Some("to")
                {
                    return Err(malformed(c, "expected a copy"));
                }
                let from_op = Operand::parse(&text(from)).map_err(|e| malformed(from, e))?;
                let Operand::Path(to_path) = Operand::parse(&text(to)).map_err(|e| malformed(to, e))? else {
                    return Err(malformed(to, "copy target must be a variable path"));
                };
                copies.push(CopyRule {
                    from: from_op,
                    to: to_path,
                });
            }
            Activity::Assign(Assign { name: name()?, copies })
        }
        Some("empty") => Activity::Empty,
        _ => return Err(malformed(n, "unsupported activity")),
    })
}
