use roxmltree::{Document, Node};

use super::*;
use crate::names::local_part;

/// Parses a SAWSDL document. Namespace-driven: any prefix bound to the
/// right namespace is accepted. Elements outside the supported subset are
/// rejected with [`SawsdlError::UnsupportedFeature`]; `wsdl:documentation`
/// and `xs:annotation` are skipped.
///
/// Two legacy spellings are accepted and normalized: the `.../wsdl/in`
/// pattern URI (read as in-only) and `<output fault="F" .../>` (read as an
/// outfault reference to `F`).
pub fn parse_sawsdl(bytes: &[u8]) -> Result<WsdlDescription, SawsdlError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SawsdlError::XmlSyntax {
        message: e.to_string(),
        line: 0,
        column: 0,
    })?;
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        SawsdlError::XmlSyntax {
            message: e.to_string(),
            line: pos.row,
            column: pos.col,
        }
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "description" || root.tag_name().namespace() != Some(WSDL_NS) {
        return Err(SawsdlError::MissingNamespace(qualified(root)));
    }
    let target_namespace = required(root, "targetNamespace")?.trim().to_string();

    let mut desc = WsdlDescription::empty(target_namespace);
    for child in root.children().filter(Node::is_element) {
        match wsdl_local(child) {
            Some("types") => parse_types(child, &mut desc)?,
            Some("interface") => desc.interfaces.push(parse_interface(child)?),
            Some("documentation") => {}
            _ => return Err(unsupported(child)),
        }
    }
    Ok(desc)
}

fn qualified(n: Node) -> String {
    match n.tag_name().namespace() {
        Some(ns) => format!("{{{ns}}}{}", n.tag_name().name()),
        None => n.tag_name().name().to_string(),
    }
}

fn unsupported(n: Node) -> SawsdlError {
    SawsdlError::UnsupportedFeature(format!(
        "element {} at line {}",
        qualified(n),
        n.document().text_pos_at(n.range().start).row
    ))
}

fn wsdl_local<'a>(n: Node<'a, '_>) -> Option<&'a str> {
    (n.tag_name().namespace() == Some(WSDL_NS)).then(|| n.tag_name().name())
}

fn xsd_local<'a>(n: Node<'a, '_>) -> Option<&'a str> {
    (n.tag_name().namespace() == Some(XSD_NS)).then(|| n.tag_name().name())
}

fn required<'a>(n: Node<'a, '_>, attr: &str) -> Result<&'a str, SawsdlError> {
    n.attribute(attr)
        .ok_or_else(|| SawsdlError::Malformed(format!("{} lacks `{attr}`", qualified(n))))
}

fn uri_list(n: Node, local: &str) -> Vec<String> {
    n.attribute((SAWSDL_NS, local))
        .map(|v| v.split_whitespace().map(str::to_string).collect())
        .unwrap_or_default()
}

fn model_reference(n: Node) -> Option<ModelReference> {
    n.attribute((SAWSDL_NS, "modelReference"))
        .map(|v| ModelReference::new(v.split_whitespace()))
}

/// Resolves a QName-valued `type` attribute that must name an XSD built-in.
fn builtin_type(n: Node) -> Result<String, SawsdlError> {
    let raw = required(n, "type")?.trim();
    let (prefix, local) = match raw.split_once(':') {
        Some((p, l)) => (Some(p), l),
        None => (None, raw),
    };
    let ns = n.lookup_namespace_uri(prefix);
    if ns != Some(XSD_NS) {
        return Err(SawsdlError::UnsupportedFeature(format!(
            "type `{raw}` is not an XML Schema built-in"
        )));
    }
    Ok(local.to_string())
}

fn parse_types(types: Node, desc: &mut WsdlDescription) -> Result<(), SawsdlError> {
    for schema in types.children().filter(Node::is_element) {
        match (xsd_local(schema), wsdl_local(schema)) {
            (Some("schema"), _) => {}
            // element declarations written straight into `types`
            (Some("element"), _) => {
                desc.schema_elements.push(parse_element(schema)?);
                continue;
            }
            (_, Some("documentation")) => continue,
            _ => return Err(unsupported(schema)),
        }
        for el in schema.children().filter(Node::is_element) {
            match xsd_local(el) {
                Some("element") => desc.schema_elements.push(parse_element(el)?),
                Some("annotation") => {}
                _ => return Err(unsupported(el)),
            }
        }
    }
    Ok(())
}

fn parse_element(el: Node) -> Result<SchemaElement, SawsdlError> {
    let name = required(el, "name")?.trim().to_string();
    let content = if el.attribute("type").is_some() {
        if let Some(extra) = el
            .children()
            .find(|c| c.is_element() && xsd_local(*c) != Some("annotation"))
        {
            return Err(unsupported(extra));
        }
        ElementContent::Simple {
            built_in: builtin_type(el)?,
        }
    } else {
        let mut children = Vec::new();
        let mut seen_complex = false;
        for ct in el.children().filter(Node::is_element) {
            match xsd_local(ct) {
                Some("complexType") if !seen_complex => seen_complex = true,
                Some("annotation") => continue,
                _ => return Err(unsupported(ct)),
            }
            for seq in ct.children().filter(Node::is_element) {
                match xsd_local(seq) {
                    Some("sequence") => {}
                    Some("annotation") => continue,
                    _ => return Err(unsupported(seq)),
                }
                for child in seq.children().filter(Node::is_element) {
                    if xsd_local(child) != Some("element")
                        || child.has_children() && child.children().any(|c| c.is_element())
                    {
                        return Err(unsupported(child));
                    }
                    children.push(ChildElement {
                        name: required(child, "name")?.trim().to_string(),
                        built_in: builtin_type(child)?,
                    });
                }
            }
        }
        if !seen_complex {
            return Err(SawsdlError::Malformed(format!(
                "element `{name}` has neither type nor complexType"
            )));
        }
        ElementContent::Complex { children }
    };
    Ok(SchemaElement {
        name,
        content,
        model_reference: model_reference(el),
        lowering_schema_mapping: uri_list(el, "loweringSchemaMapping"),
        lifting_schema_mapping: uri_list(el, "liftingSchemaMapping"),
    })
}

fn parse_interface(n: Node) -> Result<WsdlInterface, SawsdlError> {
    let mut iface = WsdlInterface {
        name: required(n, "name")?.trim().to_string(),
        faults: Vec::new(),
        operations: Vec::new(),
        model_reference: model_reference(n),
    };
    for child in n.children().filter(Node::is_element) {
        match wsdl_local(child) {
            Some("fault") => iface.faults.push(InterfaceFault {
                name: required(child, "name")?.trim().to_string(),
                element: child.attribute("element").map(|e| local_part(e.trim()).to_string()),
            }),
            Some("operation") => iface.operations.push(parse_operation(child)?),
            Some("documentation") => {}
            _ => return Err(unsupported(child)),
        }
    }
    Ok(iface)
}

fn parse_operation(n: Node) -> Result<WsdlOperation, SawsdlError> {
    let mut op = WsdlOperation {
        name: required(n, "name")?.trim().to_string(),
        pattern: normalize_mep(required(n, "pattern")?).to_string(),
        input: None,
        output: None,
        infaults: Vec::new(),
        outfaults: Vec::new(),
        model_reference: model_reference(n),
    };
    for child in n.children().filter(Node::is_element) {
        let label = child.attribute("messageLabel").map(|l| l.trim().to_string());
        match wsdl_local(child) {
            Some("output") if child.attribute("fault").is_some() => op.outfaults.push(FaultReference {
                fault: local_part(child.attribute("fault").unwrap().trim()).to_string(),
                message_label: label,
            }),
            Some(tag @ ("input" | "output")) => {
                let slot = if tag == "input" { &mut op.input } else { &mut op.output };
                if slot.is_some() {
                    return Err(SawsdlError::UnsupportedFeature(format!(
                        "operation `{}` has more than one {tag}",
                        op.name
                    )));
                }
                *slot = Some(MessageReference {
                    element: local_part(required(child, "element")?.trim()).to_string(),
                    parameter: child.attribute((PIM_NS, "parameter")).map(|p| p.trim().to_string()),
                });
            }
            Some(tag @ ("infault" | "outfault")) => {
                let r = FaultReference {
                    fault: local_part(required(child, "ref")?.trim()).to_string(),
                    message_label: label,
                };
                if tag == "infault" {
                    op.infaults.push(r);
                } else {
                    op.outfaults.push(r);
                }
            }
            Some("documentation") => {}
            _ => return Err(unsupported(child)),
        }
    }
    Ok(op)
}
