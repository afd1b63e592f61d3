use super::*;
use crate::xml::XmlWriter;

/// Serializes a description as SAWSDL. Prefixes are fixed (`wsdl:`,
/// `sawsdl:`, `xs:`, `tns:`); output is byte-identical for equal inputs.
pub fn emit_sawsdl(desc: &WsdlDescription) -> Result<String, SawsdlError> {
    desc.check()?;
    let uses_pim = desc
        .interfaces
        .iter()
        .flat_map(|i| &i.operations)
        .any(|op| op.input.iter().chain(&op.output).any(|m| m.parameter.is_some()));

    let mut w = XmlWriter::new();
    let mut root: Vec<(&str, &str)> = vec![
        ("xmlns:wsdl", WSDL_NS),
        ("xmlns:sawsdl", SAWSDL_NS),
        ("xmlns:xs", XSD_NS),
    ];
    if uses_pim {
        root.push(("xmlns:pim", PIM_NS));
    }
    root.push(("xmlns:tns", &desc.target_namespace));
    root.push(("targetNamespace", &desc.target_namespace));
    w.start("wsdl:description", &root);

    if !desc.schema_elements.is_empty() {
        w.start("wsdl:types", &[]);
        w.start(
            "xs:schema",
            &[
                ("targetNamespace", &desc.target_namespace),
                ("elementFormDefault", "qualified"),
            ],
        );
        for e in &desc.schema_elements {
            write_element(&mut w, e);
        }
        w.end();
        w.end();
    }

    for iface in &desc.interfaces {
        let mref = joined(&iface.model_reference);
        let mut attrs = vec![("name", iface.name.as_str())];
        if let Some(m) = &mref {
            attrs.push(("sawsdl:modelReference", m));
        }
        w.start("wsdl:interface", &attrs);
        for f in &iface.faults {
            let element = f.element.as_ref().map(|e| format!("tns:{e}"));
            let mut attrs = vec![("name", f.name.as_str())];
            if let Some(e) = &element {
                attrs.push(("element", e));
            }
            w.empty("wsdl:fault", &attrs);
        }
        for op in &iface.operations {
            let mref = joined(&op.model_reference);
            let mut attrs = vec![("name", op.name.as_str()), ("pattern", op.pattern.as_str())];
            if let Some(m) = &mref {
                attrs.push(("sawsdl:modelReference", m));
            }
            w.start("wsdl:operation", &attrs);
            for (tag, msg) in [("wsdl:input", &op.input), ("wsdl:output", &op.output)] {
                if let Some(msg) = msg {
                    let element = format!("tns:{}", msg.element);
                    let mut attrs = vec![("element", element.as_str())];
                    if let Some(p) = &msg.parameter {
                        attrs.push(("pim:parameter", p));
                    }
                    w.empty(tag, &attrs);
                }
            }
            for (tag, refs) in [("wsdl:infault", &op.infaults), ("wsdl:outfault", &op.outfaults)] {
                for r in refs {
                    let fault = format!("tns:{}", r.fault);
                    let mut attrs = vec![("ref", fault.as_str())];
                    if let Some(l) = &r.message_label {
                        attrs.push(("messageLabel", l));
                    }
                    w.empty(tag, &attrs);
                }
            }
            w.end();
        }
        w.end();
    }
    w.end();
    Ok(w.finish())
}

fn joined(r: &Option<ModelReference>) -> Option<String> {
    r.as_ref().map(|r| r.uris.join(" "))
}

fn write_element(w: &mut XmlWriter, e: &SchemaElement) {
    let mref = joined(&e.model_reference);
    let lowering = e.lowering_schema_mapping.join(" ");
    let lifting = e.lifting_schema_mapping.join(" ");
    let type_attr = match &e.content {
        ElementContent::Simple { built_in } => Some(format!("xs:{built_in}")),
        ElementContent::Complex { .. } => None,
    };
    let mut attrs = vec![("name", e.name.as_str())];
    if let Some(t) = &type_attr {
        attrs.push(("type", t));
    }
    if let Some(m) = &mref {
        attrs.push(("sawsdl:modelReference", m));
    }
    if !lowering.is_empty() {
        attrs.push(("sawsdl:loweringSchemaMapping", &lowering));
    }
    if !lifting.is_empty() {
        attrs.push(("sawsdl:liftingSchemaMapping", &lifting));
    }
    match &e.content {
        ElementContent::Simple { .. } => w.empty("xs:element", &attrs),
        ElementContent::Complex { children } => {
            w.start("xs:element", &attrs);
            w.start("xs:complexType", &[]);
            w.start("xs:sequence", &[]);
            for c in children {
                let t = format!("xs:{}", c.built_in);
                w.empty("xs:element", &[("name", &c.name), ("type", &t)]);
            }
            w.end();
            w.end();
            w.end();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sawsdl::tests::card_description;

    #[test]
    fn card_validate_emission() {
        let xml = emit_sawsdl(&card_description()).unwrap();
        assert!(xml.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<wsdl:description"));
        assert!(xml.contains(
            "sawsdl:loweringSchemaMapping=\"http://www.w3.org/2002/ws/sawsdl/spec/mapping/RDFOnt2CCreditCard.xml\""
        ));
        assert!(xml.contains(
            "<wsdl:interface name=\"CardValidate\" sawsdl:modelReference=\"http://example.org/categorization/ECommerce\">"
        ));
        assert!(xml.contains("<xs:element name=\"NumCard\" type=\"xs:integer\"/>"));
        assert!(xml.contains("<wsdl:outfault ref=\"tns:CheckResult\" messageLabel=\"CheckResult\"/>"));
        assert!(!xml.contains("xmlns:pim"));
        assert_eq!(xml, emit_sawsdl(&card_description()).unwrap());
    }

    #[test]
    fn empty_description() {
        let xml = emit_sawsdl(&WsdlDescription::empty("http://example.org/sws/Empty")).unwrap();
        assert_eq!(
            xml,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<wsdl:description xmlns:wsdl=\"http://www.w3.org/ns/wsdl\" \
             xmlns:sawsdl=\"http://www.w3.org/ns/sawsdl\" xmlns:xs=\"http://www.w3.org/2001/XMLSchema\" \
             xmlns:tns=\"http://example.org/sws/Empty\" targetNamespace=\"http://example.org/sws/Empty\"/>\n"
        );
    }

    #[test]
    fn multiple_uris_are_space_separated() {
        let mut d = card_description();
        d.interfaces[0].model_reference = Some(ModelReference::new(["urn:a", "urn:b"]));
        d.interfaces[0].operations[0].input.as_mut().unwrap().parameter = Some("card".into());
        let xml = emit_sawsdl(&d).unwrap();
        assert!(xml.contains("sawsdl:modelReference=\"urn:a urn:b\""));
        assert!(xml.contains("xmlns:pim=\"http://swsforge.dev/ns/pim\""));
        assert!(xml.contains("pim:parameter=\"card\""));
    }

    #[test]
    fn rejects_invalid_description() {
        let mut d = card_description();
        d.interfaces[0].operations[0].input = None;
        assert!(matches!(emit_sawsdl(&d), Err(SawsdlError::InvariantViolation(_))));
    }
}
