use super::*;
use crate::sawsdl::WSDL_NS;
use crate::xml::XmlWriter;

/// Serializes a process WSDL. The process name is bound as prefix of the
/// composite's interface namespace, as the own-interface port type needs.
pub fn emit_process_wsdl(p: &ProcessWsdl) -> String {
    let mut w = XmlWriter::new();
    let interface_prefix = format!("xmlns:{}", p.process_name);
    w.start(
        "wsdl:description",
        &[
            ("xmlns:wsdl", WSDL_NS),
            ("xmlns:plnk", PLNK_NS),
            ("xmlns:tns", &p.target_namespace),
            (&interface_prefix, &p.interface_namespace),
            ("targetNamespace", &p.target_namespace),
        ],
    );
    for i in &p.imports {
        w.empty("wsdl:import", &[("namespace", &i.namespace), ("location", &i.location)]);
    }
    for plt in &p.partner_link_types {
        w.start("plnk:partnerLinkType", &[("name", &plt.name)]);
        w.empty("plnk:role", &[("name", &plt.role), ("portType", &plt.port_type)]);
        w.end();
    }
    w.end();
    w.finish()
}

/// Serializes a BPEL process with fixed `bpel:` and `bpmn:` prefixes plus
/// the document's own declarations.
pub fn emit_bpel(doc: &BpelDocument) -> String {
    let mut w = XmlWriter::new();
    let declared: Vec<(String, &str)> = doc
        .namespaces
        .iter()
        .map(|(p, uri)| (format!("xmlns:{p}"), uri.as_str()))
        .collect();
    let mut attrs: Vec<(&str, &str)> = vec![("xmlns:bpel", BPEL_NS), ("xmlns:bpmn", BPMN_NS)];
    attrs.extend(declared.iter().map(|(k, v)| (k.as_str(), *v)));
    attrs.extend([
        ("name", doc.name.as_str()),
        ("targetNamespace", doc.target_namespace.as_str()),
        ("expressionLanguage", EXPRESSION_LANGUAGE),
    ]);
    w.start("bpel:process", &attrs);
    for i in &doc.imports {
        w.empty(
            "bpel:import",
            &[
                ("importType", WSDL_IMPORT_TYPE),
                ("namespace", &i.namespace),
                ("location", &i.location),
            ],
        );
    }
    w.start("bpel:partnerLinks", &[]);
    for pl in &doc.partner_links {
        let mut attrs = vec![
            ("name", pl.name.as_str()),
            ("partnerLinkType", pl.partner_link_type.as_str()),
        ];
        if let Some(r) = &pl.my_role {
            attrs.push(("myRole", r));
        }
        if let Some(r) = &pl.partner_role {
            attrs.push(("partnerRole", r));
        }
        w.empty("bpel:partnerLink", &attrs);
    }
    w.end();
    w.start("bpel:variables", &[]);
    for v in &doc.variables {
        w.empty("bpel:variable", &[("name", &v.name), ("messageType", &v.message_type)]);
    }
    w.end();
    activity(&mut w, &doc.body);
    w.end();
    w.finish()
}

fn hinted<'a>(mut attrs: Vec<(&'a str, &'a str)>, hint: &'a ExecutionHint) -> Vec<(&'a str, &'a str)> {
    attrs.extend([
        ("bpmn:label", hint.label.as_str()),
        ("name", hint.id.as_str()),
        ("bpmn:id", hint.id.as_str()),
    ]);
    attrs
}

fn activity(w: &mut XmlWriter, a: &Activity) {
    match a {
        Activity::Sequence(items) => {
            w.start("bpel:sequence", &[]);
            items.iter().for_each(|a| activity(w, a));
            w.end();
        }
        Activity::Flow { name, branches } => {
            w.start("bpel:flow", &[("name", name)]);
            branches.iter().for_each(|a| activity(w, a));
            w.end();
        }
        Activity::If {
            name,
            branches,
            otherwise,
        } => {
            w.start("bpel:if", &[("name", name)]);
            for (i, (c, body)) in branches.iter().enumerate() {
                if i > 0 {
                    w.start("bpel:elseif", &[]);
                }
                w.text_element("bpel:condition", &[], &c.to_string());
                activity(w, body);
                if i > 0 {
                    w.end();
                }
            }
            if let Some(body) = otherwise {
                w.start("bpel:else", &[]);
                activity(w, body);
                w.end();
            }
            w.end();
        }
        Activity::While { name, condition, body } => {
            w.start("bpel:while", &[("name", name)]);
            w.text_element("bpel:condition", &[], &condition.to_string());
            activity(w, body);
            w.end();
        }
        Activity::Receive(r) => {
            let mut attrs = vec![
                ("partnerLink", r.partner_link.as_str()),
                ("portType", r.port_type.as_str()),
                ("operation", r.operation.as_str()),
                ("variable", r.variable.as_str()),
            ];
            if r.create_instance {
                attrs.push(("createInstance", "yes"));
            }
            w.empty("bpel:receive", &hinted(attrs, &r.hint));
        }
        Activity::Reply(r) => {
            let mut attrs = vec![
                ("partnerLink", r.partner_link.as_str()),
                ("portType", r.port_type.as_str()),
                ("operation", r.operation.as_str()),
            ];
            if let Some(v) = &r.variable {
                attrs.push(("variable", v));
            }
            if let Some(f) = &r.fault_name {
                attrs.push(("faultName", f));
            }
            w.empty("bpel:reply", &hinted(attrs, &r.hint));
        }
        Activity::Invoke(i) => {
            let mut attrs = vec![
                ("partnerLink", i.partner_link.as_str()),
                ("portType", i.port_type.as_str()),
                ("operation", i.operation.as_str()),
                ("inputVariable", i.input_variable.as_str()),
            ];
            if let Some(v) = &i.output_variable {
                attrs.push(("outputVariable", v));
            }
            w.empty("bpel:invoke", &hinted(attrs, &i.hint));
        }
        Activity::Assign(a) => {
            w.start("bpel:assign", &[("name", &a.name)]);
            for c in &a.copies {
                w.start("bpel:copy", &[]);
                w.text_element("bpel:from", &[], &c.from.to_string());
                w.text_element("bpel:to", &[], &c.to.to_string());
                w.end();
            }
            w.end();
        }
        Activity::Empty => w.empty("bpel:empty", &[]),
    }
}
