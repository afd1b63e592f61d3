use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use super::*;
use crate::behavior::{
    normalize_to_structured, validate_behavior, BehaviorModel, Block, Copy, Node, NodeKind, Step, StructuredBehavior,
};
use crate::names::capitalize;
use crate::pim::{self, Operation, Service, ServiceKind, ServiceModel};
use crate::sawsdl::emit_sawsdl;
use crate::transform::{pim_to_psm, target_namespace};

fn composite_service<'a>(model: &'a ServiceModel, name: &str) -> Result<&'a Service, BpelError> {
    let service = model
        .service(name)
        .ok_or_else(|| BpelError::UnknownService(name.to_string()))?;
    if service.kind != ServiceKind::Composite {
        return Err(BpelError::NotComposite(name.to_string()));
    }
    Ok(service)
}

/// Atomic services the composite is built from, in declaration order.
fn components(model: &ServiceModel, composite: &str) -> Result<Vec<String>, BpelError> {
    model.composition_closure(composite).map_err(|e| {
        let mut r = ValidationReport::new();
        r.push("services", "INVALID_COMPOSITION", e.to_string());
        BpelError::InvalidModel(r)
    })
}

/// Builds the process WSDL of `composite`: an import of its own interface
/// followed by one per component, and a partner link type per component
/// followed by the one for the process's own interface.
pub fn gen_process_wsdl(model: &ServiceModel, composite: &str) -> Result<ProcessWsdl, BpelError> {
    composite_service(model, composite)?;
    let process = process_name(composite);
    let interface_namespace = target_namespace(&model.namespace, composite);
    let mut imports = vec![Import {
        namespace: interface_namespace.clone(),
        location: format!("{composite}.wsdl"),
    }];
    let mut partner_link_types = Vec::new();
    for service in components(model, composite)? {
        imports.push(Import {
            namespace: target_namespace(&model.namespace, &service),
            location: format!("Service/{service}.wsdl"),
        });
        partner_link_types.push(PartnerLinkType {
            name: format!("{process}AndProcessForPortType{service}SoapPlk"),
            role: format!("Process1_for_{process}"),
            port_type: component_port_type(&service),
        });
    }
    partner_link_types.push(PartnerLinkType {
        name: format!("{process}AndInterface"),
        role: format!("{process}_for_Interface"),
        port_type: format!("{process}:ForInterface"),
    });
    Ok(ProcessWsdl {
        target_namespace: format!("{interface_namespace}/{process}"),
        process_name: process,
        interface_namespace,
        imports,
        partner_link_types,
    })
}

/// Compiles a structured behavior of `composite` into a BPEL process.
///
/// Every invoke becomes an `assign` filling the request variable followed
/// by the `invoke`; behavior variables are bound to the message variables
/// that deliver them and conditions are rewritten accordingly. Problems a
/// validated behavior cannot have (unmapped request fields, reads of
/// variables nothing writes, ...) are collected into
/// [`BpelError::InvariantViolation`].
pub fn gen_bpel(
    model: &ServiceModel,
    structured: &StructuredBehavior,
    composite: &str,
) -> Result<BpelDocument, BpelError> {
    let service = composite_service(model, composite)?;
    let process = gen_process_wsdl(model, composite)?;
    let closure = components(model, composite)?;
    let mut g = Gen {
        model,
        composite: service,
        closure,
        prefixes: HashMap::new(),
        variables: Vec::new(),
        binding: HashMap::new(),
        request_vars: HashMap::new(),
        response_vars: HashMap::new(),
        receive: None,
        used: BTreeSet::new(),
        errors: Vec::new(),
    };
    g.declare_all(structured);
    let body = g.block(&structured.body, true);

    let own = process.partner_link_types.last().expect("own partner link type");
    let mut partner_links = vec![PartnerLink {
        name: partner_link_name(&own.name),
        partner_link_type: format!("tns:{}", own.name),
        my_role: Some(own.role.clone()),
        partner_role: None,
    }];
    let mut namespaces = vec![
        ("tns".to_string(), process.target_namespace.clone()),
        ("this".to_string(), process.interface_namespace.clone()),
    ];
    for (i, s) in g.closure.iter().enumerate() {
        if !g.used.contains(&i) {
            continue;
        }
        let plt = &process.partner_link_types[i];
        partner_links.push(PartnerLink {
            name: partner_link_name(&plt.name),
            partner_link_type: format!("tns:{}", plt.name),
            my_role: None,
            partner_role: Some(plt.role.clone()),
        });
        namespaces.push((g.prefixes[s].clone(), target_namespace(&model.namespace, s)));
    }

    if !g.errors.is_empty() {
        return Err(BpelError::InvariantViolation(g.errors));
    }
    Ok(BpelDocument {
        name: process.process_name.clone(),
        target_namespace: process.target_namespace.clone(),
        namespaces,
        imports: vec![Import {
            namespace: process.target_namespace.clone(),
            location: format!("{composite}-Process.wsdl"),
        }],
        partner_links,
        variables: g.variables,
        body,
    })
}

struct ReceiveInfo<'a> {
    operation: &'a Operation,
    partner_link: String,
    request: String,
    response: Option<String>,
}

struct Gen<'a> {
    model: &'a ServiceModel,
    composite: &'a Service,
    closure: Vec<String>,
    /// Service to namespace prefix used in message types.
    prefixes: HashMap<String, String>,
    variables: Vec<BpelVariable>,
    /// Behavior variable to the message variable holding it.
    binding: HashMap<String, String>,
    request_vars: HashMap<(String, String), String>,
    /// Response variables per invoked operation, keyed by the behavior
    /// variable they are bound to.
    response_vars: HashMap<(String, String), Vec<(Option<String>, String)>>,
    receive: Option<ReceiveInfo<'a>>,
    /// Closure indices of invoked services.
    used: BTreeSet<usize>,
    errors: Vec<String>,
}

const RESERVED_PREFIXES: &[&str] = &["bpel", "bpmn", "tns", "this", "plnk", "wsdl", "xs", "sawsdl"];

impl<'a> Gen<'a> {
    fn error(&mut self, node: &Node, message: impl std::fmt::Display) {
        self.errors.push(format!("nodes/{}: {message}", node.id));
    }

    fn declare(&mut self, name: &str, message_type: String) {
        match self.variables.iter().find(|v| v.name == name) {
            Some(v) if v.message_type != message_type => self
                .errors
                .push(format!("variable `{name}` declared with two message types")),
            Some(_) => {}
            None => self.variables.push(BpelVariable {
                name: name.to_string(),
                message_type,
            }),
        }
    }

    fn prefix(&mut self, service: &str) -> String {
        if let Some(p) = self.prefixes.get(service) {
            return p.clone();
        }
        let safe = crate::names::is_ncname(service)
            && !service.to_ascii_lowercase().starts_with("xml")
            && !RESERVED_PREFIXES.contains(&service);
        let mut candidate = if safe { service.to_string() } else { String::new() };
        let mut n = 0;
        while candidate.is_empty() || self.prefixes.values().any(|p| *p == candidate) {
            n += 1;
            candidate = format!("svc{n}");
        }
        self.prefixes.insert(service.to_string(), candidate.clone());
        candidate
    }

    fn component_operation(&mut self, node: &Node, service: &str, operation: &str) -> Option<&'a Operation> {
        let Some(index) = self.closure.iter().position(|s| s == service) else {
            self.error(node, format!("`{service}` is not a component"));
            return None;
        };
        let model = self.model;
        let op = model.service(service).and_then(|s| s.operation(operation));
        if op.is_none() {
            self.error(node, format!("`{service}` has no operation `{operation}`"));
        }
        self.used.insert(index);
        op
    }

    /// Declares message variables in order of first use and binds behavior
    /// variables to them.
    fn declare_all(&mut self, s: &StructuredBehavior) {
        let tasks = s.tasks();
        // request variables of operations invoked on several services are
        // qualified by service
        let mut services_per_op: HashMap<&str, BTreeSet<&str>> = HashMap::new();
        for n in &tasks {
            if let NodeKind::Invoke(t) = &n.kind {
                services_per_op.entry(&t.operation).or_default().insert(&t.service);
            }
        }
        let has_plain_reply = tasks
            .iter()
            .any(|n| matches!(&n.kind, NodeKind::Reply(r) if r.fault.is_none()));

        for n in &tasks {
            match &n.kind {
                NodeKind::Receive(t) => {
                    if self.receive.is_some() {
                        self.error(n, "second receive");
                        continue;
                    }
                    let Some(op) = self.composite.operation(&t.operation) else {
                        self.error(
                            n,
                            format!("`{}` has no operation `{}`", self.composite.name, t.operation),
                        );
                        continue;
                    };
                    let request = format!("this{}RequestMsg", capitalize(&op.name));
                    self.declare(&request, format!("this:{}Request", op.name));
                    let response = (has_plain_reply && !op.outputs.is_empty()).then(|| {
                        let v = format!("this{}ResponseMsg", capitalize(&op.name));
                        self.declare(&v, format!("this:{}Response", op.name));
                        v
                    });
                    self.binding.insert(t.variable.clone(), request.clone());
                    let own = format!("{}AndInterface", process_name(&self.composite.name));
                    self.receive = Some(ReceiveInfo {
                        operation: op,
                        partner_link: partner_link_name(&own),
                        request,
                        response,
                    });
                }
                NodeKind::Invoke(t) => {
                    let Some(op) = self.component_operation(n, &t.service, &t.operation) else {
                        continue;
                    };
                    let prefix = self.prefix(&t.service);
                    let key = (t.service.clone(), t.operation.clone());
                    let request = if services_per_op[t.operation.as_str()].len() > 1 {
                        format!("{}{}RequestMsg", t.service, capitalize(&t.operation))
                    } else {
                        format!("tns{}RequestMsg", capitalize(&t.operation))
                    };
                    self.declare(&request, format!("{prefix}:{}Request", t.operation));
                    self.request_vars.insert(key.clone(), request);
                    if op.outputs.is_empty() {
                        if t.output.is_some() {
                            self.error(n, format!("`{}` is one-way and delivers no output", t.operation));
                        }
                        continue;
                    }
                    let canonical = format!("{}Service{}ResponseMsg", t.service, capitalize(&t.operation));
                    let slots = self.response_vars.entry(key).or_default();
                    let name = match slots.iter().find(|(v, _)| *v == t.output) {
                        Some((_, name)) => name.clone(),
                        None => {
                            let name = if slots.is_empty() {
                                canonical
                            } else {
                                format!("{canonical}{}", slots.len() + 1)
                            };
                            slots.push((t.output.clone(), name.clone()));
                            name
                        }
                    };
                    self.declare(&name, format!("{prefix}:{}Response", t.operation));
                    if let Some(v) = &t.output {
                        self.binding.insert(v.clone(), name);
                    }
                }
                NodeKind::Reply(r) => {
                    let Some(fault) = &r.fault else { continue };
                    let Some(info) = &self.receive else { continue };
                    let op = info.operation;
                    match op.outfaults.iter().find(|f| f.name == *fault) {
                        Some(f) if f.type_ref.is_some() => {
                            let v = format!("this{}{}FaultMsg", capitalize(&op.name), f.name);
                            self.declare(&v, format!("this:{}{}Fault", op.name, f.name));
                        }
                        Some(_) => {}
                        None => self.error(n, format!("`{}` declares no fault `{fault}`", op.name)),
                    }
                }
                _ => {}
            }
        }
    }

    fn block(&mut self, block: &Block, top: bool) -> Activity {
        let mut acts = Vec::new();
        for step in block {
            self.step(step, top && acts.is_empty(), &mut acts);
        }
        match acts.len() {
            _ if top => Activity::Sequence(acts),
            0 => Activity::Empty,
            1 => acts.pop().expect("one activity"),
            _ => Activity::Sequence(acts),
        }
    }

    fn step(&mut self, step: &Step, head: bool, out: &mut Vec<Activity>) {
        match step {
            Step::Task(n) => self.task(n, head, out),
            Step::If {
                split,
                branches,
                otherwise,
                ..
            } => {
                let branches = branches
                    .iter()
                    .map(|(c, b)| (self.condition(split, c), self.block(b, false)))
                    .collect();
                let otherwise = otherwise.as_ref().map(|b| Box::new(self.block(b, false)));
                out.push(Activity::If {
                    name: split.clone(),
                    branches,
                    otherwise,
                });
            }
            Step::Parallel { split, branches, .. } => {
                let branches = branches.iter().map(|b| self.block(b, false)).collect();
                out.push(Activity::Flow {
                    name: split.clone(),
                    branches,
                });
            }
            Step::While {
                split, condition, body, ..
            } => {
                let condition = self.condition(split, condition);
                let body = Box::new(self.block(body, false));
                out.push(Activity::While {
                    name: split.clone(),
                    condition,
                    body,
                });
            }
        }
    }

    fn bound(&self, variable: &str) -> Option<String> {
        self.binding.get(variable).cloned()
    }

    fn condition(&mut self, gateway: &str, c: &Condition) -> Condition {
        for v in c.variables() {
            if !self.binding.contains_key(v) {
                self.errors
                    .push(format!("nodes/{gateway}: condition reads `${v}`, which nothing writes"));
            }
        }
        c.rename_variables(|v| self.bound(v))
    }

    fn hint(n: &Node) -> ExecutionHint {
        ExecutionHint {
            id: n.id.clone(),
            label: n.label().to_string(),
        }
    }

    /// Copy rules filling every field of `type_ref` in `target`.
    fn copies(&mut self, n: &Node, copies: &[Copy], type_ref: &str, target: &str) -> Vec<CopyRule> {
        let Some(fields) = self.model.flatten_type(type_ref) else {
            self.error(n, format!("type `{type_ref}` does not flatten"));
            return Vec::new();
        };
        for c in copies {
            if !fields.iter().any(|(f, _)| *f == c.to) {
                self.error(n, format!("`{type_ref}` has no field `{}`", c.to));
            }
        }
        let mut rules = Vec::new();
        for (field, _) in &fields {
            let Some(c) = copies.iter().find(|c| c.to == *field) else {
                self.error(n, format!("field `{field}` of `{type_ref}` is not mapped"));
                continue;
            };
            let from = match &c.from {
                Operand::Path(p) => match self.bound(&p.variable) {
                    Some(v) => Operand::Path(Path {
                        variable: v,
                        fields: p.fields.clone(),
                    }),
                    None => {
                        self.error(n, format!("`{p}` is read but nothing writes `{}`", p.variable));
                        continue;
                    }
                },
                lit => lit.clone(),
            };
            rules.push(CopyRule {
                from,
                to: Path {
                    variable: target.to_string(),
                    fields: field.split('.').map(str::to_string).collect(),
                },
            });
        }
        rules
    }

    fn assign(out: &mut Vec<Activity>, n: &Node, copies: Vec<CopyRule>) {
        if !copies.is_empty() {
            out.push(Activity::Assign(Assign {
                name: format!("Assign_{}", n.id),
                copies,
            }));
        }
    }

    fn task(&mut self, n: &Node, head: bool, out: &mut Vec<Activity>) {
        match &n.kind {
            NodeKind::Receive(t) => {
                let Some(info) = &self.receive else { return };
                out.push(Activity::Receive(Receive {
                    hint: Self::hint(n),
                    partner_link: info.partner_link.clone(),
                    port_type: "this:ForInterface".into(),
                    operation: t.operation.clone(),
                    variable: info.request.clone(),
                    create_instance: head,
                }));
            }
            NodeKind::Invoke(t) => {
                let key = (t.service.clone(), t.operation.clone());
                let Some(request) = self.request_vars.get(&key).cloned() else {
                    return;
                };
                let Some(op) = self.model.service(&t.service).and_then(|s| s.operation(&t.operation)) else {
                    return;
                };
                let Some(input) = op.inputs.first() else {
                    self.error(n, format!("`{}` takes no input", op.name));
                    return;
                };
                if op.inputs.len() != 1 || op.outputs.len() > 1 {
                    self.error(
                        n,
                        format!("`{}` must take one input and give at most one output", op.name),
                    );
                }
                let copies = self.copies(n, &t.input, &input.type_ref, &request);
                Self::assign(out, n, copies);
                let output = self
                    .response_vars
                    .get(&key)
                    .and_then(|slots| slots.iter().find(|(v, _)| *v == t.output).map(|(_, name)| name.clone()));
                let index = self
                    .closure
                    .iter()
                    .position(|s| *s == t.service)
                    .expect("checked component");
                let process = process_name(&self.composite.name);
                out.push(Activity::Invoke(Invoke {
                    hint: Self::hint(n),
                    partner_link: partner_link_name(&format!(
                        "{process}AndProcessForPortType{}SoapPlk",
                        self.closure[index]
                    )),
                    port_type: component_port_type(&t.service),
                    operation: t.operation.clone(),
                    input_variable: request,
                    output_variable: output,
                }));
            }
            NodeKind::Reply(r) => {
                let Some(info) = &self.receive else {
                    self.error(n, "reply without a receive");
                    return;
                };
                let op = info.operation;
                let partner_link = info.partner_link.clone();
                let (variable, type_ref, fault_name) = match &r.fault {
                    None => match (&info.response, op.outputs.first()) {
                        (Some(v), Some(p)) => (Some(v.clone()), Some(p.type_ref.clone()), None),
                        _ => {
                            self.error(n, format!("`{}` has no output to reply with", op.name));
                            return;
                        }
                    },
                    Some(fault) => {
                        let typed = op
                            .outfaults
                            .iter()
                            .find(|f| f.name == *fault)
                            .and_then(|f| f.type_ref.clone());
                        let variable = typed
                            .as_ref()
                            .map(|_| format!("this{}{fault}FaultMsg", capitalize(&op.name)));
                        (variable, typed, Some(format!("this:{fault}")))
                    }
                };
                if !r.assign.is_empty() {
                    match (&variable, &type_ref) {
                        (Some(v), Some(t)) => {
                            let copies = self.copies(n, &r.assign, t, v);
                            Self::assign(out, n, copies);
                        }
                        _ => self.error(n, "untyped fault replies carry no data"),
                    }
                }
                out.push(Activity::Reply(Reply {
                    hint: Self::hint(n),
                    partner_link,
                    port_type: "this:ForInterface".into(),
                    operation: op.name.clone(),
                    variable,
                    fault_name,
                }));
            }
            _ => {}
        }
    }
}

/// Validates, normalizes and generates the composite's artifact set into
/// `out_dir`: `<Composite>.wsdl` (its SAWSDL interface),
/// `<Composite>-Process.wsdl` and `<Composite>.bpel`. Returns the written
/// paths in that order.
pub fn emit_process_artifacts(
    model: &ServiceModel,
    behavior: &BehaviorModel,
    composite: &str,
    out_dir: &FsPath,
) -> Result<Vec<PathBuf>, BpelError> {
    let report = pim::validate(model);
    if !report.is_empty() {
        return Err(BpelError::InvalidModel(report));
    }
    composite_service(model, composite)?;
    let report = validate_behavior(behavior, model, composite);
    if !report.is_empty() {
        return Err(BpelError::InvalidBehavior(report));
    }
    let structured = normalize_to_structured(behavior)?;
    let (desc, _) = pim_to_psm(model, composite)?;
    let files = [
        (format!("{composite}.wsdl"), emit_sawsdl(&desc)?),
        (
            format!("{composite}-Process.wsdl"),
            emit_process_wsdl(&gen_process_wsdl(model, composite)?),
        ),
        (
            format!("{composite}.bpel"),
            emit_bpel(&gen_bpel(model, &structured, composite)?),
        ),
    ];
    let io = |path: &FsPath| {
        let path = path.to_path_buf();
        move |source| BpelError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let mut written = Vec::with_capacity(files.len());
    for (name, text) in files {
        let path = out_dir.join(name);
        fs::write(&path, text).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
