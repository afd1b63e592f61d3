use std::collections::{BTreeMap, BTreeSet, HashSet};

use petgraph::algo::dominators;
use petgraph::graph::{DiGraph, NodeIndex};

use super::*;
use crate::condition::{CmpOp, Value};
use crate::names::literal_kind;
use crate::pim::{Operation, ServiceKind, ServiceModel};
use crate::report::ValidationReport;

pub const UNKNOWN_COMPOSITE: &str = "UNKNOWN_COMPOSITE";
pub const PROCESS_MISMATCH: &str = "PROCESS_MISMATCH";
pub const DUPLICATE_VARIABLE: &str = "DUPLICATE_VARIABLE";
pub const DUPLICATE_NODE: &str = "DUPLICATE_NODE";
pub const UNKNOWN_TYPE: &str = "UNKNOWN_TYPE";
pub const UNKNOWN_NODE: &str = "UNKNOWN_NODE";
pub const MISSING_START_EVENT: &str = "MISSING_START_EVENT";
pub const START_EVENT_COUNT: &str = "START_EVENT_COUNT";
pub const START_HAS_INCOMING: &str = "START_HAS_INCOMING";
pub const EVENT_DEGREE: &str = "EVENT_DEGREE";
pub const MISSING_END_EVENT: &str = "MISSING_END_EVENT";
pub const END_HAS_OUTGOING: &str = "END_HAS_OUTGOING";
pub const UNREACHABLE_NODE: &str = "UNREACHABLE_NODE";
pub const NO_PATH_TO_END: &str = "NO_PATH_TO_END";
pub const TASK_DEGREE: &str = "TASK_DEGREE";
pub const GATEWAY_DEGREE: &str = "GATEWAY_DEGREE";
pub const GATEWAY_KIND_MISMATCH: &str = "GATEWAY_KIND_MISMATCH";
pub const CONDITION_NOT_ALLOWED: &str = "CONDITION_NOT_ALLOWED";
pub const MISSING_CONDITION: &str = "MISSING_CONDITION";
pub const MULTIPLE_DEFAULTS: &str = "MULTIPLE_DEFAULTS";
pub const INVALID_CONDITION: &str = "INVALID_CONDITION";
pub const UNDECLARED_VARIABLE: &str = "UNDECLARED_VARIABLE";
pub const VARIABLE_TYPE_MISMATCH: &str = "VARIABLE_TYPE_MISMATCH";
pub const MULTIPLE_WRITERS: &str = "MULTIPLE_WRITERS";
pub const UNWRITTEN_VARIABLE: &str = "UNWRITTEN_VARIABLE";
pub const UNKNOWN_COMPONENT: &str = "UNKNOWN_COMPONENT";
pub const UNKNOWN_OPERATION: &str = "UNKNOWN_OPERATION";
pub const UNSUPPORTED_OPERATION: &str = "UNSUPPORTED_OPERATION";
pub const RECEIVE_COUNT: &str = "RECEIVE_COUNT";
pub const RECEIVE_NOT_FIRST: &str = "RECEIVE_NOT_FIRST";
pub const UNKNOWN_FAULT: &str = "UNKNOWN_FAULT";
pub const INVALID_REPLY: &str = "INVALID_REPLY";
pub const UNEXPECTED_OUTPUT: &str = "UNEXPECTED_OUTPUT";
pub const INVALID_ASSIGN: &str = "INVALID_ASSIGN";
pub const UNMAPPED_FIELD: &str = "UNMAPPED_FIELD";

/// Field name a variable exposes when it received a fault instead of a
/// response.
pub const FAULT_FIELD: &str = "fault";

/// Checks `b` as the behavior of `composite` in `model`. Total: every
/// problem becomes a violation.
pub fn validate_behavior(b: &BehaviorModel, model: &ServiceModel, composite: &str) -> ValidationReport {
    let mut c = Checker {
        b,
        model,
        r: ValidationReport::new(),
        topo: Topology::new(b),
        reachable: Vec::new(),
        closure: Vec::new(),
        own: None,
    };
    c.reachable = c.topo.reachable(b);
    c.composite(composite);
    c.declarations();
    c.graph();
    c.tasks();
    c.conditions();
    c.dataflow();
    c.r.finish()
}

struct Checker<'a> {
    b: &'a BehaviorModel,
    model: &'a ServiceModel,
    r: ValidationReport,
    topo: Topology,
    reachable: Vec<bool>,
    closure: Vec<String>,
    own: Option<&'a crate::pim::Service>,
}

fn node_path(n: &Node) -> String {
    format!("nodes/{}", n.id)
}

impl<'a> Checker<'a> {
    fn composite(&mut self, composite: &str) {
        match self.model.service(composite) {
            None => self
                .r
                .push("process", UNKNOWN_COMPOSITE, format!("no service named `{composite}`")),
            Some(s) if s.kind == ServiceKind::Atomic => self.r.push(
                "process",
                UNKNOWN_COMPOSITE,
                format!("`{composite}` is an atomic service"),
            ),
            Some(s) => {
                self.own = Some(s);
                match self.model.composition_closure(composite) {
                    Ok(c) => self.closure = c,
                    Err(e) => self.r.push("process", UNKNOWN_COMPOSITE, e.to_string()),
                }
            }
        }
        if self.b.process != composite {
            self.r.push(
                "process",
                PROCESS_MISMATCH,
                format!("behavior of `{}` checked against `{composite}`", self.b.process),
            );
        }
    }

    fn declarations(&mut self) {
        let mut seen = HashSet::new();
        for v in &self.b.variables {
            let path = format!("variables/{}", v.name);
            if !seen.insert(&v.name) {
                self.r.push(&path, DUPLICATE_VARIABLE, "variable declared twice");
            }
            if self.model.data_type(&v.type_ref).is_none() {
                self.r.push(
                    &path,
                    UNKNOWN_TYPE,
                    format!("`{}` is not a declared data type", v.type_ref),
                );
            }
        }
        let mut seen = HashSet::new();
        for n in &self.b.nodes {
            if !seen.insert(&n.id) {
                self.r.push(node_path(n), DUPLICATE_NODE, "node id used twice");
            }
        }
        for (i, e) in self.b.edges.iter().enumerate() {
            for end in [&e.from, &e.to] {
                if self.b.node(end).is_none() {
                    self.r
                        .push(format!("edges/{i}"), UNKNOWN_NODE, format!("no node `{end}`"));
                }
            }
        }
    }

    fn graph(&mut self) {
        let (b, t) = (self.b, &self.topo);
        let live_starts = b
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, n)| n.kind == NodeKind::Start && !t.outgoing[*i].is_empty())
            .count();
        if live_starts == 0 {
            self.r
                .push("nodes", MISSING_START_EVENT, "no start event with an outgoing flow");
        }
        let live_ends = b
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, n)| n.kind == NodeKind::End && self.reachable[*i])
            .count();
        if live_ends == 0 {
            self.r.push("nodes", MISSING_END_EVENT, "no reachable end event");
        }

        let mut r = ValidationReport::new();
        for (i, n) in b.nodes.iter().enumerate() {
            let path = node_path(n);
            let (ins, outs) = (t.incoming[i].len(), t.outgoing[i].len());
            if !self.reachable[i] {
                r.push(&path, UNREACHABLE_NODE, "not reachable from the start event");
            }
            match n.kind {
                NodeKind::Start => {
                    if live_starts > 1 && outs > 0 {
                        r.push(&path, START_EVENT_COUNT, format!("{live_starts} start events"));
                    }
                    if ins > 0 {
                        r.push(&path, START_HAS_INCOMING, "start events have no incoming flow");
                    }
                    if outs != 1 {
                        r.push(&path, EVENT_DEGREE, format!("start event with {outs} outgoing flows"));
                    }
                }
                NodeKind::End => {
                    if outs > 0 {
                        r.push(&path, END_HAS_OUTGOING, "end events have no outgoing flow");
                    }
                }
                NodeKind::Exclusive | NodeKind::Parallel => {
                    let split = ins == 1 && outs >= 2;
                    let join = ins >= 2 && outs == 1;
                    if !split && !join {
                        r.push(
                            &path,
                            GATEWAY_DEGREE,
                            format!("{ins} in / {outs} out; a split has 1 in and 2+ out, a join 2+ in and 1 out"),
                        );
                    }
                }
                _ => {
                    if ins != 1 || outs != 1 {
                        r.push(
                            &path,
                            TASK_DEGREE,
                            format!("{ins} in / {outs} out; tasks have exactly 1 of each"),
                        );
                    }
                }
            }
        }
        self.r.extend(r);

        // edges: conditions only on exclusive splits
        for (i, n) in b.nodes.iter().enumerate() {
            let is_xor_split = n.kind == NodeKind::Exclusive && t.outgoing[i].len() >= 2;
            let mut defaults = 0;
            for &e in &t.outgoing[i] {
                let edge = &b.edges[e];
                let path = format!("edges/{e}");
                if !is_xor_split {
                    if edge.condition.is_some() || edge.default {
                        self.r
                            .push(&path, CONDITION_NOT_ALLOWED, "only exclusive splits carry conditions");
                    }
                    continue;
                }
                match (&edge.condition, edge.default) {
                    (Some(_), true) => self
                        .r
                        .push(&path, CONDITION_NOT_ALLOWED, "a default flow has no condition"),
                    (None, false) => self.r.push(
                        &path,
                        MISSING_CONDITION,
                        "exclusive branch needs a condition or the default mark",
                    ),
                    _ => {}
                }
                defaults += edge.default as usize;
            }
            if defaults > 1 {
                self.r
                    .push(node_path(n), MULTIPLE_DEFAULTS, format!("{defaults} default flows"));
            }
        }

        self.ends_and_joins();
    }

    /// Post-dominator analysis: every reachable node must reach an end
    /// event, and the nearest node every path from a split passes through,
    /// when it is a join, must be a join of the split's kind.
    fn ends_and_joins(&mut self) {
        let (b, t) = (self.b, &self.topo);
        let n = b.nodes.len();
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n + 1, b.edges.len() + n);
        for _ in 0..=n {
            g.add_node(());
        }
        let exit = NodeIndex::new(n);
        for ends in &t.ends {
            if let Some((f, to)) = *ends {
                if self.reachable[f] && self.reachable[to] {
                    g.add_edge(NodeIndex::new(to), NodeIndex::new(f), ());
                }
            }
        }
        for (i, node) in b.nodes.iter().enumerate() {
            if node.kind == NodeKind::End && self.reachable[i] {
                g.add_edge(exit, NodeIndex::new(i), ());
            }
        }
        let doms = dominators::simple_fast(&g, exit);
        for (i, node) in b.nodes.iter().enumerate() {
            if !self.reachable[i] {
                continue;
            }
            let Some(ipdom) = doms.immediate_dominator(NodeIndex::new(i)) else {
                self.r
                    .push(node_path(node), NO_PATH_TO_END, "no end event is reachable from here");
                continue;
            };
            if !node.is_gateway() || t.outgoing[i].len() < 2 || self.on_cycle(i) {
                continue;
            }
            let j = ipdom.index();
            if j < n && b.nodes[j].is_gateway() && t.incoming[j].len() >= 2 && b.nodes[j].kind != node.kind {
                self.r.push(
                    node_path(node),
                    GATEWAY_KIND_MISMATCH,
                    format!("split is closed by `{}`, a join of the other kind", b.nodes[j].id),
                );
            }
        }
    }

    fn on_cycle(&self, start: usize) -> bool {
        let t = &self.topo;
        let mut seen = vec![false; self.b.nodes.len()];
        let mut stack: Vec<usize> = t.outgoing[start].iter().map(|&e| t.target(e)).collect();
        while let Some(x) = stack.pop() {
            if x == start {
                return true;
            }
            if !std::mem::replace(&mut seen[x], true) {
                stack.extend(t.outgoing[x].iter().map(|&e| t.target(e)));
            }
        }
        false
    }

    fn receive_operation(&self) -> Option<&'a Operation> {
        let own = self.own?;
        self.b.nodes.iter().enumerate().find_map(|(i, n)| match &n.kind {
            NodeKind::Receive(t) if self.reachable[i] => own.operation(&t.operation),
            _ => None,
        })
    }

    fn tasks(&mut self) {
        let b = self.b;
        let receives: Vec<usize> = (0..b.nodes.len())
            .filter(|&i| self.reachable[i] && matches!(b.nodes[i].kind, NodeKind::Receive(_)))
            .collect();
        match receives.as_slice() {
            [] => self
                .r
                .push("nodes", RECEIVE_COUNT, "the process has no reachable receive task"),
            [only] => {
                let first = b.nodes.iter().enumerate().any(|(i, n)| {
                    n.kind == NodeKind::Start && self.topo.outgoing[i].iter().any(|&e| self.topo.target(e) == *only)
                });
                if !first {
                    self.r.push(
                        node_path(&b.nodes[*only]),
                        RECEIVE_NOT_FIRST,
                        "the receive task must directly follow the start event",
                    );
                }
            }
            many => {
                for &i in many {
                    self.r
                        .push(node_path(&b.nodes[i]), RECEIVE_COUNT, "more than one receive task");
                }
            }
        }

        let reply_op = self.receive_operation();
        for n in &b.nodes {
            let path = node_path(n);
            match &n.kind {
                NodeKind::Receive(t) => {
                    let Some(own) = self.own else { continue };
                    let Some(op) = own.operation(&t.operation) else {
                        self.r.push(
                            &path,
                            UNKNOWN_OPERATION,
                            format!("`{}` has no operation `{}`", own.name, t.operation),
                        );
                        continue;
                    };
                    if self.shape(&path, op) {
                        self.bound_variable(&path, &t.variable, &op.inputs[0].type_ref);
                    }
                }
                NodeKind::Invoke(t) => {
                    if !self.closure.contains(&t.service) {
                        self.r.push(
                            &path,
                            UNKNOWN_COMPONENT,
                            format!("`{}` is not among the composed services", t.service),
                        );
                    }
                    let Some(op) = self.model.service(&t.service).and_then(|s| s.operation(&t.operation)) else {
                        self.r.push(
                            &path,
                            UNKNOWN_OPERATION,
                            format!("`{}` has no operation `{}`", t.service, t.operation),
                        );
                        continue;
                    };
                    if !self.shape(&path, op) {
                        continue;
                    }
                    self.copies(&path, &t.input, &op.inputs[0].type_ref, true);
                    if let Some(out) = &t.output {
                        match op.outputs.first() {
                            Some(p) => self.bound_variable(&path, out, &p.type_ref),
                            None => self.r.push(
                                &path,
                                UNEXPECTED_OUTPUT,
                                format!("`{}` is one-way and returns nothing", t.operation),
                            ),
                        }
                    }
                }
                NodeKind::Reply(t) => {
                    let Some(op) = reply_op else { continue };
                    match &t.fault {
                        Some(f) => match op.outfaults.iter().find(|x| &x.name == f) {
                            None => self.r.push(
                                &path,
                                UNKNOWN_FAULT,
                                format!("`{}` declares no out-fault `{f}`", op.name),
                            ),
                            Some(fault) => match &fault.type_ref {
                                Some(ty) => self.copies(&path, &t.assign, ty, false),
                                None if !t.assign.is_empty() => {
                                    self.r
                                        .push(&path, INVALID_ASSIGN, format!("fault `{f}` carries no message"))
                                }
                                None => {}
                            },
                        },
                        None => match op.outputs.first() {
                            Some(p) => self.copies(&path, &t.assign, &p.type_ref, false),
                            None => self.r.push(
                                &path,
                                INVALID_REPLY,
                                format!("`{}` is one-way; only fault replies apply", op.name),
                            ),
                        },
                    }
                }
                _ => {}
            }
        }
    }

    /// One input, at most one output: the shapes with a message exchange
    /// pattern in the supported subset.
    fn shape(&mut self, path: &str, op: &Operation) -> bool {
        let ok = op.inputs.len() == 1 && op.outputs.len() <= 1;
        if !ok {
            self.r.push(
                path,
                UNSUPPORTED_OPERATION,
                format!(
                    "`{}` has {} inputs and {} outputs; one input and at most one output are supported",
                    op.name,
                    op.inputs.len(),
                    op.outputs.len()
                ),
            );
        }
        ok
    }

    fn bound_variable(&mut self, path: &str, var: &str, type_ref: &str) {
        match self.b.variable(var) {
            None => self
                .r
                .push(path, UNDECLARED_VARIABLE, format!("`{var}` is not declared")),
            Some(v) if v.type_ref != type_ref => self.r.push(
                path,
                VARIABLE_TYPE_MISMATCH,
                format!("`{var}` has type `{}`, the message has type `{type_ref}`", v.type_ref),
            ),
            Some(_) => {}
        }
    }

    fn field_kinds(&self, type_ref: &str) -> Option<BTreeMap<String, &'static str>> {
        field_kinds(self.model, type_ref)
    }

    /// Kind of the value `$var.field` reads, or an explanation.
    fn read_kind(&self, var: &str, field: &str) -> Result<&'static str, (&'static str, String)> {
        let v = self
            .b
            .variable(var)
            .ok_or_else(|| (UNDECLARED_VARIABLE, format!("`{var}` is not declared")))?;
        let kinds = self.field_kinds(&v.type_ref).unwrap_or_default();
        if let Some(k) = kinds.get(field) {
            return Ok(k);
        }
        if field == FAULT_FIELD && self.receives_faults(var) {
            return Ok("text");
        }
        Err((
            INVALID_CONDITION,
            format!("type `{}` of `{var}` has no field `{field}`", v.type_ref),
        ))
    }

    /// True when `var` is the output of an invoke whose operation declares
    /// faults.
    fn receives_faults(&self, var: &str) -> bool {
        self.b.invoke_tasks().any(|(_, t)| {
            t.output.as_deref() == Some(var)
                && self
                    .model
                    .service(&t.service)
                    .and_then(|s| s.operation(&t.operation))
                    .is_some_and(|op| op.faults().next().is_some())
        })
    }

    fn copies(&mut self, path: &str, copies: &[Copy], type_ref: &str, complete: bool) {
        let Some(kinds) = self.field_kinds(type_ref) else {
            return;
        };
        let mut mapped = BTreeSet::new();
        for c in copies {
            let cpath = format!("{path}/{}", c.to);
            let Some(&target) = kinds.get(&c.to) else {
                self.r
                    .push(&cpath, INVALID_ASSIGN, format!("`{type_ref}` has no field `{}`", c.to));
                continue;
            };
            mapped.insert(c.to.as_str());
            let source = match &c.from {
                Operand::Literal(v) => Ok(v.type_name()),
                Operand::Path(p) => self.read_kind(&p.variable, &p.field_key()),
            };
            match source {
                Ok(k) if k == target => {}
                Ok(k) => self.r.push(
                    &cpath,
                    INVALID_ASSIGN,
                    format!("copies a {k} value into a {target} field"),
                ),
                Err((UNDECLARED_VARIABLE, m)) => self.r.push(&cpath, UNDECLARED_VARIABLE, m),
                Err((_, m)) => self.r.push(&cpath, INVALID_ASSIGN, m),
            }
        }
        if complete || !copies.is_empty() {
            for field in kinds.keys().filter(|f| !mapped.contains(f.as_str())) {
                self.r.push(
                    format!("{path}/{field}"),
                    UNMAPPED_FIELD,
                    format!("field `{field}` of `{type_ref}` is never assigned"),
                );
            }
        }
    }

    fn conditions(&mut self) {
        for (i, e) in self.b.edges.iter().enumerate() {
            let Some(cond) = &e.condition else { continue };
            let path = format!("edges/{i}/condition");
            for cmp in cond.comparisons() {
                match self.read_kind(&cmp.path.variable, &cmp.path.field_key()) {
                    Err((code, m)) => self.r.push(&path, code, m),
                    Ok(k) if k != cmp.literal.type_name() => self.r.push(
                        &path,
                        INVALID_CONDITION,
                        format!("`{}` is {k} but compared with {}", cmp.path, cmp.literal.type_name()),
                    ),
                    Ok(_) => {
                        if matches!(cmp.literal, Value::Bool(_)) && !matches!(cmp.op, CmpOp::Eq | CmpOp::Ne) {
                            self.r
                                .push(&path, INVALID_CONDITION, "booleans only compare with = and !=");
                        }
                    }
                }
            }
        }
    }

    /// Writers and readers over the reachable part of the graph. A variable
    /// may be written by several tasks only if they all deliver the same
    /// message (one operation's response), since it is bound to a single
    /// message variable in the generated process.
    fn dataflow(&mut self) {
        let b = self.b;
        let mut sources: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
        let mut read: BTreeSet<&str> = BTreeSet::new();
        for (i, n) in b.nodes.iter().enumerate() {
            if !self.reachable[i] {
                continue;
            }
            let reads = |copies: &'a [Copy], read: &mut BTreeSet<&'a str>| {
                for c in copies {
                    if let Operand::Path(p) = &c.from {
                        read.insert(p.variable.as_str());
                    }
                }
            };
            match &n.kind {
                NodeKind::Receive(t) => {
                    sources
                        .entry(&t.variable)
                        .or_default()
                        .insert(format!("request of {}", t.operation));
                }
                NodeKind::Invoke(t) => {
                    if let Some(o) = &t.output {
                        sources
                            .entry(o)
                            .or_default()
                            .insert(format!("response of {}.{}", t.service, t.operation));
                    }
                    reads(&t.input, &mut read);
                }
                NodeKind::Reply(t) => reads(&t.assign, &mut read),
                _ => {}
            }
            for &e in &self.topo.outgoing[i] {
                if let Some(c) = &b.edges[e].condition {
                    read.extend(c.variables());
                }
            }
        }
        for v in &b.variables {
            let path = format!("variables/{}", v.name);
            match sources.get(v.name.as_str()) {
                Some(s) if s.len() > 1 => {
                    let list: Vec<&str> = s.iter().map(String::as_str).collect();
                    self.r.push(
                        &path,
                        MULTIPLE_WRITERS,
                        format!(
                            "holds the {}; a variable carries one kind of message",
                            list.join(" and the ")
                        ),
                    );
                }
                None if read.contains(v.name.as_str()) => {
                    self.r.push(&path, UNWRITTEN_VARIABLE, "read but never written")
                }
                _ => {}
            }
        }
    }
}

/// Flattened fields of `type_ref` with the literal kind each carries.
pub(crate) fn field_kinds(model: &ServiceModel, type_ref: &str) -> Option<BTreeMap<String, &'static str>> {
    model
        .flatten_type(type_ref)
        .map(|fields| fields.into_iter().map(|(f, b)| (f, literal_kind(&b))).collect())
}
