//! Brute-force reference for `flow`: hand-built processes whose body is a
//! receive followed by one flow of invoke sequences, and the set of every
//! interleaving of those sequences.

use std::collections::BTreeSet;

use swsforge_core::bpel::{Activity, Assign, BpelDocument, CopyRule, ExecutionHint, Invoke, Receive};
use swsforge_core::condition::{Message, Operand, Path, Value};
use swsforge_core::sim::{Outcome, Stub, StubCase, StubRegistry};

pub const SERVICE: &str = "Worker";

/// Branch `i` holds one invoke per entry of `shape[i]`; a `true` entry puts
/// an assign in front of its invoke, which shifts the round-robin schedule
/// without changing what is invoked.
pub fn flow_process(shape: &[Vec<bool>]) -> (BpelDocument, StubRegistry) {
    let hint = |id: String| ExecutionHint { label: id.clone(), id };
    let mut stubs = Vec::new();
    let branches = shape
        .iter()
        .enumerate()
        .map(|(i, acts)| {
            let mut items = Vec::new();
            for (j, with_assign) in acts.iter().enumerate() {
                let op = format!("op{i}{j}");
                let request = format!("{op}Request");
                if *with_assign {
                    items.push(Activity::Assign(Assign {
                        name: format!("Assign_{op}"),
                        copies: vec![CopyRule {
                            from: Operand::Literal(Value::Int((i * 10 + j) as i64)),
                            to: Path {
                                variable: request.clone(),
                                fields: vec!["n".into()],
                            },
                        }],
                    }));
                }
                items.push(Activity::Invoke(Invoke {
                    hint: hint(op.clone()),
                    partner_link: "workerPlkVar".into(),
                    port_type: format!("tns:{SERVICE}ServiceSoap"),
                    operation: op.clone(),
                    input_variable: request,
                    output_variable: None,
                }));
                stubs.push(Stub {
                    service: SERVICE.into(),
                    operation: op,
                    cases: vec![StubCase {
                        when: None,
                        result: Outcome::Response(Message::new()),
                    }],
                });
            }
            Activity::Sequence(items)
        })
        .collect();
    let doc = BpelDocument {
        name: "FlowProcess".into(),
        target_namespace: "http://example.org/flow".into(),
        namespaces: vec![],
        imports: vec![],
        partner_links: vec![],
        variables: vec![],
        body: Activity::Sequence(vec![
            Activity::Receive(Receive {
                hint: hint("receive".into()),
                partner_link: "ownPlkVar".into(),
                port_type: "this:ForInterface".into(),
                operation: "run".into(),
                variable: "in".into(),
                create_instance: true,
            }),
            Activity::Flow {
                name: "split".into(),
                branches,
            },
        ]),
    };
    (doc, StubRegistry { stubs })
}

/// Operation names per branch, in branch order.
pub fn branch_operations(shape: &[Vec<bool>]) -> Vec<Vec<String>> {
    shape
        .iter()
        .enumerate()
        .map(|(i, acts)| (0..acts.len()).map(|j| format!("op{i}{j}")).collect())
        .collect()
}

/// Every merge of the branches that keeps each branch's own order.
pub fn interleavings(branches: &[Vec<String>]) -> BTreeSet<Vec<String>> {
    fn go(branches: &[Vec<String>], pos: &mut Vec<usize>, prefix: &mut Vec<String>, out: &mut BTreeSet<Vec<String>>) {
        let mut any = false;
        for b in 0..branches.len() {
            if pos[b] < branches[b].len() {
                any = true;
                prefix.push(branches[b][pos[b]].clone());
                pos[b] += 1;
                go(branches, pos, prefix, out);
                pos[b] -= 1;
                prefix.pop();
            }
        }
        if !any {
            out.insert(prefix.clone());
        }
    }
    let mut out = BTreeSet::new();
    go(branches, &mut vec![0; branches.len()], &mut Vec::new(), &mut out);
    out
}

pub fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}
