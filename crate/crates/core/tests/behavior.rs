mod support;

use proptest::prelude::*;
use support::trace_oracle::task_traces;
use support::{behavior, fixture, model, COMPOSITES};
use swsforge_core::behavior::{
    normalize_to_structured, parse_behavior_in, validate_behavior, BehaviorError, Block, Node, NodeKind, Step,
};

/// Compact rendering of a block tree: task ids, `if(..)`, `par(..)`,
/// `while(..)`.
fn shape(block: &Block) -> String {
    let steps: Vec<String> = block
        .iter()
        .map(|s| match s {
            Step::Task(n) => n.id.clone(),
            Step::If {
                branches, otherwise, ..
            } => {
                let mut parts: Vec<String> = branches.iter().map(|(c, b)| format!("{c}: {}", shape(b))).collect();
                if let Some(b) = otherwise {
                    parts.push(format!("else: {}", shape(b)));
                }
                format!("if({})", parts.join("; "))
            }
            Step::Parallel { branches, .. } => {
                format!("par({})", branches.iter().map(shape).collect::<Vec<_>>().join(" | "))
            }
            Step::While { condition, body, .. } => format!("while({condition}: {})", shape(body)),
        })
        .collect();
    format!("[{}]", steps.join(", "))
}

#[test]
fn corpus_behaviors_validate_clean() {
    for (m, b, composite) in COMPOSITES {
        let report = validate_behavior(&behavior(b), &model(m), composite);
        assert!(report.is_empty(), "{b}:\n{report}");
    }
}

#[test]
fn electronic_sale_graph_has_two_invokes_and_one_exclusive_pair() {
    let b = behavior("electronic_sale.behavior.json");
    assert_eq!(b.invoke_tasks().count(), 2);
    let xor: Vec<&Node> = b.nodes.iter().filter(|n| n.kind == NodeKind::Exclusive).collect();
    assert_eq!(xor.len(), 2);
    assert_eq!(b.edges.iter().filter(|e| e.from == xor[0].id).count(), 2, "split");
    assert_eq!(b.edges.iter().filter(|e| e.to == xor[1].id).count(), 2, "join");
}

#[test]
fn electronic_sale_decomposes_by_hand() {
    // receive, check the card, then pay and reply if it is valid, otherwise
    // reply with the fault
    let s = normalize_to_structured(&behavior("electronic_sale.behavior.json")).unwrap();
    assert_eq!(
        shape(&s.body),
        "[Receive_Request, CheckCard, if($status.valid = true: [Pay, Reply_Receipt]; else: [Reply_Invalid])]"
    );
}

#[test]
fn corpus_shapes() {
    let expect = [
        ("echo.behavior.json", "[receive, reply]"),
        ("checkout.behavior.json", "[receive, reserve, charge, log, reply]"),
        (
            "poll.behavior.json",
            "[receive, first, while($status.pending = true: [again]), reply]",
        ),
        (
            "fanout.behavior.json",
            "[receive, par([reserve] | [charge] | [log]), reply]",
        ),
        (
            "travel.behavior.json",
            "[receive, book, if($booking.confirmed = true: [par([hotel] | [car]), reply]; else: [reject])]",
        ),
    ];
    for (file, want) in expect {
        let s = normalize_to_structured(&behavior(file)).unwrap();
        assert_eq!(shape(&s.body), want, "{file}");
    }
}

#[test]
fn crossing_edges_are_unstructured() {
    let err = normalize_to_structured(&behavior("crossing.behavior.json")).unwrap_err();
    assert_eq!(err.entry, "s2", "{err}");
}

#[test]
fn parallel_split_closed_by_exclusive_merge_is_reported() {
    let report = validate_behavior(&behavior("mismatch.behavior.json"), &model("shop.json"), "Checkout");
    let hits: Vec<_> = report
        .violations()
        .iter()
        .filter(|v| v.code == "GATEWAY_KIND_MISMATCH")
        .collect();
    assert_eq!(hits.len(), 1, "{report}");
    assert_eq!(hits[0].path, "nodes/split");
    assert!(normalize_to_structured(&behavior("mismatch.behavior.json")).is_err());
}

#[test]
fn invoking_outside_the_composition_is_reported() {
    let mut m = model("electronic_sale.json");
    let mut wallet = m.service("ePayment").unwrap().clone();
    wallet.name = "eWallet".into();
    m.services.push(wallet);
    let mut b = behavior("electronic_sale.behavior.json");
    for n in &mut b.nodes {
        if let NodeKind::Invoke(t) = &mut n.kind {
            if t.service == "ePayment" {
                t.service = "eWallet".into();
            }
        }
    }
    let report = validate_behavior(&b, &m, "ElectronicSale");
    assert_eq!(report.codes(), vec!["UNKNOWN_COMPONENT"], "{report}");
}

#[test]
fn parse_in_context_resolves_invoke_targets() {
    let m = model("electronic_sale.json");
    let text = String::from_utf8(fixture("electronic_sale.behavior.json")).unwrap();
    assert!(parse_behavior_in(text.as_bytes(), &m, "ElectronicSale").is_ok());
    let bad = text.replace(r#""operation": "pay""#, r#""operation": "refund""#);
    assert_eq!(
        parse_behavior_in(bad.as_bytes(), &m, "ElectronicSale"),
        Err(BehaviorError::UnresolvedReference {
            path: "nodes/Pay/operation".into(),
            name: "refund".into()
        })
    );
}

#[test]
fn validation_catches_dataflow_and_typing_mistakes() {
    let m = model("electronic_sale.json");
    let text = String::from_utf8(fixture("electronic_sale.behavior.json")).unwrap();
    let cases = [
        (
            r#""$status.valid = true""#,
            r#""$status.valid = 1""#,
            "INVALID_CONDITION",
        ),
        (
            r#""$status.valid = true""#,
            r#""$status.missing = true""#,
            "INVALID_CONDITION",
        ),
        (
            r#""amount": "$purchase.amount""#,
            r#""amount": "$purchase.TypeCard""#,
            "INVALID_ASSIGN",
        ),
        (r#", "amount": "$purchase.amount""#, "", "UNMAPPED_FIELD"),
        (r#""fault": "CheckResult""#, r#""fault": "Declined""#, "UNKNOWN_FAULT"),
        (
            r#""output": "receipt""#,
            r#""output": "status""#,
            "VARIABLE_TYPE_MISMATCH",
        ),
        (r#", "default": true"#, "", "MISSING_CONDITION"),
    ];
    for (from, to, code) in cases {
        assert!(text.contains(from), "{from}");
        let b = swsforge_core::behavior::parse_behavior(text.replace(from, to).as_bytes()).unwrap();
        let report = validate_behavior(&b, &m, "ElectronicSale");
        assert!(report.has_code(code), "{code} expected after `{to}`:\n{report}");
    }
}

#[test]
fn leaves_match_graph_tasks() {
    for (_, file, _) in COMPOSITES {
        let b = behavior(file);
        let s = normalize_to_structured(&b).unwrap();
        let mut tree: Vec<&str> = s.tasks().iter().map(|n| n.id.as_str()).collect();
        let mut graph: Vec<&str> = b.nodes.iter().filter(|n| n.is_task()).map(|n| n.id.as_str()).collect();
        tree.sort();
        graph.sort();
        assert_eq!(tree, graph, "{file}");
    }
}

#[test]
fn re_expansion_is_trace_equivalent_and_stable() {
    for (m, file, composite) in COMPOSITES {
        let b = behavior(file);
        assert!(b.nodes.len() <= 12);
        let s = normalize_to_structured(&b).unwrap();
        let g = s.to_graph();
        assert_eq!(task_traces(&b, 12), task_traces(&g, 12), "{file}");
        assert!(validate_behavior(&g, &model(m), composite).is_empty(), "{file}");
        assert_eq!(normalize_to_structured(&g).unwrap(), s, "{file}");
    }
}

#[test]
fn trace_oracle_sees_loops_and_interleavings() {
    let traces = task_traces(&behavior("poll.behavior.json"), 6);
    let rendered: Vec<String> = traces.iter().map(|(t, e)| format!("{}:{e:?}", t.join(","))).collect();
    assert!(
        rendered.contains(&"receive,first,reply:Done".to_string()),
        "{rendered:?}"
    );
    assert!(
        rendered.contains(&"receive,first,again,again,reply:Done".to_string()),
        "{rendered:?}"
    );
    assert!(
        rendered.contains(&"receive,first,again,again,again,again:Cut".to_string()),
        "{rendered:?}"
    );
    let fan = task_traces(&behavior("fanout.behavior.json"), 12);
    assert_eq!(fan.len(), 6, "3! interleavings");
}

#[test]
fn loops_that_do_not_fit_the_while_pattern_are_rejected() {
    // the loop split's body flow carries no condition: default into the
    // body, condition on the exit
    let text = String::from_utf8(fixture("poll.behavior.json")).unwrap();
    let text = text
        .replace(
            r#""to": "again",
      "condition": "$status.pending = true""#,
            r#""to": "again",
      "default": true"#,
        )
        .replace(
            r#""to": "reply",
      "default": true"#,
            r#""to": "reply",
      "condition": "$status.pending = false""#,
        );
    let b = swsforge_core::behavior::parse_behavior(text.as_bytes()).unwrap();
    let err = normalize_to_structured(&b).unwrap_err();
    assert_eq!(err.entry, "loop", "{err}");
}

fn arb_kind() -> impl Strategy<Value = &'static str> {
    prop_oneof![
        Just("start"),
        Just("end"),
        Just("exclusive"),
        Just("parallel"),
        Just("reply"),
        Just("receive"),
        Just("invoke"),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adding a node that no flow touches never removes a violation.
    #[test]
    fn validation_is_monotone(which in 0..COMPOSITES.len() + 1, kind in arb_kind()) {
        let (m, file, composite) = if which == COMPOSITES.len() {
            ("shop.json", "mismatch.behavior.json", "Checkout")
        } else {
            COMPOSITES[which]
        };
        let model = model(m);
        let mut b = behavior(file);
        let before = validate_behavior(&b, &model, composite);
        let mut doc: serde_json::Value = serde_json::from_slice(&fixture(file)).unwrap();
        let extra = match kind {
            "receive" => serde_json::json!({"id": "extra", "kind": "receive", "operation": "nope", "variable": b.variables[0].name}),
            "invoke" => serde_json::json!({"id": "extra", "kind": "invoke", "service": "Nope", "operation": "nope", "output": b.variables[0].name}),
            k => serde_json::json!({"id": "extra", "kind": k}),
        };
        doc["nodes"].as_array_mut().unwrap().push(extra);
        b = swsforge_core::behavior::parse_behavior(&serde_json::to_vec(&doc).unwrap()).unwrap();
        let after = validate_behavior(&b, &model, composite);
        for v in before.violations() {
            prop_assert!(after.violations().contains(v), "lost {v}");
        }
        prop_assert!(after.has_code("UNREACHABLE_NODE"));
    }
}
