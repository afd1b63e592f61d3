mod support;

use std::collections::BTreeSet;

use proptest::prop_assert_eq;
use support::model_gen::{composition_dag, dag_model, reachable_atomics, seeded, single_service_model};
use support::{fixture, model};
use swsforge_core::pim::*;

#[test]
fn corpus_models_round_trip_through_the_document() {
    for file in ["card_validate.json", "electronic_sale.json", "shop.json", "travel.json"] {
        let m = model(file);
        assert!(validate(&m).is_empty(), "{file}: {}", validate(&m));
        let text = serialize_model(&m).unwrap();
        assert_eq!(parse_model(text.as_bytes()).unwrap(), m, "{file}");
        assert_eq!(serialize_model(&m).unwrap(), text, "{file}");
    }
}

#[test]
fn electronic_sale_closure() {
    let m = model("electronic_sale.json");
    assert_eq!(
        m.composition_closure("ElectronicSale").unwrap(),
        ["CardValidate", "ePayment"]
    );
    assert_eq!(m.composition_closure("CardValidate").unwrap(), ["CardValidate"]);
}

#[test]
fn cyclic_fixture_is_reported_and_not_serialized() {
    let m = model("cyclic.json");
    let report = validate(&m);
    assert!(report.has_code("COMPOSITION_CYCLE"), "{report}");
    assert!(matches!(serialize_model(&m), Err(ModelError::InvalidModel(_))));
    let composite = m.services.iter().find(|s| s.kind == ServiceKind::Composite).unwrap();
    assert!(matches!(
        m.composition_closure(&composite.name),
        Err(ModelError::CompositionCycle(_))
    ));
}

#[test]
fn composites_need_two_components() {
    let mut m = model("electronic_sale.json");
    let sale = m.services.iter_mut().find(|s| s.name == "ElectronicSale").unwrap();
    sale.components.truncate(1);
    assert!(validate(&m).has_code("COMPOSITE_MIN_COMPONENTS"));
}

#[test]
fn truncated_documents_report_a_position() {
    let text = fixture("card_validate.json");
    match parse_model(&text[..text.len() / 2]) {
        Err(ModelError::Syntax { line, .. }) => assert!(line > 0),
        other => panic!("{other:?}"),
    }
}

/// Seeded; 500 generated models.
#[test]
fn generated_models_round_trip_through_the_document() {
    seeded(500)
        .run(&single_service_model(), |m| {
            let text = serialize_model(&m).unwrap();
            prop_assert_eq!(parse_model(text.as_bytes()).unwrap(), m);
            Ok(())
        })
        .unwrap();
}

/// Depth-first, declaration-ordered first occurrences, written out
/// independently of the library's traversal.
fn dfs_order(dag: &[(bool, Vec<usize>)], i: usize, out: &mut Vec<String>) {
    let (composite, components) = &dag[i];
    if *composite {
        for &c in components {
            dfs_order(dag, c, out);
        }
    } else if !out.contains(&format!("S{i}")) {
        out.push(format!("S{i}"));
    }
}

/// Seeded; 500 generated composition DAGs.
#[test]
fn closure_matches_the_transitive_closure_oracle() {
    seeded(500)
        .run(&composition_dag(), |dag| {
            let m = dag_model(&dag);
            prop_assert_eq!(validate(&m), swsforge_core::ValidationReport::new());
            for i in 0..dag.len() {
                let closure = m.composition_closure(&format!("S{i}")).unwrap();
                let unique: BTreeSet<String> = closure.iter().cloned().collect();
                prop_assert_eq!(unique.len(), closure.len(), "duplicates in {:?}", closure);
                for s in &closure {
                    prop_assert_eq!(m.service(s).unwrap().kind, ServiceKind::Atomic);
                }
                prop_assert_eq!(&unique, &reachable_atomics(&dag, i));
                let mut order = Vec::new();
                dfs_order(&dag, i, &mut order);
                prop_assert_eq!(closure, order);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn validation_is_total_and_deterministic_on_mutated_models() {
    seeded(200)
        .run(&(composition_dag(), 0..8usize), |(dag, victim)| {
            let mut m = dag_model(&dag);
            // close a cycle or dangle a reference, whichever applies
            let victim = victim % m.services.len();
            if m.services[victim].kind == ServiceKind::Composite {
                let name = m.services[victim].name.clone();
                let first = dag[victim].1[0];
                m.services[first].kind = ServiceKind::Composite;
                m.services[first].components = vec![name.clone(), name];
            } else {
                m.services[victim].interface.operations[0].inputs[0].type_ref = "Missing".into();
            }
            let a = validate(&m);
            prop_assert_eq!(&a, &validate(&m));
            proptest::prop_assert!(!a.is_empty());
            Ok(())
        })
        .unwrap();
}
