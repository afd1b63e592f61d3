//! Proptest generators for valid single-service models, SAWSDL descriptions
//! in the supported subset, and composition DAGs.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::{select, subsequence};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use swsforge_core::names::XSD_BUILTINS;
use swsforge_core::pim::{
    DataType, Direction, Fault, Field, Interface, Mapping, Operation, Parameter, SemanticAnnotation, Service,
    ServiceKind, ServiceModel, TypeContent,
};
use swsforge_core::sawsdl::{
    ChildElement, ElementContent, FaultReference, InterfaceFault, MessageReference, ModelReference, SchemaElement,
    WsdlDescription, WsdlInterface, WsdlOperation, MEP_IN_ONLY, MEP_IN_OUT,
};

/// A runner whose case sequence is the same on every run.
pub fn seeded(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        // the seed is fixed, so there is nothing to persist
        Config {
            failure_persistence: None,
            ..Config::with_cases(cases)
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

const STEMS: &[&str] = &["Card", "pay", "x", "_t", "Ünit", "order.Line", "a-b"];

/// NCName made unique by its index.
fn name(tag: &'static str, i: usize) -> impl Strategy<Value = String> {
    select(STEMS).prop_map(move |s| format!("{s}{tag}{i}"))
}

fn builtin() -> impl Strategy<Value = String> {
    select(XSD_BUILTINS).prop_map(str::to_string)
}

fn uri() -> impl Strategy<Value = String> {
    (
        select(&["http://example.org/onto", "https://ex.com/a/b.owl", "urn:ontology:shop"][..]),
        0..6u8,
    )
        .prop_map(|(base, n)| format!("{base}#C{n}"))
}

fn uris() -> impl Strategy<Value = Vec<String>> {
    prop::collection::btree_set(uri(), 1..=3).prop_map(|s| s.into_iter().collect())
}

fn mapping_uri() -> impl Strategy<Value = String> {
    (0..4u8).prop_map(|n| format!("http://example.org/mapping/m{n}.xml"))
}

fn namespace() -> impl Strategy<Value = String> {
    select(&["http://example.org/sws", "urn:swsforge:gen", "https://ex.com/models/v2"][..]).prop_map(str::to_string)
}

fn data_type(i: usize) -> impl Strategy<Value = DataType> {
    let content = prop_oneof![
        builtin().prop_map(|base_type| TypeContent::Simple { base_type }),
        prop::collection::vec(builtin(), 1..=4).prop_map(|types| TypeContent::Complex {
            fields: types
                .into_iter()
                .enumerate()
                .map(|(j, type_ref)| Field {
                    name: format!("f{j}"),
                    type_ref,
                })
                .collect(),
        }),
    ];
    let mapping = prop_oneof![
        Just(None),
        (prop::option::of(mapping_uri()), prop::option::of(mapping_uri()))
            .prop_filter("a mapping carries a URI", |(l, f)| l.is_some() || f.is_some())
            .prop_map(|(lowering_schema, lifting_schema)| Some(Mapping {
                lowering_schema,
                lifting_schema,
            })),
    ];
    (name("T", i), content, prop::option::of(uris()), mapping).prop_map(|(name, content, concept, mapping)| DataType {
        name,
        content,
        annotation: concept.map(SemanticAnnotation::new),
        mapping,
    })
}

/// Indices of the referenced types plus naming choices; resolved against
/// the generated type list afterwards.
#[derive(Debug, Clone)]
struct OpShape {
    input: usize,
    input_named_by_type: bool,
    output: Option<(usize, bool)>,
    infaults: Vec<usize>,
    outfaults: Vec<usize>,
    concept: Option<Vec<String>>,
}

fn op_shape(types: usize, faults: usize) -> impl Strategy<Value = OpShape> {
    let pool: Vec<usize> = (0..faults).collect();
    (
        0..types,
        any::<bool>(),
        prop::option::of((0..types, any::<bool>())),
        subsequence(pool.clone(), 0..=faults),
        subsequence(pool, 0..=faults),
        prop::option::of(uris()),
    )
        .prop_map(|(input, input_named_by_type, output, infaults, outfaults, concept)| {
            // a fault name appears at most once per operation
            let outfaults = outfaults.into_iter().filter(|f| !infaults.contains(f)).collect();
            OpShape {
                input,
                input_named_by_type,
                output,
                infaults,
                outfaults,
                concept,
            }
        })
}

/// A valid model whose single service lies in the transformable subset:
/// one input and at most one output per operation, built-in fields only.
/// Some declared types may go unused.
pub fn single_service_model() -> impl Strategy<Value = ServiceModel> {
    (1..=4usize, 0..=3usize)
        .prop_flat_map(|(n_types, n_faults)| {
            let types: Vec<_> = (0..n_types).map(data_type).collect();
            let fault_types = prop::collection::vec(prop::option::of(0..n_types), n_faults);
            let fault_names: Vec<_> = (0..n_faults).map(|i| name("F", i)).collect();
            (
                namespace(),
                name("Svc", 0),
                any::<bool>(),
                prop::option::of(uris()),
                types,
                fault_names,
                fault_types,
                prop::collection::vec(op_shape(n_types, n_faults), 1..=4),
                select(STEMS),
            )
        })
        .prop_map(
            |(
                namespace,
                service,
                iface_named_by_service,
                iface_concept,
                types,
                fault_names,
                fault_types,
                shapes,
                op_stem,
            )| {
                let fault = |k: usize, direction| Fault {
                    name: fault_names[k].clone(),
                    type_ref: fault_types[k].map(|t| types[t].name.clone()),
                    direction,
                };
                let operations = shapes
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let input_name = if s.input_named_by_type {
                            types[s.input].name.clone()
                        } else {
                            format!("in{i}")
                        };
                        let outputs = s.output.iter().map(|&(t, by_type)| Parameter {
                            name: if by_type && types[t].name != input_name {
                                types[t].name.clone()
                            } else {
                                format!("out{i}")
                            },
                            type_ref: types[t].name.clone(),
                            direction: Direction::Out,
                        });
                        Operation {
                            name: format!("{op_stem}_{i}"),
                            inputs: vec![Parameter {
                                name: input_name.clone(),
                                type_ref: types[s.input].name.clone(),
                                direction: Direction::In,
                            }],
                            outputs: outputs.collect(),
                            infaults: s.infaults.iter().map(|&k| fault(k, Direction::In)).collect(),
                            outfaults: s.outfaults.iter().map(|&k| fault(k, Direction::Out)).collect(),
                            annotation: s.concept.clone().map(SemanticAnnotation::new),
                        }
                    })
                    .collect();
                ServiceModel {
                    namespace,
                    data_types: types,
                    services: vec![Service {
                        name: service.clone(),
                        kind: ServiceKind::Atomic,
                        interface: Interface {
                            name: if iface_named_by_service {
                                service
                            } else {
                                format!("{service}Interface")
                            },
                            operations,
                            annotation: iface_concept.map(SemanticAnnotation::new),
                        },
                        components: vec![],
                        behavior: None,
                    }],
                }
            },
        )
}

fn model_reference() -> impl Strategy<Value = Option<ModelReference>> {
    prop::option::of(uris().prop_map(ModelReference::new))
}

fn schema_element(i: usize) -> impl Strategy<Value = SchemaElement> {
    let content = prop_oneof![
        builtin().prop_map(|built_in| ElementContent::Simple { built_in }),
        prop::collection::vec((name("c", 0), builtin()), 1..=4).prop_map(|children| ElementContent::Complex {
            children: children
                .into_iter()
                .enumerate()
                .map(|(j, (n, built_in))| ChildElement {
                    name: format!("{n}_{j}"),
                    built_in,
                })
                .collect(),
        }),
    ];
    let mappings = || prop::collection::btree_set(mapping_uri(), 0..=2).prop_map(|s| s.into_iter().collect());
    (name("E", i), content, model_reference(), mappings(), mappings()).prop_map(
        |(name, content, model_reference, lowering_schema_mapping, lifting_schema_mapping)| SchemaElement {
            name,
            content,
            model_reference,
            lowering_schema_mapping,
            lifting_schema_mapping,
        },
    )
}

fn message(elements: usize) -> impl Strategy<Value = MessageReference> {
    (0..elements, prop::option::of(name("p", 0))).prop_map(|(e, parameter)| MessageReference {
        element: format!("#{e}"),
        parameter,
    })
}

fn fault_refs(faults: usize) -> impl Strategy<Value = Vec<FaultReference>> {
    subsequence((0..faults).collect::<Vec<_>>(), 0..=faults).prop_flat_map(|picked| {
        let n = picked.len();
        (
            Just(picked),
            prop::collection::vec(prop::option::of(select(&["In", "Out", "x"][..])), n),
        )
            .prop_map(|(picked, labels)| {
                picked
                    .into_iter()
                    .zip(labels)
                    .map(|(k, label)| FaultReference {
                        fault: format!("#{k}"),
                        message_label: label.map(str::to_string),
                    })
                    .collect()
            })
    })
}

fn interface(i: usize, elements: usize) -> impl Strategy<Value = WsdlInterface> {
    (0..=3usize)
        .prop_flat_map(move |n_faults| {
            let faults = prop::collection::vec(prop::option::of(0..elements), n_faults);
            let ops = prop::collection::vec(
                (
                    message(elements),
                    prop::option::of(message(elements)),
                    fault_refs(n_faults),
                    fault_refs(n_faults),
                    model_reference(),
                ),
                0..=3,
            );
            (name("I", i), faults, ops, model_reference(), select(STEMS))
        })
        .prop_map(|(name, faults, ops, model_reference, stem)| WsdlInterface {
            name,
            faults: faults
                .into_iter()
                .enumerate()
                .map(|(k, element)| InterfaceFault {
                    name: format!("Fault{k}"),
                    element: element.map(|e| format!("#{e}")),
                })
                .collect(),
            operations: ops
                .into_iter()
                .enumerate()
                .map(
                    |(k, (input, output, infaults, outfaults, model_reference))| WsdlOperation {
                        name: format!("{stem}op{k}"),
                        pattern: if output.is_some() { MEP_IN_OUT } else { MEP_IN_ONLY }.to_string(),
                        input: Some(input),
                        output,
                        infaults,
                        outfaults,
                        model_reference,
                    },
                )
                .collect(),
            model_reference,
        })
}

/// A description satisfying every invariant, with multi-valued URI lists,
/// fault references with and without message labels, and several
/// interfaces. Placeholders `#k` stand for the k-th element or fault and
/// are resolved once the names are known.
pub fn description() -> impl Strategy<Value = WsdlDescription> {
    (1..=4usize, 0..=2usize)
        .prop_flat_map(|(n_elements, n_interfaces)| {
            let elements: Vec<_> = (0..n_elements).map(schema_element).collect();
            let interfaces: Vec<_> = (0..n_interfaces).map(|i| interface(i, n_elements)).collect();
            (namespace(), elements, interfaces)
        })
        .prop_map(|(target_namespace, schema_elements, mut interfaces)| {
            let element = |r: &str| schema_elements[r[1..].parse::<usize>().unwrap()].name.clone();
            for iface in &mut interfaces {
                let fault_names: Vec<String> = iface.faults.iter().map(|f| f.name.clone()).collect();
                for f in &mut iface.faults {
                    f.element = f.element.as_deref().map(element);
                }
                for op in &mut iface.operations {
                    for m in op.input.iter_mut().chain(op.output.iter_mut()) {
                        m.element = element(&m.element);
                    }
                    for r in op.infaults.iter_mut().chain(op.outfaults.iter_mut()) {
                        r.fault = fault_names[r.fault[1..].parse::<usize>().unwrap()].clone();
                    }
                }
            }
            WsdlDescription {
                target_namespace,
                schema_elements,
                interfaces,
            }
        })
}

/// Composite `i` may aggregate only services with a smaller index, so the
/// graph is acyclic. Atomic services have no edges.
pub fn composition_dag() -> impl Strategy<Value = Vec<(bool, Vec<usize>)>> {
    (2..=8usize).prop_flat_map(|n| {
        (0..n)
            .map(|i| {
                if i < 2 {
                    Just((false, vec![])).boxed()
                } else {
                    prop_oneof![
                        Just((false, vec![])),
                        subsequence((0..i).collect::<Vec<_>>(), 2..=i.min(4)).prop_map(|c| (true, c)),
                    ]
                    .boxed()
                }
            })
            .collect::<Vec<_>>()
    })
}

/// The model of a composition DAG: atomic services share one trivial
/// operation; composites get a behavior identifier.
pub fn dag_model(dag: &[(bool, Vec<usize>)]) -> ServiceModel {
    let name = |i: usize| format!("S{i}");
    let mut m = ServiceModel::empty("http://example.org/dag");
    m.data_types.push(DataType {
        name: "Msg".into(),
        content: TypeContent::Simple {
            base_type: "string".into(),
        },
        annotation: None,
        mapping: None,
    });
    for (i, (composite, components)) in dag.iter().enumerate() {
        m.services.push(Service {
            name: name(i),
            kind: if *composite {
                ServiceKind::Composite
            } else {
                ServiceKind::Atomic
            },
            interface: Interface {
                name: name(i),
                operations: vec![Operation {
                    name: "run".into(),
                    inputs: vec![Parameter {
                        name: "Msg".into(),
                        type_ref: "Msg".into(),
                        direction: Direction::In,
                    }],
                    outputs: vec![],
                    infaults: vec![],
                    outfaults: vec![],
                    annotation: None,
                }],
                annotation: None,
            },
            components: components.iter().map(|&c| name(c)).collect(),
            behavior: composite.then(|| format!("{}.behavior.json", name(i))),
        });
    }
    m
}

/// Brute-force transitive closure: every atomic service reachable from `i`.
pub fn reachable_atomics(dag: &[(bool, Vec<usize>)], i: usize) -> BTreeSet<String> {
    let (composite, components) = &dag[i];
    if !composite {
        return BTreeSet::from([format!("S{i}")]);
    }
    components.iter().flat_map(|&c| reachable_atomics(dag, c)).collect()
}
