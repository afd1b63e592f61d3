#![allow(dead_code)]

pub mod flow_oracle;
pub mod model_gen;
pub mod totality;
pub mod trace_oracle;

use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn model(name: &str) -> swsforge_core::pim::ServiceModel {
    swsforge_core::pim::parse_model(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn behavior(name: &str) -> swsforge_core::behavior::BehaviorModel {
    swsforge_core::behavior::parse_behavior(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// (model, behavior, composite) triples of the well-formed corpus.
pub const COMPOSITES: &[(&str, &str, &str)] = &[
    (
        "electronic_sale.json",
        "electronic_sale.behavior.json",
        "ElectronicSale",
    ),
    ("shop.json", "echo.behavior.json", "Echo"),
    ("shop.json", "checkout.behavior.json", "Checkout"),
    ("shop.json", "poll.behavior.json", "Poll"),
    ("shop.json", "fanout.behavior.json", "FanOut"),
    ("travel.json", "travel.behavior.json", "Travel"),
];

pub fn stubs(name: &str) -> swsforge_core::sim::StubRegistry {
    swsforge_core::sim::parse_stubs(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn message(name: &str) -> swsforge_core::condition::Message {
    swsforge_core::sim::parse_message(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Generates the BPEL document of a corpus composite.
pub fn process(model_file: &str, behavior_file: &str, composite: &str) -> swsforge_core::bpel::BpelDocument {
    let s = swsforge_core::behavior::normalize_to_structured(&behavior(behavior_file)).unwrap();
    swsforge_core::bpel::gen_bpel(&model(model_file), &s, composite).unwrap_or_else(|e| panic!("{composite}: {e}"))
}

/// (composite, stubs, input) used to simulate each corpus composite.
pub const RUNS: &[(&str, &str, &str)] = &[
    (
        "ElectronicSale",
        "electronic_sale.stubs_valid.json",
        "electronic_sale.input.json",
    ),
    (
        "ElectronicSale",
        "electronic_sale.stubs_invalid.json",
        "electronic_sale.input.json",
    ),
    ("Echo", "shop.stubs.json", "echo.input.json"),
    ("Checkout", "shop.stubs.json", "order.input.json"),
    ("Poll", "shop.stubs.json", "order.input.json"),
    ("FanOut", "shop.stubs.json", "order.input.json"),
    ("Travel", "travel.stubs.json", "travel.input.json"),
];

pub fn composite_files(composite: &str) -> (&'static str, &'static str) {
    COMPOSITES
        .iter()
        .find(|(_, _, c)| *c == composite)
        .map(|(m, b, _)| (*m, *b))
        .unwrap_or_else(|| panic!("no corpus entry for {composite}"))
}
