use std::fs;
use std::path::PathBuf;

use bvl_core::world::persist::Document;
use bvl_core::world::scenario::{run_scenario, RunOptions, Scenario};
use bvl_core::world::schema::document_schemas;
use serde_json::Value;

fn repo_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(name)
}

fn schema(format: &str) -> Value {
    document_schemas()
        .into_iter()
        .find(|(f, _)| *f == format)
        .map(|(_, s)| s)
        .expect("known format")
}

fn assert_valid(format: &str, doc: &Value, what: &str) {
    let validator = jsonschema::validator_for(&schema(format)).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{what} violates {format}: {errors:?}");
}

#[test]
fn committed_schemas_are_current() {
    for (format, schema) in document_schemas() {
        let path = repo_dir("schemas").join(format!("{format}.schema.json"));
        let text = fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("{}: {e}; run `bvl schema`", path.display()));
        let committed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(
            committed,
            schema,
            "{} is stale; run `bvl schema`",
            path.display()
        );
    }
}

#[test]
fn shipped_scenarios_match_their_schema() {
    let mut seen = 0;
    for entry in fs::read_dir(repo_dir("scenarios")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_valid("scenario.v1", &doc, &path.display().to_string());
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn saved_documents_match_their_schema() {
    let text = fs::read_to_string(repo_dir("scenarios/c1_conditioning.json")).unwrap();
    let scenario = Scenario::from_json(&text).unwrap();
    let outcome = run_scenario(&scenario, &RunOptions::default(), |_| {}).unwrap();
    let sim = outcome.final_simulation().clone();
    let docs = [
        Document::Animat(Box::new(sim.animats[0].clone())),
        Document::Environment(sim.environment.clone()),
        Document::Simulation(Box::new(sim)),
    ];
    for doc in docs {
        let value: Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_valid(doc.format(), &value, doc.format());
    }
}

#[test]
fn schema_rejects_a_wrong_format_tag() {
    let text = fs::read_to_string(repo_dir("scenarios/m1_motivation.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    doc["format"] = Value::from("scenario.v2");
    let validator = jsonschema::validator_for(&schema("scenario.v1")).unwrap();
    assert!(!validator.is_valid(&doc));
}
