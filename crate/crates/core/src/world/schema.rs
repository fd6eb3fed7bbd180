//! JSON schemas of the published document formats, generated from the
//! types themselves.

use schemars::{schema_for, JsonSchema, Schema};
use serde_json::{json, Value};

use super::engine::Simulation;
use super::environment::Environment;
use super::persist::{ANIMAT_FORMAT, ENVIRONMENT_FORMAT, SIMULATION_FORMAT};
use super::scenario::{Scenario, SCENARIO_FORMAT};
use crate::animat::Animat;

fn tagged<T: JsonSchema>(format: &str) -> Value {
    let mut schema: Schema = schema_for!(T);
    schema.insert("$id".into(), json!(format!("{format}.schema.json")));
    schema.insert("title".into(), json!(format));
    let obj = schema.ensure_object();
    let props = obj
        .entry("properties")
        .or_insert_with(|| json!({}))
        .as_object_mut()
        .expect("properties is an object");
    props.insert("format".into(), json!({ "const": format }));
    let required = obj
        .entry("required")
        .or_insert_with(|| json!([]))
        .as_array_mut()
        .expect("required is an array");
    if !required.contains(&json!("format")) {
        required.insert(0, json!("format"));
    }
    schema.to_value()
}

/// `(format, schema)` for every document kind, scenarios included.
pub fn document_schemas() -> Vec<(&'static str, Value)> {
    vec![
        (ANIMAT_FORMAT, tagged::<Animat>(ANIMAT_FORMAT)),
        (
            ENVIRONMENT_FORMAT,
            tagged::<Environment>(ENVIRONMENT_FORMAT),
        ),
        (SIMULATION_FORMAT, tagged::<Simulation>(SIMULATION_FORMAT)),
        (SCENARIO_FORMAT, tagged::<Scenario>(SCENARIO_FORMAT)),
    ]
}
