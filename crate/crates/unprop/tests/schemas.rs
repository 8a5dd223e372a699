use std::path::Path;

use serde_json::{json, Value};
use unprop::bench::{run_p_sweep, SweepConfig};
use unprop::manifest::{ManifestEntry, RunManifest};
use unprop_core::{item_rng, unprop, AugmentationRecord, Channels, UnpropParams};
use unprop_testkit::random_image;

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn matches_type(v: &Value, t: &str) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.as_i64().is_some() || v.as_u64().is_some(),
        other => panic!("schema uses unknown type {other}"),
    }
}

fn resolve<'a>(schema: &'a Value, root: &'a Value) -> &'a Value {
    match schema.get("$ref").and_then(Value::as_str) {
        Some(r) => {
            let name = r
                .strip_prefix("#/definitions/")
                .unwrap_or_else(|| panic!("unsupported ref {r}"));
            root.get("definitions")
                .and_then(|d| d.get(name))
                .unwrap_or_else(|| panic!("dangling ref {r}"))
        }
        None => schema,
    }
}

/// Structural walk over the subset of JSON Schema the schema files use:
/// type (including arrays of types), required, properties with
/// additionalProperties: false, items, minItems, $ref into definitions,
/// and numeric bounds.
fn check(schema: &Value, root: &Value, value: &Value, path: &str, errors: &mut Vec<String>) {
    let schema = resolve(schema, root);

    if let Some(t) = schema.get("type") {
        let allowed: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().filter_map(Value::as_str).collect(),
            other => panic!("malformed type clause {other}"),
        };
        if !allowed.iter().any(|t| matches_type(value, t)) {
            errors.push(format!(
                "{path}: expected {}, got {}",
                allowed.join(" or "),
                kind(value)
            ));
            return;
        }
    }

    if let Some(n) = value.as_f64() {
        if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
            if n < min {
                errors.push(format!("{path}: {n} is below minimum {min}"));
            }
        }
        if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
            if n > max {
                errors.push(format!("{path}: {n} is above maximum {max}"));
            }
        }
        if let Some(min) = schema.get("exclusiveMinimum").and_then(Value::as_f64) {
            if n <= min {
                errors.push(format!("{path}: {n} is not above {min}"));
            }
        }
    }

    if let Value::Object(map) = value {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !map.contains_key(key) {
                    errors.push(format!("{path}: missing required key {key}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in map.keys() {
                if props.is_none_or(|p| !p.contains_key(key)) {
                    errors.push(format!("{path}: unexpected key {key}"));
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = map.get(key) {
                    check(sub, root, v, &format!("{path}/{key}"), errors);
                }
            }
        }
    }

    if let Value::Array(list) = value {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (list.len() as u64) < min {
                errors.push(format!("{path}: {} items, need {min}", list.len()));
            }
        }
        if let Some(items) = schema.get("items") {
            for (i, v) in list.iter().enumerate() {
                check(items, root, v, &format!("{path}/{i}"), errors);
            }
        }
    }
}

fn load_schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap()
}

fn violations(schema: &Value, value: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    check(schema, schema, value, "#", &mut errors);
    errors
}

fn sample_manifest() -> RunManifest {
    let params = UnpropParams {
        apply_prob: 1.0,
        seed: 9,
        ..UnpropParams::default()
    };
    let mut manifest = RunManifest::new("apply", params);
    for i in 0..3u64 {
        let img = random_image(24, 18, Channels::Rgb, 40 + i);
        let mut rng = item_rng(params.seed, i);
        let (_, record) = unprop(img, &params, &mut rng).unwrap();
        manifest.entries.push(ManifestEntry::from_record(
            format!("in/{i}.png"),
            format!("out/{i}.png"),
            record,
        ));
    }
    manifest.entries.push(ManifestEntry::from_record(
        "in/skip.png".into(),
        "out/skip.png".into(),
        AugmentationRecord::skipped(params),
    ));
    manifest
}

#[test]
fn real_manifests_satisfy_the_schema() {
    let schema = load_schema("run-manifest.schema.json");
    let value = serde_json::to_value(sample_manifest()).unwrap();
    let errors = violations(&schema, &value);
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn real_bench_reports_satisfy_the_schema() {
    let schema = load_schema("bench-report.schema.json");
    let config = SweepConfig {
        image_size: 32,
        probes: vec![0.0, 1.0],
        reps: 2,
        warmup_reps: 1,
        ..SweepConfig::default()
    };
    let report = run_p_sweep(&config).unwrap();
    let value = serde_json::to_value(&report).unwrap();
    let errors = violations(&schema, &value);
    assert!(errors.is_empty(), "{errors:#?}");

    let single = SweepConfig {
        reps: 1,
        ..config
    };
    let value = serde_json::to_value(run_p_sweep(&single).unwrap()).unwrap();
    assert_eq!(
        value["probes"][0]["std_dev_ms"],
        Value::Null,
        "single rep should serialize a null spread"
    );
    let errors = violations(&schema, &value);
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn the_checker_rejects_broken_documents() {
    let schema = load_schema("run-manifest.schema.json");
    let valid = serde_json::to_value(sample_manifest()).unwrap();

    let mut missing = valid.clone();
    missing.as_object_mut().unwrap().remove("params");
    assert!(violations(&schema, &missing)
        .iter()
        .any(|e| e.contains("missing required key params")));

    let mut extra = valid.clone();
    extra["entries"][0]["surprise"] = json!(1);
    assert!(violations(&schema, &extra)
        .iter()
        .any(|e| e.contains("unexpected key surprise")));

    let mut wrong_type = valid.clone();
    wrong_type["params"]["seed"] = json!("zero");
    assert!(violations(&schema, &wrong_type)
        .iter()
        .any(|e| e.contains("expected integer")));

    let mut out_of_range = valid.clone();
    out_of_range["params"]["target_rects"] = json!(1);
    assert!(violations(&schema, &out_of_range)
        .iter()
        .any(|e| e.contains("below minimum 2")));

    let mut bad_aspect = valid;
    bad_aspect["params"]["aspect_ratio"] = json!(0.0);
    assert!(violations(&schema, &bad_aspect)
        .iter()
        .any(|e| e.contains("not above 0")));
}
