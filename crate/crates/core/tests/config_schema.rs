use std::collections::BTreeSet;
use std::path::PathBuf;

use qls_core::config::{SimulateConfig, SCHEMA_VERSION};

fn repo(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn schema() -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(repo("schema/simulate.schema.json")).unwrap()).unwrap()
}

fn keys(v: &serde_json::Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn schema_lists_exactly_the_accepted_keys() {
    let s = schema();
    assert_eq!(s["properties"]["schema_version"]["const"], SCHEMA_VERSION);
    assert_eq!(s["additionalProperties"], false);
    let cfg = serde_json::to_value(SimulateConfig::figure1()).unwrap();
    assert_eq!(keys(&s["properties"]), keys(&cfg));
    let data = &s["properties"]["data"]["properties"];
    assert_eq!(keys(data), keys(&cfg["data"]));
    assert_eq!(keys(&data["perturbation"]["properties"]), keys(&cfg["data"]["perturbation"]));
    for req in s["required"].as_array().unwrap() {
        let mut trimmed = cfg.as_object().unwrap().clone();
        trimmed.remove(req.as_str().unwrap());
        assert!(SimulateConfig::from_json(&serde_json::Value::Object(trimmed).to_string()).is_err(), "{req}");
    }
}

#[test]
fn shipped_configs_parse() {
    let fig = SimulateConfig::from_json(&std::fs::read_to_string(repo("configs/figure1.json")).unwrap()).unwrap();
    let preset = SimulateConfig::figure1();
    assert_eq!(fig.x_run().unwrap().n_steps(), preset.x_run().unwrap().n_steps());
    assert_eq!(fig.snapshot_stride, preset.snapshot_stride);
    assert_eq!(fig.breather(), preset.breather());
    assert_eq!(fig.data.perturbation, preset.data.perturbation);
    let y = SimulateConfig::from_json(&std::fs::read_to_string(repo("configs/perturbed_y.json")).unwrap()).unwrap();
    assert_eq!(y.y_run().unwrap().j, None);
}
