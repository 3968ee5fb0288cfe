//! Runs an experiment from a JSON spec and reads the results back.
use kpzlab::experiments::{self, read_csv, read_json, AzumaOutcome, ExperimentSpec, Overrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ExperimentSpec::from_json_str(
        r#"{
            "kind": "azuma",
            "replicas": 5000,
            "master_seed": 3,
            "parameters": { "blocks": 32, "ks": [1.0, 2.0, 3.0] }
        }"#,
    )?;
    let dir = std::env::temp_dir().join("kpzlab-example");
    let overrides = Overrides { out_dir: Some(dir.clone()), threads: Some(2), seed: None };
    for path in experiments::run(&spec, &overrides)? {
        println!("wrote {}", path.display());
    }
    let (meta, result): (_, AzumaOutcome) = read_json(&dir.join("azuma.json"))?;
    println!("spec {} ({} replicas): ĉ = {:.3}", &meta.spec_sha256[..12], meta.replicas, result.tails.c_hat);
    let (_, columns, rows) = read_csv(&dir.join("azuma_tails.csv"))?;
    println!("{}", columns.join("\t"));
    for row in rows {
        println!("{}", row.join("\t"));
    }
    Ok(())
}
