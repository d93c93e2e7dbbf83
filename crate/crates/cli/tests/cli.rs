use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairsec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["estimate"]).status.code(), Some(2));
    let out = run(&["estimate", "BN999"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("BN999"));
    assert_eq!(run(&["table8", "--families", "XYZ"]).status.code(), Some(2));
    assert_eq!(run(&["list-curves", "--format", "yaml"]).status.code(), Some(2));
}

#[test]
fn list_curves_report() {
    let out = run(&["list-curves"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "list-curves");
    assert_eq!(v["results"].as_array().unwrap().len(), 11);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["sample_count"], 25600);
    assert_eq!(v["config"]["run"]["model"], "BD");
}

#[test]
fn asymptote_formats() {
    let csv = run(&["asymptote", "3072", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q_bits,variant,c,epsilon,log2_cost");
    assert_eq!(lines.len(), 6);
    let md = String::from_utf8(run(&["asymptote", "1024", "--format", "markdown"]).stdout).unwrap();
    assert!(md.contains("| q_bits | variant |"));
    assert!(md.contains("config_hash:"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("pairsec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "[run]\nmodel = \"GS\"\nsamples = 1234\nseed = 9\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&run(&["list-curves", "--config", c]));
    assert_eq!(v["config"]["run"]["model"], "GS");
    assert_eq!(v["sample_count"], 1234);
    assert_eq!(v["master_seed"], 9);
    let v = json(&run(&["list-curves", "--config", c, "--model", "BD", "--seed", "3"]));
    assert_eq!(v["config"]["run"]["model"], "BD");
    assert_eq!(v["master_seed"], 3);
    assert_eq!(v["sample_count"], 1234);
    let v = json(&run(&["list-curves", "--fast"]));
    assert_eq!(v["sample_count"], 2560);

    let out_path = dir.join("out.json");
    let out = run(&["list-curves", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert!(std::fs::read_to_string(&out_path).unwrap().contains("\"schema_version\": 1"));

    std::fs::write(&cfg, "[run]\nunknown_key = 1\n").unwrap();
    assert_eq!(run(&["list-curves", "--config", c]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn estimate_tags_model() {
    let bd = json(&run(&["estimate", "BN256", "--fast"]));
    let gs = json(&run(&["estimate", "BN256", "--fast", "--model", "GS"]));
    let bits = |v: &serde_json::Value| v["results"][0]["field_side_bits"].as_f64().unwrap();
    assert_eq!(bd["results"][0]["field"]["model"]["model"], "BD");
    assert_eq!(gs["results"][0]["field"]["model"]["model"], "GS");
    assert_ne!(bits(&bd), bits(&gs));
    assert_eq!(bd["results"][0]["curve"], "BN256");
    assert!((bits(&bd) - 99.92).abs() < 3.0);
}
