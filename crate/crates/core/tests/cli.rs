use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn balhon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_balhon"))
        .args(args)
        .env_remove("BALHON_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn input_args() -> Vec<String> {
    ["ports", "voyages", "regions", "params"]
        .iter()
        .flat_map(|f| {
            let file = if *f == "params" {
                "params.json".to_string()
            } else {
                format!("{f}.csv")
            };
            [format!("--{f}"), fixture(&file).display().to_string()]
        })
        .collect()
}

#[test]
fn run_with_compare_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut args = vec!["run".to_string()];
    args.extend(input_args());
    for (flag, value) in [
        ("--scenario", fixture("no_policy.json")),
        ("--compare", fixture("imo_bwm.json")),
        ("--out", out.clone()),
    ] {
        args.push(flag.into());
        args.push(value.display().to_string());
    }
    args.push("--dump-rules".into());
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = balhon(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    for f in [
        "region_risk.csv",
        "cost_matrix.csv",
        "lorenz.csv",
        "manifest.json",
        "rules.csv",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let risk = std::fs::read_to_string(out.join("region_risk.csv")).unwrap();
    let header = risk.lines().next().unwrap();
    assert_eq!(
        header,
        "region_id,risk_no_policy,risk_policy,reduction_pct,fold_change"
    );
    let regions: Vec<&str> = risk
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(regions, ["MUS", "SGP", "TZA", "USA"]);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["voyages"], 8);
    assert_eq!(manifest["scenarios"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["lorenz_metric"], "risk_reduction");
}

#[test]
fn run_without_compare_leaves_policy_columns_blank() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run".to_string()];
    args.extend(input_args());
    args.extend([
        "--scenario".into(),
        fixture("imo_bwm.json").display().to_string(),
        "--out".into(),
        dir.path().display().to_string(),
    ]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = balhon(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let risk = std::fs::read_to_string(dir.path().join("region_risk.csv")).unwrap();
    assert!(risk.lines().skip(1).all(|l| l.ends_with(",,,")), "{risk}");
}

#[test]
fn missing_input_flag_is_a_usage_error() {
    let scenario = fixture("no_policy.json");
    let o = balhon(&[
        "run",
        "--scenario",
        s(&scenario),
        "--ports",
        s(&fixture("ports.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--voyages"), "{}", stderr(&o));
}

#[test]
fn pinned_dataset_hash_must_match() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("pinned.json");
    std::fs::write(
        &scenario,
        r#"{"name":"pinned","risk":{"alpha":1.0},"dataset_hash":"0000"}"#,
    )
    .unwrap();
    let mut args = vec!["run".to_string()];
    args.extend(input_args());
    args.extend([
        "--scenario".into(),
        s(&scenario).into(),
        "--out".into(),
        s(dir.path()).into(),
    ]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = balhon(&args);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(!dir.path().join("region_risk.csv").exists());
}

#[test]
fn validate_reports_rejections() {
    let o = balhon(&[
        "validate",
        "--ports",
        s(&fixture("ports.csv")),
        "--voyages",
        s(&fixture("bad_voyages.csv")),
        "--regions",
        s(&fixture("regions.csv")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("voyages 2\n"), "{text}");
    assert!(text.contains("rejected 4\n"), "{text}");

    let strict = balhon(&[
        "validate",
        "--strict",
        "--ports",
        s(&fixture("ports.csv")),
        "--voyages",
        s(&fixture("bad_voyages.csv")),
        "--regions",
        s(&fixture("regions.csv")),
    ]);
    assert_eq!(strict.status.code(), Some(1));
}

fn gini(data: &Path, out: &Path) -> Output {
    balhon(&[
        "gini",
        "--data",
        s(data),
        "--metric-col",
        "reduction",
        "--income-col",
        "gdp",
        "--out",
        s(out),
    ])
}

#[test]
fn gini_of_two_regions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lorenz.csv");
    let o = gini(&fixture("regions_metric.csv"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "0.500000\n");
    let curve = std::fs::read_to_string(out).unwrap();
    assert!(curve.ends_with("gini,0.500000\n"), "{curve}");
}

#[test]
fn gini_of_equal_intensity_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("equal.csv");
    std::fs::write(
        &data,
        "region_id,gdp,reduction\nA,100,1\nB,200,2\nC,300,3\n",
    )
    .unwrap();
    let o = gini(&data, &dir.path().join("lorenz.csv"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "0.000000\n");
}

#[test]
fn gini_of_all_zero_metric_fails() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("zero.csv");
    std::fs::write(&data, "region_id,gdp,reduction\nA,100,0\nB,200,0\n").unwrap();
    let o = gini(&data, &dir.path().join("lorenz.csv"));
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn synth_rejects_a_single_port() {
    let dir = tempfile::tempdir().unwrap();
    let o = balhon(&[
        "synth",
        "--seed",
        "1",
        "--ports",
        "1",
        "--voyages",
        "10",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn synth_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = balhon(&[
            "synth",
            "--seed",
            "9",
            "--ports",
            "15",
            "--voyages",
            "400",
            "--out",
            s(dir.path()),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in [
        "ports.csv",
        "voyages.csv",
        "regions.csv",
        "params.json",
        "no_policy.json",
        "imo_bwm.json",
    ] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("balhon.toml");
    std::fs::write(&cfg, "[synth]\nseeds = 3\n").unwrap();
    let o = balhon(&["--config", s(&cfg), "synth"]);
    assert_eq!(o.status.code(), Some(1));
}
