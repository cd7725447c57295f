use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pisot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pisot")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const LUCAS: &[&str] = &["--polynomial", "x^2 - x - 1", "--generator", "recurrence", "--initial", "1,3"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

/// `(k, value, abs_error)` rows of a sample CSV.
fn sample_rows(path: &Path) -> Vec<(i64, f64, f64)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].parse().unwrap(), rec[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn pisot_subcommand() {
    let out = pisot(&["pisot", "x^2-x-1", "--no-timestamp"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["is_pisot"], true);
    let v = json(&pisot(&["pisot", "2x-3"]));
    assert_eq!(v["is_pisot"], false);
    assert!(v["report"]["reason"].as_str().unwrap().contains("not an algebraic integer"));
    assert!(v["generated_at"].is_u64());
}

#[test]
fn gen_then_annihilate_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = pisot(&with(&["gen", "-N", "10", "--out", d], LUCAS));
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sequence.csv")).unwrap();
    assert_eq!(csv, "k,term\n1,1\n2,3\n3,4\n4,7\n5,11\n6,18\n7,29\n8,47\n9,76\n10,123\n");
    assert_eq!(json(&out)["length"], 10);
    assert!(dir.path().join("gen.json").exists());

    let seq = dir.path().join("sequence.csv");
    let a = dir.path().join("a");
    let out = pisot(&[
        "annihilate",
        "--polynomial",
        "x^2-x-1",
        "--generator",
        "csv",
        "--input",
        seq.to_str().unwrap(),
        "--theta",
        "1/3",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["identically_zero"], true);
    let e = std::fs::read_to_string(a.join("e.csv")).unwrap();
    let rows: Vec<&str> = e.lines().collect();
    assert_eq!(rows[0], "k,e");
    assert_eq!(rows.len(), 9);
    assert!(rows[1..].iter().all(|r| r.ends_with(",0")));
}

#[test]
fn density_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = pisot(&[
        "density",
        "--polynomial",
        "x^2-x-1",
        "--theta",
        "x^2 + 2x - 1 in [0, 1]",
        "--gnuplot",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["pieces"], 4);
    assert!((v["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let pieces = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
    assert_eq!(pieces.lines().next(), Some("lo,hi,height"));
    assert_eq!(pieces.lines().count(), 5);
    let cdf = std::fs::read_to_string(dir.path().join("cdf.dat")).unwrap();
    assert!(cdf.lines().filter(|l| !l.starts_with('#')).all(|l| l.split_whitespace().count() == 2));
}

#[test]
fn exit_codes() {
    let bad = pisot(&["gen", "--polynomial", "x^2 +* 1"]);
    assert_eq!(bad.status.code(), Some(3));
    assert_eq!(json(&bad)["error"], "Parse");

    let rational = pisot(&["density", "--polynomial", "x^2-x-1", "--theta", "1/3"]);
    assert_eq!(rational.status.code(), Some(3));
    assert_eq!(json(&rational)["error"], "DegenerateTheta");

    let exhausted = pisot(&["eta", "--precision-max", "64", "-N", "200", "--theta", "1/3", "--polynomial", "x^2-x-1"]);
    assert_eq!(exhausted.status.code(), Some(4), "{}", String::from_utf8_lossy(&exhausted.stdout));

    let unbounded = pisot(&[
        "verify-main-theorem",
        "--polynomial",
        "x^2-x-1",
        "--generator",
        "linear",
        "--slope",
        "1",
        "--theta",
        "1/3",
        "-N",
        "500",
    ]);
    assert_eq!(unbounded.status.code(), Some(2));
    let v = json(&unbounded);
    assert_eq!(v["verdict"], "INCONCLUSIVE");
    assert!(v["diagnostics"].as_str().unwrap().contains("hypothesis violated"));

    let ok = pisot(&with(&["verify-main-theorem", "-N", "2000", "--theta", "1/3"], LUCAS));
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["cycle_report"]["period"], 3);
}

#[test]
fn reproducible_without_timestamp() {
    let args = with(&["verify-main-theorem", "-N", "3000", "--theta", "x^2 + 2x - 1 in [0, 1]", "--no-timestamp", "--seed", "5"], LUCAS);
    let a = pisot(&args);
    let b = pisot(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["config"]["seed"], 5);
    assert!(v.get("generated_at").is_none());
}

#[test]
fn verify_and_annihilate_share_c() {
    let dir = tempfile::tempdir().unwrap();
    let (v, a) = (dir.path().join("v"), dir.path().join("a"));
    let common = with(&["-N", "2000", "--theta", "x^2 + 2x - 2 in [0, 1]"], LUCAS);
    let out = pisot(&with(&["verify-main-theorem", "--out", v.to_str().unwrap()], &common));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let out = pisot(&with(&["annihilate", "--out", a.to_str().unwrap()], &common));
    assert!(out.status.success());
    let internal = sample_rows(&v.join("c.csv"));
    let direct = sample_rows(&a.join("c.csv"));
    assert_eq!(internal.len(), direct.len());
    for ((k1, x1, e1), (k2, x2, e2)) in internal.iter().zip(&direct) {
        assert_eq!(k1, k2);
        // the CSV rounds to 17 significant digits
        assert!((x1 - x2).abs() <= e1 + e2 + 1e-15 * x1.abs().max(1.0), "k = {k1}: {x1} vs {x2}");
    }
}

#[test]
fn batch_config_with_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("batch.json");
    let batch = serde_json::json!({"experiments": [
        {"name": "third", "polynomial": "x^2 - x - 1", "theta": "1/3",
         "generator": {"kind": "recurrence", "initial": [1, 3]}, "N": 2000},
        {"name": "root2", "polynomial": "x^2 - x - 1", "theta": "x^2 + 2x - 1 in [0, 1]",
         "generator": {"kind": "recurrence", "initial": [1, 1]}, "N": 3000},
    ]});
    std::fs::write(&path, batch.to_string()).unwrap();
    let out_dir = dir.path().join("out");
    let p = path.to_str().unwrap();
    let out = pisot(&["verify-main-theorem", "--config", p, "--jobs", "2", "--no-timestamp", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["config"]["name"], "third");
    assert!(rows.iter().all(|r| r["verdict"] == "CONSISTENT_WITH_THEOREM" && r["schema_version"] == 1));
    assert!(out_dir.join("root2/c.csv").exists());
    let serial = pisot(&["verify-main-theorem", "--config", p, "--jobs", "1", "--no-timestamp"]);
    assert_eq!(serial.stdout, out.stdout);
}

#[test]
fn spectrum_scan_table() {
    let out = pisot(&["spectrum-scan", "--polynomial", "x^2-x-1", "--thetas", "0;1/2;x^2+2x-1 in [0,1]", "-N", "2000"]);
    assert!(out.status.success());
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["limit_set_clusters"].as_u64().unwrap() <= 2);
    assert!(rows[2]["tilde_gamma_discrepancy"].as_f64().unwrap() < 0.02);
    let warn = json(&pisot(&["spectrum-scan", "--polynomial", "x^2-2", "--grid", "2", "-N", "100"]));
    assert_eq!(warn["is_pisot"], false);
    assert_eq!(warn["rows"].as_array().unwrap().len(), 2);
    assert!(warn["warnings"][0].as_str().unwrap().contains("not a Pisot number"));
}
