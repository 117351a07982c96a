use std::fs;
use std::process::{Command, Output};

fn entm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entm"))
        .args(args)
        .env_remove("ENTM_SEED")
        .output()
        .expect("spawn entm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and first data row of a CSV with `#` comments, as a field map.
fn first_row(text: &str) -> Vec<(String, String)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    header
        .iter()
        .zip(row)
        .map(|(h, v)| (h.to_string(), v.to_string()))
        .collect()
}

fn field(row: &[(String, String)], name: &str) -> f64 {
    row.iter()
        .find(|(h, _)| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
        .1
        .parse()
        .unwrap()
}

#[test]
fn bell_state_measures_are_all_one() {
    let o = entm(&["measure", "--family", "bell", "2"]);
    assert!(o.status.success());
    let row = first_row(&stdout(&o));
    for m in ["C", "E_F", "N", "E_PPT", "B", "E_R"] {
        assert!((field(&row, m) - 1.0).abs() < 1e-9, "{m}");
    }
}

#[test]
fn horodecki_half() {
    let o = entm(&["measure", "--family", "horodecki", "0.5"]);
    let row = first_row(&stdout(&o));
    assert!((field(&row, "C") - 0.5).abs() < 1e-9);
    assert!((field(&row, "N") - 0.207107).abs() < 1e-6);
    assert!((field(&row, "B")).abs() < 1e-12);
}

#[test]
fn bell_diagonal_without_violation() {
    let o = entm(&["measure", "--family", "belldiag", "0.7", "0.1", "0.1", "0.1"]);
    let row = first_row(&stdout(&o));
    assert!((field(&row, "C") - 0.4).abs() < 1e-9);
    assert!(field(&row, "B").abs() < 1e-12);
}

#[test]
fn metadata_comments_lead_the_csv() {
    let o = entm(&["scan", "--count", "3", "--seed", "9"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("#version: "));
    assert_eq!(lines[1], "#seed: 9");
    assert!(lines[2].starts_with("#config-hash: "));
    assert_eq!(lines[2].len(), "#config-hash: ".len() + 64);
    assert!(lines[3].starts_with("state_id,"));
}

#[test]
fn closest_separable_state_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let css = dir.path().join("css.json");
    let trace = dir.path().join("trace.csv");
    let o = entm(&[
        "ree", "--family", "horodecki", "0.4", "--seed", "3", "--restarts", "2",
        "--dump-css", css.to_str().unwrap(), "--trace", trace.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let row = first_row(&stdout(&o));
    assert!(field(&row, "difference").abs() < 1e-7);

    let m = entm(&["measure", "--file", css.to_str().unwrap()]);
    assert!(m.status.success());
    let mrow = first_row(&stdout(&m));
    assert!(field(&mrow, "N").abs() < 1e-9);
    assert!(field(&mrow, "C").abs() < 1e-9);
    assert!(field(&mrow, "B").abs() < 1e-12);

    let t = fs::read_to_string(&trace).unwrap();
    assert!(t.lines().any(|l| l == "restart,seed,evaluations,best"));
}

#[test]
fn exit_codes() {
    assert_eq!(entm(&["measure", "--family", "bell", "4"]).status.code(), Some(2));
    assert_eq!(entm(&["measure", "--family", "werner", "1", "1.5"]).status.code(), Some(2));
    assert_eq!(entm(&["measure", "--family", "nosuch", "1"]).status.code(), Some(2));
    assert_eq!(entm(&["scan", "--count", "5"]).status.code(), Some(2));
    assert_eq!(entm(&["scan", "--count", "5", "--seed", "1", "--sampler", "induced:0"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"entries": [[1,0],[0,0],[0,0],[0,0]]}"#).unwrap();
    assert_eq!(entm(&["measure", "--file", bad.to_str().unwrap()]).status.code(), Some(2));

    let budget = entm(&["ree", "--family", "hprime", "0.6", "0.2", "--seed", "1", "--restarts", "1", "--budget", "300"]);
    assert_eq!(budget.status.code(), Some(3));
    assert!(first_row(&stdout(&budget)).iter().any(|(h, v)| h == "converged" && v == "false"));

    let missing = entm(&["ordering", "--count", "50", "--sampler", "haar-pure", "--seed", "1", "--no-constructed", "--classes", "1"]);
    assert_eq!(missing.status.code(), Some(4));

    let unwritable = entm(&["crossing", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(unwritable.status.code(), Some(1));
}

#[test]
fn seed_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_entm"))
        .args(["scan", "--count", "2"])
        .env("ENTM_SEED", "17")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "#seed: 17"));
}

#[test]
fn scans_are_byte_identical_across_runs_and_workers() {
    let args = ["scan", "--count", "400", "--seed", "42", "--sampler", "family-mix"];
    let a = entm(&args);
    let b = entm(&args);
    let mut wide = args.to_vec();
    wide.extend(["--workers", "3"]);
    let c = entm(&wide);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let other = entm(&["scan", "--count", "400", "--seed", "43", "--sampler", "family-mix"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn crossing_point() {
    let o = entm(&["crossing", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let n = v["result"]["N_Y"].as_f64().unwrap();
    let e = v["result"]["E_Y"].as_f64().unwrap();
    assert!((n - 0.377).abs() < 1e-3);
    assert!((e - 0.228).abs() < 1e-3);
}

#[test]
fn decay_reports_chains_and_crossings() {
    let o = entm(&["decay", "--points", "31"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 3 * 31);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("most fragile by C: Psi_2"));

    let w = entm(&["decay", "--initial", "werner", "--p", "0.8"]);
    assert!(w.status.success());
    assert!(String::from_utf8_lossy(&w.stderr).contains("changes sign"));
}

#[test]
fn json_output_parses() {
    let o = entm(&["measure", "--family", "tildepsi", "0.3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["measures"]["ree_method"], "analytic");
    assert!(v["meta"]["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn envelope_bins() {
    let o = entm(&["envelope", "--count", "2000", "--seed", "4", "--x", "C", "--y", "N", "--bins", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[0].starts_with("bin_lo,"));
}
