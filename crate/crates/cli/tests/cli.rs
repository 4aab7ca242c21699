use std::process::{Command, Output};

fn freeqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeqm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn vacuum_characteristic_function_row() {
    let o = freeqm(&["char", "--generator", "p", "--t", "1.0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,re,im"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 0.5767248077568734).abs() < 1e-15);
    assert_eq!(row[2], 0.0);
}

#[test]
fn evolution_at_zero_is_the_source_vector() {
    let o = freeqm(&["evolve", "--generator", "p", "--k", "0", "--t", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"][0]["l"], 0);
    assert_eq!(v["rows"][0]["re"], 1.0);
    assert_eq!(v["rows"][0]["im"], 0.0);
    assert_eq!(v["residuals"]["norm_defect"], 0.0);
    assert_eq!(v["config_echo"]["command"], "evolve");
}

#[test]
fn json_schema_has_three_sections() {
    let o = freeqm(&["coeffs", "--generator", "p2", "--t", "0.4", "--m-max", "2", "--n-max", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let obj = v.as_object().unwrap();
    assert_eq!(obj.len(), 3);
    assert!(obj.contains_key("config_echo") && obj.contains_key("rows") && obj.contains_key("residuals"));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for r in rows {
        let m = r["m"].as_u64().unwrap();
        let n = r["n"].as_u64().unwrap();
        if (m + n) % 2 == 1 {
            assert_eq!(r["re"], 0.0);
            assert_eq!(r["im"], 0.0);
        }
    }
}

#[test]
fn csv_headers() {
    for (args, header) in [
        (vec!["coeffs", "--t", "0.5"], "m,n,t,re,im,method_agreement"),
        (vec!["evolve", "--t", "0.5"], "l,re,im"),
        (vec!["heisenberg", "--t", "0.3", "--m-max", "1", "--n-max", "1"], "t,m,n,re,im"),
        (vec!["table"], "n,x,hilbert_pv,t_next,residual"),
        (vec!["table", "--which", "catalan"], "n,catalan,x_moment,p_moment"),
    ] {
        let o = freeqm(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert_eq!(stdout(&o).lines().next(), Some(header));
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["evolve", "--generator", "x", "--k", "2", "--t", "0.7,1.3"];
    assert_eq!(freeqm(&args).stdout, freeqm(&args).stdout);
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["evolve", "--t", "1", "--tol", "-1"],
        vec!["evolve", "--t", "1", "--k", "5", "--l-max", "2"],
        vec!["evolve"],
        vec!["coeffs", "--generator", "h1", "--t", "1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(freeqm(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn computation_errors_exit_with_one() {
    // the requested level range cannot hold the evolved state
    let o = freeqm(&["evolve", "--t", "3", "--l-max", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation"));
}

#[test]
fn verification_passes_and_fails_with_the_right_code() {
    let ok = freeqm(&["verify", "--tol", "1e-8"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).lines().skip(1).filter(|l| !l.starts_with('#')).all(|l| l.ends_with("true")));
    // an unreachable tolerance must fail and name the identity
    let bad = freeqm(&["verify", "--tol", "1e-300"]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("FAIL [") && err.contains("residual"));
}

#[test]
fn harmonic_oscillator_phase() {
    let o = freeqm(&["char", "--generator", "h1", "--k", "3", "--t", "0.5", "--omega", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let re = v["rows"][0]["re"].as_f64().unwrap();
    let im = v["rows"][0]["im"].as_f64().unwrap();
    assert!((re - 2f64.cos()).abs() < 1e-15 && (im - 2f64.sin()).abs() < 1e-15);
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("freeqm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.csv");
    let o = freeqm(&["char", "--t", "0,2", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    std::fs::remove_dir_all(&dir).unwrap();
}
