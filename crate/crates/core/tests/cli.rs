use std::process::{Command, Output};

use serde_json::Value;

fn codebook(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codebook"))
        .args(args)
        .output()
        .expect("run codebook binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const Q4_HAT: [&str; 8] = ["--p", "2", "--m", "2", "--ext", "1,2", "--variant", "hat"];

#[test]
fn table_one_rows() {
    let o = codebook(&[
        "table",
        "--variant",
        "hat",
        "--q-list",
        "4,5,7,9",
        "--ext",
        "1,2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let expected = [
        ("61", "16", "0.363636", "0.216506", "0.595392"),
        ("121", "25", "0.263158", "0.178885", "0.679765"),
        ("337", "49", "0.170732", "0.132260", "0.774666"),
        ("721", "81", "0.126761", "0.104757", "0.826413"),
    ];
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for (row, (n, k, imax, welch, ratio)) in rows.iter().zip(expected) {
        assert_eq!(&row[1..6], &[n, k, imax, welch, ratio]);
        assert_eq!(row[6], "measured");
    }
}

#[test]
fn table_json_and_error_rows() {
    let o = codebook(&[
        "table",
        "--variant",
        "tilde",
        "--q-list",
        "4,6",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let rows: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["N"], 56);
    assert_eq!(rows[0]["K"], 11);
    assert_eq!(rows[1]["error"], "6 is not a prime power");
    assert!(String::from_utf8_lossy(&o.stderr).contains("6 is not a prime power"));
}

#[test]
fn verify_exit_codes() {
    let mut args = vec!["verify"];
    args.extend(Q4_HAT);
    let o = codebook(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("45/45 character tuples pass; I_max measured 0.363636 = predicted"));

    let o = codebook(&["verify", "--p", "4", "--m", "1", "--ext", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must be prime"));

    let o = codebook(&[
        "verify", "--p", "3", "--m", "1", "--ext", "2", "--tol", "-1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_q3_magnitudes() {
    let o = codebook(&[
        "verify", "--p", "3", "--m", "1", "--ext", "2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = doc["characters"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 8);
    for r in reports {
        let v = &r["hat"]["value"];
        let magnitude = v[0].as_f64().unwrap().hypot(v[1].as_f64().unwrap());
        let allowed = [3.0, 1.0, 3f64.sqrt()];
        assert!(
            allowed.iter().any(|x| (magnitude - x).abs() < 1e-9),
            "{magnitude}"
        );
    }
    assert!(doc["codebook"]["predicted"].is_null());
}

#[test]
fn gen_json_round_trip_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q4.json");
    let path = path.to_str().unwrap();
    let mut args = vec!["gen", "--out", path];
    args.extend(Q4_HAT);
    assert!(codebook(&args).status.success());
    let first = std::fs::read(path).unwrap();
    assert!(codebook(&args).status.success());
    assert_eq!(first, std::fs::read(path).unwrap());

    let doc: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!((doc["p"].as_u64(), doc["m"].as_u64()), (Some(2), Some(2)));
    assert_eq!(doc["variant"], "hat");
    assert_eq!(doc["a"], 1);
    assert_eq!((doc["N"].as_u64(), doc["K"].as_u64()), (Some(61), Some(16)));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 61);
    for row in rows {
        let entries = row.as_array().unwrap();
        assert_eq!(entries.len(), 16);
        let norm: f64 = entries
            .iter()
            .map(|z| z[0].as_f64().unwrap().powi(2) + z[1].as_f64().unwrap().powi(2))
            .sum();
        assert!((norm.sqrt() - 1.0).abs() <= 1e-12);
    }
    for (i, row) in rows[45..].iter().enumerate() {
        for (j, z) in row.as_array().unwrap().iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert_eq!(
                (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()),
                (expected, 0.0)
            );
        }
    }
}

#[test]
fn gen_csv_matches_json() {
    let mut json_args = vec!["gen", "--format", "json"];
    json_args.extend(Q4_HAT);
    let mut csv_args = vec!["gen", "--format", "csv"];
    csv_args.extend(Q4_HAT);
    let doc: Value = serde_json::from_slice(&codebook(&json_args).stdout).unwrap();
    let csv = stdout(&codebook(&csv_args));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("row,col,re,im"));
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (i, j): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let z = &doc["rows"][i][j];
        assert_eq!(f[2].parse::<f64>().unwrap(), z[0].as_f64().unwrap());
        assert_eq!(f[3].parse::<f64>().unwrap(), z[1].as_f64().unwrap());
        count += 1;
    }
    assert_eq!(count, 61 * 16);
}

#[test]
fn gen_failures() {
    let mut args = vec!["gen", "--out", "/nonexistent-dir/cb.json"];
    args.extend(Q4_HAT);
    let o = codebook(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot write"));

    let mut args = vec!["gen", "--format", "text"];
    args.extend(Q4_HAT);
    assert_eq!(codebook(&args).status.code(), Some(2));
}

#[test]
fn bounds_lines() {
    let o = codebook(&["bounds", "61", "16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("I_W = 0.216506"));
    assert!(text.contains("not applicable (N ≤ K²)"));
    let text = stdout(&codebook(&["bounds", "89", "9"]));
    assert!(text.contains("I_L complex = 0.331662"));
    let o = codebook(&["bounds", "4", "9"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("I_W not applicable"));
}

#[test]
fn scan_thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_codebook"))
            .args(["table", "--q-list", "5", "--variant", "tilde"])
            .env("CODEBOOK_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("0"));
}
