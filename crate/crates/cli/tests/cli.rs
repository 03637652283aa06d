use std::process::{Command, Output};

fn lcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcover")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn construct_json_shape() {
    let o = lcover(&["construct", "--n", "30", "--ell", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in ["n", "ell", "method", "size", "slopes", "stats"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert_eq!(v["n"], 30);
    assert!(v["size"].as_u64().unwrap() >= 8);
    assert_eq!(v["slopes"].as_array().unwrap().len() as u64, v["size"].as_u64().unwrap());
}

#[test]
fn construct_raw_and_rejections() {
    let o = lcover(&["construct", "--n", "7", "--ell", "6", "--raw"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(!lines.is_empty() && lines.len() <= 2);
    assert_eq!(lcover(&["construct", "--n", "10", "--ell", "0"]).status.code(), Some(2));
    assert_eq!(lcover(&["construct", "--n", "10", "--ell", "10"]).status.code(), Some(2));
    assert_eq!(lcover(&["construct", "--n", "1", "--ell", "0"]).status.code(), Some(2));
    assert_eq!(lcover(&["construct", "--n", "x", "--ell", "3"]).status.code(), Some(2));
}

#[test]
fn randomized_json_is_byte_identical() {
    let args = ["construct", "--n", "5000", "--ell", "120", "--mode", "rand", "--seed", "42", "--json"];
    let a = lcover(&args);
    let b = lcover(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_examples() {
    assert_eq!(lcover(&["verify", "--n", "10", "--ell", "9", "--slopes", "1"]).status.code(), Some(0));
    let o = lcover(&["verify", "--n", "10", "--ell", "3", "--slopes", "1,3,7"]);
    assert_eq!(o.status.code(), Some(3));
    let w = json(&o)["witnesses"].as_array().unwrap().clone();
    assert!(w.contains(&serde_json::json!(5)));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2 three").unwrap();
    assert_eq!(
        lcover(&["verify", "--n", "10", "--ell", "3", "--slopes", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (n, ell, mode) in
        [("30", "5", "det"), ("1001", "40", "rand"), ("4096", "64", "det"), ("2310", "500", "rand")]
    {
        let o = lcover(&["construct", "--n", n, "--ell", ell, "--mode", mode, "--raw"]);
        assert_eq!(o.status.code(), Some(0));
        let file = dir.path().join(format!("{n}-{ell}.txt"));
        std::fs::write(&file, &o.stdout).unwrap();
        let v = lcover(&["verify", "--n", n, "--ell", ell, "--slopes", file.to_str().unwrap()]);
        assert_eq!(v.status.code(), Some(0), "{n} {ell} {mode}");
    }
}

#[test]
fn analyze_examples() {
    assert_eq!(
        json(&lcover(&["analyze", "phi", "--n", "30", "--ell", "5"])),
        serde_json::json!({"phi_rel": 1, "phi": 8})
    );
    assert_eq!(
        json(&lcover(&["analyze", "coverage", "--n", "12", "--ell", "5", "--y", "2"])),
        serde_json::json!({"count": 2})
    );
    assert_eq!(
        json(&lcover(&["analyze", "lowerbound", "--k", "3"])),
        serde_json::json!({"n": 30, "ell": 5, "phi": 8, "certificate": 1})
    );
    let b = json(&lcover(&["analyze", "basis", "--n", "360", "--ell", "50"]));
    assert_eq!(b["n"], 360);
    assert!(b["basis"].as_array().unwrap().contains(&serde_json::json!(1)));
    assert_eq!(
        lcover(&["analyze", "coverage", "--n", "12", "--ell", "5", "--y", "12"]).status.code(),
        Some(2)
    );
    assert_eq!(lcover(&["analyze", "lowerbound", "--k", "0"]).status.code(), Some(2));
}

#[test]
fn bench_csv_columns_and_rerun() {
    let o = lcover(&[
        "bench",
        "--grid",
        "primorial:3;prime:101;ratio:6;ratio:10",
        "--modes",
        "det,rand",
        "--repeat",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,ell,method,size,bound_ratio,wall_time_ms,basis_kind,patch_count,seed"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    // (30,5), (30,3), (101,16), (101,10) times det x1... det rows repeat too
    assert_eq!(rows.len(), 4 * 4);
    for r in &rows {
        assert_eq!(r.len(), 9);
        let ratio: f64 = r[4].parse().unwrap();
        assert!(ratio > 0.0);
        assert_eq!(r[4].split('.').nth(1).unwrap().len(), 6);
        match r[2].as_str() {
            "deterministic" => assert_eq!(r[8], ""),
            "randomized" => assert!(r[8].parse::<u64>().is_ok()),
            m => panic!("unexpected method {m}"),
        }
    }
    // time column aside, a rerun is identical
    let again = stdout(&lcover(&[
        "bench",
        "--grid",
        "primorial:3;prime:101;ratio:6;ratio:10",
        "--modes",
        "det,rand",
        "--repeat",
        "2",
    ]));
    let strip = |t: &str| -> Vec<String> {
        t.lines()
            .map(|l| {
                let mut c: Vec<&str> = l.split(',').collect();
                c[5] = "";
                c.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&text), strip(&again));
    assert_eq!(lcover(&["bench", "--grid", "bogus:1;ratio:2"]).status.code(), Some(2));
}

#[test]
fn oracle_small_scale_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = lcover(&["oracle", "--out", dir.path().to_str().unwrap(), "--scale", "small"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
}
