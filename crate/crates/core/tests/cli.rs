use std::path::Path;
use std::process::{Command, Output};

use ffc_core::io::{self, RunManifest};

fn ffc(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ffc"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("FFC_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn bound_prints_exact_and_decimal() {
    let o = ffc(&["bound", "--m", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2*sqrt(2)\n2.82842712474619\n");
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.json",
        r#"{"version": 1, "mode": "bipartite", "d": 2, "m": 3, "perms": [[0, 1], [1, 0], [0, 1]]}"#,
    );
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"version": 1, "mode": "bipartite", "d": 2, "m": 3, "perms": [[0, 1], [0, 1], [0, 1]]}"#,
    );
    let cert = dir.path().join("cert.json");
    let o = ffc(&["certify", &good, "--out", cert.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("strictly-ramanujan"));

    // A certificate file is re-verified rather than recomputed from scratch.
    let o = ffc(&["certify", cert.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified"));

    let o = ffc(&["certify", &bad], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not-ramanujan"));

    // A tampered verdict no longer matches the embedded graph.
    let text = std::fs::read_to_string(&cert).unwrap().replace("strictly-ramanujan", "not-ramanujan");
    let forged = write(dir.path(), "forged.json", &text);
    assert_eq!(ffc(&["certify", &forged], None).status.code(), Some(1));
}

#[test]
fn malformed_input_is_a_usage_error_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"version\": 1,\n \"mode\": }");
    let o = ffc(&["certify", &broken], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");

    let not_perm = write(
        dir.path(),
        "np.json",
        r#"{"version": 1, "mode": "bipartite", "d": 2, "m": 2, "perms": [[0, 0], [1, 0]]}"#,
    );
    assert_eq!(ffc(&["certify", &not_perm], None).status.code(), Some(2));

    let future = write(
        dir.path(),
        "v2.json",
        r#"{"version": 2, "mode": "bipartite", "d": 2, "m": 1, "perms": [[0, 1]]}"#,
    );
    let o = ffc(&["certify", &future], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("version 2"));

    assert_eq!(ffc(&["nonsense"], None).status.code(), Some(2));
    assert_eq!(ffc(&["bound"], None).status.code(), Some(2));
}

#[test]
fn budget_errors_exit_three() {
    let o = ffc(&["descend", "--d", "5", "--m", "3", "--strategy", "exact"], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sampled"));
}

#[test]
fn convolve_files() {
    let dir = tempfile::tempdir().unwrap();
    // (x-1)(x-3) and x^2 - 1
    let p = write(dir.path(), "p.json", r#"{"coeffs": ["3", "-4", "1"]}"#);
    let q = write(dir.path(), "q.json", r#"{"coeffs": ["-1", "0", "1"]}"#);
    let o = ffc(&["convolve", "--kind", "sym", "--d", "2", &p, &q], None);
    assert_eq!(o.status.code(), Some(0));
    let r = io::poly_from_json(&stdout(&o)).unwrap();
    // Coefficients add in the signed basis with weight (d-i)!(d-j)!/(d!(d-i-j)!).
    assert_eq!(r, ffc_core::RatPoly::from_i64(&[2, -4, 1]));
}

#[test]
fn search_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("cert{threads}.json"));
        let man = dir.path().join(format!("man{threads}.json"));
        let o = ffc(
            &[
                "--manifest",
                man.to_str().unwrap(),
                "search",
                "--mode",
                "bipartite",
                "--d",
                "5",
                "--m",
                "3",
                "--max-trials",
                "500",
                "--seed",
                "11",
                "--out",
                out.to_str().unwrap(),
            ],
            Some(threads),
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&man).unwrap()).unwrap();
        assert_eq!(m.seed, Some(11));
        assert_eq!(m.threads, threads.parse::<usize>().unwrap());
        let bytes = std::fs::read(&out).unwrap();
        assert_eq!(m.outputs[0].sha256, io::sha256_hex(&bytes));
        digests.push(m.outputs.iter().map(|d| d.sha256.clone()).collect::<Vec<_>>());
    }
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn table_formats_agree() {
    let tsv = ffc(&["table", "--m", "3..4", "--d", "4..6:2", "--mode", "asym"], None);
    assert_eq!(tsv.status.code(), Some(0));
    let rows: Vec<String> = stdout(&tsv).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 4);
    let json = ffc(&["table", "--m", "3..4", "--d", "4..6:2", "--mode", "asym", "--format", "json"], None);
    let docs: Vec<serde_json::Value> = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(docs.len(), 4);
    for (row, doc) in rows.iter().zip(&docs) {
        let cols: Vec<&str> = row.split('\t').collect();
        assert_eq!(cols[0], doc["m"].to_string());
        assert_eq!(cols[1], doc["d"].to_string());
        assert_eq!(cols[3], doc["bound"].as_str().unwrap());
        assert_eq!(cols[7], "true");
    }
    // Symmetric ranges keep even degrees only.
    let sym = ffc(&["table", "--m", "3", "--d", "4..7", "--mode", "sym"], None);
    assert_eq!(stdout(&sym).lines().count(), 3);
}

#[test]
fn expected_and_verify_commands() {
    let o = ffc(&["expected", "--mode", "bipartite", "--d", "3", "--m", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["real_rooted"], true);
    assert_eq!(v["poly"]["coeffs"].as_array().unwrap().len(), 7);

    for args in [
        &["verify", "quadrature", "--d", "3", "--trials", "3", "--seed", "5"][..],
        &["verify", "quadrature", "--bipartite", "--d", "3", "--trials", "2", "--seed", "5"],
        &["verify", "fourier", "--d", "4", "--trials", "3", "--seed", "5"],
        &["verify", "swapreal", "--d", "4", "--trials", "3", "--swaps", "6", "--seed", "5"],
    ] {
        let o = ffc(args, None);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!stdout(&o).is_empty());
    }
}

#[test]
fn descend_and_sample() {
    let o = ffc(&["descend", "--d", "2", "--m", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "strictly-ramanujan");
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);

    let a = ffc(&["sample", "--mode", "plain", "--d", "6", "--m", "3", "--seed", "9"], None);
    let b = ffc(&["sample", "--mode", "plain", "--d", "6", "--m", "3", "--seed", "9"], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    io::graph_from_json(&stdout(&a)).unwrap();
}
