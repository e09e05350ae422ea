//! End-to-end runs of the `hades` binary: every subcommand, its file
//! artifacts, and its exit codes.

use std::path::Path;
use std::process::{Command, Output};

use hades_core::{io as hio, CekMode, Params};
use tempfile::tempdir;

fn hades(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hades"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = hades(args);
    assert!(
        out.status.success(),
        "hades {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails_with(args: &[&str], code: i32) -> String {
    let out = hades(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "hades {:?}\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn keygen_desk(dir: &Path) {
    ok(&["keygen", "--profile", "desk", "--keys", dir.to_str().unwrap(), "--seed", "9"]);
}

fn write_values(path: &Path, values: &[i64]) {
    let mut text = String::from("value\n");
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn keygen_writes_predicted_sizes_and_is_deterministic() {
    let dir = tempdir().unwrap();
    let keys_a = dir.path().join("a");
    let keys_b = dir.path().join("b");
    std::fs::create_dir_all(&keys_a).unwrap();
    std::fs::create_dir_all(&keys_b).unwrap();

    let params = Params::desk();
    keygen_desk(&keys_a);
    keygen_desk(&keys_b);

    let pk_a = std::fs::read(keys_a.join("pk.hkey")).unwrap();
    let cek_a = std::fs::read(keys_a.join("cek.hkey")).unwrap();
    assert_eq!(pk_a.len(), hio::public_key_len(&params));
    assert_eq!(cek_a.len(), hio::cek_len(&params, CekMode::Gadget));
    assert_eq!(pk_a, std::fs::read(keys_b.join("pk.hkey")).unwrap());
    assert_eq!(cek_a, std::fs::read(keys_b.join("cek.hkey")).unwrap());
    assert!(!keys_a.join("sk.hkey").exists(), "secret key written without opt-in");

    // different seed -> different keys
    let keys_c = dir.path().join("c");
    std::fs::create_dir_all(&keys_c).unwrap();
    ok(&["keygen", "--profile", "desk", "--keys", keys_c.to_str().unwrap(), "--seed", "10"]);
    assert_ne!(pk_a, std::fs::read(keys_c.join("pk.hkey")).unwrap());

    // secret key is opt-in and exactly sized
    ok(&[
        "keygen", "--profile", "desk", "--keys", keys_a.to_str().unwrap(),
        "--seed", "9", "--write-secret-key",
    ]);
    let sk = std::fs::read(keys_a.join("sk.hkey")).unwrap();
    assert_eq!(sk.len(), hio::secret_key_len(&params));

    // missing directory is a usage error, exit 2
    let missing = dir.path().join("nowhere");
    let err = fails_with(
        &["keygen", "--profile", "desk", "--keys", missing.to_str().unwrap()],
        2,
    );
    assert!(err.contains("does not exist"), "{err}");

    // unknown profile
    let err = fails_with(
        &["keygen", "--profile", "mega", "--keys", keys_a.to_str().unwrap()],
        2,
    );
    assert!(err.contains("mega"), "{err}");
}

#[test]
fn synth_datasets_have_exact_row_counts_and_are_deterministic() {
    let dir = tempdir().unwrap();
    for (name, rows) in [("bitcoin", 1_085usize), ("covid19", 340), ("hg38", 34_423), ("all", 35_848)] {
        let path = dir.path().join(format!("{name}.csv"));
        ok(&["synth", "--name", name, "--out", path.to_str().unwrap(), "--seed", "3"]);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), rows + 1, "{name}: header + {rows} rows");
        assert!(text.starts_with("value\n"));
    }
    let again = dir.path().join("again.csv");
    ok(&["synth", "--name", "bitcoin", "--out", again.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(
        std::fs::read(dir.path().join("bitcoin.csv")).unwrap(),
        std::fs::read(&again).unwrap(),
    );
    let err = fails_with(
        &["synth", "--name", "solar", "--out", again.to_str().unwrap()],
        2,
    );
    assert!(err.contains("solar"), "{err}");
}

#[test]
fn encrypt_reports_count_and_writes_exactly_sized_file() {
    let dir = tempdir().unwrap();
    keygen_desk(dir.path());
    let csv = dir.path().join("covid.csv");
    ok(&["synth", "--name", "covid19", "--out", csv.to_str().unwrap()]);

    let cts = dir.path().join("covid.cts");
    let stdout = ok(&[
        "encrypt", "--input", csv.to_str().unwrap(),
        "--keys", dir.path().to_str().unwrap(),
        "--out", cts.to_str().unwrap(),
    ]);
    assert!(stdout.contains("encrypted 340 values"), "{stdout}");
    let params = Params::desk();
    assert_eq!(
        std::fs::metadata(&cts).unwrap().len() as usize,
        hio::ciphertexts_len(&params, 340),
    );

    // same seed -> identical ciphertext file; different seed -> different
    let cts2 = dir.path().join("covid2.cts");
    ok(&[
        "encrypt", "--input", csv.to_str().unwrap(),
        "--keys", dir.path().to_str().unwrap(),
        "--out", cts2.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&cts).unwrap(), std::fs::read(&cts2).unwrap());
    ok(&[
        "encrypt", "--input", csv.to_str().unwrap(),
        "--keys", dir.path().to_str().unwrap(),
        "--out", cts2.to_str().unwrap(), "--seed", "99",
    ]);
    assert_ne!(std::fs::read(&cts).unwrap(), std::fs::read(&cts2).unwrap());

    // empty CSV: error, and no output file is created
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "value\n").unwrap();
    let out_missing = dir.path().join("never.cts");
    let err = fails_with(
        &[
            "encrypt", "--input", empty.to_str().unwrap(),
            "--keys", dir.path().to_str().unwrap(),
            "--out", out_missing.to_str().unwrap(),
        ],
        2,
    );
    assert!(err.contains("no data rows"), "{err}");
    assert!(!out_missing.exists(), "output created despite empty input");

    // unparseable cell reports its row
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "value\n12\nforty\n").unwrap();
    let err = fails_with(
        &[
            "encrypt", "--input", bad.to_str().unwrap(),
            "--keys", dir.path().to_str().unwrap(),
            "--out", out_missing.to_str().unwrap(),
        ],
        2,
    );
    assert!(err.contains("row 3"), "{err}");

    // out-of-range value reports the value
    let big = dir.path().join("big.csv");
    write_values(&big, &[1, 99_999_999_999]);
    let err = fails_with(
        &[
            "encrypt", "--input", big.to_str().unwrap(),
            "--keys", dir.path().to_str().unwrap(),
            "--out", out_missing.to_str().unwrap(),
        ],
        2,
    );
    assert!(err.contains("99999999999"), "{err}");
}

#[test]
fn compare_prints_sign_or_strict_verdict() {
    let dir = tempdir().unwrap();
    keygen_desk(dir.path());
    let csv = dir.path().join("v.csv");
    write_values(&csv, &[5, 3, 5]);

    let cts = dir.path().join("v.cts");
    ok(&[
        "encrypt", "--input", csv.to_str().unwrap(),
        "--keys", dir.path().to_str().unwrap(),
        "--out", cts.to_str().unwrap(),
    ]);
    let keys = dir.path().to_str().unwrap();
    let cts_s = cts.to_str().unwrap();
    assert_eq!(ok(&["compare", "--input", cts_s, "--keys", keys, "0", "1"]).trim(), "1");
    assert_eq!(ok(&["compare", "--input", cts_s, "--keys", keys, "1", "0"]).trim(), "-1");
    assert_eq!(ok(&["compare", "--input", cts_s, "--keys", keys, "0", "2"]).trim(), "0");
    let err = fails_with(&["compare", "--input", cts_s, "--keys", keys, "0", "9"], 2);
    assert!(err.contains("out of range"), "{err}");

    // fae flavor prints strict verdicts
    let fae = dir.path().join("v_fae.cts");
    ok(&[
        "encrypt", "--input", csv.to_str().unwrap(), "--flavor", "fae",
        "--keys", keys, "--out", fae.to_str().unwrap(),
    ]);
    let verdict = ok(&["compare", "--input", fae.to_str().unwrap(), "--keys", keys, "0", "1"]);
    assert_eq!(verdict.trim(), "greater");
    let verdict = ok(&["compare", "--input", fae.to_str().unwrap(), "--keys", keys, "1", "0"]);
    assert_eq!(verdict.trim(), "not-greater");
}

#[test]
fn sort_emits_the_stable_plaintext_permutation() {
    let dir = tempdir().unwrap();
    keygen_desk(dir.path());
    let values = vec![41i64, -7, 1000, 0, 41, -90000, 3, 3];
    let csv = dir.path().join("s.csv");
    write_values(&csv, &values);
    let cts = dir.path().join("s.cts");
    ok(&[
        "encrypt", "--input", csv.to_str().unwrap(),
        "--keys", dir.path().to_str().unwrap(),
        "--out", cts.to_str().unwrap(),
    ]);

    let report_path = dir.path().join("sort.json");
    let stdout = ok(&[
        "sort", "--input", cts.to_str().unwrap(),
        "--keys", dir.path().to_str().unwrap(),
        "--out", report_path.to_str().unwrap(),
    ]);
    assert!(stdout.contains("sorted 8 items"), "{stdout}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let order: Vec<usize> = report["order"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap() as usize)
        .collect();
    let mut expect: Vec<usize> = (0..values.len()).collect();
    expect.sort_by_key(|&i| (values[i], i));
    assert_eq!(order, expect);
    assert!(report["comparisons"].as_u64().unwrap() > 0);

    // without --out the JSON goes to stdout
    let stdout = ok(&[
        "sort", "--input", cts.to_str().unwrap(),
        "--keys", dir.path().to_str().unwrap(),
    ]);
    let inline: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(inline["order"], report["order"]);
}

#[test]
fn range_query_matches_plaintext_filter() {
    let dir = tempdir().unwrap();
    keygen_desk(dir.path());
    let values = vec![15i64, -4, 22, 9, 22, 40, -100, 31];
    let csv = dir.path().join("r.csv");
    write_values(&csv, &values);
    let cts = dir.path().join("r.cts");
    ok(&[
        "encrypt", "--input", csv.to_str().unwrap(),
        "--keys", dir.path().to_str().unwrap(),
        "--out", cts.to_str().unwrap(),
    ]);
    let keys = dir.path().to_str().unwrap();
    let cts_s = cts.to_str().unwrap();

    let query = |lo: i64, hi: i64| -> Vec<usize> {
        let stdout = ok(&[
            "range", "--input", cts_s, "--keys", keys,
            "--lower", &lo.to_string(), "--upper", &hi.to_string(),
        ]);
        let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        v["indices"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect()
    };

    // bounds equal to data points: endpoints included under basic flavor
    let expect: Vec<usize> =
        (0..values.len()).filter(|&i| (9..=22).contains(&values[i])).collect();
    assert_eq!(query(9, 22), expect);
    assert_eq!(query(23, 9), Vec::<usize>::new(), "inverted bounds");
    assert_eq!(query(-100_000, 100_000), (0..values.len()).collect::<Vec<_>>());
}

#[test]
fn bench_reports_exactly_the_five_operations() {
    let dir = tempdir().unwrap();
    let json_path = dir.path().join("b.json");
    let stdout = ok(&[
        "bench", "--profile", "desk", "--count", "3", "--repeats", "1",
        "--seed", "5", "--out", json_path.to_str().unwrap(),
    ]);
    assert!(stdout.contains("CmpFAE"), "{stdout}");

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let rows = report.as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["operation"].as_str().unwrap()).collect();
    assert_eq!(names, ["KeyGen", "EncBasic", "EncFAE", "CmpBasic", "CmpFAE"]);
    for row in rows {
        let count = row["count"].as_u64().unwrap();
        let total = row["total_ms"].as_f64().unwrap();
        let mean = row["mean_ms"].as_f64().unwrap();
        assert!(count >= 1);
        assert!((mean - total / count as f64).abs() < 1e-9);
    }

    let csv_path = dir.path().join("b.csv");
    ok(&[
        "bench", "--profile", "desk", "--count", "3", "--repeats", "1",
        "--out", csv_path.to_str().unwrap(),
    ]);
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.records().count(), 5);

    fails_with(
        &["bench", "--profile", "desk", "--count", "3", "--repeats", "1",
          "--out", dir.path().join("b.txt").to_str().unwrap()],
        2,
    );
}

#[test]
fn fa_test_passes_on_fae_and_rejects_basic() {
    let dir = tempdir().unwrap();
    keygen_desk(dir.path());
    let keys = dir.path().to_str().unwrap();
    let hist = dir.path().join("hist.csv");

    let out = hades(&[
        "fa-test", "--keys", keys, "--encryptions", "100", "--pairs", "600",
        "--histogram", hist.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("rate"), "{stdout}");
    assert!(stdout.contains("distinct ciphertexts: 100/100"), "{stdout}");
    let hist_text = std::fs::read_to_string(&hist).unwrap();
    assert!(hist_text.starts_with("bucket_lo,bucket_hi,count"), "{hist_text}");
    assert!(hist_text.lines().count() > 1);

    let err = fails_with(&["fa-test", "--keys", keys, "--flavor", "basic"], 2);
    assert!(err.contains("fae"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    // clap: unknown subcommand and missing required flag
    assert_eq!(hades(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hades(&["encrypt"]).status.code(), Some(2));
    // io: nonexistent key dir for encrypt
    let dir = tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    write_values(&csv, &[1]);
    let err = fails_with(
        &[
            "encrypt", "--input", csv.to_str().unwrap(),
            "--keys", dir.path().join("nokeys").to_str().unwrap(),
            "--out", dir.path().join("x.cts").to_str().unwrap(),
        ],
        2,
    );
    assert!(err.contains("pk.hkey"), "{err}");
}
