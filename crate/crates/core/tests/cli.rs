use std::path::Path;
use std::process::{Command, Output};

fn fasthash(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fasthash"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "status {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn synth_train_encode_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&fasthash(
        &["synth", "--n", "300", "--d", "12", "--classes", "3", "--seed", "1",
          "--features-out", "x.fhfm", "--labels-out", "y.txt"],
        d,
    ));
    let stdout = ok(&fasthash(
        &["train", "--features", "x.fhfm", "--labels", "y.txt", "--out", "m.fhsh",
          "--set", "bits=8", "--set", "rounds=10", "--set", "tree_depth=2"],
        d,
    ));
    assert!(stdout.contains("trained 8 bits"), "{stdout}");
    assert_eq!(&std::fs::read(d.join("m.fhsh")).unwrap()[..4], b"FHSH");
    let diag = std::fs::read_to_string(d.join("m.fhsh.bits.csv")).unwrap();
    assert_eq!(diag.lines().count(), 9);

    ok(&fasthash(&["encode", "--model", "m.fhsh", "--features", "x.fhfm", "--out", "c.fhbc"], d));
    assert_eq!(&std::fs::read(d.join("c.fhbc")).unwrap()[..4], b"FHBC");

    let table = ok(&fasthash(
        &["eval", "--db-codes", "c.fhbc", "--query-codes", "c.fhbc", "--labels", "y.txt",
          "--k", "20", "--knn", "5", "--csv", "r.csv", "--method", "demo", "--seed", "1"],
        d,
    ));
    assert!(table.contains("map"), "{table}");
    let csv = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert!(csv.starts_with("metric,value,bits,method,seed\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",8,demo,1")), "{csv}");
}

#[test]
fn infer_bench_writes_one_row_per_method_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    ok(&fasthash(&["infer-bench", "--n", "200", "--seeds", "2", "--csv", "b.csv"], dir.path()));
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "method,seed,objective,normalized_objective,secs");
    assert_eq!(lines.len(), 1 + 2 * 3);
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let missing = fasthash(&["encode", "--model", "nope.fhsh", "--features", "x", "--out", "c"], d);
    assert_eq!(missing.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error["));

    std::fs::write(d.join("bad.cfg"), "bits = zero\n").unwrap();
    let bad = fasthash(&["train", "--features", "x", "--labels", "y", "--config", "bad.cfg", "--out", "m"], d);
    assert_eq!(bad.status.code(), Some(2));

    let unknown = fasthash(&["train", "--features", "x", "--labels", "y", "--set", "colour=blue", "--out", "m"], d);
    assert_eq!(unknown.status.code(), Some(2));
}
