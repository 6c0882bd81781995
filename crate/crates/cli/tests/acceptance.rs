//! Runs `flowfem verify` twice through the binary and reports one line per
//! acceptance criterion. Criterion 10 additionally requires the two runs to
//! leave byte-identical files behind. Runs without the libtest harness so
//! the report lines always reach the console.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn run_verify(out: &Path) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_flowfem"))
        .args(["verify", "--out"])
        .arg(out)
        .output()
        .expect("binary runs");
    (
        output.status.code().expect("exit code"),
        String::from_utf8(output.stdout).expect("utf-8 output"),
    )
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let (first, second) = (tmp.path().join("first"), tmp.path().join("second"));
    let (code1, _) = run_verify(&first);
    let (code2, _) = run_verify(&second);
    let files1 = read_dir(&first);
    let files2 = read_dir(&second);
    let identical = files1 == files2 && !files1.is_empty();

    let mut reader = csv::Reader::from_reader(files1["verify_report.csv"].as_slice());
    let mut results = Vec::new();
    for record in reader.records() {
        let r = record.unwrap();
        let id: u8 = r[0].parse().unwrap();
        let mut passed = &r[2] == "true";
        let mut measured = r[3].to_owned();
        if id == 10 {
            passed &= identical;
            measured = format!("{measured}; two CLI runs identical: {identical}");
        }
        println!("criterion {id:>2} {}: {} [{}] threshold: {}", if passed { "PASS" } else { "FAIL" }, &r[1], measured, &r[4]);
        results.push((id, passed));
    }

    let ids: Vec<u8> = results.iter().map(|(id, _)| *id).collect();
    let failed: Vec<u8> = results.iter().filter(|(_, p)| !p).map(|(id, _)| *id).collect();
    let complete = ids == (1..=10).collect::<Vec<_>>();
    println!("acceptance: {}/10 passed, verify exit codes {code1} {code2}", 10 - failed.len());
    if !complete || !failed.is_empty() || (code1, code2) != (0, 0) {
        eprintln!("acceptance failed: reported {ids:?}, failing {failed:?}");
        std::process::exit(1);
    }
}
