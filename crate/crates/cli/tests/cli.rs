use std::path::Path;
use std::process::{Command, Output};

fn flowfem(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowfem"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn reruns_are_byte_identical_and_carry_the_config_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[physics]\npe = 30.0\n[solve]\nmode = \"bx\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    for cmd in ["solve1d", "sweep-error", "poles"] {
        let a = tmp.path().join(format!("{cmd}-a"));
        let b = tmp.path().join(format!("{cmd}-b"));
        assert_eq!(code(&flowfem(&[cmd, "--config", cfg, "--plot"], &a)), 0);
        assert_eq!(code(&flowfem(&[cmd, "--config", cfg, "--plot"], &b)), 0);
        let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(names.len() >= 2, "{cmd}: {names:?}");
        let mut hash = None;
        for n in names {
            let x = std::fs::read(a.join(&n)).unwrap();
            assert_eq!(x, std::fs::read(b.join(&n)).unwrap(), "{cmd}: {n:?}");
            let text = String::from_utf8(x).unwrap();
            if n.to_string_lossy().ends_with(".meta.json") {
                let meta: serde_json::Value = serde_json::from_str(&text).unwrap();
                let h = meta["config_hash"].as_str().unwrap().to_owned();
                assert_eq!(h.len(), 64);
                hash = Some(h);
            }
        }
        let svg = std::fs::read_dir(&a)
            .unwrap()
            .map(|e| e.unwrap().path())
            .find(|p| p.extension().is_some_and(|e| e == "svg"));
        if let (Some(svg), Some(h)) = (svg, hash) {
            assert!(std::fs::read_to_string(svg).unwrap().contains(&h));
        }
    }
}

#[test]
fn flags_override_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[physics]\npe = 30.0\n").unwrap();
    let out = tmp.path().join("o");
    let o = flowfem(&["solve1d", "--config", cfg.to_str().unwrap(), "--pe", "3000", "--order", "2"], &out);
    assert_eq!(code(&o), 0);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("solve1d.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["summary"]["pe"].as_f64(), Some(3000.0));
    assert_eq!(meta["summary"]["order"].as_u64(), Some(2));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[mesh]\ndz = \"coarse\"\n").unwrap();
    let o = flowfem(&["solve1d", "--config", bad.to_str().unwrap()], &out);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(code(&flowfem(&["solve1d", "--dz", "0.3"], &out)), 2);
    assert_eq!(code(&flowfem(&["solve1d", "--order", "3"], &out)), 2);
    assert_eq!(code(&flowfem(&["poles", "--config", "/nonexistent/run.toml"], &out)), 2);
    assert!(!out.exists());
}

#[test]
fn unit_peclet_rows_are_flagged_not_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(code(&flowfem(&["poles"], &out)), 0);
    let text = std::fs::read_to_string(out.join("poles.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("1.0,") && l.contains("singular")).count(), 2);
}

#[test]
fn perturbed_stencil_fails_the_oracle_criteria() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = flowfem(&["verify", "--perturb-stencil", "1e-6"], &out);
    assert_eq!(code(&o), 1);
    let report = std::fs::read_to_string(out.join("verify_report.csv")).unwrap();
    let failed: Vec<&str> = report
        .lines()
        .skip(1)
        .filter(|l| l.contains(",false,"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(failed, ["1", "2"]);
}
