use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fourier-mcmc"))
}

#[test]
fn bad_config_exits_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("bad.kv");
    std::fs::write(&conf, "replicates = 0\n").unwrap();
    for sub in ["mc-compare", "mcmc-cauchy", "cgmy", "diagnose"] {
        let out = bin()
            .args([sub, "--config", conf.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "{sub}");
        assert!(!tmp.path().join("o").exists());
    }
}

#[test]
fn missing_config_file_exits_with_1() {
    let out = bin().args(["diagnose", "--config", "/nonexistent/cfg.kv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_is_an_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn diagnose_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("d.kv");
    std::fs::write(&conf, "# quick probe\nd = 1\nalpha = 2\nmoment_sample = 5000\n").unwrap();
    let dir = tmp.path().join("out");
    let out = bin()
        .args(["diagnose", "--config", conf.to_str().unwrap(), "--seed", "3", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = std::fs::read_to_string(dir.join("reports.txt")).unwrap();
    let parsed = fourier_mcmc::experiments::parse_reports_txt(&reports).unwrap();
    assert!(!parsed.is_empty());
    assert!(std::fs::read_to_string(dir.join("config.kv")).unwrap().contains("seed = 3"));
}
