use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn arpsd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arpsd"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn simulated(dir: &Path) {
    fs::write(
        dir.join("spec.csv"),
        "channel,center_hz,pole_radius,gain\nF8-T4,5,0.98,1\nT4-T6,6,0.98,1\n",
    )
    .unwrap();
    let o = arpsd(
        dir,
        &[
            "simulate", "--spec", "spec.csv", "--seed", "11", "--out", "rec.csv", "--truth", "ann.csv",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_detect_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    simulated(dir.path());
    let o = arpsd(dir.path(), &["detect", "rec.csv", "--out", "report.csv"]);
    assert!(o.status.success());
    let o = arpsd(dir.path(), &["eval", "--pred", "report.csv", "--truth", "ann.csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("TP=2 "), "{text}");
    assert!(text.contains("sensitivity 100.00%"), "{text}");
}

#[test]
fn every_output_file_starts_with_parameter_echo() {
    let dir = tempfile::tempdir().unwrap();
    simulated(dir.path());
    assert!(arpsd(
        dir.path(),
        &["detect", "rec.csv", "--out", "report.csv", "--order", "auto"]
    )
    .status
    .success());
    assert!(
        arpsd(dir.path(), &["psd", "rec.csv", "--channel", "F8-T4", "--out", "psd"])
            .status
            .success()
    );
    for file in ["rec.csv", "ann.csv", "report.csv", "psd/F8-T4.csv"] {
        let text = fs::read_to_string(dir.path().join(file)).unwrap();
        assert!(text.starts_with("# arpsd_version="), "{file}");
    }
    let rec = fs::read_to_string(dir.path().join("rec.csv")).unwrap();
    assert!(rec.contains("# seed=11\n"));
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.contains("# order=auto\n") && report.contains("# k=2\n"));
    let psd = fs::read_to_string(dir.path().join("psd/F8-T4.csv")).unwrap();
    assert!(psd.contains("\nfreq_hz,psd,psd_masked\n"));
}

#[test]
fn fit_all_prints_three_method_columns() {
    let dir = tempfile::tempdir().unwrap();
    simulated(dir.path());
    let o = arpsd(
        dir.path(),
        &[
            "fit",
            "rec.csv",
            "--channel",
            "F8-T4",
            "--method",
            "all",
            "--order",
            "4",
        ],
    );
    assert!(o.status.success());
    let text = stdout(&o);
    let header = text.lines().nth(1).unwrap();
    let cols: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(cols, ["MLE", "Yule-Walker", "Burg"]);
    assert!(text.contains("â(4)") && !text.contains("â(5)"));
    assert!(text.contains("σ̂²ε"));
    // three decimals
    let row = text.lines().find(|l| l.starts_with("â(1)")).unwrap();
    assert!(row
        .split_whitespace()
        .skip(1)
        .all(|c| c.split('.').nth(1).map(str::len) == Some(3)));
}

#[test]
fn order_scan_reports_selection() {
    let dir = tempfile::tempdir().unwrap();
    simulated(dir.path());
    let o = arpsd(
        dir.path(),
        &["order-scan", "rec.csv", "--channel", "Fp2-F8", "--p-max", "6"],
    );
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("AICc"));
    assert!(text.lines().last().unwrap().starts_with("selected p = "));
}

#[test]
fn unknown_flag_fails_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = arpsd(dir.path(), &["detect", "rec.csv", "--out", "r.csv", "--bogus"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn errors_exit_nonzero_without_output() {
    let dir = tempfile::tempdir().unwrap();
    simulated(dir.path());
    let o = arpsd(dir.path(), &["detect", "rec.csv", "--out", "r.csv", "--rho", "1.5"]);
    assert!(!o.status.success());
    assert!(!dir.path().join("r.csv").exists());

    fs::write(dir.path().join("bad.csv"), "a,b\n1,2\n3,x\n").unwrap();
    let o = arpsd(dir.path(), &["detect", "bad.csv", "--out", "r.csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = arpsd(dir.path(), &["fit", "rec.csv", "--channel", "Oz", "--method", "burg"]);
    assert!(!o.status.success());
}
