use std::path::Path;
use std::process::{Command, Output};

fn vpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpa"))
        .args(args)
        .output()
        .expect("vpa runs")
}

fn read_rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn sigma_scan_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sigma.csv");
    let o = vpa(&[
        "sigma-scan",
        "--nu-min",
        "0.01",
        "--nu-max",
        "5",
        "--points",
        "200",
        "--log",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_rows(&out);
    assert_eq!(header, "nu_over_omega,sigma1,sigma2,sigma3,total,err");
    assert_eq!(rows.len(), 200);
    assert!((rows[0][0] - 0.01).abs() < 1e-15 && (rows[199][0] - 5.0).abs() < 1e-12);
    assert!(!std::fs::read_to_string(&out).unwrap().contains('\r'));
}

#[test]
fn plate_scan_peaks_at_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plate.csv");
    let o = vpa(&[
        "plate-scan",
        "--omega-m",
        "2",
        "--xi",
        "0.01",
        "--a",
        "1",
        "--nu-min",
        "2.5",
        "--nu-max",
        "3.5",
        "--points",
        "201",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (header, rows) = read_rows(&out);
    assert!(header.starts_with("nu_tilde,nu,m_parallel,m_perp"));
    for col in [2, 3] {
        let peak = rows
            .iter()
            .max_by(|a, b| a[col].abs().total_cmp(&b[col].abs()))
            .unwrap();
        assert!((peak[0] - 3.0).abs() <= 0.005 + 1e-12, "column {col}: {}", peak[0]);
    }
}

#[test]
fn friction_scan_strictly_decreasing() {
    let o = vpa(&[
        "friction-scan",
        "--a-min",
        "0.5",
        "--a-max",
        "4",
        "--points",
        "12",
        "--u",
        "0.6",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rates: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rates.len(), 12);
    assert!(rates.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["mp-scan", "sigma-scan", "friction-scan", "plate-scan", "far-limit"] {
        let files: Vec<_> = ["1", "4"]
            .iter()
            .map(|t| {
                let p = dir.path().join(format!("{cmd}-{t}.csv"));
                let o = vpa(&["--threads", t, cmd, "--points", "40", "--output", p.to_str().unwrap()]);
                assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
                std::fs::read(p).unwrap()
            })
            .collect();
        assert_eq!(files[0], files[1], "{cmd}");
    }
}

#[test]
fn json_output() {
    let o = vpa(&["far-limit", "--points", "3", "--format", "json"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\"columns\"") && text.contains("\"m_parallel_far\""));
}

#[test]
fn exit_codes() {
    assert_eq!(vpa(&["mp-scan", "--points", "1"]).status.code(), Some(2));
    assert_eq!(vpa(&["sigma-scan", "--nu-min", "0", "--log"]).status.code(), Some(2));
    assert_eq!(vpa(&["friction-scan", "--u", "1.5"]).status.code(), Some(2));
    let missing = vpa(&["mp-scan", "--output", "/nonexistent-dir/out.csv"]);
    assert_eq!(missing.status.code(), Some(4));
    let missing = vpa(&["acceptance", "--output", "/nonexistent-dir/report.csv"]);
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn acceptance_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = vpa(&["acceptance", "--output", out.to_str().unwrap()]);
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.starts_with("criterion")).count(), 15);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("criterion,name,status,"));
    let failing: std::collections::BTreeSet<&str> = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(2) == Some("FAIL"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    // the two criteria that do not hold; see the acceptance tests in the core crate
    assert_eq!(failing.into_iter().collect::<Vec<_>>(), ["12", "7"]);
    assert_eq!(o.status.code(), Some(1));
}
