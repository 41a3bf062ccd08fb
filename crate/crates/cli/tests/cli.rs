//! End-to-end runs of the binary.

use std::process::{Command, Output};

fn fblmimo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fblmimo")).args(args).output().expect("run fblmimo")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and rows, preamble dropped.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(|h| h.split(" (").next().unwrap().to_string()).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

fn get(header: &[String], row: &[String], name: &str) -> f64 {
    row[header.iter().position(|h| h == name).unwrap()].parse().unwrap()
}

#[test]
fn figure_output_ignores_worker_count() {
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_fblmimo"))
            .args(["figure", "--id", "8", "--seed", "7", "--workers", w, "--out", "fig8.csv"])
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(o.status.success());
        assert!(stdout(&o).contains("40 rows"));
        assert!(dir.path().join("fig8.gp").exists());
        outputs.push(std::fs::read_to_string(dir.path().join("fig8.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(outputs[0].contains("# out=fig8.csv\n"));
    let o = stdout(&fblmimo(&["figure", "--id", "8", "--seed", "7"]));
    assert_eq!(o.replace("# out=none\n", ""), outputs[0].replace("# out=fig8.csv\n", ""));
}

#[test]
fn fourfold_latency_reduction() {
    let td = stdout(&fblmimo(&["compare", "--tx", "4", "--rx", "4", "--blocklength", "200"]));
    let st = stdout(&fblmimo(&["compare", "--tx", "4", "--rx", "4", "--blocklength", "50"]));
    let (h, td) = table(&td);
    let (_, st) = table(&st);
    let (a, b) = (get(&h, &td[0], "eps_td"), get(&h, &st[0], "eps_st"));
    assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} {b}");

    let ex = stdout(&fblmimo(&["exchange", "--tx", "4", "--rx", "4", "--match-td", "200"]));
    let (h, rows) = table(&ex);
    assert_eq!(get(&h, &rows[0], "value"), 50.0);
}

#[test]
fn wishart_check_reports_divergence() {
    let o = fblmimo(&["wishart-check", "--tx", "3", "--rx", "3", "--trials", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverges"));
    let (h, rows) = table(&stdout(&o));
    assert_eq!(get(&h, &rows[0], "divergent"), 1.0);

    let o = fblmimo(&["wishart-check", "--sweep", "tx:4:6:3", "--rx", "2", "--trials", "20000", "--seed", "4"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(get(&h, r, "z") < 4.0);
    }
}

#[test]
fn infeasible_sweep_exits_nonzero() {
    let o = fblmimo(&["bounds", "--epsilon", "1e-9", "--sweep", "n:10:40:4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
    let (h, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| get(&h, r, "converse_feasible") == 0.0));
}

#[test]
fn bad_input_is_rejected() {
    let o = fblmimo(&["bounds", "--sweep", "n:10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fblmimo(&["bounds", "--epsilon", "1.5"]);
    assert!(!o.status.success());
    let o = fblmimo(&["compare", "--out", "/nonexistent/dir/x.csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn config_file_defaults_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# 2x2 at 5 dB\ntx = 2\nrx = 2\nsnr_db = 5\nseed = 9\n").unwrap();
    let o = fblmimo(&["bounds", "--config", cfg.to_str().unwrap(), "--rx", "3"]);
    assert!(o.status.success() || o.status.code() == Some(2));
    let s = stdout(&o);
    for line in ["# tx=2", "# rx=3", "# snr_db=5", "# seed=9", "# command=bounds"] {
        assert!(s.lines().any(|l| l == line), "missing {line}");
    }
}

#[test]
fn ergodic_matches_high_snr_for_many_transmit_antennas() {
    // L ≫ N makes the eigen-gains concentrate near L, where the closed
    // forms are tight
    let o = fblmimo(&["ergodic", "--tx", "64", "--rx", "4", "--snr-db", "30", "--trials", "2000", "--epsilon", "1e-7"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    let r = &rows[0];
    for (mc, closed) in [("rate_st_mc", "rate_st_high_snr"), ("rate_td_mc", "rate_td_high_snr")] {
        let (a, b) = (get(&h, r, mc), get(&h, r, closed));
        assert!((a - b).abs() / b < 0.02, "{mc} {a} vs {b}");
    }
}
