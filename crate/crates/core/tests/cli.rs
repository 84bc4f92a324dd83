//! End-to-end runs of the `qkd-thermal` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_qkd-thermal");
const HEADER: &str = "t_ns,lambda,quantity,analytic,empirical,std_error,shots";

fn run(args: &[&str], threads: usize) -> Output {
    Command::new(BIN)
        .args(args)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .output()
        .expect("spawn binary")
}

struct Row {
    t: f64,
    lambda: f64,
    quantity: String,
    analytic: f64,
}

fn parse_csv(text: &str) -> Vec<Row> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 7, "{l}");
            for x in [f[0], f[1], f[3], f[4], f[5]] {
                assert!(x.parse::<f64>().unwrap().is_finite(), "{l}");
            }
            f[6].parse::<usize>().unwrap();
            Row {
                t: f[0].parse().unwrap(),
                lambda: f[1].parse().unwrap(),
                quantity: f[2].into(),
                analytic: f[3].parse().unwrap(),
            }
        })
        .collect()
}

fn sweep_csv(dir: &Path, protocol: &str, threads: usize) -> String {
    let out = dir.join(format!("{protocol}-{threads}.csv"));
    let o = run(
        &[
            "sweep",
            "--protocol",
            protocol,
            "--t1",
            "188610",
            "--t-end",
            "943050",
            "--steps",
            "12",
            "--shots",
            "5000",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
            "-q",
        ],
        threads,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    fs::read_to_string(out).unwrap()
}

fn success_column(rows: &[Row]) -> Vec<(f64, f64, f64)> {
    rows.iter()
        .filter(|r| r.quantity == "success")
        .map(|r| (r.t, r.lambda, r.analytic))
        .collect()
}

#[test]
fn bb84_sweep_analytic_column_follows_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let rows = parse_csv(&sweep_csv(dir.path(), "bb84_zx", 2));
    let success = success_column(&rows);
    assert_eq!(success.len(), 12);
    for (t, l, a) in success {
        assert!((l - (1.0 - (-t / 188_610.0f64).exp())).abs() < 1e-12);
        let e = 1.0 - l;
        assert!((a - 0.25 * (2.0 + e + e.sqrt())).abs() < 1e-15);
    }
}

#[test]
fn psi_plus_sweep_success_is_survival() {
    let dir = tempfile::tempdir().unwrap();
    for (_, l, a) in success_column(&parse_csv(&sweep_csv(dir.path(), "e91_psiplus", 2))) {
        assert!((a - (1.0 - l)).abs() < 1e-15);
    }
}

#[test]
fn xy_sweep_dominates_zx_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let zx: BTreeMap<String, f64> =
        success_column(&parse_csv(&sweep_csv(dir.path(), "bb84_zx", 2)))
            .into_iter()
            .map(|(t, _, a)| (t.to_string(), a))
            .collect();
    let xy = success_column(&parse_csv(&sweep_csv(dir.path(), "bb84_xy", 2)));
    for (t, _, a) in xy {
        let z = zx[&t.to_string()];
        if t > 0.0 {
            assert!(a > z, "t = {t}");
        } else {
            assert_eq!(a, z);
        }
    }
}

#[test]
fn sweep_csv_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    for p in [
        "bb84_zx",
        "bb84_xy",
        "e91_phiplus",
        "e91_psiplus",
        "chsh_psiminus",
    ] {
        assert_eq!(
            sweep_csv(dir.path(), p, 1),
            sweep_csv(dir.path(), p, 4),
            "{p}"
        );
    }
}

#[test]
fn eve_and_chsh_csv_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let eve = |threads| {
        let out = dir.path().join(format!("eve-{threads}.csv"));
        let o = run(
            &[
                "eve",
                "--variant",
                "xy",
                "--steps",
                "5",
                "--shots",
                "3000",
                "--out",
                out.to_str().unwrap(),
            ],
            threads,
        );
        assert_eq!(o.status.code(), Some(0));
        fs::read_to_string(out).unwrap()
    };
    let a = eve(1);
    assert_eq!(a, eve(4));
    assert!(parse_csv(&a)
        .iter()
        .all(|r| r.quantity == "eve_success" && (r.analytic - 0.25).abs() < 1e-12));

    let chsh = |threads| {
        let out = dir.path().join(format!("chsh-{threads}.csv"));
        let o = run(
            &[
                "chsh",
                "--t",
                "50000",
                "--shots",
                "9000",
                "--out",
                out.to_str().unwrap(),
            ],
            threads,
        );
        assert_eq!(o.status.code(), Some(0));
        fs::read_to_string(out).unwrap()
    };
    assert_eq!(chsh(1), chsh(4));
}

#[test]
fn eve_reports_three_estimates() {
    let o = run(
        &[
            "eve",
            "--variant",
            "zx",
            "--lambda",
            "0.4",
            "--shots",
            "20000",
        ],
        2,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let cols: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(cols[2], 0.3);
    assert_eq!(cols[3], 0.3);
    assert!((cols[4] - 0.3).abs() < 4.0 * cols[5]);

    let o = run(
        &[
            "eve",
            "--variant",
            "xy",
            "--lambda",
            "0.4",
            "--shots",
            "20000",
        ],
        2,
    );
    let text = String::from_utf8(o.stdout).unwrap();
    let cols: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!((cols[2], cols[3]), (0.25, 0.25));
    assert!((cols[4] - 0.25).abs() < 4.0 * cols[5]);

    let o = run(&["eve", "--variant", "zx", "--lambda", "0"], 2);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(2).unwrap().contains("0.250000"));
}

#[test]
fn chsh_bands() {
    let text = |args: &[&str]| {
        let o = run(args, 2);
        assert_eq!(o.status.code(), Some(0));
        String::from_utf8(o.stdout).unwrap()
    };
    assert!(
        text(&["chsh", "--source", "psi-minus", "--t", "0", "--shots", "0"])
            .contains("band: secure")
    );
    assert!(text(&["chsh", "--t", "20000", "--shots", "0"]).contains("band: post-process"));
    assert!(text(&["chsh", "--t", "300000", "--shots", "0"]).contains("band: discard"));
    let mixed = text(&["chsh", "--source", "mixed"]);
    assert!(mixed.contains("S = 0.000000000000") && mixed.contains("band: discard"));
}

#[test]
fn verify_passes() {
    let o = run(&["verify"], 2);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("oracle equivalence   PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep settings\nprotocol = e91_phiplus\nsteps = 4\nshots = 50\nt_end = 1000\nobservables = success\n").unwrap();
    let o = run(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--steps",
            "3",
            "-q",
        ],
        2,
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = parse_csv(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.quantity == "success"));
    assert_eq!(rows[2].t, 1000.0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["sweep", "--steps", "1"], 1).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--shots", "0"], 1).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--frobnicate"], 1).status.code(), Some(2));
    assert_eq!(run(&["eve", "--variant", "qq"], 1).status.code(), Some(2));
    assert_eq!(
        run(&["chsh", "--source", "mixed", "--out", "/tmp/never.csv"], 1)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["sweep", "--config", "/definitely/missing.cfg"], 1)
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(
            &[
                "sweep",
                "--steps",
                "2",
                "--shots",
                "5",
                "--out",
                "/definitely/missing/x.csv"
            ],
            1
        )
        .status
        .code(),
        Some(3)
    );
    // a gate of zero sigma rejects any sampling noise
    let o = run(
        &[
            "sweep",
            "--steps",
            "3",
            "--shots",
            "500",
            "--z-threshold",
            "0",
            "-q",
        ],
        1,
    );
    assert_eq!(o.status.code(), Some(1));
}
