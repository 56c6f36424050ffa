use std::path::Path;
use std::process::{Command, Output};

use ris_core::specfun::cdf_gsq;

const BIN: &str = env!("CARGO_BIN_EXE_ris-sim");

fn ris(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("RIS_SIM_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn manifest(path: &Path) -> String {
    std::fs::read_to_string(format!("{}.manifest", path.display())).unwrap()
}

fn manifest_value(text: &str, key: &str) -> Option<String> {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

#[test]
fn sweep_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = ris(&[
        "sweep",
        "--n-elements",
        "2",
        "--levels",
        "3",
        "--trials",
        "100000",
        "--snr-db-min",
        "0",
        "--snr-db-max",
        "40",
        "--snr-db-step",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "rho_db,trials,failures,p_hat,ci_low,ci_high,censored"
    );
    assert_eq!(lines.len(), 6);
    assert!(csv.ends_with('\n') && !csv.ends_with("\n\n"));
    // the 40 dB point has too few failures at this budget
    assert_eq!(lines[5], "40,100000,0,,,,1");
    let m = manifest(&out);
    assert_eq!(manifest_value(&m, "command").as_deref(), Some("sweep"));
    assert_eq!(manifest_value(&m, "seed").as_deref(), Some("1"));
    assert_eq!(manifest_value(&m, "epsilon0").as_deref(), Some("3.125"));
    assert_eq!(manifest_value(&m, "config_digest").unwrap().len(), 64);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    let mut digests = Vec::new();
    for threads in ["1", "2", "4"] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let o = ris(&[
            "sweep",
            "--n-elements",
            "3",
            "--levels",
            "2",
            "--trials",
            "300000",
            "--block-size",
            "5000",
            "--seed",
            "77",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        outputs.push(std::fs::read(&out).unwrap());
        digests.push(manifest_value(&manifest(&out), "config_digest").unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    assert!(digests.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ris(&["sweep", "--omega-d", "2"]).status.code(), Some(2));
    assert_eq!(
        ris(&["conditional", "--levels", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(ris(&["sweep", "--eta", "1.5"]).status.code(), Some(2));
    assert_eq!(ris(&["sweep", "--levels", "1"]).status.code(), Some(2));
    assert_eq!(ris(&["sweep", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        ris(&["conditional", "--n-elements", "3", "--event", "eps1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ris(&["--help"]).status.code(), Some(0));
}

#[test]
fn all_censored_exits_3() {
    let o = ris(&[
        "sweep",
        "--n-elements",
        "4",
        "--snr-db-min",
        "60",
        "--snr-db-max",
        "70",
        "--trials",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = ris(&[
        "sweep",
        "--n-elements",
        "4",
        "--snr-db-min",
        "60",
        "--snr-db-max",
        "70",
        "--trials",
        "1000",
        "--allow-sparse",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(",0"));
}

#[test]
fn domain_errors_exit_4() {
    // strip width ρ^{-1/2} exceeds π/2 below about -3.9 dB
    let o = ris(&[
        "conditional",
        "--snr-db-min",
        "-10",
        "--snr-db-max",
        "0",
        "--snr-db-step",
        "10",
        "--trials",
        "1000",
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn perfect_single_element_sweep_matches_analytic() {
    let grid = [
        "--snr-db-min",
        "10",
        "--snr-db-max",
        "30",
        "--snr-db-step",
        "10",
    ];
    let mut args = vec![
        "sweep",
        "--n-elements",
        "1",
        "--levels",
        "perfect",
        "--trials",
        "2000000",
    ];
    args.extend(grid);
    let sweep = stdout(&ris(&args));
    let mut args = vec!["analytic", "--mode", "rho", "--n-elements", "1"];
    args.extend(grid);
    let analytic = stdout(&ris(&args));
    assert_eq!(analytic.lines().next(), Some("rho_db,threshold,cdf,approx"));
    for (s, a) in sweep.lines().skip(1).zip(analytic.lines().skip(1)) {
        let s: Vec<&str> = s.split(',').collect();
        let a: Vec<&str> = a.split(',').collect();
        assert_eq!(s[0], a[0]);
        let (p, want): (f64, f64) = (s[3].parse().unwrap(), a[2].parse().unwrap());
        let n: f64 = s[1].parse().unwrap();
        assert!(
            (p - want).abs() <= 4.0 * (want * (1.0 - want) / n).sqrt(),
            "{} dB: {p} vs {want}",
            s[0]
        );
        let t: f64 = a[1].parse().unwrap();
        assert_eq!(want, cdf_gsq(t).unwrap());
    }
}

#[test]
fn analytic_x_rows() {
    let o = ris(&[
        "analytic", "--x-min", "0", "--x-max", "1e-4", "--points", "2",
    ]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "x,cdf,approx");
    assert_eq!(rows[1], "0,0,0");
    let f: Vec<f64> = rows[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(f[0], 1e-4);
    assert!(((f[1] - f[2]) / f[1]).abs() < 0.05);
}

#[test]
fn reference_lines() {
    let o = ris(&[
        "analytic",
        "--mode",
        "reference",
        "--reference",
        "full",
        "--n-elements",
        "2",
        "--anchor-db",
        "30",
        "--anchor-p",
        "1e-4",
        "--snr-db-min",
        "20",
        "--snr-db-max",
        "30",
        "--snr-db-step",
        "10",
    ]);
    assert_eq!(stdout(&o), "rho_db,value\n20,0.01\n30,0.0001\n");
    let o = ris(&["analytic", "--mode", "reference", "--anchor-db", "30"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reference_anchor_from_sweep_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = ris(&[
        "sweep",
        "--trials",
        "100000",
        "--snr-db-min",
        "0",
        "--snr-db-max",
        "40",
        "--snr-db-step",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let last = csv
        .lines()
        .rfind(|l| l.ends_with(",0"))
        .unwrap()
        .to_string();
    let f: Vec<&str> = last.split(',').collect();
    let o = ris(&[
        "analytic",
        "--mode",
        "reference",
        "--reference",
        "l2-bound",
        "--anchor-from",
        out.to_str().unwrap(),
        "--snr-db-min",
        "0",
        "--snr-db-max",
        "40",
        "--snr-db-step",
        "10",
    ]);
    let text = stdout(&o);
    let row = text
        .lines()
        .find(|l| l.starts_with(&format!("{},", f[0])))
        .unwrap();
    assert_eq!(
        row.split(',').nth(1).unwrap().parse::<f64>().unwrap(),
        f[3].parse::<f64>().unwrap()
    );
}

#[test]
fn levels_sweep_layout_and_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.csv");
    let o = ris(&[
        "levels-sweep",
        "--n-elements",
        "2",
        "--rate-bpcu",
        "2",
        "--snr-db",
        "20,30",
        "--levels-max",
        "5",
        "--trials",
        "200000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(
        csv.lines().next(),
        Some("snr_db,levels,p_hat,ci_low,ci_high,censored")
    );
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[4][..2], ["20", "perfect"]);
    assert_eq!(rows[9][..2], ["30", "perfect"]);
    for block in rows.chunks(5) {
        let p: Vec<f64> = block.iter().map(|r| r[2].parse().unwrap()).collect();
        assert!(p.windows(2).all(|w| w[1] <= w[0]), "{p:?}");
    }
    assert_eq!(
        manifest_value(&manifest(&out), "epsilon0").as_deref(),
        Some("9.375")
    );
}

#[test]
fn conditional_columns() {
    let o = ris(&["conditional", "--trials", "200000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines().next(),
        Some("rho_db,event_prob,cond_p_hat,lower_bound,ci_low,ci_high")
    );
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let theta = 10f64.powf(-f[0] / 20.0);
        let want = 2.0 * (theta / std::f64::consts::PI).powi(2);
        assert!((f[1] - want).abs() <= 1e-15 * want);
        assert!((f[3] - f[1] * f[2]).abs() <= 1e-15 * f[3]);
        assert!(f[4] <= f[3] && f[3] <= f[5]);
    }
}

#[test]
fn config_file_and_seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# desk run\nn_elements = 1\nlevels = perfect\ntrials = 50000\nseed = 5\nsnr-db = 1\n",
    )
    .unwrap();
    let base = [
        "sweep",
        "--snr-db-min",
        "10",
        "--snr-db-max",
        "10",
        "--config",
    ];
    let run = |extra: &[&str], env: Option<&str>| {
        let out = dir
            .path()
            .join(format!("o{}.csv", extra.len() + env.map_or(0, |_| 10)));
        let mut c = Command::new(BIN);
        c.args(base)
            .arg(&cfg)
            .args(extra)
            .arg("--out")
            .arg(&out)
            .env_remove("RIS_SIM_SEED");
        if let Some(s) = env {
            c.env("RIS_SIM_SEED", s);
        }
        assert!(c.output().unwrap().status.success());
        manifest(&out)
    };
    let m = run(&[], None);
    assert_eq!(manifest_value(&m, "seed").as_deref(), Some("5"));
    assert_eq!(
        manifest_value(&m, "config.trials").as_deref(),
        Some("50000")
    );
    assert_eq!(
        manifest_value(&m, "config.levels").as_deref(),
        Some("perfect")
    );
    let m = run(&["--seed", "9", "--trials", "60000"], Some("3"));
    assert_eq!(manifest_value(&m, "seed").as_deref(), Some("9"));
    assert_eq!(
        manifest_value(&m, "config.trials").as_deref(),
        Some("60000")
    );

    std::fs::write(&cfg, "trials = 50000\n").unwrap();
    let m = run(&[], Some("3"));
    assert_eq!(manifest_value(&m, "seed").as_deref(), Some("3"));

    std::fs::write(&cfg, "colour = red\n").unwrap();
    let o = Command::new(BIN).args(base).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_is_plain_ascii_decimal() {
    let o = ris(&[
        "sweep",
        "--trials",
        "20000",
        "--snr-db-min",
        "-5",
        "--snr-db-max",
        "5",
        "--snr-db-step",
        "2.5",
    ]);
    let text = stdout(&o);
    assert!(text.is_ascii());
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().nth(1).unwrap().split(',').next(), Some("-5"));
}

#[test]
fn shipped_recipes_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "conf") {
            ris_cli::config::ConfigFile::load(&path).unwrap();
            seen += 1;
        }
    }
    assert_eq!(seen, 3);
}
