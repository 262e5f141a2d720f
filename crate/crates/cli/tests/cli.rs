use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use fsparse_cli::manifest::{manifest_path, sha256_hex, RunManifest};
use fsparse_cli::output::fmt_real;
use fsparse_core::synth::{gen_design, gen_sample, lower_bound_conditions};
use fsparse_core::{figure_curves, regime_constants, ModelParams, SparseAdditiveFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fsparse").chain(args.iter().copied());
    let code = fsparse_cli::run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn value_of<'a>(stdout: &'a str, key: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {stdout}"))
}

const PARAMS_D3: &str =
    "d = 3\nd_star = 1\ng_min = 1\nL = 1\nkappa = 1\nsigma = 0.1\nL2 = 1\nL_inf = 1.5\n";

#[test]
fn help_lists_every_flag() {
    let cases: &[(&str, &[&str])] = &[
        ("count", &["--dstar", "--gamma", "--radius-sq"]),
        ("saddle", &["--gamma", "--tol"]),
        ("curve", &["--gamma-min", "--gamma-max", "--steps", "--out"]),
        ("regime", &["--params", "--n", "--alpha"]),
        (
            "select",
            &["--data", "--params", "--cap", "--lambda", "--lambda-scale"],
        ),
        ("simulate", &["--config", "--out"]),
    ];
    for (sub, flags) in cases {
        let o = run(&[sub, "--help"]);
        assert_eq!(o.code, 0, "{sub}");
        for flag in flags.iter().chain(&["--seed", "--threads", "--format"]) {
            assert!(o.stdout.contains(flag), "{sub} help lacks {flag}");
        }
    }
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["frobnicate"]).code, 2);
}

#[test]
fn count_examples() {
    let o = run(&[
        "count",
        "--dstar",
        "2",
        "--radius-sq",
        "2",
        "--format",
        "plain",
    ]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout.lines().next(), Some("N1=9 N2=3 N=6"));
    let o = run(&["count", "--dstar", "1", "--gamma", "1"]);
    assert!(o.stdout.starts_with("N1=3 "));
    let o = run(&["count", "--dstar", "3", "--radius-sq", "0"]);
    assert!(o.stdout.starts_with("N1=1 N2=1 N=0"));
    assert_eq!(run(&["count", "--dstar", "2"]).code, 2);
    assert_eq!(
        run(&["count", "--dstar", "2", "--gamma", "1", "--radius-sq", "2"]).code,
        2
    );
    assert_eq!(run(&["count", "--dstar", "0", "--radius-sq", "2"]).code, 2);
}

#[test]
fn count_json_keeps_big_integers_exact() {
    let o = run(&["count", "--dstar", "60", "--gamma", "1", "--format", "json"]);
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let exact = fsparse_core::count_exact(60, 60).unwrap();
    assert_eq!(v["n1"].to_string(), exact.n1.to_string());
    assert_eq!(v["n"].to_string(), exact.n_diff.to_string());
}

#[test]
fn saddle_residual_is_reported() {
    let o = run(&["saddle", "--gamma", "1", "--tol", "1e-12"]);
    assert_eq!(o.code, 0);
    let residual: f64 = value_of(&o.stdout, "residual").parse().unwrap();
    assert!(residual <= 1e-12);
    let z: f64 = value_of(&o.stdout, "z_gamma").parse().unwrap();
    assert!((z - 0.606_530_723_771_808).abs() < 1e-12);
    assert_eq!(run(&["saddle", "--gamma", "-1"]).code, 2);
    assert_eq!(run(&["saddle", "--gamma", "1e13", "--tol", "1e-3"]).code, 1);
}

#[test]
fn curve_file_round_trips_with_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("curve.csv");
    let o = run(&[
        "curve",
        "--gamma-min",
        "0.25",
        "--gamma-max",
        "8",
        "--steps",
        "32",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let bytes = std::fs::read(&out).unwrap();
    let mut reader = csv::Reader::from_reader(&bytes[..]);
    assert_eq!(
        reader.headers().unwrap(),
        vec!["gamma", "z_gamma", "l_value"]
    );
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 32);
    assert!(rows.windows(2).all(|w| w[0][1] < w[1][1]));
    assert!(rows.iter().all(|r| r[1] > 0.0 && r[1] < 1.0));
    // parsed table equals the in-memory table bit for bit
    let grid: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let direct = figure_curves(&grid).unwrap();
    for (r, d) in rows.iter().zip(&direct) {
        assert_eq!((r[1], r[2]), (d.z_gamma, d.l_value));
    }
    let manifest: RunManifest =
        serde_json::from_slice(&std::fs::read(manifest_path(&out)).unwrap()).unwrap();
    assert_eq!(manifest.subcommand, "curve");
    assert_eq!(manifest.sha256, sha256_hex(&bytes));
    assert_eq!(manifest.output, "curve.csv");
    assert_eq!(
        run(&[
            "curve",
            "--gamma-min",
            "2",
            "--gamma-max",
            "1",
            "--steps",
            "3",
            "--out",
            "-"
        ])
        .code,
        2
    );
}

#[test]
fn regime_report_matches_library() {
    let dir = TempDir::new().unwrap();
    let text = "d = 20\nd_star = 1\ng_min = 1\nL = 2\nkappa = 1\nsigma = 1\nL2 = 1\nL_inf = 1.5\nn = 50\nalpha = 0.2\n";
    let path = write(&dir, "p.txt", text);
    let o = run(&["regime", "--params", &path]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let c_up = v["c_star_upper"].as_f64().unwrap();
    assert!((c_up - 5.4190).abs() < 1e-4);
    let p = ModelParams {
        d: 20,
        d_star: 1,
        g_min: 1.0,
        l: 2.0,
        kappa: 1.0,
        sigma: 1.0,
        l2: 1.0,
        l_inf: 1.5,
    };
    for n in [50usize, 7] {
        let o = run(&["regime", "--params", &path, "--n", &n.to_string()]);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        let r = regime_constants(&p, n, 0.2).unwrap();
        let lb = lower_bound_conditions(&p, n, 0.2).unwrap();
        let flags = &v["flags"];
        assert_eq!(flags["thm1_cond_a"], r.flags.thm1_cond_a);
        assert_eq!(flags["thm1_cond_b"], r.flags.thm1_cond_b);
        assert_eq!(flags["thm2_hyp1"], r.flags.thm2_hyp1);
        assert_eq!(flags["prop2_impossible"], r.flags.prop2_impossible);
        assert_eq!(flags["thm2_hyp1"], lb.hyp1);
        assert_eq!(v["c1_upper"].as_f64().unwrap(), r.c1_upper);
    }
}

#[test]
fn regime_file_errors() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "d = 20\nwidth = 3\n");
    let o = run(&["regime", "--params", &bad]);
    assert_eq!(o.code, 2);
    assert!(
        o.stderr.contains("width = 3") && o.stderr.contains(":2"),
        "{}",
        o.stderr
    );
    let partial = write(&dir, "partial.txt", "d = 20\nd_star = 1\n");
    let o = run(&["regime", "--params", &partial]);
    assert_eq!(o.code, 2);
    assert!(
        o.stderr
            .contains("g_min, L, kappa, sigma, L2, L_inf, n, alpha"),
        "{}",
        o.stderr
    );
    let no_gamma = write(
        &dir,
        "ng.txt",
        "d = 20\nd_star = 2\ng_min = 1\nL = 1\nkappa = 1\nsigma = 1\nL2 = 1\nL_inf = 1.5\nn = 5\nalpha = 0.2\n",
    );
    assert_eq!(run(&["regime", "--params", &no_gamma]).code, 1);
}

fn noiseless_csv(n: usize, seed: u64) -> String {
    let f = SparseAdditiveFunction::new(3, vec![0], vec![1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = gen_design(n, 3, &mut rng);
    let y = gen_sample(&f, &x, 0.0, &mut rng).unwrap();
    let mut text = String::from("x1,x2,x3,y\n");
    for (row, yi) in x.rows().into_iter().zip(&y) {
        let cells: Vec<String> = row.iter().map(|v| fmt_real(*v)).collect();
        text.push_str(&format!("{},{}\n", cells.join(","), fmt_real(*yi)));
    }
    text
}

#[test]
fn select_recovers_single_coordinate() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "data.csv", &noiseless_csv(5000, 3));
    let params = write(&dir, "p.txt", PARAMS_D3);
    let o = run(&["select", "--data", &data, "--params", &params]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(value_of(&o.stdout, "selected"), "1");
    assert!(o.stdout.contains("record k={1:1} trig=cos"));
    let o = run(&[
        "select", "--data", &data, "--params", &params, "--format", "json", "--cap",
    ]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["selected"], serde_json::json!([1]));
    assert_eq!(v["stopped_early"], true);
}

#[test]
fn select_reads_stdin_through_binary() {
    let dir = TempDir::new().unwrap();
    let params = write(&dir, "p.txt", PARAMS_D3);
    let mut child = Command::new(env!("CARGO_BIN_EXE_fsparse"))
        .args(["select", "--data", "-", "--params", &params])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(noiseless_csv(3000, 4).as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("selected=1\n"));
}

#[test]
fn select_input_errors() {
    let dir = TempDir::new().unwrap();
    let params = write(&dir, "p.txt", PARAMS_D3);
    let check = |name: &str, text: &str, needle: &str| {
        let data = write(&dir, name, text);
        let o = run(&["select", "--data", &data, "--params", &params]);
        assert_eq!(o.code, 2, "{name}: {}", o.stderr);
        assert!(o.stderr.contains(needle), "{name}: {}", o.stderr);
    };
    check("empty.csv", "", "empty");
    check("header_only.csv", "x1,x2,x3,y\n", "no data rows");
    check(
        "ragged.csv",
        "x1,x2,x3,y\n0.1,0.2,0.3,1\n0.1,0.2,1\n",
        ":3: expected 4 fields, found 3",
    );
    check(
        "range.csv",
        "x1,x2,x3,y\n0.1,0.2,0.3,1\n0.1,1.2,0.3,1\n",
        ":3: x2 = 1.2 outside",
    );
    check("text.csv", "x1,x2,x3,y\n0.1,abc,0.3,1\n", ":2: column 2");
    check("header.csv", "a,b,c,y\n0.1,0.2,0.3,1\n", "header");
    check("width.csv", "x1,x2,y\n0.1,0.2,1\n", "d = 3");
    let data = write(&dir, "ok.csv", "x1,x2,x3,y\n0.1,0.2,0.3,1\n");
    let o = run(&[
        "select",
        "--data",
        &data,
        "--params",
        &params,
        "--lambda",
        "1",
        "--lambda-scale",
        "2",
    ]);
    assert_eq!(o.code, 2);
}

const SIM_CONFIG: &str = "\
# pair of unit cosines among 10 covariates
d = 10
d_star = 2
kappa = 1
sigma = 0.1
amplitudes = 1, 1
support = 3, 8
n = 50, 500, 5000
trials = 20
seed = 17
lambda_rule = theorem
";

fn read_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        r.headers().unwrap(),
        vec!["n", "d", "dstar", "error_rate", "trials", "seed"]
    );
    r.records().map(Result::unwrap).collect()
}

#[test]
fn simulate_writes_table_and_manifest() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "sim.txt", SIM_CONFIG);
    let out = dir.path().join("sim.csv");
    let o = run(&[
        "simulate",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 3);
    let rates: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(rates.windows(2).all(|w| w[1] <= w[0] + 0.05), "{rates:?}");
    assert_eq!(rates[2], 0.0);
    assert!(rows
        .iter()
        .all(|r| &r[1] == "10" && &r[2] == "2" && &r[4] == "20" && &r[5] == "17"));

    let bytes = std::fs::read(&out).unwrap();
    let m: RunManifest =
        serde_json::from_slice(&std::fs::read(manifest_path(&out)).unwrap()).unwrap();
    assert_eq!(m.sha256, sha256_hex(&bytes));
    assert_eq!(m.seed, Some(17));
    assert_eq!(m.params["n_grid"], serde_json::json!([50, 500, 5000]));

    // the --seed flag overrides the file
    let out2 = dir.path().join("sim2.csv");
    run(&[
        "simulate",
        "--config",
        &config,
        "--out",
        out2.to_str().unwrap(),
        "--seed",
        "99",
    ]);
    assert!(read_rows(&out2).iter().all(|r| &r[5] == "99"));
}

#[test]
fn simulate_config_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    let missing = write(&dir, "m.txt", "d = 10\nd_star = 2\n");
    let o = run(&["simulate", "--config", &missing, "--out", out]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("kappa, sigma, n, trials"), "{}", o.stderr);
    let bad_rule = write(&dir, "r.txt", &SIM_CONFIG.replace("theorem", "magic"));
    assert_eq!(
        run(&["simulate", "--config", &bad_rule, "--out", out]).code,
        2
    );
    let weak = write(
        &dir,
        "w.txt",
        &SIM_CONFIG.replace("amplitudes = 1, 1", "amplitudes = 1, 0.5"),
    );
    assert_eq!(run(&["simulate", "--config", &weak, "--out", out]).code, 2);
    assert!(!Path::new(out).exists());
}
