use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use fsparse_core::lattice::floor_snapped;
use fsparse_core::synth::lower_bound_conditions;
use fsparse_core::theta::phi;
use fsparse_core::{
    count_exact, figure_curves, mc_error, regime_constants, select, solve_saddle, ExperimentConfig,
    FunctionSpec, LambdaRule, ModelParams, RegimeReport, SparseAdditiveFunction, TuningParams,
    UniformDensity,
};
use ndarray::Array2;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{usage, CliError, CliResult};
use crate::keyvalue::KeyValues;
use crate::manifest::RunManifest;
use crate::output::{csv_bytes, fmt_real, write_atomic, Format};
use crate::{Cli, Command, CountArgs, CurveArgs, RegimeArgs, SaddleArgs, SelectArgs, SimulateArgs};

pub const MODEL_KEYS: &[&str] = &["d", "d_star", "g_min", "L", "kappa", "sigma", "L2", "L_inf"];

const SIMULATE_KEYS: &[&str] = &[
    "d",
    "d_star",
    "g_min",
    "L",
    "kappa",
    "sigma",
    "L2",
    "L_inf",
    "n",
    "trials",
    "seed",
    "pattern",
    "amplitudes",
    "support",
    "pattern_size",
    "amp_lo",
    "amp_hi",
    "lambda_rule",
    "lambda_scale",
    "lambda",
    "cap",
];

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Count(a) => count(a, cli.format, out),
        Command::Saddle(a) => saddle(a, cli.format, out),
        Command::Curve(a) => curve(a, out),
        Command::Regime(a) => regime(a, out),
        Command::Select(a) => select_cmd(a, cli.format, out),
        Command::Simulate(a) => simulate(a, cli.seed, cli.format, out),
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn big_json(n: &impl ToString) -> Value {
    Value::Number(serde_json::Number::from_str(&n.to_string()).expect("decimal integer"))
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(runtime)?;
    writeln!(out)?;
    Ok(())
}

fn count(a: &CountArgs, format: Format, out: &mut dyn Write) -> CliResult<()> {
    if a.dstar == 0 {
        return Err(usage("--dstar must be at least 1"));
    }
    let radius_sq = match (a.gamma, a.radius_sq) {
        (Some(g), None) => {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(usage(format!(
                    "--gamma must be finite and nonnegative, got {g}"
                )));
            }
            floor_snapped(g * a.dstar as f64)?
        }
        (None, Some(r)) => r,
        _ => return Err(usage("give exactly one of --gamma and --radius-sq")),
    };
    let c = count_exact(a.dstar, radius_sq)?;
    match format {
        Format::Plain => {
            writeln!(out, "N1={} N2={} N={}", c.n1, c.n2, c.n_diff)?;
            writeln!(
                out,
                "logN1={} logN2={} logN={}",
                fmt_real(c.log_n1),
                fmt_real(c.log_n2),
                fmt_real(c.log_n_diff)
            )?;
            writeln!(out, "dstar={} radius_sq={}", a.dstar, radius_sq)?;
        }
        Format::Json => write_json(
            out,
            &json!({
                "d_star": a.dstar,
                "radius_sq": radius_sq,
                "n1": big_json(&c.n1),
                "n2": big_json(&c.n2),
                "n": big_json(&c.n_diff),
                "log_n1": finite_or_null(c.log_n1),
                "log_n2": finite_or_null(c.log_n2),
                "log_n": finite_or_null(c.log_n_diff),
            }),
        )?,
        Format::Csv => out.write_all(&csv_bytes(
            &[
                "dstar",
                "radius_sq",
                "n1",
                "n2",
                "n",
                "log_n1",
                "log_n2",
                "log_n",
            ],
            &[vec![
                a.dstar.to_string(),
                radius_sq.to_string(),
                c.n1.to_string(),
                c.n2.to_string(),
                c.n_diff.to_string(),
                fmt_real(c.log_n1),
                fmt_real(c.log_n2),
                fmt_real(c.log_n_diff),
            ]],
        )?)?,
    }
    Ok(())
}

/// JSON has no infinities; `log 0` is emitted as null.
fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn saddle(a: &SaddleArgs, format: Format, out: &mut dyn Write) -> CliResult<()> {
    if !(a.gamma > 0.0 && a.gamma.is_finite()) {
        return Err(usage(format!("--gamma must be positive, got {}", a.gamma)));
    }
    if !(a.tol > 0.0) {
        return Err(usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let sp = solve_saddle(a.gamma, a.tol)?;
    let residual = (phi(sp.y_gamma)? - a.gamma).abs();
    let fields = [
        ("gamma", sp.gamma),
        ("z_gamma", sp.z_gamma),
        ("y_gamma", sp.y_gamma),
        ("h", sp.h_val),
        ("l_value", sp.l_val),
        ("l_pp", sp.l_pp),
        ("residual", residual),
    ];
    match format {
        Format::Plain => {
            for (k, v) in fields {
                writeln!(out, "{k}={}", fmt_real(v))?;
            }
        }
        Format::Json => {
            let map: serde_json::Map<String, Value> = fields
                .iter()
                .map(|(k, v)| (k.to_string(), json!(v)))
                .collect();
            write_json(out, &map)?;
        }
        Format::Csv => out.write_all(&csv_bytes(
            &fields.map(|(k, _)| k),
            &[fields.iter().map(|(_, v)| fmt_real(*v)).collect()],
        )?)?,
    }
    Ok(())
}

fn curve(a: &CurveArgs, out: &mut dyn Write) -> CliResult<()> {
    let start = Instant::now();
    if a.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    if !(a.gamma_min > 0.0 && a.gamma_max.is_finite()) {
        return Err(usage("gamma grid must be positive and finite"));
    }
    if a.steps == 1 && a.gamma_min != a.gamma_max || a.steps > 1 && a.gamma_min >= a.gamma_max {
        return Err(usage(
            "need --gamma-min < --gamma-max (or equal with --steps 1)",
        ));
    }
    let grid: Vec<f64> = (0..a.steps)
        .map(|i| {
            if a.steps == 1 {
                a.gamma_min
            } else {
                a.gamma_min + (a.gamma_max - a.gamma_min) * i as f64 / (a.steps - 1) as f64
            }
        })
        .collect();
    let rows = figure_curves(&grid)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt_real(r.gamma), fmt_real(r.z_gamma), fmt_real(r.l_value)])
        .collect();
    let bytes = csv_bytes(&["gamma", "z_gamma", "l_value"], &table)?;
    emit_file(
        &a.out,
        &bytes,
        out,
        "curve",
        json!({"gamma_min": a.gamma_min, "gamma_max": a.gamma_max, "steps": a.steps}),
        None,
        start,
    )
}

/// Writes `bytes` to `path` with a manifest sidecar, or to stdout for `-`.
fn emit_file(
    path: &Path,
    bytes: &[u8],
    out: &mut dyn Write,
    subcommand: &str,
    params: Value,
    seed: Option<u64>,
    start: Instant,
) -> CliResult<()> {
    if path == Path::new("-") {
        out.write_all(bytes)?;
        return Ok(());
    }
    write_atomic(path, bytes)?;
    RunManifest::new(
        subcommand,
        params,
        seed,
        start.elapsed().as_secs_f64(),
        path,
        bytes,
    )
    .write_beside(path)
}

fn model_params(kv: &KeyValues) -> CliResult<ModelParams<f64>> {
    kv.require(MODEL_KEYS)?;
    let p = ModelParams {
        d: kv.get_required("d")?,
        d_star: kv.get_required("d_star")?,
        g_min: kv.get_required("g_min")?,
        l: kv.get_required("L")?,
        kappa: kv.get_required("kappa")?,
        sigma: kv.get_required("sigma")?,
        l2: kv.get_required("L2")?,
        l_inf: kv.get_required("L_inf")?,
    };
    p.validate()?;
    Ok(p)
}

fn params_keys() -> Vec<&'static str> {
    MODEL_KEYS.iter().copied().chain(["n", "alpha"]).collect()
}

#[derive(Serialize)]
struct RegimeOutput {
    params: ModelParams<f64>,
    n: usize,
    alpha: f64,
    #[serde(flatten)]
    report: RegimeReport<f64>,
    a_value: f64,
    priors_in_class: bool,
    alpha_admissible: bool,
}

fn regime(a: &RegimeArgs, out: &mut dyn Write) -> CliResult<()> {
    let path = a.params.to_string_lossy();
    let kv = KeyValues::read(&path, &params_keys())?;
    let mut missing: Vec<&str> = MODEL_KEYS
        .iter()
        .copied()
        .filter(|k| !kv.contains(k))
        .collect();
    if a.n.is_none() && !kv.contains("n") {
        missing.push("n");
    }
    if a.alpha.is_none() && !kv.contains("alpha") {
        missing.push("alpha");
    }
    if !missing.is_empty() {
        return Err(usage(format!(
            "{path}: missing keys: {}",
            missing.join(", ")
        )));
    }
    let params = model_params(&kv)?;
    let n = match a.n {
        Some(n) => n,
        None => kv.get_required("n")?,
    };
    let alpha = match a.alpha {
        Some(x) => x,
        None => kv.get_required("alpha")?,
    };
    let report = regime_constants(&params, n, alpha)?;
    let lower = lower_bound_conditions(&params, n, alpha)?;
    write_json(
        out,
        &RegimeOutput {
            params,
            n,
            alpha,
            report,
            a_value: lower.a_value,
            priors_in_class: lower.priors_in_class,
            alpha_admissible: lower.alpha_admissible,
        },
    )
}

/// Reads `x1,...,xd,y` CSV; every design value must lie in `[0, 1]`.
pub fn read_sample(path: &Path) -> CliResult<(Array2<f64>, Vec<f64>)> {
    let name = path.to_string_lossy();
    let mut bytes = Vec::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_end(&mut bytes)?;
    } else {
        bytes = std::fs::read(path).map_err(|e| usage(format!("cannot read {name}: {e}")))?;
    }
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(usage(format!("{name}: data file is empty")));
    }
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(&bytes[..]);
    let header = reader
        .headers()
        .map_err(|e| usage(format!("{name}: unreadable header: {e}")))?
        .clone();
    let d = header.len().saturating_sub(1);
    let expected: Vec<String> = (1..=d)
        .map(|j| format!("x{j}"))
        .chain(["y".into()])
        .collect();
    if d == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(usage(format!(
            "{name}:1: header must be x1,...,xd,y, got `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| usage(format!("{name}: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != d + 1 {
            return Err(usage(format!(
                "{name}:{line}: expected {} fields, found {}",
                d + 1,
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                usage(format!(
                    "{name}:{line}: column {}: not a number: `{field}`",
                    col + 1
                ))
            })?;
            if col < d {
                if !(0.0..=1.0).contains(&v) {
                    return Err(usage(format!(
                        "{name}:{line}: x{} = {field} outside [0, 1]",
                        col + 1
                    )));
                }
                xs.push(v);
            } else {
                if !v.is_finite() {
                    return Err(usage(format!("{name}:{line}: y is not finite")));
                }
                ys.push(v);
            }
        }
    }
    if ys.is_empty() {
        return Err(usage(format!("{name}: no data rows")));
    }
    let x = Array2::from_shape_vec((ys.len(), d), xs).expect("rows checked");
    Ok((x, ys))
}

#[derive(Serialize)]
struct RecordOut {
    /// 1-based `{coordinate: value}` pairs.
    index: String,
    trig: String,
    value: f64,
}

#[derive(Serialize)]
struct SelectOutput {
    /// 1-based.
    selected: Vec<usize>,
    lambda: f64,
    m: f64,
    radius_sq: u64,
    levels_visited: usize,
    stopped_early: bool,
    records: Vec<RecordOut>,
}

fn select_cmd(a: &SelectArgs, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let kv = KeyValues::read(&a.params.to_string_lossy(), &params_keys())?;
    let params = model_params(&kv)?;
    let (x, y) = read_sample(&a.data)?;
    if x.ncols() != params.d {
        return Err(usage(format!(
            "data has {} covariates but params say d = {}",
            x.ncols(),
            params.d
        )));
    }
    let tuning = match (a.lambda, a.lambda_scale) {
        (Some(l), _) => TuningParams::with_lambda(&params, l)?,
        (None, Some(c)) => TuningParams::with_lambda_scale(&params, y.len(), c)?,
        (None, None) => fsparse_core::tuning(&params, y.len())?,
    };
    let r = select(x.view(), &y, &UniformDensity, &params, &tuning, a.cap)?;
    let result = SelectOutput {
        selected: r.selected.iter().map(|j| j + 1).collect(),
        lambda: tuning.lambda,
        m: tuning.m,
        radius_sq: tuning.radius_sq,
        levels_visited: r.levels_visited,
        stopped_early: r.stopped_early,
        records: r
            .records
            .iter()
            .map(|rec| RecordOut {
                index: rec.index.to_string(),
                trig: rec.trig.to_string(),
                value: rec.value,
            })
            .collect(),
    };
    match format {
        Format::Plain => {
            let set: Vec<String> = result.selected.iter().map(usize::to_string).collect();
            writeln!(out, "selected={}", set.join(","))?;
            writeln!(out, "lambda={}", fmt_real(result.lambda))?;
            writeln!(out, "m={}", fmt_real(result.m))?;
            writeln!(out, "radius_sq={}", result.radius_sq)?;
            writeln!(out, "levels_visited={}", result.levels_visited)?;
            writeln!(out, "stopped_early={}", result.stopped_early)?;
            for rec in &result.records {
                writeln!(
                    out,
                    "record k={} trig={} value={}",
                    rec.index,
                    rec.trig,
                    fmt_real(rec.value)
                )?;
            }
        }
        Format::Json => write_json(out, &result)?,
        Format::Csv => out.write_all(&csv_bytes(
            &["index", "trig", "value"],
            &result
                .records
                .iter()
                .map(|rec| vec![rec.index.clone(), rec.trig.clone(), fmt_real(rec.value)])
                .collect::<Vec<_>>(),
        )?)?,
    }
    Ok(())
}

/// Resolved experiment description; recorded verbatim in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct SimulatePlan {
    pub params: ModelParams<f64>,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub function: FunctionSpec<f64>,
    pub cap_at_d_star: bool,
    pub lambda_rule: LambdaRule<f64>,
}

pub fn simulate_plan(kv: &KeyValues, seed_override: Option<u64>) -> CliResult<SimulatePlan> {
    kv.require(&["d", "d_star", "kappa", "sigma", "n", "trials"])?;
    let d: usize = kv.get_required("d")?;
    let d_star: usize = kv.get_required("d_star")?;
    let kappa: f64 = kv.get_required("kappa")?;
    let sigma: f64 = kv.get_required("sigma")?;
    let pattern = kv
        .get::<String>("pattern")?
        .unwrap_or_else(|| "fixed".into());
    let (function, tight) = match pattern.as_str() {
        "fixed" => {
            let amplitudes: Vec<f64> = kv
                .get_list("amplitudes")?
                .ok_or_else(|| usage("fixed pattern needs `amplitudes`"))?;
            let support: Vec<usize> = match kv.get_list::<usize>("support")? {
                Some(s) => {
                    if s.contains(&0) {
                        return Err(usage("`support` is 1-based"));
                    }
                    s.iter().map(|j| j - 1).collect()
                }
                None => (0..amplitudes.len()).collect(),
            };
            let f = SparseAdditiveFunction::new(d, support, amplitudes)?;
            let tight = f.model_params(d_star, kappa, sigma);
            (FunctionSpec::Fixed(f), tight)
        }
        "random" => {
            kv.require(&["pattern_size", "amp_lo", "amp_hi"])?;
            let size: usize = kv.get_required("pattern_size")?;
            let amp_lo: f64 = kv.get_required("amp_lo")?;
            let amp_hi: f64 = kv.get_required("amp_hi")?;
            let s = size as f64;
            let tight = ModelParams {
                d,
                d_star,
                g_min: 1.0,
                l: (amp_hi * amp_hi).max(kappa),
                kappa,
                sigma,
                l2: s.sqrt() * amp_hi,
                l_inf: s * 2f64.sqrt() * amp_hi,
            };
            (
                FunctionSpec::Random {
                    size,
                    amp_lo,
                    amp_hi,
                },
                tight,
            )
        }
        other => {
            return Err(usage(format!(
                "`pattern` must be fixed or random, got `{other}`"
            )))
        }
    };
    let params = ModelParams {
        g_min: kv.get("g_min")?.unwrap_or(tight.g_min),
        l: kv.get("L")?.unwrap_or(tight.l),
        l2: kv.get("L2")?.unwrap_or(tight.l2),
        l_inf: kv.get("L_inf")?.unwrap_or(tight.l_inf),
        ..tight
    };
    let rule = kv
        .get::<String>("lambda_rule")?
        .unwrap_or_else(|| "theorem".into());
    let lambda_rule = match rule.as_str() {
        "theorem" => LambdaRule::Theorem,
        "scaled" => LambdaRule::Scaled(
            kv.get("lambda_scale")?
                .ok_or_else(|| usage("lambda_rule = scaled needs `lambda_scale`"))?,
        ),
        "fixed" => LambdaRule::Fixed(
            kv.get("lambda")?
                .ok_or_else(|| usage("lambda_rule = fixed needs `lambda`"))?,
        ),
        other => {
            return Err(usage(format!(
                "`lambda_rule` must be theorem, scaled or fixed, got `{other}`"
            )))
        }
    };
    let n_grid: Vec<usize> = kv.get_list("n")?.unwrap_or_default();
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(usage("`n` must list positive sample sizes"));
    }
    Ok(SimulatePlan {
        params,
        n_grid,
        trials: kv.get_required("trials")?,
        seed: seed_override.or(kv.get("seed")?).unwrap_or(0),
        function,
        cap_at_d_star: kv.get_bool("cap")?.unwrap_or(false),
        lambda_rule,
    })
}

fn simulate(
    a: &SimulateArgs,
    seed: Option<u64>,
    format: Format,
    out: &mut dyn Write,
) -> CliResult<()> {
    let start = Instant::now();
    let kv = KeyValues::read(&a.config.to_string_lossy(), SIMULATE_KEYS)?;
    let plan = simulate_plan(&kv, seed)?;
    let mut rows = Vec::new();
    for &n in &plan.n_grid {
        let config = ExperimentConfig {
            params: plan.params,
            n,
            trials: plan.trials,
            base_seed: plan.seed,
            function: plan.function.clone(),
            cap_at_d_star: plan.cap_at_d_star,
            lambda_rule: plan.lambda_rule,
        };
        let mc = mc_error(&config)?;
        rows.push(vec![
            n.to_string(),
            plan.params.d.to_string(),
            plan.params.d_star.to_string(),
            fmt_real(mc.error_rate),
            plan.trials.to_string(),
            plan.seed.to_string(),
        ]);
    }
    let bytes = csv_bytes(&["n", "d", "dstar", "error_rate", "trials", "seed"], &rows)?;
    let plan_json = serde_json::to_value(&plan).map_err(runtime)?;
    emit_file(
        &a.out,
        &bytes,
        out,
        "simulate",
        plan_json,
        Some(plan.seed),
        start,
    )?;
    if a.out != Path::new("-") && format == Format::Plain {
        writeln!(out, "wrote {} ({} rows)", a.out.display(), rows.len())?;
    }
    Ok(())
}
