//! Command-line front end: evaluate sharp constants, run verification
//! batteries and sweeps, build extremal families, and apply operators or
//! norms to user-supplied piecewise-power functions.
//!
//! Exit codes: 0 success, 1 verification failure, 2 validation or math
//! error, 64 usage error.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use hardy_core::extremal;
use hardy_core::funcspace::Hemisphere;
use hardy_core::norms;
use hardy_core::operators;
use hardy_core::quadrature::QuadGrid;
use hardy_core::sharpconst::{sharp_constant_variant, ConstantVariant};
use hardy_core::special::{beta as beta_fn, ln_gamma, unit_ball_volume, unit_sphere_area};
use hardy_core::verify;
use hardy_core::{
    ConstantType, MixedFunction, OperatorKind, SpaceSpec, TheoremCase, TheoremId, VerifyConfig,
    WeightFunction,
};

const EXIT_VERIFY: u8 = 1;
const EXIT_MATH: u8 = 2;
const EXIT_USAGE: u8 = 64;

/// 17 significant digits, '.' decimal, locale-independent.
fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Parser)]
#[command(
    name = "hardy",
    about = "Sharp-constant laboratory for Hardy-type averaging operators",
    long_about = "Evaluates closed-form sharp operator-norm constants for Hardy-type \
                  averaging operators on mixed radial-angular function spaces and \
                  verifies them numerically against extremal families and random \
                  batteries.\n\n\
                  CSV columns (verify): theorem, param-hash, epsilon, ratio, constant, verdicts.\n\
                  CSV columns (sweep): theorem, param-hash, params, constant, extrapolated, verdict."
)]
struct Cli {
    /// JSON config file with the same keys as the run flags; flags win.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form sharp constant for a theorem case.
    Constants {
        /// Theorem label, e.g. T3.3 or T5.2U
        theorem: String,
        #[command(flatten)]
        case: CaseFlags,
        /// Which closed-form reading to evaluate.
        #[arg(long, value_enum, default_value_t = Variant::Printed)]
        variant: Variant,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the full verification battery for one case.
    Verify {
        theorem: String,
        #[command(flatten)]
        case: CaseFlags,
        #[command(flatten)]
        run: RunFlags,
        /// Operator variant for the oscillation case: literal ball average
        /// or the pattern-preserving ray average (default).
        #[arg(long, value_enum, default_value_t = Operator::Ray)]
        operator: Operator,
    },
    /// Verify a Cartesian grid of cases and emit one CSV row per case.
    Sweep {
        theorem: String,
        #[command(flatten)]
        case: CaseFlags,
        #[command(flatten)]
        run: RunFlags,
        /// Swept parameter values, e.g. --sweep lambda=-0.4,-0.3,-0.2
        /// (repeatable; Cartesian product, at most 10000 cases).
        #[arg(long, value_name = "KEY=V1,V2,...")]
        sweep: Vec<String>,
    },
    /// Print the extremal (or eigen-) function family for a case.
    Extremal {
        theorem: String,
        #[command(flatten)]
        case: CaseFlags,
        /// Family parameter for the eps-indexed families.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Evaluate a norm of a user-supplied function.
    Norm {
        /// Space spec: kind:key=val,... with kind one of
        /// mixed|weak|morrey|cmo|lcmo|herz|morrey-herz
        /// (keys p, pt, alpha, lambda, q as applicable).
        #[arg(long)]
        space: String,
        /// Function as JSON, or @path to a JSON file.
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 2)]
        n: i64,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Apply an operator to user-supplied functions and print the result.
    Apply {
        /// Operator: ball|ray|fractional|conjugate-fractional|mlinear|
        /// product|weighted|weighted-conjugate
        #[arg(long)]
        operator: String,
        /// Function as JSON, or @path; repeat for the multilinear operators.
        #[arg(long)]
        function: Vec<String>,
        #[arg(long, default_value_t = 2)]
        n: i64,
        /// Order parameter for the fractional operators.
        #[arg(long)]
        beta: Option<f64>,
        /// Power-law weight exponent for the weighted averages.
        #[arg(long = "psi-sigma")]
        psi_sigma: Option<f64>,
        /// Weight coefficient for the weighted averages.
        #[arg(long = "psi-coeff", default_value_t = 1.0)]
        psi_coeff: f64,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run the built-in invariant battery; nonzero exit on any failure.
    Selfcheck {
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Printed,
    Derived,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    Literal,
    Ray,
}

/// Theorem-case parameters. Unset flags are simply omitted from the case;
/// validation reports anything missing.
#[derive(Args, Clone, Default)]
struct CaseFlags {
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    pt: Option<f64>,
    #[arg(long)]
    pt1: Option<f64>,
    #[arg(long)]
    pt2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Weight exponent sigma for the weighted-average theorems.
    #[arg(long = "psi-sigma", allow_hyphen_values = true)]
    psi_sigma: Option<f64>,
    /// Escape hatch for any extra parameter: --set key=value (repeatable).
    #[arg(long, value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
}

impl CaseFlags {
    fn pairs(&self) -> Result<Vec<(String, f64)>, String> {
        let named: [(&str, Option<f64>); 17] = [
            ("n", self.n),
            ("m", self.m),
            ("p", self.p),
            ("p1", self.p1),
            ("p2", self.p2),
            ("pt", self.pt),
            ("pt1", self.pt1),
            ("pt2", self.pt2),
            ("alpha", self.alpha),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("lambda", self.lambda),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("beta", self.beta),
            ("q", self.q),
            ("sigma", self.psi_sigma),
        ];
        let mut out: Vec<(String, f64)> = named
            .iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect();
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("--set expects key=value, got {kv:?}"))?;
            let v: f64 = v.parse().map_err(|_| format!("bad value in --set {kv:?}"))?;
            out.push((k.to_string(), v));
        }
        Ok(out)
    }
}

/// Run-level knobs shared by the measuring subcommands.
#[derive(Args, Clone, Default)]
struct RunFlags {
    /// Quadrature grid resolution (points per decade, >= 16).
    #[arg(long = "grid-ppd")]
    grid_ppd: Option<usize>,
    #[arg(long = "r-min")]
    r_min: Option<f64>,
    #[arg(long = "r-max")]
    r_max: Option<f64>,
    #[arg(long = "tol-upper")]
    tol_upper: Option<f64>,
    #[arg(long = "tol-lower")]
    tol_lower: Option<f64>,
    /// Number of random battery functions.
    #[arg(long)]
    battery: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Explicit epsilon ladder, comma-separated.
    #[arg(long = "eps-list", value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file for the report/table; stdout keeps the summary lines.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

/// JSON config file mirror of RunFlags; flags win on conflict.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    grid_ppd: Option<usize>,
    r_min: Option<f64>,
    r_max: Option<f64>,
    tol_upper: Option<f64>,
    tol_lower: Option<f64>,
    battery: Option<usize>,
    seed: Option<u64>,
    eps_list: Option<Vec<f64>>,
    format: Option<String>,
    out: Option<String>,
    jobs: Option<usize>,
}

struct Resolved {
    config: VerifyConfig,
    format: Format,
    out: Option<String>,
    jobs: Option<usize>,
}

fn resolve(run: &RunFlags, file: &FileConfig) -> Result<Resolved, String> {
    let mut grid = QuadGrid::default();
    if let Some(v) = run.r_min.or(file.r_min) {
        grid.r_min = v;
    }
    if let Some(v) = run.r_max.or(file.r_max) {
        grid.r_max = v;
    }
    if let Some(v) = run.grid_ppd.or(file.grid_ppd) {
        if v < 16 {
            return Err(format!("points per decade must be >= 16, got {v}"));
        }
        grid.points_per_decade = v;
    }
    if !(grid.r_min > 0.0 && grid.r_min < grid.r_max) {
        return Err("need 0 < r-min < r-max".into());
    }
    let mut config = VerifyConfig { grid, ..VerifyConfig::default() };
    if let Some(v) = run.tol_upper.or(file.tol_upper) {
        if v <= 0.0 {
            return Err("tolerances must be positive".into());
        }
        config.tol_upper = v;
    }
    if let Some(v) = run.tol_lower.or(file.tol_lower) {
        if v <= 0.0 {
            return Err("tolerances must be positive".into());
        }
        config.tol_lower = v;
    }
    if let Some(v) = run.battery.or(file.battery) {
        config.battery_size = v;
    }
    if let Some(v) = run.seed.or(file.seed) {
        config.seed = v;
    }
    if let Some(v) = run.eps_list.clone().or_else(|| file.eps_list.clone()) {
        config.epsilons = Some(v);
    }
    let format = match run.format {
        Some(f) => f,
        None => match file.format.as_deref() {
            None => Format::Text,
            Some("text") => Format::Text,
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => return Err(format!("unknown format {other:?}")),
        },
    };
    Ok(Resolved {
        config,
        format,
        out: run.out.clone().or_else(|| file.out.clone()),
        jobs: run.jobs.or(file.jobs),
    })
}

fn load_config(path: &Option<String>) -> Result<FileConfig, String> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{p}: {e}"))?;
            serde_json::from_str(&text).map_err(|e| format!("{p}: {e}"))
        }
    }
}

fn build_case(theorem: &str, flags: &CaseFlags) -> Result<TheoremCase, CliError> {
    let id = TheoremId::parse(theorem).map_err(CliError::math)?;
    let pairs = flags.pairs().map_err(CliError::Usage)?;
    let refs: Vec<(&str, f64)> = pairs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    TheoremCase::new(id, &refs).validate().map_err(CliError::math)
}

fn read_function(arg: &str) -> Result<MixedFunction, CliError> {
    let text = if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| CliError::Math(format!("bad function JSON: {e}")))
}

fn parse_space(spec: &str) -> Result<SpaceSpec, CliError> {
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k, r),
        None => (spec, ""),
    };
    let mut kv = BTreeMap::new();
    for part in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("space spec expects key=value, got {part:?}")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Usage(format!("bad number in space spec: {part:?}")))?;
        kv.insert(k.to_string(), v);
    }
    let get = |k: &str| -> Result<f64, CliError> {
        kv.get(k)
            .copied()
            .ok_or_else(|| CliError::Usage(format!("space spec {spec:?} is missing {k}")))
    };
    Ok(match kind {
        "mixed" => SpaceSpec::MixedLebesgue {
            p: get("p")?,
            pt: get("pt")?,
            alpha: *kv.get("alpha").unwrap_or(&0.0),
        },
        "weak" => SpaceSpec::WeakMixed {
            p: get("p")?,
            pt: get("pt")?,
            alpha: *kv.get("alpha").unwrap_or(&0.0),
        },
        "morrey" => SpaceSpec::CentralMorrey {
            p: get("p")?,
            pt: get("pt")?,
            lambda: get("lambda")?,
        },
        "cmo" => SpaceSpec::Cmo { p: get("p")?, pt: get("pt")? },
        "lcmo" => SpaceSpec::LambdaCmo {
            p: get("p")?,
            pt: get("pt")?,
            lambda: get("lambda")?,
        },
        "herz" => SpaceSpec::Herz {
            alpha: get("alpha")?,
            q: get("q")?,
            p: get("p")?,
            pt: get("pt")?,
        },
        "morrey-herz" => SpaceSpec::MorreyHerz {
            alpha: get("alpha")?,
            q: get("q")?,
            lambda: get("lambda")?,
            p: get("p")?,
            pt: get("pt")?,
        },
        other => {
            return Err(CliError::Usage(format!("unknown space kind {other:?}")));
        }
    })
}

fn parse_operator(
    name: &str,
    beta: Option<f64>,
    psi_sigma: Option<f64>,
    psi_coeff: f64,
    arity: usize,
) -> Result<OperatorKind, CliError> {
    let need_beta = || beta.ok_or_else(|| CliError::Usage("--beta is required".into()));
    let need_sigma =
        || psi_sigma.ok_or_else(|| CliError::Usage("--psi-sigma is required".into()));
    Ok(match name {
        "ball" => OperatorKind::SphericalHardy,
        "ray" => OperatorKind::RayAverage,
        "fractional" => OperatorKind::FractionalHardy { beta: need_beta()? },
        "conjugate-fractional" => OperatorKind::ConjugateFractionalHardy { beta: need_beta()? },
        "mlinear" => OperatorKind::MlinearHardy { m: arity },
        "product" => OperatorKind::ProductHardy { m: arity },
        "weighted" => OperatorKind::WeightedAverage {
            psi: WeightFunction::PowerLaw { coeff: psi_coeff, sigma: need_sigma()? },
        },
        "weighted-conjugate" => OperatorKind::WeightedConjugateAverage {
            psi: WeightFunction::PowerLaw { coeff: psi_coeff, sigma: need_sigma()? },
        },
        other => {
            return Err(CliError::Usage(format!("unknown operator {other:?}")));
        }
    })
}

enum CliError {
    /// Validation or math failure -> exit 2.
    Math(String),
    /// Malformed flags or config -> exit 64.
    Usage(String),
    /// Verification ran and failed -> exit 1.
    Failed,
}

impl CliError {
    fn math(e: hardy_core::Error) -> CliError {
        CliError::Math(e.to_string())
    }
}

fn write_output(out: &Option<String>, payload: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::Math(format!("writing {path}: {e}"))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn params_summary(case: &TheoremCase) -> String {
    case.params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_constants(
    theorem: &str,
    flags: &CaseFlags,
    variant: Variant,
    format: Format,
) -> Result<(), CliError> {
    let case = build_case(theorem, flags)?;
    let variant = match variant {
        Variant::Printed => ConstantVariant::Printed,
        Variant::Derived => ConstantVariant::Derived,
    };
    let c = sharp_constant_variant(&case, variant).map_err(CliError::math)?;
    let kind = match case.theorem_id.constant_type() {
        ConstantType::Exact => "exact",
        ConstantType::Equivalence => "equivalence",
    };
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "theorem": case.theorem_id.label(),
                "params": case.params,
                "constant": c,
                "type": kind,
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        _ => println!(
            "theorem={} constant={} type={} {}",
            case.theorem_id.label(),
            sig17(c),
            kind,
            params_summary(&case)
        ),
    }
    Ok(())
}

fn summary_line(report: &verify::VerificationReport) -> String {
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    let extrapolated = match report.extrapolated_ratio {
        Some(x) => sig17(x),
        None => "n/a".into(),
    };
    let lower = match report.lower_bound_ok {
        Some(true) => "ok",
        Some(false) => "fail",
        None => "n/a",
    };
    format!(
        "{verdict} theorem={} C={} extrapolated={} upper={} lower={}",
        report.case.theorem_id.label(),
        sig17(report.constant),
        extrapolated,
        if report.upper_bound_ok { "ok" } else { "fail" },
        lower
    )
}

fn report_payload(report: &verify::VerificationReport, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["theorem", "param-hash", "epsilon", "ratio", "constant", "verdicts"])
                .unwrap();
            for row in report.csv_rows() {
                w.write_record(&row).unwrap();
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        }
        _ => serde_json::to_string_pretty(report).unwrap() + "\n",
    }
}

fn cmd_verify(
    theorem: &str,
    flags: &CaseFlags,
    run: &RunFlags,
    operator: Operator,
    file: &FileConfig,
) -> Result<(), CliError> {
    let case = build_case(theorem, flags)?;
    let resolved = resolve(run, file).map_err(CliError::Usage)?;
    let config = VerifyConfig {
        ray_average: matches!(operator, Operator::Ray),
        ..resolved.config
    };
    let report = verify::verify_theorem(&case, &config).map_err(CliError::math)?;
    for d in &report.discrepancies {
        eprintln!("note [{}]: {d}", case.theorem_id.label());
    }
    if resolved.out.is_some() || resolved.format != Format::Text {
        write_output(&resolved.out, &report_payload(&report, resolved.format))?;
    }
    println!("{}", summary_line(&report));
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

fn parse_sweep_axis(spec: &str) -> Result<(String, Vec<f64>), CliError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--sweep expects key=v1,v2,..., got {spec:?}")))?;
    let values: Result<Vec<f64>, _> = values.split(',').map(str::parse::<f64>).collect();
    let values =
        values.map_err(|_| CliError::Usage(format!("bad number in --sweep {spec:?}")))?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("empty value list in --sweep {spec:?}")));
    }
    Ok((key.to_string(), values))
}

fn cmd_sweep(
    theorem: &str,
    flags: &CaseFlags,
    run: &RunFlags,
    sweep: &[String],
    file: &FileConfig,
) -> Result<(), CliError> {
    let id = TheoremId::parse(theorem).map_err(CliError::math)?;
    let base = flags.pairs().map_err(CliError::Usage)?;
    let resolved = resolve(run, file).map_err(CliError::Usage)?;
    let axes: Vec<(String, Vec<f64>)> =
        sweep.iter().map(|s| parse_sweep_axis(s)).collect::<Result<_, _>>()?;
    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    if total > 10_000 {
        return Err(CliError::Usage(format!(
            "sweep grid has {total} cases; the limit is 10000"
        )));
    }

    // Cartesian product in axis order; row order is deterministic.
    let mut grids: Vec<Vec<(String, f64)>> = vec![base.clone()];
    for (key, values) in &axes {
        let mut next = Vec::with_capacity(grids.len() * values.len());
        for g in &grids {
            for &v in values {
                let mut g = g.clone();
                g.retain(|(k, _)| k != key);
                g.push((key.clone(), v));
                next.push(g);
            }
        }
        grids = next;
    }
    if axes.is_empty() {
        grids = vec![base];
    }

    let config = resolved.config.clone();
    let runner = |pairs: &Vec<(String, f64)>| -> (String, Option<verify::VerificationReport>, String) {
        let refs: Vec<(&str, f64)> = pairs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let shown = pairs
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        match TheoremCase::new(id, &refs).validate() {
            Err(e) => (shown, None, format!("SKIPPED(validation: {e})")),
            Ok(case) => match verify::verify_theorem(&case, &config) {
                Err(e) => (shown, None, format!("SKIPPED(error: {e})")),
                Ok(report) => {
                    let verdict = if report.passed() { "PASS" } else { "FAIL" }.to_string();
                    (shown, Some(report), verdict)
                }
            },
        }
    };
    let results: Vec<(String, Option<verify::VerificationReport>, String)> = {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(resolved.jobs.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        pool.install(|| grids.par_iter().map(runner).collect())
    };

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theorem", "param-hash", "params", "constant", "extrapolated", "verdict"])
        .unwrap();
    let mut all_ok = true;
    for (shown, report, verdict) in &results {
        let (hash, constant, extrapolated) = match report {
            Some(r) => (
                r.param_hash(),
                sig17(r.constant),
                r.extrapolated_ratio.map(sig17).unwrap_or_else(|| "n/a".into()),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        w.write_record([id.label(), &hash, shown, &constant, &extrapolated, verdict])
            .unwrap();
        println!("{verdict} theorem={} {shown}", id.label());
        if verdict == "FAIL" {
            all_ok = false;
        }
    }
    let payload = String::from_utf8(w.into_inner().unwrap()).unwrap();
    if let Some(path) = &resolved.out {
        std::fs::write(path, &payload).map_err(|e| CliError::Math(format!("writing {path}: {e}")))?;
    } else {
        let mut err = std::io::stderr();
        let _ = err.write_all(payload.as_bytes());
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

fn cmd_extremal(theorem: &str, flags: &CaseFlags, eps: Option<f64>) -> Result<(), CliError> {
    let case = build_case(theorem, flags)?;
    let family = extremal::make_extremal(&case, eps).map_err(CliError::math)?;
    let doc = serde_json::json!({
        "theorem": case.theorem_id.label(),
        "epsilon": family.epsilon,
        "epsilon_max": family.epsilon_max,
        "degenerate_pattern": family.degenerate_pattern,
        "functions": family.functions,
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn cmd_norm(
    space: &str,
    function: &str,
    n: i64,
    run: &RunFlags,
    file: &FileConfig,
) -> Result<(), CliError> {
    let resolved = resolve(run, file).map_err(CliError::Usage)?;
    let space = parse_space(space)?;
    let f = read_function(function)?;
    let v = norms::norm(&f, &space, n, &resolved.config.grid).map_err(CliError::math)?;
    println!("{}", sig17(v));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_apply(
    operator: &str,
    functions: &[String],
    n: i64,
    beta: Option<f64>,
    psi_sigma: Option<f64>,
    psi_coeff: f64,
    run: &RunFlags,
    file: &FileConfig,
) -> Result<(), CliError> {
    if functions.is_empty() {
        return Err(CliError::Usage("at least one --function is required".into()));
    }
    let resolved = resolve(run, file).map_err(CliError::Usage)?;
    let op = parse_operator(operator, beta, psi_sigma, psi_coeff, functions.len())?;
    let inputs: Vec<MixedFunction> =
        functions.iter().map(|s| read_function(s)).collect::<Result<_, _>>()?;
    let out = operators::apply(&op, n, &inputs, &resolved.config.grid).map_err(CliError::math)?;
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn cmd_selfcheck(run: &RunFlags, file: &FileConfig) -> Result<(), CliError> {
    let resolved = resolve(run, file).map_err(CliError::Usage)?;
    let grid = &resolved.config.grid;
    let mut failures = 0usize;
    let mut check = |name: &str, outcome: Result<f64, String>, tol: f64| match outcome {
        Ok(err) if err <= tol => println!("PASS {name}: residual {err:.2e} <= {tol:.0e}"),
        Ok(err) => {
            failures += 1;
            println!("FAIL {name}: residual {err:.2e} > {tol:.0e}");
        }
        Err(e) => {
            failures += 1;
            println!("FAIL {name}: {e}");
        }
    };

    // Beta-Gamma identity on a fixed grid
    let bg = (|| -> Result<f64, String> {
        let mut worst = 0.0f64;
        for i in 1..=40 {
            for j in 1..=40 {
                let (a, b) = (0.6 * i as f64, 0.6 * j as f64);
                let lhs = beta_fn(a, b).map_err(|e| e.to_string())?.ln();
                let rhs = ln_gamma(a).map_err(|e| e.to_string())?
                    + ln_gamma(b).map_err(|e| e.to_string())?
                    - ln_gamma(a + b).map_err(|e| e.to_string())?;
                worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
            }
        }
        Ok(worst)
    })();
    check("beta-gamma identity", bg, 1e-10);

    // sphere area vs ball volume
    let sb = (|| -> Result<f64, String> {
        let mut worst = 0.0f64;
        for n in 1..=20i64 {
            let omega = unit_sphere_area(n).map_err(|e| e.to_string())?;
            let nu = unit_ball_volume(n).map_err(|e| e.to_string())?;
            worst = worst.max((omega - n as f64 * nu).abs() / omega);
        }
        Ok(worst)
    })();
    check("sphere area = n * ball volume", sb, 1e-12);

    // ray-average eigen-identity
    let eigen = (|| -> Result<f64, String> {
        let case = TheoremCase::new(
            TheoremId::T3_3,
            &[("n", 3.0), ("p", 2.0), ("pt", 2.0), ("lambda", -0.25)],
        )
        .validate()
        .map_err(|e| e.to_string())?;
        let fam = extremal::make_extremal(&case, None).map_err(|e| e.to_string())?;
        let r = verify::measure_ratio(&case, &fam.functions, grid).map_err(|e| e.to_string())?;
        Ok((r - 4.0 / 3.0).abs() / (4.0 / 3.0))
    })();
    check("oscillation eigen-identity", eigen, 1e-6);

    // weighted-average moment identity
    let moment = (|| -> Result<f64, String> {
        let case = TheoremCase::new(
            TheoremId::T5_3U,
            &[
                ("n", 2.0),
                ("p", 2.0),
                ("q", 2.0),
                ("pt", 2.0),
                ("alpha", 0.5),
                ("sigma", 1.0),
                ("lambda", 0.25),
            ],
        )
        .validate()
        .map_err(|e| e.to_string())?;
        let fam = extremal::make_extremal(&case, None).map_err(|e| e.to_string())?;
        let r = verify::measure_ratio(&case, &fam.functions, grid).map_err(|e| e.to_string())?;
        Ok((r - 4.0 / 3.0).abs() / (4.0 / 3.0))
    })();
    check("weighted-average moment identity", moment, 1e-8);

    // fractional ball average of the unit-ball indicator, closed form
    let pointwise = (|| -> Result<f64, String> {
        let f = MixedFunction::radial_only(
            hardy_core::RadialProfile::power_cut(1.0, 0.0, 0.0, 1.0).map_err(|e| e.to_string())?,
        );
        let omega = unit_sphere_area(2).map_err(|e| e.to_string())?;
        let nu = unit_ball_volume(2).map_err(|e| e.to_string())?;
        let m0 = omega / (2.0 * nu.powf(0.5));
        let mut worst = 0.0f64;
        for i in 0..50 {
            let r = 10f64.powf(-2.0 + 4.0 * (i as f64 + 0.5) / 50.0);
            let want = if r < 1.0 { m0 * r } else { m0 / r };
            let got = operators::fractional_hardy_value(&f, 2, 1.0, r)
                .map_err(|e| e.to_string())?;
            worst = worst.max((got - want).abs() / want);
        }
        Ok(worst)
    })();
    check("fractional average closed form", pointwise, 1e-8);

    // norm reduction: shell norm with zero weight and q = p is the mixed norm
    let reduction = (|| -> Result<f64, String> {
        let f = MixedFunction::radial_only(
            hardy_core::RadialProfile::power_cut(1.3, -0.7, 0.05, 8.0).map_err(|e| e.to_string())?,
        );
        let mixed = norms::norm(
            &f,
            &SpaceSpec::MixedLebesgue { p: 2.0, pt: 2.0, alpha: 0.0 },
            3,
            grid,
        )
        .map_err(|e| e.to_string())?;
        let shell = norms::norm(
            &f,
            &SpaceSpec::Herz { alpha: 0.0, q: 2.0, p: 2.0, pt: 2.0 },
            3,
            grid,
        )
        .map_err(|e| e.to_string())?;
        Ok((mixed - shell).abs() / mixed)
    })();
    check("shell norm reduction", reduction, 1e-8);

    // odd pattern under the literal ball average vanishes identically
    let annihilation = (|| -> Result<f64, String> {
        let case = TheoremCase::new(
            TheoremId::T3_3,
            &[("n", 3.0), ("p", 2.0), ("pt", 2.0), ("lambda", -0.25)],
        )
        .validate()
        .map_err(|e| e.to_string())?;
        let fam = extremal::make_extremal(&case, None).map_err(|e| e.to_string())?;
        let out = operators::apply(&OperatorKind::SphericalHardy, 3, &fam.functions, grid)
            .map_err(|e| e.to_string())?;
        let mut peak = 0.0f64;
        for r in grid.radii() {
            peak = peak.max(out.evaluate(r, Hemisphere::Pos).map_err(|e| e.to_string())?.abs());
        }
        Ok(peak)
    })();
    check("odd-pattern annihilation", annihilation, 1e-14);

    if failures == 0 {
        Ok(())
    } else {
        eprintln!("{failures} selfcheck(s) failed");
        Err(CliError::Failed)
    }
}

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits; everything else is usage
            use clap::error::ErrorKind;
            let _ = e.print();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Ok(());
            }
            std::process::exit(EXIT_USAGE as i32);
        }
    };
    let file = load_config(&cli.config).map_err(CliError::Usage)?;
    match &cli.command {
        Command::Constants { theorem, case, variant, format } => {
            cmd_constants(theorem, case, *variant, *format)
        }
        Command::Verify { theorem, case, run, operator } => {
            cmd_verify(theorem, case, run, *operator, &file)
        }
        Command::Sweep { theorem, case, run, sweep } => {
            cmd_sweep(theorem, case, run, sweep, &file)
        }
        Command::Extremal { theorem, case, eps } => cmd_extremal(theorem, case, *eps),
        Command::Norm { space, function, n, run } => cmd_norm(space, function, *n, run, &file),
        Command::Apply { operator, function, n, beta, psi_sigma, psi_coeff, run } => cmd_apply(
            operator, function, *n, *beta, *psi_sigma, *psi_coeff, run, &file,
        ),
        Command::Selfcheck { run } => cmd_selfcheck(run, &file),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed) => ExitCode::from(EXIT_VERIFY),
        Err(CliError::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_MATH)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
