//! Command-line front end.
//!
//! ```text
//! nhsim [--tol T] [--output json|csv] [--threads K] <command>
//!
//!   classify <matrix.json>
//!   witness <matrix.json> --class C
//!   generate --class C --dim N --seed S [--non-normal]
//!   specht <A.json> <B.json>
//!   specht-generators [<matrix.json>] [--class C] [--seed S]
//!   scan <family.json> --class C --grid NAME=LO:HI:N ...
//!   certify <family.json> --at V1,V2,... [--direction D1,...] [--class C]
//! ```
//!
//! `-` reads standard input. `--tol` sets the residual tolerance; without it
//! `NHSIM_TOL` is used, then the built-in default. Exit codes: 0 success,
//! 1 domain failure, 2 usage or input error.

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classes::{
    classify, construct_witness, detect_special_cases, factor, generate_random, GenerateOptions,
    SimilarityClass,
};
use crate::ep::{certify_order, reduced_constraints, scan, splitting_exponent, Axis, ScanConfig};
use crate::error::{Error, Result};
use crate::family::{parse_family, MatrixFamily};
use crate::matrix::ComplexMatrix;
use crate::specht::{
    check_similarity_implies_symmetry_2x2, compare_profiles, n3_counterexample, word_list, word_trace,
    PairComparison, SymmetryKind, COUNTEREXAMPLE_TOL, GENERATOR_TOL,
};
use crate::spectral::{normality_defect, ToleranceConfig};

pub const TOL_ENV: &str = "NHSIM_TOL";
const SPLITTING_STEPS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        Self {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(exit_code: i32, reason: impl std::fmt::Display) -> Self {
        Self {
            exit_code,
            stdout: String::new(),
            stderr: format!("error: {reason}\n"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "nhsim",
    version,
    about = "Similarity classes and exceptional points of non-Hermitian matrices"
)]
struct Cli {
    /// Residual tolerance (overrides NHSIM_TOL)
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    output: Format,
    /// Worker threads for scan
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

fn parse_class(s: &str) -> std::result::Result<SimilarityClass, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Class memberships, witnesses and special cases of a matrix
    Classify { matrix: String },
    /// Witness transform for one class
    Witness {
        matrix: String,
        #[arg(long, value_parser = parse_class)]
        class: SimilarityClass,
    },
    /// Random class member as matrix JSON
    Generate {
        #[arg(long, value_parser = parse_class)]
        class: SimilarityClass,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        non_normal: bool,
    },
    /// Unitary similarity by Specht word traces
    Specht { a: String, b: String },
    /// Symmetry generators (2x2) or word-trace evidence against them
    SpechtGenerators {
        matrix: Option<String>,
        #[arg(long, value_parser = parse_class)]
        class: Option<SimilarityClass>,
        /// Seed for the generated 3x3 counterexample when no matrix is given
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Grid search for exceptional points of a family
    Scan {
        family: String,
        #[arg(long, value_parser = parse_class)]
        class: SimilarityClass,
        /// NAME=LO:HI:N (NAME may also be a parameter index)
        #[arg(long, required = true, allow_hyphen_values = true)]
        grid: Vec<String>,
        #[arg(long)]
        seed_threshold: Option<f64>,
        #[arg(long)]
        merge_radius: Option<f64>,
    },
    /// Order certificate and splitting exponent at a parameter point
    Certify {
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        #[arg(long, value_parser = parse_class)]
        class: Option<SimilarityClass>,
    },
}

/// Domain failures exit with 1, malformed input with 2.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::InvalidMatrix(_)
        | Error::DimensionMismatch(_) => 2,
        _ => 1,
    }
}

/// Runs the CLI with `NHSIM_TOL` from the process environment.
pub fn dispatch<I, S>(argv: I, stdin: &mut dyn Read) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run(argv, stdin, std::env::var(TOL_ENV).ok().as_deref())
}

/// [`dispatch`] with an explicit `NHSIM_TOL` value.
pub fn run<I, S>(argv: I, stdin: &mut dyn Read, env_tol: Option<&str>) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandResult::ok(e.to_string()),
                _ => {
                    let text = e.to_string();
                    let line = text.lines().next().unwrap_or("usage error");
                    CommandResult::fail(2, line.trim_start_matches("error: "))
                }
            };
        }
    };
    let tolerances = match resolve_tolerances(cli.tol, env_tol) {
        Ok(t) => t,
        Err(e) => return CommandResult::fail(2, e),
    };
    let mut notes = String::new();
    match execute(&cli, tolerances, stdin, &mut notes) {
        Ok(stdout) => CommandResult {
            stderr: notes,
            ..CommandResult::ok(stdout)
        },
        Err(e) => CommandResult::fail(exit_code(&e), e),
    }
}

/// Precedence: flag, then environment, then default.
fn resolve_tolerances(flag: Option<f64>, env: Option<&str>) -> Result<ToleranceConfig> {
    let mut cfg = ToleranceConfig::default();
    let tol = match (flag, env) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => Some(
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("{TOL_ENV}='{s}' is not a number")))?,
        ),
        (None, None) => None,
    };
    if let Some(t) = tol {
        cfg.residual_tol = t;
    }
    cfg.validate().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(cfg)
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if path == "-" {
        stdin.read_to_end(&mut buf)?;
    } else {
        buf = std::fs::read(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    }
    Ok(buf)
}

fn read_matrix(path: &str, stdin: &mut dyn Read) -> Result<ComplexMatrix> {
    let bytes = read_input(path, stdin)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::Parse(format!("{path}: not UTF-8")))?;
    ComplexMatrix::from_json(text).map_err(|e| match e {
        Error::Json(j) => Error::Parse(format!("{path}: {j}")),
        other => other,
    })
}

fn read_family(path: &str, stdin: &mut dyn Read) -> Result<MatrixFamily> {
    parse_family(&read_input(path, stdin)?)
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("payload serializes") + "\n"
}

fn json_only(cli: &Cli, command: &str) -> Result<()> {
    if cli.output == Format::Csv {
        return Err(Error::Parse(format!(
            "--output csv is not available for {command}"
        )));
    }
    Ok(())
}

fn execute(cli: &Cli, cfg: ToleranceConfig, stdin: &mut dyn Read, notes: &mut String) -> Result<String> {
    match &cli.command {
        Command::Classify { matrix } => {
            json_only(cli, "classify")?;
            let h = read_matrix(matrix, stdin)?;
            let c = classify(&h, &cfg)?;
            let spectral_only: Vec<Value> = c
                .spectral_only
                .iter()
                .map(|(class, reason)| json!({"class": class, "reason": reason}))
                .collect();
            Ok(pretty(&json!({
                "dim": h.dim(),
                "classes": c.classes(),
                "witnesses": c.witnesses,
                "spectral_only": spectral_only,
                "special_cases": detect_special_cases(&h, &cfg).flags,
                "normality_defect": normality_defect(&h),
            })))
        }
        Command::Witness { matrix, class } => {
            json_only(cli, "witness")?;
            let h = read_matrix(matrix, stdin)?;
            let w = construct_witness(&h, *class, &cfg)?;
            let (first, second) = factor(&h, *class, &cfg)?;
            Ok(pretty(&json!({
                "witness": w,
                "factors": [first, second],
            })))
        }
        Command::Generate {
            class,
            dim,
            seed,
            non_normal,
        } => {
            json_only(cli, "generate")?;
            if *dim == 0 {
                return Err(Error::Parse("--dim must be positive".into()));
            }
            let opts = GenerateOptions {
                non_normal: *non_normal,
                ..Default::default()
            };
            Ok(generate_random(*class, *dim, *seed, &opts)?.to_json() + "\n")
        }
        Command::Specht { a, b } => {
            let a = read_matrix(a, stdin)?;
            let b = read_matrix(b, stdin)?;
            specht(cli, &a, &b, cfg.residual_tol)
        }
        Command::SpechtGenerators { matrix, class, seed } => {
            json_only(cli, "specht-generators")?;
            match matrix {
                Some(path) => {
                    let h = read_matrix(path, stdin)?;
                    specht_generators(&h, *class, &cfg)
                }
                None => {
                    let class = class.ok_or_else(|| {
                        Error::Parse(
                            "specht-generators needs a matrix or --class for a generated counterexample"
                                .into(),
                        )
                    })?;
                    Ok(n3_counterexample(class, *seed)?.to_json() + "\n")
                }
            }
        }
        Command::Scan {
            family,
            class,
            grid,
            seed_threshold,
            merge_radius,
        } => {
            let f = read_family(family, stdin)?;
            let mut scfg = ScanConfig::new(parse_grid(&f, grid)?);
            scfg.tolerances = cfg;
            scfg.threads = cli.threads;
            if let Some(t) = seed_threshold {
                scfg.seed_threshold = *t;
            }
            if let Some(r) = merge_radius {
                scfg.merge_radius = *r;
            }
            let out = scan(&f, *class, &scfg)?;
            if let Some(note) = &out.note {
                notes.push_str(&format!("note: {note}\n"));
            }
            match cli.output {
                Format::Json => Ok(out.to_jsonl(&f.names)),
                Format::Csv => out.to_csv(&f.names),
            }
        }
        Command::Certify {
            family,
            at,
            direction,
            class,
        } => {
            json_only(cli, "certify")?;
            let f = read_family(family, stdin)?;
            certify(&f, at, direction.as_deref(), *class, &cfg)
        }
    }
}

fn specht(cli: &Cli, a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<String> {
    let words = word_list(a.dim())?;
    let worst = compare_profiles(a, b, &words)?;
    let scale = a.frobenius_norm().max(b.frobenius_norm());
    let rows: Vec<(String, _, _, f64)> = words
        .iter()
        .map(|w| {
            let (ta, tb) = (word_trace(a, w), word_trace(b, w));
            let denom = scale.powi(w.len() as i32);
            let d = if denom > 0.0 {
                (ta - tb).norm() / denom
            } else {
                0.0
            };
            (w.to_string(), ta, tb, d)
        })
        .collect();
    match cli.output {
        Format::Json => {
            let table: Vec<Value> = rows
                .iter()
                .map(|(w, ta, tb, d)| json!({"word": w, "trace_a": ta, "trace_b": tb, "difference": d}))
                .collect();
            Ok(pretty(&json!({
                "unitarily_similar": worst.difference <= tol,
                "tolerance": tol,
                "worst": worst,
                "traces": table,
            })))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
            w.write_record(["word", "re_a", "im_a", "re_b", "im_b", "difference"])
                .map_err(err)?;
            for (word, ta, tb, d) in &rows {
                w.write_record([
                    word.clone(),
                    ta.re.to_string(),
                    ta.im.to_string(),
                    tb.re.to_string(),
                    tb.im.to_string(),
                    d.to_string(),
                ])
                .map_err(err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn specht_generators(
    h: &ComplexMatrix,
    class: Option<SimilarityClass>,
    cfg: &ToleranceConfig,
) -> Result<String> {
    let classes = match class {
        Some(c) => vec![c],
        None => {
            let found = classify(h, cfg)?.classes();
            if found.is_empty() {
                return Err(Error::mismatch(
                    SimilarityClass::PseudoHermitian,
                    "matrix belongs to none of the similarity classes",
                ));
            }
            found
        }
    };
    if h.dim() == 2 {
        let reports = classes
            .iter()
            .map(|&c| check_similarity_implies_symmetry_2x2(h, c, cfg))
            .collect::<Result<Vec<_>>>()?;
        return Ok(pretty(&json!({
            "dim": 2,
            "generator_tolerance": GENERATOR_TOL,
            "reports": reports,
        })));
    }
    let words = word_list(h.dim())?;
    let mut evidence = Vec::new();
    for c in classes {
        let w = construct_witness(h, c, cfg)?;
        let comparisons = SymmetryKind::for_class(c)
            .into_iter()
            .map(|kind| {
                let worst = compare_profiles(h, &kind.partner(h), &words)?;
                Ok(PairComparison {
                    kind,
                    partner: kind.partner_label(),
                    differs: worst.difference > COUNTEREXAMPLE_TOL,
                    worst,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        evidence.push(json!({"class": c, "witness_residual": w.residual, "comparisons": comparisons}));
    }
    Ok(pretty(&json!({
        "dim": h.dim(),
        "counterexample_tolerance": COUNTEREXAMPLE_TOL,
        "evidence": evidence,
    })))
}

fn parse_number(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("{what}: '{s}' is not finite")));
    }
    Ok(v)
}

fn param_index(f: &MatrixFamily, name: &str) -> Result<usize> {
    f.param_index(name)
        .or_else(|| name.parse::<usize>().ok().filter(|&i| i < f.num_params))
        .ok_or_else(|| {
            Error::Parse(format!(
                "unknown parameter '{name}' (known: {})",
                f.names.join(", ")
            ))
        })
}

/// `NAME=LO:HI:N` per entry; unlisted parameters are pinned at their default.
fn parse_grid(f: &MatrixFamily, specs: &[String]) -> Result<Vec<Axis>> {
    let mut axes: Vec<Option<Axis>> = vec![None; f.num_params];
    for spec in specs {
        let (name, range) = spec
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--grid '{spec}': expected NAME=LO:HI:N")))?;
        let i = param_index(f, name.trim())?;
        let parts: Vec<&str> = range.split(':').collect();
        let axis = match parts.as_slice() {
            [v] => Axis::fixed(parse_number(v, "--grid")?),
            [lo, hi, n] => {
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("--grid '{spec}': bad point count '{n}'")))?;
                Axis::new(parse_number(lo, "--grid")?, parse_number(hi, "--grid")?, n)?
            }
            _ => return Err(Error::Parse(format!("--grid '{spec}': expected NAME=LO:HI:N"))),
        };
        if axes[i].replace(axis).is_some() {
            return Err(Error::Parse(format!("--grid given twice for '{name}'")));
        }
    }
    axes.into_iter()
        .enumerate()
        .map(|(i, a)| match (a, &f.defaults) {
            (Some(a), _) => Ok(a),
            (None, Some(d)) => Ok(Axis::fixed(d[i])),
            (None, None) => Err(Error::Parse(format!(
                "parameter '{}' needs --grid (the family has no defaults)",
                f.names[i]
            ))),
        })
        .collect()
}

fn parse_vector(f: &MatrixFamily, s: &str, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.iter().all(|p| p.contains('=')) {
        let mut v = f.defaults.clone().unwrap_or_else(|| vec![f64::NAN; f.num_params]);
        for p in parts {
            let (name, value) = p.split_once('=').expect("checked");
            v[param_index(f, name.trim())?] = parse_number(value, what)?;
        }
        if let Some(i) = v.iter().position(|x| x.is_nan()) {
            return Err(Error::Parse(format!(
                "{what}: missing value for '{}'",
                f.names[i]
            )));
        }
        return Ok(v);
    }
    let v = parts
        .iter()
        .map(|p| parse_number(p, what))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != f.num_params {
        return Err(Error::Parse(format!(
            "{what}: expected {} values, got {}",
            f.num_params,
            v.len()
        )));
    }
    Ok(v)
}

fn certify(
    f: &MatrixFamily,
    at: &str,
    direction: Option<&str>,
    class: Option<SimilarityClass>,
    cfg: &ToleranceConfig,
) -> Result<String> {
    let point = parse_vector(f, at, "--at")?;
    let direction = match direction {
        Some(d) => parse_vector(f, d, "--direction")?,
        None => (0..f.num_params)
            .map(|i| if i == 0 { 1.0 } else { 0.0 })
            .collect(),
    };
    let h = f.evaluate(&point)?;
    let cert = certify_order(&h, cfg)?;
    let clusters: Vec<Value> = cert
        .jordan
        .clusters
        .iter()
        .map(|c| json!({"centroid": c.centroid, "multiplicity": c.multiplicity(), "block_sizes": c.block_sizes}))
        .collect();
    let mut payload = json!({
        "point": point,
        "order": cert.order,
        "algebraic_multiplicity": cert.algebraic_multiplicity,
        "geometric_multiplicity": cert.geometric_multiplicity,
        "is_ep": cert.is_ep,
        "status": cert.describe(),
        "clusters": clusters,
        "jordan_residual": cert.jordan.residual,
        "condition_number": cert.jordan.condition_number,
    });
    if let Some(class) = class {
        let system = reduced_constraints(f, class)?;
        let values = system.evaluate(&h)?;
        let constraints: Vec<Value> = system
            .active
            .iter()
            .zip(values)
            .map(|(c, v)| json!({"label": c.label, "value": v}))
            .collect();
        payload["constraints"] = Value::Array(constraints);
    }
    if cert.algebraic_multiplicity >= 2 {
        match splitting_exponent(f, &point, &direction, SPLITTING_STEPS, cfg) {
            Ok(fit) => {
                payload["splitting"] = json!({
                    "direction": direction,
                    "exponent": fit.exponent,
                    "multiplicity": fit.multiplicity,
                    "max_log_deviation": fit.max_log_deviation,
                    "samples": fit.ts.len(),
                })
            }
            Err(e) => payload["splitting_error"] = json!(e.to_string()),
        }
    }
    Ok(pretty(&payload))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_precedence() {
        assert_eq!(
            resolve_tolerances(Some(1e-6), Some("1e-4")).unwrap().residual_tol,
            1e-6
        );
        assert_eq!(resolve_tolerances(None, Some("1e-4")).unwrap().residual_tol, 1e-4);
        assert_eq!(
            resolve_tolerances(None, None).unwrap().residual_tol,
            ToleranceConfig::default().residual_tol
        );
        assert!(resolve_tolerances(None, Some("tight")).is_err());
        assert!(resolve_tolerances(Some(-1.0), None).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let mut empty: &[u8] = b"";
        let r = run(["nhsim", "frobnicate"], &mut empty, None);
        assert_eq!(r.exit_code, 2);
        assert_eq!(r.stderr.lines().count(), 1);
        let r = run(["nhsim", "classify", "-"], &mut &b"{not json"[..], None);
        assert_eq!(r.exit_code, 2);
    }

    #[test]
    fn generate_is_reproducible() {
        let args = [
            "nhsim", "generate", "--class", "chiral", "--dim", "3", "--seed", "4",
        ];
        let a = run(args, &mut &b""[..], None);
        let b = run(args, &mut &b""[..], None);
        assert_eq!(a.exit_code, 0);
        assert_eq!(a.stdout, b.stdout);
        assert!(ComplexMatrix::from_json(&a.stdout).is_ok());
    }
}
